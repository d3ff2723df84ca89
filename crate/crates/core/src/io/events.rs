//! Event files.
//!
//! Binary layout (all integers little-endian, no padding):
//!
//! ```text
//! offset  size  field
//! 0       4     magic "EVS1"
//! 4       2     u16 width
//! 6       2     u16 height
//! 8       8     u64 event count
//! 16      13*n  records: u64 t (µs), u16 x, u16 y, i8 p (-1 or +1)
//! ```
//!
//! The text form is a `t,x,y,p` header followed by one event per line. It
//! carries no sensor geometry, so readers take it from the caller or infer
//! it from the largest coordinates.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::event::{Event, EventStream, Polarity};

pub const MAGIC: &[u8; 4] = b"EVS1";
pub const HEADER_LEN: usize = 16;
pub const RECORD_LEN: usize = 13;
pub const TEXT_HEADER: &str = "t,x,y,p";

pub fn encode_binary(stream: &EventStream) -> Vec<u8> {
    let mut buf = Vec::with_capacity(HEADER_LEN + RECORD_LEN * stream.len());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&stream.width().to_le_bytes());
    buf.extend_from_slice(&stream.height().to_le_bytes());
    buf.extend_from_slice(&(stream.len() as u64).to_le_bytes());
    for e in stream.events() {
        buf.extend_from_slice(&e.t.to_le_bytes());
        buf.extend_from_slice(&e.x.to_le_bytes());
        buf.extend_from_slice(&e.y.to_le_bytes());
        buf.extend_from_slice(&e.p.as_i8().to_le_bytes());
    }
    buf
}

pub fn decode_binary(bytes: &[u8], name: &str) -> Result<EventStream> {
    let at = |offset: usize| format!("{name}: byte {offset}");
    if bytes.len() < HEADER_LEN {
        return Err(Error::parse(
            at(bytes.len()),
            format!("truncated header ({} of {HEADER_LEN} bytes)", bytes.len()),
        ));
    }
    if &bytes[..4] != MAGIC {
        return Err(Error::parse(at(0), "bad magic, expected \"EVS1\""));
    }
    let width = u16::from_le_bytes([bytes[4], bytes[5]]);
    let height = u16::from_le_bytes([bytes[6], bytes[7]]);
    let count = u64::from_le_bytes(bytes[8..16].try_into().expect("8 bytes"));
    let body = &bytes[HEADER_LEN..];
    let expected = (count as u128) * RECORD_LEN as u128;
    if (body.len() as u128) < expected {
        let complete = body.len() / RECORD_LEN;
        return Err(Error::parse(
            at(HEADER_LEN + complete * RECORD_LEN),
            format!("truncated record {complete} of {count}"),
        ));
    }
    if (body.len() as u128) > expected {
        return Err(Error::parse(
            at(HEADER_LEN + expected as usize),
            format!("{} trailing bytes after {count} records", body.len() as u128 - expected),
        ));
    }
    if width == 0 || height == 0 {
        return Err(Error::parse(at(4), format!("zero sensor geometry {width}x{height}")));
    }

    let mut events = Vec::with_capacity(count as usize);
    for (i, rec) in body.chunks_exact(RECORD_LEN).enumerate() {
        let offset = HEADER_LEN + i * RECORD_LEN;
        let t = u64::from_le_bytes(rec[0..8].try_into().expect("8 bytes"));
        let x = u16::from_le_bytes([rec[8], rec[9]]);
        let y = u16::from_le_bytes([rec[10], rec[11]]);
        let raw_p = rec[12] as i8;
        let p = Polarity::from_i8(raw_p).ok_or_else(|| {
            Error::parse(at(offset + 12), format!("record {i}: polarity {raw_p} not in {{-1, +1}}"))
        })?;
        if x >= width || y >= height {
            return Err(Error::parse(
                at(offset + 8),
                format!("record {i}: ({x}, {y}) outside {width}x{height} sensor"),
            ));
        }
        events.push(Event { t, x, y, p });
    }
    EventStream::new(width, height, events)
}

pub fn encode_text(stream: &EventStream) -> String {
    let mut out = String::with_capacity(16 * (stream.len() + 1));
    out.push_str(TEXT_HEADER);
    out.push('\n');
    for e in stream.events() {
        out.push_str(&format!("{},{},{},{}\n", e.t, e.x, e.y, e.p.as_i8()));
    }
    out
}

/// Parses the text form. With `geometry` absent the sensor is sized to the
/// largest coordinates plus one (1x1 for an empty file).
pub fn decode_text(text: &str, name: &str, geometry: Option<(u16, u16)>) -> Result<EventStream> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == TEXT_HEADER => {}
        _ => {
            return Err(Error::parse(
                format!("{name}: line 1"),
                format!("expected header \"{TEXT_HEADER}\""),
            ))
        }
    }
    let mut events = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let loc = || format!("{name}: line {}", idx + 1);
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(Error::parse(loc(), format!("expected 4 fields, found {}", fields.len())));
        }
        let t: u64 = fields[0]
            .parse()
            .map_err(|_| Error::parse(loc(), format!("bad timestamp {:?}", fields[0])))?;
        let x: u16 = fields[1]
            .parse()
            .map_err(|_| Error::parse(loc(), format!("bad x {:?}", fields[1])))?;
        let y: u16 = fields[2]
            .parse()
            .map_err(|_| Error::parse(loc(), format!("bad y {:?}", fields[2])))?;
        let p = fields[3]
            .parse::<i8>()
            .ok()
            .and_then(Polarity::from_i8)
            .ok_or_else(|| {
                Error::parse(loc(), format!("polarity {:?} not in {{-1, +1}}", fields[3]))
            })?;
        if let Some((w, h)) = geometry {
            if x >= w || y >= h {
                return Err(Error::parse(loc(), format!("({x}, {y}) outside {w}x{h} sensor")));
            }
        }
        events.push(Event { t, x, y, p });
    }
    let (width, height) = match geometry {
        Some(g) => g,
        None => {
            let w = events.iter().map(|e| e.x).max().map_or(1, |m| m.saturating_add(1));
            let h = events.iter().map(|e| e.y).max().map_or(1, |m| m.saturating_add(1));
            (w, h)
        }
    };
    EventStream::new(width, height, events)
}

fn is_text_path(path: &Path) -> bool {
    matches!(
        path.extension().and_then(|e| e.to_str()),
        Some("csv") | Some("txt")
    )
}

/// Reads either format, recognizing binary files by their magic.
pub fn read_events(path: impl AsRef<Path>, geometry: Option<(u16, u16)>) -> Result<EventStream> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let name = path.display().to_string();
    if bytes.starts_with(MAGIC) || !is_text_path(path) {
        return decode_binary(&bytes, &name);
    }
    let text = String::from_utf8(bytes)
        .map_err(|e| Error::parse(name.clone(), format!("not UTF-8 text: {e}")))?;
    decode_text(&text, &name, geometry)
}

/// Writes the text form for `.csv`/`.txt` paths and the binary form otherwise.
pub fn write_events(path: impl AsRef<Path>, stream: &EventStream) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let res = if is_text_path(path) {
        w.write_all(encode_text(stream).as_bytes())
    } else {
        w.write_all(&encode_binary(stream))
    };
    res.and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}
