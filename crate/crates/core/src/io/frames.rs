//! Frame directories: one binary graymap (`P5`, maxval 255) per frame named
//! `frame_%06d.pgm`, plus an `index.csv` listing `frame_index,t_us`.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

pub const INDEX_FILE: &str = "index.csv";
pub const INDEX_HEADER: &str = "frame_index,t_us";

/// One grayscale frame, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub t: u64,
    pub pixels: Vec<u8>,
}

/// Timestamped frames sharing one geometry, strictly increasing in time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameSequence {
    width: u16,
    height: u16,
    frames: Vec<Frame>,
}

impl FrameSequence {
    pub fn new(width: u16, height: u16, frames: Vec<Frame>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::invalid(format!(
                "frame geometry must be non-zero, got {width}x{height}"
            )));
        }
        let n = usize::from(width) * usize::from(height);
        for (k, f) in frames.iter().enumerate() {
            if f.pixels.len() != n {
                return Err(Error::invalid(format!(
                    "frame {k} has {} pixels, expected {width}x{height}",
                    f.pixels.len()
                )));
            }
        }
        if frames.windows(2).any(|w| w[0].t >= w[1].t) {
            return Err(Error::invalid("non-monotone timestamps"));
        }
        Ok(FrameSequence {
            width,
            height,
            frames,
        })
    }

    pub fn width(&self) -> u16 {
        self.width
    }

    pub fn height(&self) -> u16 {
        self.height
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }
}

pub fn frame_file_name(index: usize) -> String {
    format!("frame_{index:06}.pgm")
}

pub fn encode_pgm(width: u16, height: u16, pixels: &[u8]) -> Vec<u8> {
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    out.extend_from_slice(pixels);
    out
}

/// Returns `(width, height, pixels)`. Accepts `#` comments in the header and
/// any maxval up to 255; sample values are kept as stored.
pub fn decode_pgm(bytes: &[u8], name: &str) -> Result<(u16, u16, Vec<u8>)> {
    let err = |msg: String| Error::parse(name.to_string(), msg);
    let mut pos = 0;
    let mut token = || -> Result<String> {
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            break;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(err("truncated graymap header".into()));
        }
        Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
    };
    let magic = token()?;
    if magic != "P5" {
        return Err(err(format!("expected binary graymap magic P5, found {magic:?}")));
    }
    let mut number = |what: &str| -> Result<u32> {
        let tok = token()?;
        tok.parse()
            .map_err(|_| err(format!("bad {what} {tok:?} in graymap header")))
    };
    let width = number("width")?;
    let height = number("height")?;
    let maxval = number("maxval")?;
    if !(1..=255).contains(&maxval) {
        return Err(err(format!("maxval {maxval} is not an 8-bit graymap")));
    }
    let (Ok(width), Ok(height)) = (u16::try_from(width), u16::try_from(height)) else {
        return Err(err(format!("graymap {width}x{height} too large")));
    };
    // exactly one whitespace byte separates the header from the raster
    pos += 1;
    let n = usize::from(width) * usize::from(height);
    if bytes.len() < pos + n {
        return Err(err(format!(
            "truncated raster: {} of {n} bytes",
            bytes.len().saturating_sub(pos)
        )));
    }
    Ok((width, height, bytes[pos..pos + n].to_vec()))
}

pub fn write_frames(dir: impl AsRef<Path>, seq: &FrameSequence) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut index = String::from(INDEX_HEADER);
    index.push('\n');
    for (k, frame) in seq.frames().iter().enumerate() {
        let path = dir.join(frame_file_name(k));
        fs::write(&path, encode_pgm(seq.width, seq.height, &frame.pixels))
            .map_err(|e| Error::io(&path, e))?;
        index.push_str(&format!("{k},{}\n", frame.t));
    }
    let path = dir.join(INDEX_FILE);
    fs::write(&path, index).map_err(|e| Error::io(&path, e))
}

pub fn read_frames(dir: impl AsRef<Path>) -> Result<FrameSequence> {
    let dir = dir.as_ref();
    let index_path = dir.join(INDEX_FILE);
    let index = fs::read_to_string(&index_path).map_err(|e| Error::io(&index_path, e))?;
    let name = index_path.display().to_string();

    let mut lines = index.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == INDEX_HEADER => {}
        _ => {
            return Err(Error::parse(
                format!("{name}: line 1"),
                format!("expected header \"{INDEX_HEADER}\""),
            ))
        }
    }
    let mut rows: Vec<(usize, u64, usize)> = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let loc = format!("{name}: line {}", idx + 1);
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let [k, t] = fields[..] else {
            return Err(Error::parse(loc, format!("expected 2 fields, found {}", fields.len())));
        };
        let k: usize = k
            .parse()
            .map_err(|_| Error::parse(loc.clone(), format!("bad frame index {k:?}")))?;
        let t: u64 = t
            .parse()
            .map_err(|_| Error::parse(loc.clone(), format!("bad timestamp {t:?}")))?;
        rows.push((k, t, idx + 1));
    }
    rows.sort_by_key(|r| r.0);
    for pair in rows.windows(2) {
        if pair[0].0 == pair[1].0 {
            return Err(Error::parse(
                format!("{name}: line {}", pair[1].2),
                format!("duplicate frame index {}", pair[1].0),
            ));
        }
        if pair[0].1 >= pair[1].1 {
            return Err(Error::parse(
                format!("{name}: line {}", pair[1].2),
                "non-monotone timestamps",
            ));
        }
    }

    let mut geometry = None;
    let mut frames = Vec::with_capacity(rows.len());
    for (k, t, _) in rows {
        let path = dir.join(frame_file_name(k));
        if !path.exists() {
            return Err(Error::invalid(format!(
                "frame {k} listed in index but {} is missing",
                path.display()
            )));
        }
        let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
        let (w, h, pixels) = decode_pgm(&bytes, &path.display().to_string())?;
        match geometry {
            None => geometry = Some((w, h)),
            Some(g) if g != (w, h) => {
                return Err(Error::invalid(format!(
                    "frame {k} is {w}x{h}, earlier frames are {}x{}",
                    g.0, g.1
                )))
            }
            _ => {}
        }
        frames.push(Frame { t, pixels });
    }
    let (width, height) = geometry
        .ok_or_else(|| Error::parse(name, "index lists no frames"))?;
    FrameSequence::new(width, height, frames)
}
