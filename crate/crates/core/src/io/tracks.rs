//! Comma-separated per-frame tracks: box keyframes and the outputs of
//! external face models (identity embeddings, head poses, landmarks,
//! detections).
//!
//! | file       | header                                                  |
//! |------------|---------------------------------------------------------|
//! | boxes      | `frame_index,t_us,x1,y1,x2,y2`                          |
//! | embeddings | `frame_index,e0,...,e511`                               |
//! | poses      | `frame_index,yaw,pitch,roll` (degrees)                  |
//! | landmarks  | `frame_index,x0,y0,...,x105,y105,iod`                   |
//! | detections | `frame_index,confidence,x1,y1,x2,y2` (fields after the  |
//! |            | index may be empty for a frame without a detection)     |
//!
//! Rows are returned sorted by `frame_index`.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::rect::BoxRect;

pub const EMBEDDING_DIM: usize = 512;
pub const LANDMARK_COUNT: usize = 106;

pub const BOX_HEADER: &str = "frame_index,t_us,x1,y1,x2,y2";
pub const POSE_HEADER: &str = "frame_index,yaw,pitch,roll";
pub const DETECTION_HEADER: &str = "frame_index,confidence,x1,y1,x2,y2";

pub fn embedding_header() -> String {
    let mut h = String::from("frame_index");
    for i in 0..EMBEDDING_DIM {
        h.push_str(&format!(",e{i}"));
    }
    h
}

pub fn landmark_header() -> String {
    let mut h = String::from("frame_index");
    for i in 0..LANDMARK_COUNT {
        h.push_str(&format!(",x{i},y{i}"));
    }
    h.push_str(",iod");
    h
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxKeyframe {
    pub frame_index: u64,
    pub t: u64,
    pub rect: BoxRect,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    pub frame_index: u64,
    pub vector: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EmbeddingTrack {
    pub frames: Vec<Embedding>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub frame_index: u64,
    pub yaw: f64,
    pub pitch: f64,
    pub roll: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PoseTrack {
    pub frames: Vec<Pose>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Landmarks {
    pub frame_index: u64,
    pub points: Vec<[f64; 2]>,
    /// Inter-ocular distance in pixels.
    pub iod: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LandmarkTrack {
    pub frames: Vec<Landmarks>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detection {
    pub confidence: f64,
    pub rect: BoxRect,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionFrame {
    pub frame_index: u64,
    pub detection: Option<Detection>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DetectionTrack {
    pub frames: Vec<DetectionFrame>,
}

struct Row<'a> {
    loc: String,
    fields: Vec<&'a str>,
}

impl Row<'_> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::parse(self.loc.clone(), msg)
    }

    fn frame_index(&self) -> Result<u64> {
        self.fields[0]
            .parse()
            .map_err(|_| self.err(format!("bad frame_index {:?}", self.fields[0])))
    }

    fn real(&self, i: usize) -> Result<f64> {
        let v: f64 = self.fields[i]
            .parse()
            .map_err(|_| self.err(format!("column {}: bad number {:?}", i + 1, self.fields[i])))?;
        if !v.is_finite() {
            return Err(self.err(format!("column {}: non-finite value {:?}", i + 1, self.fields[i])));
        }
        Ok(v)
    }
}

/// Splits `text` into rows after checking the header. `columns` gives the
/// expected width; `what` names the payload in width errors.
fn rows<'a>(
    text: &'a str,
    name: &str,
    header: &str,
    columns: usize,
    what: impl Fn(usize) -> String,
) -> Result<Vec<Row<'a>>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == header => {}
        _ => {
            let shown: String = header.chars().take(48).collect();
            return Err(Error::parse(
                format!("{name}: line 1"),
                format!("expected header starting \"{shown}\""),
            ));
        }
    }
    let mut out = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let loc = format!("{name}: line {}", idx + 1);
        if fields.len() != columns {
            return Err(Error::parse(loc, what(fields.len())));
        }
        out.push(Row { loc, fields });
    }
    Ok(out)
}

fn read_text(path: &Path) -> Result<(String, String)> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok((text, path.display().to_string()))
}

fn write_text(path: &Path, text: String) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn no_duplicate_indices<T>(items: &[T], index: impl Fn(&T) -> u64, name: &str) -> Result<()> {
    match items.windows(2).find(|w| index(&w[0]) == index(&w[1])) {
        Some(w) => Err(Error::parse(
            name.to_string(),
            format!("duplicate frame_index {}", index(&w[0])),
        )),
        None => Ok(()),
    }
}

pub fn parse_boxes(text: &str, name: &str) -> Result<Vec<BoxKeyframe>> {
    let mut out = Vec::new();
    for row in rows(text, name, BOX_HEADER, 6, |n| format!("expected 6 columns, found {n}"))? {
        let frame_index = row.frame_index()?;
        let t: u64 = row.fields[1]
            .parse()
            .map_err(|_| row.err(format!("bad t_us {:?}", row.fields[1])))?;
        let rect = BoxRect {
            x1: row.real(2)?,
            y1: row.real(3)?,
            x2: row.real(4)?,
            y2: row.real(5)?,
        };
        if rect.x1 >= rect.x2 || rect.y1 >= rect.y2 {
            return Err(row.err(format!(
                "frame {frame_index}: box requires x1 < x2 and y1 < y2, got ({}, {}, {}, {})",
                rect.x1, rect.y1, rect.x2, rect.y2
            )));
        }
        out.push((row.loc.clone(), BoxKeyframe { frame_index, t, rect }));
    }
    out.sort_by_key(|(_, k)| k.frame_index);
    for w in out.windows(2) {
        if w[0].1.frame_index == w[1].1.frame_index {
            return Err(Error::parse(w[1].0.clone(), "duplicate frame_index"));
        }
        if w[0].1.t >= w[1].1.t {
            return Err(Error::parse(w[1].0.clone(), "keyframe times must strictly increase"));
        }
    }
    Ok(out.into_iter().map(|(_, k)| k).collect())
}

pub fn format_boxes(keyframes: &[BoxKeyframe]) -> String {
    let mut s = format!("{BOX_HEADER}\n");
    for k in keyframes {
        let r = k.rect;
        s.push_str(&format!("{},{},{},{},{},{}\n", k.frame_index, k.t, r.x1, r.y1, r.x2, r.y2));
    }
    s
}

pub fn read_boxes(path: impl AsRef<Path>) -> Result<Vec<BoxKeyframe>> {
    let (text, name) = read_text(path.as_ref())?;
    parse_boxes(&text, &name)
}

pub fn write_boxes(path: impl AsRef<Path>, keyframes: &[BoxKeyframe]) -> Result<()> {
    write_text(path.as_ref(), format_boxes(keyframes))
}

pub fn parse_embeddings(text: &str, name: &str) -> Result<EmbeddingTrack> {
    let header = embedding_header();
    let mut frames = Vec::new();
    for row in rows(text, name, &header, EMBEDDING_DIM + 1, |n| {
        format!("expected {EMBEDDING_DIM} components, found {}", n.saturating_sub(1))
    })? {
        let frame_index = row.frame_index()?;
        let vector = (1..=EMBEDDING_DIM).map(|i| row.real(i)).collect::<Result<_>>()?;
        frames.push(Embedding { frame_index, vector });
    }
    frames.sort_by_key(|f| f.frame_index);
    no_duplicate_indices(&frames, |f| f.frame_index, name)?;
    Ok(EmbeddingTrack { frames })
}

pub fn format_embeddings(track: &EmbeddingTrack) -> Result<String> {
    let mut s = embedding_header();
    s.push('\n');
    for f in &track.frames {
        if f.vector.len() != EMBEDDING_DIM {
            return Err(Error::invalid(format!(
                "frame {}: expected {EMBEDDING_DIM} components, found {}",
                f.frame_index,
                f.vector.len()
            )));
        }
        s.push_str(&f.frame_index.to_string());
        for v in &f.vector {
            s.push_str(&format!(",{v}"));
        }
        s.push('\n');
    }
    Ok(s)
}

pub fn read_embeddings(path: impl AsRef<Path>) -> Result<EmbeddingTrack> {
    let (text, name) = read_text(path.as_ref())?;
    parse_embeddings(&text, &name)
}

pub fn write_embeddings(path: impl AsRef<Path>, track: &EmbeddingTrack) -> Result<()> {
    write_text(path.as_ref(), format_embeddings(track)?)
}

pub fn parse_poses(text: &str, name: &str) -> Result<PoseTrack> {
    let mut frames = Vec::new();
    for row in rows(text, name, POSE_HEADER, 4, |n| format!("expected 4 columns, found {n}"))? {
        frames.push(Pose {
            frame_index: row.frame_index()?,
            yaw: row.real(1)?,
            pitch: row.real(2)?,
            roll: row.real(3)?,
        });
    }
    frames.sort_by_key(|f| f.frame_index);
    no_duplicate_indices(&frames, |f| f.frame_index, name)?;
    Ok(PoseTrack { frames })
}

pub fn format_poses(track: &PoseTrack) -> String {
    let mut s = format!("{POSE_HEADER}\n");
    for p in &track.frames {
        s.push_str(&format!("{},{},{},{}\n", p.frame_index, p.yaw, p.pitch, p.roll));
    }
    s
}

pub fn read_poses(path: impl AsRef<Path>) -> Result<PoseTrack> {
    let (text, name) = read_text(path.as_ref())?;
    parse_poses(&text, &name)
}

pub fn write_poses(path: impl AsRef<Path>, track: &PoseTrack) -> Result<()> {
    write_text(path.as_ref(), format_poses(track))
}

pub fn parse_landmarks(text: &str, name: &str) -> Result<LandmarkTrack> {
    let header = landmark_header();
    let columns = 2 * LANDMARK_COUNT + 2;
    let mut frames = Vec::new();
    for row in rows(text, name, &header, columns, |n| {
        format!("expected {columns} columns ({LANDMARK_COUNT} points and iod), found {n}")
    })? {
        let frame_index = row.frame_index()?;
        let points = (0..LANDMARK_COUNT)
            .map(|i| Ok([row.real(1 + 2 * i)?, row.real(2 + 2 * i)?]))
            .collect::<Result<_>>()?;
        let iod = row.real(columns - 1)?;
        frames.push(Landmarks { frame_index, points, iod });
    }
    frames.sort_by_key(|f| f.frame_index);
    no_duplicate_indices(&frames, |f| f.frame_index, name)?;
    Ok(LandmarkTrack { frames })
}

pub fn format_landmarks(track: &LandmarkTrack) -> Result<String> {
    let mut s = landmark_header();
    s.push('\n');
    for f in &track.frames {
        if f.points.len() != LANDMARK_COUNT {
            return Err(Error::invalid(format!(
                "frame {}: expected {LANDMARK_COUNT} landmarks, found {}",
                f.frame_index,
                f.points.len()
            )));
        }
        s.push_str(&f.frame_index.to_string());
        for [x, y] in &f.points {
            s.push_str(&format!(",{x},{y}"));
        }
        s.push_str(&format!(",{}\n", f.iod));
    }
    Ok(s)
}

pub fn read_landmarks(path: impl AsRef<Path>) -> Result<LandmarkTrack> {
    let (text, name) = read_text(path.as_ref())?;
    parse_landmarks(&text, &name)
}

pub fn write_landmarks(path: impl AsRef<Path>, track: &LandmarkTrack) -> Result<()> {
    write_text(path.as_ref(), format_landmarks(track)?)
}

/// Several rows for one frame collapse to the most confident detection.
pub fn parse_detections(text: &str, name: &str) -> Result<DetectionTrack> {
    let mut frames: Vec<DetectionFrame> = Vec::new();
    for row in rows(text, name, DETECTION_HEADER, 6, |n| {
        format!("expected 6 columns, found {n}")
    })? {
        let frame_index = row.frame_index()?;
        let detection = if row.fields[1..].iter().all(|f| f.is_empty()) {
            None
        } else {
            let confidence = row.real(1)?;
            if !(0.0..=1.0).contains(&confidence) {
                return Err(row.err(format!("confidence {confidence} outside [0, 1]")));
            }
            let rect = BoxRect {
                x1: row.real(2)?,
                y1: row.real(3)?,
                x2: row.real(4)?,
                y2: row.real(5)?,
            };
            rect.validate().map_err(|e| row.err(e.to_string()))?;
            Some(Detection { confidence, rect })
        };
        frames.push(DetectionFrame { frame_index, detection });
    }
    frames.sort_by_key(|f| f.frame_index);
    let mut merged: Vec<DetectionFrame> = Vec::with_capacity(frames.len());
    for f in frames {
        match merged.last_mut() {
            Some(last) if last.frame_index == f.frame_index => {
                let better = match (last.detection, f.detection) {
                    (None, Some(_)) => true,
                    (Some(a), Some(b)) => b.confidence > a.confidence,
                    _ => false,
                };
                if better {
                    last.detection = f.detection;
                }
            }
            _ => merged.push(f),
        }
    }
    Ok(DetectionTrack { frames: merged })
}

pub fn format_detections(track: &DetectionTrack) -> String {
    let mut s = format!("{DETECTION_HEADER}\n");
    for f in &track.frames {
        match f.detection {
            Some(d) => s.push_str(&format!(
                "{},{},{},{},{},{}\n",
                f.frame_index, d.confidence, d.rect.x1, d.rect.y1, d.rect.x2, d.rect.y2
            )),
            None => s.push_str(&format!("{},,,,,\n", f.frame_index)),
        }
    }
    s
}

pub fn read_detections(path: impl AsRef<Path>) -> Result<DetectionTrack> {
    let (text, name) = read_text(path.as_ref())?;
    parse_detections(&text, &name)
}

pub fn write_detections(path: impl AsRef<Path>, track: &DetectionTrack) -> Result<()> {
    write_text(path.as_ref(), format_detections(track))
}
