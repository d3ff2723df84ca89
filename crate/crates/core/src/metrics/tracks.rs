//! Frame-space metrics over per-frame tracks from external face models.

use super::Aggregate;
use crate::error::{Error, Result};
use crate::io::{DetectionTrack, EmbeddingTrack, LandmarkTrack, PoseTrack};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameScore {
    pub frame_index: u64,
    pub value: f64,
}

/// Per-frame values with their aggregate and bookkeeping of frames that
/// could not be scored.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrackMetric {
    pub frames: Vec<FrameScore>,
    pub aggregate: Option<Aggregate>,
    /// Frames present in only one of the two tracks.
    pub unmatched: usize,
    /// Matched frames rejected for degenerate input (zero-norm embedding,
    /// non-positive inter-ocular distance).
    pub invalid: usize,
}

impl TrackMetric {
    fn from_scores(frames: Vec<FrameScore>, unmatched: usize, invalid: usize) -> Self {
        let values: Vec<f64> = frames.iter().map(|f| f.value).collect();
        TrackMetric {
            aggregate: Aggregate::of(&values),
            frames,
            unmatched,
            invalid,
        }
    }
}

/// Merge-joins two tracks sorted by frame index, returning matched pairs and
/// the number of frames found on one side only.
fn match_frames<'a, A, B>(
    a: &'a [A],
    b: &'a [B],
    ka: impl Fn(&A) -> u64,
    kb: impl Fn(&B) -> u64,
) -> (Vec<(&'a A, &'a B)>, usize) {
    let (mut i, mut j) = (0, 0);
    let mut pairs = Vec::new();
    let mut unmatched = 0;
    while i < a.len() && j < b.len() {
        match ka(&a[i]).cmp(&kb(&b[j])) {
            std::cmp::Ordering::Less => {
                unmatched += 1;
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                unmatched += 1;
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                pairs.push((&a[i], &b[j]));
                i += 1;
                j += 1;
            }
        }
    }
    unmatched += (a.len() - i) + (b.len() - j);
    (pairs, unmatched)
}

/// Cosine of the angle between two vectors; `None` if either has zero norm
/// or the lengths differ.
pub fn cosine_similarity(a: &[f64], b: &[f64]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return None;
    }
    Some(dot / (na * nb))
}

/// Cosine similarity of source and generated identity embeddings per
/// matched frame.
pub fn identity_similarity(src: &EmbeddingTrack, gen: &EmbeddingTrack) -> TrackMetric {
    let (pairs, unmatched) =
        match_frames(&src.frames, &gen.frames, |f| f.frame_index, |f| f.frame_index);
    let mut invalid = 0;
    let mut scores = Vec::with_capacity(pairs.len());
    for (s, g) in pairs {
        match cosine_similarity(&s.vector, &g.vector) {
            Some(value) => scores.push(FrameScore { frame_index: s.frame_index, value }),
            None => invalid += 1,
        }
    }
    TrackMetric::from_scores(scores, unmatched, invalid)
}

/// Similarity between consecutive embeddings of one track. The aggregate
/// mean is the average over the `T - 1` consecutive pairs; each score is
/// filed under the later frame of its pair.
pub fn temporal_stability(track: &EmbeddingTrack) -> Result<TrackMetric> {
    if track.frames.len() < 2 {
        return Err(Error::invalid(format!(
            "temporal stability needs at least 2 frames, got {}",
            track.frames.len()
        )));
    }
    let mut invalid = 0;
    let mut scores = Vec::with_capacity(track.frames.len() - 1);
    for pair in track.frames.windows(2) {
        match cosine_similarity(&pair[0].vector, &pair[1].vector) {
            Some(value) => scores.push(FrameScore { frame_index: pair[1].frame_index, value }),
            None => invalid += 1,
        }
    }
    Ok(TrackMetric::from_scores(scores, 0, invalid))
}

/// Mean absolute yaw/pitch/roll difference per matched frame, in degrees.
pub fn pose_error(orig: &PoseTrack, gen: &PoseTrack) -> TrackMetric {
    let (pairs, unmatched) =
        match_frames(&orig.frames, &gen.frames, |f| f.frame_index, |f| f.frame_index);
    let scores = pairs
        .into_iter()
        .map(|(o, g)| FrameScore {
            frame_index: o.frame_index,
            value: ((o.yaw - g.yaw).abs() + (o.pitch - g.pitch).abs() + (o.roll - g.roll).abs())
                / 3.0,
        })
        .collect();
    TrackMetric::from_scores(scores, unmatched, 0)
}

/// Mean landmark displacement per matched frame, in units of the original
/// track's inter-ocular distance.
pub fn mimicry_error(orig: &LandmarkTrack, gen: &LandmarkTrack) -> TrackMetric {
    let (pairs, unmatched) =
        match_frames(&orig.frames, &gen.frames, |f| f.frame_index, |f| f.frame_index);
    let mut invalid = 0;
    let mut scores = Vec::with_capacity(pairs.len());
    for (o, g) in pairs {
        if o.iod.is_nan() || o.iod <= 0.0 || o.points.is_empty() || o.points.len() != g.points.len() {
            invalid += 1;
            continue;
        }
        let total: f64 = o
            .points
            .iter()
            .zip(&g.points)
            .map(|(p, q)| ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt() / o.iod)
            .sum();
        scores.push(FrameScore {
            frame_index: o.frame_index,
            value: total / o.points.len() as f64,
        });
    }
    TrackMetric::from_scores(scores, unmatched, invalid)
}

/// Detection-based utility of an anonymized track against a reference.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionUtility {
    /// Confidence over the reference frames that have a detection.
    pub confidence_ref: Option<Aggregate>,
    pub confidence_anon: Option<Aggregate>,
    /// Box IoU over frames where both tracks have a detection.
    pub iou: Option<Aggregate>,
    pub rate_ref: f64,
    pub rate_anon: f64,
    /// `|rate_anon - rate_ref| / rate_ref`, with rate = detected / total frames.
    pub rate_error: f64,
}

pub fn detection_utility(reference: &DetectionTrack, anon: &DetectionTrack) -> Result<DetectionUtility> {
    let rate = |track: &DetectionTrack| {
        let hits = track.frames.iter().filter(|f| f.detection.is_some()).count();
        if track.frames.is_empty() {
            0.0
        } else {
            hits as f64 / track.frames.len() as f64
        }
    };
    let rate_ref = rate(reference);
    if rate_ref == 0.0 {
        return Err(Error::NoReferenceDetections);
    }
    let rate_anon = rate(anon);
    let confidences = |track: &DetectionTrack| {
        let v: Vec<f64> = track
            .frames
            .iter()
            .filter_map(|f| f.detection.map(|d| d.confidence))
            .collect();
        Aggregate::of(&v)
    };
    let (pairs, _) =
        match_frames(&reference.frames, &anon.frames, |f| f.frame_index, |f| f.frame_index);
    let ious: Vec<f64> = pairs
        .into_iter()
        .filter_map(|(r, a)| Some(r.detection?.rect.iou(&a.detection?.rect)))
        .collect();
    Ok(DetectionUtility {
        confidence_ref: confidences(reference),
        confidence_anon: confidences(anon),
        iou: Aggregate::of(&ious),
        rate_ref,
        rate_anon,
        rate_error: (rate_anon - rate_ref).abs() / rate_ref,
    })
}
