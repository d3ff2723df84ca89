use std::fmt;

use crate::bridge::{simulate_events, V2EConfig};
use crate::error::{Error, Result};
use crate::event::{Event, EventStream};
use crate::io::FrameSequence;
use crate::roi::{filter_background, filter_roi, BoxTrajectory, FeatherConfig};
use crate::round_half_up;

/// Counts from one warp-and-merge pass.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct WarpStats {
    pub injected: usize,
    pub dropped_oob: usize,
}

/// Affine map of the filler stream's time span onto the background's.
#[derive(Debug, Clone, Copy)]
struct TimeMap {
    src_start: f64,
    dst_start: f64,
    scale: f64,
}

impl TimeMap {
    fn between(filler: &EventStream, background: &EventStream) -> Self {
        let identity = TimeMap {
            src_start: 0.0,
            dst_start: 0.0,
            scale: 1.0,
        };
        let (Some((a0, a1)), Some((b0, b1))) = (filler.span(), background.span()) else {
            return identity;
        };
        let scale = if a1 > a0 {
            (b1 - b0) as f64 / (a1 - a0) as f64
        } else {
            0.0
        };
        TimeMap {
            src_start: a0 as f64,
            dst_start: b0 as f64,
            scale,
        }
    }

    fn apply(&self, t: u64) -> f64 {
        self.dst_start + (t as f64 - self.src_start) * self.scale
    }
}

/// Warps the filler events into the target box and merges them with the
/// background.
///
/// Filler timestamps are first mapped affinely so the filler span lands on
/// the background span (identity when either stream is empty; a filler with
/// a single timestamp lands on the background start). At the mapped time
/// `t` each coordinate is moved relative to the box centers and rescaled by
/// the box extents:
///
/// ```text
/// x' = c_tgt,x(t) + (x - c_anon,x(t)) / w_anon(t) * w_tgt(t)
/// y' = c_tgt,y(t) + (y - c_anon,y(t)) / h_anon(t) * h_tgt(t)
/// ```
///
/// Coordinates and times are rounded half-up; events landing outside the
/// background sensor are dropped and counted. Coinciding events are all
/// kept.
pub fn warp_and_composite(
    filler: &EventStream,
    background: &EventStream,
    traj_filler: &BoxTrajectory,
    traj_target: &BoxTrajectory,
) -> Result<(EventStream, WarpStats)> {
    let map = TimeMap::between(filler, background);
    let (width, height) = (f64::from(background.width()), f64::from(background.height()));
    let mut stats = WarpStats::default();
    let mut merged: Vec<Event> = Vec::with_capacity(background.len() + filler.len());
    merged.extend_from_slice(background.events());

    for e in filler.events() {
        let t = map.apply(e.t);
        let src = traj_filler.box_at(t);
        let dst = traj_target.box_at(t);
        let (scx, scy) = src.center();
        let (dcx, dcy) = dst.center();
        let x = round_half_up(dcx + (f64::from(e.x) - scx) / src.width() * dst.width());
        let y = round_half_up(dcy + (f64::from(e.y) - scy) / src.height() * dst.height());
        if !(0.0..width).contains(&x) || !(0.0..height).contains(&y) {
            stats.dropped_oob += 1;
            continue;
        }
        merged.push(Event {
            t: round_half_up(t.max(0.0)) as u64,
            x: x as u16,
            y: y as u16,
            p: e.p,
        });
        stats.injected += 1;
    }
    let out = EventStream::new(background.width(), background.height(), merged)?;
    Ok((out, stats))
}

/// Event counts of one anonymization run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CompositionReport {
    pub kept_bg: usize,
    pub feathered_out: usize,
    pub injected: usize,
    pub dropped_oob: usize,
}

impl fmt::Display for CompositionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "kept_bg={}", self.kept_bg)?;
        writeln!(f, "feathered_out={}", self.feathered_out)?;
        writeln!(f, "injected={}", self.injected)?;
        writeln!(f, "dropped_oob={}", self.dropped_oob)
    }
}

/// Replaces the face in `src` with the one in the externally anonymized
/// frames.
///
/// The source is cut out with feathering, the anonymized frames are
/// converted to events, cropped to the same trajectory, warped into it and
/// merged with the background. The frames must match the sensor geometry
/// because both share the box trajectory.
pub fn anonymize_pipeline(
    src: &EventStream,
    anon_frames: &FrameSequence,
    traj: &BoxTrajectory,
    feather: &FeatherConfig,
    v2e: &V2EConfig,
) -> Result<(EventStream, CompositionReport)> {
    if (anon_frames.width(), anon_frames.height()) != (src.width(), src.height()) {
        return Err(Error::invalid(format!(
            "anonymized frames are {}x{} but the event sensor is {}x{}",
            anon_frames.width(),
            anon_frames.height(),
            src.width(),
            src.height()
        )));
    }
    let (background, fstats) = filter_background(src, traj, feather)?;
    let simulated = simulate_events(anon_frames, v2e)?;
    let face = filter_roi(&simulated, traj);
    let (out, wstats) = warp_and_composite(&face, &background, traj, traj)?;
    let report = CompositionReport {
        kept_bg: background.len(),
        feathered_out: fstats.inside_dropped,
        injected: wstats.injected,
        dropped_oob: wstats.dropped_oob,
    };
    Ok((out, report))
}
