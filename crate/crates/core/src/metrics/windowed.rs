//! Structural distances between two event streams over aligned time windows.

use rayon::prelude::*;

use super::chamfer::chamfer_distance;
use super::wasserstein::{random_directions, sliced_wasserstein};
use super::Aggregate;
use crate::error::{Error, Result};
use crate::event::{normalize_events, EventStream, Polarity, TimeWindow, WindowConfig};

/// How windows of the two streams are paired. Only identical absolute
/// boundaries are supported.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum WindowPairing {
    #[default]
    Aligned,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StcdConfig {
    pub window: WindowConfig,
    /// Compare ON and OFF events separately and average the two classes.
    pub per_polarity: bool,
    pub pairing: WindowPairing,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmdConfig {
    /// Number of random projection directions.
    pub slices: usize,
    pub seed: u64,
    pub window: WindowConfig,
    pub per_polarity: bool,
}

impl Default for EmdConfig {
    fn default() -> Self {
        EmdConfig {
            slices: 128,
            seed: 0,
            window: WindowConfig::default(),
            per_polarity: false,
        }
    }
}

/// One window's value; `None` when the window was skipped because a side
/// had no events to compare.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowScore {
    pub window: TimeWindow,
    pub events_a: usize,
    pub events_b: usize,
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindowedMetric {
    pub windows: Vec<WindowScore>,
    pub aggregate: Aggregate,
    pub skipped: usize,
}

/// Windows over the union of both streams' spans.
pub fn union_windows(a: &EventStream, b: &EventStream, cfg: &WindowConfig) -> Result<Vec<TimeWindow>> {
    cfg.validate()?;
    let spans = [a.span(), b.span()];
    let first = spans.iter().flatten().map(|s| s.0).min();
    let last = spans.iter().flatten().map(|s| s.1).max();
    match (first, last) {
        (Some(first), Some(last)) => cfg.bounds(first, last),
        _ => Ok(Vec::new()),
    }
}

type Cloud = Vec<[f64; 3]>;

/// Normalized clouds for one window, split by polarity when requested.
fn window_clouds(stream: &EventStream, window: &TimeWindow, per_polarity: bool) -> Vec<Cloud> {
    let events = stream.events_in(window);
    let Ok(cloud) = normalize_events(events) else {
        return if per_polarity { vec![Vec::new(), Vec::new()] } else { vec![Vec::new()] };
    };
    if !per_polarity {
        return vec![cloud.points];
    }
    let mut on = Vec::new();
    let mut off = Vec::new();
    for (e, p) in events.iter().zip(cloud.points) {
        match e.p {
            Polarity::On => on.push(p),
            Polarity::Off => off.push(p),
        }
    }
    vec![off, on]
}

fn windowed<F>(
    a: &EventStream,
    b: &EventStream,
    window_cfg: &WindowConfig,
    per_polarity: bool,
    distance: F,
) -> Result<WindowedMetric>
where
    F: Fn(&[[f64; 3]], &[[f64; 3]]) -> Option<f64> + Sync,
{
    let windows = union_windows(a, b, window_cfg)?;
    let scores: Vec<WindowScore> = windows
        .par_iter()
        .map(|w| {
            let ca = window_clouds(a, w, per_polarity);
            let cb = window_clouds(b, w, per_polarity);
            let per_class: Vec<f64> = ca
                .iter()
                .zip(&cb)
                .filter_map(|(pa, pb)| distance(pa, pb))
                .collect();
            let value = (!per_class.is_empty())
                .then(|| per_class.iter().sum::<f64>() / per_class.len() as f64);
            WindowScore {
                window: *w,
                events_a: a.window_range(w).len(),
                events_b: b.window_range(w).len(),
                value,
            }
        })
        .collect();
    let values: Vec<f64> = scores.iter().filter_map(|s| s.value).collect();
    let aggregate = Aggregate::of(&values).ok_or(Error::NoComparableWindows)?;
    Ok(WindowedMetric {
        skipped: scores.len() - values.len(),
        windows: scores,
        aggregate,
    })
}

/// Spatiotemporal Chamfer distance per aligned window.
///
/// Each side of a window is normalized to the unit cube on its own, then
/// compared with the symmetric Chamfer distance using exact nearest
/// neighbours. Windows with an empty side are skipped and counted.
pub fn stcd(a: &EventStream, b: &EventStream, cfg: &StcdConfig) -> Result<WindowedMetric> {
    windowed(a, b, &cfg.window, cfg.per_polarity, chamfer_distance)
}

/// Sliced Wasserstein distance per aligned window, over the same normalized
/// clouds as [`stcd`]. All windows share one set of `cfg.slices` directions
/// drawn from `cfg.seed`.
pub fn emd_sliced(a: &EventStream, b: &EventStream, cfg: &EmdConfig) -> Result<WindowedMetric> {
    if cfg.slices == 0 {
        return Err(Error::invalid("number of slices must be at least 1"));
    }
    let directions = random_directions(cfg.slices, cfg.seed);
    windowed(a, b, &cfg.window, cfg.per_polarity, |pa, pb| {
        sliced_wasserstein(pa, pb, &directions)
    })
}

/// Event rate of both streams in one window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowDensity {
    pub window: TimeWindow,
    pub events_a: usize,
    pub events_b: usize,
    pub rate_a_per_ms: f64,
    pub rate_b_per_ms: f64,
}

pub fn window_density(
    a: &EventStream,
    b: &EventStream,
    cfg: &WindowConfig,
) -> Result<Vec<WindowDensity>> {
    Ok(union_windows(a, b, cfg)?
        .into_iter()
        .map(|w| {
            let ms = w.duration() as f64 / 1_000.0;
            let (na, nb) = (a.window_range(&w).len(), b.window_range(&w).len());
            WindowDensity {
                window: w,
                events_a: na,
                events_b: nb,
                rate_a_per_ms: na as f64 / ms,
                rate_b_per_ms: nb as f64 / ms,
            }
        })
        .collect())
}
