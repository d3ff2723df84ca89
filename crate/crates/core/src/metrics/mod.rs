//! Evaluation metrics.
//!
//! Event space: spatiotemporal Chamfer distance ([`stcd`]) and the sliced
//! Wasserstein approximation of the event mover's distance ([`emd_sliced`]),
//! both over per-window clouds normalized to the unit cube. Frame space:
//! identity similarity, temporal stability, pose and mimicry error, and
//! detection utility, computed from tracks written by external models.

mod chamfer;
pub mod kdtree;
mod report;
mod tracks;
mod wasserstein;
mod windowed;

pub use chamfer::chamfer_distance;
pub use report::{MetricReport, WINDOWS_CSV_HEADER};
pub use tracks::{
    cosine_similarity, detection_utility, identity_similarity, mimicry_error, pose_error,
    temporal_stability, DetectionUtility, FrameScore, TrackMetric,
};
pub use wasserstein::{
    random_directions, sliced_wasserstein, sliced_wasserstein_slices, wasserstein_1d,
    wasserstein_1d_sorted,
};
pub use windowed::{
    emd_sliced, stcd, union_windows, window_density, EmdConfig, StcdConfig, WindowDensity,
    WindowPairing, WindowScore, WindowedMetric,
};

/// Arithmetic mean and population standard deviation of a set of values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aggregate {
    pub mean: f64,
    pub std: f64,
    pub count: usize,
}

impl Aggregate {
    /// `None` for an empty slice. Values are reduced in slice order.
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        Some(Aggregate {
            mean,
            std: var.sqrt(),
            count: values.len(),
        })
    }
}
