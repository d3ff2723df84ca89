//! Face-region handling in event space: the continuous box trajectory, ROI
//! extraction, feathered background cutout, warping and compositing.

mod composite;
mod filter;
mod trajectory;

pub use composite::{anonymize_pipeline, warp_and_composite, CompositionReport, WarpStats};
pub use filter::{filter_background, filter_outside, filter_roi, FeatherConfig, FeatherStats};
pub use trajectory::BoxTrajectory;
