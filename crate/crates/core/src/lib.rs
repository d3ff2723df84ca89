//! Anonymization toolkit for asynchronous event-camera streams.
//!
//! The crate covers the non-neural half of a generative face-anonymization
//! pipeline for event data:
//!
//! * [`event`]: the event model, canonical ordering, time windows and
//!   per-window normalization into the unit cube.
//! * [`io`]: bit-exact readers and writers for event files, frame
//!   directories and the per-frame tracks produced by external models.
//! * [`bridge`]: a decaying-integrator event-to-video baseline and a
//!   threshold-crossing video-to-event simulator.
//! * [`roi`]: continuous box trajectories, ROI filtering, stochastic
//!   feathering, center-relative warping and compositing.
//! * [`metrics`]: spatiotemporal Chamfer distance, sliced Wasserstein
//!   distance and the frame-space identity/pose/mimicry/detection metrics.

pub mod bridge;
pub mod error;
pub mod event;
pub mod io;
pub mod metrics;
pub mod rect;
pub mod roi;

pub use error::{Error, ErrorKind, Result};
pub use event::{Event, EventStream, NormalizedCloud, Polarity, TimeWindow, WindowConfig};
pub use rect::BoxRect;

/// Rounds to the nearest integer, ties toward positive infinity.
pub(crate) fn round_half_up(v: f64) -> f64 {
    (v + 0.5).floor()
}
