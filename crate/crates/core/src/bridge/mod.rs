//! Deterministic bridges between event and intensity space.

mod e2v;
mod v2e;

pub use e2v::{reconstruct_frames, E2VConfig};
pub use v2e::{simulate_events, V2EConfig, CROSSING_EPS};
