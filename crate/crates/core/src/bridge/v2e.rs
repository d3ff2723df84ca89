use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::event::{Event, EventStream, Polarity};
use crate::io::FrameSequence;
use crate::round_half_up;

/// Slack, in log-intensity units, when testing whether a threshold has been
/// reached. Absorbs rounding in `reference + k * threshold` so that a change
/// of exactly `k` thresholds yields `k` events.
pub const CROSSING_EPS: f64 = 1e-9;

/// Parameters of the threshold-crossing event simulator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct V2EConfig {
    /// Log-intensity contrast threshold.
    pub threshold: f64,
    /// Offset added to normalized intensity before the logarithm.
    pub log_eps: f64,
    /// Minimum spacing between emitted events of one pixel.
    pub refractory_us: u64,
    pub max_events_per_pixel_per_frame_pair: Option<u32>,
    /// Reserved for stochastic pixel models; the simulator itself is
    /// deterministic and never draws from it.
    pub seed: u64,
}

impl Default for V2EConfig {
    fn default() -> Self {
        V2EConfig {
            threshold: 0.2,
            log_eps: 1e-3,
            refractory_us: 0,
            max_events_per_pixel_per_frame_pair: None,
            seed: 0,
        }
    }
}

impl V2EConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.threshold.is_finite() && self.threshold > 0.0) {
            return Err(Error::invalid(format!(
                "contrast threshold must be positive, got {}",
                self.threshold
            )));
        }
        if !(self.log_eps.is_finite() && self.log_eps > 0.0) {
            return Err(Error::invalid(format!(
                "log epsilon must be positive, got {}",
                self.log_eps
            )));
        }
        Ok(())
    }

    pub fn log_intensity(&self, intensity: u8) -> f64 {
        (f64::from(intensity) / 255.0 + self.log_eps).ln()
    }
}

/// Emits events for one pixel whose log intensity is sampled at `samples`
/// (time, level) and interpolated linearly in between.
///
/// The reference level starts at the first sample and moves by one
/// threshold per crossing; each crossing time is interpolated within its
/// frame pair and rounded half-up to whole microseconds.
fn simulate_pixel(
    samples: impl Iterator<Item = (u64, f64)>,
    cfg: &V2EConfig,
    mut emit: impl FnMut(u64, Polarity),
) {
    let c = cfg.threshold;
    let mut samples = samples;
    let Some((mut t0, mut l0)) = samples.next() else {
        return;
    };
    let anchor = l0;
    let mut level: i64 = 0;
    let mut last_emitted: Option<u64> = None;

    for (t1, l1) in samples {
        let mut emitted_here = 0u32;
        let span = (t1 - t0) as f64;
        loop {
            let reference = anchor + level as f64 * c;
            let (target, polarity) = if l1 - reference >= c - CROSSING_EPS {
                (reference + c, Polarity::On)
            } else if reference - l1 >= c - CROSSING_EPS {
                (reference - c, Polarity::Off)
            } else {
                break;
            };
            level += if polarity == Polarity::On { 1 } else { -1 };

            let frac = ((target - l0) / (l1 - l0)).clamp(0.0, 1.0);
            let t = round_half_up(t0 as f64 + frac * span) as u64;
            let capped = cfg
                .max_events_per_pixel_per_frame_pair
                .is_some_and(|cap| emitted_here >= cap);
            let refractory =
                last_emitted.is_some_and(|last| t.saturating_sub(last) < cfg.refractory_us);
            if !capped && !refractory {
                emit(t, polarity);
                emitted_here += 1;
                last_emitted = Some(t);
            }
        }
        t0 = t1;
        l0 = l1;
    }
}

/// Converts a frame sequence into events by per-pixel log-intensity
/// threshold crossings. Output is canonically sorted and identical for any
/// thread count.
pub fn simulate_events(seq: &FrameSequence, cfg: &V2EConfig) -> Result<EventStream> {
    cfg.validate()?;
    if seq.len() < 2 {
        return Err(Error::invalid(format!(
            "event simulation needs at least 2 frames, got {}",
            seq.len()
        )));
    }
    let (width, height) = (seq.width(), seq.height());
    let w = usize::from(width);
    let lut: Vec<f64> = (0..=255u8).map(|i| cfg.log_intensity(i)).collect();
    let frames = seq.frames();

    let rows: Vec<Vec<Event>> = (0..height)
        .into_par_iter()
        .map(|y| {
            let mut out = Vec::new();
            for x in 0..width {
                let i = usize::from(y) * w + usize::from(x);
                let samples = frames.iter().map(|f| (f.t, lut[usize::from(f.pixels[i])]));
                simulate_pixel(samples, cfg, |t, p| out.push(Event { t, x, y, p }));
            }
            out
        })
        .collect();
    EventStream::new(width, height, rows.concat())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::Frame;

    fn seq_1px(values: &[(u64, u8)]) -> FrameSequence {
        let frames = values
            .iter()
            .map(|&(t, v)| Frame { t, pixels: vec![v] })
            .collect();
        FrameSequence::new(1, 1, frames).unwrap()
    }

    #[test]
    fn constant_frames_emit_nothing() {
        let frames = (0..4)
            .map(|k| Frame { t: k * 1000, pixels: vec![77; 12] })
            .collect();
        let seq = FrameSequence::new(4, 3, frames).unwrap();
        assert!(simulate_events(&seq, &V2EConfig::default()).unwrap().is_empty());
    }

    #[test]
    fn step_of_two_thresholds_emits_two_on_events() {
        let base = V2EConfig::default();
        let delta = base.log_intensity(200) - base.log_intensity(50);
        let cfg = V2EConfig { threshold: delta / 2.0, ..base };
        let s = simulate_events(&seq_1px(&[(0, 50), (1000, 200)]), &cfg).unwrap();
        let got: Vec<(u64, Polarity)> = s.events().iter().map(|e| (e.t, e.p)).collect();
        assert_eq!(got, [(500, Polarity::On), (1000, Polarity::On)]);
    }

    #[test]
    fn one_threshold_decrease_emits_one_off_event() {
        let base = V2EConfig::default();
        let delta = base.log_intensity(180) - base.log_intensity(90);
        let cfg = V2EConfig { threshold: delta, ..base };
        let s = simulate_events(&seq_1px(&[(0, 180), (400, 90)]), &cfg).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.events()[0].p, Polarity::Off);
        assert_eq!(s.events()[0].t, 400);
    }

    #[test]
    fn reference_carries_across_frame_pairs() {
        // 0.12 + 0.12 of log change: no event in the first pair, one in the second.
        let cfg = V2EConfig::default();
        let l = |i: u8| cfg.log_intensity(i);
        let (a, b, c) = (100u8, 113u8, 128u8);
        assert!(l(b) - l(a) < 0.2 && l(c) - l(a) > 0.2);
        let s = simulate_events(&seq_1px(&[(0, a), (100, b), (200, c)]), &cfg).unwrap();
        assert_eq!(s.len(), 1);
        let e = s.events()[0];
        assert!(e.t > 100 && e.t <= 200);
    }

    #[test]
    fn direction_reversal_emits_both_polarities() {
        let s = simulate_events(&seq_1px(&[(0, 60), (100, 200), (200, 60)]), &V2EConfig::default())
            .unwrap();
        let on = s.events().iter().filter(|e| e.p == Polarity::On).count();
        let off = s.len() - on;
        assert_eq!(on, off);
        assert!(s.events().iter().all(|e| (e.p == Polarity::On) == (e.t <= 100)));
    }

    #[test]
    fn refractory_and_cap_suppress_events() {
        let seq = seq_1px(&[(0, 10), (10, 250)]);
        let free = simulate_events(&seq, &V2EConfig::default()).unwrap();
        assert!(free.len() > 5);
        let capped = V2EConfig {
            max_events_per_pixel_per_frame_pair: Some(2),
            ..V2EConfig::default()
        };
        assert_eq!(simulate_events(&seq, &capped).unwrap().len(), 2);
        let refractory = V2EConfig {
            refractory_us: 1_000,
            ..V2EConfig::default()
        };
        assert_eq!(simulate_events(&seq, &refractory).unwrap().len(), 1);
    }

    #[test]
    fn needs_two_frames() {
        assert!(simulate_events(&seq_1px(&[(0, 10)]), &V2EConfig::default()).is_err());
        let bad = V2EConfig { threshold: 0.0, ..V2EConfig::default() };
        assert!(simulate_events(&seq_1px(&[(0, 10), (5, 10)]), &bad).is_err());
    }
}
