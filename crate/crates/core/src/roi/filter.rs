use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::event::{Event, EventStream};
use crate::roi::BoxTrajectory;

/// Half-Gaussian feathering of the background cutout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatherConfig {
    /// Standard deviation of the retention falloff, in pixels.
    pub sigma: f64,
    pub seed: u64,
}

impl Default for FeatherConfig {
    fn default() -> Self {
        FeatherConfig {
            sigma: 5.0,
            seed: 0,
        }
    }
}

impl FeatherConfig {
    pub fn new(sigma: f64, seed: u64) -> Result<Self> {
        let cfg = FeatherConfig { sigma, seed };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sigma.is_nan() || self.sigma <= 0.0 {
            return Err(Error::invalid("sigma must be positive"));
        }
        Ok(())
    }

    /// Probability of keeping an in-box event at perimeter distance `d`.
    pub fn retention(&self, d: f64) -> f64 {
        (-(d * d) / (2.0 * self.sigma * self.sigma)).exp()
    }
}

fn inside(traj: &BoxTrajectory, e: &Event) -> bool {
    traj.box_at(e.t as f64).contains(f64::from(e.x), f64::from(e.y))
}

/// Events lying in the box at their own timestamp, edges included.
pub fn filter_roi(stream: &EventStream, traj: &BoxTrajectory) -> EventStream {
    stream.filter(|e| inside(traj, e))
}

/// Events strictly outside the box: the binary complement of [`filter_roi`].
pub fn filter_outside(stream: &EventStream, traj: &BoxTrajectory) -> EventStream {
    stream.filter(|e| !inside(traj, e))
}

/// Counts from one feathering pass.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FeatherStats {
    pub outside: usize,
    pub inside_kept: usize,
    pub inside_dropped: usize,
}

/// Background cutout with stochastic feathering.
///
/// Events outside the box are always kept. An event inside the box (edges
/// included) at perimeter distance `d` is kept with probability
/// `exp(-d^2 / (2 sigma^2))`. The generator is ChaCha8 seeded from
/// `cfg.seed`; it supplies one uniform `f64` in `[0, 1)` per in-box event,
/// consumed in canonical event order, and the event is kept when the draw
/// is below the retention probability.
pub fn filter_background(
    stream: &EventStream,
    traj: &BoxTrajectory,
    cfg: &FeatherConfig,
) -> Result<(EventStream, FeatherStats)> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut stats = FeatherStats::default();
    let kept = stream.filter(|e| {
        let rect = traj.box_at(e.t as f64);
        let (x, y) = (f64::from(e.x), f64::from(e.y));
        if !rect.contains(x, y) {
            stats.outside += 1;
            return true;
        }
        let draw: f64 = rng.random();
        let keep = draw < cfg.retention(rect.perimeter_distance(x, y));
        if keep {
            stats.inside_kept += 1;
        } else {
            stats.inside_dropped += 1;
        }
        keep
    });
    Ok((kept, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::Polarity;
    use crate::rect::BoxRect;

    fn static_box(x1: f64, y1: f64, x2: f64, y2: f64) -> BoxTrajectory {
        BoxTrajectory::fixed(BoxRect { x1, y1, x2, y2 }).unwrap()
    }

    fn ev(t: u64, x: u16, y: u16) -> Event {
        Event::new(t, x, y, Polarity::On)
    }

    #[test]
    fn edge_event_is_inside() {
        let traj = static_box(10.0, 10.0, 20.0, 20.0);
        let s = EventStream::new(32, 32, vec![ev(0, 10, 15), ev(1, 9, 15), ev(2, 20, 20)]).unwrap();
        let roi = filter_roi(&s, &traj);
        assert_eq!(roi.events(), &[ev(0, 10, 15), ev(2, 20, 20)]);
        assert_eq!(filter_outside(&s, &traj).events(), &[ev(1, 9, 15)]);
    }

    #[test]
    fn whole_sensor_box_keeps_everything() {
        let traj = static_box(0.0, 0.0, 31.0, 31.0);
        let events = (0..50).map(|i| ev(i, (i * 7 % 32) as u16, (i * 3 % 32) as u16)).collect();
        let s = EventStream::new(32, 32, events).unwrap();
        assert_eq!(filter_roi(&s, &traj), s);
    }

    #[test]
    fn moving_box_evaluated_per_event() {
        let traj = BoxTrajectory::new(vec![
            crate::io::BoxKeyframe { frame_index: 0, t: 0, rect: BoxRect { x1: 0.0, y1: 0.0, x2: 4.0, y2: 4.0 } },
            crate::io::BoxKeyframe { frame_index: 1, t: 100, rect: BoxRect { x1: 10.0, y1: 0.0, x2: 14.0, y2: 4.0 } },
        ])
        .unwrap();
        // at t = 50 the box spans x in [5, 9]
        let s = EventStream::new(16, 8, vec![ev(50, 2, 2), ev(50, 7, 2), ev(100, 12, 2)]).unwrap();
        assert_eq!(filter_roi(&s, &traj).events(), &[ev(50, 7, 2), ev(100, 12, 2)]);
    }

    #[test]
    fn retention_values() {
        let cfg = FeatherConfig::new(5.0, 0).unwrap();
        assert_eq!(cfg.retention(0.0), 1.0);
        assert!((cfg.retention(5.0) - (-0.5f64).exp()).abs() < 1e-15);
        assert!((cfg.retention(5.0) - 0.6065).abs() < 1e-4);
        assert!(FeatherConfig::new(0.0, 0).is_err());
        assert!(FeatherConfig::new(-1.0, 0).is_err());
        assert!(FeatherConfig::new(f64::NAN, 0).is_err());
    }

    #[test]
    fn retention_non_increasing_in_distance() {
        let cfg = FeatherConfig::default();
        let mut prev = cfg.retention(0.0);
        for i in 1..400 {
            let p = cfg.retention(i as f64 * 0.1);
            assert!(p <= prev);
            prev = p;
        }
    }

    #[test]
    fn outside_events_always_kept_and_seed_is_deterministic() {
        let traj = static_box(8.0, 8.0, 24.0, 24.0);
        let events: Vec<Event> = (0..2000u64)
            .map(|i| ev(i, (i * 13 % 32) as u16, (i * 29 % 32) as u16))
            .collect();
        let s = EventStream::new(32, 32, events).unwrap();
        let cfg = FeatherConfig::new(2.0, 42).unwrap();
        let (a, stats) = filter_background(&s, &traj, &cfg).unwrap();
        let (b, _) = filter_background(&s, &traj, &cfg).unwrap();
        assert_eq!(a, b);
        let outside = filter_outside(&s, &traj);
        assert_eq!(stats.outside, outside.len());
        assert!(outside.events().iter().all(|e| a.events().contains(e)));
        assert_eq!(stats.outside + stats.inside_kept, a.len());
        assert_eq!(a.len() + stats.inside_dropped, s.len());
        let (c, _) = filter_background(&s, &traj, &FeatherConfig::new(2.0, 43).unwrap()).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn huge_sigma_keeps_everything() {
        let traj = static_box(0.0, 0.0, 63.0, 63.0);
        let events = (0..500u64).map(|i| ev(i, (i % 64) as u16, (i * 7 % 64) as u16)).collect();
        let s = EventStream::new(64, 64, events).unwrap();
        let (kept, _) = filter_background(&s, &traj, &FeatherConfig::new(1e9, 1).unwrap()).unwrap();
        assert_eq!(kept, s);
    }

    #[test]
    fn no_roi_events_pass_through() {
        let traj = static_box(40.0, 40.0, 50.0, 50.0);
        let events = (0..100u64).map(|i| ev(i, (i % 30) as u16, 3)).collect();
        let s = EventStream::new(64, 64, events).unwrap();
        let (kept, stats) = filter_background(&s, &traj, &FeatherConfig::default()).unwrap();
        assert_eq!(kept, s);
        assert_eq!(stats.inside_kept + stats.inside_dropped, 0);
    }
}
