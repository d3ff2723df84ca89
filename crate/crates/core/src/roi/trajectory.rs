use crate::error::{Error, Result};
use crate::io::BoxKeyframe;
use crate::rect::BoxRect;

/// Per-frame face boxes and their continuous piecewise-linear interpolant.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxTrajectory {
    keyframes: Vec<BoxKeyframe>,
}

impl BoxTrajectory {
    pub fn new(keyframes: Vec<BoxKeyframe>) -> Result<Self> {
        if keyframes.is_empty() {
            return Err(Error::invalid("box trajectory has no keyframes"));
        }
        for k in &keyframes {
            k.rect
                .validate()
                .map_err(|e| Error::invalid(format!("keyframe {}: {e}", k.frame_index)))?;
        }
        if let Some(w) = keyframes.windows(2).find(|w| w[0].t >= w[1].t) {
            return Err(Error::invalid(format!(
                "keyframe times must strictly increase ({} then {})",
                w[0].t, w[1].t
            )));
        }
        Ok(BoxTrajectory { keyframes })
    }

    /// A trajectory holding one box for all time.
    pub fn fixed(rect: BoxRect) -> Result<Self> {
        Self::new(vec![BoxKeyframe {
            frame_index: 0,
            t: 0,
            rect,
        }])
    }

    pub fn keyframes(&self) -> &[BoxKeyframe] {
        &self.keyframes
    }

    /// Box at time `t` (µs). Between keyframes `T_k <= t < T_{k+1}` every
    /// corner coordinate is interpolated linearly; outside the keyframe range
    /// the nearest keyframe box is held.
    pub fn box_at(&self, t: f64) -> BoxRect {
        let first = &self.keyframes[0];
        let last = &self.keyframes[self.keyframes.len() - 1];
        if t <= first.t as f64 {
            return first.rect;
        }
        if t >= last.t as f64 {
            return last.rect;
        }
        // first keyframe strictly after t; exists and is > 0 given the guards
        let next = self.keyframes.partition_point(|k| k.t as f64 <= t);
        let (a, b) = (&self.keyframes[next - 1], &self.keyframes[next]);
        let (ta, tb) = (a.t as f64, b.t as f64);
        let frac = (t - ta) / (tb - ta);
        let lerp = |va: f64, vb: f64| va + (vb - va) * frac;
        BoxRect {
            x1: lerp(a.rect.x1, b.rect.x1),
            y1: lerp(a.rect.y1, b.rect.y1),
            x2: lerp(a.rect.x2, b.rect.x2),
            y2: lerp(a.rect.y2, b.rect.y2),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn kf(k: u64, t: u64, x1: f64, y1: f64, x2: f64, y2: f64) -> BoxKeyframe {
        BoxKeyframe {
            frame_index: k,
            t,
            rect: BoxRect { x1, y1, x2, y2 },
        }
    }

    fn two_keys() -> BoxTrajectory {
        BoxTrajectory::new(vec![
            kf(0, 0, 10.0, 0.0, 50.0, 40.0),
            kf(1, 1000, 20.0, 10.0, 80.0, 40.0),
        ])
        .unwrap()
    }

    #[test]
    fn midpoint_interpolation() {
        let b = two_keys().box_at(500.0);
        assert_eq!(b, BoxRect { x1: 15.0, y1: 5.0, x2: 65.0, y2: 40.0 });
    }

    #[test]
    fn keyframe_times_are_exact() {
        let traj = BoxTrajectory::new(vec![
            kf(0, 0, 10.1, 0.3, 50.7, 40.9),
            kf(1, 333, 20.2, 10.4, 80.6, 41.0),
            kf(2, 1000, 1.0 / 3.0, 2.0 / 3.0, 99.9, 77.7),
        ])
        .unwrap();
        for k in traj.keyframes() {
            assert_eq!(traj.box_at(k.t as f64), k.rect);
        }
    }

    #[test]
    fn clamps_outside_keyframe_range() {
        let traj = two_keys();
        assert_eq!(traj.box_at(-5.0), traj.keyframes()[0].rect);
        assert_eq!(traj.box_at(5_000.0), traj.keyframes()[1].rect);
    }

    #[test]
    fn rejects_invalid_trajectories() {
        assert!(BoxTrajectory::new(vec![]).is_err());
        assert!(BoxTrajectory::new(vec![kf(0, 0, 5.0, 0.0, 5.0, 1.0)]).is_err());
        assert!(BoxTrajectory::new(vec![
            kf(0, 10, 0.0, 0.0, 1.0, 1.0),
            kf(1, 10, 0.0, 0.0, 1.0, 1.0)
        ])
        .is_err());
    }

    proptest! {
        #[test]
        fn interpolant_is_lipschitz(
            x1a in 0.0f64..100.0, x1b in 0.0f64..100.0,
            dt in 1u64..10_000, t in 0u64..12_000,
        ) {
            let traj = BoxTrajectory::new(vec![
                kf(0, 0, x1a, 0.0, 200.0, 10.0),
                kf(1, dt, x1b, 0.0, 200.0, 10.0),
            ]).unwrap();
            let slope = (x1b - x1a).abs() / dt as f64;
            let a = traj.box_at(t as f64).x1;
            let b = traj.box_at(t as f64 + 1.0).x1;
            prop_assert!((a - b).abs() <= slope + 1e-9);
        }
    }
}
