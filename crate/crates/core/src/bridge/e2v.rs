use crate::error::{Error, Result};
use crate::event::EventStream;
use crate::io::{Frame, FrameSequence};
use crate::round_half_up;

/// Parameters of the decaying-integrator reconstruction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct E2VConfig {
    pub frame_period_us: u64,
    pub decay_half_life_us: f64,
    /// Log-intensity step contributed by one event.
    pub contrast_gain: f64,
    /// Intensity rendered for zero accumulated log-contrast.
    pub mid_gray: f64,
}

impl Default for E2VConfig {
    fn default() -> Self {
        E2VConfig {
            frame_period_us: 10_000,
            decay_half_life_us: 50_000.0,
            contrast_gain: 0.2,
            mid_gray: 128.0,
        }
    }
}

impl E2VConfig {
    pub fn validate(&self) -> Result<()> {
        if self.frame_period_us == 0 {
            return Err(Error::invalid("frame period must be positive"));
        }
        for (name, v) in [
            ("decay half-life", self.decay_half_life_us),
            ("contrast gain", self.contrast_gain),
            ("mid gray", self.mid_gray),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Reconstructs intensity frames by integrating event polarities per pixel.
///
/// Each pixel keeps a log-contrast state that halves every
/// `decay_half_life_us` and jumps by `contrast_gain * p` at each event.
/// Frame `k` is rendered at `t_first + k * frame_period_us` from all events
/// up to and including that instant as `mid_gray * exp(state)`, clamped to
/// `[0, 255]` and rounded half-up. An empty stream yields one mid-gray frame
/// at `t = 0`.
pub fn reconstruct_frames(stream: &EventStream, cfg: &E2VConfig) -> Result<FrameSequence> {
    cfg.validate()?;
    let (width, height) = (stream.width(), stream.height());
    let n = usize::from(width) * usize::from(height);
    let render = |state: f64| round_half_up((cfg.mid_gray * state.exp()).clamp(0.0, 255.0)) as u8;

    let Some((first, last)) = stream.span() else {
        let frame = Frame {
            t: 0,
            pixels: vec![render(0.0); n],
        };
        return FrameSequence::new(width, height, vec![frame]);
    };

    let count = (last - first) / cfg.frame_period_us + 1;
    let decay_rate = std::f64::consts::LN_2 / cfg.decay_half_life_us;
    let mut state = vec![0.0f64; n];
    let mut updated = vec![first; n];
    let events = stream.events();
    let mut next = 0;
    let mut frames = Vec::with_capacity(count as usize);

    for k in 0..count {
        let t_frame = first + k * cfg.frame_period_us;
        while next < events.len() && events[next].t <= t_frame {
            let e = events[next];
            let i = usize::from(e.y) * usize::from(width) + usize::from(e.x);
            let dt = (e.t - updated[i]) as f64;
            state[i] = state[i] * (-decay_rate * dt).exp() + cfg.contrast_gain * e.p.sign();
            updated[i] = e.t;
            next += 1;
        }
        let pixels = state
            .iter()
            .zip(&updated)
            .map(|(&s, &u)| {
                if s == 0.0 {
                    render(0.0)
                } else {
                    render(s * (-decay_rate * (t_frame - u) as f64).exp())
                }
            })
            .collect();
        frames.push(Frame { t: t_frame, pixels });
    }
    FrameSequence::new(width, height, frames)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::{Event, Polarity};

    fn pixel(seq: &FrameSequence, k: usize, x: usize, y: usize) -> u8 {
        seq.frames()[k].pixels[y * usize::from(seq.width()) + x]
    }

    #[test]
    fn empty_stream_is_single_mid_gray_frame() {
        let s = EventStream::empty(4, 3).unwrap();
        let seq = reconstruct_frames(&s, &E2VConfig::default()).unwrap();
        assert_eq!(seq.len(), 1);
        assert_eq!(seq.frames()[0].t, 0);
        assert!(seq.frames()[0].pixels.iter().all(|&p| p == 128));
    }

    #[test]
    fn single_event_rendered_immediately() {
        // 128 * e^0.2 = 156.34
        let s = EventStream::new(8, 8, vec![Event::new(1_000, 3, 3, Polarity::On)]).unwrap();
        let seq = reconstruct_frames(&s, &E2VConfig::default()).unwrap();
        assert_eq!(seq.len(), 1);
        assert_eq!(pixel(&seq, 0, 3, 3), 156);
        assert_eq!(pixel(&seq, 0, 2, 3), 128);
    }

    #[test]
    fn event_decays_over_one_half_life() {
        // 128 * e^(0.2 / 2) = 141.46
        let cfg = E2VConfig {
            frame_period_us: 50_000,
            decay_half_life_us: 50_000.0,
            ..E2VConfig::default()
        };
        let s = EventStream::new(
            8,
            8,
            vec![
                Event::new(0, 3, 3, Polarity::On),
                Event::new(50_000, 0, 0, Polarity::Off),
            ],
        )
        .unwrap();
        let seq = reconstruct_frames(&s, &cfg).unwrap();
        assert_eq!(seq.len(), 2);
        assert_eq!(pixel(&seq, 0, 3, 3), 156);
        assert_eq!(pixel(&seq, 1, 3, 3), 141);
        // 128 * e^-0.2 = 104.79
        assert_eq!(pixel(&seq, 1, 0, 0), 105);
    }

    #[test]
    fn frame_count_follows_span() {
        let cfg = E2VConfig {
            frame_period_us: 10,
            ..E2VConfig::default()
        };
        let s = EventStream::new(
            2,
            2,
            vec![Event::new(5, 0, 0, Polarity::On), Event::new(40, 1, 1, Polarity::On)],
        )
        .unwrap();
        let seq = reconstruct_frames(&s, &cfg).unwrap();
        // span 35 -> floor(35 / 10) + 1
        assert_eq!(seq.len(), 4);
        let times: Vec<u64> = seq.frames().iter().map(|f| f.t).collect();
        assert_eq!(times, [5, 15, 25, 35]);
    }

    #[test]
    fn saturates_at_white() {
        let events = (0..20).map(|i| Event::new(i, 0, 0, Polarity::On)).collect();
        let s = EventStream::new(1, 1, events).unwrap();
        let cfg = E2VConfig {
            frame_period_us: 10,
            ..E2VConfig::default()
        };
        let seq = reconstruct_frames(&s, &cfg).unwrap();
        // eleven events by t = 10: 128 * e^2.2 is far above white
        assert_eq!(pixel(&seq, 1, 0, 0), 255);
    }

    #[test]
    fn rejects_bad_config() {
        let s = EventStream::empty(1, 1).unwrap();
        let cfg = E2VConfig {
            contrast_gain: 0.0,
            ..E2VConfig::default()
        };
        assert!(reconstruct_frames(&s, &cfg).is_err());
    }
}
