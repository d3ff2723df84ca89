//! Synthetic face-proxy scenes shared by the integration tests.

// each test target uses a different subset
#![allow(dead_code)]

use evanon::io::{BoxKeyframe, Frame, FrameSequence};
use evanon::roi::{filter_background, filter_roi, warp_and_composite, BoxTrajectory, FeatherConfig};
use evanon::{BoxRect, Event, EventStream, Polarity};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn on_off(on: bool) -> Polarity {
    if on {
        Polarity::On
    } else {
        Polarity::Off
    }
}

/// Synthetic face-proxy scene: a swaying head outline with eyes, brows,
/// nose and mouth, in front of a few static flickering edges.
pub struct Scene {
    pub width: u16,
    pub height: u16,
    pub duration_us: u64,
    pub face_events: usize,
    pub background_events: usize,
}

/// Sub-pixel event before sensor quantization.
#[derive(Clone, Copy)]
pub struct RawEvent {
    t: f64,
    x: f64,
    y: f64,
    p: Polarity,
}

impl Scene {
    pub fn radii(&self) -> (f64, f64) {
        (0.14 * f64::from(self.width), 0.23 * f64::from(self.height))
    }

    pub fn center(&self, t: f64) -> (f64, f64) {
        let phase = std::f64::consts::TAU * t / self.duration_us as f64;
        (
            f64::from(self.width) * (0.5 + 0.04 * phase.sin()),
            f64::from(self.height) * (0.5 + 0.025 * (2.0 * phase + 0.5).sin()),
        )
    }

    pub fn trajectory(&self) -> BoxTrajectory {
        let (rx, ry) = self.radii();
        let keys = (0..=self.duration_us / 10_000)
            .map(|i| {
                let t = i * 10_000;
                let (cx, cy) = self.center(t as f64);
                BoxKeyframe {
                    frame_index: i,
                    t,
                    rect: BoxRect { x1: cx - rx - 3.0, y1: cy - ry - 3.0, x2: cx + rx + 3.0, y2: cy + ry + 3.0 },
                }
            })
            .collect();
        BoxTrajectory::new(keys).unwrap()
    }

    /// Point on a facial feature in unit face coordinates.
    fn feature_point(rng: &mut ChaCha8Rng) -> (f64, f64) {
        let u: f64 = rng.random();
        let side = if rng.random::<bool>() { 1.0 } else { -1.0 };
        match rng.random_range(0..100) {
            0..35 => {
                let a = u * std::f64::consts::TAU;
                (a.cos(), a.sin())
            }
            35..60 => {
                let a = u * std::f64::consts::TAU;
                (side * 0.4 + 0.15 * a.cos(), -0.3 + 0.1 * a.sin())
            }
            60..72 => (side * (0.2 + 0.4 * u), -0.55 + 0.05 * u),
            72..80 => (0.05 * u, -0.2 + 0.4 * u),
            _ => {
                let a = u * std::f64::consts::PI;
                (0.35 * a.cos(), 0.45 + 0.12 * a.sin())
            }
        }
    }

    pub fn raw_events(&self, seed: u64) -> Vec<RawEvent> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (w, h) = (f64::from(self.width), f64::from(self.height));
        let (rx, ry) = self.radii();
        let d = self.duration_us as f64;
        let mut out = Vec::with_capacity(self.face_events + self.background_events);
        for _ in 0..self.face_events {
            let t = rng.random_range(0.0..d);
            let (cx, cy) = self.center(t);
            let (cx1, cy1) = self.center(t + 100.0);
            let (u, v) = Self::feature_point(&mut rng);
            // leading edges brighten, trailing edges darken
            let p = on_off(u * (cx1 - cx) + v * (cy1 - cy) >= 0.0);
            out.push(RawEvent { t, x: cx + u * rx, y: cy + v * ry, p });
        }
        for _ in 0..self.background_events {
            let t = rng.random_range(0.0..d);
            let s: f64 = rng.random();
            let (x, y) = match rng.random_range(0..10) {
                0..2 => (0.12 * w, (0.1 + 0.85 * s) * h),
                2..4 => (0.88 * w, (0.1 + 0.85 * s) * h),
                4..6 => (s * w, 0.9 * h),
                _ => (s * w, rng.random_range(0.0..h)),
            };
            out.push(RawEvent { t, x, y, p: on_off(rng.random()) });
        }
        out
    }

    pub fn quantize(&self, raw: &[RawEvent]) -> EventStream {
        let events = raw
            .iter()
            .filter_map(|e| self.pixel(e.t, e.x, e.y, e.p))
            .collect();
        EventStream::new(self.width, self.height, events).unwrap()
    }

    fn pixel(&self, t: f64, x: f64, y: f64, p: Polarity) -> Option<Event> {
        let (x, y) = (x.round(), y.round());
        let inside = (0.0..f64::from(self.width)).contains(&x) && (0.0..f64::from(self.height)).contains(&y);
        inside.then(|| Event::new(t.max(0.0).round() as u64, x as u16, y as u16, p))
    }

    /// A second recording of the same scene: events dropped with 5%
    /// probability, displaced by up to one pixel and half a millisecond,
    /// plus 1% sensor noise.
    pub fn recapture(&self, raw: &[RawEvent], seed: u64) -> EventStream {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = self.duration_us as f64;
        let mut events = Vec::with_capacity(raw.len());
        for e in raw {
            if rng.random_bool(0.05) {
                continue;
            }
            let t = e.t + rng.random_range(-500.0..500.0);
            let x = e.x + rng.random_range(-1.0..1.0);
            let y = e.y + rng.random_range(-1.0..1.0);
            events.extend(self.pixel(t, x, y, e.p));
        }
        for _ in 0..raw.len() / 100 {
            let t = rng.random_range(0.0..d);
            let x = rng.random_range(0.0..f64::from(self.width));
            let y = rng.random_range(0.0..f64::from(self.height));
            events.extend(self.pixel(t, x, y, on_off(rng.random())));
        }
        EventStream::new(self.width, self.height, events).unwrap()
    }
}

/// Facial geometry of a rendered stand-in identity, in unit face
/// coordinates.
pub struct Identity {
    scale: (f64, f64),
    eye: (f64, f64, f64),
    mouth: (f64, f64, f64),
}

impl Identity {
    fn shade(&self, u: f64, v: f64) -> Option<f64> {
        let (u, v) = (u / self.scale.0, v / self.scale.1);
        if u * u + v * v > 1.0 {
            return None;
        }
        let (ex, ey, er) = self.eye;
        let eye = ((u.abs() - ex) / er).powi(2) + ((v - ey) / (0.6 * er)).powi(2) <= 1.0;
        let (my, mw, mh) = self.mouth;
        let mouth = (u / mw).powi(2) + ((v - my) / mh).powi(2) <= 1.0;
        let nose = u.abs() < 0.06 && (-0.1..0.25).contains(&v);
        Some(if eye {
            45.0
        } else if mouth {
            70.0
        } else if nose {
            125.0
        } else {
            165.0
        })
    }
}

impl Scene {
    /// Intensity frames of `identity` following the scene's head motion
    /// over a flat background, as an external face generator would output.
    pub fn face_frames(&self, identity: &Identity, period_us: u64) -> FrameSequence {
        let (w, h) = (usize::from(self.width), usize::from(self.height));
        let (rx, ry) = self.radii();
        let frames = (0..=self.duration_us / period_us)
            .map(|k| {
                let t = k * period_us;
                let (cx, cy) = self.center(t as f64);
                let pixels = (0..w * h)
                    .map(|i| {
                        let u = ((i % w) as f64 - cx) / rx;
                        let v = ((i / w) as f64 - cy) / ry;
                        identity.shade(u, v).unwrap_or(100.0).round() as u8
                    })
                    .collect();
                Frame { t, pixels }
            })
            .collect();
        FrameSequence::new(self.width, self.height, frames).unwrap()
    }
}

pub const STAND_IN: Identity = Identity { scale: (0.92, 1.02), eye: (0.33, -0.18, 0.2), mouth: (0.5, 0.42, 0.12) };

/// Replaces the face with its own content shuffled across a 4x4 grid of
/// blocks that follows the box, then composites it back through feathered
/// cutout and warping.
pub fn block_permuted_composite(stream: &EventStream, traj: &BoxTrajectory, seed: u64) -> EventStream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    const G: usize = 4;
    let (g, gf) = (G, G as f64);
    let mut perm: Vec<usize> = (0..g * g).collect();
    while perm.iter().enumerate().any(|(i, &p)| i == p) {
        perm.shuffle(&mut rng);
    }
    let face = filter_roi(stream, traj);
    let shuffled = face
        .events()
        .iter()
        .filter_map(|e| {
            let r = traj.box_at(e.t as f64);
            let u = ((f64::from(e.x) - r.x1) / r.width() * gf).clamp(0.0, gf - 1e-6);
            let v = ((f64::from(e.y) - r.y1) / r.height() * gf).clamp(0.0, gf - 1e-6);
            let target = perm[(v as usize) * g + u as usize];
            let nu = (target % g) as f64 + u.fract();
            let nv = (target / g) as f64 + v.fract();
            let x = (r.x1 + nu / gf * r.width()).round();
            let y = (r.y1 + nv / gf * r.height()).round();
            let fits = (0.0..f64::from(stream.width())).contains(&x) && (0.0..f64::from(stream.height())).contains(&y);
            fits.then(|| Event::new(e.t, x as u16, y as u16, e.p))
        })
        .collect();
    let filler = EventStream::new(stream.width(), stream.height(), shuffled).unwrap();
    let feather = FeatherConfig::new(5.0, seed).unwrap();
    let (background, _) = filter_background(stream, traj, &feather).unwrap();
    warp_and_composite(&filler, &background, traj, traj).unwrap().0
}
