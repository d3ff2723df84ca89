//! Library results checked against independent brute-force computations.

use evanon::bridge::{simulate_events, V2EConfig};
use evanon::event::normalize_events;
use evanon::io::{Frame, FrameSequence};
use evanon::metrics::{
    random_directions, sliced_wasserstein_slices, stcd, wasserstein_1d, StcdConfig,
};
use evanon::{Event, EventStream, Polarity, WindowConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_stream(rng: &mut ChaCha8Rng, n: usize, span: u64) -> EventStream {
    let events = (0..n)
        .map(|_| {
            let p = if rng.random::<bool>() { Polarity::On } else { Polarity::Off };
            Event::new(rng.random_range(0..=span), rng.random_range(0..64), rng.random_range(0..48), p)
        })
        .collect();
    EventStream::new(64, 48, events).unwrap()
}

fn brute_chamfer(a: &[[f64; 3]], b: &[[f64; 3]]) -> f64 {
    let one_way = |from: &[[f64; 3]], to: &[[f64; 3]]| {
        from.iter()
            .map(|p| {
                to.iter()
                    .map(|q| (0..3).map(|k| (p[k] - q[k]).powi(2)).sum::<f64>().sqrt())
                    .fold(f64::INFINITY, f64::min)
            })
            .sum::<f64>()
            / from.len() as f64
    };
    one_way(a, b) + one_way(b, a)
}

#[test]
fn stcd_matches_all_pairs_chamfer() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..20 {
        let a = random_stream(&mut rng, 50 + trial * 40, 9_999);
        let b = random_stream(&mut rng, 30 + trial * 35, 9_999);
        let cfg = StcdConfig { window: WindowConfig::new(10_000, 0.0).unwrap(), ..Default::default() };
        let m = stcd(&a, &b, &cfg).unwrap();
        assert_eq!(m.windows.len(), 1);
        let expected = brute_chamfer(
            &normalize_events(a.events()).unwrap().points,
            &normalize_events(b.events()).unwrap().points,
        );
        assert!((m.aggregate.mean - expected).abs() <= 1e-12, "trial {trial}");
    }
}

/// Independent W1: integrate |F_a - F_b| over the merged breakpoints.
fn cdf_w1(a: &[f64], b: &[f64]) -> f64 {
    let mut xs: Vec<f64> = a.iter().chain(b).copied().collect();
    xs.sort_by(f64::total_cmp);
    let cdf = |s: &[f64], x: f64| s.iter().filter(|&&v| v <= x).count() as f64 / s.len() as f64;
    xs.windows(2).map(|w| (cdf(a, w[0]) - cdf(b, w[0])).abs() * (w[1] - w[0])).sum()
}

#[test]
fn wasserstein_matches_cdf_integral() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let a: Vec<f64> = (0..rng.random_range(1..30)).map(|_| rng.random_range(-2.0..2.0)).collect();
        let b: Vec<f64> = (0..rng.random_range(1..30)).map(|_| rng.random_range(-1.0..3.0)).collect();
        let got = wasserstein_1d(&a, &b).unwrap();
        assert!((got - cdf_w1(&a, &b)).abs() < 1e-12);
    }
}

#[test]
fn sliced_estimate_stable_when_doubling_slices() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let cloud = |rng: &mut ChaCha8Rng, skew: f64| -> Vec<[f64; 3]> {
        (0..400).map(|_| [rng.random::<f64>().powf(skew), rng.random(), rng.random()]).collect()
    };
    let (a, b) = (cloud(&mut rng, 1.0), cloud(&mut rng, 2.0));
    let slices = |l: usize| sliced_wasserstein_slices(&a, &b, &random_directions(l, 5)).unwrap();
    let small = slices(128);
    let large = slices(256);
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let sd = |v: &[f64]| {
        let m = mean(v);
        (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / v.len() as f64).sqrt()
    };
    let stderr = sd(&small) / (small.len() as f64).sqrt();
    assert!((mean(&small) - mean(&large)).abs() < 3.0 * stderr);
    assert!(sd(&large) / (large.len() as f64).sqrt() < stderr);
}

/// Per-pixel monotone ramp frames between two intensities.
fn ramp_frames(starts: &[u8], ends: &[u8], steps: u64) -> FrameSequence {
    let frames = (0..=steps)
        .map(|k| {
            let s = k as f64 / steps as f64;
            let pixels = starts
                .iter()
                .zip(ends)
                .map(|(&a, &b)| {
                    let (la, lb) = (f64::from(a.max(1)).ln(), f64::from(b.max(1)).ln());
                    let v = (la + s * (lb - la)).exp().round().clamp(0.0, 255.0) as u8;
                    match k {
                        0 => a,
                        _ if k == steps => b,
                        _ => v.clamp(a.min(b), a.max(b)),
                    }
                })
                .collect();
            Frame { t: k * 1_000, pixels }
        })
        .collect();
    FrameSequence::new(starts.len() as u16, 1, frames).unwrap()
}

#[test]
fn v2e_count_follows_total_log_change() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let starts: Vec<u8> = (0..256).map(|_| rng.random()).collect();
    let ends: Vec<u8> = (0..256).map(|_| rng.random()).collect();
    let seq = ramp_frames(&starts, &ends, 12);
    for c in [0.1, 0.2, 0.5] {
        let cfg = V2EConfig { threshold: c, ..V2EConfig::default() };
        let out = simulate_events(&seq, &cfg).unwrap();
        let mut counts = vec![0usize; starts.len()];
        for e in out.events() {
            counts[usize::from(e.x)] += 1;
        }
        for (x, (&a, &b)) in starts.iter().zip(&ends).enumerate() {
            let l = |v: u8| (f64::from(v) / 255.0 + cfg.log_eps).ln();
            let expected = ((l(b) - l(a)).abs() / c).floor() as usize;
            assert_eq!(counts[x], expected, "pixel {x}: {a} -> {b}, C = {c}");
        }
    }
}
