use std::path::{Path, PathBuf};

use evanon::bridge::{reconstruct_frames, simulate_events, E2VConfig, V2EConfig};
use evanon::event::slice_windows;
use evanon::io::{
    read_boxes, read_detections, read_embeddings, read_events, read_frames, read_landmarks,
    read_poses, write_events, write_frames, Frame, FrameSequence,
};
use evanon::metrics::{
    detection_utility, emd_sliced, identity_similarity, mimicry_error, pose_error, stcd,
    temporal_stability, window_density, EmdConfig, MetricReport, StcdConfig, WindowPairing,
};
use evanon::roi::{anonymize_pipeline, BoxTrajectory, FeatherConfig};
use evanon::{Error, EventStream, Result, WindowConfig};

use crate::config::Resolver;
use crate::{
    AnonymizeArgs, Geometry, MetricsArgs, ReconstructArgs, RenderArgs, SimulateArgs, V2EFlags,
    WindowFlags,
};

const MID_GRAY: f64 = 128.0;

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Explicit sensor size for text event files; `None` infers it from the
/// largest coordinates.
fn geometry(flags: Geometry, s: &mut Resolver) -> Result<Option<(u16, u16)>> {
    let width = s.get_opt("width", flags.width)?;
    let height = s.get_opt("height", flags.height)?;
    match (width, height) {
        (Some(w), Some(h)) => Ok(Some((w, h))),
        (None, None) => Ok(None),
        _ => Err(Error::invalid("--width and --height must be given together")),
    }
}

fn read_stream(path: &Path, flags: Geometry, s: &mut Resolver) -> Result<EventStream> {
    let geometry = geometry(flags, s)?;
    read_events(path, geometry)
}

fn v2e_config(flags: V2EFlags, seed: u64, s: &mut Resolver) -> Result<V2EConfig> {
    let d = V2EConfig::default();
    let cfg = V2EConfig {
        threshold: s.get("threshold", flags.threshold, d.threshold)?,
        log_eps: s.get("log_eps", flags.log_eps, d.log_eps)?,
        refractory_us: s.get("refractory_us", flags.refractory_us, d.refractory_us)?,
        max_events_per_pixel_per_frame_pair: s
            .get_opt("max_events_per_pair", flags.max_events_per_pair)?,
        seed,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn window_config(flags: WindowFlags, s: &mut Resolver) -> Result<WindowConfig> {
    let d = WindowConfig::default();
    WindowConfig::new(
        s.get("window_us", flags.window_us, d.len_us)?,
        s.get("overlap", flags.overlap, d.overlap)?,
    )
}

pub fn reconstruct(args: ReconstructArgs, mut s: Resolver) -> Result<()> {
    let stream = read_stream(&args.input, args.geometry, &mut s)?;
    let d = E2VConfig::default();
    let cfg = E2VConfig {
        frame_period_us: s.get("frame_period_us", args.frame_period_us, d.frame_period_us)?,
        decay_half_life_us: s.get("half_life_us", args.half_life_us, d.decay_half_life_us)?,
        contrast_gain: s.get("contrast_gain", args.contrast_gain, d.contrast_gain)?,
        mid_gray: s.get("mid_gray", args.mid_gray, d.mid_gray)?,
    };
    let frames = reconstruct_frames(&stream, &cfg)?;
    write_frames(&args.output, &frames)?;
    println!("{} frames written to {}", frames.len(), args.output.display());
    Ok(())
}

pub fn simulate(args: SimulateArgs, mut s: Resolver) -> Result<()> {
    let frames = read_frames(&args.input)?;
    let cfg = v2e_config(args.v2e, 0, &mut s)?;
    let events = simulate_events(&frames, &cfg)?;
    write_events(&args.output, &events)?;
    println!("{} events written to {}", events.len(), args.output.display());
    Ok(())
}

pub fn anonymize(args: AnonymizeArgs, mut s: Resolver, seed: u64) -> Result<()> {
    let report_path = args.report.clone().unwrap_or_else(|| {
        let mut p = args.output.clone().into_os_string();
        p.push(".report.txt");
        PathBuf::from(p)
    });
    s.record("events", args.events.display());
    s.record("anon_frames", args.anon_frames.display());
    s.record("boxes", args.boxes.display());
    s.record("output", args.output.display());
    let src = read_stream(&args.events, args.geometry, &mut s)?;
    let frames = read_frames(&args.anon_frames)?;
    let trajectory = BoxTrajectory::new(read_boxes(&args.boxes)?)?;
    let feather = FeatherConfig::new(
        s.get("sigma", args.sigma, FeatherConfig::default().sigma)?,
        s.get("feather_seed", args.feather_seed, seed)?,
    )?;
    let v2e = v2e_config(args.v2e, seed, &mut s)?;

    let (out, report) = anonymize_pipeline(&src, &frames, &trajectory, &feather, &v2e)?;
    write_events(&args.output, &out)?;
    let mut text: String = s
        .into_config()
        .iter()
        .map(|(k, v)| format!("config.{k}={v}\n"))
        .collect();
    text.push_str(&report.to_string());
    write_text(&report_path, &text)?;
    print!("{report}");
    Ok(())
}

/// Both paths of a compared pair, or neither.
fn pair<'a>(
    a: &'a Option<PathBuf>,
    b: &'a Option<PathBuf>,
    names: (&str, &str),
) -> Result<Option<(&'a Path, &'a Path)>> {
    match (a, b) {
        (Some(a), Some(b)) => Ok(Some((a, b))),
        (None, None) => Ok(None),
        _ => Err(Error::invalid(format!("--{} and --{} must be given together", names.0, names.1))),
    }
}

pub fn metrics(args: MetricsArgs, mut s: Resolver, seed: u64) -> Result<()> {
    let streams = pair(&args.a, &args.b, ("a", "b"))?;
    let poses = pair(&args.orig_poses, &args.gen_poses, ("orig-poses", "gen-poses"))?;
    let landmarks =
        pair(&args.orig_landmarks, &args.gen_landmarks, ("orig-landmarks", "gen-landmarks"))?;
    let detections =
        pair(&args.ref_detections, &args.anon_detections, ("ref-detections", "anon-detections"))?;
    let event_detections = pair(
        &args.ref_event_detections,
        &args.anon_event_detections,
        ("ref-event-detections", "anon-event-detections"),
    )?;
    let embeddings = (&args.src_embeddings, &args.gen_embeddings);
    if streams.is_none()
        && poses.is_none()
        && landmarks.is_none()
        && detections.is_none()
        && event_detections.is_none()
        && embeddings.0.is_none()
        && embeddings.1.is_none()
    {
        return Err(Error::invalid("no metric inputs given"));
    }

    let mut report = MetricReport::default();
    if let Some((a, b)) = streams {
        s.record("a", a.display());
        s.record("b", b.display());
        let window = window_config(args.window, &mut s)?;
        let per_polarity =
            s.get("per_polarity", args.per_polarity.then_some(true), false)?;
        let slices = s.get("slices", args.slices, EmdConfig::default().slices)?;
        let emd_seed = s.get("emd_seed", args.emd_seed, seed)?;
        let geometry = geometry(args.geometry, &mut s)?;
        let sa = read_events(a, geometry)?;
        let sb = read_events(b, geometry)?;
        let stcd_cfg = StcdConfig { window, per_polarity, pairing: WindowPairing::Aligned };
        let emd_cfg = EmdConfig { slices, seed: emd_seed, window, per_polarity };
        report.stcd = Some(stcd(&sa, &sb, &stcd_cfg)?);
        report.emd = Some(emd_sliced(&sa, &sb, &emd_cfg)?);
        report.density = window_density(&sa, &sb, &window)?;
    }
    if let Some(path) = embeddings.0 {
        s.record("src_embeddings", path.display());
    }
    if let Some(path) = embeddings.1 {
        s.record("gen_embeddings", path.display());
    }
    let src = embeddings.0.as_deref().map(read_embeddings).transpose()?;
    let gen = embeddings.1.as_deref().map(read_embeddings).transpose()?;
    if let (Some(src), Some(gen)) = (&src, &gen) {
        report.identity_similarity = Some(identity_similarity(src, gen));
    }
    report.temporal_stability_src = src.as_ref().map(temporal_stability).transpose()?;
    report.temporal_stability_gen = gen.as_ref().map(temporal_stability).transpose()?;
    if let Some((orig, gen)) = poses {
        s.record("orig_poses", orig.display());
        s.record("gen_poses", gen.display());
        report.pose_error = Some(pose_error(&read_poses(orig)?, &read_poses(gen)?));
    }
    if let Some((orig, gen)) = landmarks {
        s.record("orig_landmarks", orig.display());
        s.record("gen_landmarks", gen.display());
        report.mimicry_error = Some(mimicry_error(&read_landmarks(orig)?, &read_landmarks(gen)?));
    }
    if let Some((r, a)) = detections {
        s.record("ref_detections", r.display());
        s.record("anon_detections", a.display());
        report.detection = Some(detection_utility(&read_detections(r)?, &read_detections(a)?)?);
    }
    if let Some((r, a)) = event_detections {
        s.record("ref_event_detections", r.display());
        s.record("anon_event_detections", a.display());
        report.event_detection =
            Some(detection_utility(&read_detections(r)?, &read_detections(a)?)?);
    }
    report.config = s.into_config();

    if let Some(path) = &args.report {
        write_text(path, &report.to_key_values())?;
    }
    if let Some(path) = &args.windows_csv {
        write_text(path, &report.windows_csv())?;
    }
    print!("{}", report.summary_table());
    Ok(())
}

pub fn render(args: RenderArgs, mut s: Resolver) -> Result<()> {
    let stream = read_stream(&args.input, args.geometry, &mut s)?;
    let window = window_config(args.window, &mut s)?;
    let gain = s.get("render_gain", args.render_gain, 32.0)?;
    if !(gain.is_finite() && gain > 0.0) {
        return Err(Error::invalid(format!("render gain must be positive, got {gain}")));
    }
    let frames = rasterize(&stream, &window, gain)?;
    write_frames(&args.output, &frames)?;
    println!("{} frames written to {}", frames.len(), args.output.display());
    Ok(())
}

/// One frame per window: mid gray plus `gain` times the net polarity count
/// of each pixel, clamped to 8 bits and timestamped at the window start.
pub fn rasterize(stream: &EventStream, window: &WindowConfig, gain: f64) -> Result<FrameSequence> {
    let (width, height) = (stream.width(), stream.height());
    let n = usize::from(width) * usize::from(height);
    let windows = slice_windows(stream, window)?;
    if windows.is_empty() {
        let frame = Frame { t: 0, pixels: vec![MID_GRAY as u8; n] };
        return FrameSequence::new(width, height, vec![frame]);
    }
    let mut net = vec![0i64; n];
    let frames = windows
        .into_iter()
        .map(|(w, range)| {
            net.fill(0);
            for e in &stream.events()[range] {
                net[usize::from(e.y) * usize::from(width) + usize::from(e.x)] += i64::from(e.p.as_i8());
            }
            let pixels = net
                .iter()
                .map(|&c| ((MID_GRAY + gain * c as f64).clamp(0.0, 255.0) + 0.5).floor() as u8)
                .collect();
            Frame { t: w.start, pixels }
        })
        .collect();
    FrameSequence::new(width, height, frames)
}
