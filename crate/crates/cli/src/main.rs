use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use evanon::{Error, ErrorKind};

mod commands;
mod config;

/// Face anonymization and evaluation for event-camera recordings.
#[derive(Parser, Debug)]
#[command(name = "evanon", version)]
struct Cli {
    /// Worker threads for parallel stages; defaults to one per core.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Flat key=value settings file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Default seed for every stochastic stage.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Reconstruct grayscale frames from events.
    Reconstruct(ReconstructArgs),
    /// Convert a frame directory into events.
    Simulate(SimulateArgs),
    /// Replace the face region of an event stream.
    Anonymize(AnonymizeArgs),
    /// Compare event streams and per-frame tracks.
    Metrics(MetricsArgs),
    /// Render per-window polarity rasters for inspection.
    Render(RenderArgs),
}

/// Sensor size for text event files, which carry no header geometry.
#[derive(Args, Debug, Clone, Copy)]
struct Geometry {
    #[arg(long)]
    width: Option<u16>,
    #[arg(long)]
    height: Option<u16>,
}

#[derive(Args, Debug)]
struct ReconstructArgs {
    #[arg(long)]
    input: PathBuf,
    /// Output frame directory.
    #[arg(long)]
    output: PathBuf,
    #[command(flatten)]
    geometry: Geometry,
    #[arg(long)]
    frame_period_us: Option<u64>,
    #[arg(long)]
    half_life_us: Option<f64>,
    #[arg(long)]
    contrast_gain: Option<f64>,
    #[arg(long)]
    mid_gray: Option<f64>,
}

#[derive(Args, Debug, Clone, Copy)]
struct V2EFlags {
    /// Log-intensity contrast threshold.
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    log_eps: Option<f64>,
    #[arg(long)]
    refractory_us: Option<u64>,
    #[arg(long)]
    max_events_per_pair: Option<u32>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// Input frame directory.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[command(flatten)]
    v2e: V2EFlags,
}

#[derive(Args, Debug)]
struct AnonymizeArgs {
    /// Source event stream.
    #[arg(long)]
    events: PathBuf,
    /// Directory of externally anonymized frames.
    #[arg(long)]
    anon_frames: PathBuf,
    /// Face box keyframes.
    #[arg(long)]
    boxes: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// Report path; defaults to the output path with `.report.txt` appended.
    #[arg(long)]
    report: Option<PathBuf>,
    #[command(flatten)]
    geometry: Geometry,
    /// Feathering width in pixels.
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    feather_seed: Option<u64>,
    #[command(flatten)]
    v2e: V2EFlags,
}

#[derive(Args, Debug, Clone, Copy)]
struct WindowFlags {
    #[arg(long)]
    window_us: Option<u64>,
    /// Fraction of each window shared with the next, in [0, 1).
    #[arg(long)]
    overlap: Option<f64>,
}

#[derive(Args, Debug)]
struct MetricsArgs {
    #[arg(long)]
    a: Option<PathBuf>,
    #[arg(long)]
    b: Option<PathBuf>,
    #[command(flatten)]
    geometry: Geometry,
    #[arg(long)]
    src_embeddings: Option<PathBuf>,
    #[arg(long)]
    gen_embeddings: Option<PathBuf>,
    #[arg(long)]
    orig_poses: Option<PathBuf>,
    #[arg(long)]
    gen_poses: Option<PathBuf>,
    #[arg(long)]
    orig_landmarks: Option<PathBuf>,
    #[arg(long)]
    gen_landmarks: Option<PathBuf>,
    /// Detections on reference intensity frames.
    #[arg(long)]
    ref_detections: Option<PathBuf>,
    #[arg(long)]
    anon_detections: Option<PathBuf>,
    /// Detections on reference event representations.
    #[arg(long)]
    ref_event_detections: Option<PathBuf>,
    #[arg(long)]
    anon_event_detections: Option<PathBuf>,
    #[command(flatten)]
    window: WindowFlags,
    /// Compare ON and OFF events separately.
    #[arg(long)]
    per_polarity: bool,
    #[arg(long)]
    slices: Option<usize>,
    #[arg(long)]
    emd_seed: Option<u64>,
    /// key=value report path.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Per-window table path.
    #[arg(long)]
    windows_csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RenderArgs {
    #[arg(long)]
    input: PathBuf,
    /// Output frame directory.
    #[arg(long)]
    output: PathBuf,
    #[command(flatten)]
    geometry: Geometry,
    #[command(flatten)]
    window: WindowFlags,
    /// Gray levels per net event count.
    #[arg(long)]
    render_gain: Option<f64>,
}

fn exit_code(kind: ErrorKind) -> u8 {
    match kind {
        ErrorKind::Validation => 1,
        ErrorKind::Io => 2,
        ErrorKind::Computation => 3,
    }
}

fn run(cli: Cli) -> evanon::Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::invalid("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::invalid(format!("cannot start thread pool: {e}")))?;
    }
    let mut settings = config::Resolver::load(cli.config.as_deref())?;
    let seed = settings.get("seed", cli.seed, 0u64)?;
    match cli.command {
        Command::Reconstruct(args) => commands::reconstruct(args, settings),
        Command::Simulate(args) => commands::simulate(args, settings),
        Command::Anonymize(args) => commands::anonymize(args, settings, seed),
        Command::Metrics(args) => commands::metrics(args, settings, seed),
        Command::Render(args) => commands::render(args, settings),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // usage errors share the validation status; help and version succeed
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(e.kind()))
        }
    }
}
