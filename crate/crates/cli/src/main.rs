use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use crowdmind::pipeline::DEFAULT_TRAINING_SAMPLES;
use crowdmind::synth::{write_scenario, ScenarioKind, ScenarioSpec, SynthError};
use crowdmind::{run_pipeline, write_outputs, AnalysisConfig, Dimension, OutputKind};

#[derive(Parser)]
#[command(name = "crowdmind", version, about = "Crowd personality, emotion and culture from pedestrian tracks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a tracking file and write reports.
    Analyze(AnalyzeArgs),
    /// Generate a synthetic scenario with ground truth.
    Synth(SynthArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Directory holding tracking.txt (and optionally frame images).
    #[arg(long)]
    input_dir: PathBuf,
    #[arg(long)]
    output_dir: PathBuf,
    /// Prefix of every output file.
    #[arg(long)]
    video_name: String,
    #[arg(long)]
    fps: f64,
    #[arg(long)]
    pixels_per_meter: f64,
    /// Dimensions to write: I physical, II social, III personal, IV cultural.
    #[arg(long, value_delimiter = ',', default_value = "I,II,III,IV")]
    dims: Vec<Dimension>,
    /// Write every N-th observation of each pedestrian.
    #[arg(long, default_value_t = 1)]
    every: u32,
    /// Also write the per-frame all-features table.
    #[arg(long)]
    all_features: bool,
    /// Output kinds: txt, chart, overlay.
    #[arg(long, value_delimiter = ',', default_value = "txt,chart")]
    output: Vec<OutputKind>,
    /// Read tracking_correction.txt instead of tracking.txt.
    #[arg(long)]
    use_correction: bool,
    /// Personality item equations, one `id;factor;expression` per line.
    #[arg(long)]
    items: Option<PathBuf>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Worker threads (default: one per core).
    #[arg(long)]
    threads: Option<usize>,
    /// Pretrained socialization net instead of training one.
    #[arg(long)]
    net: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_TRAINING_SAMPLES)]
    train_samples: usize,
    #[arg(long, default_value_t = 1000)]
    train_epochs: usize,
}

#[derive(Args)]
struct SynthArgs {
    /// grouped-walk, lone-walkers or corridor.
    #[arg(long)]
    kind: ScenarioKind,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    groups: Option<usize>,
    #[arg(long)]
    group_size: Option<usize>,
    /// Loners of a grouped walk, or all pedestrians of the other kinds.
    #[arg(long)]
    loners: Option<usize>,
    /// Meters per second.
    #[arg(long)]
    base_speed: Option<f64>,
    /// Position noise in meters.
    #[arg(long)]
    noise: Option<f64>,
    #[arg(long)]
    frames: Option<u32>,
    #[arg(long)]
    fps: Option<f64>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    pixels_per_meter: Option<f64>,
}

fn analyze(args: AnalyzeArgs) -> Result<(), crowdmind::Error> {
    let config = AnalysisConfig {
        fps: args.fps,
        pixels_per_meter: args.pixels_per_meter,
        dimensions: args.dims.into_iter().collect(),
        output_every: args.every,
        all_features: args.all_features,
        output_kinds: args.output.into_iter().collect(),
        use_correction: args.use_correction,
        items_file: args.items,
        seed: args.seed,
        threads: args.threads,
        net_file: args.net,
        training_samples: args.train_samples,
        training_epochs: args.train_epochs,
        ..AnalysisConfig::new(args.input_dir, args.output_dir, &args.video_name)
    };
    let summary = run_pipeline(&config)?;
    let written = write_outputs(&summary, &config)?;
    println!(
        "{}: {} frames, {} pedestrians, {} groups",
        summary.video_name,
        summary.frame_count,
        summary.pedestrian_count,
        summary.group_count()
    );
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn synth(args: SynthArgs) -> Result<(), SynthError> {
    let d = ScenarioSpec::new(args.kind);
    let spec = ScenarioSpec {
        group_count: args.groups.unwrap_or(d.group_count),
        group_size: args.group_size.unwrap_or(d.group_size),
        loner_count: args.loners.unwrap_or(d.loner_count),
        base_speed: args.base_speed.unwrap_or(d.base_speed),
        position_noise: args.noise.unwrap_or(d.position_noise),
        frames: args.frames.unwrap_or(d.frames),
        fps: args.fps.unwrap_or(d.fps),
        seed: args.seed,
        pixels_per_meter: args.pixels_per_meter.unwrap_or(d.pixels_per_meter),
        ..d
    };
    let truth = write_scenario(&args.out, &spec)?;
    println!("wrote {} pedestrians to {}", truth.pedestrians.len(), args.out.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze(args) => analyze(args).map_err(|e| (e.exit_code(), e.to_string())),
        Command::Synth(args) => synth(args).map_err(|e| {
            let code = match e {
                SynthError::InvalidSpec(_) => 2,
                SynthError::Io { .. } => 3,
            };
            (code, e.to_string())
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, message)) => {
            log::error!("{message}");
            eprintln!("error: {message}");
            ExitCode::from(code as u8)
        }
    }
}
