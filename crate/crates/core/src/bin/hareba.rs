use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hareba::cli::{self, Settings};
use hareba::stream::{self, Stream, StreamConfig};
use hareba::Error;

#[derive(Debug, Parser)]
#[command(
    name = "hareba",
    version,
    about = "Online learning on imbalanced, drifting streams"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run repeated prequential experiments and write per-step G-mean CSVs.
    Run(Box<RunArgs>),
    /// Dump a generated stream as `t,x1,x2,y` lines.
    Stream(StreamArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// `key=value` settings file; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// circle, sine or sea
    #[arg(long)]
    dataset: Option<String>,
    /// Minority (positive) class rate, e.g. 0.1 or 0.01.
    #[arg(long)]
    imbalance: Option<String>,
    /// baseline, sliding, adaptive_cs, oob or areba
    #[arg(long)]
    method: Option<String>,
    /// Enable the drift detector (true/false).
    #[arg(long)]
    hybrid: Option<String>,
    #[arg(long)]
    steps: Option<String>,
    /// Step at which the concept swaps, or `none`.
    #[arg(long)]
    drift_step: Option<String>,
    #[arg(long)]
    reps: Option<String>,
    /// Base seed; repetition r uses seed + r.
    #[arg(long)]
    seed: Option<String>,
    /// AREBA memory budget (even).
    #[arg(long)]
    budget: Option<String>,
    /// Sliding window size.
    #[arg(long)]
    window: Option<String>,
    /// Output root directory.
    #[arg(long)]
    out: Option<String>,
    /// Also write SVG charts.
    #[arg(long)]
    plot: bool,
    /// Also write `rep,t,event` detector logs.
    #[arg(long)]
    events_log: bool,
    /// Comma-separated methods (or `all`) run on identical streams.
    #[arg(long)]
    compare: Option<String>,
}

#[derive(Debug, Args)]
struct StreamArgs {
    #[arg(long, default_value = "circle")]
    dataset: String,
    #[arg(long, default_value_t = 0.1)]
    imbalance: f64,
    #[arg(long, default_value_t = 5000)]
    steps: u64,
    /// Step at which the concept swaps; 0 disables drift.
    #[arg(long, default_value_t = 2501)]
    drift_step: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn settings_from(args: &RunArgs) -> Result<Settings, Error> {
    let mut settings = Settings::default();
    if let Some(path) = &args.config {
        settings.apply_all(&cli::read_config_file(path)?)?;
    }
    let flags = [
        ("dataset", &args.dataset),
        ("imbalance", &args.imbalance),
        ("method", &args.method),
        ("hybrid", &args.hybrid),
        ("steps", &args.steps),
        ("drift-step", &args.drift_step),
        ("reps", &args.reps),
        ("seed", &args.seed),
        ("budget", &args.budget),
        ("window", &args.window),
        ("out", &args.out),
        ("compare", &args.compare),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            settings.apply(key, v)?;
        }
    }
    settings.plot |= args.plot;
    settings.events_log |= args.events_log;
    settings.experiment.validate()?;
    Ok(settings)
}

fn run(args: RunArgs) -> Result<(), Error> {
    let settings = settings_from(&args)?;
    for cell in cli::run(&settings)? {
        let last = cell.stats.last().expect("at least one step");
        let drifts: usize = cell
            .runs
            .iter()
            .map(|r| {
                r.events
                    .iter()
                    .filter(|(_, e)| *e == hareba::DetectionEvent::DriftDetected)
                    .count()
            })
            .sum();
        println!(
            "{}: final G-mean {:.4} ± {:.4}, {} drift alarms over {} reps -> {}",
            cell.method,
            last.mean,
            last.stderr,
            drifts,
            cell.runs.len(),
            cell.dir.display()
        );
    }
    Ok(())
}

fn dump_stream(args: StreamArgs) -> Result<(), Error> {
    let config = StreamConfig {
        kind: args.dataset.parse()?,
        minority_rate: args.imbalance,
        total_steps: args.steps,
        drift_step: (args.drift_step > 0).then_some(args.drift_step),
        seed: args.seed,
    };
    let examples = Stream::new(config)?.collect::<Result<Vec<_>, _>>()?;
    let out: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(
            File::create(path).map_err(|e| io_error(format!("creating {}", path.display()), e))?,
        ),
        None => Box::new(io::stdout().lock()),
    };
    let mut out = BufWriter::new(out);
    stream::write_dump(&mut out, &examples)
        .and_then(|_| out.flush())
        .map_err(|e| io_error("writing stream dump".into(), e))
}

fn io_error(context: String, source: io::Error) -> Error {
    Error::Io { context, source }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(*args),
        Command::Stream(args) => dump_stream(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ Error::InvalidArgument(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
