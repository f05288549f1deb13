use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use seedbs::detect::{
    IcChoice, IntervalMode, Selection, SigmaRule, ThresholdRule, DEFAULT_DECAY,
    DEFAULT_THRESHOLD_CONSTANT,
};
use seedbs::gain::CusumForm;
use seedbs::intervals::Layer;
use seedbs::select::DEFAULT_SSIC_THETA;
use seedbs::signals::simulate;
use seedbs::{
    random_intervals, seeded_intervals, total_interval_length, DetectConfig, NoiseModel,
    SeededParams, Spacing,
};
use seedbs_cli::bench::{self, BenchConfig, Method};
use seedbs_cli::input::read_series;
use seedbs_cli::report::DetectReport;
use seedbs_cli::resolve_signal;

/// Seeded binary segmentation for change-in-mean detection.
#[derive(Parser)]
#[command(name = "seedbs", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print background intervals as CSV.
    Intervals(IntervalsArgs),
    /// Detect change points in a series read from CSV or standard input.
    Detect(DetectArgs),
    /// Write noisy replicates of a signal.
    Simulate(SimulateArgs),
    /// Compare interval constructions over simulated replicates.
    Bench(BenchArgs),
}

fn decay(s: &str) -> Result<f64, String> {
    let a: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if (0.5..1.0).contains(&a) {
        Ok(a)
    } else {
        Err(format!("decay must lie in [0.5, 1), got {a}"))
    }
}

fn min_len(s: &str) -> Result<usize, String> {
    let m: usize = s
        .parse()
        .map_err(|_| format!("{s:?} is not a positive integer"))?;
    if m >= 2 {
        Ok(m)
    } else {
        Err(format!("minimal length must be at least 2, got {m}"))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SpacingArg {
    CommonShift,
    EndpointGrids,
}

#[derive(Args)]
struct IntervalsArgs {
    /// Series length T.
    #[arg(long)]
    length: usize,
    /// Decay a in [0.5, 1).
    #[arg(long, value_parser = decay, default_value_t = DEFAULT_DECAY)]
    decay: f64,
    /// Drop intervals covering fewer observations.
    #[arg(long, value_parser = min_len, default_value_t = 2)]
    min_len: usize,
    #[arg(long, value_enum, default_value = "common-shift")]
    spacing: SpacingArg,
    /// Draw this many random intervals instead.
    #[arg(long)]
    random: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum SelectionArg {
    Greedy,
    Not,
}

impl From<SelectionArg> for Selection {
    fn from(s: SelectionArg) -> Self {
        match s {
            SelectionArg::Greedy => Selection::Greedy,
            SelectionArg::Not => Selection::Not,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum IcArg {
    None,
    Ssic,
    Bic,
    Constant,
}

/// Options shared by `detect` and `bench`.
#[derive(Args)]
struct SelectArgs {
    #[arg(long, value_enum, default_value = "greedy")]
    selection: SelectionArg,
    /// Information criterion along the solution path; `none` thresholds instead.
    #[arg(long, value_enum, default_value = "ssic")]
    ic: IcArg,
    /// Exponent of the sSIC penalty.
    #[arg(long, default_value_t = DEFAULT_SSIC_THETA)]
    theta: f64,
    /// Per-change-point penalty for `--ic constant`.
    #[arg(long, required_if_eq("ic", "constant"))]
    alpha: Option<f64>,
    #[arg(long, value_parser = min_len, default_value_t = 2)]
    min_len: usize,
}

impl SelectArgs {
    fn ic(&self) -> IcChoice {
        match self.ic {
            IcArg::None => IcChoice::None,
            IcArg::Ssic => IcChoice::Ssic(self.theta),
            IcArg::Bic => IcChoice::Bic,
            IcArg::Constant => IcChoice::Constant(self.alpha.unwrap_or_default()),
        }
    }
}

#[derive(Args)]
struct DetectArgs {
    /// CSV file; standard input when absent or `-`.
    input: Option<PathBuf>,
    /// Column name for multi-column CSV with a header.
    #[arg(long)]
    column: Option<String>,
    #[arg(long, value_parser = decay, default_value_t = DEFAULT_DECAY)]
    decay: f64,
    /// Use this many random intervals instead of seeded ones.
    #[arg(long)]
    random: Option<usize>,
    /// Seed of the random intervals.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    select: SelectArgs,
    /// Fixed selection threshold (with `--ic none`).
    #[arg(long, conflicts_with = "threshold_const")]
    threshold: Option<f64>,
    /// Constant C of the automatic threshold C * sigma * sqrt(2 log T).
    #[arg(long)]
    threshold_const: Option<f64>,
    /// Known noise standard deviation; estimated from the data otherwise.
    #[arg(long)]
    sigma: Option<f64>,
    /// Largest model considered by the information criterion.
    #[arg(long)]
    max_changepoints: Option<usize>,
    /// Use s - left + 1 as the left count in the CUSUM weights.
    #[arg(long)]
    shifted_cusum: bool,
    /// Evaluate intervals on one thread.
    #[arg(long)]
    serial: bool,
}

#[derive(Args)]
struct SimulateArgs {
    /// Signal spec file or bundled name (blocks, fms, mix, teeth10, stairs10).
    #[arg(long)]
    signal: String,
    /// Noise standard deviation; defaults to the spec's own, else 1.
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    reps: usize,
    /// Repeat the pattern this many times.
    #[arg(long)]
    repeat: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    /// Signal spec file or bundled name.
    #[arg(long)]
    signal: String,
    /// Comma-separated list such as `seeded:0.7071,random:5000`.
    #[arg(long, value_parser = bench::parse_methods, default_value = "seeded:0.7071067811865476")]
    methods: std::vec::Vec<Method>,
    #[arg(long, default_value_t = 100)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Noise standard deviation; defaults to the spec's own, else 1.
    #[arg(long)]
    sigma: Option<f64>,
    /// Repeat the pattern this many times.
    #[arg(long)]
    repeat: Option<usize>,
    /// Worker threads; replicates run in parallel.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[command(flatten)]
    select: SelectArgs,
    /// Add exact dynamic programming rows (needs `--ic bic` or `--ic constant`).
    #[arg(long)]
    oracle: bool,
    /// Print per-method means and standard deviations.
    #[arg(long)]
    summary: bool,
    /// Per-replicate rows go here; standard output when absent and no summary is asked for.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Intervals(a) => cmd_intervals(a),
        Command::Detect(a) => cmd_detect(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn cmd_intervals(a: IntervalsArgs) -> Result<()> {
    let ivs = match a.random {
        Some(count) => random_intervals(a.length, count, a.min_len, a.seed)?,
        None => {
            let spacing = match a.spacing {
                SpacingArg::CommonShift => Spacing::CommonShift,
                SpacingArg::EndpointGrids => Spacing::EndpointGrids,
            };
            seeded_intervals(
                &SeededParams::new(a.length, a.decay, a.min_len)?.with_spacing(spacing),
            )?
        }
    };
    let mut out = BufWriter::new(io::stdout().lock());
    writeln!(out, "layer,left,right")?;
    for iv in &ivs {
        let layer = match iv.layer {
            Layer::Seeded(k) => k.to_string(),
            Layer::Random => "random".into(),
        };
        writeln!(out, "{layer},{},{}", iv.left, iv.right)?;
    }
    writeln!(out, "# total_length={}", total_interval_length(&ivs))?;
    out.flush()?;
    Ok(())
}

fn cmd_detect(a: DetectArgs) -> Result<()> {
    let series = match a.input.as_deref() {
        Some(p) if p.as_os_str() != "-" => {
            let f = File::open(p).with_context(|| format!("opening {}", p.display()))?;
            read_series(f, a.column.as_deref())
                .with_context(|| format!("reading {}", p.display()))?
        }
        _ => read_series(io::stdin().lock(), a.column.as_deref())
            .context("reading standard input")?,
    };
    let intervals = match a.random {
        Some(count) => IntervalMode::Random {
            count,
            min_len: a.select.min_len,
            seed: a.seed,
        },
        None => IntervalMode::Seeded {
            decay: a.decay,
            min_len: a.select.min_len,
        },
    };
    let threshold = match (a.threshold, a.threshold_const) {
        (Some(k), _) => ThresholdRule::Fixed(k),
        (None, Some(c)) => ThresholdRule::Auto(c),
        (None, None) => ThresholdRule::Auto(DEFAULT_THRESHOLD_CONSTANT),
    };
    let config = DetectConfig {
        intervals,
        selection: a.select.selection.into(),
        threshold,
        ic: a.select.ic(),
        sigma: a.sigma.map_or(SigmaRule::Auto, SigmaRule::Fixed),
        cusum: if a.shifted_cusum {
            CusumForm::ShiftedLeftCount
        } else {
            CusumForm::Standard
        },
        max_changepoints: a.max_changepoints,
        parallel: !a.serial,
    };
    let found = seedbs::detect(&series, &config)?;
    let report = DetectReport::new(&found, &config);
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, &report)?;
    writeln!(out)?;
    Ok(())
}

fn cmd_simulate(a: SimulateArgs) -> Result<()> {
    let mut spec = resolve_signal(&a.signal)?;
    if let Some(k) = a.repeat {
        spec.repeat = k;
    }
    let sigma = a.sigma.or(spec.sigma).unwrap_or(1.0);
    let noise = NoiseModel::new(sigma, a.seed)?;
    let reps = simulate(&spec, &noise, a.reps)?;
    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    for (i, x) in reps.iter().enumerate() {
        let path = a.out.join(format!("rep_{i}.csv"));
        let mut w = BufWriter::new(
            File::create(&path).with_context(|| format!("creating {}", path.display()))?,
        );
        writeln!(w, "x")?;
        for v in x {
            writeln!(w, "{v}")?;
        }
        w.flush()?;
    }
    let truth = serde_json::json!({
        "name": spec.name,
        "T": spec.rendered_len(),
        "changepoints": spec.effective_changepoints(),
        "levels": spec.effective_levels(),
        "sigma": sigma,
        "seed": a.seed,
        "reps": a.reps,
    });
    let path = a.out.join("truth.json");
    fs::write(&path, serde_json::to_string_pretty(&truth)? + "\n")
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn cmd_bench(a: BenchArgs) -> Result<()> {
    let mut spec = resolve_signal(&a.signal)?;
    if let Some(k) = a.repeat {
        spec.repeat = k;
    }
    let cfg = BenchConfig {
        methods: a.methods,
        reps: a.reps,
        seed: a.seed,
        sigma: a.sigma.or(spec.sigma).unwrap_or(1.0),
        jobs: a.jobs,
        min_len: a.select.min_len,
        selection: a.select.selection.into(),
        ic: a.select.ic(),
        oracle: a.oracle,
    };
    let rows = bench::run(&spec, &cfg)?;
    match &a.out {
        Some(p) => {
            let f = File::create(p).with_context(|| format!("creating {}", p.display()))?;
            let mut w = BufWriter::new(f);
            bench::write_rows(&mut w, &rows)?;
            w.flush()?;
        }
        None if !a.summary => bench::write_rows(io::stdout().lock(), &rows)?,
        None => {}
    }
    if a.summary {
        bench::write_summary(io::stdout().lock(), &bench::summarize(&rows))?;
    }
    Ok(())
}
