//! Simulation benchmark: every method on every noisy replicate of a signal.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;

use seedbs::detect::{IcChoice, IntervalMode, Selection};
use seedbs::metrics::EvalReport;
use seedbs::oracle::dp_exact;
use seedbs::{detect, DetectConfig, NoiseModel, Penalty, PrefixSums, SignalSpec};

/// One entry of the `--methods` list.
#[derive(Debug, Clone, PartialEq)]
pub enum Method {
    /// Seeded intervals with the given decay; `label` keeps the token as typed.
    Seeded { decay: f64, label: String },
    /// `count` random intervals, redrawn for every replicate.
    Random { count: usize },
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Seeded { .. } => "seeded",
            Method::Random { .. } => "random",
        }
    }

    pub fn param(&self) -> String {
        match self {
            Method::Seeded { label, .. } => label.clone(),
            Method::Random { count } => count.to_string(),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.name(), self.param())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (kind, value) = s.split_once(':').ok_or_else(|| {
            format!("method {s:?} must look like seeded:<decay> or random:<count>")
        })?;
        match kind {
            "seeded" => {
                let decay: f64 = value.parse().map_err(|_| format!("bad decay in {s:?}"))?;
                if !(0.5..1.0).contains(&decay) {
                    return Err(format!("decay in {s:?} must lie in [0.5, 1)"));
                }
                Ok(Method::Seeded {
                    decay,
                    label: value.to_string(),
                })
            }
            "random" => {
                let count: usize = value
                    .parse()
                    .map_err(|_| format!("bad interval count in {s:?}"))?;
                Ok(Method::Random { count })
            }
            _ => Err(format!(
                "unknown method {kind:?} in {s:?}; expected seeded or random"
            )),
        }
    }
}

/// Parses a comma-separated method list.
pub fn parse_methods(list: &str) -> Result<Vec<Method>, String> {
    list.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(str::parse)
        .collect()
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub methods: Vec<Method>,
    pub reps: usize,
    pub seed: u64,
    pub sigma: f64,
    pub jobs: usize,
    pub min_len: usize,
    pub selection: Selection,
    pub ic: IcChoice,
    /// Adds exact dynamic programming rows under the same (additive) penalty.
    pub oracle: bool,
}

impl BenchConfig {
    fn detect_config(&self, method: &Method, rep: usize) -> DetectConfig {
        let intervals = match *method {
            Method::Seeded { decay, .. } => IntervalMode::Seeded {
                decay,
                min_len: self.min_len,
            },
            Method::Random { count } => IntervalMode::Random {
                count,
                min_len: self.min_len,
                seed: interval_seed(self.seed, rep),
            },
        };
        DetectConfig {
            intervals,
            selection: self.selection,
            ic: self.ic,
            parallel: false,
            ..DetectConfig::default()
        }
    }
}

/// Seed of the random intervals for replicate `rep`.
pub fn interval_seed(seed: u64, rep: usize) -> u64 {
    seed ^ (rep as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub method: String,
    pub param: String,
    pub rep: usize,
    #[serde(flatten)]
    pub report: EvalReport,
}

pub const ROW_HEADER: &str =
    "method,param,rep,mse,hausdorff,vmeasure,count_error,total_length,time_ms";

impl BenchRow {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{}",
            self.method,
            self.param,
            self.rep,
            self.report.csv_row()
        )
    }
}

/// Runs the benchmark; rows come back ordered by replicate, then method.
pub fn run(spec: &SignalSpec, cfg: &BenchConfig) -> Result<Vec<BenchRow>> {
    if cfg.reps == 0 {
        bail!("need at least one replicate");
    }
    if cfg.methods.is_empty() && !cfg.oracle {
        bail!("no methods given");
    }
    let oracle_penalty = if cfg.oracle {
        Some(match cfg.ic {
            IcChoice::Constant(alpha) => OraclePenalty::Constant(alpha),
            IcChoice::Bic => OraclePenalty::Bic,
            other => bail!("--oracle needs an additive criterion (bic or constant), got {other:?}"),
        })
    } else {
        None
    };
    let noise = NoiseModel::new(cfg.sigma, cfg.seed)?;
    let mean = spec.render();
    let truth = spec.effective_changepoints();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs.max(1))
        .build()
        .context("building worker pool")?;
    let per_rep: Vec<Result<Vec<BenchRow>>> = pool.install(|| {
        (0..cfg.reps)
            .into_par_iter()
            .map(|rep| {
                let x = noise.add_to(&mean, rep as u64);
                let mut rows = Vec::with_capacity(cfg.methods.len() + 1);
                for method in &cfg.methods {
                    let dc = cfg.detect_config(method, rep);
                    let found = detect(&x, &dc)?;
                    let ms = (found.evaluate_time + found.select_time).as_secs_f64() * 1e3;
                    rows.push(BenchRow {
                        method: method.name().into(),
                        param: method.param(),
                        rep,
                        report: EvalReport::evaluate(
                            &found.segmentation,
                            &mean,
                            &truth,
                            found.total_length,
                            ms,
                        )?,
                    });
                }
                if let Some(op) = oracle_penalty {
                    let start = Instant::now();
                    let ps = PrefixSums::new(&x)?;
                    let penalty = op.penalty(&x)?;
                    let seg = dp_exact(&ps, &penalty, 1)?;
                    let ms = start.elapsed().as_secs_f64() * 1e3;
                    rows.push(BenchRow {
                        method: "oracle".into(),
                        param: penalty.name().into(),
                        rep,
                        report: EvalReport::evaluate(&seg, &mean, &truth, 0, ms)?,
                    });
                }
                Ok(rows)
            })
            .collect()
    });
    let mut out = Vec::with_capacity(cfg.reps * (cfg.methods.len() + 1));
    for rows in per_rep {
        out.extend(rows?);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy)]
enum OraclePenalty {
    Constant(f64),
    Bic,
}

impl OraclePenalty {
    /// The penalty `detect` applies to the same series.
    fn penalty(self, x: &[f64]) -> seedbs::Result<Penalty> {
        Ok(match self {
            OraclePenalty::Constant(alpha) => Penalty::Constant { alpha },
            OraclePenalty::Bic => {
                let s = seedbs::select::estimate_noise_sd(x)?;
                Penalty::Bic { sigma2: s * s }
            }
        })
    }
}

pub fn write_rows(mut w: impl Write, rows: &[BenchRow]) -> std::io::Result<()> {
    writeln!(w, "{ROW_HEADER}")?;
    for r in rows {
        writeln!(w, "{}", r.csv_row())?;
    }
    Ok(())
}

/// Mean and sample standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stat {
    pub mean: f64,
    pub sd: f64,
}

impl Stat {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Self {
        let v: Vec<f64> = values.into_iter().collect();
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let sd = if v.len() > 1 {
            (v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Self { mean, sd }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub method: String,
    pub param: String,
    pub reps: usize,
    pub mse: Stat,
    pub hausdorff: Stat,
    pub v_measure: Stat,
    pub count_error: Stat,
    pub total_length: Stat,
    pub time_ms: Stat,
}

pub const SUMMARY_HEADER: &str = "method,param,reps,mse_mean,mse_sd,hausdorff_mean,hausdorff_sd,\
vmeasure_mean,vmeasure_sd,count_error_mean,count_error_sd,total_length_mean,total_length_sd,time_ms_mean,time_ms_sd";

impl SummaryRow {
    pub fn csv_row(&self) -> String {
        let s = [
            self.mse,
            self.hausdorff,
            self.v_measure,
            self.count_error,
            self.total_length,
            self.time_ms,
        ];
        let stats: Vec<String> = s.iter().map(|s| format!("{},{}", s.mean, s.sd)).collect();
        format!(
            "{},{},{},{}",
            self.method,
            self.param,
            self.reps,
            stats.join(",")
        )
    }
}

/// Per-method means and standard deviations, in first-appearance order.
pub fn summarize(rows: &[BenchRow]) -> Vec<SummaryRow> {
    let mut keys: Vec<(&str, &str)> = Vec::new();
    for r in rows {
        let k = (r.method.as_str(), r.param.as_str());
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    keys.into_iter()
        .map(|(m, p)| {
            let sel: Vec<&EvalReport> = rows
                .iter()
                .filter(|r| r.method == m && r.param == p)
                .map(|r| &r.report)
                .collect();
            SummaryRow {
                method: m.into(),
                param: p.into(),
                reps: sel.len(),
                mse: Stat::of(sel.iter().map(|r| r.mse)),
                hausdorff: Stat::of(sel.iter().map(|r| r.hausdorff)),
                v_measure: Stat::of(sel.iter().map(|r| r.v_measure)),
                count_error: Stat::of(sel.iter().map(|r| r.count_error as f64)),
                total_length: Stat::of(sel.iter().map(|r| r.total_length as f64)),
                time_ms: Stat::of(sel.iter().map(|r| r.time_ms)),
            }
        })
        .collect()
}

pub fn write_summary(mut w: impl Write, rows: &[SummaryRow]) -> std::io::Result<()> {
    writeln!(w, "{SUMMARY_HEADER}")?;
    for r in rows {
        writeln!(w, "{}", r.csv_row())?;
    }
    Ok(())
}
