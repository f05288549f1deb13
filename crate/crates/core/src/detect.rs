//! End-to-end detection: build intervals, score them, select change points.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gain::{evaluate_all_with, Candidate, CusumEvaluator, CusumForm, PrefixSums};
use crate::intervals::{
    random_intervals, seeded_intervals, total_interval_length, Interval, SeededParams,
};
use crate::select::{
    auto_threshold, default_max_changepoints, estimate_noise_sd, greedy_select,
    greedy_solution_path, ic_score, not_select, not_solution_path, select_by_ic_capped, Penalty,
    Segmentation, SolutionPath, DEFAULT_SSIC_THETA,
};

/// Recommended decay, `2^{-1/2}`.
pub const DEFAULT_DECAY: f64 = std::f64::consts::FRAC_1_SQRT_2;
/// Constant of the automatic threshold; a calibration choice.
pub const DEFAULT_THRESHOLD_CONSTANT: f64 = 1.3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IntervalMode {
    Seeded {
        decay: f64,
        min_len: usize,
    },
    Random {
        count: usize,
        min_len: usize,
        seed: u64,
    },
}

impl IntervalMode {
    pub fn build(&self, len: usize) -> Result<Vec<Interval>> {
        match *self {
            IntervalMode::Seeded { decay, min_len } => {
                seeded_intervals(&SeededParams::new(len, decay, min_len)?)
            }
            IntervalMode::Random {
                count,
                min_len,
                seed,
            } => random_intervals(len, count, min_len, seed),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Selection {
    Greedy,
    Not,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum ThresholdRule {
    /// `C * sigma_hat * sqrt(2 log T)`.
    Auto(f64),
    Fixed(f64),
}

/// Information criterion applied along the solution path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum IcChoice {
    None,
    Constant(f64),
    /// `2 sigma_hat^2 log T` per change point.
    Bic,
    Ssic(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum SigmaRule {
    Auto,
    Fixed(f64),
}

/// Full detection configuration.
///
/// Defaults: seeded intervals with `a = 2^{-1/2}`, `m = 2`, greedy selection,
/// sSIC with `theta = 1.01` over the greedy path, estimated noise scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectConfig {
    pub intervals: IntervalMode,
    pub selection: Selection,
    pub threshold: ThresholdRule,
    pub ic: IcChoice,
    pub sigma: SigmaRule,
    pub cusum: CusumForm,
    /// Largest model considered by the information criterion; `None` uses
    /// [`default_max_changepoints`].
    pub max_changepoints: Option<usize>,
    pub parallel: bool,
}

impl Default for DetectConfig {
    fn default() -> Self {
        Self {
            intervals: IntervalMode::Seeded {
                decay: DEFAULT_DECAY,
                min_len: 2,
            },
            selection: Selection::Greedy,
            threshold: ThresholdRule::Auto(DEFAULT_THRESHOLD_CONSTANT),
            ic: IcChoice::Ssic(DEFAULT_SSIC_THETA),
            sigma: SigmaRule::Auto,
            cusum: CusumForm::Standard,
            max_changepoints: None,
            parallel: true,
        }
    }
}

/// Outcome of [`detect`].
#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub segmentation: Segmentation,
    /// Gain of the candidate that introduced each change point.
    pub gains: Vec<f64>,
    /// Selection threshold; with an information criterion, the path threshold
    /// of the chosen model.
    pub threshold: f64,
    pub sigma_hat: f64,
    /// Criterion name and value of the chosen model.
    pub ic: Option<(&'static str, f64)>,
    pub total_length: u64,
    pub evaluate_time: Duration,
    pub select_time: Duration,
}

impl Detection {
    pub fn changepoints(&self) -> &[usize] {
        self.segmentation.changepoints()
    }
}

impl DetectConfig {
    pub fn penalty(&self, sigma_hat: f64) -> Option<Penalty> {
        match self.ic {
            IcChoice::None => None,
            IcChoice::Constant(alpha) => Some(Penalty::Constant { alpha }),
            IcChoice::Bic => Some(Penalty::Bic {
                sigma2: sigma_hat * sigma_hat,
            }),
            IcChoice::Ssic(theta) => Some(Penalty::Ssic { theta }),
        }
    }
}

/// Runs the whole pipeline on `series`.
pub fn detect(series: &[f64], config: &DetectConfig) -> Result<Detection> {
    if series.len() < 2 {
        return Err(Error::Data(format!(
            "need at least 2 observations, got {}",
            series.len()
        )));
    }
    let ps = PrefixSums::new(series)?;
    let sigma_hat = match config.sigma {
        SigmaRule::Auto => estimate_noise_sd(series)?,
        SigmaRule::Fixed(s) if s >= 0.0 && s.is_finite() => s,
        SigmaRule::Fixed(s) => return Err(Error::InvalidParameter(format!("bad noise scale {s}"))),
    };
    let penalty = config.penalty(sigma_hat);
    if let Some(p) = &penalty {
        p.validate()?;
    }

    let start = Instant::now();
    let intervals = config.intervals.build(series.len())?;
    let evaluator = CusumEvaluator::new(&ps).with_form(config.cusum);
    let candidates = evaluate_all_with(&evaluator, &intervals, config.parallel);
    let evaluate_time = start.elapsed();

    let start = Instant::now();
    let (segmentation, gains, threshold, ic) = match penalty {
        None => {
            let kappa = match config.threshold {
                ThresholdRule::Auto(c) => auto_threshold(series.len(), sigma_hat, c)?,
                ThresholdRule::Fixed(k) if k >= 0.0 => k,
                ThresholdRule::Fixed(k) => {
                    return Err(Error::InvalidParameter(format!("negative threshold {k}")))
                }
            };
            let seg = match config.selection {
                Selection::Greedy => greedy_select(&ps, &candidates, kappa),
                Selection::Not => not_select(&ps, &candidates, kappa),
            };
            let gains = accepted_gains(&candidates, &seg, config.selection, kappa);
            (seg, gains, kappa, None)
        }
        Some(p) => {
            let path = match config.selection {
                Selection::Greedy => greedy_solution_path(&candidates),
                Selection::Not => not_solution_path(&candidates),
            };
            let cap = config
                .max_changepoints
                .unwrap_or_else(|| default_max_changepoints(series.len()));
            let seg = select_by_ic_capped(&path, &ps, &p, cap);
            let threshold = chosen_threshold(&path, &seg);
            let gains = match config.selection {
                Selection::Greedy => path_gains(&path, &seg),
                Selection::Not => accepted_gains(&candidates, &seg, Selection::Not, threshold),
            };
            let score = ic_score(&ps, &seg, &p);
            (seg, gains, threshold, Some((p.name(), score)))
        }
    };
    let select_time = start.elapsed();

    Ok(Detection {
        segmentation,
        gains,
        threshold,
        sigma_hat,
        ic,
        total_length: total_interval_length(&intervals),
        evaluate_time,
        select_time,
    })
}

/// Path threshold of the step that produced `seg`; for the empty model the
/// largest threshold on the path (0 for an empty path).
fn chosen_threshold(path: &SolutionPath, seg: &Segmentation) -> f64 {
    if seg.is_empty() {
        return path.thresholds().next().unwrap_or(0.0);
    }
    if path.is_nested() {
        // Nested models grow by step, so the size identifies the step.
        let mut count = 0;
        for step in path.steps() {
            count += step.points.len();
            if count == seg.len() {
                return step.threshold;
            }
        }
    } else if let Some(step) = path.steps().iter().find(|s| s.points == seg.changepoints()) {
        return step.threshold;
    }
    0.0
}

fn path_gains(path: &SolutionPath, seg: &Segmentation) -> Vec<f64> {
    let mut by_point: Vec<(usize, f64)> = path
        .steps()
        .iter()
        .flat_map(|s| s.points.iter().map(move |&p| (p, s.threshold)))
        .filter(|(p, _)| seg.changepoints().binary_search(p).is_ok())
        .collect();
    by_point.sort_by_key(|&(p, _)| p);
    by_point.into_iter().map(|(_, g)| g).collect()
}

/// Gains of the accepting candidates for a fixed-threshold selection,
/// recovered by replaying the selection order.
fn accepted_gains(
    candidates: &[Candidate],
    seg: &Segmentation,
    selection: Selection,
    kappa: f64,
) -> Vec<f64> {
    let mut order: Vec<&Candidate> = candidates.iter().collect();
    match selection {
        Selection::Greedy => order.sort_by(|a, b| b.gain.total_cmp(&a.gain)),
        Selection::Not => order.sort_by_key(|c| (c.interval.len(), c.interval.left, c.split)),
    }
    let mut index = crate::select::BreakIndex::new();
    let mut gains: Vec<(usize, f64)> = Vec::with_capacity(seg.len());
    for c in order {
        let qualifies = match selection {
            Selection::Greedy => c.gain > kappa,
            Selection::Not => c.gain >= kappa,
        };
        if !qualifies || index.contains_in_open_range(c.interval.left, c.interval.right) {
            continue;
        }
        if seg.changepoints().binary_search(&c.split).is_ok() && index.insert(c.split) {
            gains.push((c.split, c.gain));
        }
    }
    gains.sort_by_key(|&(p, _)| p);
    gains.into_iter().map(|(_, g)| g).collect()
}
