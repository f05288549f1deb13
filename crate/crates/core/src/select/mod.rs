//! Turning scored candidates into change point estimates.
//!
//! Both selection rules repeatedly accept a candidate split and drop every
//! candidate whose interval has that split strictly in its interior. They
//! differ in which surviving candidate goes next: the largest gain (greedy) or
//! the narrowest interval over the threshold (NOT).

mod break_index;
mod penalty;
mod segmentation;

pub use break_index::BreakIndex;
pub use penalty::{criterion, penalty_value, penalty_value_log, Penalty, DEFAULT_SSIC_THETA};
pub use segmentation::{segment_bounds, validate_changepoints, Segmentation};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gain::{Candidate, PrefixSums};

/// Candidate indices ordered by decreasing gain; equal gains keep input order.
fn by_gain(candidates: &[Candidate]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by(|&a, &b| candidates[b].gain.total_cmp(&candidates[a].gain));
    order
}

/// Candidate indices ordered by width, then left end, then split.
fn by_width(candidates: &[Candidate]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by_key(|&i| {
        let c = &candidates[i];
        (c.interval.len(), c.interval.left, c.split)
    });
    order
}

/// Accepted splits in acceptance order, with their gains.
fn greedy_accept(candidates: &[Candidate], threshold: f64) -> Vec<(usize, f64)> {
    let mut index = BreakIndex::new();
    let mut accepted = Vec::new();
    for i in by_gain(candidates) {
        let c = &candidates[i];
        if c.gain <= threshold {
            break;
        }
        if index.contains_in_open_range(c.interval.left, c.interval.right) {
            continue;
        }
        index.insert(c.split);
        accepted.push((c.split, c.gain));
    }
    accepted
}

/// Greedy selection: accept the surviving candidate with the largest gain
/// while that gain is strictly above `threshold`.
pub fn greedy_select(ps: &PrefixSums, candidates: &[Candidate], threshold: f64) -> Segmentation {
    let mut cps: Vec<usize> = greedy_accept(candidates, threshold)
        .into_iter()
        .map(|(p, _)| p)
        .collect();
    cps.sort_unstable();
    Segmentation::fit_unchecked(ps, cps)
}

fn not_accept(
    candidates: &[Candidate],
    width_order: &[usize],
    qualifies: impl Fn(f64) -> bool,
) -> Vec<usize> {
    let mut index = BreakIndex::new();
    for &i in width_order {
        let c = &candidates[i];
        if !qualifies(c.gain) || index.contains_in_open_range(c.interval.left, c.interval.right) {
            continue;
        }
        index.insert(c.split);
    }
    index.into_sorted_vec()
}

/// Narrowest-over-threshold selection: among candidates with gain strictly
/// above `threshold`, accept the one with the shortest interval (ties: smaller
/// left end, then smaller split), eliminate, repeat.
pub fn not_select(ps: &PrefixSums, candidates: &[Candidate], threshold: f64) -> Segmentation {
    let order = by_width(candidates);
    let cps = not_accept(candidates, &order, |g| g > threshold);
    Segmentation::fit_unchecked(ps, cps)
}

/// One model on a solution path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathStep {
    /// The model is selected for every threshold just below this value.
    pub threshold: f64,
    /// Nested paths: the change points added at this step. Otherwise the full
    /// sorted set.
    pub points: Vec<usize>,
}

/// Models indexed by strictly decreasing threshold.
///
/// Nested paths (greedy) store only the increments so the whole path takes
/// O(T) memory.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolutionPath {
    steps: Vec<PathStep>,
    nested: bool,
}

impl SolutionPath {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn is_nested(&self) -> bool {
        self.nested
    }

    pub fn steps(&self) -> &[PathStep] {
        &self.steps
    }

    pub fn thresholds(&self) -> impl Iterator<Item = f64> + '_ {
        self.steps.iter().map(|s| s.threshold)
    }

    /// Sorted change points of the model at step `i`.
    pub fn changepoints_at(&self, i: usize) -> Vec<usize> {
        if self.nested {
            let mut cps: Vec<usize> = self.steps[..=i]
                .iter()
                .flat_map(|s| s.points.iter().copied())
                .collect();
            cps.sort_unstable();
            cps
        } else {
            self.steps[i].points.clone()
        }
    }

    /// Change points of the last model with threshold strictly above `kappa`.
    pub fn changepoints_above(&self, kappa: f64) -> Vec<usize> {
        match self.steps.iter().rposition(|s| s.threshold > kappa) {
            Some(i) => self.changepoints_at(i),
            None => Vec::new(),
        }
    }
}

/// Greedy selection run to threshold zero, recording the model after every
/// acceptance. Splits accepted at exactly the same gain share one step, which
/// keeps thresholds strictly decreasing.
pub fn greedy_solution_path(candidates: &[Candidate]) -> SolutionPath {
    let mut steps: Vec<PathStep> = Vec::new();
    for (p, g) in greedy_accept(candidates, 0.0) {
        match steps.last_mut() {
            Some(last) if last.threshold == g => last.points.push(p),
            _ => steps.push(PathStep {
                threshold: g,
                points: vec![p],
            }),
        }
    }
    SolutionPath {
        steps,
        nested: true,
    }
}

/// NOT selection evaluated just below every distinct positive candidate gain.
/// Consecutive identical models are collapsed onto the higher threshold.
///
/// Worst case O(K^2 log K) for K candidates.
pub fn not_solution_path(candidates: &[Candidate]) -> SolutionPath {
    let order = by_width(candidates);
    let mut gains: Vec<f64> = candidates
        .iter()
        .map(|c| c.gain)
        .filter(|&g| g > 0.0)
        .collect();
    gains.sort_by(|a, b| b.total_cmp(a));
    gains.dedup();

    let mut steps: Vec<PathStep> = Vec::new();
    for g in gains {
        let cps = not_accept(candidates, &order, |x| x >= g);
        if steps.last().is_some_and(|s| s.points == cps) {
            continue;
        }
        steps.push(PathStep {
            threshold: g,
            points: cps,
        });
    }
    SolutionPath {
        steps,
        nested: false,
    }
}

/// Information criterion of a segmentation.
pub fn ic_score(ps: &PrefixSums, seg: &Segmentation, penalty: &Penalty) -> f64 {
    criterion(penalty, seg.rss(), seg.len(), ps.len())
}

/// Picks the model on `path`, or the empty model, with the smallest criterion.
/// Ties go to the model with fewer change points.
///
/// Nested paths are scored incrementally: each added point splits one
/// segment, found by a neighbour lookup, so the whole path costs
/// O(T log T).
pub fn select_by_ic(path: &SolutionPath, ps: &PrefixSums, penalty: &Penalty) -> Segmentation {
    select_by_ic_capped(path, ps, penalty, usize::MAX)
}

/// Default model-size cap for criterion search, `floor(T / ln T)`.
///
/// Near the end of a full path almost every observation is its own segment
/// and the residual sum of squares collapses to zero, where log-RSS criteria
/// diverge to minus infinity.
pub fn default_max_changepoints(len: usize) -> usize {
    if len < 3 {
        return len.saturating_sub(1);
    }
    let n = len as f64;
    ((n / n.ln()).floor() as usize).max(1)
}

/// [`select_by_ic`] restricted to models with at most `max_changepoints`
/// change points.
pub fn select_by_ic_capped(
    path: &SolutionPath,
    ps: &PrefixSums,
    penalty: &Penalty,
    max_changepoints: usize,
) -> Segmentation {
    let len = ps.len();
    let empty_rss = ps.segment_rss(0, len);
    let mut best: (f64, usize, Option<usize>) = (criterion(penalty, empty_rss, 0, len), 0, None);
    let mut consider = |score: f64, count: usize, step: usize| {
        if score < best.0 || (score == best.0 && count < best.1) {
            best = (score, count, Some(step));
        }
    };

    if path.is_nested() {
        let mut index = BreakIndex::new();
        let mut rss = empty_rss;
        for (i, step) in path.steps().iter().enumerate() {
            if index.len() + step.points.len() > max_changepoints {
                break;
            }
            for &p in &step.points {
                let (pred, succ) = index.neighbors(p);
                let (l, r) = (pred.unwrap_or(0), succ.unwrap_or(len));
                rss += ps.segment_rss(l, p) + ps.segment_rss(p, r) - ps.segment_rss(l, r);
                index.insert(p);
            }
            consider(
                criterion(penalty, rss.max(0.0), index.len(), len),
                index.len(),
                i,
            );
        }
    } else {
        for (i, step) in path.steps().iter().enumerate() {
            if step.points.len() > max_changepoints {
                continue;
            }
            let rss: f64 = segment_bounds(&step.points, len)
                .map(|(l, r)| ps.segment_rss(l, r))
                .sum();
            consider(
                criterion(penalty, rss, step.points.len(), len),
                step.points.len(),
                i,
            );
        }
    }

    match best.2 {
        Some(i) => Segmentation::fit_unchecked(ps, path.changepoints_at(i)),
        None => Segmentation::empty(ps),
    }
}

/// Universal-type threshold `C * sigma * sqrt(2 log T)`.
pub fn auto_threshold(len: usize, sigma_hat: f64, constant: f64) -> Result<f64> {
    if len < 2 {
        return Err(Error::InvalidParameter(format!(
            "series length must be at least 2, got {len}"
        )));
    }
    if !(sigma_hat >= 0.0 && sigma_hat.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "noise scale must be finite and non-negative, got {sigma_hat}"
        )));
    }
    if !(constant > 0.0 && constant.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "threshold constant must be positive, got {constant}"
        )));
    }
    Ok(constant * sigma_hat * (2.0 * (len as f64).ln()).sqrt())
}

/// Consistency factor of the median absolute deviation under normality.
const MAD_QUANTILE: f64 = 0.6745;

/// Robust noise scale from first differences:
/// `median |X_{t+1} - X_t| / (sqrt 2 * 0.6745)`.
pub fn estimate_noise_sd(series: &[f64]) -> Result<f64> {
    if series.len() < 2 {
        return Err(Error::Data(format!(
            "need at least 2 observations to estimate noise, got {}",
            series.len()
        )));
    }
    let mut diffs: Vec<f64> = series.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    Ok(median(&mut diffs) / (std::f64::consts::SQRT_2 * MAD_QUANTILE))
}

fn median(values: &mut [f64]) -> f64 {
    let n = values.len();
    let mid = n / 2;
    let (lower, m, _) = values.select_nth_unstable_by(mid, f64::total_cmp);
    let m = *m;
    if n % 2 == 1 {
        m
    } else {
        let below = lower.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (below + m)
    }
}
