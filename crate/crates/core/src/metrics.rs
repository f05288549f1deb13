//! Accuracy measures for estimated segmentations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gain::PrefixSums;
use crate::select::{segment_bounds, validate_changepoints, Segmentation};

/// Mean squared error between the piecewise-mean fit of `est` on `series`
/// and the true mean sequence.
pub fn mse(est: &[usize], series: &[f64], truth: &[f64]) -> Result<f64> {
    if series.len() != truth.len() {
        return Err(Error::Data(format!(
            "series has {} observations but truth has {}",
            series.len(),
            truth.len()
        )));
    }
    let ps = PrefixSums::new(series)?;
    let seg = Segmentation::fit(&ps, est.to_vec())?;
    Ok(fitted_mse(&seg, truth))
}

/// Same as [`mse`] for an already fitted segmentation.
pub fn fitted_mse(seg: &Segmentation, truth: &[f64]) -> f64 {
    let mut acc = 0.0;
    for ((l, r), &m) in segment_bounds(seg.changepoints(), truth.len()).zip(seg.means()) {
        acc += truth[l..r].iter().map(|&f| (m - f) * (m - f)).sum::<f64>();
    }
    acc / truth.len() as f64
}

/// Symmetric Hausdorff distance after adding `0` and `len` to both sets.
pub fn hausdorff(est: &[usize], truth: &[usize], len: usize) -> f64 {
    let a = augmented(est, len);
    let b = augmented(truth, len);
    directed(&a, &b).max(directed(&b, &a)) as f64
}

fn augmented(points: &[usize], len: usize) -> Vec<usize> {
    let mut v = Vec::with_capacity(points.len() + 2);
    v.push(0);
    v.extend_from_slice(points);
    v.push(len);
    v.sort_unstable();
    v.dedup();
    v
}

/// `max_{x in from} min_{y in to} |x - y|` for sorted, non-empty `to`.
fn directed(from: &[usize], to: &[usize]) -> usize {
    from.iter()
        .map(|&x| {
            let i = to.partition_point(|&y| y < x);
            let above = to.get(i).map(|&y| y - x);
            let below = i.checked_sub(1).map(|j| x - to[j]);
            above.into_iter().chain(below).min().unwrap_or(0)
        })
        .max()
        .unwrap_or(0)
}

/// V-measure of the estimated segments (clusters) against the true segments
/// (classes), each observation being one sample. Natural-log entropies.
pub fn v_measure(est: &[usize], truth: &[usize], len: usize) -> f64 {
    let (homogeneity, completeness) = homogeneity_completeness(est, truth, len);
    if homogeneity + completeness == 0.0 {
        0.0
    } else {
        (2.0 * homogeneity * completeness / (homogeneity + completeness)).clamp(0.0, 1.0)
    }
}

/// Homogeneity and completeness of the estimated segmentation; `(1, 1)` for
/// an empty series.
pub fn homogeneity_completeness(est: &[usize], truth: &[usize], len: usize) -> (f64, f64) {
    if len == 0 {
        return (1.0, 1.0);
    }
    let n = len as f64;
    let class_sizes: Vec<usize> = segment_bounds(truth, len).map(|(l, r)| r - l).collect();
    let cluster_sizes: Vec<usize> = segment_bounds(est, len).map(|(l, r)| r - l).collect();

    // Overlaps of two interval partitions: walk the merged boundaries.
    let mut joint = Vec::new();
    let (mut i, mut j, mut pos) = (0usize, 0usize, 0usize);
    let t_end = |k: usize| truth.get(k).copied().unwrap_or(len);
    let e_end = |k: usize| est.get(k).copied().unwrap_or(len);
    while pos < len {
        let next = t_end(i).min(e_end(j));
        joint.push(next - pos);
        pos = next;
        if t_end(i) == pos {
            i += 1;
        }
        if e_end(j) == pos {
            j += 1;
        }
    }

    let h = |sizes: &[usize]| -> f64 {
        sizes
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let p = c as f64 / n;
                -p * p.ln()
            })
            .sum()
    };
    let h_class = h(&class_sizes);
    let h_cluster = h(&cluster_sizes);
    let h_joint = h(&joint);
    let h_class_given_cluster = h_joint - h_cluster;
    let h_cluster_given_class = h_joint - h_class;

    let homogeneity = if h_class == 0.0 {
        1.0
    } else {
        1.0 - h_class_given_cluster / h_class
    };
    let completeness = if h_cluster == 0.0 {
        1.0
    } else {
        1.0 - h_cluster_given_class / h_cluster
    };
    (homogeneity.clamp(0.0, 1.0), completeness.clamp(0.0, 1.0))
}

/// `N - N_hat`.
pub fn count_error(est: &[usize], truth: &[usize]) -> i64 {
    truth.len() as i64 - est.len() as i64
}

/// One evaluated run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub mse: f64,
    pub hausdorff: f64,
    pub v_measure: f64,
    pub count_error: i64,
    pub total_length: u64,
    pub time_ms: f64,
}

impl EvalReport {
    pub const CSV_HEADER: &'static str = "mse,hausdorff,vmeasure,count_error,total_length,time_ms";

    /// Scores `est` (fitted on the observed series) against the truth.
    pub fn evaluate(
        est: &Segmentation,
        truth_mean: &[f64],
        truth_cps: &[usize],
        total_length: u64,
        time_ms: f64,
    ) -> Result<Self> {
        validate_changepoints(est.changepoints(), truth_mean.len())?;
        let len = truth_mean.len();
        Ok(Self {
            mse: fitted_mse(est, truth_mean),
            hausdorff: hausdorff(est.changepoints(), truth_cps, len),
            v_measure: v_measure(est.changepoints(), truth_cps, len),
            count_error: count_error(est.changepoints(), truth_cps),
            total_length,
            time_ms,
        })
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{:.3}",
            self.mse,
            self.hausdorff,
            self.v_measure,
            self.count_error,
            self.total_length,
            self.time_ms
        )
    }
}
