//! Slow reference implementations for cross-checking the fast paths.
//!
//! Nothing here is used by detection itself. The module is compiled for tests
//! and behind the `oracle` feature.

use crate::error::{Error, Result};
use crate::gain::PrefixSums;
use crate::select::{Penalty, Segmentation};

/// Largest series accepted by [`dp_exact`] unless a cap is given explicitly.
pub const DEFAULT_DP_CAP: usize = 5000;

/// CUSUM statistic by direct summation over the interval.
pub fn naive_cusum(series: &[f64], left: usize, right: usize, s: usize) -> Result<f64> {
    if right > series.len() || right < left + 2 {
        return Err(Error::InvalidParameter(format!(
            "interval ({left}, {right}] invalid for series of length {}",
            series.len()
        )));
    }
    if s <= left || s >= right {
        return Err(Error::OutOfRange {
            what: "split",
            value: s,
            min: left + 1,
            max: right - 1,
        });
    }
    let n = (right - left) as f64;
    let n_left = (s - left) as f64;
    let n_right = (right - s) as f64;
    let sum_left: f64 = series[left..s].iter().sum();
    let sum_right: f64 = series[s..right].iter().sum();
    Ok((n_right / (n * n_left)).sqrt() * sum_left - (n_left / (n * n_right)).sqrt() * sum_right)
}

/// Exact minimiser of `RSS + beta * |S|` over all segmentations whose segments
/// have at least `min_seg` observations, by O(T^2) dynamic programming.
///
/// Ties go to fewer change points, then to the smaller last change point.
pub fn dp_exact(ps: &PrefixSums, penalty: &Penalty, min_seg: usize) -> Result<Segmentation> {
    dp_exact_with_cap(ps, penalty, min_seg, DEFAULT_DP_CAP)
}

pub fn dp_exact_with_cap(
    ps: &PrefixSums,
    penalty: &Penalty,
    min_seg: usize,
    cap: usize,
) -> Result<Segmentation> {
    if !penalty.is_additive() {
        return Err(Error::Unsupported(format!(
            "exact dynamic programming needs an additive penalty, got {}",
            penalty.name()
        )));
    }
    penalty.validate()?;
    let len = ps.len();
    if len > cap {
        return Err(Error::InvalidParameter(format!(
            "series length {len} exceeds the dynamic programming cap {cap}"
        )));
    }
    let min_seg = min_seg.max(1);
    let beta = penalty.per_break(len);

    // best[t]: (score, count) of the optimal segmentation of (0, t].
    let mut best: Vec<(f64, usize)> = vec![(f64::INFINITY, 0); len + 1];
    let mut last = vec![0usize; len + 1];
    best[0] = (0.0, 0);
    for t in 1..=len {
        // s = 0 means (0, t] is the first segment, so no break is paid.
        let mut cur = (ps.segment_rss(0, t), 0usize);
        let mut arg = 0;
        if t >= 2 * min_seg {
            for (s, &(prev, count)) in best.iter().enumerate().take(t - min_seg + 1).skip(min_seg) {
                if !prev.is_finite() {
                    continue;
                }
                let cand = (prev + ps.segment_rss(s, t) + beta, count + 1);
                if cand.0 < cur.0 || (cand.0 == cur.0 && cand.1 < cur.1) {
                    cur = cand;
                    arg = s;
                }
            }
        }
        if t < min_seg && t < len {
            // (0, t] is too short to stand alone; only reachable as a prefix
            // of a longer first segment.
            best[t] = (f64::INFINITY, 0);
        } else {
            best[t] = cur;
        }
        last[t] = arg;
    }

    let mut cps = Vec::new();
    let mut t = len;
    while last[t] > 0 {
        t = last[t];
        cps.push(t);
    }
    cps.reverse();
    Segmentation::fit(ps, cps)
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;

    use super::*;

    #[test]
    fn naive_cusum_examples() {
        assert_eq!(naive_cusum(&[2.0; 6], 1, 5, 3).unwrap(), 0.0);
        assert_relative_eq!(
            naive_cusum(&[0.0, 0.0, 1.0, 1.0], 0, 4, 2).unwrap(),
            -1.0,
            max_relative = 1e-12
        );
        assert!(naive_cusum(&[0.0; 4], 0, 4, 4).is_err());
    }

    #[test]
    fn dp_small() {
        let ps = PrefixSums::new(&[3.0; 9]).unwrap();
        let seg = dp_exact(&ps, &Penalty::Constant { alpha: 0.1 }, 1).unwrap();
        assert!(seg.is_empty());

        let ps = PrefixSums::new(&[0.0, 0.0, 1.0, 1.0]).unwrap();
        let seg = dp_exact(&ps, &Penalty::Constant { alpha: 0.3 }, 1).unwrap();
        assert_eq!(seg.changepoints(), &[2]);
        let seg = dp_exact(&ps, &Penalty::Constant { alpha: 2.0 }, 1).unwrap();
        assert!(seg.is_empty());
    }

    #[test]
    fn dp_respects_min_seg() {
        let ps = PrefixSums::new(&[0.0, 5.0, 5.0, 5.0, 5.0, 5.0]).unwrap();
        let free = dp_exact(&ps, &Penalty::Constant { alpha: 0.1 }, 1).unwrap();
        assert_eq!(free.changepoints(), &[1]);
        let held = dp_exact(&ps, &Penalty::Constant { alpha: 0.1 }, 2).unwrap();
        assert!(held.changepoints().iter().all(|&p| (2..=4).contains(&p)));
    }

    #[test]
    fn dp_rejects_ssic_and_long_series() {
        let ps = PrefixSums::new(&[0.0; 10]).unwrap();
        assert!(matches!(
            dp_exact(&ps, &Penalty::ssic(), 1),
            Err(Error::Unsupported(_))
        ));
        assert!(dp_exact_with_cap(&ps, &Penalty::Constant { alpha: 1.0 }, 1, 5).is_err());
    }
}
