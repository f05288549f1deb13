//! CUSUM gains over background intervals.
//!
//! All statistics are computed in O(1) per split from cumulative sums, so
//! scanning an interval costs time proportional to its length.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intervals::Interval;

/// Cumulative sums `S_t` and squared sums `Q_t` for `t = 0..=T` of the
/// series shifted by its first value.
///
/// Every statistic derived here is shift invariant, and the shift keeps
/// constant stretches exactly constant, so their gains and residuals are
/// exactly zero rather than rounding noise.
#[derive(Debug, Clone, PartialEq)]
pub struct PrefixSums {
    offset: f64,
    sum: Vec<f64>,
    sumsq: Vec<f64>,
}

impl PrefixSums {
    /// Plain double-precision running sums.
    pub fn new(series: &[f64]) -> Result<Self> {
        check_series(series)?;
        let offset = series[0];
        let mut sum = Vec::with_capacity(series.len() + 1);
        let mut sumsq = Vec::with_capacity(series.len() + 1);
        let (mut s, mut q) = (0.0, 0.0);
        sum.push(0.0);
        sumsq.push(0.0);
        for &x in series {
            let x = x - offset;
            s += x;
            q += x * x;
            sum.push(s);
            sumsq.push(q);
        }
        Ok(Self { offset, sum, sumsq })
    }

    /// Running sums with Neumaier compensation. Slower; useful for very long
    /// series or large offsets where plain accumulation drifts.
    pub fn compensated(series: &[f64]) -> Result<Self> {
        check_series(series)?;
        let offset = series[0];
        let mut sum = Vec::with_capacity(series.len() + 1);
        let mut sumsq = Vec::with_capacity(series.len() + 1);
        let mut s = Neumaier::default();
        let mut q = Neumaier::default();
        sum.push(0.0);
        sumsq.push(0.0);
        for &x in series {
            let x = x - offset;
            s.add(x);
            q.add(x * x);
            sum.push(s.value());
            sumsq.push(q.value());
        }
        Ok(Self { offset, sum, sumsq })
    }

    /// Series length `T`.
    #[inline]
    pub fn len(&self) -> usize {
        self.sum.len() - 1
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The value subtracted from every observation (the first one).
    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Prefix sums of the shifted series.
    pub fn sums(&self) -> &[f64] {
        &self.sum
    }

    /// Prefix sums of squares of the shifted series.
    pub fn squared_sums(&self) -> &[f64] {
        &self.sumsq
    }

    /// Sum of observations in `(left, right]`.
    #[inline]
    pub fn segment_sum(&self, left: usize, right: usize) -> f64 {
        self.sum[right] - self.sum[left] + self.offset * (right - left) as f64
    }

    /// Sample mean of `(left, right]`.
    #[inline]
    pub fn segment_mean(&self, left: usize, right: usize) -> f64 {
        (self.sum[right] - self.sum[left]) / (right - left) as f64 + self.offset
    }

    /// Residual sum of squares of `(left, right]` around its own mean.
    ///
    /// Values within rounding error of zero (relative to the squared-sum
    /// prefix) are returned as exactly zero, so a constant segment has zero
    /// residual whatever its level.
    #[inline]
    pub fn segment_rss(&self, left: usize, right: usize) -> f64 {
        let n = (right - left) as f64;
        let s = self.sum[right] - self.sum[left];
        let q = self.sumsq[right] - self.sumsq[left];
        let rss = q - s * s / n;
        if rss <= RSS_ZERO_TOL * self.sumsq[right] {
            0.0
        } else {
            rss
        }
    }
}

const RSS_ZERO_TOL: f64 = 64.0 * f64::EPSILON;

fn check_series(series: &[f64]) -> Result<()> {
    if series.is_empty() {
        return Err(Error::Data("series is empty".into()));
    }
    if let Some(i) = series.iter().position(|x| !x.is_finite()) {
        return Err(Error::Data(format!(
            "non-finite value {} at position {}",
            series[i],
            i + 1
        )));
    }
    Ok(())
}

#[derive(Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Best split of one interval and its gain `|T(s)|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub interval: Interval,
    pub split: usize,
    pub gain: f64,
}

/// Which normalisation of the CUSUM statistic to use.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CusumForm {
    /// Likelihood-ratio form with `s - left` observations on the left; its
    /// square is exactly the reduction in residual sum of squares.
    #[default]
    Standard,
    /// Variant with `s - left + 1` in the left-hand weights, kept for
    /// comparison runs only.
    ShiftedLeftCount,
}

/// CUSUM statistic for splitting `(left, right]` after observation `s`.
pub fn cusum(ps: &PrefixSums, left: usize, right: usize, s: usize) -> Result<f64> {
    check_split(ps, left, right, s)?;
    Ok(cusum_unchecked(ps, left, right, s))
}

/// Same as [`cusum`] with an explicit normalisation.
pub fn cusum_with(
    ps: &PrefixSums,
    left: usize,
    right: usize,
    s: usize,
    form: CusumForm,
) -> Result<f64> {
    check_split(ps, left, right, s)?;
    Ok(match form {
        CusumForm::Standard => cusum_unchecked(ps, left, right, s),
        CusumForm::ShiftedLeftCount => cusum_shifted(ps, left, right, s),
    })
}

fn check_split(ps: &PrefixSums, left: usize, right: usize, s: usize) -> Result<()> {
    if right > ps.len() || right < left + 2 {
        return Err(Error::InvalidParameter(format!(
            "interval ({left}, {right}] invalid for series of length {}",
            ps.len()
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
    Ok(())
}

#[inline]
fn cusum_unchecked(ps: &PrefixSums, left: usize, right: usize, s: usize) -> f64 {
    let n_left = (s - left) as f64;
    let n_right = (right - s) as f64;
    let n = (right - left) as f64;
    let a = ps.sum[s] - ps.sum[left];
    let b = ps.sum[right] - ps.sum[s];
    (n_left * n_right / n).sqrt() * (a / n_left - b / n_right)
}

#[inline]
fn cusum_shifted(ps: &PrefixSums, left: usize, right: usize, s: usize) -> f64 {
    let n_left = (s - left + 1) as f64;
    let n_right = (right - s) as f64;
    let n = (right - left) as f64;
    // The weights do not sum to zero, so this form needs the raw sums.
    let a = ps.segment_sum(left, s);
    let b = ps.segment_sum(s, right);
    (n_right / (n * n_left)).sqrt() * a - (n_left / (n * n_right)).sqrt() * b
}

/// Scores a single interval. Implementations must be deterministic, return a
/// non-negative gain and a split strictly inside `(left, right]`.
///
/// The CUSUM evaluator is the Gaussian change-in-mean instance; other models
/// plug in by supplying their own split search.
pub trait GainEvaluator: Sync {
    /// Length of the underlying series.
    fn series_len(&self) -> usize;

    /// Returns `(split, gain)` for `(left, right]`.
    fn best_split(&self, left: usize, right: usize) -> (usize, f64);
}

/// Gaussian change-in-mean gain over prefix sums.
#[derive(Debug, Clone, Copy)]
pub struct CusumEvaluator<'a> {
    ps: &'a PrefixSums,
    form: CusumForm,
}

impl<'a> CusumEvaluator<'a> {
    pub fn new(ps: &'a PrefixSums) -> Self {
        Self {
            ps,
            form: CusumForm::Standard,
        }
    }

    pub fn with_form(mut self, form: CusumForm) -> Self {
        self.form = form;
        self
    }
}

impl GainEvaluator for CusumEvaluator<'_> {
    fn series_len(&self) -> usize {
        self.ps.len()
    }

    fn best_split(&self, left: usize, right: usize) -> (usize, f64) {
        let stat = match self.form {
            CusumForm::Standard => cusum_unchecked,
            CusumForm::ShiftedLeftCount => cusum_shifted,
        };
        let mut best = (left + 1, stat(self.ps, left, right, left + 1).abs());
        for s in left + 2..right {
            let g = stat(self.ps, left, right, s).abs();
            // strict: the smallest split wins ties
            if g > best.1 {
                best = (s, g);
            }
        }
        // A gain whose square is rounding noise next to the interval's
        // energy is reported as zero.
        let energy = self.ps.sumsq[right] - self.ps.sumsq[left];
        if best.1 * best.1 <= RSS_ZERO_TOL * energy {
            best.1 = 0.0;
        }
        best
    }
}

/// Arg-max of `|cusum|` over the interior of `interval`.
pub fn best_split(ps: &PrefixSums, interval: &Interval) -> Candidate {
    let (split, gain) = CusumEvaluator::new(ps).best_split(interval.left, interval.right);
    Candidate {
        interval: *interval,
        split,
        gain,
    }
}

/// One candidate per interval, in input order, using the parallel pool.
pub fn evaluate_all(ps: &PrefixSums, intervals: &[Interval]) -> Vec<Candidate> {
    evaluate_all_with(&CusumEvaluator::new(ps), intervals, true)
}

/// Evaluates every interval with `evaluator`. Output order always matches
/// input order, whether or not the work is spread over threads.
pub fn evaluate_all_with<E: GainEvaluator>(
    evaluator: &E,
    intervals: &[Interval],
    parallel: bool,
) -> Vec<Candidate> {
    let eval = |iv: &Interval| {
        debug_assert!(iv.right <= evaluator.series_len());
        let (split, gain) = evaluator.best_split(iv.left, iv.right);
        Candidate {
            interval: *iv,
            split,
            gain,
        }
    };
    if parallel {
        intervals.par_iter().map(eval).collect()
    } else {
        intervals.iter().map(eval).collect()
    }
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;

    use super::*;
    use crate::intervals::{seeded_intervals, Layer, SeededParams};

    fn iv(left: usize, right: usize) -> Interval {
        Interval::new(left, right, Layer::Random).unwrap()
    }

    #[test]
    fn prefix_sums_small() {
        let ps = PrefixSums::new(&[0.0, 0.0, 1.0, 1.0]).unwrap();
        assert_eq!(ps.sums(), &[0.0, 0.0, 0.0, 1.0, 2.0]);
        assert_eq!(ps.squared_sums(), &[0.0, 0.0, 0.0, 1.0, 2.0]);
        assert_eq!(ps.len(), 4);

        let ps = PrefixSums::new(&[3.7; 100]).unwrap();
        assert_eq!(ps.offset(), 3.7);
        assert_eq!(ps.segment_mean(10, 90), 3.7);
        assert_eq!(ps.segment_rss(0, 100), 0.0);
        assert_eq!(best_split(&ps, &iv(0, 100)).gain, 0.0);
    }

    #[test]
    fn prefix_sums_rejects_bad_input() {
        assert!(matches!(PrefixSums::new(&[]), Err(Error::Data(_))));
        assert!(PrefixSums::new(&[1.0, f64::NAN]).is_err());
        assert!(PrefixSums::new(&[f64::INFINITY]).is_err());
    }

    #[test]
    fn cusum_examples() {
        let ps = PrefixSums::new(&[0.0, 0.0, 1.0, 1.0]).unwrap();
        assert_relative_eq!(cusum(&ps, 0, 4, 2).unwrap(), -1.0, max_relative = 1e-12);
        let ps = PrefixSums::new(&[1.0, 1.0, 1.0, 5.0]).unwrap();
        assert_relative_eq!(
            cusum(&ps, 0, 4, 3).unwrap(),
            -2.0 * 3f64.sqrt(),
            max_relative = 1e-12
        );
        let ps = PrefixSums::new(&[3.0; 7]).unwrap();
        for s in 1..7 {
            assert_eq!(cusum(&ps, 0, 7, s).unwrap(), 0.0);
        }
    }

    #[test]
    fn cusum_range_errors() {
        let ps = PrefixSums::new(&[0.0, 0.0, 1.0, 1.0]).unwrap();
        assert!(matches!(cusum(&ps, 0, 4, 0), Err(Error::OutOfRange { .. })));
        assert!(matches!(cusum(&ps, 0, 4, 4), Err(Error::OutOfRange { .. })));
        assert!(cusum(&ps, 0, 5, 2).is_err());
        assert!(cusum(&ps, 2, 3, 2).is_err());
    }

    #[test]
    fn shifted_form_differs() {
        let ps = PrefixSums::new(&[0.0, 0.0, 1.0, 1.0]).unwrap();
        // sqrt(2/(4*3))*0 - sqrt(3/(4*2))*2
        let v = cusum_with(&ps, 0, 4, 2, CusumForm::ShiftedLeftCount).unwrap();
        assert_relative_eq!(v, -(3.0f64 / 8.0).sqrt() * 2.0, max_relative = 1e-12);
    }

    #[test]
    fn best_split_examples() {
        // |T(1)| = sqrt(3/4) * 2/3, |T(2)| = 1, |T(3)| = sqrt(3/4) * 2/3
        let ps = PrefixSums::new(&[0.0, 0.0, 1.0, 1.0]).unwrap();
        let c = best_split(&ps, &iv(0, 4));
        assert_eq!(c.split, 2);
        assert_relative_eq!(c.gain, 1.0, max_relative = 1e-12);

        let ps = PrefixSums::new(&[2.0; 4]).unwrap();
        let c = best_split(&ps, &iv(0, 4));
        assert_eq!((c.split, c.gain), (1, 0.0));

        // |T(1)| = sqrt(3/4)*4/3, |T(2)| = 2, |T(3)| = sqrt(3)*2
        let ps = PrefixSums::new(&[1.0, 1.0, 1.0, 5.0]).unwrap();
        let c = best_split(&ps, &iv(0, 4));
        assert_eq!(c.split, 3);
        assert_relative_eq!(c.gain, 2.0 * 3f64.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn evaluate_all_preserves_order() {
        let ps = PrefixSums::new(&[0.0, 1.0, 0.0, 1.0]).unwrap();
        assert!(evaluate_all(&ps, &[]).is_empty());
        let one = evaluate_all(&ps, &[iv(0, 4)]);
        assert_eq!(one, vec![best_split(&ps, &iv(0, 4))]);

        let series: Vec<f64> = (0..64).map(|i| ((i * 37 % 11) as f64).sin()).collect();
        let ps = PrefixSums::new(&series).unwrap();
        let ivs = seeded_intervals(&SeededParams::new(64, 0.5, 2).unwrap()).unwrap();
        let par = evaluate_all(&ps, &ivs);
        let seq: Vec<_> = ivs.iter().map(|iv| best_split(&ps, iv)).collect();
        assert_eq!(par, seq);
    }

    #[test]
    fn compensated_matches_plain_on_integers() {
        let series: Vec<f64> = (0..100).map(|i| (i % 7) as f64).collect();
        let a = PrefixSums::new(&series).unwrap();
        let b = PrefixSums::compensated(&series).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn segment_rss_small() {
        let ps = PrefixSums::new(&[0.0, 0.0, 1.0, 1.0]).unwrap();
        assert_relative_eq!(ps.segment_rss(0, 4), 1.0);
        assert_eq!(ps.segment_rss(0, 2), 0.0);
        assert_eq!(ps.segment_mean(1, 3), 0.5);
    }
}
