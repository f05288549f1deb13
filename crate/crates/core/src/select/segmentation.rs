use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gain::PrefixSums;

/// Change points with the piecewise-mean fit they induce.
///
/// A change point `p` ends a segment: observations `..=p` and `p+1..` get
/// separate means.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segmentation {
    changepoints: Vec<usize>,
    means: Vec<f64>,
    rss: f64,
}

impl Segmentation {
    /// Fits segment means for the given change points.
    pub fn fit(ps: &PrefixSums, changepoints: Vec<usize>) -> Result<Self> {
        validate_changepoints(&changepoints, ps.len())?;
        Ok(Self::fit_unchecked(ps, changepoints))
    }

    pub(crate) fn fit_unchecked(ps: &PrefixSums, changepoints: Vec<usize>) -> Self {
        let mut means = Vec::with_capacity(changepoints.len() + 1);
        let mut rss = 0.0;
        for (l, r) in segment_bounds(&changepoints, ps.len()) {
            means.push(ps.segment_mean(l, r));
            rss += ps.segment_rss(l, r);
        }
        Self {
            changepoints,
            means,
            rss,
        }
    }

    /// Single-segment model.
    pub fn empty(ps: &PrefixSums) -> Self {
        Self::fit_unchecked(ps, Vec::new())
    }

    pub fn changepoints(&self) -> &[usize] {
        &self.changepoints
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn rss(&self) -> f64 {
        self.rss
    }

    pub fn len(&self) -> usize {
        self.changepoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.changepoints.is_empty()
    }

    /// Fitted value for every observation.
    pub fn fitted(&self, len: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(len);
        for ((l, r), &m) in segment_bounds(&self.changepoints, len).zip(&self.means) {
            out.extend(std::iter::repeat_n(m, r - l));
        }
        out
    }
}

/// `(left, right]` boundaries of the segments induced by `changepoints`.
pub fn segment_bounds(
    changepoints: &[usize],
    len: usize,
) -> impl Iterator<Item = (usize, usize)> + '_ {
    let starts = std::iter::once(0).chain(changepoints.iter().copied());
    let ends = changepoints.iter().copied().chain(std::iter::once(len));
    starts.zip(ends)
}

/// Checks that change points are strictly increasing inside `1..len`.
pub fn validate_changepoints(changepoints: &[usize], len: usize) -> Result<()> {
    let mut prev = 0;
    for &p in changepoints {
        if p <= prev || p >= len {
            return Err(Error::InvalidParameter(format!(
                "change points must be strictly increasing in 1..{len}, got {changepoints:?}"
            )));
        }
        prev = p;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_small() {
        let ps = PrefixSums::new(&[0.0, 0.0, 1.0, 1.0]).unwrap();
        let seg = Segmentation::fit(&ps, vec![2]).unwrap();
        assert_eq!(seg.means(), &[0.0, 1.0]);
        assert_eq!(seg.rss(), 0.0);
        assert_eq!(seg.fitted(4), vec![0.0, 0.0, 1.0, 1.0]);

        let seg = Segmentation::empty(&ps);
        assert_eq!(seg.means(), &[0.5]);
        assert_eq!(seg.rss(), 1.0);
    }

    #[test]
    fn rejects_bad_changepoints() {
        let ps = PrefixSums::new(&[0.0; 5]).unwrap();
        assert!(Segmentation::fit(&ps, vec![0]).is_err());
        assert!(Segmentation::fit(&ps, vec![5]).is_err());
        assert!(Segmentation::fit(&ps, vec![3, 2]).is_err());
        assert!(Segmentation::fit(&ps, vec![2, 2]).is_err());
        assert!(Segmentation::fit(&ps, vec![1, 4]).is_ok());
    }
}
