use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default exponent of the strengthened Schwarz criterion.
pub const DEFAULT_SSIC_THETA: f64 = 1.01;

/// Model-size penalty of an information criterion.
///
/// Every kind grows by a fixed amount per added change point, so the
/// criterion can be updated in O(1) along a nested solution path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Penalty {
    /// `alpha` per change point, added to the residual sum of squares.
    Constant { alpha: f64 },
    /// `2 sigma^2 log T` per change point, added to the residual sum of squares.
    Bic { sigma2: f64 },
    /// `(T/2) log(RSS/T) + |S| (log T)^theta`.
    Ssic { theta: f64 },
}

impl Penalty {
    pub fn ssic() -> Self {
        Penalty::Ssic {
            theta: DEFAULT_SSIC_THETA,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Penalty::Constant { .. } => "constant",
            Penalty::Bic { .. } => "bic",
            Penalty::Ssic { .. } => "ssic",
        }
    }

    /// True when the data term is the plain residual sum of squares.
    pub fn is_additive(&self) -> bool {
        !matches!(self, Penalty::Ssic { .. })
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Penalty::Constant { alpha } => alpha.is_finite() && alpha >= 0.0,
            Penalty::Bic { sigma2 } => sigma2.is_finite() && sigma2 >= 0.0,
            Penalty::Ssic { theta } => theta.is_finite() && theta > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("bad penalty {self:?}")))
        }
    }

    /// Cost of a single change point for a series of length `len`.
    pub fn per_break(&self, len: usize) -> f64 {
        self.per_break_log((len as f64).ln())
    }

    /// Same as [`Penalty::per_break`] given `log T` directly.
    pub fn per_break_log(&self, log_t: f64) -> f64 {
        match *self {
            Penalty::Constant { alpha } => alpha,
            Penalty::Bic { sigma2 } => 2.0 * sigma2 * log_t,
            Penalty::Ssic { theta } => log_t.powf(theta),
        }
    }
}

/// Penalty term for `count` change points.
pub fn penalty_value(p: &Penalty, count: usize, len: usize) -> f64 {
    penalty_value_log(p, count, (len as f64).ln())
}

/// Penalty term for `count` change points given `log T`.
pub fn penalty_value_log(p: &Penalty, count: usize, log_t: f64) -> f64 {
    if count == 0 {
        return 0.0;
    }
    count as f64 * p.per_break_log(log_t)
}

/// Criterion value from a residual sum of squares and a model size.
///
/// For sSIC a zero RSS has no finite value and maps to `-inf`.
pub fn criterion(p: &Penalty, rss: f64, count: usize, len: usize) -> f64 {
    let pen = penalty_value(p, count, len);
    match p {
        Penalty::Ssic { .. } => {
            let t = len as f64;
            if rss <= 0.0 {
                log::warn!("sSIC evaluated on a perfect fit (RSS = 0); score is -inf");
                f64::NEG_INFINITY
            } else {
                0.5 * t * (rss / t).ln() + pen
            }
        }
        _ => rss + pen,
    }
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;

    use super::*;

    #[test]
    fn penalty_examples() {
        assert_eq!(
            penalty_value(&Penalty::Constant { alpha: 2.0 }, 3, 100),
            6.0
        );
        for p in [
            Penalty::Constant { alpha: 2.0 },
            Penalty::Bic { sigma2: 3.0 },
            Penalty::ssic(),
        ] {
            assert_eq!(penalty_value(&p, 0, 100), 0.0);
        }
        // T = e^2
        assert_relative_eq!(
            penalty_value_log(&Penalty::Bic { sigma2: 1.0 }, 1, 2.0),
            4.0,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            penalty_value(&Penalty::Bic { sigma2: 1.0 }, 1, 1000),
            2.0 * 1000f64.ln(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn ssic_degenerate() {
        assert_eq!(criterion(&Penalty::ssic(), 0.0, 2, 10), f64::NEG_INFINITY);
        let v = criterion(&Penalty::Ssic { theta: 1.0 }, 10.0, 1, 10);
        assert_relative_eq!(v, 10f64.ln(), max_relative = 1e-12);
    }

    #[test]
    fn validation() {
        assert!(Penalty::Constant { alpha: -1.0 }.validate().is_err());
        assert!(Penalty::Bic { sigma2: f64::NAN }.validate().is_err());
        assert!(Penalty::ssic().validate().is_ok());
    }
}
