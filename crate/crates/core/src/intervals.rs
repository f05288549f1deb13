//! Background interval systems: the deterministic seeded collection and the
//! uniformly random baseline used by wild binary segmentation.

use std::collections::HashSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which generator produced an interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Layer {
    /// Seeded layer `k`, starting at 1 for the full-length interval.
    Seeded(u32),
    Random,
}

impl fmt::Display for Layer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Layer::Seeded(k) => write!(f, "{k}"),
            Layer::Random => f.write_str("random"),
        }
    }
}

/// Half-open index range `(left, right]` over observations `1..=T`.
///
/// The observations covered are `left + 1, ..., right`, so the length is
/// `right - left`. Split points live strictly inside: `left < s < right`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interval {
    pub left: usize,
    pub right: usize,
    pub layer: Layer,
}

impl Interval {
    /// Builds an interval, checking `right - left >= 2` so that a split exists.
    pub fn new(left: usize, right: usize, layer: Layer) -> Result<Self> {
        if right < left + 2 {
            return Err(Error::InvalidParameter(format!(
                "interval ({left}, {right}] has no interior split point"
            )));
        }
        Ok(Self { left, right, layer })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.right - self.left
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.right == self.left
    }

    /// True when `point` lies strictly between the endpoints.
    #[inline]
    pub fn has_interior(&self, point: usize) -> bool {
        self.left < point && point < self.right
    }
}

/// How interval endpoints are placed within a layer.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    /// Start points lie on an even grid from the first observation to
    /// `T - l_k` (one-based), end points on an even grid from `l_k` to `T`.
    /// Starts therefore advance by `(T - l_k - 1)/(n_k - 1)` per interval
    /// while ends advance by `s_k`; the first and last intervals are pinned
    /// to the series boundaries.
    EndpointGrids,
    /// Both endpoints advance by the same shift `s_k`:
    /// `(floor((i-1) s_k), ceil((i-1) s_k + l_k)]`.
    #[default]
    CommonShift,
}

/// Parameters of a seeded interval collection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeededParams {
    pub len: usize,
    pub decay: f64,
    pub min_len: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl SeededParams {
    pub fn new(len: usize, decay: f64, min_len: usize) -> Result<Self> {
        let params = Self {
            len,
            decay,
            min_len,
            spacing: Spacing::default(),
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_spacing(mut self, spacing: Spacing) -> Self {
        self.spacing = spacing;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.len < 2 {
            return Err(Error::InvalidParameter(format!(
                "series length must be at least 2, got {}",
                self.len
            )));
        }
        if !(0.5..1.0).contains(&self.decay) {
            return Err(Error::InvalidParameter(format!(
                "decay must lie in [1/2, 1), got {}",
                self.decay
            )));
        }
        if self.min_len < 2 {
            return Err(Error::InvalidParameter(format!(
                "minimal interval length must be at least 2, got {}",
                self.min_len
            )));
        }
        Ok(())
    }

    /// Number of layers, `ceil(log_{1/a} T)`.
    pub fn depth(&self) -> u32 {
        depth(self.len, self.decay)
    }
}

/// Count, nominal length and shift of one seeded layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerParams {
    pub layer: u32,
    pub count: usize,
    pub length: f64,
    pub shift: f64,
}

// Values within this relative distance of an integer are treated as that
// integer before floor/ceil. Powers of 2^{-1/2} and friends are otherwise
// off by an ulp and round the wrong way.
const SNAP_TOL: f64 = 1e-9;

fn snap(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= SNAP_TOL * x.abs().max(1.0) {
        r
    } else {
        x
    }
}

fn depth(len: usize, decay: f64) -> u32 {
    let raw = (len as f64).ln() / (1.0 / decay).ln();
    (snap(raw).ceil() as u32).max(1)
}

/// Evaluates the count/length/shift formulas for layer `k` of a seeded system.
pub fn layer_params(len: usize, decay: f64, layer: u32) -> Result<LayerParams> {
    SeededParams::new(len, decay, 2)?;
    let max = depth(len, decay);
    if layer < 1 || layer > max {
        return Err(Error::OutOfRange {
            what: "layer",
            value: layer as usize,
            min: 1,
            max: max as usize,
        });
    }
    let growth = (1.0 / decay).powi(layer as i32 - 1);
    let count = 2 * snap(growth).ceil() as usize - 1;
    let length = len as f64 * decay.powi(layer as i32 - 1);
    // A single interval covers everything; the 0/0 shift is defined as 0.
    let shift = if count > 1 {
        (len as f64 - length) / (count - 1) as f64
    } else {
        0.0
    };
    Ok(LayerParams {
        layer,
        count,
        length,
        shift,
    })
}

/// Builds the deduplicated seeded interval collection.
///
/// Every layer `k = 1..=ceil(log_{1/a} T)` contributes `n_k` intervals of
/// nominal length `l_k`, evenly spread according to `params.spacing`.
/// Intervals covering fewer than `min_len` observations are dropped, exact
/// duplicates keep their first (coarsest) occurrence, and the result is
/// ordered by `(layer, left, right)`.
pub fn seeded_intervals(params: &SeededParams) -> Result<Vec<Interval>> {
    params.validate()?;
    let len = params.len;
    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    let mut out = Vec::new();
    for k in 1..=params.depth() {
        let lp = layer_params(len, params.decay, k)?;
        // Rounding widens an interval by at most one past ceil(l_k).
        if (snap(lp.length).ceil() as usize) + 1 < params.min_len {
            break;
        }
        let start = out.len();
        let start_step = match params.spacing {
            Spacing::CommonShift => lp.shift,
            Spacing::EndpointGrids if lp.count > 1 => {
                (len as f64 - lp.length - 1.0).max(0.0) / (lp.count - 1) as f64
            }
            Spacing::EndpointGrids => 0.0,
        };
        for i in 0..lp.count {
            let left = snap(i as f64 * start_step).floor() as usize;
            let right = (snap(i as f64 * lp.shift + lp.length).ceil() as usize).min(len);
            if right < left + params.min_len {
                continue;
            }
            if seen.insert((left, right)) {
                out.push(Interval {
                    left,
                    right,
                    layer: Layer::Seeded(k),
                });
            }
        }
        out[start..].sort_by_key(|iv| (iv.left, iv.right));
    }
    Ok(out)
}

/// Draws `count` intervals with endpoints uniform on `{0, ..., T}`, redrawing
/// any pair closer than `min_len`. Deterministic for a given seed.
pub fn random_intervals(
    len: usize,
    count: usize,
    min_len: usize,
    seed: u64,
) -> Result<Vec<Interval>> {
    if min_len < 2 {
        return Err(Error::InvalidParameter(format!(
            "minimal interval length must be at least 2, got {min_len}"
        )));
    }
    if min_len > len {
        return Err(Error::InvalidParameter(format!(
            "minimal interval length {min_len} exceeds series length {len}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let a = rng.random_range(0..=len);
        let b = rng.random_range(0..=len);
        let (left, right) = if a <= b { (a, b) } else { (b, a) };
        if right - left >= min_len {
            out.push(Interval {
                left,
                right,
                layer: Layer::Random,
            });
        }
    }
    Ok(out)
}

/// Sum of `right - left` over the collection.
pub fn total_interval_length(intervals: &[Interval]) -> u64 {
    intervals.iter().map(|iv| iv.len() as u64).sum()
}

/// The `6 T ceil(log_{1/a} T)` bound on the seeded total length.
pub fn seeded_length_bound(len: usize, decay: f64) -> u64 {
    6 * len as u64 * u64::from(depth(len, decay))
}
