//! Piecewise-constant test signals and Gaussian noise simulation.

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A piecewise-constant mean pattern, optionally repeated back to back.
///
/// Change point `p` is the last index of the segment on its left, so levels
/// `levels[i]` cover observations `changepoints[i-1]+1 ..= changepoints[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalSpec {
    pub name: String,
    #[serde(rename = "T")]
    pub len: usize,
    pub changepoints: Vec<usize>,
    pub levels: Vec<f64>,
    #[serde(default = "one")]
    pub repeat: usize,
    /// Noise level the signal is usually paired with in benchmarks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
}

fn one() -> usize {
    1
}

const BUNDLED: &[(&str, &str)] = &[
    ("blocks", include_str!("../signals/blocks.json")),
    ("fms", include_str!("../signals/fms.json")),
    ("mix", include_str!("../signals/mix.json")),
    ("teeth10", include_str!("../signals/teeth10.json")),
    ("stairs10", include_str!("../signals/stairs10.json")),
];

impl SignalSpec {
    /// One of the bundled benchmark signals: blocks, fms, mix, teeth10, stairs10.
    pub fn bundled(name: &str) -> Result<Self> {
        let (_, text) = BUNDLED
            .iter()
            .find(|(n, _)| *n == name)
            .ok_or_else(|| Error::InvalidSpec(format!("no bundled signal named {name:?}")))?;
        Self::from_json(text, name)
    }

    pub fn bundled_names() -> impl Iterator<Item = &'static str> {
        BUNDLED.iter().map(|(n, _)| *n)
    }

    /// Parses and validates a spec. `origin` labels error messages.
    pub fn from_json(text: &str, origin: &str) -> Result<Self> {
        let spec: SignalSpec = serde_json::from_str(text).map_err(|e| Error::Parse {
            path: origin.to_string(),
            message: format!("line {} column {}: {e}", e.line(), e.column()),
        })?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("signal spec serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.len < 1 {
            return Err(Error::InvalidSpec("T must be positive".into()));
        }
        if self.repeat < 1 {
            return Err(Error::InvalidSpec("repeat must be at least 1".into()));
        }
        if self.levels.len() != self.changepoints.len() + 1 {
            return Err(Error::InvalidSpec(format!(
                "{} change points need {} levels, got {}",
                self.changepoints.len(),
                self.changepoints.len() + 1,
                self.levels.len()
            )));
        }
        let mut prev = 0;
        for &p in &self.changepoints {
            if p <= prev || p >= self.len {
                return Err(Error::InvalidSpec(format!(
                    "change points must be strictly increasing inside (0, {}), got {:?}",
                    self.len, self.changepoints
                )));
            }
            prev = p;
        }
        if let Some(x) = self.levels.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidSpec(format!("non-finite level {x}")));
        }
        if let Some(s) = self.sigma {
            if !(s >= 0.0 && s.is_finite()) {
                return Err(Error::InvalidSpec(format!("bad sigma {s}")));
            }
        }
        Ok(())
    }

    /// Length after repetition.
    pub fn rendered_len(&self) -> usize {
        self.len * self.repeat
    }

    /// The mean sequence `f_1, ..., f_{kT}`.
    pub fn render(&self) -> Vec<f64> {
        let mut pattern = Vec::with_capacity(self.len);
        let bounds = std::iter::once(0)
            .chain(self.changepoints.iter().copied())
            .zip(
                self.changepoints
                    .iter()
                    .copied()
                    .chain(std::iter::once(self.len)),
            );
        for ((l, r), &level) in bounds.zip(&self.levels) {
            pattern.extend(std::iter::repeat_n(level, r - l));
        }
        let mut out = Vec::with_capacity(self.rendered_len());
        for _ in 0..self.repeat {
            out.extend_from_slice(&pattern);
        }
        out
    }

    /// Change points of the rendered sequence. A junction between copies
    /// counts only when the last and first levels differ.
    pub fn effective_changepoints(&self) -> Vec<usize> {
        let junction = self.levels.first() != self.levels.last();
        let mut out = Vec::with_capacity(self.repeat * (self.changepoints.len() + 1));
        for copy in 0..self.repeat {
            let base = copy * self.len;
            if copy > 0 && junction {
                out.push(base);
            }
            out.extend(self.changepoints.iter().map(|&p| base + p));
        }
        out
    }

    /// Levels of the rendered segments, one per effective segment.
    pub fn effective_levels(&self) -> Vec<f64> {
        let f = self.render();
        std::iter::once(0)
            .chain(self.effective_changepoints())
            .map(|start| f[start])
            .collect()
    }

    /// Absolute jump sizes at the effective change points.
    pub fn jumps(&self) -> Vec<f64> {
        self.effective_levels()
            .windows(2)
            .map(|w| (w[1] - w[0]).abs())
            .collect()
    }

    /// Smallest jump, or `None` without change points.
    pub fn min_jump(&self) -> Option<f64> {
        self.jumps().into_iter().reduce(f64::min)
    }

    /// Shortest effective segment.
    pub fn min_spacing(&self) -> usize {
        let cps = self.effective_changepoints();
        std::iter::once(0)
            .chain(cps.iter().copied())
            .zip(
                cps.iter()
                    .copied()
                    .chain(std::iter::once(self.rendered_len())),
            )
            .map(|(l, r)| r - l)
            .min()
            .unwrap_or(0)
    }
}

/// Reads and validates a JSON signal spec.
pub fn load_signal_spec(path: impl AsRef<Path>) -> Result<SignalSpec> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    SignalSpec::from_json(&text, &path.display().to_string())
}

/// I.i.d. Gaussian noise with a fixed seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub sigma: f64,
    pub seed: u64,
}

impl NoiseModel {
    pub fn new(sigma: f64, seed: u64) -> Result<Self> {
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "noise sd must be finite and non-negative, got {sigma}"
            )));
        }
        Ok(Self { sigma, seed })
    }

    /// Generator for replicate `rep`: ChaCha8 keyed by `seed`, on stream `rep`.
    pub fn rng(&self, rep: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(rep);
        rng
    }

    /// `mean + sigma * Z` with standard normals drawn by the ziggurat method.
    pub fn add_to(&self, mean: &[f64], rep: u64) -> Vec<f64> {
        if self.sigma == 0.0 {
            return mean.to_vec();
        }
        let mut rng = self.rng(rep);
        mean.iter()
            .map(|&m| {
                let z: f64 = StandardNormal.sample(&mut rng);
                m + self.sigma * z
            })
            .collect()
    }
}

/// `reps` noisy replicates of the rendered signal.
pub fn simulate(spec: &SignalSpec, noise: &NoiseModel, reps: usize) -> Result<Vec<Vec<f64>>> {
    spec.validate()?;
    if reps < 1 {
        return Err(Error::InvalidParameter(
            "need at least one replicate".into(),
        ));
    }
    let mean = spec.render();
    Ok((0..reps as u64).map(|r| noise.add_to(&mean, r)).collect())
}
