//! JSON output of the `detect` command.

use serde::Serialize;

use seedbs::{DetectConfig, Detection};

#[derive(Debug, Clone, Serialize)]
pub struct IcReport {
    pub kind: &'static str,
    /// `null` when the criterion is not finite.
    pub score: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub evaluate: f64,
    pub select: f64,
}

/// `{changepoints, gains, threshold, sigma_hat, ic, config, timing_ms}`.
#[derive(Debug, Clone, Serialize)]
pub struct DetectReport {
    pub changepoints: Vec<usize>,
    pub gains: Vec<f64>,
    pub threshold: f64,
    pub sigma_hat: f64,
    pub ic: Option<IcReport>,
    pub config: DetectConfig,
    pub timing_ms: Timing,
}

impl DetectReport {
    pub fn new(found: &Detection, config: &DetectConfig) -> Self {
        Self {
            changepoints: found.changepoints().to_vec(),
            gains: found.gains.clone(),
            threshold: found.threshold,
            sigma_hat: found.sigma_hat,
            ic: found.ic.map(|(kind, score)| IcReport {
                kind,
                score: score.is_finite().then_some(score),
            }),
            config: *config,
            timing_ms: Timing {
                evaluate: found.evaluate_time.as_secs_f64() * 1e3,
                select: found.select_time.as_secs_f64() * 1e3,
            },
        }
    }
}
