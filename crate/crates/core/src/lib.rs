//! Seeded binary segmentation for offline change-in-mean detection.
//!
//! The pipeline has three stages that can be swapped independently:
//!
//! 1. build background intervals ([`intervals`]): the deterministic seeded
//!    collection, or uniformly random intervals as a baseline;
//! 2. find the best CUSUM split of every interval ([`gain`]);
//! 3. select change points from the candidates ([`select`]): greedy or
//!    narrowest-over-threshold, with a fixed threshold or an information
//!    criterion along the solution path.
//!
//! [`detect`](detect::detect) wires the three together.
//!
//! ```
//! use seedbs::detect::{detect, DetectConfig};
//!
//! let mut series = vec![0.0; 50];
//! series.extend(vec![3.0; 50]);
//! let found = detect(&series, &DetectConfig::default()).unwrap();
//! assert_eq!(found.changepoints(), &[50]);
//! ```

pub mod detect;
pub mod error;
pub mod gain;
pub mod intervals;
pub mod metrics;
#[cfg(any(test, feature = "oracle"))]
pub mod oracle;
pub mod select;
pub mod signals;

pub use detect::{detect, DetectConfig, Detection};
pub use error::{Error, Result};
pub use gain::{best_split, cusum, evaluate_all, Candidate, GainEvaluator, PrefixSums};
pub use intervals::{
    random_intervals, seeded_intervals, total_interval_length, Interval, SeededParams, Spacing,
};
pub use select::{Penalty, Segmentation, SolutionPath};
pub use signals::{NoiseModel, SignalSpec};
