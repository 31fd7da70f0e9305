//! Value-range learners: Gaussian mixtures for numbers and times, and
//! generalized regexes for strings.

pub mod gmm;
pub mod temporal;
pub mod text;

pub use gmm::{em, fit_gmm, EmTrace, MixtureFit, VARIANCE_FLOOR};
pub use temporal::{to_unix_seconds, TemporalError, TemporalKind};
pub use text::{cluster_and_generalize, value_regex, CharClass, ClusterLevel, RegexCluster, Run, StructuredRegex};

use serde::{Deserialize, Serialize};

/// Settings for value-range induction during base-pattern generation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RangeConfig {
    pub numeric: bool,
    pub temporal: bool,
    pub textual: bool,
    pub modes_max: usize,
    pub restarts: usize,
    pub text_coverage: f64,
    /// Populations smaller than `max(min_range_sample, min_support)` get no ranges.
    pub min_range_sample: usize,
}

impl Default for RangeConfig {
    fn default() -> Self {
        RangeConfig {
            numeric: true,
            temporal: true,
            textual: true,
            modes_max: 5,
            restarts: 3,
            text_coverage: 1.0,
            min_range_sample: 20,
        }
    }
}
