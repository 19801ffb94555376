//! Instrumented trial records shared by all solvers.
//!
//! Every solver run produces one [`TrialRecord`]; records serialize to one
//! JSON object per line. Given the same configuration and seed a solver
//! reproduces its record bit-for-bit except for `runtimeMs`, which is wall
//! clock. The trial generator is ChaCha8 (`rand_chacha`), a named portable
//! stream cipher RNG, so records reproduce across platforms; the 64-bit
//! `seedInit` seeds it directly.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Portable, seedable generator used by every solver trial.
pub type TrialRng = rand_chacha::ChaCha8Rng;

/// Solution status: 0 target missed, 1 target matched, 2 target improved.
pub const TARGET_MISSED: u8 = 0;
pub const TARGET_MATCHED: u8 = 1;
pub const TARGET_IMPROVED: u8 = 2;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum SolverError {
    #[error("solver works on odd lengths only, got {0}")]
    EvenLength(u32),
    #[error("length {0} out of supported range")]
    BadLength(u32),
    #[error("population size must be positive")]
    EmptyPopulation,
    #[error("probability {0} outside [0, 1]")]
    BadProbability(f64),
}

/// One instrumented solver run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct TrialRecord {
    /// Solver discriminator, e.g. "saw8", "sawU", "mats", "mats8", "rrts".
    pub solver: String,
    #[serde(rename = "L")]
    pub len: u32,
    /// Energy the trial was asked to reach.
    pub target: i64,
    pub seed_init: u64,
    /// Best coordinate found, as the bit text of the searched space (the
    /// half-coordinate for skew solvers, the full coordinate otherwise).
    pub coord_best: String,
    /// Energy of the best coordinate (of its full expansion for halves).
    pub value_best: i64,
    /// Total walk steps, restarts included.
    pub total_steps: u64,
    /// Objective-function evaluations: the platform-independent cost.
    pub cnt_probe: u64,
    pub cnt_restart: u64,
    pub cnt_trapped: u64,
    pub runtime_ms: u64,
    /// 1 when the time limit ended the run before the target was reached.
    pub is_censored: u8,
    /// 0 missed, 1 matched, 2 improved on the target.
    pub target_reached: u8,
    /// 1 when an unlimited walk aborted on the memory cap.
    pub mem_capped: u8,
}

impl TrialRecord {
    /// Status fields from a finished search: target comparison wins over
    /// censoring, so a run that reaches the target on its final step is a
    /// hit even if the clock has also expired.
    pub(crate) fn status(value_best: i64, target: i64, timed_out: bool) -> (u8, u8) {
        if value_best < target {
            (TARGET_IMPROVED, 0)
        } else if value_best == target {
            (TARGET_MATCHED, 0)
        } else {
            (TARGET_MISSED, u8::from(timed_out))
        }
    }

    pub fn to_jsonl(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }

    pub fn from_jsonl(line: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(line)
    }

    /// Equality ignoring the wall-clock field.
    pub fn same_modulo_runtime(&self, other: &Self) -> bool {
        let mut a = self.clone();
        let mut b = other.clone();
        a.runtime_ms = 0;
        b.runtime_ms = 0;
        a == b
    }
}
