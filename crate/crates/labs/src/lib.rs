//! Search tooling for the low-autocorrelation binary sequence problem:
//! exact integer energy evaluation with O(L) flip updates, three seeded
//! stochastic solvers (self-avoiding walk, memetic tabu, restart tabu), an
//! exhaustive small-instance oracle, Legendre-sequence constructions, and
//! the waiting-time statistics used to predict solver runtimes and
//! processor budgets.

pub mod exact;
pub mod experiment;
pub mod legendre;
pub mod registry;
pub mod seq;
pub mod stats;
pub mod tabu;
pub mod trial;
pub mod walk;

pub use seq::{
    canonicalize, compute_correlations, energy, expand_skew, hamming, is_skew_symmetric,
    merit_factor, symmetry_images, BinarySequence, CorrelationState, MeritFactor, RleSolution,
    SeqError, SkewHalf,
};
pub use trial::{TrialRecord, TrialRng};
