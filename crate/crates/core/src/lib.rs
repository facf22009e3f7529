//! Recovery of exactly K-sparse unit-norm signals from sign-flipped 1-bit
//! measurements.
//!
//! The pipeline ranks coordinates by the Hamming distance between the bit
//! vector and each matrix column's sign pattern, selects a redundant
//! candidate support, solves an overdetermined least-squares problem on
//! those columns, and hard-thresholds back to the requested sparsity.
//! Two baselines (BIHT-ℓ2 and the single-pass Passive estimator) and a
//! seeded benchmark harness round out the crate.
//!
//! Everything is deterministic under a 64-bit seed; see [`rng`] for the
//! generator and the trial-seed derivation.

// Parameter validation spells `!(x >= bound)` on purpose: the negation
// rejects NaN, which `x < bound` would accept. Index loops are the natural
// shape of the triangular solves and reflector updates.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod baselines;
pub mod bench;
pub mod error;
pub mod hamming_detect;
pub mod history;
pub mod laws;
pub mod lstsq;
pub mod rng;
pub mod signal_model;

pub use baselines::{biht_l2_recover, passive_recover, BihtParams, PassiveParams};
pub use bench::{
    aggregate, run_sweep, sda_alpha_experiment, write_csv, Algorithm, Experiment, SummaryRow,
    SweepConfig, TrialRecord,
};
pub use error::{Error, Result};
pub use hamming_detect::{
    adaptive_alpha, app_probability, estimate_flip_probabilities, estimate_proxy, expected_hamming,
    find_supp, flip_probability, hamming_distance, lemma2_lower_bound, CandidateSupport,
    FlipProbabilityVector, Lemma2Constants, ProxyVector,
};
pub use history::{
    history_recover, history_recover_with_support, AlphaMode, HistoryParams, RecoveryResult,
    RecoveryStatus,
};
pub use laws::{verify_laws, LawReport};
pub use lstsq::{hard_threshold, left_divide, normalize, QrFactorization, SubmatrixView};
pub use rng::{derive_seed, Rng};
pub use signal_model::{
    apply_sign_flips, gen_measurement_matrix, gen_sparse_signal, measure, recovery_error,
    support_detection_accuracy, BitMeasurements, MeasurementEnsemble, SparseSignal,
};
