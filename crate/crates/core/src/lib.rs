//! Bell operators on two qubits, sum-of-squares certificates of their maximal
//! quantum violation, the optimal measurements those certificates imply, and
//! the device-independent randomness (guessing probability and min-entropy)
//! the resulting statistics certify.
//!
//! The crate is organized around five pieces:
//!
//! - [`matrix`], [`observable`], [`state`]: dense 2x2 / 4x4 complex linear
//!   algebra, dichotomic observables with their Bloch vectors, and the two
//!   canonical two-qubit states.
//! - [`families`]: coefficient tables and classical bounds (by exhaustive
//!   deterministic-strategy enumeration) for the CHSH, tilted CHSH, elegant,
//!   Gisin and chained inequalities.
//! - [`sos`]: the decomposition identity for shifted Bell operators, its
//!   certificates, and recovery of one party's optimal observables from the
//!   other's on the maximally entangled state.
//! - [`randomness`]: joint outcome tables, guessing probability, min-entropy,
//!   closed forms for the tilted family on maximally entangled and Werner
//!   states, and sweep generators.
//! - [`oracle`]: see-saw optimization and a from-scratch probability
//!   maximizer that independently confirm every bound and closed form above.
//!
//! All values are immutable after construction and all operations are pure
//! functions, so everything here can be used freely across threads.

pub mod error;
pub mod families;
pub mod matrix;
pub mod observable;
pub mod oracle;
pub mod randomness;
pub mod sos;
pub mod state;

/// Tolerance for structural identities (Hermiticity, normalization,
/// transpose symmetry, anticommutator algebra).
pub const STRUCTURAL_TOL: f64 = 1e-12;

/// Tolerance for spectral conditions (involutions, eigenvalue checks,
/// expectation residues).
pub const SPECTRAL_TOL: f64 = 1e-10;

/// Residual norms at or below this value count as saturated.
pub const SATURATION_TOL: f64 = 1e-10;

/// Weights below this value are degenerate; the decomposition divides by them.
pub const WEIGHT_DEGENERACY_TOL: f64 = 1e-12;

/// Maximum allowed disagreement between a closed form and its brute-force
/// evaluation before a verification is considered failed.
pub const AGREEMENT_TOL: f64 = 1e-10;

pub use error::{Error, Result};
pub use families::{
    bell_operator, lhv_bound, violation, BellCoefficients, BellFamily, FamilyKind, MeasurementSet,
};
pub use matrix::{tensor, Mat2, Mat4, Matrix};
pub use observable::{
    anticommutator, planar_vectors_from_gram, BlochVector, DichotomicObservable, GramTarget,
    Outcome,
};
pub use oracle::{brute_force_pmax, seesaw_max_violation, SeesawConfig, SeesawResult};
pub use randomness::{
    guessing_probability, joint_probabilities, min_entropy, sweep_alpha, sweep_p,
    tilted_pmax_closed_form, tilted_randomness_report, werner_pmax_closed_form, ArgMax,
    ClosedFormParams, JointProbabilityTable, RandomnessReport, SweepResult, SweepRow,
};
pub use sos::{
    derive_alice_from_bob, derive_bob_from_alice, omega_per_alice, omega_per_bob, residual,
    solve_family_measurements, verify_sos, verify_sos_mirrored, SolvedFamily, SosCertificate,
};
pub use state::{expectation, state_norm, transpose_identity_defect, TwoQubitState};
