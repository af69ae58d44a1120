//! Deciding admissibility of control operators for diagonal semigroups by
//! Carleson-measure criteria on Laplace transforms.
//!
//! For a diagonal semigroup generator A = diag(λ_k) on ℓ² and a rank-one
//! control element B = (b_k), admissibility of B with respect to an Orlicz
//! input space reduces to boundedness of the Laplace transform
//!
//!   ℒ : Z(0, ∞) → L^q(ℂ₊, μ),   μ = Σ_k |b_k|^q δ_{−λ_k},
//!
//! and boundedness of ℒ is in turn governed by dyadic Carleson intensities
//! of μ. This crate computes every layer of that reduction:
//!
//! * [`measure`]: discrete half-plane measures, Carleson squares, exact
//!   α-intensities, strip tables and summability functionals;
//! * [`signal`] / [`orlicz`]: input signals, Young functions, Luxemburg
//!   norms, the exponential-Orlicz integral identity and the witness Young
//!   function construction;
//! * [`laplace`]: transforms, reproducing kernels, Hardy norms, dyadic
//!   test families and two-sided embedding-norm estimates;
//! * [`admissibility`]: diagonal systems, the input-to-state map, the
//!   decision procedures and the route cross-check.
//!
//! Everything downstream of a seed is deterministic: random test signals
//! come from an explicit ChaCha stream, parallel reductions are reassembled
//! in canonical order, and all reported quantities are either exact sweeps
//! or quadratures with tracked tolerances.

pub mod admissibility;
pub mod constants;
pub mod error;
pub mod laplace;
pub mod measure;
pub mod orlicz;
pub mod quad;
pub mod signal;
mod util;

pub use admissibility::{
    decide_finite_time, decide_linf_admissible, decide_lq_prime_group, decide_phi_exp_admissible,
    input_to_state, multi_input_decide, propequiv_crosscheck, resolvent_condition,
    theta_norm_estimate, witness_from_intensities, witness_orlicz, AdmissibilityReport, Criterion,
    CrosscheckReport, DiagonalSystem, Mode, MultiInputDecision, MultiInputOperator,
    StabilityClass, ThetaState, WitnessReport,
};
pub use constants::ConstantChain;
pub use error::{Error, Result};
pub use measure::{
    strip_index, AtomRecord, DiscreteMeasure, ImaginaryInterval, IntensityTable, StripWeights,
    SummabilityReport,
};

/// Cap the global thread pool used by the parallel reductions. Call once,
/// before any parallel work; later calls are ignored (the pool can only be
/// built once per process). Results do not depend on the thread count.
pub fn configure_thread_cap(threads: usize) {
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
}
