//! Laplace transforms of the supported signal classes and the induced
//! L^q(μ) norms, plus reproducing kernels, Hardy-norm estimates, the
//! explicit test-function families and the embedding deciders built on
//! them.
//!
//! The transform is
//!
//! ```text
//!   ℒf(z) = ∫₀^∞ e^(−zt) f(t) dt,
//! ```
//!
//! evaluated in closed form piece by piece: every supported signal is a
//! finite union of intervals carrying finite sums Σ c·e^(ηt), so each
//! contribution is an elementary exponential segment integral.

use num_complex::Complex64;
use rayon::prelude::*;
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::measure::DiscreteMeasure;
use crate::signal::InputSignal;
use crate::util::pairwise_sum;

mod embedding;
mod families;
mod hardy;
mod kernel;
mod psi;

pub use embedding::{
    embedding_lower_bound, embedding_upper_bound, exp_orlicz_embedding_check, finite_time_check,
    strip_embedding_check, zero_class_bound, EmbeddingEstimate, EmbeddingUpperBound,
    LowerBoundReport, TargetSpace, UpperBoundTerm,
};
pub(crate) use embedding::lower_bound_candidates;
pub use families::{test_family_fn, test_family_gk, TestFamilyKind};
pub use hardy::{hardy_norm, HardyNormEstimate};
pub use kernel::{
    kernel_norm, kernel_signal, kernel_square_bounds, kernel_square_check, kernel_transform,
    reproducing_residual, KernelSquareCheck,
};
pub use psi::psi_integral_limit_check;

/// ∫_a^b e^(−wt) dt, with `b = ∞` allowed when Re w > 0.
///
/// The finite case is written as (b−a)·e^(−wa)·h(w(b−a)) with
/// h(x) = (1 − e^(−x))/x, switching to the power series of h near x = 0 so
/// the removable singularity w = 0 and its neighbourhood lose no digits.
fn segment_transform(a: f64, b: f64, w: Complex64) -> Complex64 {
    if b.is_infinite() {
        debug_assert!(w.re > 0.0);
        return (-w * a).exp() / w;
    }
    let len = b - a;
    let x = w * len;
    let head = (-w * a).exp();
    if x.norm() < 1e-4 {
        let h = Complex64::new(1.0, 0.0)
            + x * (Complex64::new(-0.5, 0.0)
                + x * (Complex64::new(1.0 / 6.0, 0.0)
                    + x * (Complex64::new(-1.0 / 24.0, 0.0) + x * (1.0 / 120.0))));
        head * len * h
    } else {
        head * (Complex64::new(1.0, 0.0) - (-x).exp()) / w
    }
}

/// Laplace transform ℒf(z) = ∫₀^∞ e^(−zt) f(t) dt.
///
/// Compactly supported signals transform entirely (any z). Signals with
/// unbounded support require the integral to converge: for a decaying tail
/// e^(ηt) this means Re(z − η) > 0, otherwise the call is a domain error.
pub fn laplace(f: &InputSignal, z: Complex64) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for piece in f.pieces() {
        for &(c, eta) in &piece.terms {
            let w = z - eta;
            if piece.b.is_infinite() && w.re <= 0.0 {
                return Err(Error::domain(format!(
                    "Laplace integral diverges on unbounded support: Re(z − η) = {} ≤ 0 for η = {} + {}i",
                    w.re, eta.re, eta.im
                )));
            }
            acc += c * segment_transform(piece.a, piece.b, w);
        }
    }
    Ok(acc)
}

/// ‖ℒf‖_{L^q(μ)} = (Σ_atoms weight·|ℒf(atom)|^q)^(1/q).
///
/// Atoms are evaluated in canonical order (in parallel for large measures,
/// which preserves the order) and reduced with pairwise summation, so the
/// result is reproducible bit for bit.
pub fn transform_lq_norm(mu: &DiscreteMeasure, f: &InputSignal, q: f64) -> Result<f64> {
    if !(q >= 1.0) || !q.is_finite() {
        return Err(Error::domain(format!("L^q(μ) norm needs 1 ≤ q < ∞, got {q}")));
    }
    let eval = |re: f64, im: f64, weight: f64| -> Result<f64> {
        Ok(weight * laplace(f, Complex64::new(re, im))?.norm().powf(q))
    };
    let atoms = mu.atoms();
    let powers = if atoms.len() >= 32 {
        atoms.par_iter().map(|a| eval(a.re, a.im, a.weight)).collect::<Result<Vec<f64>>>()?
    } else {
        atoms.iter().map(|a| eval(a.re, a.im, a.weight)).collect::<Result<Vec<f64>>>()?
    };
    Ok(pairwise_sum(&powers).powf(1.0 / q))
}

/// One merged endpoint contribution d·e^(−zs)/(z − η) of a transform.
///
/// Expanding each segment integral at its endpoints writes ℒf(z) as a
/// finite sum of such terms; contributions sharing (s, η) are merged, which
/// collapses adjacent grid cells to their jumps. The decomposition is only
/// valid away from the spurious poles z = η (they cancel in the full sum),
/// so it serves envelope and tail estimates, not pointwise evaluation.
#[derive(Debug, Clone, Copy)]
pub(crate) struct EndpointTerm {
    pub d: Complex64,
    pub s: f64,
    pub eta: Complex64,
}

pub(crate) fn endpoint_terms(f: &InputSignal) -> Vec<EndpointTerm> {
    let mut merged: BTreeMap<(u64, u64, u64), Complex64> = BTreeMap::new();
    let add = |map: &mut BTreeMap<(u64, u64, u64), Complex64>, d: Complex64, s: f64, eta: Complex64| {
        *map.entry((s.to_bits(), eta.re.to_bits(), eta.im.to_bits()))
            .or_insert(Complex64::new(0.0, 0.0)) += d;
    };
    for piece in f.pieces() {
        for &(c, eta) in &piece.terms {
            add(&mut merged, c * (eta * piece.a).exp(), piece.a, eta);
            if piece.b.is_finite() {
                add(&mut merged, -c * (eta * piece.b).exp(), piece.b, eta);
            }
        }
    }
    merged
        .into_iter()
        .filter(|(_, d)| d.norm() > 1e-300)
        .map(|((s, re, im), d)| EndpointTerm {
            d,
            s: f64::from_bits(s),
            eta: Complex64::new(f64::from_bits(re), f64::from_bits(im)),
        })
        .collect()
}
