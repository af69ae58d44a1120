//! Tracked constants for the embedding upper bounds.
//!
//! Every sufficiency-direction estimate in this crate is a product of a
//! structural dyadic factor (computed in place, it depends on `q`) and three
//! named constants that the underlying function theory does not pin to sharp
//! values. They are carried explicitly so that reports can echo the full
//! chain and callers can tighten or loosen them.

use serde::{Deserialize, Serialize};

/// Multiplicative constants entering the upper-bound chain
///
/// ```text
/// ‖ℒ‖^q ≤ κ_C · κ_HY^q · κ_H^(q−1) · 2^(q+1) · Σ_n (2^n E_n)^(q−1) 𝒞_q[μ_n]
/// ```
///
/// where `E_n` is the Orlicz norm of `t ↦ exp(−q′ 2^(n−1) t)` in the
/// complementary space and the `2^(q+1)` is the structural factor from the
/// dyadic shift and intensity-comparison lemmas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantChain {
    /// Absolute constant of the half-plane Carleson embedding
    /// `∫ |F|^q dμ ≤ κ_C · 𝒞₁[μ] · ‖F‖_{H^q}^q`.
    ///
    /// The default is a conservative absolute bound obtained from the Vitali
    /// shadow covering (factor 2) combined with a nontangential maximal
    /// function estimate; the sharp value is not needed anywhere because the
    /// chain is echoed in every report.
    pub kappa_carleson: f64,

    /// Constant of the one-sided Hölder-type product inequality for Orlicz
    /// pairs, `∫ |fg| ≤ κ_H ‖f‖_Φ ‖g‖_{Φ^c}`. The classical proof gives 2.
    pub kappa_holder: f64,

    /// Hausdorff–Young-type constant relating the transform of a unimodular
    /// piece to the measure of its support. The contour estimate used here
    /// is exact, so the default is 1.
    pub hausdorff_young: f64,
}

impl Default for ConstantChain {
    fn default() -> Self {
        ConstantChain {
            kappa_carleson: 32.0,
            kappa_holder: 2.0,
            hausdorff_young: 1.0,
        }
    }
}

impl ConstantChain {
    /// Full multiplier in front of `Σ_n (2^n E_n)^(q−1) 𝒞_q[μ_n]`, including
    /// the structural dyadic factor `2^(q+1)`.
    pub fn chain_multiplier(&self, q: f64) -> f64 {
        self.kappa_carleson
            * self.hausdorff_young.powf(q)
            * self.kappa_holder.powf(q - 1.0)
            * 2f64.powf(q + 1.0)
    }
}
