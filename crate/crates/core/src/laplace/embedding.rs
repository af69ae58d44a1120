//! Two-sided estimation of Laplace–Carleson embedding norms
//! ‖ℒ : X(0,∞) → L^q(μ)‖ for discrete measures, together with the
//! summability functionals that decide boundedness for the strip,
//! finite-time, and exponential-Orlicz criteria.
//!
//! Lower bounds are certified: they are ratios ‖ℒf‖_{L^q(μ)} / ‖f‖_X of
//! concrete test signals, maximized over the adapted families (per-atom
//! modulated indicators, per-strip f_n, lacunary g_k) and an optional
//! seeded random population. Upper bounds run through the dyadic chain
//!
//! ```text
//!   ‖ℒ‖^q ≤ κ_C κ_HY^q κ_H^(q−1) 2^(q+1) · Σ_n (2^n E_n)^(q−1) 𝒞_q[μ_n]
//! ```
//!
//! with E_n the norm of t ↦ e^(−q′2^(n−1)t) in the complementary space,
//! and every constant echoed in the result.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::ConstantChain;
use crate::error::{Error, Result};
use crate::measure::{DiscreteMeasure, ImaginaryInterval, StripWeights};
use crate::orlicz::{exp_function_norm, luxemburg_norm, NormSpace, YoungFunction};
use crate::signal::{InputSignal, SumTerm};
use crate::util::pairwise_sum;

use super::families::{test_family_fn, test_family_gk, TestFamilyKind};
use super::transform_lq_norm;

/// Input space on the time side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "space", content = "value", rename_all = "snake_case")]
pub enum TargetSpace {
    LInfty,
    Lp(f64),
    LPhi(YoungFunction),
}

impl TargetSpace {
    pub fn validate(&self) -> Result<()> {
        match self {
            TargetSpace::LInfty => Ok(()),
            TargetSpace::Lp(p) => {
                if !(*p >= 1.0) || !p.is_finite() {
                    return Err(Error::domain(format!(
                        "L^p input space needs 1 ≤ p < ∞, got p = {p} (use the L^∞ variant for p = ∞)"
                    )));
                }
                Ok(())
            }
            TargetSpace::LPhi(phi) => phi.validate(),
        }
    }

    /// Certified upper bound for ‖f‖ in this space (exact for the Lebesgue
    /// cases on exponential-sum signals; Luxemburg bisection for Orlicz).
    pub fn norm_upper(&self, f: &InputSignal) -> Result<f64> {
        match self {
            TargetSpace::LInfty => Ok(f.sup_norm_upper()),
            TargetSpace::Lp(p) => f.lp_norm(*p),
            TargetSpace::LPhi(phi) => luxemburg_norm(f, phi),
        }
    }

    fn label(&self) -> String {
        match self {
            TargetSpace::LInfty => "L^∞".to_string(),
            TargetSpace::Lp(p) => format!("L^{p}"),
            TargetSpace::LPhi(_) => "L^Φ".to_string(),
        }
    }
}

/// One strip's contribution to the upper-bound sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UpperBoundTerm {
    pub n: i32,
    /// 𝒞_q[μ_n]
    pub intensity: f64,
    /// E_n, the complementary-space norm of e^(−q′2^(n−1)t)
    pub exp_norm: f64,
    /// (2^n E_n)^(q−1) · 𝒞_q[μ_n]
    pub term: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingUpperBound {
    pub q: f64,
    /// (chain_multiplier(q) · sum)^(1/q), an upper bound for ‖ℒ‖.
    pub value: f64,
    pub sum: f64,
    pub terms: Vec<UpperBoundTerm>,
    pub constants: ConstantChain,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundReport {
    pub q: f64,
    pub deterministic_max: f64,
    /// Label of the best deterministic candidate.
    pub deterministic_best: Option<String>,
    pub random_max: f64,
    /// max(deterministic_max, random_max); a certified lower bound.
    pub overall: f64,
    /// Number of candidate signals evaluated.
    pub candidates: usize,
}

/// Combined output of the decision criteria.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingEstimate {
    pub q: f64,
    pub space: TargetSpace,
    pub lower_bound: f64,
    pub upper_bound: f64,
    /// The summability functional the criterion compares against ∞.
    pub functional_value: f64,
    pub decided_bounded: bool,
    pub constants_used: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

fn base_constants(chain: &ConstantChain, q: f64) -> BTreeMap<String, f64> {
    BTreeMap::from([
        ("kappa_carleson".to_string(), chain.kappa_carleson),
        ("kappa_holder".to_string(), chain.kappa_holder),
        ("hausdorff_young".to_string(), chain.hausdorff_young),
        ("chain_multiplier".to_string(), chain.chain_multiplier(q)),
    ])
}

enum ComplementaryNorm {
    One,
    Space(NormSpace),
}

pub fn embedding_upper_bound(
    mu: &DiscreteMeasure,
    q: f64,
    space: &TargetSpace,
    chain: &ConstantChain,
) -> Result<EmbeddingUpperBound> {
    if !(q >= 2.0) || !q.is_finite() {
        return Err(Error::domain(format!(
            "the sufficiency chain needs 2 ≤ q < ∞, got q = {q}"
        )));
    }
    let q_conj = q / (q - 1.0);
    let en = match space {
        TargetSpace::LInfty => ComplementaryNorm::Space(NormSpace::L1),
        TargetSpace::Lp(p) => {
            if !(*p > 1.0) || !p.is_finite() {
                return Err(Error::domain(format!(
                    "the L^p upper bound needs 1 < p < ∞, got p = {p}"
                )));
            }
            if (p - q_conj).abs() <= 1e-12 {
                ComplementaryNorm::One
            } else if *p < q_conj {
                return Err(Error::domain(format!(
                    "L^{p} inputs do not pass through the q = {q} chain: the duality step needs p ≥ q′ = {q_conj}"
                )));
            } else {
                ComplementaryNorm::Space(NormSpace::Lp(p / (p - q_conj)))
            }
        }
        TargetSpace::LPhi(phi) => {
            phi.validate()?;
            let (inner, power) = phi.composition_parts().ok_or_else(|| {
                Error::domain(
                    "the Orlicz upper bound needs Φ in composed form Φ(t) = Φ̃(t^(q′)); build it with the composition variant",
                )
            })?;
            if (power - q_conj).abs() > 1e-9 {
                return Err(Error::domain(format!(
                    "composition exponent {power} does not match q′ = {q_conj}"
                )));
            }
            ComplementaryNorm::Space(NormSpace::Orlicz(inner.complementary()?))
        }
    };

    let mut terms = Vec::new();
    let mut parts = Vec::new();
    for (n, mu_n) in mu.strips() {
        let intensity = mu_n.alpha_intensity(q)?;
        let rate = q_conj * ((n - 1) as f64).exp2();
        let exp_norm = match &en {
            ComplementaryNorm::One => 1.0,
            ComplementaryNorm::Space(s) => exp_function_norm(s, rate)?,
        };
        let term = ((n as f64).exp2() * exp_norm).powf(q - 1.0) * intensity;
        terms.push(UpperBoundTerm { n, intensity, exp_norm, term });
        parts.push(term);
    }
    let sum = pairwise_sum(&parts);
    let value = (chain.chain_multiplier(q) * sum).powf(1.0 / q);
    Ok(EmbeddingUpperBound { q, value, sum, terms, constants: *chain })
}

fn candidate_ratio(
    mu: &DiscreteMeasure,
    f: &InputSignal,
    q: f64,
    space: &TargetSpace,
) -> Result<f64> {
    let denom = space.norm_upper(f)?;
    if !(denom > 1e-300) {
        return Ok(0.0);
    }
    Ok(transform_lq_norm(mu, f, q)? / denom)
}

/// Certified lower bound for ‖ℒ : X → L^q(μ)‖ from concrete test signals.
///
/// Deterministic candidates: per-atom modulated indicators over a few time
/// scales, the strip-adapted f_n at each strip's densest window, and the
/// lacunary combinations g_k matched to the space. `budget` additional
/// random candidates (unimodular dyadic steps and modulated bursts near
/// atom frequencies) are drawn from a stream seeded by `seed`, so equal
/// seeds give equal reports. `horizon` restricts all candidates to
/// supports inside (0, horizon], for finite-time operators.
pub fn embedding_lower_bound(
    mu: &DiscreteMeasure,
    q: f64,
    space: &TargetSpace,
    budget: u32,
    seed: u64,
    horizon: Option<f64>,
) -> Result<LowerBoundReport> {
    if !(q >= 1.0) || !q.is_finite() {
        return Err(Error::domain(format!(
            "embedding exponent q must satisfy 1 ≤ q < ∞, got q = {q}"
        )));
    }
    let (candidates, deterministic_count) =
        lower_bound_candidates(mu, space, budget, seed, horizon)?;

    let ratios: Vec<Result<f64>> = if candidates.len() >= 16 {
        candidates.par_iter().map(|(_, f)| candidate_ratio(mu, f, q, space)).collect()
    } else {
        candidates.iter().map(|(_, f)| candidate_ratio(mu, f, q, space)).collect()
    };

    let mut deterministic_max = 0.0f64;
    let mut deterministic_best = None;
    let mut random_max = 0.0f64;
    for (i, r) in ratios.into_iter().enumerate() {
        let r = r?;
        if i < deterministic_count {
            if r > deterministic_max {
                deterministic_max = r;
                deterministic_best = Some(candidates[i].0.clone());
            }
        } else if r > random_max {
            random_max = r;
        }
    }
    Ok(LowerBoundReport {
        q,
        deterministic_max,
        deterministic_best,
        random_max,
        overall: deterministic_max.max(random_max),
        candidates: candidates.len(),
    })
}

/// The shared candidate pool behind the lower-bound estimators: labelled
/// test signals adapted to the measure, deterministic ones first, then
/// `budget` seeded random ones. Returns the pool and the deterministic
/// prefix length.
pub(crate) fn lower_bound_candidates(
    mu: &DiscreteMeasure,
    space: &TargetSpace,
    budget: u32,
    seed: u64,
    horizon: Option<f64>,
) -> Result<(Vec<(String, InputSignal)>, usize)> {
    space.validate()?;
    if let Some(h) = horizon {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::domain(format!(
                "time horizon must be positive and finite, got {h}"
            )));
        }
    }
    let fits = |b: f64| horizon.map_or(true, |h| b <= h * (1.0 + 1e-12));

    let mut candidates: Vec<(String, InputSignal)> = Vec::new();
    for (j, atom) in mu.atoms().iter().enumerate() {
        let mut spans = vec![0.5 / atom.re, 1.0 / atom.re, 4.0 / atom.re];
        if let Some(h) = horizon {
            spans.retain(|t| *t <= h);
            spans.push(h);
        }
        for t in spans {
            candidates
                .push((format!("atom {j}, window {t:.3e}"), InputSignal::modulated(0.0, t, atom.im)?));
        }
    }

    let strips = mu.strips();
    for (n, mu_n) in &strips {
        if n.abs() > 400 || !fits((-n as f64).exp2()) {
            continue;
        }
        let len = ((n + 1) as f64).exp2();
        let (_, center) = mu_n.best_window_mass(len)?;
        candidates
            .push((format!("f_{n}"), test_family_fn(*n, ImaginaryInterval::new(center, len)?)?));
    }

    let lacunary: &[(TestFamilyKind, i32)] = match space {
        TargetSpace::LInfty | TargetSpace::Lp(_) => &[(TestFamilyKind::LInf { n_spacing: 8 }, 8)],
        TargetSpace::LPhi(_) => &[(TestFamilyKind::Exp { n_spacing: 2 }, 2)],
    };
    for &(kind, spacing) in lacunary {
        let exp_kind = !matches!(kind, TestFamilyKind::LInf { .. });
        for k in 0..spacing {
            let mut pairs = Vec::new();
            for (n, mu_n) in &strips {
                if (n - k).rem_euclid(spacing) != 0
                    || n.abs() > 400
                    || !fits((-n as f64).exp2())
                    || (exp_kind && *n < k)
                {
                    continue;
                }
                let m = (n - k).div_euclid(spacing);
                let len = ((n + 1) as f64).exp2();
                let (_, center) = mu_n.best_window_mass(len)?;
                pairs.push((m, ImaginaryInterval::new(center, len)?));
            }
            let worthwhile = if exp_kind {
                pairs.iter().any(|(m, _)| *m >= 1)
            } else {
                pairs.len() >= 2
            };
            if worthwhile {
                candidates.push((format!("g_{k} (spacing {spacing})"), test_family_gk(kind, k, &pairs)?));
            }
        }
    }
    let deterministic_count = candidates.len();

    if budget > 0 && !mu.is_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let atoms = mu.atoms();
        for i in 0..budget {
            let pick = atoms[rng.gen_range(0..atoms.len())];
            let base_span = (1.0 / pick.re).min(horizon.unwrap_or(f64::INFINITY));
            let signal = if rng.gen_bool(0.5) {
                let cells = 1usize << rng.gen_range(2..=5u32);
                let dt = base_span / cells as f64;
                let terms = (0..cells)
                    .map(|c| SumTerm {
                        coeff: Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU)),
                        a: c as f64 * dt,
                        b: (c + 1) as f64 * dt,
                        freq: pick.im,
                    })
                    .collect();
                InputSignal::Sum { terms }
            } else {
                let bursts = rng.gen_range(1..=4usize);
                let terms = (0..bursts)
                    .map(|_| {
                        let other = atoms[rng.gen_range(0..atoms.len())];
                        SumTerm {
                            coeff: Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU)),
                            a: 0.0,
                            b: base_span * rng.gen_range(0.2..1.0),
                            freq: other.im + rng.gen_range(-0.5..0.5) * other.re,
                        }
                    })
                    .collect();
                InputSignal::Sum { terms }
            };
            candidates.push((format!("random {i}"), signal));
        }
    }
    Ok((candidates, deterministic_count))
}

/// Strip-supported criterion for L^p → L^q: the single intensity
/// 𝒞_{q/p′}[μ] decides boundedness, with constants depending only on it
/// and on the ratio of the strip edges.
pub fn strip_embedding_check(
    mu: &DiscreteMeasure,
    p: f64,
    q: f64,
    chain: &ConstantChain,
) -> Result<EmbeddingEstimate> {
    if !(q >= 2.0) || !q.is_finite() {
        return Err(Error::domain(format!("strip criterion needs 2 ≤ q < ∞, got q = {q}")));
    }
    if !(p > 1.0) {
        return Err(Error::domain(format!("strip criterion needs 1 < p ≤ ∞, got p = {p}")));
    }
    let p_conj = if p.is_infinite() { 1.0 } else { p / (p - 1.0) };
    if p_conj > q + 1e-12 {
        return Err(Error::domain(format!(
            "strip criterion needs p′ ≤ q, got p′ = {p_conj} and q = {q}"
        )));
    }
    let space = if p.is_infinite() { TargetSpace::LInfty } else { TargetSpace::Lp(p) };
    let mut constants = base_constants(chain, q);
    if mu.is_empty() {
        return Ok(EmbeddingEstimate {
            q,
            space,
            lower_bound: 0.0,
            upper_bound: 0.0,
            functional_value: 0.0,
            decided_bounded: true,
            constants_used: constants,
            notes: vec!["the zero measure embeds trivially".to_string()],
        });
    }
    let a1 = mu.atoms().iter().map(|a| a.re).fold(f64::INFINITY, f64::min);
    let a2 = mu.atoms().iter().map(|a| a.re).fold(0.0, f64::max);
    constants.insert("alpha_ratio".to_string(), a2 / a1);
    let functional_value = mu.alpha_intensity(q / p_conj)?;
    let upper = embedding_upper_bound(mu, q, &space, chain)?;
    let lower = embedding_lower_bound(mu, q, &space, 0, 0, None)?;
    Ok(EmbeddingEstimate {
        q,
        space: space.clone(),
        lower_bound: lower.overall,
        upper_bound: upper.value,
        functional_value,
        decided_bounded: functional_value.is_finite(),
        constants_used: constants,
        notes: vec![
            format!("support lies in the strip {a1} ≤ Re z ≤ {a2}; comparison constants depend only on the intensity and on α₂/α₁ = {}", a2 / a1),
            format!("criterion: 𝒞_(q/p′)[μ] = {functional_value} with q/p′ = {}", q / p_conj),
            format!("estimates computed for {} inputs", space.label()),
        ],
    })
}

/// Finite-horizon criterion: split μ at Re z = 2^(−M) for
/// M = ⌊log₂ τ₀⌋, sum unit-weight strip intensities over n ≥ −M, and add
/// 𝒞_q of the near-axis core.
pub fn finite_time_check(
    mu: &DiscreteMeasure,
    q: f64,
    tau0: f64,
    chain: &ConstantChain,
) -> Result<EmbeddingEstimate> {
    if !(q >= 2.0) || !q.is_finite() {
        return Err(Error::domain(format!("finite-time criterion needs 2 ≤ q < ∞, got q = {q}")));
    }
    if !(tau0 > 0.0) || !tau0.is_finite() {
        return Err(Error::domain(format!("horizon must satisfy 0 < τ₀ < ∞, got {tau0}")));
    }
    let m = tau0.log2().floor() as i32;
    let report = mu.summability_functional(q, StripWeights::Unit, Some(m))?;
    let cut = (-m as f64).exp2();

    let far_records: Vec<crate::measure::AtomRecord> = mu
        .atoms()
        .iter()
        .filter(|a| a.re >= cut)
        .map(|a| crate::measure::AtomRecord { re: a.re, im: a.im, weight: a.weight })
        .collect();
    let far = DiscreteMeasure::from_records(&far_records)?;
    let upper_far = embedding_upper_bound(&far, q, &TargetSpace::LInfty, chain)?.value;
    // For supp u ⊆ (0, τ₀] with τ₀ ≤ 2^(M+1), the transform lies in
    // H²(ℂ_{+,−2^(−M)}) with ‖ℒu‖ ≤ 2^(M/2)·√(π(e⁴−1))·‖u‖_∞, and the
    // reproducing kernel gives |ℒu(z)| ≤ ‖ℒu‖·(4π(Re z + 2^(−M)))^(−1/2).
    let h2_constant = (std::f64::consts::PI * (4.0f64.exp() - 1.0)).sqrt();
    let near_parts: Vec<f64> = mu
        .atoms()
        .iter()
        .filter(|a| a.re <= cut)
        .map(|a| a.weight * (4.0 * std::f64::consts::PI * (a.re + cut)).powf(-q / 2.0))
        .collect();
    let upper_near = (m as f64 / 2.0).exp2() * h2_constant * pairwise_sum(&near_parts).powf(1.0 / q);
    let upper = (upper_far.powf(q) + upper_near.powf(q)).powf(1.0 / q);

    let lower = embedding_lower_bound(mu, q, &TargetSpace::LInfty, 0, 0, Some(tau0))?;

    let mut constants = base_constants(chain, q);
    constants.insert("M".to_string(), m as f64);
    constants.insert("tau0".to_string(), tau0);
    constants.insert("h2_window_constant".to_string(), h2_constant);
    Ok(EmbeddingEstimate {
        q,
        space: TargetSpace::LInfty,
        lower_bound: lower.overall,
        upper_bound: upper,
        functional_value: report.total,
        decided_bounded: report.total.is_finite(),
        constants_used: constants,
        notes: vec![
            format!("τ₀ = {tau0} sits in [2^{m}, 2^{}); strips n ≥ {} plus the core 𝒞_q[μ^{m}] = {}", m + 1, -m, report.core_term.unwrap_or(0.0)),
            "boundedness at one horizon τ > 0 implies it at every horizon; only the constant changes".to_string(),
            "atoms exactly on Re z = 2^(−M) are counted in both halves of the upper bound, which keeps it valid".to_string(),
        ],
    })
}

/// Exponential-Orlicz criterion at q = 2: weights n^(2/α) on the strip
/// intensities plus the unit-length window term. The Young function is
/// Φ_α(t) = exp(t^α) − t^α − 1 in the composed form the upper bound needs.
pub fn exp_orlicz_embedding_check(
    mu: &DiscreteMeasure,
    alpha: f64,
    chain: &ConstantChain,
) -> Result<EmbeddingEstimate> {
    if !(alpha >= 1.0) || !alpha.is_finite() {
        return Err(Error::domain(format!("exponential-Orlicz criterion needs α ≥ 1, got {alpha}")));
    }
    let q = 2.0;
    let weights = if (alpha - 1.0).abs() < 1e-12 {
        StripWeights::NSquared
    } else {
        StripWeights::NPow { exponent: 2.0 / alpha }
    };
    let report = mu.summability_functional(q, weights, None)?;
    let phi = if (alpha - 1.0).abs() < 1e-12 {
        YoungFunction::phi_exp_composed()
    } else {
        YoungFunction::Composed {
            inner: Box::new(YoungFunction::Composed {
                inner: Box::new(YoungFunction::ExpSqrt),
                power: alpha,
            }),
            power: 2.0,
        }
    };
    let space = TargetSpace::LPhi(phi);
    let upper = embedding_upper_bound(mu, q, &space, chain)?;
    let lower = embedding_lower_bound(mu, q, &space, 0, 0, Some(1.0))?;
    let mut constants = base_constants(chain, q);
    constants.insert("alpha".to_string(), alpha);
    Ok(EmbeddingEstimate {
        q,
        space,
        lower_bound: lower.overall,
        upper_bound: upper.value,
        functional_value: report.total,
        decided_bounded: report.total.is_finite(),
        constants_used: constants,
        notes: vec![
            format!(
                "functional: Σ_(n≥1) n^(2/α) 𝒞_2[μ_n] = {} plus window term sup_(|I|=2) μ(Q_I) = {}",
                report.total - report.window_term.unwrap_or(0.0),
                report.window_term.unwrap_or(0.0)
            ),
            "test signals live on (0, 1], matching the finite-time Orlicz statement".to_string(),
        ],
    })
}

/// ‖ℒ‖_{L^∞(0,τ) → L^q(μ)} ≤ ‖ℒ‖_{L^Φ → L^q(μ)} · ‖χ_(0,τ]‖_Φ, the
/// factorization that sends the finite-time norm to zero as τ → 0.
pub fn zero_class_bound(
    mu: &DiscreteMeasure,
    q: f64,
    phi: &YoungFunction,
    tau: f64,
    tau0: f64,
    chain: &ConstantChain,
) -> Result<f64> {
    if !(tau > 0.0) || !(tau <= tau0) || !tau0.is_finite() {
        return Err(Error::domain(format!(
            "zero-class bound needs 0 < τ ≤ τ₀ < ∞, got τ = {tau}, τ₀ = {tau0}"
        )));
    }
    let upper = embedding_upper_bound(mu, q, &TargetSpace::LPhi(phi.clone()), chain)?;
    let chi = InputSignal::indicator(0.0, tau)?;
    Ok(upper.value * luxemburg_norm(&chi, phi)?)
}
