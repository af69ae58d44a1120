//! Discrete measures on the open right half-plane and their Carleson data.
//!
//! A measure here is a finite sum of weighted point masses μ = Σ w_k δ_{z_k}
//! with Re z_k > 0. The module computes
//!
//! * masses of Carleson squares Q_I = { x + iy : iy ∈ I, 0 < x < |I| },
//!   where I ⊂ iℝ is an interval of the imaginary axis (the square is open
//!   in x on both sides and closed in y),
//! * the α-Carleson intensity 𝒞_α[μ] = sup_I μ(Q_I) / |I|^α, exactly,
//! * restrictions μ_n to the dyadic strips S_n = { 2^n ≤ Re z < 2^(n+1) }
//!   and horizontal shifts of a measure,
//! * the per-strip intensity tables and weighted summability functionals
//!   that the embedding and admissibility criteria consume.
//!
//! The intensity supremum is computed by a finite sweep. For a discrete
//! measure the map L ↦ (best mass of a square with side L) is a
//! nondecreasing step function that only jumps when L crosses the real part
//! of an atom (the atom becomes eligible for the open constraint Re z < L in
//! the limit L ↓ L*) or the imaginary span of a pair of atoms (a window of
//! width L first captures the pair; this one is attained since I is closed).
//! Between jumps the ratio decays like L^(−α), so the supremum is the
//! maximum over those critical lengths of
//!
//!   (max sliding-window mass among atoms with Re z ≤ L*) / L*^α ,
//!
//! where `Re z ≤ L*` encodes the limit of the open constraint. The sweep is
//! exact up to floating-point rounding.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::util::pairwise_sum;

/// One weighted point mass. `re > 0` is enforced on construction of the
/// surrounding measure; `weight > 0` (zero weights are dropped, negative
/// weights are rejected).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomRecord {
    pub re: f64,
    pub im: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub re: f64,
    pub im: f64,
    pub weight: f64,
}

/// Finite positive discrete measure on { Re z > 0 }.
///
/// Atoms are kept in canonical order (lexicographic by `(re, im)`) with
/// exact duplicates merged, so that every reduction over the atom list is
/// reproducible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<AtomRecord>", into = "Vec<AtomRecord>")]
pub struct DiscreteMeasure {
    atoms: Vec<Atom>,
}

impl TryFrom<Vec<AtomRecord>> for DiscreteMeasure {
    type Error = Error;

    fn try_from(records: Vec<AtomRecord>) -> Result<Self> {
        DiscreteMeasure::from_records(&records)
    }
}

impl From<DiscreteMeasure> for Vec<AtomRecord> {
    fn from(mu: DiscreteMeasure) -> Self {
        mu.atoms
            .iter()
            .map(|a| AtomRecord { re: a.re, im: a.im, weight: a.weight })
            .collect()
    }
}

/// Interval of the imaginary axis, identified by its (real-valued) center
/// and its length |I| > 0. The associated Carleson square is
/// Q_I = { x + iy : 0 < x < |I|, |y − center| ≤ |I|/2 }.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImaginaryInterval {
    pub center: f64,
    pub length: f64,
}

impl ImaginaryInterval {
    pub fn new(center: f64, length: f64) -> Result<Self> {
        if !center.is_finite() || !length.is_finite() || length <= 0.0 {
            return Err(Error::domain(format!(
                "imaginary interval needs finite center and length > 0, got center={center}, length={length}"
            )));
        }
        Ok(ImaginaryInterval { center, length })
    }
}

/// Dyadic strip index: S_n = { 2^n ≤ Re z < 2^(n+1) }.
pub fn strip_index(re: f64) -> i32 {
    debug_assert!(re > 0.0 && re.is_finite());
    let mut n = re.log2().floor() as i32;
    // log2 can misround next to a dyadic boundary; fix up with exact powers.
    while 2f64.powi(n) > re {
        n -= 1;
    }
    while 2f64.powi(n + 1) <= re {
        n += 1;
    }
    n
}

impl DiscreteMeasure {
    /// Validating constructor. Zero-weight atoms are dropped, exact
    /// positional duplicates are merged, atoms end up sorted by `(re, im)`.
    pub fn from_records(records: &[AtomRecord]) -> Result<Self> {
        let mut atoms = Vec::with_capacity(records.len());
        for (k, r) in records.iter().enumerate() {
            if !r.re.is_finite() || !r.im.is_finite() || !r.weight.is_finite() {
                return Err(Error::domain(format!("atom {k} has a non-finite field: {r:?}")));
            }
            if r.re <= 0.0 {
                return Err(Error::domain(format!(
                    "atom {k} lies outside the open right half-plane (re = {})",
                    r.re
                )));
            }
            if r.weight < 0.0 {
                return Err(Error::domain(format!("atom {k} has negative weight {}", r.weight)));
            }
            if r.weight > 0.0 {
                atoms.push(Atom { re: r.re, im: r.im, weight: r.weight });
            }
        }
        atoms.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
        atoms.dedup_by(|next, kept| {
            if next.re == kept.re && next.im == kept.im {
                kept.weight += next.weight;
                true
            } else {
                false
            }
        });
        Ok(DiscreteMeasure { atoms })
    }

    pub fn empty() -> Self {
        DiscreteMeasure { atoms: Vec::new() }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        let ws: Vec<f64> = self.atoms.iter().map(|a| a.weight).collect();
        pairwise_sum(&ws)
    }

    /// μ(Q_I): open in the real direction on both sides, closed in the
    /// imaginary direction.
    pub fn square_mass(&self, interval: ImaginaryInterval) -> f64 {
        let half = 0.5 * interval.length;
        let ws: Vec<f64> = self
            .atoms
            .iter()
            .filter(|a| {
                a.re > 0.0 && a.re < interval.length && (a.im - interval.center).abs() <= half
            })
            .map(|a| a.weight)
            .collect();
        pairwise_sum(&ws)
    }

    /// Best mass of a square with *fixed* side `length`, together with the
    /// center of a maximizing interval. Eligibility uses the genuine open
    /// constraint `re < length`.
    pub fn best_window_mass(&self, length: f64) -> Result<(f64, f64)> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::domain(format!("window length must be positive, got {length}")));
        }
        let mut eligible: Vec<(f64, f64)> = self
            .atoms
            .iter()
            .filter(|a| a.re < length)
            .map(|a| (a.im, a.weight))
            .collect();
        eligible.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(best_window(&eligible, length))
    }

    /// Exact α-Carleson intensity 𝒞_α[μ] together with the critical
    /// interval realizing it (in the limit sense explained in the module
    /// docs). Returns `(0, None)` for the zero measure.
    pub fn alpha_intensity_with_maximizer(&self, alpha: f64) -> Result<(f64, Option<ImaginaryInterval>)> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::domain(format!("intensity exponent must be positive, got {alpha}")));
        }
        if self.atoms.is_empty() {
            return Ok((0.0, None));
        }

        let mut by_im: Vec<(f64, f64, f64)> = // (im, re, weight), sorted by im
            self.atoms.iter().map(|a| (a.im, a.re, a.weight)).collect();
        by_im.sort_by(|a, b| a.partial_cmp(b).unwrap());

        let mut candidates: Vec<f64> = self.atoms.iter().map(|a| a.re).collect();
        for i in 0..by_im.len() {
            for j in (i + 1)..by_im.len() {
                let span = by_im[j].0 - by_im[i].0;
                if span > 0.0 {
                    candidates.push(span);
                }
            }
        }
        candidates.sort_by(|a, b| a.partial_cmp(b).unwrap());
        candidates.dedup();

        let total = self.total_mass();
        let mut best = 0.0f64;
        let mut best_interval = None;
        for &len in &candidates {
            // All later candidates are longer; once even full mass cannot
            // beat the incumbent, the sweep is done.
            if total / len.powf(alpha) <= best {
                break;
            }
            let eligible: Vec<(f64, f64)> = by_im
                .iter()
                .filter(|&&(_, re, _)| re <= len)
                .map(|&(im, _, w)| (im, w))
                .collect();
            let (mass, center) = best_window(&eligible, len);
            let value = mass / len.powf(alpha);
            if value > best {
                best = value;
                best_interval = Some(ImaginaryInterval { center, length: len });
            }
        }
        Ok((best, best_interval))
    }

    /// 𝒞_α[μ] = sup_I μ(Q_I)/|I|^α.
    pub fn alpha_intensity(&self, alpha: f64) -> Result<f64> {
        Ok(self.alpha_intensity_with_maximizer(alpha)?.0)
    }

    /// Restriction μ_n of the measure to the dyadic strip S_n.
    pub fn strip_restrict(&self, n: i32) -> DiscreteMeasure {
        let lo = 2f64.powi(n);
        let hi = 2f64.powi(n + 1);
        DiscreteMeasure {
            atoms: self.atoms.iter().filter(|a| a.re >= lo && a.re < hi).copied().collect(),
        }
    }

    /// All nonempty strip restrictions, keyed by strip index.
    pub fn strips(&self) -> BTreeMap<i32, DiscreteMeasure> {
        let mut map: BTreeMap<i32, Vec<Atom>> = BTreeMap::new();
        for a in &self.atoms {
            map.entry(strip_index(a.re)).or_default().push(*a);
        }
        map.into_iter().map(|(n, atoms)| (n, DiscreteMeasure { atoms })).collect()
    }

    /// Horizontal shift: every atom moves from `re` to `re − h`. Fails if
    /// any atom would leave the open right half-plane.
    pub fn shift(&self, h: f64) -> Result<DiscreteMeasure> {
        if !h.is_finite() {
            return Err(Error::domain(format!("shift must be finite, got {h}")));
        }
        let mut atoms = Vec::with_capacity(self.atoms.len());
        for (k, a) in self.atoms.iter().enumerate() {
            let re = a.re - h;
            if re <= 0.0 {
                return Err(Error::domain(format!(
                    "shift by {h} pushes atom {k} (re = {}) out of the open half-plane",
                    a.re
                )));
            }
            atoms.push(Atom { re, ..*a });
        }
        atoms.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
        Ok(DiscreteMeasure { atoms })
    }

    /// Per-strip intensity table { n ↦ 𝒞_α[μ_n] } plus the intensity of the
    /// whole measure. Strips are evaluated in parallel and reassembled in
    /// index order, so the result does not depend on the thread count.
    pub fn intensity_table(&self, alpha: f64) -> Result<IntensityTable> {
        let strips: Vec<(i32, DiscreteMeasure)> = self.strips().into_iter().collect();
        let entries: Vec<(i32, f64)> = strips
            .par_iter()
            .map(|(n, mu)| mu.alpha_intensity(alpha).map(|v| (*n, v)))
            .collect::<Result<_>>()?;
        Ok(IntensityTable {
            alpha,
            entries: entries.into_iter().collect(),
            total: self.alpha_intensity(alpha)?,
        })
    }

    /// Weighted strip-summability functional; the quantity the embedding
    /// and admissibility criteria compare against ∞.
    ///
    /// * `Unit` weights without `finite_time` sum 𝒞_q[μ_n] over every
    ///   nonempty strip.
    /// * `Unit` with `finite_time = Some(M)` sums over n ≥ −M and adds the
    ///   core term 𝒞_q[μ^M], where μ^M is the restriction to
    ///   { 0 < Re z ≤ 2^(−M) }.
    /// * `NSquared` / `NPow` sum weight(n)·𝒞_q[μ_n] over n ≥ 1 and add the
    ///   boundary window term sup_{|I| = 2} μ(Q_I); they reject a
    ///   `finite_time` index since the window term already plays that role.
    pub fn summability_functional(
        &self,
        q: f64,
        weights: StripWeights,
        finite_time: Option<i32>,
    ) -> Result<SummabilityReport> {
        if !(q >= 1.0) || !q.is_finite() {
            return Err(Error::domain(format!("summability exponent q must satisfy q ≥ 1, got {q}")));
        }
        if finite_time.is_some() && !matches!(weights, StripWeights::Unit) {
            return Err(Error::domain(
                "finite-time truncation only combines with unit weights; the weighted variants carry their own window term".to_string(),
            ));
        }

        let mut terms = BTreeMap::new();
        for (n, mu_n) in self.strips() {
            let keep = match (&weights, finite_time) {
                (StripWeights::Unit, None) => true,
                (StripWeights::Unit, Some(m)) => n >= -m,
                (_, _) => n >= 1,
            };
            if !keep {
                continue;
            }
            let weight = weights.weight(n);
            let intensity = mu_n.alpha_intensity(q)?;
            terms.insert(n, StripTerm { intensity, weight, weighted: weight * intensity });
        }

        let window_term = match weights {
            StripWeights::Unit => None,
            _ => Some(self.best_window_mass(2.0)?.0),
        };
        let core_term = match finite_time {
            None => None,
            Some(m) => {
                let cut = 2f64.powi(-m);
                let core = DiscreteMeasure {
                    atoms: self.atoms.iter().filter(|a| a.re <= cut).copied().collect(),
                };
                Some(core.alpha_intensity(q)?)
            }
        };

        let mut parts: Vec<f64> = terms.values().map(|t| t.weighted).collect();
        parts.extend(window_term);
        parts.extend(core_term);
        let total = pairwise_sum(&parts);
        Ok(SummabilityReport { q, weights, finite_time, terms, window_term, core_term, total })
    }
}

/// Max sliding-window mass over a list of `(im, weight)` pairs that must be
/// sorted by `im`; the window is closed of width `length`. Returns the mass
/// and the center of a maximizing window.
fn best_window(sorted: &[(f64, f64)], length: f64) -> (f64, f64) {
    if sorted.is_empty() {
        return (0.0, 0.0);
    }
    let mut best = 0.0f64;
    let mut best_i = 0usize;
    let mut mass = 0.0f64;
    let mut j = 0usize;
    for i in 0..sorted.len() {
        if j < i {
            j = i;
            mass = 0.0;
        }
        while j < sorted.len() && sorted[j].0 <= sorted[i].0 + length {
            mass += sorted[j].1;
            j += 1;
        }
        if mass > best {
            best = mass;
            best_i = i;
        }
        mass -= sorted[i].1;
    }
    // Running subtraction accumulates rounding; recompute the winner exactly,
    // using the same window bounds the sweep tested so no atom drifts out.
    let lo = sorted[best_i].0;
    let hi = lo + length;
    let ws: Vec<f64> =
        sorted.iter().filter(|&&(im, _)| im >= lo && im <= hi).map(|&(_, w)| w).collect();
    (pairwise_sum(&ws), lo + 0.5 * length)
}

/// Weight profile of the summability functional.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StripWeights {
    /// weight(n) = 1
    Unit,
    /// weight(n) = n²
    NSquared,
    /// weight(n) = n^exponent (the exp-α criteria use exponent = 2/α)
    NPow { exponent: f64 },
}

impl StripWeights {
    pub fn weight(&self, n: i32) -> f64 {
        match self {
            StripWeights::Unit => 1.0,
            StripWeights::NSquared => (n as f64) * (n as f64),
            StripWeights::NPow { exponent } => (n as f64).powf(*exponent),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StripTerm {
    pub intensity: f64,
    pub weight: f64,
    pub weighted: f64,
}

/// Per-strip breakdown of a summability functional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummabilityReport {
    pub q: f64,
    pub weights: StripWeights,
    pub finite_time: Option<i32>,
    pub terms: BTreeMap<i32, StripTerm>,
    /// sup_{|I| = 2} μ(Q_I) for the weighted variants.
    pub window_term: Option<f64>,
    /// 𝒞_q of the restriction to { Re z ≤ 2^(−M) } for finite time.
    pub core_term: Option<f64>,
    pub total: f64,
}

/// Per-strip intensity table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntensityTable {
    pub alpha: f64,
    pub entries: BTreeMap<i32, f64>,
    /// 𝒞_α of the full measure (not the sum of the entries).
    pub total: f64,
}
