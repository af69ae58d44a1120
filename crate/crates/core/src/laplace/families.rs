//! The explicit test families behind the necessity arguments: modulated
//! indicators f_n adapted to an interval of length 2^(n+1), and their
//! lacunary combinations g_k spread over an arithmetic progression of
//! indices with spacing N.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::measure::ImaginaryInterval;
use crate::signal::{InputSignal, SumTerm};

/// Coefficient pattern for the combined family g_k = Σ_m a_m f_{mN+k}.
///
/// `LInf` uses unit coefficients (the L^∞ → L^q necessity argument),
/// `Exp` uses a_m = (ln 2)·m and `ExpAlpha` uses a_m = (ln 2)^(1/α)·m^(1/α),
/// both chosen so the exponential modular of g_k stays at most 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TestFamilyKind {
    LInf { n_spacing: u32 },
    Exp { n_spacing: u32 },
    ExpAlpha { n_spacing: u32, alpha: f64 },
}

/// Sharp constant in the Step 1 lower bound |F_n(z)| ≥ c·2^(−n) on the
/// right half of the Carleson square: c = e^(−2)·cos(1)/2.
pub(crate) const STEP_ONE_CONSTANT: f64 = 0.036569647175206335;

impl TestFamilyKind {
    pub fn n_spacing(&self) -> u32 {
        match *self {
            TestFamilyKind::LInf { n_spacing }
            | TestFamilyKind::Exp { n_spacing }
            | TestFamilyKind::ExpAlpha { n_spacing, .. } => n_spacing,
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            TestFamilyKind::LInf { n_spacing } => {
                // Separation needs Σ_{m≠n} |F_{mN+k}| ≤ ½|F_{nN+k}|, which
                // the decay estimate delivers once 2^(3−N) ≤ e^(−2)cos(1)/2.
                let needed = (3.0 - STEP_ONE_CONSTANT.log2()).ceil() as u32;
                if n_spacing < needed {
                    return Err(Error::domain(format!(
                        "index spacing N = {n_spacing} is too small for the unit-coefficient family; the separation condition 2^(3−N) ≤ e⁻²cos(1)/2 needs N ≥ {needed}"
                    )));
                }
            }
            TestFamilyKind::Exp { n_spacing } => {
                if n_spacing < 2 {
                    return Err(Error::domain(format!(
                        "index spacing N = {n_spacing} is too small for the exponential family; the modular certificate needs N ≥ 2"
                    )));
                }
            }
            TestFamilyKind::ExpAlpha { n_spacing, alpha } => {
                if n_spacing < 2 {
                    return Err(Error::domain(format!(
                        "index spacing N = {n_spacing} is too small for the exponential family; the modular certificate needs N ≥ 2"
                    )));
                }
                if !(alpha >= 1.0) || !alpha.is_finite() {
                    return Err(Error::domain(format!("exp-alpha family needs α ≥ 1, got {alpha}")));
                }
            }
        }
        Ok(())
    }

    fn coefficient(&self, m: i32) -> f64 {
        let ln2 = std::f64::consts::LN_2;
        match *self {
            TestFamilyKind::LInf { .. } => 1.0,
            TestFamilyKind::Exp { .. } => ln2 * m as f64,
            TestFamilyKind::ExpAlpha { alpha, .. } => {
                ln2.powf(1.0 / alpha) * (m as f64).powf(1.0 / alpha)
            }
        }
    }

    fn requires_nonnegative_m(&self) -> bool {
        !matches!(self, TestFamilyKind::LInf { .. })
    }
}

fn check_interval_length(n: i32, interval: &ImaginaryInterval) -> Result<()> {
    if n.abs() > 500 {
        return Err(Error::domain(format!(
            "family index n = {n} is outside the representable range |n| ≤ 500"
        )));
    }
    let want = ((n + 1) as f64).exp2();
    if (interval.length - want).abs() > 1e-9 * want {
        return Err(Error::domain(format!(
            "interval length {} does not match 2^(n+1) = {want} for index n = {n}",
            interval.length
        )));
    }
    Ok(())
}

/// f_n(t) = χ_((2^(−n−1), 2^(−n)])(t)·e^(i·c_n·t) with c_n the centre of
/// the interval I_n, which must have length 2^(n+1).
pub fn test_family_fn(n: i32, interval: ImaginaryInterval) -> Result<InputSignal> {
    check_interval_length(n, &interval)?;
    let a = (-(n + 1) as f64).exp2();
    let b = (-n as f64).exp2();
    InputSignal::modulated(a, b, interval.center)
}

/// g_k = Σ_m a_m f_{mN+k} for the supplied truncation, given as pairs
/// (m, I_{mN+k}). Index offsets k run through 0..N and the m values must
/// be distinct (nonnegative for the exponential kinds). For those kinds
/// the construction also re-checks the modular certificate
/// Σ_m 2^(m−(k+mN+1)) ≤ 1 on the supplied terms.
pub fn test_family_gk(
    kind: TestFamilyKind,
    k: i32,
    intervals: &[(i32, ImaginaryInterval)],
) -> Result<InputSignal> {
    kind.validate()?;
    let n_spacing = kind.n_spacing() as i32;
    if k < 0 || k >= n_spacing {
        return Err(Error::domain(format!(
            "offset k = {k} must satisfy 0 ≤ k < N = {n_spacing}"
        )));
    }
    let mut seen = std::collections::BTreeSet::new();
    let mut terms = Vec::with_capacity(intervals.len());
    let mut certificate = 0.0f64;
    for &(m, interval) in intervals {
        if !seen.insert(m) {
            return Err(Error::domain(format!("duplicate summation index m = {m}")));
        }
        if m < 0 && kind.requires_nonnegative_m() {
            return Err(Error::domain(format!(
                "the exponential families sum over m ≥ 0, got m = {m}"
            )));
        }
        let n = m
            .checked_mul(n_spacing)
            .and_then(|v| v.checked_add(k))
            .ok_or_else(|| Error::domain(format!("index m·N + k overflows for m = {m}")))?;
        check_interval_length(n, &interval)?;
        if kind.requires_nonnegative_m() {
            certificate += ((m - n - 1) as f64).exp2();
        }
        let coeff = kind.coefficient(m);
        if coeff == 0.0 {
            continue;
        }
        terms.push(SumTerm {
            coeff: Complex64::new(coeff, 0.0),
            a: (-(n + 1) as f64).exp2(),
            b: (-n as f64).exp2(),
            freq: interval.center,
        });
    }
    if certificate > 1.0 + 1e-12 {
        return Err(Error::construction(format!(
            "modular certificate Σ 2^(m−(k+mN+1)) = {certificate} exceeds 1"
        )));
    }
    let signal = InputSignal::Sum { terms };
    signal.validate()?;
    Ok(signal)
}
