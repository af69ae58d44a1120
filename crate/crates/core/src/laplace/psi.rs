//! Quadrature of the Ψ-integral that appears in the finite-time
//! exponential-Orlicz necessity argument,
//!
//! ```text
//!   J(B, n) = 4 ∫_{1/2}^{2^n/(Bn²)} (ln 2s)² · 2^(−n) · ln(2^(n+1)/(Bn²s)) ds,
//! ```
//!
//! evaluated verbatim so its n → ∞ behaviour can be inspected rather than
//! assumed. Writing A = 2^n/(Bn²) and L = ln 2A, the antiderivative gives
//!
//!   J = 4·2^(−n)·( A[(1+ln2)L² − (4+2ln2)L + (6+2ln2)] − (L+ln2) − 3 ),
//!
//! which the tests freeze as an independent oracle; the leading term shows
//! J → 4(ln2)²(1+ln2)/B.

use crate::error::{Error, Result};
use crate::quad;

pub fn psi_integral_limit_check(b: f64, n: i32) -> Result<f64> {
    if n < 4 {
        return Err(Error::domain(format!("the Ψ-integral check needs n ≥ 4, got n = {n}")));
    }
    if !(b > 0.0) || !b.is_finite() {
        return Err(Error::domain(format!("the Ψ-integral check needs 0 < B < ∞, got B = {b}")));
    }
    let two_n = (n as f64).exp2();
    let nn = (n as f64) * (n as f64);
    // 2^n e^(−2^n)/(Bn²) < 1/2 keeps the discarded inner region negligible.
    let residue = two_n * (-two_n).exp() / (b * nn);
    if !(residue < 0.5) {
        return Err(Error::domain(format!(
            "precondition 2^n e^(−2^n)/(Bn²) < 1/2 fails: got {residue}"
        )));
    }
    let upper = two_n / (b * nn);
    if upper <= 0.5 {
        return Ok(0.0);
    }
    let scale = 2.0 * upper / b;
    let integrand = |s: f64| {
        let l = (2.0 * s).ln();
        l * l * (2.0 * upper / s).ln()
    };
    let (v, _) = quad::adaptive(integrand, 0.5, upper, (1e-13 * scale).max(1e-300), 1e-13);
    Ok(4.0 / two_n * v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    /// Exact value of J(B, n) from the antiderivative.
    fn closed_form(b: f64, n: i32) -> f64 {
        let two_n = (n as f64).exp2();
        let a = two_n / (b * (n as f64) * (n as f64));
        let l = (2.0 * a).ln();
        let bracket = (1.0 + LN_2) * l * l - (4.0 + 2.0 * LN_2) * l + (6.0 + 2.0 * LN_2);
        4.0 / two_n * (a * bracket - (l + LN_2) - 3.0)
    }

    #[test]
    fn quadrature_matches_the_antiderivative() {
        for &(b, n) in &[(10.0, 10), (10.0, 15), (10.0, 20), (20.0, 20), (7.5, 12)] {
            let got = psi_integral_limit_check(b, n).unwrap();
            let want = closed_form(b, n);
            assert!(
                (got - want).abs() <= 1e-10 * want.abs().max(1.0),
                "B={b}, n={n}: quadrature {got} vs antiderivative {want}"
            );
        }
    }

    #[test]
    fn approaches_the_leading_term() {
        // J(B, n) → 4(ln2)²(1+ln2)/B; distances shrink monotonically.
        let b = 10.0;
        let limit = 4.0 * LN_2 * LN_2 * (1.0 + LN_2) / b;
        let dist: Vec<f64> = [10, 15, 20, 30]
            .iter()
            .map(|&n| (psi_integral_limit_check(b, n).unwrap() - limit).abs())
            .collect();
        for w in dist.windows(2) {
            assert!(w[1] < w[0], "distances to the limit must decrease: {dist:?}");
        }
    }

    #[test]
    fn scales_like_one_over_b_in_the_limit() {
        // At finite n the ratio J(10,n)/J(20,n) still carries log(B)
        // corrections; it decreases toward 2 as n grows.
        let r20 = psi_integral_limit_check(10.0, 20).unwrap() / psi_integral_limit_check(20.0, 20).unwrap();
        let r40 = psi_integral_limit_check(10.0, 40).unwrap() / psi_integral_limit_check(20.0, 40).unwrap();
        assert!(r20 > r40 && r40 > 2.0, "r20 = {r20}, r40 = {r40}");
        assert!(r40 < 2.2);
    }

    #[test]
    fn degenerate_and_invalid_inputs() {
        // Upper limit ≤ 1/2 leaves an empty range.
        assert_eq!(psi_integral_limit_check(100.0, 4).unwrap(), 0.0);
        assert!(psi_integral_limit_check(10.0, 3).is_err());
        assert!(psi_integral_limit_check(0.0, 10).is_err());
        assert!(psi_integral_limit_check(f64::NAN, 10).is_err());
    }
}
