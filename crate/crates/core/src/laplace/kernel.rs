//! Reproducing kernels of H² on the right half-plane.
//!
//! k_λ(t) = (1/2π)·e^(−λ̄t) transforms to K_λ(z) = 1/(2π(z + λ̄)), the
//! reproducing kernel at λ: F(λ) = ∫_ℝ F(iy)·conj(K_λ(iy)) dy for F in H²,
//! with the boundary measure plain dy.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::measure::ImaginaryInterval;
use crate::quad;
use crate::signal::InputSignal;

use super::{endpoint_terms, laplace};

/// The kernel as a time-domain signal, k_λ(t) = (1/2π)·e^(−λ̄t).
pub fn kernel_signal(lambda: Complex64) -> Result<InputSignal> {
    if !(lambda.re > 0.0) || !lambda.is_finite() {
        return Err(Error::domain(format!(
            "kernel parameter needs Re λ > 0, got λ = {} + {}i",
            lambda.re, lambda.im
        )));
    }
    InputSignal::exp_decay(Complex64::new(0.5 / PI, 0.0), lambda.conj())
}

/// K_λ(z) = 1/(2π(z + λ̄)) in closed form.
pub fn kernel_transform(lambda: Complex64, z: Complex64) -> Complex64 {
    1.0 / (2.0 * PI * (z + lambda.conj()))
}

/// ‖k_λ‖_{L^p} = (1/(p(2π)^p Re λ))^(1/p).
pub fn kernel_norm(lambda: Complex64, p: f64) -> Result<f64> {
    if !(lambda.re > 0.0) || !lambda.is_finite() {
        return Err(Error::domain(format!(
            "kernel norm needs Re λ > 0, got λ = {} + {}i",
            lambda.re, lambda.im
        )));
    }
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::domain(format!("kernel norm needs 1 ≤ p < ∞, got p = {p}")));
    }
    Ok((1.0 / (p * (2.0 * PI).powf(p) * lambda.re)).powf(1.0 / p))
}

/// The two-sided bound 1/(√10·π|I|) ≤ |K_λ(z)| ≤ 1/(π|I|) valid on Q_I
/// when λ is the centre of the square, so Re λ = |I|/2 and Im λ = centre
/// of I.
pub fn kernel_square_bounds(interval: ImaginaryInterval) -> (f64, f64) {
    let l = interval.length;
    (1.0 / (10f64.sqrt() * PI * l), 1.0 / (PI * l))
}

/// Outcome of sampling the square bound over a grid in Q_I.
#[derive(Debug, Clone)]
pub struct KernelSquareCheck {
    pub lo: f64,
    pub hi: f64,
    pub samples: usize,
    pub violations: usize,
    /// Smallest and largest |K_λ(z)| seen over the grid.
    pub observed: (f64, f64),
}

/// Samples |K_λ(z)| over an `nx` × `ny` grid in Q_I (interior in x, closed
/// in y) with λ at the centre of the square, and counts violations of the
/// two-sided bound.
pub fn kernel_square_check(
    interval: ImaginaryInterval,
    nx: usize,
    ny: usize,
) -> Result<KernelSquareCheck> {
    if nx < 1 || ny < 2 {
        return Err(Error::domain("kernel square check needs nx ≥ 1, ny ≥ 2".to_string()));
    }
    let l = interval.length;
    let lambda = Complex64::new(0.5 * l, interval.center);
    let (lo, hi) = kernel_square_bounds(interval);
    let mut violations = 0usize;
    let mut observed = (f64::INFINITY, 0.0f64);
    for i in 0..nx {
        let x = l * (i as f64 + 0.5) / nx as f64;
        for j in 0..ny {
            let y = interval.center - 0.5 * l + l * j as f64 / (ny - 1) as f64;
            let v = kernel_transform(lambda, Complex64::new(x, y)).norm();
            observed.0 = observed.0.min(v);
            observed.1 = observed.1.max(v);
            if v < lo - 1e-15 || v > hi + 1e-15 {
                violations += 1;
            }
        }
    }
    Ok(KernelSquareCheck { lo, hi, samples: nx * ny, violations, observed })
}

/// |F(λ) − ∫_ℝ F(iy)·conj(K_λ(iy)) dy| for F = ℒf.
///
/// The boundary integral is evaluated by adaptive quadrature on a window
/// [−Y, Y] chosen from the endpoint decomposition of F, and the two tails
/// are restored analytically: the non-oscillating endpoint terms (s = 0)
/// via the substitution u = 1/y, which maps both tails onto one smooth
/// bounded integral, and the oscillating ones (s > 0) by second-order
/// integration by parts, whose remainder is of order 1/(s²Y³) and sets Y.
pub fn reproducing_residual(f: &InputSignal, lambda: Complex64) -> Result<f64> {
    if !(lambda.re > 0.0) || !lambda.is_finite() {
        return Err(Error::domain(format!(
            "reproducing formula needs Re λ > 0, got λ = {} + {}i",
            lambda.re, lambda.im
        )));
    }
    let direct = laplace(f, lambda)?;
    let terms = endpoint_terms(f);
    if terms.is_empty() {
        return Ok(direct.norm());
    }
    let c0 = terms.iter().map(|t| t.eta.im.abs()).fold(lambda.im.abs(), f64::max);
    let s_min = terms.iter().map(|t| t.s).filter(|&s| s > 1e-12).fold(f64::INFINITY, f64::min);
    let d_osc: f64 =
        terms.iter().filter(|t| t.s > 1e-12).map(|t| t.d.norm()).sum::<f64>() / (2.0 * PI);
    let mut y_cut = 2.0 * (c0 + 1.0);
    if d_osc > 0.0 {
        let target = (1e-10_f64).max(1e-9 * direct.norm());
        y_cut = y_cut.max((24.0 * d_osc / (s_min * s_min * target)).cbrt()).min(1e5);
    }

    let integrand = |y: f64| -> Complex64 {
        let iy = Complex64::new(0.0, y);
        let fv = laplace(f, iy).expect("boundary transform of an admissible signal");
        fv * kernel_transform(lambda, iy).conj()
    };
    let tol = (1e-13 * direct.norm()).max(1e-15);
    let mut integral = Complex64::new(0.0, 0.0);
    let mid = 2.0 * (c0 + 1.0);
    for (a, b) in [(-y_cut, -mid), (-mid, mid), (mid, y_cut)] {
        if b <= a {
            continue;
        }
        let (re, _) = quad::adaptive(|y| integrand(y).re, a, b, tol, 1e-13);
        let (im, _) = quad::adaptive(|y| integrand(y).im, a, b, tol, 1e-13);
        integral += Complex64::new(re, im);
    }

    // Tails beyond ±Y, term by term: the integrand there is
    // Σ_j d_j e^(−iys_j) h_j(y)/(2π) with h_j(y) = 1/((iy − η_j)(λ − iy)).
    let h = |eta: Complex64, y: f64| -> Complex64 {
        1.0 / ((Complex64::new(0.0, y) - eta) * (lambda - Complex64::new(0.0, y)))
    };
    let h_prime = |eta: Complex64, y: f64| -> Complex64 {
        let a = Complex64::new(0.0, y) - eta;
        let b = lambda - Complex64::new(0.0, y);
        -Complex64::i() * (b - a) / (a * a * b * b)
    };
    for t in &terms {
        let d = t.d / (2.0 * PI);
        if t.s > 1e-12 {
            // ∫_Y^∞ h e^(−iys) dy = e^(−iYs)(h(Y)/(is) + h′(Y)/(is)²) + O(s⁻²Y⁻³),
            // and the mirror expression at −Y.
            let is = Complex64::new(0.0, t.s);
            let up = (-Complex64::i() * y_cut * t.s).exp()
                * (h(t.eta, y_cut) / is + h_prime(t.eta, y_cut) / (is * is));
            let lo = (Complex64::i() * y_cut * t.s).exp()
                * (-h(t.eta, -y_cut) / is - h_prime(t.eta, -y_cut) / (is * is));
            integral += d * (up + lo);
        } else {
            // u = 1/y maps both tails onto (−1/Y, 1/Y):
            //   ∫_{|y|>Y} h(y) dy = ∫ du/((i − ηu)(λu − i)).
            let eta = t.eta;
            let g = |u: f64| -> Complex64 {
                1.0 / ((Complex64::i() - eta * u) * (lambda * u - Complex64::i()))
            };
            let (re, _) = quad::adaptive(|u| g(u).re, -1.0 / y_cut, 1.0 / y_cut, 1e-15, 1e-13);
            let (im, _) = quad::adaptive(|u| g(u).im, -1.0 / y_cut, 1.0 / y_cut, 1e-15, 1e-13);
            integral += d * Complex64::new(re, im);
        }
    }
    Ok((direct - integral).norm())
}
