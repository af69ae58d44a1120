//! Hardy-space norms on shifted half-planes,
//!
//! ```text
//!   ‖F‖_{H^p(ℂ_{+,α})}^p = sup_{ε>0} ∫_ℝ |F(α + ε + iy)|^p dy,
//! ```
//!
//! estimated for F = ℒf by boundary-line quadrature over a truncated
//! y-window, the sup taken over a decreasing ε grid. What the truncation
//! discards is controlled explicitly: for p = 2 the diagonal part of the
//! tail is restored in closed form (arctangent integrals of the endpoint
//! decomposition) and only the oscillating cross terms remain, bounded by
//! integration by parts; for other p an envelope bound on |F| is
//! integrated. The achieved bound travels with the estimate.

use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::quad;
use crate::signal::InputSignal;

use super::{endpoint_terms, laplace, EndpointTerm};

#[derive(Debug, Clone)]
pub struct HardyNormEstimate {
    pub p: f64,
    pub shift: f64,
    /// sup over the ε grid of ∫ |F(shift + ε + iy)|^p dy, i.e. the p-th
    /// power of the Hardy norm on ℂ_{+,shift}.
    pub value: f64,
    pub epsilon_grid: Vec<f64>,
    /// Upper bound on what the truncation may have missed at the
    /// maximizing ε (cross-term or envelope tail plus quadrature slack).
    pub tail_bound: f64,
    pub y_cut: f64,
}

fn diag_tail(terms: &[EndpointTerm], x0: f64, y: f64) -> f64 {
    let mut sum = 0.0;
    for t in terms {
        let d2 = t.d.norm_sqr() * (-2.0 * x0 * t.s).exp();
        let r = (x0 - t.eta.re).abs();
        let m = t.eta.im;
        let side = |edge: f64| -> f64 {
            if r > 1e-300 {
                (FRAC_PI_2 - ((edge) / r).atan()) / r
            } else {
                1.0 / edge
            }
        };
        sum += d2 * (side(y - m) + side(y + m));
    }
    sum
}

fn cross_bound(terms: &[EndpointTerm], x0: f64, c0: f64, y: f64) -> f64 {
    let gap = y - c0;
    let mut sum = 0.0;
    for (j, tj) in terms.iter().enumerate() {
        for tk in terms.iter().skip(j + 1) {
            let d = tj.d.norm() * tk.d.norm() * (-x0 * (tj.s + tk.s)).exp();
            let omega = (tj.s - tk.s).abs();
            sum += if omega <= 1e-12 {
                4.0 * d / gap
            } else {
                8.0 * d / (omega * gap * gap)
            };
        }
    }
    sum
}

/// Boundary jumps of the signal, one per breakpoint. The endpoint
/// decomposition is sorted by s and the weights at a fixed s sum to
/// f(s⁺) − f(s⁻).
fn jump_amplitudes(terms: &[EndpointTerm]) -> Vec<(f64, f64)> {
    let mut grouped: Vec<(f64, Complex64)> = Vec::new();
    for t in terms {
        match grouped.last_mut() {
            Some((s, acc)) if *s == t.s => *acc += t.d,
            _ => grouped.push((t.s, t.d)),
        }
    }
    grouped.into_iter().map(|(s, z)| (s, z.norm())).collect()
}

pub fn hardy_norm(f: &InputSignal, p: f64, shift: f64) -> Result<HardyNormEstimate> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::domain(format!("Hardy norm needs 1 ≤ p < ∞, got p = {p}")));
    }
    let epsilon_grid = vec![1.0, 1.0 / 32.0, 1.0 / 1024.0, 0.0];
    let terms = endpoint_terms(f);
    if terms.is_empty() {
        return Ok(HardyNormEstimate {
            p,
            shift,
            value: 0.0,
            epsilon_grid,
            tail_bound: 0.0,
            y_cut: 0.0,
        });
    }
    let c0 = terms.iter().map(|t| t.eta.im.abs()).fold(0.0, f64::max);
    let max_s = terms.iter().map(|t| t.s).fold(0.0, f64::max);
    let scale: f64 = terms.iter().map(|t| t.d.norm()).sum();

    // Endpoint masses (s, |d′|) of the derivative, used for the p = 1
    // envelope |ℒf(z)| = |ℒf′(z)|/|z| ≤ Σ|d′_j|e^(−x0·s_j)/|z|.
    let mut deriv_masses: Vec<(f64, f64)> = Vec::new();
    if (p - 1.0).abs() < 1e-12 {
        let jumps = jump_amplitudes(&terms);
        if let Some((s, j)) = jumps.iter().find(|(_, j)| *j > 1e-10 * scale.max(1.0)) {
            return Err(Error::unbounded(format!(
                "H¹ boundary trace is not integrable: the signal jumps by {j:.3e} at t = {s}, so |ℒf| decays only like 1/|y|"
            )));
        }
        for piece in f.pieces() {
            for &(c, eta) in &piece.terms {
                deriv_masses.push((piece.a, (c * eta * (eta * piece.a).exp()).norm()));
                if piece.b.is_finite() {
                    deriv_masses.push((piece.b, (c * eta * (eta * piece.b).exp()).norm()));
                }
            }
        }
    }
    let w1_at = |x0: f64| -> f64 { deriv_masses.iter().map(|&(s, m)| m * (-x0 * s).exp()).sum() };

    let mid = 2.0 * (c0 + 1.0);
    let coarse_y = 2.0 * mid + 16.0;
    let probe = |x0: f64, y: f64| -> Result<f64> {
        Ok(laplace(f, Complex64::new(x0, y))?.norm().powf(p))
    };
    // Make sure the transform exists on the smallest line before quadrature.
    probe(shift, 0.0)?;
    let (i_est, _) = {
        let g = |y: f64| probe(shift, y).unwrap_or(0.0);
        quad::adaptive(g, -coarse_y, coarse_y, 1e-6, 1e-6)
    };
    let i_floor = i_est.abs().max(1e-12);

    let y_cut = if max_s > 1e-12 {
        // Oscillatory boundary trace: keep the window resolvable and rely
        // on closed-form or by-parts tails.
        (mid + 6.0e3 / max_s).min(1e6)
    } else if (p - 1.0).abs() < 1e-12 {
        (c0 + 2.0 * w1_at(shift) / (1e-8 * i_floor)).clamp(coarse_y, 1e15)
    } else if (p - 2.0).abs() < 1e-12 {
        coarse_y.max(8.0 * mid)
    } else {
        let target = 1e-8 * i_floor;
        let base = 2.0 * scale.powf(p) / ((p - 1.0) * target);
        (c0 + base.powf(1.0 / (p - 1.0))).clamp(coarse_y, 1e15)
    };

    let mut best = f64::NEG_INFINITY;
    let mut best_tail = 0.0;
    for &eps in &epsilon_grid {
        let x0 = shift + eps;
        let mut integral = 0.0;
        let mut quad_err = 0.0;
        for (a, b) in [(-y_cut, -mid), (-mid, mid), (mid, y_cut)] {
            if b <= a {
                continue;
            }
            let (v, e) = quad::adaptive(
                |y| probe(x0, y).unwrap_or(f64::NAN),
                a,
                b,
                (1e-13 * i_floor).max(1e-300),
                1e-12,
            );
            integral += v;
            quad_err += e;
        }
        let tail = if (p - 2.0).abs() < 1e-12 {
            integral += diag_tail(&terms, x0, y_cut);
            cross_bound(&terms, x0, c0, y_cut)
        } else if (p - 1.0).abs() < 1e-12 {
            2.0 * w1_at(x0) / (y_cut - c0)
        } else {
            let w: f64 = terms.iter().map(|t| t.d.norm() * (-x0 * t.s).exp()).sum();
            2.0 * w.powf(p) / ((p - 1.0) * (y_cut - c0).powf(p - 1.0))
        };
        if integral > best {
            best = integral;
            best_tail = tail + quad_err;
        }
    }
    Ok(HardyNormEstimate { p, shift, value: best, epsilon_grid, tail_bound: best_tail, y_cut })
}
