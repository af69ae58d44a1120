//! Input signals on (0, ∞).
//!
//! Everything the transform and admissibility layers consume is one of four
//! shapes: a modulated indicator χ_(a,b](t)·e^(iωt), a finite weighted sum
//! of those, a piecewise-constant grid signal, or a decaying exponential
//! c·e^(−ρt) (the time-side reproducing kernels). All four normalize to a
//! common canonical form, a partition of the support into *pieces* on which
//! the signal is a finite sum Σ c_j e^(η_j t) with complex η_j; transforms,
//! norms and pointwise evaluation all work off that form, so closed forms
//! are used wherever a piece carries a single term and quadrature only
//! appears where terms genuinely overlap.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;
use crate::util::pairwise_sum;

/// Serialize `Complex64` as the two-element array `[re, im]`.
pub mod complex_pair {
    use num_complex::Complex64;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeTuple;
        let mut t = s.serialize_tuple(2)?;
        t.serialize_element(&z.re)?;
        t.serialize_element(&z.im)?;
        t.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        if !re.is_finite() || !im.is_finite() {
            return Err(D::Error::custom("complex components must be finite"));
        }
        Ok(Complex64::new(re, im))
    }
}

/// χ_(a,b](t) · e^(iωt): support half-open on the left, closed on the right.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulatedIndicator {
    pub a: f64,
    pub b: f64,
    pub freq: f64,
}

impl ModulatedIndicator {
    pub fn new(a: f64, b: f64, freq: f64) -> Result<Self> {
        if !(a >= 0.0) || !(b > a) || !b.is_finite() || !freq.is_finite() {
            return Err(Error::domain(format!(
                "modulated indicator needs 0 ≤ a < b < ∞ and finite frequency, got a={a}, b={b}, freq={freq}"
            )));
        }
        Ok(ModulatedIndicator { a, b, freq })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSignal {
    pub a: f64,
    pub b: f64,
    /// Values on the uniform subdivision of (a, b] into `samples.len()`
    /// cells; the signal is constant on each cell.
    #[serde(with = "complex_vec")]
    pub samples: Vec<Complex64>,
}

pub(crate) mod complex_vec {
    use num_complex::Complex64;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = v.iter().map(|z| [z.re, z.im]).collect();
        pairs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<Complex64>, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        for p in &pairs {
            if !p[0].is_finite() || !p[1].is_finite() {
                return Err(D::Error::custom("complex components must be finite"));
            }
        }
        Ok(pairs.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
    }
}

impl GridSignal {
    pub fn new(a: f64, b: f64, samples: Vec<Complex64>) -> Result<Self> {
        if !(a >= 0.0) || !(b > a) || !b.is_finite() || samples.is_empty() {
            return Err(Error::domain(format!(
                "grid signal needs 0 ≤ a < b < ∞ and at least one sample, got a={a}, b={b}, {} samples",
                samples.len()
            )));
        }
        if samples.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::domain("grid signal has a non-finite sample".to_string()));
        }
        Ok(GridSignal { a, b, samples })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InputSignal {
    Modulated(ModulatedIndicator),
    Sum {
        terms: Vec<SumTerm>,
    },
    Grid(GridSignal),
    /// c · e^(−ρt) on (0, ∞) with Re ρ > 0.
    ExpDecay {
        #[serde(with = "complex_pair")]
        coeff: Complex64,
        #[serde(with = "complex_pair")]
        rate: Complex64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SumTerm {
    #[serde(with = "complex_pair")]
    pub coeff: Complex64,
    pub a: f64,
    pub b: f64,
    pub freq: f64,
}

/// Maximal interval (a, b] (b possibly ∞) on which the signal is a fixed
/// exponential sum t ↦ Σ coeff·e^(η t).
#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    pub a: f64,
    pub b: f64,
    pub terms: Vec<(Complex64, Complex64)>,
}

impl Piece {
    pub fn eval(&self, t: f64) -> Complex64 {
        self.terms.iter().map(|&(c, eta)| c * (eta * t).exp()).sum()
    }

    /// Certified upper bound for sup |f| on this piece; exact when the
    /// piece carries a single term.
    pub fn sup_upper(&self) -> f64 {
        self.terms
            .iter()
            .map(|&(c, eta)| {
                let at_a = c.norm() * (eta.re * self.a).exp();
                if self.b.is_finite() {
                    at_a.max(c.norm() * (eta.re * self.b).exp())
                } else {
                    // Unbounded pieces only arise with Re η < 0.
                    at_a
                }
            })
            .sum()
    }
}

impl InputSignal {
    pub fn indicator(a: f64, b: f64) -> Result<Self> {
        Ok(InputSignal::Modulated(ModulatedIndicator::new(a, b, 0.0)?))
    }

    pub fn modulated(a: f64, b: f64, freq: f64) -> Result<Self> {
        Ok(InputSignal::Modulated(ModulatedIndicator::new(a, b, freq)?))
    }

    pub fn exp_decay(coeff: Complex64, rate: Complex64) -> Result<Self> {
        if !(rate.re > 0.0) || !rate.re.is_finite() || !rate.im.is_finite() {
            return Err(Error::domain(format!(
                "exponential signal needs Re rate > 0, got rate = {rate}"
            )));
        }
        Ok(InputSignal::ExpDecay { coeff, rate })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            InputSignal::Modulated(m) => ModulatedIndicator::new(m.a, m.b, m.freq).map(|_| ()),
            InputSignal::Sum { terms } => {
                for t in terms {
                    ModulatedIndicator::new(t.a, t.b, t.freq)?;
                    if !t.coeff.re.is_finite() || !t.coeff.im.is_finite() {
                        return Err(Error::domain("sum term has a non-finite coefficient"));
                    }
                }
                Ok(())
            }
            InputSignal::Grid(g) => GridSignal::new(g.a, g.b, g.samples.clone()).map(|_| ()),
            InputSignal::ExpDecay { coeff, rate } => {
                Self::exp_decay(*coeff, *rate).map(|_| ())
            }
        }
    }

    /// True when the support is bounded.
    pub fn compactly_supported(&self) -> bool {
        !matches!(self, InputSignal::ExpDecay { .. })
    }

    /// Canonical piece decomposition; pieces are disjoint, ordered, and
    /// cover the support.
    pub fn pieces(&self) -> Vec<Piece> {
        match self {
            InputSignal::Modulated(m) => vec![Piece {
                a: m.a,
                b: m.b,
                terms: vec![(Complex64::new(1.0, 0.0), Complex64::new(0.0, m.freq))],
            }],
            InputSignal::Grid(g) => {
                let n = g.samples.len();
                let h = (g.b - g.a) / n as f64;
                g.samples
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| c.norm_sqr() > 0.0)
                    .map(|(k, &c)| Piece {
                        a: g.a + k as f64 * h,
                        b: if k + 1 == n { g.b } else { g.a + (k + 1) as f64 * h },
                        terms: vec![(c, Complex64::new(0.0, 0.0))],
                    })
                    .collect()
            }
            InputSignal::ExpDecay { coeff, rate } => vec![Piece {
                a: 0.0,
                b: f64::INFINITY,
                terms: vec![(*coeff, -rate)],
            }],
            InputSignal::Sum { terms } => {
                let mut cuts: Vec<f64> = terms.iter().flat_map(|t| [t.a, t.b]).collect();
                cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
                cuts.dedup();
                let mut pieces = Vec::new();
                for w in cuts.windows(2) {
                    let (lo, hi) = (w[0], w[1]);
                    let active: Vec<(Complex64, Complex64)> = terms
                        .iter()
                        .filter(|t| t.a <= lo && hi <= t.b)
                        .map(|t| (t.coeff, Complex64::new(0.0, t.freq)))
                        .collect();
                    if !active.is_empty() {
                        pieces.push(Piece { a: lo, b: hi, terms: active });
                    }
                }
                pieces
            }
        }
    }

    /// Pointwise value; supports are half-open (a, b].
    pub fn eval(&self, t: f64) -> Complex64 {
        self.pieces()
            .iter()
            .filter(|p| t > p.a && t <= p.b)
            .map(|p| p.eval(t))
            .sum()
    }

    /// Certified upper bound for the essential supremum: exact whenever no
    /// two components overlap (all deterministic test families), an
    /// over-estimate Σ|c_j| per piece otherwise.
    pub fn sup_norm_upper(&self) -> f64 {
        self.pieces().iter().map(Piece::sup_upper).fold(0.0, f64::max)
    }

    /// ∫ |f|^p for 1 ≤ p < ∞. Exact closed forms on single-term pieces,
    /// adaptive quadrature where terms overlap.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::domain(format!("lp_norm needs 1 ≤ p < ∞, got {p}")));
        }
        let mut parts = Vec::new();
        for piece in self.pieces() {
            if piece.terms.len() == 1 {
                let (c, eta) = piece.terms[0];
                let sigma = p * eta.re;
                let amp = c.norm().powf(p);
                let v = if !piece.b.is_finite() {
                    if sigma >= 0.0 {
                        return Err(Error::unbounded(
                            "non-decaying exponential has infinite L^p norm".to_string(),
                        ));
                    }
                    amp * (sigma * piece.a).exp() / (-sigma)
                } else if sigma == 0.0 {
                    amp * (piece.b - piece.a)
                } else {
                    amp * ((sigma * piece.b).exp() - (sigma * piece.a).exp()) / sigma
                };
                parts.push(v);
            } else {
                let (v, _) = quad::adaptive(
                    |t| piece.eval(t).norm().powf(p),
                    piece.a,
                    piece.b,
                    1e-13,
                    1e-12,
                );
                parts.push(v);
            }
        }
        Ok(pairwise_sum(&parts).powf(1.0 / p))
    }

    /// Time reversal s ↦ f(t₀ − s). Only defined for compactly supported
    /// signals living inside [0, t₀].
    pub fn reflect(&self, t0: f64) -> Result<InputSignal> {
        if !self.compactly_supported() {
            return Err(Error::domain("cannot time-reverse an unbounded-support signal"));
        }
        let pieces = self.pieces();
        if let Some(end) = pieces.iter().map(|p| p.b).fold(None::<f64>, |acc, b| {
            Some(acc.map_or(b, |x| x.max(b)))
        }) {
            if end > t0 + 1e-12 * t0.abs().max(1.0) {
                return Err(Error::domain(format!(
                    "signal support reaches {end}, beyond the reversal horizon {t0}"
                )));
            }
        }
        match self {
            InputSignal::Modulated(m) => Ok(InputSignal::Sum {
                terms: vec![SumTerm {
                    coeff: (Complex64::new(0.0, m.freq) * t0).exp(),
                    a: t0 - m.b,
                    b: t0 - m.a,
                    freq: -m.freq,
                }],
            }),
            InputSignal::Sum { terms } => Ok(InputSignal::Sum {
                terms: terms
                    .iter()
                    .map(|t| SumTerm {
                        coeff: t.coeff * (Complex64::new(0.0, t.freq) * t0).exp(),
                        a: t0 - t.b,
                        b: t0 - t.a,
                        freq: -t.freq,
                    })
                    .collect(),
            }),
            InputSignal::Grid(g) => Ok(InputSignal::Grid(GridSignal {
                a: t0 - g.b,
                b: t0 - g.a,
                samples: g.samples.iter().rev().copied().collect(),
            })),
            InputSignal::ExpDecay { .. } => unreachable!(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.pieces().iter().all(|p| p.terms.iter().all(|(c, _)| c.norm_sqr() == 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indicator_eval_is_half_open() {
        let f = InputSignal::indicator(0.5, 1.0).unwrap();
        assert_eq!(f.eval(0.5), Complex64::new(0.0, 0.0));
        assert_eq!(f.eval(0.75), Complex64::new(1.0, 0.0));
        assert_eq!(f.eval(1.0), Complex64::new(1.0, 0.0));
        assert_eq!(f.eval(1.0 + 1e-12), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn modulated_has_unit_modulus_on_support() {
        let f = InputSignal::modulated(0.0, 2.0, 3.5).unwrap();
        assert!((f.eval(1.3).norm() - 1.0).abs() < 1e-15);
        assert!((f.sup_norm_upper() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn lp_norm_of_indicator() {
        let f = InputSignal::indicator(0.25, 1.25).unwrap();
        for p in [1.0, 2.0, 4.0] {
            assert!((f.lp_norm(p).unwrap() - 1.0f64.powf(1.0 / p)).abs() < 1e-13);
        }
    }

    #[test]
    fn lp_norm_of_exponential_matches_closed_form() {
        let f = InputSignal::exp_decay(Complex64::new(2.0, 0.0), Complex64::new(1.5, -4.0)).unwrap();
        // ∫ (2 e^(−1.5 t))² dt = 4 / 3.
        let got = f.lp_norm(2.0).unwrap();
        assert!((got - (4.0f64 / 3.0).sqrt()).abs() < 1e-13);
    }

    #[test]
    fn exp_decay_requires_decay() {
        assert!(InputSignal::exp_decay(Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)).is_err());
    }

    #[test]
    fn overlapping_sum_pieces_split_at_breakpoints() {
        let f = InputSignal::Sum {
            terms: vec![
                SumTerm { coeff: Complex64::new(1.0, 0.0), a: 0.0, b: 2.0, freq: 0.0 },
                SumTerm { coeff: Complex64::new(0.5, 0.0), a: 1.0, b: 3.0, freq: 0.0 },
            ],
        };
        let pieces = f.pieces();
        assert_eq!(pieces.len(), 3);
        assert_eq!(f.eval(1.5), Complex64::new(1.5, 0.0));
        // ∫|f| = 1·1 + 1.5·1 + 0.5·1 = 3.
        assert!((f.lp_norm(1.0).unwrap() - 3.0).abs() < 1e-12);
        assert!((f.sup_norm_upper() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn grid_signal_norms() {
        let g = InputSignal::Grid(
            GridSignal::new(
                0.0,
                1.0,
                vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, -2.0)],
            )
            .unwrap(),
        );
        assert!((g.lp_norm(2.0).unwrap() - ((1.0 + 4.0) * 0.5f64).sqrt()).abs() < 1e-13);
        assert_eq!(g.sup_norm_upper(), 2.0);
        assert_eq!(g.eval(0.25), Complex64::new(1.0, 0.0));
        assert_eq!(g.eval(0.75), Complex64::new(0.0, -2.0));
    }

    #[test]
    fn reflection_preserves_norms_and_flips_values() {
        let f = InputSignal::modulated(0.25, 1.0, 2.0).unwrap();
        let r = f.reflect(1.5).unwrap();
        assert!((f.lp_norm(2.0).unwrap() - r.lp_norm(2.0).unwrap()).abs() < 1e-12);
        let t = 0.6;
        assert!((r.eval(t) - f.eval(1.5 - t)).norm() < 1e-12);
        // Reflection past a too-short horizon is refused.
        assert!(f.reflect(0.5).is_err());
    }

    #[test]
    fn signal_json_round_trip() {
        let f = InputSignal::Sum {
            terms: vec![SumTerm { coeff: Complex64::new(0.0, 1.0), a: 0.0, b: 1.0, freq: -2.0 }],
        };
        let s = serde_json::to_string(&f).unwrap();
        let back: InputSignal = serde_json::from_str(&s).unwrap();
        assert_eq!(f, back);
        assert!(s.contains("\"kind\":\"sum\""));
    }
}
