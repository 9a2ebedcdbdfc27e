//! Orthonormal families of a separable Hilbert space with per-element
//! frequency labels.
//!
//! Four families are provided. Three live on an interval: the half-integer
//! Fourier family `exp(i(m+1/2)x)/sqrt(2*pi)` on `[0, 2*pi]` (the subspace
//! with `f(0) + f(2*pi) = 0`), the ordinary Fourier series on `[0, T]`, and
//! normalized Chebyshev polynomials on `[-1, 1]` under the weighted measure
//! `dx / sqrt(1 - x^2)`. The fourth uses the eigenvectors of another graph's
//! shift operator, with the counting measure on its vertex set.
//!
//! The frequency label stores the reciprocal of the underlying compact
//! operator's eigenvalue, so classical Fourier indices read off directly.
//! All four families are spanned by analytic functions (trigonometric
//! polynomials, polynomials, or finitely supported vectors), which is what
//! the sampling theory downstream needs; this is a property of the families,
//! not something checked at runtime.

use num_complex::Complex64;

use crate::error::{GspError, Result};
use crate::graph::ShiftOperator;
use crate::numerics::{gauss_chebyshev, gauss_quadrature, QuadratureRule};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Discrepancy between the base and doubled quadrature rule beyond which a
/// projection is reported as under-resolved.
pub const REFINEMENT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub enum BasisKind {
    HalfIntegerFourier,
    FourierSeries { period: f64 },
    Chebyshev,
    GraphBasis { shift: ShiftOperator },
}

/// One basis element: its native index and frequency label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisElement {
    pub index: i64,
    pub freq_label: f64,
}

/// Domain the basis functions live on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Interval(f64, f64),
    /// Vertex set `{0, .., n-1}` with counting measure.
    Discrete(usize),
}

#[derive(Debug, Clone)]
enum InnerProductRule {
    Continuous {
        base: QuadratureRule,
        refined: QuadratureRule,
    },
    Discrete(usize),
}

/// Enumerated orthonormal basis of the vertex Hilbert space.
#[derive(Debug, Clone)]
pub struct HilbertBasis {
    kind: BasisKind,
    truncation: usize,
    elements: Vec<BasisElement>,
    rule: InnerProductRule,
}

impl PartialEq for HilbertBasis {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.truncation == other.truncation
    }
}

/// Builds a basis of the requested kind, truncated to `m` (family-specific
/// index range; see the per-kind element layout below).
pub fn make_basis(kind: BasisKind, m: usize) -> Result<HilbertBasis> {
    if m == 0 {
        return Err(GspError::InvalidInput("basis truncation must be at least 1".into()));
    }
    let (elements, rule) = match &kind {
        BasisKind::HalfIntegerFourier => {
            let elements = (-(m as i64)..m as i64)
                .map(|idx| BasisElement {
                    index: idx,
                    freq_label: idx as f64 + 0.5,
                })
                .collect();
            (elements, continuous_rule(m, (0.0, TWO_PI)))
        }
        BasisKind::FourierSeries { period } => {
            if !(period.is_finite() && *period > 0.0) {
                return Err(GspError::InvalidInput("fourier period must be positive".into()));
            }
            let elements = (-(m as i64)..=m as i64)
                .map(|idx| BasisElement {
                    index: idx,
                    freq_label: TWO_PI * idx as f64 / period,
                })
                .collect();
            (elements, continuous_rule(m, (0.0, *period)))
        }
        BasisKind::Chebyshev => {
            let elements = (0..m as i64)
                .map(|idx| BasisElement {
                    index: idx,
                    freq_label: idx as f64,
                })
                .collect();
            let order = 4 * m + 16;
            (
                elements,
                InnerProductRule::Continuous {
                    base: gauss_chebyshev(order),
                    refined: gauss_chebyshev(2 * order),
                },
            )
        }
        BasisKind::GraphBasis { shift } => {
            let count = m.min(shift.dim());
            let elements = (0..count)
                .map(|i| BasisElement {
                    index: i as i64,
                    freq_label: shift.eigenvalues[i],
                })
                .collect();
            (elements, InnerProductRule::Discrete(shift.dim()))
        }
    };
    Ok(HilbertBasis {
        kind,
        truncation: m,
        elements,
        rule,
    })
}

fn continuous_rule(m: usize, domain: (f64, f64)) -> InnerProductRule {
    let order = 4 * m + 16;
    InnerProductRule::Continuous {
        base: gauss_quadrature(order, domain),
        refined: gauss_quadrature(2 * order, domain),
    }
}

impl HilbertBasis {
    pub fn kind(&self) -> &BasisKind {
        &self.kind
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn elements(&self) -> &[BasisElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn freq_label(&self, position: usize) -> f64 {
        self.elements[position].freq_label
    }

    /// Position of the element with native index `index`.
    pub fn position_of(&self, index: i64) -> Option<usize> {
        self.elements.iter().position(|e| e.index == index)
    }

    pub fn domain(&self) -> Domain {
        match &self.kind {
            BasisKind::HalfIntegerFourier => Domain::Interval(0.0, TWO_PI),
            BasisKind::FourierSeries { period } => Domain::Interval(0.0, *period),
            BasisKind::Chebyshev => Domain::Interval(-1.0, 1.0),
            BasisKind::GraphBasis { shift } => Domain::Discrete(shift.dim()),
        }
    }

    fn check_domain(&self, x: f64) -> Result<()> {
        match self.domain() {
            Domain::Interval(a, b) => {
                let slack = 1e-12 * (b - a).abs().max(1.0);
                if x < a - slack || x > b + slack {
                    return Err(GspError::OutOfDomain { point: x });
                }
            }
            Domain::Discrete(n) => {
                let rounded = x.round();
                if (x - rounded).abs() > 1e-9 || rounded < 0.0 || rounded >= n as f64 {
                    return Err(GspError::OutOfDomain { point: x });
                }
            }
        }
        Ok(())
    }

    /// Evaluates element `position` at a point of the domain.
    pub fn eval(&self, position: usize, x: f64) -> Result<Complex64> {
        self.check_domain(x)?;
        Ok(self.eval_unchecked(position, x))
    }

    fn eval_unchecked(&self, position: usize, x: f64) -> Complex64 {
        let element = &self.elements[position];
        match &self.kind {
            BasisKind::HalfIntegerFourier => {
                let phase = (element.index as f64 + 0.5) * x;
                Complex64::from_polar(1.0 / TWO_PI.sqrt(), phase)
            }
            BasisKind::FourierSeries { period } => {
                let phase = TWO_PI * element.index as f64 * x / period;
                Complex64::from_polar(1.0 / period.sqrt(), phase)
            }
            BasisKind::Chebyshev => {
                let j = element.index as usize;
                let t = chebyshev_t(j, x.clamp(-1.0, 1.0));
                let scale = if j == 0 {
                    1.0 / std::f64::consts::PI.sqrt()
                } else {
                    (2.0 / std::f64::consts::PI).sqrt()
                };
                Complex64::new(scale * t, 0.0)
            }
            BasisKind::GraphBasis { shift } => shift.phi(x.round() as usize, position),
        }
    }

    /// `<f, xi_position>` under the basis's own measure.
    ///
    /// Continuous kinds integrate with the stored rule and re-check against
    /// a doubled rule; a disagreement beyond [`REFINEMENT_TOL`] means the
    /// integrand oscillates (or jumps) faster than the rule resolves.
    pub fn project(&self, position: usize, f: impl Fn(f64) -> Complex64) -> Result<Complex64> {
        Ok(self.project_all(f)?[position])
    }

    /// Projects onto every element at once; `f` is evaluated once per node.
    pub fn project_all(&self, f: impl Fn(f64) -> Complex64) -> Result<Vec<Complex64>> {
        match &self.rule {
            InnerProductRule::Discrete(n) => {
                let values: Vec<Complex64> = (0..*n).map(|v| f(v as f64)).collect();
                Ok((0..self.len())
                    .map(|p| {
                        values
                            .iter()
                            .enumerate()
                            .map(|(v, fv)| fv * self.eval_unchecked(p, v as f64).conj())
                            .sum()
                    })
                    .collect())
            }
            InnerProductRule::Continuous { base, refined } => {
                let coarse = self.quadrature_coefficients(base, &f);
                let fine = self.quadrature_coefficients(refined, &f);
                let mut worst = 0.0f64;
                for (c, r) in coarse.iter().zip(&fine) {
                    worst = worst.max((c - r).norm());
                }
                if worst > REFINEMENT_TOL {
                    return Err(GspError::QuadratureUnderResolved { disagreement: worst });
                }
                Ok(fine)
            }
        }
    }

    fn quadrature_coefficients(
        &self,
        rule: &QuadratureRule,
        f: &impl Fn(f64) -> Complex64,
    ) -> Vec<Complex64> {
        let values: Vec<Complex64> = rule.nodes.iter().map(|&x| f(x)).collect();
        (0..self.len())
            .map(|p| {
                rule.nodes
                    .iter()
                    .zip(&rule.weights)
                    .zip(&values)
                    .map(|((&x, &w), fv)| fv * self.eval_unchecked(p, x).conj() * w)
                    .sum()
            })
            .collect()
    }

    /// Squared norm of `f` under the basis measure, via the refined rule.
    pub fn norm_sqr(&self, f: impl Fn(f64) -> Complex64) -> f64 {
        match &self.rule {
            InnerProductRule::Discrete(n) => (0..*n).map(|v| f(v as f64).norm_sqr()).sum(),
            InnerProductRule::Continuous { refined, .. } => {
                refined.integrate_real(|x| f(x).norm_sqr())
            }
        }
    }

    /// Points of the domain usable as default sample positions: equispaced
    /// interior points for intervals, leading vertices for discrete domains.
    pub fn equispaced_interior(&self, count: usize) -> Vec<f64> {
        match self.domain() {
            Domain::Interval(a, b) => (0..count)
                .map(|j| a + (b - a) * (j as f64 + 1.0) / (count as f64 + 1.0))
                .collect(),
            Domain::Discrete(n) => (0..count.min(n)).map(|v| v as f64).collect(),
        }
    }
}

fn chebyshev_t(j: usize, x: f64) -> f64 {
    match j {
        0 => 1.0,
        1 => x,
        _ => {
            let mut prev = 1.0;
            let mut cur = x;
            for _ in 2..=j {
                let next = 2.0 * x * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}
