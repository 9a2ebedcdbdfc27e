//! Filter families acting on coefficient grids.
//!
//! Polynomial, convolution and band-pass filters act diagonally: every
//! product basis element is an eigenvector. Tensor filters factor into a
//! vertex-space operator and an action on Hilbert coefficients. Adaptive
//! filters mix per-vertex operators through the columns of a polynomial of a
//! vertex-space mixer and need a discrete Hilbert domain. A truncation
//! wrapper projects any filter's output onto a prefix of the grid in its
//! flat (row-major) order, the finite-rank family approximating compact
//! filters.
//!
//! The invariance checker works on the truncated grid, where the two shifts
//! act diagonally by eigenvalue; it is a diagnostic, not a proof about the
//! untruncated operators.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{GspError, Result};
use crate::hilbert::Domain;
use crate::numerics::DenseMatrix;
use crate::signal::{GeneralizedSignal, SignalContext};

/// Closed axis-aligned frequency rectangle; membership is inclusive on the
/// boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandRect {
    pub graph_min: f64,
    pub graph_max: f64,
    pub hilbert_min: f64,
    pub hilbert_max: f64,
}

/// Pass region of a band-pass filter.
#[derive(Debug, Clone, PartialEq)]
pub enum BandRegion {
    Rectangles(Vec<BandRect>),
    /// Explicit frequency pairs, matched within 1e-9 per coordinate.
    Points(Vec<(f64, f64)>),
}

impl BandRegion {
    pub fn contains(&self, graph_freq: f64, hilbert_freq: f64) -> bool {
        match self {
            BandRegion::Rectangles(rects) => rects.iter().any(|r| {
                graph_freq >= r.graph_min
                    && graph_freq <= r.graph_max
                    && hilbert_freq >= r.hilbert_min
                    && hilbert_freq <= r.hilbert_max
            }),
            BandRegion::Points(points) => points
                .iter()
                .any(|&(g, h)| (g - graph_freq).abs() <= 1e-9 && (h - hilbert_freq).abs() <= 1e-9),
        }
    }
}

/// Action on the Hilbert coefficient axis of a tensor filter.
#[derive(Debug, Clone, PartialEq)]
pub enum HilbertAction {
    /// Multiplies coefficient `m` by the `m`-th entry.
    Diagonal(Vec<Complex64>),
    /// Full matrix on the coefficient vector.
    Matrix(DenseMatrix),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Filter {
    /// Polynomial in the joint shift: entry `(i, m)` is scaled by
    /// `P(lambda_i / freq_label_m)`.
    Polynomial { coeffs: Vec<f64> },
    /// Entrywise multiplication by a fixed signal's coefficients.
    Convolution { kernel: GeneralizedSignal },
    /// Projection onto the entries whose frequency pair lies in the region.
    BandPass { region: BandRegion },
    /// `graph_op` acts in vertex space, `hilbert_op` on Hilbert coefficients.
    Tensor {
        graph_op: DenseMatrix,
        hilbert_op: HilbertAction,
    },
    /// Sum over vertices of (column u of P1(mixer)) tensor P2(vertex_ops[u]).
    Adaptive {
        p1: Vec<f64>,
        mixer: DenseMatrix,
        vertex_ops: Vec<DenseMatrix>,
        p2: Vec<f64>,
    },
    /// Applies `inner`, then keeps the first `cutoff` grid entries in flat
    /// row-major order.
    Truncation { inner: Box<Filter>, cutoff: usize },
}

pub fn apply(filter: &Filter, signal: &GeneralizedSignal) -> Result<GeneralizedSignal> {
    let context = &signal.context;
    let n = context.graph_dim();
    let m = context.hilbert_dim();
    match filter {
        Filter::Polynomial { coeffs } => {
            let factors = polynomial_factors(coeffs, context)?;
            let mut out = signal.coeffs.clone();
            for i in 0..n {
                for j in 0..m {
                    out[(i, j)] *= factors[(i, j)];
                }
            }
            GeneralizedSignal::new(context.clone(), out)
        }
        Filter::Convolution { kernel } => {
            if !kernel.context.same_as(context) {
                return Err(GspError::ContextMismatch(
                    "convolution kernel built against a different shift/basis pair".into(),
                ));
            }
            let mut out = signal.coeffs.clone();
            for i in 0..n {
                for j in 0..m {
                    out[(i, j)] *= kernel.coeffs[(i, j)];
                }
            }
            GeneralizedSignal::new(context.clone(), out)
        }
        Filter::BandPass { region } => {
            let mut out = signal.coeffs.clone();
            for i in 0..n {
                let g = context.shift.eigenvalues[i];
                for j in 0..m {
                    if !region.contains(g, context.basis.freq_label(j)) {
                        out[(i, j)] = Complex64::new(0.0, 0.0);
                    }
                }
            }
            GeneralizedSignal::new(context.clone(), out)
        }
        Filter::Tensor { graph_op, hilbert_op } => {
            if graph_op.rows() != n || graph_op.cols() != n {
                return Err(GspError::ContextMismatch(format!(
                    "tensor graph operator is {}x{}, vertex space has dimension {n}",
                    graph_op.rows(),
                    graph_op.cols()
                )));
            }
            let phi = &context.shift.eigenvectors;
            let graph_modes = phi.conjugate_transpose().matmul(graph_op).matmul(phi);
            let mixed = graph_modes.matmul(&signal.coeffs);
            let out = match hilbert_op {
                HilbertAction::Diagonal(d) => {
                    if d.len() != m {
                        return Err(GspError::ContextMismatch(format!(
                            "diagonal hilbert action has {} entries, basis has {m}",
                            d.len()
                        )));
                    }
                    let mut out = mixed;
                    for i in 0..n {
                        for j in 0..m {
                            out[(i, j)] *= d[j];
                        }
                    }
                    out
                }
                HilbertAction::Matrix(d) => {
                    if d.rows() != m || d.cols() != m {
                        return Err(GspError::ContextMismatch(format!(
                            "hilbert action is {}x{}, basis has {m} elements",
                            d.rows(),
                            d.cols()
                        )));
                    }
                    mixed.matmul(&d.transpose())
                }
            };
            GeneralizedSignal::new(context.clone(), out)
        }
        Filter::Adaptive {
            p1,
            mixer,
            vertex_ops,
            p2,
        } => {
            let hilbert_points = match context.basis.domain() {
                Domain::Discrete(points) => points,
                Domain::Interval(..) => {
                    return Err(GspError::ContextMismatch(
                        "adaptive filters need a discrete Hilbert domain".into(),
                    ))
                }
            };
            if context.hilbert_dim() != hilbert_points {
                return Err(GspError::ContextMismatch(
                    "adaptive filters need the full discrete basis".into(),
                ));
            }
            if mixer.rows() != n || mixer.cols() != n {
                return Err(GspError::ContextMismatch(format!(
                    "mixer is {}x{}, vertex space has dimension {n}",
                    mixer.rows(),
                    mixer.cols()
                )));
            }
            if vertex_ops.len() != n {
                return Err(GspError::ContextMismatch(format!(
                    "{} per-vertex operators for {n} vertices",
                    vertex_ops.len()
                )));
            }
            for op in vertex_ops {
                if op.rows() != hilbert_points || op.cols() != hilbert_points {
                    return Err(GspError::ContextMismatch(format!(
                        "per-vertex operator is {}x{}, expected {hilbert_points}x{hilbert_points}",
                        op.rows(),
                        op.cols()
                    )));
                }
            }
            let p1_of_mixer = matrix_polynomial(p1, mixer);
            let values = signal.vertex_values()?;
            // w_u = P2(A_u) applied to the trace at vertex u.
            let mixed_traces: Vec<Vec<Complex64>> = (0..n)
                .map(|u| {
                    let p2_of_op = matrix_polynomial(p2, &vertex_ops[u]);
                    p2_of_op.matvec(values.row(u))
                })
                .collect();
            let mut out_values = DenseMatrix::zeros(n, hilbert_points);
            for v in 0..n {
                for u in 0..n {
                    let weight = p1_of_mixer[(v, u)];
                    if weight == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    for j in 0..hilbert_points {
                        out_values[(v, j)] += weight * mixed_traces[u][j];
                    }
                }
            }
            GeneralizedSignal::from_vertex_values(context.clone(), &out_values)
        }
        Filter::Truncation { inner, cutoff } => {
            let grid = n * m;
            if *cutoff > grid {
                return Err(GspError::CutoffOutOfRange {
                    cutoff: *cutoff,
                    grid,
                });
            }
            let applied = apply(inner, signal)?;
            let mut out = applied.coeffs;
            for flat in *cutoff..grid {
                out[(flat / m, flat % m)] = Complex64::new(0.0, 0.0);
            }
            GeneralizedSignal::new(context.clone(), out)
        }
    }
}

/// Wraps a filter so its output is projected onto the first `cutoff` grid
/// entries.
pub fn truncate_finite_rank(
    filter: Filter,
    cutoff: usize,
    context: &SignalContext,
) -> Result<Filter> {
    if cutoff > context.grid_dim() {
        return Err(GspError::CutoffOutOfRange {
            cutoff,
            grid: context.grid_dim(),
        });
    }
    Ok(Filter::Truncation {
        inner: Box::new(filter),
        cutoff,
    })
}

/// Matrix of the filter on the truncated grid, in flat row-major grid
/// coordinates.
pub fn filter_matrix(filter: &Filter, context: &SignalContext) -> Result<DenseMatrix> {
    let n = context.graph_dim();
    let m = context.hilbert_dim();
    let dim = n * m;
    match filter {
        Filter::Polynomial { coeffs } => {
            let factors = polynomial_factors(coeffs, context)?;
            let mut out = DenseMatrix::zeros(dim, dim);
            for flat in 0..dim {
                out[(flat, flat)] = factors[(flat / m, flat % m)];
            }
            Ok(out)
        }
        Filter::Convolution { kernel } => {
            if !kernel.context.same_as(context) {
                return Err(GspError::ContextMismatch(
                    "convolution kernel built against a different shift/basis pair".into(),
                ));
            }
            let mut out = DenseMatrix::zeros(dim, dim);
            for flat in 0..dim {
                out[(flat, flat)] = kernel.coeffs[(flat / m, flat % m)];
            }
            Ok(out)
        }
        Filter::BandPass { region } => {
            let mut out = DenseMatrix::zeros(dim, dim);
            for flat in 0..dim {
                let (i, j) = (flat / m, flat % m);
                let inside = region.contains(
                    context.shift.eigenvalues[i],
                    context.basis.freq_label(j),
                );
                if inside {
                    out[(flat, flat)] = Complex64::new(1.0, 0.0);
                }
            }
            Ok(out)
        }
        Filter::Truncation { inner, cutoff } => {
            if *cutoff > dim {
                return Err(GspError::CutoffOutOfRange {
                    cutoff: *cutoff,
                    grid: dim,
                });
            }
            let inner_matrix = filter_matrix(inner, context)?;
            Ok(DenseMatrix::from_fn(dim, dim, |r, c| {
                if r < *cutoff {
                    inner_matrix[(r, c)]
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }))
        }
        Filter::Tensor { .. } | Filter::Adaptive { .. } => {
            // Assembled column by column through the grid action.
            let mut out = DenseMatrix::zeros(dim, dim);
            for col in 0..dim {
                let mut grid = DenseMatrix::zeros(n, m);
                grid[(col / m, col % m)] = Complex64::new(1.0, 0.0);
                let image = apply(filter, &GeneralizedSignal::new(context.clone(), grid)?)?;
                for row in 0..dim {
                    out[(row, col)] = image.coeffs[(row / m, row % m)];
                }
            }
            Ok(out)
        }
    }
}

/// Outcome of the commutator diagnostic on the truncated grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftInvarianceReport {
    pub shift_invariant: bool,
    pub weakly_shift_invariant: bool,
    /// Operator norm of the commutator with the graph shift.
    pub graph_commutator: f64,
    /// Operator norm of the commutator with the Hilbert operator.
    pub hilbert_commutator: f64,
    /// Operator norm of the commutator with the joint operator.
    pub joint_commutator: f64,
}

/// Commutator check for an explicit matrix `l` on the grid spanned by the
/// given graph eigenvalues and Hilbert operator eigenvalues (flat row-major
/// layout, graph index major).
pub fn check_shift_invariance_spectra(
    l: &DenseMatrix,
    graph_eigs: &[f64],
    hilbert_eigs: &[f64],
    tol: f64,
) -> Result<ShiftInvarianceReport> {
    let dim = graph_eigs.len() * hilbert_eigs.len();
    if l.rows() != dim || l.cols() != dim {
        return Err(GspError::NotRepresentable(format!(
            "matrix is {}x{}, grid has dimension {dim}",
            l.rows(),
            l.cols()
        )));
    }
    let m = hilbert_eigs.len();
    let commutator_norm = |d: &dyn Fn(usize) -> f64| -> f64 {
        DenseMatrix::from_fn(dim, dim, |r, c| l[(r, c)] * (d(r) - d(c))).operator_norm()
    };
    let graph = commutator_norm(&|flat| graph_eigs[flat / m]);
    let hilbert = commutator_norm(&|flat| hilbert_eigs[flat % m]);
    let joint = commutator_norm(&|flat| graph_eigs[flat / m] * hilbert_eigs[flat % m]);
    let scale = l.operator_norm().max(f64::MIN_POSITIVE);
    Ok(ShiftInvarianceReport {
        shift_invariant: graph < tol * scale && hilbert < tol * scale,
        weakly_shift_invariant: joint < tol * scale,
        graph_commutator: graph,
        hilbert_commutator: hilbert,
        joint_commutator: joint,
    })
}

/// Commutator check for a filter against its own context's spectra.
pub fn check_shift_invariance(
    filter: &Filter,
    context: &SignalContext,
    tol: f64,
) -> Result<ShiftInvarianceReport> {
    let l = filter_matrix(filter, context)?;
    let hilbert_eigs: Vec<f64> = context
        .basis
        .elements()
        .iter()
        .map(|e| {
            if e.freq_label == 0.0 {
                Err(GspError::UnboundedFreqLabel)
            } else {
                Ok(1.0 / e.freq_label)
            }
        })
        .collect::<Result<_>>()?;
    check_shift_invariance_spectra(&l, &context.shift.eigenvalues, &hilbert_eigs, tol)
}

fn polynomial_factors(coeffs: &[f64], context: &SignalContext) -> Result<DenseMatrix> {
    let nonconstant = coeffs.iter().skip(1).any(|&a| a != 0.0);
    let n = context.graph_dim();
    let m = context.hilbert_dim();
    let mut out = DenseMatrix::zeros(n, m);
    for j in 0..m {
        let label = context.basis.freq_label(j);
        if label == 0.0 && nonconstant {
            // The compact operator behind this element would need an
            // unbounded eigenvalue; only constant polynomials act there.
            return Err(GspError::UnboundedFreqLabel);
        }
        let lambda_xi = if label == 0.0 { 0.0 } else { 1.0 / label };
        for i in 0..n {
            let x = context.shift.eigenvalues[i] * lambda_xi;
            out[(i, j)] = Complex64::new(poly_eval(coeffs, x), 0.0);
        }
    }
    Ok(out)
}

pub(crate) fn poly_eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

pub(crate) fn matrix_polynomial(coeffs: &[f64], m: &DenseMatrix) -> DenseMatrix {
    let n = m.rows();
    let mut acc = DenseMatrix::zeros(n, n);
    for &a in coeffs.iter().rev() {
        acc = acc.matmul(m);
        for i in 0..n {
            acc[(i, i)] += Complex64::new(a, 0.0);
        }
    }
    acc
}

/// JSON description of a filter, the format consumed by the command line.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FilterSpec {
    Polynomial {
        coeffs: Vec<f64>,
    },
    Convolution {
        grid_file: String,
    },
    BandPass {
        #[serde(default, alias = "K")]
        rects: Vec<[f64; 4]>,
        #[serde(default)]
        points: Vec<[f64; 2]>,
    },
    Truncation {
        cutoff: usize,
        inner: Box<FilterSpec>,
    },
}

impl FilterSpec {
    pub fn from_json_file(path: &Path) -> Result<FilterSpec> {
        let text = crate::csvio::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| GspError::Parse {
            path: path.display().to_string(),
            line: e.line(),
            message: e.to_string(),
        })
    }

    /// Instantiates the filter; relative grid files resolve against
    /// `base_dir`.
    pub fn build(&self, context: &SignalContext, base_dir: &Path) -> Result<Filter> {
        match self {
            FilterSpec::Polynomial { coeffs } => Ok(Filter::Polynomial {
                coeffs: coeffs.clone(),
            }),
            FilterSpec::Convolution { grid_file } => {
                let path = base_dir.join(grid_file);
                let kernel = GeneralizedSignal::from_csv(context.clone(), &path)?;
                Ok(Filter::Convolution { kernel })
            }
            FilterSpec::BandPass { rects, points } => {
                let region = if !points.is_empty() && rects.is_empty() {
                    BandRegion::Points(points.iter().map(|p| (p[0], p[1])).collect())
                } else {
                    BandRegion::Rectangles(
                        rects
                            .iter()
                            .map(|r| BandRect {
                                graph_min: r[0],
                                graph_max: r[1],
                                hilbert_min: r[2],
                                hilbert_max: r[3],
                            })
                            .collect(),
                    )
                };
                Ok(Filter::BandPass { region })
            }
            FilterSpec::Truncation { cutoff, inner } => {
                let inner = inner.build(context, base_dir)?;
                truncate_finite_rank(inner, *cutoff, context)
            }
        }
    }
}
