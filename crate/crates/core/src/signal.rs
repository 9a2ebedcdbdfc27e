//! Generalized graph signals and their joint and partial transforms.
//!
//! A signal assigns to each graph vertex an element of the Hilbert space; it
//! is held as a finite coefficient grid over the product of the shift
//! eigenbasis and the Hilbert basis. Rows follow the graph modes in
//! ascending eigenvalue order, columns the Hilbert modes in ascending
//! frequency-label order; the flat (row-major) order of that grid is also
//! the truncation order used by finite-rank filter approximations.
//!
//! Everything here is pinned to a `(shift, basis)` pair; transforming or
//! combining signals across different pairs is an error rather than a
//! silent re-projection. On a finite grid every frequency range is a finite
//! set, so bounded and finite band descriptions coincide by construction.

use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::csvio;
use crate::error::{GspError, Result};
use crate::graph::ShiftOperator;
use crate::hilbert::HilbertBasis;
use crate::numerics::DenseMatrix;

/// A shift/basis pair. Signals, filters and sample plans all reference one.
#[derive(Debug, Clone)]
pub struct SignalContext {
    pub shift: Arc<ShiftOperator>,
    pub basis: Arc<HilbertBasis>,
}

impl SignalContext {
    pub fn new(shift: ShiftOperator, basis: HilbertBasis) -> Self {
        SignalContext {
            shift: Arc::new(shift),
            basis: Arc::new(basis),
        }
    }

    /// Vertex count of the graph side.
    pub fn graph_dim(&self) -> usize {
        self.shift.dim()
    }

    /// Element count of the Hilbert side.
    pub fn hilbert_dim(&self) -> usize {
        self.basis.len()
    }

    pub fn grid_dim(&self) -> usize {
        self.graph_dim() * self.hilbert_dim()
    }

    pub fn same_as(&self, other: &SignalContext) -> bool {
        (Arc::ptr_eq(&self.shift, &other.shift) || self.shift == other.shift)
            && (Arc::ptr_eq(&self.basis, &other.basis) || self.basis == other.basis)
    }
}

/// A pair (graph frequency, Hilbert frequency) carried by one grid entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyPoint {
    pub graph_freq: f64,
    pub hilbert_freq: f64,
}

/// Signal held as a coefficient grid over the product basis.
#[derive(Debug, Clone)]
pub struct GeneralizedSignal {
    pub context: SignalContext,
    /// `coeffs[(i, m)]` multiplies graph mode `i` and Hilbert element `m`.
    pub coeffs: DenseMatrix,
}

impl PartialEq for GeneralizedSignal {
    fn eq(&self, other: &Self) -> bool {
        self.context.same_as(&other.context) && self.coeffs == other.coeffs
    }
}

impl GeneralizedSignal {
    pub fn new(context: SignalContext, coeffs: DenseMatrix) -> Result<Self> {
        if coeffs.rows() != context.graph_dim() || coeffs.cols() != context.hilbert_dim() {
            return Err(GspError::DimensionMismatch(format!(
                "grid is {}x{} but context needs {}x{}",
                coeffs.rows(),
                coeffs.cols(),
                context.graph_dim(),
                context.hilbert_dim()
            )));
        }
        Ok(GeneralizedSignal { context, coeffs })
    }

    pub fn zero(context: SignalContext) -> Self {
        let coeffs = DenseMatrix::zeros(context.graph_dim(), context.hilbert_dim());
        GeneralizedSignal { context, coeffs }
    }

    /// Pointwise value: the expansion summed over every grid entry.
    pub fn evaluate(&self, v: usize, x: f64) -> Result<Complex64> {
        let shift = &self.context.shift;
        let basis = &self.context.basis;
        let mut total = Complex64::new(0.0, 0.0);
        for m in 0..basis.len() {
            let xi = basis.eval(m, x)?;
            let mut along_graph = Complex64::new(0.0, 0.0);
            for i in 0..shift.dim() {
                along_graph += self.coeffs[(i, m)] * shift.phi(v, i);
            }
            total += along_graph * xi;
        }
        Ok(total)
    }

    /// Values on the vertex grid of a discrete-domain basis, as a
    /// `graph vertices x Hilbert vertices` matrix.
    pub fn vertex_values(&self) -> Result<DenseMatrix> {
        let eval = hilbert_eval_matrix(&self.context)?;
        let phi = &self.context.shift.eigenvectors;
        Ok(phi.matmul(&self.coeffs).matmul(&eval.transpose()))
    }

    /// Builds a signal from values on the vertex grid of a discrete-domain
    /// basis (inverse of [`GeneralizedSignal::vertex_values`]).
    pub fn from_vertex_values(context: SignalContext, values: &DenseMatrix) -> Result<Self> {
        let eval = hilbert_eval_matrix(&context)?;
        if values.rows() != context.graph_dim() || values.cols() != eval.rows() {
            return Err(GspError::DimensionMismatch(format!(
                "value table is {}x{}, expected {}x{}",
                values.rows(),
                values.cols(),
                context.graph_dim(),
                eval.rows()
            )));
        }
        let phi_h = context.shift.eigenvectors.conjugate_transpose();
        let conj_eval = DenseMatrix::from_fn(eval.rows(), eval.cols(), |r, c| eval[(r, c)].conj());
        let coeffs = phi_h.matmul(values).matmul(&conj_eval);
        GeneralizedSignal::new(context, coeffs)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        GeneralizedSignal {
            context: self.context.clone(),
            coeffs: self.coeffs.scale(s),
        }
    }

    pub fn add(&self, other: &GeneralizedSignal) -> Result<Self> {
        if !self.context.same_as(&other.context) {
            return Err(GspError::BasisMismatch);
        }
        Ok(GeneralizedSignal {
            context: self.context.clone(),
            coeffs: self.coeffs.add(&other.coeffs),
        })
    }

    /// Hilbert-space norm, which on the grid is the Euclidean norm of the
    /// coefficients.
    pub fn norm(&self) -> f64 {
        self.coeffs.frobenius_norm()
    }

    pub fn to_csv(&self, path: &Path) -> Result<()> {
        grid_to_csv(&self.coeffs, &self.context, path)
    }

    pub fn from_csv(context: SignalContext, path: &Path) -> Result<Self> {
        let coeffs = grid_from_csv(&context, path)?;
        GeneralizedSignal::new(context, coeffs)
    }
}

/// Full `Hilbert basis evaluated on its own discrete domain` matrix
/// (`points x elements`); only defined for discrete-domain bases.
fn hilbert_eval_matrix(context: &SignalContext) -> Result<DenseMatrix> {
    match context.basis.domain() {
        crate::hilbert::Domain::Discrete(n) => {
            let m = context.basis.len();
            let mut out = DenseMatrix::zeros(n, m);
            for x in 0..n {
                for e in 0..m {
                    out[(x, e)] = context.basis.eval(e, x as f64)?;
                }
            }
            Ok(out)
        }
        crate::hilbert::Domain::Interval(..) => Err(GspError::InvalidInput(
            "vertex-value tables need a discrete-domain basis".into(),
        )),
    }
}

/// Joint transform of a pointwise-evaluable signal: grid entry `(i, m)` is
/// the inner product with graph mode `i` tensor Hilbert element `m`,
/// computed by projecting each vertex trace and then mixing along the graph.
pub fn f_transform<F>(context: &SignalContext, f: F) -> Result<GeneralizedSignal>
where
    F: Fn(usize, f64) -> Complex64 + Sync,
{
    let n = context.graph_dim();
    let per_vertex: Vec<Result<Vec<Complex64>>> = (0..n)
        .into_par_iter()
        .map(|v| context.basis.project_all(|x| f(v, x)))
        .collect();
    let mut h = DenseMatrix::zeros(n, context.hilbert_dim());
    for (v, row) in per_vertex.into_iter().enumerate() {
        for (m, value) in row?.into_iter().enumerate() {
            h[(v, m)] = value;
        }
    }
    let coeffs = context.shift.eigenvectors.conjugate_transpose().matmul(&h);
    GeneralizedSignal::new(context.clone(), coeffs)
}

/// Partial transform along the Hilbert side: component `v` is the inner
/// product of the vertex-`v` trace with element `position`.
pub fn h_transform<F>(context: &SignalContext, f: F, position: usize) -> Result<Vec<Complex64>>
where
    F: Fn(usize, f64) -> Complex64 + Sync,
{
    (0..context.graph_dim())
        .map(|v| context.basis.project(position, |x| f(v, x)))
        .collect()
}

/// Partial transform along the graph side: the signal at point `x` projected
/// onto graph mode `i`.
pub fn g_transform<F>(context: &SignalContext, f: F, i: usize, x: f64) -> Result<Complex64>
where
    F: Fn(usize, f64) -> Complex64,
{
    match context.basis.domain() {
        crate::hilbert::Domain::Interval(a, b) => {
            let slack = 1e-12 * (b - a).max(1.0);
            if x < a - slack || x > b + slack {
                return Err(GspError::OutOfDomain { point: x });
            }
        }
        crate::hilbert::Domain::Discrete(n) => {
            if (x - x.round()).abs() > 1e-9 || x.round() < 0.0 || x.round() >= n as f64 {
                return Err(GspError::OutOfDomain { point: x });
            }
        }
    }
    let shift = &context.shift;
    Ok((0..shift.dim())
        .map(|v| f(v, x) * shift.phi(v, i).conj())
        .sum())
}

/// Reassembles a signal from its coefficient grid.
pub fn inverse_f_transform(context: &SignalContext, coeffs: DenseMatrix) -> Result<GeneralizedSignal> {
    GeneralizedSignal::new(context.clone(), coeffs)
}

/// Frequency pairs whose coefficient magnitude exceeds `magnitude_tol`,
/// in grid order.
pub fn frequency_range(signal: &GeneralizedSignal, magnitude_tol: f64) -> Vec<FrequencyPoint> {
    assert!(magnitude_tol >= 0.0);
    let shift = &signal.context.shift;
    let basis = &signal.context.basis;
    let mut out = Vec::new();
    for i in 0..shift.dim() {
        for m in 0..basis.len() {
            if signal.coeffs[(i, m)].norm() > magnitude_tol {
                out.push(FrequencyPoint {
                    graph_freq: shift.eigenvalues[i],
                    hilbert_freq: basis.freq_label(m),
                });
            }
        }
    }
    out
}

/// Inner product of two signals over the same context (sum of coefficient
/// products, the Parseval form).
pub fn inner_product(f: &GeneralizedSignal, g: &GeneralizedSignal) -> Result<Complex64> {
    if !f.context.same_as(&g.context) {
        return Err(GspError::BasisMismatch);
    }
    Ok(f.coeffs
        .entries()
        .iter()
        .zip(g.coeffs.entries())
        .map(|(a, b)| a * b.conj())
        .sum())
}

/// Evaluation matrix of chosen grid modes at chosen points: row per point,
/// column per `(graph mode, Hilbert mode)` pair in grid order. Entry is
/// `phi_i(v) * xi_m(x)`.
pub fn evaluation_matrix(
    context: &SignalContext,
    points: &[(usize, f64)],
    phi_indices: &[usize],
    xi_indices: &[usize],
) -> Result<DenseMatrix> {
    let shift = &context.shift;
    let basis = &context.basis;
    for &(v, _) in points {
        if v >= shift.dim() {
            return Err(GspError::InvalidInput(format!("vertex {v} out of range")));
        }
    }
    let cols = phi_indices.len() * xi_indices.len();
    let mut out = DenseMatrix::zeros(points.len(), cols);
    for (r, &(v, x)) in points.iter().enumerate() {
        let xi_vals: Vec<Complex64> = xi_indices
            .iter()
            .map(|&m| basis.eval(m, x))
            .collect::<Result<_>>()?;
        for (a, &i) in phi_indices.iter().enumerate() {
            let phi = shift.phi(v, i);
            for (b, xi) in xi_vals.iter().enumerate() {
                out[(r, a * xi_indices.len() + b)] = phi * xi;
            }
        }
    }
    Ok(out)
}

/// One row of a sample table: a vertex, a point of the Hilbert domain, and
/// the observed complex value.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleRow {
    pub vertex: usize,
    pub x: f64,
    pub value: Complex64,
}

pub fn samples_to_csv(rows: &[SampleRow], path: &Path) -> Result<()> {
    let mut out = String::from("vertex,x,re,im\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.vertex,
            csvio::fmt_f64(row.x),
            csvio::fmt_f64(row.value.re),
            csvio::fmt_f64(row.value.im)
        ));
    }
    csvio::write_string(path, &out)
}

pub fn samples_from_csv(path: &Path) -> Result<Vec<SampleRow>> {
    let rows = csvio::read_rows(path, "vertex,x,re,im")?;
    rows.iter()
        .map(|(line, fields)| {
            Ok(SampleRow {
                vertex: csvio::parse_field(&fields[0], path, *line, "vertex id")?,
                x: csvio::parse_field(&fields[1], path, *line, "position")?,
                value: Complex64::new(
                    csvio::parse_field(&fields[2], path, *line, "real part")?,
                    csvio::parse_field(&fields[3], path, *line, "imaginary part")?,
                ),
            })
        })
        .collect()
}

/// Fits a full coefficient grid to a sample table by least squares on the
/// evaluation matrix. The fit interpolates the table exactly whenever the
/// samples determine the grid; the residual reports any misfit.
pub fn grid_from_samples(
    context: &SignalContext,
    rows: &[SampleRow],
) -> Result<(GeneralizedSignal, f64, bool)> {
    let points: Vec<(usize, f64)> = rows.iter().map(|r| (r.vertex, r.x)).collect();
    let phi_indices: Vec<usize> = (0..context.graph_dim()).collect();
    let xi_indices: Vec<usize> = (0..context.hilbert_dim()).collect();
    let m = evaluation_matrix(context, &points, &phi_indices, &xi_indices)?;
    let b: Vec<Complex64> = rows.iter().map(|r| r.value).collect();
    let sol = crate::numerics::lstsq(&m, &b)?;
    let mut coeffs = DenseMatrix::zeros(context.graph_dim(), context.hilbert_dim());
    for (flat, value) in sol.solution.iter().enumerate() {
        let i = flat / context.hilbert_dim();
        let mm = flat % context.hilbert_dim();
        coeffs[(i, mm)] = *value;
    }
    Ok((
        GeneralizedSignal::new(context.clone(), coeffs)?,
        sol.residual_norm,
        sol.rank_deficient,
    ))
}

fn grid_to_csv(coeffs: &DenseMatrix, context: &SignalContext, path: &Path) -> Result<()> {
    let mut out = String::from("phi_index,xi_index,re,im\n");
    for i in 0..coeffs.rows() {
        for m in 0..coeffs.cols() {
            let c = coeffs[(i, m)];
            out.push_str(&format!(
                "{},{},{},{}\n",
                i,
                context.basis.elements()[m].index,
                csvio::fmt_f64(c.re),
                csvio::fmt_f64(c.im)
            ));
        }
    }
    csvio::write_string(path, &out)
}

fn grid_from_csv(context: &SignalContext, path: &Path) -> Result<DenseMatrix> {
    let rows = csvio::read_rows(path, "phi_index,xi_index,re,im")?;
    let mut coeffs = DenseMatrix::zeros(context.graph_dim(), context.hilbert_dim());
    for (line, fields) in &rows {
        let i: usize = csvio::parse_field(&fields[0], path, *line, "graph mode index")?;
        let native: i64 = csvio::parse_field(&fields[1], path, *line, "hilbert element index")?;
        let re: f64 = csvio::parse_field(&fields[2], path, *line, "real part")?;
        let im: f64 = csvio::parse_field(&fields[3], path, *line, "imaginary part")?;
        if i >= context.graph_dim() {
            return Err(GspError::Parse {
                path: path.display().to_string(),
                line: *line,
                message: format!("graph mode {i} out of range"),
            });
        }
        let Some(m) = context.basis.position_of(native) else {
            return Err(GspError::Parse {
                path: path.display().to_string(),
                line: *line,
                message: format!("hilbert element {native} not in basis"),
            });
        };
        coeffs[(i, m)] = Complex64::new(re, im);
    }
    Ok(coeffs)
}
