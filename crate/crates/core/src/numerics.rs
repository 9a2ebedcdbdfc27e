//! Dense linear algebra and quadrature kernels shared by every other module.
//!
//! Matrices are stored row-major with complex entries. Eigendecomposition,
//! least squares and rank queries are delegated to `nalgebra` behind the
//! small API surface below; quadrature rules are built locally.

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use num_complex::Complex64;

use crate::error::{GspError, Result};

/// Relative tolerance separating genuine rank deficiency from rounding noise.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

const SYMMETRY_TOL: f64 = 1e-10;
const SIGN_TOL: f64 = 1e-9;

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            entries: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                entries.push(f(r, c));
            }
        }
        DenseMatrix { rows, cols, entries }
    }

    pub fn from_real_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        Self::from_fn(rows, cols, |r, c| Complex64::new(f(r, c), 0.0))
    }

    /// Builds from row-major complex entries; rejects NaN/Inf and shape mismatch.
    pub fn from_entries(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(GspError::DimensionMismatch(format!(
                "{}x{} matrix needs {} entries, got {}",
                rows,
                cols,
                rows * cols,
                entries.len()
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(GspError::InvalidInput("matrix entries must be finite".into()));
        }
        Ok(DenseMatrix { rows, cols, entries })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Complex64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn conjugate_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len(), "matvec shape mismatch");
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .map(|(a, x)| a * x)
                    .sum::<Complex64>()
            })
            .collect()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        for e in &mut out.entries {
            *e *= s;
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (e, o) in out.entries.iter_mut().zip(&other.entries) {
            *e -= o;
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (e, o) in out.entries.iter_mut().zip(&other.entries) {
            *e += o;
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest singular value; 0 for empty matrices.
    pub fn operator_norm(&self) -> f64 {
        if self.rows == 0 || self.cols == 0 {
            return 0.0;
        }
        let svd = SVD::new(self.to_na(), false, false);
        svd.singular_values.iter().cloned().fold(0.0, f64::max)
    }

    /// Keeps the rows listed in `indices`, in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> Self {
        Self::from_fn(indices.len(), self.cols, |r, c| self[(indices[r], c)])
    }

    /// Keeps the columns listed in `indices`, in the given order.
    pub fn select_columns(&self, indices: &[usize]) -> Self {
        Self::from_fn(self.rows, indices.len(), |r, c| self[(r, indices[c])])
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.entries.iter().all(|z| z.im.abs() <= tol)
    }

    fn to_na(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.rows, self.cols, |r, c| self[(r, c)])
    }

    fn to_na_real(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |r, c| self[(r, c)].re)
    }

    fn from_na_real(m: &DMatrix<f64>) -> Self {
        Self::from_real_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)])
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.entries[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[r * self.cols + c]
    }
}

/// Eigendecomposition of a real symmetric matrix.
///
/// Eigenvalues ascending; eigenvector columns orthonormal. The sign of each
/// column is fixed so its trailing component of magnitude above 1e-9 is
/// positive, which keeps stored spectra identical across runs.
pub fn sym_eig(m: &DenseMatrix) -> Result<(Vec<f64>, DenseMatrix)> {
    if m.rows != m.cols {
        return Err(GspError::DimensionMismatch(format!(
            "sym_eig needs a square matrix, got {}x{}",
            m.rows, m.cols
        )));
    }
    let scale = m.max_abs().max(1.0);
    let mut deviation: f64 = 0.0;
    for r in 0..m.rows {
        deviation = deviation.max(m[(r, r)].im.abs());
        for c in (r + 1)..m.cols {
            let d = (m[(r, c)] - m[(c, r)].conj()).norm();
            deviation = deviation.max(d).max(m[(r, c)].im.abs());
        }
    }
    if deviation > SYMMETRY_TOL * scale {
        return Err(GspError::NotSymmetric { deviation });
    }

    let mut a = m.to_na_real();
    // Symmetrize exactly before factorization so the decomposition is
    // insensitive to which triangle carried the rounding.
    let at = a.transpose();
    a = (a + at) * 0.5;
    let eig = SymmetricEigen::new(a);

    let n = m.rows;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));

    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::<f64>::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = eig.eigenvectors.column(src).clone_owned();
        if let Some(last) = (0..n).rev().find(|&r| col[r].abs() > SIGN_TOL) {
            if col[last] < 0.0 {
                col = -col;
            }
        }
        vectors.set_column(dst, &col);
    }
    Ok((eigenvalues, DenseMatrix::from_na_real(&vectors)))
}

/// Least-squares solution of `m x = b` via SVD.
#[derive(Debug, Clone)]
pub struct LstsqSolution {
    pub solution: Vec<Complex64>,
    /// Euclidean norm of `m x - b`.
    pub residual_norm: f64,
    pub rank: usize,
    /// True when singular values below `DEFAULT_RANK_TOL * sigma_max` were
    /// dropped; the returned solution is then the minimum-norm one.
    pub rank_deficient: bool,
}

pub fn lstsq(m: &DenseMatrix, b: &[Complex64]) -> Result<LstsqSolution> {
    if m.rows != b.len() {
        return Err(GspError::DimensionMismatch(format!(
            "lstsq: matrix has {} rows but rhs has {} entries",
            m.rows,
            b.len()
        )));
    }
    if m.rows == 0 || m.cols == 0 {
        return Ok(LstsqSolution {
            solution: vec![Complex64::new(0.0, 0.0); m.cols],
            residual_norm: b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(),
            rank: 0,
            rank_deficient: m.cols > 0,
        });
    }
    let na = m.to_na();
    let svd = SVD::new(na, true, true);
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let eps = DEFAULT_RANK_TOL * sigma_max;
    let rank = svd.singular_values.iter().filter(|&&s| s > eps).count();

    let rhs = DVector::from_iterator(b.len(), b.iter().cloned());
    let sol = svd
        .solve(&rhs, eps)
        .map_err(|e| GspError::InvalidInput(format!("svd solve failed: {e}")))?;
    let solution: Vec<Complex64> = sol.iter().cloned().collect();
    let residual: f64 = m
        .matvec(&solution)
        .iter()
        .zip(b)
        .map(|(y, t)| (y - t).norm_sqr())
        .sum::<f64>()
        .sqrt();
    Ok(LstsqSolution {
        solution,
        residual_norm: residual,
        rank,
        rank_deficient: rank < m.cols,
    })
}

/// Number of singular values above `rel_tol * sigma_max`.
pub fn numeric_rank(m: &DenseMatrix, rel_tol: f64) -> usize {
    assert!(rel_tol > 0.0 && rel_tol < 1.0, "rel_tol must lie in (0, 1)");
    if m.rows == 0 || m.cols == 0 {
        return 0;
    }
    let svd = SVD::new(m.to_na(), false, false);
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    if sigma_max == 0.0 {
        return 0;
    }
    svd.singular_values
        .iter()
        .filter(|&&s| s > rel_tol * sigma_max)
        .count()
}

/// Nodes and positive weights for integration over an interval.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub domain: (f64, f64),
}

impl QuadratureRule {
    pub fn integrate(&self, f: impl Fn(f64) -> Complex64) -> Complex64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| f(x) * w)
            .sum()
    }

    pub fn integrate_real(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| f(x) * w)
            .sum()
    }
}

/// Gauss-Legendre rule with `order` nodes on `domain`.
///
/// Exact for polynomials up to degree `2 * order - 1`.
pub fn gauss_quadrature(order: usize, domain: (f64, f64)) -> QuadratureRule {
    assert!(order >= 1, "quadrature order must be at least 1");
    let (a, b) = domain;
    assert!(b > a && a.is_finite() && b.is_finite(), "domain must be a finite interval");
    let n = order;
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for i in 1..=n {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                let (_, d2) = legendre_with_derivative(n, x);
                dp = d2;
                break;
            }
        }
        nodes.push(x);
        weights.push(2.0 / ((1.0 - x * x) * dp * dp));
    }
    // Guesses run from +1 toward -1; flip to ascending order.
    nodes.reverse();
    weights.reverse();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    QuadratureRule {
        nodes: nodes.iter().map(|&t| mid + half * t).collect(),
        weights: weights.iter().map(|&w| half * w).collect(),
        domain,
    }
}

/// Gauss-Chebyshev rule on [-1, 1] for the measure dx / sqrt(1 - x^2).
pub fn gauss_chebyshev(order: usize) -> QuadratureRule {
    assert!(order >= 1);
    let n = order as f64;
    let w = std::f64::consts::PI / n;
    let mut nodes: Vec<f64> = (1..=order)
        .map(|q| ((2.0 * q as f64 - 1.0) * std::f64::consts::PI / (2.0 * n)).cos())
        .collect();
    nodes.reverse();
    QuadratureRule {
        nodes,
        weights: vec![w; order],
        domain: (-1.0, 1.0),
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_symmetric(n: usize, rng: &mut impl Rng) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = rng.random_range(-1.0..1.0);
                m[(i, j)] = c(v, 0.0);
                m[(j, i)] = c(v, 0.0);
            }
        }
        m
    }

    fn reconstruct(values: &[f64], vectors: &DenseMatrix) -> DenseMatrix {
        let n = values.len();
        let mut lambda = DenseMatrix::zeros(n, n);
        for i in 0..n {
            lambda[(i, i)] = c(values[i], 0.0);
        }
        vectors.matmul(&lambda).matmul(&vectors.transpose())
    }

    #[test]
    fn identity_eigenpairs() {
        let (vals, vecs) = sym_eig(&DenseMatrix::identity(2)).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-12 && (vals[1] - 1.0).abs() < 1e-12);
        let gram = vecs.conjugate_transpose().matmul(&vecs);
        assert!(gram.sub(&DenseMatrix::identity(2)).max_abs() < 1e-10);
    }

    #[test]
    fn three_path_laplacian_eigenpairs() {
        // Path with interior vertex 0: edges (0,1) and (0,2).
        let l = DenseMatrix::from_real_fn(3, 3, |r, c_| match (r, c_) {
            (0, 0) => 2.0,
            (1, 1) | (2, 2) => 1.0,
            (0, 1) | (1, 0) | (0, 2) | (2, 0) => -1.0,
            _ => 0.0,
        });
        let (vals, vecs) = sym_eig(&l).unwrap();
        for (got, want) in vals.iter().zip([0.0, 1.0, 3.0]) {
            assert!((got - want).abs() < 1e-10, "eigenvalues {vals:?}");
        }
        let s3 = 3.0_f64.sqrt();
        let s2 = 2.0_f64.sqrt();
        let s6 = 6.0_f64.sqrt();
        let expected = [
            vec![1.0 / s3, 1.0 / s3, 1.0 / s3],
            vec![0.0, -1.0 / s2, 1.0 / s2],
            vec![-2.0 / s6, 1.0 / s6, 1.0 / s6],
        ];
        for (k, want) in expected.iter().enumerate() {
            for (r, w) in want.iter().enumerate() {
                assert!(
                    (vecs[(r, k)].re - w).abs() < 1e-10,
                    "eigenvector {k} row {r}: got {} want {}",
                    vecs[(r, k)].re,
                    w
                );
            }
        }
    }

    #[test]
    fn random_symmetric_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let m = random_symmetric(6, &mut rng);
        let (vals, vecs) = sym_eig(&m).unwrap();
        let err = reconstruct(&vals, &vecs).sub(&m).max_abs();
        assert!(err < 1e-8 * m.max_abs().max(1.0), "reconstruction error {err}");
    }

    #[test]
    fn large_symmetric_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = random_symmetric(200, &mut rng);
        let (vals, vecs) = sym_eig(&m).unwrap();
        let diff = reconstruct(&vals, &vecs).sub(&m);
        assert!(diff.frobenius_norm() <= 1e-8 * m.frobenius_norm());
    }

    #[test]
    fn asymmetric_rejected() {
        let mut m = DenseMatrix::identity(2);
        m[(0, 1)] = c(0.5, 0.0);
        assert!(matches!(sym_eig(&m), Err(GspError::NotSymmetric { .. })));
    }

    #[test]
    fn lstsq_exact_square_system() {
        let m = DenseMatrix::from_fn(3, 3, |r, c_| c((r * 3 + c_) as f64 + ((r == c_) as u8 as f64) * 5.0, 0.3 * r as f64));
        let x0 = vec![c(1.0, -2.0), c(0.5, 0.0), c(-3.0, 1.0)];
        let b = m.matvec(&x0);
        let sol = lstsq(&m, &b).unwrap();
        assert!(!sol.rank_deficient);
        for (got, want) in sol.solution.iter().zip(&x0) {
            assert!((got - want).norm() < 1e-10);
        }
    }

    #[test]
    fn lstsq_matches_normal_equations() {
        // Overdetermined 4x2; oracle solves (M^H M) x = M^H b directly.
        let m = DenseMatrix::from_fn(4, 2, |r, c_| c(1.0 + (r as f64) * 0.7 + (c_ as f64), 0.2 * (r as f64 - c_ as f64)));
        let b = vec![c(1.0, 0.0), c(0.0, 1.0), c(2.0, -1.0), c(-1.0, 0.5)];
        let mh = m.conjugate_transpose();
        let gram = mh.matmul(&m);
        let rhs = mh.matvec(&b);
        // 2x2 complex solve by hand.
        let det = gram[(0, 0)] * gram[(1, 1)] - gram[(0, 1)] * gram[(1, 0)];
        let oracle = [
            (rhs[0] * gram[(1, 1)] - gram[(0, 1)] * rhs[1]) / det,
            (gram[(0, 0)] * rhs[1] - gram[(1, 0)] * rhs[0]) / det,
        ];
        let sol = lstsq(&m, &b).unwrap();
        for (got, want) in sol.solution.iter().zip(oracle) {
            assert!((got - want).norm() < 1e-10);
        }
        // Residual orthogonal to the column space.
        let fitted = m.matvec(&sol.solution);
        let resid: Vec<Complex64> = fitted.iter().zip(&b).map(|(f, t)| f - t).collect();
        let proj = mh.matvec(&resid);
        let scale = b.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for p in proj {
            assert!(p.norm() < 1e-8 * scale.max(1.0));
        }
    }

    #[test]
    fn lstsq_rank_deficient_minimum_norm() {
        // Two identical columns: solution must split evenly (minimum norm).
        let m = DenseMatrix::from_fn(3, 2, |r, _| c(r as f64 + 1.0, 0.0));
        let b = vec![c(2.0, 0.0), c(4.0, 0.0), c(6.0, 0.0)];
        let sol = lstsq(&m, &b).unwrap();
        assert!(sol.rank_deficient);
        assert_eq!(sol.rank, 1);
        assert!((sol.solution[0] - sol.solution[1]).norm() < 1e-10);
        assert!((sol.solution[0] - c(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn lstsq_perturbations_never_improve() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = DenseMatrix::from_fn(6, 3, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let b: Vec<Complex64> = (0..6).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let sol = lstsq(&m, &b).unwrap();
        let base = sol.residual_norm;
        for _ in 0..100 {
            let delta: Vec<Complex64> = (0..3)
                .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * 1e-3)
                .collect();
            let x: Vec<Complex64> = sol.solution.iter().zip(&delta).map(|(s, d)| s + d).collect();
            let r: f64 = m.matvec(&x).iter().zip(&b).map(|(y, t)| (y - t).norm_sqr()).sum::<f64>().sqrt();
            assert!(r + 1e-12 >= base);
        }
    }

    #[test]
    fn rank_of_zero_identity_and_outer_product() {
        assert_eq!(numeric_rank(&DenseMatrix::zeros(4, 3), DEFAULT_RANK_TOL), 0);
        assert_eq!(numeric_rank(&DenseMatrix::identity(3), DEFAULT_RANK_TOL), 3);
        let u = [c(1.0, 0.5), c(-2.0, 0.0), c(0.3, -1.0)];
        let v = [c(0.7, 0.0), c(1.0, 1.0)];
        let outer = DenseMatrix::from_fn(3, 2, |r, c_| u[r] * v[c_]);
        assert_eq!(numeric_rank(&outer, DEFAULT_RANK_TOL), 1);
    }

    #[test]
    fn quadrature_order_one() {
        let rule = gauss_quadrature(1, (-1.0, 1.0));
        assert!(rule.nodes[0].abs() < 1e-15);
        assert!((rule.weights[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn quadrature_closed_form_integrals() {
        let rule = gauss_quadrature(64, (0.0, 2.0 * std::f64::consts::PI));
        let got = rule.integrate_real(|x| (x / 2.0).sin().powi(2));
        assert!((got - std::f64::consts::PI).abs() < 1e-12 * std::f64::consts::PI);

        let rule3 = gauss_quadrature(3, (-1.0, 1.0));
        let got = rule3.integrate_real(|x| x.powi(4));
        assert!((got - 0.4).abs() < 1e-12);
    }

    #[test]
    fn quadrature_weight_sum_and_node_layout() {
        for order in [1, 2, 5, 17, 64] {
            let rule = gauss_quadrature(order, (0.25, 3.5));
            let total: f64 = rule.weights.iter().sum();
            assert!((total - 3.25).abs() < 1e-12 * 3.25);
            assert!(rule.weights.iter().all(|&w| w > 0.0));
            assert!(rule.nodes.windows(2).all(|p| p[0] < p[1]));
            assert!(rule.nodes.iter().all(|&x| x > 0.25 && x < 3.5));
        }
    }

    #[test]
    fn quadrature_exact_to_degree_bound() {
        for order in [1usize, 2, 3, 5, 8] {
            let rule = gauss_quadrature(order, (-1.0, 1.0));
            for deg in 0..(2 * order) {
                let got = rule.integrate_real(|x| x.powi(deg as i32));
                let want = if deg % 2 == 0 { 2.0 / (deg as f64 + 1.0) } else { 0.0 };
                assert!((got - want).abs() < 1e-12, "order {order} degree {deg}");
            }
        }
    }

    #[test]
    fn gauss_chebyshev_moments() {
        let rule = gauss_chebyshev(16);
        let total: f64 = rule.weights.iter().sum();
        assert!((total - std::f64::consts::PI).abs() < 1e-12);
        // Integral of x^2 / sqrt(1 - x^2) over [-1, 1] is pi / 2.
        let got = rule.integrate_real(|x| x * x);
        assert!((got - std::f64::consts::PI / 2.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn eigen_reconstruction_holds(seed in 0u64..500, n in 1usize..24) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_symmetric(n, &mut rng);
            let (vals, vecs) = sym_eig(&m).unwrap();
            let err = reconstruct(&vals, &vecs).sub(&m).max_abs();
            prop_assert!(err <= 1e-8 * m.max_abs().max(1.0));
            let gram = vecs.conjugate_transpose().matmul(&vecs);
            prop_assert!(gram.sub(&DenseMatrix::identity(n)).max_abs() < 1e-10);
        }

        #[test]
        fn ascending_eigenvalues(seed in 0u64..200) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_symmetric(8, &mut rng);
            let (vals, _) = sym_eig(&m).unwrap();
            prop_assert!(vals.windows(2).all(|p| p[0] <= p[1]));
        }
    }
}
