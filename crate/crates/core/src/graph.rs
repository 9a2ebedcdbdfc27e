//! Weighted undirected graphs, shift operators, graph products, and the
//! row-partition machinery behind sample-count reduction.

use std::path::Path;

use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::csvio;
use crate::error::{GspError, Result};
use crate::numerics::{self, DenseMatrix, DEFAULT_RANK_TOL};

/// Two eigenvalues closer than this are treated as repeated.
pub const EIGENVALUE_SEPARATION: f64 = 1e-8;

/// Exact partition search is attempted up to this many vertices; beyond it a
/// greedy lower bound is reported instead.
pub const EXACT_PARTITION_LIMIT: usize = 24;

/// Simple undirected weighted graph with 0-based contiguous vertex ids.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
}

impl Graph {
    /// Validates: ids in range, no self-loops, at most one edge per pair,
    /// finite weights. Edges are stored with `u < v`.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        let mut normalized = Vec::new();
        for (u, v, w) in edges {
            if u >= n || v >= n {
                return Err(GspError::InvalidInput(format!(
                    "edge ({u},{v}) out of range for {n} vertices"
                )));
            }
            if u == v {
                return Err(GspError::InvalidInput(format!("self-loop at vertex {u}")));
            }
            if !w.is_finite() {
                return Err(GspError::InvalidInput(format!(
                    "edge ({u},{v}) has non-finite weight"
                )));
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                return Err(GspError::InvalidInput(format!(
                    "duplicate edge between {u} and {v}"
                )));
            }
            normalized.push((key.0, key.1, w));
        }
        normalized.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        Ok(Graph { n, edges: normalized })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|&(a, b, _)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }

    pub fn unweighted_path(n: usize) -> Graph {
        Graph::new(n, (1..n).map(|v| (v - 1, v, 1.0))).expect("valid path")
    }

    pub fn unweighted_cycle(n: usize) -> Graph {
        let mut edges: Vec<(usize, usize, f64)> = (1..n).map(|v| (v - 1, v, 1.0)).collect();
        if n > 2 {
            edges.push((n - 1, 0, 1.0));
        }
        Graph::new(n, edges).expect("valid cycle")
    }

    pub fn adjacency_matrix(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.n, self.n);
        for &(u, v, w) in &self.edges {
            m[(u, v)] = Complex64::new(w, 0.0);
            m[(v, u)] = Complex64::new(w, 0.0);
        }
        m
    }

    pub fn laplacian_matrix(&self) -> DenseMatrix {
        let mut m = self.adjacency_matrix().scale(Complex64::new(-1.0, 0.0));
        for v in 0..self.n {
            let degree: f64 = self
                .edges
                .iter()
                .filter(|&&(a, b, _)| a == v || b == v)
                .map(|&(_, _, w)| w)
                .sum();
            m[(v, v)] = Complex64::new(degree, 0.0);
        }
        m
    }

    /// Loads the edge-list format `u,v,w`; the vertex count is the largest id
    /// plus one.
    pub fn from_csv(path: &Path) -> Result<Graph> {
        let rows = csvio::read_rows(path, "u,v,w")?;
        let mut edges = Vec::with_capacity(rows.len());
        let mut max_id = 0usize;
        for (line, fields) in &rows {
            let u: usize = csvio::parse_field(&fields[0], path, *line, "vertex id")?;
            let v: usize = csvio::parse_field(&fields[1], path, *line, "vertex id")?;
            let w: f64 = csvio::parse_field(&fields[2], path, *line, "weight")?;
            max_id = max_id.max(u).max(v);
            edges.push((u, v, w));
        }
        let n = if edges.is_empty() { 0 } else { max_id + 1 };
        Graph::new(n, edges)
    }

    pub fn to_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::from("u,v,w\n");
        for &(u, v, w) in &self.edges {
            out.push_str(&format!("{u},{v},{}\n", csvio::fmt_f64(w)));
        }
        csvio::write_string(path, &out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftKind {
    Adjacency,
    Laplacian,
}

impl std::fmt::Display for ShiftKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ShiftKind::Adjacency => write!(f, "adjacency"),
            ShiftKind::Laplacian => write!(f, "laplacian"),
        }
    }
}

/// Symmetric graph shift with its eigendecomposition attached.
///
/// Eigenvalues ascend and the eigenvector columns are orthonormal with the
/// deterministic sign fix from [`numerics::sym_eig`].
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftOperator {
    pub kind: ShiftKind,
    pub matrix: DenseMatrix,
    pub eigenvalues: Vec<f64>,
    /// Columns are the eigenvectors, in eigenvalue order.
    pub eigenvectors: DenseMatrix,
    /// Set when two eigenvalues are closer than [`EIGENVALUE_SEPARATION`];
    /// the spectral theory downstream implicitly assumes a simple spectrum,
    /// so callers may want to know. Operations still proceed.
    pub repeated_eigenvalues: bool,
}

impl ShiftOperator {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Entry `v` of eigenvector `i`.
    pub fn phi(&self, v: usize, i: usize) -> Complex64 {
        self.eigenvectors[(v, i)]
    }

    pub fn basis_columns(&self, indices: &[usize]) -> DenseMatrix {
        self.eigenvectors.select_columns(indices)
    }

    /// Builds a shift from an explicit symmetric matrix. Used for operators
    /// that do not come from a simple graph (the grid diagnostics in the
    /// filter module exercise this).
    pub fn from_symmetric_matrix(kind: ShiftKind, matrix: DenseMatrix) -> Result<ShiftOperator> {
        let (eigenvalues, eigenvectors) = numerics::sym_eig(&matrix)?;
        let repeated = eigenvalues
            .windows(2)
            .any(|p| (p[1] - p[0]).abs() < EIGENVALUE_SEPARATION);
        Ok(ShiftOperator {
            kind,
            matrix,
            eigenvalues,
            eigenvectors,
            repeated_eigenvalues: repeated,
        })
    }
}

pub fn build_shift(g: &Graph, kind: ShiftKind) -> Result<ShiftOperator> {
    if g.vertex_count() == 0 {
        return Err(GspError::InvalidInput("graph must have at least one vertex".into()));
    }
    let matrix = match kind {
        ShiftKind::Adjacency => g.adjacency_matrix(),
        ShiftKind::Laplacian => g.laplacian_matrix(),
    };
    ShiftOperator::from_symmetric_matrix(kind, matrix)
}

/// Cartesian product: `(v1,u1)` and `(v2,u2)` are adjacent when one factor
/// matches and the other pair is an edge, inheriting that edge's weight.
/// Vertex `(v,u)` maps to id `v * g2.n + u`.
pub fn product_graph(g: &Graph, g2: &Graph) -> Result<Graph> {
    if g.vertex_count() == 0 || g2.vertex_count() == 0 {
        return Err(GspError::InvalidInput("product factors must be nonempty".into()));
    }
    let n2 = g2.vertex_count();
    let mut edges = Vec::new();
    for v in 0..g.vertex_count() {
        for &(u1, u2, w) in g2.edges() {
            edges.push((v * n2 + u1, v * n2 + u2, w));
        }
    }
    for &(v1, v2, w) in g.edges() {
        for u in 0..n2 {
            edges.push((v1 * n2 + u, v2 * n2 + u, w));
        }
    }
    Graph::new(g.vertex_count() * n2, edges)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Topology {
    Complete,
    Cycle,
    Path,
    Er(f64),
}

/// Random graph with the chosen topology and i.i.d. uniform (0, 1] weights.
/// Deterministic for a fixed seed.
pub fn random_weighted_graph(n: usize, topology: Topology, seed: u64) -> Result<Graph> {
    if n == 0 {
        return Err(GspError::InvalidInput("graph must have at least one vertex".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // 1 - U[0,1) lands in (0, 1].
    let weight = |rng: &mut ChaCha8Rng| 1.0 - rng.random::<f64>();
    let mut edges = Vec::new();
    match topology {
        Topology::Complete => {
            for u in 0..n {
                for v in (u + 1)..n {
                    let w = weight(&mut rng);
                    edges.push((u, v, w));
                }
            }
        }
        Topology::Cycle => {
            for v in 1..n {
                let w = weight(&mut rng);
                edges.push((v - 1, v, w));
            }
            if n > 2 {
                let w = weight(&mut rng);
                edges.push((n - 1, 0, w));
            }
        }
        Topology::Path => {
            for v in 1..n {
                let w = weight(&mut rng);
                edges.push((v - 1, v, w));
            }
        }
        Topology::Er(p) => {
            if !(0.0..=1.0).contains(&p) {
                return Err(GspError::InvalidInput(format!("edge probability {p} outside [0,1]")));
            }
            for u in 0..n {
                for v in (u + 1)..n {
                    if rng.random::<f64>() < p {
                        let w = weight(&mut rng);
                        edges.push((u, v, w));
                    }
                }
            }
        }
    }
    Graph::new(n, edges)
}

/// Result of the disjoint-partition count: the number of blocks and whether
/// the search proved it maximal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PartitionCount {
    pub value: usize,
    pub exact: bool,
}

/// Largest number of disjoint vertex-index blocks over which the rows of
/// `columns` stay full column rank.
///
/// Exhaustive (backtracking with rank pruning) up to
/// [`EXACT_PARTITION_LIMIT`] vertices; past that a greedy lower bound is
/// returned, marked exact only when it meets the `floor(n/k)` ceiling.
pub fn delta(columns: &DenseMatrix) -> Result<PartitionCount> {
    let n = columns.rows();
    let k = columns.cols();
    check_independent_columns(columns)?;
    let upper = n / k;
    if upper <= 1 {
        return Ok(PartitionCount { value: 1.min(upper.max(1)), exact: true });
    }
    if n <= EXACT_PARTITION_LIMIT {
        for t in (2..=upper).rev() {
            if search_partition(columns, t).is_some() {
                return Ok(PartitionCount { value: t, exact: true });
            }
        }
        Ok(PartitionCount { value: 1, exact: true })
    } else {
        let value = greedy_partition(columns).len().max(1);
        Ok(PartitionCount { value, exact: value == upper })
    }
}

/// Row indices whose square submatrix of `columns` is invertible, found by
/// partial-pivoted elimination. Deterministic; returned sorted.
pub fn select_vertex_subset(columns: &DenseMatrix) -> Result<Vec<usize>> {
    let n = columns.rows();
    let k = columns.cols();
    check_independent_columns(columns)?;
    let mut work = columns.clone();
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    let scale = columns.max_abs().max(1.0);
    for col in 0..k {
        let mut pivot = None;
        let mut best = 0.0;
        for r in 0..n {
            if chosen.contains(&r) {
                continue;
            }
            let mag = work[(r, col)].norm();
            if mag > best {
                best = mag;
                pivot = Some(r);
            }
        }
        let Some(p) = pivot else {
            return Err(GspError::DependentColumns);
        };
        if best <= 1e-12 * scale {
            return Err(GspError::DependentColumns);
        }
        let pivot_row: Vec<Complex64> = (0..k).map(|j| work[(p, j)]).collect();
        for r in 0..n {
            if r == p || chosen.contains(&r) {
                continue;
            }
            let factor = work[(r, col)] / pivot_row[col];
            for j in 0..k {
                let sub = factor * pivot_row[j];
                work[(r, j)] -= sub;
            }
        }
        chosen.push(p);
    }
    chosen.sort_unstable();
    Ok(chosen)
}

/// Splits `{0..n-1}` into `t` disjoint blocks covering every index, each with
/// full-column-rank row restriction.
pub fn partition_vertices(columns: &DenseMatrix, t: usize) -> Result<Vec<Vec<usize>>> {
    let n = columns.rows();
    check_independent_columns(columns)?;
    if t == 0 || t > n / columns.cols().max(1) {
        return Err(GspError::InfeasiblePartition { requested: t });
    }
    if t == 1 {
        return Ok(vec![(0..n).collect()]);
    }
    let mut blocks = if n <= EXACT_PARTITION_LIMIT {
        search_partition(columns, t).ok_or(GspError::InfeasiblePartition { requested: t })?
    } else {
        let greedy = greedy_partition(columns);
        if greedy.len() < t {
            return Err(GspError::InfeasiblePartition { requested: t });
        }
        greedy.into_iter().take(t).collect()
    };
    // Spread unassigned rows across the blocks; extra rows never lower rank.
    let assigned: std::collections::HashSet<usize> = blocks.iter().flatten().cloned().collect();
    let mut next = 0usize;
    for r in 0..n {
        if !assigned.contains(&r) {
            blocks[next % t].push(r);
            next += 1;
        }
    }
    for b in &mut blocks {
        b.sort_unstable();
    }
    Ok(blocks)
}

fn check_independent_columns(columns: &DenseMatrix) -> Result<()> {
    let (n, k) = (columns.rows(), columns.cols());
    if k == 0 || k > n {
        return Err(GspError::DependentColumns);
    }
    if numerics::numeric_rank(columns, DEFAULT_RANK_TOL) < k {
        return Err(GspError::DependentColumns);
    }
    Ok(())
}

/// Incremental orthonormal basis used for rank tracking during the search.
#[derive(Clone)]
struct RankTracker {
    basis: Vec<Vec<Complex64>>,
    dim: usize,
}

impl RankTracker {
    fn new(dim: usize) -> Self {
        RankTracker { basis: Vec::new(), dim }
    }

    fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Residual of `row` against the current basis; `Some(unit residual)`
    /// when the row increases the rank.
    fn residual(&self, row: &[Complex64], scale: f64) -> Option<Vec<Complex64>> {
        let mut r = row.to_vec();
        for b in &self.basis {
            let coeff: Complex64 = r.iter().zip(b).map(|(x, y)| x * y.conj()).sum();
            for (ri, bi) in r.iter_mut().zip(b) {
                *ri -= coeff * bi;
            }
        }
        let norm = r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-9 * scale {
            for ri in &mut r {
                *ri /= Complex64::new(norm, 0.0);
            }
            Some(r)
        } else {
            None
        }
    }

    fn full(&self) -> bool {
        self.basis.len() == self.dim
    }
}

fn search_partition(columns: &DenseMatrix, t: usize) -> Option<Vec<Vec<usize>>> {
    let n = columns.rows();
    let k = columns.cols();
    if t * k > n {
        return None;
    }
    let scale = columns.max_abs().max(1.0);
    let rows: Vec<Vec<Complex64>> = (0..n).map(|r| columns.row(r).to_vec()).collect();
    let mut trackers: Vec<RankTracker> = (0..t).map(|_| RankTracker::new(k)).collect();
    let mut assignment: Vec<Vec<usize>> = vec![Vec::new(); t];

    fn recurse(
        r: usize,
        rows: &[Vec<Complex64>],
        trackers: &mut Vec<RankTracker>,
        assignment: &mut Vec<Vec<usize>>,
        scale: f64,
        k: usize,
    ) -> bool {
        let deficit: usize = trackers.iter().map(|tr| k - tr.rank()).sum();
        if deficit == 0 {
            return true;
        }
        if rows.len() - r < deficit {
            return false;
        }
        // Try placing row r into each block that it helps; identical empty
        // blocks are interchangeable, so only the first empty one is tried.
        let mut tried_empty = false;
        for b in 0..trackers.len() {
            if trackers[b].full() {
                continue;
            }
            if trackers[b].rank() == 0 {
                if tried_empty {
                    continue;
                }
                tried_empty = true;
            }
            if let Some(unit) = trackers[b].residual(&rows[r], scale) {
                trackers[b].basis.push(unit);
                assignment[b].push(r);
                if recurse(r + 1, rows, trackers, assignment, scale, k) {
                    return true;
                }
                trackers[b].basis.pop();
                assignment[b].pop();
            }
        }
        // Leave row r unassigned.
        recurse(r + 1, rows, trackers, assignment, scale, k)
    }

    if recurse(0, &rows, &mut trackers, &mut assignment, scale, k) {
        Some(assignment)
    } else {
        None
    }
}

fn greedy_partition(columns: &DenseMatrix) -> Vec<Vec<usize>> {
    let n = columns.rows();
    let k = columns.cols();
    let scale = columns.max_abs().max(1.0);
    let mut used = vec![false; n];
    let mut blocks = Vec::new();
    loop {
        let mut tracker = RankTracker::new(k);
        let mut block = Vec::new();
        for r in 0..n {
            if used[r] || tracker.full() {
                continue;
            }
            if let Some(unit) = tracker.residual(columns.row(r), scale) {
                tracker.basis.push(unit);
                block.push(r);
            }
        }
        if tracker.full() {
            for &r in &block {
                used[r] = true;
            }
            blocks.push(block);
        } else {
            break;
        }
    }
    blocks
}
