//! Sample-set design and least-squares recovery of band-limited signals.
//!
//! A sample set is a finite list of (vertex, domain point) pairs. It
//! determines a product-band subspace exactly when the evaluation matrix on
//! that subspace has full column rank; recovery is then plain least squares
//! with the coefficients scattered back into the full grid.
//!
//! Three planning strategies are provided: sampling a small vertex subset
//! densely, spreading a partition of the vertex set over a split point set
//! (which is what drops the per-vertex count below the classical rate), and
//! fully asynchronous per-vertex random draws, which keep determination with
//! probability one and are re-drawn a bounded number of times otherwise.

use std::path::Path;

use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::csvio;
use crate::error::{GspError, Result};
use crate::graph;
use crate::hilbert::Domain;
use crate::numerics::{self, DenseMatrix, DEFAULT_RANK_TOL};
use crate::signal::{evaluation_matrix, GeneralizedSignal, SignalContext};

/// Finite subset of (vertex, point) pairs; pairs are distinct.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    points: Vec<(usize, f64)>,
}

impl SampleSet {
    pub fn new(points: Vec<(usize, f64)>) -> Result<Self> {
        for (i, &(v, x)) in points.iter().enumerate() {
            if !x.is_finite() {
                return Err(GspError::InvalidInput(format!(
                    "sample position for vertex {v} is not finite"
                )));
            }
            if points[..i].contains(&(v, x)) {
                return Err(GspError::InvalidInput(format!(
                    "duplicate sample ({v}, {x})"
                )));
            }
        }
        Ok(SampleSet { points })
    }

    pub fn points(&self) -> &[(usize, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Per-vertex sample counts.
    pub fn counts(&self, n: usize) -> Vec<usize> {
        let mut counts = vec![0usize; n];
        for &(v, _) in &self.points {
            counts[v] += 1;
        }
        counts
    }

    pub fn to_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::from("vertex,x\n");
        for &(v, x) in &self.points {
            out.push_str(&format!("{v},{}\n", csvio::fmt_f64(x)));
        }
        csvio::write_string(path, &out)
    }

    pub fn from_csv(path: &Path) -> Result<Self> {
        let rows = csvio::read_rows(path, "vertex,x")?;
        let points = rows
            .iter()
            .map(|(line, fields)| {
                Ok((
                    csvio::parse_field(&fields[0], path, *line, "vertex id")?,
                    csvio::parse_field(&fields[1], path, *line, "position")?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        SampleSet::new(points)
    }
}

/// Product band: chosen graph modes crossed with chosen Hilbert elements.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceSpec {
    pub phi_indices: Vec<usize>,
    pub xi_indices: Vec<usize>,
}

impl SubspaceSpec {
    pub fn new(mut phi_indices: Vec<usize>, mut xi_indices: Vec<usize>) -> Result<Self> {
        phi_indices.sort_unstable();
        phi_indices.dedup();
        xi_indices.sort_unstable();
        xi_indices.dedup();
        if phi_indices.is_empty() || xi_indices.is_empty() {
            return Err(GspError::InvalidInput("band must be nonempty".into()));
        }
        Ok(SubspaceSpec {
            phi_indices,
            xi_indices,
        })
    }

    /// The first `graph_modes` eigenvalue positions crossed with the
    /// `hilbert_modes` elements of smallest absolute frequency.
    pub fn low_band(context: &SignalContext, graph_modes: usize, hilbert_modes: usize) -> Result<Self> {
        if graph_modes == 0 || graph_modes > context.graph_dim() {
            return Err(GspError::InvalidInput(format!(
                "graph band {graph_modes} outside 1..={}",
                context.graph_dim()
            )));
        }
        if hilbert_modes == 0 || hilbert_modes > context.hilbert_dim() {
            return Err(GspError::InvalidInput(format!(
                "hilbert band {hilbert_modes} outside 1..={}",
                context.hilbert_dim()
            )));
        }
        let mut by_abs: Vec<usize> = (0..context.hilbert_dim()).collect();
        by_abs.sort_by(|&a, &b| {
            let fa = context.basis.freq_label(a);
            let fb = context.basis.freq_label(b);
            (fa.abs(), fa).partial_cmp(&(fb.abs(), fb)).unwrap()
        });
        SubspaceSpec::new(
            (0..graph_modes).collect(),
            by_abs[..hilbert_modes].to_vec(),
        )
    }

    pub fn dim(&self) -> usize {
        self.phi_indices.len() * self.xi_indices.len()
    }
}

/// Evaluation matrix of the band at the sample points: one row per sample,
/// one column per band entry in grid order.
pub fn sampling_matrix(
    w: &SampleSet,
    spec: &SubspaceSpec,
    context: &SignalContext,
) -> Result<DenseMatrix> {
    evaluation_matrix(context, w.points(), &spec.phi_indices, &spec.xi_indices)
}

/// True when the samples pin every coefficient of the band: the evaluation
/// matrix has full column rank at the given relative tolerance.
pub fn determines(
    w: &SampleSet,
    spec: &SubspaceSpec,
    context: &SignalContext,
    rel_tol: f64,
) -> Result<bool> {
    let m = sampling_matrix(w, spec, context)?;
    Ok(numerics::numeric_rank(&m, rel_tol) == spec.dim())
}

/// Position distribution for asynchronous draws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PositionDistribution {
    Uniform,
    TruncatedNormal { mean: f64, std_dev: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum SamplingStrategy {
    /// Dense sampling on a small invertible vertex subset.
    VertexSubset,
    /// Split the default point set over a vertex partition into `blocks`
    /// classes.
    Distributed { blocks: usize },
    /// Independent per-vertex draws with the given counts.
    RandomAsync {
        distribution: PositionDistribution,
        counts: Vec<usize>,
        seed: u64,
    },
}

const REDRAW_LIMIT: usize = 10;

pub fn plan_samples(
    spec: &SubspaceSpec,
    context: &SignalContext,
    strategy: &SamplingStrategy,
) -> Result<SampleSet> {
    let plan = match strategy {
        SamplingStrategy::VertexSubset => {
            let columns = context.shift.basis_columns(&spec.phi_indices);
            let vertices = graph::select_vertex_subset(&columns)?;
            let positions = default_positions(spec, context)?;
            let mut points = Vec::with_capacity(vertices.len() * positions.len());
            for &v in &vertices {
                for &x in &positions {
                    points.push((v, x));
                }
            }
            SampleSet::new(points)?
        }
        SamplingStrategy::Distributed { blocks } => {
            let columns = context.shift.basis_columns(&spec.phi_indices);
            let classes = graph::partition_vertices(&columns, *blocks)?;
            let positions = default_positions(spec, context)?;
            // Chunk the point set as evenly as possible; every vertex of
            // class j samples exactly chunk j.
            let total = positions.len();
            let base = total / blocks;
            let extra = total % blocks;
            let mut chunks = Vec::with_capacity(*blocks);
            let mut start = 0usize;
            for j in 0..*blocks {
                let size = base + usize::from(j < extra);
                chunks.push(&positions[start..start + size]);
                start += size;
            }
            let mut points = Vec::new();
            for (class, chunk) in classes.iter().zip(&chunks) {
                for &v in class {
                    for &x in chunk.iter() {
                        points.push((v, x));
                    }
                }
            }
            points.sort_by(|a, b| a.partial_cmp(b).unwrap());
            SampleSet::new(points)?
        }
        SamplingStrategy::RandomAsync {
            distribution,
            counts,
            seed,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut attempt = 0;
            loop {
                attempt += 1;
                let candidate = draw_positions(context, counts, *distribution, &mut rng)?;
                if determines(&candidate, spec, context, DEFAULT_RANK_TOL)? {
                    return Ok(candidate);
                }
                if attempt >= REDRAW_LIMIT {
                    return Err(GspError::PlanFailed {
                        attempts: REDRAW_LIMIT,
                    });
                }
            }
        }
    };
    if !determines(&plan, spec, context, DEFAULT_RANK_TOL)? {
        return Err(GspError::PlanFailed { attempts: 1 });
    }
    Ok(plan)
}

/// One asynchronous draw: `counts[v]` positions for each vertex, i.i.d. from
/// the distribution, no redraw on rank failure.
pub fn draw_positions(
    context: &SignalContext,
    counts: &[usize],
    distribution: PositionDistribution,
    rng: &mut ChaCha8Rng,
) -> Result<SampleSet> {
    if counts.len() != context.graph_dim() {
        return Err(GspError::DimensionMismatch(format!(
            "{} counts for {} vertices",
            counts.len(),
            context.graph_dim()
        )));
    }
    let domain = context.basis.domain();
    let mut points = Vec::new();
    for (v, &count) in counts.iter().enumerate() {
        let mut drawn: Vec<f64> = Vec::with_capacity(count);
        let mut guard = 0usize;
        while drawn.len() < count {
            guard += 1;
            if guard > 1000 * count.max(1) {
                return Err(GspError::PlanFailed { attempts: guard });
            }
            let x = match (domain, distribution) {
                (Domain::Interval(a, b), PositionDistribution::Uniform) => rng.random_range(a..b),
                (Domain::Interval(a, b), PositionDistribution::TruncatedNormal { mean, std_dev }) => {
                    let normal = Normal::new(mean, std_dev).map_err(|e| {
                        GspError::InvalidInput(format!("bad normal parameters: {e}"))
                    })?;
                    let mut candidate = normal.sample(rng);
                    let mut tries = 0;
                    while !(a..=b).contains(&candidate) {
                        candidate = normal.sample(rng);
                        tries += 1;
                        if tries > 10_000 {
                            return Err(GspError::InvalidInput(
                                "truncated normal rejection failed; distribution mass misses the domain".into(),
                            ));
                        }
                    }
                    candidate
                }
                (Domain::Discrete(n), PositionDistribution::Uniform) => {
                    rng.random_range(0..n) as f64
                }
                (Domain::Discrete(_), PositionDistribution::TruncatedNormal { .. }) => {
                    return Err(GspError::InvalidInput(
                        "truncated normal draws need an interval domain".into(),
                    ))
                }
            };
            if !drawn.contains(&x) {
                drawn.push(x);
            }
        }
        points.extend(drawn.into_iter().map(|x| (v, x)));
    }
    SampleSet::new(points)
}

/// Default deterministic positions for the constructive strategies: as many
/// as the Hilbert band needs, equispaced strictly inside the interval, or an
/// invertible row choice of the element columns on a discrete domain.
fn default_positions(spec: &SubspaceSpec, context: &SignalContext) -> Result<Vec<f64>> {
    let count = spec.xi_indices.len();
    match context.basis.domain() {
        Domain::Interval(..) => Ok(context.basis.equispaced_interior(count)),
        Domain::Discrete(n) => {
            let mut eval = DenseMatrix::zeros(n, count);
            for x in 0..n {
                for (c, &m) in spec.xi_indices.iter().enumerate() {
                    eval[(x, c)] = context.basis.eval(m, x as f64)?;
                }
            }
            let rows = graph::select_vertex_subset(&eval)?;
            Ok(rows.into_iter().map(|r| r as f64).collect())
        }
    }
}

/// Recovered band coefficients scattered into a full grid, with the fit
/// residual.
#[derive(Debug, Clone)]
pub struct Recovery {
    pub signal: GeneralizedSignal,
    /// Euclidean norm of `M_W y - values`; zero for in-band data on a
    /// determining set.
    pub residual_norm: f64,
    pub rank_deficient: bool,
}

pub fn recover(
    w: &SampleSet,
    values: &[Complex64],
    spec: &SubspaceSpec,
    context: &SignalContext,
) -> Result<Recovery> {
    if values.len() != w.len() {
        return Err(GspError::DimensionMismatch(format!(
            "{} values for {} samples",
            values.len(),
            w.len()
        )));
    }
    let m = sampling_matrix(w, spec, context)?;
    let sol = numerics::lstsq(&m, values)?;
    let mut coeffs = DenseMatrix::zeros(context.graph_dim(), context.hilbert_dim());
    let xi_len = spec.xi_indices.len();
    for (flat, y) in sol.solution.iter().enumerate() {
        let i = spec.phi_indices[flat / xi_len];
        let mm = spec.xi_indices[flat % xi_len];
        coeffs[(i, mm)] = *y;
    }
    Ok(Recovery {
        signal: GeneralizedSignal::new(context.clone(), coeffs)?,
        residual_norm: sol.residual_norm,
        rank_deficient: sol.rank_deficient,
    })
}
