//! Infection cascades on a graph and their joint spectra.
//!
//! The simulator runs a continuous-time process with independent exponential
//! clocks: one infection clock per (infected node, neighbor) pair and, for
//! the recovering models, one recovery clock per infected node. The earliest
//! clock fires. Recovered nodes are immune under SIR and return to
//! susceptible under SIRI, where infection clocks from still-infected
//! neighbors keep running (memorylessness makes redrawing after each firing
//! equivalent). Each node's infected-indicator is a right-continuous step
//! function on `[0, T]`.
//!
//! Two spectra are computed from a trace: the exact one, using the closed
//! form of each step function's Fourier coefficients, and a slotted one that
//! samples node status at the start of uniform time slots (an event on the
//! boundary is visible in that slot) and applies a unitary DFT along slots.
//! Both are then projected onto the graph eigenbasis.

use std::collections::BinaryHeap;
use std::path::Path;

use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};

use crate::csvio;
use crate::error::{GspError, Result};
use crate::graph::{Graph, ShiftOperator};
use crate::hilbert::{BasisKind, HilbertBasis};
use crate::numerics::DenseMatrix;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CascadeModel {
    Si,
    Sir,
    Siri,
}

impl std::fmt::Display for CascadeModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CascadeModel::Si => write!(f, "si"),
            CascadeModel::Sir => write!(f, "sir"),
            CascadeModel::Siri => write!(f, "siri"),
        }
    }
}

/// Status a node switches to at an event.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Infected,
    Recovered,
    Susceptible,
}

impl Status {
    fn as_str(self) -> &'static str {
        match self {
            Status::Infected => "infected",
            Status::Recovered => "recovered",
            Status::Susceptible => "susceptible",
        }
    }
}

/// Per-node ordered status-change events from one simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct CascadeTrace {
    pub model: CascadeModel,
    /// Mean of the infection waiting time.
    pub infection_mean: f64,
    /// Mean of the recovery waiting time; absent for SI.
    pub recovery_mean: Option<f64>,
    pub horizon: f64,
    pub events: Vec<Vec<(f64, Status)>>,
}

impl CascadeTrace {
    pub fn node_count(&self) -> usize {
        self.events.len()
    }

    /// True when the node is infected at time `t` (right-continuous).
    pub fn infected_at(&self, node: usize, t: f64) -> bool {
        let mut status = false;
        for &(time, s) in &self.events[node] {
            if time > t {
                break;
            }
            status = s == Status::Infected;
        }
        status
    }

    /// Maximal infected intervals of a node, closed at the horizon.
    pub fn infected_intervals(&self, node: usize) -> Vec<(f64, f64)> {
        let mut intervals = Vec::new();
        let mut open: Option<f64> = None;
        for &(time, s) in &self.events[node] {
            match (s, open) {
                (Status::Infected, None) => open = Some(time),
                (Status::Recovered | Status::Susceptible, Some(start)) => {
                    intervals.push((start, time));
                    open = None;
                }
                _ => {}
            }
        }
        if let Some(start) = open {
            intervals.push((start, self.horizon));
        }
        intervals
    }

    /// Total time the node spends infected.
    pub fn infected_duration(&self, node: usize) -> f64 {
        self.infected_intervals(node)
            .iter()
            .map(|(a, b)| b - a)
            .sum()
    }

    pub fn to_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::from("vertex,timestamp,status\n");
        for (v, events) in self.events.iter().enumerate() {
            for &(t, s) in events {
                out.push_str(&format!("{v},{},{}\n", csvio::fmt_f64(t), s.as_str()));
            }
        }
        csvio::write_string(path, &out)
    }

    /// Reads a trace file; model parameters are not stored in the file, so
    /// the caller supplies them along with the horizon and node count.
    pub fn from_csv(
        path: &Path,
        model: CascadeModel,
        infection_mean: f64,
        recovery_mean: Option<f64>,
        horizon: f64,
        node_count: usize,
    ) -> Result<CascadeTrace> {
        let rows = csvio::read_rows(path, "vertex,timestamp,status")?;
        let mut events: Vec<Vec<(f64, Status)>> = vec![Vec::new(); node_count];
        for (line, fields) in &rows {
            let v: usize = csvio::parse_field(&fields[0], path, *line, "vertex id")?;
            let t: f64 = csvio::parse_field(&fields[1], path, *line, "timestamp")?;
            let status = match fields[2].as_str() {
                "infected" => Status::Infected,
                "recovered" => Status::Recovered,
                "susceptible" => Status::Susceptible,
                other => {
                    return Err(GspError::Parse {
                        path: path.display().to_string(),
                        line: *line,
                        message: format!("unknown status `{other}`"),
                    })
                }
            };
            if v >= node_count {
                return Err(GspError::Parse {
                    path: path.display().to_string(),
                    line: *line,
                    message: format!("vertex {v} out of range"),
                });
            }
            events[v].push((t, status));
        }
        for node_events in &mut events {
            node_events.sort_by(|a, b| a.0.total_cmp(&b.0));
        }
        Ok(CascadeTrace {
            model,
            infection_mean,
            recovery_mean,
            horizon,
            events,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum EventKind {
    Attempt {
        source: usize,
        target: usize,
        epoch: u32,
    },
    Recovery {
        node: usize,
        epoch: u32,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct QueueEvent {
    time: f64,
    seq: u64,
    kind: EventKind,
}

impl Eq for QueueEvent {}

impl Ord for QueueEvent {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Reversed so the binary heap pops the earliest event; sequence
        // numbers break time ties deterministically.
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

impl PartialOrd for QueueEvent {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Copy, PartialEq)]
enum NodeState {
    Susceptible,
    Infected,
    Removed,
}

pub fn simulate(
    g: &Graph,
    model: CascadeModel,
    infection_mean: f64,
    recovery_mean: Option<f64>,
    horizon: f64,
    seeds: &[usize],
    rng_seed: u64,
) -> Result<CascadeTrace> {
    if seeds.is_empty() {
        return Err(GspError::InvalidInput("seed set must be nonempty".into()));
    }
    if !(infection_mean > 0.0) {
        return Err(GspError::InvalidInput("infection mean must be positive".into()));
    }
    let recovery = match (model, recovery_mean) {
        (CascadeModel::Si, r) => r,
        (CascadeModel::Sir | CascadeModel::Siri, Some(r)) if r > 0.0 => Some(r),
        (CascadeModel::Sir | CascadeModel::Siri, _) => {
            return Err(GspError::InvalidInput(
                "recovering models need a positive recovery mean".into(),
            ))
        }
    };
    if !(horizon > 0.0) {
        return Err(GspError::InvalidInput("horizon must be positive".into()));
    }
    let n = g.vertex_count();
    for &s in seeds {
        if s >= n {
            return Err(GspError::InvalidInput(format!("seed {s} out of range")));
        }
    }

    let neighbors: Vec<Vec<usize>> = (0..n).map(|v| g.neighbors(v)).collect();
    let infection = Exp::new(1.0 / infection_mean)
        .map_err(|e| GspError::InvalidInput(format!("bad infection rate: {e}")))?;
    let recovery_dist = recovery
        .map(|mean| Exp::new(1.0 / mean))
        .transpose()
        .map_err(|e| GspError::InvalidInput(format!("bad recovery rate: {e}")))?;

    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut state = vec![NodeState::Susceptible; n];
    let mut epoch = vec![0u32; n];
    let mut events: Vec<Vec<(f64, Status)>> = vec![Vec::new(); n];
    let mut queue: BinaryHeap<QueueEvent> = BinaryHeap::new();
    let mut seq = 0u64;

    let infect = |node: usize,
                      time: f64,
                      state: &mut Vec<NodeState>,
                      epoch: &mut Vec<u32>,
                      events: &mut Vec<Vec<(f64, Status)>>,
                      queue: &mut BinaryHeap<QueueEvent>,
                      rng: &mut ChaCha8Rng,
                      seq: &mut u64| {
        state[node] = NodeState::Infected;
        epoch[node] += 1;
        events[node].push((time, Status::Infected));
        for &nb in &neighbors[node] {
            let delay = infection.sample(rng);
            let at = time + delay;
            if at <= horizon {
                *seq += 1;
                queue.push(QueueEvent {
                    time: at,
                    seq: *seq,
                    kind: EventKind::Attempt {
                        source: node,
                        target: nb,
                        epoch: epoch[node],
                    },
                });
            }
        }
        if let Some(rec) = &recovery_dist {
            if model != CascadeModel::Si {
                let at = time + rec.sample(rng);
                if at <= horizon {
                    *seq += 1;
                    queue.push(QueueEvent {
                        time: at,
                        seq: *seq,
                        kind: EventKind::Recovery {
                            node,
                            epoch: epoch[node],
                        },
                    });
                }
            }
        }
    };

    let mut sorted_seeds = seeds.to_vec();
    sorted_seeds.sort_unstable();
    sorted_seeds.dedup();
    for &s in &sorted_seeds {
        infect(s, 0.0, &mut state, &mut epoch, &mut events, &mut queue, &mut rng, &mut seq);
    }

    while let Some(event) = queue.pop() {
        match event.kind {
            EventKind::Attempt {
                source,
                target,
                epoch: source_epoch,
            } => {
                if state[source] != NodeState::Infected || epoch[source] != source_epoch {
                    continue;
                }
                if state[target] == NodeState::Susceptible {
                    infect(
                        target,
                        event.time,
                        &mut state,
                        &mut epoch,
                        &mut events,
                        &mut queue,
                        &mut rng,
                        &mut seq,
                    );
                }
                // Under SIRI the target may become susceptible again, so the
                // source's arrival process keeps running.
                if model == CascadeModel::Siri && state[source] == NodeState::Infected {
                    let at = event.time + infection.sample(&mut rng);
                    if at <= horizon {
                        seq += 1;
                        queue.push(QueueEvent {
                            time: at,
                            seq,
                            kind: EventKind::Attempt {
                                source,
                                target,
                                epoch: epoch[source],
                            },
                        });
                    }
                }
            }
            EventKind::Recovery { node, epoch: at_epoch } => {
                if state[node] != NodeState::Infected || epoch[node] != at_epoch {
                    continue;
                }
                match model {
                    CascadeModel::Si => unreachable!("no recovery clocks under SI"),
                    CascadeModel::Sir => {
                        state[node] = NodeState::Removed;
                        events[node].push((event.time, Status::Recovered));
                    }
                    CascadeModel::Siri => {
                        state[node] = NodeState::Susceptible;
                        events[node].push((event.time, Status::Susceptible));
                    }
                }
            }
        }
    }

    Ok(CascadeTrace {
        model,
        infection_mean,
        recovery_mean: recovery,
        horizon,
        events,
    })
}

/// Spectrum grid with labeled axes, ready for heat-map plotting.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    /// Row labels: graph eigenvalues, ascending.
    pub graph_eigenvalues: Vec<f64>,
    /// Column labels: Hilbert/DFT frequencies, ascending.
    pub frequencies: Vec<f64>,
    pub magnitudes: Vec<Vec<f64>>,
}

impl Spectrum {
    pub fn energy(&self) -> f64 {
        self.magnitudes
            .iter()
            .flat_map(|row| row.iter())
            .map(|m| m * m)
            .sum()
    }

    /// Fraction of the energy outside the low-frequency corner. The corner
    /// is the first half of the graph modes crossed with frequencies of
    /// magnitude at most half the largest present.
    pub fn spectral_spread(&self) -> f64 {
        let total = self.energy();
        if total == 0.0 {
            return 0.0;
        }
        let n = self.graph_eigenvalues.len();
        let low_rows = n.div_ceil(2);
        let f_half = self.frequencies.iter().fold(0.0f64, |a, &f| a.max(f.abs())) / 2.0;
        let mut low = 0.0;
        for i in 0..low_rows {
            for (j, &f) in self.frequencies.iter().enumerate() {
                if f.abs() <= f_half {
                    low += self.magnitudes[i][j] * self.magnitudes[i][j];
                }
            }
        }
        1.0 - low / total
    }

    pub fn to_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::from("graph_eig,freq,magnitude\n");
        for (i, &eig) in self.graph_eigenvalues.iter().enumerate() {
            for (j, &freq) in self.frequencies.iter().enumerate() {
                out.push_str(&format!(
                    "{},{},{}\n",
                    csvio::fmt_f64(eig),
                    csvio::fmt_f64(freq),
                    csvio::fmt_f64(self.magnitudes[i][j])
                ));
            }
        }
        csvio::write_string(path, &out)
    }
}

fn step_basis_frequencies(trace: &CascadeTrace, basis: &HilbertBasis) -> Result<(f64, Vec<f64>)> {
    let normalizer = match basis.kind() {
        BasisKind::FourierSeries { period } => {
            if (period - trace.horizon).abs() > 1e-9 * trace.horizon.max(1.0) {
                return Err(GspError::BasisMismatch);
            }
            period.sqrt()
        }
        BasisKind::HalfIntegerFourier => {
            if (trace.horizon - TWO_PI).abs() > 1e-9 * TWO_PI {
                return Err(GspError::BasisMismatch);
            }
            TWO_PI.sqrt()
        }
        _ => return Err(GspError::BasisMismatch),
    };
    let freqs = basis.elements().iter().map(|e| e.freq_label).collect();
    Ok((normalizer, freqs))
}

/// Exact Fourier coefficients of every node's infected-indicator, projected
/// onto the graph eigenbasis. Complex-valued; `step_spectrum` wraps it into
/// magnitudes.
pub fn step_coefficients(
    trace: &CascadeTrace,
    shift: &ShiftOperator,
    basis: &HilbertBasis,
) -> Result<DenseMatrix> {
    if trace.node_count() != shift.dim() {
        return Err(GspError::DimensionMismatch(format!(
            "trace has {} nodes, shift has {}",
            trace.node_count(),
            shift.dim()
        )));
    }
    let (normalizer, freqs) = step_basis_frequencies(trace, basis)?;
    let n = trace.node_count();
    let mut h = DenseMatrix::zeros(n, freqs.len());
    for v in 0..n {
        let intervals = trace.infected_intervals(v);
        for (m, &omega) in freqs.iter().enumerate() {
            let mut total = Complex64::new(0.0, 0.0);
            for &(t1, t2) in &intervals {
                if omega == 0.0 {
                    total += Complex64::new(t2 - t1, 0.0);
                } else {
                    let e1 = Complex64::from_polar(1.0, -omega * t1);
                    let e2 = Complex64::from_polar(1.0, -omega * t2);
                    total += (e1 - e2) / Complex64::new(0.0, omega);
                }
            }
            h[(v, m)] = total / normalizer;
        }
    }
    Ok(shift.eigenvectors.conjugate_transpose().matmul(&h))
}

pub fn step_spectrum(
    trace: &CascadeTrace,
    shift: &ShiftOperator,
    basis: &HilbertBasis,
) -> Result<Spectrum> {
    let coeffs = step_coefficients(trace, shift, basis)?;
    let (_, freqs) = step_basis_frequencies(trace, basis)?;
    let magnitudes = (0..coeffs.rows())
        .map(|i| (0..coeffs.cols()).map(|j| coeffs[(i, j)].norm()).collect())
        .collect();
    Ok(Spectrum {
        graph_eigenvalues: shift.eigenvalues.clone(),
        frequencies: freqs,
        magnitudes,
    })
}

/// Status sampled at the start of `num_slots` uniform slots, unitary DFT
/// along slots, then graph projection. Frequencies are reported signed and
/// ascending.
pub fn tv_spectrum(
    trace: &CascadeTrace,
    shift: &ShiftOperator,
    num_slots: usize,
) -> Result<Spectrum> {
    if num_slots < 2 {
        return Err(GspError::InvalidInput("need at least 2 time slots".into()));
    }
    if trace.node_count() != shift.dim() {
        return Err(GspError::DimensionMismatch(format!(
            "trace has {} nodes, shift has {}",
            trace.node_count(),
            shift.dim()
        )));
    }
    let n = trace.node_count();
    let s = num_slots;
    let scale = 1.0 / (s as f64).sqrt();
    let mut bins = DenseMatrix::zeros(n, s);
    for v in 0..n {
        let samples: Vec<f64> = (0..s)
            .map(|slot| {
                let t = trace.horizon * slot as f64 / s as f64;
                if trace.infected_at(v, t) {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        for k in 0..s {
            let mut acc = Complex64::new(0.0, 0.0);
            for (slot, &x) in samples.iter().enumerate() {
                if x != 0.0 {
                    let phase = -TWO_PI * (k * slot) as f64 / s as f64;
                    acc += Complex64::from_polar(x, phase);
                }
            }
            bins[(v, k)] = acc * scale;
        }
    }
    let projected = shift.eigenvectors.conjugate_transpose().matmul(&bins);

    // Reorder bins by signed frequency: bin k is 2*pi*k/T for k <= S/2 and
    // 2*pi*(k-S)/T above.
    let signed = |k: usize| -> f64 {
        let centered = if k <= s / 2 { k as f64 } else { k as f64 - s as f64 };
        TWO_PI * centered / trace.horizon
    };
    let mut order: Vec<usize> = (0..s).collect();
    order.sort_by(|&a, &b| signed(a).total_cmp(&signed(b)));
    let frequencies: Vec<f64> = order.iter().map(|&k| signed(k)).collect();
    let magnitudes = (0..n)
        .map(|i| order.iter().map(|&k| projected[(i, k)].norm()).collect())
        .collect();
    Ok(Spectrum {
        graph_eigenvalues: shift.eigenvalues.clone(),
        frequencies,
        magnitudes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_shift, random_weighted_graph, ShiftKind, Topology};
    use crate::hilbert::make_basis;
    use crate::numerics::gauss_quadrature;

    fn legal(trace: &CascadeTrace) {
        for events in &trace.events {
            for pair in events.windows(2) {
                assert!(pair[0].0 < pair[1].0, "timestamps strictly increase");
            }
            for (idx, &(t, s)) in events.iter().enumerate() {
                assert!((0.0..=trace.horizon).contains(&t));
                match s {
                    Status::Infected => assert!(idx % 2 == 0, "infections at even positions"),
                    Status::Recovered | Status::Susceptible => assert!(idx % 2 == 1),
                }
            }
            match trace.model {
                CascadeModel::Si => assert!(events.len() <= 1),
                CascadeModel::Sir => assert!(events.len() <= 2),
                CascadeModel::Siri => {}
            }
        }
    }

    #[test]
    fn two_node_infection_time_matches_exponential_mean() {
        let g = Graph::new(2, [(0, 1, 1.0)]).unwrap();
        let mean = 0.7;
        let mut total = 0.0;
        let mut hits = 0usize;
        for seed in 0..10_000 {
            let trace = simulate(&g, CascadeModel::Si, mean, None, 1e6, &[0], seed).unwrap();
            if let Some(&(t, _)) = trace.events[1].first() {
                total += t;
                hits += 1;
            }
        }
        assert!(hits > 9_990);
        let empirical = total / hits as f64;
        assert!(
            (empirical - mean).abs() < 0.05 * mean,
            "empirical mean {empirical}"
        );
    }

    #[test]
    fn si_eventually_infects_connected_graph() {
        let g = random_weighted_graph(10, Topology::Er(0.4), 5).unwrap();
        // Seed 5 of Er(0.4) is connected: every vertex has an edge.
        let mut full = 0;
        for seed in 0..100 {
            let trace = simulate(&g, CascadeModel::Si, 1.0, None, 100.0, &[0], seed).unwrap();
            legal(&trace);
            if (0..10).all(|v| !trace.events[v].is_empty()) {
                full += 1;
            }
        }
        assert!(full >= 99, "full infection in {full}/100 runs");
    }

    #[test]
    fn fast_recovery_stops_outbreaks() {
        let g = random_weighted_graph(8, Topology::Complete, 1).unwrap();
        let mut quiet = 0;
        for seed in 0..200 {
            let trace = simulate(
                &g,
                CascadeModel::Sir,
                1.0,
                Some(1.0 / 1000.0),
                50.0,
                &[0],
                seed,
            )
            .unwrap();
            legal(&trace);
            let secondary = (1..8).filter(|&v| !trace.events[v].is_empty()).count();
            if secondary == 0 {
                quiet += 1;
            }
        }
        assert!(quiet >= 160, "quiet outbreaks {quiet}/200");
    }

    #[test]
    fn siri_nodes_reinfect() {
        let g = random_weighted_graph(6, Topology::Complete, 2).unwrap();
        let mut saw_reinfection = false;
        for seed in 0..50 {
            let trace = simulate(&g, CascadeModel::Siri, 0.5, Some(0.5), 40.0, &[0], seed).unwrap();
            legal(&trace);
            if trace.events.iter().any(|e| e.len() > 2) {
                saw_reinfection = true;
            }
        }
        assert!(saw_reinfection);
    }

    #[test]
    fn deterministic_under_seed() {
        let g = random_weighted_graph(12, Topology::Er(0.3), 9).unwrap();
        let a = simulate(&g, CascadeModel::Sir, 1.0, Some(2.0), 15.0, &[0, 3], 42).unwrap();
        let b = simulate(&g, CascadeModel::Sir, 1.0, Some(2.0), 15.0, &[0, 3], 42).unwrap();
        assert_eq!(a, b);
    }

    fn quadrature_oracle(
        trace: &CascadeTrace,
        shift: &ShiftOperator,
        basis: &HilbertBasis,
    ) -> DenseMatrix {
        // Integrates the indicator against each element piecewise, one
        // smooth Gauss rule per infected interval.
        let n = trace.node_count();
        let mut h = DenseMatrix::zeros(n, basis.len());
        for v in 0..n {
            for (t1, t2) in trace.infected_intervals(v) {
                if t2 - t1 < 1e-300 {
                    continue;
                }
                let rule = gauss_quadrature(48, (t1, t2));
                for m in 0..basis.len() {
                    h[(v, m)] += rule.integrate(|x| basis.eval(m, x).unwrap().conj());
                }
            }
        }
        shift.eigenvectors.conjugate_transpose().matmul(&h)
    }

    #[test]
    fn closed_form_matches_piecewise_quadrature() {
        let g = random_weighted_graph(8, Topology::Er(0.5), 3).unwrap();
        let shift = build_shift(&g, ShiftKind::Adjacency).unwrap();
        let horizon = 12.0;
        let basis = make_basis(BasisKind::FourierSeries { period: horizon }, 12).unwrap();
        for seed in 0..20 {
            let trace = simulate(&g, CascadeModel::Sir, 1.0, Some(1.5), horizon, &[0], seed).unwrap();
            let closed = step_coefficients(&trace, &shift, &basis).unwrap();
            let oracle = quadrature_oracle(&trace, &shift, &basis);
            assert!(
                closed.sub(&oracle).max_abs() < 1e-8,
                "seed {seed}: {:.3e}",
                closed.sub(&oracle).max_abs()
            );
        }
    }

    #[test]
    fn worked_step_coefficient() {
        // One node infected on [0, pi] of a 2*pi horizon: the half-integer
        // element at frequency 1/2 integrates to 2 * (1 - i) / sqrt(2*pi).
        let trace = CascadeTrace {
            model: CascadeModel::Sir,
            infection_mean: 1.0,
            recovery_mean: Some(1.0),
            horizon: TWO_PI,
            events: vec![
                vec![(0.0, Status::Infected), (std::f64::consts::PI, Status::Recovered)],
                vec![],
            ],
        };
        let basis = make_basis(BasisKind::HalfIntegerFourier, 2).unwrap();
        let m0 = basis.position_of(0).unwrap();
        // Direct H-side value, before graph mixing: use the identity shift.
        let eye = crate::graph::ShiftOperator::from_symmetric_matrix(
            ShiftKind::Adjacency,
            DenseMatrix::identity(2),
        )
        .unwrap();
        let coeffs = step_coefficients(&trace, &eye, &basis).unwrap();
        let want = Complex64::new(2.0, -2.0) / TWO_PI.sqrt();
        assert!((coeffs[(0, m0)] - want).norm() < 1e-12, "got {}", coeffs[(0, m0)]);
        let oracle = quadrature_oracle(&trace, &eye, &basis);
        assert!(coeffs.sub(&oracle).max_abs() < 1e-10);
    }

    #[test]
    fn empty_and_constant_traces() {
        let g = Graph::unweighted_path(3);
        let shift = build_shift(&g, ShiftKind::Laplacian).unwrap();
        let horizon = 5.0;
        let basis = make_basis(BasisKind::FourierSeries { period: horizon }, 8).unwrap();
        let empty = CascadeTrace {
            model: CascadeModel::Si,
            infection_mean: 1.0,
            recovery_mean: None,
            horizon,
            events: vec![vec![], vec![], vec![]],
        };
        let spectrum = step_spectrum(&empty, &shift, &basis).unwrap();
        assert!(spectrum.energy() == 0.0);
        assert!(spectrum.spectral_spread() == 0.0);

        // One node infected over the whole window: only the zero-frequency
        // column carries energy.
        let constant = CascadeTrace {
            events: vec![vec![(0.0, Status::Infected)], vec![], vec![]],
            ..empty
        };
        let spectrum = step_spectrum(&constant, &shift, &basis).unwrap();
        let dc = basis.position_of(0).unwrap();
        for (j, &f) in spectrum.frequencies.iter().enumerate() {
            let column_energy: f64 = (0..3).map(|i| spectrum.magnitudes[i][j].powi(2)).sum();
            if j == dc {
                assert!(f.abs() < 1e-12);
                assert!((column_energy - horizon).abs() < 1e-10);
            } else {
                assert!(column_energy < 1e-20);
            }
        }
    }

    #[test]
    fn period_mismatch_rejected() {
        let g = Graph::unweighted_path(2);
        let shift = build_shift(&g, ShiftKind::Laplacian).unwrap();
        let trace = simulate(&g, CascadeModel::Si, 1.0, None, 7.0, &[0], 1).unwrap();
        let basis = make_basis(BasisKind::FourierSeries { period: 6.0 }, 4).unwrap();
        assert_eq!(
            step_spectrum(&trace, &shift, &basis).unwrap_err(),
            GspError::BasisMismatch
        );
        let cheb = make_basis(BasisKind::Chebyshev, 4).unwrap();
        assert_eq!(
            step_spectrum(&trace, &shift, &cheb).unwrap_err(),
            GspError::BasisMismatch
        );
    }

    #[test]
    fn slotted_transform_small_cases() {
        let eye = crate::graph::ShiftOperator::from_symmetric_matrix(
            ShiftKind::Adjacency,
            DenseMatrix::identity(2),
        )
        .unwrap();
        // Node 0 infected for the whole window: all energy in the DC bin.
        let constant = CascadeTrace {
            model: CascadeModel::Si,
            infection_mean: 1.0,
            recovery_mean: None,
            horizon: 4.0,
            events: vec![vec![(0.0, Status::Infected)], vec![]],
        };
        let spectrum = tv_spectrum(&constant, &eye, 8).unwrap();
        for (j, &f) in spectrum.frequencies.iter().enumerate() {
            let energy: f64 = (0..2).map(|i| spectrum.magnitudes[i][j].powi(2)).sum();
            if f.abs() < 1e-12 {
                assert!(energy > 0.0);
            } else {
                assert!(energy < 1e-20, "bin {j}");
            }
        }

        // Two slots, infected only in the second: the two bins of the
        // two-point transform of (0, 1) have equal magnitude.
        let late = CascadeTrace {
            model: CascadeModel::Si,
            infection_mean: 1.0,
            recovery_mean: None,
            horizon: 4.0,
            events: vec![vec![(2.0, Status::Infected)], vec![]],
        };
        let spectrum = tv_spectrum(&late, &eye, 2).unwrap();
        let mags: Vec<f64> = spectrum
            .frequencies
            .iter()
            .enumerate()
            .map(|(j, _)| spectrum.magnitudes[0][j])
            .collect();
        assert!((mags[0] - mags[1]).abs() < 1e-12);
        assert!((mags[0] - 1.0 / 2.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn slot_boundary_event_is_visible_in_that_slot() {
        let eye = crate::graph::ShiftOperator::from_symmetric_matrix(
            ShiftKind::Adjacency,
            DenseMatrix::identity(1),
        )
        .unwrap();
        // Infection lands exactly on the second slot start (t = 1.0 of a
        // 4-slot horizon 4.0): slots read (0, 1, 1, 1).
        let trace = CascadeTrace {
            model: CascadeModel::Si,
            infection_mean: 1.0,
            recovery_mean: None,
            horizon: 4.0,
            events: vec![vec![(1.0, Status::Infected)]],
        };
        assert!(!trace.infected_at(0, 0.0));
        assert!(trace.infected_at(0, 1.0));
        let spectrum = tv_spectrum(&trace, &eye, 4).unwrap();
        // DFT of (0,1,1,1): DC magnitude 3/2.
        let dc = spectrum
            .frequencies
            .iter()
            .position(|f| f.abs() < 1e-12)
            .unwrap();
        assert!((spectrum.magnitudes[0][dc] - 1.5).abs() < 1e-12);
    }

    #[test]
    fn square_wave_dominant_frequency_agrees_across_methods() {
        let eye = crate::graph::ShiftOperator::from_symmetric_matrix(
            ShiftKind::Adjacency,
            DenseMatrix::identity(1),
        )
        .unwrap();
        let horizon = 10.0;
        // Slow square wave: infected on the first half of the window.
        let trace = CascadeTrace {
            model: CascadeModel::Siri,
            infection_mean: 1.0,
            recovery_mean: Some(1.0),
            horizon,
            events: vec![vec![(0.0, Status::Infected), (5.0, Status::Susceptible)]],
        };
        let basis = make_basis(BasisKind::FourierSeries { period: horizon }, 16).unwrap();
        let step = step_spectrum(&trace, &eye, &basis).unwrap();
        let tv = tv_spectrum(&trace, &eye, 20).unwrap();
        let dominant = |s: &Spectrum| -> f64 {
            let mut best = (0.0f64, 0.0f64);
            for (j, &f) in s.frequencies.iter().enumerate() {
                if f.abs() > 1e-12 && s.magnitudes[0][j] > best.1 {
                    best = (f.abs(), s.magnitudes[0][j]);
                }
            }
            best.0
        };
        let fundamental = TWO_PI / horizon;
        assert!((dominant(&step) - fundamental).abs() < 1e-9);
        assert!((dominant(&tv) - fundamental).abs() < 1e-9);
    }

    #[test]
    fn energy_accounts_for_infected_duration() {
        let g = random_weighted_graph(20, Topology::Er(0.3), 8).unwrap();
        let shift = build_shift(&g, ShiftKind::Adjacency).unwrap();
        let horizon = 20.0;
        let truncation = 512usize;
        let basis =
            make_basis(BasisKind::FourierSeries { period: horizon }, truncation).unwrap();
        let trace = simulate(&g, CascadeModel::Sir, 1.0, Some(2.0), horizon, &[0], 4).unwrap();
        let spectrum = step_spectrum(&trace, &shift, &basis).unwrap();
        let energy = spectrum.energy();
        let duration: f64 = (0..20).map(|v| trace.infected_duration(v)).sum();
        assert!(duration > 0.0);
        // Per interval, the coefficient at index k is bounded by
        // 2/(|omega_k| sqrt(T)), so the tail past the truncation is at most
        // 2T/(pi^2 M) per infected node (each SIR node has one interval).
        let infected_nodes = (0..20).filter(|&v| !trace.events[v].is_empty()).count() as f64;
        let tail_bound =
            infected_nodes * 2.0 * horizon / (std::f64::consts::PI.powi(2) * truncation as f64);
        assert!(tail_bound <= 0.01 * duration, "tail {tail_bound:.4} vs {duration:.4}");
        assert!(energy <= duration * (1.0 + 1e-6));
        assert!(duration - energy <= tail_bound, "gap {}", duration - energy);
    }

    #[test]
    fn trace_csv_round_trip() {
        let dir = std::env::temp_dir().join("gengsp_trace_csv");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("trace.csv");
        let g = random_weighted_graph(6, Topology::Complete, 3).unwrap();
        let trace = simulate(&g, CascadeModel::Siri, 0.8, Some(1.2), 9.0, &[1], 17).unwrap();
        trace.to_csv(&path).unwrap();
        let back = CascadeTrace::from_csv(&path, CascadeModel::Siri, 0.8, Some(1.2), 9.0, 6).unwrap();
        assert_eq!(trace, back);
    }

    #[test]
    fn invalid_parameters_rejected() {
        let g = Graph::unweighted_path(3);
        assert!(simulate(&g, CascadeModel::Si, 1.0, None, 5.0, &[], 0).is_err());
        assert!(simulate(&g, CascadeModel::Si, 0.0, None, 5.0, &[0], 0).is_err());
        assert!(simulate(&g, CascadeModel::Sir, 1.0, None, 5.0, &[0], 0).is_err());
        assert!(simulate(&g, CascadeModel::Si, 1.0, None, 5.0, &[7], 0).is_err());
    }
}
