//! Finite-length experiments: Tanner graph sampling, BEC transmission,
//! peeling and iteration-limited BP erasure decoding, block error rates,
//! and residual-graph evolution statistics.

use std::ops::Range;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::ensembles::{EnsembleError, EnsembleSpec};
use crate::protograph::ParityCheck;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FiniteLengthError {
    #[error("finite_length: invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("finite_length: socket exhaustion at check position {0}")]
    SocketExhaustion(usize),
    #[error("finite_length: parallel-edge retry budget exceeded")]
    RetryBudgetExceeded,
    #[error(transparent)]
    Ensemble(#[from] EnsembleError),
}

fn invalid(msg: impl Into<String>) -> FiniteLengthError {
    FiniteLengthError::InvalidParameters(msg.into())
}

/// How variable node edges attach to check nodes when sampling a graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplingModel {
    /// Pick per spec: one edge per connected check position when every
    /// position's node degree equals its connectivity column sum, otherwise
    /// independent uniform offsets.
    Auto,
    /// Exactly one edge from a variable to every check position its column
    /// connects to, landing on a uniformly chosen free check socket there.
    OnePerPosition,
    /// Each edge independently picks one of its column's check positions
    /// uniformly, then a uniform check node at that position.
    UniformOffsets,
}

/// Sampled bipartite Tanner graph with position labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TannerGraph {
    var_adj: Vec<Vec<u32>>,
    chk_adj: Vec<Vec<u32>>,
    var_pos: Vec<u32>,
    chk_pos: Vec<u32>,
    punctured: Vec<bool>,
    nodes_per_position: usize,
    /// Variable index range of the overlapped positions, when the graph came
    /// from an OC spec.
    overlapped_vars: Option<Range<usize>>,
}

impl TannerGraph {
    pub fn num_variables(&self) -> usize {
        self.var_adj.len()
    }

    pub fn num_checks(&self) -> usize {
        self.chk_adj.len()
    }

    pub fn num_edges(&self) -> usize {
        self.var_adj.iter().map(Vec::len).sum()
    }

    pub fn variable_degree(&self, v: usize) -> usize {
        self.var_adj[v].len()
    }

    pub fn check_degree(&self, c: usize) -> usize {
        self.chk_adj[c].len()
    }

    pub fn variable_position(&self, v: usize) -> usize {
        self.var_pos[v] as usize
    }

    pub fn punctured(&self) -> &[bool] {
        &self.punctured
    }

    pub fn nodes_per_position(&self) -> usize {
        self.nodes_per_position
    }

    pub fn overlapped_vars(&self) -> Option<Range<usize>> {
        self.overlapped_vars.clone()
    }

    /// Graph of a lifted parity-check matrix; positions are base columns.
    pub fn from_parity_check(pc: &ParityCheck) -> Self {
        let z = pc.z().max(1);
        let chk_adj: Vec<Vec<u32>> = (0..pc.rows()).map(|i| pc.row(i).to_vec()).collect();
        let var_adj = {
            let mut cols: Vec<Vec<u32>> = vec![Vec::new(); pc.cols()];
            for (i, row) in chk_adj.iter().enumerate() {
                for &j in row {
                    cols[j as usize].push(i as u32);
                }
            }
            cols
        };
        TannerGraph {
            var_pos: (0..pc.cols()).map(|j| (j / z) as u32).collect(),
            chk_pos: (0..pc.rows()).map(|i| (i / z) as u32).collect(),
            punctured: pc.punctured().to_vec(),
            nodes_per_position: z,
            overlapped_vars: None,
            var_adj,
            chk_adj,
        }
    }

    /// Erasure pattern over the channel: transmitted bits erase
    /// independently with probability `eps`, punctured bits are always
    /// erased.
    pub fn sample_erasures<R: Rng>(&self, eps: f64, rng: &mut R) -> Vec<bool> {
        self.punctured
            .iter()
            .map(|&p| p || rng.gen::<f64>() < eps)
            .collect()
    }

    /// Exports the adjacency in alist format.
    pub fn write_alist<W: std::io::Write>(&self, w: W) -> std::io::Result<()> {
        crate::alist::write_alist(w, self.num_variables(), &self.chk_adj)
    }
}

/// Plain BEC erasure pattern over `n` transmitted bits.
pub fn sample_erasures<R: Rng>(n: usize, eps: f64, rng: &mut R) -> Vec<bool> {
    (0..n).map(|_| rng.gen::<f64>() < eps).collect()
}

// ---------------------------------------------------------------------------
// Graph sampling
// ---------------------------------------------------------------------------

const PARALLEL_EDGE_RETRIES: usize = 100;

/// Samples a Tanner graph from a random-based ensemble, `m` variable nodes
/// per position. Deterministic in `(spec, m, seed)`.
pub fn sample_tanner_graph(
    spec: &EnsembleSpec,
    m: usize,
    seed: u64,
) -> Result<TannerGraph, FiniteLengthError> {
    sample_tanner_graph_with_model(spec, m, seed, SamplingModel::Auto)
}

/// As [`sample_tanner_graph`] with an explicit edge-attachment model.
pub fn sample_tanner_graph_with_model(
    spec: &EnsembleSpec,
    m: usize,
    seed: u64,
    model: SamplingModel,
) -> Result<TannerGraph, FiniteLengthError> {
    let law = spec.base_law();
    let dl = match law.entries() {
        [(d, _)] => *d as usize,
        _ => return Err(invalid("graph sampling supports regular degree laws")),
    };
    let dr = spec.dr() as usize;
    if m == 0 || (m * dl) % dr != 0 {
        return Err(invalid(format!("m*dl must be divisible by dr, got m={m}, dl={dl}, dr={dr}")));
    }
    let t = spec.connectivity();
    let profile = spec.degree_profile();
    let q = t.cols();
    let p = t.rows();
    let per_pos_checks = m * dl / dr;

    let one_per_position_fits = (0..q).all(|i| {
        profile
            .regular_degree_at(i)
            .is_some_and(|d| d as usize == t.col_sum(i))
    }) && (0..p).all(|u| t.row_sum(u) <= dl);
    let model = match model {
        SamplingModel::Auto => {
            if one_per_position_fits {
                SamplingModel::OnePerPosition
            } else {
                SamplingModel::UniformOffsets
            }
        }
        m => m,
    };

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let num_vars = q * m;
    let num_chks = p * per_pos_checks;
    let mut var_adj: Vec<Vec<u32>> = vec![Vec::new(); num_vars];
    let mut chk_adj: Vec<Vec<u32>> = vec![Vec::new(); num_chks];

    match model {
        SamplingModel::OnePerPosition => {
            if !one_per_position_fits {
                return Err(invalid(
                    "one-per-position model requires node degrees equal to connectivity column sums",
                ));
            }
            // per check position: a socket pool of per_pos_checks * dr slots
            let mut sockets: Vec<u32> = Vec::with_capacity(per_pos_checks * dr);
            for u in 0..p {
                sockets.clear();
                for c in 0..per_pos_checks {
                    let chk = (u * per_pos_checks + c) as u32;
                    sockets.extend(std::iter::repeat(chk).take(dr));
                }
                sockets.shuffle(&mut rng);
                let mut next = 0;
                for v_pos in t.row_neighbors(u) {
                    for node in 0..m {
                        let var = (v_pos * m + node) as u32;
                        let chk = sockets[next];
                        next += 1;
                        var_adj[var as usize].push(chk);
                        chk_adj[chk as usize].push(var);
                    }
                }
                debug_assert!(next <= sockets.len());
            }
        }
        SamplingModel::UniformOffsets => {
            // per variable: node degree = profile degree; each edge picks a
            // support position uniformly, then a uniform check node there;
            // overlapped OC variables split their edges between the chains
            let half_rows = p / 2;
            let overlap = spec.overlapped_positions();
            for i in 0..q {
                let degree = profile
                    .regular_degree_at(i)
                    .ok_or_else(|| invalid("mixed-degree position in offsets model"))? as usize;
                let support: Vec<usize> = t.col_neighbors(i).collect();
                let groups: Vec<(Vec<usize>, usize)> = match &overlap {
                    Some(r) if r.contains(&i) => {
                        let (a, b): (Vec<usize>, Vec<usize>) =
                            support.iter().partition(|&&u| u < half_rows);
                        vec![(a, degree / 2), (b, degree / 2)]
                    }
                    _ => vec![(support, degree)],
                };
                for node in 0..m {
                    let var = (i * m + node) as u32;
                    for (positions, edges) in &groups {
                        for _ in 0..*edges {
                            let mut placed = false;
                            for _ in 0..PARALLEL_EDGE_RETRIES {
                                let u = positions[rng.gen_range(0..positions.len())];
                                let chk = (u * per_pos_checks + rng.gen_range(0..per_pos_checks)) as u32;
                                if !var_adj[var as usize].contains(&chk) {
                                    var_adj[var as usize].push(chk);
                                    chk_adj[chk as usize].push(var);
                                    placed = true;
                                    break;
                                }
                            }
                            if !placed {
                                return Err(FiniteLengthError::RetryBudgetExceeded);
                            }
                        }
                    }
                }
            }
        }
        SamplingModel::Auto => unreachable!(),
    }

    let overlapped_vars = spec
        .overlapped_positions()
        .map(|r| r.start * m..r.end * m);
    Ok(TannerGraph {
        var_pos: (0..q).flat_map(|i| std::iter::repeat(i as u32).take(m)).collect(),
        chk_pos: (0..p)
            .flat_map(|u| std::iter::repeat(u as u32).take(per_pos_checks))
            .collect(),
        punctured: vec![false; num_vars],
        nodes_per_position: m,
        overlapped_vars,
        var_adj,
        chk_adj,
    })
}

// ---------------------------------------------------------------------------
// Peeling decoder
// ---------------------------------------------------------------------------

/// Residual-graph record of one peeling run.
///
/// `r1[k]` is the fraction of degree-one check nodes (over all checks) after
/// `k` removals; `vstar[k]` the fraction of still-erased overlapped
/// variables, present for graphs with an overlapped region.
#[derive(Debug, Clone, Serialize)]
pub struct PeelingTrace {
    pub r1: Vec<f64>,
    pub vstar: Option<Vec<f64>>,
    pub decoded: bool,
}

impl PeelingTrace {
    /// Number of peeling steps performed.
    pub fn steps(&self) -> usize {
        self.r1.len() - 1
    }
}

/// Runs the peeling decoder: repeatedly pick a degree-one check uniformly at
/// random, recover its erased neighbor, and remove that variable.
pub fn peel<R: Rng>(graph: &TannerGraph, erased: &[bool], rng: &mut R) -> PeelingTrace {
    assert_eq!(erased.len(), graph.num_variables(), "erasure pattern size");
    let num_chks = graph.num_checks();
    let mut alive: Vec<bool> = erased.to_vec();
    let mut alive_count = alive.iter().filter(|&&a| a).count();
    let mut degree: Vec<u32> = vec![0; num_chks];
    for (v, &a) in alive.iter().enumerate() {
        if a {
            for &c in &graph.var_adj[v] {
                degree[c as usize] += 1;
            }
        }
    }
    // degree-one checks as a swap-removable set
    let mut ones: Vec<u32> = Vec::new();
    let mut slot: Vec<u32> = vec![u32::MAX; num_chks];
    for (c, &d) in degree.iter().enumerate() {
        if d == 1 {
            slot[c] = ones.len() as u32;
            ones.push(c as u32);
        }
    }
    let overlap = graph.overlapped_vars();
    let mut overlap_alive = overlap
        .as_ref()
        .map(|r| r.clone().filter(|&v| alive[v]).count());
    let overlap_denom = overlap.as_ref().map(|r| r.len() as f64);

    let mut r1 = Vec::with_capacity(alive_count + 1);
    let mut vstar = overlap.as_ref().map(|_| Vec::with_capacity(alive_count + 1));
    let record =
        |r1: &mut Vec<f64>, vstar: &mut Option<Vec<f64>>, ones_len: usize, ov: Option<usize>| {
            r1.push(ones_len as f64 / num_chks as f64);
            if let (Some(vs), Some(count)) = (vstar.as_mut(), ov) {
                vs.push(count as f64 / overlap_denom.unwrap());
            }
        };
    record(&mut r1, &mut vstar, ones.len(), overlap_alive);

    let remove_from_ones = |ones: &mut Vec<u32>, slot: &mut Vec<u32>, c: u32| {
        let at = slot[c as usize] as usize;
        let last = *ones.last().unwrap();
        ones.swap_remove(at);
        slot[c as usize] = u32::MAX;
        if at < ones.len() {
            slot[last as usize] = at as u32;
        }
    };

    while !ones.is_empty() && alive_count > 0 {
        let pick = rng.gen_range(0..ones.len());
        let c = ones[pick] as usize;
        let v = graph.chk_adj[c]
            .iter()
            .map(|&v| v as usize)
            .find(|&v| alive[v])
            .expect("degree-one check has one erased neighbor");
        alive[v] = false;
        alive_count -= 1;
        if let (Some(r), Some(count)) = (overlap.as_ref(), overlap_alive.as_mut()) {
            if r.contains(&v) {
                *count -= 1;
            }
        }
        for &c2 in &graph.var_adj[v] {
            let c2u = c2 as usize;
            degree[c2u] -= 1;
            match degree[c2u] {
                1 => {
                    slot[c2u] = ones.len() as u32;
                    ones.push(c2);
                }
                0 => remove_from_ones(&mut ones, &mut slot, c2),
                _ => {}
            }
        }
        record(&mut r1, &mut vstar, ones.len(), overlap_alive);
    }
    PeelingTrace {
        r1,
        vstar,
        decoded: alive_count == 0,
    }
}

// ---------------------------------------------------------------------------
// BP erasure decoding
// ---------------------------------------------------------------------------

/// Synchronous-schedule BP erasure decoding.
///
/// Each iteration resolves every erased variable adjacent to a check that
/// had exactly one unresolved neighbor at the start of the iteration.
/// Returns success and the number of productive iterations; with `i_max`
/// unbounded the fixed point equals the peeling residual.
pub fn bp_erasure_decode(
    graph: &TannerGraph,
    erased: &[bool],
    i_max: Option<usize>,
) -> (bool, usize) {
    assert_eq!(erased.len(), graph.num_variables(), "erasure pattern size");
    let mut unresolved: Vec<bool> = erased.to_vec();
    let mut remaining = unresolved.iter().filter(|&&e| e).count();
    if remaining == 0 {
        return (true, 0);
    }
    let mut unknown: Vec<u32> = vec![0; graph.num_checks()];
    for (v, &e) in unresolved.iter().enumerate() {
        if e {
            for &c in &graph.var_adj[v] {
                unknown[c as usize] += 1;
            }
        }
    }
    let mut frontier: Vec<u32> = (0..graph.num_checks() as u32)
        .filter(|&c| unknown[c as usize] == 1)
        .collect();
    let mut next_frontier: Vec<u32> = Vec::new();
    let mut iterations = 0;
    let cap = i_max.unwrap_or(usize::MAX);
    while !frontier.is_empty() && remaining > 0 && iterations < cap {
        let mut progressed = false;
        for &c in &frontier {
            if unknown[c as usize] != 1 {
                continue;
            }
            let v = graph.chk_adj[c as usize]
                .iter()
                .map(|&v| v as usize)
                .find(|&v| unresolved[v])
                .expect("unknown count is one");
            unresolved[v] = false;
            remaining -= 1;
            progressed = true;
            for &c2 in &graph.var_adj[v] {
                unknown[c2 as usize] -= 1;
                if unknown[c2 as usize] == 1 {
                    next_frontier.push(c2);
                }
            }
        }
        if progressed {
            iterations += 1;
        }
        frontier.clear();
        std::mem::swap(&mut frontier, &mut next_frontier);
    }
    (remaining == 0, iterations)
}

// ---------------------------------------------------------------------------
// Seed derivation
// ---------------------------------------------------------------------------

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic per-unit seed stream: hash of the master seed and two
/// stream indices.
pub fn derive_seed(master: u64, a: u64, b: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ a) ^ b)
}

// ---------------------------------------------------------------------------
// Block error rate experiments
// ---------------------------------------------------------------------------

/// One operating point of a block error rate experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FerPoint {
    pub epsilon: f64,
    pub trials: u64,
    pub failures: u64,
    pub fer: f64,
    /// Normal-approximation 95% binomial half width.
    pub ci95: f64,
    /// Mean BP iterations per trial (max across components).
    pub mean_iterations: f64,
}

/// Estimates block error rates of a code over a list of erasure
/// probabilities.
///
/// `components` holds one graph for a single code, or several graphs decoded
/// jointly with the block declared failed when any component fails. Trials
/// run in parallel; results are deterministic in `(components, master_seed)`.
pub fn fer_experiment(
    components: &[TannerGraph],
    eps_list: &[f64],
    trials: u64,
    i_max: Option<usize>,
    master_seed: u64,
) -> Result<Vec<FerPoint>, FiniteLengthError> {
    if components.is_empty() || trials == 0 {
        return Err(invalid("need at least one component graph and one trial"));
    }
    for eps in eps_list {
        if !(0.0..=1.0).contains(eps) {
            return Err(invalid(format!("erasure probability {eps} outside [0,1]")));
        }
    }
    let mut points = Vec::with_capacity(eps_list.len());
    for (ei, &eps) in eps_list.iter().enumerate() {
        let results: Vec<(bool, usize)> = (0..trials)
            .into_par_iter()
            .map(|ti| {
                let mut rng = ChaCha12Rng::seed_from_u64(derive_seed(master_seed, ei as u64, ti));
                let mut failed = false;
                let mut iters = 0usize;
                for graph in components {
                    let erased = graph.sample_erasures(eps, &mut rng);
                    let (ok, it) = bp_erasure_decode(graph, &erased, i_max);
                    failed |= !ok;
                    iters = iters.max(it);
                }
                (failed, iters)
            })
            .collect();
        let failures = results.iter().filter(|&&(f, _)| f).count() as u64;
        let iter_sum: u64 = results.iter().map(|&(_, it)| it as u64).sum();
        let fer = failures as f64 / trials as f64;
        points.push(FerPoint {
            epsilon: eps,
            trials,
            failures,
            fer,
            ci95: 1.96 * (fer * (1.0 - fer) / trials as f64).sqrt(),
            mean_iterations: iter_sum as f64 / trials as f64,
        });
    }
    Ok(points)
}

// ---------------------------------------------------------------------------
// Expected graph evolution
// ---------------------------------------------------------------------------

/// Trial-averaged residual statistics on the common grid `tau = step / m`.
#[derive(Debug, Clone, Serialize)]
pub struct EvolutionCurves {
    pub m: usize,
    pub trials: u64,
    pub r1_mean: Vec<f64>,
    pub r1_std: Vec<f64>,
    pub vstar_mean: Option<Vec<f64>>,
}

impl EvolutionCurves {
    pub fn tau(&self, idx: usize) -> f64 {
        idx as f64 / self.m as f64
    }

    pub fn len(&self) -> usize {
        self.r1_mean.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r1_mean.is_empty()
    }
}

/// Mean peeling-evolution curves of an ensemble: graphs resampled per trial.
pub fn graph_evolution(
    spec: &EnsembleSpec,
    m: usize,
    eps: f64,
    trials: u64,
    master_seed: u64,
) -> Result<EvolutionCurves, FiniteLengthError> {
    graph_evolution_union(std::slice::from_ref(spec), m, eps, trials, master_seed)
}

/// Mean peeling-evolution curves of the disjoint union of several ensembles
/// decoded as one code; supports side-by-side comparisons against pairs of
/// independent chains.
pub fn graph_evolution_union(
    specs: &[EnsembleSpec],
    m: usize,
    eps: f64,
    trials: u64,
    master_seed: u64,
) -> Result<EvolutionCurves, FiniteLengthError> {
    if specs.is_empty() || trials == 0 {
        return Err(invalid("need at least one spec and one trial"));
    }
    if !(0.0..=1.0).contains(&eps) {
        return Err(invalid(format!("erasure probability {eps} outside [0,1]")));
    }
    let traces: Vec<PeelingTrace> = (0..trials)
        .into_par_iter()
        .map(|ti| {
            let graph = union_graph(specs, m, derive_seed(master_seed, 0, ti))?;
            let mut rng = ChaCha12Rng::seed_from_u64(derive_seed(master_seed, 1, ti));
            let erased = graph.sample_erasures(eps, &mut rng);
            Ok(peel(&graph, &erased, &mut rng))
        })
        .collect::<Result<_, FiniteLengthError>>()?;
    let max_len = traces.iter().map(|t| t.r1.len()).max().unwrap();
    let mut sum = vec![0.0; max_len];
    let mut sumsq = vec![0.0; max_len];
    let has_vstar = traces.iter().all(|t| t.vstar.is_some());
    let mut vsum = has_vstar.then(|| vec![0.0; max_len]);
    for trace in &traces {
        for k in 0..max_len {
            // finished runs contribute an empty residual graph
            let value = trace.r1.get(k).copied().unwrap_or(0.0);
            sum[k] += value;
            sumsq[k] += value * value;
            if let (Some(vs), Some(trace_vs)) = (vsum.as_mut(), trace.vstar.as_ref()) {
                vs[k] += trace_vs.get(k).copied().unwrap_or(0.0);
            }
        }
    }
    let n = trials as f64;
    let r1_mean: Vec<f64> = sum.iter().map(|s| s / n).collect();
    let r1_std: Vec<f64> = sumsq
        .iter()
        .zip(r1_mean.iter())
        .map(|(&sq, &mean)| {
            if trials > 1 {
                ((sq - n * mean * mean).max(0.0) / (n - 1.0)).sqrt()
            } else {
                0.0
            }
        })
        .collect();
    Ok(EvolutionCurves {
        m,
        trials,
        r1_mean,
        r1_std,
        vstar_mean: vsum.map(|vs| vs.iter().map(|v| v / n).collect()),
    })
}

fn union_graph(specs: &[EnsembleSpec], m: usize, seed: u64) -> Result<TannerGraph, FiniteLengthError> {
    let parts: Vec<TannerGraph> = specs
        .iter()
        .enumerate()
        .map(|(k, spec)| sample_tanner_graph(spec, m, derive_seed(seed, 2, k as u64)))
        .collect::<Result<_, _>>()?;
    if parts.len() == 1 {
        return Ok(parts.into_iter().next().unwrap());
    }
    let mut var_adj = Vec::new();
    let mut chk_adj = Vec::new();
    let mut var_pos = Vec::new();
    let mut chk_pos = Vec::new();
    let mut punctured = Vec::new();
    let mut overlapped_vars = None;
    let mut var_off = 0u32;
    let mut chk_off = 0u32;
    let mut pos_off = 0u32;
    for part in &parts {
        var_adj.extend(part.var_adj.iter().map(|nb| nb.iter().map(|&c| c + chk_off).collect::<Vec<_>>()));
        chk_adj.extend(part.chk_adj.iter().map(|nb| nb.iter().map(|&v| v + var_off).collect::<Vec<_>>()));
        var_pos.extend(part.var_pos.iter().map(|&p| p + pos_off));
        chk_pos.extend(part.chk_pos.iter().map(|&p| p + pos_off));
        punctured.extend_from_slice(&part.punctured);
        if overlapped_vars.is_none() {
            overlapped_vars = part
                .overlapped_vars
                .clone()
                .map(|r| r.start + var_off as usize..r.end + var_off as usize);
        }
        var_off += part.num_variables() as u32;
        chk_off += part.num_checks() as u32;
        pos_off += part.var_pos.iter().copied().max().unwrap_or(0) + 1;
    }
    Ok(TannerGraph {
        var_adj,
        chk_adj,
        var_pos,
        chk_pos,
        punctured,
        nodes_per_position: m,
        overlapped_vars,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protograph::ParityCheck;

    fn toy_graph(rows: &[Vec<u32>], cols: usize) -> TannerGraph {
        TannerGraph::from_parity_check(&ParityCheck::from_rows(cols, rows.to_vec()).unwrap())
    }

    #[test]
    fn sc_graph_node_counts() {
        let spec = EnsembleSpec::sc(3, 6, 8, 3).unwrap();
        let g = sample_tanner_graph(&spec, 600, 1).unwrap();
        assert_eq!(g.num_variables(), 4800);
        assert_eq!(g.num_checks(), 3000);
        assert!((0..g.num_variables()).all(|v| g.variable_degree(v) == 3));
        assert!((0..g.num_checks()).all(|c| g.check_degree(c) <= 6));
        assert_eq!(g.num_edges(), 3 * 4800);
    }

    #[test]
    fn oc_graph_has_doubled_overlap_degrees() {
        let spec = EnsembleSpec::oc(3, 6, 8, 3).unwrap();
        let g = sample_tanner_graph(&spec, 600, 1).unwrap();
        let heavy = (0..g.num_variables())
            .filter(|&v| g.variable_degree(v) == 6)
            .count();
        assert_eq!(heavy, 1200);
        assert_eq!(g.overlapped_vars(), Some(1800..3000));
        assert!(g.overlapped_vars().unwrap().all(|v| g.variable_degree(v) == 6));
    }

    #[test]
    fn sampling_is_deterministic() {
        let spec = EnsembleSpec::oc(3, 6, 12, 3).unwrap();
        let a = sample_tanner_graph(&spec, 60, 9).unwrap();
        let b = sample_tanner_graph(&spec, 60, 9).unwrap();
        assert_eq!(a, b);
        let c = sample_tanner_graph(&spec, 60, 10).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn offsets_model_handles_mismatched_degrees() {
        let spec = EnsembleSpec::sc(4, 8, 6, 3).unwrap();
        let g = sample_tanner_graph(&spec, 40, 3).unwrap();
        assert!((0..g.num_variables()).all(|v| g.variable_degree(v) == 4));
        assert_eq!(g.num_checks(), 8 * 20);
        // no parallel edges
        for v in 0..g.num_variables() {
            let mut nb = g.var_adj[v].clone();
            nb.sort_unstable();
            nb.dedup();
            assert_eq!(nb.len(), 4);
        }
    }

    #[test]
    fn offsets_model_oc_splits_overlap_edges_between_chains() {
        let spec = EnsembleSpec::oc(4, 8, 12, 3).unwrap();
        let g = sample_tanner_graph_with_model(&spec, 40, 3, SamplingModel::UniformOffsets).unwrap();
        let half = g.num_checks() / 2;
        for v in g.overlapped_vars().unwrap() {
            assert_eq!(g.variable_degree(v), 8);
            let first_chain = g.var_adj[v].iter().filter(|&&c| (c as usize) < half).count();
            assert_eq!(first_chain, 4);
        }
    }

    #[test]
    fn erasures_respect_bounds_and_puncturing() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        assert!(sample_erasures(100, 0.0, &mut rng).iter().all(|&e| !e));
        assert!(sample_erasures(100, 1.0, &mut rng).iter().all(|&e| e));
        let pc = ParityCheck::from_rows(2, vec![vec![0, 1]]).unwrap();
        let mut g = TannerGraph::from_parity_check(&pc);
        g.punctured[1] = true;
        let erased = g.sample_erasures(0.0, &mut rng);
        assert_eq!(erased, vec![false, true]);
    }

    #[test]
    fn erased_fraction_concentrates() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let erased = sample_erasures(1_000_000, 0.48, &mut rng);
        let frac = erased.iter().filter(|&&e| e).count() as f64 / 1e6;
        assert!((frac - 0.48).abs() < 0.002, "fraction {frac}");
    }

    #[test]
    fn peel_trivial_cases() {
        // parity checks: c0={v0,v1}, c1={v1,v2}
        let g = toy_graph(&[vec![0, 1], vec![1, 2]], 3);
        let mut rng = ChaCha12Rng::seed_from_u64(0);
        let none = peel(&g, &[false, false, false], &mut rng);
        assert!(none.decoded);
        assert_eq!(none.steps(), 0);
        let one = peel(&g, &[false, true, false], &mut rng);
        assert!(one.decoded);
        assert_eq!(one.steps(), 1);
    }

    #[test]
    fn peel_sticks_on_stopping_set() {
        // two checks over the same variable pair: a fully erased 4-cycle
        let g = toy_graph(&[vec![0, 1], vec![0, 1]], 2);
        let mut rng = ChaCha12Rng::seed_from_u64(0);
        let trace = peel(&g, &[true, true], &mut rng);
        assert!(!trace.decoded);
        assert_eq!(*trace.r1.last().unwrap(), 0.0);
    }

    #[test]
    fn bp_matches_peeling_on_random_instances() {
        let spec = EnsembleSpec::sc(3, 6, 5, 3).unwrap();
        let g = sample_tanner_graph(&spec, 24, 5).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(13);
        for _ in 0..200 {
            let erased = g.sample_erasures(0.55, &mut rng);
            let (ok, _) = bp_erasure_decode(&g, &erased, None);
            let trace = peel(&g, &erased, &mut rng);
            assert_eq!(ok, trace.decoded);
        }
    }

    #[test]
    fn bp_iteration_cap_blocks_deep_propagation() {
        // a chain v0-c0-v1-c1-v2-c2-v3: needs one round per link
        let g = toy_graph(&[vec![0, 1], vec![1, 2], vec![2, 3]], 4);
        let erased = vec![false, true, true, true];
        let (ok, iters) = bp_erasure_decode(&g, &erased, None);
        assert!(ok);
        assert_eq!(iters, 3);
        let (capped, _) = bp_erasure_decode(&g, &erased, Some(1));
        assert!(!capped);
    }

    #[test]
    fn fer_extremes_and_determinism() {
        let spec = EnsembleSpec::sc(3, 6, 5, 3).unwrap();
        let g = sample_tanner_graph(&spec, 24, 5).unwrap();
        let points = fer_experiment(std::slice::from_ref(&g), &[1.0, 0.05], 200, None, 99).unwrap();
        assert_eq!(points[0].fer, 1.0);
        assert!(points[1].fer < 3.0 / 200.0);
        let again = fer_experiment(std::slice::from_ref(&g), &[1.0, 0.05], 200, None, 99).unwrap();
        assert_eq!(points, again);
    }

    #[test]
    fn initial_r1_matches_per_graph_expectation() {
        // sampled mean of r1 at tau=0 against the exact expectation
        // sum_c d_c*eps*(1-eps)^(d_c-1) / C on a fixed graph
        let spec = EnsembleSpec::sc(3, 6, 12, 3).unwrap();
        let g = sample_tanner_graph(&spec, 300, 21).unwrap();
        let eps = 0.45;
        let exact: f64 = (0..g.num_checks())
            .map(|c| {
                let d = g.check_degree(c) as f64;
                d * eps * (1.0 - eps).powi(g.check_degree(c) as i32 - 1)
            })
            .sum::<f64>()
            / g.num_checks() as f64;
        let trials = 400;
        let mut rng = ChaCha12Rng::seed_from_u64(33);
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for _ in 0..trials {
            let erased = g.sample_erasures(eps, &mut rng);
            let trace = peel(&g, &erased, &mut rng);
            sum += trace.r1[0];
            sumsq += trace.r1[0] * trace.r1[0];
        }
        let mean = sum / trials as f64;
        let std = ((sumsq - trials as f64 * mean * mean) / (trials as f64 - 1.0)).sqrt();
        let sigma_mean = std / (trials as f64).sqrt();
        assert!(
            (mean - exact).abs() < 3.0 * sigma_mean,
            "mean {mean}, exact {exact}, sigma {sigma_mean}"
        );
    }

    #[test]
    fn evolution_curves_have_consistent_shapes() {
        let spec = EnsembleSpec::oc(3, 6, 12, 3).unwrap();
        let curves = graph_evolution(&spec, 60, 0.4, 8, 5).unwrap();
        assert_eq!(curves.r1_mean.len(), curves.r1_std.len());
        let vstar = curves.vstar_mean.as_ref().unwrap();
        assert_eq!(vstar.len(), curves.r1_mean.len());
        assert!(vstar[0] <= 1.0 && vstar[0] >= 0.0);
        assert!(curves.tau(curves.len() - 1) > 0.0);
    }

    #[test]
    fn union_graph_is_disjoint() {
        let sc = EnsembleSpec::sc(3, 6, 5, 3).unwrap();
        let g = union_graph(&[sc.clone(), sc], 24, 3).unwrap();
        assert_eq!(g.num_variables(), 2 * 5 * 24);
        assert_eq!(g.num_checks(), 2 * 7 * 12);
        let cut = 5 * 24;
        for v in 0..cut {
            assert!(g.var_adj[v].iter().all(|&c| (c as usize) < 7 * 12));
        }
        for v in cut..2 * cut {
            assert!(g.var_adj[v].iter().all(|&c| (c as usize) >= 7 * 12));
        }
    }
}
