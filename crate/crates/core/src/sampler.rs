//! Glauber dynamics on perfect matchings of `G_n` by alternating-cycle flips.
//!
//! Moves are the even simple boundary cycles of connected unions of one, two
//! or three bounded faces. Single faces and pairs do not connect the state
//! space on this graph; triples do, which [`certify_ergodicity`] checks.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{enumerate_matchings, MatchingConfig, TsscppGraph};

/// A cycle `c_0 c_1 ... c_{L-1}` of even length `L`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cycle {
    pub vertices: Vec<u32>,
}

impl Cycle {
    /// Rotates the cycle if it alternates in `mate`; returns whether it did.
    #[inline]
    pub fn try_flip(&self, mate: &mut [usize]) -> bool {
        let c = &self.vertices;
        let l = c.len();
        let at = |k: usize| c[k % l] as usize;
        let even = (0..l).step_by(2).all(|k| mate[at(k)] == at(k + 1));
        let odd = !even && (1..l).step_by(2).all(|k| mate[at(k)] == at(k + 1));
        if !even && !odd {
            return false;
        }
        let shift = if even { 1 } else { 0 };
        for k in (shift..l + shift).step_by(2) {
            let (a, b) = (at(k), at(k + 1));
            mate[a] = b;
            mate[b] = a;
        }
        true
    }

    pub fn is_alternating(&self, mate: &[usize]) -> bool {
        let c = &self.vertices;
        let l = c.len();
        let at = |k: usize| c[k % l] as usize;
        (0..l).step_by(2).all(|k| mate[at(k)] == at(k + 1))
            || (1..l).step_by(2).all(|k| mate[at(k)] == at(k + 1))
    }
}

#[derive(Clone, Debug)]
pub struct MoveSet {
    cycles: Vec<Cycle>,
}

impl MoveSet {
    pub fn build(graph: &TsscppGraph) -> Self {
        let faces: Vec<Vec<usize>> = graph
            .faces()
            .iter()
            .map(|f| {
                let mut e: Vec<usize> = f
                    .boundary()
                    .map(|(a, b)| graph.edge_id(a, b).expect("face edge"))
                    .collect();
                e.sort_unstable();
                e
            })
            .collect();
        let mut by_edge: HashMap<usize, Vec<usize>> = HashMap::new();
        for (fi, es) in faces.iter().enumerate() {
            for &e in es {
                by_edge.entry(e).or_default().push(fi);
            }
        }
        let neighbours: Vec<BTreeSet<usize>> = faces
            .iter()
            .enumerate()
            .map(|(fi, es)| {
                es.iter()
                    .flat_map(|e| by_edge[e].iter().copied())
                    .filter(|&g| g != fi)
                    .collect()
            })
            .collect();
        let mut groups: BTreeSet<Vec<usize>> = BTreeSet::new();
        for a in 0..faces.len() {
            groups.insert(vec![a]);
            for &b in &neighbours[a] {
                let mut pair = vec![a, b];
                pair.sort_unstable();
                groups.insert(pair.clone());
                for &c in neighbours[a].iter().chain(neighbours[b].iter()) {
                    if c != a && c != b {
                        let mut t = vec![a, b, c];
                        t.sort_unstable();
                        groups.insert(t);
                    }
                }
            }
        }
        let mut seen: HashSet<Vec<usize>> = HashSet::new();
        let mut cycles = Vec::new();
        for g in groups {
            let mut count: HashMap<usize, usize> = HashMap::new();
            for &f in &g {
                for &e in &faces[f] {
                    *count.entry(e).or_default() += 1;
                }
            }
            let mut boundary: Vec<usize> =
                count.into_iter().filter(|&(_, c)| c % 2 == 1).map(|(e, _)| e).collect();
            boundary.sort_unstable();
            if boundary.len() % 2 == 1 || seen.contains(&boundary) {
                continue;
            }
            if let Some(cycle) = simple_cycle(graph, &boundary) {
                seen.insert(boundary);
                cycles.push(cycle);
            }
        }
        MoveSet { cycles }
    }

    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    pub fn cycles(&self) -> &[Cycle] {
        &self.cycles
    }
}

/// Orders an edge set into a vertex cycle if it is one simple cycle.
fn simple_cycle(graph: &TsscppGraph, edge_ids: &[usize]) -> Option<Cycle> {
    let mut adj: HashMap<usize, Vec<usize>> = HashMap::new();
    for &e in edge_ids {
        let (a, b) = graph.edges()[e];
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    if adj.values().any(|v| v.len() != 2) {
        return None;
    }
    let start = *adj.keys().min()?;
    let mut order = vec![start];
    let (mut prev, mut cur) = (start, adj[&start][0]);
    while cur != start {
        order.push(cur);
        let next = if adj[&cur][0] == prev { adj[&cur][1] } else { adj[&cur][0] };
        prev = cur;
        cur = next;
    }
    (order.len() == adj.len()).then(|| Cycle { vertices: order.into_iter().map(|v| v as u32).collect() })
}

/// Deterministic starting matching: repeatedly match a vertex with a single
/// free neighbour if there is one (lowest index first), otherwise the lowest
/// free vertex to its lowest free neighbour. Falls back to backtracking if
/// the greedy pass strands a vertex.
pub fn canonical_matching(graph: &TsscppGraph) -> Result<MatchingConfig> {
    if let Some(m) = greedy_matching(graph) {
        return Ok(m);
    }
    let mut mate = vec![usize::MAX; graph.num_vertices()];
    if backtrack_first(graph, 0, &mut mate) {
        return Ok(MatchingConfig::from_mates(mate));
    }
    Err(Error::Internal("G_n has no perfect matching".into()))
}

fn greedy_matching(graph: &TsscppGraph) -> Option<MatchingConfig> {
    let nv = graph.num_vertices();
    let mut mate = vec![usize::MAX; nv];
    let mut free_deg: Vec<usize> = (0..nv).map(|v| graph.neighbors(v).len()).collect();
    let mut forced: BTreeSet<usize> = (0..nv).filter(|&v| free_deg[v] == 1).collect();
    let mut lowest = 0;
    let mut matched = 0;
    while matched < nv {
        let v = match forced.pop_first() {
            Some(v) => v,
            None => {
                while mate[lowest] != usize::MAX {
                    lowest += 1;
                }
                lowest
            }
        };
        let w = graph.neighbors(v).iter().copied().find(|&w| mate[w] == usize::MAX)?;
        mate[v] = w;
        mate[w] = v;
        matched += 2;
        forced.remove(&w);
        for &u in [v, w].iter() {
            for &x in graph.neighbors(u) {
                if mate[x] == usize::MAX {
                    free_deg[x] -= 1;
                    match free_deg[x] {
                        1 => {
                            forced.insert(x);
                        }
                        0 => return None,
                        _ => {}
                    }
                }
            }
        }
    }
    Some(MatchingConfig::from_mates(mate))
}

fn backtrack_first(graph: &TsscppGraph, start: usize, mate: &mut Vec<usize>) -> bool {
    let Some(v) = (start..mate.len()).find(|&v| mate[v] == usize::MAX) else {
        return true;
    };
    for &w in graph.neighbors(v) {
        if mate[w] == usize::MAX {
            mate[v] = w;
            mate[w] = v;
            if backtrack_first(graph, v + 1, mate) {
                return true;
            }
            mate[v] = usize::MAX;
            mate[w] = usize::MAX;
        }
    }
    false
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErgodicityReport {
    pub reachable: usize,
    pub total: usize,
}

impl ErgodicityReport {
    pub fn passed(&self) -> bool {
        self.reachable == self.total
    }
}

/// Breadth-first search from the canonical matching under all moves,
/// compared with exhaustive enumeration.
pub fn certify_ergodicity(graph: &TsscppGraph, moves: &MoveSet, cap: usize) -> Result<ErgodicityReport> {
    let total = enumerate_matchings(graph, cap)?.len();
    let start = canonical_matching(graph)?.mates().to_vec();
    let mut seen: HashSet<Vec<usize>> = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(m) = queue.pop_front() {
        for c in moves.cycles() {
            let mut next = m.clone();
            if c.try_flip(&mut next) && seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    Ok(ErgodicityReport { reachable: seen.len(), total })
}

const SEED_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

/// Seed of chain `c` derived from a base seed.
pub fn chain_seed(seed: u64, chain: u64) -> u64 {
    seed ^ (chain + 1).wrapping_mul(SEED_STRIDE)
}

/// A single heat-bath chain.
pub struct Chain<'a> {
    moves: &'a MoveSet,
    state: MatchingConfig,
    rng: ChaCha8Rng,
    sweep: u64,
}

impl<'a> Chain<'a> {
    pub fn new(graph: &TsscppGraph, moves: &'a MoveSet, seed: u64) -> Result<Self> {
        Ok(Self {
            moves,
            state: canonical_matching(graph)?,
            rng: ChaCha8Rng::seed_from_u64(seed),
            sweep: 0,
        })
    }

    pub fn state(&self) -> &MatchingConfig {
        &self.state
    }

    pub fn sweeps_done(&self) -> u64 {
        self.sweep
    }

    /// One proposal: a uniform cycle, flipped with probability 1/2 when it
    /// alternates.
    #[inline]
    pub fn step(&mut self) {
        let cycles = self.moves.cycles();
        if cycles.is_empty() {
            return;
        }
        let c = &cycles[self.rng.gen_range(0..cycles.len())];
        if self.rng.gen::<bool>() {
            c.try_flip(self.state.mates_mut());
        }
    }

    /// `|MoveSet|` steps.
    pub fn sweep(&mut self) {
        for _ in 0..self.moves.len() {
            self.step();
        }
        self.sweep += 1;
        debug_assert!(self.state.mates().iter().enumerate().all(|(a, &b)| self.state.mate(b) == a));
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub sweeps: u64,
    pub burnin: u64,
    pub seed: u64,
}

impl RunConfig {
    pub fn with_default_burnin(n: usize, sweeps: u64, seed: u64) -> Self {
        Self { sweeps, burnin: 10 * n as u64, seed }
    }
}

/// Runs burn-in, then `sweeps` sweeps, calling `observe` after each
/// post-burn-in sweep with the sweep index (counted from 1) and the state.
/// With zero sweeps the state is the canonical matching.
pub fn glauber_run(
    graph: &TsscppGraph,
    moves: &MoveSet,
    config: RunConfig,
    mut observe: impl FnMut(u64, &MatchingConfig),
) -> Result<MatchingConfig> {
    let mut chain = Chain::new(graph, moves, config.seed)?;
    for _ in 0..config.burnin {
        chain.sweep();
    }
    for s in 1..=config.sweeps {
        chain.sweep();
        observe(s, chain.state());
    }
    Ok(chain.state)
}

/// Per-edge occupation counts over observed samples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeCounts {
    pub samples: u64,
    pub counts: Vec<u64>,
}

impl EdgeCounts {
    pub fn new(graph: &TsscppGraph) -> Self {
        Self { samples: 0, counts: vec![0; graph.edges().len()] }
    }

    pub fn record(&mut self, graph: &TsscppGraph, m: &MatchingConfig) {
        self.samples += 1;
        for (a, &b) in m.mates().iter().enumerate() {
            if a < b {
                self.counts[graph.edge_id(a, b).expect("matched edge")] += 1;
            }
        }
    }

    pub fn merge(&mut self, other: &EdgeCounts) {
        self.samples += other.samples;
        for (c, o) in self.counts.iter_mut().zip(&other.counts) {
            *c += o;
        }
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| c as f64 / self.samples.max(1) as f64).collect()
    }

    pub fn to_csv(&self, graph: &TsscppGraph) -> String {
        let mut out = String::from("x1,x2,y1,y2,frequency\n");
        for (&(a, b), f) in graph.edges().iter().zip(self.frequencies()) {
            let (x, y) = (graph.vertex(a), graph.vertex(b));
            out.push_str(&format!("{},{},{},{},{f}\n", x.x1, x.x2, y.x1, y.x2));
        }
        out
    }
}

/// Edge frequencies with batch-means standard errors, which account for the
/// autocorrelation of consecutive sweeps.
#[derive(Clone, Debug)]
pub struct BatchMeans {
    batch_len: u64,
    current: EdgeCounts,
    batches: Vec<Vec<f64>>,
}

impl BatchMeans {
    pub fn new(graph: &TsscppGraph, batch_len: u64) -> Self {
        Self { batch_len: batch_len.max(1), current: EdgeCounts::new(graph), batches: Vec::new() }
    }

    pub fn record(&mut self, graph: &TsscppGraph, m: &MatchingConfig) {
        self.current.record(graph, m);
        if self.current.samples == self.batch_len {
            self.batches.push(self.current.frequencies());
            self.current = EdgeCounts { samples: 0, counts: vec![0; self.current.counts.len()] };
        }
    }

    /// Mean and standard error per edge over completed batches.
    pub fn summary(&self) -> Vec<(f64, f64)> {
        let b = self.batches.len();
        let edges = self.current.counts.len();
        (0..edges)
            .map(|e| {
                let xs: Vec<f64> = self.batches.iter().map(|r| r[e]).collect();
                let mean = xs.iter().sum::<f64>() / b.max(1) as f64;
                let var = if b > 1 {
                    xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (b - 1) as f64
                } else {
                    0.0
                };
                (mean, (var / b.max(1) as f64).sqrt())
            })
            .collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SampleJson {
    pub n: usize,
    pub sweep: u64,
    pub edges: Vec<[[i64; 2]; 2]>,
}

impl SampleJson {
    pub fn new(graph: &TsscppGraph, sweep: u64, m: &MatchingConfig) -> Self {
        let edges = m
            .edges()
            .into_iter()
            .map(|(a, b)| {
                let (x, y) = (graph.vertex(a), graph.vertex(b));
                [[x.x1, x.x2], [y.x1, y.x2]]
            })
            .collect();
        Self { n: graph.n(), sweep, edges }
    }
}

/// Runs independent chains on threads, chain `c` seeded by
/// [`chain_seed`], and merges their edge counts.
pub fn run_chains(
    graph: &TsscppGraph,
    moves: &MoveSet,
    config: RunConfig,
    chains: u64,
) -> Result<EdgeCounts> {
    let results: Vec<Result<EdgeCounts>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..chains)
            .map(|c| {
                s.spawn(move || {
                    let mut counts = EdgeCounts::new(graph);
                    let cfg = RunConfig { seed: chain_seed(config.seed, c), ..config };
                    glauber_run(graph, moves, cfg, |_, m| counts.record(graph, m))?;
                    Ok(counts)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("chain thread")).collect()
    });
    let mut total = EdgeCounts::new(graph);
    for r in results {
        total.merge(&r?);
    }
    Ok(total)
}
