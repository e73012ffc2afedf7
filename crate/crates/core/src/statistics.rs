//! Edge-set probabilities as Pfaffians of inverse Kasteleyn sub-blocks.

use num_traits::{One, Zero};

use crate::closed_form::ClosedForm;
use crate::error::{invalid, Result};
use crate::graph::{MatchingConfig, TsscppGraph, VertexCoord};
use crate::linalg::{invert, kasteleyn_matrix, kasteleyn_sign, pfaffian, Matrix};
use crate::rational::{format_pq, BigRational};

/// Entries of `K_n^{-1}` from some source.
pub trait InverseKernel: Send + Sync {
    fn entry(&self, x: VertexCoord, y: VertexCoord) -> Result<BigRational>;
}

/// `K_n^{-1}` by exact elimination.
pub struct ExactInverse {
    graph: TsscppGraph,
    inv: Matrix,
}

impl ExactInverse {
    pub fn new(graph: &TsscppGraph) -> Result<Self> {
        let inv = invert(&kasteleyn_matrix(graph))?;
        Ok(Self { graph: graph.clone(), inv })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.inv
    }
}

impl InverseKernel for ExactInverse {
    fn entry(&self, x: VertexCoord, y: VertexCoord) -> Result<BigRational> {
        let (a, b) = (self.graph.vertex_index(x)?, self.graph.vertex_index(y)?);
        Ok(self.inv.get(a, b).clone())
    }
}

impl InverseKernel for ClosedForm {
    fn entry(&self, x: VertexCoord, y: VertexCoord) -> Result<BigRational> {
        self.kinv(x, y)
    }
}

/// A list of vertex-disjoint edges of `G_n`, in the order given.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeQuery {
    edges: Vec<(VertexCoord, VertexCoord)>,
}

impl EdgeQuery {
    pub fn new(graph: &TsscppGraph, edges: Vec<(VertexCoord, VertexCoord)>) -> Result<Self> {
        let mut seen = Vec::new();
        for &(x, y) in &edges {
            let (a, b) = (graph.vertex_index(x)?, graph.vertex_index(y)?);
            if !graph.has_edge(a, b) {
                return Err(invalid(format!("{x}-{y} is not an edge of G_{}", graph.n())));
            }
            for v in [a, b] {
                if seen.contains(&v) {
                    return Err(invalid(format!("{} appears in two query edges", graph.vertex(v))));
                }
                seen.push(v);
            }
        }
        Ok(Self { edges })
    }

    pub fn edges(&self) -> &[(VertexCoord, VertexCoord)] {
        &self.edges
    }

    fn vertices(&self) -> Vec<VertexCoord> {
        self.edges.iter().flat_map(|&(x, y)| [x, y]).collect()
    }
}

/// `prod_k K(v_{2k-1}, v_{2k}) Pf((K^{-1}(v_i, v_j))^T)`.
pub fn edge_probability(
    graph: &TsscppGraph,
    kernel: &dyn InverseKernel,
    query: &EdgeQuery,
) -> Result<BigRational> {
    let mut weight = BigRational::one();
    for &(x, y) in query.edges() {
        let s = kasteleyn_sign(graph, graph.vertex_index(x)?, graph.vertex_index(y)?);
        weight *= BigRational::from_integer(s.into());
    }
    let vs = query.vertices();
    let mut sub = Matrix::zeros(vs.len());
    for (a, &x) in vs.iter().enumerate() {
        for (b, &y) in vs.iter().enumerate() {
            if a != b {
                // Transposed in place.
                sub.set(b, a, kernel.entry(x, y)?);
            }
        }
    }
    Ok(weight * pfaffian(&sub)?)
}

/// Single-edge probabilities for every edge, in the graph's edge order.
pub fn marginal_field(
    graph: &TsscppGraph,
    kernel: &dyn InverseKernel,
) -> Result<Vec<((usize, usize), BigRational)>> {
    graph
        .edges()
        .iter()
        .map(|&(a, b)| {
            let (x, y) = (graph.vertex(a), graph.vertex(b));
            let s = BigRational::from_integer(kasteleyn_sign(graph, a, b).into());
            Ok(((a, b), s * kernel.entry(y, x)?))
        })
        .collect()
}

/// `sum_{e ∋ v} P(e)` for every vertex.
pub fn vertex_sums(graph: &TsscppGraph, field: &[((usize, usize), BigRational)]) -> Vec<BigRational> {
    let mut sums = vec![BigRational::zero(); graph.num_vertices()];
    for ((a, b), p) in field {
        sums[*a] += p;
        sums[*b] += p;
    }
    sums
}

/// Fraction of the given matchings that contain every query edge.
pub fn enumeration_frequency(
    graph: &TsscppGraph,
    matchings: &[MatchingConfig],
    query: &EdgeQuery,
) -> Result<BigRational> {
    let idx = query
        .edges()
        .iter()
        .map(|&(x, y)| Ok((graph.vertex_index(x)?, graph.vertex_index(y)?)))
        .collect::<Result<Vec<_>>>()?;
    let hits = matchings
        .iter()
        .filter(|m| idx.iter().all(|&(a, b)| m.contains(a, b)))
        .count();
    Ok(BigRational::new(hits.into(), matchings.len().into()))
}

pub fn marginal_csv(graph: &TsscppGraph, field: &[((usize, usize), BigRational)]) -> String {
    let mut out = String::from("x1,x2,y1,y2,probability\n");
    for ((a, b), p) in field {
        let (x, y) = (graph.vertex(*a), graph.vertex(*b));
        out.push_str(&format!("{},{},{},{},{}\n", x.x1, x.x2, y.x1, y.x2, format_pq(p)));
    }
    out
}
