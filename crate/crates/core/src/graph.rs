//! The planar graph `G_n` whose perfect matchings are the TSSCPPs of order
//! `n + 1`, together with its faces and matching enumeration.
//!
//! Vertices are lattice points `(x1, x2)` with `0 <= x1 <= 2n` and
//! `x1 <= x2 <= 2n + 1`, minus `(2n, 2n + 1)` when `n` is odd. They are
//! stored in lexicographic order, which fixes every matrix index in the crate.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VertexCoord {
    pub x1: i64,
    pub x2: i64,
}

impl VertexCoord {
    pub const fn new(x1: i64, x2: i64) -> Self {
        Self { x1, x2 }
    }

    pub fn parity(&self) -> i64 {
        (self.x1 + self.x2).rem_euclid(2)
    }

    pub fn is_diagonal(&self) -> bool {
        self.x1 == self.x2
    }
}

impl fmt::Display for VertexCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x1, self.x2)
    }
}

impl FromStr for VertexCoord {
    type Err = Error;

    /// Accepts `x1,x2`, optionally wrapped in parentheses.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().trim_start_matches('(').trim_end_matches(')');
        let (a, b) = t
            .split_once(',')
            .ok_or_else(|| invalid(format!("coordinate '{s}' is not of the form x1,x2")))?;
        let x1 = a.trim().parse().map_err(|_| invalid(format!("bad coordinate '{s}'")))?;
        let x2 = b.trim().parse().map_err(|_| invalid(format!("bad coordinate '{s}'")))?;
        Ok(Self { x1, x2 })
    }
}

/// The distinguished vertex `b = (2n, 2n + 1 - [n]_2)`.
pub fn b_vertex(n: usize) -> VertexCoord {
    let n = n as i64;
    VertexCoord::new(2 * n, 2 * n + 1 - n.rem_euclid(2))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Horizontal,
    Vertical,
    Diagonal,
}

impl EdgeKind {
    pub fn of(a: VertexCoord, b: VertexCoord) -> Option<Self> {
        let (dx, dy) = ((a.x1 - b.x1).abs(), (a.x2 - b.x2).abs());
        match (dx, dy) {
            (1, 0) => Some(EdgeKind::Horizontal),
            (0, 1) => Some(EdgeKind::Vertical),
            (1, 1) if a.is_diagonal() && b.is_diagonal() => Some(EdgeKind::Diagonal),
            _ => None,
        }
    }
}

/// A bounded face, listed counter-clockwise in the integer-coordinate
/// embedding (`x1` to the right, `x2` upwards).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub vertices: Vec<usize>,
}

impl Face {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Directed boundary edges in traversal order.
    pub fn boundary(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let k = self.vertices.len();
        (0..k).map(move |i| (self.vertices[i], self.vertices[(i + 1) % k]))
    }
}

#[derive(Clone, Debug)]
pub struct TsscppGraph {
    n: usize,
    vertices: Vec<VertexCoord>,
    /// Undirected edges as `(i, j)` with `i < j`, sorted.
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    edge_lookup: HashMap<(usize, usize), usize>,
    faces: Vec<Face>,
    outer_face: Vec<usize>,
    b: VertexCoord,
}

impl TsscppGraph {
    pub fn new(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(invalid("n must be at least 1"));
        }
        let ni = n as i64;
        let odd = n % 2 == 1;
        let mut vertices = Vec::new();
        for x1 in 0..=2 * ni {
            for x2 in x1..=2 * ni + 1 {
                if odd && x1 == 2 * ni && x2 == 2 * ni + 1 {
                    continue;
                }
                vertices.push(VertexCoord::new(x1, x2));
            }
        }
        let mut g = TsscppGraph {
            n,
            vertices,
            edges: Vec::new(),
            adjacency: Vec::new(),
            edge_lookup: HashMap::new(),
            faces: Vec::new(),
            outer_face: Vec::new(),
            b: b_vertex(n),
        };
        g.build_edges();
        g.build_faces();
        Ok(g)
    }

    fn build_edges(&mut self) {
        let n = self.n as i64;
        let mut edges = Vec::new();
        for v in &self.vertices {
            let (x1, x2) = (v.x1, v.x2);
            let here = self.index_of(*v).expect("own vertex");
            let mut push = |w: VertexCoord| {
                if let Some(j) = self.index_of(w) {
                    edges.push((here.min(j), here.max(j)));
                }
            };
            if x1 < 2 * n && (x1 + x2).rem_euclid(2) == 1 {
                push(VertexCoord::new(x1 + 1, x2));
            }
            let vertical_cap = 2 * n - (n % 2);
            if x1 <= vertical_cap && x2 <= 2 * n {
                push(VertexCoord::new(x1, x2 + 1));
            }
            if x1 == x2 && x1 < 2 * n {
                push(VertexCoord::new(x1 + 1, x1 + 1));
            }
        }
        edges.sort_unstable();
        edges.dedup();
        let mut adjacency = vec![Vec::new(); self.vertices.len()];
        for (k, &(a, b)) in edges.iter().enumerate() {
            adjacency[a].push(b);
            adjacency[b].push(a);
            self.edge_lookup.insert((a, b), k);
        }
        for adj in &mut adjacency {
            adj.sort_unstable();
        }
        self.edges = edges;
        self.adjacency = adjacency;
    }

    /// Traces faces from the rotation system of the straight-line embedding.
    fn build_faces(&mut self) {
        let pos = |i: usize| {
            let v = self.vertices[i];
            (v.x1 as f64, v.x2 as f64)
        };
        let rotation: Vec<Vec<usize>> = (0..self.vertices.len())
            .map(|v| {
                let (px, py) = pos(v);
                let mut around = self.adjacency[v].clone();
                around.sort_by(|&a, &b| {
                    let (ax, ay) = pos(a);
                    let (bx, by) = pos(b);
                    let ta = (ay - py).atan2(ax - px);
                    let tb = (by - py).atan2(bx - px);
                    ta.partial_cmp(&tb).expect("finite angles")
                });
                around
            })
            .collect();
        let mut used: HashMap<(usize, usize), bool> = HashMap::new();
        let mut faces = Vec::new();
        let mut outer = Vec::new();
        for &(a, b) in &self.edges {
            for (u, v) in [(a, b), (b, a)] {
                if used.contains_key(&(u, v)) {
                    continue;
                }
                let mut cycle = Vec::new();
                let (mut x, mut y) = (u, v);
                while !used.contains_key(&(x, y)) {
                    used.insert((x, y), true);
                    cycle.push(x);
                    let around = &rotation[y];
                    let at = around.iter().position(|&w| w == x).expect("adjacent");
                    let z = around[(at + around.len() - 1) % around.len()];
                    x = y;
                    y = z;
                }
                let area2: i64 = (0..cycle.len())
                    .map(|i| {
                        let p = self.vertices[cycle[i]];
                        let q = self.vertices[cycle[(i + 1) % cycle.len()]];
                        p.x1 * q.x2 - q.x1 * p.x2
                    })
                    .sum();
                if area2 > 0 {
                    faces.push(Face { vertices: cycle });
                } else {
                    outer = cycle;
                }
            }
        }
        faces.sort_by(|a, b| {
            let ka = a.vertices.iter().min();
            let kb = b.vertices.iter().min();
            ka.cmp(&kb).then(a.vertices.len().cmp(&b.vertices.len()))
        });
        self.faces = faces;
        self.outer_face = outer;
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn b(&self) -> VertexCoord {
        self.b
    }

    pub fn vertices(&self) -> &[VertexCoord] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> VertexCoord {
        self.vertices[i]
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    /// Outer boundary walk, clockwise.
    pub fn outer_face(&self) -> &[usize] {
        &self.outer_face
    }

    pub fn contains(&self, v: VertexCoord) -> bool {
        self.index_of(v).is_some()
    }

    fn index_of(&self, v: VertexCoord) -> Option<usize> {
        let n = self.n as i64;
        if v.x1 < 0 || v.x1 > 2 * n || v.x2 < v.x1 || v.x2 > 2 * n + 1 {
            return None;
        }
        if n % 2 == 1 && v.x1 == 2 * n && v.x2 == 2 * n + 1 {
            return None;
        }
        // Column c holds 2n + 2 - c vertices; only the last column can be short.
        let c = v.x1;
        let before = c * (2 * n + 2) - c * (c - 1) / 2;
        Some((before + (v.x2 - v.x1)) as usize)
    }

    /// Position of `v` in the lexicographic vertex order.
    pub fn vertex_index(&self, v: VertexCoord) -> Result<usize> {
        self.index_of(v).ok_or(Error::UnknownVertex(v))
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edge_id(a, b).is_some()
    }

    pub fn edge_id(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_lookup.get(&(a.min(b), a.max(b))).copied()
    }

    pub fn edge_kind(&self, a: usize, b: usize) -> Option<EdgeKind> {
        if !self.has_edge(a, b) {
            return None;
        }
        EdgeKind::of(self.vertices[a], self.vertices[b])
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            n: self.n,
            vertices: self.vertices.iter().map(|v| [v.x1, v.x2]).collect(),
            edges: self
                .edges
                .iter()
                .map(|&(a, b)| {
                    let (p, q) = (self.vertices[a], self.vertices[b]);
                    [[p.x1, p.x2], [q.x1, q.x2]]
                })
                .collect(),
        }
    }

    pub fn to_dot(&self) -> String {
        let mut out = format!("graph G{} {{\n  node [shape=point];\n", self.n);
        for (i, v) in self.vertices.iter().enumerate() {
            out.push_str(&format!(
                "  v{i} [label=\"{v}\", pos=\"{},{}!\"];\n",
                v.x1, v.x2
            ));
        }
        for &(a, b) in &self.edges {
            out.push_str(&format!("  v{a} -- v{b};\n"));
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub n: usize,
    pub vertices: Vec<[i64; 2]>,
    pub edges: Vec<[[i64; 2]; 2]>,
}

/// A perfect matching stored as a partner table over vertex indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MatchingConfig {
    mate: Vec<usize>,
}

impl MatchingConfig {
    pub fn from_mates(mate: Vec<usize>) -> Self {
        Self { mate }
    }

    pub fn from_edges(graph: &TsscppGraph, edges: &[(usize, usize)]) -> Result<Self> {
        let mut mate = vec![usize::MAX; graph.num_vertices()];
        for &(a, b) in edges {
            if !graph.has_edge(a, b) {
                return Err(invalid(format!(
                    "{}-{} is not an edge",
                    graph.vertex(a),
                    graph.vertex(b)
                )));
            }
            if mate[a] != usize::MAX || mate[b] != usize::MAX {
                return Err(invalid("vertex covered twice"));
            }
            mate[a] = b;
            mate[b] = a;
        }
        let m = Self { mate };
        m.validate(graph)?;
        Ok(m)
    }

    pub fn mates(&self) -> &[usize] {
        &self.mate
    }

    pub fn mate(&self, v: usize) -> usize {
        self.mate[v]
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.mate.get(a) == Some(&b)
    }

    /// Matched edges `(i, j)` with `i < j`, sorted by `i`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.mate
            .iter()
            .enumerate()
            .filter(|&(a, &b)| a < b)
            .map(|(a, &b)| (a, b))
            .collect()
    }

    pub fn validate(&self, graph: &TsscppGraph) -> Result<()> {
        if self.mate.len() != graph.num_vertices() {
            return Err(invalid("matching has the wrong vertex count"));
        }
        for (a, &b) in self.mate.iter().enumerate() {
            if b >= self.mate.len() {
                return Err(invalid(format!("{} is unmatched", graph.vertex(a))));
            }
            if self.mate[b] != a {
                return Err(invalid("partner table is not an involution"));
            }
            if !graph.has_edge(a, b) {
                return Err(invalid(format!(
                    "{}-{} is not an edge",
                    graph.vertex(a),
                    graph.vertex(b)
                )));
            }
        }
        Ok(())
    }

    pub(crate) fn mates_mut(&mut self) -> &mut [usize] {
        &mut self.mate
    }
}

pub const DEFAULT_ENUMERATION_CAP: usize = 4;

/// All perfect matchings, by backtracking over the vertex order.
pub fn enumerate_matchings(graph: &TsscppGraph, cap: usize) -> Result<Vec<MatchingConfig>> {
    if graph.n() > cap {
        return Err(Error::ResourceLimit(format!(
            "enumeration at n={} exceeds the cap {cap}",
            graph.n()
        )));
    }
    let mut mate = vec![usize::MAX; graph.num_vertices()];
    let mut out = Vec::new();
    enumerate_from(graph, 0, &mut mate, &mut out);
    Ok(out)
}

fn enumerate_from(
    graph: &TsscppGraph,
    start: usize,
    mate: &mut Vec<usize>,
    out: &mut Vec<MatchingConfig>,
) {
    let Some(v) = (start..mate.len()).find(|&v| mate[v] == usize::MAX) else {
        out.push(MatchingConfig { mate: mate.clone() });
        return;
    };
    for &w in graph.neighbors(v) {
        if mate[w] == usize::MAX {
            mate[v] = w;
            mate[w] = v;
            enumerate_from(graph, v + 1, mate, out);
            mate[v] = usize::MAX;
            mate[w] = usize::MAX;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x1: i64, x2: i64) -> VertexCoord {
        VertexCoord::new(x1, x2)
    }

    fn expected_vertex_count(n: usize) -> usize {
        let total: usize = (0..=2 * n).map(|x1| 2 * n + 2 - x1).sum();
        total - n % 2
    }

    #[test]
    fn vertex_counts() {
        assert_eq!(TsscppGraph::new(1).unwrap().num_vertices(), 8);
        assert_eq!(TsscppGraph::new(2).unwrap().num_vertices(), 20);
        for n in 1..=6 {
            let g = TsscppGraph::new(n).unwrap();
            assert_eq!(g.num_vertices(), expected_vertex_count(n));
            assert_eq!(g.num_vertices() % 2, 0);
        }
    }

    #[test]
    fn rejects_zero() {
        assert!(matches!(TsscppGraph::new(0), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn b_vertex_values() {
        assert_eq!(b_vertex(2), v(4, 5));
        assert_eq!(b_vertex(3), v(6, 6));
        assert_eq!(b_vertex(4), v(8, 9));
    }

    #[test]
    fn vertex_index_is_lexicographic() {
        let g = TsscppGraph::new(2).unwrap();
        assert_eq!(g.vertex_index(v(0, 0)).unwrap(), 0);
        assert_eq!(g.vertex_index(v(0, 1)).unwrap(), 1);
        assert_eq!(g.vertex_index(v(4, 5)).unwrap(), 19);
        assert!(matches!(g.vertex_index(v(3, 2)), Err(Error::UnknownVertex(_))));
        for n in 1..=5 {
            let g = TsscppGraph::new(n).unwrap();
            let mut sorted = g.vertices().to_vec();
            sorted.sort();
            assert_eq!(sorted, g.vertices());
            for (i, &w) in g.vertices().iter().enumerate() {
                assert_eq!(g.vertex_index(w).unwrap(), i);
            }
        }
        let g3 = TsscppGraph::new(3).unwrap();
        assert!(g3.vertex_index(v(6, 7)).is_err());
    }

    #[test]
    fn edge_families_match_definition() {
        for n in 1..=5usize {
            let g = TsscppGraph::new(n).unwrap();
            let ni = n as i64;
            let mut expected = 0;
            for x1 in 0..2 * ni {
                for x2 in x1..=2 * ni + 1 {
                    if (x1 + x2) % 2 == 1 && g.contains(v(x1 + 1, x2)) {
                        expected += 1;
                    }
                }
            }
            for x1 in 0..=2 * ni - (ni % 2) {
                for x2 in x1..=2 * ni {
                    if g.contains(v(x1, x2 + 1)) {
                        expected += 1;
                    }
                }
            }
            expected += 2 * ni as usize;
            assert_eq!(g.edges().len(), expected, "n={n}");
            for &(a, b) in g.edges() {
                assert!(EdgeKind::of(g.vertex(a), g.vertex(b)).is_some());
            }
        }
    }

    #[test]
    fn face_census() {
        for n in 1..=6 {
            let g = TsscppGraph::new(n).unwrap();
            let triangles = g.faces().iter().filter(|f| f.len() == 3).count();
            let hexagons = g.faces().iter().filter(|f| f.len() == 6).count();
            assert_eq!(triangles, 2 * n, "n={n}");
            assert_eq!(triangles + hexagons, g.faces().len());
            // Euler with the outer face.
            let (v, e, f) = (g.num_vertices(), g.edges().len(), g.faces().len() + 1);
            assert_eq!(v + f, e + 2);
            for face in g.faces() {
                for (a, b) in face.boundary() {
                    assert!(g.has_edge(a, b));
                }
            }
            for t in g.faces().iter().filter(|f| f.len() == 3) {
                let diag = t
                    .boundary()
                    .filter(|&(a, b)| g.edge_kind(a, b) == Some(EdgeKind::Diagonal))
                    .count();
                assert_eq!(diag, 1);
            }
        }
    }

    #[test]
    fn corner_vertices() {
        let g = TsscppGraph::new(3).unwrap();
        // Odd n: (2n,2n) is b and the corner column is a single vertex.
        let b = g.vertex_index(g.b()).unwrap();
        assert_eq!(g.b(), v(6, 6));
        assert_eq!(g.neighbors(b).len(), 2);
        assert!(g.vertices().iter().enumerate().all(|(i, _)| !g.neighbors(i).is_empty()));
        let g4 = TsscppGraph::new(4).unwrap();
        let b4 = g4.vertex_index(g4.b()).unwrap();
        assert_eq!(g4.neighbors(b4), &[g4.vertex_index(v(8, 8)).unwrap()]);
    }

    #[test]
    fn matching_counts() {
        let counts: Vec<usize> = (1..=3)
            .map(|n| {
                enumerate_matchings(&TsscppGraph::new(n).unwrap(), DEFAULT_ENUMERATION_CAP)
                    .unwrap()
                    .len()
            })
            .collect();
        assert_eq!(counts, vec![2, 7, 42]);
    }

    #[test]
    fn enumeration_is_duplicate_free_and_valid() {
        let g = TsscppGraph::new(3).unwrap();
        let all = enumerate_matchings(&g, 4).unwrap();
        let set: std::collections::HashSet<_> = all.iter().cloned().collect();
        assert_eq!(set.len(), all.len());
        for m in &all {
            m.validate(&g).unwrap();
        }
    }

    #[test]
    fn enumeration_cap() {
        let g = TsscppGraph::new(5).unwrap();
        assert!(matches!(enumerate_matchings(&g, 4), Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn coordinate_parsing() {
        assert_eq!("2,7".parse::<VertexCoord>().unwrap(), v(2, 7));
        assert_eq!("(4, 5)".parse::<VertexCoord>().unwrap(), v(4, 5));
        assert!("4;5".parse::<VertexCoord>().is_err());
    }

    #[test]
    fn json_export_shape() {
        let g = TsscppGraph::new(1).unwrap();
        let j = serde_json::to_value(g.to_json()).unwrap();
        assert_eq!(j["n"], 1);
        assert_eq!(j["vertices"][0], serde_json::json!([0, 0]));
        assert_eq!(j["edges"].as_array().unwrap().len(), g.edges().len());
        assert!(g.to_dot().starts_with("graph G1 {"));
    }
}
