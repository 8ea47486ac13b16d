//! Finite weighted graphs: representation, file formats, builders, and the
//! hop-metric queries (BFS distance, girth) the curvature machinery relies on.
//!
//! Graphs are simple, undirected, connected, and immutable after
//! construction. Edges keep the index order in which they were supplied;
//! every per-edge quantity elsewhere in the crate (weights, curvatures,
//! flow coordinates) is aligned with that order.

use serde::{Deserialize, Serialize};
use std::collections::{HashMap, VecDeque};
use std::ops::Index;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid graph: {0}")]
    Validation(String),
}

/// An immutable simple connected graph with stable edge indices.
#[derive(Debug, Clone)]
pub struct Graph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    /// Per vertex: `(neighbor, edge index)` pairs in edge-insertion order.
    adjacency: Vec<Vec<(usize, usize)>>,
    labels: Option<Vec<String>>,
    /// Length of a shortest cycle; `None` when the graph is acyclic.
    girth: Option<usize>,
}

impl Graph {
    /// Builds a graph from explicit endpoint pairs.
    ///
    /// Rejects self-loops, duplicate edges, out-of-range endpoints, and
    /// disconnected vertex sets.
    pub fn from_edges(
        vertex_count: usize,
        edges: Vec<(usize, usize)>,
    ) -> Result<Self, GraphError> {
        Self::from_edges_labeled(vertex_count, edges, None)
    }

    pub fn from_edges_labeled(
        vertex_count: usize,
        edges: Vec<(usize, usize)>,
        labels: Option<Vec<String>>,
    ) -> Result<Self, GraphError> {
        if vertex_count == 0 {
            return Err(GraphError::Validation("graph has no vertices".into()));
        }
        if let Some(ref l) = labels {
            if l.len() != vertex_count {
                return Err(GraphError::Validation(format!(
                    "{} labels for {} vertices",
                    l.len(),
                    vertex_count
                )));
            }
        }
        let mut adjacency = vec![Vec::new(); vertex_count];
        let mut seen = HashMap::new();
        for (idx, &(u, v)) in edges.iter().enumerate() {
            if u >= vertex_count || v >= vertex_count {
                return Err(GraphError::Validation(format!(
                    "edge ({u}, {v}) references a vertex >= {vertex_count}"
                )));
            }
            if u == v {
                return Err(GraphError::Validation(format!("self-loop at vertex {u}")));
            }
            let key = (u.min(v), u.max(v));
            if seen.insert(key, idx).is_some() {
                return Err(GraphError::Validation(format!(
                    "duplicate edge between {u} and {v}"
                )));
            }
            adjacency[u].push((v, idx));
            adjacency[v].push((u, idx));
        }
        let girth = compute_girth(vertex_count, &adjacency);
        let graph = Graph {
            vertex_count,
            edges,
            adjacency,
            labels,
            girth,
        };
        if !graph.is_connected() {
            return Err(GraphError::Validation("graph is not connected".into()));
        }
        Ok(graph)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn endpoints(&self, edge: usize) -> (usize, usize) {
        self.edges[edge]
    }

    /// `(neighbor, edge index)` pairs incident to `v`.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    /// The index of the edge joining `u` and `v`, if present.
    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        self.adjacency[u]
            .iter()
            .find(|&&(w, _)| w == v)
            .map(|&(_, idx)| idx)
    }

    pub fn label(&self, v: usize) -> String {
        match &self.labels {
            Some(l) => l[v].clone(),
            None => v.to_string(),
        }
    }

    fn is_connected(&self) -> bool {
        self.bfs_distances(0).iter().all(|&d| d != usize::MAX)
    }

    /// Unweighted shortest-path distances from `root` to every vertex.
    pub fn bfs_distances(&self, root: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.vertex_count];
        dist[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &(v, _) in &self.adjacency[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Hop distance between two vertices (0 when `u == v`).
    pub fn hop_distance(&self, u: usize, v: usize) -> usize {
        self.bfs_distances(u)[v]
    }

    /// Shortest cycle length, or `None` for acyclic graphs.
    pub fn girth(&self) -> Option<usize> {
        self.girth
    }

    /// True when every cycle has length at least `k` (acyclic counts as yes).
    pub fn has_min_girth(&self, k: usize) -> bool {
        self.girth.is_none_or(|g| g >= k)
    }

    /// Sum of the weights of the edges incident to `x`.
    pub fn vertex_mass(&self, weights: &WeightVector, x: usize) -> f64 {
        debug_assert_eq!(weights.len(), self.edge_count());
        self.adjacency[x]
            .iter()
            .map(|&(_, e)| weights[e])
            .sum()
    }

    /// All vertex masses at once.
    pub fn vertex_masses(&self, weights: &WeightVector) -> Vec<f64> {
        (0..self.vertex_count)
            .map(|x| self.vertex_mass(weights, x))
            .collect()
    }
}

/// Per-root BFS girth scan: every non-tree edge closes a walk of length
/// `dist(u) + dist(v) + 1`, which always contains a cycle no longer than
/// itself, and the bound is attained for roots on a shortest cycle.
fn compute_girth(n: usize, adjacency: &[Vec<(usize, usize)>]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for root in 0..n {
        let mut dist = vec![usize::MAX; n];
        let mut parent_edge = vec![usize::MAX; n];
        dist[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &(v, e) in &adjacency[u] {
                if e == parent_edge[u] {
                    continue;
                }
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    parent_edge[v] = e;
                    queue.push_back(v);
                } else {
                    let cycle = dist[u] + dist[v] + 1;
                    if best.is_none_or(|b| cycle < b) {
                        best = Some(cycle);
                    }
                }
            }
        }
        if best == Some(3) {
            break;
        }
    }
    best
}

/// Strictly positive edge weights aligned with a graph's edge order.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct WeightVector {
    values: Vec<f64>,
}

impl WeightVector {
    pub fn new(values: Vec<f64>) -> Result<Self, GraphError> {
        for (i, &w) in values.iter().enumerate() {
            if !w.is_finite() || w <= 0.0 {
                return Err(GraphError::Validation(format!(
                    "edge weight {w} at index {i} is not a positive finite number"
                )));
            }
        }
        Ok(WeightVector { values })
    }

    /// All-ones weights.
    pub fn unit(edge_count: usize) -> Self {
        WeightVector {
            values: vec![1.0; edge_count],
        }
    }

    /// Builds weights from log-coordinates `r` via `w = exp(r)`.
    pub fn from_logs(r: &[f64]) -> Self {
        WeightVector {
            values: r.iter().map(|&x| x.exp()).collect(),
        }
    }

    pub fn logs(&self) -> Vec<f64> {
        self.values.iter().map(|&w| w.ln()).collect()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn scaled(&self, c: f64) -> Self {
        WeightVector {
            values: self.values.iter().map(|&w| w * c).collect(),
        }
    }

    /// Rescales so the entries sum to one (weights are only meaningful up to
    /// a global scale, so this is the canonical representative).
    pub fn normalized_to_sum_one(&self) -> Self {
        let total: f64 = self.values.iter().sum();
        self.scaled(1.0 / total)
    }
}

impl Index<usize> for WeightVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

/// Size, induced-edge, and boundary-edge counts of a vertex subset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SubsetStats {
    pub size: usize,
    pub internal_edges: usize,
    pub boundary_edges: usize,
}

/// A vertex subset with cached counts of its vertices, induced edges, and
/// boundary edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexSubset {
    members: Vec<bool>,
    stats: SubsetStats,
}

impl VertexSubset {
    pub fn new<I: IntoIterator<Item = usize>>(graph: &Graph, vertices: I) -> Self {
        let mut members = vec![false; graph.vertex_count()];
        for v in vertices {
            assert!(v < graph.vertex_count(), "subset vertex {v} out of range");
            members[v] = true;
        }
        let stats = stats_of(graph, &members);
        VertexSubset { members, stats }
    }

    pub fn contains(&self, v: usize) -> bool {
        self.members[v]
    }

    pub fn vertices(&self) -> Vec<usize> {
        (0..self.members.len()).filter(|&v| self.members[v]).collect()
    }

    pub fn size(&self) -> usize {
        self.stats.size
    }

    pub fn internal_edges(&self) -> usize {
        self.stats.internal_edges
    }

    pub fn boundary_edges(&self) -> usize {
        self.stats.boundary_edges
    }
}

fn stats_of(graph: &Graph, members: &[bool]) -> SubsetStats {
    let size = members.iter().filter(|&&m| m).count();
    let mut internal_edges = 0;
    let mut boundary_edges = 0;
    for &(u, v) in graph.edges() {
        match (members[u], members[v]) {
            (true, true) => internal_edges += 1,
            (true, false) | (false, true) => boundary_edges += 1,
            (false, false) => {}
        }
    }
    SubsetStats {
        size,
        internal_edges,
        boundary_edges,
    }
}

/// Recomputes `(|S|, |E(S)|, |E(S, S^c)|)` for a subset of this graph's
/// vertices.
pub fn subset_stats(graph: &Graph, subset: &VertexSubset) -> SubsetStats {
    assert_eq!(
        subset.members.len(),
        graph.vertex_count(),
        "subset built for a different vertex count"
    );
    stats_of(graph, &subset.members)
}

// ---------------------------------------------------------------------------
// File formats
// ---------------------------------------------------------------------------

/// Parses the plain edge-list format: one `u v [weight]` triple per line,
/// `#` starts a comment, vertex tokens are arbitrary labels mapped to indices
/// in order of first appearance, and a missing weight defaults to 1.
pub fn parse_edge_list(text: &str) -> Result<(Graph, WeightVector), GraphError> {
    let mut label_index: HashMap<String, usize> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut edges = Vec::new();
    let mut weights = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() < 2 || tokens.len() > 3 {
            return Err(GraphError::Parse {
                line: lineno + 1,
                message: format!("expected `u v [weight]`, found {} tokens", tokens.len()),
            });
        }
        let mut vertex = |token: &str| -> usize {
            *label_index.entry(token.to_string()).or_insert_with(|| {
                labels.push(token.to_string());
                labels.len() - 1
            })
        };
        let u = vertex(tokens[0]);
        let v = vertex(tokens[1]);
        let w = if tokens.len() == 3 {
            tokens[2].parse::<f64>().map_err(|_| GraphError::Parse {
                line: lineno + 1,
                message: format!("cannot parse weight `{}`", tokens[2]),
            })?
        } else {
            1.0
        };
        if !w.is_finite() || w <= 0.0 {
            return Err(GraphError::Parse {
                line: lineno + 1,
                message: format!("weight {w} is not a positive finite number"),
            });
        }
        edges.push((u, v));
        weights.push(w);
    }

    if edges.is_empty() {
        return Err(GraphError::Validation("no edges in input".into()));
    }
    let graph = Graph::from_edges_labeled(labels.len(), edges, Some(labels))?;
    Ok((graph, WeightVector::new(weights)?))
}

#[derive(Deserialize)]
struct GraphDocument {
    vertices: Vec<String>,
    edges: Vec<EdgeRecord>,
}

#[derive(Deserialize)]
struct EdgeRecord {
    u: String,
    v: String,
    #[serde(default = "default_weight")]
    w: f64,
}

fn default_weight() -> f64 {
    1.0
}

/// Parses the structured JSON format:
/// `{"vertices": ["a", ...], "edges": [{"u": "a", "v": "b", "w": 2.0}, ...]}`
/// where `w` is optional and defaults to 1.
pub fn parse_json(text: &str) -> Result<(Graph, WeightVector), GraphError> {
    let doc: GraphDocument = serde_json::from_str(text).map_err(|e| GraphError::Parse {
        line: e.line(),
        message: e.to_string(),
    })?;
    let mut label_index = HashMap::new();
    for (i, label) in doc.vertices.iter().enumerate() {
        if label_index.insert(label.clone(), i).is_some() {
            return Err(GraphError::Validation(format!(
                "duplicate vertex label `{label}`"
            )));
        }
    }
    let mut edges = Vec::new();
    let mut weights = Vec::new();
    for record in &doc.edges {
        let resolve = |token: &String| {
            label_index
                .get(token)
                .copied()
                .ok_or_else(|| GraphError::Validation(format!("unknown vertex `{token}`")))
        };
        edges.push((resolve(&record.u)?, resolve(&record.v)?));
        weights.push(record.w);
    }
    if edges.is_empty() {
        return Err(GraphError::Validation("no edges in input".into()));
    }
    let graph = Graph::from_edges_labeled(doc.vertices.len(), edges, Some(doc.vertices))?;
    Ok((graph, WeightVector::new(weights)?))
}

/// Parses either supported format, sniffing JSON by a leading `{`.
pub fn parse_graph(text: &str) -> Result<(Graph, WeightVector), GraphError> {
    if text.trim_start().starts_with('{') {
        parse_json(text)
    } else {
        parse_edge_list(text)
    }
}

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

/// Constructors for the standard test-bench graphs.
pub mod builders {
    use super::Graph;

    fn build(n: usize, edges: Vec<(usize, usize)>) -> Graph {
        Graph::from_edges(n, edges).expect("builder produced an invalid graph")
    }

    /// Path on `n` vertices (`n - 1` edges).
    pub fn path(n: usize) -> Graph {
        assert!(n >= 2, "path needs at least 2 vertices");
        build(n, (0..n - 1).map(|i| (i, i + 1)).collect())
    }

    /// Cycle on `n` vertices.
    pub fn cycle(n: usize) -> Graph {
        assert!(n >= 3, "cycle needs at least 3 vertices");
        build(n, (0..n).map(|i| (i, (i + 1) % n)).collect())
    }

    /// Star with one center (vertex 0) and `leaves` pendant vertices.
    pub fn star(leaves: usize) -> Graph {
        assert!(leaves >= 1, "star needs at least 1 leaf");
        build(leaves + 1, (1..=leaves).map(|i| (0, i)).collect())
    }

    /// Complete graph on `n` vertices.
    pub fn complete(n: usize) -> Graph {
        assert!(n >= 2, "complete graph needs at least 2 vertices");
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v));
            }
        }
        build(n, edges)
    }

    /// Generalized Petersen graph GP(n, k): outer ring `0..n`, inner vertices
    /// `n..2n`, spokes `(i, n+i)`, and inner chords `(n+i, n+((i+k) mod n))`.
    pub fn generalized_petersen(n: usize, k: usize) -> Graph {
        assert!(n >= 3 && k >= 1 && 2 * k != n && k < n);
        let mut edges = Vec::new();
        for i in 0..n {
            edges.push((i, (i + 1) % n));
        }
        for i in 0..n {
            edges.push((i, n + i));
        }
        for i in 0..n {
            edges.push((n + i, n + ((i + k) % n)));
        }
        build(2 * n, edges)
    }

    /// Two disjoint cycles of lengths `a` and `b` joined by a single bridge
    /// edge. Vertices `0..a` form the first cycle, `a..a+b` the second; the
    /// bridge `(0, a)` is the last edge.
    pub fn dumbbell(a: usize, b: usize) -> Graph {
        assert!(a >= 3 && b >= 3);
        let mut edges = Vec::new();
        for i in 0..a {
            edges.push((i, (i + 1) % a));
        }
        for i in 0..b {
            edges.push((a + i, a + ((i + 1) % b)));
        }
        edges.push((0, a));
        build(a + b, edges)
    }

    /// Cycle of length `a` with a path of `b` extra edges hanging off
    /// vertex 0. The tail edges come after the cycle edges.
    pub fn tadpole(a: usize, b: usize) -> Graph {
        assert!(a >= 3 && b >= 1);
        let mut edges = Vec::new();
        for i in 0..a {
            edges.push((i, (i + 1) % a));
        }
        let mut prev = 0;
        for i in 0..b {
            edges.push((prev, a + i));
            prev = a + i;
        }
        build(a + b, edges)
    }

    /// The Heawood graph: 14-cycle `0..14` plus chords `(i, (i+5) mod 14)`
    /// for even `i`. Girth 6, 3-regular, 21 edges.
    pub fn heawood() -> Graph {
        let mut edges = Vec::new();
        for i in 0..14 {
            edges.push((i, (i + 1) % 14));
        }
        for i in (0..14).step_by(2) {
            edges.push((i, (i + 5) % 14));
        }
        build(14, edges)
    }

    /// Heawood graph bridged to a hexagon: Heawood on `0..14`, hexagon on
    /// `14..20`, bridge `(3, 17)` as the final edge. 20 vertices, 28 edges.
    pub fn heawood_hexagon_dumbbell() -> Graph {
        let heawood = heawood();
        let mut edges = heawood.edges().to_vec();
        for i in 0..6 {
            edges.push((14 + i, 14 + ((i + 1) % 6)));
        }
        edges.push((3, 17));
        build(20, edges)
    }

    /// GP(8, 3) with two local perturbations: the outer edge `(0, 1)` is
    /// subdivided through a new vertex 16, and the outer edge `(5, 6)` is
    /// deleted. 17 vertices, 24 edges, girth still 6.
    pub fn gp83_asymmetric() -> Graph {
        let base = generalized_petersen(8, 3);
        let mut edges: Vec<(usize, usize)> = base
            .edges()
            .iter()
            .copied()
            .filter(|&(u, v)| !(u.min(v) == 0 && u.max(v) == 1) && !(u.min(v) == 5 && u.max(v) == 6))
            .collect();
        edges.push((0, 16));
        edges.push((16, 1));
        build(17, edges)
    }

    /// Named graphs exposed on the command line.
    pub const BUILTIN_NAMES: [&str; 10] = [
        "k2",
        "p3",
        "c6",
        "star_1_3",
        "d6_6",
        "tadpole_6_1",
        "heawood_hex",
        "gp_8_3",
        "gp83_asym",
        "triangle",
    ];

    /// Looks up a builtin graph by name.
    pub fn builtin(name: &str) -> Option<Graph> {
        match name {
            "k2" => Some(path(2)),
            "p3" => Some(path(3)),
            "c6" => Some(cycle(6)),
            "star_1_3" => Some(star(3)),
            "d6_6" => Some(dumbbell(6, 6)),
            "tadpole_6_1" => Some(tadpole(6, 1)),
            "heawood_hex" => Some(heawood_hexagon_dumbbell()),
            "gp_8_3" => Some(generalized_petersen(8, 3)),
            "gp83_asym" => Some(gp83_asymmetric()),
            "triangle" => Some(cycle(3)),
            _ => None,
        }
    }
}
