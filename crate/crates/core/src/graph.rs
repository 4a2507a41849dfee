//! Directed, bipartite and time-varying graphs, plus the weight-matrix
//! constructors used by every mixing step.
//!
//! Vertices are identified by integer labels. Storage is dense: each graph
//! keeps a sorted label vector and adjacency lists over positions `0..V-1`,
//! so weight matrices can be indexed directly by vertex order.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("graph must have at least one vertex")]
    EmptyVertexSet,
    #[error("duplicate vertex label {0}")]
    DuplicateLabel(usize),
    #[error("unknown vertex {0}")]
    UnknownVertex(usize),
    #[error("vertex subset is not contained in the graph")]
    SubsetNotContained,
    #[error("graph is not undirected: edge ({0}, {1}) has no reverse")]
    NotUndirected(usize, usize),
    #[error("graph is not connected")]
    NotConnected,
    #[error("graph is not strongly connected")]
    NotStronglyConnected,
    #[error("missing self-loop at vertex {0}")]
    MissingSelfLoop(usize),
    #[error("weight matrix is not compliant with the graph at entry ({0}, {1})")]
    NotCompliant(usize, usize),
    #[error("weight matrix has a negative entry at ({0}, {1})")]
    NegativeWeight(usize, usize),
    #[error("weight matrix dimension {0} does not match vertex count {1}")]
    DimensionMismatch(usize, usize),
    #[error("window length must be positive")]
    NonPositiveWindow,
    #[error("horizon {0} is shorter than the window length {1}")]
    HorizonTooShort(usize, usize),
    #[error("time-varying graph frames must share one vertex set")]
    FrameVertexMismatch,
    #[error("bipartite edge ({0}, {1}) is out of range")]
    BipartiteOutOfRange(usize, usize),
    #[error("left vertex {0} has no right neighbor")]
    IsolatedLeftVertex(usize),
    #[error("parse error: {0}")]
    Parse(String),
}

/// Directed graph; an edge `(u, v)` means `v` can receive from `u`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedGraph {
    labels: Vec<usize>,
    in_adj: Vec<Vec<usize>>,
    out_adj: Vec<Vec<usize>>,
    edge_count: usize,
}

impl DirectedGraph {
    /// Graph over the given labels with edges given as label pairs.
    /// Duplicate edges are collapsed.
    pub fn from_edges(
        labels: impl IntoIterator<Item = usize>,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        let mut labels: Vec<usize> = labels.into_iter().collect();
        labels.sort_unstable();
        if labels.is_empty() {
            return Err(GraphError::EmptyVertexSet);
        }
        for w in labels.windows(2) {
            if w[0] == w[1] {
                return Err(GraphError::DuplicateLabel(w[0]));
            }
        }
        let n = labels.len();
        let mut set: BTreeSet<(usize, usize)> = BTreeSet::new();
        for (u, v) in edges {
            let up = labels
                .binary_search(&u)
                .map_err(|_| GraphError::UnknownVertex(u))?;
            let vp = labels
                .binary_search(&v)
                .map_err(|_| GraphError::UnknownVertex(v))?;
            set.insert((up, vp));
        }
        let mut in_adj = vec![Vec::new(); n];
        let mut out_adj = vec![Vec::new(); n];
        for &(u, v) in &set {
            out_adj[u].push(v);
            in_adj[v].push(u);
        }
        Ok(Self { labels, in_adj, out_adj, edge_count: set.len() })
    }

    /// Graph over labels `0..n` with no edges.
    pub fn contiguous(n: usize) -> Result<Self, GraphError> {
        Self::from_edges(0..n, std::iter::empty())
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label_of(&self, pos: usize) -> usize {
        self.labels[pos]
    }

    pub fn position_of(&self, label: usize) -> Result<usize, GraphError> {
        self.labels
            .binary_search(&label)
            .map_err(|_| GraphError::UnknownVertex(label))
    }

    pub fn contains_vertex(&self, label: usize) -> bool {
        self.labels.binary_search(&label).is_ok()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        match (self.position_of(u), self.position_of(v)) {
            (Ok(up), Ok(vp)) => self.out_adj[up].binary_search(&vp).is_ok(),
            _ => false,
        }
    }

    /// Edges as label pairs, sorted by `(u, v)`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count);
        for (up, vs) in self.out_adj.iter().enumerate() {
            for &vp in vs {
                out.push((self.labels[up], self.labels[vp]));
            }
        }
        out.sort_unstable();
        out
    }

    /// In-neighbors of `v` as labels, ascending.
    pub fn in_neighbors(&self, v: usize) -> Result<Vec<usize>, GraphError> {
        let vp = self.position_of(v)?;
        Ok(self.in_adj[vp].iter().map(|&u| self.labels[u]).collect())
    }

    /// Out-neighbors of `u` as labels, ascending.
    pub fn out_neighbors(&self, u: usize) -> Result<Vec<usize>, GraphError> {
        let up = self.position_of(u)?;
        Ok(self.out_adj[up].iter().map(|&v| self.labels[v]).collect())
    }

    /// In-neighbor positions of the vertex at `pos`, ascending.
    pub fn in_positions(&self, pos: usize) -> &[usize] {
        &self.in_adj[pos]
    }

    pub fn out_positions(&self, pos: usize) -> &[usize] {
        &self.out_adj[pos]
    }

    pub fn has_self_loop(&self, label: usize) -> bool {
        self.has_edge(label, label)
    }

    /// In-degree counting self-loops.
    pub fn in_degree(&self, pos: usize) -> usize {
        self.in_adj[pos].len()
    }

    pub fn out_degree(&self, pos: usize) -> usize {
        self.out_adj[pos].len()
    }

    pub fn is_symmetric(&self) -> bool {
        self.out_adj.iter().enumerate().all(|(u, vs)| {
            vs.iter().all(|&v| self.out_adj[v].binary_search(&u).is_ok())
        })
    }

    /// First asymmetric edge as label pair, if any.
    fn asymmetric_edge(&self) -> Option<(usize, usize)> {
        for (u, vs) in self.out_adj.iter().enumerate() {
            for &v in vs {
                if self.out_adj[v].binary_search(&u).is_err() {
                    return Some((self.labels[u], self.labels[v]));
                }
            }
        }
        None
    }

    fn reachable_from(&self, start: usize, reverse: bool) -> Vec<bool> {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(u) = stack.pop() {
            let adj = if reverse { &self.in_adj[u] } else { &self.out_adj[u] };
            for &v in adj {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }

    pub fn is_strongly_connected(&self) -> bool {
        let fwd = self.reachable_from(0, false);
        if fwd.iter().any(|&s| !s) {
            return false;
        }
        self.reachable_from(0, true).iter().all(|&s| s)
    }

    /// Connectivity in the undirected sense; errors if the graph is directed,
    /// distinguishing "not undirected" from "disconnected".
    pub fn is_connected_undirected(&self) -> Result<bool, GraphError> {
        if let Some((u, v)) = self.asymmetric_edge() {
            return Err(GraphError::NotUndirected(u, v));
        }
        Ok(self.reachable_from(0, false).iter().all(|&s| s))
    }

    /// Restriction to a vertex subset (given as labels).
    pub fn restrict(&self, subset: &[usize]) -> Result<Self, GraphError> {
        if subset.is_empty() {
            return Err(GraphError::EmptyVertexSet);
        }
        let keep: BTreeSet<usize> = subset.iter().copied().collect();
        for &l in &keep {
            if !self.contains_vertex(l) {
                return Err(GraphError::SubsetNotContained);
            }
        }
        let edges = self
            .edges()
            .into_iter()
            .filter(|(u, v)| keep.contains(u) && keep.contains(v));
        Self::from_edges(keep.iter().copied(), edges)
    }

    pub fn union(&self, other: &Self) -> Self {
        let labels: BTreeSet<usize> = self
            .labels
            .iter()
            .chain(other.labels.iter())
            .copied()
            .collect();
        let edges: Vec<_> = self
            .edges()
            .into_iter()
            .chain(other.edges())
            .collect();
        Self::from_edges(labels, edges).expect("union of valid graphs is valid")
    }

    /// Edge intersection over a shared vertex set.
    pub fn edge_intersection(&self, other: &Self) -> Result<Self, GraphError> {
        if self.labels != other.labels {
            return Err(GraphError::FrameVertexMismatch);
        }
        let edges = self
            .edges()
            .into_iter()
            .filter(|&(u, v)| other.has_edge(u, v));
        Self::from_edges(self.labels.iter().copied(), edges)
    }

    /// Same graph with a self-loop at every vertex.
    pub fn with_self_loops(&self) -> Self {
        let loops = self.labels.iter().map(|&l| (l, l));
        let edges: Vec<_> = self.edges().into_iter().chain(loops).collect();
        Self::from_edges(self.labels.iter().copied(), edges).expect("valid")
    }

    /// Symmetric closure restricted to mutual edges: keeps `(u, v)` only when
    /// `(v, u)` is also present.
    pub fn mutual_edges(&self) -> Self {
        let edges: Vec<_> = self
            .edges()
            .into_iter()
            .filter(|&(u, v)| self.has_edge(v, u))
            .collect();
        Self::from_edges(self.labels.iter().copied(), edges).expect("valid")
    }

    /// Strongly connected components as sorted position lists, in a
    /// deterministic order (by smallest member).
    pub fn strongly_connected_components(&self) -> Vec<Vec<usize>> {
        // Iterative Tarjan.
        let n = self.vertex_count();
        let mut index = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut on_stack = vec![false; n];
        let mut stack: Vec<usize> = Vec::new();
        let mut comps: Vec<Vec<usize>> = Vec::new();
        let mut counter = 0usize;
        for root in 0..n {
            if index[root] != usize::MAX {
                continue;
            }
            let mut call: Vec<(usize, usize)> = vec![(root, 0)];
            while let Some(&(v, ei)) = call.last() {
                if index[v] == usize::MAX {
                    index[v] = counter;
                    low[v] = counter;
                    counter += 1;
                    stack.push(v);
                    on_stack[v] = true;
                }
                if ei < self.out_adj[v].len() {
                    call.last_mut().unwrap().1 += 1;
                    let w = self.out_adj[v][ei];
                    if index[w] == usize::MAX {
                        call.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                } else {
                    if low[v] == index[v] {
                        let mut comp = Vec::new();
                        loop {
                            let w = stack.pop().unwrap();
                            on_stack[w] = false;
                            comp.push(w);
                            if w == v {
                                break;
                            }
                        }
                        comp.sort_unstable();
                        comps.push(comp);
                    }
                    call.pop();
                    if let Some(&(parent, _)) = call.last() {
                        low[parent] = low[parent].min(low[v]);
                    }
                }
            }
        }
        comps.sort_by_key(|c| c[0]);
        comps
    }

    /// BFS distances and lexicographically-smallest-parent tree from `start`
    /// (positions). Unreachable vertices get `usize::MAX`.
    pub fn bfs(&self, start: usize) -> (Vec<usize>, Vec<Option<usize>>) {
        let n = self.vertex_count();
        let mut dist = vec![usize::MAX; n];
        let mut parent = vec![None; n];
        let mut frontier = vec![start];
        dist[start] = 0;
        let mut d = 0;
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for &u in &frontier {
                for &v in &self.out_adj[u] {
                    if dist[v] == usize::MAX {
                        dist[v] = d + 1;
                        parent[v] = Some(u);
                        next.push(v);
                    } else if dist[v] == d + 1 {
                        // smallest parent wins for deterministic paths
                        if let Some(p) = parent[v] {
                            if u < p {
                                parent[v] = Some(u);
                            }
                        }
                    }
                }
            }
            next.sort_unstable();
            next.dedup();
            frontier = next;
            d += 1;
        }
        (dist, parent)
    }

    /// Line-oriented text form: `V <count>`, optional `N <labels...>` when the
    /// labels are not `0..count`, then `E <u> <v>` per edge sorted by `(u, v)`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "V {}", self.vertex_count()).unwrap();
        if self.labels.iter().enumerate().any(|(i, &l)| i != l) {
            let joined: Vec<String> = self.labels.iter().map(|l| l.to_string()).collect();
            writeln!(s, "N {}", joined.join(" ")).unwrap();
        }
        for (u, v) in self.edges() {
            writeln!(s, "E {} {}", u, v).unwrap();
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, GraphError> {
        let mut count: Option<usize> = None;
        let mut labels: Option<Vec<usize>> = None;
        let mut edges: Vec<(usize, usize)> = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let tag = parts.next().unwrap();
            if tag == "W" {
                continue; // weights parsed by WeightMatrix::from_text
            }
            let nums: Result<Vec<usize>, _> = parts.map(|t| t.parse::<usize>()).collect();
            let nums = nums.map_err(|e| GraphError::Parse(e.to_string()))?;
            match tag {
                "V" => count = Some(nums[0]),
                "N" => labels = Some(nums),
                "E" => {
                    if nums.len() != 2 {
                        return Err(GraphError::Parse(format!("bad edge line: {line}")));
                    }
                    edges.push((nums[0], nums[1]));
                }
                other => return Err(GraphError::Parse(format!("unknown tag {other}"))),
            }
        }
        let count = count.ok_or_else(|| GraphError::Parse("missing V line".into()))?;
        let labels = labels.unwrap_or_else(|| (0..count).collect());
        if labels.len() != count {
            return Err(GraphError::Parse("label count does not match V".into()));
        }
        Self::from_edges(labels, edges)
    }
}

/// Bipartite graph from components (left) to agents (right); used for the
/// interference and estimate graphs. Edges are `(p, i)` pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    left_count: usize,
    right_count: usize,
    left_adj: Vec<Vec<usize>>,
    right_adj: Vec<Vec<usize>>,
    edge_count: usize,
}

impl BipartiteGraph {
    pub fn from_edges(
        left_count: usize,
        right_count: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        let mut set = BTreeSet::new();
        for (p, i) in edges {
            if p >= left_count || i >= right_count {
                return Err(GraphError::BipartiteOutOfRange(p, i));
            }
            set.insert((p, i));
        }
        let mut left_adj = vec![Vec::new(); left_count];
        let mut right_adj = vec![Vec::new(); right_count];
        for &(p, i) in &set {
            left_adj[p].push(i);
            right_adj[i].push(p);
        }
        for (p, adj) in left_adj.iter().enumerate() {
            if adj.is_empty() {
                return Err(GraphError::IsolatedLeftVertex(p));
            }
        }
        Ok(Self { left_count, right_count, left_adj, right_adj, edge_count: set.len() })
    }

    pub fn complete(left_count: usize, right_count: usize) -> Self {
        let edges = (0..left_count).flat_map(|p| (0..right_count).map(move |i| (p, i)));
        Self::from_edges(left_count, right_count, edges).expect("complete graph is valid")
    }

    pub fn left_count(&self) -> usize {
        self.left_count
    }

    pub fn right_count(&self) -> usize {
        self.right_count
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn has_edge(&self, p: usize, i: usize) -> bool {
        p < self.left_count && self.left_adj[p].binary_search(&i).is_ok()
    }

    /// Agents attached to component `p`, ascending.
    pub fn right_neighbors(&self, p: usize) -> &[usize] {
        &self.left_adj[p]
    }

    /// Components attached to agent `i`, ascending.
    pub fn left_neighbors(&self, i: usize) -> &[usize] {
        &self.right_adj[i]
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count);
        for (p, adj) in self.left_adj.iter().enumerate() {
            for &i in adj {
                out.push((p, i));
            }
        }
        out
    }

    pub fn is_subgraph_of(&self, other: &Self) -> bool {
        self.left_count == other.left_count
            && self.right_count == other.right_count
            && self.edges().iter().all(|&(p, i)| other.has_edge(p, i))
    }

    pub fn is_complete(&self) -> bool {
        self.edge_count == self.left_count * self.right_count
    }
}

/// Square nonnegative matrix compliant with a graph: entry `(u, v)` is
/// positive iff `(v, u)` is an edge (row = receiver, column = sender).
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    graph: DirectedGraph,
    entries: DMatrix<f64>,
}

impl WeightMatrix {
    pub fn new(graph: DirectedGraph, entries: DMatrix<f64>) -> Result<Self, GraphError> {
        let n = graph.vertex_count();
        if entries.nrows() != n || entries.ncols() != n {
            return Err(GraphError::DimensionMismatch(entries.nrows(), n));
        }
        for u in 0..n {
            for v in 0..n {
                let w = entries[(u, v)];
                if w < 0.0 {
                    return Err(GraphError::NegativeWeight(u, v));
                }
                let edge = graph.out_adj[v].binary_search(&u).is_ok();
                if (w > 0.0) != edge {
                    return Err(GraphError::NotCompliant(u, v));
                }
            }
        }
        Ok(Self { graph, entries })
    }

    pub fn graph(&self) -> &DirectedGraph {
        &self.graph
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn entry(&self, receiver: usize, sender: usize) -> f64 {
        self.entries[(receiver, sender)]
    }

    pub fn dim(&self) -> usize {
        self.graph.vertex_count()
    }

    /// `x' = W x`, accumulating over in-neighbors in ascending position order.
    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        let n = self.dim();
        let mut out = DVector::zeros(n);
        for r in 0..n {
            let mut acc = 0.0;
            for &s in self.graph.in_positions(r) {
                acc += self.entries[(r, s)] * x[s];
            }
            out[r] = acc;
        }
        out
    }

    /// Metropolis weights on an undirected connected graph; self-loops are
    /// added implicitly. Off-diagonal `w_uv = 1 / (1 + max(deg u, deg v))`,
    /// degrees not counting self-loops.
    pub fn metropolis(g: &DirectedGraph) -> Result<Self, GraphError> {
        if !g.is_connected_undirected()? {
            return Err(GraphError::NotConnected);
        }
        let n = g.vertex_count();
        let deg: Vec<usize> = (0..n)
            .map(|u| g.out_positions(u).iter().filter(|&&v| v != u).count())
            .collect();
        let mut w = DMatrix::zeros(n, n);
        for u in 0..n {
            for &v in g.out_positions(u) {
                if v != u {
                    w[(v, u)] = 1.0 / (1.0 + deg[u].max(deg[v]) as f64);
                }
            }
        }
        for u in 0..n {
            let off: f64 = (0..n).filter(|&v| v != u).map(|v| w[(u, v)]).sum();
            w[(u, u)] = 1.0 - off;
        }
        Self::new(g.with_self_loops(), w)
    }

    /// Column-stochastic weights: column `v` puts `1/out-degree(v)` on each
    /// out-neighbor. Requires a self-loop at every vertex, so all columns sum
    /// to one and positive entries are at least `1/V`.
    pub fn uniform_column_stochastic(g: &DirectedGraph) -> Result<Self, GraphError> {
        let n = g.vertex_count();
        for pos in 0..n {
            if g.out_adj[pos].binary_search(&pos).is_err() {
                return Err(GraphError::MissingSelfLoop(g.labels[pos]));
            }
        }
        let mut w = DMatrix::zeros(n, n);
        for v in 0..n {
            let share = 1.0 / g.out_degree(v) as f64;
            for &u in g.out_positions(v) {
                w[(u, v)] = share;
            }
        }
        Self::new(g.clone(), w)
    }

    pub fn is_row_stochastic(&self, tol: f64) -> bool {
        (0..self.dim()).all(|r| (self.entries.row(r).sum() - 1.0).abs() <= tol)
    }

    pub fn is_column_stochastic(&self, tol: f64) -> bool {
        (0..self.dim()).all(|c| (self.entries.column(c).sum() - 1.0).abs() <= tol)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        let n = self.dim();
        (0..n).all(|u| (u..n).all(|v| (self.entries[(u, v)] - self.entries[(v, u)]).abs() <= tol))
    }

    /// Text form: graph lines followed by `W <u> <v> <weight>` per positive
    /// entry, sorted by label pair (`u` receives from `v`).
    pub fn to_text(&self) -> String {
        let mut s = self.graph.to_text();
        let n = self.dim();
        let mut rows: Vec<(usize, usize, f64)> = Vec::new();
        for u in 0..n {
            for v in 0..n {
                if self.entries[(u, v)] > 0.0 {
                    rows.push((self.graph.labels[u], self.graph.labels[v], self.entries[(u, v)]));
                }
            }
        }
        rows.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        for (u, v, w) in rows {
            writeln!(s, "W {} {} {}", u, v, w).unwrap();
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, GraphError> {
        let graph = DirectedGraph::from_text(text)?;
        let n = graph.vertex_count();
        let mut entries = DMatrix::zeros(n, n);
        for line in text.lines() {
            let line = line.trim();
            if !line.starts_with("W ") {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 4 {
                return Err(GraphError::Parse(format!("bad weight line: {line}")));
            }
            let u: usize = parts[1].parse().map_err(|e: std::num::ParseIntError| {
                GraphError::Parse(e.to_string())
            })?;
            let v: usize = parts[2].parse().map_err(|e: std::num::ParseIntError| {
                GraphError::Parse(e.to_string())
            })?;
            let w: f64 = parts[3]
                .parse()
                .map_err(|e: std::num::ParseFloatError| GraphError::Parse(e.to_string()))?;
            entries[(graph.position_of(u)?, graph.position_of(v)?)] = w;
        }
        Self::new(graph, entries)
    }
}

/// Fixed vertex set with an edge set per iteration index; frames repeat
/// cyclically beyond the stored sequence.
#[derive(Debug, Clone)]
pub struct TimeVaryingGraph {
    frames: Vec<DirectedGraph>,
}

impl TimeVaryingGraph {
    pub fn new(frames: Vec<DirectedGraph>) -> Result<Self, GraphError> {
        if frames.is_empty() {
            return Err(GraphError::EmptyVertexSet);
        }
        let labels = frames[0].labels().to_vec();
        if frames.iter().any(|f| f.labels() != labels.as_slice()) {
            return Err(GraphError::FrameVertexMismatch);
        }
        Ok(Self { frames })
    }

    pub fn constant(g: DirectedGraph) -> Self {
        Self { frames: vec![g] }
    }

    pub fn labels(&self) -> &[usize] {
        self.frames[0].labels()
    }

    pub fn frame_count(&self) -> usize {
        self.frames.len()
    }

    pub fn graph_at(&self, k: usize) -> &DirectedGraph {
        &self.frames[k % self.frames.len()]
    }

    /// Checks union-connectivity over every complete window
    /// `[k q, (k+1) q - 1]` that fits inside the horizon.
    pub fn is_q_strongly_connected(&self, q: usize, horizon: usize) -> Result<bool, GraphError> {
        if q == 0 {
            return Err(GraphError::NonPositiveWindow);
        }
        if horizon < q {
            return Err(GraphError::HorizonTooShort(horizon, q));
        }
        let mut k = 0;
        while (k + 1) * q <= horizon {
            let mut acc = self.graph_at(k * q).clone();
            for t in (k * q + 1)..(k + 1) * q {
                acc = acc.union(self.graph_at(t));
            }
            if !acc.is_strongly_connected() {
                return Ok(false);
            }
            k += 1;
        }
        Ok(true)
    }
}
