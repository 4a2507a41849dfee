//! Synthesis of estimate and design graphs from the communication and
//! interference graphs: the standard (sparsity-oblivious) choice, Steiner
//! heuristics that minimize copy counts, time-varying intersections, and
//! memory/communication cost accounting.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::end_core::{EndLayout, LayoutError, Partition};
use crate::graph::{BipartiteGraph, DirectedGraph, GraphError, TimeVaryingGraph};

#[derive(Debug, Error)]
pub enum DesignError {
    #[error("the communication graph must be undirected and connected for this mode")]
    CommNotUndirectedConnected,
    #[error("the communication graph must be strongly connected for this mode")]
    CommNotStronglyConnected,
    #[error("static design vertices are not a subset of the sequence vertices")]
    VertexMismatch,
    #[error(transparent)]
    Layout(#[from] LayoutError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DesignMode {
    Standard,
    SteinerUndirected,
    SteinerDirected,
}

impl DesignMode {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "standard" => Some(Self::Standard),
            "steiner_undirected" => Some(Self::SteinerUndirected),
            "steiner_directed" => Some(Self::SteinerDirected),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Standard => "standard",
            Self::SteinerUndirected => "steiner_undirected",
            Self::SteinerDirected => "steiner_directed",
        }
    }
}

/// `AllAvailable` keeps every communication edge inside the copy set;
/// `TreeOnly` keeps only the (symmetrized) tree edges found by the heuristic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EdgePolicy {
    #[default]
    AllAvailable,
    TreeOnly,
}

#[derive(Debug, Clone, Copy)]
pub struct DesignSpec {
    pub mode: DesignMode,
    pub edge_policy: EdgePolicy,
}

impl DesignSpec {
    pub fn synthesize(
        &self,
        comm: &DirectedGraph,
        interference: &BipartiteGraph,
        partition: &Partition,
    ) -> Result<EndLayout, DesignError> {
        match self.mode {
            DesignMode::Standard => Ok(standard_design(comm, interference, partition)?),
            DesignMode::SteinerUndirected => {
                steiner_design_undirected(comm, interference, partition, self.edge_policy)
            }
            DesignMode::SteinerDirected => {
                steiner_design_directed(comm, interference, partition)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CostReport {
    pub copies_per_component: Vec<usize>,
    /// Scalar slots stored across the network: `sum_p N_p * n_{y_p}`.
    pub total_memory: usize,
    /// Broadcasts per round: one per (agent, component) pair with at least
    /// one out-neighbor (other than itself) in the design graph.
    pub per_iteration_broadcast_cost: f64,
}

impl CostReport {
    pub fn text(&self, mode: &str) -> String {
        let mut s = String::new();
        writeln!(s, "design mode: {mode}").unwrap();
        for (p, n_p) in self.copies_per_component.iter().enumerate() {
            writeln!(s, "component {p}: {n_p} copies").unwrap();
        }
        writeln!(s, "total memory (scalar slots): {}", self.total_memory).unwrap();
        writeln!(s, "broadcast cost per iteration: {}", self.per_iteration_broadcast_cost).unwrap();
        s
    }

    pub fn csv_row(&self, mode: &str) -> String {
        format!("{},{},{}\n", mode, self.total_memory, self.per_iteration_broadcast_cost)
    }
}

/// Every agent estimates every component; every design graph is the
/// communication graph.
pub fn standard_design(
    comm: &DirectedGraph,
    interference: &BipartiteGraph,
    partition: &Partition,
) -> Result<EndLayout, LayoutError> {
    let p_count = partition.component_count();
    let n = comm.vertex_count();
    let estimate = BipartiteGraph::complete(p_count, n);
    let design = vec![comm.clone(); p_count];
    EndLayout::new(partition.clone(), comm.clone(), interference.clone(), estimate, design)
}

/// Multi-source BFS with lexicographically smallest parents; returns
/// distances and parents over positions.
fn multi_source_bfs(g: &DirectedGraph, sources: &BTreeSet<usize>) -> (Vec<usize>, Vec<Option<usize>>) {
    let n = g.vertex_count();
    let mut dist = vec![usize::MAX; n];
    let mut parent = vec![None; n];
    let mut frontier: Vec<usize> = sources.iter().copied().collect();
    for &s in sources {
        dist[s] = 0;
    }
    let mut d = 0;
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &u in &frontier {
            for &v in g.out_positions(u) {
                if dist[v] == usize::MAX {
                    dist[v] = d + 1;
                    parent[v] = Some(u);
                    next.push(v);
                } else if dist[v] == d + 1 {
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

/// Copy sets from the shortest-path Steiner-tree heuristic: grow a tree from
/// the smallest terminal, repeatedly attaching the nearest uncovered terminal
/// along a BFS path. Returns the node set and the tree edges used.
fn steiner_tree_nodes(
    comm: &DirectedGraph,
    terminals: &[usize],
) -> (BTreeSet<usize>, BTreeSet<(usize, usize)>) {
    let mut in_tree: BTreeSet<usize> = BTreeSet::new();
    let mut tree_edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    in_tree.insert(terminals[0]);
    let mut remaining: BTreeSet<usize> = terminals[1..].iter().copied().collect();
    remaining.retain(|t| !in_tree.contains(t));
    while !remaining.is_empty() {
        let (dist, parent) = multi_source_bfs(comm, &in_tree);
        // nearest uncovered terminal, smallest id on ties
        let &t = remaining
            .iter()
            .min_by_key(|&&t| (dist[t], t))
            .expect("nonempty");
        let mut v = t;
        while let Some(u) = parent[v] {
            tree_edges.insert((u.min(v), u.max(v)));
            let newly = in_tree.insert(v);
            remaining.remove(&v);
            if !newly {
                break;
            }
            v = u;
            if in_tree.contains(&v) {
                break;
            }
        }
        remaining.remove(&t);
    }
    (in_tree, tree_edges)
}

/// For each component, a minimal-copy node set containing its terminals whose
/// induced communication subgraph is connected.
pub fn steiner_design_undirected(
    comm: &DirectedGraph,
    interference: &BipartiteGraph,
    partition: &Partition,
    edge_policy: EdgePolicy,
) -> Result<EndLayout, DesignError> {
    let ok = comm
        .is_connected_undirected()
        .map_err(|_| DesignError::CommNotUndirectedConnected)?;
    if !ok {
        return Err(DesignError::CommNotUndirectedConnected);
    }
    let p_count = partition.component_count();
    let mut estimate_edges: Vec<(usize, usize)> = Vec::new();
    let mut design = Vec::with_capacity(p_count);
    for p in 0..p_count {
        let terminals = interference.right_neighbors(p);
        let induced = comm.restrict(terminals)?;
        let g = if induced.is_connected_undirected().unwrap_or(false) {
            // terminals already connected: no extra copies needed
            induced
        } else {
            let (nodes, tree_edges) = steiner_tree_nodes(comm, terminals);
            let members: Vec<usize> = nodes.iter().copied().collect();
            match edge_policy {
                EdgePolicy::AllAvailable => comm.restrict(&members)?,
                EdgePolicy::TreeOnly => {
                    let edges = tree_edges.iter().flat_map(|&(u, v)| [(u, v), (v, u)]);
                    DirectedGraph::from_edges(members.iter().copied(), edges)?
                }
            }
        };
        for &i in g.labels() {
            estimate_edges.push((p, i));
        }
        design.push(g);
    }
    let n = comm.vertex_count();
    let estimate = BipartiteGraph::from_edges(p_count, n, estimate_edges)?;
    Ok(EndLayout::new(
        partition.clone(),
        comm.clone(),
        interference.clone(),
        estimate,
        design,
    )?)
}

/// Grows the node set of one component until its induced subgraph is strongly
/// connected, by repeatedly adding the vertices of a shortest directed path
/// between an unreachable pair.
fn strongly_connected_superset(comm: &DirectedGraph, terminals: &[usize]) -> BTreeSet<usize> {
    let mut nodes: BTreeSet<usize> = terminals.iter().copied().collect();
    loop {
        let members: Vec<usize> = nodes.iter().copied().collect();
        let induced = comm.restrict(&members).expect("members are comm vertices");
        if induced.is_strongly_connected() {
            return nodes;
        }
        // Reachability inside the induced subgraph, by member position.
        let m = members.len();
        let mut reach = vec![vec![false; m]; m];
        for (pos, row) in reach.iter_mut().enumerate() {
            let mut stack = vec![pos];
            row[pos] = true;
            while let Some(u) = stack.pop() {
                for &v in induced.out_positions(u) {
                    if !row[v] {
                        row[v] = true;
                        stack.push(v);
                    }
                }
            }
        }
        // Shortest comm path over unreachable ordered pairs, smallest
        // (distance, source, target) wins.
        let mut best: Option<(usize, usize, usize)> = None;
        let mut best_parent: Vec<Option<usize>> = Vec::new();
        for (ui, &u) in members.iter().enumerate() {
            if reach[ui].iter().all(|&r| r) {
                continue;
            }
            let (dist, parent) = comm.bfs(u);
            for (vi, &v) in members.iter().enumerate() {
                if reach[ui][vi] {
                    continue;
                }
                let cand = (dist[v], u, v);
                if best.map_or(true, |b| cand < b) {
                    best = Some(cand);
                    best_parent = parent.clone();
                }
            }
        }
        let (_, _, target) = best.expect("strongly connected comm always yields a path");
        // Interior vertices of the chosen path; at least one is new, so the
        // loop makes progress and terminates (the full agent set is feasible).
        let mut v = target;
        while let Some(u) = best_parent[v] {
            nodes.insert(v);
            v = u;
        }
        nodes.insert(v);
    }
}

/// For each component, a node set containing its terminals whose induced
/// communication subgraph is strongly connected; all available edges are
/// kept.
pub fn steiner_design_directed(
    comm: &DirectedGraph,
    interference: &BipartiteGraph,
    partition: &Partition,
) -> Result<EndLayout, DesignError> {
    if !comm.is_strongly_connected() {
        return Err(DesignError::CommNotStronglyConnected);
    }
    let p_count = partition.component_count();
    let mut estimate_edges: Vec<(usize, usize)> = Vec::new();
    let mut design = Vec::with_capacity(p_count);
    for p in 0..p_count {
        let terminals = interference.right_neighbors(p);
        let nodes = strongly_connected_superset(comm, terminals);
        let members: Vec<usize> = nodes.iter().copied().collect();
        let g = comm.restrict(&members)?;
        for &i in &members {
            estimate_edges.push((p, i));
        }
        design.push(g);
    }
    let n = comm.vertex_count();
    let estimate = BipartiteGraph::from_edges(p_count, n, estimate_edges)?;
    Ok(EndLayout::new(
        partition.clone(),
        comm.clone(),
        interference.clone(),
        estimate,
        design,
    )?)
}

/// Intersects each static design graph with the communication sequence,
/// frame by frame. Vertex sets are unchanged; self-loops survive (an agent
/// can always keep its own estimate).
pub fn time_varying_design(
    static_design: &[DirectedGraph],
    comm_seq: &TimeVaryingGraph,
) -> Result<Vec<TimeVaryingGraph>, DesignError> {
    let comm_labels: BTreeSet<usize> = comm_seq.labels().iter().copied().collect();
    let mut out = Vec::with_capacity(static_design.len());
    for g in static_design {
        if g.labels().iter().any(|l| !comm_labels.contains(l)) {
            return Err(DesignError::VertexMismatch);
        }
        let mut frames = Vec::with_capacity(comm_seq.frame_count());
        for k in 0..comm_seq.frame_count() {
            let frame = comm_seq.graph_at(k);
            let edges = g
                .edges()
                .into_iter()
                .filter(|&(u, v)| u == v || frame.has_edge(u, v));
            frames.push(DirectedGraph::from_edges(g.labels().iter().copied(), edges)?);
        }
        out.push(TimeVaryingGraph::new(frames)?);
    }
    Ok(out)
}

/// Memory and per-iteration broadcast cost of a layout.
pub fn cost_report(layout: &EndLayout) -> CostReport {
    let p_count = layout.component_count();
    let copies: Vec<usize> = (0..p_count).map(|p| layout.copies(p)).collect();
    let total_memory: usize = (0..p_count)
        .map(|p| layout.copies(p) * layout.partition().size(p))
        .sum();
    let mut cost = 0.0;
    for i in 0..layout.agent_count() {
        for &p in layout.estimated_components(i) {
            let broadcasts = layout
                .design(p)
                .out_neighbors(i)
                .map(|ns| ns.iter().any(|&j| j != i))
                .unwrap_or(false);
            if broadcasts {
                cost += 1.0;
            }
        }
    }
    CostReport {
        copies_per_component: copies,
        total_memory,
        per_iteration_broadcast_cost: cost,
    }
}
