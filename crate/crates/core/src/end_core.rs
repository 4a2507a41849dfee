//! The four-graph information layout (communication, interference, estimate
//! and per-component design graphs), its validation, and the stacked-vector
//! algebra built on top of it.
//!
//! Every copy of component `p` lives at an agent in the copy set
//! `out-neighbors of p in the estimate graph`; copies are ordered by
//! ascending agent id, and all modules share that convention.

use std::fmt::Write as _;
use std::sync::Arc;

use nalgebra::DVector;
use thiserror::Error;

use crate::graph::{BipartiteGraph, DirectedGraph, GraphError, WeightMatrix};

#[derive(Debug, Error)]
pub enum LayoutError {
    #[error("partition must have at least one block of positive size")]
    EmptyPartition,
    #[error("partition block {0} has size zero")]
    ZeroBlock(usize),
    #[error("expected {expected} components, got {got}")]
    ComponentCountMismatch { expected: usize, got: usize },
    #[error("expected {expected} agents, got {got}")]
    AgentCountMismatch { expected: usize, got: usize },
    #[error("design graph of component {0} has vertex set different from its copy set")]
    DesignVertexMismatch(usize),
    #[error("agent {agent} does not estimate component {component}")]
    NotACopyHolder { agent: usize, component: usize },
    #[error("component {0} out of range")]
    UnknownComponent(usize),
    #[error("agent {0} out of range")]
    UnknownAgent(usize),
    #[error("vector length {got} does not match partition total {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("stacked vectors belong to different layouts")]
    LayoutMismatch,
    #[error("weight matrix for component {0} is not aligned with its design graph")]
    WeightMismatch(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Block sizes of the decision variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    sizes: Vec<usize>,
}

impl Partition {
    pub fn new(sizes: Vec<usize>) -> Result<Self, LayoutError> {
        if sizes.is_empty() {
            return Err(LayoutError::EmptyPartition);
        }
        if let Some(p) = sizes.iter().position(|&s| s == 0) {
            return Err(LayoutError::ZeroBlock(p));
        }
        Ok(Self { sizes })
    }

    /// `P` scalar components.
    pub fn scalar(count: usize) -> Result<Self, LayoutError> {
        Self::new(vec![1; count])
    }

    pub fn component_count(&self) -> usize {
        self.sizes.len()
    }

    pub fn size(&self, p: usize) -> usize {
        self.sizes[p]
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn total(&self) -> usize {
        self.sizes.iter().sum()
    }

    /// Offset of block `p` inside a flat vector of length `total()`.
    pub fn offset(&self, p: usize) -> usize {
        self.sizes[..p].iter().sum()
    }
}

/// A violation of the structural containment requirements: the interference
/// graph must be contained in the estimate graph and every design edge must
/// be a communication edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StandingViolation {
    /// `(p, i)` required by interference but absent from the estimate graph.
    MissingEstimate { component: usize, agent: usize },
    /// Design edge between agents that are not communication neighbors.
    DesignEdgeNotInComm { component: usize, from: usize, to: usize },
}

/// Per-component connectivity status (advisory; directed design graphs are
/// legitimate for push-sum).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentStatus {
    pub undirected: bool,
    pub connected: bool,
    pub strongly_connected: bool,
}

#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub standing_violations: Vec<StandingViolation>,
    pub components: Vec<ComponentStatus>,
}

impl ValidationReport {
    /// Whether the layout is usable by algorithms at all.
    pub fn standing_ok(&self) -> bool {
        self.standing_violations.is_empty()
    }

    pub fn all_undirected_connected(&self) -> bool {
        self.components.iter().all(|c| c.undirected && c.connected)
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        if self.standing_ok() {
            writeln!(s, "standing assumption: ok").unwrap();
        } else {
            for v in &self.standing_violations {
                match v {
                    StandingViolation::MissingEstimate { component, agent } => {
                        writeln!(s, "violation: agent {agent} needs component {component} but does not estimate it").unwrap()
                    }
                    StandingViolation::DesignEdgeNotInComm { component, from, to } => writeln!(
                        s,
                        "violation: design edge {from}->{to} for component {component} is not a communication edge"
                    )
                    .unwrap(),
                }
            }
        }
        for (p, c) in self.components.iter().enumerate() {
            writeln!(
                s,
                "component {p}: undirected={} connected={} strongly_connected={}",
                c.undirected, c.connected, c.strongly_connected
            )
            .unwrap();
        }
        s
    }
}

/// The agent set, variable partition and the four graph families.
#[derive(Debug, Clone, PartialEq)]
pub struct EndLayout {
    agent_count: usize,
    partition: Partition,
    comm: DirectedGraph,
    interference: BipartiteGraph,
    estimate: BipartiteGraph,
    design: Vec<DirectedGraph>,
}

impl EndLayout {
    pub fn new(
        partition: Partition,
        comm: DirectedGraph,
        interference: BipartiteGraph,
        estimate: BipartiteGraph,
        design: Vec<DirectedGraph>,
    ) -> Result<Self, LayoutError> {
        let n = comm.vertex_count();
        let p_count = partition.component_count();
        if comm.labels() != (0..n).collect::<Vec<_>>().as_slice() {
            return Err(LayoutError::AgentCountMismatch { expected: n, got: 0 });
        }
        if interference.left_count() != p_count || estimate.left_count() != p_count {
            return Err(LayoutError::ComponentCountMismatch {
                expected: p_count,
                got: interference.left_count(),
            });
        }
        if interference.right_count() != n || estimate.right_count() != n {
            return Err(LayoutError::AgentCountMismatch {
                expected: n,
                got: interference.right_count(),
            });
        }
        if design.len() != p_count {
            return Err(LayoutError::ComponentCountMismatch {
                expected: p_count,
                got: design.len(),
            });
        }
        for (p, g) in design.iter().enumerate() {
            if g.labels() != estimate.right_neighbors(p) {
                return Err(LayoutError::DesignVertexMismatch(p));
            }
        }
        Ok(Self { agent_count: n, partition, comm, interference, estimate, design })
    }

    pub fn agent_count(&self) -> usize {
        self.agent_count
    }

    pub fn component_count(&self) -> usize {
        self.partition.component_count()
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn comm(&self) -> &DirectedGraph {
        &self.comm
    }

    pub fn interference(&self) -> &BipartiteGraph {
        &self.interference
    }

    pub fn estimate(&self) -> &BipartiteGraph {
        &self.estimate
    }

    pub fn design(&self, p: usize) -> &DirectedGraph {
        &self.design[p]
    }

    pub fn design_graphs(&self) -> &[DirectedGraph] {
        &self.design
    }

    /// Agents holding a copy of component `p`, ascending.
    pub fn copy_set(&self, p: usize) -> &[usize] {
        self.estimate.right_neighbors(p)
    }

    /// `N_p`, the number of copies of component `p`.
    pub fn copies(&self, p: usize) -> usize {
        self.copy_set(p).len()
    }

    /// Components estimated by agent `i`, ascending.
    pub fn estimated_components(&self, i: usize) -> &[usize] {
        self.estimate.left_neighbors(i)
    }

    /// Components agent `i`'s cost actually depends on, ascending.
    pub fn interference_components(&self, i: usize) -> &[usize] {
        self.interference.left_neighbors(i)
    }

    /// Rank of agent `i` among the sorted copy set of `p` (0-based).
    pub fn local_index(&self, p: usize, i: usize) -> Result<usize, LayoutError> {
        if p >= self.component_count() {
            return Err(LayoutError::UnknownComponent(p));
        }
        self.copy_set(p)
            .binary_search(&i)
            .map_err(|_| LayoutError::NotACopyHolder { agent: i, component: p })
    }

    /// Total stacked length `sum_p N_p * n_{y_p}`.
    pub fn stacked_len(&self) -> usize {
        (0..self.component_count())
            .map(|p| self.copies(p) * self.partition.size(p))
            .sum()
    }

    /// Report-style check of the containment requirements and per-component
    /// connectivity.
    pub fn validate(&self) -> ValidationReport {
        let mut standing = Vec::new();
        for (p, i) in self.interference.edges() {
            if !self.estimate.has_edge(p, i) {
                standing.push(StandingViolation::MissingEstimate { component: p, agent: i });
            }
        }
        for (p, g) in self.design.iter().enumerate() {
            for (u, v) in g.edges() {
                if u != v && !self.comm.has_edge(u, v) {
                    standing.push(StandingViolation::DesignEdgeNotInComm {
                        component: p,
                        from: u,
                        to: v,
                    });
                }
            }
        }
        let components = self
            .design
            .iter()
            .map(|g| {
                let undirected = g.is_symmetric();
                let connected = if undirected {
                    g.is_connected_undirected().unwrap_or(false)
                } else {
                    false
                };
                ComponentStatus {
                    undirected,
                    connected,
                    strongly_connected: g.is_strongly_connected(),
                }
            })
            .collect();
        ValidationReport { standing_violations: standing, components }
    }

    /// Serialized as keyed sections over the graph text format.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "END-LAYOUT v1").unwrap();
        writeln!(s, "AGENTS {}", self.agent_count).unwrap();
        let sizes: Vec<String> = self.partition.sizes().iter().map(|x| x.to_string()).collect();
        writeln!(s, "PARTITION {}", sizes.join(" ")).unwrap();
        writeln!(s, "COMM").unwrap();
        s.push_str(&self.comm.to_text());
        writeln!(s, "INTERF").unwrap();
        for (p, i) in self.interference.edges() {
            writeln!(s, "E {} {}", p, i).unwrap();
        }
        writeln!(s, "ESTIM").unwrap();
        for (p, i) in self.estimate.edges() {
            writeln!(s, "E {} {}", p, i).unwrap();
        }
        for (p, g) in self.design.iter().enumerate() {
            writeln!(s, "DESIGN {}", p).unwrap();
            s.push_str(&g.to_text());
        }
        writeln!(s, "END").unwrap();
        s
    }

    pub fn from_text(text: &str) -> Result<Self, LayoutError> {
        #[derive(PartialEq)]
        enum Section {
            Head,
            Comm,
            Interf,
            Estim,
            Design(usize),
        }
        let mut agents: Option<usize> = None;
        let mut sizes: Option<Vec<usize>> = None;
        let mut section = Section::Head;
        let mut comm_text = String::new();
        let mut interf_edges: Vec<(usize, usize)> = Vec::new();
        let mut estim_edges: Vec<(usize, usize)> = Vec::new();
        let mut design_texts: Vec<String> = Vec::new();
        let parse_pair = |line: &str| -> Result<(usize, usize), LayoutError> {
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(GraphError::Parse(format!("bad edge line: {line}")).into());
            }
            let a = parts[1]
                .parse()
                .map_err(|e: std::num::ParseIntError| GraphError::Parse(e.to_string()))?;
            let b = parts[2]
                .parse()
                .map_err(|e: std::num::ParseIntError| GraphError::Parse(e.to_string()))?;
            Ok((a, b))
        };
        for line in text.lines() {
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed == "END-LAYOUT v1" || trimmed == "END" {
                continue;
            }
            if let Some(rest) = trimmed.strip_prefix("AGENTS ") {
                agents = Some(rest.parse().map_err(|e: std::num::ParseIntError| {
                    GraphError::Parse(e.to_string())
                })?);
            } else if let Some(rest) = trimmed.strip_prefix("PARTITION ") {
                let parsed: Result<Vec<usize>, _> =
                    rest.split_whitespace().map(|t| t.parse()).collect();
                sizes = Some(parsed.map_err(|e: std::num::ParseIntError| {
                    GraphError::Parse(e.to_string())
                })?);
            } else if trimmed == "COMM" {
                section = Section::Comm;
            } else if trimmed == "INTERF" {
                section = Section::Interf;
            } else if trimmed == "ESTIM" {
                section = Section::Estim;
            } else if let Some(rest) = trimmed.strip_prefix("DESIGN ") {
                let p: usize = rest.parse().map_err(|e: std::num::ParseIntError| {
                    GraphError::Parse(e.to_string())
                })?;
                while design_texts.len() <= p {
                    design_texts.push(String::new());
                }
                section = Section::Design(p);
            } else {
                match section {
                    Section::Comm => {
                        comm_text.push_str(trimmed);
                        comm_text.push('\n');
                    }
                    Section::Interf => interf_edges.push(parse_pair(trimmed)?),
                    Section::Estim => estim_edges.push(parse_pair(trimmed)?),
                    Section::Design(p) => {
                        design_texts[p].push_str(trimmed);
                        design_texts[p].push('\n');
                    }
                    Section::Head => {
                        return Err(GraphError::Parse(format!("unexpected line: {trimmed}")).into())
                    }
                }
            }
        }
        let n = agents.ok_or_else(|| GraphError::Parse("missing AGENTS line".into()))?;
        let sizes = sizes.ok_or_else(|| GraphError::Parse("missing PARTITION line".into()))?;
        let partition = Partition::new(sizes)?;
        let p_count = partition.component_count();
        let comm = DirectedGraph::from_text(&comm_text)?;
        let interference = BipartiteGraph::from_edges(p_count, n, interf_edges)?;
        let estimate = BipartiteGraph::from_edges(p_count, n, estim_edges)?;
        if design_texts.len() != p_count {
            return Err(LayoutError::ComponentCountMismatch {
                expected: p_count,
                got: design_texts.len(),
            });
        }
        let design: Result<Vec<_>, _> =
            design_texts.iter().map(|t| DirectedGraph::from_text(t)).collect();
        Self::new(partition, comm, interference, estimate, design?)
    }
}

/// Ordered per-component estimates kept by one agent.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentView {
    entries: Vec<(usize, DVector<f64>)>,
}

impl AgentView {
    pub fn new(mut entries: Vec<(usize, DVector<f64>)>) -> Self {
        entries.sort_by_key(|&(p, _)| p);
        Self { entries }
    }

    pub fn get(&self, p: usize) -> Option<&DVector<f64>> {
        self.entries
            .binary_search_by_key(&p, |&(q, _)| q)
            .ok()
            .map(|idx| &self.entries[idx].1)
    }

    pub fn components(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|&(p, _)| p)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &DVector<f64>)> {
        self.entries.iter().map(|(p, v)| (*p, v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Flat concatenation in ascending component order.
    pub fn concat(&self) -> DVector<f64> {
        let total: usize = self.entries.iter().map(|(_, v)| v.len()).sum();
        let mut out = DVector::zeros(total);
        let mut off = 0;
        for (_, v) in &self.entries {
            out.rows_mut(off, v.len()).copy_from(v);
            off += v.len();
        }
        out
    }
}

/// Block vector holding all copies of all components, component-blocked:
/// inside component `p`, copies are laid out in ascending agent order.
#[derive(Debug, Clone, PartialEq)]
pub struct StackedVector {
    layout: Arc<EndLayout>,
    blocks: Vec<DVector<f64>>,
}

impl StackedVector {
    pub fn zeros(layout: Arc<EndLayout>) -> Self {
        let blocks = (0..layout.component_count())
            .map(|p| DVector::zeros(layout.copies(p) * layout.partition().size(p)))
            .collect();
        Self { layout, blocks }
    }

    /// Replicates each component of `y` to all of its copy holders.
    pub fn lift(layout: Arc<EndLayout>, y: &DVector<f64>) -> Result<Self, LayoutError> {
        let n_y = layout.partition().total();
        if y.len() != n_y {
            return Err(LayoutError::LengthMismatch { expected: n_y, got: y.len() });
        }
        let mut out = Self::zeros(layout);
        for p in 0..out.layout.component_count() {
            let n_p = out.layout.partition().size(p);
            let off = out.layout.partition().offset(p);
            let src = y.rows(off, n_p).into_owned();
            for c in 0..out.layout.copies(p) {
                out.blocks[p].rows_mut(c * n_p, n_p).copy_from(&src);
            }
        }
        Ok(out)
    }

    pub fn layout(&self) -> &Arc<EndLayout> {
        &self.layout
    }

    pub fn same_layout(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.layout, &other.layout)
    }

    /// All copies of component `p`, copy-major.
    pub fn component(&self, p: usize) -> &DVector<f64> {
        &self.blocks[p]
    }

    pub fn component_mut(&mut self, p: usize) -> &mut DVector<f64> {
        &mut self.blocks[p]
    }

    /// The copy of `p` at local position `local`.
    pub fn block(&self, p: usize, local: usize) -> nalgebra::DVectorView<'_, f64> {
        let n_p = self.layout.partition().size(p);
        self.blocks[p].rows(local * n_p, n_p)
    }

    pub fn set_block(&mut self, p: usize, local: usize, value: &DVector<f64>) {
        let n_p = self.layout.partition().size(p);
        self.blocks[p].rows_mut(local * n_p, n_p).copy_from(value);
    }

    /// The estimate of `y_p` kept by agent `i`.
    pub fn select(&self, p: usize, agent: usize) -> Result<DVector<f64>, LayoutError> {
        let local = self.layout.local_index(p, agent)?;
        Ok(self.block(p, local).into_owned())
    }

    /// All estimates kept by agent `i`, in ascending component order.
    pub fn agent_view(&self, i: usize) -> Result<AgentView, LayoutError> {
        if i >= self.layout.agent_count() {
            return Err(LayoutError::UnknownAgent(i));
        }
        let entries = self
            .layout
            .estimated_components(i)
            .iter()
            .map(|&p| {
                let local = self.layout.local_index(p, i).expect("copy holder");
                (p, self.block(p, local).into_owned())
            })
            .collect();
        Ok(AgentView::new(entries))
    }

    /// Orthogonal decomposition into the per-component consensus space and
    /// its complement; `parallel + orthogonal == self` exactly.
    pub fn consensus_project(&self) -> (Self, Self) {
        let mut parallel = Self::zeros(self.layout.clone());
        let mut orthogonal = Self::zeros(self.layout.clone());
        for p in 0..self.layout.component_count() {
            let n_p = self.layout.partition().size(p);
            let copies = self.layout.copies(p);
            let mut mean = DVector::zeros(n_p);
            for c in 0..copies {
                mean += self.block(p, c);
            }
            mean /= copies as f64;
            for c in 0..copies {
                parallel.blocks[p].rows_mut(c * n_p, n_p).copy_from(&mean);
            }
            orthogonal.blocks[p] = &self.blocks[p] - &parallel.blocks[p];
        }
        (parallel, orthogonal)
    }

    /// Euclidean norm of the disagreement part.
    pub fn consensus_residual(&self) -> f64 {
        let (_, orth) = self.consensus_project();
        orth.norm()
    }

    /// Norm of the disagreement after scaling component `p` by `1 / N_p`.
    pub fn weighted_consensus_residual(&self) -> f64 {
        let (_, mut orth) = self.consensus_project();
        for p in 0..self.layout.component_count() {
            orth.blocks[p] /= self.layout.copies(p) as f64;
        }
        orth.norm()
    }

    pub fn norm(&self) -> f64 {
        self.blocks.iter().map(|b| b.norm_squared()).sum::<f64>().sqrt()
    }

    /// Weighted squared norm with per-component scalar weights.
    pub fn weighted_norm_squared(&self, component_weights: &[f64]) -> f64 {
        self.blocks
            .iter()
            .zip(component_weights)
            .map(|(b, &w)| w * b.norm_squared())
            .sum()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.blocks.iter().zip(&other.blocks).map(|(a, b)| a.dot(b)).sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| a + b).collect();
        Self { layout: self.layout.clone(), blocks }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| a - b).collect();
        Self { layout: self.layout.clone(), blocks }
    }

    pub fn scale(&self, s: f64) -> Self {
        let blocks = self.blocks.iter().map(|b| b * s).collect();
        Self { layout: self.layout.clone(), blocks }
    }

    pub fn axpy(&mut self, alpha: f64, x: &Self) {
        for (b, xb) in self.blocks.iter_mut().zip(&x.blocks) {
            b.axpy(alpha, xb, 1.0);
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.blocks
            .iter()
            .flat_map(|b| b.iter())
            .fold(0.0_f64, |m, &x| m.max(x.abs()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .flat_map(|(a, b)| a.iter().zip(b.iter()))
            .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
    }
}

/// Read hook: `(reader_agent, component, owner_agent)` per estimate-block
/// access performed on behalf of the reader.
pub type ReadHook<'a> = &'a mut dyn FnMut(usize, usize, usize);

/// Per-component weight matrices acting block-diagonally on stacked vectors.
#[derive(Debug, Clone)]
pub struct StackedWeightOperator {
    layout: Arc<EndLayout>,
    weights: Vec<WeightMatrix>,
}

impl StackedWeightOperator {
    /// The weight graphs must have the copy sets as vertex sets; every
    /// off-diagonal weight edge must be a design edge of the layout.
    pub fn new(layout: Arc<EndLayout>, weights: Vec<WeightMatrix>) -> Result<Self, LayoutError> {
        if weights.len() != layout.component_count() {
            return Err(LayoutError::ComponentCountMismatch {
                expected: layout.component_count(),
                got: weights.len(),
            });
        }
        for (p, w) in weights.iter().enumerate() {
            if w.graph().labels() != layout.copy_set(p) {
                return Err(LayoutError::WeightMismatch(p));
            }
            for (u, v) in w.graph().edges() {
                if u != v && !layout.design(p).has_edge(u, v) {
                    return Err(LayoutError::WeightMismatch(p));
                }
            }
        }
        Ok(Self { layout, weights })
    }

    pub fn layout(&self) -> &Arc<EndLayout> {
        &self.layout
    }

    pub fn component_matrix(&self, p: usize) -> &WeightMatrix {
        &self.weights[p]
    }

    pub fn apply(&self, y: &StackedVector) -> Result<StackedVector, LayoutError> {
        self.apply_with_hook(y, &mut |_, _, _| {})
    }

    /// Copy `(i, p)` receives `sum_j w_{i_p, j_p} y_{j, p}` with `j` ranging
    /// over in-neighbors in ascending order; each read is reported to `hook`.
    pub fn apply_with_hook(
        &self,
        y: &StackedVector,
        hook: ReadHook,
    ) -> Result<StackedVector, LayoutError> {
        if !Arc::ptr_eq(&self.layout, y.layout()) {
            return Err(LayoutError::LayoutMismatch);
        }
        let mut out = StackedVector::zeros(self.layout.clone());
        for p in 0..self.layout.component_count() {
            let n_p = self.layout.partition().size(p);
            let w = &self.weights[p];
            let labels = w.graph().labels();
            for r in 0..w.dim() {
                let mut acc = DVector::zeros(n_p);
                for &s in w.graph().in_positions(r) {
                    hook(labels[r], p, labels[s]);
                    acc.axpy(w.entry(r, s), &y.block(p, s).into_owned(), 1.0);
                }
                out.set_block(p, r, &acc);
            }
        }
        Ok(out)
    }

    /// Same mixing applied to one scalar per copy (used by push-sum mass).
    pub fn apply_scalar_with_hook(
        &self,
        q: &[DVector<f64>],
        hook: ReadHook,
    ) -> Vec<DVector<f64>> {
        let mut out = Vec::with_capacity(q.len());
        for (p, w) in self.weights.iter().enumerate() {
            let labels = w.graph().labels();
            let mut next = DVector::zeros(w.dim());
            for r in 0..w.dim() {
                let mut acc = 0.0;
                for &s in w.graph().in_positions(r) {
                    hook(labels[r], p, labels[s]);
                    acc += w.entry(r, s) * q[p][s];
                }
                next[r] = acc;
            }
            out.push(next);
        }
        out
    }

    /// Whether every per-component matrix is symmetric and doubly stochastic.
    pub fn is_symmetric_doubly_stochastic(&self, tol: f64) -> bool {
        self.weights.iter().all(|w| {
            w.is_symmetric(tol) && w.is_row_stochastic(tol) && w.is_column_stochastic(tol)
        })
    }

    pub fn is_column_stochastic(&self, tol: f64) -> bool {
        self.weights.iter().all(|w| w.is_column_stochastic(tol))
    }

    pub fn has_self_loops(&self) -> bool {
        self.weights
            .iter()
            .all(|w| w.graph().labels().iter().all(|&l| w.graph().has_self_loop(l)))
    }
}
