//! Partially separable problem instances: cost-coupled least squares and
//! LASSO, constraint-coupled problems solved through their dual, and the
//! centralized reference solvers used as oracles.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::end_core::{AgentView, EndLayout, Partition, StackedVector};

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("agent {agent}'s cost does not depend on component {component}")]
    NotAnInterferenceComponent { agent: usize, component: usize },
    #[error("component {0} missing from the agent view")]
    MissingEstimate(usize),
    #[error("the problem is not differentiable; use the subgradient path")]
    NotDifferentiable,
    #[error("layout does not cover the interference graph: agent {agent} lacks component {component}")]
    LayoutTooSparse { agent: usize, component: usize },
    #[error("centralized reference unsupported for this problem class")]
    UnsupportedReference,
    #[error("inner solver failed: {0}")]
    InnerSolver(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("parse error: {0}")]
    Parse(String),
}

/// A partially separable cost `f(y) = sum_i f_i((y_p)_{p in N_I(i)})`.
///
/// Gradients and subgradients are per-component blocks; asking for a
/// component outside the agent's interference set is an error for
/// `gradient` and returns the zero convention through `stacked_gradient`.
pub trait SeparableCost {
    fn agent_count(&self) -> usize;
    fn partition(&self) -> &Partition;
    /// Components agent `i`'s cost depends on, ascending.
    fn interference_components(&self, i: usize) -> &[usize];
    fn value(&self, i: usize, view: &AgentView) -> f64;
    fn gradient(&self, i: usize, view: &AgentView, p: usize) -> Result<DVector<f64>, ProblemError>;
    fn subgradient(&self, i: usize, view: &AgentView, p: usize)
        -> Result<DVector<f64>, ProblemError>;
    fn is_differentiable(&self) -> bool;
    /// Gradient Lipschitz constant, when differentiable.
    fn smoothness(&self) -> Option<f64>;
}

fn check_coverage(problem: &dyn SeparableCost, layout: &EndLayout) -> Result<(), ProblemError> {
    for i in 0..problem.agent_count() {
        for &p in problem.interference_components(i) {
            if !layout.estimate().has_edge(p, i) {
                return Err(ProblemError::LayoutTooSparse { agent: i, component: p });
            }
        }
    }
    Ok(())
}

/// `f(y-hat) = sum_i f_i(view_i)`, each agent evaluated at its own copies.
pub fn total_cost(
    problem: &dyn SeparableCost,
    y: &StackedVector,
) -> Result<f64, ProblemError> {
    check_coverage(problem, y.layout())?;
    let mut total = 0.0;
    for i in 0..problem.agent_count() {
        let view = y.agent_view(i).expect("agent in range");
        total += problem.value(i, &view);
    }
    Ok(total)
}

/// Stacked gradient: block `(i, p)` is the partial gradient when the agent's
/// cost depends on `p`, and zero when the agent merely estimates `p`.
pub fn stacked_gradient(
    problem: &dyn SeparableCost,
    y: &StackedVector,
) -> Result<StackedVector, ProblemError> {
    if !problem.is_differentiable() {
        return Err(ProblemError::NotDifferentiable);
    }
    stacked_first_order(problem, y, true)
}

/// Stacked subgradient with the same zero-block convention.
pub fn stacked_subgradient(
    problem: &dyn SeparableCost,
    y: &StackedVector,
) -> Result<StackedVector, ProblemError> {
    stacked_first_order(problem, y, false)
}

fn stacked_first_order(
    problem: &dyn SeparableCost,
    y: &StackedVector,
    differentiable: bool,
) -> Result<StackedVector, ProblemError> {
    check_coverage(problem, y.layout())?;
    let layout = y.layout().clone();
    let mut out = StackedVector::zeros(layout.clone());
    for i in 0..problem.agent_count() {
        let view = y.agent_view(i).expect("agent in range");
        for &p in layout.estimated_components(i) {
            if problem.interference_components(i).binary_search(&p).is_err() {
                continue; // f_i is constant in this component
            }
            let g = if differentiable {
                problem.gradient(i, &view, p)?
            } else {
                problem.subgradient(i, &view, p)?
            };
            let local = layout.local_index(p, i).expect("copy holder");
            out.set_block(p, local, &g);
        }
    }
    Ok(out)
}

/// Per-agent quadratic data for `f_i(u) = || h_i - H_i u ||^2`, where `u`
/// concatenates the agent's interference components in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct LsAgent {
    pub components: Vec<usize>,
    pub output: DMatrix<f64>,
    pub measurement: DVector<f64>,
}

impl LsAgent {
    /// Column offset of component `p` inside `output`, given the partition.
    fn column_offset(&self, partition: &Partition, p: usize) -> Option<(usize, usize)> {
        let mut off = 0;
        for &q in &self.components {
            let n_q = partition.size(q);
            if q == p {
                return Some((off, n_q));
            }
            off += n_q;
        }
        None
    }

    fn view_vector(&self, view: &AgentView) -> Result<DVector<f64>, ProblemError> {
        let total: usize = self
            .components
            .iter()
            .map(|&p| view.get(p).map(|v| v.len()).unwrap_or(0))
            .sum();
        let mut u = DVector::zeros(total);
        let mut off = 0;
        for &p in &self.components {
            let v = view.get(p).ok_or(ProblemError::MissingEstimate(p))?;
            u.rows_mut(off, v.len()).copy_from(v);
            off += v.len();
        }
        Ok(u)
    }

    fn residual(&self, view: &AgentView) -> Result<DVector<f64>, ProblemError> {
        let u = self.view_vector(view)?;
        Ok(&self.measurement - &self.output * u)
    }
}

/// Sparse-measurement least squares over a partitioned signal.
#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquaresInstance {
    partition: Partition,
    agents: Vec<LsAgent>,
}

impl LeastSquaresInstance {
    pub fn new(partition: Partition, agents: Vec<LsAgent>) -> Result<Self, ProblemError> {
        for (i, a) in agents.iter().enumerate() {
            if a.components.windows(2).any(|w| w[0] >= w[1]) {
                return Err(ProblemError::Dimension(format!(
                    "agent {i}: components must be strictly ascending"
                )));
            }
            let cols: usize = a.components.iter().map(|&p| partition.size(p)).sum();
            if a.output.ncols() != cols {
                return Err(ProblemError::Dimension(format!(
                    "agent {i}: output has {} columns, expected {cols}",
                    a.output.ncols()
                )));
            }
            if a.output.nrows() != a.measurement.len() {
                return Err(ProblemError::Dimension(format!(
                    "agent {i}: output rows and measurement length differ"
                )));
            }
            if let Some(&p) = a.components.iter().find(|&&p| p >= partition.component_count()) {
                return Err(ProblemError::Dimension(format!("agent {i}: component {p} out of range")));
            }
        }
        Ok(Self { partition, agents })
    }

    pub fn agents(&self) -> &[LsAgent] {
        &self.agents
    }

    pub fn agent(&self, i: usize) -> &LsAgent {
        &self.agents[i]
    }

    /// `L = 2 max_i lambda_max(H_i^T H_i)`.
    pub fn smoothness_constant(&self) -> f64 {
        self.agents
            .iter()
            .map(|a| {
                let gram = a.output.tr_mul(&a.output);
                let eig = gram.symmetric_eigen();
                2.0 * eig.eigenvalues.iter().fold(0.0_f64, |m, &x| m.max(x))
            })
            .fold(0.0_f64, f64::max)
    }

    /// Global stacked system `(H, h)` with agents' column blocks placed by
    /// component offset.
    pub fn global_system(&self) -> (DMatrix<f64>, DVector<f64>) {
        let n_y = self.partition.total();
        let rows: usize = self.agents.iter().map(|a| a.measurement.len()).sum();
        let mut h_mat = DMatrix::zeros(rows, n_y);
        let mut h_vec = DVector::zeros(rows);
        let mut row = 0;
        for a in &self.agents {
            let m = a.measurement.len();
            let mut col = 0;
            for &p in &a.components {
                let n_p = self.partition.size(p);
                h_mat
                    .view_mut((row, self.partition.offset(p)), (m, n_p))
                    .copy_from(&a.output.view((0, col), (m, n_p)));
                col += n_p;
            }
            h_vec.rows_mut(row, m).copy_from(&a.measurement);
            row += m;
        }
        (h_mat, h_vec)
    }

    /// Minimum-norm least-squares solution and its cost.
    pub fn reference(&self) -> Result<(DVector<f64>, f64), ProblemError> {
        let (h_mat, h_vec) = self.global_system();
        let svd = h_mat.clone().svd(true, true);
        let y = svd
            .solve(&h_vec, 1e-12)
            .map_err(|e| ProblemError::InnerSolver(e.to_string()))?;
        let cost = (&h_vec - &h_mat * &y).norm_squared();
        Ok((y, cost))
    }

    pub fn to_text(&self) -> String {
        instance_text("LS-INSTANCE v1", &self.partition, &self.agents, None)
    }

    pub fn from_text(text: &str) -> Result<Self, ProblemError> {
        let (header, partition, agents, _) = parse_instance(text)?;
        if header != "LS-INSTANCE v1" {
            return Err(ProblemError::Parse(format!("unexpected header {header}")));
        }
        Self::new(partition, agents)
    }
}

impl SeparableCost for LeastSquaresInstance {
    fn agent_count(&self) -> usize {
        self.agents.len()
    }

    fn partition(&self) -> &Partition {
        &self.partition
    }

    fn interference_components(&self, i: usize) -> &[usize] {
        &self.agents[i].components
    }

    fn value(&self, i: usize, view: &AgentView) -> f64 {
        self.agents[i].residual(view).expect("view covers components").norm_squared()
    }

    fn gradient(&self, i: usize, view: &AgentView, p: usize) -> Result<DVector<f64>, ProblemError> {
        let agent = &self.agents[i];
        let (off, n_p) = agent
            .column_offset(&self.partition, p)
            .ok_or(ProblemError::NotAnInterferenceComponent { agent: i, component: p })?;
        let r = agent.residual(view)?;
        let block = agent.output.view((0, off), (agent.output.nrows(), n_p));
        Ok(block.tr_mul(&r) * -2.0)
    }

    fn subgradient(
        &self,
        i: usize,
        view: &AgentView,
        p: usize,
    ) -> Result<DVector<f64>, ProblemError> {
        self.gradient(i, view, p)
    }

    fn is_differentiable(&self) -> bool {
        true
    }

    fn smoothness(&self) -> Option<f64> {
        Some(self.smoothness_constant())
    }
}

/// Least squares plus an l1 penalty split across the agents that share each
/// component: agent `i` carries weight `1 / |N_I^out(p)|` for each of its
/// components, so the split sums back to the full l1 norm.
#[derive(Debug, Clone, PartialEq)]
pub struct LassoInstance {
    ls: LeastSquaresInstance,
    /// `|N_I^out(p)|` per component.
    copy_counts: Vec<usize>,
}

impl LassoInstance {
    pub fn new(ls: LeastSquaresInstance) -> Result<Self, ProblemError> {
        let p_count = ls.partition.component_count();
        let mut counts = vec![0usize; p_count];
        for a in &ls.agents {
            for &p in &a.components {
                counts[p] += 1;
            }
        }
        if let Some(p) = counts.iter().position(|&c| c == 0) {
            return Err(ProblemError::Dimension(format!("component {p} has no interfering agent")));
        }
        Ok(Self { ls, copy_counts: counts })
    }

    pub fn least_squares(&self) -> &LeastSquaresInstance {
        &self.ls
    }

    pub fn l1_weight(&self, p: usize) -> f64 {
        1.0 / self.copy_counts[p] as f64
    }

    /// Proximal-gradient (FISTA) solution of `||y||_1 + sum_i ||h_i - H_i u_i||^2`
    /// to fixed-point tolerance `1e-10`.
    pub fn reference(&self) -> Result<(DVector<f64>, f64), ProblemError> {
        let (h_mat, h_vec) = self.ls.global_system();
        let gram = h_mat.tr_mul(&h_mat);
        let lips = 2.0 * gram.clone().symmetric_eigen().eigenvalues.iter().fold(0.0_f64, |m, &x| m.max(x));
        let step = if lips > 0.0 { 1.0 / lips } else { 1.0 };
        let n = h_mat.ncols();
        let mut y = DVector::zeros(n);
        let mut momentum = y.clone();
        let mut t = 1.0_f64;
        let soft = |v: f64, thr: f64| v.signum() * (v.abs() - thr).max(0.0);
        for _ in 0..200_000 {
            let grad = (gram.clone() * &momentum - h_mat.tr_mul(&h_vec)) * 2.0;
            let mut next = &momentum - step * grad;
            for x in next.iter_mut() {
                *x = soft(*x, step);
            }
            let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
            momentum = &next + ((t - 1.0) / t_next) * (&next - &y);
            t = t_next;
            // fixed-point residual of the proximal map at y
            let grad_y = (gram.clone() * &next - h_mat.tr_mul(&h_vec)) * 2.0;
            let mut mapped = &next - step * grad_y;
            for x in mapped.iter_mut() {
                *x = soft(*x, step);
            }
            let res = (&mapped - &next).amax();
            y = next;
            if res <= 1e-10 * step.max(1.0) {
                break;
            }
        }
        let cost = y.iter().map(|x| x.abs()).sum::<f64>() + (&h_vec - &h_mat * &y).norm_squared();
        Ok((y, cost))
    }

    pub fn to_text(&self) -> String {
        instance_text("LASSO-INSTANCE v1", &self.ls.partition, &self.ls.agents, None)
    }

    pub fn from_text(text: &str) -> Result<Self, ProblemError> {
        let (header, partition, agents, _) = parse_instance(text)?;
        if header != "LASSO-INSTANCE v1" {
            return Err(ProblemError::Parse(format!("unexpected header {header}")));
        }
        Self::new(LeastSquaresInstance::new(partition, agents)?)
    }
}

impl SeparableCost for LassoInstance {
    fn agent_count(&self) -> usize {
        self.ls.agent_count()
    }

    fn partition(&self) -> &Partition {
        &self.ls.partition
    }

    fn interference_components(&self, i: usize) -> &[usize] {
        self.ls.interference_components(i)
    }

    fn value(&self, i: usize, view: &AgentView) -> f64 {
        let mut v = self.ls.value(i, view);
        for &p in &self.ls.agents[i].components {
            let block = view.get(p).expect("view covers components");
            v += self.l1_weight(p) * block.iter().map(|x| x.abs()).sum::<f64>();
        }
        v
    }

    fn gradient(&self, _i: usize, _view: &AgentView, _p: usize) -> Result<DVector<f64>, ProblemError> {
        Err(ProblemError::NotDifferentiable)
    }

    /// Quadratic gradient plus the weighted sign, with `sign(0) = 0`
    /// (the minimum-norm subgradient element).
    fn subgradient(
        &self,
        i: usize,
        view: &AgentView,
        p: usize,
    ) -> Result<DVector<f64>, ProblemError> {
        let mut g = self.ls.gradient(i, view, p)?;
        let w = self.l1_weight(p);
        let block = view.get(p).ok_or(ProblemError::MissingEstimate(p))?;
        for (gx, &x) in g.iter_mut().zip(block.iter()) {
            if x > 0.0 {
                *gx += w;
            } else if x < 0.0 {
                *gx -= w;
            }
        }
        Ok(g)
    }

    fn is_differentiable(&self) -> bool {
        false
    }

    fn smoothness(&self) -> Option<f64> {
        None
    }
}

/// Per-agent data of a constraint-coupled problem with separable strongly
/// convex quadratic costs over a box: `f_i(x) = 1/2 x^T diag(d) x + c^T x`,
/// `|x_j| <= box_radius`, coupled through `sum_i (A_{p,i} x_i - a_{p,i}) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct CcAgent {
    pub components: Vec<usize>,
    pub quad_diag: DVector<f64>,
    pub linear: DVector<f64>,
    pub box_radius: f64,
    /// One `(A_{p,i}, a_{p,i})` pair per component, aligned with `components`.
    pub coupling: Vec<(DMatrix<f64>, DVector<f64>)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintCoupledInstance {
    partition: Partition,
    agents: Vec<CcAgent>,
}

impl ConstraintCoupledInstance {
    pub fn new(partition: Partition, agents: Vec<CcAgent>) -> Result<Self, ProblemError> {
        for (i, a) in agents.iter().enumerate() {
            if a.components.len() != a.coupling.len() {
                return Err(ProblemError::Dimension(format!(
                    "agent {i}: coupling blocks do not match components"
                )));
            }
            if a.quad_diag.iter().any(|&d| d <= 0.0) {
                return Err(ProblemError::Dimension(format!(
                    "agent {i}: quadratic diagonal must be positive"
                )));
            }
            for (&p, (a_mat, a_vec)) in a.components.iter().zip(&a.coupling) {
                if a_mat.nrows() != partition.size(p) || a_vec.len() != partition.size(p) {
                    return Err(ProblemError::Dimension(format!(
                        "agent {i}: coupling rows must match component {p} size"
                    )));
                }
                if a_mat.ncols() != a.quad_diag.len() {
                    return Err(ProblemError::Dimension(format!(
                        "agent {i}: coupling columns must match the local dimension"
                    )));
                }
            }
        }
        Ok(Self { partition, agents })
    }

    pub fn agents(&self) -> &[CcAgent] {
        &self.agents
    }

    /// Inner argmin of the Lagrangian for agent `i` at the given dual view;
    /// closed form because the cost is separable and the domain is a box.
    pub fn inner_argmin(&self, i: usize, view: &AgentView) -> Result<DVector<f64>, ProblemError> {
        let a = &self.agents[i];
        let n_x = a.quad_diag.len();
        let mut shift = a.linear.clone();
        for (&p, (a_mat, _)) in a.components.iter().zip(&a.coupling) {
            let y_p = view.get(p).ok_or(ProblemError::MissingEstimate(p))?;
            shift += a_mat.tr_mul(y_p);
        }
        let mut x = DVector::zeros(n_x);
        for j in 0..n_x {
            x[j] = (-shift[j] / a.quad_diag[j]).clamp(-a.box_radius, a.box_radius);
        }
        Ok(x)
    }

    /// Supergradient blocks `g_{i,p} = A_{p,i} x_i* - a_{p,i}` of the local
    /// dual function (a concave function of the dual variable).
    pub fn dual_subgradient(
        &self,
        i: usize,
        view: &AgentView,
    ) -> Result<Vec<(usize, DVector<f64>)>, ProblemError> {
        let x = self.inner_argmin(i, view)?;
        let a = &self.agents[i];
        Ok(a.components
            .iter()
            .zip(&a.coupling)
            .map(|(&p, (a_mat, a_vec))| (p, a_mat * &x - a_vec))
            .collect())
    }

    fn local_cost(&self, i: usize, x: &DVector<f64>) -> f64 {
        let a = &self.agents[i];
        0.5 * x.iter().zip(a.quad_diag.iter()).map(|(&v, &d)| d * v * v).sum::<f64>()
            + a.linear.dot(x)
    }

    /// Local dual value `phi_i(view) = f_i(x*) + sum_p <y_p, A x* - a_p>`.
    pub fn dual_value(&self, i: usize, view: &AgentView) -> Result<f64, ProblemError> {
        let x = self.inner_argmin(i, view)?;
        let a = &self.agents[i];
        let mut v = self.local_cost(i, &x);
        for (&p, (a_mat, a_vec)) in a.components.iter().zip(&a.coupling) {
            let y_p = view.get(p).ok_or(ProblemError::MissingEstimate(p))?;
            v += y_p.dot(&(a_mat * &x - a_vec));
        }
        Ok(v)
    }

    /// KKT solve of the equality-constrained quadratic program, valid when
    /// the box constraints are inactive at the optimum (checked). Returns
    /// `(y* dual, x* primal, f*)`.
    pub fn reference(&self) -> Result<(DVector<f64>, DVector<f64>, f64), ProblemError> {
        let n_y = self.partition.total();
        let n_x: usize = self.agents.iter().map(|a| a.quad_diag.len()).sum();
        let mut kkt = DMatrix::zeros(n_x + n_y, n_x + n_y);
        let mut rhs = DVector::zeros(n_x + n_y);
        let mut off = 0;
        for a in &self.agents {
            let m = a.quad_diag.len();
            for j in 0..m {
                kkt[(off + j, off + j)] = a.quad_diag[j];
                rhs[off + j] = -a.linear[j];
            }
            for (&p, (a_mat, a_vec)) in a.components.iter().zip(&a.coupling) {
                let row = n_x + self.partition.offset(p);
                let n_p = self.partition.size(p);
                kkt.view_mut((row, off), (n_p, m)).copy_from(a_mat);
                kkt.view_mut((off, row), (m, n_p)).copy_from(&a_mat.transpose());
                let mut r = rhs.rows_mut(row, n_p);
                r += a_vec;
            }
            off += m;
        }
        let solution = kkt
            .lu()
            .solve(&rhs)
            .ok_or_else(|| ProblemError::InnerSolver("singular KKT system".into()))?;
        let x = solution.rows(0, n_x).into_owned();
        let y = solution.rows(n_x, n_y).into_owned();
        let mut off = 0;
        for (i, a) in self.agents.iter().enumerate() {
            let m = a.quad_diag.len();
            for j in 0..m {
                if x[off + j].abs() >= a.box_radius {
                    return Err(ProblemError::InnerSolver(format!(
                        "box constraint active for agent {i}; KKT reference invalid"
                    )));
                }
            }
            off += m;
        }
        let mut cost = 0.0;
        let mut off = 0;
        for (i, a) in self.agents.iter().enumerate() {
            let m = a.quad_diag.len();
            cost += self.local_cost(i, &x.rows(off, m).into_owned());
            off += m;
        }
        Ok((y, x, cost))
    }

    /// The dual problem in minimization form (`-phi`), ready to be solved by
    /// the subgradient algorithms.
    pub fn dual_problem(&self) -> DualProblem<'_> {
        DualProblem { inner: self }
    }
}

/// Minimization form of the dual of a constraint-coupled instance: each
/// agent's cost is `-phi_i`, whose subgradient is the negated constraint
/// residual at the inner minimizer.
pub struct DualProblem<'a> {
    inner: &'a ConstraintCoupledInstance,
}

impl SeparableCost for DualProblem<'_> {
    fn agent_count(&self) -> usize {
        self.inner.agents.len()
    }

    fn partition(&self) -> &Partition {
        &self.inner.partition
    }

    fn interference_components(&self, i: usize) -> &[usize] {
        &self.inner.agents[i].components
    }

    fn value(&self, i: usize, view: &AgentView) -> f64 {
        -self.inner.dual_value(i, view).expect("view covers components")
    }

    fn gradient(&self, _i: usize, _view: &AgentView, _p: usize) -> Result<DVector<f64>, ProblemError> {
        Err(ProblemError::NotDifferentiable)
    }

    fn subgradient(
        &self,
        i: usize,
        view: &AgentView,
        p: usize,
    ) -> Result<DVector<f64>, ProblemError> {
        let grads = self.inner.dual_subgradient(i, view)?;
        grads
            .into_iter()
            .find(|&(q, _)| q == p)
            .map(|(_, g)| -g)
            .ok_or(ProblemError::NotAnInterferenceComponent { agent: i, component: p })
    }

    fn is_differentiable(&self) -> bool {
        false
    }

    fn smoothness(&self) -> Option<f64> {
        None
    }
}

fn write_vec(s: &mut String, tag: &str, v: &DVector<f64>) {
    write!(s, "{tag}").unwrap();
    for x in v.iter() {
        write!(s, " {x}").unwrap();
    }
    writeln!(s).unwrap();
}

fn instance_text(
    header: &str,
    partition: &Partition,
    agents: &[LsAgent],
    _extra: Option<()>,
) -> String {
    let mut s = String::new();
    writeln!(s, "{header}").unwrap();
    let sizes: Vec<String> = partition.sizes().iter().map(|x| x.to_string()).collect();
    writeln!(s, "PARTITION {}", sizes.join(" ")).unwrap();
    writeln!(s, "AGENTS {}", agents.len()).unwrap();
    for (i, a) in agents.iter().enumerate() {
        writeln!(s, "AGENT {i}").unwrap();
        let comps: Vec<String> = a.components.iter().map(|x| x.to_string()).collect();
        writeln!(s, "COMPONENTS {}", comps.join(" ")).unwrap();
        writeln!(s, "H {} {}", a.output.nrows(), a.output.ncols()).unwrap();
        for r in 0..a.output.nrows() {
            let row: Vec<String> = (0..a.output.ncols()).map(|c| a.output[(r, c)].to_string()).collect();
            writeln!(s, "{}", row.join(" ")).unwrap();
        }
        write_vec(&mut s, "h", &a.measurement);
    }
    s
}

fn parse_floats(line: &str) -> Result<Vec<f64>, ProblemError> {
    line.split_whitespace()
        .map(|t| t.parse::<f64>().map_err(|e| ProblemError::Parse(e.to_string())))
        .collect()
}

fn parse_instance(
    text: &str,
) -> Result<(String, Partition, Vec<LsAgent>, ()), ProblemError> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| ProblemError::Parse("empty instance".into()))?
        .trim()
        .to_string();
    let mut partition: Option<Partition> = None;
    let mut agents: Vec<LsAgent> = Vec::new();
    let mut current: Option<(Vec<usize>, Option<DMatrix<f64>>, Option<DVector<f64>>)> = None;
    let mut pending_rows: Vec<Vec<f64>> = Vec::new();
    let mut expected: Option<(usize, usize)> = None;
    let finish = |agents: &mut Vec<LsAgent>,
                  current: &mut Option<(Vec<usize>, Option<DMatrix<f64>>, Option<DVector<f64>>)>|
     -> Result<(), ProblemError> {
        if let Some((components, output, measurement)) = current.take() {
            agents.push(LsAgent {
                components,
                output: output.ok_or_else(|| ProblemError::Parse("missing H block".into()))?,
                measurement: measurement
                    .ok_or_else(|| ProblemError::Parse("missing h line".into()))?,
            });
        }
        Ok(())
    };
    for line in lines {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix("PARTITION ") {
            let sizes: Result<Vec<usize>, _> = rest.split_whitespace().map(|t| t.parse()).collect();
            let sizes = sizes.map_err(|e: std::num::ParseIntError| ProblemError::Parse(e.to_string()))?;
            partition = Some(Partition::new(sizes).map_err(|e| ProblemError::Parse(e.to_string()))?);
        } else if line.starts_with("AGENTS ") {
            // count is implied by AGENT sections
        } else if line.strip_prefix("AGENT ").is_some() {
            finish(&mut agents, &mut current)?;
            current = Some((Vec::new(), None, None));
        } else if let Some(rest) = line.strip_prefix("COMPONENTS ") {
            let comps: Result<Vec<usize>, _> = rest.split_whitespace().map(|t| t.parse()).collect();
            current
                .as_mut()
                .ok_or_else(|| ProblemError::Parse("COMPONENTS outside AGENT".into()))?
                .0 = comps.map_err(|e: std::num::ParseIntError| ProblemError::Parse(e.to_string()))?;
        } else if let Some(rest) = line.strip_prefix("H ") {
            let dims: Result<Vec<usize>, _> = rest.split_whitespace().map(|t| t.parse()).collect();
            let dims = dims.map_err(|e: std::num::ParseIntError| ProblemError::Parse(e.to_string()))?;
            expected = Some((dims[0], dims[1]));
            pending_rows.clear();
        } else if let Some(rest) = line.strip_prefix("h ") {
            let vals = parse_floats(rest)?;
            let cur = current
                .as_mut()
                .ok_or_else(|| ProblemError::Parse("h outside AGENT".into()))?;
            cur.2 = Some(DVector::from_vec(vals));
        } else if expected.is_some() {
            pending_rows.push(parse_floats(line)?);
            let (r, c) = expected.unwrap();
            if pending_rows.len() == r {
                let flat: Vec<f64> = pending_rows.drain(..).flatten().collect();
                if flat.len() != r * c {
                    return Err(ProblemError::Parse("H block has wrong shape".into()));
                }
                let cur = current
                    .as_mut()
                    .ok_or_else(|| ProblemError::Parse("H outside AGENT".into()))?;
                cur.1 = Some(DMatrix::from_row_slice(r, c, &flat));
                expected = None;
            }
        } else {
            return Err(ProblemError::Parse(format!("unexpected line: {line}")));
        }
    }
    finish(&mut agents, &mut current)?;
    let partition = partition.ok_or_else(|| ProblemError::Parse("missing PARTITION".into()))?;
    Ok((header, partition, agents, ()))
}
