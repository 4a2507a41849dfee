//! Relaxed consensus ADMM over estimate layouts. Each copy of a component
//! exchanges an auxiliary variable with every design-graph neighbor; the
//! local update is an argmin of the agent's cost plus a quadratic penalty of
//! `1/2 ||y_p||^2` per neighbor and a linear term in the received
//! auxiliaries, followed by the relaxed auxiliary exchange
//! `z_{i,j,p} <- (1-a) z_{i,j,p} - a z_{j,i,p} + 2a y_{j,p}`.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::AlgoError;
use crate::end_core::{EndLayout, ReadHook, StackedVector};
use crate::problems::{LassoInstance, LeastSquaresInstance, ProblemError, SeparableCost};

/// One penalized component in an agent's local argmin: minimize
/// `f_i + sum_p (degree_p/2 ||y_p||^2 - <linear_p, y_p>)` over all listed
/// components. `degree` counts design in-neighbors (self-loops excluded);
/// `current` is the present estimate, kept when the problem is indifferent.
#[derive(Debug, Clone)]
pub struct AdmmTerm {
    pub component: usize,
    pub degree: f64,
    pub linear: DVector<f64>,
    pub current: DVector<f64>,
}

/// Problems usable with the ADMM stepper: they must solve the penalized
/// local argmin exactly or to tolerance `1e-10`.
pub trait AdmmProblem: SeparableCost {
    /// Returns the minimizer blocks aligned with `terms`.
    fn local_argmin(&self, i: usize, terms: &[AdmmTerm]) -> Result<Vec<DVector<f64>>, ProblemError>;
}

#[derive(Debug, Clone)]
pub struct AdmmState {
    estimates: StackedVector,
    /// `(i, j, p) -> z_{i,j,p}` for every design in-neighbor `j != i` of copy
    /// `(i, p)`.
    aux: BTreeMap<(usize, usize, usize), DVector<f64>>,
    alpha: f64,
}

impl AdmmState {
    /// Zero-initialized state. Requires every design graph undirected and
    /// connected, and the relaxation step strictly inside `(0, 1)`.
    pub fn new(layout: Arc<EndLayout>, alpha: f64) -> Result<Self, AlgoError> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(AlgoError::StepOutOfRange(alpha));
        }
        for p in 0..layout.component_count() {
            let g = layout.design(p);
            if !g.is_symmetric() || !g.is_connected_undirected().unwrap_or(false) {
                return Err(AlgoError::DesignNotUndirected(p));
            }
        }
        let mut aux = BTreeMap::new();
        for p in 0..layout.component_count() {
            let n_p = layout.partition().size(p);
            for &i in layout.copy_set(p) {
                for j in layout.design(p).in_neighbors(i).expect("copy holder") {
                    if j != i {
                        aux.insert((i, j, p), DVector::zeros(n_p));
                    }
                }
            }
        }
        Ok(Self { estimates: StackedVector::zeros(layout), aux, alpha })
    }

    pub fn estimates(&self) -> &StackedVector {
        &self.estimates
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn auxiliary(&self, i: usize, j: usize, p: usize) -> Option<&DVector<f64>> {
        self.aux.get(&(i, j, p))
    }

    pub fn auxiliary_keys(&self) -> impl Iterator<Item = &(usize, usize, usize)> {
        self.aux.keys()
    }
}

pub fn admm_step(state: &AdmmState, problem: &dyn AdmmProblem) -> Result<AdmmState, AlgoError> {
    admm_step_with_hook(state, problem, &mut |_, _, _| {})
}

/// One synchronous round: every agent solves its local argmin from its own
/// auxiliaries, then auxiliaries are refreshed from the neighbors' new
/// estimates. Estimate reads on behalf of agent `i` are reported to `hook`.
pub fn admm_step_with_hook(
    state: &AdmmState,
    problem: &dyn AdmmProblem,
    hook: ReadHook,
) -> Result<AdmmState, AlgoError> {
    let layout = state.estimates.layout().clone();
    let mut next = StackedVector::zeros(layout.clone());
    for i in 0..layout.agent_count() {
        let mut terms = Vec::new();
        for &p in layout.estimated_components(i) {
            let neighbors: Vec<usize> = layout
                .design(p)
                .in_neighbors(i)
                .expect("copy holder")
                .into_iter()
                .filter(|&j| j != i)
                .collect();
            let n_p = layout.partition().size(p);
            let mut linear = DVector::zeros(n_p);
            for &j in &neighbors {
                linear += &state.aux[&(i, j, p)];
            }
            terms.push(AdmmTerm {
                component: p,
                degree: neighbors.len() as f64,
                linear,
                current: state.estimates.select(p, i)?,
            });
        }
        let blocks = problem.local_argmin(i, &terms)?;
        for (term, block) in terms.iter().zip(&blocks) {
            let local = layout.local_index(term.component, i)?;
            next.set_block(term.component, local, block);
        }
    }
    let mut aux = BTreeMap::new();
    for (&(i, j, p), z) in &state.aux {
        let mirrored = &state.aux[&(j, i, p)];
        hook(i, p, j);
        let y_j = next.select(p, j)?;
        aux.insert(
            (i, j, p),
            z * (1.0 - state.alpha) - mirrored * state.alpha + y_j * (2.0 * state.alpha),
        );
    }
    Ok(AdmmState { estimates: next, aux, alpha: state.alpha })
}

/// Shared quadratic machinery for the least-squares family: minimize
/// `||h - H u||^2 + sum_p (d_p/2 ||u_p||^2 - <s_p, u_p>) (+ sum_p w_p ||u_p||_1)`
/// over the agent's interference components, plus decoupled penalized-only
/// components.
fn ls_argmin_blocks(
    ls: &LeastSquaresInstance,
    i: usize,
    terms: &[AdmmTerm],
    l1_weight: Option<&dyn Fn(usize) -> f64>,
) -> Result<Vec<DVector<f64>>, ProblemError> {
    let agent = ls.agent(i);
    let partition = ls.partition();
    let coupled: Vec<&AdmmTerm> = terms
        .iter()
        .filter(|t| agent.components.binary_search(&t.component).is_ok())
        .collect();
    if coupled.len() != agent.components.len() {
        return Err(ProblemError::MissingEstimate(
            *agent
                .components
                .iter()
                .find(|&&p| terms.iter().all(|t| t.component != p))
                .expect("some component missing"),
        ));
    }
    let dim: usize = agent.components.iter().map(|&p| partition.size(p)).sum();
    let h_mat = &agent.output;
    let gram = h_mat.tr_mul(h_mat) * 2.0;
    let mut degrees = DVector::zeros(dim);
    let mut rhs = h_mat.tr_mul(&agent.measurement) * 2.0;
    let mut off = 0;
    for t in &coupled {
        let n_p = partition.size(t.component);
        for r in 0..n_p {
            degrees[off + r] = t.degree;
            rhs[off + r] += t.linear[r];
        }
        off += n_p;
    }
    let u = match l1_weight {
        None => {
            let mut system = gram;
            for r in 0..dim {
                system[(r, r)] += degrees[r];
            }
            solve_psd(system, rhs)?
        }
        Some(weight) => {
            let mut l1 = DVector::zeros(dim);
            let mut off = 0;
            for t in &coupled {
                let n_p = partition.size(t.component);
                for r in 0..n_p {
                    l1[off + r] = weight(t.component);
                }
                off += n_p;
            }
            prox_gradient(&gram, &degrees, &rhs, &l1)?
        }
    };
    let mut out = Vec::with_capacity(terms.len());
    for t in terms {
        let n_p = partition.size(t.component);
        if let Ok(pos) = agent.components.binary_search(&t.component) {
            let off: usize =
                agent.components[..pos].iter().map(|&q| partition.size(q)).sum();
            out.push(u.rows(off, n_p).into_owned());
        } else if t.degree > 0.0 {
            // penalty-only component: d/2 ||y||^2 - <s, y> (+ w ||y||_1)
            let mut y = &t.linear / t.degree;
            if let Some(weight) = l1_weight {
                let w = weight(t.component);
                for (r, v) in y.iter_mut().enumerate() {
                    *v = soft(t.linear[r], w) / t.degree;
                }
            }
            out.push(y);
        } else {
            // the objective is indifferent: keep the current estimate
            out.push(t.current.clone());
        }
    }
    Ok(out)
}

fn soft(v: f64, thr: f64) -> f64 {
    v.signum() * (v.abs() - thr).max(0.0)
}

fn solve_psd(system: DMatrix<f64>, rhs: DVector<f64>) -> Result<DVector<f64>, ProblemError> {
    if let Some(chol) = system.clone().cholesky() {
        return Ok(chol.solve(&rhs));
    }
    system
        .svd(true, true)
        .solve(&rhs, 1e-12)
        .map_err(|e| ProblemError::InnerSolver(e.to_string()))
}

/// Accelerated proximal gradient on
/// `1/2 u^T (G + diag(d)) u - <rhs, u> + sum_r l1_r |u_r|`
/// to fixed-point tolerance `1e-10`.
fn prox_gradient(
    gram: &DMatrix<f64>,
    degrees: &DVector<f64>,
    rhs: &DVector<f64>,
    l1: &DVector<f64>,
) -> Result<DVector<f64>, ProblemError> {
    let dim = rhs.len();
    let lips = gram.clone().symmetric_eigen().eigenvalues.iter().fold(0.0_f64, |m, &x| m.max(x))
        + degrees.iter().fold(0.0_f64, |m, &x| m.max(x));
    let step = if lips > 0.0 { 1.0 / lips } else { 1.0 };
    let smooth_grad = |u: &DVector<f64>| -> DVector<f64> {
        gram * u + u.component_mul(degrees) - rhs
    };
    let prox = |u: &DVector<f64>| -> DVector<f64> {
        DVector::from_iterator(dim, (0..dim).map(|r| soft(u[r], step * l1[r])))
    };
    let mut u = DVector::zeros(dim);
    let mut momentum = u.clone();
    let mut t = 1.0_f64;
    for _ in 0..200_000 {
        let next = prox(&(&momentum - step * smooth_grad(&momentum)));
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        momentum = &next + ((t - 1.0) / t_next) * (&next - &u);
        t = t_next;
        let residual = (&prox(&(&next - step * smooth_grad(&next))) - &next).amax();
        u = next;
        if residual <= 1e-10 {
            return Ok(u);
        }
    }
    Err(ProblemError::InnerSolver("proximal inner solver did not converge".into()))
}

impl AdmmProblem for LeastSquaresInstance {
    fn local_argmin(&self, i: usize, terms: &[AdmmTerm]) -> Result<Vec<DVector<f64>>, ProblemError> {
        ls_argmin_blocks(self, i, terms, None)
    }
}

impl AdmmProblem for LassoInstance {
    fn local_argmin(&self, i: usize, terms: &[AdmmTerm]) -> Result<Vec<DVector<f64>>, ProblemError> {
        let weight = |p: usize| self.l1_weight(p);
        ls_argmin_blocks(self.least_squares(), i, terms, Some(&weight))
    }
}
