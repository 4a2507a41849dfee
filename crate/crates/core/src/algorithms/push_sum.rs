//! Push-sum subgradient descent over (possibly directed, possibly
//! time-varying) design graphs, with column-stochastic mixing: mass and
//! payload are mixed, ratios form the estimates, and a diminishing-step
//! subgradient correction is applied to the payload.

use std::sync::Arc;

use nalgebra::DVector;

use super::AlgoError;
use crate::end_core::{EndLayout, ReadHook, StackedVector, StackedWeightOperator};
use crate::problems::{stacked_subgradient, total_cost, SeparableCost};

const STOCH_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct PushSumState {
    /// Per-component mixing mass, one positive scalar per copy.
    pub mass: Vec<DVector<f64>>,
    pub z: StackedVector,
    pub w: StackedVector,
    pub y: StackedVector,
    pub g: StackedVector,
    pub k: usize,
}

impl PushSumState {
    /// Initial state: unit mass everywhere, payload at `z0`, estimates equal
    /// to the payload.
    pub fn new(z0: StackedVector) -> Self {
        let layout = z0.layout().clone();
        let mass = (0..layout.component_count())
            .map(|p| DVector::from_element(layout.copies(p), 1.0))
            .collect();
        Self {
            mass,
            w: z0.clone(),
            y: z0.clone(),
            g: StackedVector::zeros(layout),
            z: z0,
            k: 0,
        }
    }

    pub fn layout(&self) -> &Arc<EndLayout> {
        self.z.layout()
    }
}

pub fn push_sum_step(
    state: &PushSumState,
    weights: &StackedWeightOperator,
    problem: &dyn SeparableCost,
    gamma_k: f64,
) -> Result<PushSumState, AlgoError> {
    push_sum_step_with_hook(state, weights, problem, gamma_k, &mut |_, _, _| {})
}

/// One round: mix the mass, mix the payload, form ratio estimates, evaluate
/// subgradients at the new estimates, apply the step — in that order, with a
/// single communication round shared by the two mixes.
pub fn push_sum_step_with_hook(
    state: &PushSumState,
    weights: &StackedWeightOperator,
    problem: &dyn SeparableCost,
    gamma_k: f64,
    hook: ReadHook,
) -> Result<PushSumState, AlgoError> {
    if !weights.is_column_stochastic(STOCH_TOL) {
        return Err(AlgoError::NotColumnStochastic);
    }
    if !weights.has_self_loops() {
        return Err(AlgoError::MissingSelfLoops);
    }
    let layout = state.layout().clone();
    let mass = weights.apply_scalar_with_hook(&state.mass, hook);
    for (p, q) in mass.iter().enumerate() {
        for (pos, &v) in q.iter().enumerate() {
            if v <= 0.0 {
                return Err(AlgoError::MassCollapse {
                    agent: layout.copy_set(p)[pos],
                    component: p,
                    value: v,
                });
            }
        }
    }
    let w = weights.apply_with_hook(&state.z, hook)?;
    let mut y = w.clone();
    for p in 0..layout.component_count() {
        let n_p = layout.partition().size(p);
        for pos in 0..layout.copies(p) {
            let scaled = y.block(p, pos).into_owned() / mass[p][pos];
            y.component_mut(p).rows_mut(pos * n_p, n_p).copy_from(&scaled);
        }
    }
    let g = stacked_subgradient(problem, &y)?;
    let mut z = w.clone();
    z.axpy(-gamma_k, &g);
    Ok(PushSumState { mass, z, w, y, g, k: state.k + 1 })
}

/// Diminishing step schedule `k^-0.51` (square-summable but not summable),
/// extended with value `1` at `k = 0`.
pub fn diminishing_step(k: usize) -> f64 {
    if k == 0 {
        1.0
    } else {
        (k as f64).powf(-0.51)
    }
}

/// Streaming convergence diagnostics: the exact averaged recursion residual,
/// per-round consensus error of the ratio estimates, and a descent
/// inequality on the copy-count-weighted distance to the optimum, using a
/// supplied subgradient bound.
pub struct PushSumDiagnostics {
    layout: Arc<EndLayout>,
    y_star: DVector<f64>,
    f_star: f64,
    subgradient_bound: f64,
    prev_zbar: DVector<f64>,
    prev_dist_sq: f64,
    pub recursion_residuals: Vec<f64>,
    pub consensus_errors: Vec<f64>,
    pub descent_violations: usize,
    pub steps: usize,
}

fn component_averages(layout: &EndLayout, v: &StackedVector) -> DVector<f64> {
    let mut out = DVector::zeros(layout.partition().total());
    for p in 0..layout.component_count() {
        let n_p = layout.partition().size(p);
        let copies = layout.copies(p);
        let mut mean = DVector::zeros(n_p);
        for pos in 0..copies {
            mean += v.block(p, pos);
        }
        mean /= copies as f64;
        out.rows_mut(layout.partition().offset(p), n_p).copy_from(&mean);
    }
    out
}

fn weighted_dist_sq(layout: &EndLayout, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    let mut acc = 0.0;
    for p in 0..layout.component_count() {
        let n_p = layout.partition().size(p);
        let off = layout.partition().offset(p);
        let d = (a.rows(off, n_p) - b.rows(off, n_p)).norm_squared();
        acc += layout.copies(p) as f64 * d;
    }
    acc
}

impl PushSumDiagnostics {
    pub fn new(
        initial: &PushSumState,
        y_star: DVector<f64>,
        f_star: f64,
        subgradient_bound: f64,
    ) -> Self {
        let layout = initial.layout().clone();
        let prev_zbar = component_averages(&layout, &initial.z);
        let prev_dist_sq = weighted_dist_sq(&layout, &prev_zbar, &y_star);
        Self {
            layout,
            y_star,
            f_star,
            subgradient_bound,
            prev_zbar,
            prev_dist_sq,
            recursion_residuals: Vec::new(),
            consensus_errors: Vec::new(),
            descent_violations: 0,
            steps: 0,
        }
    }

    /// Records one transition `prev -> next` taken with step `gamma_k`.
    pub fn observe(
        &mut self,
        next: &PushSumState,
        problem: &dyn SeparableCost,
        gamma_k: f64,
    ) -> Result<(), AlgoError> {
        let layout = self.layout.clone();
        let zbar_next = component_averages(&layout, &next.z);

        // (a) exact averaged recursion:
        // zbar+ = zbar - gamma (1/N_p) sum_i g_{i,p}+
        let mut residual_sq = 0.0;
        for p in 0..layout.component_count() {
            let n_p = layout.partition().size(p);
            let off = layout.partition().offset(p);
            let copies = layout.copies(p) as f64;
            let mut g_sum = DVector::zeros(n_p);
            for pos in 0..layout.copies(p) {
                g_sum += next.g.block(p, pos);
            }
            let r = zbar_next.rows(off, n_p) - self.prev_zbar.rows(off, n_p)
                + (gamma_k / copies) * g_sum;
            residual_sq += r.norm_squared();
        }
        self.recursion_residuals.push(residual_sq.sqrt());

        // (b) consensus error of the ratio estimates, which are built by
        // mixing the previous payload, against that payload's mean
        let mut consensus = 0.0_f64;
        for p in 0..layout.component_count() {
            let n_p = layout.partition().size(p);
            let off = layout.partition().offset(p);
            for pos in 0..layout.copies(p) {
                let d = (next.y.block(p, pos) - self.prev_zbar.rows(off, n_p)).norm();
                consensus = consensus.max(d);
            }
        }
        self.consensus_errors.push(consensus);

        // (c) descent inequality on the weighted distance
        let dist_sq = weighted_dist_sq(&layout, &zbar_next, &self.y_star);
        let f_prev = total_cost(problem, &StackedVector::lift(layout.clone(), &self.prev_zbar)?)?;
        let mut mismatch = 0.0;
        for i in 0..layout.agent_count() {
            for &p in layout.estimated_components(i) {
                let n_p = layout.partition().size(p);
                let off = layout.partition().offset(p);
                let pos = layout.local_index(p, i)?;
                mismatch += (next.y.block(p, pos) - self.prev_zbar.rows(off, n_p)).norm();
            }
        }
        let l = self.subgradient_bound;
        let n_agents = layout.agent_count() as f64;
        let rhs = self.prev_dist_sq - 2.0 * gamma_k * (f_prev - self.f_star)
            + 4.0 * l * gamma_k * mismatch
            + gamma_k * gamma_k * n_agents * l * l;
        if dist_sq > rhs + 1e-9 {
            self.descent_violations += 1;
        }

        self.prev_zbar = zbar_next;
        self.prev_dist_sq = dist_sq;
        self.steps += 1;
        Ok(())
    }
}
