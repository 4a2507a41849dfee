//! Merit functions measuring joint disagreement and suboptimality of a
//! stacked estimate against a centralized reference solution.

use std::sync::Arc;

use nalgebra::DVector;

use super::AlgoError;
use crate::end_core::{EndLayout, StackedVector};
use crate::problems::{stacked_gradient, stacked_subgradient, total_cost, SeparableCost};

/// Precomputed reference data shared by the merit evaluations: the
/// centralized optimum, its cost, and the norm of the stacked (sub)gradient
/// at the lifted optimum. The gradient blocks are nonzero only where costs
/// actually depend on a component, so the norm does not depend on the
/// estimate layout used to lift.
#[derive(Debug, Clone)]
pub struct MeritReference {
    pub y_star: DVector<f64>,
    pub f_star: f64,
    pub grad_norm: f64,
    lifted: StackedVector,
}

impl MeritReference {
    pub fn new(
        problem: &dyn SeparableCost,
        layout: Arc<EndLayout>,
        y_star: DVector<f64>,
        f_star: f64,
    ) -> Result<Self, AlgoError> {
        let lifted = StackedVector::lift(layout, &y_star)?;
        let grad = if problem.is_differentiable() {
            stacked_gradient(problem, &lifted)?
        } else {
            stacked_subgradient(problem, &lifted)?
        };
        Ok(Self { y_star, f_star, grad_norm: grad.norm(), lifted })
    }

    pub fn lifted(&self) -> &StackedVector {
        &self.lifted
    }
}

/// `max( ||orthogonal part of y|| * ||grad f(y*)||, |f(y) - f(y*)| )`.
pub fn merit_m(
    y: &StackedVector,
    problem: &dyn SeparableCost,
    reference: &MeritReference,
) -> Result<f64, AlgoError> {
    let disagreement = y.consensus_residual() * reference.grad_norm;
    let gap = (total_cost(problem, y)? - reference.f_star).abs();
    Ok(disagreement.max(gap))
}

/// Copy-count-weighted variant used as a stopping criterion:
/// `max( ||diag(1/N_p) orthogonal part|| * ||grad f(y*)||,
///       |f(consensus part of y) - f(y*)| )`.
pub fn merit_v(
    y: &StackedVector,
    problem: &dyn SeparableCost,
    reference: &MeritReference,
) -> Result<f64, AlgoError> {
    let disagreement = y.weighted_consensus_residual() * reference.grad_norm;
    let (parallel, _) = y.consensus_project();
    let gap = (total_cost(problem, &parallel)? - reference.f_star).abs();
    Ok(disagreement.max(gap))
}
