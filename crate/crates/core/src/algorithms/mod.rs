//! Distributed steppers over estimate layouts: consensus ADMM, the ABC
//! family with its condition checker and gradient-tracking preset, push-sum
//! subgradient descent, plus merit functions and convergence diagnostics.

pub mod abc;
pub mod admm;
pub mod merit;
pub mod push_sum;

use thiserror::Error;

use crate::end_core::LayoutError;
use crate::problems::ProblemError;

#[derive(Debug, Error)]
pub enum AlgoError {
    #[error("relaxation step {0} outside (0, 1)")]
    StepOutOfRange(f64),
    #[error("design graph of component {0} must be undirected and connected")]
    DesignNotUndirected(usize),
    #[error("mixing mass became non-positive at copy ({agent}, {component}): {value}")]
    MassCollapse { agent: usize, component: usize, value: f64 },
    #[error("mixing weights are not column stochastic")]
    NotColumnStochastic,
    #[error("mixing weights lack self-loops")]
    MissingSelfLoops,
    #[error("weights are not symmetric doubly stochastic")]
    NotDoublyStochastic,
    #[error("matrix family conditions not verified; run the condition checker first")]
    ConditionsNotVerified,
    #[error("matrix block for component {component} has size {got}, expected {expected}")]
    BlockSizeMismatch { component: usize, expected: usize, got: usize },
    #[error(transparent)]
    Layout(#[from] LayoutError),
    #[error(transparent)]
    Problem(#[from] ProblemError),
}
