//! Sparsity-aware distributed optimization over networks.
//!
//! A partially separable problem couples agents through shared solution
//! components. Instead of every agent tracking the whole solution, each
//! agent keeps copies only of the components it is assigned, and each
//! component's copies reach consensus over their own sub-network. This crate
//! provides:
//!
//! - [`graph`]: directed, bipartite, weighted, and time-varying graph
//!   primitives with the connectivity predicates the algorithms rely on;
//! - [`end_core`]: the estimate layout (who copies what, who talks to whom
//!   about it), stacked vectors blocked per component, and locality-checked
//!   mixing operators;
//! - [`design`]: layout synthesis — the dense standard choice and
//!   Steiner-style heuristics that minimize copies, with memory/broadcast
//!   cost reports;
//! - [`problems`]: partially separable least squares, l1-penalized variants,
//!   and constraint-coupled programs solved through their dual, with
//!   centralized reference solvers;
//! - [`algorithms`]: consensus ADMM, the matrix-parametrized first-order
//!   family with condition checker and gradient-tracking preset, push-sum
//!   subgradient descent, merit functions, and convergence diagnostics;
//! - [`harness`]: random sensor-network scenario generation, experiment
//!   orchestration across design modes, and CSV emission.

pub mod algorithms;
pub mod design;
pub mod end_core;
pub mod graph;
pub mod harness;
pub mod problems;
