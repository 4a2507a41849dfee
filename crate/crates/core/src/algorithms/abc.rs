//! The unified matrix-parametrized first-order family
//! `y+ = A y - gamma B grad f(y) - z`, `z+ = z + C y+`, acting per component
//! through copy-indexed matrix blocks, together with the sufficient-condition
//! checker, the gradient-tracking (two-mixing) preset, and the `O(1/k)`
//! ergodic rate bound.

use nalgebra::{DMatrix, DVector};

use super::AlgoError;
use crate::end_core::{EndLayout, ReadHook, StackedVector, StackedWeightOperator};
use crate::problems::{stacked_gradient, SeparableCost};

const COND_TOL: f64 = 1e-9;

/// Per-component matrix blocks; block `p` is `N_p x N_p` and acts on the
/// component's copies (Kronecker lift over the component dimension).
#[derive(Debug, Clone)]
pub struct AbcMatrices {
    a: Vec<DMatrix<f64>>,
    b: Vec<DMatrix<f64>>,
    c: Vec<DMatrix<f64>>,
    d: Vec<DMatrix<f64>>,
    pub gamma: f64,
}

impl AbcMatrices {
    pub fn new(
        layout: &EndLayout,
        a: Vec<DMatrix<f64>>,
        b: Vec<DMatrix<f64>>,
        c: Vec<DMatrix<f64>>,
        d: Vec<DMatrix<f64>>,
        gamma: f64,
    ) -> Result<Self, AlgoError> {
        if gamma <= 0.0 {
            return Err(AlgoError::StepOutOfRange(gamma));
        }
        for (name, family) in [("A", &a), ("B", &b), ("C", &c), ("D", &d)] {
            if family.len() != layout.component_count() {
                return Err(AlgoError::BlockSizeMismatch {
                    component: family.len(),
                    expected: layout.component_count(),
                    got: family.len(),
                });
            }
            for (p, m) in family.iter().enumerate() {
                let n = layout.copies(p);
                if m.nrows() != n || m.ncols() != n {
                    let _ = name;
                    return Err(AlgoError::BlockSizeMismatch {
                        component: p,
                        expected: n,
                        got: m.nrows(),
                    });
                }
            }
        }
        Ok(Self { a, b, c, d, gamma })
    }

    pub fn a(&self, p: usize) -> &DMatrix<f64> {
        &self.a[p]
    }

    pub fn b(&self, p: usize) -> &DMatrix<f64> {
        &self.b[p]
    }

    pub fn c(&self, p: usize) -> &DMatrix<f64> {
        &self.c[p]
    }

    pub fn d(&self, p: usize) -> &DMatrix<f64> {
        &self.d[p]
    }
}

/// Applies a copy-indexed block matrix to one component of a stacked vector.
fn block_apply(m: &DMatrix<f64>, component: &DVector<f64>, n_p: usize) -> DVector<f64> {
    let copies = m.nrows();
    let mut out = DVector::zeros(copies * n_p);
    for r in 0..copies {
        let mut acc = DVector::zeros(n_p);
        for c in 0..copies {
            let w = m[(r, c)];
            if w != 0.0 {
                acc.axpy(w, &component.rows(c * n_p, n_p).into_owned(), 1.0);
            }
        }
        out.rows_mut(r * n_p, n_p).copy_from(&acc);
    }
    out
}

fn stacked_apply(family: &[DMatrix<f64>], y: &StackedVector) -> StackedVector {
    let layout = y.layout().clone();
    let mut out = StackedVector::zeros(layout.clone());
    for p in 0..layout.component_count() {
        let n_p = layout.partition().size(p);
        let applied = block_apply(&family[p], y.component(p), n_p);
        out.component_mut(p).copy_from(&applied);
    }
    out
}

#[derive(Debug, Clone)]
pub struct AbcState {
    y: StackedVector,
    z: StackedVector,
    sum: StackedVector,
    k: usize,
}

impl AbcState {
    /// Starts from `y0` with the correction variable at zero.
    pub fn new(y0: StackedVector) -> Self {
        let layout = y0.layout().clone();
        Self { y: y0, z: StackedVector::zeros(layout.clone()), sum: StackedVector::zeros(layout), k: 0 }
    }

    pub fn y(&self) -> &StackedVector {
        &self.y
    }

    pub fn z(&self) -> &StackedVector {
        &self.z
    }

    pub fn iteration(&self) -> usize {
        self.k
    }

    /// Running average over iterates `1..=k`; before the first step this is
    /// the initial point.
    pub fn average(&self) -> StackedVector {
        if self.k == 0 {
            self.y.clone()
        } else {
            self.sum.scale(1.0 / self.k as f64)
        }
    }
}

pub fn abc_step(
    state: &AbcState,
    matrices: &AbcMatrices,
    problem: &dyn SeparableCost,
) -> Result<AbcState, AlgoError> {
    let grad = stacked_gradient(problem, &state.y)?;
    let mut y_next = stacked_apply(&matrices.a, &state.y);
    y_next.axpy(-matrices.gamma, &stacked_apply(&matrices.b, &grad));
    y_next.axpy(-1.0, &state.z);
    let mut z_next = state.z.clone();
    z_next.axpy(1.0, &stacked_apply(&matrices.c, &y_next));
    let mut sum = state.sum.clone();
    sum.axpy(1.0, &y_next);
    Ok(AbcState { y: y_next, z: z_next, sum, k: state.k + 1 })
}

/// Outcome of the sufficient-condition check. `c1`..`c5` follow the order:
/// factorization/semidefiniteness, consensus fixed points, correction null
/// space, commutation, and the contraction inequality.
#[derive(Debug, Clone)]
pub struct AbcConditionReport {
    pub c1: bool,
    pub c2: bool,
    pub c3: bool,
    pub c4: bool,
    pub c5: bool,
    /// `min_p lambda_2(C_p)` over components with more than one copy
    /// (infinite when every component has a single copy).
    pub lambda2_min: f64,
    pub lambda_min_d: f64,
    pub messages: Vec<String>,
}

impl AbcConditionReport {
    pub fn all_pass(&self) -> bool {
        self.c1 && self.c2 && self.c3 && self.c4 && self.c5
    }
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, &x| acc.max(x.abs()))
}

fn is_sym(m: &DMatrix<f64>) -> bool {
    max_abs(&(m - m.transpose())) <= COND_TOL
}

fn sym_eigen(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let s = (m + m.transpose()) * 0.5;
    let eig = s.clone().symmetric_eigen();
    // nalgebra's symmetric_eigen can hand back eigenvalues out of step with
    // the eigenvector columns; re-derive each value as the Rayleigh quotient
    // of its column so the pairs are consistent
    let vecs = eig.eigenvectors;
    let vals = DVector::from_fn(vecs.ncols(), |i, _| {
        let v = vecs.column(i);
        v.dot(&(&s * v))
    });
    (vals, vecs)
}

fn sqrt_psd(m: &DMatrix<f64>) -> DMatrix<f64> {
    let (vals, vecs) = sym_eigen(m);
    let root = DMatrix::from_diagonal(&vals.map(|x| x.max(0.0).sqrt()));
    &vecs * root * vecs.transpose()
}

pub fn check_abc_conditions(matrices: &AbcMatrices, layout: &EndLayout) -> AbcConditionReport {
    let mut report = AbcConditionReport {
        c1: true,
        c2: true,
        c3: true,
        c4: true,
        c5: true,
        lambda2_min: f64::INFINITY,
        lambda_min_d: f64::INFINITY,
        messages: Vec::new(),
    };
    for p in 0..layout.component_count() {
        let n = layout.copies(p);
        let (a, b, c, d) = (matrices.a(p), matrices.b(p), matrices.c(p), matrices.d(p));
        let ones = DVector::from_element(n, 1.0);

        // C1: A = B D, B symmetric PSD, D symmetric PD
        if max_abs(&(a - b * d)) > COND_TOL {
            report.c1 = false;
            report.messages.push(format!("component {p}: A != B D"));
        }
        if !is_sym(b) || sym_eigen(b).0.min() < -COND_TOL {
            report.c1 = false;
            report.messages.push(format!("component {p}: B not symmetric PSD"));
        }
        let d_min = if is_sym(d) { sym_eigen(d).0.min() } else { f64::NEG_INFINITY };
        if d_min <= COND_TOL {
            report.c1 = false;
            report.messages.push(format!("component {p}: D not symmetric PD"));
        }
        report.lambda_min_d = report.lambda_min_d.min(d_min);

        // C2: the consensus direction is fixed by D and B
        if (d * &ones - &ones).amax() > COND_TOL || (b * &ones - &ones).amax() > COND_TOL {
            report.c2 = false;
            report.messages.push(format!("component {p}: consensus not fixed by B, D"));
        }

        // C3: C symmetric PSD with null space exactly the consensus line
        if !is_sym(c) {
            report.c3 = false;
            report.messages.push(format!("component {p}: C not symmetric"));
        } else {
            let (vals, vecs) = sym_eigen(c);
            if vals.min() < -COND_TOL {
                report.c3 = false;
                report.messages.push(format!("component {p}: C not PSD"));
            }
            let near_zero: Vec<usize> =
                (0..n).filter(|&idx| vals[idx].abs() <= COND_TOL).collect();
            if near_zero.len() != 1 {
                report.c3 = false;
                report.messages.push(format!(
                    "component {p}: null(C) has dimension {}, expected 1",
                    near_zero.len()
                ));
            } else {
                let v = vecs.column(near_zero[0]);
                let align = v.dot(&ones).abs() / (n as f64).sqrt();
                if (align - 1.0).abs() > 1e-6 {
                    report.c3 = false;
                    report.messages.push(format!("component {p}: null(C) off the consensus line"));
                }
            }
            if n >= 2 {
                let mut sorted: Vec<f64> = vals.iter().copied().collect();
                sorted.sort_by(|x, y| x.partial_cmp(y).unwrap());
                report.lambda2_min = report.lambda2_min.min(sorted[1]);
            }
        }

        // C4: B and C commute
        if max_abs(&(b * c - c * b)) > COND_TOL {
            report.c4 = false;
            report.messages.push(format!("component {p}: B C != C B"));
        }

        // C5: I - C/2 - sqrt(B) D sqrt(B) positive semidefinite
        let root = sqrt_psd(b);
        let inner = DMatrix::identity(n, n) - c * 0.5 - &root * d * &root;
        if sym_eigen(&inner).0.min() < -COND_TOL {
            report.c5 = false;
            report.messages.push(format!("component {p}: contraction inequality fails"));
        }
    }
    report
}

/// Preset recovering gradient tracking with two mixing rounds per iteration:
/// `A = B = W^2`, `C = (I - W)^2`, `D = I`. Requires symmetric doubly
/// stochastic weights.
pub fn augdgm_matrices(
    weights: &StackedWeightOperator,
    gamma: f64,
) -> Result<AbcMatrices, AlgoError> {
    if !weights.is_symmetric_doubly_stochastic(COND_TOL) {
        return Err(AlgoError::NotDoublyStochastic);
    }
    let layout = weights.layout().clone();
    let mut a = Vec::new();
    let mut c = Vec::new();
    let mut d = Vec::new();
    for p in 0..layout.component_count() {
        let w = weights.component_matrix(p).entries().clone();
        let n = w.nrows();
        a.push(&w * &w);
        let diff = DMatrix::identity(n, n) - &w;
        c.push(&diff * &diff);
        d.push(DMatrix::identity(n, n));
    }
    AbcMatrices::new(&layout, a.clone(), a, c, d, gamma)
}

/// Two-variable gradient-tracking state. The tracker `v` estimates the
/// average gradient; `grad` caches the last evaluated gradient.
#[derive(Debug, Clone)]
pub struct AugDgmState {
    pub y: StackedVector,
    pub v: StackedVector,
    grad: StackedVector,
}

impl AugDgmState {
    pub fn tracker(&self) -> &StackedVector {
        &self.v
    }
}

/// Prescribed initialization: `y = 0`, `v = W grad f(0)`.
pub fn augdgm_init(
    weights: &StackedWeightOperator,
    problem: &dyn SeparableCost,
) -> Result<AugDgmState, AlgoError> {
    if !weights.is_symmetric_doubly_stochastic(COND_TOL) {
        return Err(AlgoError::NotDoublyStochastic);
    }
    let layout = weights.layout().clone();
    let y = StackedVector::zeros(layout);
    let grad = stacked_gradient(problem, &y)?;
    let v = weights.apply(&grad)?;
    Ok(AugDgmState { y, v, grad })
}

pub fn augdgm_step(
    state: &AugDgmState,
    weights: &StackedWeightOperator,
    problem: &dyn SeparableCost,
    gamma: f64,
) -> Result<AugDgmState, AlgoError> {
    augdgm_step_with_hook(state, weights, problem, gamma, &mut |_, _, _| {})
}

/// One iteration: `y+ = W (y - gamma v)`, then `v+ = W (v + grad f(y+) -
/// grad f(y))` — exactly two mixing rounds, both over the design graphs.
pub fn augdgm_step_with_hook(
    state: &AugDgmState,
    weights: &StackedWeightOperator,
    problem: &dyn SeparableCost,
    gamma: f64,
    hook: ReadHook,
) -> Result<AugDgmState, AlgoError> {
    let mut inner = state.y.clone();
    inner.axpy(-gamma, &state.v);
    let y_next = weights.apply_with_hook(&inner, hook)?;
    let grad_next = stacked_gradient(problem, &y_next)?;
    let mut tracked = state.v.clone();
    tracked.axpy(1.0, &grad_next);
    tracked.axpy(-1.0, &state.grad);
    let v_next = weights.apply_with_hook(&tracked, hook)?;
    Ok(AugDgmState { y: y_next, v: v_next, grad: grad_next })
}

/// Ergodic rate bound `k -> h / (2k)` with
/// `h = (1/gamma) ||y0 - y*||_D^2 + gamma (||B - P|| / lambda2_min) ||2 z*||^2`,
/// `z* = -grad f(y*)` and `P` the per-component block-averaging projector.
#[derive(Debug, Clone, Copy)]
pub struct RateBound {
    h: f64,
}

impl RateBound {
    pub fn bound(&self, k: usize) -> f64 {
        assert!(k >= 1, "the ergodic bound starts at k = 1");
        self.h / (2.0 * k as f64)
    }

    pub fn constant(&self) -> f64 {
        self.h
    }
}

pub fn abc_rate_bound(
    y0: &StackedVector,
    y_star: &StackedVector,
    grad_at_star: &StackedVector,
    matrices: &AbcMatrices,
    report: &AbcConditionReport,
) -> Result<RateBound, AlgoError> {
    if !report.all_pass() {
        return Err(AlgoError::ConditionsNotVerified);
    }
    let layout = y0.layout().clone();
    let diff = y0.sub(y_star);
    let mut d_norm_sq = 0.0;
    let mut b_minus_proj = 0.0_f64;
    for p in 0..layout.component_count() {
        let n = layout.copies(p);
        let n_p = layout.partition().size(p);
        let d = matrices.d(p);
        for r in 0..n {
            for c in 0..n {
                if d[(r, c)] != 0.0 {
                    let br = diff.block(p, r).into_owned();
                    let bc = diff.block(p, c).into_owned();
                    d_norm_sq += d[(r, c)] * br.dot(&bc);
                }
            }
        }
        let proj = DMatrix::from_element(n, n, 1.0 / n as f64);
        let gap = matrices.b(p) - proj;
        let spectral = sym_eigen(&gap).0.iter().fold(0.0_f64, |m, &x| m.max(x.abs()));
        b_minus_proj = b_minus_proj.max(spectral);
        let _ = n_p;
    }
    let z_term_sq = 4.0 * grad_at_star.dot(grad_at_star);
    let correction = if b_minus_proj == 0.0 || z_term_sq == 0.0 {
        0.0
    } else {
        matrices.gamma * (b_minus_proj / report.lambda2_min) * z_term_sq
    };
    Ok(RateBound { h: d_norm_sq / matrices.gamma + correction })
}
