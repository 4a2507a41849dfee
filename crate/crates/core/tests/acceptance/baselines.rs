//! Sparsity-unaware reference implementations of the three algorithms.
//!
//! Every agent stores the full solution vector and mixes it with one network
//! weight matrix; no estimate layouts, no copy sets, no per-component
//! sparsity. Accumulations run over ascending agent ids so trajectories are
//! comparable to the layout-aware steppers at machine precision.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

/// One agent's quadratic data: `f_i(u) = ||b - H u||^2` with `u` the
/// concatenation of the listed solution blocks in ascending order.
#[derive(Clone)]
pub struct DenseAgent {
    pub comps: Vec<usize>,
    pub h: DMatrix<f64>,
    pub b: DVector<f64>,
}

/// A partially separable least-squares problem in dense form.
pub struct DenseLs {
    pub sizes: Vec<usize>,
    pub offsets: Vec<usize>,
    pub total: usize,
    pub agents: Vec<DenseAgent>,
}

impl DenseLs {
    pub fn new(sizes: Vec<usize>, agents: Vec<DenseAgent>) -> Self {
        let mut offsets = Vec::with_capacity(sizes.len());
        let mut total = 0;
        for &s in &sizes {
            offsets.push(total);
            total += s;
        }
        Self { sizes, offsets, total, agents }
    }

    fn local_point(&self, i: usize, y: &DVector<f64>) -> DVector<f64> {
        let a = &self.agents[i];
        let dim: usize = a.comps.iter().map(|&p| self.sizes[p]).sum();
        let mut u = DVector::zeros(dim);
        let mut off = 0;
        for &p in &a.comps {
            u.rows_mut(off, self.sizes[p]).copy_from(&y.rows(self.offsets[p], self.sizes[p]));
            off += self.sizes[p];
        }
        u
    }

    /// Gradient of `f_i` with respect to the full vector; blocks outside the
    /// agent's components stay zero.
    pub fn gradient(&self, i: usize, y: &DVector<f64>) -> DVector<f64> {
        let a = &self.agents[i];
        let u = self.local_point(i, y);
        let r = &a.b - &a.h * u;
        let mut g = DVector::zeros(self.total);
        let mut col = 0;
        for &p in &a.comps {
            let n_p = self.sizes[p];
            let block = a.h.view((0, col), (a.h.nrows(), n_p));
            g.rows_mut(self.offsets[p], n_p).copy_from(&(block.tr_mul(&r) * -2.0));
            col += n_p;
        }
        g
    }
}

/// `out[r] = sum_s w[r][s] y[s]` over nonzero weights, ascending in `s`.
pub fn mix(w: &DMatrix<f64>, y: &[DVector<f64>]) -> Vec<DVector<f64>> {
    let n = y.len();
    let mut out = Vec::with_capacity(n);
    for r in 0..n {
        let mut acc = DVector::zeros(y[r].len());
        for s in 0..n {
            if w[(r, s)] != 0.0 {
                acc.axpy(w[(r, s)], &y[s], 1.0);
            }
        }
        out.push(acc);
    }
    out
}

fn mix_scalars(w: &DMatrix<f64>, q: &DVector<f64>) -> DVector<f64> {
    let n = q.len();
    let mut out = DVector::zeros(n);
    for r in 0..n {
        let mut acc = 0.0;
        for s in 0..n {
            if w[(r, s)] != 0.0 {
                acc += w[(r, s)] * q[s];
            }
        }
        out[r] = acc;
    }
    out
}

/// Column-stochastic mixing matrix: sender `v` splits its value uniformly
/// over its out-neighbors and itself.
pub fn uniform_weights(undirected_edges: &[(usize, usize)], n: usize) -> DMatrix<f64> {
    let mut adj = vec![vec![false; n]; n];
    for v in 0..n {
        adj[v][v] = true;
    }
    for &(u, v) in undirected_edges {
        adj[u][v] = true;
        adj[v][u] = true;
    }
    let mut w = DMatrix::zeros(n, n);
    for v in 0..n {
        let share = 1.0 / adj[v].iter().filter(|&&e| e).count() as f64;
        for u in 0..n {
            if adj[v][u] {
                w[(u, v)] = share;
            }
        }
    }
    w
}

/// Metropolis weights over an undirected edge list, diagonal filled to one.
pub fn metropolis_weights(undirected_edges: &[(usize, usize)], n: usize) -> DMatrix<f64> {
    let mut deg = vec![0usize; n];
    for &(u, v) in undirected_edges {
        deg[u] += 1;
        deg[v] += 1;
    }
    let mut w = DMatrix::zeros(n, n);
    for &(u, v) in undirected_edges {
        let x = 1.0 / (1.0 + deg[u].max(deg[v]) as f64);
        w[(u, v)] = x;
        w[(v, u)] = x;
    }
    for u in 0..n {
        let off: f64 = (0..n).filter(|&v| v != u).map(|v| w[(u, v)]).sum();
        w[(u, u)] = 1.0 - off;
    }
    w
}

pub struct DensePushSum {
    pub q: DVector<f64>,
    pub z: Vec<DVector<f64>>,
    pub y: Vec<DVector<f64>>,
}

impl DensePushSum {
    pub fn start(problem: &DenseLs) -> Self {
        let n = problem.agents.len();
        let zeros = vec![DVector::zeros(problem.total); n];
        Self { q: DVector::from_element(n, 1.0), z: zeros.clone(), y: zeros }
    }

    pub fn step(&mut self, w: &DMatrix<f64>, problem: &DenseLs, gamma: f64) {
        self.q = mix_scalars(w, &self.q);
        let mixed = mix(w, &self.z);
        let n = problem.agents.len();
        let mut y = Vec::with_capacity(n);
        for i in 0..n {
            y.push(&mixed[i] / self.q[i]);
        }
        let mut z = Vec::with_capacity(n);
        for i in 0..n {
            let g = problem.gradient(i, &y[i]);
            let mut zi = mixed[i].clone();
            zi.axpy(-gamma, &g, 1.0);
            z.push(zi);
        }
        self.y = y;
        self.z = z;
    }
}

pub struct DenseTracking {
    pub y: Vec<DVector<f64>>,
    pub v: Vec<DVector<f64>>,
    grad: Vec<DVector<f64>>,
}

impl DenseTracking {
    /// `y = 0`, tracker seeded with one mixing round over the gradients.
    pub fn start(w: &DMatrix<f64>, problem: &DenseLs) -> Self {
        let n = problem.agents.len();
        let y = vec![DVector::zeros(problem.total); n];
        let grad: Vec<DVector<f64>> = (0..n).map(|i| problem.gradient(i, &y[i])).collect();
        let v = mix(w, &grad);
        Self { y, v, grad }
    }

    pub fn step(&mut self, w: &DMatrix<f64>, problem: &DenseLs, gamma: f64) {
        let n = problem.agents.len();
        let mut inner = Vec::with_capacity(n);
        for i in 0..n {
            let mut x = self.y[i].clone();
            x.axpy(-gamma, &self.v[i], 1.0);
            inner.push(x);
        }
        let y = mix(w, &inner);
        let grad: Vec<DVector<f64>> = (0..n).map(|i| problem.gradient(i, &y[i])).collect();
        let mut tracked = Vec::with_capacity(n);
        for i in 0..n {
            let mut t = self.v[i].clone();
            t.axpy(1.0, &grad[i], 1.0);
            t.axpy(-1.0, &self.grad[i], 1.0);
            tracked.push(t);
        }
        self.v = mix(w, &tracked);
        self.y = y;
        self.grad = grad;
    }
}

pub struct DenseAdmm {
    pub y: Vec<DVector<f64>>,
    aux: BTreeMap<(usize, usize, usize), DVector<f64>>,
    neighbors: Vec<Vec<usize>>,
    alpha: f64,
}

impl DenseAdmm {
    pub fn start(
        undirected_edges: &[(usize, usize)],
        problem: &DenseLs,
        alpha: f64,
    ) -> Self {
        let n = problem.agents.len();
        let mut neighbors = vec![Vec::new(); n];
        for &(u, v) in undirected_edges {
            neighbors[u].push(v);
            neighbors[v].push(u);
        }
        for list in neighbors.iter_mut() {
            list.sort_unstable();
        }
        let mut aux = BTreeMap::new();
        for i in 0..n {
            for &j in &neighbors[i] {
                for p in 0..problem.sizes.len() {
                    aux.insert((i, j, p), DVector::zeros(problem.sizes[p]));
                }
            }
        }
        Self { y: vec![DVector::zeros(problem.total); n], aux, neighbors, alpha }
    }

    pub fn step(&mut self, problem: &DenseLs) {
        let n = problem.agents.len();
        let p_count = problem.sizes.len();
        let mut next = Vec::with_capacity(n);
        for i in 0..n {
            let degree = self.neighbors[i].len() as f64;
            // received linear terms, one per solution block
            let mut linear = Vec::with_capacity(p_count);
            for p in 0..p_count {
                let mut s = DVector::zeros(problem.sizes[p]);
                for &j in &self.neighbors[i] {
                    s += &self.aux[&(i, j, p)];
                }
                linear.push(s);
            }
            // blocks the cost touches: solve the penalized normal equations
            let a = &problem.agents[i];
            let dim: usize = a.comps.iter().map(|&p| problem.sizes[p]).sum();
            let gram = a.h.tr_mul(&a.h) * 2.0;
            let mut degrees = DVector::zeros(dim);
            let mut rhs = a.h.tr_mul(&a.b) * 2.0;
            let mut off = 0;
            for &p in &a.comps {
                for r in 0..problem.sizes[p] {
                    degrees[off + r] = degree;
                    rhs[off + r] += linear[p][r];
                }
                off += problem.sizes[p];
            }
            let mut system = gram;
            for r in 0..dim {
                system[(r, r)] += degrees[r];
            }
            let u = system.cholesky().expect("positive definite").solve(&rhs);
            let mut yi = DVector::zeros(problem.total);
            let mut off = 0;
            for &p in &a.comps {
                let n_p = problem.sizes[p];
                yi.rows_mut(problem.offsets[p], n_p).copy_from(&u.rows(off, n_p));
                off += n_p;
            }
            // blocks the cost ignores: pure penalty minimizer
            for p in 0..p_count {
                if !a.comps.contains(&p) {
                    let n_p = problem.sizes[p];
                    yi.rows_mut(problem.offsets[p], n_p)
                        .copy_from(&(&linear[p] / degree));
                }
            }
            next.push(yi);
        }
        let mut aux = BTreeMap::new();
        for (&(i, j, p), z) in &self.aux {
            let mirrored = &self.aux[&(j, i, p)];
            let y_j = next[j].rows(problem.offsets[p], problem.sizes[p]).into_owned();
            aux.insert(
                (i, j, p),
                z * (1.0 - self.alpha) - mirrored * self.alpha + y_j * (2.0 * self.alpha),
            );
        }
        self.y = next;
        self.aux = aux;
    }
}
