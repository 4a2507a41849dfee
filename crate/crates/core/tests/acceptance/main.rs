//! End-to-end acceptance suite. Each test prints one `criterion N: PASS`
//! line (visible with `cargo test --test acceptance -- --nocapture`); a
//! failed assertion marks the criterion as failed with the reason.

mod baselines;

use std::sync::Arc;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use end_opt::algorithms::abc::{
    abc_rate_bound, abc_step, augdgm_init, augdgm_matrices, augdgm_step, augdgm_step_with_hook,
    check_abc_conditions, AbcState,
};
use end_opt::algorithms::admm::{admm_step, admm_step_with_hook, AdmmState};
use end_opt::algorithms::merit::{merit_m, merit_v, MeritReference};
use end_opt::algorithms::push_sum::{
    diminishing_step, push_sum_step, push_sum_step_with_hook, PushSumDiagnostics, PushSumState,
};
use end_opt::design::{
    standard_design, steiner_design_directed, steiner_design_undirected, EdgePolicy,
};
use end_opt::end_core::{EndLayout, Partition, StackedVector, StackedWeightOperator};
use end_opt::graph::{BipartiteGraph, DirectedGraph, TimeVaryingGraph, WeightMatrix};
use end_opt::harness::{
    generate_scenario, run_experiment, sweep, Algorithm, DesignChoice, RunConfig, ScenarioConfig,
    ScenarioProblem, StopRule,
};
use end_opt::problems::{
    stacked_gradient, stacked_subgradient, LeastSquaresInstance, LsAgent, SeparableCost,
};

use baselines::{
    metropolis_weights as dense_metropolis, uniform_weights as dense_uniform, DenseAdmm,
    DenseAgent, DenseLs, DensePushSum, DenseTracking,
};

/// Deterministic data values in roughly [-1, 1].
fn val(seed: usize) -> f64 {
    ((seed.wrapping_mul(2654435761)) % 1000) as f64 / 500.0 - 1.0
}

/// Builds the same instance twice: once for the layout-aware steppers, once
/// for the dense baselines.
fn paired_instance(
    sizes: Vec<usize>,
    comps_per_agent: &[Vec<usize>],
    rows: usize,
) -> (LeastSquaresInstance, DenseLs) {
    let partition = Partition::new(sizes.clone()).unwrap();
    let mut ls_agents = Vec::new();
    let mut dense_agents = Vec::new();
    for (i, comps) in comps_per_agent.iter().enumerate() {
        let cols: usize = comps.iter().map(|&p| sizes[p]).sum();
        let h = DMatrix::from_fn(rows, cols, |r, c| val(i * 997 + r * 31 + c * 7));
        let b = DVector::from_fn(rows, |r, _| val(i * 499 + r * 13 + 5));
        ls_agents.push(LsAgent { components: comps.clone(), output: h.clone(), measurement: b.clone() });
        dense_agents.push(DenseAgent { comps: comps.clone(), h, b });
    }
    (
        LeastSquaresInstance::new(partition, ls_agents).unwrap(),
        DenseLs::new(sizes, dense_agents),
    )
}

fn undirected_graph(n: usize, edges: &[(usize, usize)]) -> DirectedGraph {
    let both: Vec<(usize, usize)> =
        edges.iter().flat_map(|&(u, v)| [(u, v), (v, u)]).collect();
    DirectedGraph::from_edges(0..n, both).unwrap()
}

fn uniform_operator(layout: &Arc<EndLayout>) -> StackedWeightOperator {
    let weights: Vec<WeightMatrix> = (0..layout.component_count())
        .map(|p| {
            WeightMatrix::uniform_column_stochastic(&layout.design(p).with_self_loops()).unwrap()
        })
        .collect();
    StackedWeightOperator::new(layout.clone(), weights).unwrap()
}

fn metropolis_operator(layout: &Arc<EndLayout>) -> StackedWeightOperator {
    let weights: Vec<WeightMatrix> = (0..layout.component_count())
        .map(|p| WeightMatrix::metropolis(layout.design(p)).unwrap())
        .collect();
    StackedWeightOperator::new(layout.clone(), weights).unwrap()
}

/// Max elementwise deviation between a stacked vector (standard layout: copy
/// position == agent id) and per-agent full vectors.
fn deviation(y: &StackedVector, dense: &[DVector<f64>], problem: &DenseLs) -> f64 {
    let layout = y.layout();
    let mut worst = 0.0_f64;
    for p in 0..layout.component_count() {
        for (pos, yd) in dense.iter().enumerate() {
            let diff = y.block(p, pos) - yd.rows(problem.offsets[p], problem.sizes[p]);
            worst = worst.max(diff.amax());
        }
    }
    worst
}

#[test]
fn criterion_1_standard_design_retrieves_dense_baselines() {
    let t0 = Instant::now();
    let sizes = vec![2usize, 1, 2];
    let comps: Vec<Vec<usize>> =
        vec![vec![0, 1], vec![1, 2], vec![0], vec![2], vec![0, 2]];
    let edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (1, 3)];
    let (instance, dense) = paired_instance(sizes, &comps, 3);
    let comm = undirected_graph(5, &edges);
    let interference = BipartiteGraph::from_edges(
        3,
        5,
        comps.iter().enumerate().flat_map(|(i, cs)| cs.iter().map(move |&p| (p, i))),
    )
    .unwrap();
    let layout =
        Arc::new(standard_design(&comm, &interference, instance.partition()).unwrap());
    let mut worst = 0.0_f64;

    // push-sum subgradient descent vs dense push-sum
    let op = uniform_operator(&layout);
    let w_uniform = dense_uniform(&edges, 5);
    let mut state = PushSumState::new(StackedVector::zeros(layout.clone()));
    let mut dense_ps = DensePushSum::start(&dense);
    for k in 1..=100 {
        let gamma = 0.05 * diminishing_step(k);
        state = push_sum_step(&state, &op, &instance, gamma).unwrap();
        dense_ps.step(&w_uniform, &dense, gamma);
        worst = worst.max(deviation(&state.y, &dense_ps.y, &dense));
        worst = worst.max(deviation(&state.z, &dense_ps.z, &dense));
    }

    // gradient tracking vs dense gradient tracking
    let mop = metropolis_operator(&layout);
    let w_metropolis = dense_metropolis(&edges, 5);
    let gamma = 0.9 / instance.smoothness_constant();
    let mut gt = augdgm_init(&mop, &instance).unwrap();
    let mut dense_gt = DenseTracking::start(&w_metropolis, &dense);
    for _ in 0..100 {
        gt = augdgm_step(&gt, &mop, &instance, gamma).unwrap();
        dense_gt.step(&w_metropolis, &dense, gamma);
        worst = worst.max(deviation(&gt.y, &dense_gt.y, &dense));
        worst = worst.max(deviation(&gt.v, &dense_gt.v, &dense));
    }

    // consensus ADMM vs dense consensus ADMM
    let mut admm = AdmmState::new(layout.clone(), 0.5).unwrap();
    let mut dense_admm = DenseAdmm::start(&edges, &dense, 0.5);
    for _ in 0..100 {
        admm = admm_step(&admm, &instance).unwrap();
        dense_admm.step(&dense);
        worst = worst.max(deviation(admm.estimates(), &dense_admm.y, &dense));
    }

    let dt = t0.elapsed();
    assert!(worst <= 1e-12, "criterion 1: FAIL — max deviation {worst:.3e} > 1e-12");
    assert!(dt.as_secs_f64() < 1.0, "criterion 1: FAIL — took {dt:.2?}");
    println!(
        "criterion 1: PASS — all three algorithms match dense baselines, \
         max deviation {worst:.1e} over 100 iterations ({dt:.2?})"
    );
}

#[test]
fn criterion_2_admm_converges_for_all_relaxation_steps() {
    let t0 = Instant::now();
    let comps: Vec<Vec<usize>> = (0..10)
        .map(|i| {
            let mut c = vec![i % 4, (i + 1) % 4];
            c.sort_unstable();
            c
        })
        .collect();
    let mut edges: Vec<(usize, usize)> = (0..10).map(|i| (i, (i + 1) % 10)).collect();
    edges.extend([(0, 5), (2, 7)]);
    let (instance, _) = paired_instance(vec![1; 4], &comps, 3);
    let comm = undirected_graph(10, &edges);
    let interference = BipartiteGraph::from_edges(
        4,
        10,
        comps.iter().enumerate().flat_map(|(i, cs)| cs.iter().map(move |&p| (p, i))),
    )
    .unwrap();
    let layout =
        Arc::new(standard_design(&comm, &interference, instance.partition()).unwrap());

    // centralized solution from the normal equations
    let (h, b) = instance.global_system();
    let gram = h.tr_mul(&h);
    let y_star = gram.cholesky().expect("full rank").solve(&h.tr_mul(&b));

    for alpha in [0.25, 0.5, 0.9] {
        let mut state = AdmmState::new(layout.clone(), alpha).unwrap();
        let mut hit = None;
        for k in 1..=5000 {
            state = admm_step(&state, &instance).unwrap();
            let mut err = 0.0_f64;
            for p in 0..4 {
                for pos in 0..layout.copies(p) {
                    err = err.max((state.estimates().block(p, pos)[0] - y_star[p]).abs());
                }
            }
            if err <= 1e-6 {
                hit = Some(k);
                break;
            }
        }
        assert!(
            hit.is_some(),
            "criterion 2: FAIL — alpha {alpha} did not reach 1e-6 in 5000 iterations"
        );
    }
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 5.0, "criterion 2: FAIL — took {dt:.2?}");
    println!(
        "criterion 2: PASS — all estimates within 1e-6 of the normal-equation \
         solution for alpha in {{0.25, 0.5, 0.9}} ({dt:.2?})"
    );
}

#[test]
fn criterion_3_gradient_tracking_ergodic_rate_bound() {
    let t0 = Instant::now();
    let comps: Vec<Vec<usize>> =
        vec![vec![0], vec![0, 1], vec![1], vec![1, 2], vec![2], vec![0, 2]];
    let edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 3)];
    let (instance, _) = paired_instance(vec![1, 2, 1], &comps, 3);
    let comm = undirected_graph(6, &edges);
    let interference = BipartiteGraph::from_edges(
        3,
        6,
        comps.iter().enumerate().flat_map(|(i, cs)| cs.iter().map(move |&p| (p, i))),
    )
    .unwrap();
    let layout =
        Arc::new(standard_design(&comm, &interference, instance.partition()).unwrap());
    let op = metropolis_operator(&layout);
    let gamma = 0.9 / instance.smoothness_constant();
    let matrices = augdgm_matrices(&op, gamma).unwrap();
    let report = check_abc_conditions(&matrices, &layout);
    assert!(report.all_pass(), "criterion 3: FAIL — conditions: {:?}", report.messages);

    let (y_star, f_star) = instance.reference().unwrap();
    let lifted = StackedVector::lift(layout.clone(), &y_star).unwrap();
    let grad_star = stacked_gradient(&instance, &lifted).unwrap();
    let y0 = StackedVector::zeros(layout.clone());
    let bound = abc_rate_bound(&y0, &lifted, &grad_star, &matrices, &report).unwrap();
    let reference =
        MeritReference::new(&instance, layout.clone(), y_star, f_star).unwrap();

    let mut state = AbcState::new(y0);
    let mut worst_margin = f64::NEG_INFINITY;
    for k in 1..=10_000 {
        state = abc_step(&state, &matrices, &instance).unwrap();
        let m = merit_m(&state.average(), &instance, &reference).unwrap();
        let margin = m - bound.bound(k);
        worst_margin = worst_margin.max(margin);
        assert!(
            margin <= 1e-9,
            "criterion 3: FAIL — merit {m:.3e} exceeds bound {:.3e} at k={k}",
            bound.bound(k)
        );
    }
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 10.0, "criterion 3: FAIL — took {dt:.2?}");
    println!(
        "criterion 3: PASS — ergodic merit under h/(2k) for k in [1, 1e4], \
         worst margin {worst_margin:.1e} ({dt:.2?})"
    );
}

#[test]
fn criterion_4_push_sum_time_varying_convergence() {
    let t0 = Instant::now();
    let n = 12usize;
    let p_count = 3usize;
    let comps: Vec<Vec<usize>> = (0..n).map(|i| vec![i % p_count]).collect();
    let partition = Partition::scalar(p_count).unwrap();
    let mut ls_agents = Vec::new();
    for (i, c) in comps.iter().enumerate() {
        // small outputs keep the raw k^-0.51 schedule inside the stable
        // range; measurements scaled so the initial merit still exceeds the
        // threshold while per-step subgradient injections stay small enough
        // for the consensus residual to clear 1e-3 within the budget
        let h = DMatrix::from_fn(2, 1, |r, _| 0.2 + 0.25 * (val(i * 41 + r * 17).abs()));
        let b = DVector::from_fn(2, |r, _| 0.7 * val(i * 23 + r * 11 + 3));
        ls_agents.push(LsAgent { components: c.clone(), output: h, measurement: b });
    }
    let instance = LeastSquaresInstance::new(partition.clone(), ls_agents).unwrap();
    assert!(instance.smoothness_constant() < 1.0);

    let ring: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    let comm = DirectedGraph::from_edges(0..n, ring.clone()).unwrap();
    let interference = BipartiteGraph::from_edges(
        p_count,
        n,
        comps.iter().enumerate().map(|(i, c)| (c[0], i)),
    )
    .unwrap();
    let layout = Arc::new(standard_design(&comm, &interference, &partition).unwrap());

    // three frames, each missing a third of the ring arcs but keeping all
    // self-loops; no single frame is strongly connected, yet any window of
    // three consecutive frames contains the whole ring
    let frames: Vec<DirectedGraph> = (0..3)
        .map(|f| {
            let mut edges: Vec<(usize, usize)> = (0..n).map(|i| (i, i)).collect();
            edges.extend(ring.iter().copied().filter(|&(i, _)| i % 3 != f));
            DirectedGraph::from_edges(0..n, edges).unwrap()
        })
        .collect();
    let sequence = TimeVaryingGraph::new(frames.clone()).unwrap();
    assert!(sequence.is_q_strongly_connected(3, 9).unwrap());
    assert!(frames.iter().all(|g| !g.is_strongly_connected()));

    let ops: Vec<StackedWeightOperator> = frames
        .iter()
        .map(|g| {
            let w = WeightMatrix::uniform_column_stochastic(g).unwrap();
            for u in 0..n {
                for v in 0..n {
                    let x = w.entry(u, v);
                    assert!(x == 0.0 || x >= 1.0 / n as f64);
                }
            }
            StackedWeightOperator::new(layout.clone(), vec![w; p_count]).unwrap()
        })
        .collect();

    let (y_star, f_star) = instance.reference().unwrap();
    let reference =
        MeritReference::new(&instance, layout.clone(), y_star.clone(), f_star).unwrap();

    let zbar = |v: &StackedVector| -> DVector<f64> {
        DVector::from_fn(p_count, |p, _| {
            (0..layout.copies(p)).map(|pos| v.block(p, pos)[0]).sum::<f64>()
                / layout.copies(p) as f64
        })
    };

    // first pass: find the stopping iteration and a subgradient bound valid
    // along this exact (deterministic) trajectory
    let mut state = PushSumState::new(StackedVector::zeros(layout.clone()));
    let mut l_obs = stacked_subgradient(
        &instance,
        &StackedVector::lift(layout.clone(), &zbar(&state.z)).unwrap(),
    )
    .unwrap()
    .norm();
    let mut k_hit = None;
    for k in 1..=100_000 {
        let gamma = diminishing_step(k);
        state = push_sum_step(&state, &ops[(k - 1) % 3], &instance, gamma).unwrap();
        l_obs = l_obs.max(state.g.norm());
        let lifted = StackedVector::lift(layout.clone(), &zbar(&state.z)).unwrap();
        l_obs = l_obs.max(stacked_subgradient(&instance, &lifted).unwrap().norm());
        if state.y.consensus_residual() <= 1e-3
            && merit_v(&state.y, &instance, &reference).unwrap() <= 1e-2
        {
            k_hit = Some(k);
            break;
        }
    }
    let k_hit = k_hit.expect("criterion 4: FAIL — thresholds not reached in 1e5 iterations");
    assert!(k_hit > 1, "criterion 4: FAIL — thresholds already met at the start");

    // second pass: replay with diagnostics armed
    let mut state = PushSumState::new(StackedVector::zeros(layout.clone()));
    let mut diag = PushSumDiagnostics::new(&state, y_star, f_star, 1.5 * l_obs);
    for k in 1..=k_hit {
        let gamma = diminishing_step(k);
        state = push_sum_step(&state, &ops[(k - 1) % 3], &instance, gamma).unwrap();
        diag.observe(&state, &instance, gamma).unwrap();
    }
    let max_recursion =
        diag.recursion_residuals.iter().fold(0.0_f64, |m, &r| m.max(r));
    assert!(
        max_recursion <= 1e-12,
        "criterion 4: FAIL — recursion residual {max_recursion:.3e}"
    );
    assert_eq!(
        diag.descent_violations, 0,
        "criterion 4: FAIL — descent inequality violated"
    );
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 30.0, "criterion 4: FAIL — took {dt:.2?}");
    println!(
        "criterion 4: PASS — consensus 1e-3 and merit 1e-2 at k={k_hit}, \
         zero descent violations, recursion residual {max_recursion:.1e} ({dt:.2?})"
    );
}

#[test]
fn criterion_5_customized_design_cuts_broadcast_cost() {
    let t0 = Instant::now();
    // seeds whose first draw is accepted, so the five scenarios are distinct
    // (a rejected draw retries with the incremented seed, which would make
    // neighboring seeds collapse onto the same instance)
    let seeds = [34u64, 77, 92, 112, 144];
    let base = ScenarioConfig::regression_desk(0);
    let rows = sweep(&base, &seeds, Algorithm::PushSum, StopRule::default()).unwrap();
    let mut standard_cost = 0.0;
    let mut customized_cost = 0.0;
    for r in &rows {
        assert!(
            r.iterations_to_threshold.is_some(),
            "criterion 5: FAIL — seed {} {} did not reach the merit threshold",
            r.seed,
            r.design_mode
        );
        match r.design_mode {
            "standard" => standard_cost += r.total_cost,
            _ => customized_cost += r.total_cost,
        }
    }
    let ratio = standard_cost / customized_cost;
    assert!(
        ratio >= 3.0,
        "criterion 5: FAIL — cost ratio {ratio:.2} < 3 over {} seeds",
        seeds.len()
    );
    let dt = t0.elapsed();
    println!(
        "criterion 5: PASS — customized design reaches the threshold with {ratio:.2}x \
         fewer cumulative broadcasts over {} seeds; full-scale run available behind \
         the CLI --paper-scale flag ({dt:.2?})",
        seeds.len()
    );
}

#[test]
fn criterion_6_complete_interference_makes_designs_coincide() {
    let t0 = Instant::now();
    let mut cfg = ScenarioConfig::lasso(1);
    cfg.sensing_radius = 1.41; // every source visible to every sensor
    let scenario = generate_scenario(&cfg).unwrap();
    assert!(
        scenario.interference.is_complete(),
        "criterion 6: FAIL — interference graph is not complete"
    );
    let stop = StopRule { merit_threshold: 1e-2, max_iterations: 2_000 };
    let mut traces = Vec::new();
    for design in [DesignChoice::Standard, DesignChoice::Customized] {
        let mut run = RunConfig::new(Algorithm::PushSum, design);
        run.stop = stop;
        traces.push(run_experiment(&scenario, &run).unwrap());
    }
    let (a, b) = (traces[0].to_csv(), traces[1].to_csv());
    assert_eq!(a.lines().count(), b.lines().count());
    let mut mode_lines = 0;
    for (la, lb) in a.lines().zip(b.lines()) {
        if la != lb {
            // the design-mode label is the only field naming the mode
            assert!(
                la.starts_with("# design_mode=") && lb.starts_with("# design_mode="),
                "criterion 6: FAIL — traces differ: {la:?} vs {lb:?}"
            );
            mode_lines += 1;
        }
    }
    assert_eq!(mode_lines, 1);
    assert_eq!(traces[0].rows, traces[1].rows, "criterion 6: FAIL — rows differ");
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 5.0, "criterion 6: FAIL — took {dt:.2?}");
    println!(
        "criterion 6: PASS — standard and customized traces byte-identical \
         ({} rows) apart from the mode label ({dt:.2?})",
        traces[0].rows.len()
    );
}

/// Smallest copy set containing the terminals whose induced subgraph passes
/// the connectivity predicate, by exhaustive subset search.
fn exhaustive_minimum(comm: &DirectedGraph, terminals: &[usize], strong: bool) -> usize {
    let n = comm.vertex_count();
    let others: Vec<usize> = (0..n).filter(|v| !terminals.contains(v)).collect();
    let mut best = n;
    for mask in 0u32..(1 << others.len()) {
        let mut members = terminals.to_vec();
        for (bit, &v) in others.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                members.push(v);
            }
        }
        if members.len() >= best {
            continue;
        }
        members.sort_unstable();
        let sub = comm.restrict(&members).unwrap();
        let ok = if strong {
            sub.is_strongly_connected()
        } else {
            sub.is_connected_undirected().unwrap()
        };
        if ok {
            best = members.len();
        }
    }
    best
}

#[test]
fn criterion_7_steiner_heuristics_near_optimal() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let partition = Partition::scalar(1).unwrap();
    let mut done = 0;
    while done < 25 {
        let n = rng.gen_range(4..=8);
        let pos: Vec<(f64, f64)> =
            (0..n).map(|_| (rng.gen::<f64>(), rng.gen::<f64>())).collect();
        let edges: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .filter(|&(u, v)| {
                let d = ((pos[u].0 - pos[v].0).powi(2) + (pos[u].1 - pos[v].1).powi(2)).sqrt();
                d <= 0.55
            })
            .collect();
        let comm = undirected_graph(n, &edges);
        if !comm.is_connected_undirected().unwrap() {
            continue;
        }
        let mut terminals: Vec<usize> = (0..n).filter(|_| rng.gen::<f64>() < 0.45).collect();
        if terminals.is_empty() {
            terminals.push(rng.gen_range(0..n));
        }
        let interference =
            BipartiteGraph::from_edges(1, n, terminals.iter().map(|&i| (0, i))).unwrap();
        let layout =
            steiner_design_undirected(&comm, &interference, &partition, EdgePolicy::AllAvailable)
                .unwrap();
        assert!(layout.design(0).is_connected_undirected().unwrap());
        let opt = exhaustive_minimum(&comm, &terminals, false);
        assert!(
            layout.copies(0) <= 2 * opt,
            "criterion 7: FAIL — undirected heuristic used {} copies, optimum {opt}",
            layout.copies(0)
        );
        done += 1;
    }
    done = 0;
    while done < 25 {
        let n = rng.gen_range(4..=8);
        let pos: Vec<(f64, f64)> =
            (0..n).map(|_| (rng.gen::<f64>(), rng.gen::<f64>())).collect();
        let radii: Vec<f64> = (0..n).map(|_| 0.35 + 0.45 * rng.gen::<f64>()).collect();
        let edges: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (0..n).map(move |v| (u, v)))
            .filter(|&(u, v)| {
                let d = ((pos[u].0 - pos[v].0).powi(2) + (pos[u].1 - pos[v].1).powi(2)).sqrt();
                u != v && d <= radii[u]
            })
            .collect();
        let comm = DirectedGraph::from_edges(0..n, edges).unwrap();
        if !comm.is_strongly_connected() {
            continue;
        }
        let mut terminals: Vec<usize> = (0..n).filter(|_| rng.gen::<f64>() < 0.45).collect();
        if terminals.is_empty() {
            terminals.push(rng.gen_range(0..n));
        }
        let interference =
            BipartiteGraph::from_edges(1, n, terminals.iter().map(|&i| (0, i))).unwrap();
        let layout = steiner_design_directed(&comm, &interference, &partition).unwrap();
        assert!(layout.design(0).is_strongly_connected());
        let opt = exhaustive_minimum(&comm, &terminals, true);
        assert!(
            layout.copies(0) <= 2 * opt,
            "criterion 7: FAIL — directed heuristic used {} copies, optimum {opt}",
            layout.copies(0)
        );
        done += 1;
    }
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 10.0, "criterion 7: FAIL — took {dt:.2?}");
    println!(
        "criterion 7: PASS — 50 random instances within 2x of exhaustive optima, \
         all designs pass their connectivity predicate ({dt:.2?})"
    );
}

#[test]
fn criterion_8_no_reads_outside_design_neighborhoods() {
    let t0 = Instant::now();
    let scenario = generate_scenario(&ScenarioConfig::regression_desk(34)).unwrap();
    let ScenarioProblem::LeastSquares(instance) = &scenario.problem else {
        panic!("regression scenario is least squares")
    };
    let n = scenario.config.agents;

    // directed sparse layout for push-sum
    let directed = Arc::new(
        steiner_design_directed(&scenario.comm, &scenario.interference, &scenario.partition)
            .unwrap(),
    );
    // undirected sparse layout for the other two
    let mutual = scenario.comm.mutual_edges();
    assert!(mutual.is_connected_undirected().unwrap());
    let undirected = Arc::new(
        steiner_design_undirected(
            &mutual,
            &scenario.interference,
            &scenario.partition,
            EdgePolicy::AllAvailable,
        )
        .unwrap(),
    );
    for layout in [&directed, &undirected] {
        assert!(
            (0..layout.component_count()).any(|p| layout.copies(p) < n),
            "layout is not sparse; the locality check would be vacuous"
        );
    }

    let mut violations = 0usize;
    let mut reads = 0usize;
    {
        let layout = directed.clone();
        let mut hook = |reader: usize, p: usize, owner: usize| {
            reads += 1;
            if owner != reader && !layout.design(p).has_edge(owner, reader) {
                violations += 1;
            }
        };
        let op = uniform_operator(&directed);
        let scale = 1.0 / instance.smoothness_constant();
        let mut state = PushSumState::new(StackedVector::zeros(directed.clone()));
        for k in 1..=1000 {
            let gamma = scale * diminishing_step(k);
            state = push_sum_step_with_hook(&state, &op, instance, gamma, &mut hook).unwrap();
        }
    }
    {
        let layout = undirected.clone();
        let mut hook = |reader: usize, p: usize, owner: usize| {
            reads += 1;
            if owner != reader && !layout.design(p).has_edge(owner, reader) {
                violations += 1;
            }
        };
        let op = metropolis_operator(&undirected);
        let gamma = 0.9 / instance.smoothness_constant();
        let mut state = augdgm_init(&op, instance).unwrap();
        for _ in 0..1000 {
            state = augdgm_step_with_hook(&state, &op, instance, gamma, &mut hook).unwrap();
        }
    }
    {
        let layout = undirected.clone();
        let mut hook = |reader: usize, p: usize, owner: usize| {
            reads += 1;
            if owner != reader && !layout.design(p).has_edge(owner, reader) {
                violations += 1;
            }
        };
        let mut state = AdmmState::new(undirected.clone(), 0.5).unwrap();
        for _ in 0..1000 {
            state = admm_step_with_hook(&state, instance, &mut hook).unwrap();
        }
    }

    assert!(reads > 0);
    assert_eq!(
        violations, 0,
        "criterion 8: FAIL — {violations} reads outside design neighborhoods"
    );
    let dt = t0.elapsed();
    println!(
        "criterion 8: PASS — {reads} instrumented reads across 3 algorithms x 1000 \
         iterations, zero outside design neighborhoods ({dt:.2?})"
    );
}
