use proptest::prelude::*;

use subrgf::data::{parse_libsvm_str, write_libsvm, LabeledDataset};
use subrgf::optim::{
    minibatch_step, run, step_size, subspace_step_with_sketch, Budget, Method, RunConfig, ScheduleConfig, SubspaceSketch,
    TheoryInputs,
};
use subrgf::par::Execution;
use subrgf::problems::{EllipsoidalFeasibleSet, InnerSettings, ProjectionMetric, RobustLogisticProblem, SoftmaxL1Problem};
use subrgf::{BlackBoxObjective, DenseVector, Objective, RngStream, SparseMatrix};

fn dense_matrix(rows: usize, cols: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![3 => Just(0.0), 2 => -5.0..5.0f64], rows * cols)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sparse_product_matches_dense(rows in 1usize..8, cols in 1usize..8, seed in any::<u64>()) {
        let mut rng = RngStream::new(seed, 0);
        let data: Vec<f64> = (0..rows * cols).map(|_| if rng.uniform() < 0.5 { 0.0 } else { rng.standard_normal() }).collect();
        let w = rng.normal_vec(cols);
        let m = SparseMatrix::from_dense(rows, cols, &data).unwrap();
        prop_assert_eq!(m.nnz(), data.iter().filter(|v| **v != 0.0).count());
        let mut out = vec![0.0; rows];
        m.mul_vec(&w, &mut out);
        for r in 0..rows {
            let expected: f64 = (0..cols).map(|c| data[r * cols + c] * w[c]).sum();
            prop_assert!((out[r] - expected).abs() <= 1e-12 * (1.0 + expected.abs()));
            let (idx, _) = m.row(r);
            prop_assert!(idx.windows(2).all(|p| p[0] < p[1]));
        }
    }

    #[test]
    fn libsvm_round_trip(data in dense_matrix(4, 6), labels in prop::collection::vec(-3i32..3, 4)) {
        let features = SparseMatrix::from_dense(4, 6, &data).unwrap();
        let ds = LabeledDataset::new(features, labels.iter().map(|&l| l as f64).collect(), "prop");
        let mut buf = Vec::new();
        write_libsvm(&ds, &mut buf).unwrap();
        let back = parse_libsvm_str(std::str::from_utf8(&buf).unwrap(), Some(6)).unwrap();
        prop_assert_eq!(back.features, ds.features);
        prop_assert_eq!(back.labels, ds.labels);
    }

    #[test]
    fn subspace_step_stays_in_the_sketch_span(n in 4usize..20, seed in any::<u64>()) {
        let d = 1 + (seed as usize % (n - 1));
        let mut rng = RngStream::new(seed, 1);
        let obj = BlackBoxObjective::from_fn(n, |x: &[f64]| x.iter().map(|v| v.abs()).sum::<f64>() + x[0] * x[0]);
        let x = DenseVector::new(rng.normal_vec(n)).unwrap();
        let sketch = SubspaceSketch::gaussian(n, d, &mut rng).unwrap();
        let next = subspace_step_with_sketch(&obj, &x, 0.3, 1e-4, &sketch, &RngStream::new(seed, 2)).unwrap();
        let diff: Vec<f64> = next.iter().zip(x.iter()).map(|(a, b)| a - b).collect();
        // least-squares residual of diff against the columns of P
        let p = nalgebra::DMatrix::from_row_slice(n, d, sketch.matrix());
        let v = nalgebra::DVector::from_vec(diff);
        let coef = (p.transpose() * &p).cholesky().unwrap().solve(&(p.transpose() * &v));
        let residual = (&p * coef - &v).norm();
        prop_assert!(residual <= 1e-9 * (1.0 + v.norm()), "residual {residual}");
    }

    #[test]
    fn step_size_scales_with_inverse_root_of_budget(n in 1usize..10_000, d in 1usize..64, big_n in 1u64..1_000_000) {
        let t = TheoryInputs::new(1.7, 0.4, 0.05);
        let a = step_size(n, d, &t, big_n);
        prop_assert_eq!(a, step_size(n, d, &t, big_n));
        let ratio = a / step_size(n, d, &t, 4 * big_n);
        prop_assert!((ratio - 2.0).abs() <= 1e-14);
    }

    #[test]
    fn softmax_is_midpoint_convex(seed in any::<u64>()) {
        let mut rng = RngStream::new(seed, 3);
        let (m, p, c) = (6, 4, 3);
        let data: Vec<f64> = rng.normal_vec(m * p);
        let labels: Vec<usize> = (0..m).map(|i| i % c).collect();
        let prob = SoftmaxL1Problem::new(SparseMatrix::from_dense(m, p, &data).unwrap(), labels, c, 1e-3).unwrap();
        let a: Vec<f64> = rng.normal_vec(prob.dim()).iter().map(|v| 3.0 * v).collect();
        let b: Vec<f64> = rng.normal_vec(prob.dim()).iter().map(|v| 3.0 * v).collect();
        let mid: Vec<f64> = a.iter().zip(&b).map(|(x, y)| 0.5 * (x + y)).collect();
        let (fa, fb, fm) = (prob.value(&a).unwrap(), prob.value(&b).unwrap(), prob.value(&mid).unwrap());
        prop_assert!(fm <= 0.5 * (fa + fb) + 1e-10);
    }

    #[test]
    fn projection_lands_in_the_set(
        theta_norm in 0.01f64..100.0,
        delta in 0.0f64..2.0,
        alpha in -50.0f64..50.0,
        beta in prop::collection::vec(-5.0f64..5.0, 1..6),
    ) {
        let set = EllipsoidalFeasibleSet::new(theta_norm, delta).unwrap();
        for metric in [ProjectionMetric::Scaled, ProjectionMetric::Euclidean] {
            let (a, b) = set.project(alpha, &beta, metric);
            prop_assert!(set.gauge(a, &b) <= delta * delta * (1.0 + 1e-9) + 1e-300);
            let (a2, b2) = set.project(a, &b, metric);
            prop_assert!((a2 - a).abs() <= 1e-9 * (1.0 + a.abs()));
            prop_assert!(b2.iter().zip(&b).all(|(x, y)| (x - y).abs() <= 1e-9 * (1.0 + y.abs())));
        }
    }
}

fn tiny_robust() -> RobustLogisticProblem {
    let mut rng = RngStream::new(11, 0);
    let (m, p) = (10, 6);
    let data = rng.normal_vec(m * p);
    let labels: Vec<i64> = (0..m).map(|i| if i % 3 == 0 { -1 } else { 1 }).collect();
    RobustLogisticProblem::new(SparseMatrix::from_dense(m, p, &data).unwrap(), &labels, 1e-3, 0.1, InnerSettings::default())
        .unwrap()
}

#[test]
fn robust_counter_counts_outer_evaluations_only() {
    let obj = BlackBoxObjective::new(tiny_robust());
    let theta = RngStream::new(1, 1).normal_vec(7);
    for k in 1..=5 {
        obj.eval(&theta).unwrap();
        assert_eq!(obj.calls(), k);
    }
    let mut rng = RngStream::new(1, 2);
    let sketch = SubspaceSketch::gaussian(7, 3, &mut rng).unwrap();
    obj.eval_sketched(&theta, &sketch, &[0.1, -0.2, 0.3]).unwrap();
    assert_eq!(obj.calls(), 6);
}

#[test]
fn subspace_inner_solution_is_feasible() {
    let prob = tiny_robust();
    for seed in 0..20 {
        let mut rng = RngStream::new(seed, 5);
        let theta = rng.normal_vec(7);
        let sketch = SubspaceSketch::gaussian(7, 3, &mut rng).unwrap();
        let u = rng.normal_vec(3);
        let sol = prob.subspace_inner(&theta, &sketch, &u).unwrap();
        let set = EllipsoidalFeasibleSet::new(theta.iter().map(|v| v * v).sum::<f64>().sqrt(), prob.delta()).unwrap();
        assert!(set.gauge(sol.alpha, &sol.beta) <= prob.delta().powi(2) * (1.0 + 1e-9));
    }
}

#[test]
fn runs_are_reproducible_and_execution_invariant() {
    let obj = BlackBoxObjective::new(tiny_robust());
    let x0 = DenseVector::zeros(7);
    let mut traces = Vec::new();
    for exec in [Execution::Sequential, Execution::Parallel, Execution::Sequential] {
        let mut cfg = RunConfig::new(Method::subspace(3), ScheduleConfig::constant(0.1, 1e-6), Budget::iterations(15));
        cfg.batch = 4;
        cfg.exec = exec;
        let t = run(&obj, &x0, &cfg, &RngStream::new(42, 0)).unwrap();
        traces.push(t.records.iter().map(|r| (r.iteration, r.oracle_calls, r.value, r.best_value)).collect::<Vec<_>>());
    }
    assert_eq!(traces[0], traces[1]);
    assert_eq!(traces[0], traces[2]);
}

#[test]
fn minibatch_of_one_matches_the_single_direction_step() {
    let n = 9;
    let obj = BlackBoxObjective::from_fn(n, |x: &[f64]| x.iter().map(|v| (v - 0.5).abs()).sum());
    let x = DenseVector::new(RngStream::new(3, 0).normal_vec(n)).unwrap();
    let rng = RngStream::new(3, 1);
    let a = minibatch_step(&obj, &x, 0.2, 1e-5, 1, &Method::subspace(4), Execution::Sequential, &rng).unwrap();
    let b = minibatch_step(&obj, &x, 0.2, 1e-5, 1, &Method::subspace(4), Execution::Parallel, &rng).unwrap();
    assert_eq!(a, b);
}
