use bellforge_sdp::{solve, SdpOptions, SdpProblem, SdpStatus, SparseSym};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn trace_one(n: usize) -> SparseSym {
    let mut a = SparseSym::new();
    for i in 0..n {
        a.push(0, i, i, 1.0);
    }
    a
}

#[test]
fn largest_eigenvalue_of_pauli_x() {
    let mut p = SdpProblem::new(vec![2]);
    p.objective.push(0, 0, 1, 1.0);
    p.add_constraint(trace_one(2), 1.0);
    let sol = solve(&p, &SdpOptions::default()).unwrap();
    assert_eq!(sol.status, SdpStatus::Optimal);
    assert!((sol.primal_objective - 1.0).abs() < 1e-7);
    assert!((sol.dual_objective - 1.0).abs() < 1e-7);
}

#[test]
fn two_blocks_pick_the_better_one() {
    // max 2 x_a + 3 x_b with x_a + x_b = 1 written as two 1x1 blocks
    let mut p = SdpProblem::new(vec![1, 1]);
    p.objective.push(0, 0, 0, 2.0);
    p.objective.push(1, 0, 0, 3.0);
    let mut a = SparseSym::new();
    a.push(0, 0, 0, 1.0);
    a.push(1, 0, 0, 1.0);
    p.add_constraint(a, 1.0);
    let sol = solve(&p, &SdpOptions::default()).unwrap();
    assert_eq!(sol.status, SdpStatus::Optimal);
    assert!((sol.primal_objective - 3.0).abs() < 1e-7);
}

#[test]
fn redundant_rows_keep_dual_indexing() {
    let mut p = SdpProblem::new(vec![2]);
    p.objective.push(0, 0, 1, 1.0);
    p.add_constraint(trace_one(2), 1.0);
    let mut twice = SparseSym::new();
    twice.push(0, 0, 0, 2.0);
    twice.push(0, 1, 1, 2.0);
    p.add_constraint(twice, 2.0);
    let sol = solve(&p, &SdpOptions::default()).unwrap();
    assert_eq!(sol.status, SdpStatus::Optimal);
    assert_eq!(sol.y.len(), 2);
    assert!((sol.primal_objective - 1.0).abs() < 1e-7);
}

#[test]
fn detects_primal_infeasibility() {
    // X ⪰ 0 with X_00 = -1
    let mut p = SdpProblem::new(vec![2]);
    p.objective.push(0, 0, 1, 1.0);
    let mut a = SparseSym::new();
    a.push(0, 0, 0, 1.0);
    p.add_constraint(a, -1.0);
    let sol = solve(&p, &SdpOptions::default()).unwrap();
    assert_eq!(sol.status, SdpStatus::PrimalInfeasible);
}

#[test]
fn detects_unbounded_primal() {
    // max X_11 with only X_00 = 1 fixed
    let mut p = SdpProblem::new(vec![2]);
    p.objective.push(0, 1, 1, 1.0);
    let mut a = SparseSym::new();
    a.push(0, 0, 0, 1.0);
    p.add_constraint(a, 1.0);
    let sol = solve(&p, &SdpOptions::default()).unwrap();
    assert_eq!(sol.status, SdpStatus::DualInfeasible);
}

#[test]
fn max_cut_of_triangle() {
    // relaxation of max-cut on the triangle: ½Σ_edges (1 - X_ij) peaks at 9/4
    let mut p = SdpProblem::new(vec![3]);
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        p.objective.push(0, i, j, -0.25);
    }
    for i in 0..3 {
        let mut a = SparseSym::new();
        a.push(0, i, i, 1.0);
        p.add_constraint(a, 1.0);
    }
    let sol = solve(&p, &SdpOptions::default()).unwrap();
    assert_eq!(sol.status, SdpStatus::Optimal);
    // the constant 3/2 is not part of the objective
    assert!((sol.primal_objective + 1.5 - 2.25).abs() < 1e-7);
}

fn random_symmetric(n: usize, vals: &[f64]) -> DMatrix<f64> {
    let m = DMatrix::from_iterator(n, n, vals.iter().copied());
    (&m + m.transpose()) * 0.5
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    // max tr(C X) over density matrices equals the top eigenvalue of C
    #[test]
    fn top_eigenvalue_matches(n in 1usize..6, vals in prop::collection::vec(-1.0f64..1.0, 36)) {
        let cm = random_symmetric(n, &vals[..n * n]);
        let mut p = SdpProblem::new(vec![n]);
        p.objective.push_dense(0, &cm, 1.0);
        p.add_constraint(trace_one(n), 1.0);
        let sol = solve(&p, &SdpOptions::default()).unwrap();
        prop_assert_eq!(sol.status, SdpStatus::Optimal);
        let top = cm.symmetric_eigenvalues().max();
        prop_assert!((sol.primal_objective - top).abs() < 1e-6);
        prop_assert!(sol.x.min_eigenvalue() > -1e-9);
        prop_assert!(sol.z.min_eigenvalue() > -1e-9);
    }
}
