mod common;

use approx::assert_abs_diff_eq;
use common::{brute_force_assignment, euclid, random_vec, rng, space};
use rand::seq::SliceRandom;
use rand::Rng;
use reffree::transport::{cost_matrix, solve_wmd, wmd, CostMatrix};
use reffree::vecspace::{ngramize, EmbeddedToken, NgramSequence};
use reffree::Error;

fn seq(vectors: &[Vec<f64>], idf: &[f64]) -> NgramSequence {
    let tokens: Vec<EmbeddedToken> = vectors
        .iter()
        .zip(idf)
        .enumerate()
        .map(|(i, (v, w))| EmbeddedToken {
            token: format!("w{i}"),
            vector: v.clone(),
            idf: *w,
        })
        .collect();
    NgramSequence::from_embedded(&tokens, 1).unwrap()
}

/// Northwest-corner plan after permuting rows and columns: always feasible.
fn random_feasible_plan(fx: &[f64], fy: &[f64], rng: &mut impl Rng) -> Vec<f64> {
    let mut rows: Vec<usize> = (0..fx.len()).collect();
    let mut cols: Vec<usize> = (0..fy.len()).collect();
    rows.shuffle(rng);
    cols.shuffle(rng);
    let mut supply = fx.to_vec();
    let mut demand = fy.to_vec();
    let mut plan = vec![0.0; fx.len() * fy.len()];
    let (mut a, mut b) = (0, 0);
    while a < rows.len() && b < cols.len() {
        let (i, j) = (rows[a], cols[b]);
        let f = supply[i].min(demand[j]);
        plan[i * fy.len() + j] = f;
        supply[i] -= f;
        demand[j] -= f;
        if supply[i] <= demand[j] {
            a += 1;
        } else {
            b += 1;
        }
    }
    plan
}

#[test]
fn cost_matrix_examples() {
    let s = space(2, &[("a", &[1.0, 0.0]), ("b", &[0.0, 1.0])]);
    let a = ngramize(&["a"], &s, 1).unwrap();
    let b = ngramize(&["b"], &s, 1).unwrap();
    assert_eq!(cost_matrix(&a, &a).unwrap().as_slice(), &[0.0]);
    assert_abs_diff_eq!(cost_matrix(&a, &b).unwrap().get(0, 0), 2f64.sqrt(), epsilon = 1e-15);
}

#[test]
fn cost_matrix_matches_double_loop() {
    let mut r = rng(1);
    let xs: Vec<Vec<f64>> = (0..2).map(|_| random_vec(4, &mut r)).collect();
    let ys: Vec<Vec<f64>> = (0..3).map(|_| random_vec(4, &mut r)).collect();
    let c = cost_matrix(&seq(&xs, &[1.0; 2]), &seq(&ys, &[1.0; 3])).unwrap();
    assert_eq!((c.rows(), c.cols()), (2, 3));
    for (i, x) in xs.iter().enumerate() {
        for (j, y) in ys.iter().enumerate() {
            assert_abs_diff_eq!(c.get(i, j), euclid(x, y), epsilon = 1e-15);
        }
    }
}

#[test]
fn cost_matrix_dimension_mismatch() {
    let a = seq(&[vec![0.0, 1.0]], &[1.0]);
    let b = seq(&[vec![0.0, 1.0, 2.0]], &[1.0]);
    assert!(matches!(cost_matrix(&a, &b), Err(Error::DimensionMismatch { .. })));
}

#[test]
fn trivial_plans() {
    let c = CostMatrix::new(1, 1, vec![0.0]).unwrap();
    assert_eq!(solve_wmd(&c, &[1.0], &[1.0]).unwrap().objective(), 0.0);

    let c = CostMatrix::new(2, 2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
    let p = solve_wmd(&c, &[0.5, 0.5], &[0.5, 0.5]).unwrap();
    assert_eq!(p.objective(), 0.0);
    assert_eq!((p.get(0, 0), p.get(0, 1), p.get(1, 0), p.get(1, 1)), (0.5, 0.0, 0.0, 0.5));
}

#[test]
fn invalid_marginals() {
    let c = CostMatrix::new(1, 2, vec![0.0, 1.0]).unwrap();
    assert!(matches!(solve_wmd(&c, &[1.0], &[0.5, 0.4]), Err(Error::MarginalMismatch { .. })));
    assert!(matches!(solve_wmd(&c, &[1.0], &[1.5, -0.5]), Err(Error::InvalidWeight(_))));
    assert!(matches!(solve_wmd(&c, &[1.0], &[1.0]), Err(Error::LengthMismatch { .. })));
    assert!(CostMatrix::new(1, 1, vec![-1.0]).is_err());
    assert!(CostMatrix::new(1, 2, vec![0.0]).is_err());
}

#[test]
fn singleton_against_many() {
    let mut r = rng(2);
    for _ in 0..50 {
        let x = vec![random_vec(3, &mut r)];
        let ys: Vec<Vec<f64>> = (0..4).map(|_| random_vec(3, &mut r)).collect();
        let w: Vec<f64> = (0..4).map(|_| r.random_range(0.1..2.0)).collect();
        let a = seq(&x, &[1.0]);
        let b = seq(&ys, &w);
        let expect: f64 = b.weights().iter().zip(&ys).map(|(f, y)| f * euclid(&x[0], y)).sum();
        assert_abs_diff_eq!(wmd(&a, &b).unwrap(), expect, epsilon = 1e-12);
    }
}

#[test]
fn zero_weight_rows_get_no_flow() {
    let c = CostMatrix::new(3, 2, vec![0.0, 5.0, 1.0, 1.0, 5.0, 0.0]).unwrap();
    let p = solve_wmd(&c, &[0.5, 0.0, 0.5], &[0.5, 0.5]).unwrap();
    assert_eq!(p.get(1, 0) + p.get(1, 1), 0.0);
    assert_eq!(p.objective(), 0.0);
}

#[test]
fn brute_force_uniform_instances() {
    let mut r = rng(3);
    for _ in 0..200 {
        let n = r.random_range(1..=5);
        let cost: Vec<f64> = (0..n * n).map(|_| r.random_range(0.0..10.0)).collect();
        let c = CostMatrix::new(n, n, cost.clone()).unwrap();
        let w = vec![1.0 / n as f64; n];
        let got = solve_wmd(&c, &w, &w).unwrap().objective();
        assert_abs_diff_eq!(got, brute_force_assignment(&cost, n), epsilon = 1e-9);
    }
}

#[test]
fn never_worse_than_random_feasible_plans() {
    let mut r = rng(4);
    for _ in 0..20 {
        let (m, n) = (r.random_range(1..=6), r.random_range(1..=6));
        let cost: Vec<f64> = (0..m * n).map(|_| r.random_range(0.0..3.0)).collect();
        let mut fx: Vec<f64> = (0..m).map(|_| r.random_range(0.01..1.0)).collect();
        let mut fy: Vec<f64> = (0..n).map(|_| r.random_range(0.01..1.0)).collect();
        let (sx, sy): (f64, f64) = (fx.iter().sum(), fy.iter().sum());
        fx.iter_mut().for_each(|x| *x /= sx);
        fy.iter_mut().for_each(|y| *y /= sy);
        let c = CostMatrix::new(m, n, cost.clone()).unwrap();
        let opt = solve_wmd(&c, &fx, &fy).unwrap().objective();
        for _ in 0..1000 {
            let plan = random_feasible_plan(&fx, &fy, &mut r);
            let obj: f64 = plan.iter().zip(&cost).map(|(f, c)| f * c).sum();
            assert!(opt <= obj + 1e-9, "{opt} > {obj}");
        }
    }
}

#[test]
fn plan_is_feasible_and_objective_consistent() {
    let mut r = rng(5);
    for _ in 0..100 {
        let (m, n) = (r.random_range(1..=8), r.random_range(1..=8));
        let xs: Vec<Vec<f64>> = (0..m).map(|_| random_vec(5, &mut r)).collect();
        let ys: Vec<Vec<f64>> = (0..n).map(|_| random_vec(5, &mut r)).collect();
        let a = seq(&xs, &(0..m).map(|_| r.random_range(0.0..2.0)).collect::<Vec<_>>());
        let b = seq(&ys, &(0..n).map(|_| r.random_range(0.0..2.0)).collect::<Vec<_>>());
        let c = cost_matrix(&a, &b).unwrap();
        let p = solve_wmd(&c, a.weights(), b.weights()).unwrap();
        for (s, f) in p.row_sums().iter().zip(a.weights()) {
            assert_abs_diff_eq!(*s, *f, epsilon = 1e-9);
        }
        for (s, f) in p.col_sums().iter().zip(b.weights()) {
            assert_abs_diff_eq!(*s, *f, epsilon = 1e-9);
        }
        let mut obj = 0.0;
        for i in 0..m {
            for j in 0..n {
                assert!(p.get(i, j) >= 0.0);
                obj += p.get(i, j) * c.get(i, j);
            }
        }
        assert_abs_diff_eq!(obj, p.objective(), epsilon = 1e-9);
    }
}

#[test]
fn degenerate_ties_terminate() {
    // Every entry equal: every feasible plan is optimal and most pivots are degenerate.
    for n in 1..=12 {
        let c = CostMatrix::new(n, n, vec![1.0; n * n]).unwrap();
        let w = vec![1.0 / n as f64; n];
        assert_abs_diff_eq!(solve_wmd(&c, &w, &w).unwrap().objective(), 1.0, epsilon = 1e-12);
    }
}

#[test]
fn larger_instances_solve() {
    let mut r = rng(6);
    let xs: Vec<Vec<f64>> = (0..150).map(|_| random_vec(16, &mut r)).collect();
    let ys: Vec<Vec<f64>> = (0..120).map(|_| random_vec(16, &mut r)).collect();
    let a = seq(&xs, &vec![1.0; 150]);
    let b = seq(&ys, &vec![1.0; 120]);
    let ab = wmd(&a, &b).unwrap();
    let ba = wmd(&b, &a).unwrap();
    assert_abs_diff_eq!(ab, ba, epsilon = 1e-9);
    assert_eq!(wmd(&a, &a).unwrap(), 0.0);
}
