mod common;

use common::{exact_optimum, grid_optimum, kkt_violation, SmallProblem};
use ldp::svm::{
    dual_objective, solve_dual, train_binary, GramMatrix, KernelSpec, MulticlassModel, SmoParams, SvmModel,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-3;

fn solve(p: &SmallProblem) -> f64 {
    let gram = GramMatrix::compute(&p.x, &p.kernel);
    let sol = solve_dual(&gram, &p.y, p.c, &SmoParams::default()).unwrap();
    assert!(sol.converged);
    dual_objective(&gram, &p.y, p.c, &sol.alphas).unwrap()
}

#[test]
fn oracles_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut checked = 0;
    while checked < 20 {
        let p = SmallProblem::random(&mut rng);
        if p.x.len() > 4 {
            continue;
        }
        let grid = grid_optimum(&p);
        let exact = exact_optimum(&p);
        assert!(grid <= exact + 1e-9, "grid {grid} above exact {exact}");
        assert!(exact - grid < 0.05 * p.c.max(1.0), "grid {grid} far below exact {exact}");
        checked += 1;
    }
}

#[test]
fn solver_reaches_brute_force_optimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..50 {
        let p = SmallProblem::random(&mut rng);
        let got = solve(&p);
        let exact = exact_optimum(&p);
        assert!(got >= exact - TOL, "n={} {:?} c={}: {got} < {exact}", p.x.len(), p.kernel, p.c);
        assert!(got <= exact + 1e-9, "solver {got} beats the optimum {exact}");
        if p.x.len() <= 4 {
            let grid = grid_optimum(&p);
            assert!(got >= grid - 1e-4, "{got} < grid {grid}");
        }
    }
}

#[test]
fn kkt_holds_on_trained_models() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..50 {
        let p = SmallProblem::random(&mut rng);
        let model = train_binary(&p.x, &p.y, p.kernel, p.c, &SmoParams::default()).unwrap();
        assert!(kkt_violation(&model, &p.x, &p.y) <= TOL + 1e-9);
    }
    for _ in 0..10 {
        let n = rng.gen_range(20..120);
        let x: Vec<Vec<f64>> = (0..n).map(|_| (0..5).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        let y: Vec<f64> = x.iter().map(|r| if r[0] + 0.3 * r[1] * r[2] > 0.0 { 1.0 } else { -1.0 }).collect();
        if y.iter().all(|&v| v == y[0]) {
            continue;
        }
        for kernel in [KernelSpec::Linear, KernelSpec::gaussian(0.5).unwrap()] {
            for c in [0.01, 1.0, 100.0] {
                let model = train_binary(&x, &y, kernel, c, &SmoParams::default()).unwrap();
                let v = kkt_violation(&model, &x, &y);
                assert!(v <= TOL + 1e-9, "{kernel} c={c}: {v}");
            }
        }
    }
}

#[test]
fn multiclass_pair_models_satisfy_kkt() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let centres = [[0.0, 0.0], [3.0, 0.0], [0.0, 3.0], [3.0, 3.0]];
    let mut x = Vec::new();
    let mut labels = Vec::new();
    for (k, c) in centres.iter().enumerate() {
        for _ in 0..15 {
            x.push(vec![c[0] + rng.gen_range(-1.2..1.2), c[1] + rng.gen_range(-1.2..1.2)]);
            labels.push(k);
        }
    }
    let kernel = KernelSpec::gaussian(1.0).unwrap();
    let model = MulticlassModel::train(&x, &labels, 4, kernel, 1.0, &SmoParams::default()).unwrap();
    for (&(a, b), m) in model.pairs.iter().zip(&model.models) {
        let idx: Vec<usize> = (0..x.len()).filter(|&i| labels[i] == a || labels[i] == b).collect();
        let xs: Vec<Vec<f64>> = idx.iter().map(|&i| x[i].clone()).collect();
        let ys: Vec<f64> = idx.iter().map(|&i| if labels[i] == b { 1.0 } else { -1.0 }).collect();
        assert!(kkt_violation(m, &xs, &ys) <= TOL + 1e-9, "pair ({a}, {b})");
    }
    let correct = x.iter().zip(&labels).filter(|(r, &l)| model.predict(r).unwrap() == l).count();
    assert!(correct as f64 / x.len() as f64 > 0.8);
}

#[test]
fn model_text_round_trip_preserves_decisions() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let x: Vec<Vec<f64>> = (0..40).map(|_| vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]).collect();
    let y: Vec<f64> = x.iter().map(|r| if r[0] * r[1] > 0.0 { 1.0 } else { -1.0 }).collect();
    let model = train_binary(&x, &y, KernelSpec::gaussian(2.0).unwrap(), 10.0, &SmoParams::default()).unwrap();
    let back = SvmModel::from_text(&model.to_text(), &x).unwrap();
    assert_eq!(back, model);
    for r in &x {
        assert_eq!(back.decision(r).unwrap(), model.decision(r).unwrap());
    }
}

#[test]
fn separable_sets_reach_hard_margin() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    for _ in 0..20 {
        let w: [f64; 2] = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let mut x = Vec::new();
        let mut y = Vec::new();
        while x.len() < 30 {
            let p: Vec<f64> = vec![rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
            let s = w[0] * p[0] + w[1] * p[1] + 0.1;
            if s.abs() > 0.2 {
                y.push(s.signum());
                x.push(p);
            }
        }
        if y.iter().all(|&v| v == y[0]) {
            continue;
        }
        let model = train_binary(&x, &y, KernelSpec::Linear, 1e6, &SmoParams::default()).unwrap();
        for (r, &label) in x.iter().zip(&y) {
            assert!(label * model.decision(r).unwrap() >= 1.0 - TOL);
        }
        assert!(kkt_violation(&model, &x, &y) <= TOL + 1e-9);
    }
}
