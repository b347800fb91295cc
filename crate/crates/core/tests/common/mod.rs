//! Random instances and brute-force oracles shared by the integration
//! suites.
#![allow(dead_code)]

use ldp::graph::Graph;
use ldp::svm::{kernel_eval, KernelSpec, SvmModel};
use rand::seq::SliceRandom;
use rand::Rng;

/// Graph on `1..=max_nodes` nodes with a random edge density; labels
/// `0..3` when `labelled`.
pub fn random_graph<R: Rng>(rng: &mut R, max_nodes: usize, labelled: bool) -> Graph {
    let n = rng.gen_range(1..=max_nodes);
    let p: f64 = rng.gen_range(0.0..1.0);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    let labels = labelled.then(|| (0..n).map(|_| rng.gen_range(0..3)).collect());
    Graph::from_edges(n, edges, labels, 0).unwrap()
}

pub fn random_permutation<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

pub fn adjacency_matrix(g: &Graph) -> Vec<Vec<bool>> {
    let n = g.node_count();
    let mut m = vec![vec![false; n]; n];
    for (u, v) in g.edges() {
        m[u][v] = true;
        m[v][u] = true;
    }
    m
}

/// `(deg, min, max, mean, population std, sum)` of node `v`, recomputed
/// from the adjacency matrix with two-pass floating-point statistics.
pub fn profile_oracle(m: &[Vec<bool>], v: usize) -> [f64; 6] {
    let deg = |u: usize| m[u].iter().filter(|&&e| e).count() as f64;
    let dn: Vec<f64> = (0..m.len()).filter(|&u| m[v][u]).map(deg).collect();
    if dn.is_empty() {
        return [deg(v), 0.0, 0.0, 0.0, 0.0, 0.0];
    }
    let k = dn.len() as f64;
    let sum: f64 = dn.iter().sum();
    let mean = sum / k;
    let var = dn.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / k;
    let min = dn.iter().copied().fold(f64::INFINITY, f64::min);
    let max = dn.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    [deg(v), min, max, mean, var.sqrt(), sum]
}

/// Frequencies over cells `[k/b, (k+1)/b)`, the last cell closed.
pub fn histogram_oracle(values: &[f64], bins: usize) -> Vec<f64> {
    let mut out = vec![0.0; bins];
    if values.is_empty() {
        return out;
    }
    for &x in values {
        let cell = (0..bins).rev().find(|&k| k as f64 / bins as f64 <= x).unwrap();
        out[cell] += 1.0;
    }
    out.iter().map(|c| c / values.len() as f64).collect()
}

/// Fraction of values `<= k/b` for `k = 1..=b`.
pub fn edf_oracle(values: &[f64], bins: usize) -> Vec<f64> {
    if values.is_empty() {
        return vec![0.0; bins];
    }
    (1..=bins)
        .map(|k| {
            let t = k as f64 / bins as f64;
            values.iter().filter(|&&x| x <= t).count() as f64 / values.len() as f64
        })
        .collect()
}

/// All-pairs hop distances by Floyd–Warshall; `None` for unreachable.
pub fn distance_oracle(g: &Graph) -> Vec<u32> {
    let n = g.node_count();
    let inf = u32::MAX / 4;
    let mut d = vec![vec![inf; n]; n];
    for (v, row) in d.iter_mut().enumerate() {
        row[v] = 0;
    }
    for (u, v) in g.edges() {
        d[u][v] = 1;
        d[v][u] = 1;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if d[i][j] < inf {
                out.push(d[i][j]);
            }
        }
    }
    out.sort_unstable();
    out
}

/// Binary problem of 2..=6 points in the plane with both labels present.
pub struct SmallProblem {
    pub x: Vec<Vec<f64>>,
    pub y: Vec<f64>,
    pub kernel: KernelSpec,
    pub c: f64,
}

impl SmallProblem {
    pub fn random<R: Rng>(rng: &mut R) -> Self {
        let n = rng.gen_range(2..=6);
        let x: Vec<Vec<f64>> = (0..n)
            .map(|_| vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)])
            .collect();
        let mut y: Vec<f64> = (0..n).map(|_| if rng.gen_bool(0.5) { 1.0 } else { -1.0 }).collect();
        y[0] = 1.0;
        y[1] = -1.0;
        let kernel = match rng.gen_range(0..3) {
            0 => KernelSpec::Linear,
            1 => KernelSpec::gaussian(1.0).unwrap(),
            _ => KernelSpec::gaussian(rng.gen_range(0.1..5.0)).unwrap(),
        };
        let c = [0.1, 1.0, 10.0][rng.gen_range(0..3)];
        Self { x, y, kernel, c }
    }

    /// `Q_ij = y_i y_j K(x_i, x_j)`.
    pub fn q(&self) -> Vec<Vec<f64>> {
        let n = self.x.len();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| self.y[i] * self.y[j] * kernel_eval(&self.kernel, &self.x[i], &self.x[j]).unwrap())
                    .collect()
            })
            .collect()
    }

    pub fn objective(&self, alphas: &[f64]) -> f64 {
        let q = self.q();
        dual_value(&q, alphas)
    }
}

fn dual_value(q: &[Vec<f64>], a: &[f64]) -> f64 {
    let mut quad = 0.0;
    for i in 0..a.len() {
        for j in 0..a.len() {
            quad += a[i] * a[j] * q[i][j];
        }
    }
    a.iter().sum::<f64>() - 0.5 * quad
}

/// Maximum of the dual over the lattice `{0, h, 2h, ..., c}^n` (`h = c/100`)
/// restricted to `sum a_i y_i = 0`: the first `n - 1` multipliers are
/// enumerated, the last is implied by the equality and must land on the
/// box. Exponential in `n`; intended for `n <= 4`.
pub fn grid_optimum(p: &SmallProblem) -> f64 {
    let n = p.x.len();
    let q = p.q();
    let steps = 100usize;
    let h = p.c / steps as f64;
    let mut best = 0.0f64;
    let mut idx = vec![0usize; n - 1];
    loop {
        let mut a: Vec<f64> = idx.iter().map(|&k| k as f64 * h).collect();
        let s: f64 = a.iter().zip(&p.y).map(|(a, y)| a * y).sum();
        let last = -s * p.y[n - 1];
        if (-1e-12..=p.c + 1e-12).contains(&last) {
            a.push(last.clamp(0.0, p.c));
            best = best.max(dual_value(&q, &a));
        }
        let mut d = 0;
        loop {
            if d == idx.len() {
                return best;
            }
            idx[d] += 1;
            if idx[d] <= steps {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

/// Exact dual optimum by enumerating which multipliers sit at 0, at `c`,
/// or strictly inside, and solving the equality-constrained stationarity
/// system on each face.
pub fn exact_optimum(p: &SmallProblem) -> f64 {
    let n = p.x.len();
    let q = p.q();
    let mut best = f64::NEG_INFINITY;
    let faces = 3usize.pow(n as u32);
    for code in 0..faces {
        let mut state = vec![0u8; n];
        let mut c = code;
        for s in state.iter_mut() {
            *s = (c % 3) as u8;
            c /= 3;
        }
        let free: Vec<usize> = (0..n).filter(|&i| state[i] == 2).collect();
        let mut a: Vec<f64> = state.iter().map(|&s| if s == 1 { p.c } else { 0.0 }).collect();
        if !free.is_empty() {
            // [Q_FF y_F; y_F' 0] [a_F; lambda] = [1 - Q_FB a_B; -y_B' a_B]
            let k = free.len();
            let mut m = vec![vec![0.0; k + 2]; k + 1];
            for (r, &i) in free.iter().enumerate() {
                for (s, &j) in free.iter().enumerate() {
                    m[r][s] = q[i][j];
                }
                m[r][k] = p.y[i];
                let fixed: f64 = (0..n).filter(|j| state[*j] != 2).map(|j| q[i][j] * a[j]).sum();
                m[r][k + 1] = 1.0 - fixed;
            }
            for (s, &j) in free.iter().enumerate() {
                m[k][s] = p.y[j];
            }
            let fixed_balance: f64 = (0..n).filter(|j| state[*j] != 2).map(|j| p.y[j] * a[j]).sum();
            m[k][k + 1] = -fixed_balance;
            let Some(sol) = solve_consistent(m) else {
                continue;
            };
            for (s, &i) in free.iter().enumerate() {
                a[i] = sol[s];
            }
        }
        let balance: f64 = a.iter().zip(&p.y).map(|(a, y)| a * y).sum();
        let feasible = balance.abs() <= 1e-9 && a.iter().all(|&v| (-1e-9..=p.c + 1e-9).contains(&v));
        if feasible {
            let a: Vec<f64> = a.iter().map(|v| v.clamp(0.0, p.c)).collect();
            best = best.max(dual_value(&q, &a));
        }
    }
    best
}

/// Gauss–Jordan elimination on an augmented matrix; free columns of a
/// singular system are set to zero. `None` when inconsistent.
fn solve_consistent(mut m: Vec<Vec<f64>>) -> Option<Vec<f64>> {
    let rows = m.len();
    let cols = m[0].len() - 1;
    let mut pivot_col = vec![usize::MAX; rows];
    let mut r = 0;
    for col in 0..cols {
        let Some(best) = (r..rows).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs())) else {
            break;
        };
        if m[best][col].abs() < 1e-10 {
            continue;
        }
        m.swap(r, best);
        let pv = m[r][col];
        for v in m[r].iter_mut() {
            *v /= pv;
        }
        for i in 0..rows {
            if i != r && m[i][col] != 0.0 {
                let f = m[i][col];
                for j in 0..=cols {
                    m[i][j] -= f * m[r][j];
                }
            }
        }
        pivot_col[r] = col;
        r += 1;
        if r == rows {
            break;
        }
    }
    if m[r..].iter().any(|row| row[cols].abs() > 1e-8) {
        return None;
    }
    let mut x = vec![0.0; cols];
    for (i, &col) in pivot_col.iter().enumerate().take(r) {
        x[col] = m[i][cols];
    }
    Some(x)
}

/// Largest KKT violation of a trained binary model on its training set,
/// measured on `y_i f(x_i)` against the margin conditions.
pub fn kkt_violation(model: &SvmModel, x: &[Vec<f64>], y: &[f64]) -> f64 {
    let mut alpha = vec![0.0; x.len()];
    for (&i, &coef) in model.support_indices.iter().zip(&model.dual_coeffs) {
        alpha[i] = coef.abs();
    }
    let mut worst = 0.0f64;
    for i in 0..x.len() {
        let margin = y[i] * model.decision(&x[i]).unwrap();
        let v = if alpha[i] <= 0.0 {
            (1.0 - margin).max(0.0)
        } else if alpha[i] >= model.c {
            (margin - 1.0).max(0.0)
        } else {
            (margin - 1.0).abs()
        };
        worst = worst.max(v);
    }
    worst
}
