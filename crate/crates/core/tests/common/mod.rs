//! Independent dense reference implementations shared by the integration
//! tests and the acceptance runner.
#![allow(dead_code)]

use lbekf::banded::{bandwidth, l_banded_inverse, DenseSymMatrix, SymMatrix};
use lbekf::filter::{init_filter, lb_ekf_step};
use lbekf::graph::{
    build_geometric_graph, graph_bandwidth, min_bandwidth_bruteforce, phi_max, vertex_relabel,
    Realization, WsnGraph,
};
use lbekf::model::{h_eval, information_matrix, jacobian, measure, simulate_step, WsnModel};
use lbekf::rng::rng_from_seed;
use lbekf::sim::{build_scenario, ScenarioConfig};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

pub fn to_na(a: &impl SymMatrix) -> DMatrix<f64> {
    let n = a.dim();
    DMatrix::from_fn(n, n, |i, j| a.get(i, j))
}

pub fn random_spd<R: Rng>(n: usize, rng: &mut R) -> DenseSymMatrix {
    let b = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    let a = &b * b.transpose() + DMatrix::identity(n, n) * n as f64 * 0.1;
    DenseSymMatrix::from_lower_fn(n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)]))
}

/// Relative Frobenius error of the full-band inverse against nalgebra's.
pub fn full_band_inverse_error(a: &DenseSymMatrix) -> f64 {
    let n = a.dim();
    let ours = to_na(&l_banded_inverse(a, n - 1).unwrap());
    let exact = to_na(a).try_inverse().unwrap();
    (ours - &exact).norm() / exact.norm()
}

/// Measurement function written directly from positions, beacons and edges.
pub fn oracle_h(x: &DVector<f64>, d: usize, beacons: &[usize], edges: &[(usize, usize)]) -> DVector<f64> {
    let mut out = Vec::new();
    for &b in beacons {
        out.extend((0..d).map(|c| x[b * d + c]));
    }
    for &(i, j) in edges {
        let s: f64 = (0..d).map(|c| (x[i * d + c] - x[j * d + c]).powi(2)).sum();
        out.push(s.sqrt());
    }
    DVector::from_vec(out)
}

pub fn oracle_jacobian(x: &DVector<f64>, d: usize, beacons: &[usize], edges: &[(usize, usize)]) -> DMatrix<f64> {
    let rows = beacons.len() * d + edges.len();
    let mut h = DMatrix::zeros(rows, x.len());
    for (k, &b) in beacons.iter().enumerate() {
        for c in 0..d {
            h[(k * d + c, b * d + c)] = 1.0;
        }
    }
    let nb = beacons.len() * d;
    for (e, &(i, j)) in edges.iter().enumerate() {
        let diff: Vec<f64> = (0..d).map(|c| x[i * d + c] - x[j * d + c]).collect();
        let dist = diff.iter().map(|v| v * v).sum::<f64>().sqrt();
        for c in 0..d {
            h[(nb + e, i * d + c)] = diff[c] / dist;
            h[(nb + e, j * d + c)] = -diff[c] / dist;
        }
    }
    h
}

/// Textbook information-form EKF with dense matrices.
pub struct DenseEkf {
    pub x: DVector<f64>,
    pub m: DMatrix<f64>,
}

impl DenseEkf {
    pub fn step(&mut self, model: &WsnModel, v: &[f64], y: &[f64]) {
        let d = model.dim();
        let (beacons, edges) = (model.beacons(), model.graph().edges());
        let n = self.x.len();
        let h = oracle_jacobian(&self.x, d, beacons, edges);
        let rinv = DMatrix::from_diagonal(&DVector::from_fn(h.nrows(), |r, _| model.row_weight(r)));
        let p = &self.m + DMatrix::identity(n, n) * model.sigma_p;
        let info = p.try_inverse().unwrap() + h.transpose() * &rinv * &h;
        let m = info.try_inverse().unwrap();
        let innov = DVector::from_column_slice(y) - oracle_h(&self.x, d, beacons, edges);
        self.x = &self.x + DVector::from_column_slice(v) + &m * h.transpose() * rinv * innov;
        self.m = m;
    }
}

/// Runs the banded filter at full band against the dense oracle on the default
/// scenario and returns the largest estimate deviation over `steps` steps.
pub fn ekf_equivalence_deviation(seed: u64, steps: usize) -> f64 {
    let cfg = ScenarioConfig { seed, ..ScenarioConfig::default() };
    let s = build_scenario(&cfg).unwrap();
    let model = &s.model;
    let n = model.state_dim();
    let mut rng = rng_from_seed(seed ^ 0xA5A5);
    let mut truth = s.positions.coords().to_vec();
    let x0: Vec<f64> = truth
        .iter()
        .map(|x| x + cfg.init_var.sqrt() * rng.sample::<f64, _>(StandardNormal))
        .collect();
    let mut banded = init_filter(x0.clone(), cfg.init_var, n - 1).unwrap();
    let mut dense = DenseEkf {
        x: DVector::from_vec(x0),
        m: DMatrix::identity(n, n) * cfg.init_var,
    };
    let v = vec![0.0; n];
    let mut worst = 0.0f64;
    for _ in 0..steps {
        let y = measure(&truth, model, &mut rng).unwrap();
        banded = lb_ekf_step(&banded, model, &v, &y).unwrap();
        dense.step(model, &v, y.as_slice());
        let dev = banded
            .xhat
            .iter()
            .zip(dense.x.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        worst = worst.max(dev);
        truth = simulate_step(&truth, &v, model, &mut rng).unwrap();
    }
    worst
}

/// Largest relative row error between central differences of `h` and the
/// analytic Jacobian.
pub fn jacobian_fd_error(x: &[f64], model: &WsnModel) -> f64 {
    let jac = jacobian(x, model).unwrap().to_dense();
    let eps = 1e-6;
    let mut fd = vec![vec![0.0; x.len()]; jac.len()];
    for c in 0..x.len() {
        let mut up = x.to_vec();
        let mut down = x.to_vec();
        up[c] += eps;
        down[c] -= eps;
        let (hu, hd) = (h_eval(&up, model).unwrap(), h_eval(&down, model).unwrap());
        for r in 0..jac.len() {
            fd[r][c] = (hu[r] - hd[r]) / (2.0 * eps);
        }
    }
    jac.iter()
        .zip(&fd)
        .map(|(a, b)| {
            let diff: f64 = a.iter().zip(b).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
            let norm: f64 = a.iter().map(|p| p * p).sum::<f64>().sqrt();
            diff / norm.max(1e-300)
        })
        .fold(0.0, f64::max)
}

pub fn random_realization<R: Rng>(rng: &mut R, n: usize, side: f64, radius: f64) -> Realization {
    let coords = (0..2 * n).map(|_| rng.random::<f64>() * side).collect();
    Realization::new(2, coords, radius).unwrap()
}

/// `(phi, phi_max)` for the relabeled geometric graph of `x`.
pub fn relabeled_phi(x: &Realization) -> (usize, usize) {
    let g = build_geometric_graph(x);
    let p = vertex_relabel(x);
    (graph_bandwidth(&p.permute_graph(&g).unwrap()), phi_max(x))
}

/// `(phi_min, phi, phi_max)` with the exact minimum from exhaustive search.
pub fn bound_chain(x: &Realization) -> (usize, usize, usize) {
    let g = build_geometric_graph(x);
    let (phi, pmax) = relabeled_phi(x);
    (min_bandwidth_bruteforce(&g).unwrap(), phi, pmax)
}

pub fn cycle_positions(n: usize, radius_scale: f64) -> Realization {
    let pts: Vec<Vec<f64>> = (0..n)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            vec![10.0 * t.cos(), 10.0 * t.sin()]
        })
        .collect();
    let chord = 2.0 * 10.0 * (std::f64::consts::PI / n as f64).sin();
    Realization::from_points(&pts, chord * radius_scale).unwrap()
}

/// `(bandwidth of S at tolerance 1e-12, d (graph bandwidth + 1) - 1)` at the
/// positions of `x` with beacons `beacons`.
pub fn information_bandwidth(x: &Realization, beacons: Vec<usize>) -> Option<(usize, usize)> {
    let g = build_geometric_graph(x);
    if g.n_edges() == 0 {
        return None;
    }
    let model = WsnModel::distance(2, g.clone(), beacons, 0.02, 2.0, 10.0).ok()?;
    let h = jacobian(x.coords(), &model).ok()?;
    let s = information_matrix(&h, &model);
    Some((bandwidth(&s, 1e-12), 2 * (graph_bandwidth(&g) + 1) - 1))
}

pub fn is_cycle_graph(g: &WsnGraph) -> bool {
    g.degrees().iter().all(|&d| d == 2) && g.is_connected()
}
