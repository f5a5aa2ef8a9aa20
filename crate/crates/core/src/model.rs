//! Agent motion, range measurements, and their linearization.
//!
//! The state vector stacks the `d` coordinates of every agent in label order.
//! The measurement vector stacks the beacons' own positions first (in
//! ascending beacon label order) and then one range per edge, in the graph's
//! lexicographic edge order.

use crate::banded::{BandedSymMatrix, LinalgError};
use crate::graph::{graph_bandwidth, GraphError, Permutation, WsnGraph};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("dimension mismatch for {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("agents {0} and {1} share a position estimate; range derivative undefined")]
    CoincidentEndpoints(usize, usize),
    #[error("at least one beacon is required")]
    NoBeacons,
    #[error("beacon {0} is not a vertex")]
    BeaconOutOfRange(usize),
    #[error("beacon {0} listed twice")]
    DuplicateBeacon(usize),
    #[error("variance {name} must be {rule}, got {value}")]
    InvalidVariance {
        name: &'static str,
        rule: &'static str,
        value: f64,
    },
    #[error("unsupported spatial dimension {0}")]
    UnsupportedDimension(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type ModelResult<T> = Result<T, ModelError>;

/// Pairwise measurement function. Only Euclidean range is implemented; a new
/// kind supplies its value and its two endpoint gradients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum MeasurementKind {
    #[default]
    Distance,
}

impl MeasurementKind {
    pub fn dim(self) -> usize {
        match self {
            MeasurementKind::Distance => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WsnModel {
    dim: usize,
    meas_dim: usize,
    graph: WsnGraph,
    beacons: Vec<usize>,
    pub sigma_p: f64,
    pub sigma_q: f64,
    pub sigma_r: f64,
    kind: MeasurementKind,
}

impl WsnModel {
    /// Range-measurement model. `beacons` may be unsorted; it is stored sorted.
    pub fn distance(
        dim: usize,
        graph: WsnGraph,
        mut beacons: Vec<usize>,
        sigma_p: f64,
        sigma_q: f64,
        sigma_r: f64,
    ) -> ModelResult<Self> {
        if !(1..=3).contains(&dim) {
            return Err(ModelError::UnsupportedDimension(dim));
        }
        beacons.sort_unstable();
        if beacons.is_empty() {
            return Err(ModelError::NoBeacons);
        }
        if let Some(w) = beacons.windows(2).find(|w| w[0] == w[1]) {
            return Err(ModelError::DuplicateBeacon(w[0]));
        }
        if let Some(&b) = beacons.iter().find(|&&b| b >= graph.n_vertices()) {
            return Err(ModelError::BeaconOutOfRange(b));
        }
        if !(sigma_p >= 0.0 && sigma_p.is_finite()) {
            return Err(ModelError::InvalidVariance {
                name: "sigma_p",
                rule: "finite and non-negative",
                value: sigma_p,
            });
        }
        for (name, value) in [("sigma_q", sigma_q), ("sigma_r", sigma_r)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(ModelError::InvalidVariance {
                    name,
                    rule: "finite and positive",
                    value,
                });
            }
        }
        if dim == 2 && beacons.len() < 2 {
            log::warn!(
                "2-D range localization with {} beacon(s) is not observable",
                beacons.len()
            );
        }
        let kind = MeasurementKind::Distance;
        Ok(Self {
            dim,
            meas_dim: kind.dim(),
            graph,
            beacons,
            sigma_p,
            sigma_q,
            sigma_r,
            kind,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn meas_dim(&self) -> usize {
        self.meas_dim
    }

    pub fn kind(&self) -> MeasurementKind {
        self.kind
    }

    pub fn graph(&self) -> &WsnGraph {
        &self.graph
    }

    pub fn beacons(&self) -> &[usize] {
        &self.beacons
    }

    pub fn is_beacon(&self, agent: usize) -> bool {
        self.beacons.binary_search(&agent).is_ok()
    }

    pub fn n_agents(&self) -> usize {
        self.graph.n_vertices()
    }

    pub fn state_dim(&self) -> usize {
        self.dim * self.n_agents()
    }

    pub fn beacon_rows(&self) -> usize {
        self.dim * self.beacons.len()
    }

    pub fn meas_len(&self) -> usize {
        self.beacon_rows() + self.meas_dim * self.graph.n_edges()
    }

    /// Inverse noise variance of measurement row `row`.
    pub fn row_weight(&self, row: usize) -> f64 {
        if row < self.beacon_rows() {
            1.0 / self.sigma_q
        } else {
            1.0 / self.sigma_r
        }
    }

    /// The same model under relabeling `p`, plus `row_map[old_row] = new_row`
    /// for carrying measurement vectors across.
    pub fn relabeled(&self, p: &Permutation) -> ModelResult<(WsnModel, Vec<usize>)> {
        let graph = p.permute_graph(&self.graph)?;
        let mut beacons: Vec<usize> = self.beacons.iter().map(|&b| p.new_label(b)).collect();
        beacons.sort_unstable();
        let new = WsnModel {
            graph,
            beacons,
            ..self.clone()
        };
        let mut row_map = Vec::with_capacity(self.meas_len());
        for &b in &self.beacons {
            let pos = new
                .beacons
                .binary_search(&p.new_label(b))
                .expect("relabeled beacon present");
            row_map.extend((0..self.dim).map(|c| pos * self.dim + c));
        }
        let nb = new.beacon_rows();
        for &(i, j) in self.graph.edges() {
            let e = new
                .graph
                .edge_index(p.new_label(i), p.new_label(j))
                .expect("relabeled edge present");
            row_map.extend((0..self.meas_dim).map(|c| nb + e * self.meas_dim + c));
        }
        Ok((new, row_map))
    }

    fn check_state(&self, what: &'static str, v: &[f64]) -> ModelResult<()> {
        if v.len() == self.state_dim() {
            Ok(())
        } else {
            Err(ModelError::DimensionMismatch {
                what,
                expected: self.state_dim(),
                found: v.len(),
            })
        }
    }
}

/// Stacked measurement vector `y(k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementBatch(Vec<f64>);

impl MeasurementBatch {
    pub fn new(model: &WsnModel, y: Vec<f64>) -> ModelResult<Self> {
        if y.len() != model.meas_len() {
            return Err(ModelError::DimensionMismatch {
                what: "measurement",
                expected: model.meas_len(),
                found: y.len(),
            });
        }
        Ok(Self(y))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Moves entry `r` to position `row_map[r]`.
    pub fn permuted(&self, row_map: &[usize]) -> Self {
        let mut out = vec![0.0; self.0.len()];
        for (r, &v) in self.0.iter().enumerate() {
            out[row_map[r]] = v;
        }
        Self(out)
    }
}

/// Measurement Jacobian in row-sparse form.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseJacobian {
    n_rows: usize,
    n_cols: usize,
    rows: Vec<Vec<(usize, f64)>>,
}

impl SparseJacobian {
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn row(&self, r: usize) -> &[(usize, f64)] {
        &self.rows[r]
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        self.rows
            .iter()
            .map(|row| {
                let mut dense = vec![0.0; self.n_cols];
                for &(c, v) in row {
                    dense[c] += v;
                }
                dense
            })
            .collect()
    }

    /// `H x`.
    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|row| row.iter().map(|&(c, v)| v * x[c]).sum())
            .collect()
    }

    /// `H^T y`.
    pub fn tmul(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_cols];
        for (row, &yr) in self.rows.iter().zip(y) {
            for &(c, v) in row {
                out[c] += v * yr;
            }
        }
        out
    }

    /// Largest column span `max_col - min_col` over rows.
    pub fn row_span(&self) -> usize {
        self.rows
            .iter()
            .filter_map(|row| {
                let lo = row.iter().map(|e| e.0).min()?;
                let hi = row.iter().map(|e| e.0).max()?;
                Some(hi - lo)
            })
            .max()
            .unwrap_or(0)
    }
}

/// One motion step: `x + v + p` with `p ~ N(0, sigma_p I)`.
pub fn simulate_step<R: Rng + ?Sized>(
    x: &[f64],
    v: &[f64],
    model: &WsnModel,
    rng: &mut R,
) -> ModelResult<Vec<f64>> {
    model.check_state("state", x)?;
    model.check_state("input", v)?;
    let std = model.sigma_p.sqrt();
    Ok(x.iter()
        .zip(v)
        .map(|(xi, vi)| xi + vi + std * rng.sample::<f64, _>(StandardNormal))
        .collect())
}

fn range_between(x: &[f64], dim: usize, i: usize, j: usize) -> f64 {
    crate::graph::euclidean(&x[i * dim..(i + 1) * dim], &x[j * dim..(j + 1) * dim])
}

/// Noise-free measurement prediction `h(x)`.
pub fn h_eval(xhat: &[f64], model: &WsnModel) -> ModelResult<Vec<f64>> {
    model.check_state("state", xhat)?;
    let d = model.dim;
    let mut out = Vec::with_capacity(model.meas_len());
    for &b in &model.beacons {
        out.extend_from_slice(&xhat[b * d..(b + 1) * d]);
    }
    for &(i, j) in model.graph.edges() {
        let dist = range_between(xhat, d, i, j);
        if dist == 0.0 {
            return Err(ModelError::CoincidentEndpoints(i, j));
        }
        out.push(dist);
    }
    Ok(out)
}

/// `h(x) + noise`, with variance `sigma_q` on beacon rows and `sigma_r` on edge rows.
pub fn measure<R: Rng + ?Sized>(
    x_true: &[f64],
    model: &WsnModel,
    rng: &mut R,
) -> ModelResult<MeasurementBatch> {
    let mut y = h_eval(x_true, model)?;
    let nb = model.beacon_rows();
    let (sq, sr) = (model.sigma_q.sqrt(), model.sigma_r.sqrt());
    for (r, v) in y.iter_mut().enumerate() {
        let std = if r < nb { sq } else { sr };
        *v += std * rng.sample::<f64, _>(StandardNormal);
    }
    Ok(MeasurementBatch(y))
}

fn build_jacobian(xhat: &[f64], model: &WsnModel, strict: bool) -> ModelResult<SparseJacobian> {
    model.check_state("state", xhat)?;
    let d = model.dim;
    let mut rows = Vec::with_capacity(model.meas_len());
    for &b in &model.beacons {
        rows.extend((0..d).map(|c| vec![(b * d + c, 1.0)]));
    }
    for &(i, j) in model.graph.edges() {
        let dist = range_between(xhat, d, i, j);
        if dist == 0.0 {
            if strict {
                return Err(ModelError::CoincidentEndpoints(i, j));
            }
            rows.push(Vec::new());
            continue;
        }
        let mut row = Vec::with_capacity(2 * d);
        for c in 0..d {
            row.push((i * d + c, (xhat[i * d + c] - xhat[j * d + c]) / dist));
        }
        for c in 0..d {
            row.push((j * d + c, (xhat[j * d + c] - xhat[i * d + c]) / dist));
        }
        rows.push(row);
    }
    Ok(SparseJacobian {
        n_rows: rows.len(),
        n_cols: model.state_dim(),
        rows,
    })
}

/// Jacobian of `h` at `xhat`: unit rows selecting beacon coordinates, then one
/// row per edge holding the unit direction `(x_i - x_j)/|x_i - x_j|` in agent
/// `i`'s columns and its negation in agent `j`'s.
pub fn jacobian(xhat: &[f64], model: &WsnModel) -> ModelResult<SparseJacobian> {
    build_jacobian(xhat, model, true)
}

/// `H^T R^{-1} H`, accumulated row by row into band storage.
///
/// The stored bandwidth is `d (b + 1) - 1` where `b` is the graph bandwidth,
/// since each edge row couples the `d` columns of both endpoints.
pub fn information_matrix(h: &SparseJacobian, model: &WsnModel) -> BandedSymMatrix {
    let d = model.dim;
    let nominal = d * (graph_bandwidth(&model.graph) + 1) - 1;
    let n = h.n_cols;
    let mut s = BandedSymMatrix::zeros(n, nominal.max(h.row_span()));
    for (r, row) in h.rows.iter().enumerate() {
        let w = model.row_weight(r);
        for (a, &(ca, va)) in row.iter().enumerate() {
            for &(cb, vb) in &row[..=a] {
                s.add_at(ca, cb, w * va * vb);
            }
        }
    }
    s
}

/// `M H^T R^{-1} nu`.
pub fn gain_apply(
    m: &BandedSymMatrix,
    h: &SparseJacobian,
    model: &WsnModel,
    innovation: &[f64],
) -> ModelResult<Vec<f64>> {
    if innovation.len() != h.n_rows {
        return Err(ModelError::DimensionMismatch {
            what: "innovation",
            expected: h.n_rows,
            found: innovation.len(),
        });
    }
    let weighted: Vec<f64> = innovation
        .iter()
        .enumerate()
        .map(|(r, v)| v * model.row_weight(r))
        .collect();
    let g = h.tmul(&weighted);
    Ok(m.matvec(&g)?)
}

/// Outcome of [`observability_rank_check`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankCheck {
    pub rank: usize,
    pub full: bool,
}

/// Numerical column rank of the Jacobian at `xhat`. With identity dynamics
/// the stacked observability matrix has the same column rank. Edges with
/// coincident endpoints contribute nothing. Advisory only.
pub fn observability_rank_check(xhat: &[f64], model: &WsnModel) -> ModelResult<RankCheck> {
    let h = build_jacobian(xhat, model, false)?;
    let rank = numerical_rank(h.to_dense());
    Ok(RankCheck {
        rank,
        full: rank == model.state_dim(),
    })
}

/// Rank by Gaussian elimination with complete pivoting.
fn numerical_rank(mut a: Vec<Vec<f64>>) -> usize {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let scale = a
        .iter()
        .flatten()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return 0;
    }
    let tol = scale * (rows.max(cols) as f64) * f64::EPSILON * 16.0;
    let mut col_perm: Vec<usize> = (0..cols).collect();
    let mut rank = 0;
    while rank < rows.min(cols) {
        let (mut pr, mut pc, mut best) = (rank, rank, 0.0);
        for (r, row) in a.iter().enumerate().skip(rank) {
            for (k, &c) in col_perm.iter().enumerate().skip(rank) {
                if row[c].abs() > best {
                    best = row[c].abs();
                    pr = r;
                    pc = k;
                }
            }
        }
        if best <= tol {
            break;
        }
        a.swap(rank, pr);
        col_perm.swap(rank, pc);
        let c0 = col_perm[rank];
        let pivot_row = a[rank].clone();
        for row in a.iter_mut().skip(rank + 1) {
            let f = row[c0] / pivot_row[c0];
            if f != 0.0 {
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= f * p;
                }
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::banded::{bandwidth, SymMatrix};
    use crate::rng::rng_from_seed;

    fn pair_model(beacons: Vec<usize>, sigma_r: f64) -> WsnModel {
        WsnModel::distance(2, WsnGraph::new(2, [(0, 1)]).unwrap(), beacons, 0.02, 2.0, sigma_r)
            .unwrap()
    }

    #[test]
    fn constructor_validation() {
        let g = WsnGraph::path(3);
        assert_eq!(
            WsnModel::distance(2, g.clone(), vec![], 1.0, 1.0, 1.0),
            Err(ModelError::NoBeacons)
        );
        assert_eq!(
            WsnModel::distance(2, g.clone(), vec![3], 1.0, 1.0, 1.0),
            Err(ModelError::BeaconOutOfRange(3))
        );
        assert_eq!(
            WsnModel::distance(2, g.clone(), vec![1, 1], 1.0, 1.0, 1.0),
            Err(ModelError::DuplicateBeacon(1))
        );
        assert!(WsnModel::distance(2, g.clone(), vec![0], 1.0, 0.0, 1.0).is_err());
        assert!(WsnModel::distance(2, g.clone(), vec![0], -1.0, 1.0, 1.0).is_err());
        let m = WsnModel::distance(2, g, vec![2, 0], 1.0, 1.0, 1.0).unwrap();
        assert_eq!(m.beacons(), &[0, 2]);
        assert_eq!(m.meas_len(), 4 + 2);
    }

    #[test]
    fn h_eval_examples() {
        let m = pair_model(vec![0], 1.0);
        assert_eq!(h_eval(&[0.0, 0.0, 3.0, 4.0], &m).unwrap(), vec![0.0, 0.0, 5.0]);

        let all = WsnModel::distance(2, WsnGraph::empty(2), vec![0, 1], 0.1, 1.0, 1.0).unwrap();
        assert_eq!(h_eval(&[1.0, 1.0, 1.0, 1.0], &all).unwrap(), vec![1.0; 4]);

        assert_eq!(
            h_eval(&[1.0, 1.0, 1.0, 1.0], &m),
            Err(ModelError::CoincidentEndpoints(0, 1))
        );
        assert!(matches!(
            h_eval(&[1.0; 3], &m),
            Err(ModelError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn jacobian_examples() {
        let m = pair_model(vec![0], 1.0);
        let h = jacobian(&[0.0, 0.0, 1.0, 0.0], &m).unwrap();
        assert_eq!(h.to_dense()[2], vec![-1.0, 0.0, 1.0, 0.0]);
        assert_eq!(h.to_dense()[0], vec![1.0, 0.0, 0.0, 0.0]);
        let h = jacobian(&[0.0, 0.0, 3.0, 4.0], &m).unwrap();
        let row = &h.to_dense()[2];
        for (a, b) in row.iter().zip([-0.6, -0.8, 0.6, 0.8]) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(
            jacobian(&[2.0, 2.0, 2.0, 2.0], &m),
            Err(ModelError::CoincidentEndpoints(0, 1))
        );
    }

    #[test]
    fn information_matrix_examples() {
        let all = WsnModel::distance(2, WsnGraph::empty(3), vec![0, 1, 2], 0.1, 2.0, 1.0).unwrap();
        let h = jacobian(&[0.0, 0.0, 5.0, 1.0, 2.0, 7.0], &all).unwrap();
        let s = information_matrix(&h, &all);
        assert_eq!(bandwidth(&s, 0.0), 0);
        for i in 0..6 {
            assert_eq!(s.get(i, i), 0.5);
        }

        let m = WsnModel::distance(2, WsnGraph::new(2, [(0, 1)]).unwrap(), vec![0], 0.1, 2.0, 1.0)
            .unwrap();
        let h = jacobian(&[0.0, 0.0, 1.0, 0.0], &m).unwrap();
        let s = information_matrix(&h, &m).to_dense();
        let expected = [
            [1.5, 0.0, -1.0, 0.0],
            [0.0, 0.5, 0.0, 0.0],
            [-1.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 0.0],
        ];
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(s.get(i, j), expected[i][j], "({i},{j})");
            }
        }
    }

    #[test]
    fn information_matrix_stored_bandwidth() {
        let g = WsnGraph::new(4, [(0, 2), (1, 2), (2, 3)]).unwrap();
        let m = WsnModel::distance(2, g, vec![0], 0.1, 1.0, 1.0).unwrap();
        let x = [0.0, 0.0, 1.0, 0.3, 0.4, 1.1, 2.0, 0.7];
        let s = information_matrix(&jacobian(&x, &m).unwrap(), &m);
        assert_eq!(s.bw(), 2 * (2 + 1) - 1);
        assert_eq!(bandwidth(&s, 1e-12), 5);
    }

    #[test]
    fn gain_apply_examples() {
        let all = WsnModel::distance(2, WsnGraph::empty(2), vec![0, 1], 0.1, 1.0, 1.0).unwrap();
        let h = jacobian(&[0.0, 1.0, 2.0, 3.0], &all).unwrap();
        let eye = BandedSymMatrix::identity(4);
        assert_eq!(gain_apply(&eye, &h, &all, &[0.0; 4]).unwrap(), vec![0.0; 4]);
        let nu = [1.0, -2.0, 3.0, 0.5];
        assert_eq!(gain_apply(&eye, &h, &all, &nu).unwrap(), nu.to_vec());

        let one = WsnModel::distance(2, WsnGraph::empty(2), vec![1], 0.1, 1.0, 1.0).unwrap();
        let h = jacobian(&[0.0, 1.0, 2.0, 3.0], &one).unwrap();
        assert_eq!(
            gain_apply(&eye, &h, &one, &[4.0, 5.0]).unwrap(),
            vec![0.0, 0.0, 4.0, 5.0]
        );
        assert!(gain_apply(&eye, &h, &one, &[1.0]).is_err());
    }

    #[test]
    fn rank_examples() {
        let all = WsnModel::distance(2, WsnGraph::path(3), vec![0, 1, 2], 0.1, 1.0, 1.0).unwrap();
        let x = [0.0, 0.0, 1.0, 0.0, 2.0, 1.0];
        assert!(observability_rank_check(&x, &all).unwrap().full);

        let m = pair_model(vec![0], 1.0);
        let check = observability_rank_check(&[0.0, 0.0, 3.0, 4.0], &m).unwrap();
        assert_eq!(check, RankCheck { rank: 3, full: false });
    }

    #[test]
    fn noiseless_limits() {
        let m = WsnModel::distance(2, WsnGraph::new(2, [(0, 1)]).unwrap(), vec![0], 0.0, 1e-30, 1e-30)
            .unwrap();
        let mut rng = rng_from_seed(1);
        let x = [0.0, 0.0, 3.0, 4.0];
        assert_eq!(simulate_step(&x, &[0.0; 4], &m, &mut rng).unwrap(), x.to_vec());
        let v = [0.5, -1.0, 2.0, 0.25];
        let moved = simulate_step(&x, &v, &m, &mut rng).unwrap();
        assert_eq!(moved, vec![0.5, -1.0, 5.0, 4.25]);
        let y = measure(&x, &m, &mut rng).unwrap();
        for (a, b) in y.as_slice().iter().zip(h_eval(&x, &m).unwrap()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn relabel_maps_rows() {
        let g = WsnGraph::new(3, [(0, 1), (0, 2)]).unwrap();
        let m = WsnModel::distance(2, g, vec![0, 2], 0.1, 1.0, 1.0).unwrap();
        let p = Permutation::new(vec![2, 0, 1]).unwrap();
        let (mp, row_map) = m.relabeled(&p).unwrap();
        assert_eq!(mp.beacons(), &[1, 2]);
        assert_eq!(mp.graph().edges(), &[(0, 2), (1, 2)]);

        let x = [0.0, 0.0, 3.0, 4.0, -1.0, 2.0];
        let xp = p.permute_blocks(&x, 2);
        let y = MeasurementBatch::new(&m, h_eval(&x, &m).unwrap()).unwrap();
        assert_eq!(y.permuted(&row_map).as_slice(), h_eval(&xp, &mp).unwrap().as_slice());
    }
}
