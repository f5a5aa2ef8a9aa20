//! Symmetric dense and banded matrices, and the L-banded inverse.
//!
//! [`BandedSymMatrix`] stores the main diagonal and the `bw` sub-diagonals as
//! contiguous arrays; the upper triangle is implied by symmetry. Entries
//! outside the stored band are zero by construction.
//!
//! [`l_banded_inverse`] accumulates inverses of overlapping principal windows
//! of its input. The result has bandwidth `L` and its inverse agrees with the
//! input inside the band, which is the maximum-entropy banded approximation of
//! `A^{-1}`. At `L = n - 1` it reduces to an exact inverse.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("submatrix range {lo}..={hi} out of range for dimension {n}")]
    IndexOutOfRange { lo: usize, hi: usize, n: usize },
    #[error("matrix is not positive definite (pivot {index} = {value:e})")]
    NotPositiveDefinite { index: usize, value: f64 },
    #[error("principal submatrix {lo}..={hi} is not invertible; band too narrow or input not SPD")]
    SingularSubmatrix { lo: usize, hi: usize },
    #[error("band parameter {band} invalid for dimension {n}")]
    InvalidBand { band: usize, n: usize },
    #[error("entry ({i}, {j}) lies outside stored bandwidth {bw}")]
    OutsideBand { i: usize, j: usize, bw: usize },
    #[error("matrix is not symmetric at ({i}, {j})")]
    NotSymmetric { i: usize, j: usize },
}

pub type LinalgResult<T> = Result<T, LinalgError>;

/// Read access to a square symmetric matrix.
pub trait SymMatrix {
    fn dim(&self) -> usize;
    fn get(&self, i: usize, j: usize) -> f64;

    /// Largest `|i - j|` that may hold a nonzero. Dense storage returns `n - 1`.
    fn stored_bandwidth(&self) -> usize {
        self.dim().saturating_sub(1)
    }
}

/// Full row-major storage of a symmetric matrix. Writes go to both triangles.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseSymMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * m.n + i] = d;
        }
        m
    }

    /// Builds from `f(i, j)` evaluated on the lower triangle (`i >= j`).
    pub fn from_lower_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Builds from nested rows; the rows must be square and exactly symmetric.
    pub fn from_rows(rows: &[Vec<f64>]) -> LinalgResult<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(LinalgError::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        for i in 0..n {
            for j in 0..i {
                if data[i * n + j] != data[j * n + i] {
                    return Err(LinalgError::NotSymmetric { i, j });
                }
            }
        }
        Ok(Self { n, data })
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.n + j] = value;
        self.data[j * self.n + i] = value;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n.max(1)).map(|r| r.to_vec()).collect()
    }

    pub fn scale(&mut self, factor: f64) {
        self.data.iter_mut().for_each(|v| *v *= factor);
    }

    pub fn matvec(&self, x: &[f64]) -> LinalgResult<Vec<f64>> {
        check_dim(self.n, x.len())?;
        Ok((0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn matmul(&self, other: &DenseSymMatrix) -> LinalgResult<Vec<Vec<f64>>> {
        check_dim(self.n, other.n)?;
        let n = self.n;
        let mut out = vec![vec![0.0; n]; n];
        for (i, out_row) in out.iter_mut().enumerate() {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0.0 {
                    continue;
                }
                for (o, b) in out_row.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }
}

impl SymMatrix for DenseSymMatrix {
    fn dim(&self) -> usize {
        self.n
    }

    fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }
}

/// Symmetric matrix in band storage.
///
/// `diags[k][j]` holds entry `(j + k, j)` for `k = 0..=bw`, so the main
/// diagonal comes first and each sub-diagonal is one element shorter.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedSymMatrix {
    n: usize,
    bw: usize,
    diags: Vec<Vec<f64>>,
}

impl BandedSymMatrix {
    /// All-zero matrix with stored bandwidth `bw`, clamped to `n - 1`.
    pub fn zeros(n: usize, bw: usize) -> Self {
        assert!(n >= 1, "banded matrix needs n >= 1");
        let bw = bw.min(n - 1);
        Self {
            n,
            bw,
            diags: (0..=bw).map(|k| vec![0.0; n - k]).collect(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::scaled_identity(n, 1.0)
    }

    pub fn scaled_identity(n: usize, value: f64) -> Self {
        let mut m = Self::zeros(n, 0);
        m.diags[0].iter_mut().for_each(|v| *v = value);
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), 0);
        m.diags[0].copy_from_slice(diag);
        m
    }

    /// Copies the band `|i - j| <= bw` of `a`; entries outside are dropped.
    pub fn from_sym<M: SymMatrix>(a: &M, bw: usize) -> Self {
        let mut m = Self::zeros(a.dim(), bw);
        for k in 0..=m.bw {
            for j in 0..m.n - k {
                m.diags[k][j] = a.get(j + k, j);
            }
        }
        m
    }

    pub fn bw(&self) -> usize {
        self.bw
    }

    /// Sub-diagonal `k` (entries `(j + k, j)`).
    pub fn diagonal(&self, k: usize) -> &[f64] {
        &self.diags[k]
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) -> LinalgResult<()> {
        let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
        let k = hi - lo;
        if k > self.bw {
            return Err(LinalgError::OutsideBand { i, j, bw: self.bw });
        }
        self.diags[k][lo] = value;
        Ok(())
    }

    /// Adds `value` to entry `(i, j)` (and its mirror). `|i - j|` must be within the band.
    #[inline]
    pub(crate) fn add_at(&mut self, i: usize, j: usize, value: f64) {
        let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
        self.diags[hi - lo][lo] += value;
    }

    pub fn to_dense(&self) -> DenseSymMatrix {
        DenseSymMatrix::from_lower_fn(self.n, |i, j| self.get(i, j))
    }

    /// `A + sigma I`; the stored bandwidth is unchanged.
    pub fn add_scaled_identity(&self, sigma: f64) -> Self {
        let mut out = self.clone();
        out.diags[0].iter_mut().for_each(|v| *v += sigma);
        out
    }

    /// Entrywise sum; the stored bandwidth of the result is the larger of the two.
    pub fn add(&self, other: &BandedSymMatrix) -> LinalgResult<Self> {
        check_dim(self.n, other.n)?;
        let (wide, narrow) = if self.bw >= other.bw {
            (self, other)
        } else {
            (other, self)
        };
        let mut out = wide.clone();
        for (dst, src) in out.diags.iter_mut().zip(&narrow.diags) {
            dst.iter_mut().zip(src).for_each(|(d, s)| *d += s);
        }
        Ok(out)
    }

    pub fn matvec(&self, x: &[f64]) -> LinalgResult<Vec<f64>> {
        check_dim(self.n, x.len())?;
        let mut y: Vec<f64> = self.diags[0].iter().zip(x).map(|(a, b)| a * b).collect();
        for k in 1..=self.bw {
            for (j, &a) in self.diags[k].iter().enumerate() {
                y[j + k] += a * x[j];
                y[j] += a * x[j + k];
            }
        }
        Ok(y)
    }
}

impl SymMatrix for BandedSymMatrix {
    fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
        let k = hi - lo;
        if k > self.bw {
            0.0
        } else {
            self.diags[k][lo]
        }
    }

    fn stored_bandwidth(&self) -> usize {
        self.bw
    }
}

fn check_dim(expected: usize, found: usize) -> LinalgResult<()> {
    if expected == found {
        Ok(())
    } else {
        Err(LinalgError::DimensionMismatch { expected, found })
    }
}

/// Largest `|i - j|` with `|A_ij| > zero_tol`, or 0 when only the diagonal is nonzero.
pub fn bandwidth<M: SymMatrix>(a: &M, zero_tol: f64) -> usize {
    let n = a.dim();
    for k in (1..=a.stored_bandwidth().min(n.saturating_sub(1))).rev() {
        if (0..n - k).any(|j| a.get(j + k, j).abs() > zero_tol) {
            return k;
        }
    }
    0
}

/// Copy of rows/columns `lo..=hi` (zero-based, inclusive).
pub fn principal_submatrix<M: SymMatrix>(a: &M, lo: usize, hi: usize) -> LinalgResult<DenseSymMatrix> {
    let n = a.dim();
    if lo > hi || hi >= n {
        return Err(LinalgError::IndexOutOfRange { lo, hi, n });
    }
    Ok(DenseSymMatrix::from_lower_fn(hi - lo + 1, |i, j| {
        a.get(lo + i, lo + j)
    }))
}

/// Frobenius norm of `a - b`.
pub fn frobenius_error<A: SymMatrix, B: SymMatrix>(a: &A, b: &B) -> LinalgResult<f64> {
    let n = a.dim();
    check_dim(n, b.dim())?;
    let mut sum = 0.0;
    for i in 0..n {
        sum += (a.get(i, i) - b.get(i, i)).powi(2);
        for j in 0..i {
            sum += 2.0 * (a.get(i, j) - b.get(i, j)).powi(2);
        }
    }
    Ok(sum.sqrt())
}

pub fn frobenius_norm<M: SymMatrix>(a: &M) -> f64 {
    let n = a.dim();
    let mut sum = 0.0;
    for i in 0..n {
        sum += a.get(i, i).powi(2);
        for j in 0..i {
            sum += 2.0 * a.get(i, j).powi(2);
        }
    }
    sum.sqrt()
}

/// Inverts a symmetric positive definite matrix stored row-major in `buf`
/// (dimension `n`), in place, through a Cholesky factorization.
///
/// On failure returns the index of the first non-positive pivot and its value.
fn spd_inverse_in_place(buf: &mut [f64], n: usize, scratch: &mut [f64]) -> Result<(), (usize, f64)> {
    if n == 1 {
        let d = buf[0];
        if !(d > 0.0) || !d.is_finite() {
            return Err((0, d));
        }
        buf[0] = 1.0 / d;
        return Ok(());
    }
    // Cholesky: lower factor overwrites the lower triangle of buf.
    for j in 0..n {
        let mut d = buf[j * n + j];
        for k in 0..j {
            d -= buf[j * n + k] * buf[j * n + k];
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err((j, d));
        }
        let d = d.sqrt();
        buf[j * n + j] = d;
        for i in j + 1..n {
            let mut s = buf[i * n + j];
            for k in 0..j {
                s -= buf[i * n + k] * buf[j * n + k];
            }
            buf[i * n + j] = s / d;
        }
    }

    // Invert the lower factor into scratch (row-major, lower triangle).
    let linv = &mut scratch[..n * n];
    linv.iter_mut().for_each(|v| *v = 0.0);
    for j in 0..n {
        linv[j * n + j] = 1.0 / buf[j * n + j];
        for i in j + 1..n {
            let mut s = 0.0;
            for k in j..i {
                s -= buf[i * n + k] * linv[k * n + j];
            }
            linv[i * n + j] = s / buf[i * n + i];
        }
    }

    // A^{-1} = L^{-T} L^{-1}; entry (i, j) sums over k >= max(i, j).
    for i in 0..n {
        for j in 0..=i {
            let mut s = 0.0;
            for k in i..n {
                s += linv[k * n + i] * linv[k * n + j];
            }
            buf[i * n + j] = s;
            buf[j * n + i] = s;
        }
    }
    Ok(())
}

/// Exact inverse of a symmetric positive definite matrix.
pub fn dense_inverse(a: &DenseSymMatrix) -> LinalgResult<DenseSymMatrix> {
    let n = a.n;
    let mut buf = a.data.clone();
    let mut scratch = vec![0.0; n * n];
    spd_inverse_in_place(&mut buf, n, &mut scratch)
        .map_err(|(index, value)| LinalgError::NotPositiveDefinite { index, value })?;
    Ok(DenseSymMatrix { n, data: buf })
}

/// Bookkeeping from one [`l_banded_inverse_with_stats`] call.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct InversionStats {
    pub windows_inverted: usize,
    pub max_window_dim: usize,
}

/// L-banded inverse of a symmetric matrix.
///
/// For each zero-based start `l` in `0..n-L` the inverse of the window
/// `l..=l+L` is added into the result, and for each `l` in `1..n-L` the
/// inverse of the overlap `l..=l+L-1` is subtracted. Only entries of `a`
/// with `|i - j| <= L` are read.
pub fn l_banded_inverse<M: SymMatrix>(a: &M, band: usize) -> LinalgResult<BandedSymMatrix> {
    l_banded_inverse_with_stats(a, band).map(|(z, _)| z)
}

pub fn l_banded_inverse_with_stats<M: SymMatrix>(
    a: &M,
    band: usize,
) -> LinalgResult<(BandedSymMatrix, InversionStats)> {
    let n = a.dim();
    if n == 0 || band >= n {
        return Err(LinalgError::InvalidBand { band, n });
    }
    let mut z = BandedSymMatrix::zeros(n, band);
    let mut stats = InversionStats::default();
    let w = band + 1;
    let mut buf = vec![0.0; w * w];
    let mut scratch = vec![0.0; w * w];

    let mut accumulate = |lo: usize, dim: usize, sign: f64, z: &mut BandedSymMatrix| {
        let buf = &mut buf[..dim * dim];
        for i in 0..dim {
            for j in 0..=i {
                let v = a.get(lo + i, lo + j);
                buf[i * dim + j] = v;
                buf[j * dim + i] = v;
            }
        }
        spd_inverse_in_place(buf, dim, &mut scratch).map_err(|_| LinalgError::SingularSubmatrix {
            lo,
            hi: lo + dim - 1,
        })?;
        for i in 0..dim {
            for j in 0..=i {
                z.add_at(lo + i, lo + j, sign * buf[i * dim + j]);
            }
        }
        Ok::<(), LinalgError>(())
    };

    for lo in 0..n - band {
        accumulate(lo, w, 1.0, &mut z)?;
        stats.windows_inverted += 1;
    }
    stats.max_window_dim = w;
    if band > 0 {
        for lo in 1..n - band {
            accumulate(lo, band, -1.0, &mut z)?;
            stats.windows_inverted += 1;
        }
    }
    Ok((z, stats))
}
