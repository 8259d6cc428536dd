//! Dense numeric kernels.
//!
//! Everything here is a pure function over [`DenseMatrix`] values. Matrix
//! products and SVD go through `faer`; the row-major buffers are viewed
//! in place so no copies are made on the way in.

use faer::linalg::matmul::matmul;
use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::svd::ComputeSvdVectors;
use faer::diag::Diag;
use faer::{linalg, Accum, Mat, MatMut, MatRef, Par};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Row-major matrix of finite `f64` values.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * diag.len() + i] = d;
        }
        m
    }

    /// Wraps a row-major buffer. Fails on a shape mismatch or a non-finite entry.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::validation(format!(
                "buffer of length {} cannot hold a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::validation(format!(
                "non-finite entry at ({}, {})",
                pos / cols.max(1),
                pos % cols.max(1)
            )));
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    /// Builds a matrix from nested rows; all rows must have equal length.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::validation(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Self::from_vec(rows.len(), cols, data)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        DenseMatrix { rows, cols, data }
    }

    // Kernel outputs that are finite by construction skip the scan.
    pub(crate) fn from_raw(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        DenseMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[f64]> {
        // chunks_exact(0) panics, and a 0-column matrix still has rows
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> DenseMatrix {
        DenseMatrix::from_raw(self.rows, self.cols, self.data.iter().map(|&v| f(v)).collect())
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        out
    }

    /// Rows selected by index, in order (duplicates allowed).
    pub fn select_rows(&self, idx: &[usize]) -> DenseMatrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        DenseMatrix::from_raw(idx.len(), self.cols, data)
    }

    /// Columns selected by index, in order (duplicates allowed).
    pub fn select_cols(&self, idx: &[usize]) -> DenseMatrix {
        let mut data = Vec::with_capacity(idx.len() * self.rows);
        for row in self.row_iter() {
            data.extend(idx.iter().map(|&j| row[j]));
        }
        DenseMatrix::from_raw(self.rows, idx.len(), data)
    }

    pub fn sub(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.shape(), other.shape(), "shape mismatch in sub");
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        DenseMatrix::from_raw(self.rows, self.cols, data)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &DenseMatrix) -> f64 {
        assert_eq!(self.shape(), other.shape(), "shape mismatch in max_abs_diff");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn as_faer(&self) -> MatRef<'_, f64> {
        MatRef::from_row_major_slice(&self.data, self.rows, self.cols)
    }

    fn from_faer(m: MatRef<'_, f64>) -> DenseMatrix {
        DenseMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }

    /// `self · other`
    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows, "inner dimension mismatch");
        gemm(self.as_faer(), other.as_faer())
    }

    /// `self · otherᵀ`
    pub fn matmul_t(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.cols, "inner dimension mismatch");
        gemm(self.as_faer(), other.as_faer().transpose())
    }

    /// `selfᵀ · other`
    pub fn t_matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.rows, other.rows, "inner dimension mismatch");
        gemm(self.as_faer().transpose(), other.as_faer())
    }
}

thread_local! {
    static SEQUENTIAL: std::cell::Cell<bool> = const { std::cell::Cell::new(false) };
}

/// Runs `f` with dense kernels on the calling thread only. Results then do
/// not depend on how many threads are available.
pub fn sequential<T>(f: impl FnOnce() -> T) -> T {
    let prev = SEQUENTIAL.with(|c| c.replace(true));
    let out = f();
    SEQUENTIAL.with(|c| c.set(prev));
    out
}

/// Parallelism for dense products, capped by `COOCMAP_THREADS` when set.
pub fn parallelism() -> Par {
    if SEQUENTIAL.with(|c| c.get()) {
        return Par::Seq;
    }
    match std::env::var("COOCMAP_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        Some(0) | None => {
            if rayon::current_num_threads() > 1 {
                Par::rayon(0)
            } else {
                Par::Seq
            }
        }
        Some(1) => Par::Seq,
        Some(n) => Par::rayon(n),
    }
}

fn gemm(lhs: MatRef<'_, f64>, rhs: MatRef<'_, f64>) -> DenseMatrix {
    let (rows, cols) = (lhs.nrows(), rhs.ncols());
    let mut out = DenseMatrix::zeros(rows, cols);
    if rows > 0 && cols > 0 {
        let dst = MatMut::from_row_major_slice_mut(&mut out.data, rows, cols);
        matmul(dst, Accum::Replace, lhs, rhs, 1.0, parallelism());
    }
    out
}

/// Entrywise power. Fractional exponents require nonnegative entries.
pub fn epow(x: &DenseMatrix, alpha: f64) -> Result<DenseMatrix> {
    if alpha == 1.0 {
        return Ok(x.clone());
    }
    if alpha.fract() != 0.0 {
        if let Some(pos) = x.data.iter().position(|&v| v < 0.0) {
            return Err(Error::validation(format!(
                "negative entry at ({}, {}) cannot be raised to {alpha}",
                pos / x.cols,
                pos % x.cols
            )));
        }
    }
    let out = if alpha == 0.5 {
        x.map(f64::sqrt)
    } else {
        x.map(|v| v.powf(alpha))
    };
    if out.data.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric(format!("epow({alpha}) produced a non-finite entry")));
    }
    Ok(out)
}

fn scale_rows(x: &DenseMatrix, norm: impl Fn(&[f64]) -> f64) -> DenseMatrix {
    let mut out = x.clone();
    for i in 0..out.rows {
        let row = out.row_mut(i);
        let n = norm(row);
        if n > 0.0 {
            row.iter_mut().for_each(|v| *v /= n);
        }
    }
    out
}

/// Scales every row to unit ℓ₂ norm; zero rows stay zero.
pub fn unitr(x: &DenseMatrix) -> DenseMatrix {
    scale_rows(x, |r| r.iter().map(|v| v * v).sum::<f64>().sqrt())
}

/// Scales every row to unit ℓ₁ norm; zero rows stay zero.
pub fn unit_l1(x: &DenseMatrix) -> DenseMatrix {
    scale_rows(x, |r| r.iter().map(|v| v.abs()).sum::<f64>())
}

/// Subtracts the column means.
pub fn centerc(x: &DenseMatrix) -> DenseMatrix {
    let mut means = vec![0.0; x.cols];
    for row in x.row_iter() {
        for (m, v) in means.iter_mut().zip(row) {
            *m += v;
        }
    }
    let n = x.rows.max(1) as f64;
    means.iter_mut().for_each(|m| *m /= n);
    let mut out = x.clone();
    for i in 0..out.rows {
        for (v, m) in out.row_mut(i).iter_mut().zip(&means) {
            *v -= m;
        }
    }
    out
}

/// `unitr(centerc(unitr(x)))`
pub fn normalize(x: &DenseMatrix) -> DenseMatrix {
    unitr(&centerc(&unitr(x)))
}

/// Linear-interpolation percentile with inclusive endpoints.
///
/// `p` is in percent. Panics on an empty slice.
pub fn percentile(values: &[f64], p: f64) -> f64 {
    assert!(!values.is_empty(), "percentile of an empty set");
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    percentile_sorted(&sorted, p)
}

pub(crate) fn percentile_sorted(sorted: &[f64], p: f64) -> f64 {
    let pos = (p.clamp(0.0, 100.0) / 100.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (sorted[hi] - sorted[lo]) * frac
    }
}

/// Matrix-wide bounds produced by the two-level percentile rule.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClipThresholds {
    pub lower: f64,
    pub upper: f64,
}

impl ClipThresholds {
    pub fn clips(&self, v: f64) -> bool {
        v < self.lower || v > self.upper
    }
}

/// Percentile of row percentiles, once for each bound.
pub fn clip_thresholds(x: &DenseMatrix, p_lo: f64, p_hi: f64) -> Result<ClipThresholds> {
    if !(0.0 <= p_lo && p_lo < p_hi && p_hi <= 100.0) {
        return Err(Error::validation(format!(
            "clip percentiles must satisfy 0 <= lo < hi <= 100, got ({p_lo}, {p_hi})"
        )));
    }
    if x.rows == 0 || x.cols == 0 {
        return Err(Error::validation("cannot clip an empty matrix"));
    }
    let mut row_lo = Vec::with_capacity(x.rows);
    let mut row_hi = Vec::with_capacity(x.rows);
    let mut buf = Vec::with_capacity(x.cols);
    for row in x.row_iter() {
        buf.clear();
        buf.extend_from_slice(row);
        buf.sort_by(f64::total_cmp);
        row_lo.push(percentile_sorted(&buf, p_lo));
        row_hi.push(percentile_sorted(&buf, p_hi));
    }
    Ok(ClipThresholds {
        lower: percentile(&row_lo, p_lo),
        upper: percentile(&row_hi, p_hi),
    })
}

pub fn clip_with(x: &DenseMatrix, t: ClipThresholds) -> DenseMatrix {
    x.map(|v| v.clamp(t.lower, t.upper))
}

/// Limits every entry to the matrix-wide percentile thresholds.
pub fn clip(x: &DenseMatrix, p_lo: f64, p_hi: f64) -> Result<DenseMatrix> {
    Ok(clip_with(x, clip_thresholds(x, p_lo, p_hi)?))
}

/// Thin SVD `U · diag(S) · Vt` with a deterministic sign convention.
#[derive(Clone, Debug)]
pub struct SvdFactors {
    pub u: DenseMatrix,
    pub s: Vec<f64>,
    pub vt: DenseMatrix,
}

impl SvdFactors {
    /// Rank-`r` reconstruction (`r` is clamped to the number of factors).
    pub fn reconstruct(&self, r: usize) -> DenseMatrix {
        let r = r.min(self.s.len());
        let us = DenseMatrix::from_fn(self.u.rows, r, |i, j| self.u.get(i, j) * self.s[j]);
        let vt = DenseMatrix::from_fn(r, self.vt.cols, |i, j| self.vt.get(i, j));
        us.matmul(&vt)
    }
}

/// Thin SVD. In each column of `U` the entry of largest magnitude (lowest
/// index on ties) is made nonnegative; `Vt` is flipped to compensate.
pub fn svd(x: &DenseMatrix) -> Result<SvdFactors> {
    if x.rows == 0 || x.cols == 0 {
        return Err(Error::validation("svd of an empty matrix"));
    }
    let (m, n) = (x.rows, x.cols);
    let k = m.min(n);
    let par = parallelism();
    let mut fu = Mat::<f64>::zeros(m, k);
    let mut fv = Mat::<f64>::zeros(n, k);
    let mut fs = Diag::<f64>::zeros(k);
    let thin = ComputeSvdVectors::Thin;
    let mut buf = MemBuffer::new(linalg::svd::svd_scratch::<f64>(m, n, thin, thin, par, Default::default()));
    linalg::svd::svd(
        x.as_faer(),
        fs.as_mut(),
        Some(fu.as_mut()),
        Some(fv.as_mut()),
        par,
        MemStack::new(&mut buf),
        Default::default(),
    )
    .map_err(|e| Error::Numeric(format!("svd of {m}x{n} did not converge: {e:?}")))?;
    let mut u = DenseMatrix::from_faer(fu.as_ref());
    let mut vt = DenseMatrix::from_faer(fv.transpose());
    let s: Vec<f64> = fs.column_vector().iter().copied().collect();
    for j in 0..u.cols {
        let mut best = 0;
        for i in 1..u.rows {
            if u.get(i, j).abs() > u.get(best, j).abs() {
                best = i;
            }
        }
        if u.get(best, j) < 0.0 {
            for i in 0..u.rows {
                u.set(i, j, -u.get(i, j));
            }
            vt.row_mut(j).iter_mut().for_each(|v| *v = -*v);
        }
    }
    if s.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric(format!("svd of {}x{} produced non-finite values", x.rows, x.cols)));
    }
    Ok(SvdFactors { u, s, vt })
}

/// `x − x_r`, removing the `r` largest singular directions.
pub fn drop_head(x: &DenseMatrix, r: usize) -> Result<DenseMatrix> {
    if r == 0 {
        return Ok(x.clone());
    }
    let f = svd(x)?;
    Ok(x.sub(&f.reconstruct(r)))
}

/// Best rank-`r` approximation.
pub fn trunc(x: &DenseMatrix, r: usize) -> Result<DenseMatrix> {
    if r >= x.rows.min(x.cols) {
        return Ok(x.clone());
    }
    Ok(svd(x)?.reconstruct(r))
}

/// `(Xv · Xvᵀ)^½ = U · S · Uᵀ` for `Xv = U · S · Vt`.
pub fn psd_sqrt_gram(xv: &DenseMatrix) -> Result<DenseMatrix> {
    let f = svd(xv)?;
    let us = DenseMatrix::from_fn(f.u.rows, f.s.len(), |i, j| f.u.get(i, j) * f.s[j]);
    Ok(us.matmul_t(&f.u))
}

/// Similarity measure used by [`sim_matrix`]; larger is always more similar.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    #[default]
    Cosine,
    Dot,
    NegL2,
    NegL1,
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cosine" => Ok(Metric::Cosine),
            "dot" => Ok(Metric::Dot),
            "neg_l2" | "l2" => Ok(Metric::NegL2),
            "neg_l1" | "l1" => Ok(Metric::NegL1),
            other => Err(Error::validation(format!("unknown metric {other:?}"))),
        }
    }
}

pub(crate) fn row_sq_norms(x: &DenseMatrix) -> Vec<f64> {
    x.row_iter().map(|r| r.iter().map(|v| v * v).sum()).collect()
}

/// Pairwise row similarities, `n × m` for `x: n × k`, `z: m × k`.
pub fn sim_matrix(x: &DenseMatrix, z: &DenseMatrix, metric: Metric) -> DenseMatrix {
    assert_eq!(x.cols, z.cols, "sim_matrix needs equal row widths");
    match metric {
        Metric::Cosine => unitr(x).matmul_t(&unitr(z)),
        Metric::Dot => x.matmul_t(z),
        Metric::NegL2 => {
            let mut g = x.matmul_t(z);
            neg_l2_from_gram(&mut g, &row_sq_norms(x), &row_sq_norms(z));
            g
        }
        Metric::NegL1 => {
            let mut out = DenseMatrix::zeros(x.rows, z.rows);
            for i in 0..x.rows {
                let a = x.row(i);
                for j in 0..z.rows {
                    let d: f64 = a.iter().zip(z.row(j)).map(|(p, q)| (p - q).abs()).sum();
                    out.set(i, j, -d);
                }
            }
            out
        }
    }
}

pub(crate) fn neg_l2_from_gram(g: &mut DenseMatrix, x_sq: &[f64], z_sq: &[f64]) {
    let cols = g.cols;
    for (i, row) in g.data.chunks_mut(cols.max(1)).enumerate().take(x_sq.len()) {
        for (j, v) in row.iter_mut().enumerate() {
            *v = -(x_sq[i] + z_sq[j] - 2.0 * *v).max(0.0).sqrt();
        }
    }
}

/// Orthogonal `W` minimizing `‖Xs · W − Zt‖_F`.
pub fn procrustes(xs: &DenseMatrix, zt: &DenseMatrix) -> Result<DenseMatrix> {
    if xs.rows == 0 || xs.cols == 0 {
        return Err(Error::validation("procrustes needs at least one row and one column"));
    }
    if xs.shape() != zt.shape() {
        return Err(Error::validation(format!(
            "procrustes shapes differ: {:?} vs {:?}",
            xs.shape(),
            zt.shape()
        )));
    }
    let m = xs.t_matmul(zt);
    let f = svd(&m)?;
    Ok(f.u.matmul(&f.vt))
}

/// Sorts every row ascending.
pub fn sortrows(x: &DenseMatrix) -> DenseMatrix {
    let mut out = x.clone();
    for i in 0..out.rows {
        out.row_mut(i).sort_by(f64::total_cmp);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> DenseMatrix {
        DenseMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn epow_examples() {
        assert_eq!(epow(&m(&[&[4.0, 9.0]]), 0.5).unwrap(), m(&[&[2.0, 3.0]]));
        let x = m(&[&[1.0, -2.0], &[3.5, 0.0]]);
        assert_eq!(epow(&x, 1.0).unwrap(), x);
        assert_eq!(
            epow(&m(&[&[1.0, 0.0], &[0.0, 16.0]]), 0.5).unwrap(),
            m(&[&[1.0, 0.0], &[0.0, 4.0]])
        );
        assert!(matches!(epow(&x, 0.5), Err(Error::Validation(_))));
        assert_eq!(epow(&x, 2.0).unwrap(), m(&[&[1.0, 4.0], &[12.25, 0.0]]));
    }

    #[test]
    fn unitr_examples() {
        assert_eq!(unitr(&m(&[&[3.0, 4.0]])), m(&[&[0.6, 0.8]]));
        assert_eq!(unitr(&m(&[&[0.0, 0.0]])), m(&[&[0.0, 0.0]]));
        let unit = m(&[&[0.6, 0.8]]);
        assert_eq!(unitr(&unit), unit);
    }

    #[test]
    fn centerc_examples() {
        assert_eq!(centerc(&m(&[&[1.0, 2.0], &[3.0, 4.0]])), m(&[&[-1.0, -1.0], &[1.0, 1.0]]));
        let c = m(&[&[-1.0, 2.0], &[1.0, -2.0]]);
        assert_eq!(centerc(&c), c);
        assert_eq!(centerc(&m(&[&[5.0]])), m(&[&[0.0]]));
    }

    #[test]
    fn normalize_examples() {
        let h = 0.5f64.sqrt();
        let out = normalize(&DenseMatrix::identity(2));
        assert!(out.max_abs_diff(&m(&[&[h, -h], &[-h, h]])) < 1e-15);

        let same = m(&[&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]]);
        assert_eq!(normalize(&same), DenseMatrix::zeros(2, 3));

        let x = DenseMatrix::from_fn(4, 4, |i, j| ((i * 5 + j * 3) % 7) as f64 - 2.0);
        assert_eq!(normalize(&x), unitr(&centerc(&unitr(&x))));
    }

    #[test]
    fn percentile_examples() {
        assert_eq!(percentile(&[1.0, 2.0, 3.0, 4.0], 50.0), 2.5);
        assert_eq!(percentile(&[7.0], 13.0), 7.0);
        assert_eq!(percentile(&[1.0, 2.0, 3.0, 4.0, 5.0], 100.0), 5.0);
        assert_eq!(percentile(&[5.0, 1.0, 4.0, 2.0, 3.0], 0.0), 1.0);
    }

    #[test]
    fn clip_examples() {
        let flat = DenseMatrix::from_fn(3, 4, |_, _| 0.25);
        assert_eq!(clip(&flat, 1.0, 99.0).unwrap(), flat);

        // Each row repeats its minimum so the lower bound is exactly 0.
        let x = m(&[&[0.0, 0.0, 1.0], &[0.0, 0.0, 1.0], &[0.0, 0.0, 100.0]]);
        let t = clip_thresholds(&x, 1.0, 99.0).unwrap();
        // row 99th percentiles: 0.98, 0.98, 98; then 0.98 + 0.98 * (98 - 0.98)
        assert_eq!(t.lower, 0.0);
        assert!((t.upper - 96.0596).abs() < 1e-12);
        let out = clip(&x, 1.0, 99.0).unwrap();
        let mut expected = x.clone();
        expected.set(2, 2, t.upper);
        assert_eq!(out, expected);

        let inside = m(&[&[0.0, 0.5, 1.0], &[0.0, 0.5, 1.0]]);
        assert_eq!(clip(&inside, 0.0, 100.0).unwrap(), inside);

        assert!(clip(&x, 50.0, 50.0).is_err());
        assert!(clip(&x, -1.0, 50.0).is_err());
    }

    #[test]
    fn drop_and_trunc_examples() {
        let rank1 = DenseMatrix::from_fn(3, 4, |i, j| (i + 1) as f64 * (j as f64 - 1.5));
        assert!(drop_head(&rank1, 1).unwrap().frobenius_norm() < 1e-8);
        assert_eq!(drop_head(&rank1, 0).unwrap(), rank1);

        let d = DenseMatrix::from_diag(&[3.0, 2.0, 1.0]);
        let dropped = drop_head(&d, 1).unwrap();
        assert!(dropped.max_abs_diff(&DenseMatrix::from_diag(&[0.0, 2.0, 1.0])) < 1e-12);

        let t = trunc(&DenseMatrix::from_diag(&[3.0, 1.0]), 1).unwrap();
        assert!(t.max_abs_diff(&m(&[&[3.0, 0.0], &[0.0, 0.0]])) < 1e-12);
        assert_eq!(trunc(&d, 3).unwrap(), d);
    }

    #[test]
    fn svd_sign_convention_and_reconstruction() {
        let x = DenseMatrix::from_fn(5, 3, |i, j| ((i * 7 + j * 3) % 5) as f64 - 1.7);
        let f = svd(&x).unwrap();
        for j in 0..f.u.cols() {
            let col: Vec<f64> = (0..f.u.rows()).map(|i| f.u.get(i, j)).collect();
            let mut best = 0;
            for i in 1..col.len() {
                if col[i].abs() > col[best].abs() {
                    best = i;
                }
            }
            assert!(col[best] >= 0.0);
        }
        assert!(f.s.windows(2).all(|w| w[0] >= w[1]));
        let err = f.reconstruct(3).sub(&x).frobenius_norm() / x.frobenius_norm();
        assert!(err < 1e-12);
        let g = svd(&x).unwrap();
        assert_eq!(f.u, g.u);
    }

    #[test]
    fn psd_sqrt_gram_examples() {
        let out = psd_sqrt_gram(&m(&[&[1.0, 0.0], &[0.0, 2.0]])).unwrap();
        assert!(out.max_abs_diff(&DenseMatrix::from_diag(&[1.0, 2.0])) < 1e-12);

        let h = 0.5f64.sqrt();
        let rot = m(&[&[h, h], &[-h, h]]);
        let out = psd_sqrt_gram(&rot).unwrap();
        assert!(out.max_abs_diff(&DenseMatrix::identity(2)) < 1e-12);
    }

    #[test]
    fn sim_matrix_examples() {
        let a = m(&[&[1.0, 2.0], &[0.0, 0.0]]);
        let b = m(&[&[2.0, 4.0], &[-2.0, 1.0]]);
        let s = sim_matrix(&a, &b, Metric::Cosine);
        assert!((s.get(0, 0) - 1.0).abs() < 1e-15);
        assert!(s.get(0, 1).abs() < 1e-15);
        assert_eq!(s.get(1, 0), 0.0);
        assert_eq!(s.get(1, 1), 0.0);

        let l2 = sim_matrix(&a, &b, Metric::NegL2);
        assert!((l2.get(0, 1) + 10f64.sqrt()).abs() < 1e-12);
        let l1 = sim_matrix(&a, &b, Metric::NegL1);
        assert_eq!(l1.get(0, 0), -3.0);
        assert_eq!(sim_matrix(&a, &b, Metric::Dot).get(0, 0), 10.0);
    }

    #[test]
    fn procrustes_examples() {
        let x = DenseMatrix::from_fn(6, 3, |i, j| ((i * 3 + j * 5) % 7) as f64 - 3.0);
        let w = procrustes(&x, &x).unwrap();
        assert!(w.max_abs_diff(&DenseMatrix::identity(3)) < 1e-10);
        assert!(procrustes(&DenseMatrix::zeros(0, 3), &DenseMatrix::zeros(0, 3)).is_err());
        assert!(procrustes(&x, &DenseMatrix::zeros(6, 2)).is_err());
    }

    #[test]
    fn sortrows_ascending() {
        assert_eq!(sortrows(&m(&[&[3.0, 1.0, 2.0]])), m(&[&[1.0, 2.0, 3.0]]));
    }

    #[test]
    fn metric_parse() {
        assert_eq!("neg_l1".parse::<Metric>().unwrap(), Metric::NegL1);
        assert!("manhattan".parse::<Metric>().is_err());
    }
}
