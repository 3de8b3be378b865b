//! Dense linear algebra: a column-major matrix and the top-K left singular
//! vectors of a `d × n` matrix.
//!
//! The singular vectors are obtained from the symmetric eigendecomposition of
//! the `d × d` Gram matrix `W Wᵀ`: Householder reduction to tridiagonal form
//! followed by the implicit QL iteration. Word-embedding documents have a
//! fixed, modest `d` and a potentially large `n`, so working on the `d × d`
//! side keeps the cost at `O(d² n + d³)`.

use thiserror::Error;

/// Errors raised by the linear-algebra kernel.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("requested number of singular vectors must be positive")]
    ZeroRank,
    #[error("matrix has no rows or no columns")]
    EmptyMatrix,
    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is not square: {rows} x {cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("eigenvalue iteration did not converge after {0} sweeps")]
    NoConvergence(usize),
    #[error("left singular vectors deviate from orthonormality by {deviation:e} (tolerance {tolerance:e})")]
    NotOrthonormal { deviation: f64, tolerance: f64 },
    #[error("eigen-residual {residual:e} of singular vector {index} exceeds tolerance {tolerance:e}")]
    Residual {
        index: usize,
        residual: f64,
        tolerance: f64,
    },
}

/// Dense real matrix stored column by column.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Builds a matrix from column-major storage.
    ///
    /// Panics if `data.len() != rows * cols`.
    pub fn from_col_major(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "column-major data has wrong length");
        Self { rows, cols, data }
    }

    /// Builds a `rows × columns.len()` matrix whose columns are the given slices.
    ///
    /// Panics if a column does not have `rows` entries.
    pub fn from_columns<C: AsRef<[f64]>>(rows: usize, columns: &[C]) -> Self {
        let mut data = Vec::with_capacity(rows * columns.len());
        for c in columns {
            let c = c.as_ref();
            assert_eq!(c.len(), rows, "column has wrong length");
            data.extend_from_slice(c);
        }
        Self {
            rows,
            cols: columns.len(),
            data,
        }
    }

    /// Builds a matrix from row slices, mostly useful for literals in tests.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut m = Self::zeros(nrows, ncols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            assert_eq!(r.len(), ncols, "ragged rows");
            for (j, &v) in r.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[col * self.rows + row]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[col * self.rows + row] = value;
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn columns(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        // `chunks_exact(0)` panics, so guard the degenerate zero-row case.
        let rows = self.rows.max(1);
        self.data.chunks_exact(rows).take(self.cols)
    }

    pub fn as_col_major(&self) -> &[f64] {
        &self.data
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for j in 0..self.cols {
            for i in 0..self.rows {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn scaled(&self, factor: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }

    /// Plain matrix product `self * other`.
    ///
    /// Panics on incompatible shapes.
    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "incompatible shapes for matmul");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for j in 0..other.cols {
            let dst = &mut out.data[j * self.rows..(j + 1) * self.rows];
            for (k, &b) in other.col(j).iter().enumerate() {
                if b == 0.0 {
                    continue;
                }
                for (d, &a) in dst.iter_mut().zip(self.col(k)) {
                    *d += a * b;
                }
            }
        }
        out
    }

    /// `self * selfᵀ`, exploiting symmetry.
    pub fn gram(&self) -> Matrix {
        let d = self.rows;
        let mut g = Matrix::zeros(d, d);
        for w in self.columns() {
            for j in 0..d {
                let wj = w[j];
                if wj == 0.0 {
                    continue;
                }
                let dst = &mut g.data[j * d..j * d + j + 1];
                for (g_ij, &wi) in dst.iter_mut().zip(&w[..=j]) {
                    *g_ij += wi * wj;
                }
            }
        }
        for j in 0..d {
            for i in 0..j {
                let v = g.get(i, j);
                g.set(j, i, v);
            }
        }
        g
    }

    fn check_finite(&self) -> Result<(), LinalgError> {
        match self.data.iter().position(|v| !v.is_finite()) {
            Some(p) => Err(LinalgError::NonFinite {
                row: p % self.rows,
                col: p / self.rows,
            }),
            None => Ok(()),
        }
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Tolerances applied to the post-conditions of [`top_k_svd_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvdOptions {
    /// Maximum absolute entrywise deviation of `Uᵀ U` from the identity.
    pub orthonormality_tol: f64,
    /// Maximum `‖W Wᵀ u − σ² u‖` relative to `max(1, σ₁²)`.
    pub residual_tol: f64,
}

impl Default for SvdOptions {
    fn default() -> Self {
        Self {
            orthonormality_tol: 1e-8,
            residual_tol: 1e-8,
        }
    }
}

/// Leading left singular vectors and singular values of a matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSvd {
    left_vectors: Matrix,
    singular_values: Vec<f64>,
    requested_k: usize,
}

impl TruncatedSvd {
    /// `d × K'` matrix with orthonormal columns ordered by singular value.
    pub fn left_vectors(&self) -> &Matrix {
        &self.left_vectors
    }

    /// Nonincreasing, nonnegative singular values.
    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    /// Number of vectors actually returned, `min(K, d, n)`.
    pub fn effective_k(&self) -> usize {
        self.singular_values.len()
    }

    pub fn requested_k(&self) -> usize {
        self.requested_k
    }

    pub fn was_clamped(&self) -> bool {
        self.effective_k() < self.requested_k
    }
}

/// Top-`k` left singular vectors of `w` with default tolerances.
pub fn top_k_svd(w: &Matrix, k: usize) -> Result<TruncatedSvd, LinalgError> {
    top_k_svd_with(w, k, &SvdOptions::default())
}

/// Top-`k` left singular vectors of `w`.
///
/// `k` is clamped to `min(d, n)`. Each returned vector has its entry of
/// largest magnitude made positive (first such entry on ties), so the output
/// is reproducible bit for bit on identical input.
pub fn top_k_svd_with(
    w: &Matrix,
    k: usize,
    options: &SvdOptions,
) -> Result<TruncatedSvd, LinalgError> {
    if k == 0 {
        return Err(LinalgError::ZeroRank);
    }
    if w.rows() == 0 || w.cols() == 0 {
        return Err(LinalgError::EmptyMatrix);
    }
    w.check_finite()?;

    let d = w.rows();
    let effective = k.min(d).min(w.cols());
    let gram = w.gram();
    let (eigenvalues, eigenvectors) = symmetric_eigen(&gram)?;

    let mut left = Matrix::zeros(d, effective);
    let mut singular_values = Vec::with_capacity(effective);
    for (j, &lambda) in eigenvalues.iter().enumerate().take(effective) {
        let dst = left.col_mut(j);
        dst.copy_from_slice(eigenvectors.col(j));
        fix_sign(dst);
        singular_values.push(lambda.max(0.0).sqrt());
    }

    let svd = TruncatedSvd {
        left_vectors: left,
        singular_values,
        requested_k: k,
    };
    verify(&svd, &gram, options)?;
    Ok(svd)
}

fn fix_sign(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

fn verify(svd: &TruncatedSvd, gram: &Matrix, options: &SvdOptions) -> Result<(), LinalgError> {
    let u = &svd.left_vectors;
    let k = u.cols();
    let mut deviation: f64 = 0.0;
    for a in 0..k {
        for b in a..k {
            let target = if a == b { 1.0 } else { 0.0 };
            deviation = deviation.max((dot(u.col(a), u.col(b)) - target).abs());
        }
    }
    if deviation > options.orthonormality_tol {
        return Err(LinalgError::NotOrthonormal {
            deviation,
            tolerance: options.orthonormality_tol,
        });
    }

    let scale = svd
        .singular_values
        .first()
        .map_or(1.0, |s| (s * s).max(1.0));
    let mut image = vec![0.0; gram.rows()];
    for (index, sigma) in svd.singular_values.iter().enumerate() {
        let lambda = sigma * sigma;
        let v = u.col(index);
        image.iter_mut().for_each(|x| *x = 0.0);
        for (j, &vj) in v.iter().enumerate() {
            for (dst, &g) in image.iter_mut().zip(gram.col(j)) {
                *dst += g * vj;
            }
        }
        let residual = image
            .iter()
            .zip(v)
            .map(|(gv, vi)| (gv - lambda * vi).powi(2))
            .sum::<f64>()
            .sqrt()
            / scale;
        if residual > options.residual_tol {
            return Err(LinalgError::Residual {
                index,
                residual,
                tolerance: options.residual_tol,
            });
        }
    }
    Ok(())
}

/// Full eigendecomposition of a symmetric matrix.
///
/// Returns eigenvalues in nonincreasing order and the matching orthonormal
/// eigenvectors as columns. Only the lower triangle of `a` is read.
pub fn symmetric_eigen(a: &Matrix) -> Result<(Vec<f64>, Matrix), LinalgError> {
    if a.rows() != a.cols() {
        return Err(LinalgError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if a.rows() == 0 {
        return Err(LinalgError::EmptyMatrix);
    }
    a.check_finite()?;
    let n = a.rows();

    // Row-major working copy: v[i * n + j] holds V(i, j).
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let x = a.get(i, j);
            v[i * n + j] = x;
            v[j * n + i] = x;
        }
    }
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n];
    tridiagonalize(n, &mut v, &mut diag, &mut off);
    tridiagonal_ql(n, &mut v, &mut diag, &mut off)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| diag[y].total_cmp(&diag[x]).then(x.cmp(&y)));

    let values = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (dst_col, &src_col) in order.iter().enumerate() {
        let dst = vectors.col_mut(dst_col);
        for (row, x) in dst.iter_mut().enumerate() {
            *x = v[row * n + src_col];
        }
    }
    Ok((values, vectors))
}

/// Householder reduction of the symmetric matrix held in `v` to tridiagonal
/// form. On return `v` holds the accumulated orthogonal transform, `d` the
/// diagonal and `e[1..]` the subdiagonal.
fn tridiagonalize(n: usize, v: &mut [f64], d: &mut [f64], e: &mut [f64]) {
    let idx = |i: usize, j: usize| i * n + j;
    for j in 0..n {
        d[j] = v[idx(n - 1, j)];
    }

    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for x in &d[..i] {
            scale += x.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[idx(i - 1, j)];
                v[idx(i, j)] = 0.0;
                v[idx(j, i)] = 0.0;
            }
        } else {
            for x in &mut d[..i] {
                *x /= scale;
                h += *x * *x;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for x in &mut e[..i] {
                *x = 0.0;
            }

            for j in 0..i {
                f = d[j];
                v[idx(j, i)] = f;
                g = e[j] + v[idx(j, j)] * f;
                for k in (j + 1)..i {
                    g += v[idx(k, j)] * d[k];
                    e[k] += v[idx(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[idx(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[idx(i - 1, j)];
                v[idx(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }

    // Accumulate transformations.
    for i in 0..n.saturating_sub(1) {
        v[idx(n - 1, i)] = v[idx(i, i)];
        v[idx(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[idx(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[idx(k, i + 1)] * v[idx(k, j)];
                }
                for k in 0..=i {
                    v[idx(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[idx(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[idx(n - 1, j)];
        v[idx(n - 1, j)] = 0.0;
    }
    v[idx(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

const MAX_QL_ITERATIONS: usize = 64;

/// Implicit QL iteration on a symmetric tridiagonal matrix, accumulating the
/// rotations into `v`. Eigenvalues are left in `d`, unsorted.
fn tridiagonal_ql(n: usize, v: &mut [f64], d: &mut [f64], e: &mut [f64]) -> Result<(), LinalgError> {
    let idx = |i: usize, j: usize| i * n + j;
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }

        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_QL_ITERATIONS {
                    return Err(LinalgError::NoConvergence(MAX_QL_ITERATIONS));
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for x in &mut d[(l + 2)..n] {
                    *x -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        let vk1 = v[idx(k, i + 1)];
                        let vk = v[idx(k, i)];
                        v[idx(k, i + 1)] = s * vk + c * vk1;
                        v[idx(k, i)] = c * vk - s * vk1;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;

                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}
