#![allow(dead_code)]

use hidden_topics::Matrix;
use nalgebra::DMatrix;
use rand::Rng;

pub fn random_matrix<R: Rng>(rng: &mut R, d: usize, n: usize) -> Matrix {
    let data = (0..d * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    Matrix::from_col_major(d, n, data)
}

pub fn to_nalgebra(m: &Matrix) -> DMatrix<f64> {
    DMatrix::from_column_slice(m.rows(), m.cols(), m.as_col_major())
}

/// Eigenvalues of `W Wᵀ` (descending) and the matching eigenvectors, via
/// nalgebra's symmetric eigensolver.
pub fn gram_eigen_oracle(w: &Matrix) -> (Vec<f64>, DMatrix<f64>) {
    let a = to_nalgebra(w);
    let gram = &a * a.transpose();
    let dim = gram.nrows();
    let eig = gram.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[y].total_cmp(&eig.eigenvalues[x]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(dim, order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// `U_K U_Kᵀ` from the oracle's leading `k` eigenvectors.
pub fn oracle_projector(w: &Matrix, k: usize) -> DMatrix<f64> {
    let (_, vectors) = gram_eigen_oracle(w);
    let u = vectors.columns(0, k).into_owned();
    &u * u.transpose()
}

pub fn projector(u: &Matrix) -> DMatrix<f64> {
    let u = to_nalgebra(u);
    &u * u.transpose()
}

pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).abs().max()
}

/// Spectral gap after the `k`-th eigenvalue of `W Wᵀ` (the trailing
/// eigenvalue counts as 0 when `k` equals `d`).
pub fn gap_after(w: &Matrix, k: usize) -> f64 {
    let (values, _) = gram_eigen_oracle(w);
    values[k - 1] - values.get(k).copied().unwrap_or(0.0)
}

pub fn squared_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

/// ‖hᵀ W‖² by direct multiplication.
pub fn captured_energy(h: &[f64], w: &Matrix) -> f64 {
    (0..w.cols())
        .map(|j| {
            let c: f64 = h.iter().zip(w.col(j)).map(|(a, b)| a * b).sum();
            c * c
        })
        .sum()
}
