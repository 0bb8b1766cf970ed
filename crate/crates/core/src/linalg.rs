//! Dense Hermitian helpers on top of nalgebra.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

/// Eigen-decomposition with eigenvalues sorted ascending and eigenvector
/// columns permuted to match.
#[derive(Debug, Clone)]
pub struct SortedEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

pub fn hermitian_eigen(a: &CMatrix) -> SortedEigen {
    let n = a.nrows();
    if n == 0 {
        return SortedEigen {
            values: Vec::new(),
            vectors: CMatrix::zeros(0, 0),
        };
    }
    let eig = SymmetricEigen::new(a.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    SortedEigen { values, vectors }
}

pub fn hermitian_eigenvalues(a: &CMatrix) -> Vec<f64> {
    if a.nrows() == 0 {
        return Vec::new();
    }
    let mut v: Vec<f64> = a.clone().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn real_symmetric_eigen(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let eig = SymmetricEigen::new(a.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// max |a_ij − conj(a_ji)|.
pub fn hermitian_defect(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().fold(0.0, |m, z| m.max(z.norm()))
}

/// (A + A*)/2.
pub fn hermitian_part(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    CMatrix::from_fn(n, n, |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5)
}
