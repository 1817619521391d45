//! Small dense linear-algebra helpers on complex matrices.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Largest absolute deviation from Hermiticity.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut dev = 0.0f64;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// `(m + m†) / 2`.
pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

pub fn trace_re(m: &CMatrix) -> f64 {
    (0..m.nrows()).map(|i| m[(i, i)].re).sum()
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Eigenvalues (ascending order not guaranteed) of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    match m.nrows() {
        0 => Vec::new(),
        1 => vec![m[(0, 0)].re],
        2 => {
            let a = m[(0, 0)].re;
            let d = m[(1, 1)].re;
            let b = m[(0, 1)];
            let half_tr = 0.5 * (a + d);
            let disc = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
            vec![half_tr + disc, half_tr - disc]
        }
        _ => hermitize(m).symmetric_eigenvalues().iter().copied().collect(),
    }
}

/// Raw eigen-pairs of a Hermitian matrix, eigenvalues descending.
pub fn hermitian_eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = hermitize(m).symmetric_eigen();
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[j]
            .partial_cmp(&eig.eigenvalues[i])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(i.cmp(&j))
    });
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vectors.set_column(k, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

/// Applies a real function to the spectrum of a Hermitian matrix.
#[cfg(test)]
pub fn hermitian_function(m: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let (vals, vecs) = hermitian_eigh(m);
    let n = m.nrows();
    let mut out = CMatrix::zeros(n, n);
    for (k, &v) in vals.iter().enumerate() {
        let col = vecs.column(k);
        let fv = f(v);
        if fv == 0.0 {
            continue;
        }
        out += col * col.adjoint() * C64::new(fv, 0.0);
    }
    out
}

/// Kronecker product.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Orthonormalizes the columns of `m` in place order (modified Gram-Schmidt,
/// two passes). Returns `None` when a column is numerically dependent.
pub fn orthonormalize_columns(m: &CMatrix) -> Option<CMatrix> {
    let mut q = m.clone();
    let cols = q.ncols();
    for k in 0..cols {
        for _pass in 0..2 {
            for j in 0..k {
                let proj = q.column(j).dotc(&q.column(k));
                let qj = q.column(j).clone_owned();
                let mut ck = q.column_mut(k);
                ck -= qj * proj;
            }
        }
        let norm = q.column(k).norm();
        if norm < 1e-12 {
            return None;
        }
        let mut ck = q.column_mut(k);
        ck /= C64::new(norm, 0.0);
    }
    Some(q)
}

/// `‖m† m − I‖_max`: deviation of the columns from orthonormality.
pub fn isometry_deviation(m: &CMatrix) -> f64 {
    let g = m.adjoint() * m;
    let mut dev = 0.0f64;
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            let target = if i == j { ONE } else { ZERO };
            dev = dev.max((g[(i, j)] - target).norm());
        }
    }
    dev
}

/// Integer matrix power for square matrices (`k` may be zero).
#[cfg(test)]
pub fn matrix_power(m: &CMatrix, k: usize) -> CMatrix {
    let mut out = CMatrix::identity(m.nrows(), m.ncols());
    for _ in 0..k {
        out = &out * m;
    }
    out
}
