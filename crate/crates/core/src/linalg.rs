//! Dense complex linear-algebra helpers shared by the simulators.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Kronecker product with `a` acting on the more significant digit.
pub fn tensor(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    if !a.is_square() || !b.is_square() {
        return Err(Error::InvalidArgument("tensor operands must be square".into()));
    }
    Ok(a.kronecker(b))
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

pub fn dagger(m: &CMatrix) -> CMatrix {
    m.adjoint()
}

/// e^{iθ}
pub fn cis(theta: f64) -> C64 {
    C64::from_polar(1.0, theta)
}

pub fn diag(entries: &[C64]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_column_slice(entries))
}

/// Max-abs entry of U†U − I.
pub fn unitarity_error(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let prod = m.adjoint() * m;
    (prod - identity(n)).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn is_unitary(m: &CMatrix, tol: f64) -> bool {
    m.is_square() && unitarity_error(m) <= tol
}

/// Max-abs entry of M − M†.
pub fn hermiticity_error(m: &CMatrix) -> f64 {
    (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Max-abs entry distance between `a` and `b` after removing the best global phase.
pub fn phase_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    let overlap: C64 = b.iter().zip(a.iter()).map(|(x, y)| x.conj() * y).sum();
    let phase = if overlap.norm() > 1e-300 { overlap / overlap.norm() } else { ONE };
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - phase * y).norm())
        .fold(0.0, f64::max)
}

/// True when `a == e^{iφ} b` for some φ, entrywise within `tol`.
pub fn equal_up_to_phase(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
    phase_distance(a, b) <= tol
}

/// Eigen-decomposition of a Hermitian matrix; eigenvalues ascending.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let herm = (m + m.adjoint()).scale(0.5);
    let eig = herm.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// f(M) for Hermitian M through its spectral decomposition.
pub fn hermitian_fn(m: &CMatrix, f: impl Fn(f64) -> C64) -> CMatrix {
    let (vals, vecs) = hermitian_eigen(m);
    let d: Vec<C64> = vals.into_iter().map(f).collect();
    &vecs * diag(&d) * vecs.adjoint()
}

/// Principal square root of a positive semidefinite matrix (negative eigenvalues clipped).
pub fn psd_sqrt(m: &CMatrix) -> CMatrix {
    hermitian_fn(m, |x| C64::new(x.max(0.0).sqrt(), 0.0))
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}

/// Embed a k-qutrit operator acting on `targets` into an n-qutrit space.
///
/// The first entry of `targets` is the most significant digit of the local operator.
pub fn embed(op: &CMatrix, targets: &[usize], n_qutrits: usize) -> Result<CMatrix> {
    check_targets(targets, n_qutrits)?;
    let local_dim = 3usize.pow(targets.len() as u32);
    if op.nrows() != local_dim || op.ncols() != local_dim {
        return Err(Error::DimensionMismatch { expected: local_dim, found: op.nrows() });
    }
    let dim = 3usize.pow(n_qutrits as u32);
    let mut out = CMatrix::zeros(dim, dim);
    let mut digits = vec![0usize; n_qutrits];
    for col in 0..dim {
        index_to_digits(col, &mut digits);
        let local_col = targets.iter().fold(0, |acc, &q| acc * 3 + digits[q]);
        for local_row in 0..local_dim {
            let amp = op[(local_row, local_col)];
            if amp == ZERO {
                continue;
            }
            let mut row_digits = digits.clone();
            let mut rem = local_row;
            for &q in targets.iter().rev() {
                row_digits[q] = rem % 3;
                rem /= 3;
            }
            let row = row_digits.iter().fold(0, |acc, &d| acc * 3 + d);
            out[(row, col)] += amp;
        }
    }
    Ok(out)
}

pub(crate) fn check_targets(targets: &[usize], n_qutrits: usize) -> Result<()> {
    if targets.is_empty() {
        return Err(Error::InvalidTargets("no targets given".into()));
    }
    for (i, &q) in targets.iter().enumerate() {
        if q >= n_qutrits {
            return Err(Error::InvalidTargets(format!(
                "qutrit {q} out of range for {n_qutrits} qutrits"
            )));
        }
        if targets[..i].contains(&q) {
            return Err(Error::InvalidTargets(format!("qutrit {q} listed twice")));
        }
    }
    Ok(())
}

fn index_to_digits(mut index: usize, digits: &mut [usize]) {
    for d in digits.iter_mut().rev() {
        *d = index % 3;
        index /= 3;
    }
}
