//! Quantum channels on one or two qutrits and their process (χ) matrices.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, hermiticity_error, identity, trace, CMatrix, C64};
use crate::noise::{propagate, LindbladOptions, Liouvillian, NoiseModel};

pub const TP_TOL: f64 = 1e-8;
pub const CHOI_TOL: f64 = 1e-7;

/// Linear map on d×d operators stored as the images of the matrix units.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumChannel {
    dim: usize,
    /// images[i * dim + j] = ε(|i⟩⟨j|)
    images: Vec<CMatrix>,
}

fn unit(dim: usize, i: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(dim, dim);
    m[(i, j)] = C64::new(1.0, 0.0);
    m
}

impl QuantumChannel {
    pub fn from_fn(dim: usize, f: impl Fn(&CMatrix) -> Result<CMatrix>) -> Result<Self> {
        let mut images = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                let out = f(&unit(dim, i, j))?;
                if out.nrows() != dim || out.ncols() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, found: out.nrows() });
                }
                images.push(out);
            }
        }
        Ok(Self { dim, images })
    }

    pub fn from_unitary(u: &CMatrix) -> Self {
        let ud = u.adjoint();
        let dim = u.nrows();
        let images = (0..dim * dim).map(|k| u * unit(dim, k / dim, k % dim) * &ud).collect();
        Self { dim, images }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_unitary(&identity(dim))
    }

    /// Channel of a compiled circuit under the Lindblad backend.
    pub fn from_circuit(circuit: &Circuit, noise: &NoiseModel, opts: LindbladOptions) -> Result<Self> {
        let liouvillian = Liouvillian::new(noise, circuit.n_qutrits())?;
        let dim = 3usize.pow(circuit.n_qutrits() as u32);
        // columns of the identity = vectorized matrix units, column k = |k % d⟩⟨k / d|
        let (super_op, _) = propagate(circuit, &liouvillian, opts, identity(dim * dim))?;
        let images = (0..dim * dim)
            .map(|k| {
                let (i, j) = (k / dim, k % dim);
                let col = super_op.column(j * dim + i);
                CMatrix::from_column_slice(dim, dim, col.as_slice())
            })
            .collect();
        Ok(Self { dim, images })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn apply(&self, rho: &CMatrix) -> Result<CMatrix> {
        if rho.nrows() != self.dim || rho.ncols() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: rho.nrows() });
        }
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                let c = rho[(i, j)];
                if c != C64::new(0.0, 0.0) {
                    out += &self.images[i * self.dim + j] * c;
                }
            }
        }
        Ok(out)
    }

    /// Choi operator Σ |i⟩⟨j| ⊗ ε(|i⟩⟨j|).
    pub fn choi(&self) -> CMatrix {
        let d = self.dim;
        let mut c = CMatrix::zeros(d * d, d * d);
        for i in 0..d {
            for j in 0..d {
                c.view_mut((i * d, j * d), (d, d)).copy_from(&self.images[i * d + j]);
            }
        }
        c
    }

    /// Largest |Tr ε(X) − Tr X| over `samples` random operators X.
    pub fn trace_preservation_error(&self, samples: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for _ in 0..samples {
            let x = CMatrix::from_fn(d, d, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            let y = self.apply(&x).expect("matching dimension");
            worst = worst.max((trace(&y) - trace(&x)).norm());
        }
        worst
    }

    /// Rejects maps that are not trace preserving or not completely positive.
    pub fn check_cptp(&self) -> Result<()> {
        let tp = self.trace_preservation_error(8, 0x5eed);
        if tp > TP_TOL {
            return Err(Error::NotCptp(format!("trace preservation error {tp:.2e}")));
        }
        let choi = self.choi();
        if hermiticity_error(&choi) > 1e-9 {
            return Err(Error::NotCptp("Choi operator is not Hermitian".into()));
        }
        let min = hermitian_eigen(&choi).0[0];
        if min < -CHOI_TOL {
            return Err(Error::NotCptp(format!("Choi eigenvalue {min:.2e}")));
        }
        Ok(())
    }
}

/// χ over the matrix-unit basis E_(a,i) = |a⟩⟨i|, indexed a·d + i.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessMatrix {
    pub dim: usize,
    pub chi: CMatrix,
}

/// χ with ε(ρ) = Σ χ_mn E_m ρ E_n†; χ_(a,i),(c,j) = ⟨a|ε(|i⟩⟨j|)|c⟩.
pub fn chi_matrix(channel: &QuantumChannel) -> Result<ProcessMatrix> {
    channel.check_cptp()?;
    let d = channel.dim;
    let chi = CMatrix::from_fn(d * d, d * d, |m, n| {
        let (a, i) = (m / d, m % d);
        let (c, j) = (n / d, n % d);
        channel.images[i * d + j][(a, c)]
    });
    Ok(ProcessMatrix { dim: d, chi })
}

/// Tr(χ_ideal χ) with both normalized to unit trace.
pub fn process_fidelity(chi: &ProcessMatrix, chi_ideal: &ProcessMatrix) -> Result<f64> {
    if chi.dim != chi_ideal.dim {
        return Err(Error::DimensionMismatch { expected: chi_ideal.dim, found: chi.dim });
    }
    let norm = trace(&chi.chi).re * trace(&chi_ideal.chi).re;
    Ok((trace(&(&chi_ideal.chi * &chi.chi)).re / norm).clamp(0.0, 1.0))
}
