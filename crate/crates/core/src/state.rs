//! n-qutrit basis labels, states and outcome distributions.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, hermiticity_error, psd_sqrt, trace, CMatrix, CVector, C64};

pub const MAX_QUTRITS: usize = 6;
const NORM_TOL: f64 = 1e-9;

/// Computational basis label; the first digit is the most significant trit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BasisLabel {
    digits: Vec<u8>,
}

impl BasisLabel {
    pub fn new(digits: Vec<u8>) -> Result<Self> {
        if digits.is_empty() || digits.len() > MAX_QUTRITS {
            return Err(Error::InvalidLabel(format!("{} trits", digits.len())));
        }
        if let Some(d) = digits.iter().find(|&&d| d > 2) {
            return Err(Error::InvalidLabel(format!("trit {d} not in {{0,1,2}}")));
        }
        Ok(Self { digits })
    }

    pub fn from_index(index: usize, n_qutrits: usize) -> Result<Self> {
        if n_qutrits == 0 || n_qutrits > MAX_QUTRITS || index >= 3usize.pow(n_qutrits as u32) {
            return Err(Error::InvalidLabel(format!("index {index} for {n_qutrits} qutrits")));
        }
        let mut digits = vec![0u8; n_qutrits];
        let mut rem = index;
        for d in digits.iter_mut().rev() {
            *d = (rem % 3) as u8;
            rem /= 3;
        }
        Ok(Self { digits })
    }

    /// Two-qutrit label |m n⟩.
    pub fn pair(m: u8, n: u8) -> Result<Self> {
        Self::new(vec![m, n])
    }

    pub fn index(&self) -> usize {
        self.digits.iter().fold(0, |acc, &d| acc * 3 + d as usize)
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn n_qutrits(&self) -> usize {
        self.digits.len()
    }

    /// All labels of an n-qutrit register in index order.
    pub fn all(n_qutrits: usize) -> Vec<BasisLabel> {
        (0..3usize.pow(n_qutrits as u32))
            .map(|i| BasisLabel::from_index(i, n_qutrits).expect("index in range"))
            .collect()
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.digits {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl FromStr for BasisLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim().trim_start_matches('|').trim_end_matches('>').trim_end_matches('⟩');
        let digits = trimmed
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                '2' => Ok(2),
                other => Err(Error::InvalidLabel(format!("'{other}' in \"{s}\""))),
            })
            .collect::<Result<Vec<u8>>>()?;
        BasisLabel::new(digits)
    }
}

/// Normalized state vector of dimension 3^n.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n_qutrits: usize,
    amplitudes: CVector,
}

impl PureState {
    pub fn from_amplitudes(n_qutrits: usize, amplitudes: Vec<C64>) -> Result<Self> {
        let dim = dim_of(n_qutrits)?;
        if amplitudes.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: amplitudes.len() });
        }
        let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm_sqr));
        }
        Ok(Self { n_qutrits, amplitudes: CVector::from_vec(amplitudes) })
    }

    /// Rescales arbitrary non-zero amplitudes to unit norm.
    pub fn normalized(n_qutrits: usize, amplitudes: Vec<C64>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        Self::from_amplitudes(n_qutrits, amplitudes.into_iter().map(|a| a / norm).collect())
    }

    pub fn basis(label: &BasisLabel) -> Self {
        let n = label.n_qutrits();
        let mut amps = CVector::zeros(3usize.pow(n as u32));
        amps[label.index()] = C64::new(1.0, 0.0);
        Self { n_qutrits: n, amplitudes: amps }
    }

    /// |0…0⟩
    pub fn ground(n_qutrits: usize) -> Result<Self> {
        Ok(Self::basis(&BasisLabel::new(vec![0; n_qutrits])?))
    }

    /// Equal superposition over all 3^n labels.
    pub fn uniform(n_qutrits: usize) -> Result<Self> {
        let dim = dim_of(n_qutrits)?;
        let a = C64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Ok(Self { n_qutrits, amplitudes: CVector::from_element(dim, a) })
    }

    pub(crate) fn from_vector_unchecked(n_qutrits: usize, amplitudes: CVector) -> Self {
        Self { n_qutrits, amplitudes }
    }

    pub fn n_qutrits(&self) -> usize {
        self.n_qutrits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn amplitude(&self, label: &BasisLabel) -> C64 {
        self.amplitudes[label.index()]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    pub fn probabilities(&self) -> ProbDist {
        ProbDist::from_probs_unchecked(self.amplitudes.iter().map(|a| a.norm_sqr()).collect())
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix { n_qutrits: self.n_qutrits, rho: &self.amplitudes * self.amplitudes.adjoint() }
    }
}

/// Hermitian, unit-trace, positive semidefinite operator on 3^n levels.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qutrits: usize,
    rho: CMatrix,
}

impl DensityMatrix {
    pub fn from_matrix(n_qutrits: usize, rho: CMatrix) -> Result<Self> {
        let dim = dim_of(n_qutrits)?;
        if rho.nrows() != dim || rho.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: rho.nrows() });
        }
        let herm = hermiticity_error(&rho);
        if herm > 1e-9 {
            return Err(Error::InvalidState(format!("not Hermitian (error {herm:.2e})")));
        }
        let tr = trace(&rho);
        if (tr.re - 1.0).abs() > 1e-8 || tr.im.abs() > 1e-8 {
            return Err(Error::InvalidState(format!("trace {tr}")));
        }
        let dm = Self { n_qutrits, rho };
        let min_eig = dm.min_eigenvalue();
        if min_eig < -1e-7 {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_eig:.2e}")));
        }
        Ok(dm)
    }

    pub(crate) fn from_matrix_unchecked(n_qutrits: usize, rho: CMatrix) -> Self {
        Self { n_qutrits, rho }
    }

    pub fn n_qutrits(&self) -> usize {
        self.n_qutrits
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.rho
    }

    pub fn trace(&self) -> C64 {
        trace(&self.rho)
    }

    pub fn hermiticity_error(&self) -> f64 {
        hermiticity_error(&self.rho)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigen(&self.rho).0.first().copied().unwrap_or(0.0)
    }

    /// Diagonal populations, clipped at zero and renormalized.
    pub fn probabilities(&self) -> ProbDist {
        let raw: Vec<f64> = self.rho.diagonal().iter().map(|z| z.re.max(0.0)).collect();
        let total: f64 = raw.iter().sum();
        ProbDist::from_probs_unchecked(raw.into_iter().map(|p| p / total).collect())
    }
}

/// Outcome probabilities in basis-label order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbDist {
    probs: Vec<f64>,
    shots: Option<u64>,
}

impl ProbDist {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("empty".into()));
        }
        if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidDistribution(format!("entry {p}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidDistribution(format!("sums to {total}")));
        }
        Ok(Self { probs, shots: None })
    }

    /// Normalizes non-negative counts into a distribution and records the shot total.
    pub fn from_counts(counts: &[f64]) -> Result<Self> {
        if let Some(c) = counts.iter().find(|c| !c.is_finite() || **c < 0.0) {
            return Err(Error::InvalidDistribution(format!("count {c}")));
        }
        let total: f64 = counts.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidDistribution("no counts".into()));
        }
        Ok(Self {
            probs: counts.iter().map(|c| c / total).collect(),
            shots: Some(total.round() as u64),
        })
    }

    pub fn delta(label: &BasisLabel) -> Self {
        let mut probs = vec![0.0; 3usize.pow(label.n_qutrits() as u32)];
        probs[label.index()] = 1.0;
        Self { probs, shots: None }
    }

    pub fn uniform(len: usize) -> Self {
        Self { probs: vec![1.0 / len as f64; len], shots: None }
    }

    pub(crate) fn from_probs_unchecked(probs: Vec<f64>) -> Self {
        Self { probs, shots: None }
    }

    pub fn with_shots(mut self, shots: u64) -> Self {
        self.shots = Some(shots);
        self
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn shots(&self) -> Option<u64> {
        self.shots
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn get(&self, label: &BasisLabel) -> f64 {
        self.probs.get(label.index()).copied().unwrap_or(0.0)
    }

    /// Number of qutrits implied by the length, if it is a power of three.
    pub fn n_qutrits(&self) -> Option<usize> {
        (1..=MAX_QUTRITS).find(|&n| 3usize.pow(n as u32) == self.probs.len())
    }

    /// Index of the largest entry; ties go to the lowest index.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &p) in self.probs.iter().enumerate() {
            if p > self.probs[best] {
                best = i;
            }
        }
        best
    }
}

fn dim_of(n_qutrits: usize) -> Result<usize> {
    if n_qutrits == 0 || n_qutrits > MAX_QUTRITS {
        return Err(Error::InvalidArgument(format!("{n_qutrits} qutrits not supported")));
    }
    Ok(3usize.pow(n_qutrits as u32))
}

/// Borrowed view over either state representation.
#[derive(Debug, Clone, Copy)]
pub enum StateRef<'a> {
    Pure(&'a PureState),
    Mixed(&'a DensityMatrix),
}

impl<'a> From<&'a PureState> for StateRef<'a> {
    fn from(s: &'a PureState) -> Self {
        StateRef::Pure(s)
    }
}

impl<'a> From<&'a DensityMatrix> for StateRef<'a> {
    fn from(s: &'a DensityMatrix) -> Self {
        StateRef::Mixed(s)
    }
}

impl StateRef<'_> {
    fn dim(&self) -> usize {
        match self {
            StateRef::Pure(p) => p.dim(),
            StateRef::Mixed(m) => m.dim(),
        }
    }
}

/// Uhlmann fidelity; |⟨ψ|φ⟩|² for two pure states.
pub fn fidelity<'a, 'b>(a: impl Into<StateRef<'a>>, b: impl Into<StateRef<'b>>) -> Result<f64> {
    let (a, b) = (a.into(), b.into());
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    let f = match (a, b) {
        (StateRef::Pure(x), StateRef::Pure(y)) => x.amplitudes().dotc(y.amplitudes()).norm_sqr(),
        (StateRef::Pure(p), StateRef::Mixed(m)) | (StateRef::Mixed(m), StateRef::Pure(p)) => {
            let v = p.amplitudes();
            (v.adjoint() * m.matrix() * v)[(0, 0)].re
        }
        (StateRef::Mixed(x), StateRef::Mixed(y)) => {
            let sx = psd_sqrt(x.matrix());
            let inner = &sx * y.matrix() * &sx;
            // eigenvalues at roundoff level would otherwise add √ε each
            let (vals, _) = hermitian_eigen(&inner);
            let cutoff = 1e-13 * vals.last().copied().unwrap_or(0.0).max(0.0);
            vals.iter().filter(|&&v| v > cutoff).map(|v| v.sqrt()).sum::<f64>().powi(2)
        }
    };
    Ok(f.clamp(0.0, 1.0))
}

/// Square statistical overlap (Σ √(p_i q_i))².
pub fn sso(p: &ProbDist, q: &ProbDist) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch { expected: p.len(), found: q.len() });
    }
    if p.probs().iter().chain(q.probs()).any(|x| *x < 0.0) {
        return Err(Error::InvalidDistribution("negative entry".into()));
    }
    let bc: f64 = p.probs().iter().zip(q.probs()).map(|(a, b)| (a * b).sqrt()).sum();
    Ok((bc * bc).min(1.0))
}
