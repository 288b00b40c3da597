//! Pure-state execution, measurement distributions and multinomial sampling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::linalg::{check_targets, CMatrix, CVector, ZERO};
use crate::state::{ProbDist, PureState, StateRef};

/// Applies `u` to the listed qutrits (first target most significant in `u`).
pub fn apply_unitary(state: &PureState, u: &CMatrix, targets: &[usize]) -> Result<PureState> {
    let n = state.n_qutrits();
    check_targets(targets, n)?;
    let sub = 3usize.pow(targets.len() as u32);
    if u.nrows() != sub || u.ncols() != sub {
        return Err(Error::DimensionMismatch { expected: sub, found: u.nrows() });
    }
    let out = apply_local(state.amplitudes(), u, targets, n);
    Ok(PureState::from_vector_unchecked(n, out))
}

/// Stride of each qutrit's digit in the flat index.
fn strides(n: usize) -> Vec<usize> {
    (0..n).map(|q| 3usize.pow((n - 1 - q) as u32)).collect()
}

pub(crate) fn apply_local(amps: &CVector, u: &CMatrix, targets: &[usize], n: usize) -> CVector {
    let stride = strides(n);
    let sub = u.nrows();
    // offsets[j] = flat offset of local sub-index j on the target qutrits
    let offsets: Vec<usize> = (0..sub)
        .map(|j| {
            let mut rem = j;
            let mut off = 0;
            for &t in targets.iter().rev() {
                off += (rem % 3) * stride[t];
                rem /= 3;
            }
            off
        })
        .collect();
    let mut out = CVector::from_element(amps.len(), ZERO);
    let mut local = vec![ZERO; sub];
    for base in 0..amps.len() {
        if targets.iter().any(|&t| (base / stride[t]) % 3 != 0) {
            continue;
        }
        for (j, off) in offsets.iter().enumerate() {
            local[j] = amps[base + off];
        }
        for (r, off) in offsets.iter().enumerate() {
            let mut acc = ZERO;
            for (c, a) in local.iter().enumerate() {
                acc += u[(r, c)] * a;
            }
            out[base + off] = acc;
        }
    }
    out
}

/// Runs a circuit moment by moment; VPhases act as explicit diagonal gates.
pub fn simulate_pure(circuit: &Circuit, initial: &PureState) -> Result<PureState> {
    if circuit.n_qutrits() != initial.n_qutrits() {
        return Err(Error::DimensionMismatch { expected: circuit.n_qutrits(), found: initial.n_qutrits() });
    }
    let mut amps = initial.amplitudes().clone();
    for g in circuit.instructions() {
        amps = apply_local(&amps, &g.matrix(), &g.targets, circuit.n_qutrits());
    }
    Ok(PureState::from_vector_unchecked(initial.n_qutrits(), amps))
}

/// Outcome probabilities in basis-label order.
pub fn measure_probs<'a>(state: impl Into<StateRef<'a>>) -> ProbDist {
    match state.into() {
        StateRef::Pure(p) => p.probabilities(),
        StateRef::Mixed(m) => m.probabilities(),
    }
}

/// Multinomial draw of `shots` outcomes, reproducible for a fixed seed.
pub fn sample_counts(probs: &ProbDist, shots: u64, seed: u64) -> Result<Vec<u64>> {
    let p = probs.probs();
    if p.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::InvalidDistribution("negative or non-finite probability".into()));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidDistribution(format!("probabilities sum to {total}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; p.len()];
    let mut remaining = shots;
    let mut mass = 1.0;
    for (k, &pk) in p.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if k + 1 == p.len() || mass <= 0.0 {
            counts[k] = remaining;
            break;
        }
        let q = (pk / mass).clamp(0.0, 1.0);
        let draw = Binomial::new(remaining, q)
            .map_err(|e| Error::InvalidDistribution(e.to_string()))?
            .sample(&mut rng);
        counts[k] = draw;
        remaining -= draw;
        mass -= pk;
    }
    Ok(counts)
}
