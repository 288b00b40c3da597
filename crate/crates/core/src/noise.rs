//! Relaxation, dephasing and static cross-Kerr noise, and the Lindblad
//! density-matrix backend.
//!
//! Times are in µs, cross-Kerr coefficients in kHz, and internally every rate
//! is converted to 1/ns (angular frequencies to rad/ns).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::linalg::{embed, identity, CMatrix, CVector, C64};
use crate::state::DensityMatrix;

/// Coherence times of one qutrit, µs. Infinite values switch a channel off.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QutritCoherence {
    pub t1_01_us: f64,
    pub t1_12_us: f64,
    pub t2r_01_us: f64,
    pub t2r_12_us: f64,
}

impl QutritCoherence {
    pub const IDEAL: QutritCoherence =
        QutritCoherence { t1_01_us: f64::INFINITY, t1_12_us: f64::INFINITY, t2r_01_us: f64::INFINITY, t2r_12_us: f64::INFINITY };

    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("T1_01", self.t1_01_us),
            ("T1_12", self.t1_12_us),
            ("T2R_01", self.t2r_01_us),
            ("T2R_12", self.t2r_12_us),
        ] {
            if v.is_nan() || v <= 0.0 {
                return Err(Error::InvalidArgument(format!("{name} = {v} µs must be positive")));
            }
        }
        Ok(())
    }
}

/// Coefficients of (a†a)^j (b†b)^k in the static two-qutrit Hamiltonian, kHz.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrossKerr {
    pub j11_khz: f64,
    pub j21_khz: f64,
    pub j12_khz: f64,
    pub j22_khz: f64,
}

impl CrossKerr {
    /// Energy of |mn⟩ in kHz.
    pub fn energy_khz(&self, m: u8, n: u8) -> f64 {
        let (m, n) = (m as f64, n as f64);
        self.j11_khz * m * n + self.j21_khz * m * m * n + self.j12_khz * m * n * n + self.j22_khz * m * m * n * n
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub qutrits: Vec<QutritCoherence>,
    pub cross_kerr: CrossKerr,
}

impl NoiseModel {
    /// Measured coherence times and cross-Kerr coefficients of the two-qutrit device.
    pub fn device_default() -> Self {
        Self {
            qutrits: vec![
                QutritCoherence { t1_01_us: 47.9, t1_12_us: 21.7, t2r_01_us: 4.5, t2r_12_us: 2.0 },
                QutritCoherence { t1_01_us: 35.1, t1_12_us: 3.9, t2r_01_us: 3.2, t2r_12_us: 2.4 },
            ],
            cross_kerr: CrossKerr { j11_khz: -304.3, j21_khz: 37.8, j12_khz: 23.6, j22_khz: 5.4 },
        }
    }

    pub fn noiseless(n_qutrits: usize) -> Self {
        Self { qutrits: vec![QutritCoherence::IDEAL; n_qutrits], cross_kerr: CrossKerr::default() }
    }

    /// Model of one physical qutrit in isolation (no cross-Kerr partner).
    pub fn single(&self, qutrit: usize) -> Result<Self> {
        let q = self
            .qutrits
            .get(qutrit)
            .ok_or_else(|| Error::InvalidTargets(format!("no coherence data for qutrit {qutrit}")))?;
        Ok(Self { qutrits: vec![*q], cross_kerr: CrossKerr::default() })
    }

    pub fn validate(&self) -> Result<()> {
        self.qutrits.iter().try_for_each(QutritCoherence::validate)?;
        let k = &self.cross_kerr;
        if [k.j11_khz, k.j21_khz, k.j12_khz, k.j22_khz].iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite cross-Kerr coefficient".into()));
        }
        Ok(())
    }
}

fn rate_per_ns(t_us: f64) -> f64 {
    1.0 / (t_us * 1e3)
}

/// A collapse operator acting on one qutrit.
#[derive(Debug, Clone, PartialEq)]
pub struct CollapseOp {
    pub qutrit: usize,
    pub label: String,
    /// 3×3 operator including the √rate factor (rates in 1/ns).
    pub op: CMatrix,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CollapseSet {
    pub ops: Vec<CollapseOp>,
    /// Derived pure-dephasing rates that came out negative and were clamped to 0.
    pub warnings: Vec<String>,
}

/// Pure-dephasing rates (1/ns) on the 0↔1 and 1↔2 coherences, before clamping.
pub fn pure_dephasing_rates(c: &QutritCoherence) -> (f64, f64) {
    let g01 = rate_per_ns(c.t1_01_us);
    let g12 = rate_per_ns(c.t1_12_us);
    let r01 = rate_per_ns(c.t2r_01_us) - g01 / 2.0;
    let r12 = rate_per_ns(c.t2r_12_us) - (g01 + g12) / 2.0;
    (r01, r12)
}

/// Relaxation and dephasing operators for every qutrit.
///
/// Relaxation uses |0⟩⟨1| and |1⟩⟨2| at rates 1/T1. Pure dephasing uses
/// diagonal operators whose level offsets make the 0↔1 and 1↔2 coherences
/// decay at exactly 1/T2R once relaxation is accounted for. When the 1↔2
/// excess rate is at least the 0↔1 one this reduces to √(2γ_a)|1⟩⟨1| and
/// √(2γ_b)|2⟩⟨2|; otherwise the 0↔2 coherence takes the difference instead.
pub fn build_collapse_ops(noise: &NoiseModel) -> Result<CollapseSet> {
    noise.validate()?;
    let mut set = CollapseSet::default();
    for (q, c) in noise.qutrits.iter().enumerate() {
        for (t1, lo, name) in [(c.t1_01_us, 0usize, "relax01"), (c.t1_12_us, 1, "relax12")] {
            let g = rate_per_ns(t1);
            if g > 0.0 {
                let mut op = CMatrix::zeros(3, 3);
                op[(lo, lo + 1)] = C64::new(g.sqrt(), 0.0);
                set.ops.push(CollapseOp { qutrit: q, label: name.into(), op });
            }
        }
        let (mut r01, mut r12) = pure_dephasing_rates(c);
        for (r, name) in [(&mut r01, "0-1"), (&mut r12, "1-2")] {
            if *r < 0.0 {
                let msg = format!("qutrit {q}: {name} pure-dephasing rate {:.3e}/ns negative, clamped to 0", *r);
                log::warn!("{msg}");
                set.warnings.push(msg);
                *r = 0.0;
            }
        }
        let r02 = (r12 - r01).abs();
        // level offsets as points in the plane: coherence j-k decays at |p_j - p_k|²/2
        let (d01, d12, d02) = ((2.0 * r01).sqrt(), (2.0 * r12).sqrt(), (2.0 * r02).sqrt());
        let p2 = if d01 == 0.0 {
            (d12, 0.0)
        } else {
            let x = (d01 * d01 + d02 * d02 - d12 * d12) / (2.0 * d01);
            (x, (d02 * d02 - x * x).max(0.0).sqrt())
        };
        for (axis, entries) in [("x", [0.0, d01, p2.0]), ("y", [0.0, 0.0, p2.1])] {
            if entries.iter().any(|v| *v != 0.0) {
                let op = CMatrix::from_diagonal(&CVector::from_iterator(3, entries.iter().map(|v| C64::new(*v, 0.0))));
                set.ops.push(CollapseOp { qutrit: q, label: format!("dephase_{axis}"), op });
            }
        }
    }
    Ok(set)
}

/// Static cross-Kerr Hamiltonian on two qutrits, rad/ns, diagonal in |mn⟩.
pub fn idle_hamiltonian(noise: &NoiseModel) -> CMatrix {
    let mut h = CMatrix::zeros(9, 9);
    for m in 0..3u8 {
        for n in 0..3u8 {
            let k = (3 * m + n) as usize;
            h[(k, k)] = C64::new(2.0 * PI * noise.cross_kerr.energy_khz(m, n) * 1e-6, 0.0);
        }
    }
    h
}

/// Integration settings: each moment is split into
/// max(`min_steps`, ⌈duration / `max_step_ns`⌉) equal RK4 steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LindbladOptions {
    pub max_step_ns: f64,
    pub min_steps: usize,
}

impl Default for LindbladOptions {
    fn default() -> Self {
        Self { max_step_ns: 1.0, min_steps: 16 }
    }
}

impl LindbladOptions {
    pub fn halved(self) -> Self {
        Self { max_step_ns: self.max_step_ns / 2.0, min_steps: self.min_steps * 2 }
    }

    fn steps(&self, duration: f64) -> usize {
        self.min_steps.max((duration / self.max_step_ns).ceil() as usize)
    }
}

/// Diagnostics gathered at the end of a Lindblad run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationStats {
    pub trace_drift: f64,
    pub min_eigenvalue: f64,
    pub hermiticity_error: f64,
    pub steps: usize,
}

pub const TRACE_TOL: f64 = 1e-6;
pub const POSITIVITY_TOL: f64 = 1e-6;
pub const HERMITICITY_TOL: f64 = 1e-9;

/// Time-independent Lindblad generator in column-stacked superoperator form.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    dim: usize,
    n_qutrits: usize,
    generator: CMatrix,
}

impl Liouvillian {
    pub fn new(noise: &NoiseModel, n_qutrits: usize) -> Result<Self> {
        if !(1..=3).contains(&n_qutrits) {
            return Err(Error::InvalidArgument(format!("Lindblad backend supports 1 to 3 qutrits, got {n_qutrits}")));
        }
        if noise.qutrits.len() < n_qutrits {
            return Err(Error::InvalidArgument(format!(
                "noise model covers {} qutrit(s), circuit has {n_qutrits}",
                noise.qutrits.len()
            )));
        }
        let dim = 3usize.pow(n_qutrits as u32);
        let collapse = build_collapse_ops(noise)?;
        let mut h = CMatrix::zeros(dim, dim);
        if n_qutrits >= 2 {
            h = embed(&idle_hamiltonian(noise), &[0, 1], n_qutrits)?;
        }
        let mut g = -h * C64::new(0.0, 1.0);
        let mut jumps = Vec::new();
        for c in collapse.ops.iter().filter(|c| c.qutrit < n_qutrits) {
            let l = embed(&c.op, &[c.qutrit], n_qutrits)?;
            g -= (l.adjoint() * &l).scale(0.5);
            jumps.push(l);
        }
        let id = identity(dim);
        // vec(Aρ B) = (Bᵀ ⊗ A) vec(ρ)
        let mut generator = id.kronecker(&g) + g.conjugate().kronecker(&id);
        for l in &jumps {
            generator += l.conjugate().kronecker(l);
        }
        Ok(Self { dim, n_qutrits, generator })
    }

    pub fn generator(&self) -> &CMatrix {
        &self.generator
    }

    /// One classical RK4 step of size `h` for the linear ODE ẋ = Lx, written
    /// as its propagator I + hL + (hL)²/2 + (hL)³/6 + (hL)⁴/24.
    pub fn rk4_step(&self, h: f64) -> CMatrix {
        let hl = self.generator.scale(h);
        let n = hl.nrows();
        let mut term = identity(n);
        let mut total = identity(n);
        for k in 1..=4 {
            term = &term * &hl * C64::new(1.0 / k as f64, 0.0);
            total += &term;
        }
        total
    }

    /// Superoperator of an idle interval split into `steps` RK4 steps,
    /// applied to the columns of `states` (each a vectorized operator).
    fn evolve(&self, states: &CMatrix, duration: f64, steps: usize) -> CMatrix {
        if duration <= 0.0 {
            return states.clone();
        }
        let p = self.rk4_step(duration / steps as f64);
        let mut x = states.clone();
        for _ in 0..steps {
            x = &p * x;
        }
        x
    }
}

fn vectorize(m: &CMatrix) -> CVector {
    CVector::from_column_slice(m.as_slice())
}

fn unvectorize(v: &[C64], dim: usize) -> CMatrix {
    CMatrix::from_column_slice(dim, dim, v)
}

/// Unitary conjugation ρ → UρU† on vectorized columns.
fn conjugate_columns(states: &CMatrix, u: &CMatrix, dim: usize) -> CMatrix {
    let mut out = states.clone();
    let ud = u.adjoint();
    for mut col in out.column_iter_mut() {
        let rho = unvectorize(col.as_slice(), dim);
        let next = u * rho * &ud;
        col.copy_from_slice(next.as_slice());
    }
    out
}

/// Propagates vectorized operators (one per column) through a circuit: for
/// each moment the noisy idle evolution runs for the moment duration and then
/// the moment's ideal unitary is applied.
pub(crate) fn propagate(circuit: &Circuit, liouvillian: &Liouvillian, opts: LindbladOptions, states: CMatrix) -> Result<(CMatrix, usize)> {
    if liouvillian.n_qutrits != circuit.n_qutrits() {
        return Err(Error::DimensionMismatch { expected: liouvillian.n_qutrits, found: circuit.n_qutrits() });
    }
    if !(opts.max_step_ns > 0.0) || opts.min_steps == 0 {
        return Err(Error::Integration("step size must be positive".into()));
    }
    let dim = liouvillian.dim;
    let mut x = states;
    let mut total_steps = 0;
    for moment in circuit.moments() {
        let duration = Circuit::moment_duration(moment);
        let steps = if duration > 0.0 { opts.steps(duration) } else { 0 };
        x = liouvillian.evolve(&x, duration, steps);
        total_steps += steps;
        x = conjugate_columns(&x, &circuit.moment_unitary(moment)?, dim);
    }
    Ok((x, total_steps))
}

/// Noisy execution of a compiled circuit from an initial density matrix.
pub fn simulate_lindblad(circuit: &Circuit, noise: &NoiseModel, initial: &DensityMatrix) -> Result<DensityMatrix> {
    simulate_lindblad_with(circuit, noise, initial, LindbladOptions::default()).map(|(rho, _)| rho)
}

pub fn simulate_lindblad_with(
    circuit: &Circuit,
    noise: &NoiseModel,
    initial: &DensityMatrix,
    opts: LindbladOptions,
) -> Result<(DensityMatrix, IntegrationStats)> {
    if initial.n_qutrits() != circuit.n_qutrits() {
        return Err(Error::DimensionMismatch { expected: circuit.n_qutrits(), found: initial.n_qutrits() });
    }
    let liouvillian = Liouvillian::new(noise, circuit.n_qutrits())?;
    let dim = initial.dim();
    let start = CMatrix::from_column_slice(dim * dim, 1, vectorize(initial.matrix()).as_slice());
    let (out, steps) = propagate(circuit, &liouvillian, opts, start)?;
    let rho = unvectorize(out.as_slice(), dim);
    let candidate = DensityMatrix::from_matrix_unchecked(initial.n_qutrits(), rho);
    let stats = IntegrationStats {
        trace_drift: (candidate.trace() - initial.trace()).norm(),
        min_eigenvalue: candidate.min_eigenvalue(),
        hermiticity_error: candidate.hermiticity_error(),
        steps,
    };
    if stats.trace_drift > TRACE_TOL || stats.min_eigenvalue < -POSITIVITY_TOL || stats.hermiticity_error > HERMITICITY_TOL {
        return Err(Error::Integration(format!(
            "trace drift {:.2e}, min eigenvalue {:.2e}, hermiticity {:.2e}",
            stats.trace_drift, stats.min_eigenvalue, stats.hermiticity_error
        )));
    }
    Ok((candidate, stats))
}

/// Coherence |ρ_jk| of one qutrit prepared in (|j⟩+|k⟩)/√2 after idling `t_ns`
/// (other qutrits in |0⟩).
pub fn ramsey_coherence(noise: &NoiseModel, qutrit: usize, levels: (usize, usize), t_ns: f64) -> Result<f64> {
    let single = noise.single(qutrit)?;
    let mut idle = Circuit::new(1)?;
    if t_ns > 0.0 {
        // an idle moment: a zero-angle rotation lasting t_ns
        idle.push_moment(vec![crate::circuit::GateInstruction::r01(0, 0.0, 0.0, t_ns)?])?;
    }
    let (j, k) = levels;
    let mut rho = CMatrix::zeros(3, 3);
    for a in [j, k] {
        for b in [j, k] {
            rho[(a, b)] = C64::new(0.5, 0.0);
        }
    }
    let initial = DensityMatrix::from_matrix(1, rho)?;
    let out = simulate_lindblad(&idle, &single, &initial)?;
    Ok(out.matrix()[(j, k)].norm())
}

/// Ramsey decay constant (µs) from a log-linear fit of the coherence at
/// several delays.
pub fn ramsey_time_constant(noise: &NoiseModel, qutrit: usize, levels: (usize, usize), max_delay_us: f64) -> Result<f64> {
    let delays: Vec<f64> = (1..=8).map(|k| max_delay_us * 1e3 * k as f64 / 8.0).collect();
    let mut sx = 0.0;
    let mut sy = 0.0;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let c0 = ramsey_coherence(noise, qutrit, levels, 0.0)?;
    for &t in &delays {
        let y = (ramsey_coherence(noise, qutrit, levels, t)? / c0).ln();
        sx += t;
        sy += y;
        sxx += t * t;
        sxy += t * y;
    }
    let n = delays.len() as f64;
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    if !(slope < 0.0) {
        return Err(Error::FitFailure("coherence does not decay".into()));
    }
    Ok(-1.0 / slope / 1e3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ZERO;
    use crate::state::{fidelity, PureState};

    #[test]
    fn ideal_model_has_no_operators() {
        let set = build_collapse_ops(&NoiseModel::noiseless(2)).unwrap();
        assert!(set.ops.is_empty());
        assert!(set.warnings.is_empty());
    }

    #[test]
    fn rejects_non_positive_times() {
        let mut n = NoiseModel::device_default();
        n.qutrits[0].t1_01_us = 0.0;
        assert!(build_collapse_ops(&n).is_err());
    }

    #[test]
    fn dephasing_matches_two_projector_form_when_rates_allow() {
        let c = NoiseModel::device_default().qutrits[0];
        let (ra, r12) = pure_dephasing_rates(&c);
        let gb = r12 - ra;
        assert!(gb > 0.0);
        let set = build_collapse_ops(&NoiseModel { qutrits: vec![c], cross_kerr: CrossKerr::default() }).unwrap();
        // Σ L†L restricted to diagonals equals 2γa|1⟩⟨1| + 2γb|2⟩⟨2|
        let mut acc = CMatrix::zeros(3, 3);
        for op in set.ops.iter().filter(|o| o.label.starts_with("dephase")) {
            acc += op.op.adjoint() * &op.op;
        }
        assert!((acc[(1, 1)].re - 2.0 * ra).abs() < 1e-15);
        assert!((acc[(2, 2)].re - 2.0 * gb).abs() < 1e-15);
        assert!(acc[(0, 0)].norm() < 1e-15);
    }

    #[test]
    fn idle_hamiltonian_entries() {
        let n = NoiseModel::device_default();
        let h = idle_hamiltonian(&n);
        let k = n.cross_kerr;
        let scale = 2.0 * PI * 1e-6;
        assert_eq!(h[(0, 0)].re, 0.0);
        let e11 = scale * (k.j11_khz + k.j21_khz + k.j12_khz + k.j22_khz);
        assert!((h[(4, 4)].re - e11).abs() < 1e-15);
        let e22 = scale * (4.0 * k.j11_khz + 8.0 * k.j21_khz + 8.0 * k.j12_khz + 16.0 * k.j22_khz);
        assert!((h[(8, 8)].re - e22).abs() < 1e-15);
    }

    #[test]
    fn rk4_propagator_is_trace_preserving() {
        let l = Liouvillian::new(&NoiseModel::device_default(), 2).unwrap();
        let p = l.rk4_step(1.0);
        // vec(I)† P = vec(I)† up to O(h⁵)
        let id = vectorize(&identity(9));
        let row = id.adjoint() * &p;
        assert!((row - id.adjoint()).norm() < 1e-12);
    }

    #[test]
    fn idle_decay_matches_analytic_exponential() {
        let noise = NoiseModel::device_default();
        let mut c = Circuit::new(2).unwrap();
        c.push_moment(vec![crate::circuit::GateInstruction::r01(0, 0.0, 0.0, 2110.0).unwrap()]).unwrap();
        let mut psi = vec![ZERO; 9];
        psi[0] = C64::new(0.5f64.sqrt(), 0.0);
        psi[3] = C64::new(0.5f64.sqrt(), 0.0);
        let rho0 = PureState::from_amplitudes(2, psi).unwrap().to_density();
        let rho = simulate_lindblad(&c, &noise, &rho0).unwrap();
        let expected = 0.5 * (-2.11f64 / 4.5).exp();
        let got = rho.matrix()[(0, 3)].norm();
        assert!((got / expected - 1.0).abs() < 0.02, "{got} vs {expected}");
    }

    #[test]
    fn noiseless_lindblad_equals_pure() {
        let comp = crate::compiler::Compiler::default();
        let c = comp.compile_cphase(PI, &"01".parse().unwrap()).unwrap();
        let psi = PureState::uniform(2).unwrap();
        let pure = crate::sim::simulate_pure(&c, &psi).unwrap();
        let rho = simulate_lindblad(&c, &NoiseModel::noiseless(2), &psi.to_density()).unwrap();
        assert!(fidelity(&pure, &rho).unwrap() > 1.0 - 1e-10);
    }

    #[test]
    fn ramsey_constants_reproduce_inputs() {
        let noise = NoiseModel::device_default();
        for (q, levels, target) in [(0, (0, 1), 4.5), (0, (1, 2), 2.0), (1, (0, 1), 3.2), (1, (1, 2), 2.4)] {
            let t = ramsey_time_constant(&noise, q, levels, 3.0).unwrap();
            assert!((t / target - 1.0).abs() < 0.02, "Q{} {levels:?}: {t}", q + 1);
        }
    }

    #[test]
    fn second_qutrit_needs_the_unequal_rate_geometry() {
        let c = NoiseModel::device_default().qutrits[1];
        let (r01, r12) = pure_dephasing_rates(&c);
        assert!(r12 < r01);
        let set = build_collapse_ops(&NoiseModel::device_default()).unwrap();
        assert!(set.warnings.is_empty());
    }
}
