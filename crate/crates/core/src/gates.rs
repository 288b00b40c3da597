//! Native and logical single-qutrit gate matrices, CPhase unitaries,
//! pulse envelopes and the gate-duration table.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{cis, diag, identity, CMatrix, C64, ONE};
use crate::state::BasisLabel;

/// Gaussian edge width of single-qutrit pulses, ns.
pub const DEFAULT_SIGMA_NS: f64 = 2.5;
/// Native C_p(θ, |21⟩) duration, ns.
pub const CPHASE21_DURATION_NS: f64 = 55.9;
/// Native C_p(θ, |22⟩) duration, ns.
pub const CPHASE22_DURATION_NS: f64 = 94.0;

/// Mixing angle of the H decomposition, 2·atan(√2).
pub fn hadamard_beta() -> f64 {
    2.0 * 2f64.sqrt().atan()
}

fn rotation_block(phi: f64, theta: f64, lo: usize) -> CMatrix {
    let (s, c) = (theta / 2.0).sin_cos();
    let mut m = identity(3);
    m[(lo, lo)] = C64::new(c, 0.0);
    m[(lo + 1, lo + 1)] = C64::new(c, 0.0);
    m[(lo, lo + 1)] = -cis(-phi) * s;
    m[(lo + 1, lo)] = cis(phi) * s;
    m
}

/// Rotation on the |0⟩↔|1⟩ transition.
pub fn r01_matrix(phi: f64, theta: f64) -> CMatrix {
    rotation_block(phi, theta, 0)
}

/// Rotation on the |1⟩↔|2⟩ transition.
pub fn r12_matrix(phi: f64, theta: f64) -> CMatrix {
    rotation_block(phi, theta, 1)
}

/// diag(1, e^{ix}, e^{i(x+y)})
pub fn vphase_matrix(x: f64, y: f64) -> CMatrix {
    diag(&[ONE, cis(x), cis(x + y)])
}

/// Logical single-qutrit gates used by the algorithms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LogicalGate {
    I,
    H,
    Hdag,
    X,
    Xsq,
    Z,
    Zsq,
}

impl LogicalGate {
    pub const ALL: [LogicalGate; 7] = [
        LogicalGate::I,
        LogicalGate::H,
        LogicalGate::Hdag,
        LogicalGate::X,
        LogicalGate::Xsq,
        LogicalGate::Z,
        LogicalGate::Zsq,
    ];

    pub fn inverse(self) -> LogicalGate {
        match self {
            LogicalGate::I => LogicalGate::I,
            LogicalGate::H => LogicalGate::Hdag,
            LogicalGate::Hdag => LogicalGate::H,
            LogicalGate::X => LogicalGate::Xsq,
            LogicalGate::Xsq => LogicalGate::X,
            LogicalGate::Z => LogicalGate::Zsq,
            LogicalGate::Zsq => LogicalGate::Z,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LogicalGate::I => "I",
            LogicalGate::H => "H",
            LogicalGate::Hdag => "Hdag",
            LogicalGate::X => "X",
            LogicalGate::Xsq => "Xsq",
            LogicalGate::Z => "Z",
            LogicalGate::Zsq => "Zsq",
        }
    }
}

impl fmt::Display for LogicalGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LogicalGate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "I" | "id" => LogicalGate::I,
            "H" => LogicalGate::H,
            "Hdag" | "H†" | "Hdg" => LogicalGate::Hdag,
            "X" => LogicalGate::X,
            "Xsq" | "X2" | "X^2" | "X²" => LogicalGate::Xsq,
            "Z" => LogicalGate::Z,
            "Zsq" | "Z2" | "Z^2" | "Z²" => LogicalGate::Zsq,
            other => return Err(Error::UnknownGate(other.to_string())),
        })
    }
}

/// ω = e^{2πi/3}
pub fn omega() -> C64 {
    cis(2.0 * PI / 3.0)
}

/// Matrix of a logical gate.
pub fn logical_gate(gate: LogicalGate) -> CMatrix {
    let w = omega();
    match gate {
        LogicalGate::I => identity(3),
        LogicalGate::H => {
            let s = 1.0 / 3f64.sqrt();
            CMatrix::from_fn(3, 3, |r, c| w.powu((r * c) as u32) * s)
        }
        LogicalGate::Hdag => logical_gate(LogicalGate::H).adjoint(),
        LogicalGate::X => {
            let mut m = CMatrix::zeros(3, 3);
            m[(1, 0)] = ONE;
            m[(2, 1)] = ONE;
            m[(0, 2)] = ONE;
            m
        }
        LogicalGate::Xsq => logical_gate(LogicalGate::X).adjoint(),
        LogicalGate::Z => diag(&[ONE, w, w * w]),
        LogicalGate::Zsq => diag(&[ONE, w * w, w]),
    }
}

/// Parses a logical gate by name.
pub fn logical_gate_by_name(name: &str) -> Result<CMatrix> {
    Ok(logical_gate(name.parse()?))
}

/// C_p(θ, |mn⟩) = I − (1 − e^{iθ})|mn⟩⟨mn| on two qutrits.
pub fn cphase_matrix(theta: f64, target: &BasisLabel) -> Result<CMatrix> {
    if target.n_qutrits() != 2 {
        return Err(Error::InvalidLabel(format!("CPhase target |{target}⟩ is not a two-qutrit label")));
    }
    let mut m = identity(9);
    let k = target.index();
    m[(k, k)] = cis(theta);
    Ok(m)
}

/// Phase offset between the first and last π segments of the 2π sideband
/// rotation that realizes a native C_p(θ, ·).
pub fn native_cphase_pulse_model(theta: f64) -> f64 {
    PI - theta
}

/// Gaussian-edge rectangular envelope.
pub fn pulse_envelope(t: f64, t0: f64, t1: f64, sigma: f64, amplitude: f64) -> Result<f64> {
    if sigma <= 0.0 {
        return Err(Error::InvalidArgument(format!("sigma {sigma} must be positive")));
    }
    if t1 - t0 < 4.0 * sigma {
        return Err(Error::InvalidArgument(format!(
            "pulse length {} ns shorter than 4σ = {} ns",
            t1 - t0,
            4.0 * sigma
        )));
    }
    let edge = 2.0 * sigma;
    let value = if t < t0 || t > t1 {
        0.0
    } else if t < t0 + edge {
        amplitude * (-(t - t0 - edge).powi(2) / (2.0 * sigma * sigma)).exp()
    } else if t <= t1 - edge {
        amplitude
    } else {
        amplitude * (-(t1 - edge - t).powi(2) / (2.0 * sigma * sigma)).exp()
    };
    Ok(value)
}

/// Which single-qutrit transition a pulse drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Transition {
    Ge,
    Ef,
}

/// Calibrated π/2 and π pulse lengths for one qutrit, ns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseTimes {
    pub half_pi_01: f64,
    pub half_pi_12: f64,
    pub pi_01: f64,
    pub pi_12: f64,
}

impl PulseTimes {
    /// Duration of a rotation by `theta` on `transition`.
    ///
    /// Piecewise-linear through the calibrated π/2 and π points, extended
    /// linearly outside them and clamped below at 4σ. A zero angle costs nothing.
    pub fn rotation(&self, transition: Transition, theta: f64) -> f64 {
        let angle = theta.abs();
        if angle < 1e-12 {
            return 0.0;
        }
        let (half, full) = match transition {
            Transition::Ge => (self.half_pi_01, self.pi_01),
            Transition::Ef => (self.half_pi_12, self.pi_12),
        };
        let slope = (full - half) / FRAC_PI_2;
        (half + slope * (angle - FRAC_PI_2)).max(4.0 * DEFAULT_SIGMA_NS)
    }
}

/// Per-qutrit pulse timing table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseTimings {
    pub qutrits: Vec<PulseTimes>,
}

impl PulseTimings {
    /// Calibrated lengths for the two device qutrits.
    pub fn device_default() -> Self {
        Self {
            qutrits: vec![
                PulseTimes { half_pi_01: 49.50, half_pi_12: 41.27, pi_01: 94.98, pi_12: 78.52 },
                PulseTimes { half_pi_01: 49.71, half_pi_12: 44.15, pi_01: 95.41, pi_12: 84.28 },
            ],
        }
    }

    /// Timing table restricted to one physical qutrit (for single-qutrit experiments).
    pub fn single(&self, qutrit: usize) -> Result<Self> {
        Ok(Self { qutrits: vec![*self.get(qutrit)?] })
    }

    pub fn get(&self, qutrit: usize) -> Result<&PulseTimes> {
        self.qutrits
            .get(qutrit)
            .ok_or_else(|| Error::InvalidTargets(format!("no pulse timings for qutrit {qutrit}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ZERO;
    use crate::linalg::{equal_up_to_phase, is_unitary, unitarity_error};

    fn apply(m: &CMatrix, level: usize) -> Vec<C64> {
        m.column(level).iter().copied().collect()
    }

    fn close(a: C64, b: C64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn r01_pi_flips_ground() {
        let out = apply(&r01_matrix(0.0, PI), 0);
        assert!(close(out[0], ZERO) && close(out[1], ONE) && close(out[2], ZERO));
    }

    #[test]
    fn zero_angle_rotations_are_identity() {
        for phi in [0.0, 0.4, -2.0, 3.0] {
            assert!((r01_matrix(phi, 0.0) - identity(3)).norm() < 1e-15);
            assert!((r12_matrix(phi, 0.0) - identity(3)).norm() < 1e-15);
        }
    }

    #[test]
    fn r01_half_pi_superposition() {
        let out = apply(&r01_matrix(0.0, FRAC_PI_2), 0);
        let s = 1.0 / 2f64.sqrt();
        assert!(close(out[0], C64::new(s, 0.0)) && close(out[1], C64::new(s, 0.0)));
    }

    #[test]
    fn r12_pi_swaps_populations() {
        let m = r12_matrix(0.0, PI);
        assert!((m[(2, 1)].norm() - 1.0).abs() < 1e-12);
        assert!((m[(1, 2)].norm() - 1.0).abs() < 1e-12);
        assert!(close(m[(0, 0)], ONE));
    }

    #[test]
    fn r12_phase_convention() {
        // R12(π/2, π)|1⟩ = e^{iπ/2}|2⟩
        let out = apply(&r12_matrix(FRAC_PI_2, PI), 1);
        assert!(close(out[2], cis(FRAC_PI_2)));
        assert!(close(out[1], ZERO));
    }

    #[test]
    fn vphase_examples() {
        let z = vphase_matrix(2.0 * PI / 3.0, 2.0 * PI / 3.0);
        assert!((z - logical_gate(LogicalGate::Z)).norm() < 1e-12);
        assert!((vphase_matrix(0.0, 0.0) - identity(3)).norm() < 1e-15);
        let v = vphase_matrix(PI, FRAC_PI_2);
        assert!(close(v[(1, 1)], -ONE));
        assert!(close(v[(2, 2)], cis(1.5 * PI)));
    }

    #[test]
    fn logical_gate_examples() {
        let h0 = apply(&logical_gate(LogicalGate::H), 0);
        let s = 1.0 / 3f64.sqrt();
        assert!(h0.iter().all(|a| close(*a, C64::new(s, 0.0))));
        let x2 = apply(&logical_gate(LogicalGate::X), 2);
        assert!(close(x2[0], ONE));
        let z = logical_gate(LogicalGate::Z);
        assert!((&z * &z * &z - identity(3)).norm() < 1e-12);
        assert!((logical_gate(LogicalGate::Zsq) - &z * &z).norm() < 1e-12);
        let x = logical_gate(LogicalGate::X);
        assert!((logical_gate(LogicalGate::Xsq) - &x * &x).norm() < 1e-12);
    }

    #[test]
    fn unknown_gate_name() {
        assert!(matches!(logical_gate_by_name("Y"), Err(Error::UnknownGate(_))));
        assert!(logical_gate_by_name("Hdag").is_ok());
    }

    #[test]
    fn all_logical_gates_unitary() {
        for g in LogicalGate::ALL {
            assert!(is_unitary(&logical_gate(g), 1e-12), "{g}");
            let prod = logical_gate(g) * logical_gate(g.inverse());
            assert!(equal_up_to_phase(&prod, &identity(3), 1e-12));
        }
    }

    #[test]
    fn native_matrices_unitary() {
        for &(phi, theta) in &[(0.0, PI), (1.3, 0.4), (-2.0, hadamard_beta())] {
            assert!(unitarity_error(&r01_matrix(phi, theta)) < 1e-12);
            assert!(unitarity_error(&r12_matrix(phi, theta)) < 1e-12);
            assert!(unitarity_error(&vphase_matrix(phi, theta)) < 1e-12);
        }
    }

    #[test]
    fn cphase_examples() {
        let t22 = BasisLabel::pair(2, 2).unwrap();
        let m = cphase_matrix(PI, &t22).unwrap();
        for k in 0..8 {
            assert!(close(m[(k, k)], ONE));
        }
        assert!(close(m[(8, 8)], -ONE));
        let t = BasisLabel::pair(0, 1).unwrap();
        assert!((cphase_matrix(0.0, &t).unwrap() - identity(9)).norm() < 1e-15);
        assert!(cphase_matrix(PI, &BasisLabel::new(vec![2]).unwrap()).is_err());
    }

    #[test]
    fn cphase_permutation_conjugation() {
        // (X⊗X)·C_p(π,|22⟩)·(X†⊗X†) = C_p(π,|00⟩)
        let x = logical_gate(LogicalGate::X);
        let xx = x.kronecker(&x);
        let lhs = &xx * cphase_matrix(PI, &BasisLabel::pair(2, 2).unwrap()).unwrap() * xx.adjoint();
        let rhs = cphase_matrix(PI, &BasisLabel::pair(0, 0).unwrap()).unwrap();
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn sideband_phase_offsets() {
        assert_eq!(native_cphase_pulse_model(PI), 0.0);
        assert_eq!(native_cphase_pulse_model(0.0), PI);
        assert!((native_cphase_pulse_model(8.0 * PI / 9.0) - PI / 9.0).abs() < 1e-15);
    }

    #[test]
    fn envelope_cases() {
        let (t0, t1, s, a) = (0.0, 50.0, DEFAULT_SIGMA_NS, 0.8);
        assert_eq!(pulse_envelope(25.0, t0, t1, s, a).unwrap(), a);
        assert_eq!(pulse_envelope(-1.0, t0, t1, s, a).unwrap(), 0.0);
        assert_eq!(pulse_envelope(51.0, t0, t1, s, a).unwrap(), 0.0);
        let edge = pulse_envelope(t0, t0, t1, s, a).unwrap();
        assert!((edge - a * (-2.0f64).exp()).abs() < 1e-15);
        let tail = pulse_envelope(t1, t0, t1, s, a).unwrap();
        assert!((tail - a * (-2.0f64).exp()).abs() < 1e-15);
        assert!(pulse_envelope(1.0, 0.0, 9.9, s, a).is_err());
    }

    #[test]
    fn envelope_symmetric_and_bounded() {
        for k in 0..=60 {
            let t = k as f64;
            let v = pulse_envelope(t, 0.0, 60.0, 2.5, 1.0).unwrap();
            let mirror = pulse_envelope(60.0 - t, 0.0, 60.0, 2.5, 1.0).unwrap();
            assert!((v - mirror).abs() < 1e-12);
            assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn table_durations() {
        let t = PulseTimings::device_default();
        let q1 = t.get(0).unwrap();
        let q2 = t.get(1).unwrap();
        assert_eq!(q1.rotation(Transition::Ge, PI), 94.98);
        assert_eq!(q2.rotation(Transition::Ef, FRAC_PI_2), 44.15);
        assert_eq!(q1.rotation(Transition::Ge, 0.0), 0.0);
        // tiny angles clamp at 4σ
        assert_eq!(q1.rotation(Transition::Ge, 1e-3), 10.0);
        // H = two π/2 (1↔2) pulses plus one β (0↔1) pulse
        let h_q1 = 2.0 * q1.half_pi_12 + q1.rotation(Transition::Ge, hadamard_beta());
        let h_q2 = 2.0 * q2.half_pi_12 + q2.rotation(Transition::Ge, hadamard_beta());
        assert!((h_q1 - 141.88).abs() < 0.01, "{h_q1}");
        assert!((h_q2 - 147.90).abs() < 0.01, "{h_q2}");
        assert!(t.get(2).is_err());
    }
}
