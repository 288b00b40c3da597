//! Extraction of the extra single-qutrit phases a CPhase gate leaves behind.
//!
//! For β01 on qutrit j: R01(0, π/2) on both qutrits, the CPhase under test, a
//! virtual Θ(θ, 0) on j, then R01(π, π/2) on j and read P(j in |1⟩). For β12:
//! R01(0, π) then R12(0, π/2) on both, the CPhase, Θ(0, θ) and R12(π, π/2) on j,
//! reading P(j in |2⟩). The population oscillates as C0 + C1·sin(β + θ + δ),
//! and δ is removed by running the same sweep through an ideal channel.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::gates::{r01_matrix, r12_matrix, vphase_matrix};
use crate::linalg::{cis, CMatrix};
use crate::sim::apply_unitary;
use crate::state::PureState;

pub const MIN_SWEEP_POINTS: usize = 12;

/// Extra phases picked up by one qutrit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FramePhases {
    pub beta01: f64,
    pub beta12: f64,
}

/// Least-squares fit of y = a + b·sin θ + c·cos θ; returns (offset, amplitude, phase)
/// with y = offset + amplitude·sin(θ + phase).
pub fn fit_sinusoid(thetas: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    if thetas.len() != ys.len() || thetas.len() < 3 {
        return Err(Error::FitFailure(format!("need ≥ 3 paired samples, got {}", thetas.len())));
    }
    let mut ata = nalgebra::Matrix3::<f64>::zeros();
    let mut aty = nalgebra::Vector3::<f64>::zeros();
    for (&t, &y) in thetas.iter().zip(ys) {
        let row = nalgebra::Vector3::new(1.0, t.sin(), t.cos());
        ata += row * row.transpose();
        aty += row * y;
    }
    let sol = ata
        .try_inverse()
        .filter(|inv| inv.iter().all(|v| v.is_finite()))
        .map(|inv| inv * aty)
        .ok_or_else(|| Error::FitFailure("singular normal equations".into()))?;
    let (a, b, c) = (sol[0], sol[1], sol[2]);
    let amplitude = b.hypot(c);
    if !(amplitude > 1e-6) {
        return Err(Error::FitFailure("no oscillation in the readout signal".into()));
    }
    Ok((a, amplitude, c.atan2(b)))
}

fn wrap(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y <= -PI {
        y + 2.0 * PI
    } else {
        y
    }
}

#[derive(Clone, Copy)]
enum Transition {
    Ge,
    Ef,
}

fn sweep_phase(channel: &dyn Fn(&PureState) -> Result<PureState>, qutrit: usize, which: Transition, points: usize) -> Result<f64> {
    let (g1, g2, level): (CMatrix, CMatrix, usize) = match which {
        Transition::Ge => (r01_matrix(0.0, FRAC_PI_2), r01_matrix(PI, FRAC_PI_2), 1),
        Transition::Ef => (r12_matrix(0.0, FRAC_PI_2) * r01_matrix(0.0, PI), r12_matrix(PI, FRAC_PI_2), 2),
    };
    let mut prepared = PureState::ground(2)?;
    for q in 0..2 {
        prepared = apply_unitary(&prepared, &g1, &[q])?;
    }
    let after = channel(&prepared)?;
    if after.n_qutrits() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: after.n_qutrits() });
    }
    let thetas: Vec<f64> = (0..points).map(|k| 2.0 * PI * k as f64 / points as f64).collect();
    let mut ys = Vec::with_capacity(points);
    for &theta in &thetas {
        let z = match which {
            Transition::Ge => vphase_matrix(theta, 0.0),
            Transition::Ef => vphase_matrix(0.0, theta),
        };
        let s = apply_unitary(&after, &z, &[qutrit])?;
        let s = apply_unitary(&s, &g2, &[qutrit])?;
        let p = s.probabilities();
        let marginal: f64 = (0..9).filter(|k| [k / 3, k % 3][qutrit] == level).map(|k| p.probs()[k]).sum();
        ys.push(marginal);
    }
    Ok(fit_sinusoid(&thetas, &ys)?.2)
}

/// Recovers (β01, β12) for both qutrits of a channel that applies an unknown
/// diagonal single-qutrit phase after a C_p(0, ·) gate.
pub fn calibrate_frame_phases(channel: &dyn Fn(&PureState) -> Result<PureState>, points: usize) -> Result<[FramePhases; 2]> {
    if points < MIN_SWEEP_POINTS {
        return Err(Error::InvalidArgument(format!("sweep needs ≥ {MIN_SWEEP_POINTS} points, got {points}")));
    }
    let ideal = |s: &PureState| Ok(s.clone());
    let mut out = [FramePhases { beta01: 0.0, beta12: 0.0 }; 2];
    for (q, slot) in out.iter_mut().enumerate() {
        let b01 = sweep_phase(channel, q, Transition::Ge, points)? - sweep_phase(&ideal, q, Transition::Ge, points)?;
        let b12 = sweep_phase(channel, q, Transition::Ef, points)? - sweep_phase(&ideal, q, Transition::Ef, points)?;
        *slot = FramePhases { beta01: wrap(b01), beta12: wrap(b12) };
    }
    Ok(out)
}

/// Synthetic channel: C_p(0, ·) followed by Θ(β01, β12) on each qutrit.
pub fn phase_error_channel(phases: [FramePhases; 2]) -> impl Fn(&PureState) -> Result<PureState> {
    move |s: &PureState| {
        let mut out = s.clone();
        for (q, p) in phases.iter().enumerate() {
            out = apply_unitary(&out, &vphase_matrix(p.beta01, p.beta12), &[q])?;
        }
        // a global phase on top changes nothing observable
        let amps = out.amplitudes().iter().map(|a| a * cis(0.3)).collect();
        PureState::from_amplitudes(2, amps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn recover(p: [FramePhases; 2]) -> [FramePhases; 2] {
        let ch = phase_error_channel(p);
        calibrate_frame_phases(&ch, 16).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        wrap(a - b).abs() < 1e-3
    }

    #[test]
    fn zero_phase_recovered() {
        let zero = FramePhases { beta01: 0.0, beta12: 0.0 };
        let r = recover([zero; 2]);
        assert!(r.iter().all(|p| close(p.beta01, 0.0) && close(p.beta12, 0.0)));
    }

    #[test]
    fn single_injected_phase() {
        let r = recover([FramePhases { beta01: 0.7, beta12: 0.0 }, FramePhases { beta01: 0.0, beta12: 0.0 }]);
        assert!(close(r[0].beta01, 0.7), "{:?}", r);
        assert!(close(r[1].beta01, 0.0));
    }

    #[test]
    fn both_transitions_both_qutrits() {
        let truth = [FramePhases { beta01: 0.3, beta12: -1.1 }, FramePhases { beta01: -2.5, beta12: 2.9 }];
        let r = recover(truth);
        for q in 0..2 {
            assert!(close(r[q].beta01, truth[q].beta01), "{q} {:?}", r);
            assert!(close(r[q].beta12, truth[q].beta12), "{q} {:?}", r);
        }
    }

    #[test]
    fn too_few_points_rejected() {
        let ch = phase_error_channel([FramePhases { beta01: 0.0, beta12: 0.0 }; 2]);
        assert!(calibrate_frame_phases(&ch, 8).is_err());
    }

    #[test]
    fn flat_signal_is_fit_failure() {
        let thetas: Vec<f64> = (0..12).map(|k| k as f64 * 0.5).collect();
        let ys = vec![0.5; 12];
        assert!(matches!(fit_sinusoid(&thetas, &ys), Err(Error::FitFailure(_))));
        assert!(matches!(fit_sinusoid(&[0.0, 0.0, 0.0], &[0.1, 0.2, 0.3]), Err(Error::FitFailure(_))));
    }

    #[test]
    fn sinusoid_fit_recovers_parameters() {
        let thetas: Vec<f64> = (0..12).map(|k| 2.0 * PI * k as f64 / 12.0).collect();
        let ys: Vec<f64> = thetas.iter().map(|t| 0.4 + 0.25 * (t + 1.2).sin()).collect();
        let (a, amp, ph) = fit_sinusoid(&thetas, &ys).unwrap();
        assert!((a - 0.4).abs() < 1e-12 && (amp - 0.25).abs() < 1e-12 && (ph - 1.2).abs() < 1e-12);
    }
}
