//! Lowering of logical gates to native instructions with durations, the
//! CPhase π-pulse ladder, and virtual-frame rewriting.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::circuit::{Circuit, GateInstruction, GateKind, PhaseFrame};
use crate::error::{Error, Result};
use crate::gates::{cphase_matrix, hadamard_beta, logical_gate, LogicalGate, PulseTimings, Transition};
use crate::linalg::{embed, equal_up_to_phase, CMatrix};
use crate::state::BasisLabel;

/// Tolerance used when comparing compiled and logical unitaries.
pub const EQUIVALENCE_TOL: f64 = 1e-10;

/// Compiles logical operations to native instructions using a pulse timing table.
#[derive(Debug, Clone, PartialEq)]
pub struct Compiler {
    timings: PulseTimings,
}

impl Default for Compiler {
    fn default() -> Self {
        Self::new(PulseTimings::device_default())
    }
}

impl Compiler {
    pub fn new(timings: PulseTimings) -> Self {
        Self { timings }
    }

    pub fn timings(&self) -> &PulseTimings {
        &self.timings
    }

    fn rotation(&self, kind: GateKind, qutrit: usize, phi: f64, theta: f64) -> Result<GateInstruction> {
        let transition = if kind == GateKind::R01 { Transition::Ge } else { Transition::Ef };
        let duration = self.timings.get(qutrit)?.rotation(transition, theta);
        GateInstruction::new(kind, vec![qutrit], vec![phi, theta], duration)
    }

    pub fn r01(&self, qutrit: usize, phi: f64, theta: f64) -> Result<GateInstruction> {
        self.rotation(GateKind::R01, qutrit, phi, theta)
    }

    pub fn r12(&self, qutrit: usize, phi: f64, theta: f64) -> Result<GateInstruction> {
        self.rotation(GateKind::R12, qutrit, phi, theta)
    }

    /// Duration an instruction would take on this device, ns.
    pub fn gate_duration(&self, instr: &GateInstruction) -> Result<f64> {
        match instr.kind {
            GateKind::R01 => Ok(self.timings.get(instr.targets[0])?.rotation(Transition::Ge, instr.params[1])),
            GateKind::R12 => Ok(self.timings.get(instr.targets[0])?.rotation(Transition::Ef, instr.params[1])),
            _ => Ok(instr.duration_ns),
        }
    }

    /// Native sequence for a logical gate, in time order.
    pub fn decompose_single(&self, gate: LogicalGate, qutrit: usize) -> Result<Vec<GateInstruction>> {
        self.timings.get(qutrit)?;
        let beta = hadamard_beta();
        let third = 2.0 * PI / 3.0;
        let q = qutrit;
        let seq = match gate {
            LogicalGate::I => vec![],
            LogicalGate::H => vec![
                GateInstruction::vphase(q, 0.0, PI)?,
                self.r12(q, 0.0, FRAC_PI_2)?,
                GateInstruction::vphase(q, PI, FRAC_PI_2)?,
                self.r01(q, 0.0, beta)?,
                self.r12(q, 0.0, FRAC_PI_2)?,
            ],
            LogicalGate::Hdag => vec![
                self.r12(q, PI, FRAC_PI_2)?,
                self.r01(q, PI, beta)?,
                GateInstruction::vphase(q, -PI, -FRAC_PI_2)?,
                self.r12(q, PI, FRAC_PI_2)?,
                GateInstruction::vphase(q, 0.0, -PI)?,
            ],
            LogicalGate::X => vec![self.r12(q, 0.0, PI)?, self.r01(q, 0.0, PI)?],
            LogicalGate::Xsq => vec![self.r01(q, PI, PI)?, self.r12(q, PI, PI)?],
            LogicalGate::Z => vec![GateInstruction::vphase(q, third, third)?],
            LogicalGate::Zsq => vec![GateInstruction::vphase(q, 2.0 * third, 2.0 * third)?],
        };
        Ok(seq)
    }

    /// Appends a layer of simultaneous logical gates (one per listed qutrit).
    pub fn push_layer(&self, circuit: &mut Circuit, layer: &[(LogicalGate, usize)]) -> Result<()> {
        for &(gate, q) in layer {
            for instr in self.decompose_single(gate, q)? {
                circuit.push(instr)?;
            }
        }
        Ok(())
    }

    /// Circuit applying `gate` to a single qutrit register.
    pub fn single_gate_circuit(&self, gate: LogicalGate, qutrit: usize) -> Result<Circuit> {
        let mut c = Circuit::new(1)?;
        let single = Compiler::new(self.timings.single(qutrit)?);
        single.push_layer(&mut c, &[(gate, 0)])?;
        Ok(c)
    }

    /// C_p(θ, |mn⟩) on qutrits (0, 1) from native instructions only.
    ///
    /// Each qutrit is walked upward with π pulses until the pair sits on |21⟩
    /// or |22⟩, the matching native CPhase is applied, and the path is undone.
    pub fn compile_cphase(&self, theta: f64, target: &BasisLabel) -> Result<Circuit> {
        let mut c = Circuit::new(2)?;
        self.push_cphase(&mut c, theta, target, (0, 1))?;
        Ok(c)
    }

    /// Appends C_p(θ, |mn⟩) with `m` on `qutrits.0` and `n` on `qutrits.1`.
    pub fn push_cphase(&self, circuit: &mut Circuit, theta: f64, target: &BasisLabel, qutrits: (usize, usize)) -> Result<()> {
        if target.n_qutrits() != 2 {
            return Err(Error::InvalidLabel(format!("CPhase target |{target}⟩ is not a two-qutrit label")));
        }
        let (qa, qb) = qutrits;
        let (m, n) = (target.digits()[0], target.digits()[1]);
        let native21 = n <= 1;
        let n_goal = if native21 { 1 } else { 2 };
        let mut forward = Circuit::new(circuit.n_qutrits())?;
        for level in m..2 {
            forward.push(self.climb(qa, level, 0.0)?)?;
        }
        for level in n..n_goal {
            forward.push(self.climb(qb, level, 0.0)?)?;
        }
        circuit.extend(&forward)?;
        let native = if native21 {
            GateInstruction::cphase21(qa, qb, theta)?
        } else {
            GateInstruction::cphase22(qa, qb, theta)?
        };
        circuit.push(native)?;
        // mirror image of the forward schedule, each π pulse undone by R(π, π)
        for moment in forward.moments().iter().rev() {
            let undo = moment
                .iter()
                .map(|g| self.climb(g.targets[0], if g.kind == GateKind::R01 { 0 } else { 1 }, PI))
                .collect::<Result<Vec<_>>>()?;
            circuit.push_moment(undo)?;
        }
        Ok(())
    }

    /// π pulse between `level` and `level + 1`.
    fn climb(&self, qutrit: usize, level: u8, phi: f64) -> Result<GateInstruction> {
        if level == 0 {
            self.r01(qutrit, phi, PI)
        } else {
            self.r12(qutrit, phi, PI)
        }
    }
}

/// Folds every VPhase into the phases of later rotations.
///
/// Returns the VPhase-free circuit and the frame left over at the end; the
/// original unitary equals (⊗ leftover frame) · lowered unitary.
pub fn lower_frames(circuit: &Circuit) -> Result<(Circuit, PhaseFrame)> {
    let n = circuit.n_qutrits();
    let mut frame = PhaseFrame::new(n);
    let mut out = Circuit::new(n)?;
    for moment in circuit.moments() {
        let mut lowered = Vec::new();
        for g in moment {
            match g.kind {
                GateKind::VPhase => frame.advance(g.targets[0], g.params[0], g.params[1]),
                GateKind::R01 | GateKind::R12 => {
                    let phi = frame.rewrite(g.kind, g.targets[0], g.params[0]);
                    lowered.push(GateInstruction::new(g.kind, g.targets.clone(), vec![phi, g.params[1]], g.duration_ns)?);
                }
                GateKind::CPhaseNative21 | GateKind::CPhaseNative22 => lowered.push(g.clone()),
            }
        }
        out.push_moment(lowered)?;
    }
    Ok((out, frame))
}

/// Unitary of the frame-rewritten circuit with the residual frame applied at the end.
pub fn frame_rewritten_unitary(circuit: &Circuit) -> Result<CMatrix> {
    let (lowered, frame) = lower_frames(circuit)?;
    let mut u = lowered.unitary()?;
    for q in 0..circuit.n_qutrits() {
        u = embed(&frame.matrix(q), &[q], circuit.n_qutrits())? * u;
    }
    Ok(u)
}

/// Explicit-VPhase and frame-rewriting executions agree up to global phase.
pub fn frame_equivalence_check(circuit: &Circuit) -> Result<bool> {
    Ok(equal_up_to_phase(&circuit.unitary()?, &frame_rewritten_unitary(circuit)?, EQUIVALENCE_TOL))
}

/// Compiled single-gate unitary equals the logical matrix up to global phase.
pub fn single_gate_matches(compiler: &Compiler, gate: LogicalGate) -> Result<bool> {
    let c = compiler.single_gate_circuit(gate, 0)?;
    Ok(equal_up_to_phase(&c.unitary()?, &logical_gate(gate), EQUIVALENCE_TOL))
}

/// Compiled CPhase unitary equals the ideal matrix up to global phase.
pub fn cphase_matches(compiler: &Compiler, theta: f64, target: &BasisLabel) -> Result<bool> {
    let c = compiler.compile_cphase(theta, target)?;
    Ok(equal_up_to_phase(&c.unitary()?, &cphase_matrix(theta, target)?, EQUIVALENCE_TOL))
}
