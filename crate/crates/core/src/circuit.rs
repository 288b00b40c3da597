//! Native-gate instructions, moment-structured circuits, phase frames and the
//! line-oriented text form.
//!
//! Text grammar (one moment per line):
//!
//! ```text
//! # comment
//! qutrits 2
//! R12(0; 0, 1.5707963267948966; 41.27) | R12(1; 0, 1.5707963267948966; 44.15)
//! CP21(0, 1; 3.141592653589793; 55.9)
//! ```
//!
//! Each instruction is `KIND(targets; params; duration_ns)` with comma-separated
//! targets and params; instructions inside a moment are separated by `|`.
//! KIND is one of `R01`, `R12`, `VZ`, `CP21`, `CP22`. Blank lines and text after
//! `#` are ignored. The `qutrits N` header must precede the first moment.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{cphase_matrix, r01_matrix, r12_matrix, vphase_matrix, CPHASE21_DURATION_NS, CPHASE22_DURATION_NS};
use crate::linalg::{check_targets, embed, identity, CMatrix};
use crate::state::{BasisLabel, MAX_QUTRITS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    R01,
    R12,
    VPhase,
    CPhaseNative21,
    CPhaseNative22,
}

impl GateKind {
    fn tag(self) -> &'static str {
        match self {
            GateKind::R01 => "R01",
            GateKind::R12 => "R12",
            GateKind::VPhase => "VZ",
            GateKind::CPhaseNative21 => "CP21",
            GateKind::CPhaseNative22 => "CP22",
        }
    }

    fn arity(self) -> (usize, usize) {
        match self {
            GateKind::R01 | GateKind::R12 | GateKind::VPhase => (1, 2),
            GateKind::CPhaseNative21 | GateKind::CPhaseNative22 => (2, 1),
        }
    }

    pub fn is_rotation(self) -> bool {
        matches!(self, GateKind::R01 | GateKind::R12)
    }
}

impl FromStr for GateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "R01" => GateKind::R01,
            "R12" => GateKind::R12,
            "VZ" | "VPhase" => GateKind::VPhase,
            "CP21" => GateKind::CPhaseNative21,
            "CP22" => GateKind::CPhaseNative22,
            other => return Err(Error::UnknownGate(other.to_string())),
        })
    }
}

/// One native operation. Rotations carry `[φ, θ]`, VPhase `[x, y]`, CPhases `[θ]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateInstruction {
    pub kind: GateKind,
    pub targets: Vec<usize>,
    pub params: Vec<f64>,
    pub duration_ns: f64,
}

impl GateInstruction {
    pub fn new(kind: GateKind, targets: Vec<usize>, params: Vec<f64>, duration_ns: f64) -> Result<Self> {
        let (n_targets, n_params) = kind.arity();
        if targets.len() != n_targets {
            return Err(Error::InvalidTargets(format!("{} takes {n_targets} target(s), got {}", kind.tag(), targets.len())));
        }
        if n_targets == 2 && targets[0] == targets[1] {
            return Err(Error::InvalidTargets(format!("{} on a repeated qutrit", kind.tag())));
        }
        if params.len() != n_params {
            return Err(Error::InvalidArgument(format!("{} takes {n_params} parameter(s), got {}", kind.tag(), params.len())));
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite parameter in {}", kind.tag())));
        }
        if !(duration_ns.is_finite() && duration_ns >= 0.0) {
            return Err(Error::InvalidArgument(format!("duration {duration_ns} ns")));
        }
        let expected = match kind {
            GateKind::VPhase => Some(0.0),
            GateKind::CPhaseNative21 => Some(CPHASE21_DURATION_NS),
            GateKind::CPhaseNative22 => Some(CPHASE22_DURATION_NS),
            _ => None,
        };
        if let Some(d) = expected {
            if duration_ns != d {
                return Err(Error::InvalidArgument(format!("{} must last {d} ns, got {duration_ns}", kind.tag())));
            }
        }
        Ok(Self { kind, targets, params, duration_ns })
    }

    pub fn r01(qutrit: usize, phi: f64, theta: f64, duration_ns: f64) -> Result<Self> {
        Self::new(GateKind::R01, vec![qutrit], vec![phi, theta], duration_ns)
    }

    pub fn r12(qutrit: usize, phi: f64, theta: f64, duration_ns: f64) -> Result<Self> {
        Self::new(GateKind::R12, vec![qutrit], vec![phi, theta], duration_ns)
    }

    pub fn vphase(qutrit: usize, x: f64, y: f64) -> Result<Self> {
        Self::new(GateKind::VPhase, vec![qutrit], vec![x, y], 0.0)
    }

    /// Native C_p(θ, |21⟩) with `first` carrying the "2" digit.
    pub fn cphase21(first: usize, second: usize, theta: f64) -> Result<Self> {
        Self::new(GateKind::CPhaseNative21, vec![first, second], vec![theta], CPHASE21_DURATION_NS)
    }

    pub fn cphase22(first: usize, second: usize, theta: f64) -> Result<Self> {
        Self::new(GateKind::CPhaseNative22, vec![first, second], vec![theta], CPHASE22_DURATION_NS)
    }

    /// Local matrix on the instruction's own targets (3×3 or 9×9).
    pub fn matrix(&self) -> CMatrix {
        let p = &self.params;
        match self.kind {
            GateKind::R01 => r01_matrix(p[0], p[1]),
            GateKind::R12 => r12_matrix(p[0], p[1]),
            GateKind::VPhase => vphase_matrix(p[0], p[1]),
            GateKind::CPhaseNative21 => cphase_matrix(p[0], &BasisLabel::pair(2, 1).expect("valid label")).expect("two-qutrit label"),
            GateKind::CPhaseNative22 => cphase_matrix(p[0], &BasisLabel::pair(2, 2).expect("valid label")).expect("two-qutrit label"),
        }
    }

    /// True for a rotation by an odd multiple of π.
    pub fn is_pi_pulse(&self) -> bool {
        if !self.kind.is_rotation() {
            return false;
        }
        let turns = self.params[1] / std::f64::consts::PI;
        (turns - turns.round()).abs() < 1e-9 && (turns.round() as i64) % 2 != 0
    }
}

impl fmt::Display for GateInstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let targets: Vec<String> = self.targets.iter().map(|t| t.to_string()).collect();
        let params: Vec<String> = self.params.iter().map(|p| p.to_string()).collect();
        write!(f, "{}({}; {}; {})", self.kind.tag(), targets.join(", "), params.join(", "), self.duration_ns)
    }
}

impl FromStr for GateInstruction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = |m: &str| Error::InvalidArgument(format!("malformed instruction `{s}`: {m}"));
        let open = s.find('(').ok_or_else(|| bad("missing `(`"))?;
        if !s.ends_with(')') {
            return Err(bad("missing `)`"));
        }
        let kind: GateKind = s[..open].trim().parse()?;
        let fields: Vec<&str> = s[open + 1..s.len() - 1].split(';').collect();
        if fields.len() != 3 {
            return Err(bad("expected `targets; params; duration`"));
        }
        let targets = split_list(fields[0])
            .map(|t| t.parse::<usize>().map_err(|_| bad("target is not an index")))
            .collect::<Result<Vec<_>>>()?;
        let params = split_list(fields[1])
            .map(|t| t.parse::<f64>().map_err(|_| bad("parameter is not a number")))
            .collect::<Result<Vec<_>>>()?;
        let duration = fields[2].trim().parse::<f64>().map_err(|_| bad("duration is not a number"))?;
        GateInstruction::new(kind, targets, params, duration)
    }
}

fn split_list(s: &str) -> impl Iterator<Item = &str> {
    s.split(',').map(str::trim).filter(|t| !t.is_empty())
}

/// Per-qutrit virtual phase accumulators.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PhaseFrame {
    pub theta01: Vec<f64>,
    pub theta12: Vec<f64>,
}

impl PhaseFrame {
    pub fn new(n_qutrits: usize) -> Self {
        Self { theta01: vec![0.0; n_qutrits], theta12: vec![0.0; n_qutrits] }
    }

    pub fn advance(&mut self, qutrit: usize, x: f64, y: f64) {
        self.theta01[qutrit] += x;
        self.theta12[qutrit] += y;
    }

    /// Phase that a rotation on `qutrit` must use so that it acts, in the
    /// rotating frame, like the requested one.
    pub fn rewrite(&self, kind: GateKind, qutrit: usize, phi: f64) -> f64 {
        match kind {
            GateKind::R01 => phi - self.theta01[qutrit],
            GateKind::R12 => phi - self.theta12[qutrit],
            _ => phi,
        }
    }

    /// The pending frame as an explicit VPhase matrix for one qutrit.
    pub fn matrix(&self, qutrit: usize) -> CMatrix {
        vphase_matrix(self.theta01[qutrit], self.theta12[qutrit])
    }

    pub fn is_zero(&self) -> bool {
        self.theta01.iter().chain(&self.theta12).all(|v| *v == 0.0)
    }
}

/// Ordered moments of simultaneously executed, qutrit-disjoint instructions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    n_qutrits: usize,
    moments: Vec<Vec<GateInstruction>>,
}

impl Circuit {
    pub fn new(n_qutrits: usize) -> Result<Self> {
        if n_qutrits == 0 || n_qutrits > MAX_QUTRITS {
            return Err(Error::InvalidArgument(format!("{n_qutrits} qutrits")));
        }
        Ok(Self { n_qutrits, moments: Vec::new() })
    }

    pub fn n_qutrits(&self) -> usize {
        self.n_qutrits
    }

    pub fn moments(&self) -> &[Vec<GateInstruction>] {
        &self.moments
    }

    pub fn is_empty(&self) -> bool {
        self.moments.is_empty()
    }

    pub fn instructions(&self) -> impl Iterator<Item = &GateInstruction> {
        self.moments.iter().flatten()
    }

    /// Schedules `instr` as early as possible after every earlier instruction
    /// sharing a qutrit with it.
    pub fn push(&mut self, instr: GateInstruction) -> Result<()> {
        check_targets(&instr.targets, self.n_qutrits)?;
        let last_busy = self
            .moments
            .iter()
            .rposition(|m| m.iter().any(|g| g.targets.iter().any(|t| instr.targets.contains(t))));
        let slot = last_busy.map_or(0, |k| k + 1);
        if slot == self.moments.len() {
            self.moments.push(vec![instr]);
        } else {
            self.moments[slot].push(instr);
        }
        Ok(())
    }

    /// Appends a whole moment after all existing ones.
    pub fn push_moment(&mut self, moment: Vec<GateInstruction>) -> Result<()> {
        let mut used = Vec::new();
        for g in &moment {
            check_targets(&g.targets, self.n_qutrits)?;
            if g.targets.iter().any(|t| used.contains(t)) {
                return Err(Error::InvalidTargets(format!("qutrit used twice in one moment by {g}")));
            }
            used.extend_from_slice(&g.targets);
        }
        if !moment.is_empty() {
            self.moments.push(moment);
        }
        Ok(())
    }

    /// Appends every instruction of `other` with ASAP scheduling.
    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        if other.n_qutrits != self.n_qutrits {
            return Err(Error::DimensionMismatch { expected: self.n_qutrits, found: other.n_qutrits });
        }
        for g in other.instructions() {
            self.push(g.clone())?;
        }
        Ok(())
    }

    pub fn moment_duration(moment: &[GateInstruction]) -> f64 {
        moment.iter().map(|g| g.duration_ns).fold(0.0, f64::max)
    }

    /// Σ over moments of the longest instruction in the moment, ns.
    pub fn duration_ns(&self) -> f64 {
        self.moments.iter().map(|m| Self::moment_duration(m)).sum()
    }

    /// Unitary of one moment on the full register.
    pub fn moment_unitary(&self, moment: &[GateInstruction]) -> Result<CMatrix> {
        let mut u = identity(3usize.pow(self.n_qutrits as u32));
        for g in moment {
            u = embed(&g.matrix(), &g.targets, self.n_qutrits)? * u;
        }
        Ok(u)
    }

    /// Full unitary with VPhases applied as explicit matrices.
    pub fn unitary(&self) -> Result<CMatrix> {
        let mut u = identity(3usize.pow(self.n_qutrits as u32));
        for m in &self.moments {
            u = self.moment_unitary(m)? * u;
        }
        Ok(u)
    }

    pub fn count(&self, pred: impl Fn(&GateInstruction) -> bool) -> usize {
        self.instructions().filter(|g| pred(g)).count()
    }

    pub fn pi_pulse_count(&self) -> usize {
        self.count(GateInstruction::is_pi_pulse)
    }

    /// Physical (non-virtual) single-qutrit pulses.
    pub fn pulse_count(&self) -> usize {
        self.count(|g| g.kind.is_rotation())
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("qutrits {}\n", self.n_qutrits);
        for m in &self.moments {
            let parts: Vec<String> = m.iter().map(|g| g.to_string()).collect();
            out.push_str(&parts.join(" | "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut circuit: Option<Circuit> = None;
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let perr = |message: String| Error::Parse { line: k + 1, message };
            if let Some(rest) = line.strip_prefix("qutrits") {
                if circuit.is_some() {
                    return Err(perr("duplicate `qutrits` header".into()));
                }
                let n = rest.trim().parse::<usize>().map_err(|_| perr(format!("bad qutrit count `{}`", rest.trim())))?;
                circuit = Some(Circuit::new(n).map_err(|e| perr(e.to_string()))?);
                continue;
            }
            let c = circuit.as_mut().ok_or_else(|| perr("moment before `qutrits` header".into()))?;
            let moment = line
                .split('|')
                .map(|s| s.parse::<GateInstruction>())
                .collect::<Result<Vec<_>>>()
                .map_err(|e| perr(e.to_string()))?;
            c.push_moment(moment).map_err(|e| perr(e.to_string()))?;
        }
        circuit.ok_or_else(|| Error::Parse { line: 0, message: "missing `qutrits` header".into() })
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn durations_pinned_for_virtual_and_native() {
        assert_eq!(GateInstruction::vphase(0, 1.0, 2.0).unwrap().duration_ns, 0.0);
        assert_eq!(GateInstruction::cphase21(0, 1, PI).unwrap().duration_ns, 55.9);
        assert_eq!(GateInstruction::cphase22(0, 1, PI).unwrap().duration_ns, 94.0);
        assert!(GateInstruction::new(GateKind::VPhase, vec![0], vec![0.0, 0.0], 3.0).is_err());
        assert!(GateInstruction::new(GateKind::CPhaseNative22, vec![0, 1], vec![PI], 50.0).is_err());
        assert!(GateInstruction::cphase21(1, 1, PI).is_err());
    }

    #[test]
    fn asap_scheduling_parallelizes_disjoint_qutrits() {
        let mut c = Circuit::new(2).unwrap();
        c.push(GateInstruction::r01(0, 0.0, PI, 94.98).unwrap()).unwrap();
        c.push(GateInstruction::r01(1, 0.0, PI, 95.41).unwrap()).unwrap();
        c.push(GateInstruction::r12(0, 0.0, PI, 78.52).unwrap()).unwrap();
        c.push(GateInstruction::cphase21(0, 1, PI).unwrap()).unwrap();
        assert_eq!(c.moments().len(), 3);
        assert!((c.duration_ns() - (95.41 + 78.52 + 55.9)).abs() < 1e-9);
    }

    #[test]
    fn moment_rejects_shared_qutrit() {
        let mut c = Circuit::new(2).unwrap();
        let a = GateInstruction::r01(0, 0.0, PI, 94.98).unwrap();
        let b = GateInstruction::vphase(0, 1.0, 1.0).unwrap();
        assert!(c.push_moment(vec![a, b]).is_err());
        let out = GateInstruction::r01(2, 0.0, PI, 94.98).unwrap();
        assert!(c.push(out).is_err());
    }

    #[test]
    fn text_round_trip() {
        let mut c = Circuit::new(2).unwrap();
        c.push(GateInstruction::vphase(0, 2.0 * PI / 3.0, 0.1).unwrap()).unwrap();
        c.push(GateInstruction::r12(1, -0.3, 1.2345678901234567, 33.3).unwrap()).unwrap();
        c.push(GateInstruction::cphase22(1, 0, 8.0 * PI / 9.0).unwrap()).unwrap();
        let parsed = Circuit::from_text(&c.to_text()).unwrap();
        assert_eq!(parsed, c);
    }

    #[test]
    fn text_parse_errors_carry_line() {
        let err = Circuit::from_text("qutrits 1\n# fine\nR01(0; 0; 10)\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        assert!(Circuit::from_text("R01(0; 0, 1; 10)").is_err());
        assert!(Circuit::from_text("").is_err());
        assert!(Circuit::from_text("qutrits 1\nFOO(0; 1; 0)").is_err());
    }

    #[test]
    fn frame_round_trip() {
        let mut f = PhaseFrame::new(2);
        f.advance(1, 0.7, -1.3);
        f.advance(1, -0.7, 1.3);
        assert!(f.is_zero());
    }

    #[test]
    fn pi_pulse_detection() {
        assert!(GateInstruction::r01(0, PI, PI, 94.98).unwrap().is_pi_pulse());
        assert!(GateInstruction::r01(0, 0.0, -PI, 94.98).unwrap().is_pi_pulse());
        assert!(!GateInstruction::r12(0, 0.0, PI / 2.0, 41.27).unwrap().is_pi_pulse());
        assert!(!GateInstruction::r12(0, 0.0, 2.0 * PI, 41.27).unwrap().is_pi_pulse());
        assert!(!GateInstruction::vphase(0, PI, PI).unwrap().is_pi_pulse());
    }
}
