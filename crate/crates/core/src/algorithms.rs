//! Two-qutrit Deutsch-Jozsa, Bernstein-Vazirani and Grover circuits, their
//! oracle families, output classifiers and classical baselines.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::compiler::Compiler;
use crate::error::{Error, Result};
use crate::gates::LogicalGate;
use crate::sim::simulate_pure;
use crate::state::{BasisLabel, ProbDist, PureState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleKind {
    Constant,
    Balanced,
}

impl fmt::Display for OracleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OracleKind::Constant => "constant",
            OracleKind::Balanced => "balanced",
        })
    }
}

/// DJ oracle W1 ⊗ W2 with each W in {I, X, X², Z, Z²}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DjOracle {
    pub w1: LogicalGate,
    pub w2: LogicalGate,
}

const ORACLE_GATES: [LogicalGate; 5] = [LogicalGate::I, LogicalGate::X, LogicalGate::Xsq, LogicalGate::Z, LogicalGate::Zsq];

fn is_shift(g: LogicalGate) -> bool {
    matches!(g, LogicalGate::I | LogicalGate::X | LogicalGate::Xsq)
}

/// Contribution of one oracle factor to the classical function, given the input trit.
fn term_value(g: LogicalGate, input: u8) -> u8 {
    match g {
        LogicalGate::X => 1,
        LogicalGate::Xsq => 2,
        LogicalGate::Z => input,
        LogicalGate::Zsq => (2 * input) % 3,
        _ => 0,
    }
}

fn term_text(g: LogicalGate, var: &str) -> String {
    match g {
        LogicalGate::X => "1".into(),
        LogicalGate::Xsq => "2".into(),
        LogicalGate::Z => var.into(),
        LogicalGate::Zsq => format!("(2 ⊙ {var})"),
        _ => "0".into(),
    }
}

fn gate_symbol(g: LogicalGate) -> &'static str {
    match g {
        LogicalGate::X => "X",
        LogicalGate::Xsq => "X²",
        LogicalGate::Z => "Z",
        LogicalGate::Zsq => "Z²",
        _ => "I",
    }
}

impl DjOracle {
    pub fn new(w1: LogicalGate, w2: LogicalGate) -> Result<Self> {
        for w in [w1, w2] {
            if !ORACLE_GATES.contains(&w) {
                return Err(Error::UnknownGate(format!("{w} is not an oracle gate")));
            }
        }
        Ok(Self { w1, w2 })
    }

    pub fn kind(&self) -> OracleKind {
        if is_shift(self.w1) && is_shift(self.w2) {
            OracleKind::Constant
        } else {
            OracleKind::Balanced
        }
    }

    /// Output value of a constant oracle: total X power mod 3.
    pub fn constant_value(&self) -> Option<u8> {
        (self.kind() == OracleKind::Constant).then(|| (term_value(self.w1, 0) + term_value(self.w2, 0)) % 3)
    }

    /// Equivalent classical ternary function f(A, B).
    pub fn evaluate(&self, a: u8, b: u8) -> u8 {
        (term_value(self.w1, a) + term_value(self.w2, b)) % 3
    }

    pub fn classical_function(&self) -> String {
        format!("{} ⊕ {}", term_text(self.w1, "A"), term_text(self.w2, "B"))
    }

    pub fn label(&self) -> String {
        format!("{}⊗{}", gate_symbol(self.w1), gate_symbol(self.w2))
    }

    /// Machine-friendly name such as `Z,Xsq`.
    pub fn key(&self) -> String {
        format!("{},{}", self.w1, self.w2)
    }
}

impl FromStr for DjOracle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split([',', '⊗']).collect();
        if parts.len() != 2 {
            return Err(Error::InvalidArgument(format!("oracle `{s}` is not of the form W1,W2")));
        }
        DjOracle::new(parts[0].parse()?, parts[1].parse()?)
    }
}

/// All 25 oracles: the 9 constant ones first, then the 16 balanced ones.
pub fn all_dj_oracles() -> Vec<DjOracle> {
    let mut out = constant_oracles();
    out.extend(balanced_oracle_table().into_iter().map(|r| r.oracle));
    out
}

pub fn constant_oracles() -> Vec<DjOracle> {
    let shifts = [LogicalGate::I, LogicalGate::X, LogicalGate::Xsq];
    shifts
        .iter()
        .flat_map(|&a| shifts.iter().map(move |&b| DjOracle { w1: a, w2: b }))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BalancedOracleRow {
    pub oracle: DjOracle,
    pub function: String,
}

/// The 16 balanced oracles with their classical functions, in table reading order.
pub fn balanced_oracle_table() -> Vec<BalancedOracleRow> {
    use LogicalGate::{Xsq, Zsq, I, X, Z};
    let pairs = [
        (Z, I), (I, Z),
        (Z, X), (X, Z),
        (Z, Xsq), (Xsq, Z),
        (Zsq, I), (I, Zsq),
        (Zsq, X), (X, Zsq),
        (Zsq, Xsq), (Xsq, Zsq),
        (Z, Z), (Z, Zsq),
        (Zsq, Z), (Zsq, Zsq),
    ];
    pairs
        .iter()
        .map(|&(w1, w2)| {
            let oracle = DjOracle { w1, w2 };
            BalancedOracleRow { oracle, function: oracle.classical_function() }
        })
        .collect()
}

fn sandwich(compiler: &Compiler, w1: LogicalGate, w2: LogicalGate) -> Result<Circuit> {
    let mut c = Circuit::new(2)?;
    compiler.push_layer(&mut c, &[(LogicalGate::H, 0), (LogicalGate::H, 1)])?;
    compiler.push_layer(&mut c, &[(w1, 0), (w2, 1)])?;
    compiler.push_layer(&mut c, &[(LogicalGate::Hdag, 0), (LogicalGate::Hdag, 1)])?;
    Ok(c)
}

/// H⊗H, the oracle, then H†⊗H†.
pub fn dj_circuit(compiler: &Compiler, oracle: &DjOracle) -> Result<Circuit> {
    sandwich(compiler, oracle.w1, oracle.w2)
}

/// Constant iff more than half of the mass sits on |00⟩.
pub fn dj_classify(dist: &ProbDist) -> OracleKind {
    if dist.probs().first().copied().unwrap_or(0.0) > 0.5 {
        OracleKind::Constant
    } else {
        OracleKind::Balanced
    }
}

/// Hidden string of two trits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BvString(pub [u8; 2]);

impl BvString {
    pub fn new(s0: u8, s1: u8) -> Result<Self> {
        if s0 > 2 || s1 > 2 {
            return Err(Error::InvalidLabel(format!("{s0}{s1}")));
        }
        Ok(Self([s0, s1]))
    }

    pub fn all() -> Vec<BvString> {
        (0..9).map(|k| BvString([k / 3, k % 3])).collect()
    }

    pub fn label(&self) -> BasisLabel {
        BasisLabel::pair(self.0[0], self.0[1]).expect("trits are valid")
    }
}

impl fmt::Display for BvString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.0[0], self.0[1])
    }
}

fn z_power(p: u8) -> LogicalGate {
    match p {
        1 => LogicalGate::Z,
        2 => LogicalGate::Zsq,
        _ => LogicalGate::I,
    }
}

/// DJ skeleton with W_j = Z^{s_j}.
pub fn bv_circuit(compiler: &Compiler, s: &BvString) -> Result<Circuit> {
    sandwich(compiler, z_power(s.0[0]), z_power(s.0[1]))
}

/// Most likely label; ties go to the lowest index.
pub fn bv_decode(dist: &ProbDist) -> Result<BvString> {
    if dist.len() != 9 {
        return Err(Error::DimensionMismatch { expected: 9, found: dist.len() });
    }
    let k = dist.argmax() as u8;
    Ok(BvString([k / 3, k % 3]))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroverSpec {
    pub target: BasisLabel,
    pub iterations: usize,
}

impl GroverSpec {
    pub fn new(target: BasisLabel, iterations: usize) -> Result<Self> {
        if target.n_qutrits() != 2 {
            return Err(Error::InvalidLabel(format!("Grover target |{target}⟩ must have two trits")));
        }
        if !(1..=2).contains(&iterations) {
            return Err(Error::InvalidArgument(format!("{iterations} Grover iterations; supported: 1 or 2")));
        }
        Ok(Self { target, iterations })
    }
}

/// H⊗H, then per iteration the oracle C_p(π, target) and the diffusion
/// (H⊗H)·C_p(π, |00⟩)·(H⊗H)†, each CPhase built from the π-pulse ladder.
pub fn grover_circuit(compiler: &Compiler, spec: &GroverSpec) -> Result<Circuit> {
    let spec = GroverSpec::new(spec.target.clone(), spec.iterations)?;
    let zero = BasisLabel::pair(0, 0)?;
    let mut c = Circuit::new(2)?;
    compiler.push_layer(&mut c, &[(LogicalGate::H, 0), (LogicalGate::H, 1)])?;
    for _ in 0..spec.iterations {
        compiler.push_cphase(&mut c, std::f64::consts::PI, &spec.target, (0, 1))?;
        compiler.push_layer(&mut c, &[(LogicalGate::Hdag, 0), (LogicalGate::Hdag, 1)])?;
        compiler.push_cphase(&mut c, std::f64::consts::PI, &zero, (0, 1))?;
        compiler.push_layer(&mut c, &[(LogicalGate::H, 0), (LogicalGate::H, 1)])?;
    }
    Ok(c)
}

/// sin²((2k+1)·arcsin(1/3)): ideal success after k rounds over nine items.
pub fn grover_ideal_success(iterations: usize) -> f64 {
    ((2 * iterations + 1) as f64 * (1.0f64 / 3.0).asin()).sin().powi(2)
}

/// Noiseless outcome distribution of a circuit started in |0…0⟩.
pub fn ideal_distribution(circuit: &Circuit) -> Result<ProbDist> {
    Ok(simulate_pure(circuit, &PureState::ground(circuit.n_qutrits())?)?.probabilities())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalBaselines {
    pub dj: f64,
    pub bv: f64,
    pub grover1: f64,
    pub grover2: f64,
}

/// Success rates of the best single-query classical strategies.
pub fn classical_baselines() -> ClassicalBaselines {
    ClassicalBaselines { dj: 0.5, bv: 1.0 / 3.0, grover1: 1.0 / 9.0, grover2: 1.0 / 9.0 + (8.0 / 9.0) * (1.0 / 8.0) }
}

/// Worst-case deterministic classical queries to decide constant vs balanced on n trits.
pub fn dj_classical_query_count(n: u32) -> Result<u64> {
    if n < 1 {
        return Err(Error::InvalidArgument("need at least one trit".into()));
    }
    Ok(3u64.pow(n - 1) + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn compiler() -> Compiler {
        Compiler::default()
    }

    #[test]
    fn constant_identity_oracle_returns_00() {
        let o = DjOracle::new(LogicalGate::I, LogicalGate::I).unwrap();
        let p = ideal_distribution(&dj_circuit(&compiler(), &o).unwrap()).unwrap();
        assert!((p.probs()[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn balanced_zz_never_returns_00() {
        let o = DjOracle::new(LogicalGate::Z, LogicalGate::Z).unwrap();
        let p = ideal_distribution(&dj_circuit(&compiler(), &o).unwrap()).unwrap();
        assert!(p.probs()[0] < 1e-12);
    }

    #[test]
    fn x_xsq_is_constant_zero() {
        let o = DjOracle::new(LogicalGate::X, LogicalGate::Xsq).unwrap();
        assert_eq!(o.constant_value(), Some(0));
        let p = ideal_distribution(&dj_circuit(&compiler(), &o).unwrap()).unwrap();
        assert_eq!(dj_classify(&p), OracleKind::Constant);
    }

    #[test]
    fn invalid_oracle_gate() {
        assert!(DjOracle::new(LogicalGate::H, LogicalGate::I).is_err());
        assert!("Z,Y".parse::<DjOracle>().is_err());
        assert_eq!("Zsq,X".parse::<DjOracle>().unwrap(), DjOracle { w1: LogicalGate::Zsq, w2: LogicalGate::X });
    }

    #[test]
    fn classify_examples() {
        assert_eq!(dj_classify(&ProbDist::delta(&"00".parse().unwrap())), OracleKind::Constant);
        let mut rest = vec![1.0 / 8.0; 9];
        rest[0] = 0.0;
        assert_eq!(dj_classify(&ProbDist::new(rest).unwrap()), OracleKind::Balanced);
        let mut p = vec![0.245 / 8.0; 9];
        p[0] = 0.755;
        assert_eq!(dj_classify(&ProbDist::new(p).unwrap()), OracleKind::Constant);
    }

    #[test]
    fn table_rows() {
        let rows = balanced_oracle_table();
        assert_eq!(rows.len(), 16);
        let find = |w1, w2| rows.iter().find(|r| r.oracle == DjOracle { w1, w2 }).unwrap().function.clone();
        assert_eq!(find(LogicalGate::Z, LogicalGate::I), "A ⊕ 0");
        assert_eq!(find(LogicalGate::Z, LogicalGate::X), "A ⊕ 1");
        assert_eq!(find(LogicalGate::Zsq, LogicalGate::Zsq), "(2 ⊙ A) ⊕ (2 ⊙ B)");
        assert_eq!(find(LogicalGate::Xsq, LogicalGate::Zsq), "2 ⊕ (2 ⊙ B)");
        assert!(rows.iter().all(|r| r.oracle.kind() == OracleKind::Balanced));
    }

    #[test]
    fn balanced_truth_tables() {
        for row in balanced_oracle_table() {
            let mut counts = [0; 3];
            for a in 0..3 {
                for b in 0..3 {
                    counts[row.oracle.evaluate(a, b) as usize] += 1;
                }
            }
            assert_eq!(counts, [3, 3, 3], "{}", row.oracle.label());
        }
        assert_eq!(constant_oracles().len(), 9);
        assert_eq!(all_dj_oracles().len(), 25);
    }

    #[test]
    fn bv_examples() {
        let c = compiler();
        let p = ideal_distribution(&bv_circuit(&c, &BvString::new(0, 0).unwrap()).unwrap()).unwrap();
        assert!((p.probs()[0] - 1.0).abs() < 1e-12);
        let s = BvString::new(1, 2).unwrap();
        let p = ideal_distribution(&bv_circuit(&c, &s).unwrap()).unwrap();
        assert!((p.probs()[5] - 1.0).abs() < 1e-12);
        assert_eq!(bv_decode(&p).unwrap(), s);
        assert!(BvString::new(3, 0).is_err());
    }

    #[test]
    fn bv_decode_cases() {
        assert_eq!(bv_decode(&ProbDist::delta(&"12".parse().unwrap())).unwrap(), BvString([1, 2]));
        assert_eq!(bv_decode(&ProbDist::delta(&"00".parse().unwrap())).unwrap(), BvString([0, 0]));
        let mut p = vec![0.217 / 8.0; 9];
        p[4] = 0.783;
        assert_eq!(bv_decode(&ProbDist::new(p).unwrap()).unwrap(), BvString([1, 1]));
        assert_eq!(bv_decode(&ProbDist::uniform(9)).unwrap(), BvString([0, 0]));
    }

    #[test]
    fn grover_single_round() {
        let c = grover_circuit(&compiler(), &GroverSpec::new("22".parse().unwrap(), 1).unwrap()).unwrap();
        let p = ideal_distribution(&c).unwrap();
        assert!((p.probs()[8] - 0.7265).abs() < 1e-3);
        // each of the other eight: (1 − 0.7265)/8
        for k in 0..8 {
            assert!((p.probs()[k] - 0.0342).abs() < 1e-3, "{k}: {}", p.probs()[k]);
        }
    }

    #[test]
    fn grover_analytic_values() {
        assert!((grover_ideal_success(1) - 529.0 / 729.0).abs() < 1e-12);
        assert!((grover_ideal_success(2) - (241.0f64 / 243.0).powi(2)).abs() < 1e-12);
    }

    #[test]
    fn grover_rejects_depth() {
        assert!(GroverSpec::new("11".parse().unwrap(), 3).is_err());
        assert!(GroverSpec::new("11".parse().unwrap(), 0).is_err());
        assert!(GroverSpec::new("1".parse().unwrap(), 1).is_err());
    }

    #[test]
    fn baselines_and_queries() {
        let b = classical_baselines();
        assert!((b.grover1 - 0.1111).abs() < 1e-4);
        assert!((b.grover2 - 0.2222).abs() < 1e-4);
        assert_eq!(b.dj, 0.5);
        assert_eq!(dj_classical_query_count(2).unwrap(), 4);
        assert_eq!(dj_classical_query_count(1).unwrap(), 2);
        assert_eq!(dj_classical_query_count(3).unwrap(), 10);
        assert!(dj_classical_query_count(0).is_err());
    }
}
