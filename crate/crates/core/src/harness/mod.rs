//! Experiment orchestration: runs the algorithm families, the device sweep and
//! process tomography from one configuration, and packages results as JSON
//! bundles plus CSV figure data.

pub mod config;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

pub use config::{ExperimentConfig, DEFAULT_PROFILE, MIN_MITIGATION_SHOTS};

use crate::algorithms::{
    all_dj_oracles, bv_circuit, bv_decode, classical_baselines, dj_circuit, dj_classify, grover_circuit, BvString,
    GroverSpec, OracleKind,
};
use crate::circuit::Circuit;
use crate::compiler::cphase_matches;
use crate::device::{flux_sweep, j11_interior_minimum, SpectrumReport, OPERATING_FLUX};
use crate::error::{Error, Result};
use crate::gates::{logical_gate, LogicalGate};
use crate::mitigation::{apply_confusion, mitigate_counts, ConfusionMatrix};
use crate::noise::{simulate_lindblad_with, NoiseModel};
use crate::process::{chi_matrix, process_fidelity, QuantumChannel};
use crate::sim::{sample_counts, simulate_pure};
use crate::state::{BasisLabel, ProbDist, PureState};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metadata {
    pub experiment: String,
    pub version: String,
    pub config_hash: String,
    pub seed: Option<u64>,
    pub shots: Option<u64>,
    pub noisy: bool,
    pub mitigate: bool,
}

impl Metadata {
    fn new(experiment: &str, config: &ExperimentConfig) -> Self {
        Self {
            experiment: experiment.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config_hash: config.hash(),
            seed: config.seed,
            shots: config.shots,
            noisy: config.noisy,
            mitigate: config.mitigate,
        }
    }
}

/// Probabilities keyed by ternary label ("00" … "22").
pub type LabeledDist = BTreeMap<String, f64>;

fn labeled(p: &ProbDist) -> LabeledDist {
    let n = p.n_qutrits().unwrap_or(1);
    p.probs()
        .iter()
        .enumerate()
        .map(|(k, v)| (BasisLabel::from_index(k, n).expect("index in range").to_string(), *v))
        .collect()
}

fn labeled_counts(c: &[u64]) -> BTreeMap<String, u64> {
    let n = if c.len() == 9 { 2 } else { 1 };
    c.iter()
        .enumerate()
        .map(|(k, v)| (BasisLabel::from_index(k, n).map(|l| l.to_string()).unwrap_or_else(|_| k.to_string()), *v))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub key: String,
    pub group: String,
    pub duration_ns: f64,
    pub raw: LabeledDist,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counts: Option<BTreeMap<String, u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mitigated: Option<LabeledDist>,
    pub success_probability: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outcome: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub correct: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProcessReport {
    pub gate: String,
    /// 1-based physical qutrit
    pub qutrit: usize,
    pub duration_ns: f64,
    pub fidelity_noiseless: f64,
    pub fidelity_noisy: f64,
    pub chi_noisy_re: Vec<Vec<f64>>,
    pub chi_noisy_im: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultBundle {
    pub metadata: Metadata,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub runs: Vec<RunRecord>,
    pub summary: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub device: Option<Vec<SpectrumReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub process: Option<ProcessReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub circuit: Option<String>,
    /// (file name, contents) pairs written next to the JSON bundle.
    #[serde(skip)]
    pub csv: Vec<(String, String)>,
}

impl ResultBundle {
    fn new(experiment: &str, config: &ExperimentConfig) -> Self {
        Self {
            metadata: Metadata::new(experiment, config),
            runs: Vec::new(),
            summary: BTreeMap::new(),
            device: None,
            process: None,
            circuit: None,
            csv: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("bundle serializes")
    }

    /// Writes `<experiment>.json` and any CSV files into `dir`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        let json = dir.join(format!("{}.json", self.metadata.experiment));
        std::fs::write(&json, self.to_json())?;
        written.push(json);
        for (name, body) in &self.csv {
            let path = dir.join(name);
            std::fs::write(&path, body)?;
            written.push(path);
        }
        Ok(written)
    }

    fn record(&mut self, key: &str, value: f64) {
        self.summary.insert(key.into(), value);
    }
}

/// Outcome statistics of one circuit execution.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    pub raw: ProbDist,
    pub counts: Option<Vec<u64>>,
    pub mitigated: Option<ProbDist>,
}

impl Measurement {
    /// The distribution results are scored on: mitigated when available.
    pub fn best(&self) -> &ProbDist {
        self.mitigated.as_ref().unwrap_or(&self.raw)
    }
}

/// Outcome probabilities of a circuit started in the ground state.
pub fn circuit_probabilities(config: &ExperimentConfig, circuit: &Circuit) -> Result<ProbDist> {
    let ground = PureState::ground(circuit.n_qutrits())?;
    if !config.noisy {
        return Ok(simulate_pure(circuit, &ground)?.probabilities());
    }
    let (rho, _) = simulate_lindblad_with(circuit, &config.noise_model(), &ground.to_density(), config.lindblad)?;
    // drop the integration's tiny trace drift before sampling
    let p: Vec<f64> = rho.probabilities().probs().iter().map(|v| v.max(0.0)).collect();
    let total: f64 = p.iter().sum();
    ProbDist::new(p.iter().map(|v| v / total).collect())
}

/// Readout stage: exact, sampled, or sampled through the confusion matrix and mitigated.
pub fn measure(config: &ExperimentConfig, truth: &ProbDist, seed: Option<u64>, confusion: Option<&ConfusionMatrix>) -> Result<Measurement> {
    let Some(shots) = config.shots else {
        return Ok(Measurement { raw: truth.clone(), counts: None, mitigated: None });
    };
    let seed = seed.ok_or_else(|| Error::Config("sampled runs need a seed".into()))?;
    let (seen, m) = match (config.mitigate, confusion) {
        (true, Some(m)) => (apply_confusion(truth, m)?, Some(m)),
        (true, None) => return Err(Error::Config("mitigation requested without a confusion matrix".into())),
        _ => (truth.clone(), None),
    };
    let counts = sample_counts(&seen, shots, seed)?;
    let freqs: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    let raw = ProbDist::from_counts(&freqs)?.with_shots(shots);
    let mitigated = match m {
        Some(m) => {
            let p = mitigate_counts(&counts, m, None)?;
            Some(ProbDist::from_counts(&p)?.with_shots(shots))
        }
        None => None,
    };
    Ok(Measurement { raw, counts: Some(counts), mitigated })
}

fn confusion_for(config: &ExperimentConfig) -> Result<Option<ConfusionMatrix>> {
    if config.mitigate {
        config.confusion_matrix().map(Some)
    } else {
        Ok(None)
    }
}

fn record_for(key: String, group: String, circuit: &Circuit, m: &Measurement, success: f64) -> RunRecord {
    RunRecord {
        key,
        group,
        duration_ns: circuit.duration_ns(),
        raw: labeled(&m.raw),
        counts: m.counts.as_deref().map(labeled_counts),
        mitigated: m.mitigated.as_ref().map(labeled),
        success_probability: success,
        outcome: None,
        correct: None,
    }
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = xs.collect();
    if v.is_empty() {
        f64::NAN
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

/// All 25 Deutsch-Jozsa oracles.
pub fn run_dj(config: &ExperimentConfig) -> Result<ResultBundle> {
    config.validate()?;
    let compiler = config.compiler();
    let confusion = confusion_for(config)?;
    let oracles = all_dj_oracles();
    let runs = oracles
        .par_iter()
        .enumerate()
        .map(|(i, oracle)| {
            let c = dj_circuit(&compiler, oracle)?;
            let truth = circuit_probabilities(config, &c)?;
            let m = measure(config, &truth, config.run_seed("dj", i), confusion.as_ref())?;
            let p00 = m.best().probs()[0];
            let kind = oracle.kind();
            let sp = if kind == OracleKind::Constant { p00 } else { 1.0 - p00 };
            let guess = dj_classify(m.best());
            let mut r = record_for(oracle.key(), kind.to_string(), &c, &m, sp);
            r.outcome = Some(guess.to_string());
            r.correct = Some(guess == kind);
            Ok(r)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut b = ResultBundle::new("dj", config);
    let avg = |g: &str| mean(runs.iter().filter(|r| r.group == g).map(|r| r.success_probability));
    b.record("constant_avg", avg("constant"));
    b.record("balanced_avg", avg("balanced"));
    b.record("classical_baseline", classical_baselines().dj);
    b.record("correct_fraction", mean(runs.iter().map(|r| f64::from(u8::from(r.correct == Some(true))))));
    b.record("mean_duration_ns", mean(runs.iter().map(|r| r.duration_ns)));
    b.runs = runs;
    Ok(b)
}

/// All nine Bernstein-Vazirani strings.
pub fn run_bv(config: &ExperimentConfig) -> Result<ResultBundle> {
    config.validate()?;
    let compiler = config.compiler();
    let confusion = confusion_for(config)?;
    let strings = BvString::all();
    let runs = strings
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let c = bv_circuit(&compiler, s)?;
            let truth = circuit_probabilities(config, &c)?;
            let m = measure(config, &truth, config.run_seed("bv", i), confusion.as_ref())?;
            let decoded = bv_decode(m.best())?;
            let mut r = record_for(s.to_string(), "bv".into(), &c, &m, m.best().get(&s.label()));
            r.outcome = Some(decoded.to_string());
            r.correct = Some(decoded == *s);
            Ok(r)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut b = ResultBundle::new("bv", config);
    b.record("bv_avg", mean(runs.iter().map(|r| r.success_probability)));
    b.record("classical_baseline", classical_baselines().bv);
    b.record("correct_fraction", mean(runs.iter().map(|r| f64::from(u8::from(r.correct == Some(true))))));
    b.runs = runs;
    Ok(b)
}

fn grover_matrix_csv(runs: &[RunRecord]) -> String {
    let labels: Vec<String> = BasisLabel::all(2).iter().map(|l| l.to_string()).collect();
    let mut out = format!("target,{}\n", labels.join(","));
    for r in runs {
        let dist = r.mitigated.as_ref().unwrap_or(&r.raw);
        let row: Vec<String> = labels.iter().map(|l| dist[l].to_string()).collect();
        let _ = writeln!(out, "{},{}", r.group_target(), row.join(","));
    }
    out
}

impl RunRecord {
    fn group_target(&self) -> &str {
        self.key.rsplit(':').next().unwrap_or(&self.key)
    }
}

/// Grover search for all nine targets after one and two rounds.
pub fn run_grover(config: &ExperimentConfig) -> Result<ResultBundle> {
    config.validate()?;
    let compiler = config.compiler();
    let confusion = confusion_for(config)?;
    let jobs: Vec<(usize, BasisLabel)> = [1usize, 2].iter().flat_map(|&k| BasisLabel::all(2).into_iter().map(move |t| (k, t))).collect();
    let runs = jobs
        .par_iter()
        .enumerate()
        .map(|(i, (k, target))| {
            let c = grover_circuit(&compiler, &GroverSpec::new(target.clone(), *k)?)?;
            let truth = circuit_probabilities(config, &c)?;
            let m = measure(config, &truth, config.run_seed("grover", i), confusion.as_ref())?;
            let found = BasisLabel::from_index(m.best().argmax(), 2)?;
            let mut r = record_for(format!("k{k}:{target}"), format!("k{k}"), &c, &m, m.best().get(target));
            r.correct = Some(found == *target);
            r.outcome = Some(found.to_string());
            Ok(r)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut b = ResultBundle::new("grover", config);
    let base = classical_baselines();
    for (k, baseline) in [(1, base.grover1), (2, base.grover2)] {
        let group: Vec<RunRecord> = runs.iter().filter(|r| r.group == format!("k{k}")).cloned().collect();
        b.record(&format!("round{k}_avg"), mean(group.iter().map(|r| r.success_probability)));
        b.record(&format!("round{k}_classical_baseline"), baseline);
        b.record(&format!("round{k}_mean_duration_ns"), mean(group.iter().map(|r| r.duration_ns)));
        b.csv.push((format!("grover_k{k}.csv"), grover_matrix_csv(&group)));
    }
    b.runs = runs;
    Ok(b)
}

/// Flux sweep of the circuit model with CSV figure data.
pub fn run_device_report(config: &ExperimentConfig, grid: &[f64]) -> Result<ResultBundle> {
    config.validate()?;
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty flux grid".into()));
    }
    let sweep = flux_sweep(&config.device, grid)?;
    let mut csv = String::from("flux,w01_q1,w12_q1,w01_q2,w12_q2,J11,J21,J12,J22\n");
    for r in &sweep {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{}",
            r.flux, r.w01[0], r.w12[0], r.w01[1], r.w12[1], r.kerr.j11, r.kerr.j21, r.kerr.j12, r.kerr.j22
        );
    }
    let mut b = ResultBundle::new("device", config);
    b.record("operating_flux", OPERATING_FLUX);
    let nearest = (0..sweep.len())
        .min_by(|&a, &c| (sweep[a].flux - OPERATING_FLUX).abs().total_cmp(&(sweep[c].flux - OPERATING_FLUX).abs()))
        .expect("non-empty sweep");
    b.record("operating_index", nearest as f64);
    if let Some(k) = j11_interior_minimum(&sweep) {
        b.record("j11_min_flux", sweep[k].flux);
        b.record("j11_min_khz", sweep[k].kerr.j11);
    }
    b.csv.push(("device_sweep.csv".into(), csv));
    b.device = Some(sweep);
    Ok(b)
}

/// χ matrices of one compiled single-qutrit gate; `qutrit` is 1-based.
pub fn run_process_tomo(config: &ExperimentConfig, gate: &str, qutrit: usize) -> Result<ResultBundle> {
    config.validate()?;
    let gate: LogicalGate = gate.parse()?;
    if !(1..=2).contains(&qutrit) {
        return Err(Error::InvalidTargets(format!("qutrit must be 1 or 2, got {qutrit}")));
    }
    let q = qutrit - 1;
    let circuit = config.compiler().single_gate_circuit(gate, q)?;
    let ideal = chi_matrix(&QuantumChannel::from_unitary(&logical_gate(gate)))?;
    let clean = QuantumChannel::from_circuit(&circuit, &NoiseModel::noiseless(1), config.lindblad)?;
    let noisy = QuantumChannel::from_circuit(&circuit, &config.noise_model().single(q)?, config.lindblad)?;
    let chi_clean = chi_matrix(&clean)?;
    let chi_noisy = chi_matrix(&noisy)?;
    let report = ProcessReport {
        gate: gate.to_string(),
        qutrit,
        duration_ns: circuit.duration_ns(),
        fidelity_noiseless: process_fidelity(&chi_clean, &ideal)?,
        fidelity_noisy: process_fidelity(&chi_noisy, &ideal)?,
        chi_noisy_re: chi_noisy.chi.row_iter().map(|r| r.iter().map(|z| z.re).collect()).collect(),
        chi_noisy_im: chi_noisy.chi.row_iter().map(|r| r.iter().map(|z| z.im).collect()).collect(),
    };
    let mut b = ResultBundle::new("tomo", config);
    b.record("fidelity_noiseless", report.fidelity_noiseless);
    b.record("fidelity_noisy", report.fidelity_noisy);
    b.record("duration_ns", report.duration_ns);
    b.process = Some(report);
    Ok(b)
}

/// Compiles C_p(θ, |target⟩) and checks it against the ideal matrix.
pub fn run_compile_cphase(config: &ExperimentConfig, theta: f64, target: &BasisLabel) -> Result<ResultBundle> {
    config.validate()?;
    let compiler = config.compiler();
    let c = compiler.compile_cphase(theta, target)?;
    let mut b = ResultBundle::new("compile", config);
    b.record("theta", theta);
    b.record("duration_ns", c.duration_ns());
    b.record("pi_pulses", c.pi_pulse_count() as f64);
    b.record("pulses", c.pulse_count() as f64);
    b.record("matches_ideal", f64::from(u8::from(cphase_matches(&compiler, theta, target)?)));
    b.circuit = Some(c.to_text());
    Ok(b)
}

/// Reads nine counts, either bare numbers or `label count` lines; `#` starts a comment.
pub fn parse_counts(text: &str) -> Result<Vec<u64>> {
    let mut bare = Vec::new();
    let mut keyed: BTreeMap<usize, u64> = BTreeMap::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split(|c: char| c.is_whitespace() || c == ',' || c == ':').filter(|t| !t.is_empty()).collect();
        let parse = |t: &str| t.parse::<u64>().map_err(|_| Error::Parse { line: k + 1, message: format!("`{t}` is not a count") });
        if tokens.len() == 2 && tokens[0].len() == 2 && tokens[0].chars().all(|c| ('0'..='2').contains(&c)) && bare.is_empty() {
            let label: BasisLabel = tokens[0].parse()?;
            if keyed.insert(label.index(), parse(tokens[1])?).is_some() {
                return Err(Error::Parse { line: k + 1, message: format!("duplicate label {label}") });
            }
        } else {
            if !keyed.is_empty() {
                return Err(Error::Parse { line: k + 1, message: "mixed labeled and bare counts".into() });
            }
            for t in tokens {
                bare.push(parse(t)?);
            }
        }
    }
    let counts = if keyed.is_empty() { bare } else { (0..9).map(|i| keyed.get(&i).copied().unwrap_or(0)).collect() };
    if counts.len() != 9 {
        return Err(Error::DimensionMismatch { expected: 9, found: counts.len() });
    }
    if counts.iter().sum::<u64>() == 0 {
        return Err(Error::InvalidDistribution("no shots recorded".into()));
    }
    Ok(counts)
}

/// Mitigates measured counts with a given confusion matrix.
pub fn run_mitigate(config: &ExperimentConfig, counts: &[u64], matrix: &ConfusionMatrix) -> Result<ResultBundle> {
    let shots: u64 = counts.iter().sum();
    if shots < MIN_MITIGATION_SHOTS {
        return Err(Error::Infeasible(format!("{shots} shots; mitigation needs at least {MIN_MITIGATION_SHOTS}")));
    }
    let corrected = mitigate_counts(counts, matrix, None)?;
    let freqs: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    let m = Measurement {
        raw: ProbDist::from_counts(&freqs)?.with_shots(shots),
        counts: Some(counts.to_vec()),
        mitigated: Some(ProbDist::from_counts(&corrected)?.with_shots(shots)),
    };
    let best = m.best();
    let top = BasisLabel::from_index(best.argmax(), 2)?;
    let mut b = ResultBundle::new("mitigate", config);
    b.record("shots", shots as f64);
    b.record("condition_number", matrix.condition_number());
    b.runs.push(RunRecord {
        key: "counts".into(),
        group: "mitigate".into(),
        duration_ns: 0.0,
        raw: labeled(&m.raw),
        counts: m.counts.as_deref().map(labeled_counts),
        mitigated: m.mitigated.as_ref().map(labeled),
        success_probability: best.probs()[top.index()],
        outcome: Some(top.to_string()),
        correct: None,
    });
    Ok(b)
}
