//! Circuit quantization of the transmon, SQUID coupler, transmon device.
//!
//! Node order is (Q1, Q2, coupler). Energies are in GHz, capacitances in fF,
//! flux in units of Φ₀. Cross-Kerr values come out in kHz.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, Matrix3, SymmetricEigen, Vector3};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
const PLANCK: f64 = 6.626_070_15e-34;
/// e²/(h·1 fF) expressed in GHz.
fn charge_unit_ghz() -> f64 {
    ELEMENTARY_CHARGE * ELEMENTARY_CHARGE / (PLANCK * 1e-15) / 1e9
}

pub const OPERATING_FLUX: f64 = 0.185;
pub const MIN_LEVELS: usize = 4;
pub const RECONSTRUCTION_TOL: f64 = 1e-10;
pub const LABEL_OVERLAP_MIN: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceParams {
    pub c_q1_ff: f64,
    pub c_q2_ff: f64,
    pub c_c_ff: f64,
    pub c_q12_ff: f64,
    pub ej1_ghz: f64,
    pub ej2_ghz: f64,
    pub ejc_ghz: f64,
    pub flux: f64,
    pub n_levels: usize,
}

impl Default for DeviceParams {
    fn default() -> Self {
        Self {
            c_q1_ff: 178.0,
            c_q2_ff: 131.0,
            c_c_ff: 193.6,
            c_q12_ff: 2.0,
            ej1_ghz: 13.6,
            ej2_ghz: 13.3,
            ejc_ghz: 1140.0,
            flux: OPERATING_FLUX,
            n_levels: 8,
        }
    }
}

impl DeviceParams {
    pub fn with_flux(mut self, flux: f64) -> Self {
        self.flux = flux;
        self
    }

    pub fn with_levels(mut self, n_levels: usize) -> Self {
        self.n_levels = n_levels;
        self
    }

    /// Effective coupler junction energy of a symmetric SQUID, E_Jc·cos(πΦ).
    pub fn coupler_ej(&self) -> f64 {
        self.ejc_ghz * (std::f64::consts::PI * self.flux).cos()
    }

    pub fn validate(&self) -> Result<()> {
        let caps = [self.c_q1_ff, self.c_q2_ff, self.c_c_ff];
        if caps.iter().any(|c| !(*c > 0.0)) || !(self.c_q12_ff >= 0.0) {
            return Err(Error::InvalidArgument(format!("capacitances must be positive: {caps:?}, C12 = {}", self.c_q12_ff)));
        }
        if [self.ej1_ghz, self.ej2_ghz, self.ejc_ghz].iter().any(|e| !(*e >= 0.0)) {
            return Err(Error::InvalidArgument("Josephson energies must be non-negative".into()));
        }
        if !self.flux.is_finite() {
            return Err(Error::InvalidArgument("flux must be finite".into()));
        }
        if !(self.coupler_ej() > 0.0) {
            return Err(Error::InvalidArgument(format!("coupler junction energy vanishes or flips sign at Φ = {}", self.flux)));
        }
        Ok(())
    }
}

pub fn capacitance_matrix(p: &DeviceParams) -> Result<Matrix3<f64>> {
    p.validate()?;
    let (c1, c2, cc, c12) = (p.c_q1_ff, p.c_q2_ff, p.c_c_ff, p.c_q12_ff);
    Ok(Matrix3::new(c1 + c12, -c12, 0.0, -c12, c2 + c12, 0.0, 0.0, 0.0, c1 + c2 + cc))
}

/// Inverse-capacitance energies: the charge term is nᵀ E n.
fn charge_matrix(p: &DeviceParams) -> Result<Matrix3<f64>> {
    let c = capacitance_matrix(p)?;
    let inv = c.try_inverse().ok_or_else(|| Error::NormalForm("singular capacitance matrix".into()))?;
    Ok(inv * (2.0 * charge_unit_ghz()))
}

/// Harmonic part: φᵀ V φ with V = K/2.
fn inductive_matrix(p: &DeviceParams) -> Matrix3<f64> {
    let (e1, e2, ec) = (p.ej1_ghz, p.ej2_ghz, p.coupler_ej());
    Matrix3::new(e1, 0.0, -e1, 0.0, e2, -e2, -e1, -e2, e1 + e2 + ec) * 0.5
}

/// φ = U φ̃ and n = U⁻ᵀ ñ with H = Σ C̃_k ñ_k² + D̃_k φ̃_k².
#[derive(Debug, Clone, PartialEq)]
pub struct NormalModes {
    pub u: Matrix3<f64>,
    pub c_tilde: [f64; 3],
    pub d_tilde: [f64; 3],
}

impl NormalModes {
    /// 2√(C̃ D̃), GHz.
    pub fn frequencies(&self) -> [f64; 3] {
        std::array::from_fn(|k| 2.0 * (self.c_tilde[k] * self.d_tilde[k]).sqrt())
    }

    /// Relative mismatch of U⁻¹EU⁻ᵀ and UᵀVU against their diagonal forms.
    pub fn reconstruction_error(&self, p: &DeviceParams) -> Result<f64> {
        let e = charge_matrix(p)?;
        let v = inductive_matrix(p);
        let inv = self.u.try_inverse().ok_or_else(|| Error::NormalForm("singular mode matrix".into()))?;
        let ce = inv * e * inv.transpose() - Matrix3::from_diagonal(&Vector3::from(self.c_tilde));
        let dv = self.u.transpose() * v * self.u - Matrix3::from_diagonal(&Vector3::from(self.d_tilde));
        let scale_c = Vector3::from(self.c_tilde).amax().max(f64::MIN_POSITIVE);
        let scale_d = Vector3::from(self.d_tilde).amax().max(f64::MIN_POSITIVE);
        Ok((ce.amax() / scale_c).max(dv.amax() / scale_d))
    }
}

pub fn normal_mode_transform(p: &DeviceParams) -> Result<NormalModes> {
    let e = charge_matrix(p)?;
    let v = inductive_matrix(p);
    let es = SymmetricEigen::new(e);
    if es.eigenvalues.iter().any(|x| !(*x > 0.0)) {
        return Err(Error::NormalForm("charge energy matrix is not positive definite".into()));
    }
    let sqrt_e = es.eigenvectors * Matrix3::from_diagonal(&es.eigenvalues.map(f64::sqrt)) * es.eigenvectors.transpose();
    let inner = SymmetricEigen::new(sqrt_e * v * sqrt_e);
    let raw = sqrt_e * inner.eigenvectors;

    // give mode k to the node it lives on
    let mut perm: Vec<usize> = Vec::with_capacity(3);
    for row in 0..3 {
        let mut cols: Vec<usize> = (0..3).collect();
        cols.sort_by(|&a, &b| raw[(row, b)].abs().total_cmp(&raw[(row, a)].abs()));
        let pick = cols.into_iter().find(|c| !perm.contains(c)).expect("three columns");
        perm.push(pick);
    }

    let mut u = Matrix3::zeros();
    let mut c_tilde = [0.0; 3];
    let mut d_tilde = [0.0; 3];
    for (k, &col) in perm.iter().enumerate() {
        let mut column = raw.column(col).into_owned();
        let norm = column.norm();
        // sign convention: the dominant node enters positively
        if column[k] < 0.0 {
            column = -column;
        }
        u.set_column(k, &(column / norm));
        c_tilde[k] = norm * norm;
        d_tilde[k] = inner.eigenvalues[col] / (norm * norm);
    }
    if d_tilde.iter().any(|d| !(*d > 0.0)) {
        return Err(Error::NormalForm(format!("non-positive inductive stiffness {d_tilde:?}")));
    }
    let modes = NormalModes { u, c_tilde, d_tilde };
    let err = modes.reconstruction_error(p)?;
    if err > RECONSTRUCTION_TOL {
        return Err(Error::NormalForm(format!("reconstruction error {err:.2e}")));
    }
    Ok(modes)
}

fn kron3(a: &DMatrix<f64>, b: &DMatrix<f64>, c: &DMatrix<f64>) -> DMatrix<f64> {
    a.kronecker(b).kronecker(c)
}

fn kron3_c(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>, c: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    a.kronecker(b).kronecker(c)
}

/// (a + a†)/√2 and (a† − a)/√2 on a truncated Fock space.
fn ladder_quadratures(n: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let mut x = DMatrix::zeros(n, n);
    let mut y = DMatrix::zeros(n, n);
    for k in 1..n {
        let s = (k as f64).sqrt() / std::f64::consts::SQRT_2;
        x[(k - 1, k)] = s;
        x[(k, k - 1)] = s;
        // a† − a: +√k below the diagonal, −√k above
        y[(k, k - 1)] = s;
        y[(k - 1, k)] = -s;
    }
    (x, y)
}

/// Operator functions are evaluated on this many extra Fock levels and then
/// cut back, so the kept block carries accurate matrix elements.
const AUX_LEVELS: usize = 32;

struct ModeOperators {
    kept: usize,
    /// eigen decomposition of each dressed flux operator φ̃_k on the enlarged space
    phi_eig: Vec<(DVector<f64>, DMatrix<f64>)>,
    n_sq: Vec<DMatrix<f64>>,
}

fn mode_operators(modes: &NormalModes, n: usize) -> ModeOperators {
    let big = n + AUX_LEVELS;
    let (x, y) = ladder_quadratures(big);
    let mut phi_eig = Vec::with_capacity(3);
    let mut n_sq = Vec::with_capacity(3);
    for k in 0..3 {
        let s = (modes.c_tilde[k] / modes.d_tilde[k]).powf(0.25);
        let phi = &x * s;
        let eig = SymmetricEigen::new(phi);
        phi_eig.push((eig.eigenvalues, eig.eigenvectors));
        // ñ = i(a† − a)/(√2 s), so ñ² = −y²/s²
        let full = -(&y * &y) / (s * s);
        n_sq.push(full.view((0, 0), (n, n)).into_owned());
    }
    ModeOperators { kept: n, phi_eig, n_sq }
}

/// cos(Σ_k c_k φ̃_k) through the spectral decomposition of each φ̃_k.
fn operator_cosine(ops: &ModeOperators, coefs: [f64; 3]) -> DMatrix<f64> {
    let factors: Vec<DMatrix<Complex64>> = (0..3)
        .map(|k| {
            let (vals, vecs) = &ops.phi_eig[k];
            let vc = vecs.rows(0, ops.kept).map(|v| Complex64::new(v, 0.0));
            let d = DMatrix::from_diagonal(&vals.map(|l| Complex64::from_polar(1.0, coefs[k] * l)));
            &vc * d * vc.transpose()
        })
        .collect();
    // exp(iA) with real symmetric A is complex symmetric, so its Hermitian part is the real part
    kron3_c(&factors[0], &factors[1], &factors[2]).map(|z| z.re)
}

/// Full Hamiltonian on n_levels³ states, mode order (Q1, Q2, coupler), GHz.
pub fn build_full_hamiltonian(p: &DeviceParams) -> Result<DMatrix<f64>> {
    if p.n_levels < MIN_LEVELS {
        return Err(Error::InvalidArgument(format!("n_levels must be ≥ {MIN_LEVELS}, got {}", p.n_levels)));
    }
    let modes = normal_mode_transform(p)?;
    let n = p.n_levels;
    let ops = mode_operators(&modes, n);
    let id = DMatrix::<f64>::identity(n, n);
    let embed = |op: &DMatrix<f64>, k: usize| match k {
        0 => kron3(op, &id, &id),
        1 => kron3(&id, op, &id),
        _ => kron3(&id, &id, op),
    };
    let mut h = DMatrix::<f64>::zeros(n * n * n, n * n * n);
    for k in 0..3 {
        h += embed(&ops.n_sq[k], k) * modes.c_tilde[k];
    }
    let row = |i: usize| -> [f64; 3] { [modes.u[(i, 0)], modes.u[(i, 1)], modes.u[(i, 2)]] };
    let (q1, q2, c) = (row(0), row(1), row(2));
    let diff = |a: [f64; 3], b: [f64; 3]| -> [f64; 3] { [a[0] - b[0], a[1] - b[1], a[2] - b[2]] };
    h -= operator_cosine(&ops, diff(c, q1)) * p.ej1_ghz;
    h -= operator_cosine(&ops, diff(q2, c)) * p.ej2_ghz;
    h -= operator_cosine(&ops, c) * p.coupler_ej();
    // symmetrize away roundoff
    let h = (&h + h.transpose()) * 0.5;
    Ok(h)
}

/// Cross-Kerr energy combinations, in kHz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZzRows {
    pub zz: f64,
    pub zz_2110: f64,
    pub zz_1021: f64,
    pub zz_2120: f64,
    pub zz_2021: f64,
    pub zz_1020: f64,
    pub zz_2010: f64,
}

impl ZzRows {
    pub fn as_array(&self) -> [(&'static str, f64); 7] {
        [
            ("ZZ", self.zz),
            ("ZZ_2110", self.zz_2110),
            ("ZZ_1021", self.zz_1021),
            ("ZZ_2120", self.zz_2120),
            ("ZZ_2021", self.zz_2021),
            ("ZZ_1020", self.zz_1020),
            ("ZZ_2010", self.zz_2010),
        ]
    }

    /// Same combinations evaluated on any energy function of (m, n), in GHz.
    pub fn from_energies(e: impl Fn(usize, usize) -> f64) -> Self {
        let k = 1e6;
        Self {
            zz: ((e(1, 1) - e(0, 1)) - (e(1, 0) - e(0, 0))) * k,
            zz_2110: ((e(2, 1) - e(1, 1)) - (e(2, 0) - e(1, 0))) * k,
            zz_1021: ((e(1, 2) - e(1, 1)) - (e(0, 2) - e(0, 1))) * k,
            zz_2120: ((e(2, 2) - e(1, 2)) - (e(2, 0) - e(1, 0))) * k,
            zz_2021: ((e(2, 2) - e(2, 1)) - (e(0, 2) - e(0, 1))) * k,
            zz_1020: ((e(1, 2) - e(0, 2)) - (e(1, 0) - e(0, 0))) * k,
            zz_2010: ((e(2, 1) - e(2, 0)) - (e(0, 1) - e(0, 0))) * k,
        }
    }
}

/// Cross-Kerr coefficients of m·n, m²·n, m·n², m²·n², kHz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KerrCoefficients {
    pub j11: f64,
    pub j21: f64,
    pub j12: f64,
    pub j22: f64,
}

impl KerrCoefficients {
    pub fn energy_khz(&self, m: usize, n: usize) -> f64 {
        let (m, n) = (m as f64, n as f64);
        self.j11 * m * n + self.j21 * m * m * n + self.j12 * m * n * n + self.j22 * m * m * n * n
    }
}

/// Highest labels kept: m ≤ 3 on Q1, n ≤ 2 on Q2.
pub const LABEL_MAX: (usize, usize) = (3, 2);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub flux: f64,
    pub n_levels: usize,
    pub w01: [f64; 2],
    pub w12: [f64; 2],
    pub mode_frequencies: [f64; 3],
    pub kerr: KerrCoefficients,
    pub zz: ZzRows,
    /// E(|mn0⟩) − E(|000⟩) in GHz, keyed "mn"
    pub energies: BTreeMap<String, f64>,
    /// Only even-order parametric processes survive at zero flux.
    pub sweet_spot: bool,
}

impl SpectrumReport {
    pub fn energy(&self, m: usize, n: usize) -> f64 {
        self.energies[&format!("{m}{n}")]
    }

    pub fn anharmonicity(&self, qutrit: usize) -> f64 {
        self.w12[qutrit] - self.w01[qutrit]
    }
}

fn kerr_from_energies(e: impl Fn(usize, usize) -> f64) -> Result<KerrCoefficients> {
    let zeta = |m, n| (e(m, n) - e(m, 0) - e(0, n) + e(0, 0)) * 1e6;
    let a = nalgebra::Matrix4::new(1.0, 1.0, 1.0, 1.0, 2.0, 4.0, 2.0, 4.0, 2.0, 2.0, 4.0, 4.0, 4.0, 8.0, 8.0, 16.0);
    let b = nalgebra::Vector4::new(zeta(1, 1), zeta(2, 1), zeta(1, 2), zeta(2, 2));
    let j = a.lu().solve(&b).ok_or_else(|| Error::NormalForm("singular Kerr system".into()))?;
    Ok(KerrCoefficients { j11: j[0], j21: j[1], j12: j[2], j22: j[3] })
}

pub fn labeled_spectrum(p: &DeviceParams) -> Result<SpectrumReport> {
    let modes = normal_mode_transform(p)?;
    let freqs = modes.frequencies();
    let qubit_max = freqs[0].max(freqs[1]);
    if freqs[2] < 3.0 * qubit_max {
        return Err(Error::InvalidArgument(format!(
            "coupler mode at {:.2} GHz is not far above the qutrit modes ({:.2} GHz)",
            freqs[2], qubit_max
        )));
    }
    let h = build_full_hamiltonian(p)?;
    let eig = SymmetricEigen::new(h);
    let n = p.n_levels;
    let mut raw = BTreeMap::new();
    let mut problems = Vec::new();
    let mut taken: BTreeMap<usize, String> = BTreeMap::new();
    for m in 0..=LABEL_MAX.0 {
        for q in 0..=LABEL_MAX.1 {
            let bare = (m * n + q) * n;
            let (best, overlap) = (0..eig.eigenvalues.len())
                .map(|j| (j, eig.eigenvectors[(bare, j)].powi(2)))
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .expect("non-empty spectrum");
            let label = format!("{m}{q}");
            if overlap < LABEL_OVERLAP_MIN {
                problems.push(format!("|{m}{q}0⟩ max overlap {overlap:.3}"));
            } else if let Some(other) = taken.insert(best, label.clone()) {
                problems.push(format!("|{label}0⟩ and |{other}0⟩ share an eigenstate"));
            }
            raw.insert((m, q), eig.eigenvalues[best]);
        }
    }
    if !problems.is_empty() {
        return Err(Error::Labeling(problems.join("; ")));
    }
    let e0 = raw[&(0, 0)];
    let e = |m: usize, q: usize| raw[&(m, q)] - e0;
    let report = SpectrumReport {
        flux: p.flux,
        n_levels: n,
        w01: [e(1, 0), e(0, 1)],
        w12: [e(2, 0) - e(1, 0), e(0, 2) - e(0, 1)],
        mode_frequencies: freqs,
        kerr: kerr_from_energies(e)?,
        zz: ZzRows::from_energies(e),
        energies: raw.keys().map(|&(m, q)| (format!("{m}{q}"), e(m, q))).collect(),
        sweet_spot: p.flux.abs() < 1e-12,
    };
    Ok(report)
}

/// One report per flux value, in grid order.
pub fn flux_sweep(p: &DeviceParams, grid: &[f64]) -> Result<Vec<SpectrumReport>> {
    grid.par_iter().map(|&f| labeled_spectrum(&p.with_flux(f))).collect()
}

/// Evenly spaced grid including both ends.
pub fn linear_grid(from: f64, to: f64, steps: usize) -> Result<Vec<f64>> {
    match steps {
        0 => Err(Error::InvalidArgument("grid needs at least one point".into())),
        1 => Ok(vec![from]),
        _ => Ok((0..steps).map(|k| from + (to - from) * k as f64 / (steps - 1) as f64).collect()),
    }
}

/// Index of an interior local minimum of |J11|, the deepest one if several.
pub fn j11_interior_minimum(sweep: &[SpectrumReport]) -> Option<usize> {
    (1..sweep.len().saturating_sub(1))
        .filter(|&k| {
            let a = |i: usize| sweep[i].kerr.j11.abs();
            a(k) < a(k - 1) && a(k) <= a(k + 1)
        })
        .min_by(|&a, &b| sweep[a].kerr.j11.abs().total_cmp(&sweep[b].kerr.j11.abs()))
}

/// Inductive and capacitive toy-model couplings (g1, g2) in MHz.
pub fn toy_couplings(p: &DeviceParams, w01: [f64; 2]) -> Result<(f64, f64)> {
    p.validate()?;
    let ejc = p.coupler_ej();
    if !(ejc > 0.0) {
        return Err(Error::InvalidArgument(format!("coupler cosine is non-positive at Φ = {}", p.flux)));
    }
    let wprod = (w01[0] * w01[1]).sqrt();
    let g1 = (p.ej1_ghz * p.ej2_ghz).sqrt() / (2.0 * ejc) * wprod;
    let g2 = p.c_q12_ff / (2.0 * (p.c_q1_ff * p.c_q2_ff).sqrt()) * wprod;
    Ok((g1 * 1e3, g2 * 1e3))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn capacitance_entries() {
        let c = capacitance_matrix(&DeviceParams::default()).unwrap();
        assert!((c[(0, 0)] - 180.0).abs() < 1e-12);
        assert_eq!(c, c.transpose());
        let d = capacitance_matrix(&DeviceParams { c_q12_ff: 0.0, ..Default::default() }).unwrap();
        assert_eq!(d[(0, 1)], 0.0);
        assert!(capacitance_matrix(&DeviceParams { c_q1_ff: 0.0, ..Default::default() }).is_err());
    }

    #[test]
    fn decoupled_modes_are_nodes() {
        // with the qutrit junctions removed nothing confines the qutrit phases
        let p = DeviceParams { c_q12_ff: 0.0, ej1_ghz: 0.0, ej2_ghz: 0.0, ..Default::default() };
        let m = normal_mode_transform(&p).unwrap_err();
        assert!(matches!(m, Error::NormalForm(_)));
        let p = DeviceParams { c_q12_ff: 0.0, ej1_ghz: 1e-9, ej2_ghz: 1e-9, ..Default::default() };
        let m = normal_mode_transform(&p).unwrap();
        assert!((m.u - Matrix3::identity()).amax() < 1e-6, "{}", m.u);
    }

    #[test]
    fn operating_point_modes() {
        let p = DeviceParams::default();
        let m = normal_mode_transform(&p).unwrap();
        assert!(m.reconstruction_error(&p).unwrap() < RECONSTRUCTION_TOL);
        assert!((m.u - Matrix3::identity()).amax() > 1e-3);
        assert!(m.frequencies().iter().all(|f| f.is_finite() && *f > 0.0));
        assert!(m.frequencies()[2] > 15.0);
    }

    #[test]
    fn small_truncation_rejected() {
        let p = DeviceParams::default().with_levels(3);
        assert!(build_full_hamiltonian(&p).is_err());
    }

    #[test]
    fn hamiltonian_symmetric() {
        let h = build_full_hamiltonian(&DeviceParams::default().with_levels(5)).unwrap();
        assert!((&h - h.transpose()).amax() < 1e-10);
        assert!(h.iter().all(|x| x.is_finite()));
    }

    #[test]
    fn kerr_fit_reproduces_polynomial() {
        let truth = KerrCoefficients { j11: -300.0, j21: 40.0, j12: 20.0, j22: 5.0 };
        let e = |m: usize, n: usize| 3.3 * m as f64 + 3.8 * n as f64 + truth.energy_khz(m, n) * 1e-6;
        let k = kerr_from_energies(e).unwrap();
        assert!((k.j11 - truth.j11).abs() < 1e-6 && (k.j22 - truth.j22).abs() < 1e-6);
        let zz = ZzRows::from_energies(e);
        assert!((zz.zz - truth.energy_khz(1, 1)).abs() < 1e-6);
    }

    #[test]
    fn toy_model_limits() {
        let p = DeviceParams::default();
        let w = [3.3, 3.8];
        let (g1_0, _) = toy_couplings(&p.with_flux(0.0), w).unwrap();
        let (g1_op, g2) = toy_couplings(&p, w).unwrap();
        assert!(g1_0 < g1_op && g2 > 0.0);
        let (g1_zero, _) = toy_couplings(&DeviceParams { ej1_ghz: 0.0, ..p }, w).unwrap();
        assert_eq!(g1_zero, 0.0);
        assert!(toy_couplings(&p.with_flux(0.6), w).is_err());
    }

    #[test]
    fn grid_endpoints() {
        let g = linear_grid(0.0, 0.3, 31).unwrap();
        assert_eq!(g.len(), 31);
        assert!((g[30] - 0.3).abs() < 1e-15);
        assert!(linear_grid(0.0, 1.0, 0).is_err());
    }
}
