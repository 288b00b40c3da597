use std::sync::OnceLock;

use proptest::prelude::*;
use qutrit_lab::device::{
    build_full_hamiltonian, capacitance_matrix, flux_sweep, labeled_spectrum, linear_grid, normal_mode_transform,
    toy_couplings, DeviceParams, SpectrumReport, ZzRows, RECONSTRUCTION_TOL,
};

fn operating() -> &'static SpectrumReport {
    static R: OnceLock<SpectrumReport> = OnceLock::new();
    R.get_or_init(|| labeled_spectrum(&DeviceParams::default()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normal_form_reconstructs(flux in 0.0f64..0.45, c1 in 60.0f64..300.0, c2 in 60.0f64..300.0, c12 in 0.0f64..10.0) {
        let p = DeviceParams { c_q1_ff: c1, c_q2_ff: c2, c_q12_ff: c12, flux, ..DeviceParams::default() };
        let m = normal_mode_transform(&p).unwrap();
        prop_assert!(m.reconstruction_error(&p).unwrap() < RECONSTRUCTION_TOL);
        prop_assert!(m.frequencies().iter().all(|f| *f > 0.0));
        let c = capacitance_matrix(&p).unwrap();
        prop_assert_eq!(c, c.transpose());
    }
}

#[test]
fn hamiltonian_is_symmetric_and_bounded_below() {
    let h = build_full_hamiltonian(&DeviceParams::default().with_levels(6)).unwrap();
    assert!((&h - h.transpose()).amax() < 1e-10);
    let eig = h.symmetric_eigenvalues();
    assert!(eig.iter().all(|v| v.is_finite()));
}

#[test]
fn transmons_have_negative_anharmonicity() {
    let r = operating();
    for q in 0..2 {
        assert!(r.w12[q] < r.w01[q], "qutrit {q}: {:?} {:?}", r.w01, r.w12);
        assert!(r.anharmonicity(q) < -0.05);
    }
}

#[test]
fn labeled_energies_increase_along_ladders() {
    let r = operating();
    for n in 0..=2 {
        for m in 0..3 {
            assert!(r.energy(m + 1, n) > r.energy(m, n));
        }
    }
    for m in 0..=3 {
        for n in 0..2 {
            assert!(r.energy(m, n + 1) > r.energy(m, n));
        }
    }
}

#[test]
fn zz_rows_agree_with_kerr_polynomial() {
    let r = operating();
    let k = r.kerr;
    let poly = ZzRows::from_energies(|m, n| k.energy_khz(m, n) * 1e-6);
    for ((name, a), (_, b)) in r.zz.as_array().iter().zip(poly.as_array()) {
        assert!((a - b).abs() <= 0.1 * a.abs().max(1e-3), "{name}: {a} vs {b}");
    }
}

#[test]
fn spectrum_converges_from_8_to_10_levels() {
    let a = operating();
    let b = labeled_spectrum(&DeviceParams::default().with_levels(10)).unwrap();
    for q in 0..2 {
        assert!(((a.w01[q] - b.w01[q]) / b.w01[q]).abs() < 1e-3);
        assert!(((a.w12[q] - b.w12[q]) / b.w12[q]).abs() < 1e-3);
    }
    assert!(((a.kerr.j11 - b.kerr.j11) / b.kerr.j11).abs() < 0.05);
}

#[test]
fn one_point_sweep_is_the_spectrum() {
    let p = DeviceParams::default().with_levels(5);
    let s = flux_sweep(&p, &[p.flux]).unwrap();
    assert_eq!(s.len(), 1);
    assert_eq!(s[0], labeled_spectrum(&p).unwrap());
}

#[test]
fn sweet_spot_flag_only_at_zero_flux() {
    let p = DeviceParams::default().with_levels(5);
    let s = flux_sweep(&p, &[0.0, 0.1]).unwrap();
    assert!(s[0].sweet_spot && !s[1].sweet_spot);
}

#[test]
fn qutrit_frequency_falls_with_flux() {
    let p = DeviceParams::default().with_levels(5);
    let s = flux_sweep(&p, &linear_grid(0.0, 0.35, 8).unwrap()).unwrap();
    for w in s.windows(2) {
        assert!(w[1].w01[0] < w[0].w01[0] && w[1].w01[1] < w[0].w01[1]);
    }
}

#[test]
fn toy_inductive_coupling_grows_with_flux() {
    let p = DeviceParams::default();
    let w = operating().w01;
    let g: Vec<f64> = linear_grid(0.0, 0.25, 11).unwrap().iter().map(|&f| toy_couplings(&p.with_flux(f), w).unwrap().0).collect();
    assert!(g.windows(2).all(|x| x[1] > x[0]));
    let (g1, g2) = toy_couplings(&p, w).unwrap();
    assert!(g1.is_finite() && g2.is_finite() && g2 > 0.0);
}
