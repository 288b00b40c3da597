use proptest::prelude::*;
use qutrit_lab::linalg::{tensor, C64, CMatrix};
use qutrit_lab::sim::{apply_unitary, simulate_pure};
use qutrit_lab::state::{fidelity, sso, BasisLabel, ProbDist, PureState};

fn cmatrix(dim: usize) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim * dim)
        .prop_map(move |v| CMatrix::from_iterator(dim, dim, v.into_iter().map(|(r, i)| C64::new(r, i))))
}

fn state(n: usize) -> impl Strategy<Value = PureState> {
    let dim = 3usize.pow(n as u32);
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim)
        .prop_filter("nonzero", |v| v.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3)
        .prop_map(move |v| PureState::normalized(n, v.into_iter().map(|(r, i)| C64::new(r, i)).collect()).unwrap())
}

/// Haar-ish random unitary from the QR factor of a random complex matrix.
fn unitary(dim: usize) -> impl Strategy<Value = CMatrix> {
    cmatrix(dim).prop_filter_map("full rank", |m| {
        let qr = m.qr();
        let q = qr.q();
        if q.iter().all(|z| z.re.is_finite()) {
            Some(q)
        } else {
            None
        }
    })
}

fn dist(len: usize) -> impl Strategy<Value = ProbDist> {
    prop::collection::vec(0.0f64..1.0, len)
        .prop_filter("mass", |v| v.iter().sum::<f64>() > 1e-3)
        .prop_map(|v| ProbDist::from_counts(&v).unwrap())
}

proptest! {
    #[test]
    fn tensor_is_associative(a in cmatrix(3), b in cmatrix(3), c in cmatrix(2)) {
        let left = tensor(&tensor(&a, &b).unwrap(), &c).unwrap();
        let right = tensor(&a, &tensor(&b, &c).unwrap()).unwrap();
        prop_assert!((left - right).norm() < 1e-12);
    }

    #[test]
    fn basis_index_matches_tensor_product(m in 0u8..3, n in 0u8..3) {
        let label = BasisLabel::pair(m, n).unwrap();
        // projectors |k⟩⟨k|; their product has a single 1 on the diagonal
        let proj = |k: u8| CMatrix::from_fn(3, 3, |i, j| if i == k as usize && j == i { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
        let v = tensor(&proj(m), &proj(n)).unwrap();
        let hot: Vec<usize> = (0..9).filter(|&i| v[(i, i)].re == 1.0).collect();
        prop_assert_eq!(hot, vec![label.index()]);
        prop_assert_eq!(label.to_string().parse::<BasisLabel>().unwrap(), label);
    }

    #[test]
    fn fidelity_symmetric_and_bounded(a in state(2), b in state(2)) {
        let f = fidelity(&a, &b).unwrap();
        let g = fidelity(&b, &a).unwrap();
        prop_assert!((f - g).abs() < 1e-10);
        prop_assert!((0.0..=1.0).contains(&f));
        // oracle: |⟨a|b⟩|²
        let overlap: C64 = a.amplitudes().iter().zip(b.amplitudes().iter()).map(|(x, y)| x.conj() * y).sum();
        prop_assert!((f - overlap.norm_sqr()).abs() < 1e-10);
    }

    #[test]
    fn fidelity_unitarily_invariant(a in state(1), b in state(1), u in unitary(3)) {
        let f = fidelity(&a, &b).unwrap();
        let ua = apply_unitary(&a, &u, &[0]).unwrap();
        let ub = apply_unitary(&b, &u, &[0]).unwrap();
        prop_assert!((fidelity(&ua, &ub).unwrap() - f).abs() < 1e-9);
    }

    #[test]
    fn pure_and_mixed_fidelity_agree(a in state(1), b in state(1)) {
        let pure = fidelity(&a, &b).unwrap();
        let mixed = fidelity(&a.to_density(), &b.to_density()).unwrap();
        prop_assert!((pure - mixed).abs() < 1e-7);
    }

    #[test]
    fn unitaries_preserve_norm(s in state(2), u in unitary(3), q in 0usize..2) {
        let out = apply_unitary(&s, &u, &[q]).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn sso_properties(p in dist(9), q in dist(9)) {
        let s = sso(&p, &q).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&s));
        prop_assert!((s - sso(&q, &p).unwrap()).abs() < 1e-12);
        prop_assert!((sso(&p, &p).unwrap() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn empty_circuit_is_identity() {
    let c = qutrit_lab::circuit::Circuit::new(2).unwrap();
    let s = PureState::uniform(2).unwrap();
    assert_eq!(simulate_pure(&c, &s).unwrap(), s);
}
