use std::f64::consts::{PI, TAU};

use lefschetz_core::invariants::nu_spin;
use lefschetz_core::invariants::ConformalDatum;
use lefschetz_core::linalg::block_rotation;
use lefschetz_core::spin::*;
use lefschetz_core::C64;
use proptest::prelude::*;

fn max_diff(a: &CMat, b: &CMat) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn angles(m: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.05f64..(TAU - 0.05), m)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn lift_conjugates_clifford_action((m, th) in (1usize..=3).prop_flat_map(|m| (Just(m), angles(m))), v in prop::collection::vec(-1.0f64..1.0, 6)) {
        let rep = build_gammas(m).unwrap();
        let k = spin_lift(&rep, &th).unwrap();
        let kinv = k.clone().try_inverse().unwrap();
        let v = &v[..2 * m];
        let kv = block_rotation(&th) * nalgebra::DVector::from_column_slice(v);
        let lhs = &k * rep.gamma_of(v) * kinv;
        prop_assert!(max_diff(&lhs, &rep.gamma_of(kv.as_slice())) < 1e-12);
    }

    #[test]
    fn chiral_trace_magnitude((m, th) in (1usize..=4).prop_flat_map(|m| (Just(m), angles(m)))) {
        let rep = build_gammas(m).unwrap();
        let tr = (&rep.tau * spin_lift(&rep, &th).unwrap()).trace();
        let expect: f64 = th.iter().map(|t| 2.0 * (t / 2.0).sin().abs()).product();
        prop_assert!((tr.norm() - expect).abs() < 1e-12);
    }

    #[test]
    fn full_turn_flips_sign((m, th) in (1usize..=3).prop_flat_map(|m| (Just(m), angles(m))), j in 0usize..3) {
        let rep = build_gammas(m).unwrap();
        let j = j % m;
        let mut turned = th.clone();
        turned[j] += TAU;
        let a = spin_lift(&rep, &th).unwrap();
        let b = spin_lift(&rep, &turned).unwrap();
        prop_assert!(max_diff(&a, &(-b)) < 1e-12);
    }

    #[test]
    fn reflected_angles_give_conjugate_up_to_sign((_, th) in (1usize..=3).prop_flat_map(|m| (Just(m), angles(m))), mu in 0.3f64..3.0) {
        let d = ConformalDatum::new(mu, th.clone()).unwrap();
        let r = ConformalDatum::new(mu, th.iter().map(|t| TAU - t).collect()).unwrap();
        let (a, b) = (nu_spin(&d).unwrap(), nu_spin(&r).unwrap());
        prop_assert!((a - b.conj()).norm() < 1e-9 * a.norm().max(1.0) || (a + b.conj()).norm() < 1e-9 * a.norm().max(1.0));
    }
}

#[test]
fn lift_commutes_only_with_fixed_vectors() {
    let rep = build_gammas(2).unwrap();
    let k = spin_lift(&rep, &[PI / 3.0, 0.0]).unwrap();
    let fixed = rep.gamma_of(&[0.0, 0.0, 0.7, -0.2]);
    assert!(max_diff(&(&k * &fixed), &(&fixed * &k)) < 1e-12);
    let moved = rep.gamma_of(&[1.0, 0.0, 0.0, 0.0]);
    assert!(max_diff(&(&k * &moved), &(&moved * &k)) > 0.1);
}

#[test]
fn rejects_unsupported_dimension() {
    assert!(build_gammas(0).is_err());
    assert!(build_gammas(5).is_err());
    let rep = build_gammas(2).unwrap();
    assert!(spin_lift(&rep, &[0.1]).is_err());
    let _ = C64::new(0.0, 0.0);
}
