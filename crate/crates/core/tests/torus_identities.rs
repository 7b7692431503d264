use lefschetz_core::lattice::{self, IMat};
use lefschetz_core::linalg::realify;
use lefschetz_core::sampling::Sampler;
use lefschetz_core::torus::*;
use lefschetz_core::{Error, C64};
use nalgebra::{DMatrix, DVector};

fn skewed_torus(s: &mut Sampler, n: usize) -> FlatTorus {
    let b = DMatrix::identity(n, n) + s.gaussian_matrix(n, n) * 0.2;
    FlatTorus::new(b).unwrap()
}

#[test]
fn cohomological_equals_det_and_fixed_point_count() {
    let mut s = Sampler::new(31);
    for i in 0..60 {
        let n = 1 + i % 4;
        let m = s.integer_matrix(n, 2);
        let offset = DVector::from_fn(n, |_, _| s.uniform(0.0, 1.0));
        let torus = skewed_torus(&mut s, n);
        let f = ToriEndomorphism::from_integer(torus, &m, offset).unwrap();
        let det = f.det_i_minus();
        assert_eq!(lefschetz_cohomological(&f), det);
        let pts = fixed_points(&f).unwrap();
        assert_eq!(pts.len() as i64, det.abs());
        for x in &pts {
            let r = f.torus.lattice_coords(&(&f.a * x + &f.offset - x));
            assert!(r.iter().all(|v| (v - v.round()).abs() < 1e-9), "{r}");
        }
    }
}

#[test]
fn gb_three_sides_agree() {
    let mut s = Sampler::new(32);
    for i in 0..30 {
        let n = 1 + i % 3;
        let m = s.integer_matrix(n, 2);
        let f = ToriEndomorphism::from_integer(FlatTorus::standard(n), &m, DVector::zeros(n)).unwrap();
        let g = gb_identity_check(&f, &[0.05, 0.1, 0.2], 4.0).unwrap();
        assert_eq!(g.cohomological, g.fixed_point_sum);
        assert!((g.harmonic - g.cohomological as f64).abs() < 1e-9);
        assert!((g.density_sum - g.cohomological as f64).abs() < 1e-8);
        assert!(g.t_spread <= 1e-8);
        for &(_, v) in &g.spectral {
            assert!((v - g.harmonic).abs() < 1e-9);
        }
    }
}

#[test]
fn non_lattice_map_rejected() {
    let a = DMatrix::from_element(1, 1, 0.5);
    let e = ToriEndomorphism::new(FlatTorus::standard(1), a, DVector::zeros(1)).unwrap_err();
    assert_eq!(e, Error::NotLatticePreserving);
}

#[test]
fn holomorphic_lefschetz_random() {
    let mut s = Sampler::new(33);
    for i in 0..20 {
        let m = 1 + i % 2;
        let a = s.gaussian_integer_matrix(m, 2);
        let ct = ComplexTorus::gaussian(m);
        let offset = DVector::from_fn(2 * m, |_, _| s.uniform(0.0, 1.0));
        let h = holo_lefschetz_check(&ct, &a, &offset).unwrap();
        assert!((h.lhs - h.rhs).norm() < 1e-9, "{h:?}");
        assert!((h.rhs_density - h.rhs).norm() < 1e-8);
        let det = realify(&a).map(|x| x.round() as i64);
        let count = lattice::det(&(IMat::identity(2 * m, 2 * m) - det)).abs();
        assert_eq!(h.fixed_point_count as i64, count);
    }
}

#[test]
fn signature_on_four_torus_isometries() {
    let mut checked = 0;
    for p in lefschetz_core::sampling::signed_permutations(4) {
        let f = ToriEndomorphism::from_integer(FlatTorus::standard(4), &p, DVector::zeros(4)).unwrap();
        match signature_pairing_check(&f) {
            Ok(r) => {
                assert!((r.rhs - C64::new(r.lhs, 0.0)).norm() < 1e-9, "{p} {r:?}");
                assert!((r.rhs_density - r.rhs).norm() < 1e-9);
                checked += 1;
            }
            Err(Error::NonTransverse) => assert_eq!(f.det_i_minus(), 0),
            Err(e) => panic!("{e}"),
        }
    }
    assert!(checked > 10, "{checked}");
}

#[test]
fn signature_rejects_non_similarity() {
    let m = IMat::from_row_slice(4, 4, &[2, 1, 0, 0, 1, 1, 0, 0, 0, 0, 0, -1, 0, 0, 1, 0]);
    let f = ToriEndomorphism::from_integer(FlatTorus::standard(4), &m, DVector::zeros(4)).unwrap();
    assert!(matches!(signature_pairing_check(&f), Err(Error::NotConformal { .. })));
}

#[test]
fn curve_pairings() {
    for a in -3..=3i64 {
        for b in -3..=3i64 {
            if a == b {
                continue;
            }
            let c = curve_gb_pairing(a, b, (0.13, 0.41)).unwrap();
            assert_eq!(c.intersections as i64, (a - b).abs());
            assert!((c.lhs - c.rhs).abs() < 1e-10, "({a},{b}) {c:?}");
        }
    }
}

fn line(dir: &[i64], c: [f64; 2]) -> AffineSubtorus {
    AffineSubtorus::linear(2, &[dir]).unwrap().translated(DVector::from_row_slice(&c))
}

fn residual_at(r: f64) -> f64 {
    let ct = ComplexTorus::gaussian(1);
    slag_identity_check(&ct, &line(&[1, 0], [0.0, 0.0]), &line(&[1, 0], [0.0, 0.5]), r).unwrap().residual
}

#[test]
fn slag_residual_decays_like_inverse_cutoff() {
    let rs = [50.0, 100.0, 200.0];
    let res: Vec<f64> = rs.iter().map(|&r| residual_at(r)).collect();
    for (r, e) in rs.iter().zip(&res) {
        assert!(*e <= 2.0 / r, "R={r} residual={e}");
    }
    let xs: Vec<f64> = rs.iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = res.iter().map(|e| e.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / 3.0, ys.iter().sum::<f64>() / 3.0);
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    assert!(-slope >= 0.9, "slope {slope}");
}

#[test]
fn slag_transverse_lines() {
    let ct = ComplexTorus::gaussian(1);
    for (a, b) in [([1, 0], [1, 1]), ([1, 0], [0, 1]), ([2, 1], [1, -1])] {
        let r = slag_identity_check(&ct, &line(&a, [0.0, 0.0]), &line(&b, [0.3, 0.1]), 200.0).unwrap();
        assert!(r.residual <= 1e-12, "{r:?}");
    }
    let e = slag_identity_check(&ct, &line(&[1, 0], [0.0, 0.0]), &line(&[1, 0], [0.4, 0.0]), 10.0).unwrap_err();
    assert_eq!(e, Error::NonTransverse);
}

#[test]
fn inverse_square_weighting_depends_on_offset() {
    let base = line(&[1, 0], [0.0, 0.0]);
    let a = slag_inverse_square_sum(&base, &line(&[1, 0], [0.0, 0.25]), 200.0).unwrap();
    let b = slag_inverse_square_sum(&base, &line(&[1, 0], [0.0, 0.5]), 200.0).unwrap();
    assert!((a - b).norm() > 0.1);
}

#[test]
fn averaging_identity_on_random_line_pairs() {
    let mut s = Sampler::new(34);
    let ct = ComplexTorus::gaussian(1);
    let mut scored = 0;
    while scored < 25 {
        let d1 = s.primitive_vector(2, 3);
        let d2 = s.primitive_vector(2, 3);
        let (v1, v2) = (line(&d1, [0.0, 0.0]), line(&d2, [0.0, 0.0]));
        let avg = average_identity_check(&ct, &v1, &v2).unwrap();
        let det = (d1[0] * d2[1] - d1[1] * d2[0]).abs();
        assert_eq!(avg.generic_count, det);
        if avg.parallel {
            continue;
        }
        let oracle = slag_rho_oracle(&ct, &v1, &v2).unwrap();
        let closed = slag_rho_closed(1, slag_phase(&ct, &v1).unwrap(), slag_phase(&ct, &v2).unwrap());
        assert!((oracle - closed).norm() < 1e-14);
        assert!((avg.lhs - avg.rhs).norm() < 1e-9, "{d1:?} {d2:?} {avg:?}");
        scored += 1;
    }
}

#[test]
fn averaging_in_complex_dimension_two() {
    let ct = ComplexTorus::gaussian(2);
    let v1 = AffineSubtorus::linear(4, &[&[1, 0, 0, 0], &[0, 0, 1, 0]]).unwrap();
    let v2 = AffineSubtorus::linear(4, &[&[1, 1, 0, 0], &[0, 0, 0, 1]]).unwrap();
    let avg = average_identity_check(&ct, &v1, &v2).unwrap();
    assert!(!avg.parallel);
    assert!((avg.lhs - avg.rhs).norm() < 1e-9, "{avg:?}");
}

#[test]
fn coisotropic_pairing_random() {
    let mut s = Sampler::new(35);
    let mut checked = 0;
    while checked < 12 {
        let (m, q) = [(2, 1), (2, 0), (3, 1), (3, 2)][checked % 4];
        let g1 = s.coisotropic_directions(m, q, 2).unwrap();
        let g2 = s.integer_directions(2 * m, m + q, 2);
        let v1 = AffineSubtorus::new(FlatTorus::standard(2 * m), g1, DVector::zeros(2 * m)).unwrap();
        let v2 = AffineSubtorus::new(FlatTorus::standard(2 * m), g2, DVector::zeros(2 * m)).unwrap();
        match coisotropic_pairing_check(&v1, &v2) {
            Ok(c) => {
                assert!((c.lhs - c.rhs).abs() <= 1e-9 * c.lhs.abs().max(1.0), "m={m} q={q} {c:?}");
                checked += 1;
            }
            Err(Error::NonTransverse) => {}
            Err(e) => panic!("{e}"),
        }
    }
}

#[test]
fn lagrangian_lines_on_two_torus() {
    let v1 = line(&[1, 0], [0.0, 0.0]);
    for d in [[0, 1], [1, 1], [1, 2], [3, -1]] {
        let c = coisotropic_pairing_check(&v1, &line(&d, [0.0, 0.0])).unwrap();
        assert_eq!(c.components, d[1].abs());
        assert!((c.lhs - c.rhs).abs() < 1e-12, "{d:?} {c:?}");
    }
}

#[test]
fn heat_trace_cutoff_independent() {
    let t = FlatTorus::standard(2);
    let a = scalar_heat_trace(&t, 0.05, 5.0);
    let b = scalar_heat_trace(&t, 0.05, 8.0);
    assert!((a - b).abs() < 1e-14);
    assert_eq!(heat_supertrace(&t, 0.05, 6.0).unwrap(), 0.0);
}

#[test]
fn spectral_sums_are_bitwise_repeatable() {
    let ct = ComplexTorus::gaussian(1);
    let (v1, v2) = (line(&[1, 0], [0.0, 0.0]), line(&[1, 0], [0.0, 0.37]));
    let first = slag_spectral_term(&ct, &v1, &v2, 150.0).unwrap();
    for _ in 0..4 {
        assert_eq!(slag_spectral_term(&ct, &v1, &v2, 150.0).unwrap(), first);
    }
}
