use lefschetz_core::exterior::*;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn element(dim: usize, degree: usize) -> impl Strategy<Value = ExteriorElement> {
    let masks = subsets(dim, degree);
    prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), masks.len()).prop_map(move |cs| {
        masks.iter().zip(cs).fold(ExteriorElement::zero(dim), |acc, (&m, (re, im))| acc + ExteriorElement::monomial(dim, m, C64::new(re, im)))
    })
}

fn mixed(dim: usize) -> impl Strategy<Value = ExteriorElement> {
    prop::collection::vec((0u32..(1 << dim), -2.0f64..2.0, -2.0f64..2.0), 1..12).prop_map(move |ts| {
        ts.into_iter().fold(ExteriorElement::zero(dim), |acc, (m, re, im)| acc + ExteriorElement::monomial(dim, m, C64::new(re, im)))
    })
}

fn square(n: usize) -> impl Strategy<Value = DMatrix<f64>> {
    prop::collection::vec(-2.0f64..2.0, n * n).prop_map(move |v| DMatrix::from_vec(n, n, v))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn double_star_sign((dim, p) in (1usize..=7).prop_flat_map(|d| (Just(d), 0..=d))) {
        let a = ExteriorElement::from_indices(dim, &(0..p).collect::<Vec<_>>());
        let sign = if (p * (dim - p)) % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!((&hodge_star(&hodge_star(&a)) - &a.scale(C64::new(sign, 0.0))).max_abs() < 1e-12);
    }

    #[test]
    fn double_star_sign_random(a in element(6, 3), b in element(5, 2)) {
        prop_assert!((&hodge_star(&hodge_star(&a)) + &a).max_abs() < 1e-12);
        prop_assert!((&hodge_star(&hodge_star(&b)) - &b).max_abs() < 1e-12);
    }

    #[test]
    fn star_is_isometry(a in element(6, 2), b in element(6, 2)) {
        let x = inner(&a, &b).unwrap();
        let y = inner(&hodge_star(&a), &hodge_star(&b)).unwrap();
        prop_assert!((x - y).norm() < 1e-10);
    }

    #[test]
    fn graded_commutativity(a in element(6, 2), b in element(6, 3), c in element(6, 1)) {
        prop_assert!((&wedge(&a, &b).unwrap() - &wedge(&b, &a).unwrap()).max_abs() < 1e-12);
        prop_assert!((&wedge(&b, &c).unwrap() + &wedge(&c, &b).unwrap()).max_abs() < 1e-12);
    }

    #[test]
    fn bitypes_reconstruct(a in mixed(4)) {
        let frame = ComplexFrame::new(2);
        let mut sum = ExteriorElement::zero(4);
        for p in 0..=2 {
            for q in 0..=2 {
                sum = sum + bitype_project(&a, &frame, p, q).unwrap();
            }
        }
        prop_assert!((&sum - &a).max_abs() < 1e-12);
    }

    #[test]
    fn multigrades_reconstruct(a in mixed(4)) {
        let frame = ComplexFrame::new(1);
        let split = ProductSplit::new(2);
        let mut sum = ExteriorElement::zero(4);
        for g in 0..16usize {
            let grade = (g & 1, g >> 1 & 1, g >> 2 & 1, g >> 3 & 1);
            sum = sum + multigrade_project(&a, &split, &frame, grade).unwrap();
        }
        prop_assert!((&sum - &a).max_abs() < 1e-12);
    }

    #[test]
    fn pullback_is_functorial(a in element(4, 2), l1 in square(4), l2 in square(4)) {
        let lhs = pullback(&(&l1 * &l2), &a).unwrap();
        let rhs = pullback(&l2, &pullback(&l1, &a).unwrap()).unwrap();
        prop_assert!((&lhs - &rhs).max_abs() < 1e-9 * (1.0 + lhs.max_abs()));
    }

    #[test]
    fn pullback_top_degree_scales_by_det(l in square(4)) {
        let v = ExteriorElement::volume(4);
        let p = pullback(&l, &v).unwrap();
        prop_assert!((p.coeff(full_mask(4)).re - l.determinant()).abs() < 1e-9);
    }

    #[test]
    fn pullback_respects_wedge(a in element(4, 1), b in element(4, 2), l in square(4)) {
        let lhs = pullback(&l, &wedge(&a, &b).unwrap()).unwrap();
        let rhs = wedge(&pullback(&l, &a).unwrap(), &pullback(&l, &b).unwrap()).unwrap();
        prop_assert!((&lhs - &rhs).max_abs() < 1e-9);
    }
}
