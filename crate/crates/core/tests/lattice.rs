use proptest::prelude::*;
use sqfree::detmethod::{label_points, IntervalSpec};
use sqfree::lattice::{
    census_by_l, census_dyadic, check_invariants, coordinate_bounds_check, gauss_reduce, h_basis,
    interval_lattice, quadruples, t_side_census, COORDINATE_CONSTANT,
};
use sqfree::solutions::{enumerate_mef, DyadicBox};

#[test]
fn identity_basis_is_reduced() {
    assert_eq!(gauss_reduce([1, 0], [0, 1]).unwrap(), ([1, 0], [0, 1]));
}

#[test]
fn coordinate_sweep_at_ten_thousand() {
    // boxes with E^2 F near 10^8, M from the default choice
    let mut worst = 0.0f64;
    let mut checked = 0;
    for (e, f) in [(64u64, 16_384u64), (256, 2_048), (1_024, 128)] {
        let cfg = sqfree::detmethod::choose_m(10_000, e, f, 0.1).unwrap();
        let quads = quadruples(&enumerate_mef(DyadicBox::new(e, f)));
        for q in &quads {
            let s = num_rational::BigRational::new(q.x1.clone(), q.x2.clone());
            let iv = IntervalSpec::containing(&s, cfg.m);
            let r = coordinate_bounds_check(std::slice::from_ref(q), e, &iv).unwrap();
            assert_eq!(r.checked, 1);
            assert!(r.holds(), "{q:?}: {r:?}");
            worst = worst.max(r.max_ratio);
            checked += 1;
        }
    }
    assert!(checked > 0);
    assert!(worst <= COORDINATE_CONSTANT);
}

#[test]
fn empty_inputs() {
    let r = coordinate_bounds_check(&[], 100, &IntervalSpec::new(3, 10)).unwrap();
    assert_eq!((r.checked, r.max_ratio), (0, 0.0));
    let c = t_side_census(100, 10, &[]).unwrap();
    assert!(c.bins.is_empty() && c.intervals == 0);
}

#[test]
fn census_square_modulus() {
    // E = M^2: x3 = 0 gives L1 = sqrt(E)
    let (e, m) = (250_000u64, 500u64);
    assert_eq!(census_by_l(e, m, 499.0, 500.0).unwrap(), 1);
    let bins = census_dyadic(e, m, 3).unwrap();
    assert_eq!(bins.iter().map(|b| b.count).sum::<u64>(), m);
    assert!(bins.iter().all(|b| b.within_envelope()));
    assert_eq!(bins, census_dyadic(e, m, 1).unwrap());
}

#[test]
fn t_side_multiplicity() {
    for (e, f, m) in [(128u64, 65_536u64, 64u64), (512, 4_096, 100)] {
        let bx = DyadicBox::new(e, f);
        let pts = label_points(&enumerate_mef(bx), bx).unwrap();
        let c = t_side_census(f, m, &pts).unwrap();
        assert!(c.within_cap(), "{c:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn reduction_invariants(m in 1u64..=1_000_000, x3f in 0.0f64..1.0, e in 1u64..=1_000_000_000_000) {
        let x3 = ((m as f64 * x3f) as u64).min(m - 1) as i64;
        let (lat, rb) = interval_lattice(x3, m, e).unwrap();
        prop_assert_eq!(lat.det(), m as i128);
        prop_assert_eq!(check_invariants(&rb, x3, m, e), None);
        let h = h_basis(&rb, x3, m).unwrap();
        prop_assert_eq!(h.det().abs(), 1);
    }

    #[test]
    fn reduction_of_arbitrary_bases(a in -1000i64..1000, b in -1000i64..1000,
                                    c in -1000i64..1000, d in -1000i64..1000) {
        let det = a as i128 * d as i128 - b as i128 * c as i128;
        prop_assume!(det != 0);
        let (g1, g2) = gauss_reduce([a, b], [c, d]).unwrap();
        let n = |v: [i64; 2]| v[0] as i128 * v[0] as i128 + v[1] as i128 * v[1] as i128;
        prop_assert!(n(g1) <= n(g2));
        let dot = g1[0] as i128 * g2[0] as i128 + g1[1] as i128 * g2[1] as i128;
        prop_assert!(2 * dot.abs() <= n(g1));
        prop_assert_eq!((g1[0] as i128 * g2[1] as i128 - g1[1] as i128 * g2[0] as i128).abs(), det.abs());
    }
}
