use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use sqfree::detmethod::{
    annihilates, choose_m, curve_through, kernel_polynomial, monomial_matrix, sweep_intervals,
    DetConfig, IntervalSpec, RationalPoint, SweepOutcome,
};
use sqfree::solutions::{enumerate_mef, Q1Kind};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn point(s: BigRational, t: BigRational) -> RationalPoint {
    RationalPoint::new(s, t, Q1Kind::Cross)
}

#[test]
fn conic_through_five_points() {
    // five points on t^2 = s^3 + 1 need a curve of degree (3, 2) or lower
    let pts: Vec<_> = [(0, 1), (-1, 0), (2, 3), (2, -3), (0, -1)]
        .iter()
        .map(|&(s, t)| point(rat(s, 1), rat(t, 1)))
        .collect();
    let m = monomial_matrix(&pts, 1, 1);
    let poly = kernel_polynomial(&m);
    assert!(poly.is_err(), "five general points have no (1,1) curve");
    let m = monomial_matrix(&pts, 3, 2);
    let poly = kernel_polynomial(&m).unwrap();
    assert!(annihilates(&m, &poly));
    assert!(pts.iter().all(|p| poly.vanishes_at(p)));
    assert_eq!(poly.content(), BigInt::from(1));
}

#[test]
fn sweep_covers_every_triple() {
    for (x, e, f) in [(10_000u64, 158u64, 3_981u64), (100_000, 562, 31_623)] {
        let cfg = choose_m(x, e, f, 0.1).unwrap();
        let triples = enumerate_mef(cfg.dyadic_box());
        let out = sweep_intervals(&triples, &cfg).unwrap();
        let mut seen = 0;
        for o in &out {
            if let SweepOutcome::Curve(c) = o {
                assert!(c.verified && !c.no_points);
                assert!(c.poly.content() == BigInt::from(1));
                seen += c.points;
            }
        }
        assert_eq!(seen, triples.len());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kernel_vanishes_on_random_points(
        pts in prop::collection::vec((-50i64..50, 1i64..30, -50i64..50, 1i64..30), 1..12),
        k in 1u32..4, l in 1u32..4,
    ) {
        let pts: Vec<_> = pts.iter()
            .map(|&(a, b, c, d)| point(rat(a, b), rat(c, d)))
            .collect();
        let h = ((k + 1) * (l + 1)) as usize;
        let m = monomial_matrix(&pts, k, l);
        match kernel_polynomial(&m) {
            Ok(poly) => {
                prop_assert!(annihilates(&m, &poly));
                prop_assert!(pts.iter().all(|p| poly.vanishes_at(p)));
                prop_assert_eq!(poly.content(), BigInt::from(1));
            }
            Err(_) => prop_assert!(pts.len() >= h),
        }
    }

    #[test]
    fn curve_through_is_verified_when_underdetermined(
        pts in prop::collection::vec((-20i64..20, 1i64..9, -20i64..20, 1i64..9), 1..8),
    ) {
        let pts: Vec<_> = pts.iter()
            .map(|&(a, b, c, d)| point(rat(a, b), rat(c, d)))
            .collect();
        let cfg = DetConfig { x: 1_000, e_top: 32, f_top: 32, eta: 0.1, m: 10, k: 2, l: 2, clamped: None };
        let c = curve_through(&pts, &cfg, &IntervalSpec::new(0, 10)).unwrap();
        prop_assert!(c.verified);
    }
}
