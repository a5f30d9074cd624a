use fusion21::config::SuiteConfig;
use fusion21::elliptic::{bracket, sq, BracketKind, BracketShape};
use fusion21::identity_suite::{addition_theorem_residual, generic_height, three_term_residual, SampleGrid};
use fusion21::ope_algebra::{boson_commutator, RatR};
use fusion21::series::{IntSeries, SeriesVar};
use fusion21::spectra::{character_product, vertex_partition_series};
use fusion21::vertex_weights::{charge_conserved, r21v, r8v};
use fusion21::ModelParams;
use proptest::prelude::*;

fn point() -> impl Strategy<Value = ModelParams> {
    (0.15f64..0.5, 4.1f64..7.5).prop_map(|(x, r)| ModelParams::from_x(x, r).unwrap())
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bracket_is_odd(p in point(), u in -3.0f64..3.0, shift in 0u8..3) {
        let k = BracketKind::new(BracketShape::Square, shift).unwrap();
        prop_assert!((bracket(u, k, &p) + bracket(-u, k, &p)).abs() <= 1e-12 * bracket(u, k, &p).abs().max(1e-12));
    }

    #[test]
    fn bracket_antiperiodic_in_r(p in point(), u in -2.0f64..2.0) {
        prop_assert!(close(sq(u + p.r, &p), -sq(u, &p), 1e-10));
    }

    #[test]
    fn bracket_vanishes_only_on_lattice(p in point(), n in -2i32..3) {
        let u = n as f64 * p.r;
        prop_assert!(sq(u, &p).abs() < 1e-12);
        prop_assert!(sq(u + 0.5, &p).abs() > 1e-6);
    }

    #[test]
    fn r8_at_zero_is_permutation(p in point()) {
        let t = r8v(0.0, &p).unwrap();
        for idx in t.indices() {
            let want = if idx[0] == idx[3] && idx[1] == idx[2] { 1.0 } else { 0.0 };
            prop_assert!((t.get(&idx) - want).abs() < 1e-12, "{:?} -> {}", idx, t.get(&idx));
        }
    }

    #[test]
    fn r_matrices_conserve_charge(p in point(), u in -0.9f64..0.9) {
        prop_assert!(charge_conserved(&r8v(u, &p).unwrap()));
        if let Ok(t) = r21v(u, &p) {
            prop_assert!(charge_conserved(&t));
        }
    }

    #[test]
    fn three_term_identity_holds(p in point(), s in 0i64..3, frac in 0.05f64..0.95) {
        let k = 1.0 + frac * (p.r - 1.0);
        prop_assume!(generic_height(k, p.r));
        if let Ok(res) = three_term_residual(s, k, &p) {
            prop_assert!(res < 1e-9, "residual {}", res);
        }
    }

    #[test]
    fn addition_theorem_holds(p in point(), u in -0.9f64..0.9, u0 in -0.9f64..0.9, v1 in -0.9f64..0.9, l in 1.2f64..2.8) {
        if let Ok(res) = addition_theorem_residual(u, u0, v1, l, &p) {
            prop_assert!(res < 1e-9, "residual {}", res);
        }
    }

    #[test]
    fn boson_commutator_is_odd(p in point(), m in 1i64..30) {
        let a = boson_commutator(m, &p).unwrap();
        let b = boson_commutator(-m, &p).unwrap();
        prop_assert!(close(a, -b, 1e-14));
    }

    #[test]
    fn ratr_is_scale_invariant(a in -9i64..10, b in -9i64..10, c in 1i64..10, k in 1i64..7, r in 2.5f64..9.0) {
        let x = RatR::new(&[a, b], &[c, 1]);
        let y = RatR::new(&[a * k, b * k], &[c * k, k]);
        prop_assert!(x.same(&y));
        prop_assert!(close(x.add(&y).eval(r), 2.0 * x.eval(r), 1e-12) || x.eval(r).abs() < 1e-12);
    }

    #[test]
    fn pochhammer_inverts(a in 1usize..5, step in 1usize..4, n in 4usize..30) {
        let p = IntSeries::pochhammer(SeriesVar::X2, a, step, -1, n);
        let q = IntSeries::inv_pochhammer(SeriesVar::X2, a, step, n);
        prop_assert_eq!(p.mul(&q), IntSeries::one(SeriesVar::X2, n));
    }

    #[test]
    fn sample_streams_are_reproducible(seed in any::<u64>()) {
        let mut a = SampleGrid::new(seed, "check_ybe");
        let mut b = SampleGrid::new(seed, "check_ybe");
        for _ in 0..8 {
            prop_assert_eq!(a.uniform(0.0, 1.0).to_bits(), b.uniform(0.0, 1.0).to_bits());
            let h = a.height(5.0);
            prop_assert_eq!(h.to_bits(), b.height(5.0).to_bits());
            prop_assert!(h > 1.0 && h < 5.0 && generic_height(h, 5.0));
        }
    }

    #[test]
    fn config_round_trips(seed in any::<u64>(), x in 0.05f64..0.6, n in 1usize..30) {
        let cfg = SuiteConfig { seed, x, n, ..SuiteConfig::default() };
        let back = SuiteConfig::from_json(&cfg.to_json()).unwrap();
        prop_assert_eq!(back.to_json(), cfg.to_json());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn character_series_stable_under_cutoff(i in 0u8..3, e in 2usize..10) {
        let long = vertex_partition_series(i, e + 4).unwrap();
        let short = vertex_partition_series(i, e).unwrap();
        prop_assert_eq!(long.truncate(e), short.clone());
        prop_assert_eq!(short, character_product(i, e).unwrap());
    }
}
