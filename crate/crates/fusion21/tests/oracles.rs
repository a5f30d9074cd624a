//! Reference values computed independently at 40 digits: theta functions from
//! their Fourier series, brackets from q-Pochhammer products, character
//! coefficients from direct polynomial expansion.

#![allow(clippy::excessive_precision)]

use fusion21::elliptic::{h_func, sq};
use fusion21::identity_suite::three_term_residual;
use fusion21::intertwiners::{t_fused, t_star};
use fusion21::ope_algebra::{derived_ratio, printed_ope, CommRel, PairTag, RatR};
use fusion21::spectra::{character_product, h_bond, vertex_partition_series};
use fusion21::ModelParams;

fn assert_rel(got: f64, want: f64, tol: f64) {
    let err = (got - want).abs() / want.abs().max(1e-300);
    assert!(err < tol, "got {got:.17e}, want {want:.17e}, rel err {err:.2e}");
}

#[test]
fn h_functions_match_fourier_series() {
    let p = ModelParams::from_epsilon(1.0, 4.0).unwrap();
    #[rustfmt::skip]
    let table = [
        (1, 4.0, 0.3, 0.24691291102022577662), (1, 4.0, 1.7, 1.0553647806911206231),
        (1, 8.0, 0.3, 0.13005928164961207678), (1, 8.0, 1.7, 0.79625123053974883255),
        (2, 4.0, 0.3, 1.0553647806911206231),  (2, 8.0, 1.7, 1.100750062174794751),
        (3, 4.0, 0.3, 1.1511843718338419603),  (3, 8.0, 1.7, 1.1231290268984635118),
        (4, 4.0, 1.7, 1.1511843718338419603),  (4, 8.0, 0.3, 0.44645973258121047656),
    ];
    for (j, t, u, want) in table {
        assert_rel(h_func(j, t, u, &p).unwrap(), want, 1e-13);
    }
}

#[test]
fn square_bracket_values() {
    let p = ModelParams::from_x(0.3, 4.5).unwrap();
    for (u, want) in [
        (0.5, 1.19522311867964568),
        (1.5, 3.2409033811978911768),
        (0.7, 1.6595847483493157611),
        (2.2, 3.8375067032771949195),
    ] {
        assert_rel(sq(u, &p), want, 1e-13);
    }
}

#[test]
fn fused_intertwiner_at_r4() {
    let p = ModelParams::from_epsilon(1.0, 4.0).unwrap();
    let cases = [
        (1.0, [0.41078520028261960914, 1.7985055251790075253, 1.168464607002083369]),
        (3.0, [0.32595740815659786995, 1.5792498072847029782, 1.4725481170224096553]),
        (5.0, [0.32595740815659786995, 1.5792498072847029782, 1.4725481170224096553]),
    ];
    for (kp, want) in cases {
        let t = t_fused(0.25, 3.0, kp, &p).unwrap();
        for (g, w) in t.components.iter().zip(want) {
            assert_rel(*g, w, 1e-12);
        }
    }
}

#[test]
fn fused_and_dual_intertwiners_at_generic_point() {
    let p = ModelParams::from_epsilon(0.8, 4.5).unwrap();
    let (u, k) = (0.37, 2.3);
    #[rustfmt::skip]
    let fused = [
        [0.81786361417603293434, 1.9311346594727769228, 0.74296484027582563503],
        [0.77205548749970354196, 1.8874114181640706982, 0.82232206662187833807],
        [0.69921670708692240778, 1.925570246840257657, 0.86741882447392659783],
    ];
    #[rustfmt::skip]
    let dual = [
        [-3.5999336534171039257, 6.3450280491920841654, -11.183367478681051891],
        [16.377480785434311095, -12.724127503277850057, 15.044396990182194374],
        [-12.442593369206110218, 6.6279378670723155992, -3.5305791217521727125],
    ];
    for (i, kp) in [k - 2.0, k, k + 2.0].into_iter().enumerate() {
        let t = t_fused(u, k, kp, &p).unwrap();
        let ts = t_star(u, k, kp, &p).unwrap();
        for c in 0..3 {
            assert_rel(t.components[c], fused[i][c], 1e-12);
            assert_rel(ts.components[c], dual[i][c], 1e-11);
        }
    }
}

#[test]
fn three_term_identity_at_fixed_point() {
    let p = ModelParams::from_epsilon(1.0, 7.3).unwrap();
    assert!(three_term_residual(1, 6.0, &p).unwrap() < 1e-10);
}

#[test]
fn phi1_commutation_ratio() {
    let p = ModelParams::from_x(0.3, 4.5).unwrap();
    let want = 0.36879319686410138009;
    assert_rel(CommRel::Phi1Phi1.expected(0.7, 0.2, &p), want, 1e-13);
    assert_rel(derived_ratio(CommRel::Phi1Phi1, 0.7, 0.2, &p).unwrap(), want, 1e-12);
    assert_eq!(derived_ratio(CommRel::Phi1Psi1, 0.7, 0.2, &p).unwrap(), -1.0);
}

#[test]
fn printed_prefactor_data() {
    assert!(printed_ope(PairTag::Psi1Psi1).exponent.same(&RatR::new(&[0, 1], &[-2, 1])));
    assert_eq!(printed_ope(PairTag::Phi1A).sign, -1);
}

#[test]
fn bond_energy_table() {
    assert_eq!(h_bond(1, -1).unwrap(), 0);
    assert_eq!(h_bond(0, 1).unwrap(), 1);
    assert_eq!(h_bond(1, 1).unwrap(), 2);
    assert!(h_bond(2, 0).is_err());
}

#[test]
fn character_coefficients() {
    let even = [1, 1, 2, 3, 4, 6, 9, 12, 16, 22, 29, 38, 50];
    let odd = [1, 2, 2, 4, 6, 8, 12, 16, 22, 30, 40, 52, 68];
    for (i, want) in [(0u8, even), (1, odd), (2, even)] {
        let paths = vertex_partition_series(i, 12).unwrap();
        let prod = character_product(i, 12).unwrap();
        assert_eq!(paths.coeffs(), &want[..], "paths, sector {i}");
        assert_eq!(prod.coeffs(), &want[..], "product, sector {i}");
    }
}
