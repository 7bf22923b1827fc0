//! Property tests over randomized states and symbols.

use num_complex::Complex64;
use phasespace::poly::{moyal_bracket, poisson_bracket, star_poly, PolySymbol};
use phasespace::states::{make_gaussian_packet, to_momentum, to_position};
use phasespace::wigner::{cross_wigner, wigner_from_position};
use phasespace::{PhaseGrid, PhysicalConstants};
use proptest::prelude::*;

fn packet_params() -> impl Strategy<Value = (f64, f64, f64)> {
    (-1.5f64..1.5, -1.5f64..1.5, 0.7f64..1.5)
}

fn small_poly() -> impl Strategy<Value = PolySymbol> {
    proptest::collection::vec((0u32..3, 0u32..3, -1.0f64..1.0), 1..5).prop_map(|terms| {
        let mut p = PolySymbol::zero();
        for (a, b, c) in terms {
            p.add_term(a, b, Complex64::new(c, 0.0));
        }
        p
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn representation_change_preserves_norm((q0, p0, w) in packet_params()) {
        let grid = PhaseGrid::line(-16.0, 16.0, 128, 1.0).unwrap();
        let psi = make_gaussian_packet(&grid, q0, p0, w, &PhysicalConstants::default()).unwrap();
        let pt = to_momentum(&psi).unwrap();
        prop_assert!((psi.norm_sq() - pt.norm_sq()).abs() < 1e-12);
        let back = to_position(&pt).unwrap();
        let roundtrip: f64 = psi
            .values
            .iter()
            .zip(&back.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        prop_assert!(roundtrip < 1e-12);
    }

    #[test]
    fn wigner_battery_on_random_packets((q0, p0, w) in packet_params()) {
        let grid = PhaseGrid::line(-16.0, 16.0, 128, 1.0).unwrap();
        let psi = make_gaussian_packet(&grid, q0, p0, w, &PhysicalConstants::default()).unwrap();
        let field = wigner_from_position(&psi).unwrap();
        prop_assert!((field.integral() - 1.0).abs() < 1e-6);
        prop_assert!(field.max_abs() <= (1.0 / std::f64::consts::PI) * (1.0 + 1e-9));
        prop_assert!((field.purity() - 1.0 / (2.0 * std::f64::consts::PI)).abs() < 1e-5);
    }

    #[test]
    fn cross_wigner_conjugate_swap(
        (q0, p0, w) in packet_params(),
        (q1, p1, w1) in packet_params(),
    ) {
        let grid = PhaseGrid::line(-16.0, 16.0, 128, 1.0).unwrap();
        let c = PhysicalConstants::default();
        let a = make_gaussian_packet(&grid, q0, p0, w, &c).unwrap();
        let b = make_gaussian_packet(&grid, q1, p1, w1, &c).unwrap();
        let ab = cross_wigner(&a, &b).unwrap();
        let ba = cross_wigner(&b, &a).unwrap();
        prop_assert!(ab.conj_transpose_of(&ba) < 1e-12);
    }

    #[test]
    fn moyal_bracket_antisymmetric_bilinear(a in small_poly(), b in small_poly(), s in -2.0f64..2.0) {
        let h = 0.7;
        let ab = moyal_bracket(&a, &b, h).unwrap();
        let ba = moyal_bracket(&b, &a, h).unwrap();
        prop_assert!(ab.add(&ba).coeff_distance(&PolySymbol::zero()) < 1e-12);
        // bilinearity in the first slot
        let scaled = moyal_bracket(&a.scale(Complex64::new(s, 0.0)), &b, h).unwrap();
        prop_assert!(scaled.coeff_distance(&ab.scale(Complex64::new(s, 0.0))) < 1e-12);
    }

    #[test]
    fn quadratic_brackets_are_classical(c1 in -1.0f64..1.0, c2 in -1.0f64..1.0) {
        // for degree <= 2 symbols the Moyal bracket is i hbar times Poisson
        let h = 0.9;
        let a = PolySymbol::monomial(2, 0, Complex64::new(c1, 0.0))
            .add(&PolySymbol::monomial(1, 1, Complex64::new(0.4, 0.0)));
        let b = PolySymbol::monomial(0, 2, Complex64::new(c2, 0.0))
            .add(&PolySymbol::monomial(1, 0, Complex64::new(-0.3, 0.0)));
        let mb = moyal_bracket(&a, &b, h).unwrap();
        let pb = poisson_bracket(&a, &b).scale(Complex64::new(0.0, h));
        prop_assert!(mb.coeff_distance(&pb) < 1e-13);
    }

    #[test]
    fn star_associativity(a in small_poly(), b in small_poly(), c in small_poly()) {
        let h = 0.8;
        let left = star_poly(&star_poly(&a, &b, h).unwrap(), &c, h).unwrap();
        let right = star_poly(&a, &star_poly(&b, &c, h).unwrap(), h).unwrap();
        prop_assert!(left.coeff_distance(&right) < 1e-11);
    }
}
