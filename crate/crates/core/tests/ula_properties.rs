use aoa_mcrb::{weighted_geometric_sum, weighted_geometric_sum_closed, ArrayGeometry};
use num_complex::Complex64;
use proptest::prelude::*;

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

fn angle() -> impl Strategy<Value = f64> {
    (-80.0f64..80.0).prop_map(f64::to_radians)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn steering_elements_have_unit_modulus(m in 2usize..=64, theta in angle(), d in 0.1f64..2.0) {
        let g = ArrayGeometry::new(m, d).unwrap();
        let a = g.steering(theta).unwrap();
        prop_assert_eq!(a.elements()[0], Complex64::new(1.0, 0.0));
        for e in a.elements() {
            prop_assert!((e.norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn derivative_matches_central_difference(m in 2usize..=64, theta in angle()) {
        let g = ArrayGeometry::half_wavelength(m).unwrap();
        let h = 1e-6;
        let plus = g.steering(theta + h).unwrap();
        let minus = g.steering(theta - h).unwrap();
        let d = g.steering_derivative(theta).unwrap();
        for k in 1..m {
            let fd = (plus.elements()[k] - minus.elements()[k]) / (2.0 * h);
            prop_assert!(rel(d[k], fd) < 1e-6, "k={} rel={}", k, rel(d[k], fd));
        }
    }

    #[test]
    fn gamma_is_squared_derivative_norm(m in 2usize..=64, theta in angle(), d in 0.1f64..2.0) {
        let g = ArrayGeometry::new(m, d).unwrap();
        let direct: f64 = g.steering_derivative(theta).unwrap().iter().map(|e| e.norm_sqr()).sum();
        let gamma = g.gamma(theta).unwrap();
        prop_assert!((gamma - direct).abs() / direct < 1e-12);
    }

    #[test]
    fn weighted_sum_is_bounded_on_the_unit_circle(m in 1usize..=256, phase in -3.2f64..3.2) {
        let s = weighted_geometric_sum(m, Complex64::from_polar(1.0, phase));
        let bound = (m * (m.saturating_sub(1))) as f64 / 2.0;
        prop_assert!(s.norm() <= bound * (1.0 + 1e-12));
    }

    #[test]
    fn closed_form_is_continuous_at_one(m in 2usize..=64, dir in -3.2f64..3.2) {
        let r = Complex64::new(1.0, 0.0) + Complex64::from_polar(1e-6, dir);
        let s = weighted_geometric_sum_closed(m, r);
        let limit = (m * (m - 1)) as f64 / 2.0;
        prop_assert!((s - limit).norm() / limit < 1e-4);
    }

    #[test]
    fn cross_inner_product_is_minus_conjugate_of_elementwise(
        m in 2usize..=64, theta in angle(), phi in angle()
    ) {
        let g = ArrayGeometry::half_wavelength(m).unwrap();
        let d = g.steering_derivative(theta).unwrap();
        let a = g.steering(phi).unwrap();
        let elementwise: Complex64 = d.iter().zip(a.elements()).map(|(x, y)| x.conj() * y).sum();
        let published = g.cross_inner_product(theta, phi).unwrap();
        let scale = g.wavenumber() * theta.cos() * (m * (m - 1)) as f64 / 2.0;
        prop_assert!((published + elementwise.conj()).norm() <= 1e-10 * scale);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn closed_form_matches_direct_sum(
        m in 2usize..=256,
        radius in prop_oneof![Just(1.0f64), 0.9f64..1.1],
        phase in -3.2f64..3.2,
        near in proptest::bool::ANY,
        log_gap in -8.0f64..-3.0,
    ) {
        let r = if near {
            Complex64::new(1.0, 0.0) + Complex64::from_polar(10f64.powf(log_gap), phase)
        } else {
            Complex64::from_polar(radius, phase)
        };
        let direct = weighted_geometric_sum(m, r);
        let closed = weighted_geometric_sum_closed(m, r);
        prop_assert!(rel(closed, direct) < 1e-10, "m={} r={} rel={}", m, r, rel(closed, direct));
    }
}
