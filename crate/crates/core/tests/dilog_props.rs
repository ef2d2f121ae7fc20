use num_complex::Complex64 as C64;
use proptest::prelude::*;
use regulator_core::dilog::{bloch_wigner, cross_ratio, li2, CrossRatioConvention};
use regulator_core::linalg::CVector;

fn complex(radius: f64) -> impl Strategy<Value = C64> {
    (-radius..radius, -radius..radius).prop_map(|(re, im)| C64::new(re, im))
}

fn away_from_singular(z: C64) -> bool {
    z.norm() > 1e-3 && (z - 1.0).norm() > 1e-3
}

proptest! {
    #[test]
    fn d_is_odd_under_conjugation(z in complex(4.0)) {
        prop_assert!((bloch_wigner(z.conj()) + bloch_wigner(z)).abs() < 1e-13);
    }

    #[test]
    fn d_is_odd_under_inversion(z in complex(4.0).prop_filter("regular", |z| away_from_singular(*z))) {
        let one = C64::new(1.0, 0.0);
        prop_assert!((bloch_wigner(one / z) + bloch_wigner(z)).abs() < 1e-12);
        prop_assert!((bloch_wigner(one - z) + bloch_wigner(z)).abs() < 1e-12);
    }

    #[test]
    fn five_term_relation(
        x in complex(3.0),
        y in complex(3.0),
    ) {
        let one = C64::new(1.0, 0.0);
        let w = one - x * y;
        prop_assume!(w.norm() > 0.05 && away_from_singular(x) && away_from_singular(y));
        let s = bloch_wigner(x)
            + bloch_wigner(y)
            + bloch_wigner((one - x) / w)
            + bloch_wigner(w)
            + bloch_wigner((one - y) / w);
        prop_assert!(s.abs() < 1e-11, "sum {s}");
    }

    #[test]
    fn d_vanishes_on_the_real_axis(x in -5.0f64..5.0) {
        prop_assert!(bloch_wigner(C64::new(x, 0.0)).abs() < 1e-14);
    }

    #[test]
    fn li2_reflection(z in complex(0.9).prop_filter("regular", |z| away_from_singular(*z))) {
        // Li2(z) + Li2(1−z) = π²/6 − ln z ln(1−z)
        let one = C64::new(1.0, 0.0);
        let lhs = li2(z) + li2(one - z);
        let rhs = C64::new(std::f64::consts::PI.powi(2) / 6.0, 0.0) - z.ln() * (one - z).ln();
        prop_assert!((lhs - rhs).norm() < 1e-12 * rhs.norm().max(1.0));
    }

    #[test]
    fn cross_ratio_of_standard_points(z in complex(3.0).prop_filter("regular", |z| away_from_singular(*z))) {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        let v = [
            CVector::new(vec![one, zero]).unwrap(),
            CVector::new(vec![zero, one]).unwrap(),
            CVector::new(vec![one, one]).unwrap(),
            CVector::new(vec![one, z]).unwrap(),
        ];
        let r = cross_ratio(&v, CrossRatioConvention::Inverse).unwrap();
        prop_assert!((r - z).norm() < 1e-12 * z.norm().max(1.0));
        for conv in CrossRatioConvention::ALL {
            let value = cross_ratio(&v, conv).unwrap();
            let back = conv.standard_from(value);
            prop_assert!((back - one / z).norm() < 1e-10 * (one / z).norm().max(1.0));
        }
    }
}
