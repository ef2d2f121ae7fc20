//! Dilogarithm, Bloch–Wigner function and cross-ratios.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{det2, CVector, C64};

const PI2_6: f64 = PI * PI / 6.0;

/// `B_{2k} / (2k+1)!` for k = 1, 2, …
const BERNOULLI_COEFFS: [f64; 20] = [
    0.027777777777777776,
    -0.0002777777777777778,
    4.72411186696901e-06,
    -9.185773074661964e-08,
    1.8978869988971e-09,
    -4.0647616451442256e-11,
    8.921691020456452e-13,
    -1.9939295860721074e-14,
    4.518980029619918e-16,
    -1.0356517612181247e-17,
    2.395218621026187e-19,
    -5.581785874325009e-21,
    1.3091507554183213e-22,
    -3.0874198024267403e-24,
    7.315975652702203e-26,
    -1.740845657234001e-27,
    4.1576356446139e-29,
    -9.962148488284622e-31,
    2.3940344248961652e-32,
    -5.76834735536739e-34,
];

/// Power series `Σ z^k / k²`; only sensible for `|z| < 1`.
pub fn li2_series(z: C64) -> C64 {
    let mut sum = C64::new(0.0, 0.0);
    let mut power = z;
    for k in 1..10_000u32 {
        let term = power / (k as f64 * k as f64);
        sum += term;
        if term.norm() < 1e-18 * sum.norm().max(1e-300) {
            break;
        }
        power *= z;
    }
    sum
}

/// Series in `u = −ln(1−z)` with Bernoulli coefficients, converging for
/// `|u| < 2π`.
pub fn li2_bernoulli(z: C64) -> C64 {
    let u = -(C64::new(1.0, 0.0) - z).ln();
    let u2 = u * u;
    let mut sum = u - u2 * 0.25;
    let mut power = u * u2;
    for c in BERNOULLI_COEFFS {
        let term = power * c;
        sum += term;
        if term.norm() < 1e-18 * sum.norm() {
            break;
        }
        power *= u2;
    }
    sum
}

/// Principal branch of the dilogarithm, cut along `[1, ∞)`.
///
/// Points on the cut take the limit from the upper half plane.
pub fn li2(z: C64) -> C64 {
    if z == C64::new(0.0, 0.0) {
        return z;
    }
    if z == C64::new(1.0, 0.0) {
        return C64::new(PI2_6, 0.0);
    }
    let mut z = z;
    if z.im == 0.0 && z.re > 1.0 {
        z.im = 0.0; // normalizes -0.0 to the upper side
    }
    if z.norm_sqr() > 1.0 {
        // −z then carries imaginary part −0.0 on the cut, selecting arg = −π
        let l = (-z).ln();
        return -li2(z.inv()) - PI2_6 - l * l * 0.5;
    }
    if z.re > 0.5 {
        let w = C64::new(1.0, 0.0) - z;
        return -li2(w) + PI2_6 - z.ln() * w.ln();
    }
    if z.norm() <= 0.5 {
        li2_series(z)
    } else {
        li2_bernoulli(z)
    }
}

/// Bloch–Wigner function `D(z) = Im Li₂(z) + arg(1−z)·ln|z|`.
pub fn bloch_wigner(z: C64) -> f64 {
    // D vanishes identically on the real line, including at 0 and 1
    if z.im == 0.0 {
        return 0.0;
    }
    li2(z).im + (C64::new(1.0, 0.0) - z).arg() * z.norm().ln()
}

/// The six values of the cross-ratio under the anharmonic group.
///
/// With `A = det(v0,v2)det(v1,v3)`, `B = det(v0,v3)det(v1,v2)` and
/// `C = det(v0,v1)det(v2,v3)` one has `A = B + C`, and `Standard` is `A/B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CrossRatioConvention {
    #[default]
    Standard,
    Inverse,
    OneMinus,
    InverseOneMinus,
    RatioOverRatioMinusOne,
    RatioMinusOneOverRatio,
}

impl CrossRatioConvention {
    pub const ALL: [CrossRatioConvention; 6] = [
        Self::Standard,
        Self::Inverse,
        Self::OneMinus,
        Self::InverseOneMinus,
        Self::RatioOverRatioMinusOne,
        Self::RatioMinusOneOverRatio,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Standard => "r",
            Self::Inverse => "1/r",
            Self::OneMinus => "1-r",
            Self::InverseOneMinus => "1/(1-r)",
            Self::RatioOverRatioMinusOne => "r/(r-1)",
            Self::RatioMinusOneOverRatio => "(r-1)/r",
        }
    }

    pub fn id(self) -> &'static str {
        match self {
            Self::Standard => "standard",
            Self::Inverse => "inverse",
            Self::OneMinus => "one-minus",
            Self::InverseOneMinus => "inverse-one-minus",
            Self::RatioOverRatioMinusOne => "ratio-over-ratio-minus-one",
            Self::RatioMinusOneOverRatio => "ratio-minus-one-over-ratio",
        }
    }

    /// Maps the standard cross-ratio `r` to this convention.
    pub fn apply(self, r: C64) -> C64 {
        let one = C64::new(1.0, 0.0);
        match self {
            Self::Standard => r,
            Self::Inverse => one / r,
            Self::OneMinus => one - r,
            Self::InverseOneMinus => one / (one - r),
            Self::RatioOverRatioMinusOne => r / (r - one),
            Self::RatioMinusOneOverRatio => (r - one) / r,
        }
    }

    /// Inverse of [`apply`](Self::apply): the standard ratio realizing `value`.
    pub fn standard_from(self, value: C64) -> C64 {
        let one = C64::new(1.0, 0.0);
        match self {
            Self::Standard => value,
            Self::Inverse => one / value,
            Self::OneMinus => one - value,
            Self::InverseOneMinus => one - one / value,
            Self::RatioOverRatioMinusOne => value / (value - one),
            Self::RatioMinusOneOverRatio => one / (one - value),
        }
    }
}

impl std::str::FromStr for CrossRatioConvention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s || c.id() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown cross-ratio convention `{s}`")))
    }
}

fn check_pair_vectors(v: &[CVector]) -> Result<()> {
    if v.len() != 4 || v.iter().any(|x| x.dim() != 2) {
        return Err(Error::Dimension("expected four vectors in C^2".into()));
    }
    Ok(())
}

/// Cross-ratio of the four points of `P¹` represented by `v`.
pub fn cross_ratio(v: &[CVector], conv: CrossRatioConvention) -> Result<C64> {
    check_pair_vectors(v)?;
    let a = det2(&v[0], &v[2]) * det2(&v[1], &v[3]);
    let b = det2(&v[0], &v[3]) * det2(&v[1], &v[2]);
    let c = det2(&v[0], &v[1]) * det2(&v[2], &v[3]);
    // evaluate each convention as a ratio of products, no cancellation
    let (num, den) = match conv {
        CrossRatioConvention::Standard => (a, b),
        CrossRatioConvention::Inverse => (b, a),
        CrossRatioConvention::OneMinus => (-c, b),
        CrossRatioConvention::InverseOneMinus => (-b, c),
        CrossRatioConvention::RatioOverRatioMinusOne => (a, c),
        CrossRatioConvention::RatioMinusOneOverRatio => (c, a),
    };
    if den.norm() == 0.0 || num.norm() == 0.0 {
        return Err(Error::Degenerate(format!(
            "cross-ratio {} is 0 or ∞ (coincident points)",
            conv.name()
        )));
    }
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;

    const CATALAN: f64 = 0.915_965_594_177_219;

    #[test]
    fn special_values() {
        assert_eq!(li2(C64::new(0.0, 0.0)), C64::new(0.0, 0.0));
        // Σ 1/n² and Σ (−1)^n/n², summed directly with an integral tail bound
        let zeta2: f64 = (1..2_000_000u64)
            .map(|n| 1.0 / (n as f64 * n as f64))
            .sum::<f64>()
            + 1.0 / 2_000_000.0;
        assert!((li2(C64::new(1.0, 0.0)).re - zeta2).abs() < 1e-12);
        let eta2: f64 = (1..2_000_001u64)
            .map(|n| if n % 2 == 0 { 1.0 } else { -1.0 } / (n as f64 * n as f64))
            .sum();
        assert!((li2(C64::new(-1.0, 0.0)).re - eta2).abs() < 1e-12);
        assert!((li2(C64::new(-1.0, 0.0)).re + PI * PI / 12.0).abs() < 1e-15);
    }

    #[test]
    fn catalan_and_maximum() {
        let s: f64 = (0..200_000u64)
            .map(|k| if k % 2 == 0 { 1.0 } else { -1.0 } / ((2 * k + 1) as f64).powi(2))
            .sum();
        assert!((s - CATALAN).abs() < 1e-10);
        assert!((bloch_wigner(C64::new(0.0, 1.0)) - CATALAN).abs() < 1e-14);

        let peak = C64::from_polar(1.0, PI / 3.0);
        let dmax = bloch_wigner(peak);
        assert!((dmax - 1.014_941_606_409_653_6).abs() < 1e-13);
        for k in 0..50 {
            let a = PI / 3.0 + 0.02 * (k as f64 - 25.0);
            let r = 1.0 + 0.01 * ((k * 7) % 11) as f64 - 0.05;
            assert!(bloch_wigner(C64::from_polar(r, a)) <= dmax + 1e-15);
        }
    }

    #[test]
    fn real_axis_is_zero() {
        for x in [-3.0, -0.5, 0.0, 0.3, 1.0, 2.5] {
            assert_eq!(bloch_wigner(C64::new(x, 0.0)), 0.0);
        }
    }

    #[test]
    fn cut_uses_upper_limit() {
        let x = 3.0_f64;
        let on = li2(C64::new(x, 0.0));
        let above = li2(C64::new(x, 1e-12));
        assert!((on - above).norm() < 1e-9);
        assert!((on.im - PI * x.ln()).abs() < 1e-13);
        assert_eq!(li2(C64::new(x, -0.0)), on);
    }

    #[test]
    fn evaluation_paths_agree_on_annulus() {
        for k in 0..200 {
            let r = 0.4 + 0.2 * (k as f64 + 0.5) / 200.0;
            let a = 2.0 * PI * ((k * 37) % 200) as f64 / 200.0;
            let z = C64::from_polar(r, a);
            if (C64::new(1.0, 0.0) - z).ln().norm() > 6.0 {
                continue;
            }
            assert!((li2_series(z) - li2_bernoulli(z)).norm() < 1e-12, "z={z}");
        }
    }

    fn det2_of(a: [C64; 2], b: [C64; 2]) -> C64 {
        a[0] * b[1] - a[1] * b[0]
    }

    #[test]
    fn cross_ratio_examples() {
        let z = C64::new(0.3, -1.7);
        let e1 = CVector::basis(2, 0);
        let e2 = CVector::basis(2, 1);
        let v3 = &e1 + &e2.scale(z);
        let v = vec![e1.clone(), e2.clone(), &e1 + &e2, v3];
        // the four determinants, expanded by hand from the component arrays
        let comps = [
            [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
            [C64::new(1.0, 0.0), C64::new(1.0, 0.0)],
            [C64::new(1.0, 0.0), z],
        ];
        let hand = det2_of(comps[0], comps[2]) * det2_of(comps[1], comps[3])
            / (det2_of(comps[0], comps[3]) * det2_of(comps[1], comps[2]));
        let r = cross_ratio(&v, CrossRatioConvention::Standard).unwrap();
        assert!((r - hand).norm() < 1e-15);
        assert!((r - z.inv()).norm() < 1e-15);
        let r = cross_ratio(&v, CrossRatioConvention::Inverse).unwrap();
        assert!((r - z).norm() < 1e-15);

        let mut scaled = v.clone();
        scaled[0] = scaled[0].scale(C64::new(0.0, 7.0));
        let r2 = cross_ratio(&scaled, CrossRatioConvention::Inverse).unwrap();
        assert!((r2 - z).norm() < 1e-13 * z.norm());
    }

    #[test]
    fn conventions_are_consistent() {
        let v = vec![
            CVector::new(vec![C64::new(0.2, 1.0), C64::new(-0.7, 0.4)]).unwrap(),
            CVector::new(vec![C64::new(1.1, -0.3), C64::new(0.5, 0.5)]).unwrap(),
            CVector::new(vec![C64::new(-0.4, 0.9), C64::new(0.3, -1.2)]).unwrap(),
            CVector::new(vec![C64::new(0.8, 0.1), C64::new(-0.6, -0.2)]).unwrap(),
        ];
        let r = cross_ratio(&v, CrossRatioConvention::Standard).unwrap();
        for conv in CrossRatioConvention::ALL {
            let direct = cross_ratio(&v, conv).unwrap();
            assert!((direct - conv.apply(r)).norm() < 1e-12 * direct.norm());
            assert!((conv.standard_from(direct) - r).norm() < 1e-12 * r.norm());
            assert_eq!(conv.name().parse::<CrossRatioConvention>().unwrap(), conv);
            assert_eq!(conv.id().parse::<CrossRatioConvention>().unwrap(), conv);
            assert_eq!(serde_json::to_value(conv).unwrap(), conv.id());
        }
    }

    #[test]
    fn degenerate_cross_ratio() {
        let e1 = CVector::basis(2, 0);
        let v = vec![
            e1.clone(),
            CVector::basis(2, 1),
            &e1 + &CVector::basis(2, 1),
            e1.scale(C64::new(0.0, 2.0)),
        ];
        assert!(matches!(
            cross_ratio(&v, CrossRatioConvention::Standard),
            Err(Error::Degenerate(_))
        ));
    }
}
