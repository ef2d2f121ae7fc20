//! Membership checks for the real Deligne complex `𝒟^n(X, r)`.

use serde::Serialize;

use super::form::{Differential, MultiForm};
use crate::error::Result;
use crate::linalg::C64;

/// Which formula defines `d_𝒟` in degree `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeligneCase {
    /// `n ≥ 2r`: `d_𝒟 x = dx`.
    Closed,
    /// `n = 2r − 1`: `d_𝒟 x = −2 d'd'' x`.
    Middle,
    /// `n < 2r − 1`: `d_𝒟 x = −π(dx)`.
    Projected,
}

#[derive(Debug, Clone)]
pub struct MembershipReport {
    pub case: DeligneCase,
    /// Largest coefficient outside the allowed bidegrees or form degree.
    pub bidegree_violation: f64,
    /// `max |conj(x) − (−1)^w x|`, `w` the Tate twist of the degree.
    pub reality_violation: f64,
    pub d_deligne: MultiForm,
}

impl MembershipReport {
    pub fn is_member(&self, tol: f64) -> bool {
        self.bidegree_violation <= tol && self.reality_violation <= tol
    }
}

/// Checks `x ∈ 𝒟^n(X, r)` for a form on `X` (no parameter generators).
///
/// For `n ≤ 2r − 1` the form must have degree `n − 1`, live in bidegrees
/// with `p, q < r` and lie in `(2πi)^{r−1}` times the real forms; for
/// `n ≥ 2r`, degree `n`, `p, q ≥ r`, twist `r`. A form lies in
/// `(2πi)^w · A_ℝ` exactly when `conj(x) = (−1)^w x`.
pub fn deligne_membership(form: &MultiForm, n: usize, r: usize) -> Result<MembershipReport> {
    let low = n < 2 * r;
    let (degree, twist) = if low {
        (n.saturating_sub(1), r - 1)
    } else {
        (n, r)
    };
    let allowed = |(p, q, s): (usize, usize, usize)| {
        s == 0
            && p + q == degree
            && if low {
                p < r && q < r
            } else {
                p >= r && q >= r
            }
    };
    let violating = form.filter(|t| !allowed(t));
    let sign = if twist % 2 == 1 { -1.0 } else { 1.0 };
    let reality = form.conj().axpy(C64::new(-sign, 0.0), form)?;

    let case = if !low {
        DeligneCase::Closed
    } else if n == 2 * r - 1 {
        DeligneCase::Middle
    } else {
        DeligneCase::Projected
    };
    let d_deligne = match case {
        DeligneCase::Closed => form.d(Differential::X)?,
        DeligneCase::Middle => form
            .d(Differential::Antiholomorphic)?
            .d(Differential::Holomorphic)?
            .scale(C64::new(-2.0, 0.0)),
        // target 𝒟^{n+1} with n + 1 ≤ 2r − 1 keeps the p, q < r pieces
        DeligneCase::Projected => form
            .d(Differential::X)?
            .filter(|(p, q, _)| p < r && q < r)
            .scale(C64::new(-1.0, 0.0)),
    };
    Ok(MembershipReport {
        case,
        bidegree_violation: violating.max_abs(),
        reality_violation: reality.max_abs(),
        d_deligne,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet_forms::jet::{JetContext, MatJet};

    #[test]
    fn zero_form_is_a_member() {
        let ctx = JetContext::new(2, 0, 2).unwrap();
        let zero = MultiForm::zero(&ctx, 1, 1);
        for r in 1..=3 {
            for n in 0..=2 * r + 1 {
                assert!(deligne_membership(&zero, n, r).unwrap().is_member(0.0));
            }
        }
    }

    #[test]
    fn imaginary_one_one_form_in_degree_two() {
        let ctx = JetContext::new(1, 0, 2).unwrap();
        // F = dz ∧ dz̄ has conj(F) = dz̄ ∧ dz = −F, so F ∈ (2πi)·A_ℝ
        let f = MultiForm::term(0b11, MatJet::scalar(&ctx, 2, C64::new(1.0, 0.0)));
        let rep = deligne_membership(&f, 2, 1).unwrap();
        assert_eq!(rep.case, DeligneCase::Closed);
        assert!(rep.is_member(0.0));
        assert!(rep.d_deligne.is_zero());
        // i·F is real, hence outside the twisted class
        let g = f.scale(C64::new(0.0, 1.0));
        let rep = deligne_membership(&g, 2, 1).unwrap();
        assert!(rep.bidegree_violation == 0.0 && rep.reality_violation > 1.0);
        // for r = 2, n = 3 the twist is r − 1 = 1 and degree 2 sits in p, q < 2
        assert!(deligne_membership(&f, 3, 2).unwrap().is_member(0.0));
        assert_eq!(
            deligne_membership(&f, 3, 2).unwrap().case,
            DeligneCase::Middle
        );
    }
}
