//! Chern connection, curvature, number operator and the transgressed forms.

use serde::{Deserialize, Serialize};

use super::form::{Differential, MultiForm};
use super::jet::MatJet;
use super::scene::{JetMetric, JetSource};
use crate::error::{Error, Result};
use crate::linalg::C64;

/// Normalization of the invariant polynomial `CH_r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChNormalization {
    /// `(−1)^r (r!)^{-2} Σ_σ Tr(A_σ1 ⋯ A_σr)`.
    #[default]
    AsPrinted,
    /// `(−1)^r (r!)^{-1} Σ_σ Tr(A_σ1 ⋯ A_σr)`.
    SingleFactorial,
}

/// Coefficients of the transgressed forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlphaCoefficients {
    /// `(−1)^{k+q} (k+p)! (k+q)! (k+p+q+1)! / (k! p! q!)` and right-hand side
    /// `φ(∇²^{r−n}, [∇'',N]^n) − (−1)^n φ(∇²^{r−n}, [∇',N]^n)`.
    #[default]
    AsPrinted,
    /// The printed coefficient times `C(r, k+p+q+1)`, right-hand side times
    /// `r!/(r−n)!`. With these weights the identities hold for every `r`;
    /// for `r = 1` the two choices coincide.
    Binomial,
}

/// Conventions for `CH_r` and the transgressed forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Conventions {
    pub normalization: ChNormalization,
    pub coefficients: AlphaCoefficients,
}

impl Conventions {
    pub fn printed() -> Self {
        Self::default()
    }

    pub fn binomial() -> Self {
        Self {
            normalization: ChNormalization::AsPrinted,
            coefficients: AlphaCoefficients::Binomial,
        }
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// `θ = h^{-1} ∂h`, the connection form of `∇' = ∂ + θ`.
pub fn connection_form(metric: &JetMetric) -> Result<MultiForm> {
    let ctx = metric.context();
    let h_inv = metric.h.inverse()?;
    let n = metric.rank();
    let mut theta = MultiForm::zero(ctx, n, n);
    for a in 0..ctx.complex_dim() {
        let mask = theta.generator_dz(a);
        theta.push(mask, h_inv.mul(&metric.h.derivative(a)?)?)?;
    }
    Ok(theta)
}

/// `∇² = ∂̄(h^{-1}∂h)`, of tridegree (1,1,0).
pub fn curvature(metric: &JetMetric) -> Result<MultiForm> {
    connection_form(metric)?.d(Differential::Antiholomorphic)
}

/// `N = h^{-1} d_T h`, of tridegree (0,0,1).
pub fn number_operator(metric: &JetMetric) -> Result<MultiForm> {
    let ctx = metric.context();
    let h_inv = metric.h.inverse()?;
    let n = metric.rank();
    let m = ctx.complex_dim();
    let mut out = MultiForm::zero(ctx, n, n);
    for b in 0..ctx.param_dim() {
        let mask = out.generator_dtau(b);
        out.push(mask, h_inv.mul(&metric.h.derivative(2 * m + b)?)?)?;
    }
    Ok(out)
}

/// The forms entering the transgressed characteristic forms.
#[derive(Debug, Clone)]
pub struct ConnectionForms {
    pub theta: MultiForm,
    pub curvature: MultiForm,
    pub number: MultiForm,
    /// `½[N, N] = N ∧ N`
    pub half_nn: MultiForm,
    /// `[∇'', N] = ∂̄N`
    pub antiholomorphic_bracket: MultiForm,
    /// `[∇', N] = ∂N + [θ, N]`
    pub holomorphic_bracket: MultiForm,
    pub source: JetSource,
}

impl ConnectionForms {
    pub fn new(metric: &JetMetric) -> Result<Self> {
        let theta = connection_form(metric)?;
        let curvature = theta.d(Differential::Antiholomorphic)?;
        let number = number_operator(metric)?;
        let half_nn = number.supercommutator(&number)?.scale(real(0.5));
        let antiholomorphic_bracket = number.d(Differential::Antiholomorphic)?;
        let holomorphic_bracket = number
            .d(Differential::Holomorphic)?
            .add(&theta.supercommutator(&number)?)?;
        Ok(Self {
            theta,
            curvature,
            number,
            half_nn,
            antiholomorphic_bracket,
            holomorphic_bracket,
            source: metric.source,
        })
    }

    /// `[∇, ∇²] = ∂∇² + [θ, ∇²] + ∂̄∇²`, which vanishes identically.
    pub fn bianchi_residual(&self) -> Result<f64> {
        let r = self
            .curvature
            .d(Differential::X)?
            .add(&self.theta.supercommutator(&self.curvature)?)?;
        Ok(r.max_abs())
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// `CH_r(A_1, …, A_r)` on form-valued arguments, with Koszul signs inside
/// the symmetrization. Each argument must have homogeneous degree parity.
pub fn ch_polynomial(
    args: &[MultiForm],
    r: usize,
    normalization: ChNormalization,
) -> Result<MultiForm> {
    if args.len() != r || r == 0 {
        return Err(Error::InvalidArgument(format!(
            "CH_{r} takes {r} arguments, got {}",
            args.len()
        )));
    }
    let parity: Vec<bool> = args
        .iter()
        .map(|a| {
            a.parity()
                .ok_or_else(|| Error::Unsupported("argument of mixed degree parity".into()))
        })
        .collect::<Result<_>>()?;
    let ctx = args[0].context();
    let mut sum = MultiForm::zero(ctx, 1, 1);
    for sigma in permutations(r) {
        let mut odd_swaps = 0;
        for i in 0..r {
            for j in i + 1..r {
                if sigma[i] > sigma[j] && parity[sigma[i]] && parity[sigma[j]] {
                    odd_swaps += 1;
                }
            }
        }
        let mut prod = args[sigma[0]].clone();
        for &s in &sigma[1..] {
            prod = prod.wedge(&args[s])?;
        }
        let sign = if odd_swaps % 2 == 1 { -1.0 } else { 1.0 };
        sum = sum.axpy(real(sign), &prod.trace())?;
    }
    let fact = factorial(r);
    let norm = match normalization {
        ChNormalization::AsPrinted => fact * fact,
        ChNormalization::SingleFactorial => fact,
    };
    let sign = if r % 2 == 1 { -1.0 } else { 1.0 };
    Ok(sum.scale(real(sign / norm)))
}

/// `α = CH_r(∇², …, ∇²)`.
pub fn characteristic_form(
    forms: &ConnectionForms,
    r: usize,
    normalization: ChNormalization,
) -> Result<MultiForm> {
    ch_polynomial(&vec![forms.curvature.clone(); r], r, normalization)
}

/// `(k, p, q, coefficient)` for the terms of `α^(n)`:
/// `2k + p + q + 1 = n`, `k + p + q + 1 ≤ r`.
pub fn alpha_terms(
    r: usize,
    n: usize,
    coefficients: AlphaCoefficients,
) -> Vec<(usize, usize, usize, f64)> {
    let mut out = Vec::new();
    for k in 0..r {
        for p in 0..r {
            for q in 0..r {
                if 2 * k + p + q + 1 != n || k + p + q + 1 > r {
                    continue;
                }
                let sign = if (k + q) % 2 == 1 { -1.0 } else { 1.0 };
                let j = k + p + q + 1;
                let mut c = sign * factorial(k + p) * factorial(k + q) * factorial(j)
                    / (factorial(k) * factorial(p) * factorial(q));
                if coefficients == AlphaCoefficients::Binomial {
                    c *= factorial(r) / (factorial(j) * factorial(r - j));
                }
                out.push((k, p, q, c));
            }
        }
    }
    out
}

/// The `n`-transgressed form `α^(n)`, `1 ≤ n ≤ 2r − 1`.
pub fn alpha_n(
    forms: &ConnectionForms,
    r: usize,
    n: usize,
    conventions: Conventions,
) -> Result<MultiForm> {
    if n == 0 || n > 2 * r - 1 {
        return Err(Error::InvalidArgument(format!(
            "α^({n}) needs 1 ≤ n ≤ {}",
            2 * r - 1
        )));
    }
    let ctx = forms.number.context();
    let mut out = MultiForm::zero(ctx, 1, 1);
    for (k, p, q, c) in alpha_terms(r, n, conventions.coefficients) {
        let mut args = vec![forms.curvature.clone(); r - k - p - q - 1];
        args.push(forms.number.clone());
        args.extend(std::iter::repeat_n(forms.half_nn.clone(), k));
        args.extend(std::iter::repeat_n(forms.antiholomorphic_bracket.clone(), p));
        args.extend(std::iter::repeat_n(forms.holomorphic_bracket.clone(), q));
        out = out.axpy(
            real(c),
            &ch_polynomial(&args, r, conventions.normalization)?,
        )?;
    }
    Ok(out)
}

/// Both sides of the transgression identity and their difference.
#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    pub r: usize,
    pub n: usize,
    pub source: JetSource,
    /// Largest coefficient of `LHS − RHS`.
    pub residual: f64,
    pub lhs_norm: f64,
    pub rhs_norm: f64,
}

/// `n = 1`: `d'd''α^(1) + d_T α`;
/// `n ≥ 2`: `d_X α^(n) + n d_T α^(n−1)` minus
/// `φ(∇²^{r−n}, [∇'',N]^n) − (−1)^n φ(∇²^{r−n}, [∇',N]^n)`.
pub fn theorem1_residual(
    metric: &JetMetric,
    r: usize,
    n: usize,
    conventions: Conventions,
) -> Result<ResidualReport> {
    let normalization = conventions.normalization;
    if n == 0 || n > 2 * r - 1 {
        return Err(Error::InvalidArgument(format!(
            "n = {n} outside 1..={}",
            2 * r - 1
        )));
    }
    let needed = super::scene::required_jet_order(r, n);
    let available = metric.context().order();
    if metric.h.order() < needed {
        return Err(Error::JetOrder { needed, available });
    }
    let forms = ConnectionForms::new(metric)?;
    let ctx = metric.context();
    let (lhs, rhs) = if n == 1 {
        let a1 = alpha_n(&forms, r, 1, conventions)?;
        let alpha = characteristic_form(&forms, r, normalization)?;
        let lhs = a1
            .d(Differential::Antiholomorphic)?
            .d(Differential::Holomorphic)?
            .add(&alpha.d(Differential::T)?)?;
        (lhs, MultiForm::zero(ctx, 1, 1))
    } else {
        let an = alpha_n(&forms, r, n, conventions)?;
        let prev = alpha_n(&forms, r, n - 1, conventions)?;
        let lhs = an
            .d(Differential::X)?
            .axpy(real(n as f64), &prev.d(Differential::T)?)?;
        let rhs = if n > r {
            MultiForm::zero(ctx, 1, 1)
        } else {
            let mut anti = vec![forms.curvature.clone(); r - n];
            anti.extend(std::iter::repeat_n(forms.antiholomorphic_bracket.clone(), n));
            let mut holo = vec![forms.curvature.clone(); r - n];
            holo.extend(std::iter::repeat_n(forms.holomorphic_bracket.clone(), n));
            let sign = if n % 2 == 1 { -1.0 } else { 1.0 };
            let weight = match conventions.coefficients {
                AlphaCoefficients::AsPrinted => 1.0,
                AlphaCoefficients::Binomial => factorial(r) / factorial(r - n),
            };
            ch_polynomial(&anti, r, normalization)?
                .axpy(real(-sign), &ch_polynomial(&holo, r, normalization)?)?
                .scale(real(weight))
        };
        (lhs, rhs)
    };
    Ok(ResidualReport {
        r,
        n,
        source: metric.source,
        residual: lhs.sub(&rhs)?.max_abs(),
        lhs_norm: lhs.max_abs(),
        rhs_norm: rhs.max_abs(),
    })
}

/// On a point (`m = 0`) the top form `α^(2r−1)` is a multiple of
/// `dτ_1 ∧ … ∧ dτ_{2r−1}`; returns that coefficient at the base point.
pub fn top_alpha_coefficient(
    metric: &JetMetric,
    r: usize,
    conventions: Conventions,
) -> Result<C64> {
    let ctx = metric.context();
    if ctx.complex_dim() != 0 || ctx.param_dim() != 2 * r - 1 {
        return Err(Error::Dimension(format!(
            "top coefficient needs m = 0 and k = {}",
            2 * r - 1
        )));
    }
    let forms = ConnectionForms::new(metric)?;
    let a = alpha_n(&forms, r, 2 * r - 1, conventions)?;
    let full = (1u32 << (2 * r - 1)) - 1;
    Ok(a.coefficient(full)
        .map_or(C64::new(0.0, 0.0), |c: &MatJet| c.value()[(0, 0)]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet_forms::jet::JetContext;
    use crate::jet_forms::scene::{MetricFamily, PolyTerm, TestScene};
    use crate::linalg::CMatrix;

    #[test]
    fn alpha_term_table() {
        let printed = AlphaCoefficients::AsPrinted;
        assert_eq!(alpha_terms(2, 1, printed), vec![(0, 0, 0, 1.0)]);
        let t = alpha_terms(2, 2, printed);
        assert_eq!(t, vec![(0, 0, 1, -2.0), (0, 1, 0, 2.0)]);
        assert_eq!(alpha_terms(2, 3, printed), vec![(1, 0, 0, -2.0)]);
        assert_eq!(alpha_terms(3, 5, printed), vec![(2, 0, 0, 12.0)]);
        let binomial = AlphaCoefficients::Binomial;
        assert_eq!(alpha_terms(3, 1, binomial), vec![(0, 0, 0, 3.0)]);
        assert_eq!(
            alpha_terms(3, 2, binomial),
            vec![(0, 0, 1, -6.0), (0, 1, 0, 6.0)]
        );
        assert_eq!(alpha_terms(3, 5, binomial), vec![(2, 0, 0, 12.0)]);
    }

    #[test]
    fn ch1_is_minus_trace() {
        let ctx = JetContext::new(0, 1, 0).unwrap();
        let a = CMatrix::from_fn(2, 2, |i, j| C64::new((i + 2 * j) as f64, 1.0));
        let f = MultiForm::function(MatJet::constant(&ctx, 0, &a));
        let ch = ch_polynomial(&[f], 1, ChNormalization::AsPrinted).unwrap();
        assert_eq!(ch.coefficient(0).unwrap().value()[(0, 0)], -a.trace());
    }

    #[test]
    fn ch_of_equal_even_arguments() {
        let ctx = JetContext::new(0, 1, 0).unwrap();
        let a = CMatrix::from_fn(2, 2, |i, j| C64::new(1.0 + i as f64, j as f64 - 0.5));
        let f = MultiForm::function(MatJet::constant(&ctx, 0, &a));
        let ch = ch_polynomial(&[f.clone(), f.clone(), f], 3, ChNormalization::AsPrinted).unwrap();
        let a3 = &(&a * &a) * &a;
        let expected = -a3.trace() / 6.0;
        assert!((ch.coefficient(0).unwrap().value()[(0, 0)] - expected).norm() < 1e-14);
    }

    fn scalar_scene(phi: Vec<(Vec<u8>, f64)>) -> TestScene {
        // h = exp(−φ) with φ real: P + P^H = −φ with P = −φ/2
        TestScene {
            m: 1,
            k: 1,
            rank: 1,
            family: MetricFamily::Exp {
                terms: phi
                    .into_iter()
                    .map(|(e, c)| PolyTerm {
                        exponents: e,
                        coeff: CMatrix::from_diagonal(&[C64::new(-c / 2.0, 0.0)]),
                    })
                    .collect(),
            },
            z: vec![C64::new(0.2, -0.1)],
            tau: vec![0.3],
        }
    }

    #[test]
    fn scalar_curvature_is_levi_form() {
        // φ = 2 z z̄ + τ z z̄ (real for real τ), φ_{z z̄} = 2 + τ
        let scene = scalar_scene(vec![(vec![1, 1, 0], 2.0), (vec![1, 1, 1], 1.0)]);
        let metric = scene.jet_metric(3).unwrap();
        let curv = curvature(&metric).unwrap();
        let c = curv.coefficient(0b11).unwrap().value()[(0, 0)];
        assert!((c - C64::new(2.3, 0.0)).norm() < 1e-12, "{c}");
    }

    #[test]
    fn scalar_number_operator() {
        // h = e^τ
        let scene = scalar_scene(vec![(vec![0, 0, 1], -1.0)]);
        let metric = scene.jet_metric(2).unwrap();
        let n = number_operator(&metric).unwrap();
        assert!(
            (n.coefficient(0b100).unwrap().value()[(0, 0)] - C64::new(1.0, 0.0)).norm() < 1e-14
        );
        assert!(curvature(&metric).unwrap().is_zero());
    }
}
