//! Analytic metric families and their jets at a point.

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::jet::{JetContext, MatJet};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64, ZERO};

/// `coeff · z^a z̄^b τ^c`, exponents listed in variable order.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PolyTerm {
    pub exponents: Vec<u8>,
    pub coeff: CMatrix,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum MetricFamily {
    /// `h = exp(P + P^H)` with `P = Σ terms`.
    Exp { terms: Vec<PolyTerm> },
    /// `h = c I + L L^H` with `L = Σ terms`.
    Gram { shift: f64, terms: Vec<PolyTerm> },
    /// `h = A_0 + Σ_b τ_b (A_b − A_0)`, independent of `z`.
    Affine { vertices: Vec<CMatrix> },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TestScene {
    pub m: usize,
    pub k: usize,
    #[serde(rename = "N")]
    pub rank: usize,
    pub family: MetricFamily,
    #[serde(default)]
    pub z: Vec<C64>,
    #[serde(default)]
    pub tau: Vec<f64>,
}

/// How the jets of a metric were produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum JetSource {
    Exact,
    FiniteDifference,
}

/// A hermitian metric and its derivatives in `(z, z̄, τ)` at a point.
#[derive(Debug, Clone)]
pub struct JetMetric {
    pub h: MatJet,
    pub source: JetSource,
}

impl JetMetric {
    pub fn context(&self) -> &Arc<JetContext> {
        self.h.context()
    }

    pub fn rank(&self) -> usize {
        self.h.rows()
    }

    /// Largest coefficient discrepancy, relative to the larger jet.
    pub fn distance(&self, other: &JetMetric) -> Result<f64> {
        let diff = self.h.sub(&other.h)?.max_abs();
        Ok(diff / self.h.max_abs().max(other.h.max_abs()).max(1.0))
    }
}

/// Jet order that `theorem1_residual` needs for weight `r` and step `n`.
pub fn required_jet_order(r: usize, n: usize) -> usize {
    if n == 1 && r >= 2 {
        4
    } else {
        3
    }
}

fn check_hermitian(family: &MetricFamily, rank: usize) -> Result<()> {
    let check_shape = |m: &CMatrix| {
        if m.rows() != rank || m.cols() != rank {
            Err(Error::Dimension(format!(
                "{}x{} coefficient for rank {rank}",
                m.rows(),
                m.cols()
            )))
        } else {
            Ok(())
        }
    };
    match family {
        MetricFamily::Exp { terms } | MetricFamily::Gram { terms, .. } => {
            terms.iter().try_for_each(|t| check_shape(&t.coeff))
        }
        MetricFamily::Affine { vertices } => {
            for v in vertices {
                check_shape(v)?;
                if !v.is_hermitian() {
                    return Err(Error::InvalidArgument(
                        "affine vertex is not hermitian".into(),
                    ));
                }
                v.cholesky()?;
            }
            Ok(())
        }
    }
}

impl TestScene {
    pub fn validate(&self) -> Result<()> {
        if self.m > 3 || self.k > 5 || self.rank == 0 || self.rank > 3 {
            return Err(Error::Unsupported(format!(
                "scene m = {}, k = {}, N = {} (limits m ≤ 3, k ≤ 5, 1 ≤ N ≤ 3)",
                self.m, self.k, self.rank
            )));
        }
        if self.z.len() != self.m || self.tau.len() != self.k {
            return Err(Error::Dimension("scene point does not match m, k".into()));
        }
        let nvars = 2 * self.m + self.k;
        match &self.family {
            MetricFamily::Exp { terms } | MetricFamily::Gram { terms, .. } => {
                if let Some(t) = terms.iter().find(|t| t.exponents.len() != nvars) {
                    return Err(Error::Dimension(format!(
                        "term exponents {:?} for {nvars} variables",
                        t.exponents
                    )));
                }
            }
            MetricFamily::Affine { vertices } => {
                if vertices.len() != self.k + 1 {
                    return Err(Error::Dimension(format!(
                        "{} affine vertices for k = {}",
                        vertices.len(),
                        self.k
                    )));
                }
            }
        }
        if let MetricFamily::Gram { shift, .. } = &self.family {
            if !(*shift > 0.0) {
                return Err(Error::InvalidArgument("gram shift must be positive".into()));
            }
        }
        check_hermitian(&self.family, self.rank)
    }

    pub fn context(&self, order: usize) -> Result<Arc<JetContext>> {
        JetContext::new(self.m, self.k, order)
    }

    /// Values of the jet variables at the scene point.
    fn variable_values(&self, z: &[C64], tau: &[f64]) -> Vec<C64> {
        z.iter()
            .copied()
            .chain(z.iter().map(|w| w.conj()))
            .chain(tau.iter().map(|&t| C64::new(t, 0.0)))
            .collect()
    }

    fn metric_jet(
        &self,
        ctx: &Arc<JetContext>,
        order: usize,
        z: &[C64],
        tau: &[f64],
    ) -> Result<MatJet> {
        let values = self.variable_values(z, tau);
        let vars: Vec<MatJet> = values
            .iter()
            .enumerate()
            .map(|(v, &x)| MatJet::variable(ctx, order, v, x))
            .collect();
        let polynomial = |terms: &[PolyTerm]| -> Result<MatJet> {
            let mut sum = MatJet::zeros(ctx, order, self.rank, self.rank);
            for t in terms {
                let mut mono = MatJet::scalar(ctx, order, C64::new(1.0, 0.0));
                for (v, &e) in t.exponents.iter().enumerate() {
                    for _ in 0..e {
                        mono = mono.mul(&vars[v])?;
                    }
                }
                sum = sum.add(&mono.mul(&MatJet::constant(ctx, order, &t.coeff))?)?;
            }
            Ok(sum)
        };
        let h = match &self.family {
            MetricFamily::Exp { terms } => {
                let p = polynomial(terms)?;
                p.add(&p.adjoint())?.exp()?
            }
            MetricFamily::Gram { shift, terms } => {
                let l = polynomial(terms)?;
                let id = MatJet::identity(ctx, order, self.rank).scale(C64::new(*shift, 0.0));
                id.add(&l.mul(&l.adjoint())?)?
            }
            MetricFamily::Affine { vertices } => {
                let a0 = MatJet::constant(ctx, order, &vertices[0]);
                let mut h = a0.clone();
                for (b, vb) in vertices.iter().enumerate().skip(1) {
                    let tb = &vars[2 * self.m + b - 1];
                    let diff = MatJet::constant(ctx, order, vb).sub(&a0)?;
                    h = h.add(&tb.mul(&diff)?)?;
                }
                h
            }
        };
        if !h.is_finite() {
            return Err(Error::InvalidArgument("metric jet is not finite".into()));
        }
        Ok(h)
    }

    /// Exact jets by forward-mode truncated-polynomial arithmetic.
    pub fn jet_metric(&self, order: usize) -> Result<JetMetric> {
        self.validate()?;
        let ctx = self.context(order)?;
        let h = self.metric_jet(&ctx, order, &self.z, &self.tau)?;
        h.value().cholesky()?;
        Ok(JetMetric {
            h,
            source: JetSource::Exact,
        })
    }

    /// The metric at a nearby point, given by real coordinates
    /// `(Re z, Im z, τ)`.
    fn metric_at_real(&self, ctx0: &Arc<JetContext>, u: &[f64]) -> Result<CMatrix> {
        let m = self.m;
        let z: Vec<C64> = (0..m).map(|a| C64::new(u[a], u[m + a])).collect();
        Ok(self.metric_jet(ctx0, 0, &z, &u[2 * m..])?.value())
    }

    /// Jets from 4th-order central differences in the real coordinates
    /// `(x, y, τ)`, rewritten in the Wirtinger variables.
    pub fn finite_difference_metric(&self, order: usize, step: f64) -> Result<JetMetric> {
        self.validate()?;
        if order > 4 {
            return Err(Error::Unsupported(format!(
                "finite-difference jets of order {order}"
            )));
        }
        let m = self.m;
        let nv = 2 * m + self.k;
        let ctx = self.context(order)?;
        let ctx0 = self.context(0)?;
        let base: Vec<f64> = self
            .z
            .iter()
            .map(|w| w.re)
            .chain(self.z.iter().map(|w| w.im))
            .chain(self.tau.iter().copied())
            .collect();

        // real Taylor coefficients D^β h / β!, indexed like the jet monomials
        let mut real_coeffs: Vec<CMatrix> = Vec::new();
        for beta in ctx.monomials() {
            let mut acc = CMatrix::zeros(self.rank, self.rank);
            let stencils: Vec<&[(i32, f64)]> = beta.iter().map(|&e| stencil(e as usize)).collect();
            let mut idx = vec![0usize; nv];
            loop {
                let mut w = 1.0;
                let mut u = base.clone();
                for v in 0..nv {
                    let (off, wv) = stencils[v][idx[v]];
                    w *= wv;
                    u[v] += off as f64 * step;
                }
                if w != 0.0 {
                    acc.axpy(C64::new(w, 0.0), &self.metric_at_real(&ctx0, &u)?);
                }
                // odometer over the tensor stencil
                let mut v = 0;
                while v < nv {
                    idx[v] += 1;
                    if idx[v] < stencils[v].len() {
                        break;
                    }
                    idx[v] = 0;
                    v += 1;
                }
                if v == nv {
                    break;
                }
            }
            let deg: i32 = beta.iter().map(|&e| e as i32).sum();
            let fact: f64 = beta.iter().map(|&e| factorial(e as usize)).product();
            real_coeffs.push(acc.scale_real(1.0 / (step.powi(deg) * fact)));
        }

        // δx_a = (δz_a + δz̄_a)/2, δy_a = (δz_a − δz̄_a)/(2i), δτ_b = δτ_b
        let half = C64::new(0.5, 0.0);
        let deltas: Vec<MatJet> = (0..nv)
            .map(|v| {
                let var = |g: usize| MatJet::variable(&ctx, order, g, ZERO);
                if v < m {
                    var(v).add(&var(m + v)).unwrap().scale(half)
                } else if v < 2 * m {
                    let a = v - m;
                    var(a).sub(&var(m + a)).unwrap().scale(C64::new(0.0, -0.5))
                } else {
                    var(v)
                }
            })
            .collect();
        let mut h = MatJet::zeros(&ctx, order, self.rank, self.rank);
        for (beta, coeff) in ctx.monomials().iter().zip(&real_coeffs) {
            let mut mono = MatJet::scalar(&ctx, order, C64::new(1.0, 0.0));
            for (v, &e) in beta.iter().enumerate() {
                for _ in 0..e {
                    mono = mono.mul(&deltas[v])?;
                }
            }
            h = h.add(&mono.mul(&MatJet::constant(&ctx, order, coeff))?)?;
        }
        Ok(JetMetric {
            h,
            source: JetSource::FiniteDifference,
        })
    }

    /// A random scene of the given family kind.
    ///
    /// `exp` uses a hermitian polynomial of degree ≤ 2 with small
    /// coefficients, `gram` a degree ≤ 1 factor, and `affine` random
    /// positive definite vertices (only for `m = 0`).
    pub fn random(kind: &str, m: usize, k: usize, rank: usize, rng: &mut impl Rng) -> Result<Self> {
        let mut rc =
            |scale: f64| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale;
        let mut random_matrix = |scale: f64| CMatrix::from_fn(rank, rank, |_, _| rc(scale));
        let exponents_up_to = |deg: usize| {
            let ctx = JetContext::new(m, k, deg).unwrap();
            ctx.monomials().to_vec()
        };
        let family = match kind {
            "exp" => MetricFamily::Exp {
                terms: exponents_up_to(2)
                    .into_iter()
                    .map(|e| {
                        let deg: u8 = e.iter().sum();
                        let scale = [0.4, 0.3, 0.15][deg as usize];
                        PolyTerm {
                            exponents: e,
                            coeff: random_matrix(scale),
                        }
                    })
                    .collect(),
            },
            "gram" => MetricFamily::Gram {
                shift: 0.5,
                terms: exponents_up_to(1)
                    .into_iter()
                    .map(|e| PolyTerm {
                        exponents: e,
                        coeff: random_matrix(0.6),
                    })
                    .collect(),
            },
            "affine" => MetricFamily::Affine {
                vertices: (0..=k)
                    .map(|_| {
                        let g = random_matrix(1.0);
                        let mut h = &g * &g.adjoint();
                        h.axpy(C64::new(0.3, 0.0), &CMatrix::identity(rank));
                        h
                    })
                    .collect(),
            },
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown metric family `{other}`"
                )))
            }
        };
        let z = (0..m).map(|_| rc(0.3)).collect();
        let tau = match kind {
            // an interior point of the simplex
            "affine" => vec![1.0 / (k as f64 + 1.0); k],
            _ => (0..k).map(|_| rng.gen_range(-0.3..0.3)).collect(),
        };
        let scene = Self {
            m,
            k,
            rank,
            family,
            z,
            tau,
        };
        scene.validate()?;
        Ok(scene)
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Fourth-order central stencil `(offset, weight)` for the `j`-th derivative.
fn stencil(j: usize) -> &'static [(i32, f64)] {
    const D0: [(i32, f64); 1] = [(0, 1.0)];
    const D1: [(i32, f64); 4] = [
        (-2, 1.0 / 12.0),
        (-1, -8.0 / 12.0),
        (1, 8.0 / 12.0),
        (2, -1.0 / 12.0),
    ];
    const D2: [(i32, f64); 5] = [
        (-2, -1.0 / 12.0),
        (-1, 16.0 / 12.0),
        (0, -30.0 / 12.0),
        (1, 16.0 / 12.0),
        (2, -1.0 / 12.0),
    ];
    const D3: [(i32, f64); 6] = [
        (-3, 1.0 / 8.0),
        (-2, -1.0),
        (-1, 13.0 / 8.0),
        (1, -13.0 / 8.0),
        (2, 1.0),
        (3, -1.0 / 8.0),
    ];
    const D4: [(i32, f64); 7] = [
        (-3, -1.0 / 6.0),
        (-2, 2.0),
        (-1, -13.0 / 2.0),
        (0, 28.0 / 3.0),
        (1, -13.0 / 2.0),
        (2, 2.0),
        (3, -1.0 / 6.0),
    ];
    match j {
        0 => &D0,
        1 => &D1,
        2 => &D2,
        3 => &D3,
        4 => &D4,
        _ => unreachable!("stencil order is checked by the caller"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn stencils_differentiate_polynomials() {
        for j in 0..=4 {
            for p in 0..=5 {
                let s: f64 = stencil(j)
                    .iter()
                    .map(|&(o, w)| w * (o as f64).powi(p as i32))
                    .sum();
                let expected = if p == j { factorial(j) } else { 0.0 };
                if p <= j + 3 {
                    assert!((s - expected).abs() < 1e-12, "j={j} p={p} s={s}");
                }
            }
        }
    }

    #[test]
    fn finite_differences_agree_with_exact_jets() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for kind in ["exp", "gram"] {
            let scene = TestScene::random(kind, 1, 1, 2, &mut rng).unwrap();
            let exact = scene.jet_metric(3).unwrap();
            let fd = scene.finite_difference_metric(3, 1e-3).unwrap();
            let dist = exact.distance(&fd).unwrap();
            assert!(dist < 1e-6, "{kind}: {dist}");
        }
    }

    #[test]
    fn metric_is_hermitian_with_conjugate_symmetric_jets() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let scene = TestScene::random("exp", 2, 1, 3, &mut rng).unwrap();
        let h = scene.jet_metric(3).unwrap().h;
        assert!(h.value().is_hermitian());
        assert!(h.sub(&h.adjoint()).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn scene_json_round_trip() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let scene = TestScene::random("gram", 1, 2, 2, &mut rng).unwrap();
        let json = serde_json::to_string(&scene).unwrap();
        let back: TestScene = serde_json::from_str(&json).unwrap();
        assert_eq!(back, scene);
    }
}
