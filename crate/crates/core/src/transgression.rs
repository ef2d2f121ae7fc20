//! Simplex-integral group cochains for the Chern character.
//!
//! A homogeneous tuple `(g_0, …, g_{2r−1})` of invertible matrices and a
//! base metric `h` define the convex family `h_t = Σ t_i g_i h g_i^H` on
//! `Δ^{2r−1}`. The cochain is `−(r−1)!/(2(2r−1)!)` times the integral of
//! `Tr((h_t^{-1} dh_t)^{2r−1})`.
//!
//! Coordinates: `t_0` is eliminated, so `∂h_t/∂t_j = A_j − A_0` with
//! `A_i = g_i h g_i^H`, and the integral is against `dt_1 ∧ … ∧ dt_{2r−1}`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{cholesky_solve, congruence, CMatrix, CVector, C64, ZERO};
use crate::quad::{integrate, QuadratureConfig, QuadratureResult, SimplexPoint};

/// Prefactor `−(r−1)!/(2·(2r−1)!)`.
pub fn chern_prefactor(r: usize) -> f64 {
    let fact = |k: usize| (1..=k).map(|i| i as f64).product::<f64>();
    -fact(r - 1) / (2.0 * fact(2 * r - 1))
}

#[derive(Debug, Clone)]
pub struct GroupTuple {
    r: usize,
    elements: Vec<CMatrix>,
    base_metric: CMatrix,
    epsilon: f64,
}

impl GroupTuple {
    pub fn new(
        r: usize,
        elements: Vec<CMatrix>,
        base_metric: CMatrix,
        epsilon: f64,
    ) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidArgument("weight r must be positive".into()));
        }
        if elements.len() < 2 {
            return Err(Error::InvalidArgument(
                "a tuple needs at least two elements".into(),
            ));
        }
        let n = base_metric.rows();
        if !base_metric.is_square() || elements.iter().any(|g| !g.is_square() || g.rows() != n) {
            return Err(Error::Dimension(
                "all matrices must be N×N with a common N".into(),
            ));
        }
        if !(epsilon >= 0.0) || !epsilon.is_finite() {
            return Err(Error::InvalidArgument(
                "regularization ε must be ≥ 0".into(),
            ));
        }
        for (i, g) in elements.iter().enumerate() {
            if !g.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "g_{i} has non-finite entries"
                )));
            }
            let scale = g.max_abs().powi(n as i32);
            if g.det()?.norm() <= 1e-12 * scale {
                return Err(Error::InvalidArgument(format!("g_{i} is not invertible")));
            }
        }
        if !base_metric.is_hermitian() {
            return Err(Error::InvalidArgument(
                "base metric is not hermitian".into(),
            ));
        }
        let tuple = Self {
            r,
            elements,
            base_metric,
            epsilon,
        };
        tuple.regularized_metric().cholesky()?;
        Ok(tuple)
    }

    pub fn with_identity_metric(r: usize, elements: Vec<CMatrix>) -> Result<Self> {
        let n = elements
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty tuple".into()))?
            .rows();
        Self::new(r, elements, CMatrix::identity(n), 0.0)
    }

    /// Base metric `v v^H`, regularized by `ε·I`.
    pub fn rank_one(r: usize, elements: Vec<CMatrix>, v: &CVector, epsilon: f64) -> Result<Self> {
        Self::new(r, elements, v.outer_self(), epsilon)
    }

    pub fn weight(&self) -> usize {
        self.r
    }

    pub fn rank(&self) -> usize {
        self.base_metric.rows()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    pub fn base_metric(&self) -> &CMatrix {
        &self.base_metric
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `h + ε·I`
    pub fn regularized_metric(&self) -> CMatrix {
        let mut h = self.base_metric.clone();
        if self.epsilon > 0.0 {
            h.axpy(C64::new(self.epsilon, 0.0), &CMatrix::identity(self.rank()));
        }
        h
    }

    /// The tuple with element `k` removed.
    pub fn face(&self, k: usize) -> Self {
        let mut elements = self.elements.clone();
        elements.remove(k);
        Self {
            elements,
            ..self.clone()
        }
    }

    /// Left translation `g_i ↦ g·g_i`.
    pub fn left_translate(&self, g: &CMatrix) -> Result<Self> {
        let elements = self
            .elements
            .iter()
            .map(|gi| g.matmul(gi))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.r, elements, self.base_metric.clone(), self.epsilon)
    }

    /// Reorders the elements: new element `i` is old element `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self {
            elements: perm.iter().map(|&i| self.elements[i].clone()).collect(),
            ..self.clone()
        }
    }

    pub fn with_base_metric(&self, h: CMatrix, epsilon: f64) -> Result<Self> {
        Self::new(self.r, self.elements.clone(), h, epsilon)
    }
}

/// The convex family of metrics over the simplex spanned by a tuple.
#[derive(Debug, Clone)]
pub struct MetricPath {
    vertices: Vec<CMatrix>,
    partials: Vec<CMatrix>,
}

impl MetricPath {
    pub fn new(tuple: &GroupTuple) -> Result<Self> {
        let h = tuple.regularized_metric();
        let vertices = tuple
            .elements
            .iter()
            .map(|g| congruence(g, &h))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_vertex_metrics(vertices))
    }

    /// Path through explicitly given hermitian vertex metrics `A_i`.
    pub fn from_vertex_metrics(vertices: Vec<CMatrix>) -> Self {
        let partials = vertices[1..].iter().map(|a| a - &vertices[0]).collect();
        Self { vertices, partials }
    }

    /// Simplex dimension of the path.
    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn vertex_metric(&self, i: usize) -> &CMatrix {
        &self.vertices[i]
    }

    /// `∂h_t/∂t_j = A_j − A_0` for free coordinate `j ≥ 1`.
    pub fn free_partial(&self, j: usize) -> &CMatrix {
        &self.partials[j - 1]
    }

    fn combine(&self, t: &SimplexPoint) -> Result<CMatrix> {
        if t.dim() != self.dim() {
            return Err(Error::Dimension(format!(
                "point in Δ^{} for a path over Δ^{}",
                t.dim(),
                self.dim()
            )));
        }
        let mut h = CMatrix::zeros(self.vertices[0].rows(), self.vertices[0].cols());
        for (&ti, a) in t.coords().iter().zip(&self.vertices) {
            if ti != 0.0 {
                h.axpy(C64::new(ti, 0.0), a);
            }
        }
        Ok(h)
    }

    /// `h_t`; fails if it is not positive definite.
    pub fn metric_at(&self, t: &SimplexPoint) -> Result<CMatrix> {
        let h = self.combine(t)?;
        h.cholesky()?;
        Ok(h)
    }

    /// The matrices `M_j = h_t^{-1}(A_j − A_0)`, `j = 1..=n`.
    pub fn log_derivatives(&self, t: &SimplexPoint) -> Result<Vec<CMatrix>> {
        let h = self.combine(t)?;
        let l = h.cholesky()?;
        Ok(self
            .partials
            .iter()
            .map(|b| cholesky_solve(&l, b))
            .collect())
    }
}

/// `Σ_{σ∈S_m} sgn(σ) Tr(M_{σ(1)} ⋯ M_{σ(m)})`.
///
/// For odd `m` a cyclic shift is an even permutation and leaves the trace
/// unchanged, so the first factor is pinned and the sum multiplied by `m`.
pub fn alternating_trace(mats: &[CMatrix]) -> C64 {
    let m = mats.len();
    if m == 0 {
        return ZERO;
    }
    if m % 2 == 1 {
        let rest: Vec<usize> = (1..m).collect();
        let mut acc = ZERO;
        dfs(mats, &mats[0], &rest, 1.0, &mut acc);
        acc * m as f64
    } else {
        let all: Vec<usize> = (0..m).collect();
        let mut acc = ZERO;
        for (pos, &first) in all.iter().enumerate() {
            let mut rest = all.clone();
            rest.remove(pos);
            let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
            dfs(mats, &mats[first], &rest, sign, &mut acc);
        }
        acc
    }
}

fn dfs(mats: &[CMatrix], prefix: &CMatrix, remaining: &[usize], sign: f64, acc: &mut C64) {
    if remaining.is_empty() {
        *acc += prefix.trace() * sign;
        return;
    }
    for (pos, &next) in remaining.iter().enumerate() {
        let mut rest = remaining.to_vec();
        rest.remove(pos);
        // choosing the pos-th smallest remaining index adds pos inversions
        let s = if pos % 2 == 0 { sign } else { -sign };
        let product = prefix * &mats[next];
        dfs(mats, &product, &rest, s, acc);
    }
}

/// Coefficient of `dt_1 ∧ … ∧ dt_m` in `Tr((h_t^{-1} dh_t)^m)`.
pub fn odd_trace_coeff(path: &MetricPath, t: &SimplexPoint, m: usize) -> Result<C64> {
    if m != path.dim() {
        return Err(Error::Dimension(format!(
            "form degree {m} on a path over Δ^{}",
            path.dim()
        )));
    }
    if m.is_multiple_of(2) {
        return Err(Error::InvalidArgument(
            "the trace form degree must be odd".into(),
        ));
    }
    Ok(alternating_trace(&path.log_derivatives(t)?))
}

fn check_cochain_tuple(tuple: &GroupTuple) -> Result<()> {
    if tuple.len() != 2 * tuple.weight() {
        return Err(Error::InvalidArgument(format!(
            "weight {} needs {} group elements, got {}",
            tuple.weight(),
            2 * tuple.weight(),
            tuple.len()
        )));
    }
    Ok(())
}

fn raw_integral(tuple: &GroupTuple, config: &QuadratureConfig) -> Result<QuadratureResult> {
    check_cochain_tuple(tuple)?;
    let path = MetricPath::new(tuple)?;
    let m = path.dim();
    integrate(|t| odd_trace_coeff(&path, t, m), m, config)
}

/// The Chern-character cochain `ch_r^{(2r−1)}(g_0, …, g_{2r−1})`.
pub fn chern_cochain(tuple: &GroupTuple, config: &QuadratureConfig) -> Result<QuadratureResult> {
    let raw = raw_integral(tuple, config)?;
    Ok(raw.scaled(C64::new(chern_prefactor(tuple.weight()), 0.0)))
}

/// Raw Borel integral `∫ Tr((h_t^{-1} dh_t)^{2r−1})` with `h = I`; no
/// normalizing constant applied.
pub fn borel_cochain(tuple: &GroupTuple, config: &QuadratureConfig) -> Result<QuadratureResult> {
    let plain = tuple.with_base_metric(CMatrix::identity(tuple.rank()), 0.0)?;
    raw_integral(&plain, config)
}

#[derive(Debug, Clone, Serialize)]
pub struct CocycleDefect {
    /// `Σ_k (−1)^k ch(g_0, …, ĝ_k, …, g_{2r})`
    pub defect: C64,
    /// Sum of the face error estimates.
    pub error_sum: f64,
    pub faces: Vec<QuadratureResult>,
    pub converged: bool,
}

pub fn cocycle_defect(tuple: &GroupTuple, config: &QuadratureConfig) -> Result<CocycleDefect> {
    let r = tuple.weight();
    if tuple.len() != 2 * r + 1 {
        return Err(Error::InvalidArgument(format!(
            "cocycle test at weight {r} needs {} elements, got {}",
            2 * r + 1,
            tuple.len()
        )));
    }
    let faces = (0..tuple.len())
        .map(|k| chern_cochain(&tuple.face(k), config))
        .collect::<Result<Vec<_>>>()?;
    let defect = faces
        .iter()
        .enumerate()
        .map(|(k, f)| if k % 2 == 0 { f.value } else { -f.value })
        .sum();
    Ok(CocycleDefect {
        defect,
        error_sum: faces.iter().map(|f| f.error_estimate).sum(),
        converged: faces.iter().all(|f| f.converged),
        faces,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn mat(seed: u64, n: usize) -> CMatrix {
        let mut s = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(7);
        let mut next = move || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let mut m = CMatrix::from_fn(n, n, |_, _| c(next(), next()));
        m.axpy(c(1.0, 0.0), &CMatrix::identity(n));
        m
    }

    #[test]
    fn prefactors() {
        assert_eq!(chern_prefactor(1), -0.5);
        assert!((chern_prefactor(2) + 1.0 / 12.0).abs() < 1e-16);
        assert!((chern_prefactor(3) + 2.0 / 240.0).abs() < 1e-16);
    }

    #[test]
    fn identical_metrics_give_constant_path() {
        let tuple = GroupTuple::with_identity_metric(2, vec![CMatrix::identity(2); 4]).unwrap();
        let path = MetricPath::new(&tuple).unwrap();
        let t = SimplexPoint::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        assert_eq!(path.metric_at(&t).unwrap(), CMatrix::identity(2));
        assert_eq!(odd_trace_coeff(&path, &t, 3).unwrap(), ZERO);
    }

    #[test]
    fn vertex_and_midpoint() {
        let gs: Vec<CMatrix> = (0..4).map(|k| mat(k, 2)).collect();
        let h = congruence(&mat(11, 2), &CMatrix::identity(2)).unwrap();
        let tuple = GroupTuple::new(2, gs.clone(), h.clone(), 0.0).unwrap();
        let path = MetricPath::new(&tuple).unwrap();
        let at = path.metric_at(&SimplexPoint::vertex(3, 2)).unwrap();
        assert!((&at - &congruence(&gs[2], &h).unwrap()).max_abs() < 1e-15);
        let mid = path
            .metric_at(&SimplexPoint::new(vec![0.5, 0.5, 0.0, 0.0]).unwrap())
            .unwrap();
        let avg =
            (&congruence(&gs[0], &h).unwrap() + &congruence(&gs[1], &h).unwrap()).scale_real(0.5);
        assert!((&mid - &avg).max_abs() < 1e-14);
    }

    #[test]
    fn scalar_log_derivative() {
        let g0 = CMatrix::from_diagonal(&[c(0.7, 0.2)]);
        let g1 = CMatrix::from_diagonal(&[c(-1.3, 0.5)]);
        let tuple = GroupTuple::with_identity_metric(1, vec![g0.clone(), g1.clone()]).unwrap();
        let path = MetricPath::new(&tuple).unwrap();
        let t = SimplexPoint::new(vec![0.3, 0.7]).unwrap();
        let (a0, a1) = (g0[(0, 0)].norm_sqr(), g1[(0, 0)].norm_sqr());
        let want = (a1 - a0) / (0.3 * a0 + 0.7 * a1);
        let got = odd_trace_coeff(&path, &t, 1).unwrap();
        assert!((got - c(want, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn r1_closed_form() {
        let g0 = mat(1, 3);
        let g1 = mat(2, 3);
        let want = g0.det().unwrap().norm().ln() - g1.det().unwrap().norm().ln();
        let tuple = GroupTuple::with_identity_metric(1, vec![g0, g1]).unwrap();
        let r = chern_cochain(&tuple, &QuadratureConfig::default().with_rel_tol(1e-12)).unwrap();
        assert!(r.converged);
        assert!(
            (r.value.re - want).abs() < 1e-10 * want.abs().max(1.0),
            "{} vs {want}",
            r.value
        );
        assert!(r.value.im.abs() < 1e-12);
    }

    #[test]
    fn r1_cocycle_telescopes() {
        let tuple =
            GroupTuple::with_identity_metric(1, (0..3).map(|k| mat(k + 20, 2)).collect()).unwrap();
        let d = cocycle_defect(&tuple, &QuadratureConfig::default().with_rel_tol(1e-12)).unwrap();
        assert!(d.defect.norm() < 1e-10, "{:?}", d.defect);
    }

    #[test]
    fn reality_and_left_invariance() {
        let gs: Vec<CMatrix> = (0..4).map(|k| mat(k + 3, 2)).collect();
        let tuple = GroupTuple::with_identity_metric(2, gs).unwrap();
        let path = MetricPath::new(&tuple).unwrap();
        let t = SimplexPoint::new(vec![0.15, 0.25, 0.35, 0.25]).unwrap();
        let v = odd_trace_coeff(&path, &t, 3).unwrap();
        assert!(v.re.abs() < 1e-11 * v.norm(), "{v}");

        let moved = tuple.left_translate(&mat(99, 2)).unwrap();
        let w = odd_trace_coeff(&MetricPath::new(&moved).unwrap(), &t, 3).unwrap();
        assert!((v - w).norm() < 1e-11 * v.norm());
    }

    #[test]
    fn diagonal_tuple_has_vanishing_form() {
        let gs: Vec<CMatrix> = (0..4)
            .map(|k| CMatrix::from_diagonal(&[c(1.0 + k as f64, 0.3), c(0.5, -0.2 * k as f64)]))
            .collect();
        let tuple = GroupTuple::with_identity_metric(2, gs).unwrap();
        let r = borel_cochain(&tuple, &QuadratureConfig::default()).unwrap();
        assert!(r.value.norm() < 1e-12);
    }

    #[test]
    fn borel_relation() {
        let gs: Vec<CMatrix> = (0..4).map(|k| mat(k + 40, 2)).collect();
        let tuple = GroupTuple::with_identity_metric(2, gs).unwrap();
        let cfg = QuadratureConfig::default();
        let ch = chern_cochain(&tuple, &cfg).unwrap();
        let b = borel_cochain(&tuple, &cfg).unwrap();
        let factor = -2.0 * 6.0 / 1.0;
        assert!((b.value - ch.value * factor).norm() < 1e-11 * b.value.norm());
    }

    #[test]
    fn rejects_bad_tuples() {
        assert!(GroupTuple::with_identity_metric(
            1,
            vec![CMatrix::identity(2), CMatrix::zeros(2, 2)]
        )
        .is_err());
        let v = CVector::new(vec![c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        assert!(matches!(
            GroupTuple::rank_one(2, vec![CMatrix::identity(2); 4], &v, 0.0),
            Err(Error::NotPositiveDefinite { .. })
        ));
        let tuple = GroupTuple::with_identity_metric(2, vec![CMatrix::identity(2); 3]).unwrap();
        assert!(chern_cochain(&tuple, &QuadratureConfig::default()).is_err());
    }

    #[test]
    fn alternating_trace_even_case() {
        // [A, B] has zero trace
        let a = mat(5, 2);
        let b = mat(6, 2);
        assert!(alternating_trace(&[a, b]).norm() < 1e-14);
    }
}
