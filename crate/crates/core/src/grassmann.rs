//! Rank-one degenerations of the metric path: the explicit minor-based
//! integrand, the antisymmetric invariant `f` of four vectors in `C²`,
//! and the dilogarithm presentation built on it.
//!
//! With `h = v v^H` and `v_i = g_i v` the metric path is
//! `h_t = Σ t_i v_i v_i^H`. Its determinant is `Σ_I t_I |det v_I|²` over
//! r-subsets, and `v_a^H adj(h_t) v_b = Σ_J t_J conj(det(v_J, v_a)) det(v_J, v_b)`
//! over (r−1)-subsets, so the trace form becomes a ratio of polynomials in
//! `t` with minor coefficients.

use serde::Serialize;

use crate::dilog::{bloch_wigner, cross_ratio, CrossRatioConvention};
use crate::error::{Error, Result};
use crate::extrapolate;
use crate::linalg::{det2, minor_det, subsets, CMatrix, CVector, IndexSubset, C64, ZERO};
use crate::quad::{
    integrate, integrate_vertex_regularized, QuadratureConfig, QuadratureResult, SimplexPoint,
};
use crate::transgression::{chern_prefactor, odd_trace_coeff, GroupTuple, MetricPath};

/// Relative size below which a maximal minor counts as vanishing.
pub const GENERICITY_THRESHOLD: f64 = 1e-10;

/// `2r` nonzero vectors in `C^r`.
#[derive(Debug, Clone)]
pub struct VectorTuple {
    vectors: Vec<CVector>,
    /// `det(v_J, v_a)` for `J` in lexicographic (r−1)-subsets, row-major.
    bordered: Vec<C64>,
    /// `|det v_I|²` with the matching subsets.
    full: Vec<(IndexSubset, f64)>,
    lower: Vec<IndexSubset>,
}

impl VectorTuple {
    pub fn new(vectors: Vec<CVector>) -> Result<Self> {
        let r = vectors
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty vector tuple".into()))?
            .dim();
        if vectors.len() != 2 * r {
            return Err(Error::Dimension(format!(
                "{} vectors in C^{r}; expected {}",
                vectors.len(),
                2 * r
            )));
        }
        if vectors.iter().any(|v| v.dim() != r) {
            return Err(Error::Dimension("vectors of different dimension".into()));
        }
        if let Some(i) = vectors.iter().position(|v| !v.is_nonzero()) {
            return Err(Error::InvalidArgument(format!("v_{i} is zero")));
        }
        let n = vectors.len();
        let lower = subsets(n, r - 1)?;
        let mut bordered = Vec::with_capacity(lower.len() * n);
        for j in &lower {
            for a in 0..n {
                bordered.push(minor_det(&vectors, j, a)?);
            }
        }
        let full = subsets(n, r)?
            .into_iter()
            .map(|s| {
                let cols: Vec<&CVector> = s.members().iter().map(|&i| &vectors[i]).collect();
                let d = CMatrix::from_columns(&cols)?.det()?;
                Ok((s, d.norm_sqr()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            vectors,
            bordered,
            full,
            lower,
        })
    }

    pub fn weight(&self) -> usize {
        self.vectors[0].dim()
    }

    pub fn vectors(&self) -> &[CVector] {
        &self.vectors
    }

    /// Every maximal minor is above `GENERICITY_THRESHOLD · scale`.
    pub fn is_generic(&self) -> bool {
        let scale = self
            .vectors
            .iter()
            .map(CVector::norm)
            .fold(0.0, f64::max)
            .powi(self.weight() as i32);
        self.full
            .iter()
            .all(|(_, d2)| d2.sqrt() > GENERICITY_THRESHOLD * scale)
    }

    /// Smallest `|det v_I|` over r-subsets.
    pub fn min_minor(&self) -> f64 {
        self.full
            .iter()
            .map(|(_, d2)| d2.sqrt())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn map(&self, g: &CMatrix) -> Result<Self> {
        let vs = self
            .vectors
            .iter()
            .map(|v| g.mul_vec(v))
            .collect::<Result<Vec<_>>>()?;
        Self::new(vs)
    }

    fn bordered(&self, j: usize, a: usize) -> C64 {
        self.bordered[j * self.vectors.len() + a]
    }

    /// `K[a][b] = Σ_J t_J conj(det(v_J, v_a)) det(v_J, v_b)`, i.e.
    /// `v_a^H adj(h_t) v_b`.
    fn kernel(&self, t: &[f64]) -> Vec<C64> {
        let n = self.vectors.len();
        let mut k = vec![ZERO; n * n];
        for (j, sub) in self.lower.iter().enumerate() {
            let tj = sub.product(t);
            if tj == 0.0 {
                continue;
            }
            for a in 0..n {
                let ca = self.bordered(j, a).conj() * tj;
                if ca == ZERO {
                    continue;
                }
                for b in 0..n {
                    k[a * n + b] += ca * self.bordered(j, b);
                }
            }
        }
        k
    }
}

fn check_point(tuple: &VectorTuple, t: &SimplexPoint) -> Result<()> {
    if t.dim() + 1 != tuple.vectors.len() {
        return Err(Error::Dimension(format!(
            "point in Δ^{} for {} vectors",
            t.dim(),
            tuple.vectors.len()
        )));
    }
    Ok(())
}

/// `Σ_{|I|=r} t_I |det v_I|²`, which equals `det h_t`.
pub fn denominator(tuple: &VectorTuple, t: &SimplexPoint) -> Result<f64> {
    check_point(tuple, t)?;
    Ok(tuple
        .full
        .iter()
        .map(|(s, d2)| s.product(t.coords()) * d2)
        .sum())
}

/// Coefficient of `dt_1 ∧ … ∧ dt_{2r−1}` in the numerator
/// `Σ Π_j t_{I_j} dt_{i_j} conj(det(v_{I_j}, v_{i_j})) det(v_{I_j}, v_{i_{j+1}})`
/// with cyclic closure `i_{2r} = i_1` and `dt_0 = −Σ_{l≥1} dt_l`.
///
/// Only injective index sequences survive the wedge. Such a sequence omits
/// exactly one index `k`; with `dt_0 = −Σ dt_l` its wedge is `sgn` of the
/// sequence with `0` replaced by `k`, negated when `0` occurs.
pub fn numerator_coeff(tuple: &VectorTuple, t: &SimplexPoint) -> Result<C64> {
    check_point(tuple, t)?;
    let n = tuple.vectors.len();
    let k = tuple.kernel(t.coords());
    let mut total = ZERO;
    let mut order = Vec::with_capacity(n);
    for omitted in 0..n {
        // used indices sorted by free-coordinate label, 0 being relabelled
        // as `omitted`
        order.clear();
        order.extend((1..n).filter(|&i| i != omitted));
        if omitted > 0 {
            order.insert(omitted - 1, 0);
        }
        let sign0 = if omitted == 0 { 1.0 } else { -1.0 };
        total += walk_sequences(&k, n, &order) * sign0;
    }
    Ok(total)
}

/// Sum over orderings `s` of `order` of `sgn(s) · Π K[s_j][s_{j+1}]`
/// (cyclic), the sign taken relative to `order`.
fn walk_sequences(k: &[C64], n: usize, order: &[usize]) -> C64 {
    // odd length: cyclic shifts are even and the product is cyclic, so pin
    // the first element in front and multiply by m
    let m = order.len();
    let first = order[0];
    // bit p of the mask marks `order[p]` as still unused
    let remaining: u64 = ((1u64 << m) - 1) & !1;
    let mut sub = ZERO;
    recurse(
        k,
        n,
        order,
        first,
        first,
        remaining,
        C64::new(1.0, 0.0),
        1.0,
        &mut sub,
    );
    sub * m as f64
}

#[allow(clippy::too_many_arguments)]
fn recurse(
    k: &[C64],
    n: usize,
    order: &[usize],
    first: usize,
    last: usize,
    remaining: u64,
    prod: C64,
    sign: f64,
    acc: &mut C64,
) {
    if remaining == 0 {
        *acc += prod * k[last * n + first] * sign;
        return;
    }
    let mut bits = remaining;
    let mut rank = 0;
    while bits != 0 {
        let p = bits.trailing_zeros() as usize;
        bits &= bits - 1;
        let next = order[p];
        // removing the rank-th remaining element permutes by a cycle of parity rank
        let s = if rank % 2 == 0 { sign } else { -sign };
        recurse(
            k,
            n,
            order,
            first,
            next,
            remaining & !(1u64 << p),
            prod * k[last * n + next],
            s,
            acc,
        );
        rank += 1;
    }
}

/// `numerator_coeff / denominator^{2r−1}`.
pub fn integrand(tuple: &VectorTuple, t: &SimplexPoint) -> Result<C64> {
    let den = denominator(tuple, t)?;
    let num = numerator_coeff(tuple, t)?;
    Ok(num / den.powi(2 * tuple.weight() as i32 - 1))
}

/// The cochain evaluated through the minor-based integrand.
pub fn grassmann_cochain(
    tuple: &VectorTuple,
    config: &QuadratureConfig,
) -> Result<QuadratureResult> {
    if !tuple.is_generic() {
        return Err(Error::Degenerate("vector tuple is not generic".into()));
    }
    let m = 2 * tuple.weight() - 1;
    // for r ≤ 2 the denominator vanishes only at the vertices
    let raw = if m <= 4 {
        integrate_vertex_regularized(|t| integrand(tuple, t), m, config)?
    } else {
        integrate(|t| integrand(tuple, t), m, config)?
    };
    Ok(raw.scaled(C64::new(chern_prefactor(tuple.weight()), 0.0)))
}

fn check_four(v: &[CVector]) -> Result<()> {
    if v.len() != 4 || v.iter().any(|x| x.dim() != 2) {
        return Err(Error::Dimension("expected four vectors in C^2".into()));
    }
    Ok(())
}

/// `Im(det(v0,v1) det(v2,v3) conj(det(v0,v3)) conj(det(v1,v2)))`
pub fn f_invariant(v: &[CVector]) -> Result<f64> {
    check_four(v)?;
    let p = det2(&v[0], &v[1])
        * det2(&v[2], &v[3])
        * det2(&v[0], &v[3]).conj()
        * det2(&v[1], &v[2]).conj();
    Ok(p.im)
}

/// `Σ_{i≠j} t_i t_j |det(v_i, v_j)|²` over ordered pairs.
pub fn pair_denominator(v: &[CVector], t: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            if i != j {
                s += t[i] * t[j] * det2(&v[i], &v[j]).norm_sqr();
            }
        }
    }
    s
}

/// `12 i f(v) ∫_{Δ³} dt / (Σ_{i≠j} t_i t_j |det(v_i,v_j)|²)²`.
pub fn dilog_presentation(v: &[CVector], config: &QuadratureConfig) -> Result<QuadratureResult> {
    check_four(v)?;
    let mut all_zero = true;
    for i in 0..4 {
        for j in i + 1..4 {
            all_zero &= det2(&v[i], &v[j]) == ZERO;
        }
    }
    if all_zero {
        return Err(Error::Degenerate("all pairwise determinants vanish".into()));
    }
    let f = f_invariant(v)?;
    if f == 0.0 {
        return Ok(QuadratureResult {
            value: ZERO,
            error_estimate: 0.0,
            evaluations: 0,
            converged: true,
        });
    }
    // The value is invariant under v_i ↦ λ_i v_i, and unit vectors keep
    // the weights balanced for the quadrature.
    let v: Vec<CVector> = v
        .iter()
        .map(|x| x.scale(C64::new(1.0 / x.norm(), 0.0)))
        .collect();
    let f = f_invariant(&v)?;
    // weights w_ij = |det(v_i, v_j)|², ordered pairs counted twice
    let mut w = [[0.0; 4]; 4];
    for (i, row) in w.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = det2(&v[i], &v[j]).norm_sqr();
        }
    }
    let raw = integrate_vertex_regularized(
        |p| {
            let t = p.coords();
            let mut s = 0.0;
            for i in 0..4 {
                for j in i + 1..4 {
                    s += 2.0 * t[i] * t[j] * w[i][j];
                }
            }
            Ok(C64::new(1.0 / (s * s), 0.0))
        },
        3,
        config,
    )?;
    Ok(raw.scaled(C64::new(0.0, 12.0 * f)))
}

/// The ratio `presentation / (i·D(cross_ratio))` for one convention over a
/// batch of quadruples.
#[derive(Debug, Clone, Serialize)]
pub struct ConventionFit {
    pub convention: CrossRatioConvention,
    pub ratios: Vec<C64>,
    /// Mean of the real parts.
    pub constant: f64,
    /// `(max − min) / |constant|` of the real parts, together with the
    /// largest imaginary part relative to `|constant|`.
    pub spread: f64,
}

/// Ratios of presentation values to `i·D(cross_ratio)` under every
/// cross-ratio convention. `samples` pairs each quadruple with its
/// presentation value.
pub fn sweep_conventions(samples: &[(Vec<CVector>, C64)]) -> Result<Vec<ConventionFit>> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument(
            "the sweep needs at least one sample".into(),
        ));
    }
    CrossRatioConvention::ALL
        .into_iter()
        .map(|conv| {
            let ratios = samples
                .iter()
                .map(|(v, value)| {
                    let d = bloch_wigner(cross_ratio(v, conv)?);
                    if d == 0.0 {
                        return Err(Error::Degenerate("D(cross-ratio) vanishes".into()));
                    }
                    Ok(value / C64::new(0.0, d))
                })
                .collect::<Result<Vec<_>>>()?;
            let re: Vec<f64> = ratios.iter().map(|z| z.re).collect();
            let constant = re.iter().sum::<f64>() / re.len() as f64;
            let hi = re.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lo = re.iter().cloned().fold(f64::INFINITY, f64::min);
            let im = ratios.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
            let spread = (hi - lo).max(im) / constant.abs();
            Ok(ConventionFit {
                convention: conv,
                ratios,
                constant,
                spread,
            })
        })
        .collect()
}

/// Among fits with spread below `max_spread` and a positive constant, the
/// one whose constant is closest to 1; ties go to the earlier convention.
pub fn select_convention(fits: &[ConventionFit], max_spread: f64) -> Option<&ConventionFit> {
    // constants that agree within the spread tolerance count as ties
    fits.iter()
        .filter(|f| f.spread < max_spread && f.constant > 0.0)
        .fold(None, |best: Option<&ConventionFit>, f| match best {
            Some(b)
                if (b.constant - 1.0).abs()
                    <= (f.constant - 1.0).abs() + max_spread * f.constant =>
            {
                Some(b)
            }
            _ => Some(f),
        })
}

/// Alternating sum `Σ_i (−1)^i P(v_0, …, v̂_i, …, v_4)` of presentations
/// over the five faces of a configuration of five points of `P¹`.
#[derive(Debug, Clone, Serialize)]
pub struct FiveTermSum {
    pub sum: C64,
    pub error_sum: f64,
    pub faces: Vec<QuadratureResult>,
    pub converged: bool,
}

pub fn five_term_presentation(
    points: &[CVector],
    config: &QuadratureConfig,
) -> Result<FiveTermSum> {
    if points.len() != 5 {
        return Err(Error::InvalidArgument(format!(
            "the five-term sum needs five vectors, got {}",
            points.len()
        )));
    }
    let faces = (0..5)
        .map(|k| {
            let face: Vec<CVector> = (0..5)
                .filter(|&i| i != k)
                .map(|i| points[i].clone())
                .collect();
            dilog_presentation(&face, config)
        })
        .collect::<Result<Vec<_>>>()?;
    let sum = faces
        .iter()
        .enumerate()
        .map(|(k, f)| if k % 2 == 0 { f.value } else { -f.value })
        .sum();
    Ok(FiveTermSum {
        sum,
        error_sum: faces.iter().map(|f| f.error_estimate).sum(),
        converged: faces.iter().all(|f| f.converged),
        faces,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceRow {
    pub epsilon: f64,
    pub trace_coeff: Option<C64>,
    pub relative_difference: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceReport {
    pub point: Vec<f64>,
    /// `numerator_coeff / denominator^{2r−1}`
    pub minor_side: C64,
    pub rows: Vec<EquivalenceRow>,
    pub extrapolated: Option<C64>,
    pub extrapolated_relative_difference: Option<f64>,
}

fn rel_diff(a: C64, b: C64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

/// Compares the regularized trace form for `h = v v^H + εI` along the
/// ε-ladder with the minor-based integrand for `v_i = g_i v`.
pub fn integrand_equivalence(
    elements: &[CMatrix],
    v: &CVector,
    t: &SimplexPoint,
    eps_ladder: &[f64],
) -> Result<EquivalenceReport> {
    let r = v.dim();
    let vectors = elements
        .iter()
        .map(|g| g.mul_vec(v))
        .collect::<Result<Vec<_>>>()?;
    let tuple = VectorTuple::new(vectors)?;
    let den = denominator(&tuple, t)?;
    let minor_side = if den == 0.0 && numerator_coeff(&tuple, t)? == ZERO {
        ZERO
    } else {
        integrand(&tuple, t)?
    };
    let m = 2 * r - 1;
    let mut rows = Vec::new();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &eps in eps_ladder {
        let value = GroupTuple::rank_one(r, elements.to_vec(), v, eps)
            .and_then(|g| MetricPath::new(&g))
            .and_then(|path| odd_trace_coeff(&path, t, m));
        match value {
            Ok(c) => {
                xs.push(eps);
                ys.push(c);
                rows.push(EquivalenceRow {
                    epsilon: eps,
                    trace_coeff: Some(c),
                    relative_difference: Some(rel_diff(c, minor_side)),
                    error: None,
                });
            }
            Err(e) => rows.push(EquivalenceRow {
                epsilon: eps,
                trace_coeff: None,
                relative_difference: None,
                error: Some(e.to_string()),
            }),
        }
    }
    let extrapolated = (!xs.is_empty()).then(|| extrapolate::to_zero(&xs, &ys));
    Ok(EquivalenceReport {
        point: t.coords().to_vec(),
        minor_side,
        rows,
        extrapolated,
        extrapolated_relative_difference: extrapolated.map(|x| rel_diff(x, minor_side)),
    })
}

/// Invertible matrices `g_i` with `g_i e_1 = v_i`: first column `v_i`, the
/// remaining columns standard basis vectors avoiding the largest entry of
/// `v_i`.
pub fn lift_to_group(tuple: &VectorTuple) -> (Vec<CMatrix>, CVector) {
    let r = tuple.weight();
    let gs = tuple
        .vectors
        .iter()
        .map(|v| {
            let pivot = (0..r)
                .max_by(|&a, &b| v[a].norm().total_cmp(&v[b].norm()))
                .unwrap();
            let others: Vec<usize> = (0..r).filter(|&i| i != pivot).collect();
            CMatrix::from_fn(r, r, |i, j| {
                if j == 0 {
                    v[i]
                } else if i == others[j - 1] {
                    C64::new(1.0, 0.0)
                } else {
                    ZERO
                }
            })
        })
        .collect();
    (gs, CVector::basis(r, 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn vec2(a: C64, b: C64) -> CVector {
        CVector::new(vec![a, b]).unwrap()
    }

    fn e(i: usize) -> CVector {
        CVector::basis(2, i)
    }

    #[test]
    fn denominator_examples() {
        let tuple = VectorTuple::new(vec![e(0), e(1), e(0), e(1)]).unwrap();
        let d = denominator(&tuple, &SimplexPoint::barycenter(3)).unwrap();
        assert!((d - 0.25).abs() < 1e-15);
        assert_eq!(
            denominator(&tuple, &SimplexPoint::vertex(3, 2)).unwrap(),
            0.0
        );

        let v = vec![
            vec2(c(1.0, 0.3), c(0.2, -1.0)),
            e(0),
            e(1),
            vec2(c(0.5, 0.5), c(-1.0, 0.1)),
        ];
        let t = SimplexPoint::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let base = denominator(&VectorTuple::new(v.clone()).unwrap(), &t).unwrap();
        let lambda = c(0.6, -1.1);
        let scaled: Vec<CVector> = v.iter().map(|x| x.scale(lambda)).collect();
        let d = denominator(&VectorTuple::new(scaled).unwrap(), &t).unwrap();
        assert!((d - base * lambda.norm().powi(4)).abs() < 1e-13 * d);
    }

    #[test]
    fn numerator_vanishes_for_equal_vectors() {
        let v = vec2(c(0.3, 0.1), c(-0.7, 0.4));
        let tuple = VectorTuple::new(vec![v.clone(), v.clone(), v.clone(), v]).unwrap();
        assert_eq!(
            numerator_coeff(&tuple, &SimplexPoint::barycenter(3)).unwrap(),
            ZERO
        );
    }

    #[test]
    fn f_invariant_examples() {
        let v = vec![e(0), e(1), &e(0) + &e(1), &e(0) + &e(1).scale(c(0.0, 1.0))];
        assert!((f_invariant(&v).unwrap() + 1.0).abs() < 1e-15);
        let mut swapped = v.clone();
        swapped.swap(0, 1);
        assert_eq!(f_invariant(&swapped).unwrap(), -f_invariant(&v).unwrap());
        let rep = vec![v[0].clone(), v[0].clone(), v[2].clone(), v[3].clone()];
        assert_eq!(f_invariant(&rep).unwrap(), 0.0);
    }

    #[test]
    fn presentation_zero_for_proportional_pair() {
        let v = vec![e(0), e(0).scale(c(0.0, 3.0)), e(1), &e(0) + &e(1)];
        let r = dilog_presentation(&v, &QuadratureConfig::default()).unwrap();
        assert_eq!(r.value, ZERO);
        let bad = vec![e(0), e(0), e(0), e(0)];
        assert!(dilog_presentation(&bad, &QuadratureConfig::default()).is_err());
    }

    #[test]
    fn lift_maps_e1_to_vectors() {
        let v = vec![
            vec2(c(0.0, 0.0), c(1.0, 0.0)),
            e(0),
            vec2(c(2.0, 1.0), c(0.1, 0.0)),
            vec2(c(0.3, 0.3), c(0.4, -1.0)),
        ];
        let tuple = VectorTuple::new(v.clone()).unwrap();
        let (gs, base) = lift_to_group(&tuple);
        for (g, vi) in gs.iter().zip(&v) {
            assert!(g.det().unwrap().norm() > 0.0);
            assert_eq!(&g.mul_vec(&base).unwrap(), vi);
        }
    }

    #[test]
    fn equivalence_trivial_tuple() {
        let gs = vec![CMatrix::identity(2); 4];
        let rep =
            integrand_equivalence(&gs, &e(0), &SimplexPoint::barycenter(3), &[1e-2, 1e-3]).unwrap();
        assert_eq!(rep.minor_side, ZERO);
        assert!(rep.extrapolated.unwrap().norm() < 1e-14);
    }
}
