//! Adaptive cubature over the standard n-simplex.
//!
//! The base rule is a Grundmann–Möller rule of odd degree `2s+1`; its
//! degree `2s−1` companion uses a subset of the same nodes, so every leaf
//! yields an embedded error estimate for free. Leaves are refined by
//! Freudenthal (edgewise) subdivision into `2^n` children of equal volume.
//!
//! Points are barycentric, `t = (t_0, …, t_n)`. The measure is Lebesgue
//! measure `dt_1 … dt_n` on the free coordinates with `t_0 = 1 − Σ t_i`,
//! so `∫ 1 = 1/n!`.

use std::cmp::Ordering;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::C64;

pub const MAX_DIM: usize = 5;

/// Extra subdivision levels allowed for leaves touching a vertex of the
/// original simplex.
pub const VERTEX_EXTRA_DEPTH: u32 = 10;

/// A point of the standard simplex in barycentric coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexPoint {
    t: Vec<f64>,
}

impl SimplexPoint {
    pub fn new(t: Vec<f64>) -> Result<Self> {
        if t.len() < 2 {
            return Err(Error::Dimension(
                "a simplex point needs at least two coordinates".into(),
            ));
        }
        if t.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "negative barycentric coordinate in {t:?}"
            )));
        }
        let sum: f64 = t.iter().sum();
        if (sum - 1.0).abs() > 1e-14 * t.len() as f64 {
            return Err(Error::InvalidArgument(format!(
                "barycentric coordinates sum to {sum}, not 1"
            )));
        }
        Ok(Self { t })
    }

    /// Builds the point from the free coordinates `(t_1, …, t_n)`.
    pub fn from_free(free: &[f64]) -> Result<Self> {
        let t0 = 1.0 - free.iter().sum::<f64>();
        let mut t = Vec::with_capacity(free.len() + 1);
        t.push(t0.max(0.0));
        t.extend_from_slice(free);
        Self::new(t)
    }

    pub fn barycenter(n: usize) -> Self {
        Self {
            t: vec![1.0 / (n + 1) as f64; n + 1],
        }
    }

    pub fn vertex(n: usize, k: usize) -> Self {
        let mut t = vec![0.0; n + 1];
        t[k] = 1.0;
        Self { t }
    }

    pub(crate) fn unchecked(t: Vec<f64>) -> Self {
        Self { t }
    }

    /// Simplex dimension `n`.
    pub fn dim(&self) -> usize {
        self.t.len() - 1
    }

    pub fn coords(&self) -> &[f64] {
        &self.t
    }

    pub fn free(&self) -> &[f64] {
        &self.t[1..]
    }

    pub fn is_interior(&self) -> bool {
        self.t.iter().all(|&x| x > 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_depth: u32,
    pub rule_degree: usize,
    /// Hard cap on integrand evaluations.
    pub max_evaluations: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-13,
            max_depth: 24,
            rule_degree: 7,
            max_evaluations: 20_000_000,
        }
    }
}

impl QuadratureConfig {
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return Err(Error::InvalidArgument("tolerances must be positive".into()));
        }
        if self.max_depth > 40 {
            return Err(Error::InvalidArgument(
                "max_depth must not exceed 40".into(),
            ));
        }
        if self.rule_degree < 3 || self.rule_degree > 9 || self.rule_degree.is_multiple_of(2) {
            return Err(Error::Unsupported(format!(
                "adaptive rule degree {} (odd 3..=9 supported)",
                self.rule_degree
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: C64,
    #[serde(rename = "error")]
    pub error_estimate: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl QuadratureResult {
    pub fn scaled(self, s: C64) -> Self {
        Self {
            value: self.value * s,
            error_estimate: self.error_estimate * s.norm(),
            ..self
        }
    }
}

/// A Grundmann–Möller rule together with its embedded lower-degree companion.
#[derive(Debug, Clone)]
pub struct EmbeddedRule {
    pub n: usize,
    pub degree: usize,
    /// Barycentric nodes.
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    /// Weights of the degree−2 rule on the same nodes (zero where unused).
    pub lower_weights: Vec<f64>,
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// All compositions of `total` into `parts` nonnegative integers, in
/// lexicographic order.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in (0..=total).rev() {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn gm_layers(n: usize, s: usize) -> Vec<(f64, Vec<Vec<f64>>)> {
    let d = 2 * s + 1;
    (0..=s)
        .map(|i| {
            let denom = (d + n - 2 * i) as f64;
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            let w = sign * 2f64.powi(-2 * s as i32) * denom.powi(d as i32)
                / (factorial(i) * factorial(d + n - i));
            let pts = compositions(s - i, n + 1)
                .into_iter()
                .map(|beta| beta.iter().map(|&b| (2 * b + 1) as f64 / denom).collect())
                .collect();
            (w, pts)
        })
        .collect()
}

fn check_rule_args(n: usize, degree: usize) -> Result<()> {
    if n == 0 || n > MAX_DIM {
        return Err(Error::Unsupported(format!(
            "simplex dimension {n} (1..={MAX_DIM} supported)"
        )));
    }
    if degree.is_multiple_of(2) || degree > 9 {
        return Err(Error::Unsupported(format!(
            "rule degree {degree} (odd, at most 9)"
        )));
    }
    Ok(())
}

/// Grundmann–Möller rule of the given odd degree on the unit n-simplex.
pub fn base_rule(n: usize, degree: usize) -> Result<Vec<(SimplexPoint, f64)>> {
    check_rule_args(n, degree)?;
    let s = (degree - 1) / 2;
    Ok(gm_layers(n, s)
        .into_iter()
        .flat_map(|(w, pts)| {
            pts.into_iter()
                .map(move |p| (SimplexPoint::unchecked(p), w))
        })
        .collect())
}

pub fn embedded_rule(n: usize, degree: usize) -> Result<EmbeddedRule> {
    check_rule_args(n, degree)?;
    if degree < 3 {
        return Err(Error::Unsupported(
            "an embedded rule needs degree ≥ 3".into(),
        ));
    }
    let s = (degree - 1) / 2;
    let high = gm_layers(n, s);
    let low = gm_layers(n, s - 1);
    let mut rule = EmbeddedRule {
        n,
        degree,
        nodes: Vec::new(),
        weights: Vec::new(),
        lower_weights: Vec::new(),
    };
    // layer i of the degree-(2s−1) rule sits on layer i+1 of the degree-(2s+1) rule
    for (i, (w, pts)) in high.into_iter().enumerate() {
        let lw = if i == 0 { 0.0 } else { low[i - 1].0 };
        for p in pts {
            rule.nodes.push(p);
            rule.weights.push(w);
            rule.lower_weights.push(lw);
        }
    }
    Ok(rule)
}

/// A subsimplex given by its vertices in barycentric coordinates of the
/// original simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct SubSimplex {
    pub vertices: Vec<Vec<f64>>,
    pub depth: u32,
}

impl SubSimplex {
    pub fn standard(n: usize) -> Self {
        Self {
            vertices: (0..=n).map(|k| SimplexPoint::vertex(n, k).t).collect(),
            depth: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    /// Lebesgue volume in free coordinates.
    pub fn volume(&self) -> f64 {
        let n = self.dim();
        let base = &self.vertices[0];
        let mut m: Vec<Vec<f64>> = self.vertices[1..]
            .iter()
            .map(|v| (1..=n).map(|i| v[i] - base[i]).collect())
            .collect();
        det_real(&mut m).abs() / factorial(n)
    }

    pub fn touches_original_vertex(&self) -> bool {
        self.vertices.iter().any(|v| v.contains(&1.0))
    }

    pub fn map_point(&self, lambda: &[f64]) -> Vec<f64> {
        let dim = self.vertices[0].len();
        let mut t = vec![0.0; dim];
        for (l, v) in lambda.iter().zip(&self.vertices) {
            for (ti, vi) in t.iter_mut().zip(v) {
                *ti += l * vi;
            }
        }
        t
    }
}

fn det_real(m: &mut [Vec<f64>]) -> f64 {
    let n = m.len();
    let mut det = 1.0;
    for c in 0..n {
        let p = (c..n)
            .max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs()))
            .unwrap();
        if m[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= m[c][c];
        for r in c + 1..n {
            let f = m[r][c] / m[c][c];
            for k in c..n {
                m[r][k] -= f * m[c][k];
            }
        }
    }
    det
}

/// Children of the Freudenthal subdivision of the path simplex
/// `{1 ≥ y_1 ≥ … ≥ y_n ≥ 0}`, as barycentric weights over the parent
/// vertices.
fn freudenthal_pattern(n: usize) -> &'static [Vec<Vec<f64>>] {
    static PATTERNS: OnceLock<Vec<Vec<Vec<Vec<f64>>>>> = OnceLock::new();
    let all = PATTERNS.get_or_init(|| (0..=MAX_DIM).map(build_pattern).collect());
    &all[n]
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

fn build_pattern(n: usize) -> Vec<Vec<Vec<f64>>> {
    if n == 0 {
        return Vec::new();
    }
    let mut children = Vec::new();
    for corner in 0..(1u32 << n) {
        for perm in permutations(n) {
            let mut y: Vec<u32> = (0..n).map(|i| (corner >> i) & 1).collect();
            let mut path = vec![y.clone()];
            for &axis in &perm {
                y[axis] += 1;
                path.push(y.clone());
            }
            let inside = path
                .iter()
                .all(|p| p[0] <= 2 && p.windows(2).all(|w| w[0] >= w[1]));
            if !inside {
                continue;
            }
            let child = path
                .iter()
                .map(|p| {
                    let mut w = vec![0.0; n + 1];
                    w[0] = 1.0 - p[0] as f64 / 2.0;
                    for j in 1..=n {
                        let next = if j < n { p[j] } else { 0 };
                        w[j] = (p[j - 1] as f64 - next as f64) / 2.0;
                    }
                    w
                })
                .collect();
            children.push(child);
        }
    }
    children
}

/// Edgewise (Freudenthal) subdivision into `2^n` children of equal volume.
pub fn subdivide(s: &SubSimplex) -> Vec<SubSimplex> {
    freudenthal_pattern(s.dim())
        .iter()
        .map(|child| SubSimplex {
            vertices: child.iter().map(|w| s.map_point(w)).collect(),
            depth: s.depth + 1,
        })
        .collect()
}

/// Neumaier-compensated complex sum.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    re: (f64, f64),
    im: (f64, f64),
}

fn neumaier(acc: &mut (f64, f64), x: f64) {
    let (s, c) = acc;
    let t = *s + x;
    if s.abs() >= x.abs() {
        *c += (*s - t) + x;
    } else {
        *c += (x - t) + *s;
    }
    *s = t;
}

impl CompensatedSum {
    pub fn add(&mut self, z: C64) {
        neumaier(&mut self.re, z.re);
        neumaier(&mut self.im, z.im);
    }

    pub fn value(&self) -> C64 {
        C64::new(self.re.0 + self.re.1, self.im.0 + self.im.1)
    }
}

impl FromIterator<C64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = C64>>(iter: I) -> Self {
        let mut s = Self::default();
        for z in iter {
            s.add(z);
        }
        s
    }
}

#[derive(Debug, Clone)]
struct Leaf {
    simplex: SubSimplex,
    scale: f64,
    value: C64,
    error: f64,
    refinable: bool,
}

fn eval_leaf<F>(
    f: &F,
    rule: &EmbeddedRule,
    simplex: SubSimplex,
    scale: f64,
    limit: u32,
) -> Result<Leaf>
where
    F: Fn(&SimplexPoint) -> Result<C64> + Sync,
{
    let mut high = CompensatedSum::default();
    let mut low = CompensatedSum::default();
    for ((node, &w), &lw) in rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .zip(&rule.lower_weights)
    {
        let p = SimplexPoint::unchecked(simplex.map_point(node));
        let v = f(&p)?;
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::NonFinite { point: p.t });
        }
        high.add(v * w);
        if lw != 0.0 {
            low.add(v * lw);
        }
    }
    let value = high.value() * scale;
    let error = (high.value() - low.value()).norm() * scale;
    let extra = if simplex.touches_original_vertex() {
        VERTEX_EXTRA_DEPTH
    } else {
        0
    };
    let refinable = simplex.depth < limit + extra;
    Ok(Leaf {
        simplex,
        scale,
        value,
        error,
        refinable,
    })
}

/// Adaptive integral of `f` over the standard `n`-simplex.
///
/// Refinement is greedy on the leaf error estimates and independent of the
/// tolerances, so results are reproducible and tightening a tolerance only
/// continues the same refinement sequence. Leaves are summed in creation
/// order with compensated summation; the thread count never changes the
/// result.
pub fn integrate<F>(f: F, n: usize, config: &QuadratureConfig) -> Result<QuadratureResult>
where
    F: Fn(&SimplexPoint) -> Result<C64> + Sync,
{
    config.validate()?;
    let rule = embedded_rule(n, config.rule_degree)?;
    let per_leaf = rule.nodes.len();
    let children_per_split = 1usize << n;
    let child_scale = 1.0 / children_per_split as f64;

    let mut leaves = vec![eval_leaf(
        &f,
        &rule,
        SubSimplex::standard(n),
        1.0,
        config.max_depth,
    )?];
    let mut evaluations = per_leaf;

    loop {
        let value: CompensatedSum = leaves.iter().map(|l| l.value).collect();
        let value = value.value();
        let error: f64 = leaves.iter().map(|l| l.error).sum();
        let tol = config.abs_tol.max(config.rel_tol * value.norm());
        let result = |converged| QuadratureResult {
            value,
            error_estimate: error,
            evaluations,
            converged,
        };
        if error <= tol {
            return Ok(result(true));
        }
        let stuck: f64 = leaves
            .iter()
            .filter(|l| !l.refinable)
            .map(|l| l.error)
            .sum();
        if stuck > tol {
            return Ok(result(false));
        }
        let max_err = leaves
            .iter()
            .filter(|l| l.refinable)
            .map(|l| l.error)
            .fold(0.0, f64::max);
        if max_err == 0.0 {
            return Ok(result(false));
        }
        let threshold = 0.25 * max_err;
        let mut selected: Vec<usize> = (0..leaves.len())
            .filter(|&i| leaves[i].refinable && leaves[i].error >= threshold)
            .collect();
        // keep rounds bounded; ties broken by position for determinism
        const MAX_SPLITS_PER_ROUND: usize = 4096;
        if selected.len() > MAX_SPLITS_PER_ROUND {
            selected.sort_by(|&a, &b| {
                leaves[b]
                    .error
                    .partial_cmp(&leaves[a].error)
                    .unwrap_or(Ordering::Equal)
                    .then(a.cmp(&b))
            });
            selected.truncate(MAX_SPLITS_PER_ROUND);
            selected.sort_unstable();
        }
        let cost = selected.len() * children_per_split * per_leaf;
        if evaluations + cost > config.max_evaluations {
            return Ok(result(false));
        }
        evaluations += cost;

        let parents: Vec<Leaf> = selected
            .iter()
            .rev()
            .map(|&i| leaves.swap_remove(i))
            .collect();
        // swap_remove scrambles the tail; restore a canonical order
        let jobs: Vec<(SubSimplex, f64)> = parents
            .iter()
            .rev()
            .flat_map(|p| {
                subdivide(&p.simplex)
                    .into_iter()
                    .map(move |c| (c, p.scale * child_scale))
            })
            .collect();
        let children: Vec<Result<Leaf>> = jobs
            .into_par_iter()
            .map(|(s, scale)| eval_leaf(&f, &rule, s, scale, config.max_depth))
            .collect();
        for c in children {
            leaves.push(c?);
        }
    }
}

/// [`integrate`] for integrands that cannot fail.
pub fn integrate_fn<F>(f: F, n: usize, config: &QuadratureConfig) -> Result<QuadratureResult>
where
    F: Fn(&SimplexPoint) -> C64 + Sync,
{
    integrate(|p| Ok(f(p)), n, config)
}

/// One piece of the vertex-regularizing decomposition: a cell of the
/// barycentric subdivision (original vertex first) and a simplex of the
/// prism `[0,1] × Δ^{n−1}` in coordinates `(ρ, s_2, …, s_n)`.
struct VertexPiece {
    cell: Vec<Vec<f64>>,
    prism: Vec<Vec<f64>>,
}

fn permutations_of(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations_of(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn vertex_pieces(n: usize) -> Vec<VertexPiece> {
    // staircase triangulation of the prism; vertex (i, k) is ρ = i with
    // s = e_k, and e_1 has free coordinates 0
    let prism_vertex = |i: usize, k: usize| {
        let mut q = vec![0.0; n];
        q[0] = i as f64;
        if k >= 2 {
            q[k - 1] = 1.0;
        }
        q
    };
    let prisms: Vec<Vec<Vec<f64>>> = (1..=n)
        .map(|j| {
            let mut verts: Vec<Vec<f64>> = (1..=j).map(|k| prism_vertex(0, k)).collect();
            verts.extend((j..=n).map(|k| prism_vertex(1, k)));
            verts
        })
        .collect();
    let mut pieces = Vec::new();
    for sigma in permutations_of(n + 1) {
        let cell: Vec<Vec<f64>> = (0..=n)
            .map(|k| {
                let mut b = vec![0.0; n + 1];
                for &i in &sigma[..=k] {
                    b[i] = 1.0 / (k + 1) as f64;
                }
                b
            })
            .collect();
        for prism in &prisms {
            pieces.push(VertexPiece {
                cell: cell.clone(),
                prism: prism.clone(),
            });
        }
    }
    pieces
}

/// [`integrate`] for integrands with singularities of order at most
/// `|t − e_i|^{1−n}` at the simplex vertices and smooth elsewhere.
///
/// Each cell of the barycentric subdivision contains one original vertex;
/// polar (Duffy) coordinates `t = (1−ρ) e_i + ρ y` centred there turn the
/// measure into `ρ^{n−1} dρ dy`, which cancels the singularity. The prisms
/// `[0,1] × Δ^{n−1}` are split into `n` simplices, and the sum over all
/// `n (n+1)!` pieces is integrated as one smooth function on `Δ^n`.
pub fn integrate_vertex_regularized<F>(
    f: F,
    n: usize,
    config: &QuadratureConfig,
) -> Result<QuadratureResult>
where
    F: Fn(&SimplexPoint) -> Result<C64> + Sync,
{
    if !(1..=4).contains(&n) {
        return Err(Error::Unsupported(format!(
            "vertex-regularized quadrature in dimension {n} (1..=4 supported)"
        )));
    }
    let pieces = vertex_pieces(n);
    // every cell has n!·volume 1/(n+1)! and every prism simplex unit Jacobian
    let cell_jacobian = 1.0 / (1..=n + 1).map(|i| i as f64).product::<f64>();
    let g = |x: &SimplexPoint| -> Result<C64> {
        let lambda = x.coords();
        let mut total = C64::new(0.0, 0.0);
        let mut q = vec![0.0; n];
        let mut t = vec![0.0; n + 1];
        for piece in &pieces {
            q.iter_mut().for_each(|v| *v = 0.0);
            for (l, vert) in lambda.iter().zip(&piece.prism) {
                for (qi, vi) in q.iter_mut().zip(vert) {
                    *qi += l * vi;
                }
            }
            let rho = q[0];
            let s1 = 1.0 - q[1..].iter().sum::<f64>();
            for (i, ti) in t.iter_mut().enumerate() {
                let mut y = s1 * piece.cell[1][i];
                for k in 2..=n {
                    y += q[k - 1] * piece.cell[k][i];
                }
                *ti = (1.0 - rho) * piece.cell[0][i] + rho * y;
            }
            let value = f(&SimplexPoint::unchecked(t.clone()))?;
            total += value * (cell_jacobian * rho.powi(n as i32 - 1));
        }
        Ok(total)
    };
    integrate(g, n, config)
}

/// Exact integral of `Π t_i^{a_i}` over the unit simplex (free-coordinate
/// measure): `Π a_i! / (n + Σ a_i)!`.
pub fn monomial_integral(exponents: &[usize]) -> f64 {
    let n = exponents.len() - 1;
    let total: usize = exponents.iter().sum();
    exponents.iter().map(|&a| factorial(a)).product::<f64>() / factorial(n + total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn weights_sum_to_simplex_volume() {
        for n in 1..=MAX_DIM {
            for degree in [1, 3, 5, 7, 9] {
                let rule = base_rule(n, degree).unwrap();
                let sum: f64 = rule.iter().map(|(_, w)| w).sum();
                assert!(
                    (sum - 1.0 / factorial(n)).abs() < 1e-13,
                    "n={n} d={degree} sum={sum}"
                );
            }
        }
    }

    #[test]
    fn rule_exact_on_monomial() {
        let rule = base_rule(2, 5).unwrap();
        let q: f64 = rule
            .iter()
            .map(|(p, w)| w * p.coords()[1].powi(2) * p.coords()[2])
            .sum();
        assert!((q - 1.0 / 60.0).abs() < 1e-13);
        assert!((monomial_integral(&[0, 2, 1]) - 1.0 / 60.0).abs() < 1e-15);
    }

    #[test]
    fn rule_rejects_unsupported() {
        assert!(base_rule(6, 3).is_err());
        assert!(base_rule(2, 4).is_err());
        assert!(base_rule(2, 11).is_err());
    }

    #[test]
    fn embedded_rule_degrees() {
        // both members of the pair must be exact to their own degree
        let rule = embedded_rule(3, 7).unwrap();
        for exps in [[0, 2, 2, 1], [1, 1, 1, 2], [0, 0, 5, 0]] {
            let exact = monomial_integral(&exps);
            let eval = |w: &[f64]| -> f64 {
                rule.nodes
                    .iter()
                    .zip(w)
                    .map(|(p, w)| {
                        w * p
                            .iter()
                            .zip(exps)
                            .map(|(x, a)| x.powi(a as i32))
                            .product::<f64>()
                    })
                    .sum()
            };
            assert!((eval(&rule.weights) - exact).abs() < 1e-14);
            assert!((eval(&rule.lower_weights) - exact).abs() < 1e-14);
        }
    }

    #[test]
    fn subdivision_counts_and_volumes() {
        for n in 1..=MAX_DIM {
            let parent = SubSimplex::standard(n);
            let kids = subdivide(&parent);
            assert_eq!(kids.len(), 1 << n);
            let total: f64 = kids.iter().map(SubSimplex::volume).sum();
            assert!((total - parent.volume()).abs() < 1e-12 * parent.volume());
            for k in &kids {
                assert!((k.volume() - parent.volume() / (1 << n) as f64).abs() < 1e-14);
                assert_eq!(k.depth, 1);
            }
        }
    }

    #[test]
    fn triangle_children_are_midpoint_triangles() {
        let kids = subdivide(&SubSimplex::standard(2));
        let mut corners = 0;
        for k in &kids {
            if k.touches_original_vertex() {
                corners += 1;
            }
        }
        assert_eq!(corners, 3);
    }

    #[test]
    fn constant_and_linear() {
        let cfg = QuadratureConfig::default();
        let r = integrate_fn(|_| real(1.0), 3, &cfg).unwrap();
        assert!((r.value.re - 1.0 / 6.0).abs() < 1e-12 && r.converged);
        let r = integrate_fn(|p| real(p.coords()[1]), 2, &cfg).unwrap();
        assert!((r.value.re - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn vertex_singularity() {
        let cfg = QuadratureConfig::default().with_rel_tol(1e-7);
        let r = integrate_fn(
            |p| {
                let s: f64 = p.free().iter().sum();
                real(1.0 / (s * s))
            },
            3,
            &cfg,
        )
        .unwrap();
        assert!(r.converged, "{r:?}");
        assert!((r.value.re - 0.5).abs() < 1e-6, "{r:?}");
    }

    #[test]
    fn nan_is_reported() {
        let cfg = QuadratureConfig::default();
        let err = integrate_fn(|_| C64::new(f64::NAN, 0.0), 2, &cfg).unwrap_err();
        assert!(matches!(err, Error::NonFinite { .. }));
    }

    #[test]
    fn exhausted_budget_is_flagged() {
        let cfg = QuadratureConfig {
            max_evaluations: 2000,
            rel_tol: 1e-14,
            abs_tol: 1e-16,
            ..Default::default()
        };
        let r = integrate_fn(
            |p| real(1.0 / p.free().iter().sum::<f64>().powi(2)),
            3,
            &cfg,
        )
        .unwrap();
        assert!(!r.converged);
    }

    #[test]
    fn simplex_point_validation() {
        assert!(SimplexPoint::new(vec![0.5, 0.6]).is_err());
        assert!(SimplexPoint::new(vec![-0.1, 1.1]).is_err());
        let p = SimplexPoint::from_free(&[0.25, 0.25]).unwrap();
        assert_eq!(p.coords(), &[0.5, 0.25, 0.25]);
    }

    #[test]
    fn vertex_regularized_monomials() {
        let cfg = QuadratureConfig::default().with_rel_tol(1e-12);
        for n in 1..=3 {
            for exps in [
                vec![0; n + 1],
                vec![1; n + 1],
                (0..=n).map(|i| i % 3).collect(),
            ] {
                let r = integrate_vertex_regularized(
                    |p| {
                        Ok(real(
                            p.coords()
                                .iter()
                                .zip(&exps)
                                .map(|(x, &a)| x.powi(a as i32))
                                .product(),
                        ))
                    },
                    n,
                    &cfg,
                )
                .unwrap();
                let exact = monomial_integral(&exps);
                assert!(
                    (r.value.re - exact).abs() < 1e-13,
                    "n={n} {exps:?}: {r:?} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn vertex_regularized_shell_integral() {
        let cfg = QuadratureConfig::default().with_rel_tol(1e-10);
        let f = |p: &SimplexPoint| Ok(real(1.0 / p.free().iter().sum::<f64>().powi(2)));
        let r = integrate_vertex_regularized(f, 3, &cfg).unwrap();
        assert!(r.converged && (r.value.re - 0.5).abs() < 1e-10, "{r:?}");
        assert!(r.evaluations < 500_000, "{r:?}");
    }
}
