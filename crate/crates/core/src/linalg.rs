//! Dense complex linear algebra.
//!
//! Everything here works on small matrices (N ≤ 6 in practice), so the
//! routines are plain row-major loops with partial pivoting or Cholesky,
//! no blocking.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Relative pivot size under which a hermitian matrix is declared not
/// positive definite.
pub const DEFINITENESS_THRESHOLD: f64 = 1e-14;

#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "({:+.6e}{:+.6e}i) ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "empty matrix");
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![ONE; n])
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self> {
        let r = rows.len();
        if r == 0 || rows[0].is_empty() {
            return Err(Error::Dimension(
                "matrix must have at least one entry".into(),
            ));
        }
        let c = rows[0].len();
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged matrix rows".into()));
        }
        let data: Vec<C64> = rows.into_iter().flatten().collect();
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("matrix entry is not finite".into()));
        }
        Ok(Self {
            rows: r,
            cols: c,
            data,
        })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[&CVector]) -> Result<Self> {
        let n = cols
            .first()
            .ok_or_else(|| Error::Dimension("no columns".into()))?
            .dim();
        if cols.iter().any(|c| c.dim() != n) {
            return Err(Error::Dimension("columns of different length".into()));
        }
        Ok(Self::from_fn(n, cols.len(), |i, j| cols[j][i]))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<C64>> {
        self.data.chunks(self.cols).map(|r| r.to_vec()).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// `self += s * other`
    pub fn axpy(&mut self, s: C64, other: &CMatrix) {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// max |A[i][j] − conj(A[j][i])|
    pub fn hermitian_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut r: f64 = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                r = r.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        r
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_residual() <= 1e-12 * self.max_abs().max(f64::MIN_POSITIVE)
    }

    pub fn matmul(&self, rhs: &CMatrix) -> Result<CMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.data[k * rhs.cols + j];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &CVector) -> Result<CVector> {
        if self.cols != v.dim() {
            return Err(Error::Dimension("matrix-vector size mismatch".into()));
        }
        Ok(CVector::from_fn(self.rows, |i| {
            (0..self.cols).map(|j| self[(i, j)] * v[j]).sum()
        }))
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn det(&self) -> Result<C64> {
        if !self.is_square() {
            return Err(Error::Dimension(format!(
                "determinant of non-square {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = ONE;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&x, &y| a[x * n + col].norm().total_cmp(&a[y * n + col].norm()))
                .unwrap();
            if a[pivot * n + col] == ZERO {
                return Ok(ZERO);
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(pivot * n + j, col * n + j);
                }
                det = -det;
            }
            let p = a[col * n + col];
            det *= p;
            for row in col + 1..n {
                let factor = a[row * n + col] / p;
                if factor == ZERO {
                    continue;
                }
                for j in col..n {
                    let v = a[col * n + j];
                    a[row * n + j] -= factor * v;
                }
            }
        }
        Ok(det)
    }

    /// Inverse of a general square matrix (partial pivoting).
    pub fn inverse(&self) -> Result<CMatrix> {
        if !self.is_square() {
            return Err(Error::Dimension("inverse of non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.data.clone();
        let mut inv = CMatrix::identity(n).data;
        let scale = self.max_abs();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&x, &y| a[x * n + col].norm().total_cmp(&a[y * n + col].norm()))
                .unwrap();
            if a[pivot * n + col].norm() <= 1e-16 * scale {
                return Err(Error::Singular);
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(pivot * n + j, col * n + j);
                    inv.swap(pivot * n + j, col * n + j);
                }
            }
            let p = a[col * n + col].inv();
            for j in 0..n {
                a[col * n + j] *= p;
                inv[col * n + j] *= p;
            }
            for row in 0..n {
                if row == col {
                    continue;
                }
                let factor = a[row * n + col];
                if factor == ZERO {
                    continue;
                }
                for j in 0..n {
                    let av = a[col * n + j];
                    let iv = inv[col * n + j];
                    a[row * n + j] -= factor * av;
                    inv[row * n + j] -= factor * iv;
                }
            }
        }
        Ok(CMatrix {
            rows: n,
            cols: n,
            data: inv,
        })
    }

    /// Cholesky factor `L` with `self = L L^H`.
    ///
    /// A pivot below `DEFINITENESS_THRESHOLD · max|self|` is reported as
    /// [`Error::NotPositiveDefinite`] with its index.
    pub fn cholesky(&self) -> Result<CMatrix> {
        if !self.is_square() {
            return Err(Error::Dimension("cholesky of non-square matrix".into()));
        }
        let n = self.rows;
        let threshold = DEFINITENESS_THRESHOLD * self.max_abs();
        let mut l = CMatrix::zeros(n, n);
        for j in 0..n {
            let mut d = self[(j, j)].re;
            for k in 0..j {
                d -= l[(j, k)].norm_sqr();
            }
            if !(d > threshold) {
                return Err(Error::NotPositiveDefinite { pivot: j, value: d });
            }
            let d = d.sqrt();
            l[(j, j)] = C64::new(d, 0.0);
            for i in j + 1..n {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s / d;
            }
        }
        Ok(l)
    }

    /// Solves `self · x = b` for hermitian positive definite `self`.
    pub fn solve(&self, b: &CMatrix) -> Result<CMatrix> {
        if b.rows != self.rows {
            return Err(Error::Dimension(
                "right-hand side has wrong row count".into(),
            ));
        }
        let l = self.cholesky()?;
        Ok(cholesky_solve(&l, b))
    }
}

/// Solves `L L^H x = b` given the Cholesky factor `L`.
pub fn cholesky_solve(l: &CMatrix, b: &CMatrix) -> CMatrix {
    let n = l.rows;
    let mut x = b.clone();
    for c in 0..b.cols {
        // forward: L y = b
        for i in 0..n {
            let mut s = x[(i, c)];
            for k in 0..i {
                s -= l[(i, k)] * x[(k, c)];
            }
            x[(i, c)] = s / l[(i, i)];
        }
        // backward: L^H x = y
        for i in (0..n).rev() {
            let mut s = x[(i, c)];
            for k in i + 1..n {
                s -= l[(k, i)].conj() * x[(k, c)];
            }
            x[(i, c)] = s / l[(i, i)];
        }
    }
    x
}

/// `g · h · g^H`
pub fn congruence(g: &CMatrix, h: &CMatrix) -> Result<CMatrix> {
    if !g.is_square() || !h.is_square() || g.cols != h.rows {
        return Err(Error::Dimension(format!(
            "congruence of {}x{} with {}x{}",
            g.rows, g.cols, h.rows, h.cols
        )));
    }
    let mut out = g.matmul(h)?.matmul(&g.adjoint())?;
    // symmetrize away round-off so the result is hermitian to the last bit
    let n = out.rows;
    for i in 0..n {
        out[(i, i)].im = 0.0;
        for j in i + 1..n {
            let avg = (out[(i, j)] + out[(j, i)].conj()) * 0.5;
            out[(i, j)] = avg;
            out[(j, i)] = avg.conj();
        }
    }
    Ok(out)
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs).expect("matrix product dimension mismatch")
    }
}

impl Serialize for CMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for CMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<C64>>::deserialize(d)?;
        CMatrix::from_rows(rows).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CVector {
    entries: Vec<C64>,
}

impl CVector {
    pub fn new(entries: Vec<C64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Dimension("empty vector".into()));
        }
        if entries
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidArgument("vector entry is not finite".into()));
        }
        Ok(Self { entries })
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize) -> C64) -> Self {
        Self {
            entries: (0..dim).map(f).collect(),
        }
    }

    /// Standard basis vector `e_{k+1}` of `C^dim` (zero-based `k`).
    pub fn basis(dim: usize, k: usize) -> Self {
        Self::from_fn(dim, |i| if i == k { ONE } else { ZERO })
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.entries
    }

    pub fn norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn is_nonzero(&self) -> bool {
        self.norm() > 0.0
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_fn(self.dim(), |i| self.entries[i] * s)
    }

    pub fn conj(&self) -> Self {
        Self::from_fn(self.dim(), |i| self.entries[i].conj())
    }

    /// Rank-one matrix `v v^H`.
    pub fn outer_self(&self) -> CMatrix {
        CMatrix::from_fn(self.dim(), self.dim(), |i, j| {
            self.entries[i] * self.entries[j].conj()
        })
    }
}

impl Index<usize> for CVector {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.entries[i]
    }
}

impl Add for &CVector {
    type Output = CVector;
    fn add(self, rhs: &CVector) -> CVector {
        assert_eq!(self.dim(), rhs.dim());
        CVector::from_fn(self.dim(), |i| self.entries[i] + rhs.entries[i])
    }
}

impl Serialize for CVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.entries.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let entries = Vec::<C64>::deserialize(d)?;
        CVector::new(entries).map_err(serde::de::Error::custom)
    }
}

/// A strictly increasing list of indices inside `{0, …, ambient−1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexSubset {
    ambient: usize,
    members: Vec<usize>,
}

impl IndexSubset {
    pub fn new(ambient: usize, members: Vec<usize>) -> Result<Self> {
        if members.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(
                "subset members must be strictly increasing".into(),
            ));
        }
        if members.last().is_some_and(|&m| m >= ambient) {
            return Err(Error::InvalidArgument("subset member out of range".into()));
        }
        Ok(Self { ambient, members })
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.binary_search(&i).is_ok()
    }

    /// `t_I = Π_{i∈I} t_i`
    pub fn product(&self, t: &[f64]) -> f64 {
        self.members.iter().map(|&i| t[i]).product()
    }
}

/// All size-`s` subsets of `{0, …, n−1}` in lexicographic order.
pub fn subsets(n: usize, s: usize) -> Result<Vec<IndexSubset>> {
    if s > n {
        return Err(Error::InvalidArgument(format!(
            "subset size {s} exceeds {n}"
        )));
    }
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..s).collect();
    loop {
        out.push(IndexSubset {
            ambient: n,
            members: cur.clone(),
        });
        // advance to the next combination
        let mut i = s;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if cur[i] < n - s + i {
                break;
            }
            if i == 0 {
                return Ok(out);
            }
        }
        cur[i] += 1;
        for j in i + 1..s {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Determinant of the r×r matrix with columns `(v_{i_1}, …, v_{i_{r−1}}, v_extra)`,
/// subset members taken in ascending order.
pub fn minor_det(tuple: &[CVector], subset: &IndexSubset, extra: usize) -> Result<C64> {
    let r = tuple
        .first()
        .ok_or_else(|| Error::Dimension("empty vector tuple".into()))?
        .dim();
    if tuple.iter().any(|v| v.dim() != r) {
        return Err(Error::Dimension("vectors of different dimension".into()));
    }
    if subset.len() + 1 != r {
        return Err(Error::Dimension(format!(
            "subset of size {} for vectors in C^{r}",
            subset.len()
        )));
    }
    if extra >= tuple.len() || subset.members().iter().any(|&i| i >= tuple.len()) {
        return Err(Error::InvalidArgument("index outside the tuple".into()));
    }
    if subset.contains(extra) {
        return Ok(ZERO);
    }
    let cols: Vec<&CVector> = subset
        .members()
        .iter()
        .chain(std::iter::once(&extra))
        .map(|&i| &tuple[i])
        .collect();
    CMatrix::from_columns(&cols)?.det()
}

/// 2×2 determinant `a_0 b_1 − a_1 b_0`.
pub fn det2(a: &CVector, b: &CVector) -> C64 {
    a[0] * b[1] - a[1] * b[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn cofactor_det(m: &CMatrix) -> C64 {
        let n = m.rows();
        if n == 1 {
            return m[(0, 0)];
        }
        let mut acc = ZERO;
        for j in 0..n {
            let minor = CMatrix::from_fn(n - 1, n - 1, |a, b| {
                m[(a + 1, if b < j { b } else { b + 1 })]
            });
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            acc += m[(0, j)] * cofactor_det(&minor) * sign;
        }
        acc
    }

    fn pseudo_random(n: usize, seed: u64) -> CMatrix {
        let mut s = seed;
        let mut next = move || {
            s = s
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        CMatrix::from_fn(n, n, |_, _| c(next(), next()))
    }

    #[test]
    fn det_identity_and_swap() {
        assert_eq!(CMatrix::identity(3).det().unwrap(), ONE);
        let p = CMatrix::from_rows(vec![vec![ZERO, ONE], vec![ONE, ZERO]]).unwrap();
        assert_eq!(p.det().unwrap(), -ONE);
    }

    #[test]
    fn det_matches_cofactor_expansion() {
        for seed in 0..20 {
            let a = pseudo_random(4, seed);
            let d = a.det().unwrap();
            let oracle = cofactor_det(&a);
            assert!(
                (d - oracle).norm() <= 1e-12 * oracle.norm().max(1.0),
                "{d} vs {oracle}"
            );
        }
    }

    #[test]
    fn det_rejects_non_square() {
        assert!(matches!(
            CMatrix::zeros(2, 3).det(),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn minor_det_cases() {
        let e1 = CVector::basis(2, 0);
        let e2 = CVector::basis(2, 1);
        let tuple = vec![e1.clone(), e2.clone(), &e1 + &e2, e1.clone()];
        let s0 = IndexSubset::new(4, vec![0]).unwrap();
        assert_eq!(minor_det(&tuple, &s0, 1).unwrap(), ONE);
        assert_eq!(minor_det(&tuple, &s0, 0).unwrap(), ZERO);

        let m = pseudo_random(3, 9);
        let vs: Vec<CVector> = (0..6)
            .map(|k| {
                CVector::from_fn(3, |i| {
                    m[(i, k % 3)] * c(1.0 + k as f64, 0.3 * k as f64) + c(0.1 * i as f64, 0.0)
                })
            })
            .collect();
        let sub = IndexSubset::new(6, vec![1, 4]).unwrap();
        let direct = CMatrix::from_columns(&[&vs[1], &vs[4], &vs[5]])
            .unwrap()
            .det()
            .unwrap();
        let got = minor_det(&vs, &sub, 5).unwrap();
        assert!((got - direct).norm() <= 1e-13 * direct.norm().max(1.0));
    }

    #[test]
    fn minor_det_rejects_wrong_sizes() {
        let tuple = vec![
            CVector::basis(3, 0),
            CVector::basis(3, 1),
            CVector::basis(3, 2),
        ];
        let s = IndexSubset::new(3, vec![0]).unwrap();
        assert!(minor_det(&tuple, &s, 1).is_err());
    }

    #[test]
    fn congruence_cases() {
        let h = CMatrix::identity(2);
        assert_eq!(congruence(&CMatrix::identity(2), &h).unwrap(), h);
        let g = CMatrix::from_diagonal(&[c(2.0, 0.0), c(0.0, 1.0)]);
        let out = congruence(&g, &h).unwrap();
        assert_eq!(out, CMatrix::from_diagonal(&[c(4.0, 0.0), c(1.0, 0.0)]));

        let g = pseudo_random(3, 3);
        let a = pseudo_random(3, 4);
        let h = congruence(&a, &CMatrix::identity(3)).unwrap();
        let raw = &(&g * &h) * &g.adjoint();
        assert!(raw.hermitian_residual() < 1e-12 * raw.max_abs());
        assert!(congruence(&g, &h).unwrap().hermitian_residual() == 0.0);
        assert!(congruence(&CMatrix::identity(2), &h).is_err());
    }

    #[test]
    fn solve_cases() {
        let b = pseudo_random(2, 1);
        assert_eq!(CMatrix::identity(2).solve(&b).unwrap(), b);
        let h = CMatrix::from_diagonal(&[c(2.0, 0.0), c(4.0, 0.0)]);
        let x = h.solve(&CMatrix::identity(2)).unwrap();
        let want = CMatrix::from_diagonal(&[c(0.5, 0.0), c(0.25, 0.0)]);
        assert!((&x - &want).max_abs() < 1e-15);

        let a = pseudo_random(4, 5);
        let spd = &congruence(&a, &CMatrix::identity(4)).unwrap() + &CMatrix::identity(4);
        let rhs = pseudo_random(4, 6);
        let x = spd.solve(&rhs).unwrap();
        assert!((&(&spd * &x) - &rhs).max_abs() < 1e-10 * rhs.max_abs());
    }

    #[test]
    fn solve_reports_failing_pivot() {
        let v = CVector::new(vec![ONE, c(0.0, 2.0)]).unwrap();
        let h = v.outer_self();
        match h.solve(&CMatrix::identity(2)) {
            Err(Error::NotPositiveDefinite { pivot, .. }) => assert_eq!(pivot, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn subsets_enumeration() {
        let s = subsets(4, 2).unwrap();
        assert_eq!(s.len(), 6);
        assert_eq!(s[0].members(), &[0, 1]);
        assert_eq!(s[5].members(), &[2, 3]);
        let e = subsets(5, 0).unwrap();
        assert_eq!(e.len(), 1);
        assert!(e[0].is_empty());
        let s = subsets(6, 3).unwrap();
        assert_eq!(s.len(), 20);
        let set: std::collections::BTreeSet<_> = s.iter().cloned().collect();
        assert_eq!(set.len(), 20);
        assert!(s.windows(2).all(|w| w[0] < w[1]));
        assert!(subsets(2, 3).is_err());
        assert_eq!(subsets(3, 3).unwrap().len(), 1);
    }

    #[test]
    fn inverse_round_trip() {
        let a = pseudo_random(3, 17);
        let inv = a.inverse().unwrap();
        assert!((&(&a * &inv) - &CMatrix::identity(3)).max_abs() < 1e-12);
    }
}
