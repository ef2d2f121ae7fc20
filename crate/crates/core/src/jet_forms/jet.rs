//! Truncated Taylor polynomials with matrix coefficients in the Wirtinger
//! variables `(z_1..z_m, z̄_1..z̄_m, τ_1..τ_k)`, treated as independent.
//!
//! Coefficients are stored in graded monomial order, so truncating a jet
//! to a lower order keeps a prefix of its coefficient vector.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64, ONE, ZERO};

/// Monomial tables shared by all jets over the same variables.
#[derive(Debug)]
pub struct JetContext {
    complex_dim: usize,
    param_dim: usize,
    order: usize,
    monomials: Vec<Vec<u8>>,
    /// `len_by_order[o]` monomials have degree `≤ o`.
    len_by_order: Vec<usize>,
    index: HashMap<Vec<u8>, usize>,
    /// `(i, j, k)` with `x^i x^j = x^k`, sorted by `k`.
    products: Vec<(u32, u32, u32)>,
    /// `products_by_order[o]` triples have `deg k ≤ o`.
    products_by_order: Vec<usize>,
    /// Per variable, `(dst, src, factor)` with `∂ c_src x^src = factor c_src x^dst`,
    /// sorted by `dst`.
    derivatives: Vec<Vec<(u32, u32, f64)>>,
    /// Index of the monomial with `z` and `z̄` exponents swapped.
    swapped: Vec<u32>,
}

impl JetContext {
    pub fn new(complex_dim: usize, param_dim: usize, order: usize) -> Result<Arc<Self>> {
        let nvars = 2 * complex_dim + param_dim;
        if nvars > 16 || order > 8 {
            return Err(Error::Unsupported(format!(
                "{nvars} jet variables at order {order}"
            )));
        }
        let mut monomials: Vec<Vec<u8>> = vec![vec![0; nvars]];
        let mut len_by_order = vec![1];
        let mut layer = vec![vec![0u8; nvars]];
        for _ in 1..=order {
            // extend each monomial of the previous layer by a variable no
            // smaller than its last one, giving every monomial exactly once
            let mut next = Vec::new();
            for mono in &layer {
                let last = mono.iter().rposition(|&e| e > 0).unwrap_or(0);
                for v in last..nvars {
                    let mut m = mono.clone();
                    m[v] += 1;
                    next.push(m);
                }
            }
            monomials.extend(next.iter().cloned());
            len_by_order.push(monomials.len());
            layer = next;
        }
        let index: HashMap<Vec<u8>, usize> = monomials
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        let degree = |m: &[u8]| m.iter().map(|&e| e as usize).sum::<usize>();

        let mut products = Vec::new();
        for (i, a) in monomials.iter().enumerate() {
            for (j, b) in monomials.iter().enumerate() {
                if degree(a) + degree(b) > order {
                    continue;
                }
                let sum: Vec<u8> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                products.push((i as u32, j as u32, index[&sum] as u32));
            }
        }
        products.sort_by_key(|&(i, j, k)| (k, i, j));
        let products_by_order = (0..=order)
            .map(|o| products.partition_point(|&(_, _, k)| (k as usize) < len_by_order[o]))
            .collect();

        let derivatives = (0..nvars)
            .map(|v| {
                let mut table = Vec::new();
                for (dst, m) in monomials.iter().enumerate() {
                    if degree(m) >= order {
                        continue;
                    }
                    let mut src = m.clone();
                    src[v] += 1;
                    table.push((dst as u32, index[&src] as u32, src[v] as f64));
                }
                table
            })
            .collect();

        let swapped = monomials
            .iter()
            .map(|m| {
                let mut s = m.clone();
                for a in 0..complex_dim {
                    s.swap(a, complex_dim + a);
                }
                index[&s] as u32
            })
            .collect();

        Ok(Arc::new(Self {
            complex_dim,
            param_dim,
            order,
            monomials,
            len_by_order,
            index,
            products,
            products_by_order,
            derivatives,
            swapped,
        }))
    }

    pub fn complex_dim(&self) -> usize {
        self.complex_dim
    }

    pub fn param_dim(&self) -> usize {
        self.param_dim
    }

    pub fn nvars(&self) -> usize {
        2 * self.complex_dim + self.param_dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn monomials(&self) -> &[Vec<u8>] {
        &self.monomials
    }

    pub fn len(&self, order: usize) -> usize {
        self.len_by_order[order]
    }

    pub fn monomial_index(&self, exponents: &[u8]) -> Option<usize> {
        self.index.get(exponents).copied()
    }

    fn same(&self, other: &Self) -> bool {
        std::ptr::eq(self, other)
            || (self.complex_dim == other.complex_dim
                && self.param_dim == other.param_dim
                && self.order == other.order)
    }
}

/// Truncated Taylor series of an `rows × cols` matrix function; coefficient
/// `c_α` multiplies `δ^α`, so `c_α = ∂^α f / α!`.
#[derive(Clone)]
pub struct MatJet {
    ctx: Arc<JetContext>,
    order: usize,
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl std::fmt::Debug for MatJet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MatJet")
            .field("order", &self.order)
            .field("shape", &(self.rows, self.cols))
            .field("value", &self.value())
            .finish()
    }
}

impl MatJet {
    pub fn zeros(ctx: &Arc<JetContext>, order: usize, rows: usize, cols: usize) -> Self {
        let order = order.min(ctx.order);
        Self {
            ctx: ctx.clone(),
            order,
            rows,
            cols,
            data: vec![ZERO; ctx.len(order) * rows * cols],
        }
    }

    pub fn constant(ctx: &Arc<JetContext>, order: usize, value: &CMatrix) -> Self {
        let mut j = Self::zeros(ctx, order, value.rows(), value.cols());
        j.data[..value.as_slice().len()].copy_from_slice(value.as_slice());
        j
    }

    pub fn scalar(ctx: &Arc<JetContext>, order: usize, value: C64) -> Self {
        let mut j = Self::zeros(ctx, order, 1, 1);
        j.data[0] = value;
        j
    }

    pub fn identity(ctx: &Arc<JetContext>, order: usize, n: usize) -> Self {
        Self::constant(ctx, order, &CMatrix::identity(n))
    }

    /// The coordinate function `x_v` around the value `at`.
    pub fn variable(ctx: &Arc<JetContext>, order: usize, v: usize, at: C64) -> Self {
        let mut j = Self::scalar(ctx, order, at);
        if j.order >= 1 {
            let mut e = vec![0u8; ctx.nvars()];
            e[v] = 1;
            j.data[ctx.index[&e]] = ONE;
        }
        j
    }

    pub fn context(&self) -> &Arc<JetContext> {
        &self.ctx
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    fn block(&self) -> usize {
        self.rows * self.cols
    }

    fn ncoeffs(&self) -> usize {
        self.ctx.len(self.order)
    }

    pub fn coeff(&self, k: usize) -> CMatrix {
        let b = self.block();
        let slice = &self.data[k * b..(k + 1) * b];
        CMatrix::from_fn(self.rows, self.cols, |i, j| slice[i * self.cols + j])
    }

    /// Coefficient of `δ^exponents`, or `None` beyond the valid order.
    pub fn coeff_of(&self, exponents: &[u8]) -> Option<CMatrix> {
        let k = self.ctx.monomial_index(exponents)?;
        (k < self.ncoeffs()).then(|| self.coeff(k))
    }

    pub fn set_coeff(&mut self, k: usize, value: &CMatrix) {
        let b = self.block();
        self.data[k * b..(k + 1) * b].copy_from_slice(value.as_slice());
    }

    pub fn value(&self) -> CMatrix {
        self.coeff(0)
    }

    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order);
        let mut j = self.clone();
        j.order = order;
        j.data.truncate(self.ctx.len(order) * self.block());
        j
    }

    fn check(&self, other: &Self) -> Result<()> {
        if !self.ctx.same(&other.ctx) {
            return Err(Error::ContextMismatch);
        }
        Ok(())
    }

    fn zip(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Result<Self> {
        self.check(other)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::Dimension(format!(
                "jet shapes {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let order = self.order.min(other.order);
        let len = self.ctx.len(order) * self.block();
        Ok(Self {
            ctx: self.ctx.clone(),
            order,
            rows: self.rows,
            cols: self.cols,
            data: self.data[..len]
                .iter()
                .zip(&other.data[..len])
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut j = self.clone();
        j.data.iter_mut().for_each(|x| *x *= s);
        j
    }

    pub fn add_assign_scaled(&mut self, s: C64, other: &Self) -> Result<()> {
        self.check(other)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::Dimension("jet shapes differ".into()));
        }
        if other.order < self.order {
            *self = self.truncate(other.order);
        }
        let len = self.data.len();
        for (a, &b) in self.data.iter_mut().zip(&other.data[..len]) {
            *a += s * b;
        }
        Ok(())
    }

    /// Truncated product. A `1 × 1` factor acts as a scalar.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let scalar_left = self.block() == 1 && other.block() != 1;
        let scalar_right = other.block() == 1 && self.block() != 1;
        let (rows, inner, cols) = if scalar_left {
            (other.rows, 1, other.cols)
        } else if scalar_right {
            (self.rows, 1, self.cols)
        } else {
            if self.cols != other.rows {
                return Err(Error::Dimension(format!(
                    "jet product {}x{} by {}x{}",
                    self.rows, self.cols, other.rows, other.cols
                )));
            }
            (self.rows, self.cols, other.cols)
        };
        let order = self.order.min(other.order);
        let mut out = Self::zeros(&self.ctx, order, rows, cols);
        let ob = rows * cols;
        let (ab, bb) = (self.block(), other.block());
        let count = self.ctx.products_by_order[order];
        for &(i, j, k) in &self.ctx.products[..count] {
            let (i, j, k) = (i as usize, j as usize, k as usize);
            let a = &self.data[i * ab..(i + 1) * ab];
            let b = &other.data[j * bb..(j + 1) * bb];
            if a.iter().all(|x| *x == ZERO) || b.iter().all(|x| *x == ZERO) {
                continue;
            }
            let c = &mut out.data[k * ob..(k + 1) * ob];
            if scalar_left {
                for (cx, bx) in c.iter_mut().zip(b) {
                    *cx += a[0] * bx;
                }
            } else if scalar_right {
                for (cx, ax) in c.iter_mut().zip(a) {
                    *cx += ax * b[0];
                }
            } else {
                for r in 0..rows {
                    for l in 0..inner {
                        let x = a[r * inner + l];
                        if x == ZERO {
                            continue;
                        }
                        for s in 0..cols {
                            c[r * cols + s] += x * b[l * cols + s];
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// `∂/∂x_v`, one order lower.
    pub fn derivative(&self, v: usize) -> Result<Self> {
        if self.order == 0 {
            return Err(Error::JetOrder {
                needed: 1,
                available: 0,
            });
        }
        let order = self.order - 1;
        let mut out = Self::zeros(&self.ctx, order, self.rows, self.cols);
        let b = self.block();
        let len = self.ctx.len(order);
        for &(dst, src, factor) in &self.ctx.derivatives[v] {
            let (dst, src) = (dst as usize, src as usize);
            if dst >= len {
                break;
            }
            for e in 0..b {
                out.data[dst * b + e] = self.data[src * b + e] * factor;
            }
        }
        Ok(out)
    }

    pub fn trace(&self) -> Self {
        let mut out = Self::zeros(&self.ctx, self.order, 1, 1);
        let b = self.block();
        let n = self.rows.min(self.cols);
        for k in 0..self.ncoeffs() {
            out.data[k] = (0..n).map(|i| self.data[k * b + i * self.cols + i]).sum();
        }
        out
    }

    fn conj_impl(&self, transpose: bool) -> Self {
        let (rows, cols) = if transpose {
            (self.cols, self.rows)
        } else {
            (self.rows, self.cols)
        };
        let mut out = Self::zeros(&self.ctx, self.order, rows, cols);
        let b = self.block();
        for k in 0..self.ncoeffs() {
            let dst = self.ctx.swapped[k] as usize;
            for i in 0..self.rows {
                for j in 0..self.cols {
                    let (oi, oj) = if transpose { (j, i) } else { (i, j) };
                    out.data[dst * b + oi * cols + oj] =
                        self.data[k * b + i * self.cols + j].conj();
                }
            }
        }
        out
    }

    /// The jet of `conj(f)` (entrywise): `z` and `z̄` exponents swap.
    pub fn conj(&self) -> Self {
        self.conj_impl(false)
    }

    /// The jet of `f^H`.
    pub fn adjoint(&self) -> Self {
        self.conj_impl(true)
    }

    /// Inverse through the Neumann series around the value.
    pub fn inverse(&self) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::Dimension("inverse of a non-square jet".into()));
        }
        let v_inv = self.value().inverse()?;
        let inv0 = MatJet::constant(&self.ctx, self.order, &v_inv);
        let mut delta = self.clone();
        let zero = CMatrix::zeros(self.rows, self.cols);
        delta.set_coeff(0, &zero);
        // (v + δ)^{-1} = Σ (−v^{-1} δ)^j v^{-1}
        let step = inv0.mul(&delta)?.scale(C64::new(-1.0, 0.0));
        let mut term = inv0.clone();
        let mut sum = inv0;
        for _ in 0..self.order {
            term = step.mul(&term)?;
            sum = sum.add(&term)?;
        }
        Ok(sum)
    }

    /// Sum of coefficient max-norms; submultiplicative up to the matrix size.
    pub fn norm1(&self) -> f64 {
        let b = self.block();
        (0..self.ncoeffs())
            .map(|k| {
                self.data[k * b..(k + 1) * b]
                    .iter()
                    .map(|x| x.norm())
                    .fold(0.0, f64::max)
            })
            .sum::<f64>()
            * self.rows.max(1) as f64
    }

    /// Matrix exponential by scaling and squaring with a Taylor core.
    pub fn exp(&self) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::Dimension("exp of a non-square jet".into()));
        }
        let norm = self.norm1();
        if !norm.is_finite() {
            return Err(Error::InvalidArgument("non-finite jet".into()));
        }
        let squarings = if norm > 0.25 {
            (norm / 0.25).log2().ceil() as i32
        } else {
            0
        };
        let x = self.scale(C64::new(0.5f64.powi(squarings), 0.0));
        let id = MatJet::identity(&self.ctx, self.order, self.rows);
        let mut term = id.clone();
        let mut sum = id;
        for j in 1..=20 {
            term = term.mul(&x)?.scale(C64::new(1.0 / j as f64, 0.0));
            sum = sum.add(&term)?;
        }
        for _ in 0..squarings {
            sum = sum.mul(&sum)?;
        }
        Ok(sum)
    }

    /// Largest coefficient modulus over the valid order.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|x| x.re.is_finite() && x.im.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| *x == ZERO)
    }
}
