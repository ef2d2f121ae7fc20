//! Differential forms on `X × T` with matrix-valued jet coefficients.
//!
//! Generators are ordered `dz_1..dz_m, dz̄_1..dz̄_m, dτ_1..dτ_k`; generator
//! `g` is the differential of jet variable `g`. A term is a bitmask of
//! generators, read as their wedge in increasing order.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::jet::{JetContext, MatJet};
use crate::error::{Error, Result};
use crate::linalg::C64;

/// Which part of the exterior derivative to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Differential {
    /// `d'`, the `dz` part.
    Holomorphic,
    /// `d''`, the `dz̄` part.
    Antiholomorphic,
    /// `d_X = d' + d''`.
    X,
    /// `d_T`.
    T,
    /// `d = d_X + d_T`.
    Total,
}

/// Holomorphic, antiholomorphic and parameter degrees of a generator mask.
pub fn tridegree(ctx: &JetContext, mask: u32) -> (usize, usize, usize) {
    let m = ctx.complex_dim();
    let count = |lo: usize, hi: usize| (lo..hi).filter(|&g| mask >> g & 1 == 1).count();
    (count(0, m), count(m, 2 * m), count(2 * m, ctx.nvars()))
}

fn parity_of_merge(a: u32, b: u32) -> bool {
    // number of pairs (i in a, j in b) with i > j
    let mut count = 0;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        count += (a >> (j + 1)).count_ones();
        rest &= rest - 1;
    }
    count % 2 == 1
}

#[derive(Clone, Debug)]
pub struct MultiForm {
    ctx: Arc<JetContext>,
    rows: usize,
    cols: usize,
    terms: BTreeMap<u32, MatJet>,
}

impl MultiForm {
    pub fn zero(ctx: &Arc<JetContext>, rows: usize, cols: usize) -> Self {
        Self {
            ctx: ctx.clone(),
            rows,
            cols,
            terms: BTreeMap::new(),
        }
    }

    /// `coeff · dgen_mask`.
    pub fn term(mask: u32, coeff: MatJet) -> Self {
        let mut f = Self::zero(coeff.context(), coeff.rows(), coeff.cols());
        f.push(mask, coeff).expect("fresh form");
        f
    }

    /// A 0-form.
    pub fn function(coeff: MatJet) -> Self {
        Self::term(0, coeff)
    }

    pub fn context(&self) -> &Arc<JetContext> {
        &self.ctx
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &MatJet)> {
        self.terms.iter().map(|(&m, j)| (m, j))
    }

    pub fn coefficient(&self, mask: u32) -> Option<&MatJet> {
        self.terms.get(&mask)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(MatJet::is_zero)
    }

    pub fn generator_dz(&self, a: usize) -> u32 {
        1 << a
    }

    pub fn generator_dzbar(&self, a: usize) -> u32 {
        1 << (self.ctx.complex_dim() + a)
    }

    pub fn generator_dtau(&self, b: usize) -> u32 {
        1 << (2 * self.ctx.complex_dim() + b)
    }

    /// Lowest jet order among the coefficients.
    pub fn order(&self) -> usize {
        self.terms
            .values()
            .map(MatJet::order)
            .min()
            .unwrap_or(self.ctx.order())
    }

    fn check(&self, other: &Self) -> Result<()> {
        if !Arc::ptr_eq(&self.ctx, &other.ctx)
            && (
                self.ctx.complex_dim(),
                self.ctx.param_dim(),
                self.ctx.order(),
            ) != (
                other.ctx.complex_dim(),
                other.ctx.param_dim(),
                other.ctx.order(),
            )
        {
            return Err(Error::ContextMismatch);
        }
        Ok(())
    }

    /// Adds `s · coeff · dgen_mask` to the form.
    fn push_scaled(&mut self, mask: u32, s: C64, coeff: &MatJet) -> Result<()> {
        match self.terms.get_mut(&mask) {
            Some(existing) => existing.add_assign_scaled(s, coeff),
            None => {
                if (coeff.rows(), coeff.cols()) != (self.rows, self.cols) {
                    return Err(Error::Dimension("form coefficient shape".into()));
                }
                let value = if s == C64::new(1.0, 0.0) {
                    coeff.clone()
                } else {
                    coeff.scale(s)
                };
                self.terms.insert(mask, value);
                Ok(())
            }
        }
    }

    pub fn push(&mut self, mask: u32, coeff: MatJet) -> Result<()> {
        if mask >> self.ctx.nvars() != 0 {
            return Err(Error::InvalidArgument(format!("generator mask {mask:#b}")));
        }
        if !coeff.is_finite() {
            return Err(Error::InvalidArgument("non-finite form coefficient".into()));
        }
        self.push_scaled(mask, C64::new(1.0, 0.0), &coeff)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.axpy(C64::new(1.0, 0.0), other)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.axpy(C64::new(-1.0, 0.0), other)
    }

    /// `self + s · other`
    pub fn axpy(&self, s: C64, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (&mask, c) in &other.terms {
            out.push_scaled(mask, s, c)?;
        }
        Ok(out)
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = self.clone();
        out.terms.values_mut().for_each(|c| *c = c.scale(s));
        out
    }

    /// Matrix-coefficient wedge product.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let scalar = |f: &Self| f.rows * f.cols == 1;
        let (rows, cols) = if scalar(self) && !scalar(other) {
            other.shape()
        } else if scalar(other) && !scalar(self) {
            self.shape()
        } else {
            (self.rows, other.cols)
        };
        let mut out = Self::zero(&self.ctx, rows, cols);
        for (&a, ca) in &self.terms {
            for (&b, cb) in &other.terms {
                if a & b != 0 {
                    continue;
                }
                let sign = if parity_of_merge(a, b) { -1.0 } else { 1.0 };
                out.push_scaled(a | b, C64::new(sign, 0.0), &ca.mul(cb)?)?;
            }
        }
        Ok(out)
    }

    /// Terms of even or odd total degree.
    pub fn parity_part(&self, odd: bool) -> Self {
        let mut out = Self::zero(&self.ctx, self.rows, self.cols);
        for (&m, c) in &self.terms {
            if (m.count_ones() % 2 == 1) == odd {
                out.terms.insert(m, c.clone());
            }
        }
        out
    }

    /// `Some(parity)` when every term has the same degree parity.
    pub fn parity(&self) -> Option<bool> {
        let mut it = self.terms.keys().map(|m| m.count_ones() % 2 == 1);
        let first = it.next().unwrap_or(false);
        it.all(|p| p == first).then_some(first)
    }

    /// `[a, b] = a∧b − (−1)^{|a||b|} b∧a`, termwise in degree.
    pub fn supercommutator(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let ab = self.wedge(other)?;
        let ae = self.parity_part(false);
        let ao = self.parity_part(true);
        let be = other.parity_part(false);
        let bo = other.parity_part(true);
        // b∧a with the graded sign: only odd∧odd pairs commute with a plus
        let ba_even = other.wedge(&ae)?.add(&be.wedge(&ao)?)?;
        let ba_odd = bo.wedge(&ao)?;
        ab.sub(&ba_even)?.add(&ba_odd)
    }

    fn generator_range(&self, which: Differential) -> std::ops::Range<usize> {
        let m = self.ctx.complex_dim();
        match which {
            Differential::Holomorphic => 0..m,
            Differential::Antiholomorphic => m..2 * m,
            Differential::X => 0..2 * m,
            Differential::T => 2 * m..self.ctx.nvars(),
            Differential::Total => 0..self.ctx.nvars(),
        }
    }

    /// Exterior derivative acting from the left:
    /// `d(f dgen_I) = Σ_g ∂_g f dgen_g ∧ dgen_I`.
    pub fn d(&self, which: Differential) -> Result<Self> {
        let mut out = Self::zero(&self.ctx, self.rows, self.cols);
        for (&mask, c) in &self.terms {
            for g in self.generator_range(which) {
                let bit = 1u32 << g;
                if mask & bit != 0 {
                    continue;
                }
                let sign = if (mask & (bit - 1)).count_ones() % 2 == 1 {
                    -1.0
                } else {
                    1.0
                };
                out.push_scaled(mask | bit, C64::new(sign, 0.0), &c.derivative(g)?)?;
            }
        }
        Ok(out)
    }

    pub fn trace(&self) -> Self {
        let mut out = Self::zero(&self.ctx, 1, 1);
        for (&m, c) in &self.terms {
            out.terms.insert(m, c.trace());
        }
        out
    }

    /// Entrywise complex conjugate: coefficients are conjugated as
    /// functions and `dz_a ↔ dz̄_a`.
    pub fn conj(&self) -> Self {
        let m = self.ctx.complex_dim();
        let mut out = Self::zero(&self.ctx, self.rows, self.cols);
        for (&mask, c) in &self.terms {
            let image: Vec<usize> = (0..self.ctx.nvars())
                .filter(|&g| mask >> g & 1 == 1)
                .map(|g| {
                    if g < m {
                        g + m
                    } else if g < 2 * m {
                        g - m
                    } else {
                        g
                    }
                })
                .collect();
            let inversions = (0..image.len())
                .flat_map(|i| (i + 1..image.len()).map(move |j| (i, j)))
                .filter(|&(i, j)| image[i] > image[j])
                .count();
            let new_mask = image.iter().fold(0u32, |acc, &g| acc | 1 << g);
            let sign = if inversions % 2 == 1 { -1.0 } else { 1.0 };
            out.push_scaled(new_mask, C64::new(sign, 0.0), &c.conj())
                .expect("same shape");
        }
        out
    }

    /// Keeps the terms whose tridegree satisfies `keep`.
    pub fn filter(&self, keep: impl Fn((usize, usize, usize)) -> bool) -> Self {
        let mut out = Self::zero(&self.ctx, self.rows, self.cols);
        for (&m, c) in &self.terms {
            if keep(tridegree(&self.ctx, m)) {
                out.terms.insert(m, c.clone());
            }
        }
        out
    }

    /// Contracts away `dτ_1 ∧ … ∧ dτ_k`: terms carrying every parameter
    /// generator lose them, all other terms are dropped.
    pub fn parameter_coefficient(&self) -> Self {
        let m = self.ctx.complex_dim();
        let full: u32 = ((1u32 << self.ctx.param_dim()) - 1) << (2 * m);
        let mut out = Self::zero(&self.ctx, self.rows, self.cols);
        for (&mask, c) in &self.terms {
            if mask & full == full {
                out.terms.insert(mask & !full, c.clone());
            }
        }
        out
    }

    /// Largest coefficient modulus over all jet orders.
    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(MatJet::max_abs).fold(0.0, f64::max)
    }

    /// Largest coefficient modulus at the base point only.
    pub fn value_max_abs(&self) -> f64 {
        self.terms
            .values()
            .map(|c| c.value().max_abs())
            .fold(0.0, f64::max)
    }

    /// Tridegrees carrying a coefficient above `tol` at the base point.
    pub fn support(&self, tol: f64) -> Vec<(usize, usize, usize)> {
        let mut s: Vec<_> = self
            .terms
            .iter()
            .filter(|(_, c)| c.value().max_abs() > tol)
            .map(|(&m, _)| tridegree(&self.ctx, m))
            .collect();
        s.sort();
        s.dedup();
        s
    }

    pub fn truncate(&self, order: usize) -> Self {
        let mut out = self.clone();
        out.terms.values_mut().for_each(|c| *c = c.truncate(order));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CMatrix;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn mat(a: [[f64; 2]; 2]) -> CMatrix {
        CMatrix::from_fn(2, 2, |i, j| c(a[i][j], 0.0))
    }

    #[test]
    fn generators_anticommute() {
        let ctx = JetContext::new(1, 2, 1).unwrap();
        let one = MatJet::scalar(&ctx, 1, c(1.0, 0.0));
        let dz = MultiForm::term(1, one.clone());
        assert!(dz.wedge(&dz).unwrap().is_zero());
        let dt = MultiForm::term(dz.generator_dtau(1), one);
        let a = dz.wedge(&dt).unwrap();
        let b = dt.wedge(&dz).unwrap();
        assert!(a.add(&b).unwrap().is_zero());
    }

    #[test]
    fn matrix_one_forms() {
        let ctx = JetContext::new(0, 2, 0).unwrap();
        let a = mat([[1.0, 2.0], [0.0, 1.0]]);
        let b = mat([[0.0, 1.0], [3.0, 0.0]]);
        let fa = MultiForm::term(1, MatJet::constant(&ctx, 0, &a));
        let fb = MultiForm::term(2, MatJet::constant(&ctx, 0, &b));
        let sum = fa.wedge(&fb).unwrap().add(&fb.wedge(&fa).unwrap()).unwrap();
        let expected = &(&a * &b) - &(&b * &a);
        assert_eq!(sum.coefficient(3).unwrap().value(), expected);
        // odd forms: the supercommutator is the anticommutator
        let n = fa.add(&fb).unwrap();
        let nn = n.supercommutator(&n).unwrap();
        let twice = n.wedge(&n).unwrap().scale(c(2.0, 0.0));
        assert!(nn.sub(&twice).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn d_of_coordinate_functions() {
        let ctx = JetContext::new(1, 1, 3).unwrap();
        let z = MatJet::variable(&ctx, 3, 0, c(0.1, 0.2));
        let tau = MatJet::variable(&ctx, 3, 2, c(0.5, 0.0));
        // f = z τ, d f = τ dz + z dτ
        let f = MultiForm::function(z.mul(&tau).unwrap());
        let df = f.d(Differential::Total).unwrap();
        assert!((df.coefficient(1).unwrap().value()[(0, 0)] - c(0.5, 0.0)).norm() < 1e-15);
        assert!((df.coefficient(4).unwrap().value()[(0, 0)] - c(0.1, 0.2)).norm() < 1e-15);
        assert!(df.d(Differential::Total).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn conjugation_is_an_involution() {
        let ctx = JetContext::new(1, 1, 2).unwrap();
        let z = MatJet::variable(&ctx, 2, 0, c(0.1, 0.2));
        let f = MultiForm::term(0b011, z.scale(c(0.0, 1.0)));
        let back = f.conj().conj();
        assert!(back.sub(&f).unwrap().max_abs() < 1e-15);
        // conj(dz ∧ dz̄) = dz̄ ∧ dz = −dz ∧ dz̄
        let one = MultiForm::term(0b011, MatJet::scalar(&ctx, 2, c(1.0, 0.0)));
        assert!(one.conj().add(&one).unwrap().is_zero());
    }
}
