//! Reproducible random inputs: entries uniform on a disc, with rejection
//! of near-degenerate configurations.

use rand::Rng;

use crate::grassmann::VectorTuple;
use crate::linalg::{CMatrix, CVector, C64};

/// Uniform on the disc `|z| ≤ radius`.
pub fn disc(rng: &mut impl Rng, radius: f64) -> C64 {
    let rho = radius * rng.gen::<f64>().sqrt();
    let phi = rng.gen_range(0.0..std::f64::consts::TAU);
    C64::from_polar(rho, phi)
}

pub fn vector(rng: &mut impl Rng, dim: usize) -> CVector {
    CVector::from_fn(dim, |_| disc(rng, 1.0))
}

/// A matrix with disc entries and `|det| ≥ 0.05`.
pub fn invertible(rng: &mut impl Rng, n: usize) -> CMatrix {
    loop {
        let m = CMatrix::from_fn(n, n, |_, _| disc(rng, 1.0));
        if m.det().map(|d| d.norm() >= 0.05).unwrap_or(false) {
            return m;
        }
    }
}

/// `2r` vectors in `C^r` passing the genericity test of [`VectorTuple`].
pub fn generic_vectors(rng: &mut impl Rng, r: usize) -> VectorTuple {
    loop {
        let vs = (0..2 * r).map(|_| vector(rng, r)).collect();
        if let Ok(t) = VectorTuple::new(vs) {
            if t.is_generic() {
                return t;
            }
        }
    }
}

/// Like [`generic_vectors`] with every maximal minor at least `min_minor`
/// in modulus; keeps quadrature away from near-degenerate tuples.
pub fn well_separated_vectors(rng: &mut impl Rng, r: usize, min_minor: f64) -> VectorTuple {
    loop {
        let t = generic_vectors(rng, r);
        if t.min_minor() >= min_minor {
            return t;
        }
    }
}

/// A point of the open simplex `Δ^n`, uniformly distributed.
pub fn simplex_point(rng: &mut impl Rng, n: usize) -> crate::quad::SimplexPoint {
    loop {
        let e: Vec<f64> = (0..=n)
            .map(|_| -rng.gen::<f64>().max(1e-300).ln())
            .collect();
        let s: f64 = e.iter().sum();
        let mut t: Vec<f64> = e.iter().map(|x| x / s).collect();
        // exact normalization for the point validator
        let rest: f64 = t[1..].iter().sum();
        t[0] = 1.0 - rest;
        if t[0] > 0.0 {
            if let Ok(p) = crate::quad::SimplexPoint::new(t) {
                return p;
            }
        }
    }
}
