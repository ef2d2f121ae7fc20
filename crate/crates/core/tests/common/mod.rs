//! Reference implementations used as oracles by the integration tests.
//! They are deliberately naive: Leibniz determinants and full enumeration.
#![allow(dead_code)]

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use regulator_core::linalg::CVector;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn permutations(n: usize) -> Vec<(Vec<usize>, f64)> {
    if n == 0 {
        return vec![(vec![], 1.0)];
    }
    let mut out = Vec::new();
    for (p, s) in permutations(n - 1) {
        // inserting n−1 at position pos passes over len − pos entries
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            let sign = if (p.len() - pos) % 2 == 1 { -s } else { s };
            out.push((q, sign));
        }
    }
    out
}

/// Leibniz-formula determinant of a square matrix given by columns.
pub fn leibniz_det(cols: &[Vec<C64>]) -> C64 {
    let n = cols.len();
    permutations(n)
        .into_iter()
        .map(|(p, s)| (0..n).fold(C64::new(s, 0.0), |acc, j| acc * cols[j][p[j]]))
        .sum()
}

fn leibniz_det_real(rows: &[Vec<f64>]) -> f64 {
    let n = rows.len();
    permutations(n)
        .into_iter()
        .map(|(p, s)| (0..n).fold(s, |acc, i| acc * rows[i][p[i]]))
        .sum()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect())
        .collect()
}

fn column(v: &CVector) -> Vec<C64> {
    v.as_slice().to_vec()
}

/// `det(Σ t_i v_i v_i^H)` by the Leibniz formula.
pub fn reference_denominator(vs: &[CVector], t: &[f64]) -> f64 {
    let r = vs[0].dim();
    let cols: Vec<Vec<C64>> = (0..r)
        .map(|b| {
            (0..r)
                .map(|a| {
                    vs.iter()
                        .zip(t)
                        .map(|(v, &ti)| v[a] * v[b].conj() * ti)
                        .sum()
                })
                .collect()
        })
        .collect();
    leibniz_det(&cols).re
}

/// Minor-integrand numerator: the coefficient of `dt_1 ∧ … ∧ dt_m` in
/// `Σ Π_j t_{I_j} conj(det(v_{I_j}, v_{i_j})) det(v_{I_j}, v_{i_{j+1}}) dt_{i_j}`
/// with `i_{m+1} = i_1` and `dt_0 = −Σ_{l≥1} dt_l`.
///
/// For `r ≤ 2` every `(I_1..I_m, i_1..i_m)` is enumerated literally; for
/// larger `r` the subset sums are collected into a matrix first.
pub fn reference_numerator(vs: &[CVector], t: &[f64]) -> C64 {
    if vs[0].dim() <= 2 {
        literal_numerator(vs, t)
    } else {
        factored_numerator(vs, t)
    }
}

fn wedge_weight(seq: &[usize], m: usize) -> f64 {
    let dt = |i: usize| -> Vec<f64> {
        if i == 0 {
            vec![-1.0; m]
        } else {
            (0..m).map(|l| if l + 1 == i { 1.0 } else { 0.0 }).collect()
        }
    };
    let rows: Vec<Vec<f64>> = seq.iter().map(|&i| dt(i)).collect();
    leibniz_det_real(&rows)
}

/// Advances `seq` as a base-`base` counter; false after the last value.
fn next_sequence(seq: &mut [usize], base: usize) -> bool {
    for x in seq.iter_mut() {
        *x += 1;
        if *x < base {
            return true;
        }
        *x = 0;
    }
    false
}

pub fn literal_numerator(vs: &[CVector], t: &[f64]) -> C64 {
    let n = vs.len();
    let r = vs[0].dim();
    let m = n - 1;
    let lower = subsets(n, r - 1);
    let minor = |sub: &[usize], a: usize| -> C64 {
        let mut cols: Vec<Vec<C64>> = sub.iter().map(|&i| column(&vs[i])).collect();
        cols.push(column(&vs[a]));
        leibniz_det(&cols)
    };
    let mut total = C64::new(0.0, 0.0);
    let mut idx = vec![0usize; m];
    loop {
        let w = wedge_weight(&idx, m);
        let mut subs = vec![0usize; m];
        loop {
            let mut term = C64::new(w, 0.0);
            for j in 0..m {
                let sub = &lower[subs[j]];
                let tj: f64 = sub.iter().map(|&i| t[i]).product();
                term *= minor(sub, idx[j]).conj() * minor(sub, idx[(j + 1) % m]) * tj;
            }
            total += term;
            if !next_sequence(&mut subs, lower.len()) {
                break;
            }
        }
        if !next_sequence(&mut idx, n) {
            break;
        }
    }
    total
}

pub fn factored_numerator(vs: &[CVector], t: &[f64]) -> C64 {
    let n = vs.len();
    let r = vs[0].dim();
    let m = n - 1;
    let lower = subsets(n, r - 1);
    let minor = |sub: &[usize], a: usize| -> C64 {
        let mut cols: Vec<Vec<C64>> = sub.iter().map(|&i| column(&vs[i])).collect();
        cols.push(column(&vs[a]));
        leibniz_det(&cols)
    };
    // sum over I of t_I conj(det(v_I, v_a)) det(v_I, v_b)
    let mut k = vec![vec![C64::new(0.0, 0.0); n]; n];
    for sub in &lower {
        let tj: f64 = sub.iter().map(|&i| t[i]).product();
        for a in 0..n {
            for b in 0..n {
                k[a][b] += minor(sub, a).conj() * minor(sub, b) * tj;
            }
        }
    }
    let mut total = C64::new(0.0, 0.0);
    let mut seq = vec![0usize; m];
    loop {
        let w = wedge_weight(&seq, m);
        if w != 0.0 {
            let mut prod = C64::new(w, 0.0);
            for j in 0..m {
                prod *= k[seq[j]][seq[(j + 1) % m]];
            }
            total += prod;
        }
        if !next_sequence(&mut seq, n) {
            return total;
        }
    }
}

/// Relative difference with a floor on the scale.
pub fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
}
