use crate::linalg::C64;

/// Polynomial (Neville) extrapolation of samples `(x_i, y_i)` to `x = 0`.
///
/// With an ε-ladder this is Richardson extrapolation for an expansion in
/// integer powers of ε.
pub fn to_zero(xs: &[f64], ys: &[C64]) -> C64 {
    assert_eq!(xs.len(), ys.len());
    assert!(!xs.is_empty());
    let mut p = ys.to_vec();
    let n = xs.len();
    for level in 1..n {
        for i in 0..n - level {
            let (xi, xj) = (xs[i], xs[i + level]);
            p[i] = (p[i + 1] * xi - p[i] * xj) / (xi - xj);
        }
    }
    p[0]
}
