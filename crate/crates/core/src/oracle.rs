//! Independent numerical routes used to cross-check the spectral closed forms.
//!
//! Nothing here touches an eigendecomposition: the matrix exponential is a
//! scaled Taylor series, the pseudoinverse comes from a Cholesky solve, and
//! integrals use Simpson rules.

use nalgebra::DMatrix;

use crate::error::{HgwError, Result};
use crate::graph::Graph;

/// `e^{A}` by scaling and squaring with a truncated Taylor series.
///
/// `A` is scaled by `2^{-s}` until its 1-norm is at most 1/2; the series is
/// summed until terms drop below machine precision relative to the partial
/// sum, then squared back `s` times.
pub fn expm_taylor(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let norm1 = (0..n)
        .map(|j| a.column(j).iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut squarings = 0u32;
    let mut scale = 1.0;
    while norm1 * scale > 0.5 {
        scale *= 0.5;
        squarings += 1;
    }
    let a_s = a * scale;
    let mut sum = DMatrix::<f64>::identity(n, n);
    let mut term = DMatrix::<f64>::identity(n, n);
    for k in 1..=40 {
        term = &term * &a_s / k as f64;
        sum += &term;
        if term.amax() <= f64::EPSILON * 1e-3 * sum.amax() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
fn cholesky(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = m.nrows();
    let max_diag = (0..n).map(|i| m[(i, i)].abs()).fold(0.0, f64::max);
    let mut l = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let mut d = m[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > 1e-12 * max_diag) {
            return Err(HgwError::SingularSystem);
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in (j + 1)..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Ok(l)
}

/// Solves `L·Lᵀ·x = b` in place.
fn cholesky_solve(l: &DMatrix<f64>, b: &mut [f64]) {
    let n = l.nrows();
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[(i, k)] * b[k];
        }
        b[i] = s / l[(i, i)];
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in (i + 1)..n {
            s -= l[(k, i)] * b[k];
        }
        b[i] = s / l[(i, i)];
    }
}

/// Laplacian pseudoinverse `Δ⁺ = (Δ + J/N)⁻¹ − J/N` via linear solves.
pub fn laplacian_pseudoinverse(g: &Graph) -> Result<DMatrix<f64>> {
    let n = g.n();
    if n == 0 {
        return Err(HgwError::SingularSystem);
    }
    let inv_n = 1.0 / n as f64;
    let m = g.laplacian().add_scalar(inv_n);
    let l = cholesky(&m)?;
    let mut out = DMatrix::zeros(n, n);
    let mut col = vec![0.0; n];
    for j in 0..n {
        col.iter_mut().for_each(|c| *c = 0.0);
        col[j] = 1.0;
        cholesky_solve(&l, &mut col);
        for i in 0..n {
            out[(i, j)] = col[i] - inv_n;
        }
    }
    Ok(out)
}

/// Information centrality from the pseudoinverse diagonal:
/// `IC(x) = (Δ⁺_xx + tr(Δ⁺)/N)⁻¹`.
pub fn ic_oracle(g: &Graph) -> Result<Vec<f64>> {
    let p = laplacian_pseudoinverse(g)?;
    let n = g.n();
    let mean = p.trace() / n as f64;
    Ok((0..n).map(|x| 1.0 / (p[(x, x)] + mean)).collect())
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    recurse(f, a, b, fa, fm, fb, whole, tol, 50)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn expm_of_diagonal() {
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-3.0, 0.0, 1.5]));
        let e = expm_taylor(&a);
        assert_relative_eq!(e[(0, 0)], (-3.0f64).exp(), max_relative = 1e-14);
        assert_relative_eq!(e[(1, 1)], 1.0, max_relative = 1e-14);
        assert_relative_eq!(e[(2, 2)], 1.5f64.exp(), max_relative = 1e-14);
    }

    #[test]
    fn expm_rotation() {
        let th = 2.0;
        let a = DMatrix::from_row_slice(2, 2, &[0.0, -th, th, 0.0]);
        let e = expm_taylor(&a);
        assert_relative_eq!(e[(0, 0)], th.cos(), epsilon = 1e-13);
        assert_relative_eq!(e[(1, 0)], th.sin(), epsilon = 1e-13);
    }

    #[test]
    fn ic_oracle_small_graphs() {
        let g = Graph::parse_edge_list("a b 1").unwrap();
        for v in ic_oracle(&g).unwrap() {
            assert_relative_eq!(v, 2.0, max_relative = 1e-12);
        }
        let g = Graph::parse_edge_list("a b 1\nb c 1\nc a 1").unwrap();
        for v in ic_oracle(&g).unwrap() {
            assert_relative_eq!(v, 2.25, max_relative = 1e-12);
        }
    }

    #[test]
    fn singular_when_disconnected() {
        let g = Graph::parse_edge_list("a b 1\nc d 1").unwrap();
        assert_eq!(ic_oracle(&g), Err(HgwError::SingularSystem));
    }

    #[test]
    fn simpson_polynomial_and_exponential() {
        let v = adaptive_simpson(&|x: f64| x * x, 0.0, 3.0, 1e-12);
        assert_relative_eq!(v, 9.0, max_relative = 1e-12);
        let v = adaptive_simpson(&|x: f64| (-x).exp(), 0.0, 30.0, 1e-13);
        assert_relative_eq!(v, 1.0 - (-30.0f64).exp(), max_relative = 1e-11);
    }
}
