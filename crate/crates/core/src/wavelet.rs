//! Hermitian graph wavelets: the kernel `g(x) = x·e^{-x}` applied to the
//! Laplacian at scale `s`, i.e. `g(sΔ) = sΔ·e^{-sΔ}`, the negated time
//! derivative of the heat semigroup at `t = s` scaled by `s`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{HgwError, Result};
use crate::oracle::adaptive_simpson;
use crate::spectral::SpectralDecomposition;

/// Scale count used by the CLI when none is given.
pub const DEFAULT_SCALE_COUNT: usize = 9;

/// `g(x) = x·e^{-x}`. Unimodal on `[0, ∞)` with its peak `e^{-1}` at `x = 1`.
#[inline]
pub fn kernel_g(x: f64) -> f64 {
    x * (-x).exp()
}

/// `∫₀^∞ g(x)²/x dx = ∫₀^∞ x·e^{-2x} dx = 1/4`.
pub const fn admissibility_constant() -> f64 {
    0.25
}

/// Numerical value of the admissibility integral over `[0, 40]`.
pub fn admissibility_quadrature() -> f64 {
    // g(x)²/x written without the division so x = 0 is regular.
    let integrand = |x: f64| x * (-2.0 * x).exp();
    adaptive_simpson(&integrand, 0.0, 40.0, 1e-14)
}

fn check_scale(s: f64) -> Result<()> {
    if s > 0.0 && s.is_finite() {
        Ok(())
    } else {
        Err(HgwError::NonpositiveScale(s))
    }
}

fn check_vertex(d: &SpectralDecomposition, x: usize) -> Result<()> {
    if x < d.n() {
        Ok(())
    } else {
        Err(HgwError::VertexOutOfRange { index: x, n: d.n() })
    }
}

/// Wavelet atom `ψ_{s,x}(y) = Σ_{λ_k>0} g(sλ_k)·φ_k(x)·φ_k(y)`.
pub fn wavelet_atom(d: &SpectralDecomposition, s: f64, x: usize) -> Result<DVector<f64>> {
    check_scale(s)?;
    check_vertex(d, x)?;
    let mut atom = DVector::zeros(d.n());
    for k in d.positive_modes() {
        let phi = d.phi(k);
        atom.axpy(kernel_g(s * d.lambda(k)) * phi[x], &phi, 1.0);
    }
    Ok(atom)
}

/// The operator `g(sΔ)`; column `x` is the atom centred at `x`.
pub fn wavelet_operator(d: &SpectralDecomposition, s: f64) -> Result<DMatrix<f64>> {
    check_scale(s)?;
    Ok(d.spectral_function(|l| kernel_g(s * l), true))
}

/// Wavelet coefficients `W(s_n, x) = ⟨ψ_{s_n,x}, f⟩`, one row per scale.
pub fn transform(d: &SpectralDecomposition, scales: &[f64], f: &DVector<f64>) -> Result<DMatrix<f64>> {
    for &s in scales {
        check_scale(s)?;
    }
    let coeffs = d.analyze(f)?;
    let n = d.n();
    let mut out = DMatrix::zeros(scales.len(), n);
    for (row, &s) in scales.iter().enumerate() {
        let mut w = DVector::zeros(n);
        for k in d.positive_modes() {
            w.axpy(kernel_g(s * d.lambda(k)) * coeffs[k], &d.phi(k), 1.0);
        }
        out.set_row(row, &w.transpose());
    }
    Ok(out)
}

/// Geometric scale ladder placing the peak of `g(sλ)` across `[λ_1, λ_max]`:
/// `s_n = (1/λ_max)·(λ_max/λ_1)^{n/(J-1)}`, or `1/√(λ_1·λ_max)` when `J = 1`.
pub fn default_scales(lambda_1: f64, lambda_max: f64, count: usize) -> Result<Vec<f64>> {
    let valid = lambda_1 > 0.0 && lambda_1.is_finite() && lambda_max.is_finite();
    if !valid || lambda_1 > lambda_max || count == 0 {
        return Err(HgwError::InvalidSpectrumRange {
            lambda_1,
            lambda_max,
            count,
        });
    }
    if count == 1 {
        return Ok(vec![1.0 / (lambda_1 * lambda_max).sqrt()]);
    }
    let ratio = lambda_max / lambda_1;
    Ok((0..count)
        .map(|n| ratio.powf(n as f64 / (count - 1) as f64) / lambda_max)
        .collect())
}

/// `G(λ) = Σ_n g(s_n·λ)²`.
pub fn frame_response(scales: &[f64], lambda: f64) -> f64 {
    scales.iter().map(|&s| kernel_g(s * lambda).powi(2)).sum()
}

/// Extremes `(A, B)` of `G(λ)` over the positive spectrum.
pub fn frame_bounds(d: &SpectralDecomposition, scales: &[f64]) -> Result<(f64, f64)> {
    if scales.is_empty() {
        return Err(HgwError::EmptyScaleSet);
    }
    for &s in scales {
        check_scale(s)?;
    }
    let modes = d.positive_modes();
    if modes.is_empty() {
        return Err(HgwError::InvalidSpectrumRange {
            lambda_1: 0.0,
            lambda_max: d.lambda_max(),
            count: scales.len(),
        });
    }
    Ok(modes
        .map(|k| frame_response(scales, d.lambda(k)))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), g| (a.min(g), b.max(g))))
}

/// A discrete scale set over a fixed decomposition, with its frame bounds.
#[derive(Debug, Clone)]
pub struct WaveletFrame<'a> {
    decomposition: &'a SpectralDecomposition,
    scales: Vec<f64>,
    pub frame_a: f64,
    pub frame_b: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FrameSummary {
    pub scales: Vec<f64>,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
}

impl<'a> WaveletFrame<'a> {
    /// Scales must be positive and strictly monotone.
    pub fn new(d: &'a SpectralDecomposition, scales: Vec<f64>) -> Result<Self> {
        if scales.is_empty() {
            return Err(HgwError::EmptyScaleSet);
        }
        for &s in &scales {
            check_scale(s)?;
        }
        let inc = scales.windows(2).all(|w| w[0] < w[1]);
        let dec = scales.windows(2).all(|w| w[0] > w[1]);
        if !(inc || dec) {
            return Err(HgwError::InvalidScales);
        }
        let (frame_a, frame_b) = frame_bounds(d, &scales)?;
        Ok(Self {
            decomposition: d,
            scales,
            frame_a,
            frame_b,
        })
    }

    /// Frame over [`default_scales`] for the decomposition's spectrum.
    /// Repeated scales (single distinct positive eigenvalue) collapse to one.
    pub fn with_default_scales(d: &'a SpectralDecomposition, count: usize) -> Result<Self> {
        let l1 = d.lambda_1().ok_or(HgwError::DisconnectedGraph)?;
        let mut scales = default_scales(l1, d.lambda_max(), count)?;
        scales.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());
        Self::new(d, scales)
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn decomposition(&self) -> &SpectralDecomposition {
        self.decomposition
    }

    pub fn transform(&self, f: &DVector<f64>) -> Result<DMatrix<f64>> {
        transform(self.decomposition, &self.scales, f)
    }

    /// Least-squares inverse of [`transform`](Self::transform) on the
    /// zero-mean subspace: `f̂_k = Σ_n g(s_nλ_k)·⟨W_n, φ_k⟩ / G(λ_k)`.
    pub fn reconstruct(&self, coeffs: &DMatrix<f64>) -> Result<DVector<f64>> {
        let d = self.decomposition;
        if coeffs.nrows() != self.scales.len() || coeffs.ncols() != d.n() {
            return Err(HgwError::DimensionMismatch {
                expected: self.scales.len() * d.n(),
                got: coeffs.len(),
            });
        }
        let mut out = DVector::zeros(d.n());
        for k in d.positive_modes() {
            let lambda = d.lambda(k);
            let phi = d.phi(k);
            let num: f64 = self
                .scales
                .iter()
                .enumerate()
                .map(|(row, &s)| kernel_g(s * lambda) * coeffs.row(row).transpose().dot(&phi))
                .sum();
            out.axpy(num / frame_response(&self.scales, lambda), &phi, 1.0);
        }
        Ok(out)
    }

    pub fn summary(&self) -> FrameSummary {
        FrameSummary {
            scales: self.scales.clone(),
            a: self.frame_a,
            b: self.frame_b,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::spectral::heat_kernel;
    use approx::assert_relative_eq;

    fn decomp(text: &str) -> SpectralDecomposition {
        SpectralDecomposition::from_graph(&Graph::parse_edge_list(text).unwrap()).unwrap()
    }

    #[test]
    fn kernel_values() {
        assert_eq!(kernel_g(0.0), 0.0);
        assert_relative_eq!(kernel_g(1.0), (-1.0f64).exp(), epsilon = 1e-16);
        let grid: Vec<f64> = (0..=4000).map(|i| i as f64 * 0.001).collect();
        let best = grid
            .iter()
            .copied()
            .max_by(|a, b| kernel_g(*a).total_cmp(&kernel_g(*b)))
            .unwrap();
        assert_relative_eq!(best, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn admissibility() {
        assert_eq!(admissibility_constant(), 0.25);
        assert!((admissibility_quadrature() - 0.25).abs() <= 1e-10);
    }

    #[test]
    fn single_edge_atom() {
        let d = decomp("a b 1");
        for s in [0.1, 0.5, 1.0, 3.0] {
            let a = wavelet_atom(&d, s, 0).unwrap();
            let v = s * (-2.0 * s).exp();
            assert_relative_eq!(a[0], v, epsilon = 1e-14);
            assert_relative_eq!(a[1], -v, epsilon = 1e-14);
        }
        let op = wavelet_operator(&d, 0.5).unwrap();
        let e = 0.5 * (-1.0f64).exp();
        assert_relative_eq!(op, DMatrix::from_row_slice(2, 2, &[e, -e, -e, e]), epsilon = 1e-14);
    }

    #[test]
    fn complete_graph_atom_is_projector_multiple() {
        let d = decomp("a b 1\nb c 1\nc a 1");
        let s = 0.4;
        let a = wavelet_atom(&d, s, 1).unwrap();
        for y in 0..3 {
            let delta = if y == 1 { 1.0 } else { 0.0 };
            let want = 3.0 * s * (-3.0 * s).exp() * (delta - 1.0 / 3.0);
            assert_relative_eq!(a[y], want, epsilon = 1e-13);
        }
        assert!(a.sum().abs() < 1e-12);
    }

    #[test]
    fn operator_matches_s_laplacian_heat() {
        let g = Graph::parse_edge_list("a b 1\nb c 2\nc d 0.5\nd a 1\na c 0.3").unwrap();
        let d = SpectralDecomposition::from_graph(&g).unwrap();
        for s in [0.01, 0.1, 1.0, 10.0] {
            let op = wavelet_operator(&d, s).unwrap();
            let oracle = g.laplacian() * heat_kernel(&d, s).unwrap() * s;
            assert!((op - oracle).amax() <= 1e-9);
        }
        let tiny = wavelet_operator(&d, 1e-8).unwrap();
        assert!(tiny.amax() <= 1e-6 * d.lambda_max());
    }

    #[test]
    fn scale_errors() {
        let d = decomp("a b 1");
        assert_eq!(wavelet_atom(&d, 0.0, 0), Err(HgwError::NonpositiveScale(0.0)));
        assert!(wavelet_operator(&d, -1.0).is_err());
        assert!(matches!(
            wavelet_atom(&d, 1.0, 5),
            Err(HgwError::VertexOutOfRange { .. })
        ));
        let f = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        assert!(matches!(
            transform(&d, &[1.0], &f),
            Err(HgwError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn transform_examples() {
        let d = decomp("a b 1\nb c 1");
        let scales = [0.3, 1.0, 2.0];
        let phi2 = d.phi(2).into_owned();
        let w = transform(&d, &scales, &phi2).unwrap();
        for (n, &s) in scales.iter().enumerate() {
            for x in 0..3 {
                assert_relative_eq!(w[(n, x)], kernel_g(s * d.lambda(2)) * phi2[x], epsilon = 1e-13);
            }
        }
        let c = DVector::from_element(3, 2.5);
        assert!(transform(&d, &scales, &c).unwrap().amax() <= 1e-12);
        let f = DVector::from_vec(vec![0.3, -1.2, 0.8]);
        let w = transform(&d, &scales, &f).unwrap();
        for (n, &s) in scales.iter().enumerate() {
            let oracle = wavelet_operator(&d, s).unwrap() * &f;
            for x in 0..3 {
                assert_relative_eq!(w[(n, x)], oracle[x], epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn default_scale_examples() {
        assert_eq!(default_scales(1.0, 4.0, 3).unwrap(), vec![0.25, 0.5, 1.0]);
        assert_eq!(default_scales(1.0, 4.0, 1).unwrap(), vec![0.5]);
        assert_eq!(default_scales(2.0, 2.0, 4).unwrap(), vec![0.5; 4]);
        assert!(default_scales(0.0, 4.0, 3).is_err());
        assert!(default_scales(5.0, 4.0, 3).is_err());
        assert!(default_scales(1.0, 4.0, 0).is_err());
    }

    #[test]
    fn frame_bound_examples() {
        let d = decomp("a b 1");
        let (a, b) = frame_bounds(&d, &[0.5]).unwrap();
        assert_relative_eq!(a, (-2.0f64).exp(), epsilon = 1e-15);
        assert_relative_eq!(b, (-2.0f64).exp(), epsilon = 1e-15);
        assert_eq!(frame_bounds(&d, &[]), Err(HgwError::EmptyScaleSet));

        let d = decomp("a b 1\nb c 1\nc a 1");
        let s = 0.7;
        let (a, b) = frame_bounds(&d, &[s]).unwrap();
        let want = kernel_g(3.0 * s).powi(2);
        assert_relative_eq!(a, want, epsilon = 1e-14);
        assert_relative_eq!(b, want, epsilon = 1e-14);
    }

    #[test]
    fn frame_rejects_non_monotone_scales() {
        let d = decomp("a b 1\nb c 1");
        assert!(WaveletFrame::new(&d, vec![1.0, 0.5, 2.0]).is_err());
        assert!(WaveletFrame::new(&d, vec![1.0, 1.0]).is_err());
        assert!(WaveletFrame::new(&d, vec![2.0, 1.0]).is_ok());
    }

    #[test]
    fn degenerate_default_frame_collapses() {
        let d = decomp("a b 1\nb c 1\nc a 1");
        let fr = WaveletFrame::with_default_scales(&d, 9).unwrap();
        assert_eq!(fr.scales().len(), 1);
    }

    #[test]
    fn reconstruct_recovers_zero_mean_signal() {
        let d = decomp("a b 1\nb c 2\nc d 1\nd e 0.5\ne a 1");
        let fr = WaveletFrame::with_default_scales(&d, 5).unwrap();
        let mut f = DVector::from_vec(vec![1.0, -0.5, 2.0, 0.25, -1.0]);
        let mean = f.mean();
        f.add_scalar_mut(-mean);
        let w = fr.transform(&f).unwrap();
        let back = fr.reconstruct(&w).unwrap();
        assert!((back - f).amax() < 1e-10);
    }
}
