//! Laplacian eigendecomposition and heat-kernel evaluation.

use nalgebra::{DMatrix, DVector, DVectorView, SymmetricEigen};

use crate::error::{HgwError, Result};
use crate::graph::Graph;

/// Symmetry tolerance accepted by [`eigendecompose`], relative to `max(1, ‖L‖_max)`.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Relative threshold separating zero modes from the positive spectrum.
pub const SPECTRAL_GAP_TOL: f64 = 1e-9;

/// Eigenpairs of a graph Laplacian in ascending order.
///
/// Column `k` of `eigenvectors` is `φ_k`. Each eigenvector is signed so that
/// its largest-magnitude entry (lowest index on ties) is positive.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<f64>,
    gap_tol: f64,
    first_positive: usize,
}

impl SpectralDecomposition {
    pub fn from_graph(g: &Graph) -> Result<Self> {
        eigendecompose(&g.laplacian())
    }

    /// Assembles a decomposition from raw parts, sorting and applying the
    /// sign convention. Intended for tests and bindings.
    pub fn from_parts(eigenvalues: Vec<f64>, eigenvectors: DMatrix<f64>) -> Result<Self> {
        let n = eigenvalues.len();
        if eigenvectors.nrows() != n || eigenvectors.ncols() != n {
            return Err(HgwError::DimensionMismatch {
                expected: n,
                got: eigenvectors.ncols(),
            });
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eigenvalues[a].total_cmp(&eigenvalues[b]));
        let values: Vec<f64> = order.iter().map(|&k| eigenvalues[k]).collect();
        let mut vectors = DMatrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            let mut col = eigenvectors.column(src).into_owned();
            fix_sign(&mut col);
            vectors.set_column(dst, &col);
        }
        let lambda_max = values.last().copied().unwrap_or(0.0);
        let gap_tol = SPECTRAL_GAP_TOL * lambda_max.max(1.0);
        let first_positive = values.iter().position(|&l| l > gap_tol).unwrap_or(n);
        Ok(Self {
            eigenvalues: values,
            eigenvectors: vectors,
            gap_tol,
            first_positive,
        })
    }

    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    pub fn lambda(&self, k: usize) -> f64 {
        self.eigenvalues[k]
    }

    pub fn phi(&self, k: usize) -> DVectorView<'_, f64> {
        self.eigenvectors.column(k)
    }

    /// Threshold below which an eigenvalue counts as zero.
    pub fn gap_tol(&self) -> f64 {
        self.gap_tol
    }

    /// Indices of eigenvalues above [`gap_tol`](Self::gap_tol).
    pub fn positive_modes(&self) -> std::ops::Range<usize> {
        self.first_positive..self.n()
    }

    /// Exactly one zero mode, i.e. the graph is connected.
    pub fn connected(&self) -> bool {
        self.first_positive == 1
    }

    /// Smallest positive eigenvalue, if any.
    pub fn lambda_1(&self) -> Option<f64> {
        self.eigenvalues.get(self.first_positive).copied()
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    pub fn require_connected(&self) -> Result<()> {
        if self.connected() {
            Ok(())
        } else {
            Err(HgwError::DisconnectedGraph)
        }
    }

    /// Copy with `φ_k` negated wherever `flip[k]` is set; the sign convention
    /// is deliberately not reapplied.
    pub fn with_flipped_signs(&self, flip: &[bool]) -> Self {
        let mut out = self.clone();
        for (k, &f) in flip.iter().enumerate().take(self.n()) {
            if f {
                let neg = -out.eigenvectors.column(k);
                out.eigenvectors.set_column(k, &neg);
            }
        }
        out
    }

    /// `Φ·diag(f(λ_k))·Φᵀ` summed over all modes, or over positive modes
    /// only when `positive_only` is set.
    pub fn spectral_function<F: Fn(f64) -> f64>(&self, f: F, positive_only: bool) -> DMatrix<f64> {
        let n = self.n();
        let start = if positive_only { self.first_positive } else { 0 };
        let phi = self.eigenvectors.columns(start, n - start);
        let mut scaled = phi.clone_owned();
        for (c, k) in (start..n).enumerate() {
            let fk = f(self.eigenvalues[k]);
            scaled.column_mut(c).scale_mut(fk);
        }
        scaled * phi.transpose()
    }

    /// Spectral coefficients `⟨φ_k, f⟩`.
    pub fn analyze(&self, f: &DVector<f64>) -> Result<DVector<f64>> {
        if f.len() != self.n() {
            return Err(HgwError::DimensionMismatch {
                expected: self.n(),
                got: f.len(),
            });
        }
        Ok(self.eigenvectors.tr_mul(f))
    }
}

fn fix_sign(col: &mut DVector<f64>) {
    let max = col.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if max == 0.0 {
        return;
    }
    // Entries equal in magnitude up to rounding count as ties.
    let pivot = col.iter().position(|v| v.abs() >= max * (1.0 - 1e-10)).unwrap_or(0);
    if col[pivot] < 0.0 {
        col.neg_mut();
    }
}

/// Dense symmetric eigendecomposition of a Laplacian-like matrix.
pub fn eigendecompose(l: &DMatrix<f64>) -> Result<SpectralDecomposition> {
    let n = l.nrows();
    if l.ncols() != n {
        return Err(HgwError::DimensionMismatch {
            expected: n,
            got: l.ncols(),
        });
    }
    let mut scale = 1.0_f64;
    for j in 0..n {
        for i in 0..n {
            let v = l[(i, j)];
            if !v.is_finite() {
                return Err(HgwError::NonFinite { row: i, col: j });
            }
            scale = scale.max(v.abs());
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let diff = (l[(i, j)] - l[(j, i)]).abs();
            if diff > SYMMETRY_TOL * scale {
                return Err(HgwError::NotSymmetric { row: i, col: j, diff });
            }
        }
    }
    if n == 0 {
        return SpectralDecomposition::from_parts(Vec::new(), DMatrix::zeros(0, 0));
    }
    let sym = (l + l.transpose()) * 0.5;
    let max_iter = 10_000 + 100 * n;
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, max_iter).ok_or(HgwError::ConvergenceFailure)?;
    SpectralDecomposition::from_parts(eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

/// Heat kernel `H_t = e^{-tΔ} = Σ_k e^{-tλ_k} φ_k φ_kᵀ`.
pub fn heat_kernel(d: &SpectralDecomposition, t: f64) -> Result<DMatrix<f64>> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(HgwError::NegativeTime(t));
    }
    Ok(d.spectral_function(|l| (-t * l).exp(), false))
}
