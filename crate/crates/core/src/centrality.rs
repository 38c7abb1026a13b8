//! Mean diffusion time (MDT), information centrality (IC), and leader
//! selection.
//!
//! `MDT(x) = ∫₀^∞ ‖ψ_{t,x}‖² dt = (1/4)·Σ_{λ_k>0} φ_k(x)²/λ_k`, since
//! `∫₀^∞ t²λ²e^{-2tλ} dt = 1/(4λ)`. The vertex-independent offset in IC means
//! the vertices minimising MDT are exactly those maximising IC.

use serde::Serialize;

use crate::error::{HgwError, Result};
use crate::graph::Graph;
use crate::spectral::SpectralDecomposition;

/// `∫₀^∞ t²λ²e^{-2tλ} dt · λ`.
pub const MDT_CONSTANT: f64 = 0.25;
/// Relative tolerance for forming argmin/argmax vertex sets.
pub const TIE_TOL: f64 = 1e-9;
/// Relative agreement required between successive quadrature refinements.
pub const QUADRATURE_TOL: f64 = 1e-9;
const MAX_PANELS: usize = 1 << 16;

/// `‖ψ_{t,x}‖² = Σ_{λ_k>0} t²λ_k²e^{-2tλ_k}·φ_k(x)²`.
pub fn wavelet_energy(d: &SpectralDecomposition, t: f64, x: usize) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(HgwError::NegativeTime(t));
    }
    d.require_connected()?;
    if x >= d.n() {
        return Err(HgwError::VertexOutOfRange { index: x, n: d.n() });
    }
    Ok(energy_unchecked(d, t, x))
}

fn energy_unchecked(d: &SpectralDecomposition, t: f64, x: usize) -> f64 {
    let phi = d.eigenvectors();
    d.positive_modes()
        .map(|k| {
            let tl = t * d.lambda(k);
            tl * tl * (-2.0 * tl).exp() * phi[(x, k)].powi(2)
        })
        .sum()
}

/// `Σ_{λ_k>0} φ_k(x)²/λ_k` per vertex: the diagonal of the Laplacian
/// pseudoinverse.
pub fn resistance_diagonal(d: &SpectralDecomposition) -> Result<Vec<f64>> {
    d.require_connected()?;
    let phi = d.eigenvectors();
    Ok((0..d.n())
        .map(|x| d.positive_modes().map(|k| phi[(x, k)].powi(2) / d.lambda(k)).sum())
        .collect())
}

pub fn mdt_closed_form(d: &SpectralDecomposition) -> Result<Vec<f64>> {
    Ok(resistance_diagonal(d)?.into_iter().map(|r| MDT_CONSTANT * r).collect())
}

/// `IC(x) = (R(x) + (1/N)·Σ_y R(y))⁻¹` with `R` the [`resistance_diagonal`].
pub fn information_centrality(d: &SpectralDecomposition) -> Result<Vec<f64>> {
    let r = resistance_diagonal(d)?;
    let mean = r.iter().sum::<f64>() / r.len() as f64;
    Ok(r.into_iter().map(|v| 1.0 / (v + mean)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MdtQuadrature {
    /// Integral of the wavelet energy over `[0, T]`.
    pub value: f64,
    /// Upper end `T = 30/λ_1` of the integration range.
    pub horizon: f64,
    /// Exact integral of the energy over `[T, ∞)`, not included in `value`.
    pub tail_bound: f64,
    /// Simpson panels per dyadic piece at convergence.
    pub panels: usize,
}

/// Dyadic breakpoints `0, b, 2b, 4b, …, T` with `b = 1/(4·λ_max)`, so the
/// fast modes are resolved near the origin without refining the whole range.
fn dyadic_breaks(horizon: f64, lambda_max: f64) -> Vec<f64> {
    let mut breaks = vec![0.0];
    let mut b = (0.25 / lambda_max).min(horizon);
    while b < horizon {
        breaks.push(b);
        b *= 2.0;
    }
    breaks.push(horizon);
    breaks
}

fn composite_simpson<F: Fn(f64) -> f64>(f: &F, breaks: &[f64], panels: usize) -> f64 {
    breaks
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let h = (b - a) / (2 * panels) as f64;
            let mut sum = f(a) + f(b);
            for i in 1..(2 * panels) {
                let weight = if i % 2 == 1 { 4.0 } else { 2.0 };
                sum += weight * f(a + i as f64 * h);
            }
            sum * h / 3.0
        })
        .sum()
}

/// Composite Simpson quadrature of `‖ψ_{t,x}‖²` over `[0, 30/λ_1]`, doubling
/// the panel count until successive estimates agree to [`QUADRATURE_TOL`].
pub fn mdt_quadrature(d: &SpectralDecomposition, x: usize) -> Result<MdtQuadrature> {
    d.require_connected()?;
    if x >= d.n() {
        return Err(HgwError::VertexOutOfRange { index: x, n: d.n() });
    }
    let l1 = d.lambda_1().ok_or(HgwError::DisconnectedGraph)?;
    let horizon = 30.0 / l1;
    let breaks = dyadic_breaks(horizon, d.lambda_max());
    let f = |t: f64| energy_unchecked(d, t, x);

    let mut panels = 4;
    let mut prev = composite_simpson(&f, &breaks, panels);
    loop {
        panels *= 2;
        let next = composite_simpson(&f, &breaks, panels);
        if (next - prev).abs() <= QUADRATURE_TOL * next.abs() {
            prev = next;
            break;
        }
        if panels >= MAX_PANELS {
            return Err(HgwError::QuadratureNonconvergence { vertex: x, panels });
        }
        prev = next;
    }

    let phi = d.eigenvectors();
    let tail_bound = d
        .positive_modes()
        .map(|k| {
            let l = d.lambda(k);
            let lt = l * horizon;
            phi[(x, k)].powi(2) * (-2.0 * lt).exp() * (2.0 * lt * lt + 2.0 * lt + 1.0) / (4.0 * l)
        })
        .sum();
    Ok(MdtQuadrature {
        value: prev,
        horizon,
        tail_bound,
        panels,
    })
}

pub fn mdt_numeric(d: &SpectralDecomposition, x: usize) -> Result<f64> {
    mdt_quadrature(d, x).map(|q| q.value)
}

/// Indices whose value is within relative [`TIE_TOL`] of the extreme.
fn extreme_set(values: &[f64], minimize: bool) -> Vec<usize> {
    let best = if minimize {
        values.iter().copied().fold(f64::INFINITY, f64::min)
    } else {
        values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    };
    values
        .iter()
        .enumerate()
        .filter(|(_, &v)| (v - best).abs() <= TIE_TOL * best.abs())
        .map(|(i, _)| i)
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CentralityReport {
    pub labels: Vec<String>,
    pub mdt: Vec<f64>,
    pub ic: Vec<f64>,
    /// Vertex indices by ascending MDT (label order breaks exact ties).
    pub ranking: Vec<usize>,
    pub leader: String,
    pub leader_index: usize,
    /// Labels with MDT within [`TIE_TOL`] of the minimum, in label order.
    pub tie_set: Vec<String>,
    /// Labels with IC within [`TIE_TOL`] of the maximum, in label order.
    pub ic_argmax_set: Vec<String>,
}

impl CentralityReport {
    /// Whether the argmin-MDT and argmax-IC sets coincide.
    pub fn sets_agree(&self) -> bool {
        self.tie_set == self.ic_argmax_set
    }

    /// 1-based rank of each vertex in `ranking`.
    pub fn ranks(&self) -> Vec<usize> {
        let mut ranks = vec![0; self.ranking.len()];
        for (pos, &v) in self.ranking.iter().enumerate() {
            ranks[v] = pos + 1;
        }
        ranks
    }
}

/// Centrality report for a precomputed decomposition of `g`'s Laplacian.
pub fn centrality_report(g: &Graph, d: &SpectralDecomposition) -> Result<CentralityReport> {
    if g.n() != d.n() {
        return Err(HgwError::DimensionMismatch {
            expected: g.n(),
            got: d.n(),
        });
    }
    let mdt = mdt_closed_form(d)?;
    let ic = information_centrality(d)?;
    let labels = g.labels().to_vec();
    let by_label = |set: Vec<usize>| -> Vec<usize> {
        let mut set = set;
        set.sort_by(|&a, &b| labels[a].cmp(&labels[b]));
        set
    };
    let ties = by_label(extreme_set(&mdt, true));
    let ic_set = by_label(extreme_set(&ic, false));
    let mut ranking: Vec<usize> = (0..g.n()).collect();
    ranking.sort_by(|&a, &b| mdt[a].total_cmp(&mdt[b]).then_with(|| labels[a].cmp(&labels[b])));
    let leader_index = ties[0];
    let names = |s: &[usize]| s.iter().map(|&i| labels[i].clone()).collect::<Vec<_>>();
    Ok(CentralityReport {
        leader: labels[leader_index].clone(),
        leader_index,
        tie_set: names(&ties),
        ic_argmax_set: names(&ic_set),
        labels: labels.clone(),
        mdt,
        ic,
        ranking,
    })
}

/// Picks the vertex of minimal mean diffusion time.
pub fn select_leader(g: &Graph) -> Result<CentralityReport> {
    if !g.is_connected() {
        return Err(HgwError::DisconnectedGraph);
    }
    let d = SpectralDecomposition::from_graph(g)?;
    centrality_report(g, &d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::wavelet::wavelet_atom;
    use approx::assert_relative_eq;

    fn decomp(g: &Graph) -> SpectralDecomposition {
        SpectralDecomposition::from_graph(g).unwrap()
    }

    #[test]
    fn energy_examples() {
        let g = Graph::parse_edge_list("a b 1").unwrap();
        let d = decomp(&g);
        assert_eq!(wavelet_energy(&d, 0.0, 0).unwrap(), 0.0);
        for t in [0.1_f64, 0.5, 2.0] {
            let want = 2.0 * t * t * (-4.0 * t).exp();
            assert_relative_eq!(wavelet_energy(&d, t, 1).unwrap(), want, max_relative = 1e-13);
        }
        let g = generators::random_connected(9, 0.3, 0.1, 2.0, 3);
        let d = decomp(&g);
        for x in 0..9 {
            let atom = wavelet_atom(&d, 0.8, x).unwrap();
            assert!((wavelet_energy(&d, 0.8, x).unwrap() - atom.norm_squared()).abs() <= 1e-10);
        }
    }

    #[test]
    fn closed_form_examples() {
        let d = decomp(&Graph::parse_edge_list("a b 1").unwrap());
        for v in mdt_closed_form(&d).unwrap() {
            assert_relative_eq!(v, 0.0625, epsilon = 1e-14);
        }
        for v in information_centrality(&d).unwrap() {
            assert_relative_eq!(v, 2.0, epsilon = 1e-13);
        }
        let d = decomp(&generators::complete(3));
        for v in mdt_closed_form(&d).unwrap() {
            assert_relative_eq!(v, 1.0 / 18.0, epsilon = 1e-14);
        }
        for v in information_centrality(&d).unwrap() {
            assert_relative_eq!(v, 2.25, epsilon = 1e-13);
        }
        let mdt = mdt_closed_form(&decomp(&generators::path(3))).unwrap();
        assert!(mdt[1] < mdt[0] && mdt[1] < mdt[2]);
    }

    #[test]
    fn quadrature_matches_closed_form() {
        let d = decomp(&Graph::parse_edge_list("a b 1").unwrap());
        assert!((mdt_numeric(&d, 0).unwrap() - 0.0625).abs() <= 1e-8);
        let d = decomp(&generators::complete(3));
        assert!((mdt_numeric(&d, 2).unwrap() - 1.0 / 18.0).abs() <= 1e-8);
        let q = mdt_quadrature(&d, 0).unwrap();
        assert!(q.tail_bound < 1e-20);
    }

    #[test]
    fn disconnected_rejected() {
        let g = Graph::parse_edge_list("a b 1\nc d 1").unwrap();
        let d = decomp(&g);
        assert_eq!(mdt_closed_form(&d), Err(HgwError::DisconnectedGraph));
        assert_eq!(information_centrality(&d), Err(HgwError::DisconnectedGraph));
        assert_eq!(mdt_numeric(&d, 0), Err(HgwError::DisconnectedGraph));
        assert_eq!(wavelet_energy(&d, 1.0, 0), Err(HgwError::DisconnectedGraph));
        assert_eq!(select_leader(&g), Err(HgwError::DisconnectedGraph));
    }

    #[test]
    fn leader_examples() {
        let r = select_leader(&generators::star(3)).unwrap();
        assert_eq!(r.leader, "v0");
        assert_eq!(r.tie_set, ["v0"]);
        assert!(r.sets_agree());

        let r = select_leader(&generators::complete(5)).unwrap();
        assert_eq!(r.tie_set.len(), 5);
        assert_eq!(r.leader, "v0");
        assert!(r.sets_agree());

        let r = select_leader(&generators::path(3)).unwrap();
        assert_eq!(r.leader, "v1");
        assert_eq!(r.ranks()[1], 1);
    }

    #[test]
    fn lexicographic_tie_break() {
        let g = Graph::parse_edge_list("zeta alpha 1\nalpha mid 1\nmid zeta 1").unwrap();
        let r = select_leader(&g).unwrap();
        assert_eq!(r.leader, "alpha");
        assert_eq!(r.tie_set, ["alpha", "mid", "zeta"]);
    }
}
