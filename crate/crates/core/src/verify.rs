//! Invariant suite run against a single input graph.
//!
//! Each check pairs a closed form with an independent route (matrix
//! exponential, linear solves, quadrature, finite differences, random
//! probes) and records the worst observed discrepancy against its threshold.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::centrality::{centrality_report, information_centrality, mdt_closed_form, mdt_quadrature, TIE_TOL};
use crate::error::{HgwError, Result};
use crate::graph::Graph;
use crate::localization::{verify_localization, zeta, zeta_dt, Target, TimeGrid};
use crate::metric::{intrinsic_metric, verify_intrinsic, MetricVariant};
use crate::oracle::{expm_taylor, ic_oracle};
use crate::spectral::{heat_kernel, SpectralDecomposition};
use crate::wavelet::{
    admissibility_constant, admissibility_quadrature, transform, wavelet_operator, WaveletFrame, DEFAULT_SCALE_COUNT,
};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub module: &'static str,
    pub name: &'static str,
    pub passed: bool,
    /// Worst observed discrepancy (or violation count).
    pub value: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub vertices: usize,
    pub edges: usize,
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub seed: u64,
    pub scale_count: usize,
    pub signal_trials: usize,
    pub psd_trials: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: 42,
            scale_count: DEFAULT_SCALE_COUNT,
            signal_trials: 1000,
            psd_trials: 1000,
        }
    }
}

struct Checks(Vec<Check>);

impl Checks {
    /// Records `value <= threshold`.
    fn le(&mut self, module: &'static str, name: &'static str, value: f64, threshold: f64) {
        self.0.push(Check {
            module,
            name,
            passed: value <= threshold,
            value,
            threshold,
        });
    }
}

fn rel_err(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn max_rel_err(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| rel_err(*x, *y)).fold(0.0, f64::max)
}

fn random_permutation(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

/// Ranking consistency: `ranking` stays nondecreasing under `values` up to `TIE_TOL`.
fn ranking_consistent(ranking: &[usize], values: &[f64]) -> bool {
    ranking
        .windows(2)
        .all(|w| values[w[0]] <= values[w[1]] * (1.0 + TIE_TOL) + f64::MIN_POSITIVE)
}

/// Runs every module's invariants on `g`. Requires a connected graph.
pub fn verify_graph(g: &Graph, opts: &VerifyOptions) -> Result<VerifyReport> {
    if g.n() < 2 || !g.is_connected() {
        return Err(HgwError::DisconnectedGraph);
    }
    let n = g.n();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut c = Checks(Vec::new());
    let lap = g.laplacian();
    let lap_norm = lap.norm();

    // graph-core
    let row_sum = lap.row_iter().map(|r| r.sum().abs()).fold(0.0, f64::max);
    c.le("graph", "laplacian_row_sums", row_sum, 1e-12 * lap_norm);
    let mut worst_psd = 0.0_f64;
    for _ in 0..opts.psd_trials {
        let v = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        let q = v.dot(&(&lap * &v)) / (lap_norm * v.norm_squared());
        worst_psd = worst_psd.max(-q);
    }
    c.le("graph", "laplacian_psd", worst_psd, 1e-10);

    let metric = intrinsic_metric(g, MetricVariant::DegreeNormalized)?;
    let audit = verify_intrinsic(&metric);
    c.le("metric", "intrinsic_condition", audit.max_vertex_sum, 1.0 + 1e-12);
    let mut tri = 0.0_f64;
    let triples = n * n * n;
    let sample = |rng: &mut ChaCha8Rng, i: usize| -> (usize, usize, usize) {
        if triples <= 10_000 {
            (i / (n * n), (i / n) % n, i % n)
        } else {
            (rng.random_range(0..n), rng.random_range(0..n), rng.random_range(0..n))
        }
    };
    for i in 0..triples.min(10_000) {
        let (x, y, z) = sample(&mut rng, i);
        let d = &metric.dist;
        tri = tri.max(d[(x, z)] - d[(x, y)] - d[(y, z)]);
    }
    c.le("metric", "triangle_inequality", tri, 1e-12);
    let asym = (&metric.dist - metric.dist.transpose()).amax() + metric.dist.diagonal().amax();
    c.le("metric", "distance_symmetry", asym, 0.0);

    // spectral
    let d = SpectralDecomposition::from_graph(g)?;
    let lmax = d.lambda_max();
    let phi = d.eigenvectors();
    let residual = (0..n)
        .map(|k| (&lap * d.phi(k) - d.phi(k) * d.lambda(k)).norm())
        .fold(0.0, f64::max);
    c.le("spectral", "eigen_residual", residual, 1e-8 * lmax.max(lap_norm));
    let gram = (phi.transpose() * phi - DMatrix::identity(n, n)).amax();
    c.le("spectral", "orthonormality", gram, 1e-10);
    c.le("spectral", "lambda_0", d.lambda(0).abs(), 1e-10 * lmax.max(1.0));
    let nondecreasing = d.eigenvalues().windows(2).all(|w| w[0] <= w[1]);
    c.le(
        "spectral",
        "eigenvalues_sorted",
        if nondecreasing { 0.0 } else { 1.0 },
        0.0,
    );
    let phi0 = 1.0 / (n as f64).sqrt();
    let phi0_err = d.phi(0).iter().map(|v| (v - phi0).abs()).fold(0.0, f64::max);
    c.le("spectral", "constant_mode", phi0_err, 1e-8);

    let l1 = d.lambda_1().ok_or(HgwError::DisconnectedGraph)?;
    let times = [0.1 / lmax, 1.0 / lmax, 1.0 / l1, 5.0 / l1];
    let mut expm_err = 0.0_f64;
    let mut stoch = 0.0_f64;
    for &t in &times {
        let h = heat_kernel(&d, t)?;
        expm_err = expm_err.max((&h - expm_taylor(&(&lap * -t))).amax());
        stoch = stoch.max(h.row_iter().map(|r| (r.sum() - 1.0).abs()).fold(0.0, f64::max));
    }
    c.le("spectral", "heat_vs_taylor_expm", expm_err, 1e-7);
    c.le("spectral", "heat_row_stochastic", stoch, 1e-10);
    let mut semi = 0.0_f64;
    for _ in 0..8 {
        let (t, u) = (rng.random_range(0.01..5.0), rng.random_range(0.01..5.0));
        let lhs = heat_kernel(&d, t)? * heat_kernel(&d, u)?;
        semi = semi.max((lhs - heat_kernel(&d, t + u)?).amax());
    }
    c.le("spectral", "heat_semigroup", semi, 1e-8);
    let flips: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
    let flipped = d.with_flipped_signs(&flips);
    let t_mid = 1.0 / l1;
    let flip_err = (heat_kernel(&d, t_mid)? - heat_kernel(&flipped, t_mid)?).amax();
    c.le("spectral", "heat_sign_flip_invariance", flip_err, 1e-12);

    // wavelet
    let adm = (admissibility_quadrature() - admissibility_constant()).abs();
    c.le("wavelet", "admissibility_quadrature", adm, 1e-10);
    let mut op_err = 0.0_f64;
    for s in [0.01, 0.1, 1.0, 10.0] {
        let oracle = &lap * heat_kernel(&d, s)? * s;
        op_err = op_err.max((wavelet_operator(&d, s)? - oracle).amax());
    }
    c.le("wavelet", "operator_identity", op_err, 1e-9);
    let mut fd_err = 0.0_f64;
    for &t in &times {
        let h = 1e-5 * t;
        let dh = (heat_kernel(&d, t + h)? - heat_kernel(&d, t - h)?) / (2.0 * h);
        let op = wavelet_operator(&d, t)?;
        fd_err = fd_err.max((&op + dh * t).amax() / op.amax().max(f64::MIN_POSITIVE));
    }
    c.le("wavelet", "time_derivative_identity", fd_err, 1e-5);
    let atom_flip = (wavelet_operator(&d, t_mid)? - wavelet_operator(&flipped, t_mid)?).amax();
    c.le("wavelet", "atom_sign_flip_invariance", atom_flip, 1e-9);

    let frame = WaveletFrame::with_default_scales(&d, opts.scale_count)?;
    let mut frame_slack = 0.0_f64;
    for _ in 0..opts.signal_trials {
        let mut f = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        let mean = f.mean();
        f.add_scalar_mut(-mean);
        let energy = frame.transform(&f)?.norm_squared();
        let norm2 = f.norm_squared();
        let lower = (frame.frame_a * norm2 - energy) / (frame.frame_a * norm2);
        let upper = (energy - frame.frame_b * norm2) / (frame.frame_b * norm2);
        frame_slack = frame_slack.max(lower).max(upper);
    }
    c.le("wavelet", "frame_sandwich", frame_slack, 1e-10);
    let f = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
    let w = transform(&d, frame.scales(), &f)?;
    let mut tr_err = 0.0_f64;
    for (row, &s) in frame.scales().iter().enumerate() {
        let direct = wavelet_operator(&d, s)? * &f;
        tr_err = tr_err.max((w.row(row).transpose() - direct).amax());
    }
    c.le("wavelet", "transform_matches_operator", tr_err, 1e-10);

    // localization
    let mut dt_err = 0.0_f64;
    for &s in &[0.3, 1.0, metric.jump_size] {
        for &t in &[0.05, 0.5, 2.0, 10.0] {
            for &r in &[0.0, 0.2, 1.0, 3.0] {
                let h = 1e-6 * t;
                let fd = (zeta(s, t + h, r)? - zeta(s, t - h, r)?) / (2.0 * h);
                let an = zeta_dt(s, t, r)?;
                let err = if an == 0.0 { fd.abs() } else { rel_err(fd, an) };
                dt_err = dt_err.max(err);
            }
        }
    }
    c.le("localization", "zeta_dt_finite_difference", dt_err, 1e-6);
    let grid = TimeGrid::default_for(&d)?.times()?;
    let heat = verify_localization(&d, &metric, &grid, Target::Heat, opts.seed)?;
    c.le(
        "localization",
        "heat_bound_violations",
        heat.violations.len() as f64,
        0.0,
    );
    let wav = verify_localization(&d, &metric, &grid, Target::Wavelet, opts.seed)?;
    c.le(
        "localization",
        "wavelet_bound_violations",
        wav.violations.len() as f64,
        0.0,
    );

    // centrality
    let mdt = mdt_closed_form(&d)?;
    let mut quad_err = 0.0_f64;
    for (x, &m) in mdt.iter().enumerate() {
        quad_err = quad_err.max(rel_err(mdt_quadrature(&d, x)?.value, m));
    }
    c.le("centrality", "mdt_closed_form_vs_quadrature", quad_err, 1e-6);
    let ic = information_centrality(&d)?;
    c.le(
        "centrality",
        "ic_vs_pseudoinverse",
        max_rel_err(&ic, &ic_oracle(g)?),
        1e-8,
    );
    let report = centrality_report(g, &d)?;
    c.le(
        "centrality",
        "argmin_mdt_equals_argmax_ic",
        if report.sets_agree() { 0.0 } else { 1.0 },
        0.0,
    );
    let mut scale_err = 0.0_f64;
    let mut scale_rank = true;
    for alpha in [0.5, 2.0, 10.0] {
        let gs = g.scaled(alpha)?;
        let ds = SpectralDecomposition::from_graph(&gs)?;
        let rs = centrality_report(&gs, &ds)?;
        let expected: Vec<f64> = mdt.iter().map(|m| m / alpha).collect();
        scale_err = scale_err.max(max_rel_err(&rs.mdt, &expected));
        scale_rank &= rs.tie_set == report.tie_set && ranking_consistent(&report.ranking, &rs.mdt);
    }
    c.le("centrality", "weight_scaling_mdt", scale_err, 1e-9);
    c.le(
        "centrality",
        "weight_scaling_ranking",
        if scale_rank { 0.0 } else { 1.0 },
        0.0,
    );

    // relabeling
    let perm = random_permutation(n, &mut rng);
    let gp = g.permuted(&perm)?;
    let dp = SpectralDecomposition::from_graph(&gp)?;
    let back = |v: Vec<f64>| -> Vec<f64> {
        let mut out = vec![0.0; n];
        for (k, &p) in perm.iter().enumerate() {
            out[p] = v[k];
        }
        out
    };
    let mdt_p = back(mdt_closed_form(&dp)?);
    let ic_p = back(information_centrality(&dp)?);
    c.le("centrality", "relabel_mdt", max_rel_err(&mdt, &mdt_p), 1e-10);
    c.le("centrality", "relabel_ic", max_rel_err(&ic, &ic_p), 1e-10);
    let hp = heat_kernel(&dp, t_mid)?;
    let h = heat_kernel(&d, t_mid)?;
    let relabel_h = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| (hp[(i, j)] - h[(perm[i], perm[j])]).abs())
        .fold(0.0, f64::max);
    c.le("spectral", "relabel_heat_kernel", relabel_h, 1e-9);
    let mp = intrinsic_metric(&gp, MetricVariant::DegreeNormalized)?;
    let relabel_d = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| (mp.dist[(i, j)] - metric.dist[(perm[i], perm[j])]).abs())
        .fold(0.0, f64::max);
    c.le("metric", "relabel_distances", relabel_d, 1e-12);

    Ok(VerifyReport {
        vertices: n,
        edges: g.edge_count(),
        seed: opts.seed,
        checks: c.0,
    })
}
