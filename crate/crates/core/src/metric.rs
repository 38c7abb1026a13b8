//! Intrinsic metrics on weighted graphs.
//!
//! A metric `ρ` is intrinsic when every vertex satisfies
//! `Σ_{y~x} w(x,y)·ρ(x,y)² ≤ 1`. Edge lengths are assigned per variant and
//! extended to all vertex pairs by shortest paths.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{HgwError, Result};
use crate::graph::Graph;

/// Slack allowed on the intrinsic condition.
pub const INTRINSIC_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricVariant {
    /// `ρ(x,y) = N / √w(x,y)` with `N` the maximum degree.
    Paper,
    /// `ρ(x,y) = 1 / √max(Deg(x), Deg(y))`; intrinsic by construction.
    DegreeNormalized,
}

impl fmt::Display for MetricVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MetricVariant::Paper => "paper",
            MetricVariant::DegreeNormalized => "degree-normalized",
        })
    }
}

impl FromStr for MetricVariant {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "paper" => Ok(MetricVariant::Paper),
            "degree-normalized" => Ok(MetricVariant::DegreeNormalized),
            other => Err(format!("unknown metric `{other}`")),
        }
    }
}

/// Which degree enters the `N` of the paper variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DegreeKind {
    #[default]
    Weighted,
    Unweighted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntrinsicMetric {
    pub variant: MetricVariant,
    /// Edge lengths; zero where there is no edge.
    pub edge_length: DMatrix<f64>,
    /// All-pairs shortest-path distances under `edge_length`.
    pub dist: DMatrix<f64>,
    /// Largest edge length.
    pub jump_size: f64,
    /// `Σ_{y~x} w(x,y)·ρ(x,y)²` per vertex.
    pub vertex_sums: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntrinsicAudit {
    pub passed: bool,
    pub max_vertex_sum: f64,
    pub violating: Vec<usize>,
}

pub fn intrinsic_metric(g: &Graph, variant: MetricVariant) -> Result<IntrinsicMetric> {
    intrinsic_metric_with(g, variant, DegreeKind::Weighted)
}

pub fn intrinsic_metric_with(g: &Graph, variant: MetricVariant, degree: DegreeKind) -> Result<IntrinsicMetric> {
    let n = g.n();
    if n == 0 || !g.is_connected() {
        return Err(HgwError::DisconnectedGraph);
    }
    let deg = g.weighted_degrees();
    let mut edge_length = DMatrix::zeros(n, n);
    match variant {
        MetricVariant::Paper => {
            let big_n = match degree {
                DegreeKind::Weighted => deg.iter().copied().fold(0.0, f64::max),
                DegreeKind::Unweighted => g.unweighted_degrees().into_iter().max().unwrap_or(0) as f64,
            };
            for (i, j, w) in g.edges() {
                let rho = big_n / w.sqrt();
                edge_length[(i, j)] = rho;
                edge_length[(j, i)] = rho;
            }
        }
        MetricVariant::DegreeNormalized => {
            for (i, j, _) in g.edges() {
                let rho = 1.0 / deg[i].max(deg[j]).sqrt();
                edge_length[(i, j)] = rho;
                edge_length[(j, i)] = rho;
            }
        }
    }
    let jump_size = g.edges().map(|(i, j, _)| edge_length[(i, j)]).fold(0.0, f64::max);
    let vertex_sums = (0..n)
        .map(|x| g.neighbors(x).map(|(y, w)| w * edge_length[(x, y)].powi(2)).sum())
        .collect();
    let dist = all_pairs_shortest_paths(g, &edge_length);
    if dist.iter().any(|d| !d.is_finite()) {
        return Err(HgwError::DisconnectedGraph);
    }
    Ok(IntrinsicMetric {
        variant,
        edge_length,
        dist,
        jump_size,
        vertex_sums,
    })
}

/// Audits the intrinsic condition. Never fails.
pub fn verify_intrinsic(m: &IntrinsicMetric) -> IntrinsicAudit {
    let violating: Vec<usize> = m
        .vertex_sums
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > 1.0 + INTRINSIC_TOL)
        .map(|(i, _)| i)
        .collect();
    IntrinsicAudit {
        passed: violating.is_empty(),
        max_vertex_sum: m.vertex_sums.iter().copied().fold(0.0, f64::max),
        violating,
    }
}

#[derive(Copy, Clone, PartialEq)]
struct State {
    cost: f64,
    node: usize,
}

impl Eq for State {}

impl Ord for State {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| self.node.cmp(&other.node))
    }
}

impl PartialOrd for State {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn dijkstra(g: &Graph, lengths: &DMatrix<f64>, source: usize) -> Vec<f64> {
    let n = g.n();
    let mut dist = vec![f64::INFINITY; n];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(State {
        cost: 0.0,
        node: source,
    });
    while let Some(State { cost, node }) = heap.pop() {
        if cost > dist[node] {
            continue;
        }
        for (next, _) in g.neighbors(node) {
            let c = cost + lengths[(node, next)];
            if c < dist[next] {
                dist[next] = c;
                heap.push(State { cost: c, node: next });
            }
        }
    }
    dist
}

/// Shortest-path distances from every source, computed in parallel.
pub fn all_pairs_shortest_paths(g: &Graph, lengths: &DMatrix<f64>) -> DMatrix<f64> {
    let n = g.n();
    let rows: Vec<Vec<f64>> = (0..n).into_par_iter().map(|s| dijkstra(g, lengths, s)).collect();
    let mut d = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    // Symmetrize: paths summed in different orders can differ in the last ulp.
    for i in 0..n {
        for j in (i + 1)..n {
            let m = d[(i, j)].min(d[(j, i)]);
            d[(i, j)] = m;
            d[(j, i)] = m;
        }
    }
    d
}
