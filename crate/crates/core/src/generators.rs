//! Small deterministic graph families used by tests, the bundled example
//! files, and the verification suite.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;

fn label(i: usize) -> String {
    format!("v{i}")
}

fn build(n: usize, edges: &[(usize, usize, f64)]) -> Graph {
    let labels: Vec<String> = (0..n).map(label).collect();
    let mut w = nalgebra::DMatrix::zeros(n, n);
    for &(i, j, x) in edges {
        w[(i, j)] = x;
        w[(j, i)] = x;
    }
    Graph::from_weights(labels, w).expect("generator produced an invalid graph")
}

/// Complete graph `K_n` with unit weights.
pub fn complete(n: usize) -> Graph {
    let edges: Vec<_> = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j, 1.0))).collect();
    build(n, &edges)
}

/// Path `P_n` with unit weights.
pub fn path(n: usize) -> Graph {
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i, 1.0)).collect();
    build(n, &edges)
}

/// Cycle `C_n` with unit weights.
pub fn cycle(n: usize) -> Graph {
    let mut edges: Vec<_> = (1..n).map(|i| (i - 1, i, 1.0)).collect();
    if n > 2 {
        edges.push((n - 1, 0, 1.0));
    }
    build(n, &edges)
}

/// Star with a centre `v0` and `leaves` unit-weight leaves.
pub fn star(leaves: usize) -> Graph {
    let edges: Vec<_> = (1..=leaves).map(|i| (0, i, 1.0)).collect();
    build(leaves + 1, &edges)
}

/// Random connected graph: a random spanning tree plus each remaining pair
/// with probability `extra`; weights uniform on `[w_min, w_max)`.
pub fn random_connected(n: usize, extra: f64, w_min: f64, w_max: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = nalgebra::DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        let j = rng.random_range(0..i);
        let x = rng.random_range(w_min..w_max);
        w[(i, j)] = x;
        w[(j, i)] = x;
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if w[(i, j)] == 0.0 && rng.random_bool(extra) {
                let x = rng.random_range(w_min..w_max);
                w[(i, j)] = x;
                w[(j, i)] = x;
            }
        }
    }
    Graph::from_weights((0..n).map(label).collect(), w).expect("generator produced an invalid graph")
}

/// The seeded random graph family used by the test suites: `N ∈ [n_min, n_max]`,
/// weights `Uniform(0.1, 2)`.
pub fn random_family(count: usize, n_min: usize, n_max: usize, seed: u64) -> Vec<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.random_range(n_min..=n_max);
            let extra = rng.random_range(0.05..0.5);
            random_connected(n, extra, 0.1, 2.0, rng.random())
        })
        .collect()
}

/// Writes a graph as an edge list, one `u v w` line per edge.
pub fn to_edge_list(g: &Graph) -> String {
    let mut out = String::new();
    for (i, j, w) in g.edges() {
        out.push_str(&format!("{}\t{}\t{:?}\n", g.label(i), g.label(j), w));
    }
    out
}
