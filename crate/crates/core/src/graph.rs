//! Undirected weighted graphs, text ingestion, and the combinatorial Laplacian.
//!
//! Vertices carry string labels and are addressed by dense 0-based indices in
//! first-appearance order. Weights live in a symmetric dense matrix with a zero
//! diagonal; a zero entry means "no edge".

use std::collections::{HashMap, VecDeque};
use std::path::Path;

use log::warn;
use nalgebra::DMatrix;

use crate::error::{HgwError, Result};

/// Tolerance used when accepting a `general` Matrix Market file as symmetric.
pub const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    weights: DMatrix<f64>,
    self_loops_dropped: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    EdgeList,
    MatrixMarket,
}

impl InputFormat {
    /// `.mtx` selects Matrix Market, anything else is an edge list.
    pub fn detect(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("mtx") => InputFormat::MatrixMarket,
            _ => InputFormat::EdgeList,
        }
    }
}

/// Incremental builder shared by the text parsers.
struct Builder {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    edges: HashMap<(usize, usize), (f64, usize)>,
    self_loops: usize,
}

impl Builder {
    fn new() -> Self {
        Self {
            labels: Vec::new(),
            index: HashMap::new(),
            edges: HashMap::new(),
            self_loops: 0,
        }
    }

    fn vertex(&mut self, label: &str) -> usize {
        if let Some(&i) = self.index.get(label) {
            return i;
        }
        let i = self.labels.len();
        self.labels.push(label.to_string());
        self.index.insert(label.to_string(), i);
        i
    }

    fn edge(&mut self, line: usize, u: &str, v: &str, w: f64) -> Result<()> {
        if w < 0.0 {
            return Err(HgwError::NegativeWeight {
                line,
                u: u.to_string(),
                v: v.to_string(),
                weight: w,
            });
        }
        if u == v {
            self.self_loops += 1;
            warn!("line {line}: dropping self-loop on `{u}`");
            return Ok(());
        }
        let a = self.vertex(u);
        let b = self.vertex(v);
        let key = (a.min(b), a.max(b));
        match self.edges.get(&key) {
            Some(&(prev, _)) if prev != w => Err(HgwError::ConflictingDuplicateEdge {
                line,
                u: u.to_string(),
                v: v.to_string(),
                first: prev,
                second: w,
            }),
            Some(_) => Ok(()),
            None => {
                self.edges.insert(key, (w, line));
                Ok(())
            }
        }
    }

    fn finish(self) -> Graph {
        let n = self.labels.len();
        let mut weights = DMatrix::zeros(n, n);
        for (&(a, b), &(w, _)) in &self.edges {
            weights[(a, b)] = w;
            weights[(b, a)] = w;
        }
        Graph {
            labels: self.labels,
            index: self.index,
            weights,
            self_loops_dropped: self.self_loops,
        }
    }
}

fn parse_weight(line: usize, tok: &str) -> Result<f64> {
    let w: f64 = tok.parse().map_err(|_| HgwError::MalformedLine {
        line,
        reason: format!("cannot parse weight `{tok}`"),
    })?;
    if !w.is_finite() {
        return Err(HgwError::MalformedLine {
            line,
            reason: format!("weight `{tok}` is not finite"),
        });
    }
    Ok(w)
}

impl Graph {
    /// Builds a graph from labels and a weight matrix, validating symmetry,
    /// nonnegativity and uniqueness of labels. Diagonal entries are dropped.
    pub fn from_weights(labels: Vec<String>, mut weights: DMatrix<f64>) -> Result<Self> {
        let n = labels.len();
        if weights.nrows() != n || weights.ncols() != n {
            return Err(HgwError::DimensionMismatch {
                expected: n,
                got: weights.nrows(),
            });
        }
        let mut index = HashMap::with_capacity(n);
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(HgwError::InvalidGraph(format!("duplicate label `{l}`")));
            }
        }
        let mut self_loops = 0;
        for i in 0..n {
            if weights[(i, i)] != 0.0 {
                self_loops += 1;
                weights[(i, i)] = 0.0;
            }
            for j in 0..n {
                let w = weights[(i, j)];
                if !w.is_finite() {
                    return Err(HgwError::NonFinite { row: i, col: j });
                }
                if w < 0.0 {
                    return Err(HgwError::NegativeWeight {
                        line: 0,
                        u: labels[i].clone(),
                        v: labels[j].clone(),
                        weight: w,
                    });
                }
                if w != weights[(j, i)] {
                    return Err(HgwError::NotSymmetric {
                        row: i,
                        col: j,
                        diff: (w - weights[(j, i)]).abs(),
                    });
                }
            }
        }
        Ok(Self {
            labels,
            index,
            weights,
            self_loops_dropped: self_loops,
        })
    }

    /// Builds a graph from `(u, v, w)` triples with the same merge rules as
    /// the edge-list parser.
    pub fn from_edges<'a, I>(edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, &'a str, f64)>,
    {
        let mut b = Builder::new();
        for (i, (u, v, w)) in edges.into_iter().enumerate() {
            if !w.is_finite() {
                return Err(HgwError::MalformedLine {
                    line: i + 1,
                    reason: "weight is not finite".into(),
                });
            }
            b.edge(i + 1, u, v, w)?;
        }
        Ok(b.finish())
    }

    /// Parses a whitespace-separated `u v w` edge list. `#` starts a comment;
    /// blank lines are ignored. Self-loops are dropped and counted.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut b = Builder::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let toks: Vec<&str> = content.split_whitespace().collect();
            if toks.len() != 3 {
                return Err(HgwError::MalformedLine {
                    line,
                    reason: format!("expected `u v w`, found {} field(s)", toks.len()),
                });
            }
            let w = parse_weight(line, toks[2])?;
            if toks[0] != toks[1] {
                b.vertex(toks[0]);
                b.vertex(toks[1]);
            }
            b.edge(line, toks[0], toks[1], w)?;
        }
        Ok(b.finish())
    }

    /// Parses a Matrix Market `coordinate` file as a weighted adjacency matrix.
    ///
    /// Vertices are labelled `"1"..="N"`. `symmetric` storage is mirrored;
    /// `general` storage must be numerically symmetric within
    /// [`SYMMETRY_TOL`]. `pattern` entries get weight 1.
    pub fn parse_matrix_market(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| HgwError::MalformedLine {
            line: 1,
            reason: "empty file".into(),
        })?;
        let head: Vec<String> = header.split_whitespace().map(|s| s.to_ascii_lowercase()).collect();
        if head.len() != 5 || head[0] != "%%matrixmarket" || head[1] != "matrix" {
            return Err(HgwError::MalformedLine {
                line: 1,
                reason: "expected `%%MatrixMarket matrix coordinate <field> <symmetry>`".into(),
            });
        }
        if head[2] != "coordinate" {
            return Err(HgwError::MalformedLine {
                line: 1,
                reason: format!("unsupported format `{}`", head[2]),
            });
        }
        let pattern = match head[3].as_str() {
            "real" | "integer" | "double" => false,
            "pattern" => true,
            other => {
                return Err(HgwError::MalformedLine {
                    line: 1,
                    reason: format!("unsupported field `{other}`"),
                })
            }
        };
        let symmetric = match head[4].as_str() {
            "symmetric" => true,
            "general" => false,
            other => {
                return Err(HgwError::MalformedLine {
                    line: 1,
                    reason: format!("unsupported symmetry `{other}`"),
                })
            }
        };

        let mut size: Option<(usize, usize)> = None;
        let mut raw = DMatrix::<f64>::zeros(0, 0);
        let mut seen: HashMap<(usize, usize), f64> = HashMap::new();
        for (lineno, l) in lines {
            let line = lineno + 1;
            let l = l.trim();
            if l.is_empty() || l.starts_with('%') {
                continue;
            }
            let toks: Vec<&str> = l.split_whitespace().collect();
            let parse_idx = |tok: &str| -> Result<usize> {
                tok.parse::<usize>().map_err(|_| HgwError::MalformedLine {
                    line,
                    reason: format!("cannot parse index `{tok}`"),
                })
            };
            match size {
                None => {
                    if toks.len() != 3 {
                        return Err(HgwError::MalformedLine {
                            line,
                            reason: "expected size line `rows cols nnz`".into(),
                        });
                    }
                    let (r, c) = (parse_idx(toks[0])?, parse_idx(toks[1])?);
                    parse_idx(toks[2])?;
                    if r != c {
                        return Err(HgwError::MalformedLine {
                            line,
                            reason: format!("adjacency matrix must be square, got {r}x{c}"),
                        });
                    }
                    size = Some((r, c));
                    raw = DMatrix::zeros(r, r);
                }
                Some((n, _)) => {
                    let want = if pattern { 2 } else { 3 };
                    if toks.len() != want {
                        return Err(HgwError::MalformedLine {
                            line,
                            reason: format!("expected {want} fields, found {}", toks.len()),
                        });
                    }
                    let (i, j) = (parse_idx(toks[0])?, parse_idx(toks[1])?);
                    if i == 0 || j == 0 || i > n || j > n {
                        return Err(HgwError::MalformedLine {
                            line,
                            reason: format!("index ({i}, {j}) outside 1..={n}"),
                        });
                    }
                    let w = if pattern { 1.0 } else { parse_weight(line, toks[2])? };
                    if w < 0.0 {
                        return Err(HgwError::NegativeWeight {
                            line,
                            u: i.to_string(),
                            v: j.to_string(),
                            weight: w,
                        });
                    }
                    let (a, b) = (i - 1, j - 1);
                    let key = if symmetric { (a.min(b), a.max(b)) } else { (a, b) };
                    match seen.get(&key) {
                        Some(&prev) if prev != w => {
                            return Err(HgwError::ConflictingDuplicateEdge {
                                line,
                                u: i.to_string(),
                                v: j.to_string(),
                                first: prev,
                                second: w,
                            })
                        }
                        Some(_) => continue,
                        None => {
                            seen.insert(key, w);
                        }
                    }
                    raw[(a, b)] = w;
                    if symmetric {
                        raw[(b, a)] = w;
                    }
                }
            }
        }
        let (n, _) = size.ok_or_else(|| HgwError::MalformedLine {
            line: 1,
            reason: "missing size line".into(),
        })?;
        if !symmetric {
            for i in 0..n {
                for j in (i + 1)..n {
                    let (a, b) = (raw[(i, j)], raw[(j, i)]);
                    let diff = (a - b).abs();
                    if diff > SYMMETRY_TOL * a.abs().max(b.abs()).max(1.0) {
                        return Err(HgwError::NotSymmetric {
                            row: i + 1,
                            col: j + 1,
                            diff,
                        });
                    }
                    let avg = 0.5 * (a + b);
                    raw[(i, j)] = avg;
                    raw[(j, i)] = avg;
                }
            }
        }
        let mut self_loops = 0;
        for i in 0..n {
            if raw[(i, i)] != 0.0 {
                self_loops += 1;
                warn!("dropping self-loop on vertex {}", i + 1);
                raw[(i, i)] = 0.0;
            }
        }
        let labels: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
        let mut g = Graph::from_weights(labels, raw)?;
        g.self_loops_dropped = self_loops;
        Ok(g)
    }

    pub fn parse(text: &str, format: InputFormat) -> Result<Self> {
        match format {
            InputFormat::EdgeList => Self::parse_edge_list(text),
            InputFormat::MatrixMarket => Self::parse_matrix_market(text),
        }
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[(i, j)]
    }

    pub fn self_loops_dropped(&self) -> usize {
        self.self_loops_dropped
    }

    /// Edges `(i, j, w)` with `i < j` and `w > 0`, in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n = self.n();
        (0..n).flat_map(move |i| {
            ((i + 1)..n).filter_map(move |j| {
                let w = self.weights[(i, j)];
                (w > 0.0).then_some((i, j, w))
            })
        })
    }

    pub fn edge_count(&self) -> usize {
        self.edges().count()
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (0..self.n()).filter_map(move |j| {
            let w = self.weights[(i, j)];
            (w > 0.0).then_some((j, w))
        })
    }

    /// Weighted degrees `Deg(x) = Σ_y w(x, y)`.
    pub fn weighted_degrees(&self) -> Vec<f64> {
        self.weights.row_iter().map(|r| r.sum()).collect()
    }

    /// Number of neighbours with positive weight.
    pub fn unweighted_degrees(&self) -> Vec<usize> {
        self.weights
            .row_iter()
            .map(|r| r.iter().filter(|&&w| w > 0.0).count())
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        let n = self.n();
        if n == 0 {
            return false;
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for (v, _) in self.neighbors(u) {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count == n
    }

    /// Combinatorial Laplacian `Δ = D − A`.
    pub fn laplacian(&self) -> DMatrix<f64> {
        let mut l = -self.weights.clone();
        for (i, d) in self.weighted_degrees().into_iter().enumerate() {
            l[(i, i)] = d;
        }
        l
    }

    /// Relabels vertex order: new index `k` holds old vertex `perm[k]`.
    /// Labels travel with their vertices.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.n();
        if perm.len() != n {
            return Err(HgwError::DimensionMismatch {
                expected: n,
                got: perm.len(),
            });
        }
        let mut check = vec![false; n];
        for &p in perm {
            if p >= n || std::mem::replace(&mut check[p], true) {
                return Err(HgwError::InvalidGraph("not a permutation".into()));
            }
        }
        let labels = perm.iter().map(|&p| self.labels[p].clone()).collect();
        let weights = DMatrix::from_fn(n, n, |i, j| self.weights[(perm[i], perm[j])]);
        let mut g = Graph::from_weights(labels, weights)?;
        g.self_loops_dropped = self.self_loops_dropped;
        Ok(g)
    }

    /// Multiplies every weight by `alpha > 0`.
    pub fn scaled(&self, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(HgwError::InvalidGraph(format!(
                "scale factor must be positive, got {alpha}"
            )));
        }
        Graph::from_weights(self.labels.clone(), &self.weights * alpha)
    }
}

/// Reads and parses a graph file.
pub fn load(path: &Path, format: Option<InputFormat>) -> std::result::Result<Graph, LoadError> {
    let text = std::fs::read_to_string(path).map_err(|e| LoadError::Io(e.to_string()))?;
    let fmt = format.unwrap_or_else(|| InputFormat::detect(path));
    Graph::parse(&text, fmt).map_err(LoadError::Parse)
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Parse(#[from] HgwError),
}
