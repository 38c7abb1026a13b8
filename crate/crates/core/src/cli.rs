//! `hgw` command-line interface.
//!
//! Exit codes: 0 success, 1 a verification found a violation, 2 usage error,
//! 3 input error.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DVector;
use serde::Serialize;
use serde_json::json;

use crate::centrality::centrality_report;
use crate::error::HgwError;
use crate::graph::{self, Graph, InputFormat};
use crate::localization::{verify_localization, Target, TimeGrid, DEFAULT_TIME_POINTS};
use crate::metric::{intrinsic_metric_with, verify_intrinsic, DegreeKind, MetricVariant};
use crate::spectral::{heat_kernel, SpectralDecomposition};
use crate::verify::{verify_graph, VerifyOptions};
use crate::wavelet::{wavelet_atom, WaveletFrame, DEFAULT_SCALE_COUNT};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "hgw",
    version,
    about = "Hermitian graph wavelets, localization bounds and diffusion-time centrality"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub config: RunConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Auto,
    Edgelist,
    Matrixmarket,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricArg {
    Paper,
    DegreeNormalized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DegreeArg {
    Weighted,
    Unweighted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TargetArg {
    Heat,
    Wavelet,
}

/// Options shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Input file format; `auto` picks Matrix Market for `.mtx`.
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Auto)]
    pub input_format: FormatArg,
    #[arg(long, global = true, value_enum, default_value_t = MetricArg::DegreeNormalized)]
    pub metric: MetricArg,
    /// Degree used for `N` in the `paper` metric.
    #[arg(long, global = true, value_enum, default_value_t = DegreeArg::Weighted)]
    pub paper_degree: DegreeArg,
    /// Number of wavelet scales.
    #[arg(long, global = true, default_value_t = DEFAULT_SCALE_COUNT)]
    pub scales: usize,
    /// Smallest sweep time (default 0.01/λ_max).
    #[arg(long, global = true)]
    pub tmin: Option<f64>,
    /// Largest sweep time (default 10/λ_1).
    #[arg(long, global = true)]
    pub tmax: Option<f64>,
    #[arg(long, global = true, default_value_t = DEFAULT_TIME_POINTS)]
    pub tpoints: usize,
    /// Space sweep times linearly instead of logarithmically.
    #[arg(long, global = true)]
    pub linear_times: bool,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Graph summary and intrinsic-metric audit.
    Info { input: PathBuf },
    /// Laplacian eigenvalues (`k,lambda`).
    Spectrum {
        input: PathBuf,
        /// Also write eigenvectors as a dense CSV matrix.
        #[arg(long)]
        eigenvectors: Option<PathBuf>,
    },
    /// Heat kernel H_t.
    Heat {
        input: PathBuf,
        #[arg(long)]
        t: f64,
    },
    /// Wavelet atom ψ_{s,x} (`vertex,value`).
    Wavelet {
        input: PathBuf,
        #[arg(long)]
        scale: f64,
        #[arg(long)]
        vertex: String,
    },
    /// Wavelet coefficients of a signal (`scale,vertex,value`).
    Transform {
        input: PathBuf,
        /// Signal file: one `label value` pair per line.
        #[arg(long)]
        signal: PathBuf,
    },
    /// Default scale set and frame bounds.
    Frame { input: PathBuf },
    /// Empirical check of the heat-kernel or wavelet decay bound.
    Localize {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = TargetArg::Heat)]
        target: TargetArg,
        /// Write every sample as CSV (`t,x,y,r,actual,bound,ratio`).
        #[arg(long)]
        samples: Option<PathBuf>,
    },
    /// Mean diffusion time and information centrality per vertex.
    Centrality { input: PathBuf },
    /// Print the selected leader label.
    Leader { input: PathBuf },
    /// Run every invariant check on the graph.
    Verify { input: PathBuf },
}

impl Command {
    fn input(&self) -> &Path {
        match self {
            Command::Info { input }
            | Command::Spectrum { input, .. }
            | Command::Heat { input, .. }
            | Command::Wavelet { input, .. }
            | Command::Transform { input, .. }
            | Command::Frame { input }
            | Command::Localize { input, .. }
            | Command::Centrality { input }
            | Command::Leader { input }
            | Command::Verify { input } => input,
        }
    }
}

/// Formats with 17 significant digits, fixed notation for moderate exponents.
pub fn fmt_num(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{x:.16e}");
    let exp: i32 = sci.rsplit('e').next().and_then(|e| e.parse().ok()).unwrap_or(0);
    if (-5..17).contains(&exp) {
        format!("{:.*}", (16 - exp) as usize, x)
    } else {
        sci
    }
}

enum Failure {
    Usage(String),
    Input(String),
}

impl From<HgwError> for Failure {
    fn from(e: HgwError) -> Self {
        Failure::Input(e.to_string())
    }
}

struct Outcome {
    body: String,
    violation: bool,
}

impl Outcome {
    fn ok(body: String) -> Self {
        Self { body, violation: false }
    }
}

fn json_body<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serialization");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct VertexRow<'a> {
    label: &'a str,
    mdt: f64,
    ic: f64,
    rank: usize,
}

#[derive(Serialize)]
struct CentralityJson<'a> {
    vertices: Vec<VertexRow<'a>>,
    leader: &'a str,
    tie_set: &'a [String],
}

fn load(path: &Path, fmt: FormatArg) -> Result<Graph, Failure> {
    let fmt = match fmt {
        FormatArg::Auto => None,
        FormatArg::Edgelist => Some(InputFormat::EdgeList),
        FormatArg::Matrixmarket => Some(InputFormat::MatrixMarket),
    };
    graph::load(path, fmt).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, body: &str) -> Result<(), Failure> {
    std::fs::write(path, body).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn read_signal(path: &Path, g: &Graph) -> Result<DVector<f64>, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let mut values = vec![None; g.n()];
    let mut first = true;
    for (lineno, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .collect();
        let bad = |msg: String| Failure::Input(format!("{}:{}: {msg}", path.display(), lineno + 1));
        if toks.len() != 2 {
            return Err(bad("expected `label value`".into()));
        }
        let v: f64 = match toks[1].parse() {
            Ok(v) => v,
            Err(_) if first => {
                first = false;
                continue;
            }
            Err(_) => return Err(bad(format!("cannot parse value `{}`", toks[1]))),
        };
        first = false;
        let i = g
            .index_of(toks[0])
            .ok_or_else(|| bad(format!("unknown vertex `{}`", toks[0])))?;
        if values[i].replace(v).is_some() {
            return Err(bad(format!("vertex `{}` given twice", toks[0])));
        }
    }
    let missing: Vec<&str> = values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_none())
        .map(|(i, _)| g.label(i))
        .collect();
    if !missing.is_empty() {
        return Err(Failure::Input(format!(
            "{}: no value for vertices {}",
            path.display(),
            missing.join(", ")
        )));
    }
    Ok(DVector::from_iterator(g.n(), values.into_iter().flatten()))
}

fn metric_of(cfg: &RunConfig) -> (MetricVariant, DegreeKind) {
    let v = match cfg.metric {
        MetricArg::Paper => MetricVariant::Paper,
        MetricArg::DegreeNormalized => MetricVariant::DegreeNormalized,
    };
    let k = match cfg.paper_degree {
        DegreeArg::Weighted => DegreeKind::Weighted,
        DegreeArg::Unweighted => DegreeKind::Unweighted,
    };
    (v, k)
}

fn unsupported(cmd: &str, fmt: OutputFormat) -> Failure {
    Failure::Usage(format!("`{cmd}` does not support --format {fmt:?}").to_lowercase())
}

fn execute(cmd: &Command, cfg: &RunConfig, err: &mut dyn Write) -> Result<Outcome, Failure> {
    if cfg.scales == 0 {
        return Err(Failure::Usage("--scales must be at least 1".into()));
    }
    if cfg.tpoints < 2 {
        return Err(Failure::Usage("--tpoints must be at least 2".into()));
    }
    if cfg.tmin.is_some_and(|t| !(t > 0.0)) {
        return Err(Failure::Usage("--tmin must be positive".into()));
    }
    let g = load(cmd.input(), cfg.input_format)?;
    if g.self_loops_dropped() > 0 {
        let _ = writeln!(err, "warning: dropped {} self-loop(s)", g.self_loops_dropped());
    }
    let fmt = cfg.format;
    match cmd {
        Command::Info { .. } => {
            let d = SpectralDecomposition::from_graph(&g)?;
            let (variant, kind) = metric_of(cfg);
            let audit = if g.is_connected() {
                let m = intrinsic_metric_with(&g, variant, kind)?;
                let a = verify_intrinsic(&m);
                Some(json!({
                    "variant": variant,
                    "jump_size": m.jump_size,
                    "intrinsic": a.passed,
                    "max_vertex_sum": a.max_vertex_sum,
                    "violating": a.violating.iter().map(|&i| g.label(i)).collect::<Vec<_>>(),
                }))
            } else {
                None
            };
            let info = json!({
                "vertices": g.n(),
                "edges": g.edge_count(),
                "self_loops_dropped": g.self_loops_dropped(),
                "connected": d.connected(),
                "lambda_1": d.lambda_1(),
                "lambda_max": d.lambda_max(),
                "metric": audit,
            });
            match fmt.unwrap_or(OutputFormat::Json) {
                OutputFormat::Json => Ok(Outcome::ok(json_body(&info))),
                f => Err(unsupported("info", f)),
            }
        }
        Command::Spectrum { eigenvectors, .. } => {
            let d = SpectralDecomposition::from_graph(&g)?;
            if let Some(path) = eigenvectors {
                let mut s = String::from("vertex");
                for k in 0..d.n() {
                    let _ = write!(s, ",phi_{k}");
                }
                s.push('\n');
                for x in 0..d.n() {
                    s.push_str(g.label(x));
                    for k in 0..d.n() {
                        let _ = write!(s, ",{}", fmt_num(d.eigenvectors()[(x, k)]));
                    }
                    s.push('\n');
                }
                write_file(path, &s)?;
            }
            match fmt.unwrap_or(OutputFormat::Csv) {
                OutputFormat::Csv => {
                    let mut s = String::from("k,lambda\n");
                    for (k, l) in d.eigenvalues().iter().enumerate() {
                        let _ = writeln!(s, "{k},{}", fmt_num(*l));
                    }
                    Ok(Outcome::ok(s))
                }
                OutputFormat::Json => Ok(Outcome::ok(json_body(&json!({
                    "eigenvalues": d.eigenvalues(),
                    "connected": d.connected(),
                })))),
            }
        }
        Command::Heat { t, .. } => {
            let d = SpectralDecomposition::from_graph(&g)?;
            let h = heat_kernel(&d, *t)?;
            match fmt.unwrap_or(OutputFormat::Csv) {
                OutputFormat::Csv => {
                    let mut s = String::from("x,y,value\n");
                    for i in 0..g.n() {
                        for j in 0..g.n() {
                            let _ = writeln!(s, "{},{},{}", g.label(i), g.label(j), fmt_num(h[(i, j)]));
                        }
                    }
                    Ok(Outcome::ok(s))
                }
                OutputFormat::Json => {
                    let rows: Vec<Vec<f64>> = h.row_iter().map(|r| r.iter().copied().collect()).collect();
                    Ok(Outcome::ok(json_body(&json!({
                        "t": t, "labels": g.labels(), "matrix": rows,
                    }))))
                }
            }
        }
        Command::Wavelet { scale, vertex, .. } => {
            let x = g
                .index_of(vertex)
                .ok_or_else(|| Failure::Input(HgwError::UnknownVertex(vertex.clone()).to_string()))?;
            let d = SpectralDecomposition::from_graph(&g)?;
            let atom = wavelet_atom(&d, *scale, x)?;
            match fmt.unwrap_or(OutputFormat::Csv) {
                OutputFormat::Csv => {
                    let mut s = String::from("vertex,value\n");
                    for (i, v) in atom.iter().enumerate() {
                        let _ = writeln!(s, "{},{}", g.label(i), fmt_num(*v));
                    }
                    Ok(Outcome::ok(s))
                }
                OutputFormat::Json => {
                    let values: Vec<_> = atom
                        .iter()
                        .enumerate()
                        .map(|(i, v)| json!({"vertex": g.label(i), "value": v}))
                        .collect();
                    Ok(Outcome::ok(json_body(&json!({
                        "scale": scale, "center": vertex, "values": values,
                    }))))
                }
            }
        }
        Command::Transform { signal, .. } => {
            let f = read_signal(signal, &g)?;
            let d = SpectralDecomposition::from_graph(&g)?;
            let frame = WaveletFrame::with_default_scales(&d, cfg.scales)?;
            let w = frame.transform(&f)?;
            match fmt.unwrap_or(OutputFormat::Csv) {
                OutputFormat::Csv => {
                    let mut s = String::from("scale,vertex,value\n");
                    for (n, sc) in frame.scales().iter().enumerate() {
                        for x in 0..g.n() {
                            let _ = writeln!(s, "{},{},{}", fmt_num(*sc), g.label(x), fmt_num(w[(n, x)]));
                        }
                    }
                    Ok(Outcome::ok(s))
                }
                OutputFormat::Json => {
                    let rows: Vec<Vec<f64>> = w.row_iter().map(|r| r.iter().copied().collect()).collect();
                    Ok(Outcome::ok(json_body(&json!({
                        "scales": frame.scales(), "labels": g.labels(), "coefficients": rows,
                    }))))
                }
            }
        }
        Command::Frame { .. } => {
            let d = SpectralDecomposition::from_graph(&g)?;
            let frame = WaveletFrame::with_default_scales(&d, cfg.scales)?;
            match fmt.unwrap_or(OutputFormat::Json) {
                OutputFormat::Json => Ok(Outcome::ok(json_body(&frame.summary()))),
                f => Err(unsupported("frame", f)),
            }
        }
        Command::Localize { target, samples, .. } => {
            let d = SpectralDecomposition::from_graph(&g)?;
            d.require_connected()?;
            let (variant, kind) = metric_of(cfg);
            let m = intrinsic_metric_with(&g, variant, kind)?;
            let mut grid = TimeGrid::default_for(&d)?;
            grid.min = cfg.tmin.unwrap_or(grid.min);
            grid.max = cfg.tmax.unwrap_or(grid.max);
            grid.points = cfg.tpoints;
            grid.log_spaced = !cfg.linear_times;
            let times = grid.times()?;
            let target = match target {
                TargetArg::Heat => Target::Heat,
                TargetArg::Wavelet => Target::Wavelet,
            };
            let report = verify_localization(&d, &m, &times, target, cfg.seed)?;
            for w in &report.warnings {
                let _ = writeln!(err, "warning: {w}");
            }
            let csv = || {
                let mut s = String::from("t,x,y,r,actual,bound,ratio\n");
                for smp in &report.samples {
                    let _ = writeln!(
                        s,
                        "{},{},{},{},{},{},{}",
                        fmt_num(smp.t),
                        g.label(smp.x),
                        g.label(smp.y),
                        fmt_num(smp.r),
                        fmt_num(smp.actual),
                        fmt_num(smp.bound),
                        fmt_num(smp.ratio)
                    );
                }
                s
            };
            if let Some(path) = samples {
                write_file(path, &csv())?;
            }
            let body = match fmt.unwrap_or(OutputFormat::Json) {
                OutputFormat::Json => json_body(&report.summary()),
                OutputFormat::Csv => csv(),
            };
            Ok(Outcome {
                body,
                violation: !report.passed(),
            })
        }
        Command::Centrality { .. } => {
            let d = SpectralDecomposition::from_graph(&g)?;
            let r = centrality_report(&g, &d)?;
            let ranks = r.ranks();
            if !r.sets_agree() {
                let _ = writeln!(
                    err,
                    "warning: argmin-MDT set {:?} differs from argmax-IC set {:?}",
                    r.tie_set, r.ic_argmax_set
                );
            }
            let body = match fmt.unwrap_or(OutputFormat::Json) {
                OutputFormat::Json => {
                    let vertices = (0..g.n())
                        .map(|i| VertexRow {
                            label: g.label(i),
                            mdt: r.mdt[i],
                            ic: r.ic[i],
                            rank: ranks[i],
                        })
                        .collect();
                    json_body(&CentralityJson {
                        vertices,
                        leader: &r.leader,
                        tie_set: &r.tie_set,
                    })
                }
                OutputFormat::Csv => {
                    let mut s = String::from("label,mdt,ic,rank\n");
                    for (i, rank) in ranks.iter().enumerate() {
                        let _ = writeln!(s, "{},{},{},{rank}", g.label(i), fmt_num(r.mdt[i]), fmt_num(r.ic[i]));
                    }
                    s
                }
            };
            Ok(Outcome {
                body,
                violation: !r.sets_agree(),
            })
        }
        Command::Leader { .. } => {
            let d = SpectralDecomposition::from_graph(&g)?;
            let r = centrality_report(&g, &d)?;
            if r.tie_set.len() > 1 {
                let _ = writeln!(err, "tie set of size {}: {}", r.tie_set.len(), r.tie_set.join(" "));
            }
            Ok(Outcome::ok(format!("{}\n", r.leader)))
        }
        Command::Verify { .. } => {
            let opts = VerifyOptions {
                seed: cfg.seed,
                scale_count: cfg.scales,
                ..Default::default()
            };
            let report = verify_graph(&g, &opts)?;
            for c in report.failures() {
                let _ = writeln!(err, "FAIL {}/{}: {} > {}", c.module, c.name, c.value, c.threshold);
            }
            let body = match fmt.unwrap_or(OutputFormat::Json) {
                OutputFormat::Json => json_body(&report),
                OutputFormat::Csv => {
                    let mut s = String::from("module,check,passed,value,threshold\n");
                    for c in &report.checks {
                        let _ = writeln!(
                            s,
                            "{},{},{},{},{}",
                            c.module,
                            c.name,
                            c.passed,
                            fmt_num(c.value),
                            fmt_num(c.threshold)
                        );
                    }
                    s
                }
            };
            Ok(Outcome {
                body,
                violation: !report.passed(),
            })
        }
    }
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = out.write_all(text.as_bytes());
            } else {
                let _ = err.write_all(text.as_bytes());
            }
            return code;
        }
    };
    match execute(&cli.command, &cli.config, err) {
        Ok(outcome) => {
            let written = match &cli.config.output {
                Some(path) => std::fs::write(path, &outcome.body).map_err(|e| format!("{}: {e}", path.display())),
                None => out.write_all(outcome.body.as_bytes()).map_err(|e| e.to_string()),
            };
            if let Err(e) = written {
                let _ = writeln!(err, "error: {e}");
                return EXIT_INPUT;
            }
            if outcome.violation {
                EXIT_VIOLATION
            } else {
                EXIT_OK
            }
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "usage error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Input(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_INPUT
        }
    }
}
