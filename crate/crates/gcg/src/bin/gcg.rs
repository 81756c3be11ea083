//! Command-line front end: verification suites, graph bases, differential
//! matrices and dimension tables.
//!
//! Exit codes: 0 when every check passes, 1 when some check fails, 2 for
//! configuration and I/O errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use serde::Serialize;

use gcg::cache::t_dims;
use gcg::gc::{enumerate_graphs, Bounds, Gc};
use gcg::graph::{Graph, RawGraph};
use gcg::grt::{GrtAlgebras, Variant};
use gcg::linalg::fmt_rational;
use gcg::report::{render_rows, write_output, Format, Report};
use gcg::verify::{run, Suite, SuiteConfig};

#[derive(Parser)]
#[command(name = "gcg", version, about = "Exact checks for decorated graph complexes and related Lie algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites and write a report.
    Verify {
        /// Comma-separated suite names, or `all`.
        #[arg(long, default_value = "all")]
        suite: String,
        #[command(flatten)]
        common: Common,
    },
    /// List the graph classes of one degree within the bounds.
    Basis {
        #[arg(long, allow_hyphen_values = true)]
        degree: i32,
        #[command(flatten)]
        common: Common,
    },
    /// Matrix of the twisted differential from one degree to the next.
    Diff {
        #[arg(long, allow_hyphen_values = true)]
        degree: i32,
        #[command(flatten)]
        common: Common,
    },
    /// Dimension tables.
    Table {
        #[arg(long, value_enum)]
        kind: TableKind,
        /// Shorthand for `--variant nonframed`.
        #[arg(long)]
        nonframed: bool,
        /// Degree for `--kind rank`; all degrees present when omitted.
        #[arg(long, allow_hyphen_values = true)]
        degree: Option<i32>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TableKind {
    /// Z, B and r dimensions by weight.
    Rg,
    /// Dimensions of t_(g)(n) by weight.
    Tg,
    /// Truncated rank data of the twisted differential.
    Rank,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum VariantArg {
    Framed,
    Nonframed,
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 1)]
    g: u8,
    #[arg(long, default_value_t = 1)]
    n: u8,
    #[arg(long, value_enum, default_value = "framed")]
    variant: VariantArg,
    #[arg(long)]
    tadpoles: bool,
    /// Vertex bound.
    #[arg(long = "V", default_value_t = 3)]
    vertices: usize,
    /// Edge bound.
    #[arg(long = "E", default_value_t = 4)]
    edges: usize,
    /// Decoration bound.
    #[arg(long = "D", default_value_t = 4)]
    decorations: usize,
    #[arg(long, default_value_t = 4)]
    max_weight: usize,
    /// Output file; stdout when omitted or `-`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "json")]
    format: Format,
    /// Worker threads; all cores when omitted.
    #[arg(long)]
    jobs: Option<usize>,
    /// Seed for sampled checks.
    #[arg(long, default_value_t = SuiteConfig::default().seed)]
    seed: u64,
}

impl Common {
    fn config(&self, nonframed: bool) -> SuiteConfig {
        SuiteConfig {
            g: self.g,
            n: self.n,
            tadpoles: self.tadpoles,
            variant: if nonframed || self.variant == VariantArg::Nonframed {
                Variant::Nonframed
            } else {
                Variant::Framed
            },
            bounds: Bounds { vertices: self.vertices, edges: self.edges, decorations: self.decorations },
            max_weight: self.max_weight,
            seed: self.seed,
        }
    }
}

/// Outcome of a command that ran to completion.
enum Outcome {
    Passed,
    Failed,
}

type CmdResult = Result<Outcome, String>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .target(env_logger::Target::Stderr)
        .init();
    let cli = Cli::parse();
    let common = match &cli.command {
        Command::Verify { common, .. }
        | Command::Basis { common, .. }
        | Command::Diff { common, .. }
        | Command::Table { common, .. } => common,
    };
    if let Some(j) = common.jobs {
        if j == 0 {
            eprintln!("error: --jobs must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match &cli.command {
        Command::Verify { suite, common } => cmd_verify(suite, common),
        Command::Basis { degree, common } => cmd_basis(*degree, common),
        Command::Diff { degree, common } => cmd_diff(*degree, common),
        Command::Table { kind, nonframed, degree, common } => cmd_table(*kind, *nonframed, *degree, common),
    };
    match result {
        Ok(Outcome::Passed) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn parse_suites(s: &str) -> Result<Vec<Suite>, String> {
    if s == "all" {
        return Ok(Suite::ALL.to_vec());
    }
    let mut out = Vec::new();
    for name in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
        let suite: Suite = name.parse()?;
        if !out.contains(&suite) {
            out.push(suite);
        }
    }
    if out.is_empty() {
        return Err("no suite selected".into());
    }
    Ok(out)
}

fn emit(common: &Common, text: &str) -> Result<(), String> {
    write_output(common.out.as_deref(), text).map_err(|e| format!("writing output: {e}"))
}

fn cmd_verify(suites: &str, common: &Common) -> CmdResult {
    let suites = parse_suites(suites)?;
    let cfg = common.config(false);
    let mut report = Report::new();
    for s in suites {
        let checks = run(s, &cfg).map_err(|e| format!("suite {s}: {e}"))?;
        for c in &checks {
            info!("{c}");
        }
        report.extend(checks);
    }
    let text = report.render(common.format).map_err(|e| e.to_string())?;
    emit(common, &text)?;
    let failed = report.failures().len();
    info!("{} checks, {failed} failed", report.checks.len());
    Ok(if report.passed() { Outcome::Passed } else { Outcome::Failed })
}

fn graphs_of_degree(common: &Common, degree: i32) -> Result<(Gc, Vec<Graph>, Vec<Graph>), String> {
    let cfg = common.config(false);
    let gc = Gc::new(cfg.g, cfg.tadpoles).map_err(|e| e.to_string())?;
    let all = enumerate_graphs(cfg.g, cfg.tadpoles, cfg.bounds);
    let of = |d: i32| all.iter().filter(|x| x.gc_degree() == d).cloned().collect::<Vec<_>>();
    Ok((gc, of(degree), of(degree + 1)))
}

#[derive(Serialize)]
struct BasisRow {
    index: usize,
    degree: i32,
    vertices: usize,
    edges: usize,
    graph: String,
    raw: String,
}

fn basis_rows(gs: &[Graph], g: u8) -> Vec<BasisRow> {
    gs.iter()
        .enumerate()
        .map(|(i, x)| BasisRow {
            index: i,
            degree: x.gc_degree(),
            vertices: x.vertex_count(),
            edges: x.edge_count(),
            graph: x.to_string(),
            raw: RawGraph::from_graph(x, g).to_json(),
        })
        .collect()
}

fn cmd_basis(degree: i32, common: &Common) -> CmdResult {
    let (_, gs, _) = graphs_of_degree(common, degree)?;
    info!("degree {degree}: {} graph classes", gs.len());
    let text = render_rows(&basis_rows(&gs, common.g), common.format).map_err(|e| e.to_string())?;
    emit(common, &text)?;
    Ok(Outcome::Passed)
}

#[derive(Serialize)]
struct Entry {
    row: usize,
    col: usize,
    value: String,
}

fn cmd_diff(degree: i32, common: &Common) -> CmdResult {
    let (gc, src, dst) = graphs_of_degree(common, degree)?;
    let z = gc.z().map_err(|e| e.to_string())?;
    let (m, closed) = gc.diff_matrix(&z, &src, &dst);
    info!("matrix {} x {}, {} nonzero, closed={closed}", m.rows(), m.cols(), m.nnz());
    let text = match common.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Out {
                degree: i32,
                rows: usize,
                cols: usize,
                closed: bool,
                source: Vec<String>,
                target: Vec<String>,
                matrix: serde_json::Value,
            }
            let out = Out {
                degree,
                rows: m.rows(),
                cols: m.cols(),
                closed,
                source: src.iter().map(|x| x.to_string()).collect(),
                target: dst.iter().map(|x| x.to_string()).collect(),
                matrix: serde_json::from_str(&m.to_json()).map_err(|e| e.to_string())?,
            };
            serde_json::to_string_pretty(&out).map_err(|e| e.to_string())? + "\n"
        }
        Format::Csv => {
            let rows: Vec<Entry> = m
                .entries()
                .map(|(r, c, v)| Entry { row: r, col: c, value: fmt_rational(v) })
                .collect();
            if rows.is_empty() {
                "row,col,value\n".to_string()
            } else {
                render_rows(&rows, Format::Csv).map_err(|e| e.to_string())?
            }
        }
    };
    emit(common, &text)?;
    Ok(Outcome::Passed)
}

fn cmd_table(kind: TableKind, nonframed: bool, degree: Option<i32>, common: &Common) -> CmdResult {
    let cfg = common.config(nonframed);
    let text = match kind {
        TableKind::Rg => {
            let alg = GrtAlgebras::new(cfg.g, cfg.variant, cfg.max_weight + 2).map_err(|e| e.to_string())?;
            let grt = alg.solver().map_err(|e| e.to_string())?;
            let mut rows = Vec::new();
            for w in 0..=cfg.max_weight {
                info!("weight {w}");
                rows.push(grt.table_row(w).map_err(|e| e.to_string())?);
            }
            render_rows(&rows, common.format)
        }
        TableKind::Tg => {
            let rows = t_dims(cfg.n, cfg.g, cfg.variant, cfg.max_weight).map_err(|e| e.to_string())?;
            render_rows(&rows, common.format)
        }
        TableKind::Rank => {
            let gc = Gc::new(cfg.g, cfg.tadpoles).map_err(|e| e.to_string())?;
            let degrees: Vec<i32> = match degree {
                Some(d) => vec![d],
                None => {
                    let mut ds: Vec<i32> = enumerate_graphs(cfg.g, cfg.tadpoles, cfg.bounds)
                        .iter()
                        .map(|x| x.gc_degree())
                        .collect();
                    ds.sort_unstable();
                    ds.dedup();
                    ds
                }
            };
            let mut rows = Vec::new();
            for d in degrees {
                info!("degree {d}");
                let r = gc.rank_report(d, cfg.bounds).map_err(|e| e.to_string())?;
                rows.push(RankRow::from(r));
            }
            render_rows(&rows, common.format)
        }
    }
    .map_err(|e| e.to_string())?;
    emit(common, &text)?;
    Ok(Outcome::Passed)
}

/// Flat form of a rank report for JSON and CSV output.
#[derive(Serialize)]
struct RankRow {
    g: u8,
    variant: String,
    degree: i32,
    vertices: usize,
    edges: usize,
    decorations: usize,
    dim: usize,
    rank_in: usize,
    rank_out: usize,
    h_trunc: i64,
    closed: bool,
    caveat: String,
}

impl From<gcg::gc::RankReport> for RankRow {
    fn from(r: gcg::gc::RankReport) -> Self {
        RankRow {
            g: r.g,
            variant: r.variant,
            degree: r.degree,
            vertices: r.bounds.vertices,
            edges: r.bounds.edges,
            decorations: r.bounds.decorations,
            dim: r.dim,
            rank_in: r.rank_in,
            rank_out: r.rank_out,
            h_trunc: r.h_trunc,
            closed: r.closed,
            caveat: r.caveat,
        }
    }
}
