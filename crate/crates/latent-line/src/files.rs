//! Text file formats: position vectors, sampled graphs, recovered orders,
//! and the CSV reports.
//!
//! The position, graph, and order formats are versioned and strict; readers
//! reject anything that does not match. CSV outputs carry the effective run
//! configuration in a leading `#` comment line.

use crate::distinguish::{TrialOutcome, TrialSummary};
use crate::error::{Error, Result};
use crate::eval::{InversionReport, Orientation, Percentiles, PositionErrorReport};
use crate::model::{DecayKind, PositionVector, RandomGraph};
use crate::order::OrderResult;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

pub const POSITIONS_MAGIC: &str = "latent-line-positions v1";
pub const GRAPH_MAGIC: &str = "latent-line-graph v1";
pub const ORDER_MAGIC: &str = "latent-line-order v1";

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

fn format_err(path: &Path, reason: impl Into<String>) -> Error {
    Error::Format {
        path: path.display().to_string(),
        reason: reason.into(),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| io_err(path, e))
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| io_err(path, e))
}

/// `key=value` line, returning the value for an expected key.
fn keyed<'a>(path: &Path, line: Option<&'a str>, key: &str) -> Result<&'a str> {
    let line = line.ok_or_else(|| format_err(path, format!("missing {key}= line")))?;
    line.strip_prefix(key)
        .and_then(|rest| rest.strip_prefix('='))
        .ok_or_else(|| format_err(path, format!("expected {key}=..., got '{line}'")))
}

/// Write a position vector: magic line, `n=`, `m=`, then one position per
/// line with 17 significant digits.
pub fn write_positions(path: &Path, x: &PositionVector) -> Result<()> {
    let mut out = String::with_capacity(32 + 26 * x.len());
    let _ = writeln!(out, "{POSITIONS_MAGIC}");
    let _ = writeln!(out, "n={}", x.n());
    let _ = writeln!(out, "m={}", x.len());
    for &p in x.positions() {
        let _ = writeln!(out, "{p:.16e}");
    }
    write_file(path, &out)
}

pub fn read_positions(path: &Path) -> Result<PositionVector> {
    let text = read_file(path)?;
    let mut lines = text.lines();
    match lines.next() {
        Some(POSITIONS_MAGIC) => {}
        other => return Err(format_err(path, format!("bad magic line {other:?}"))),
    }
    let n: f64 = keyed(path, lines.next(), "n")?
        .parse()
        .map_err(|e| format_err(path, format!("bad n: {e}")))?;
    let m: usize = keyed(path, lines.next(), "m")?
        .parse()
        .map_err(|e| format_err(path, format!("bad m: {e}")))?;
    let mut positions = Vec::with_capacity(m);
    for (idx, line) in lines.enumerate() {
        if idx >= m {
            return Err(format_err(path, "trailing content after positions"));
        }
        let p: f64 = line
            .parse()
            .map_err(|e| format_err(path, format!("bad position on line {}: {e}", idx + 4)))?;
        positions.push(p);
    }
    if positions.len() != m {
        return Err(format_err(
            path,
            format!("expected {m} positions, found {}", positions.len()),
        ));
    }
    PositionVector::new(n, positions)
}

/// Graph file header: the full generating configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphHeader {
    pub n: f64,
    pub m: usize,
    pub model: DecayKind,
    pub c: f64,
    pub seed: u64,
}

/// Write a graph: magic, `n=`, `m=`, `model=`, `c=`, `seed=`, then one
/// `i j` edge per line with `i < j`, lexicographically sorted.
pub fn write_graph(path: &Path, header: &GraphHeader, g: &RandomGraph) -> Result<()> {
    let mut out = String::with_capacity(64 + 16 * g.edge_count());
    let _ = writeln!(out, "{GRAPH_MAGIC}");
    let _ = writeln!(out, "n={}", header.n);
    let _ = writeln!(out, "m={}", header.m);
    let _ = writeln!(out, "model={}", header.model.as_str());
    let _ = writeln!(out, "c={}", header.c);
    let _ = writeln!(out, "seed={}", header.seed);
    for (i, j) in g.edges() {
        let _ = writeln!(out, "{i} {j}");
    }
    write_file(path, &out)
}

pub fn read_graph(path: &Path) -> Result<(GraphHeader, RandomGraph)> {
    let text = read_file(path)?;
    let mut lines = text.lines();
    match lines.next() {
        Some(GRAPH_MAGIC) => {}
        other => return Err(format_err(path, format!("bad magic line {other:?}"))),
    }
    let n: f64 = keyed(path, lines.next(), "n")?
        .parse()
        .map_err(|e| format_err(path, format!("bad n: {e}")))?;
    let m: usize = keyed(path, lines.next(), "m")?
        .parse()
        .map_err(|e| format_err(path, format!("bad m: {e}")))?;
    let model = DecayKind::parse(keyed(path, lines.next(), "model")?)?;
    let c: f64 = keyed(path, lines.next(), "c")?
        .parse()
        .map_err(|e| format_err(path, format!("bad c: {e}")))?;
    let seed: u64 = keyed(path, lines.next(), "seed")?
        .parse()
        .map_err(|e| format_err(path, format!("bad seed: {e}")))?;
    let mut edges: Vec<(u32, u32)> = Vec::new();
    for (idx, line) in lines.enumerate() {
        let mut parts = line.split(' ');
        let parse = |s: Option<&str>| -> Result<u32> {
            s.ok_or_else(|| format_err(path, format!("bad edge on line {}", idx + 7)))?
                .parse()
                .map_err(|e| format_err(path, format!("bad edge on line {}: {e}", idx + 7)))
        };
        let i = parse(parts.next())?;
        let j = parse(parts.next())?;
        if parts.next().is_some() {
            return Err(format_err(path, format!("bad edge on line {}", idx + 7)));
        }
        edges.push((i, j));
    }
    if edges.windows(2).any(|w| w[0] >= w[1]) {
        return Err(format_err(path, "edges not lexicographically sorted"));
    }
    let g = RandomGraph::from_edges(m, &edges)?;
    Ok((
        GraphHeader {
            n,
            m,
            model,
            c,
            seed,
        },
        g,
    ))
}

/// Write a recovered order: magic line, then one vertex index per line,
/// first = leftmost under the chosen orientation.
pub fn write_order(path: &Path, order: &OrderResult) -> Result<()> {
    let mut out = String::with_capacity(32 + 8 * order.order.len());
    let _ = writeln!(out, "{ORDER_MAGIC}");
    for &v in &order.order {
        let _ = writeln!(out, "{v}");
    }
    write_file(path, &out)
}

pub fn read_order(path: &Path) -> Result<Vec<u32>> {
    let text = read_file(path)?;
    let mut lines = text.lines();
    match lines.next() {
        Some(ORDER_MAGIC) => {}
        other => return Err(format_err(path, format!("bad magic line {other:?}"))),
    }
    lines
        .enumerate()
        .map(|(idx, line)| {
            line.parse()
                .map_err(|e| format_err(path, format!("bad vertex on line {}: {e}", idx + 2)))
        })
        .collect()
}

/// Scores CSV: `vertex,R`.
pub fn write_scores_csv(path: &Path, config_echo: &str, order: &OrderResult) -> Result<()> {
    let mut out = String::new();
    let _ = writeln!(out, "# config: {config_echo}");
    let _ = writeln!(out, "vertex,R");
    for v in 0..order.scores.len() {
        let _ = writeln!(out, "{v},{}", order.scores[v]);
    }
    write_file(path, &out)
}

/// Distance-estimate dump CSV: `i,j,d_hat` over all cached pair estimates.
pub fn write_estimates_csv(
    path: &Path,
    config_echo: &str,
    estimates: &[(u32, u32, f64)],
) -> Result<()> {
    let mut out = String::new();
    let _ = writeln!(out, "# config: {config_echo}");
    let _ = writeln!(out, "i,j,d_hat");
    for &(i, j, d) in estimates {
        let _ = writeln!(out, "{i},{j},{d}");
    }
    write_file(path, &out)
}

/// Evaluation report CSV: one row per metric family.
pub fn write_report_csv(
    path: &Path,
    config_echo: &str,
    inversion: &InversionReport,
    position_error: Option<&PositionErrorReport>,
) -> Result<()> {
    let mut out = String::new();
    let _ = writeln!(out, "# config: {config_echo}");
    let _ = writeln!(out, "metric,p90,p95,p99,max,count,orientation");
    let row = |out: &mut String, name: &str, p: &Percentiles, count: u64, orient: Orientation| {
        let _ = writeln!(
            out,
            "{name},{},{},{},{},{count},{}",
            p.p90,
            p.p95,
            p.p99,
            p.max,
            orient.as_str()
        );
    };
    row(
        &mut out,
        "inversion_distance",
        &inversion.distances,
        inversion.count,
        inversion.orientation,
    );
    if let Some(pe) = position_error {
        row(
            &mut out,
            "position_error",
            &pe.errors,
            inversion.count,
            inversion.orientation,
        );
    }
    write_file(path, &out)
}

/// Trial log CSV: `trial,truth,L,expected_L,choice,correct`.
pub fn write_trials_csv(
    path: &Path,
    config_echo: &str,
    outcomes: &[TrialOutcome],
) -> Result<()> {
    let mut out = String::new();
    let _ = writeln!(out, "# config: {config_echo}");
    let _ = writeln!(out, "trial,truth,L,expected_L,choice,correct");
    for o in outcomes {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            o.trial,
            o.truth.as_str(),
            o.l_value,
            o.expected_l,
            o.choice.as_str(),
            o.correct
        );
    }
    write_file(path, &out)
}

/// Summary CSV: `n,m,delta,trials,error_rate,mean_expected_L,regime`.
pub fn write_summary_csv(
    path: &Path,
    config_echo: &str,
    summaries: &[(TrialSummary, &'static str)],
) -> Result<()> {
    let mut out = String::new();
    let _ = writeln!(out, "# config: {config_echo}");
    let _ = writeln!(out, "n,m,delta,trials,error_rate,mean_expected_L,regime");
    for (s, regime) in summaries {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{regime}",
            s.n, s.m, s.delta, s.trials, s.error_rate, s.mean_expected_l
        );
    }
    write_file(path, &out)
}

/// One figure row: per-m averages of the inversion-distance and
/// position-error percentiles across graphs.
#[derive(Debug, Clone, Copy)]
pub struct FigureRow {
    pub m: usize,
    pub graphs: usize,
    pub inversion: Percentiles,
    pub position_error: Percentiles,
}

/// Figure CSV: per-m averaged percentiles.
pub fn write_figure_csv(path: &Path, config_echo: &str, rows: &[FigureRow]) -> Result<()> {
    let mut out = String::new();
    let _ = writeln!(out, "# config: {config_echo}");
    let _ = writeln!(
        out,
        "m,graphs,inv_p90,inv_p95,inv_p99,inv_max,pos_p90,pos_p95,pos_p99,pos_max"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.m,
            r.graphs,
            r.inversion.p90,
            r.inversion.p95,
            r.inversion.p99,
            r.inversion.max,
            r.position_error.p90,
            r.position_error.p95,
            r.position_error.p99,
            r.position_error.max
        );
    }
    write_file(path, &out)
}
