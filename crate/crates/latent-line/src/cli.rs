//! Command-line orchestration: reproducible pipelines over the library.
//!
//! Configuration comes from `key=value` lines in an optional `--config` file
//! plus `--key value` flags, flags winning. Every CSV output echoes the
//! effective configuration; re-running a command with the same configuration
//! reproduces every output byte for byte, for any `--threads` value.
//!
//! Exit codes: 0 success, 2 configuration error, 3 algorithmic failure
//! (e.g. an empty anchor set in order recovery), 4 I/O or format error.

use crate::distinguish::{self, TrialOptions};
use crate::error::{Error, Result};
use crate::estimate::{self, DistanceWindow};
use crate::eval::{self, Percentiles};
use crate::files::{self, FigureRow, GraphHeader};
use crate::model::{self, DecayKind, ModelParams, SampleOptions};
use crate::order;
use crate::rng;
use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Generate,
    Recover,
    Estimate,
    ReproduceFigure,
    Distinguish,
    Selftest,
}

impl CommandKind {
    fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "generate" => CommandKind::Generate,
            "recover" => CommandKind::Recover,
            "estimate" => CommandKind::Estimate,
            "reproduce-figure" => CommandKind::ReproduceFigure,
            "distinguish" => CommandKind::Distinguish,
            "selftest" => CommandKind::Selftest,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown subcommand '{other}' (expected generate, recover, estimate, \
                     reproduce-figure, distinguish, or selftest)"
                )))
            }
        })
    }
}

/// Effective run configuration. Defaults are overridden by `--config` file
/// entries, then by flags, in that order.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub n: f64,
    pub m: usize,
    pub c: f64,
    pub model: DecayKind,
    pub delta: f64,
    pub seed: u64,
    pub trials: usize,
    pub graphs: usize,
    pub threads: Option<usize>,
    pub window_l: Option<f64>,
    pub window_u: Option<f64>,
    pub window_delta: Option<f64>,
    pub tau_same: f64,
    pub cutoff: bool,
    pub fixed_x: bool,
    pub write_scores: bool,
    pub m_grid: Option<Vec<usize>>,
    pub out_dir: PathBuf,
    pub graph_in: Option<PathBuf>,
    pub truth: Option<PathBuf>,
    /// Keys that were set explicitly (file or flag), for mismatch checks.
    set: BTreeSet<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n: 25.0,
            m: 1000,
            c: 1.0,
            model: DecayKind::Exponential,
            delta: 0.05,
            seed: 1,
            trials: 100,
            graphs: 30,
            threads: None,
            window_l: None,
            window_u: None,
            window_delta: None,
            tau_same: estimate::DEFAULT_TAU_SAME,
            cutoff: false,
            fixed_x: false,
            write_scores: false,
            m_grid: None,
            out_dir: PathBuf::from("."),
            graph_in: None,
            truth: None,
            set: BTreeSet::new(),
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| Error::InvalidParameter(format!("bad value for {key}: {e}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        other => Err(Error::InvalidParameter(format!(
            "bad boolean for {key}: '{other}'"
        ))),
    }
}

impl RunConfig {
    fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "n" => self.n = parse_num(key, value)?,
            "m" => self.m = parse_num(key, value)?,
            "c" => self.c = parse_num(key, value)?,
            "model" => self.model = DecayKind::parse(value)?,
            "delta" => self.delta = parse_num(key, value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "trials" => self.trials = parse_num(key, value)?,
            "graphs" => self.graphs = parse_num(key, value)?,
            "threads" => self.threads = Some(parse_num(key, value)?),
            "window-l" => self.window_l = Some(parse_num(key, value)?),
            "window-u" => self.window_u = Some(parse_num(key, value)?),
            "window-delta" => self.window_delta = Some(parse_num(key, value)?),
            "tau-same" => self.tau_same = parse_num(key, value)?,
            "cutoff" => self.cutoff = parse_bool(key, value)?,
            "fixed-x" => self.fixed_x = parse_bool(key, value)?,
            "scores" => self.write_scores = parse_bool(key, value)?,
            "m-grid" => {
                let grid: Result<Vec<usize>> =
                    value.split(',').map(|s| parse_num("m-grid", s.trim())).collect();
                self.m_grid = Some(grid?);
            }
            "out-dir" => self.out_dir = PathBuf::from(value),
            "graph" => self.graph_in = Some(PathBuf::from(value)),
            "truth" => self.truth = Some(PathBuf::from(value)),
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown configuration key '{other}'"
                )))
            }
        }
        self.set.insert(key.to_string());
        Ok(())
    }

    fn was_set(&self, key: &str) -> bool {
        self.set.contains(key)
    }

    /// The effective configuration, echoed into every CSV output.
    pub fn echo(&self, command: CommandKind) -> String {
        let mut s = String::new();
        let _ = write!(
            s,
            "command={:?} n={} m={} c={} model={} delta={} seed={} trials={} graphs={}",
            command,
            self.n,
            self.m,
            self.c,
            self.model.as_str(),
            self.delta,
            self.seed,
            self.trials,
            self.graphs
        );
        if let Some(l) = self.window_l {
            let _ = write!(s, " window-l={l}");
        }
        if let Some(u) = self.window_u {
            let _ = write!(s, " window-u={u}");
        }
        if let Some(d) = self.window_delta {
            let _ = write!(s, " window-delta={d}");
        }
        let _ = write!(
            s,
            " tau-same={} cutoff={} fixed-x={}",
            self.tau_same, self.cutoff, self.fixed_x
        );
        if let Some(grid) = &self.m_grid {
            let grid_s: Vec<String> = grid.iter().map(|m| m.to_string()).collect();
            let _ = write!(s, " m-grid={}", grid_s.join(","));
        }
        s
    }

    fn out(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }

    fn model_params(&self) -> Result<ModelParams> {
        ModelParams::new(self.n, self.c, self.model, self.delta)
    }

    /// The recovery window: model default unless overridden.
    fn window(&self, n: f64) -> Result<DistanceWindow> {
        let delta = self.window_delta.unwrap_or(self.delta);
        let (dl, du) = match self.model {
            DecayKind::Exponential => (0.3, 2.5),
            DecayKind::Linear => (0.5, 2.0),
        };
        DistanceWindow::new(
            self.window_l.unwrap_or(dl),
            self.window_u.unwrap_or(du),
            delta,
            n,
        )
    }
}

/// Parse a full command line (without the binary name).
pub fn parse_args(args: &[String]) -> Result<(CommandKind, RunConfig)> {
    let command = CommandKind::parse(
        args.first()
            .map(String::as_str)
            .ok_or_else(|| Error::InvalidParameter("missing subcommand".into()))?,
    )?;
    let mut flags: Vec<(String, String)> = Vec::new();
    let mut config_file: Option<PathBuf> = None;
    let mut it = args[1..].iter();
    while let Some(arg) = it.next() {
        let key = arg.strip_prefix("--").ok_or_else(|| {
            Error::InvalidParameter(format!("expected --key, got '{arg}'"))
        })?;
        let value = it
            .next()
            .ok_or_else(|| Error::InvalidParameter(format!("--{key} needs a value")))?
            .clone();
        if key == "config" {
            config_file = Some(PathBuf::from(value));
        } else {
            flags.push((key.to_string(), value));
        }
    }
    let mut config = RunConfig::default();
    if let Some(path) = config_file {
        let text = std::fs::read_to_string(&path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Format {
                path: path.display().to_string(),
                reason: format!("line {} is not key=value", lineno + 1),
            })?;
            config.apply(k.trim(), v.trim())?;
        }
    }
    for (k, v) in &flags {
        config.apply(k, v)?;
    }
    Ok((command, config))
}

const USAGE: &str = "\
latent-line: latent-position random graphs on a segment

usage: latent-line <subcommand> [--config FILE] [--key value]...

subcommands:
  generate          sample positions and a graph, write both files
  recover           estimate distances, recover the order and positions
  estimate          dump pairwise distance estimates as CSV
  reproduce-figure  accuracy-vs-sample-size experiment over an m-grid
  distinguish       likelihood-ratio trials against the scaled adversary
  selftest          run compact property suites

common keys: n, m, c, model (exp|lin), delta, seed, trials, graphs, threads,
window-l, window-u, window-delta, tau-same, cutoff, fixed-x, scores, m-grid,
out-dir, graph, truth. Flags override --config file entries.";

/// Parse and run; returns the process exit code.
pub fn main_entry(args: &[String]) -> i32 {
    if matches!(args.first().map(String::as_str), None | Some("help") | Some("--help") | Some("-h"))
    {
        println!("{USAGE}");
        return if args.is_empty() { 2 } else { 0 };
    }
    let (command, config) = match parse_args(args) {
        Ok(parsed) => parsed,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let run_it = || match command {
        CommandKind::Generate => cmd_generate(&config),
        CommandKind::Recover => cmd_recover(&config),
        CommandKind::Estimate => cmd_estimate(&config),
        CommandKind::ReproduceFigure => cmd_reproduce_figure(&config),
        CommandKind::Distinguish => cmd_distinguish(&config),
        CommandKind::Selftest => cmd_selftest(&config),
    };
    let outcome = match config.threads {
        Some(t) => {
            let pool = match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
                Ok(p) => p,
                Err(e) => {
                    eprintln!("error: could not build thread pool: {e}");
                    return 2;
                }
            };
            pool.install(run_it)
        }
        None => run_it(),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// `generate`: sample positions and a graph, write both files.
pub fn cmd_generate(config: &RunConfig) -> Result<()> {
    let params = config.model_params()?;
    let x = model::sample_positions(config.m, &params, config.seed);
    let g = model::sample_graph_with(
        &x,
        &params,
        config.seed,
        SampleOptions {
            probability_cutoff: config.cutoff,
        },
    );
    let header = GraphHeader {
        n: config.n,
        m: config.m,
        model: config.model,
        c: config.c,
        seed: config.seed,
    };
    files::write_positions(&config.out("positions.txt"), &x)?;
    files::write_graph(&config.out("graph.txt"), &header, &g)?;
    println!(
        "generated m={} n={} model={} edges={}",
        config.m,
        config.n,
        config.model.as_str(),
        g.edge_count()
    );
    Ok(())
}

fn check_header_against(config: &RunConfig, header: &GraphHeader) -> Result<()> {
    if config.was_set("model") && config.model != header.model {
        return Err(Error::InvalidParameter(format!(
            "graph header says model={}, configuration says model={}",
            header.model.as_str(),
            config.model.as_str()
        )));
    }
    if config.was_set("c") && config.c != header.c {
        return Err(Error::InvalidParameter(format!(
            "graph header says c={}, configuration says c={}",
            header.c, config.c
        )));
    }
    if config.was_set("n") && config.n != header.n {
        return Err(Error::InvalidParameter(format!(
            "graph header says n={}, configuration says n={}",
            header.n, config.n
        )));
    }
    Ok(())
}

/// The effective configuration of a graph-consuming command: the header's
/// generating values override the configured defaults.
fn effective_config(config: &RunConfig, header: &GraphHeader) -> RunConfig {
    let mut effective = config.clone();
    effective.n = header.n;
    effective.m = header.m;
    effective.c = header.c;
    effective.model = header.model;
    effective.seed = header.seed;
    effective
}

fn build_estimator<'g>(
    config: &RunConfig,
    header: &GraphHeader,
    g: &'g model::RandomGraph,
) -> Result<estimate::DistanceEstimate<'g>> {
    let params = ModelParams::new(header.n, header.c, header.model, config.delta)?;
    let mut window_config = config.clone();
    window_config.model = header.model;
    let window = window_config.window(header.n)?;
    match header.model {
        DecayKind::Exponential => estimate::estimate_exp_windowed(g, &params, window),
        DecayKind::Linear => estimate::estimate_lin_with(g, &params, window, config.tau_same),
    }
}

/// `recover`: estimator -> order -> positions (+ evaluation when truth given).
pub fn cmd_recover(config: &RunConfig) -> Result<()> {
    let graph_path = config
        .graph_in
        .clone()
        .unwrap_or_else(|| config.out("graph.txt"));
    let (header, g) = files::read_graph(&graph_path)?;
    check_header_against(config, &header)?;
    let est = build_estimator(config, &header, &g)?;
    let result = order::recover_order(&est)?;
    files::write_order(&config.out("order.txt"), &result)?;
    let recovered = eval::recover_positions(&result, header.n)?;
    files::write_positions(&config.out("recovered.txt"), &recovered)?;
    let echo = effective_config(config, &header).echo(CommandKind::Recover);
    if config.write_scores {
        files::write_scores_csv(&config.out("scores.csv"), &echo, &result)?;
    }
    if let Some(truth_path) = &config.truth {
        let truth = files::read_positions(truth_path)?;
        let inv = eval::inversion_report(&truth, &result)?;
        let pe = eval::position_error_report(&truth, &recovered, inv.orientation)?;
        files::write_report_csv(&config.out("report.csv"), &echo, &inv, Some(&pe))?;
        println!(
            "recovered order: {} inversions ({}), p95 inverted distance {}",
            inv.count,
            inv.orientation.as_str(),
            inv.distances.p95
        );
    } else {
        println!(
            "recovered order for m={} (anchor {}, |E'|={})",
            g.vertex_count(),
            result.anchor,
            result.oriented_graph_size
        );
    }
    Ok(())
}

/// `estimate`: dump every cached pairwise distance estimate as CSV.
pub fn cmd_estimate(config: &RunConfig) -> Result<()> {
    let graph_path = config
        .graph_in
        .clone()
        .unwrap_or_else(|| config.out("graph.txt"));
    let (header, g) = files::read_graph(&graph_path)?;
    check_header_against(config, &header)?;
    let est = build_estimator(config, &header, &g)?;
    let estimates = est.computed_estimates();
    files::write_estimates_csv(
        &config.out("estimates.csv"),
        &effective_config(config, &header).echo(CommandKind::Estimate),
        &estimates,
    )?;
    println!("wrote {} pair estimates", estimates.len());
    Ok(())
}

/// Default figure window: the widest valid (L, U, delta) against U = 2.5,
/// which maximizes the admission margin available to noisy estimates.
pub const FIGURE_WINDOW: (f64, f64, f64) = (0.54, 2.5, 0.17);

/// Default figure sample-size grid.
pub const FIGURE_M_GRID: [usize; 5] = [10_000, 12_500, 15_000, 17_500, 20_000];

/// `reproduce-figure`: run the full pipeline over the m-grid, averaging the
/// inversion-distance and position-error percentiles per m.
pub fn cmd_reproduce_figure(config: &RunConfig) -> Result<()> {
    if config.model != DecayKind::Exponential || config.c != 1.0 {
        return Err(Error::InvalidParameter(
            "reproduce-figure runs the exponential model with c = 1".into(),
        ));
    }
    let grid: Vec<usize> = config
        .m_grid
        .clone()
        .unwrap_or_else(|| FIGURE_M_GRID.to_vec());
    let params = config.model_params()?;
    let window = DistanceWindow::new(
        config.window_l.unwrap_or(FIGURE_WINDOW.0),
        config.window_u.unwrap_or(FIGURE_WINDOW.1),
        config.window_delta.unwrap_or(FIGURE_WINDOW.2),
        config.n,
    )?;
    let mut rows = Vec::new();
    for &m in &grid {
        let mut inv_acc = [0.0f64; 4];
        let mut pos_acc = [0.0f64; 4];
        for g_idx in 0..config.graphs {
            let base = rng::hash4(config.seed, rng::STREAM_GRAPH, m as u64, g_idx as u64);
            let x = model::sample_positions(m, &params, rng::derive_seed(base, 1, 0));
            let g = model::sample_graph(&x, &params, rng::derive_seed(base, 2, 0));
            let est = estimate::estimate_exp_windowed(&g, &params, window)?;
            let result = order::recover_order(&est)?;
            let inv = eval::inversion_report(&x, &result)?;
            let recovered = eval::recover_positions(&result, config.n)?;
            let pe = eval::position_error_report(&x, &recovered, inv.orientation)?;
            for (acc, v) in inv_acc.iter_mut().zip([
                inv.distances.p90,
                inv.distances.p95,
                inv.distances.p99,
                inv.distances.max,
            ]) {
                *acc += v;
            }
            for (acc, v) in pos_acc.iter_mut().zip([
                pe.errors.p90,
                pe.errors.p95,
                pe.errors.p99,
                pe.errors.max,
            ]) {
                *acc += v;
            }
            println!(
                "m={m} graph {}/{}: {} inversions, p95 inverted distance {}",
                g_idx + 1,
                config.graphs,
                inv.count,
                inv.distances.p95
            );
        }
        let k = config.graphs as f64;
        rows.push(FigureRow {
            m,
            graphs: config.graphs,
            inversion: Percentiles {
                p90: inv_acc[0] / k,
                p95: inv_acc[1] / k,
                p99: inv_acc[2] / k,
                max: inv_acc[3] / k,
            },
            position_error: Percentiles {
                p90: pos_acc[0] / k,
                p95: pos_acc[1] / k,
                p99: pos_acc[2] / k,
                max: pos_acc[3] / k,
            },
        });
    }
    files::write_figure_csv(
        &config.out("figure.csv"),
        &config.echo(CommandKind::ReproduceFigure),
        &rows,
    )?;
    Ok(())
}

/// Default distinguish sample-size grid.
pub const DISTINGUISH_M_GRID: [usize; 5] = [250, 500, 1000, 2000, 4000];

/// `distinguish`: likelihood-ratio trials over an m-grid, with regime labels.
pub fn cmd_distinguish(config: &RunConfig) -> Result<()> {
    if config.model != DecayKind::Exponential || config.c != 1.0 {
        return Err(Error::InvalidParameter(
            "distinguish runs the exponential model with c = 1".into(),
        ));
    }
    let grid: Vec<usize> = config
        .m_grid
        .clone()
        .unwrap_or_else(|| DISTINGUISH_M_GRID.to_vec());
    let echo = config.echo(CommandKind::Distinguish);
    let mut summaries = Vec::new();
    for &m in &grid {
        let summary = distinguish::run_distinguish_trials_with(
            config.n,
            m,
            config.delta,
            config.trials,
            rng::hash4(config.seed, rng::STREAM_TRIAL, m as u64, 0),
            TrialOptions {
                fixed_x: config.fixed_x,
            },
        )?;
        files::write_trials_csv(
            &config.out(&format!("trials-m{m}.csv")),
            &echo,
            &summary.outcomes,
        )?;
        let regime = distinguish::regime_label(config.n, m, config.delta);
        println!(
            "m={m}: error rate {} mean E[L] {} ({regime})",
            summary.error_rate, summary.mean_expected_l
        );
        summaries.push((summary, regime));
    }
    files::write_summary_csv(&config.out("summary.csv"), &echo, &summaries)?;
    Ok(())
}

/// `selftest`: compact property suites, one PASS/FAIL line each.
pub fn cmd_selftest(_config: &RunConfig) -> Result<()> {
    let mut all_ok = true;
    let mut check = |name: &str, ok: bool| {
        println!("selftest {name}: {}", if ok { "PASS" } else { "FAIL" });
        all_ok &= ok;
    };

    check("log-expansion bounds", {
        let mut ok = true;
        for k in 1..10_000 {
            let x = 0.5 * k as f64 / 10_000.0;
            let v = -(1.0f64 - x).ln();
            ok &= x + x * x / 2.0 < v && v < x + x * x;
        }
        ok
    });

    check("ratio inequalities", {
        let mut ok = true;
        for k in 1..=300 {
            let x = 6.0 * k as f64 / 300.0;
            for l in 1..=k {
                let xp = 6.0 * l as f64 / 300.0;
                let e = (-x).exp();
                ok &= e * (xp.exp() - 1.0) / (1.0 - e) <= xp / x + 1e-12;
                ok &= e * (1.0 - (-xp).exp()) / (1.0 - e) <= xp / x + 1e-12;
                if xp < x {
                    ok &= (1.0 - (-x).exp()) / (1.0 - (-xp).exp()) < x / xp;
                }
            }
        }
        ok
    });

    check("kernel monotonicity and round trips", {
        let mut ok = true;
        let exp_range = crate::math::exp_inversion_range();
        let lin_range = crate::math::lin_inversion_range();
        for k in 0..=500 {
            let d = 0.3 + (2.5 - 0.3) * k as f64 / 500.0;
            let back = crate::math::invert_g_exp(crate::math::g_exp(d).unwrap(), exp_range).unwrap();
            ok &= (back - d).abs() < 1e-9;
            if d <= 2.0 {
                let back =
                    crate::math::invert_h_lin(crate::math::h_lin(d).unwrap(), lin_range).unwrap();
                ok &= (back - d).abs() < 1e-9;
            }
        }
        ok
    });

    check("density closed forms vs quadrature", {
        let mut ok = true;
        for decay in [DecayKind::Exponential, DecayKind::Linear] {
            let params = ModelParams::new(25.0, 1.0, decay, 0.05).unwrap();
            for k in 0..=20 {
                let xi = 25.0 * k as f64 / 20.0;
                let want = simpson(
                    |t| model::edge_probability(&params, (t - xi).abs()).unwrap() / 25.0,
                    0.0,
                    25.0,
                    &[xi],
                );
                let got = model::expected_degree_density(&params, xi).unwrap();
                ok &= (got - want).abs() < 1e-9;
            }
        }
        ok
    });

    check("generation determinism", {
        let params = ModelParams::new(10.0, 1.0, DecayKind::Exponential, 0.05).unwrap();
        let x1 = model::sample_positions(500, &params, 42);
        let x2 = model::sample_positions(500, &params, 42);
        let g1 = model::sample_graph(&x1, &params, 43);
        let g2 = model::sample_graph(&x2, &params, 43);
        x1 == x2 && g1 == g2
    });

    check("oracle grid recovery", {
        let xs: Vec<f64> = (0..=30).map(|k| k as f64 * 0.1).collect();
        let x = model::PositionVector::new(3.0, xs).unwrap();
        let window = DistanceWindow::exponential(0.05, 3.0).unwrap();
        let est = estimate::exact_oracle(&x, window);
        match order::recover_order(&est) {
            Ok(result) => {
                let asc: Vec<u32> = (0..=30).collect();
                let desc: Vec<u32> = (0..=30).rev().collect();
                result.order == asc || result.order == desc
            }
            Err(_) => false,
        }
    });

    check("estimator inversion on exact statistics", {
        let params = ModelParams::new(25.0, 1.0, DecayKind::Exponential, 0.05).unwrap();
        let window = DistanceWindow::exponential(0.05, 25.0).unwrap();
        let mut ok = true;
        for k in 0..=20 {
            let d = 0.3 + (2.5 - 0.3) * k as f64 / 20.0;
            let xs = [(25.0 - d) / 2.0, (25.0 + d) / 2.0];
            let degrees: Vec<f64> = xs
                .iter()
                .map(|&x| 9999.0 * model::expected_degree_density(&params, x).unwrap())
                .collect();
            let p = params;
            let est = estimate::exp_from_statistics(
                &degrees,
                move |i, j| 9998.0 * model::expected_common_density(&p, xs[i], xs[j]).unwrap(),
                &params,
                window,
                10_000,
            );
            ok &= (est.query(0, 1) - d).abs() <= 1e-6;
        }
        ok
    });

    if all_ok {
        println!("selftest: all suites passed");
        Ok(())
    } else {
        Err(Error::InvalidParameter("selftest failures (see above)".into()))
    }
}

/// Adaptive-enough Simpson integration for the selftest: fixed fine grid
/// split at the integrand's kink points.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, kinks: &[f64]) -> f64 {
    let mut cuts: Vec<f64> = vec![a, b];
    cuts.extend(kinks.iter().copied().filter(|&k| k > a && k < b));
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let steps = 20_000;
        let h = (hi - lo) / steps as f64;
        let mut s = f(lo) + f(hi);
        for i in 1..steps {
            let x = lo + i as f64 * h;
            s += f(x) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        total += s * h / 3.0;
    }
    total
}
