//! The full stochastic pipeline: sample a graph, estimate distances from
//! common neighbors, recover the order and positions, and score the result.
//!
//! The estimator noise scales as sqrt(n/m), and this runs at the sampling
//! density where order recovery starts to anchor (about 1200 vertices per
//! unit length) — enough for the pipeline to complete deterministically,
//! not yet enough for a clean order; see the README's accuracy notes and
//! the `oracle_order_recovery` example for the noise-free algorithm.
//! Expect a few minutes of compute.
//!
//! Usage: cargo run --release --example recover_pipeline

use latent_line::estimate::{estimate_exp_windowed, DistanceWindow};
use latent_line::eval::{inversion_report, position_error_report, recover_positions};
use latent_line::model::{sample_graph, sample_positions, DecayKind, ModelParams};
use latent_line::order::recover_order;

fn main() -> latent_line::Result<()> {
    let n = 5.0;
    let m = 6000;
    let params = ModelParams::new(n, 1.0, DecayKind::Exponential, 0.05)?;
    let x = sample_positions(m, &params, 12);
    let g = sample_graph(&x, &params, 13);
    println!("m = {m} on [0, {n}]: {} edges", g.edge_count());

    // widest valid window against the estimator's 2.5 ceiling
    let window = DistanceWindow::new(0.54, 2.5, 0.17, n)?;
    let est = estimate_exp_windowed(&g, &params, window)?;
    let result = recover_order(&est)?;
    println!(
        "anchored at vertex {}, oriented graph size {}",
        result.anchor, result.oriented_graph_size
    );

    let inv = inversion_report(&x, &result)?;
    let total_pairs = m as u64 * (m as u64 - 1) / 2;
    println!(
        "{} of {} pairs inverted ({}); inverted-pair distance p95 = {:.3}",
        inv.count,
        total_pairs,
        inv.orientation.as_str(),
        inv.distances.p95
    );
    let recovered = recover_positions(&result, n)?;
    let pe = position_error_report(&x, &recovered, inv.orientation)?;
    println!(
        "position error p90 {:.3}, max {:.3} (noise-dominated at this density)",
        pe.errors.p90, pe.errors.max
    );
    Ok(())
}
