//! Order recovery against the exact distance oracle: the isolation test for
//! the recovery algorithm, free of estimation noise.
//!
//! Usage: cargo run --release --example oracle_order_recovery

use latent_line::estimate::{exact_oracle, DistanceWindow};
use latent_line::eval::{inversion_report, recover_positions, position_error_report};
use latent_line::model::{sample_positions, DecayKind, ModelParams};
use latent_line::order::recover_order;

fn main() -> latent_line::Result<()> {
    let params = ModelParams::new(25.0, 1.0, DecayKind::Exponential, 0.05)?;
    let m = 2000;
    let x = sample_positions(m, &params, 42);
    let window = DistanceWindow::new(0.3, 2.5, 0.05, params.n())?;

    let est = exact_oracle(&x, window);
    let result = recover_order(&est)?;
    let inv = inversion_report(&x, &result)?;
    println!(
        "oracle recovery on m = {m}: {} inversions ({}), oriented graph size {}",
        inv.count,
        inv.orientation.as_str(),
        result.oriented_graph_size
    );
    println!(
        "inverted-pair distances: p90 {:.4}, p95 {:.4}, p99 {:.4}, max {:.4}",
        inv.distances.p90, inv.distances.p95, inv.distances.p99, inv.distances.max
    );

    let recovered = recover_positions(&result, params.n())?;
    let pe = position_error_report(&x, &recovered, inv.orientation)?;
    println!(
        "position errors after uniform dispersal: p90 {:.4}, max {:.4}",
        pe.errors.p90, pe.errors.max
    );
    Ok(())
}
