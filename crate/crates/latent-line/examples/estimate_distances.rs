//! Compare the common-neighbor distance estimator against the true pairwise
//! distances on a dense instance.
//!
//! Usage: cargo run --release --example estimate_distances

use latent_line::estimate::{estimate_exp_windowed, DistanceWindow};
use latent_line::model::{sample_graph, sample_positions, DecayKind, ModelParams};
use latent_line::rng;

fn main() -> latent_line::Result<()> {
    let n = 10.0;
    let m = 20_000;
    let params = ModelParams::new(n, 1.0, DecayKind::Exponential, 0.05)?;
    let x = sample_positions(m, &params, 3);
    let g = sample_graph(&x, &params, 4);
    println!("m = {m}, n = {n}: {} edges", g.edge_count());

    let window = DistanceWindow::new(0.54, 2.5, 0.17, n)?;
    let est = estimate_exp_windowed(&g, &params, window)?;

    // accuracy by true-distance bucket, over sampled pairs
    let buckets = [(0.3, 0.7), (0.7, 1.2), (1.2, 1.8), (1.8, 2.5)];
    for &(lo, hi) in &buckets {
        let mut errs = Vec::new();
        let mut t = 0u64;
        while errs.len() < 400 {
            t += 1;
            let i = (rng::hash4(9, 1, t, 0) % m as u64) as usize;
            let j = (rng::hash4(9, 2, t, 0) % m as u64) as usize;
            if i == j {
                continue;
            }
            let d = x.distance(i, j);
            if d < lo || d >= hi {
                continue;
            }
            errs.push((est.query(i, j) - d).abs());
        }
        errs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        println!(
            "true d in [{lo:.1}, {hi:.1}): median |error| {:.3}, p90 {:.3}",
            errs[errs.len() / 2],
            errs[errs.len() * 9 / 10]
        );
    }
    Ok(())
}
