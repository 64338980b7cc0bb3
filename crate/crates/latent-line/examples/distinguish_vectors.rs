//! Likelihood-ratio distinguishing trials between a sorted position vector
//! and its scaled adversary, across a sample-size grid.
//!
//! Usage: cargo run --release --example distinguish_vectors

use latent_line::distinguish::{regime_label, run_distinguish_trials};

fn main() -> latent_line::Result<()> {
    let n = 50.0;
    let delta = 1.0;
    println!("n = {n}, delta = {delta}: tester error across sample sizes");
    for m in [50, 100, 200, 400, 800] {
        let s = run_distinguish_trials(n, m, delta, 200, 99)?;
        println!(
            "m = {m:4}: error rate {:.3}, mean E[L] = {:.4} ({})",
            s.error_rate,
            s.mean_expected_l,
            regime_label(n, m, delta)
        );
    }
    Ok(())
}
