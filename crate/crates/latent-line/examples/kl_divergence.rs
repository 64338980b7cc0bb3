//! The exact per-pair expectation of the log-likelihood ratio, checked
//! against Monte Carlo, plus its quadratic upper bound on the scaled family.
//!
//! Usage: cargo run --release --example kl_divergence

use latent_line::distinguish::expected_l_term;
use latent_line::rng;

fn main() -> latent_line::Result<()> {
    let d = 1.0;
    let d_y = 0.92;
    let exact = expected_l_term(d, d_y)?;
    println!("E[L] for distances ({d}, {d_y}): {exact:.7}");

    // Monte Carlo cross-check
    let p = (-d).exp();
    let edge = d_y - d;
    let non_edge = (1.0f64 - (-d).exp()).ln() - (1.0f64 - (-d_y).exp()).ln();
    let draws = 2_000_000u64;
    let mut sum = 0.0;
    for t in 0..draws {
        let u = rng::unit_f64(rng::hash4(17, 3, t, 0));
        sum += if u < p { edge } else { non_edge };
    }
    println!("Monte Carlo mean over {draws} draws: {:.7}", sum / draws as f64);

    // the quadratic bound e^{-d}(d'^2 + 2 d'^2/d) on the scaled family
    println!("\nscaled family d' = 2*delta*d/n (delta = 1, n = 25):");
    for k in 1..=5 {
        let d = k as f64;
        let dp = 2.0 * d / 25.0;
        let term = expected_l_term(d, d - dp)?;
        let bound = (-d).exp() * (dp * dp + 2.0 * dp * dp / d);
        println!("  d = {d}: E[L_ij] = {term:.3e}  <  bound {bound:.3e}");
    }
    Ok(())
}
