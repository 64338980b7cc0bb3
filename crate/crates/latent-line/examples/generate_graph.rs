//! Sample a latent-position random graph and write the two artifact files.
//!
//! Usage: cargo run --release --example generate_graph

use latent_line::files::{self, GraphHeader};
use latent_line::model::{sample_graph, sample_positions, DecayKind, ModelParams};

fn main() -> latent_line::Result<()> {
    let params = ModelParams::new(25.0, 1.0, DecayKind::Exponential, 0.05)?;
    let m = 2000;
    let seed = 7;

    let x = sample_positions(m, &params, seed);
    let g = sample_graph(&x, &params, seed);
    println!(
        "sampled {} vertices on [0, {}], {} edges (mean degree {:.1})",
        m,
        params.n(),
        g.edge_count(),
        2.0 * g.edge_count() as f64 / m as f64
    );

    let dir = std::env::temp_dir().join("latent-line-example");
    std::fs::create_dir_all(&dir).expect("create output dir");
    let header = GraphHeader {
        n: params.n(),
        m,
        model: params.decay(),
        c: params.c(),
        seed,
    };
    files::write_positions(&dir.join("positions.txt"), &x)?;
    files::write_graph(&dir.join("graph.txt"), &header, &g)?;
    println!("wrote {}", dir.display());
    Ok(())
}
