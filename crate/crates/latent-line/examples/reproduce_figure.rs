//! Drive the accuracy-vs-sample-size pipeline through the CLI entry point at
//! a scale where the stochastic estimator anchors. Expect several minutes.
//!
//! The published-scale configuration is simply `latent-line
//! reproduce-figure` (n = 25, m = 10000..20000, 30 graphs per size); at that
//! density the estimator noise exceeds every valid admission margin and the
//! command exits with code 3 — see the README's accuracy notes.
//!
//! Usage: cargo run --release --example reproduce_figure

fn main() -> std::process::ExitCode {
    let dir = std::env::temp_dir().join("latent-line-example-figure");
    std::fs::create_dir_all(&dir).expect("create output dir");
    let args: Vec<String> = [
        "reproduce-figure",
        "--n",
        "5",
        "--m-grid",
        "6000",
        "--graphs",
        "1",
        "--seed",
        "31",
        "--out-dir",
        dir.to_str().unwrap(),
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let code = latent_line::cli::main_entry(&args);
    if code == 0 {
        let path = dir.join("figure.csv");
        println!("figure rows written to {}", path.display());
        if let Ok(text) = std::fs::read_to_string(&path) {
            print!("{text}");
        }
    }
    std::process::ExitCode::from(code as u8)
}
