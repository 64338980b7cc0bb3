#![allow(dead_code)]

//! Shared oracles for the integration suites: numerical quadrature and small
//! statistics helpers, independent of the library's closed forms.

/// Composite Simpson integration with forced subdivision at kink points.
/// Panics if the recursion cannot reach the tolerance.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, kinks: &[f64], tol: f64) -> f64 {
    let mut cuts: Vec<f64> = vec![a, b];
    cuts.extend(kinks.iter().copied().filter(|&k| k > a && k < b));
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.dedup();
    let mut total = 0.0;
    for w in cuts.windows(2) {
        total += adaptive_simpson(f, w[0], w[1], tol / (cuts.len() - 1) as f64, 40);
    }
    total
}

fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b))
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let whole = simpson(f, a, b);
    let mid = 0.5 * (a + b);
    let left = simpson(f, a, mid);
    let right = simpson(f, mid, b);
    if depth == 0 {
        panic!("quadrature did not converge on [{a}, {b}]");
    }
    if (left + right - whole).abs() <= 15.0 * tol {
        left + right + (left + right - whole) / 15.0
    } else {
        adaptive_simpson(f, a, mid, tol / 2.0, depth - 1)
            + adaptive_simpson(f, mid, b, tol / 2.0, depth - 1)
    }
}

/// Sample mean and standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Prints the per-criterion verdict line used by the acceptance suite.
pub fn verdict(criterion: u32, name: &str, pass: bool, detail: &str) {
    println!(
        "criterion {criterion:2} [{}] {name}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
}
