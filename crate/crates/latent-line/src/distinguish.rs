//! Sample-complexity experiments for distinguishing two position vectors
//! (exponential decay, c = 1).
//!
//! The adversary scales a sorted vector by (1 - 2*delta/n); the tester is the
//! likelihood-ratio rule on L = log P_X(G) - log P_Y(G), whose expectation
//! under X is the KL divergence and is computable in closed form per pair.

use crate::error::{Error, Result};
use crate::math;
use crate::model::{self, DecayKind, ModelParams, PositionVector, RandomGraph};
use crate::rng;
use rayon::prelude::*;

/// Two same-order position vectors to be told apart from one sampled graph.
#[derive(Debug, Clone)]
pub struct HypothesisPair {
    x: PositionVector,
    y: PositionVector,
    delta: f64,
}

impl HypothesisPair {
    /// Validates equal `m` and `n` and identical vertex order
    /// (`x_i < x_j` exactly when `y_i < y_j`).
    pub fn new(x: PositionVector, y: PositionVector, delta: f64) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::SizeMismatch(format!(
                "hypothesis vectors have {} and {} vertices",
                x.len(),
                y.len()
            )));
        }
        if x.n() != y.n() {
            return Err(Error::SizeMismatch(format!(
                "hypothesis vectors live on segments of length {} and {}",
                x.n(),
                y.n()
            )));
        }
        let order = x.sorted_order();
        for w in order.windows(2) {
            let (a, b) = (w[0] as usize, w[1] as usize);
            let x_equal = x.get(a) == x.get(b);
            let y_less = y.get(a) < y.get(b);
            let y_equal = y.get(a) == y.get(b);
            if x_equal != y_equal || (!x_equal && !y_less) {
                return Err(Error::InvalidParameter(
                    "hypothesis vectors must order their vertices identically".into(),
                ));
            }
        }
        Ok(HypothesisPair { x, y, delta })
    }

    pub fn x(&self) -> &PositionVector {
        &self.x
    }

    pub fn y(&self) -> &PositionVector {
        &self.y
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Sup-norm separation exceeds delta at some vertex?
    pub fn is_delta_far(&self) -> bool {
        (0..self.x.len()).any(|i| (self.x.get(i) - self.y.get(i)).abs() > self.delta)
    }

    /// `d'_{i,j} = ||x_i - x_j| - |y_i - y_j||`.
    pub fn d_prime(&self, i: usize, j: usize) -> f64 {
        (self.x.distance(i, j) - self.y.distance(i, j)).abs()
    }
}

/// The scaled adversary: `y_i = (1 - 2*delta/n) x_i` against a sorted `x`.
pub fn construct_scaled(x: &PositionVector, delta: f64) -> Result<HypothesisPair> {
    let n = x.n();
    if !(delta >= 0.0 && delta < n / 2.0) {
        return Err(Error::InvalidParameter(format!(
            "scaled adversary needs 0 <= delta < n/2, got delta = {delta}, n = {n}"
        )));
    }
    if x.positions().windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidParameter(
            "scaled adversary needs the position vector sorted ascending".into(),
        ));
    }
    let factor = 1.0 - 2.0 * delta / n;
    let y = PositionVector::new(n, x.positions().iter().map(|&v| factor * v).collect())?;
    HypothesisPair::new(x.clone(), y, delta)
}

/// One pair's contribution to L: `d_y - d_x` when the edge is present,
/// `log(1 - e^{-d_x}) - log(1 - e^{-d_y})` when absent.
pub fn pair_l_term(d_x: f64, d_y: f64, edge_present: bool) -> Result<f64> {
    for (name, d) in [("d_x", d_x), ("d_y", d_y)] {
        if !d.is_finite() || d <= 0.0 {
            let _ = name;
            return Err(Error::Domain {
                func: "pair_l_term",
                value: d,
            });
        }
    }
    Ok(pair_l_term_raw(d_x, d_y, edge_present))
}

#[inline]
fn pair_l_term_raw(d_x: f64, d_y: f64, edge_present: bool) -> f64 {
    if edge_present {
        d_y - d_x
    } else {
        math::log1m_exp_neg_raw(d_x) - math::log1m_exp_neg_raw(d_y)
    }
}

/// `L = log P_X(G) - log P_Y(G)` over all vertex pairs.
pub fn l_statistic(pair: &HypothesisPair, g: &RandomGraph) -> Result<f64> {
    let m = pair.len();
    if g.vertex_count() != m {
        return Err(Error::SizeMismatch(format!(
            "graph has {} vertices, hypothesis pair has {m}",
            g.vertex_count()
        )));
    }
    let mut total = 0.0f64;
    for i in 0..m {
        let mut nb = g
            .neighbors(i)
            .iter()
            .copied()
            .filter(|&j| j as usize > i)
            .peekable();
        for j in (i + 1)..m {
            let present = nb.peek() == Some(&(j as u32));
            if present {
                nb.next();
            }
            total += pair_l_term_raw(pair.x.distance(i, j), pair.y.distance(i, j), present);
        }
    }
    Ok(total)
}

/// Exact `E_{G~X}[L_{i,j}]` for one pair of distances: the KL divergence of
/// the two edge indicators,
/// `e^{-d_x}(d_y - d_x) + (1 - e^{-d_x})(log(1-e^{-d_x}) - log(1-e^{-d_y}))`.
pub fn expected_l_term(d_x: f64, d_y: f64) -> Result<f64> {
    for d in [d_x, d_y] {
        if !d.is_finite() || d <= 0.0 {
            return Err(Error::Domain {
                func: "expected_l_term",
                value: d,
            });
        }
    }
    Ok(expected_l_term_raw(d_x, d_y))
}

#[inline]
fn expected_l_term_raw(d_x: f64, d_y: f64) -> f64 {
    let p = (-d_x).exp();
    p * (d_y - d_x)
        + (1.0 - p) * (math::log1m_exp_neg_raw(d_x) - math::log1m_exp_neg_raw(d_y))
}

/// Exact `E[L] = KL(P_X || P_Y)`: the sum of [`expected_l_term`] over pairs.
/// Coincident points in either vector are a domain error.
pub fn expected_l(pair: &HypothesisPair) -> Result<f64> {
    let m = pair.len();
    let mut total = 0.0f64;
    for i in 0..m {
        for j in (i + 1)..m {
            total += expected_l_term(pair.x.distance(i, j), pair.y.distance(i, j))?;
        }
    }
    Ok(total)
}

/// Does `d'` satisfy the triangle inequality on every checked triple?
/// Exhaustive for m <= 100; 1e5 deterministic random triples above.
pub fn check_dprime_triangle(pair: &HypothesisPair) -> bool {
    let m = pair.len();
    // tiny slack for f64 rounding of the exact inequality
    let eps = 1e-12;
    let ok = |i: usize, j: usize, k: usize| {
        pair.d_prime(i, j) <= pair.d_prime(i, k) + pair.d_prime(k, j) + eps
    };
    if m <= 100 {
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    if i != j && j != k && i != k && !ok(i, j, k) {
                        return false;
                    }
                }
            }
        }
        return true;
    }
    let mut h = 0xd71e_5eed_u64;
    for _ in 0..100_000 {
        h = rng::mix64(h.wrapping_add(0x9e37_79b9_7f4a_7c15));
        let i = (h % m as u64) as usize;
        let j = (rng::mix64(h ^ 1) % m as u64) as usize;
        let k = (rng::mix64(h ^ 2) % m as u64) as usize;
        if i != j && j != k && i != k && !ok(i, j, k) {
            return false;
        }
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    FromX,
    FromY,
}

impl Hypothesis {
    pub fn as_str(&self) -> &'static str {
        match self {
            Hypothesis::FromX => "X",
            Hypothesis::FromY => "Y",
        }
    }
}

/// One distinguishing trial: the drawn truth, the observed statistic, and the
/// likelihood-ratio tester's choice (`FromX` iff `L >= 0`).
#[derive(Debug, Clone, Copy)]
pub struct TrialOutcome {
    pub trial: usize,
    pub truth: Hypothesis,
    pub l_value: f64,
    pub expected_l: f64,
    pub choice: Hypothesis,
    pub correct: bool,
}

#[derive(Debug, Clone)]
pub struct TrialSummary {
    pub n: f64,
    pub m: usize,
    pub delta: f64,
    pub trials: usize,
    pub error_rate: f64,
    pub mean_expected_l: f64,
    pub outcomes: Vec<TrialOutcome>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct TrialOptions {
    /// Reuse one X (and its scaled Y) across all trials instead of sampling
    /// a fresh X per trial.
    pub fixed_x: bool,
}

/// Monte Carlo distinguishing trials: per trial, sample a sorted X, build the
/// scaled Y, flip a fair coin for the generating vector, sample the graph,
/// and score the likelihood-ratio tester. Trials run independently from
/// per-trial derived seeds.
pub fn run_distinguish_trials(
    n: f64,
    m: usize,
    delta: f64,
    trials: usize,
    seed: u64,
) -> Result<TrialSummary> {
    run_distinguish_trials_with(n, m, delta, trials, seed, TrialOptions::default())
}

pub fn run_distinguish_trials_with(
    n: f64,
    m: usize,
    delta: f64,
    trials: usize,
    seed: u64,
    opts: TrialOptions,
) -> Result<TrialSummary> {
    if trials == 0 {
        return Err(Error::InvalidParameter("need at least one trial".into()));
    }
    if m < 1 {
        return Err(Error::InvalidParameter("need at least one vertex".into()));
    }
    // The sampling path only reads n, c, and the decay kind; the recovery
    // precision slot is inert here.
    let params = ModelParams::new(n, 1.0, DecayKind::Exponential, 0.05)?;
    let fixed_pair = if opts.fixed_x {
        Some(sample_scaled_pair(n, m, delta, derive(seed, 0), &params)?)
    } else {
        None
    };
    let outcomes: Vec<TrialOutcome> = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<TrialOutcome> {
            let t_seed = derive(seed, t as u64);
            let pair = match &fixed_pair {
                Some(p) => p.clone(),
                None => sample_scaled_pair(n, m, delta, t_seed, &params)?,
            };
            let coin = rng::unit_f64(rng::hash4(t_seed, rng::STREAM_COIN, 0, 0));
            let truth = if coin < 0.5 {
                Hypothesis::FromX
            } else {
                Hypothesis::FromY
            };
            let g_seed = rng::derive_seed(t_seed, rng::STREAM_GRAPH, 0);
            let z = match truth {
                Hypothesis::FromX => pair.x(),
                Hypothesis::FromY => pair.y(),
            };
            let g = model::sample_graph(z, &params, g_seed);
            let l_value = l_statistic(&pair, &g)?;
            let exp_l = expected_l(&pair)?;
            let choice = if l_value >= 0.0 {
                Hypothesis::FromX
            } else {
                Hypothesis::FromY
            };
            Ok(TrialOutcome {
                trial: t,
                truth,
                l_value,
                expected_l: exp_l,
                choice,
                correct: choice == truth,
            })
        })
        .collect::<Result<_>>()?;
    let wrong = outcomes.iter().filter(|o| !o.correct).count();
    let mean_expected_l = outcomes.iter().map(|o| o.expected_l).sum::<f64>() / trials as f64;
    Ok(TrialSummary {
        n,
        m,
        delta,
        trials,
        error_rate: wrong as f64 / trials as f64,
        mean_expected_l,
        outcomes,
    })
}

fn derive(seed: u64, t: u64) -> u64 {
    rng::derive_seed(seed, rng::STREAM_TRIAL, t)
}

/// Sample a sorted position vector with all-distinct entries (coincident
/// draws are rejected and resampled) and build its scaled adversary.
fn sample_scaled_pair(
    n: f64,
    m: usize,
    delta: f64,
    seed: u64,
    params: &ModelParams,
) -> Result<HypothesisPair> {
    for attempt in 0u64..64 {
        let raw = model::sample_positions(m, params, rng::derive_seed(seed, rng::STREAM_SAMPLE, attempt));
        let mut xs: Vec<f64> = raw.positions().to_vec();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let coincident = xs.windows(2).any(|w| w[0] == w[1]) || xs.first() == Some(&0.0);
        if coincident {
            continue;
        }
        let x = PositionVector::new(n, xs)?;
        return construct_scaled(&x, delta);
    }
    Err(Error::InvalidParameter(
        "could not sample distinct positions after 64 attempts".into(),
    ))
}

/// Regime label relative to the distinguishing thresholds
/// `0.05 n^{1.5} / delta` (below: indistinguishable regime) and
/// `n^{1.5} log n / delta` (above: distinguishable regime).
pub fn regime_label(n: f64, m: usize, delta: f64) -> &'static str {
    if delta <= 0.0 {
        return "degenerate";
    }
    let lb = 0.05 * n.powf(1.5) / delta;
    let ub = n.powf(1.5) * n.ln() / delta;
    let mf = m as f64;
    if mf < lb {
        "below-lb"
    } else if mf > ub {
        "above-ub"
    } else {
        "between"
    }
}
