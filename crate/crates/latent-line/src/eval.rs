//! Position recovery from an order, and the evaluation metrics: true
//! distances of inverted pairs and per-vertex position errors, summarized by
//! nearest-rank percentiles.
//!
//! A recovered order is only defined up to reflection, so every report first
//! picks the orientation (as-is or reflected) minimizing the inversion count
//! and evaluates under that choice.

use crate::error::{Error, Result};
use crate::model::PositionVector;
use crate::order::OrderResult;
use crate::rng;

/// Hard cap on materialized inverted pairs; above it the report switches to
/// uniform reservoir sampling of [`INVERSION_SAMPLE_SIZE`] pairs.
pub const INVERSION_COLLECT_CAP: u64 = 10_000_000;
pub const INVERSION_SAMPLE_SIZE: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    AsIs,
    Reflected,
}

impl Orientation {
    pub fn as_str(&self) -> &'static str {
        match self {
            Orientation::AsIs => "as-is",
            Orientation::Reflected => "reflected",
        }
    }
}

/// Nearest-rank percentile summary of a sample; all zeros for an empty one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Percentiles {
    pub p90: f64,
    pub p95: f64,
    pub p99: f64,
    pub max: f64,
}

impl Percentiles {
    pub fn zeros() -> Self {
        Percentiles {
            p90: 0.0,
            p95: 0.0,
            p99: 0.0,
            max: 0.0,
        }
    }

    /// Nearest-rank percentiles of an unsorted sample.
    pub fn of(mut sample: Vec<f64>) -> Self {
        if sample.is_empty() {
            return Self::zeros();
        }
        sample.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = sample.len();
        let rank = |p: f64| -> f64 {
            let k = ((p / 100.0) * n as f64).ceil() as usize;
            sample[k.clamp(1, n) - 1]
        };
        Percentiles {
            p90: rank(90.0),
            p95: rank(95.0),
            p99: rank(99.0),
            max: sample[n - 1],
        }
    }
}

/// Inversion metrics of a recovered order against the true positions.
#[derive(Debug, Clone, PartialEq)]
pub struct InversionReport {
    /// Inversions under the chosen orientation.
    pub count: u64,
    pub orientation: Orientation,
    /// True-distance percentiles over the inverted pairs.
    pub distances: Percentiles,
    /// Whether the distance sample was reservoir-sampled rather than
    /// exhaustive.
    pub sampled: bool,
}

/// Position-error metrics: percentiles of |recovered - true| per vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionErrorReport {
    pub errors: Percentiles,
}

/// Uniform dispersal: the vertex at rank i (1-based) of the order receives
/// position i*n/m.
pub fn recover_positions(order: &OrderResult, n: f64) -> Result<PositionVector> {
    let m = order.order.len();
    let mut positions = vec![0.0f64; m];
    for (idx, &v) in order.order.iter().enumerate() {
        positions[v as usize] = (idx + 1) as f64 * n / m as f64;
    }
    PositionVector::new(n, positions)
}

/// Count strict inversions of `seq` (pairs s < t with seq[s] > seq[t]) and
/// strict anti-inversions (seq[s] < seq[t]) with a Fenwick tree.
fn count_both(seq: &[f64]) -> (u64, u64) {
    let m = seq.len();
    let mut sorted: Vec<f64> = seq.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    sorted.dedup();
    let rank = |v: f64| sorted.partition_point(|&s| s < v);
    let mut tree = vec![0u64; sorted.len() + 1];
    let add = |mut i: usize, tree: &mut Vec<u64>| {
        i += 1;
        while i <= sorted.len() {
            tree[i] += 1;
            i += i & i.wrapping_neg();
        }
    };
    let prefix = |mut i: usize, tree: &Vec<u64>| -> u64 {
        let mut s = 0;
        while i > 0 {
            s += tree[i];
            i -= i & i.wrapping_neg();
        }
        s
    };
    let mut inv = 0u64;
    let mut anti = 0u64;
    let mut ties = 0u64;
    for (t, &v) in seq.iter().enumerate() {
        let r = rank(v);
        let le = prefix(r + 1, &tree); // previous elements <= v
        let lt = prefix(r, &tree); // previous elements < v
        let eq = le - lt;
        inv += t as u64 - le;
        anti += lt;
        ties += eq;
        add(r, &mut tree);
    }
    debug_assert_eq!(inv + anti + ties, (m as u64) * (m as u64 - 1) / 2);
    (inv, anti)
}

/// Merge-sort pass emitting the value difference `high - low` of every strict
/// inversion into `sink`.
fn collect_inversion_gaps(seq: &[f64], mut sink: impl FnMut(f64)) {
    let mut work: Vec<f64> = seq.to_vec();
    let mut buf = vec![0.0f64; seq.len()];
    fn merge(
        work: &mut [f64],
        buf: &mut [f64],
        lo: usize,
        hi: usize,
        sink: &mut impl FnMut(f64),
    ) {
        if hi - lo <= 1 {
            return;
        }
        let mid = (lo + hi) / 2;
        merge(work, buf, lo, mid, sink);
        merge(work, buf, mid, hi, sink);
        let (mut a, mut b, mut out) = (lo, mid, lo);
        while a < mid && b < hi {
            if work[a] <= work[b] {
                buf[out] = work[a];
                a += 1;
            } else {
                // work[b] inverts with every remaining left element
                for &l in &work[a..mid] {
                    sink(l - work[b]);
                }
                buf[out] = work[b];
                b += 1;
            }
            out += 1;
        }
        while a < mid {
            buf[out] = work[a];
            a += 1;
            out += 1;
        }
        while b < hi {
            buf[out] = work[b];
            b += 1;
            out += 1;
        }
        work[lo..hi].copy_from_slice(&buf[lo..hi]);
    }
    let len = work.len();
    merge(&mut work, &mut buf, 0, len, &mut sink);
}

/// Inversion report of `order` against the true positions, under the
/// inversion-minimizing orientation (ties default to as-is).
pub fn inversion_report(truth: &PositionVector, order: &OrderResult) -> Result<InversionReport> {
    let m = truth.len();
    if order.order.len() != m {
        return Err(Error::SizeMismatch(format!(
            "order covers {} vertices, truth has {m}",
            order.order.len()
        )));
    }
    let seq: Vec<f64> = order.order.iter().map(|&v| truth.get(v as usize)).collect();
    let (inv, anti) = count_both(&seq);
    let (orientation, count) = if anti < inv {
        (Orientation::Reflected, anti)
    } else {
        (Orientation::AsIs, inv)
    };
    let oriented: Vec<f64> = match orientation {
        Orientation::AsIs => seq,
        Orientation::Reflected => seq.into_iter().rev().collect(),
    };
    let (distances, sampled) = if count == 0 {
        (Percentiles::zeros(), false)
    } else if count <= INVERSION_COLLECT_CAP {
        let mut gaps = Vec::with_capacity(count as usize);
        collect_inversion_gaps(&oriented, |g| gaps.push(g));
        debug_assert_eq!(gaps.len() as u64, count);
        (Percentiles::of(gaps), false)
    } else {
        // uniform reservoir over the inversion stream
        let mut reservoir: Vec<f64> = Vec::with_capacity(INVERSION_SAMPLE_SIZE);
        let mut seen = 0u64;
        collect_inversion_gaps(&oriented, |g| {
            seen += 1;
            if reservoir.len() < INVERSION_SAMPLE_SIZE {
                reservoir.push(g);
            } else {
                let r = rng::hash4(0xe7a1, rng::STREAM_SAMPLE, seen, 0) % seen;
                if (r as usize) < INVERSION_SAMPLE_SIZE {
                    reservoir[r as usize] = g;
                }
            }
        });
        (Percentiles::of(reservoir), true)
    };
    Ok(InversionReport {
        count,
        orientation,
        distances,
        sampled,
    })
}

/// Percentiles of |recovered position - true position| per vertex, under the
/// given orientation (reflected compares against n - recovered).
pub fn position_error_report(
    truth: &PositionVector,
    recovered: &PositionVector,
    orientation: Orientation,
) -> Result<PositionErrorReport> {
    if truth.len() != recovered.len() {
        return Err(Error::SizeMismatch(format!(
            "truth has {} vertices, recovered has {}",
            truth.len(),
            recovered.len()
        )));
    }
    let n = recovered.n();
    let errors: Vec<f64> = (0..truth.len())
        .map(|v| {
            let xhat = match orientation {
                Orientation::AsIs => recovered.get(v),
                Orientation::Reflected => n - recovered.get(v),
            };
            (xhat - truth.get(v)).abs()
        })
        .collect();
    Ok(PositionErrorReport {
        errors: Percentiles::of(errors),
    })
}

/// Convenience: an order result standing for "the true ascending order",
/// used to probe the position-recovery guarantee in isolation.
pub fn order_from_truth(truth: &PositionVector) -> OrderResult {
    let order = truth.sorted_order();
    OrderResult {
        scores: {
            let mut s = vec![0i64; order.len()];
            for (rank, &v) in order.iter().enumerate() {
                s[v as usize] = rank as i64;
            }
            s
        },
        anchor: *order.first().unwrap_or(&0),
        oriented_graph_size: 0,
        order,
    }
}
