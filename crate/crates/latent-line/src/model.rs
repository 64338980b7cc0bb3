//! The latent-position model: parameters, sampling, likelihood, and the
//! closed-form degree / common-neighbor densities.
//!
//! Vertices live at positions drawn uniformly on the segment `[0, n]`; each
//! unordered pair is joined independently with probability `c * f(d)` where
//! `f` is either `e^{-d}` (exponential decay) or `1/(d+1)` (linear decay).

use crate::error::{Error, Result};
use crate::math;
use crate::rng;
use rayon::prelude::*;

/// Edge-probability decay family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayKind {
    Exponential,
    Linear,
}

impl DecayKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            DecayKind::Exponential => "exp",
            DecayKind::Linear => "lin",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "exp" => Ok(DecayKind::Exponential),
            "lin" => Ok(DecayKind::Linear),
            other => Err(Error::InvalidParameter(format!(
                "unknown model '{other}' (expected exp or lin)"
            ))),
        }
    }
}

/// Model parameters: segment length `n`, edge constant `c`, decay family,
/// and the precision parameter `delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    n: f64,
    c: f64,
    decay: DecayKind,
    delta: f64,
}

impl ModelParams {
    /// Validates `n > 0`, `0 < c <= 1`, `0 < delta < 0.1`, all finite.
    pub fn new(n: f64, c: f64, decay: DecayKind, delta: f64) -> Result<Self> {
        if !n.is_finite() || n <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "segment length n must be finite and positive, got {n}"
            )));
        }
        if !c.is_finite() || c <= 0.0 || c > 1.0 {
            return Err(Error::InvalidParameter(format!(
                "edge constant c must satisfy 0 < c <= 1, got {c}"
            )));
        }
        if !delta.is_finite() || delta <= 0.0 || delta >= 0.1 {
            return Err(Error::InvalidParameter(format!(
                "precision delta must satisfy 0 < delta < 0.1, got {delta}"
            )));
        }
        Ok(ModelParams { n, c, decay, delta })
    }

    pub fn n(&self) -> f64 {
        self.n
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn decay(&self) -> DecayKind {
        self.decay
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

/// Latent locations `x_1..x_m` on `[0, n]`; the vector index is the vertex id.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionVector {
    n: f64,
    positions: Vec<f64>,
}

impl PositionVector {
    pub fn new(n: f64, positions: Vec<f64>) -> Result<Self> {
        if !n.is_finite() || n <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "segment length n must be finite and positive, got {n}"
            )));
        }
        if let Some(&bad) = positions.iter().find(|p| !p.is_finite() || **p < 0.0 || **p > n) {
            return Err(Error::InvalidParameter(format!(
                "position {bad} is outside the segment [0, {n}]"
            )));
        }
        Ok(PositionVector { n, positions })
    }

    pub fn n(&self) -> f64 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn get(&self, i: usize) -> f64 {
        self.positions[i]
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        (self.positions[i] - self.positions[j]).abs()
    }

    /// Vertex ids sorted by position (ties by id).
    pub fn sorted_order(&self) -> Vec<u32> {
        let mut order: Vec<u32> = (0..self.positions.len() as u32).collect();
        order.sort_by(|&a, &b| {
            self.positions[a as usize]
                .partial_cmp(&self.positions[b as usize])
                .unwrap()
                .then(a.cmp(&b))
        });
        order
    }
}

/// The observed simple graph, stored as sorted per-vertex neighbor lists.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomGraph {
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
    edge_count: usize,
}

impl RandomGraph {
    /// Build from unordered edges given as `i < j` pairs.
    pub fn from_edges(m: usize, edges: &[(u32, u32)]) -> Result<Self> {
        let mut sorted = edges.to_vec();
        sorted.sort_unstable();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return Err(Error::InvalidParameter(format!(
                    "duplicate edge ({}, {})",
                    w[0].0, w[0].1
                )));
            }
        }
        for &(i, j) in &sorted {
            if i >= j || (j as usize) >= m {
                return Err(Error::InvalidParameter(format!(
                    "edge ({i}, {j}) is not an ordered pair of distinct vertices below {m}"
                )));
            }
        }
        Ok(Self::from_sorted_out_lists(m, |i| {
            let lo = sorted.partition_point(|&(a, _)| (a as usize) < i);
            let hi = sorted.partition_point(|&(a, _)| (a as usize) <= i);
            sorted[lo..hi].iter().map(|&(_, j)| j).collect()
        }))
    }

    /// Assemble CSR adjacency from per-vertex out-lists (`j > i`, ascending).
    fn from_sorted_out_lists(m: usize, out_of: impl Fn(usize) -> Vec<u32>) -> Self {
        let out: Vec<Vec<u32>> = (0..m).map(out_of).collect();
        Self::assemble(m, out)
    }

    fn assemble(m: usize, out: Vec<Vec<u32>>) -> Self {
        let mut degree = vec![0usize; m];
        let mut edge_count = 0usize;
        for (i, row) in out.iter().enumerate() {
            degree[i] += row.len();
            edge_count += row.len();
            for &j in row {
                degree[j as usize] += 1;
            }
        }
        let mut offsets = vec![0usize; m + 1];
        for i in 0..m {
            offsets[i + 1] = offsets[i] + degree[i];
        }
        let mut fill = offsets.clone();
        let mut neighbors = vec![0u32; offsets[m]];
        // Inserting edges in (i asc, j asc) order keeps every row sorted:
        // row j receives in-neighbors (< j) before its own out-neighbors (> j).
        for (i, row) in out.iter().enumerate() {
            for &j in row {
                neighbors[fill[i]] = j;
                fill[i] += 1;
                neighbors[fill[j as usize]] = i as u32;
                fill[j as usize] += 1;
            }
        }
        RandomGraph {
            offsets,
            neighbors,
            edge_count,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Sorted neighbor list of `i`.
    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.neighbors[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.neighbors(i).binary_search(&(j as u32)).is_ok()
    }

    /// Edges as `i < j` pairs in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.vertex_count()).flat_map(move |i| {
            let i32_ = i as u32;
            self.neighbors(i)
                .iter()
                .copied()
                .filter(move |&j| j > i32_)
                .map(move |j| (i32_, j))
        })
    }
}

/// Options for [`sample_graph_with`]; `probability_cutoff` skips pairs whose
/// edge probability is below 1e-15 (exponential decay only). This is an
/// approximation and is off by default.
#[derive(Debug, Clone, Copy, Default)]
pub struct SampleOptions {
    pub probability_cutoff: bool,
}

/// Draw `m` positions uniformly on `[0, n]`. Vertex `i`'s position depends
/// only on `(seed, i)`.
pub fn sample_positions(m: usize, params: &ModelParams, seed: u64) -> PositionVector {
    let n = params.n();
    let positions = (0..m as u64).map(|i| n * rng::position_unit(seed, i)).collect();
    PositionVector { n, positions }
}

/// Edge probability at distance `d`: `c * e^{-d}` or `c / (d + 1)`.
pub fn edge_probability(params: &ModelParams, d: f64) -> Result<f64> {
    if !d.is_finite() || d < 0.0 {
        return Err(Error::Domain {
            func: "edge_probability",
            value: d,
        });
    }
    Ok(edge_probability_raw(params, d))
}

#[inline]
pub(crate) fn edge_probability_raw(params: &ModelParams, d: f64) -> f64 {
    match params.decay {
        DecayKind::Exponential => params.c * (-d).exp(),
        DecayKind::Linear => params.c / (d + 1.0),
    }
}

/// Sample the random graph on `X`. Each unordered pair `{i, j}` is included
/// independently with probability `edge_probability(params, |x_i - x_j|)`;
/// the coin for a pair depends only on `(seed, i, j)`, so the result is
/// identical for any pair-evaluation order or thread count.
pub fn sample_graph(x: &PositionVector, params: &ModelParams, seed: u64) -> RandomGraph {
    sample_graph_with(x, params, seed, SampleOptions::default())
}

pub fn sample_graph_with(
    x: &PositionVector,
    params: &ModelParams,
    seed: u64,
    opts: SampleOptions,
) -> RandomGraph {
    let m = x.len();
    let pos = x.positions();
    // c*e^{-d} < 1e-15  <=>  d > ln c + 15 ln 10
    let cutoff = if opts.probability_cutoff && params.decay == DecayKind::Exponential {
        params.c.ln() + 15.0 * std::f64::consts::LN_10
    } else {
        f64::INFINITY
    };
    let out: Vec<Vec<u32>> = (0..m)
        .into_par_iter()
        .map(|i| {
            let xi = pos[i];
            let mut row = Vec::new();
            for (j, &xj) in pos.iter().enumerate().skip(i + 1) {
                let d = (xi - xj).abs();
                if d > cutoff {
                    continue;
                }
                let p = edge_probability_raw(params, d);
                if rng::edge_unit(seed, i as u64, j as u64) < p {
                    row.push(j as u32);
                }
            }
            row
        })
        .collect();
    RandomGraph::assemble(m, out)
}

/// Log-likelihood `log P_X(G)`: sum of `log p_ij` over edges plus
/// `log(1 - p_ij)` over non-edges.
///
/// Returns negative infinity (flagged, not an error) when a zero-probability
/// configuration occurs, e.g. a coincident pair with `c = 1` and no edge.
pub fn log_likelihood(x: &PositionVector, g: &RandomGraph, params: &ModelParams) -> Result<f64> {
    let m = x.len();
    if g.vertex_count() != m {
        return Err(Error::SizeMismatch(format!(
            "graph has {} vertices, position vector has {m}",
            g.vertex_count()
        )));
    }
    let pos = x.positions();
    let c = params.c;
    let mut total = 0.0f64;
    for i in 0..m {
        let xi = pos[i];
        let mut nb = g.neighbors(i).iter().copied().filter(|&j| j as usize > i).peekable();
        for (j, &xj) in pos.iter().enumerate().skip(i + 1) {
            let d = (xi - xj).abs();
            let present = nb.peek() == Some(&(j as u32));
            if present {
                nb.next();
            }
            total += pair_log_term(params, c, d, present);
        }
    }
    Ok(total)
}

#[inline]
fn pair_log_term(params: &ModelParams, c: f64, d: f64, present: bool) -> f64 {
    match params.decay {
        DecayKind::Exponential => {
            if present {
                c.ln() - d
            } else if c == 1.0 {
                if d == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    math::log1m_exp_neg_raw(d)
                }
            } else {
                (-c * (-d).exp()).ln_1p()
            }
        }
        DecayKind::Linear => {
            if present {
                c.ln() - d.ln_1p()
            } else {
                // ln_1p(-1) = -inf covers the coincident c = 1 case.
                (-c / (d + 1.0)).ln_1p()
            }
        }
    }
}

/// Probability that one uniformly placed other vertex is adjacent to a vertex
/// at `x`: the expected-degree density of the model.
pub fn expected_degree_density(params: &ModelParams, x: f64) -> Result<f64> {
    let n = params.n;
    if !x.is_finite() || x < 0.0 || x > n {
        return Err(Error::Domain {
            func: "expected_degree_density",
            value: x,
        });
    }
    let c = params.c;
    Ok(match params.decay {
        DecayKind::Exponential => c * (2.0 - math::h_exp_raw(x, n)) / n,
        DecayKind::Linear => c * ((x + 1.0).ln() + (n - x + 1.0).ln()) / n,
    })
}

/// Probability that one uniformly placed third vertex is adjacent to both a
/// vertex at `x_i` and one at `x_j`: the common-neighbor density.
pub fn expected_common_density(params: &ModelParams, x_i: f64, x_j: f64) -> Result<f64> {
    let n = params.n;
    for &x in &[x_i, x_j] {
        if !x.is_finite() || x < 0.0 || x > n {
            return Err(Error::Domain {
                func: "expected_common_density",
                value: x,
            });
        }
    }
    let c = params.c;
    let d = (x_i - x_j).abs();
    Ok(match params.decay {
        DecayKind::Exponential => {
            let ends = 0.5 * ((-x_i - x_j).exp() + (x_i + x_j - 2.0 * n).exp());
            c * c * (math::g_exp_raw(d) - ends) / n
        }
        DecayKind::Linear => {
            // h(d) - g_log(x_i+1, x_j+1) - g_log(n-x_i+1, n-x_j+1); the g_log
            // continuity limit 1/(x+1) covers the coincident case.
            let near = math::g_log_raw(x_i + 1.0, x_j + 1.0);
            let far = math::g_log_raw(n - x_i + 1.0, n - x_j + 1.0);
            c * c * (math::h_lin_raw(d) - near - far) / n
        }
    })
}
