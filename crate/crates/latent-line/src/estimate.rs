//! (L, U, delta)-approximate pairwise distance estimates.
//!
//! Three backends share one interface: an exact oracle over the true
//! positions (for isolation testing), the exponential-model estimator built
//! on common-neighbor counts and degrees, and the linear-model estimator with
//! its endpoint cascade.
//!
//! Point queries (`query`) recompute the estimate exactly in f64. Order
//! recovery instead consumes precomputed "near rows": for every pair whose
//! estimate lands at or below `U - delta`, the value is cached as f32, and
//! absence means "far". Every decision the recovery algorithm makes (window
//! membership, admission margins, anchor far-tests) is invariant under that
//! representation.

use crate::error::{Error, Result};
use crate::math;
use crate::model::{ModelParams, PositionVector, RandomGraph};
use crate::stats;
use std::sync::OnceLock;

/// Validity window of a distance approximation.
///
/// `3*delta < l < n/2 - 2*delta` and `u > 2*l + 8*delta`; these are exactly
/// the conditions under which order recovery from the approximation is sound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceWindow {
    l: f64,
    u: f64,
    delta: f64,
}

impl DistanceWindow {
    pub fn new(l: f64, u: f64, delta: f64, n: f64) -> Result<Self> {
        for (name, v) in [("l", l), ("u", u), ("delta", delta), ("n", n)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "window parameter {name} must be finite and positive, got {v}"
                )));
            }
        }
        if 3.0 * delta >= l || l >= n / 2.0 - 2.0 * delta {
            return Err(Error::InvalidParameter(format!(
                "window requires 3*delta < l < n/2 - 2*delta (l = {l}, delta = {delta}, n = {n})"
            )));
        }
        if u <= 2.0 * l + 8.0 * delta {
            return Err(Error::InvalidParameter(format!(
                "window requires u > 2*l + 8*delta (l = {l}, u = {u}, delta = {delta})"
            )));
        }
        Ok(DistanceWindow { l, u, delta })
    }

    /// Default exponential-model window (0.3, 2.5, delta).
    pub fn exponential(delta: f64, n: f64) -> Result<Self> {
        Self::new(0.3, 2.5, delta, n)
    }

    /// Default linear-model window (0.5, 2, delta).
    pub fn linear(delta: f64, n: f64) -> Result<Self> {
        Self::new(0.5, 2.0, delta, n)
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Flank admission band `[l + delta, 2l + 7delta]`.
    pub fn flank_lo(&self) -> f64 {
        self.l + self.delta
    }

    pub fn flank_hi(&self) -> f64 {
        2.0 * self.l + 7.0 * self.delta
    }

    /// Triple admission margin `3*delta`.
    pub fn margin(&self) -> f64 {
        3.0 * self.delta
    }

    /// Anchor far-threshold `u - delta`.
    pub fn far_threshold(&self) -> f64 {
        self.u - self.delta
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatorKind {
    ExactOracle,
    ExponentialModel,
    LinearModel,
}

/// Per-vertex cache of all pair estimates at or below a cap, row-sorted.
///
/// Built once per estimator; absence of a pair means its estimate exceeds the
/// cap (clamped, sentinel, or genuinely far).
pub(crate) struct NearRows {
    offsets: Vec<usize>,
    keys: Vec<u32>,
    vals: Vec<f32>,
}

impl NearRows {
    pub(crate) fn row(&self, i: usize) -> (&[u32], &[f32]) {
        let lo = self.offsets[i];
        let hi = self.offsets[i + 1];
        (&self.keys[lo..hi], &self.vals[lo..hi])
    }

    pub(crate) fn get(&self, i: usize, j: usize) -> Option<f32> {
        let (keys, vals) = self.row(i);
        keys.binary_search(&(j as u32)).ok().map(|p| vals[p])
    }

    pub(crate) fn entry_count(&self) -> usize {
        self.keys.len()
    }

    /// Assemble a symmetric CSR from lower-triangle rows (`j > i`, ascending).
    fn from_lower(m: usize, lower: Vec<Vec<(u32, f32)>>) -> Self {
        let mut degree = vec![0usize; m];
        for (i, row) in lower.iter().enumerate() {
            degree[i] += row.len();
            for &(j, _) in row {
                degree[j as usize] += 1;
            }
        }
        let mut offsets = vec![0usize; m + 1];
        for i in 0..m {
            offsets[i + 1] = offsets[i] + degree[i];
        }
        let total = offsets[m];
        let mut fill = offsets.clone();
        let mut keys = vec![0u32; total];
        let mut vals = vec![0f32; total];
        for (i, row) in lower.iter().enumerate() {
            for &(j, v) in row {
                keys[fill[i]] = j;
                vals[fill[i]] = v;
                fill[i] += 1;
                let jz = j as usize;
                keys[fill[jz]] = i as u32;
                vals[fill[jz]] = v;
                fill[jz] += 1;
            }
        }
        NearRows { offsets, keys, vals }
    }
}

enum Backend<'a> {
    Oracle {
        x: &'a PositionVector,
    },
    Exp {
        model: ScalarModel<'a>,
    },
    Lin {
        model: ScalarModel<'a>,
        /// Multiplicative-estimate threshold separating "same endpoint" from
        /// "opposite endpoints" in the cascade.
        tau_same: f64,
        epsilon: f64,
        x_hat: Vec<f64>,
    },
}

/// Shared state of the two model-backed estimators: the count source plus
/// per-vertex degree-derived statistics.
struct ScalarModel<'a> {
    counts: CountSource<'a>,
    params: ModelParams,
    /// Nominal sample size behind the statistics: the graph's vertex count,
    /// or whatever scale exact expectations were computed at.
    m: usize,
    /// Exponential model: `h_hat[i] = 2 - deg(i) n / (c (m-1))`, the plug-in
    /// estimate of `h(x_i)`. Linear model: `a_hat[i] = deg(i) n / (c (m-1))`.
    per_vertex: Vec<f64>,
}

enum CountSource<'a> {
    Graph(&'a RandomGraph),
    Exact(Box<dyn Fn(usize, usize) -> f64 + Send + Sync>),
}

impl CountSource<'_> {
    fn common(&self, i: usize, j: usize) -> f64 {
        match self {
            CountSource::Graph(g) => {
                stats::common_neighbors(g, i, j).expect("indices checked by caller") as f64
            }
            CountSource::Exact(f) => f(i, j),
        }
    }
}

/// An (L, U, delta)-approximate pairwise distance estimate.
pub struct DistanceEstimate<'a> {
    kind: EstimatorKind,
    window: DistanceWindow,
    sentinel: f64,
    m: usize,
    backend: Backend<'a>,
    rows: OnceLock<NearRows>,
}

impl<'a> DistanceEstimate<'a> {
    pub fn kind(&self) -> EstimatorKind {
        self.kind
    }

    pub fn window(&self) -> DistanceWindow {
        self.window
    }

    /// The "far" return value (the segment length n).
    pub fn far_value(&self) -> f64 {
        self.sentinel
    }

    pub fn vertex_count(&self) -> usize {
        self.m
    }

    /// Estimated distance between `i` and `j`. Symmetric, non-negative,
    /// `query(i, i) = 0`.
    pub fn query(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.m && j < self.m, "vertex out of range");
        if i == j {
            return 0.0;
        }
        match &self.backend {
            Backend::Oracle { x } => x.distance(i, j),
            Backend::Exp { model } => exp_pair_estimate(model, model.counts.common(i, j), i, j),
            Backend::Lin {
                model,
                tau_same,
                epsilon,
                x_hat,
            } => {
                lin_pair_estimate(model, x_hat, *tau_same, *epsilon, model.counts.common(i, j), i, j)
                    .0
            }
        }
    }

    #[cfg(test)]
    pub(crate) fn lin_query_branch(&self, i: usize, j: usize) -> (f64, LinBranch) {
        match &self.backend {
            Backend::Lin {
                model,
                tau_same,
                epsilon,
                x_hat,
            } => lin_pair_estimate(model, x_hat, *tau_same, *epsilon, model.counts.common(i, j), i, j),
            _ => panic!("not a linear estimator"),
        }
    }

    /// Linear-model endpoint estimates, when this is a linear estimator.
    pub fn endpoint_estimates(&self) -> Option<&[f64]> {
        match &self.backend {
            Backend::Lin { x_hat, .. } => Some(x_hat),
            _ => None,
        }
    }

    /// The near-row cache; built on first use.
    pub(crate) fn near_rows(&self) -> &NearRows {
        self.rows.get_or_init(|| self.build_rows())
    }

    /// Iterate all cached pair estimates as `(i, j, d_hat)` with `i < j`.
    pub fn computed_estimates(&self) -> Vec<(u32, u32, f64)> {
        let rows = self.near_rows();
        let mut out = Vec::with_capacity(rows.entry_count() / 2);
        for i in 0..self.m {
            let (keys, vals) = rows.row(i);
            for (pos, &j) in keys.iter().enumerate() {
                if j as usize > i {
                    out.push((i as u32, j, vals[pos] as f64));
                }
            }
        }
        out
    }

    fn build_rows(&self) -> NearRows {
        let cap = self.window.far_threshold();
        match &self.backend {
            Backend::Oracle { x } => oracle_rows(x, cap),
            Backend::Exp { model } => match &model.counts {
                CountSource::Graph(g) => {
                    let lower = stats::cooccurrence_rows(g, |i, j, count| {
                        let d = exp_pair_estimate(model, count as f64, i, j as usize);
                        (d <= cap).then_some((j, d as f32))
                    });
                    NearRows::from_lower(self.m, lower)
                }
                CountSource::Exact(_) => self.dense_rows(cap),
            },
            Backend::Lin {
                model,
                tau_same,
                epsilon,
                x_hat,
            } => match &model.counts {
                CountSource::Graph(g) => {
                    let lower = stats::cooccurrence_rows(g, |i, j, count| {
                        let d =
                            lin_pair_estimate(model, x_hat, *tau_same, *epsilon, count as f64, i, j as usize)
                                .0;
                        (d <= cap).then_some((j, d as f32))
                    });
                    NearRows::from_lower(self.m, lower)
                }
                CountSource::Exact(_) => self.dense_rows(cap),
            },
        }
    }

    /// Fallback row construction by full pair enumeration; used for the
    /// exact-statistics backends, which are meant for small deterministic
    /// checks.
    fn dense_rows(&self, cap: f64) -> NearRows {
        let lower: Vec<Vec<(u32, f32)>> = (0..self.m)
            .map(|i| {
                ((i + 1)..self.m)
                    .filter_map(|j| {
                        let d = self.query(i, j);
                        (d <= cap).then_some((j as u32, d as f32))
                    })
                    .collect()
            })
            .collect();
        NearRows::from_lower(self.m, lower)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(not(test), allow(dead_code))]
pub(crate) enum LinBranch {
    /// 1: both endpoints far from the segment ends; invert `a_hat` directly.
    Interior,
    /// 2: one vertex near an end, the other far from both; output far.
    MixedFar,
    /// 3: same-endpoint test failed; the pair straddles the segment.
    OppositeEnds,
    /// 4: both near an end; output the endpoint-estimate difference.
    EndpointDiff,
    /// 5: one clearly past the near zone, one inside it; output far.
    NearFar,
    /// 6: both moderately in; invert with the g_log correction.
    CorrectedInterior,
}

/// Exact-oracle estimate: `query(i, j) = |x_i - x_j|`. Trivially an
/// (L, U, delta)-approximation for every positive delta.
pub fn exact_oracle<'a>(x: &'a PositionVector, window: DistanceWindow) -> DistanceEstimate<'a> {
    DistanceEstimate {
        kind: EstimatorKind::ExactOracle,
        window,
        sentinel: x.n(),
        m: x.len(),
        backend: Backend::Oracle { x },
        rows: OnceLock::new(),
    }
}

fn oracle_rows(x: &PositionVector, cap: f64) -> NearRows {
    let m = x.len();
    let order = x.sorted_order();
    let pos = x.positions();
    let mut lower: Vec<Vec<(u32, f32)>> = vec![Vec::new(); m];
    let mut hi = 0usize;
    for lo in 0..m {
        if hi < lo + 1 {
            hi = lo + 1;
        }
        while hi < m && pos[order[hi] as usize] - pos[order[lo] as usize] <= cap {
            hi += 1;
        }
        let a = order[lo];
        for &b in &order[(lo + 1)..hi] {
            let d = (pos[a as usize] - pos[b as usize]).abs() as f32;
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            lower[i as usize].push((j, d));
        }
    }
    for row in lower.iter_mut() {
        row.sort_unstable_by_key(|&(j, _)| j);
    }
    NearRows::from_lower(m, lower)
}

/// Exponential-model estimator with the standard (0.3, 2.5) window.
pub fn estimate_exp<'a>(g: &'a RandomGraph, params: &ModelParams) -> Result<DistanceEstimate<'a>> {
    let window = DistanceWindow::exponential(params.delta(), params.n())?;
    estimate_exp_windowed(g, params, window)
}

/// Exponential-model estimator with an explicit window.
pub fn estimate_exp_windowed<'a>(
    g: &'a RandomGraph,
    params: &ModelParams,
    window: DistanceWindow,
) -> Result<DistanceEstimate<'a>> {
    let m = g.vertex_count();
    let degrees: Vec<f64> = (0..m).map(|i| g.degree(i) as f64).collect();
    Ok(exp_estimator(CountSource::Graph(g), &degrees, params, m, window))
}

/// Exponential-model estimator fed explicit per-vertex degrees and a pairwise
/// common-neighbor statistic (typically exact expectations, for deterministic
/// checks of the inversion pipeline). `nominal_m` is the sample size the
/// statistics were computed at; the vertex count is `degrees.len()`.
pub fn exp_from_statistics<'a>(
    degrees: &[f64],
    common: impl Fn(usize, usize) -> f64 + Send + Sync + 'static,
    params: &ModelParams,
    window: DistanceWindow,
    nominal_m: usize,
) -> DistanceEstimate<'a> {
    exp_estimator(
        CountSource::Exact(Box::new(common)),
        degrees,
        params,
        nominal_m,
        window,
    )
}

fn exp_estimator<'a>(
    counts: CountSource<'a>,
    degrees: &[f64],
    params: &ModelParams,
    nominal_m: usize,
    window: DistanceWindow,
) -> DistanceEstimate<'a> {
    let n = params.n();
    let c = params.c();
    let h_hat: Vec<f64> = degrees
        .iter()
        .map(|&deg| {
            if nominal_m >= 2 {
                2.0 - deg * n / (c * (nominal_m - 1) as f64)
            } else {
                2.0
            }
        })
        .collect();
    DistanceEstimate {
        kind: EstimatorKind::ExponentialModel,
        window,
        sentinel: n,
        m: degrees.len(),
        backend: Backend::Exp {
            model: ScalarModel {
                counts,
                params: *params,
                m: nominal_m,
                per_vertex: h_hat,
            },
        },
        rows: OnceLock::new(),
    }
}

/// One exponential-model pair estimate from a common-neighbor statistic.
///
/// No common neighbors means the pair is far, and the sentinel is returned.
/// Otherwise the common count is normalized to `W_hat`, the degree-based
/// `h_hat` terms reconstruct the endpoint contribution that the
/// common-neighbor density subtracts, and the sum is inverted through
/// `g(d) = (d+1)e^{-d}` on [0.3, 2.5].
fn exp_pair_estimate(model: &ScalarModel<'_>, common: f64, i: usize, j: usize) -> f64 {
    let params = &model.params;
    let n = params.n();
    let c = params.c();
    if common <= 0.0 || model.m < 3 {
        return n;
    }
    let w_hat = common * n / (c * c * (model.m - 2) as f64);
    let g_hat = w_hat + 0.5 * model.per_vertex[i] * model.per_vertex[j];
    math::invert_g_exp(g_hat, math::exp_inversion_range())
        .expect("g_hat is finite by construction")
}

/// Linear-model estimator with the standard (0.5, 2) window and the default
/// same-endpoint threshold 0.1.
pub fn estimate_lin<'a>(g: &'a RandomGraph, params: &ModelParams) -> Result<DistanceEstimate<'a>> {
    let window = DistanceWindow::linear(params.delta(), params.n())?;
    estimate_lin_with(g, params, window, DEFAULT_TAU_SAME)
}

/// Default threshold on the normalized common statistic below which a pair of
/// near-endpoint vertices is declared to straddle the segment. The statistic
/// is Theta(1) for same-end pairs and O(1/n) for opposite ends; 0.1 sits well
/// between the two for n >= 25.
pub const DEFAULT_TAU_SAME: f64 = 0.1;

/// Linear-model estimator with explicit window and same-endpoint threshold.
pub fn estimate_lin_with<'a>(
    g: &'a RandomGraph,
    params: &ModelParams,
    window: DistanceWindow,
    tau_same: f64,
) -> Result<DistanceEstimate<'a>> {
    let m = g.vertex_count();
    let degrees: Vec<f64> = (0..m).map(|i| g.degree(i) as f64).collect();
    Ok(lin_estimator(CountSource::Graph(g), &degrees, params, m, window, tau_same))
}

/// Linear-model estimator fed explicit statistics (see [`exp_from_statistics`]).
pub fn lin_from_statistics<'a>(
    degrees: &[f64],
    common: impl Fn(usize, usize) -> f64 + Send + Sync + 'static,
    params: &ModelParams,
    window: DistanceWindow,
    tau_same: f64,
    nominal_m: usize,
) -> DistanceEstimate<'a> {
    lin_estimator(
        CountSource::Exact(Box::new(common)),
        degrees,
        params,
        nominal_m,
        window,
        tau_same,
    )
}

fn lin_estimator<'a>(
    counts: CountSource<'a>,
    degrees: &[f64],
    params: &ModelParams,
    nominal_m: usize,
    window: DistanceWindow,
    tau_same: f64,
) -> DistanceEstimate<'a> {
    let x_hat: Vec<f64> = degrees
        .iter()
        .map(|&deg| lin_endpoint_from_degree(deg, params, nominal_m))
        .collect();
    DistanceEstimate {
        kind: EstimatorKind::LinearModel,
        window,
        sentinel: params.n(),
        m: degrees.len(),
        backend: Backend::Lin {
            model: ScalarModel {
                counts,
                params: *params,
                m: nominal_m,
                per_vertex: degrees.to_vec(),
            },
            tau_same,
            epsilon: params.delta() / 20.0,
            x_hat,
        },
        rows: OnceLock::new(),
    }
}

/// Endpoint-proximity estimate for one vertex of a linear-model graph:
/// `x_hat = e^{a - log n} - 1` with `a` the normalized degree, floored at 0.
///
/// Estimates `min(x_i, n - x_i)`; sampling noise can push the raw value
/// slightly negative, hence the floor.
pub fn estimate_endpoint_lin(g: &RandomGraph, i: usize, params: &ModelParams) -> Result<f64> {
    let m = g.vertex_count();
    if i >= m {
        return Err(Error::BadVertex(format!(
            "vertex {i} out of range for {m} vertices"
        )));
    }
    Ok(lin_endpoint_from_degree(g.degree(i) as f64, params, m))
}

pub(crate) fn lin_endpoint_from_degree(degree: f64, params: &ModelParams, m: usize) -> f64 {
    if m < 2 {
        return 0.0;
    }
    let n = params.n();
    let a = degree * n / (params.c() * (m - 1) as f64);
    ((a - n.ln()).exp() - 1.0).max(0.0)
}

/// The linear-model decision cascade for one pair.
fn lin_pair_estimate(
    model: &ScalarModel<'_>,
    x_hat: &[f64],
    tau_same: f64,
    epsilon: f64,
    common: f64,
    i: usize,
    j: usize,
) -> (f64, LinBranch) {
    let params = &model.params;
    let n = params.n();
    let c = params.c();
    // Zero common neighbors carries no distance signal; treat as far, the
    // same convention the exponential model gets from its no-common rule.
    if common <= 0.0 || model.m < 3 {
        return (n, LinBranch::OppositeEnds);
    }
    let a_hat = common * n / (c * c * (model.m - 2) as f64);
    let (xi, xj) = (x_hat[i], x_hat[j]);
    let (lo, hi) = if xi < xj { (xi, xj) } else { (xj, xi) };
    let range = math::lin_inversion_range();

    if lo >= 1.0 / epsilon {
        let d = math::invert_h_lin(a_hat, range).expect("finite statistic");
        return (d, LinBranch::Interior);
    }
    if hi > 2.0 / epsilon + 1.0 && lo < 1.0 / epsilon {
        return (n, LinBranch::MixedFar);
    }
    if a_hat < tau_same {
        return (n, LinBranch::OppositeEnds);
    }
    if hi <= 8.0 {
        return ((xi - xj).abs(), LinBranch::EndpointDiff);
    }
    if hi >= 8.0 && lo <= 5.0 {
        return (n, LinBranch::NearFar);
    }
    // Both endpoint estimates are at least 5, so the true offsets exceed 4
    // and the two-point correction is accurate; the far-end correction is
    // O(1/n) and absorbed in the error budget.
    let corrected = a_hat + math::g_log_raw(xi + 1.0, xj + 1.0);
    let d = math::invert_h_lin(corrected, range).expect("finite statistic");
    (d, LinBranch::CorrectedInterior)
}
