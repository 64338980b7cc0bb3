//! Order recovery from an (L, U, delta)-approximate distance estimate.
//!
//! The algorithm admits ordered triples (i, j, k) whose flank estimates sit
//! in the band [L+d, 2L+7d] and whose outer estimate clears the admission
//! margin, so that j is certified to lie between i and k. Vertices that are
//! never certified as a middle must sit near a segment end; one of them
//! anchors an edge orientation that is propagated through the triples to a
//! fixpoint. Sorting by reachability balance recovers the order up to
//! reflection.
//!
//! The propagation here is round-based rather than a literal worklist: edges
//! discovered in round r are expanded in round r+1, middles are processed
//! independently (and in parallel), and the one order-sensitive rule of the
//! worklist formulation (a fired triple retires its mirror orientation) is
//! reproduced exactly from edge timestamps. The fixpoint is identical to the
//! sequential worklist's and independent of thread count.

use crate::error::{Error, Result};
use crate::estimate::DistanceEstimate;
use rayon::prelude::*;

/// Recovered vertex order with its reachability scores.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderResult {
    /// Vertices sorted by score; first = leftmost under the chosen
    /// orientation (which of the two reflections comes out is arbitrary).
    pub order: Vec<u32>,
    /// Per-vertex score R(v): (# vertices that can reach v) minus
    /// (# vertices reachable from v) in the oriented graph.
    pub scores: Vec<i64>,
    /// The anchor vertex chosen from the never-middle set.
    pub anchor: u32,
    /// Number of directed edges in the oriented graph at the fixpoint.
    pub oriented_graph_size: usize,
}

/// Admissible triples, stored per middle vertex as unordered flank pairs.
///
/// Materializing the set costs the square of the flank-candidate count per
/// middle; it is meant for moderate sizes and for checking the streaming
/// recovery against a literal implementation.
#[derive(Debug, Clone)]
pub struct TripleSet {
    by_middle: Vec<Vec<(u32, u32)>>,
}

impl TripleSet {
    /// Is (i, j, k) admissible (in either stored orientation)?
    pub fn contains(&self, i: u32, j: u32, k: u32) -> bool {
        let (a, b) = if i < k { (i, k) } else { (k, i) };
        self.by_middle[j as usize].binary_search(&(a, b)).is_ok()
    }

    /// Number of ordered triples (each unordered pair counts both ways).
    pub fn ordered_len(&self) -> usize {
        2 * self.by_middle.iter().map(Vec::len).sum::<usize>()
    }

    pub fn is_middle(&self, j: u32) -> bool {
        !self.by_middle[j as usize].is_empty()
    }

    /// Unordered flank pairs of middle `j`, sorted.
    pub fn flank_pairs(&self, j: u32) -> &[(u32, u32)] {
        &self.by_middle[j as usize]
    }
}

#[inline]
fn admissible(d_ij: f64, d_jk: f64, d_ik: Option<f32>, margin: f64) -> bool {
    let rhs = (d_ij - d_jk).abs() + margin;
    match d_ik {
        Some(v) => v as f64 > rhs,
        // Absent from the near rows means the estimate exceeds U - delta,
        // which always clears the margin: U > 2L + 8d and L > 3d give
        // U - d > L + 9d >= |flank difference| + 3d.
        None => true,
    }
}

/// Per-middle flank candidates: all `k` with the estimate to `j` inside the
/// admission band, with the cached estimate values.
fn flank_candidates(est: &DistanceEstimate<'_>) -> Vec<Vec<(u32, f32)>> {
    let rows = est.near_rows();
    let lo = est.window().flank_lo();
    let hi = est.window().flank_hi();
    (0..est.vertex_count())
        .into_par_iter()
        .map(|j| {
            let (keys, vals) = rows.row(j);
            keys.iter()
                .zip(vals)
                .filter(|&(_, &v)| (lo..=hi).contains(&(v as f64)))
                .map(|(&k, &v)| (k, v))
                .collect()
        })
        .collect()
}

/// Enumerate every admissible triple. See [`TripleSet`] for the cost caveat.
pub fn collect_triples(est: &DistanceEstimate<'_>) -> TripleSet {
    let rows = est.near_rows();
    let margin = est.window().margin();
    let flanks = flank_candidates(est);
    let by_middle = flanks
        .par_iter()
        .map(|c| {
            let mut pairs = Vec::new();
            for (a, &(i, d_ij)) in c.iter().enumerate() {
                let (keys, vals) = rows.row(i as usize);
                let mut p = 0usize;
                for &(k, d_jk) in &c[(a + 1)..] {
                    while p < keys.len() && keys[p] < k {
                        p += 1;
                    }
                    let d_ik = (p < keys.len() && keys[p] == k).then(|| vals[p]);
                    if admissible(d_ij as f64, d_jk as f64, d_ik, margin) {
                        pairs.push((i, k));
                    }
                }
            }
            pairs.sort_unstable();
            pairs
        })
        .collect();
    TripleSet { by_middle }
}

/// Does any admissible triple certify `j` as a middle vertex?
fn is_middle(
    c: &[(u32, f32)],
    rows: &crate::estimate::NearRows,
    margin: f64,
) -> bool {
    for (a, &(i, d_ij)) in c.iter().enumerate() {
        let (keys, vals) = rows.row(i as usize);
        let mut p = 0usize;
        for &(k, d_jk) in &c[(a + 1)..] {
            while p < keys.len() && keys[p] < k {
                p += 1;
            }
            let d_ik = (p < keys.len() && keys[p] == k).then(|| vals[p]);
            if admissible(d_ij as f64, d_jk as f64, d_ik, margin) {
                return true;
            }
        }
    }
    false
}

/// An oriented edge store: for each target, the sorted in-neighbor list with
/// the round at which the edge appeared.
struct OrientedEdges {
    into: Vec<Vec<(u32, u32)>>,
}

impl OrientedEdges {
    fn new(m: usize) -> Self {
        OrientedEdges {
            into: vec![Vec::new(); m],
        }
    }

    fn round_of(&self, src: u32, tgt: u32) -> Option<u32> {
        let row = &self.into[tgt as usize];
        row.binary_search_by_key(&src, |&(s, _)| s).ok().map(|p| row[p].1)
    }

    fn insert(&mut self, src: u32, tgt: u32, round: u32) -> bool {
        let row = &mut self.into[tgt as usize];
        match row.binary_search_by_key(&src, |&(s, _)| s) {
            Ok(_) => false,
            Err(pos) => {
                row.insert(pos, (src, round));
                true
            }
        }
    }

    fn edge_count(&self) -> usize {
        self.into.iter().map(Vec::len).sum()
    }

    fn edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (tgt, row) in self.into.iter().enumerate() {
            for &(src, _) in row {
                out.push((src, tgt as u32));
            }
        }
        out
    }
}

/// Expand one middle vertex `j` against the in-edges that arrived last round.
///
/// Returns the targets of new out-edges (j -> k), deduplicated and ascending.
/// `prev_round` tags the in-edges being expanded; an admissible triple is
/// skipped when its mirror orientation fired from an earlier pop, i.e. when
/// the mirror flank's in-edge has a strictly earlier (round, source) pop
/// order.
#[allow(clippy::too_many_arguments)]
fn expand_middle(
    j: u32,
    new_srcs: &[u32],
    prev_round: u32,
    flanks: &[Vec<(u32, f32)>],
    rows: &crate::estimate::NearRows,
    edges: &OrientedEdges,
    margin: f64,
    out_done: &[u32],
) -> Vec<u32> {
    let c = &flanks[j as usize];
    let mut exists = vec![false; c.len()];
    {
        let mut p = 0usize;
        for (idx, &(k, _)) in c.iter().enumerate() {
            while p < out_done.len() && out_done[p] < k {
                p += 1;
            }
            if p < out_done.len() && out_done[p] == k {
                exists[idx] = true;
            }
        }
    }
    let mut fired: Vec<u32> = Vec::new();
    let mut fired_flags = vec![false; c.len()];
    for &src in new_srcs {
        let d_ij = match c.binary_search_by_key(&src, |&(k, _)| k) {
            Ok(pos) => c[pos].1 as f64,
            // An in-edge always lies in the admission band, hence in C_j.
            Err(_) => unreachable!("in-edge source must be a flank candidate"),
        };
        let (keys, vals) = rows.row(src as usize);
        let mut p = 0usize;
        for (idx, &(k, d_jk)) in c.iter().enumerate() {
            while p < keys.len() && keys[p] < k {
                p += 1;
            }
            if k == src {
                continue;
            }
            if exists[idx] || fired_flags[idx] {
                // (j -> k) is already present; the fire would be a no-op.
                continue;
            }
            let d_ik = (p < keys.len() && keys[p] == k).then(|| vals[p]);
            if !admissible(d_ij, d_jk as f64, d_ik, margin) {
                continue;
            }
            // Mirror suppression: if (k, j) popped strictly before (src, j),
            // the triple (k, j, src) already fired and removed both
            // orientations.
            if let Some(r_kj) = edges.round_of(k, j) {
                if r_kj < prev_round || (r_kj == prev_round && k < src) {
                    continue;
                }
            }
            fired_flags[idx] = true;
            fired.push(k);
        }
    }
    fired.sort_unstable();
    fired
}

/// Saturate the oriented edge set from the seed edges to the fixpoint.
fn saturate(
    m: usize,
    seeds: Vec<(u32, u32)>,
    flanks: &[Vec<(u32, f32)>],
    rows: &crate::estimate::NearRows,
    margin: f64,
) -> OrientedEdges {
    let mut edges = OrientedEdges::new(m);
    let mut out_done: Vec<Vec<u32>> = vec![Vec::new(); m];
    let mut frontier: Vec<(u32, u32)> = Vec::new(); // (tgt, src)
    for (src, tgt) in seeds {
        if edges.insert(src, tgt, 0) {
            frontier.push((tgt, src));
            let row = &mut out_done[src as usize];
            let pos = row.binary_search(&tgt).unwrap_err();
            row.insert(pos, tgt);
        }
    }
    frontier.sort_unstable();
    let mut round = 0u32;
    while !frontier.is_empty() {
        let prev_round = round;
        round += 1;
        // group the frontier by target (= the middle to expand)
        let mut groups: Vec<(u32, std::ops::Range<usize>)> = Vec::new();
        let mut start = 0usize;
        for idx in 1..=frontier.len() {
            if idx == frontier.len() || frontier[idx].0 != frontier[start].0 {
                groups.push((frontier[start].0, start..idx));
                start = idx;
            }
        }
        let srcs: Vec<u32> = frontier.iter().map(|&(_, s)| s).collect();
        let expanded: Vec<(u32, Vec<u32>)> = groups
            .par_iter()
            .map(|&(j, ref range)| {
                let fired = expand_middle(
                    j,
                    &srcs[range.clone()],
                    prev_round,
                    flanks,
                    rows,
                    &edges,
                    margin,
                    &out_done[j as usize],
                );
                (j, fired)
            })
            .collect();
        let mut next: Vec<(u32, u32)> = Vec::new();
        for (j, fired) in expanded {
            for k in fired {
                if edges.insert(j, k, round) {
                    next.push((k, j));
                    let row = &mut out_done[j as usize];
                    let pos = row.binary_search(&k).unwrap_err();
                    row.insert(pos, k);
                }
            }
        }
        next.sort_unstable();
        frontier = next;
    }
    edges
}

/// Iterative Tarjan SCC. Components are numbered in reverse topological
/// order: an edge between components always goes from a higher id to a lower.
fn tarjan_scc(m: usize, offsets: &[usize], targets: &[u32]) -> (Vec<u32>, usize) {
    const UNSET: u32 = u32::MAX;
    let mut comp_of = vec![UNSET; m];
    let mut index = vec![UNSET; m];
    let mut lowlink = vec![0u32; m];
    let mut on_stack = vec![false; m];
    let mut stack: Vec<u32> = Vec::new();
    let mut call: Vec<(u32, usize)> = Vec::new();
    let mut next_index = 0u32;
    let mut n_comps = 0usize;

    for root in 0..m as u32 {
        if index[root as usize] != UNSET {
            continue;
        }
        call.push((root, offsets[root as usize]));
        index[root as usize] = next_index;
        lowlink[root as usize] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root as usize] = true;

        while let Some(&mut (v, ref mut edge)) = call.last_mut() {
            let vz = v as usize;
            if *edge < offsets[vz + 1] {
                let w = targets[*edge];
                *edge += 1;
                let wz = w as usize;
                if index[wz] == UNSET {
                    index[wz] = next_index;
                    lowlink[wz] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[wz] = true;
                    call.push((w, offsets[wz]));
                } else if on_stack[wz] {
                    lowlink[vz] = lowlink[vz].min(index[wz]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    let pz = parent as usize;
                    lowlink[pz] = lowlink[pz].min(lowlink[vz]);
                }
                if lowlink[vz] == index[vz] {
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w as usize] = false;
                        comp_of[w as usize] = n_comps as u32;
                        if w == v {
                            break;
                        }
                    }
                    n_comps += 1;
                }
            }
        }
    }
    (comp_of, n_comps)
}

/// Reachability scores on the condensation: for each vertex,
/// R(v) = |ancestors of v's component| - |descendants of v's component|,
/// counted in vertices (members of one component share a score, and the
/// component's own members cancel between the two sides).
pub(crate) fn reachability_scores(m: usize, edges: &[(u32, u32)]) -> Vec<i64> {
    // vertex-level out CSR
    let mut out_deg = vec![0usize; m];
    for &(u, _) in edges {
        out_deg[u as usize] += 1;
    }
    let mut offsets = vec![0usize; m + 1];
    for i in 0..m {
        offsets[i + 1] = offsets[i] + out_deg[i];
    }
    let mut fill = offsets.clone();
    let mut targets = vec![0u32; edges.len()];
    for &(u, v) in edges {
        targets[fill[u as usize]] = v;
        fill[u as usize] += 1;
    }
    let (comp_of, n_comps) = tarjan_scc(m, &offsets, &targets);

    // component-level edge lists (not deduplicated; the bit-or is idempotent)
    let mut c_out_deg = vec![0usize; n_comps];
    let mut c_in_deg = vec![0usize; n_comps];
    let mut cross = 0usize;
    for &(u, v) in edges {
        let (cu, cv) = (comp_of[u as usize], comp_of[v as usize]);
        if cu != cv {
            c_out_deg[cu as usize] += 1;
            c_in_deg[cv as usize] += 1;
            cross += 1;
        }
    }
    let mut c_out_off = vec![0usize; n_comps + 1];
    let mut c_in_off = vec![0usize; n_comps + 1];
    for c in 0..n_comps {
        c_out_off[c + 1] = c_out_off[c] + c_out_deg[c];
        c_in_off[c + 1] = c_in_off[c] + c_in_deg[c];
    }
    let mut c_out_fill = c_out_off.clone();
    let mut c_in_fill = c_in_off.clone();
    let mut c_out = vec![0u32; cross];
    let mut c_in = vec![0u32; cross];
    for &(u, v) in edges {
        let (cu, cv) = (comp_of[u as usize], comp_of[v as usize]);
        if cu != cv {
            c_out[c_out_fill[cu as usize]] = cv;
            c_out_fill[cu as usize] += 1;
            c_in[c_in_fill[cv as usize]] = cu;
            c_in_fill[cv as usize] += 1;
        }
    }

    // chunked-column bitset closure over the condensation
    let words_total = m.div_ceil(64);
    const CHUNK_WORDS: usize = 128;
    let n_chunks = words_total.div_ceil(CHUNK_WORDS);
    let partials: Vec<(Vec<u64>, Vec<u64>)> = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let w0 = chunk * CHUNK_WORDS;
            let w1 = (w0 + CHUNK_WORDS).min(words_total);
            let width = w1 - w0;
            let mut desc = vec![0u64; n_comps];
            let mut anc = vec![0u64; n_comps];
            let mut bits = vec![0u64; n_comps * width];
            // own-member bits restricted to this column chunk
            let v_lo = w0 * 64;
            let v_hi = (w1 * 64).min(m);
            let set_own = |bits: &mut [u64]| {
                for v in v_lo..v_hi {
                    let c = comp_of[v] as usize;
                    bits[c * width + (v - v_lo) / 64] |= 1u64 << (v % 64);
                }
            };
            // descendants: components in ascending id order (sinks first)
            set_own(&mut bits);
            for c in 0..n_comps {
                or_rows(&mut bits, width, c, &c_out[c_out_off[c]..c_out_off[c + 1]]);
                desc[c] = popcount_row(&bits, width, c);
            }
            // ancestors: descending id order (sources first)
            bits.iter_mut().for_each(|w| *w = 0);
            set_own(&mut bits);
            for c in (0..n_comps).rev() {
                or_rows(&mut bits, width, c, &c_in[c_in_off[c]..c_in_off[c + 1]]);
                anc[c] = popcount_row(&bits, width, c);
            }
            (desc, anc)
        })
        .collect();

    let mut desc_counts = vec![0u64; n_comps];
    let mut anc_counts = vec![0u64; n_comps];
    for (d, a) in partials {
        for c in 0..n_comps {
            desc_counts[c] += d[c];
            anc_counts[c] += a[c];
        }
    }
    (0..m)
        .map(|v| {
            let c = comp_of[v] as usize;
            anc_counts[c] as i64 - desc_counts[c] as i64
        })
        .collect()
}

/// OR each listed source row into row `c`. Sources never equal `c`.
#[inline]
fn or_rows(bits: &mut [u64], width: usize, c: usize, sources: &[u32]) {
    for &s in sources {
        let s = s as usize;
        debug_assert_ne!(s, c);
        let (lo, hi) = if s < c { (s, c) } else { (c, s) };
        let (head, tail) = bits.split_at_mut(hi * width);
        let low = &mut head[lo * width..lo * width + width];
        let high = &mut tail[..width];
        let (dst, src): (&mut [u64], &[u64]) = if s < c { (high, low) } else { (low, high) };
        for (d, &x) in dst.iter_mut().zip(src.iter()) {
            *d |= x;
        }
    }
}

#[inline]
fn popcount_row(bits: &[u64], width: usize, c: usize) -> u64 {
    bits[c * width..(c + 1) * width]
        .iter()
        .map(|w| w.count_ones() as u64)
        .sum()
}

/// Run the order-recovery algorithm against a distance estimate.
///
/// Errors with [`Error::EmptyAnchorSet`] when no vertex is free of the middle
/// position in every admissible triple (or when the anchor's far set is
/// empty): the estimate is too noisy, or the window too tight, to expose a
/// segment endpoint.
pub fn recover_order(est: &DistanceEstimate<'_>) -> Result<OrderResult> {
    recover_order_detailed(est).map(|(result, _)| result)
}

/// [`recover_order`] plus the oriented edge list, for diagnostics and tests.
pub fn recover_order_detailed(
    est: &DistanceEstimate<'_>,
) -> Result<(OrderResult, Vec<(u32, u32)>)> {
    let m = est.vertex_count();
    if m == 0 {
        return Err(Error::InvalidParameter(
            "order recovery needs at least one vertex".into(),
        ));
    }
    if m == 1 {
        let result = OrderResult {
            order: vec![0],
            scores: vec![0],
            anchor: 0,
            oriented_graph_size: 0,
        };
        return Ok((result, Vec::new()));
    }
    let rows = est.near_rows();
    let margin = est.window().margin();
    let flanks = flank_candidates(est);

    let never_middle: Vec<u32> = (0..m)
        .into_par_iter()
        .filter(|&j| !is_middle(&flanks[j], rows, margin))
        .map(|j| j as u32)
        .collect();
    if never_middle.is_empty() {
        return Err(Error::EmptyAnchorSet);
    }
    // "pick an arbitrary v0": the lowest-index member, for determinism.
    let anchor = never_middle[0];

    // Far members of the never-middle set: estimate above U - delta, i.e.
    // absent from the near rows.
    let far_set: Vec<u32> = never_middle
        .iter()
        .copied()
        .filter(|&v| v != anchor && rows.get(anchor as usize, v as usize).is_none())
        .collect();
    if far_set.is_empty() {
        return Err(Error::EmptyAnchorSet);
    }

    let mut seeds: Vec<(u32, u32)> = Vec::new();
    for &v in &far_set {
        for &(k, _) in &flanks[v as usize] {
            seeds.push((v, k));
        }
    }
    let edges = saturate(m, seeds, &flanks, rows, margin);
    let oriented_graph_size = edges.edge_count();
    let edge_list = edges.edges();
    drop(edges);

    let scores = reachability_scores(m, &edge_list);
    let mut order: Vec<u32> = (0..m as u32).collect();
    order.sort_by_key(|&v| (scores[v as usize], v));
    Ok((
        OrderResult {
            order,
            scores,
            anchor,
            oriented_graph_size,
        },
        edge_list,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimate::{exact_oracle, exp_from_statistics, DistanceWindow};
    use crate::math::g_exp_raw;
    use crate::model::{sample_positions, DecayKind, ModelParams, PositionVector};
    use std::collections::{BTreeMap, BTreeSet};

    fn oracle_window(delta: f64, n: f64) -> DistanceWindow {
        DistanceWindow::exponential(delta, n).unwrap()
    }

    /// Estimator with arbitrary symmetric distances, driven through the
    /// exponential backend: degrees are chosen so the endpoint correction
    /// vanishes and the common statistic is g(d), which inverts back to d.
    /// Entries of `f64::INFINITY` mean "far" (zero common signal).
    fn matrix_estimate(
        n: f64,
        window: DistanceWindow,
        d: Vec<Vec<f64>>,
    ) -> crate::estimate::DistanceEstimate<'static> {
        let m = d.len();
        let params = ModelParams::new(n, 1.0, DecayKind::Exponential, 0.05).unwrap();
        let degrees = vec![2.0 * (m - 1) as f64 / n; m];
        exp_from_statistics(
            &degrees,
            move |i, j| {
                if d[i][j].is_finite() {
                    g_exp_raw(d[i][j]) * (m - 2) as f64 / n
                } else {
                    0.0
                }
            },
            &params,
            window,
            m,
        )
    }

    #[test]
    fn triples_on_three_equally_spaced_points() {
        // gap L + 2*delta = 0.4: both flank estimates in the band, and only
        // the true middle admits.
        let x = PositionVector::new(25.0, vec![1.0, 1.4, 1.8]).unwrap();
        let est = exact_oracle(&x, oracle_window(0.05, 25.0));
        let triples = collect_triples(&est);
        assert_eq!(triples.ordered_len(), 2);
        assert!(triples.contains(0, 1, 2));
        assert!(triples.contains(2, 1, 0));
        assert!(!triples.contains(1, 0, 2));
        assert!(!triples.contains(0, 2, 1));
        assert!(triples.is_middle(1));
        assert!(!triples.is_middle(0));
    }

    #[test]
    fn triples_empty_for_two_vertices() {
        let x = PositionVector::new(25.0, vec![1.0, 1.5]).unwrap();
        let est = exact_oracle(&x, oracle_window(0.05, 25.0));
        assert_eq!(collect_triples(&est).ordered_len(), 0);
    }

    #[test]
    fn grid_recovery_is_exact_up_to_reflection() {
        // X = 0, 0.1, ..., 3.0 on n = 3 with window (0.3, 2.5, 0.05)
        let xs: Vec<f64> = (0..=30).map(|k| k as f64 * 0.1).collect();
        let x = PositionVector::new(3.0, xs).unwrap();
        let est = exact_oracle(&x, oracle_window(0.05, 3.0));
        let result = recover_order(&est).unwrap();
        let ascending: Vec<u32> = (0..=30).collect();
        let descending: Vec<u32> = (0..=30).rev().collect();
        assert!(
            result.order == ascending || result.order == descending,
            "order {:?}",
            result.order
        );
    }

    #[test]
    fn single_vertex_is_trivially_ordered() {
        let x = PositionVector::new(25.0, vec![7.0]).unwrap();
        let est = exact_oracle(&x, oracle_window(0.05, 25.0));
        let result = recover_order(&est).unwrap();
        assert_eq!(result.order, vec![0]);
        assert_eq!(result.oriented_graph_size, 0);
    }

    #[test]
    fn empty_input_is_rejected() {
        let x = PositionVector::new(25.0, vec![]).unwrap();
        let est = exact_oracle(&x, oracle_window(0.05, 25.0));
        assert!(recover_order(&est).is_err());
    }

    #[test]
    fn all_middles_raises_empty_anchor_set() {
        // every pairwise estimate 0.5: every vertex is a middle somewhere
        let m = 6;
        let d = vec![vec![0.5; m]; m];
        let window = oracle_window(0.05, 25.0);
        let est = matrix_estimate(25.0, window, d);
        match recover_order(&est) {
            Err(crate::Error::EmptyAnchorSet) => {}
            other => panic!("expected EmptyAnchorSet, got {other:?}"),
        }
    }

    #[test]
    fn isolated_anchor_raises_empty_anchor_set() {
        // all vertices within 0.8 of each other: the anchor has no far mate
        let x = PositionVector::new(25.0, vec![0.0, 0.4, 0.8]).unwrap();
        let est = exact_oracle(&x, oracle_window(0.05, 25.0));
        match recover_order(&est) {
            Err(crate::Error::EmptyAnchorSet) => {}
            other => panic!("expected EmptyAnchorSet, got {other:?}"),
        }
    }

    #[test]
    fn oracle_recovery_no_inversions_beyond_margin() {
        // moderate density: inversions at true distance > 3*delta never occur
        let params = ModelParams::new(8.0, 1.0, DecayKind::Exponential, 0.05).unwrap();
        for seed in [1u64, 2, 3] {
            let x = sample_positions(700, &params, seed);
            let est = exact_oracle(&x, oracle_window(0.05, 8.0));
            let result = recover_order(&est).unwrap();
            let viol = count_inversions_beyond(&x, &result.order, 0.15);
            assert_eq!(viol, 0, "seed {seed}");
        }
    }

    fn count_inversions_beyond(x: &PositionVector, order: &[u32], gap: f64) -> usize {
        // count under both reflections, take the smaller
        let mut fwd = 0usize;
        let mut rev = 0usize;
        for a in 0..order.len() {
            for b in (a + 1)..order.len() {
                let (xa, xb) = (x.get(order[a] as usize), x.get(order[b] as usize));
                if (xa - xb).abs() > gap {
                    if xa > xb {
                        fwd += 1;
                    } else {
                        rev += 1;
                    }
                }
            }
        }
        fwd.min(rev)
    }

    #[test]
    fn structural_invariants_on_dense_oracle() {
        // n = 3, m = 300 with window (0.35, 1.6, 0.1): dense enough for the
        // reachability characterization.
        let params = ModelParams::new(3.0, 1.0, DecayKind::Exponential, 0.05).unwrap();
        let x = sample_positions(300, &params, 17);
        let window = DistanceWindow::new(0.35, 1.6, 0.1, 3.0).unwrap();
        let est = exact_oracle(&x, window);

        // triple middle-correctness
        let triples = collect_triples(&est);
        for j in 0..300u32 {
            for &(i, k) in triples.flank_pairs(j) {
                let (xi, xj, xk) = (
                    x.get(i as usize),
                    x.get(j as usize),
                    x.get(k as usize),
                );
                assert!(
                    (xi < xj && xj < xk) || (xk < xj && xj < xi),
                    "triple ({i},{j},{k}) not middle-correct"
                );
            }
        }

        let (result, edges) = recover_order_detailed(&est).unwrap();

        // edge orientation soundness: all edges point one way in position
        let to_right = edges
            .iter()
            .filter(|&&(u, v)| x.get(v as usize) > x.get(u as usize))
            .count();
        assert!(
            to_right == edges.len() || to_right == 0,
            "{to_right} of {} edges point right",
            edges.len()
        );

        // reachability characterization: v reachable from u iff the estimate
        // is at least L + delta and u is on the anchor-opposite side
        let m = 300usize;
        let mut adj = vec![Vec::new(); m];
        for &(u, v) in &edges {
            adj[u as usize].push(v as usize);
        }
        let anchor_left = to_right == edges.len();
        let lplusd = window.l() + window.delta();
        for u in 0..m {
            let mut seen = vec![false; m];
            let mut stack = vec![u];
            seen[u] = true;
            while let Some(w) = stack.pop() {
                for &t in &adj[w] {
                    if !seen[t] {
                        seen[t] = true;
                        stack.push(t);
                    }
                }
            }
            for v in 0..m {
                if u == v {
                    continue;
                }
                let d = est.query(u, v);
                let right_side = if anchor_left {
                    x.get(v as usize) > x.get(u as usize)
                } else {
                    x.get(v as usize) < x.get(u as usize)
                };
                let expect = d >= lplusd && right_side;
                assert_eq!(
                    seen[v], expect,
                    "reachability mismatch {u}->{v} (d = {d})"
                );
            }
        }

        // order agrees with positions beyond 3*delta
        assert_eq!(count_inversions_beyond(&x, &result.order, 0.3), 0);
    }

    #[test]
    fn scores_on_condensation_with_cycle() {
        // 0 -> 1 -> 2 -> 0 cycle, 2 -> 3, 4 -> 0
        let edges = vec![(0, 1), (1, 2), (2, 0), (2, 3), (4, 0)];
        let scores = reachability_scores(5, &edges);
        assert_eq!(scores, vec![0, 0, 0, 4, -4]);
        // cycle members share a score
        assert!(scores[0] == scores[1] && scores[1] == scores[2]);
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let params = ModelParams::new(6.0, 1.0, DecayKind::Exponential, 0.05).unwrap();
        let x = sample_positions(400, &params, 23);
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| {
                let est = exact_oracle(&x, oracle_window(0.05, 6.0));
                recover_order(&est).unwrap()
            })
        };
        let a = run(1);
        let b = run(4);
        assert_eq!(a, b);
    }

    // ---- literal reference implementation of the saturation semantics ----

    /// Worklist recovery with a materialized triple set and explicit
    /// deletion of fired orientations, processing edges in (round, middle,
    /// source) order. The streaming implementation must match it exactly.
    fn reference_recover(
        est: &crate::estimate::DistanceEstimate<'_>,
    ) -> crate::error::Result<(Vec<(u32, u32)>, Vec<u32>)> {
        let m = est.vertex_count();
        let rows = est.near_rows();
        let window = est.window();
        let triples = collect_triples(est);

        // ordered triple set with deletion
        let mut s: BTreeSet<(u32, u32, u32)> = BTreeSet::new();
        for j in 0..m as u32 {
            for &(i, k) in triples.flank_pairs(j) {
                s.insert((i, j, k));
                s.insert((k, j, i));
            }
        }
        let never_middle: Vec<u32> = (0..m as u32).filter(|&j| !triples.is_middle(j)).collect();
        if never_middle.is_empty() {
            return Err(crate::Error::EmptyAnchorSet);
        }
        let anchor = never_middle[0];
        let far: Vec<u32> = never_middle
            .iter()
            .copied()
            .filter(|&v| v != anchor && rows.get(anchor as usize, v as usize).is_none())
            .collect();
        if far.is_empty() {
            return Err(crate::Error::EmptyAnchorSet);
        }

        let in_band = |a: u32, b: u32| {
            rows.get(a as usize, b as usize)
                .map(|v| (window.flank_lo()..=window.flank_hi()).contains(&(v as f64)))
                .unwrap_or(false)
        };
        let mut e: BTreeSet<(u32, u32)> = BTreeSet::new();
        let mut frontier: Vec<(u32, u32)> = Vec::new(); // (tgt, src)
        for &v in &far {
            for k in 0..m as u32 {
                if k != v && in_band(v, k) && e.insert((v, k)) {
                    frontier.push((k, v));
                }
            }
        }
        frontier.sort_unstable();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for &(j, i) in &frontier {
                // fire every undeleted triple (i, j, k), ascending k
                let fired: Vec<u32> = s
                    .range((i, j, 0)..=(i, j, u32::MAX))
                    .map(|&(_, _, k)| k)
                    .collect();
                for k in fired {
                    s.remove(&(i, j, k));
                    s.remove(&(k, j, i));
                    if e.insert((j, k)) {
                        next.push((k, j));
                    }
                }
            }
            next.sort_unstable();
            frontier = next;
        }
        let edges: Vec<(u32, u32)> = e.iter().copied().collect();
        let scores = reachability_scores(m, &edges);
        let mut order: Vec<u32> = (0..m as u32).collect();
        order.sort_by_key(|&v| (scores[v as usize], v));
        Ok((edges, order))
    }

    fn edge_set(edges: &[(u32, u32)]) -> BTreeSet<(u32, u32)> {
        edges.iter().copied().collect()
    }

    #[test]
    fn streaming_matches_reference_on_oracle() {
        let params = ModelParams::new(4.0, 1.0, DecayKind::Exponential, 0.05).unwrap();
        for seed in [5u64, 6] {
            let x = sample_positions(250, &params, seed);
            let est = exact_oracle(&x, oracle_window(0.05, 4.0));
            let (result, edges) = recover_order_detailed(&est).unwrap();
            let (ref_edges, ref_order) = reference_recover(&est).unwrap();
            assert_eq!(edge_set(&edges), edge_set(&ref_edges), "seed {seed}");
            assert_eq!(result.order, ref_order, "seed {seed}");
        }
    }

    #[test]
    fn streaming_matches_reference_on_noisy_matrix() {
        // hand-perturbed distances over a line of 40 points, including
        // contradictory entries that force mirror-orientation suppression
        let m = 40usize;
        let n = 25.0;
        let spacing = 0.22;
        let mut d = vec![vec![f64::INFINITY; m]; m];
        let noise = |i: usize, j: usize| {
            // deterministic pseudo-noise in [-0.12, 0.12]
            let h = crate::rng::hash4(99, 7, i as u64, j as u64);
            (crate::rng::unit_f64(h) - 0.5) * 0.24
        };
        for i in 0..m {
            for j in (i + 1)..m {
                let true_d = spacing * (j - i) as f64;
                if true_d <= 2.45 {
                    let v = (true_d + noise(i, j)).clamp(0.3, 2.45);
                    d[i][j] = v;
                    d[j][i] = v;
                }
            }
        }
        let window = oracle_window(0.05, n);
        let est = matrix_estimate(n, window, d);
        match (recover_order_detailed(&est), reference_recover(&est)) {
            (Ok((result, edges)), Ok((ref_edges, ref_order))) => {
                assert_eq!(edge_set(&edges), edge_set(&ref_edges));
                assert_eq!(result.order, ref_order);
            }
            (Err(crate::Error::EmptyAnchorSet), Err(crate::Error::EmptyAnchorSet)) => {}
            (a, b) => panic!(
                "implementations disagree: {:?} vs {:?}",
                a.map(|x| x.0.order),
                b.map(|x| x.1)
            ),
        }
    }

    #[test]
    fn saturation_reaches_all_band_pairs_on_dense_oracle() {
        // Every pair with an in-band estimate ends up oriented one way.
        let params = ModelParams::new(3.0, 1.0, DecayKind::Exponential, 0.05).unwrap();
        let x = sample_positions(200, &params, 31);
        let window = DistanceWindow::new(0.35, 1.6, 0.1, 3.0).unwrap();
        let est = exact_oracle(&x, window);
        let (_, edges) = recover_order_detailed(&est).unwrap();
        let rows = est.near_rows();
        let mut have: BTreeMap<(u32, u32), bool> = BTreeMap::new();
        for &(u, v) in &edges {
            let key = if u < v { (u, v) } else { (v, u) };
            have.insert(key, true);
        }
        for i in 0..200u32 {
            for j in (i + 1)..200u32 {
                if let Some(v) = rows.get(i as usize, j as usize) {
                    let band = (window.flank_lo()..=window.flank_hi()).contains(&(v as f64));
                    if band {
                        assert!(
                            have.contains_key(&(i, j)),
                            "band pair ({i},{j}) missing from oriented graph"
                        );
                    }
                }
            }
        }
    }
}
