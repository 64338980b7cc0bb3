//! Degree and common-neighbor statistics over the observed graph.
//!
//! The co-occurrence pass enumerates, for each vertex `w`, the pairs inside
//! `N(w)` (sum of `C(deg w, 2)` work overall). It is organized row-by-row:
//! row `i` counts, in a dense scratch array, how often each `j > i` co-occurs
//! with `i` in some neighborhood. Rows are independent, so the pass
//! parallelizes with bit-identical output for any thread count.

use crate::error::{Error, Result};
use crate::model::RandomGraph;
use rayon::prelude::*;

/// Common-neighbor count of one vertex pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairStats {
    /// Lower vertex of the pair.
    pub i: u32,
    /// Higher vertex of the pair.
    pub j: u32,
    pub common_count: u32,
}

/// `|N(i) ∩ N(j)|` by sorted-list intersection.
pub fn common_neighbors(g: &RandomGraph, i: usize, j: usize) -> Result<usize> {
    let m = g.vertex_count();
    if i >= m || j >= m {
        return Err(Error::BadVertex(format!(
            "pair ({i}, {j}) out of range for {m} vertices"
        )));
    }
    if i == j {
        return Err(Error::BadVertex(format!(
            "common_neighbors needs two distinct vertices, got {i} twice"
        )));
    }
    Ok(sorted_intersection_len(g.neighbors(i), g.neighbors(j)))
}

fn sorted_intersection_len(a: &[u32], b: &[u32]) -> usize {
    let (mut ia, mut ib, mut count) = (0, 0, 0);
    while ia < a.len() && ib < b.len() {
        match a[ia].cmp(&b[ib]) {
            std::cmp::Ordering::Less => ia += 1,
            std::cmp::Ordering::Greater => ib += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                ia += 1;
                ib += 1;
            }
        }
    }
    count
}

/// Sparse table of all pairs with at least one common neighbor, keyed on the
/// `(min, max)` vertex order and stored per lower vertex.
#[derive(Debug, Clone)]
pub struct CooccurrenceTable {
    m: usize,
    offsets: Vec<usize>,
    keys: Vec<u32>,
    counts: Vec<u32>,
}

impl CooccurrenceTable {
    pub fn vertex_count(&self) -> usize {
        self.m
    }

    /// Number of stored pairs (pairs with common_count >= 1).
    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    /// Common-neighbor count of `{i, j}`; absent pairs have count 0.
    pub fn get(&self, i: usize, j: usize) -> u32 {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        let row = &self.keys[self.offsets[a]..self.offsets[a + 1]];
        match row.binary_search(&(b as u32)) {
            Ok(pos) => self.counts[self.offsets[a] + pos],
            Err(_) => 0,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = PairStats> + '_ {
        (0..self.m).flat_map(move |i| {
            let lo = self.offsets[i];
            let hi = self.offsets[i + 1];
            (lo..hi).map(move |k| PairStats {
                i: i as u32,
                j: self.keys[k],
                common_count: self.counts[k],
            })
        })
    }
}

/// Build the full co-occurrence table: exactly the pairs with at least one
/// common neighbor, with exact counts.
pub fn cooccurrence_table(g: &RandomGraph) -> CooccurrenceTable {
    let rows = cooccurrence_rows(g, |_, j, count| Some((j, count)));
    let mut offsets = Vec::with_capacity(g.vertex_count() + 1);
    offsets.push(0usize);
    let total: usize = rows.iter().map(Vec::len).sum();
    let mut keys = Vec::with_capacity(total);
    let mut counts = Vec::with_capacity(total);
    for row in rows {
        for (j, c) in row {
            keys.push(j);
            counts.push(c);
        }
        offsets.push(keys.len());
    }
    CooccurrenceTable {
        m: g.vertex_count(),
        offsets,
        keys,
        counts,
    }
}

/// Row-sharded co-occurrence counting engine.
///
/// For every pair `i < j` with at least one common neighbor, calls
/// `emit(i, j, count)` in ascending `(i, j)` order within each row and keeps
/// whatever it returns. Rows are processed in parallel; output does not
/// depend on the number of threads.
pub(crate) fn cooccurrence_rows<T: Send>(
    g: &RandomGraph,
    emit: impl Fn(usize, u32, u32) -> Option<T> + Sync,
) -> Vec<Vec<T>> {
    let m = g.vertex_count();
    (0..m)
        .into_par_iter()
        .map_init(
            || (vec![0u32; m], Vec::<u32>::new()),
            |(counts, touched), i| {
                let iv = i as u32;
                for &w in g.neighbors(i) {
                    let nb = g.neighbors(w as usize);
                    let start = nb.partition_point(|&x| x <= iv);
                    for &j in &nb[start..] {
                        let c = &mut counts[j as usize];
                        if *c == 0 {
                            touched.push(j);
                        }
                        *c += 1;
                    }
                }
                let mut row = Vec::with_capacity(touched.len());
                // When most of the tail is touched a dense sweep beats sorting.
                if touched.len() * 16 > m - i {
                    for (j, &c) in counts.iter().enumerate().skip(i + 1) {
                        if c > 0 {
                            if let Some(item) = emit(i, j as u32, c) {
                                row.push(item);
                            }
                        }
                    }
                } else {
                    touched.sort_unstable();
                    for &j in touched.iter() {
                        if let Some(item) = emit(i, j, counts[j as usize]) {
                            row.push(item);
                        }
                    }
                }
                for &j in touched.iter() {
                    counts[j as usize] = 0;
                }
                touched.clear();
                row
            },
        )
        .collect()
}
