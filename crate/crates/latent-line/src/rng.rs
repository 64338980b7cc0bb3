//! Counter-based deterministic random numbers.
//!
//! Every draw is a pure function of `(seed, stream tag, counters)`, so graph
//! generation can be split across threads in any order and still produce
//! bit-identical output. The generator is a splitmix-style avalanche chain,
//! which is plenty for simulation-grade uniforms.

/// Stream tag for vertex positions.
pub const STREAM_POSITION: u64 = 0x706f_7300;
/// Stream tag for pairwise edge coin flips.
pub const STREAM_EDGE: u64 = 0x6564_6700;
/// Stream tag for per-trial derived seeds.
pub const STREAM_TRIAL: u64 = 0x7472_6c00;
/// Stream tag for the hypothesis coin in distinguishing trials.
pub const STREAM_COIN: u64 = 0x636f_6e00;
/// Stream tag for per-graph derived seeds in multi-graph experiments.
pub const STREAM_GRAPH: u64 = 0x6772_7000;
/// Stream tag for miscellaneous sampling (test helpers, triple sampling).
pub const STREAM_SAMPLE: u64 = 0x736d_7000;

/// splitmix64 finalizer; a bijection on u64 with full avalanche.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Hash of `(seed, tag, a, b)`; pure and order-sensitive in `(a, b)`.
#[inline]
pub fn hash4(seed: u64, tag: u64, a: u64, b: u64) -> u64 {
    let h = mix64(seed ^ tag.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let h = mix64(h ^ a.wrapping_add(0xd1b5_4a32_d192_ed03));
    mix64(h ^ b.wrapping_add(0x8cb9_2ba7_2f3d_8dd7))
}

/// Uniform in `[0, 1)` with 53 random bits.
#[inline]
pub fn unit_f64(h: u64) -> f64 {
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform draw for vertex `i`'s position; depends only on `(seed, i)`.
#[inline]
pub fn position_unit(seed: u64, vertex: u64) -> f64 {
    unit_f64(hash4(seed, STREAM_POSITION, vertex, 0))
}

/// Uniform draw for the unordered pair `{i, j}`; independent of argument
/// order, evaluation order, and thread count.
#[inline]
pub fn edge_unit(seed: u64, i: u64, j: u64) -> f64 {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    unit_f64(hash4(seed, STREAM_EDGE, a, b))
}

/// Derive an independent child seed for stream `tag`, index `k`.
#[inline]
pub fn derive_seed(seed: u64, tag: u64, k: u64) -> u64 {
    hash4(seed, tag, k, 0x5eed)
}
