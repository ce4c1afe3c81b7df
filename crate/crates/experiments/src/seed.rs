//! Deterministic seed derivation.
//!
//! Replication `i` of a run with master seed `s` uses `s ^ splitmix64(i)`.
//! Auxiliary streams (shot sampling, expressibility pairs) hash a fixed tag
//! into the seed they belong to, so no two streams share a sequence.

/// One SplitMix64 output for state `x`.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn replication_seed(master: u64, index: u64) -> u64 {
    master ^ splitmix64(index)
}

pub(crate) const SHOT_STREAM: u64 = 0x5348_4f54;
pub(crate) const PAIR_STREAM: u64 = 0x5041_4952;
pub(crate) const GRADIENT_STREAM: u64 = 0x4752_4144;

pub(crate) fn stream_seed(seed: u64, stream: u64) -> u64 {
    splitmix64(seed ^ splitmix64(stream))
}
