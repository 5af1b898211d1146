//! Stable 64-bit hashing. Values must not change across runs or platforms,
//! so `std`'s randomized hasher is not used.

use xxhash_rust::xxh3::xxh3_64;

pub fn hash_str(s: &str) -> u64 {
    xxh3_64(s.as_bytes())
}

/// MurmurHash3 64-bit finalizer; a bijection on `u64`.
#[inline]
pub fn fmix64(mut k: u64) -> u64 {
    k ^= k >> 33;
    k = k.wrapping_mul(0xff51_afd7_ed55_8ccd);
    k ^= k >> 33;
    k = k.wrapping_mul(0xc4ce_b9fe_1a85_ec53);
    k ^= k >> 33;
    k
}

/// SplitMix64 step, used to expand one seed into a family of seeds.
#[inline]
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
