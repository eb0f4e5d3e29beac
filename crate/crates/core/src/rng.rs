//! Deterministic RNG stream derivation.
//!
//! Per-class and per-seed work must produce identical results regardless of
//! execution order or thread count, so every independent unit of work gets
//! its own counter-derived stream instead of sharing one generator.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Domain tags keep streams for different purposes disjoint even when they
/// share a (seed, label) pair.
#[derive(Debug, Clone, Copy)]
pub enum StreamKind {
    Fit,
    Augment,
    Synth,
    Eval,
    Check,
}

impl StreamKind {
    fn tag(self) -> u64 {
        match self {
            StreamKind::Fit => 0xf17f_17f1_0000_0000,
            StreamKind::Augment => 0xa6a6_a6a6_0000_0001,
            StreamKind::Synth => 0x5715_7157_0000_0002,
            StreamKind::Eval => 0xe7a1_e7a1_0000_0003,
            StreamKind::Check => 0xc4ec_c4ec_0000_0004,
        }
    }
}

/// FNV-1a over the label bytes; stable across platforms and builds.
pub fn label_hash(label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// SplitMix64 finalizer; decorrelates nearby seeds.
pub fn mix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stream for per-class work: independent of the order classes are visited.
pub fn class_stream(seed: u64, label: &str, kind: StreamKind) -> ChaCha12Rng {
    let s = mix(seed ^ mix(label_hash(label)) ^ kind.tag());
    ChaCha12Rng::seed_from_u64(s)
}

/// Stream keyed on an integer index (per-seed evaluation runs, etc.).
pub fn indexed_stream(seed: u64, index: u64, kind: StreamKind) -> ChaCha12Rng {
    let s = mix(seed ^ mix(index) ^ kind.tag());
    ChaCha12Rng::seed_from_u64(s)
}
