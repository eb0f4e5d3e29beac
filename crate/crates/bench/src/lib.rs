//! Shared helpers for the criterion benchmarks.

use geocurve_core::{synth, RawFeature, SynthKind};

/// One synthetic class of arc-structured features at the given sizes.
pub fn bench_class(m: usize, d: usize, seed: u64) -> (String, Vec<RawFeature>) {
    let set = synth(SynthKind::Geodesic, 2, m, d, 0.05, seed).expect("bench data");
    let (label, members) = set.classes.into_iter().next().expect("first class");
    (label, members)
}
