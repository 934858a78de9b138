//! Benchmark corpora shared by the criterion benches.

use sandpile_core::harness::{gen_comb, gen_random, gen_single_pile, BenchInput};
use sandpile_core::Algorithm;

/// Grain counts small enough for the naive simulator inside a criterion run.
pub const NAIVE_SIZES: [u64; 3] = [1_000, 3_000, 10_000];

/// Sizes that only the fast algorithms are asked to handle.
pub const FAST_ONLY_SIZES: [u64; 2] = [100_000, 1_000_000];

/// Single piles, combs and random configurations of comparable mass.
pub fn corpus(sizes: &[u64], seed: u64) -> Vec<BenchInput> {
    let mut out = Vec::new();
    for &n in sizes {
        out.push(BenchInput::new(
            format!("single-pile/{n}"),
            gen_single_pile(n),
        ));
        out.push(BenchInput::new(format!("comb/{n}"), gen_comb(n)));
        // Mean height 10, so about n grains.
        let l = (n / 10).max(1) as usize;
        out.push(BenchInput::new(
            format!("random/{n}"),
            gen_random(l, 20, seed ^ n),
        ));
    }
    out
}

/// Algorithms worth timing at grain count `n`.
pub fn algorithms_for(n: u64) -> &'static [Algorithm] {
    if n <= *NAIVE_SIZES.last().unwrap() {
        &Algorithm::ALL
    } else {
        &[Algorithm::FastGeneral, Algorithm::FastMerge]
    }
}
