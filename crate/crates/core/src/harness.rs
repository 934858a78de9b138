//! Input generators and the fast-vs-naive benchmark runner.

use std::fmt;
use std::io;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use crate::error::{Result, SandpileError};
use crate::fastfix::{run_fast_general, run_fast_spm};
use crate::model::{run_to_fixpoint_naive, Configuration, Mode, Model};

/// Header of the benchmark CSV.
pub const CSV_HEADER: &str = "generator,l,n,algorithm,wall_ns,steps,iterations,merges,checksum";

pub fn gen_single_pile(n: u64) -> Configuration {
    Configuration::single_pile(n)
}

/// `(7,0,0,0, 7,0,0,0, …, n mod 7)`: a 7 every four columns and the
/// remainder at column `4⌊n/7⌋`.
pub fn gen_comb(n: u64) -> Configuration {
    let blocks = (n / 7) as usize;
    let mut heights = vec![0; 4 * blocks + 1];
    for b in 0..blocks {
        heights[4 * b] = 7;
    }
    heights[4 * blocks] = n % 7;
    Configuration::new(heights)
}

/// SplitMix64. Fully specified so corpora can be regenerated elsewhere:
/// `state += 0x9E3779B97F4A7C15`, then the standard xor-shift-multiply mix.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform-ish draw from `0..=max` (`next % (max + 1)`).
    pub fn below_or_eq(&mut self, max: u64) -> u64 {
        match max.checked_add(1) {
            Some(m) => self.next_u64() % m,
            None => self.next_u64(),
        }
    }
}

/// `l` heights, each `next_u64() % (max_height + 1)` from a SplitMix64
/// stream seeded with `seed`.
pub fn gen_random(l: usize, max_height: u64, seed: u64) -> Configuration {
    let mut rng = SplitMix64::new(seed);
    (0..l).map(|_| rng.below_or_eq(max_height)).collect()
}

/// FNV-1a over the little-endian bytes of the canonical heights.
pub fn checksum(c: &Configuration) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for h in c.canonical_heights() {
        for byte in h.to_le_bytes() {
            hash ^= u64::from(byte);
            hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    hash
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Algorithm {
    #[serde(rename = "naive-seq")]
    NaiveSeq,
    #[serde(rename = "fast-general")]
    FastGeneral,
    #[serde(rename = "fast-merge")]
    FastMerge,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [
        Algorithm::NaiveSeq,
        Algorithm::FastGeneral,
        Algorithm::FastMerge,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::NaiveSeq => "naive-seq",
            Algorithm::FastGeneral => "fast-general",
            Algorithm::FastMerge => "fast-merge",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "naive-seq" | "naive" => Ok(Algorithm::NaiveSeq),
            "fast-general" | "fast" => Ok(Algorithm::FastGeneral),
            "fast-merge" | "merge" => Ok(Algorithm::FastMerge),
            other => Err(format!("unknown algorithm `{other}`")),
        }
    }
}

/// One named benchmark input.
#[derive(Clone, Debug)]
pub struct BenchInput {
    pub generator: String,
    pub config: Configuration,
}

impl BenchInput {
    pub fn new(generator: impl Into<String>, config: Configuration) -> Self {
        BenchInput {
            generator: generator.into(),
            config,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BenchRecord {
    pub generator: String,
    pub l: usize,
    pub n: u64,
    pub algorithm: Algorithm,
    /// Minimum over the repetitions.
    pub wall_ns: u128,
    pub steps: u64,
    pub iterations: u64,
    pub merges: u64,
    pub checksum: u64,
}

struct Outcome {
    fixpoint: Configuration,
    steps: u64,
    iterations: u64,
    merges: u64,
}

/// Effectively unbounded: every SPM run terminates.
const NAIVE_STEP_LIMIT: u64 = u64::MAX;

fn run_once(algorithm: Algorithm, c: &Configuration) -> Result<Outcome> {
    Ok(match algorithm {
        Algorithm::NaiveSeq => {
            let (fixpoint, steps) =
                run_to_fixpoint_naive(c, &Model::SPM, Mode::Sequential, NAIVE_STEP_LIMIT)?;
            Outcome {
                fixpoint,
                steps,
                iterations: steps,
                merges: 0,
            }
        }
        Algorithm::FastGeneral => {
            let r = run_fast_general(c)?;
            Outcome {
                fixpoint: r.fixpoint,
                steps: 0,
                iterations: r.iterations,
                merges: 0,
            }
        }
        Algorithm::FastMerge => {
            let r = run_fast_spm(c)?;
            Outcome {
                fixpoint: r.fixpoint,
                steps: r.transient.unwrap_or(0),
                iterations: r.iterations,
                merges: r.merges,
            }
        }
    })
}

/// Runs every algorithm on every input `repetitions` times, keeping the
/// fastest wall time. Fails if two algorithms disagree on a fixed point.
pub fn bench_compare(
    inputs: &[BenchInput],
    algorithms: &[Algorithm],
    repetitions: usize,
) -> Result<Vec<BenchRecord>> {
    let repetitions = repetitions.max(1);
    let mut records = Vec::with_capacity(inputs.len() * algorithms.len());
    for input in inputs {
        let mut reference: Option<(Algorithm, Configuration)> = None;
        for &algorithm in algorithms {
            let mut best = u128::MAX;
            let mut outcome = None;
            for _ in 0..repetitions {
                let started = Instant::now();
                let o = run_once(algorithm, &input.config)?;
                best = best.min(started.elapsed().as_nanos());
                outcome = Some(o);
            }
            let outcome = outcome.expect("at least one repetition");
            match &reference {
                Some((first, fp)) if *fp != outcome.fixpoint => {
                    return Err(SandpileError::Mismatch {
                        input: input.generator.clone(),
                        detail: format!("{first} gave {fp}, {algorithm} gave {}", outcome.fixpoint),
                    });
                }
                Some(_) => {}
                None => reference = Some((algorithm, outcome.fixpoint.clone())),
            }
            records.push(BenchRecord {
                generator: input.generator.clone(),
                l: input.config.len(),
                n: input.config.grains(),
                algorithm,
                wall_ns: best,
                steps: outcome.steps,
                iterations: outcome.iterations,
                merges: outcome.merges,
                checksum: checksum(&outcome.fixpoint),
            });
        }
    }
    Ok(records)
}

/// Writes the records as CSV, header included.
pub fn write_csv<W: io::Write>(records: &[BenchRecord], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    if records.is_empty() {
        w.write_record(CSV_HEADER.split(','))?;
    }
    w.flush()?;
    Ok(())
}

/// Wall-time ratio `baseline / contender` for each input where both ran.
pub fn speedups(
    records: &[BenchRecord],
    baseline: Algorithm,
    contender: Algorithm,
) -> Vec<(String, u64, f64)> {
    let mut out = Vec::new();
    for base in records.iter().filter(|r| r.algorithm == baseline) {
        if let Some(fast) = records.iter().find(|r| {
            r.algorithm == contender
                && r.generator == base.generator
                && r.n == base.n
                && r.l == base.l
        }) {
            out.push((
                base.generator.clone(),
                base.n,
                base.wall_ns as f64 / fast.wall_ns.max(1) as f64,
            ));
        }
    }
    out
}
