//! Sandpile configurations and the SPM / IPM(k) local rules.
//!
//! Column indices are 0-based throughout the crate. A configuration is a
//! finite window onto an infinite line of columns: every column past the
//! last stored one has height 0, so a rule may push a grain into a fresh
//! column and grow the configuration by one.

use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::error::{Result, SandpileError};

/// A finite sequence of column heights.
///
/// Equality and hashing use the canonical form (trailing zero columns
/// stripped), so `(1,0,0)` and `(1)` compare equal. The stored heights keep
/// explicit zeros, which matters for bounded windows.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Configuration {
    heights: Vec<u64>,
}

impl Configuration {
    pub fn new(heights: Vec<u64>) -> Self {
        Configuration { heights }
    }

    pub fn empty() -> Self {
        Configuration::default()
    }

    /// The single pile `(n)`; `()` when `n == 0`.
    pub fn single_pile(n: u64) -> Self {
        if n == 0 {
            Configuration::empty()
        } else {
            Configuration::new(vec![n])
        }
    }

    pub fn heights(&self) -> &[u64] {
        &self.heights
    }

    pub fn into_heights(self) -> Vec<u64> {
        self.heights
    }

    /// Number of stored columns, explicit trailing zeros included.
    pub fn len(&self) -> usize {
        self.heights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heights.is_empty()
    }

    /// Height of column `i`, 0 past the stored columns.
    pub fn height(&self, i: usize) -> u64 {
        self.heights.get(i).copied().unwrap_or(0)
    }

    /// Total number of grains.
    pub fn grains(&self) -> u64 {
        self.heights.iter().sum()
    }

    /// Heights with trailing zero columns removed.
    pub fn canonical_heights(&self) -> &[u64] {
        let end = self
            .heights
            .iter()
            .rposition(|&h| h != 0)
            .map_or(0, |i| i + 1);
        &self.heights[..end]
    }

    pub fn canonical(&self) -> Configuration {
        Configuration::new(self.canonical_heights().to_vec())
    }

    /// Length of the canonical form.
    pub fn canonical_len(&self) -> usize {
        self.canonical_heights().len()
    }
}

impl PartialEq for Configuration {
    fn eq(&self, other: &Self) -> bool {
        self.canonical_heights() == other.canonical_heights()
    }
}

impl Eq for Configuration {}

impl Hash for Configuration {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.canonical_heights().hash(state);
    }
}

impl From<Vec<u64>> for Configuration {
    fn from(heights: Vec<u64>) -> Self {
        Configuration::new(heights)
    }
}

impl From<&[u64]> for Configuration {
    fn from(heights: &[u64]) -> Self {
        Configuration::new(heights.to_vec())
    }
}

impl<const N: usize> From<[u64; N]> for Configuration {
    fn from(heights: [u64; N]) -> Self {
        Configuration::new(heights.to_vec())
    }
}

impl FromIterator<u64> for Configuration {
    fn from_iter<I: IntoIterator<Item = u64>>(iter: I) -> Self {
        Configuration::new(iter.into_iter().collect())
    }
}

/// Comma-joined heights, e.g. `3,2,2,1`.
impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, h) in self.heights.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{h}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    Spm,
    Ipm,
}

/// A sandpile rule set, optionally confined by a wall.
///
/// With a wall at `l`, no grain may enter column `l` or beyond; this is the
/// bounded-length model whose orbit graphs are the `G^l` restrictions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Model {
    kind: ModelKind,
    k: usize,
    wall: Option<usize>,
}

impl Model {
    pub const SPM: Model = Model {
        kind: ModelKind::Spm,
        k: 0,
        wall: None,
    };

    pub fn spm() -> Self {
        Model::SPM
    }

    /// IPM(k): SPM plus horizontal slides across plateaus of length at most `k`.
    pub fn ipm(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(SandpileError::InvalidPlateauBound);
        }
        Ok(Model {
            kind: ModelKind::Ipm,
            k,
            wall: None,
        })
    }

    pub fn with_wall(self, wall: usize) -> Self {
        Model {
            wall: Some(wall),
            ..self
        }
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    /// Plateau-slide bound; 0 for SPM.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn wall(&self) -> Option<usize> {
        self.wall
    }

    fn admits(&self, destination: usize) -> bool {
        self.wall.is_none_or(|w| destination < w)
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ModelKind::Spm => f.write_str("SPM")?,
            ModelKind::Ipm => write!(f, "IPM({})", self.k)?,
        }
        if let Some(w) = self.wall {
            write!(f, " with wall at {w}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    Sequential,
    Parallel,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rule {
    /// One grain falls onto the next column.
    Vertical,
    /// One grain slides across a plateau of the given length.
    Horizontal { plateau: usize },
}

/// A single grain transfer from `source` to `destination`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Move {
    pub source: usize,
    pub destination: usize,
    pub rule: Rule,
}

impl Move {
    pub fn vertical(source: usize) -> Self {
        Move {
            source,
            destination: source + 1,
            rule: Rule::Vertical,
        }
    }

    pub fn horizontal(source: usize, plateau: usize) -> Self {
        Move {
            source,
            destination: source + plateau + 1,
            rule: Rule::Horizontal { plateau },
        }
    }
}

#[inline]
fn at(heights: &[u64], i: usize) -> u64 {
    heights.get(i).copied().unwrap_or(0)
}

/// The move firing at `i` under `model`, if any. At most one rule can fire
/// from a given column: a vertical move needs a drop of 2, a horizontal one
/// a drop of exactly 1 onto the plateau.
fn move_at(heights: &[u64], i: usize, model: &Model) -> Option<Move> {
    let a = at(heights, i);
    if a < 2 && model.kind == ModelKind::Spm {
        return None;
    }
    let next = at(heights, i + 1);
    if a >= next + 2 {
        return model.admits(i + 1).then(|| Move::vertical(i));
    }
    if model.kind == ModelKind::Ipm && a >= 2 && next == a - 1 {
        for plateau in 1..=model.k {
            let dest = i + plateau + 1;
            let h = at(heights, dest);
            if h == a - 2 {
                return model.admits(dest).then(|| Move::horizontal(i, plateau));
            }
            if h != a - 1 {
                break;
            }
        }
    }
    None
}

fn leftmost_move(heights: &[u64], model: &Model) -> Option<Move> {
    (0..heights.len()).find_map(|i| move_at(heights, i, model))
}

/// Every applicable move, in increasing source order.
pub fn applicable_moves(c: &Configuration, model: &Model) -> Vec<Move> {
    (0..c.len())
        .filter_map(|i| move_at(&c.heights, i, model))
        .collect()
}

/// The leftmost applicable move: the sequential tie-break.
pub fn first_move(c: &Configuration, model: &Model) -> Option<Move> {
    leftmost_move(&c.heights, model)
}

fn fire(heights: &mut Vec<u64>, mv: Move) {
    if mv.destination >= heights.len() {
        heights.resize(mv.destination + 1, 0);
    }
    heights[mv.source] -= 1;
    heights[mv.destination] += 1;
}

/// Whether `mv` matches its own rule pattern on `c` (no wall is consulted).
fn pattern_holds(heights: &[u64], mv: &Move) -> bool {
    let a = at(heights, mv.source);
    match mv.rule {
        Rule::Vertical => mv.destination == mv.source + 1 && a >= at(heights, mv.destination) + 2,
        Rule::Horizontal { plateau } => {
            plateau >= 1
                && mv.destination == mv.source + plateau + 1
                && a >= 2
                && (1..=plateau).all(|j| at(heights, mv.source + j) == a - 1)
                && at(heights, mv.destination) == a - 2
        }
    }
}

/// Transfers one grain according to `mv`.
pub fn apply_move(c: &Configuration, mv: &Move) -> Result<Configuration> {
    if !pattern_holds(&c.heights, mv) {
        return Err(SandpileError::InapplicableMove(*mv));
    }
    let mut heights = c.heights.clone();
    fire(&mut heights, *mv);
    Ok(Configuration::new(heights))
}

/// In-place parallel step; returns whether any grain moved.
fn parallel_in_place(heights: &mut Vec<u64>, model: &Model) -> bool {
    let len = heights.len();
    let emits: Vec<bool> = (0..len)
        .map(|i| heights[i] >= at(heights, i + 1) + 2 && model.admits(i + 1))
        .collect();
    if !emits.iter().any(|&e| e) {
        return false;
    }
    if emits[len - 1] {
        heights.push(0);
    }
    for (i, _) in emits.iter().enumerate().filter(|(_, &e)| e) {
        heights[i] -= 1;
        heights[i + 1] += 1;
    }
    true
}

/// Fires every applicable vertical rule at once, from the pre-step snapshot.
pub fn step_parallel(c: &Configuration, model: &Model) -> Result<Configuration> {
    if model.kind != ModelKind::Spm {
        return Err(SandpileError::UnsupportedMode(model.to_string()));
    }
    let mut heights = c.heights.clone();
    parallel_in_place(&mut heights, model);
    Ok(Configuration::new(heights))
}

/// Simulates until no rule applies. Sequential mode fires the leftmost
/// applicable move. Returns the fixed point and the number of steps.
pub fn run_to_fixpoint_naive(
    c: &Configuration,
    model: &Model,
    mode: Mode,
    step_limit: u64,
) -> Result<(Configuration, u64)> {
    if mode == Mode::Parallel && model.kind != ModelKind::Spm {
        return Err(SandpileError::UnsupportedMode(model.to_string()));
    }
    let mut heights = c.heights.clone();
    let mut steps = 0u64;
    loop {
        match mode {
            Mode::Sequential => {
                let Some(mv) = leftmost_move(&heights, model) else {
                    break;
                };
                if steps == step_limit {
                    return Err(SandpileError::Divergence { limit: step_limit });
                }
                fire(&mut heights, mv);
            }
            Mode::Parallel => {
                if steps == step_limit {
                    if leftmost_move(&heights, model).is_some() {
                        return Err(SandpileError::Divergence { limit: step_limit });
                    }
                    break;
                }
                if !parallel_in_place(&mut heights, model) {
                    break;
                }
            }
        }
        steps += 1;
    }
    Ok((Configuration::new(heights), steps))
}

/// `φ(c) = Σ a_i (a_i + 1) / 2`; strictly decreases under every rule.
pub fn phi(c: &Configuration) -> u64 {
    c.heights.iter().map(|&a| a * (a + 1) / 2).sum()
}

/// `z_i = a_i - a_{i+1}` over the stored columns.
pub fn height_differences(c: &Configuration) -> Vec<i64> {
    c.heights
        .windows(2)
        .map(|w| w[0] as i64 - w[1] as i64)
        .collect()
}

/// `Σ i·a_i`: each move raises it by the distance the grain travels.
pub fn movement_weight(heights: &[u64]) -> u128 {
    heights
        .iter()
        .enumerate()
        .map(|(i, &a)| i as u128 * a as u128)
        .sum()
}
