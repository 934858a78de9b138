//! Closed-form results for the single pile `(n)`, the reachability test for
//! SPM, and exhaustive orbit graphs.

mod lattice;
mod orbit;

pub use lattice::{is_lattice, path_lengths, topological_order};
pub use orbit::{build_orbit_graph, restrict_length, OrbitGraph};

use serde::Serialize;

use crate::error::Result;
use crate::model::{run_to_fixpoint_naive, Configuration, Mode, Model};

/// `n = k + p(p+1)/2` with `0 <= k <= p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Decomposition {
    pub p: u64,
    pub k: u64,
}

pub fn integer_decomposition(n: u64) -> Decomposition {
    let p = ((8 * n as u128 + 1).isqrt() as u64 - 1) / 2;
    let k = n - p * (p + 1) / 2;
    debug_assert!(k <= p);
    Decomposition { p, k }
}

/// Fixed point of `(n)`: `(p, …, 1)` when `k = 0`, otherwise the staircase
/// `(p, …, k+1, k, k, k-1, …, 1)`.
pub fn closed_form_fixpoint(n: u64) -> Configuration {
    let Decomposition { p, k } = integer_decomposition(n);
    let mut heights: Vec<u64> = (1..=p).rev().collect();
    if k > 0 {
        heights.insert((p - k) as usize, k);
    }
    Configuration::new(heights)
}

/// Sequential transient length of `(n)`.
pub fn t_seq_closed_form(n: u64) -> u64 {
    let Decomposition { p, k } = integer_decomposition(n);
    (p + 1) * p * p.saturating_sub(1) / 6 + k * (2 * p + 1 - k) / 2
}

/// `f(n) = ⌈(√(8n+1) − 1)/2⌉`, the length of the fixed point of `(n)`.
pub fn f_n(n: u64) -> u64 {
    let d = 8 * n as u128 + 1;
    let s = d.isqrt();
    let l = if s * s == d {
        (s - 1) / 2
    } else if s % 2 == 1 {
        s.div_ceil(2)
    } else {
        s / 2
    };
    l as u64
}

/// SPM reachability from a single pile: the canonical heights are
/// non-increasing and any two plateaus are separated by a cliff. A plateau
/// of length 3 counts as two adjacent plateaus.
pub fn is_reachable(c: &Configuration) -> bool {
    is_reachable_heights(c.canonical_heights())
}

pub(crate) fn is_reachable_heights(heights: &[u64]) -> bool {
    let mut plateaus = 0;
    for w in heights.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b > a {
            return false;
        } else if a - b >= 2 {
            plateaus = 0;
        } else if a == b {
            plateaus += 1;
            if plateaus == 2 {
                return false;
            }
        }
    }
    true
}

/// Sequential and measured parallel transient of `(n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TransientReport {
    pub t_seq: u64,
    pub t_par: u64,
    /// `p - 1`; the parallel lower bound is `t_seq / (p - 1)`.
    pub divisor: u64,
}

impl TransientReport {
    /// `(t_seq / (p-1), t_seq)`; the lower bound is `None` when `p < 2`.
    pub fn bounds(&self) -> (Option<f64>, u64) {
        let lower = (self.divisor > 0).then(|| self.t_seq as f64 / self.divisor as f64);
        (lower, self.t_seq)
    }

    /// Exact check of `t_seq/(p-1) <= t_par <= t_seq`.
    pub fn within_bounds(&self) -> bool {
        self.divisor > 0
            && self.t_par as u128 * self.divisor as u128 >= self.t_seq as u128
            && self.t_par <= self.t_seq
    }
}

/// Closed-form `t_seq` alongside `t_par` measured by parallel simulation.
pub fn transient_report(n: u64, step_limit: u64) -> Result<TransientReport> {
    let (_, t_par) = run_to_fixpoint_naive(
        &Configuration::single_pile(n),
        &Model::SPM,
        Mode::Parallel,
        step_limit,
    )?;
    Ok(TransientReport {
        t_seq: t_seq_closed_form(n),
        t_par,
        divisor: integer_decomposition(n).p.saturating_sub(1),
    })
}
