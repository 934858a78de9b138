//! Fast fixed-point computation for SPM.
//!
//! The configuration is cut into maximal windows that are reachable from a
//! single pile, and each window's fixed point is written down in closed
//! form. Grains may still cross window borders afterwards, which is handled
//! either by re-cutting the rendered configuration until it is stable
//! ([`run_fast_general`]) or by fusing adjacent windows whose border admits a
//! move ([`run_fast_spm`]), which also yields the sequential transient.

mod interval;
mod merge;

pub use interval::{compute_interval, cut, render_interval_fixpoint, staircase_weight, Interval};
pub use merge::{
    border_active, merge_intervals, merge_pass, merge_pass_with, merge_transient_delta, MergePolicy,
};

use serde::Serialize;

use crate::analysis::f_n;
use crate::error::{Result, SandpileError};
use crate::model::Configuration;

/// Model-specific pieces of the cut / compute loop.
pub trait WindowRules {
    /// Maximal windows whose content is reachable from a single pile.
    fn cut(&self, heights: &[u64]) -> Vec<Interval>;
    /// Fills in the fixed-point statistics of a window.
    fn compute(&self, iv: &Interval) -> Interval;
    /// Heights of the window's fixed point.
    fn render(&self, iv: &Interval) -> Result<Vec<u64>>;
}

/// The SPM instantiation.
#[derive(Clone, Copy, Debug, Default)]
pub struct SpmWindows;

impl WindowRules for SpmWindows {
    fn cut(&self, heights: &[u64]) -> Vec<Interval> {
        cut(heights)
    }

    fn compute(&self, iv: &Interval) -> Interval {
        compute_interval(iv)
    }

    fn render(&self, iv: &Interval) -> Result<Vec<u64>> {
        render_interval_fixpoint(iv)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FixpointReport {
    pub fixpoint: Configuration,
    /// Sequential transient; only the merge variant computes it.
    pub transient: Option<u64>,
    pub iterations: u64,
    pub merges: u64,
    pub intervals: Vec<Interval>,
}

/// `½·l·(l + 2f(n) − 1)`: the iteration bound of the re-cutting loop.
pub fn general_iteration_bound(l: usize, n: u64) -> u64 {
    let l = l as u128;
    let bound = l * (l + 2 * f_n(n) as u128).saturating_sub(1) / 2;
    bound.min(u64::MAX as u128) as u64
}

fn render_all<R: WindowRules>(rules: &R, intervals: &[Interval]) -> Result<Vec<u64>> {
    let mut heights = Vec::new();
    for iv in intervals {
        heights.extend(rules.render(iv)?);
    }
    Ok(heights)
}

/// Cut, compute and render until the rendered configuration stops changing.
pub fn run_fast_general(c: &Configuration) -> Result<FixpointReport> {
    run_fast_general_with(&SpmWindows, c)
}

pub fn run_fast_general_with<R: WindowRules>(
    rules: &R,
    c: &Configuration,
) -> Result<FixpointReport> {
    let mut current = c.canonical_heights().to_vec();
    let bound = general_iteration_bound(current.len(), c.grains());
    let mut iterations = 0u64;
    let mut intervals = Vec::new();
    while !current.is_empty() {
        intervals = rules
            .cut(&current)
            .iter()
            .map(|iv| rules.compute(iv))
            .collect();
        let mut rendered = render_all(rules, &intervals)?;
        let end = rendered.iter().rposition(|&h| h != 0).map_or(0, |i| i + 1);
        rendered.truncate(end);
        iterations += 1;
        if iterations > bound {
            return Err(SandpileError::BoundExceeded {
                what: "iteration",
                count: iterations,
                bound,
            });
        }
        if rendered == current {
            break;
        }
        current = rendered;
    }
    Ok(FixpointReport {
        fixpoint: Configuration::new(current),
        transient: None,
        iterations,
        merges: 0,
        intervals,
    })
}

/// One cut, closed-form compute, then merge passes until no border is
/// active. The transient is the sum of the final windows' move counts.
pub fn run_fast_spm(c: &Configuration) -> Result<FixpointReport> {
    run_fast_spm_with(c, MergePolicy::Eager)
}

pub fn run_fast_spm_with(c: &Configuration, policy: MergePolicy) -> Result<FixpointReport> {
    let heights = c.canonical_heights();
    let n = c.grains();
    let mut intervals: Vec<Interval> = cut(heights).iter().map(compute_interval).collect();
    let mut merges = 0u64;
    let mut iterations = 0u64;
    loop {
        let (next, merged) = merge_pass_with(intervals, policy);
        intervals = next;
        iterations += 1;
        merges += merged as u64;
        if merges > n {
            return Err(SandpileError::BoundExceeded {
                what: "merge",
                count: merges,
                bound: n,
            });
        }
        if merged == 0 {
            break;
        }
    }
    let mut fixpoint = render_all(&SpmWindows, &intervals)?;
    let end = fixpoint.iter().rposition(|&h| h != 0).map_or(0, |i| i + 1);
    fixpoint.truncate(end);
    let transient: i64 = intervals.iter().map(|iv| iv.t).sum();
    Ok(FixpointReport {
        fixpoint: Configuration::new(fixpoint),
        transient: Some(u64::try_from(transient).expect("transient is non-negative")),
        iterations,
        merges,
        intervals,
    })
}
