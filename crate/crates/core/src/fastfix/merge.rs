use super::interval::{compute_interval, Interval};

/// How a single pass treats an interval created earlier in the same pass.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum MergePolicy {
    /// A freshly merged interval is compared against its right neighbour
    /// straight away.
    #[default]
    Eager,
    /// Each interval takes part in at most one merge per pass.
    Deferred,
}

/// A grain can cross the border between two computed windows.
pub fn border_active(left: &Interval, right: &Interval) -> bool {
    left.q >= right.p + 2
}

/// Moves needed to go from the two rendered fixed points, side by side, to
/// the fixed point of their union: `W' - W_left - W_right - n_right·l_left`.
pub fn merge_transient_delta(left: &Interval, right: &Interval, merged: &Interval) -> i64 {
    merged.weight - left.weight - right.weight - right.n as i64 * left.l as i64
}

/// Fuses two adjacent computed windows into one computed window.
pub fn merge_intervals(left: &Interval, right: &Interval) -> Interval {
    debug_assert_eq!(left.end(), right.start);
    let fused = Interval::new(
        left.start,
        left.l + right.l,
        left.n + right.n,
        left.t0 + right.t0 + right.n as i64 * left.l as i64,
        right.is_last,
    );
    // For a last right member the length is replaced by f(n') in compute.
    let mut merged = compute_interval(&fused);
    merged.t = left.t + right.t + merge_transient_delta(left, right, &merged);
    merged
}

/// One left-to-right scan merging every active border. Returns the new list
/// and the number of merges performed.
pub fn merge_pass(intervals: Vec<Interval>) -> (Vec<Interval>, usize) {
    merge_pass_with(intervals, MergePolicy::Eager)
}

pub fn merge_pass_with(intervals: Vec<Interval>, policy: MergePolicy) -> (Vec<Interval>, usize) {
    let mut out: Vec<Interval> = Vec::with_capacity(intervals.len());
    let mut merges = 0;
    let mut fresh = false;
    for iv in intervals {
        if let Some(prev) = out.last_mut() {
            let eligible = policy == MergePolicy::Eager || !fresh;
            if eligible && border_active(prev, &iv) {
                *prev = merge_intervals(prev, &iv);
                merges += 1;
                fresh = true;
                continue;
            }
        }
        out.push(iv);
        fresh = false;
    }
    (out, merges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fastfix::interval::{cut, render_interval_fixpoint};

    fn computed(heights: &[u64]) -> Vec<Interval> {
        cut(heights).iter().map(compute_interval).collect()
    }

    #[test]
    fn staircase_and_hole_merge_in_one_move() {
        let ivs = computed(&[7, 0, 0, 0]);
        assert_eq!(ivs.len(), 2);
        assert_eq!(ivs[0].t, 6);
        assert!(border_active(&ivs[0], &ivs[1]));
        let merged = merge_intervals(&ivs[0], &ivs[1]);
        assert_eq!((merged.n, merged.l, merged.p, merged.k), (7, 4, 3, 1));
        assert_eq!(merge_transient_delta(&ivs[0], &ivs[1], &merged), 1);
        assert_eq!(merged.t, 7);
        assert_eq!(render_interval_fixpoint(&merged).unwrap(), [3, 2, 1, 1]);
    }

    #[test]
    fn quiet_border_is_left_alone() {
        // (3,2,2) beside a last window holding one grain: q = p_next + 1.
        let left = compute_interval(&Interval::new(0, 3, 7, 0, false));
        let right = compute_interval(&Interval::new(3, 1, 1, 0, true));
        assert_eq!(left.q, right.p + 1);
        let ivs = vec![left, right];
        let (out, merges) = merge_pass(ivs.clone());
        assert_eq!((out, merges), (ivs, 0));
        // An increase at the cut keeps q below p.
        let ivs = computed(&[3, 2, 1, 2, 1]);
        assert_eq!(ivs[0].q, ivs[1].p - 1);
        assert_eq!(merge_pass(ivs).1, 0);
    }

    #[test]
    fn comb_merges_once_per_block() {
        let mut heights = Vec::new();
        for _ in 0..4 {
            heights.extend([7, 0, 0, 0]);
        }
        heights.truncate(13);
        let (out, merges) = merge_pass(computed(&heights));
        assert_eq!(merges, 3);
        assert_eq!(out.len(), 4);
        assert_eq!(merge_pass(out).1, 0);
    }

    #[test]
    fn eager_pass_chains_a_fresh_merge() {
        // (6,5,4) | (0) | (1): the merged (5,4,3,3) can still shed onto (1).
        let ivs = computed(&[15, 0, 0, 0, 1]);
        assert_eq!(ivs.len(), 3);
        let (eager, m) = merge_pass_with(ivs.clone(), MergePolicy::Eager);
        assert_eq!((eager.len(), m), (1, 2));
        let (deferred, m) = merge_pass_with(ivs, MergePolicy::Deferred);
        assert_eq!((deferred.len(), m), (2, 1));
        let (deferred, m) = merge_pass_with(deferred, MergePolicy::Deferred);
        assert_eq!(m, 1);
        assert_eq!(deferred, eager);
    }
}
