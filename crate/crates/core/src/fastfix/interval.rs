use serde::Serialize;

use crate::analysis::f_n;
use crate::error::{Result, SandpileError};

/// A window of the configuration together with the shape of its fixed point.
///
/// The fixed point of a reachable window of length `l` holding `n` grains is
/// the staircase `(p, p-1, …, p-l+1)` with one extra grain on each of its
/// last `k` columns; `q` is its rightmost height. Non-last windows are
/// bounded by a wall at their right end. The last window is unbounded and
/// its length becomes `f(n)` once computed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Interval {
    /// First column, 0-based.
    pub start: usize,
    pub l: usize,
    pub n: u64,
    pub p: i64,
    pub q: i64,
    pub k: i64,
    /// Sequential moves spent inside this window so far.
    pub t: i64,
    /// `Σ i·a_{start+i}` of the window's initial content.
    pub t0: i64,
    /// `Σ i·Π_i` of the rendered fixed point.
    pub weight: i64,
    pub is_last: bool,
    pub computed: bool,
}

impl Interval {
    pub fn new(start: usize, l: usize, n: u64, t0: i64, is_last: bool) -> Self {
        Interval {
            start,
            l,
            n,
            p: 0,
            q: 0,
            k: 0,
            t: 0,
            t0,
            weight: 0,
            is_last,
            computed: false,
        }
    }

    /// Column just past the window.
    pub fn end(&self) -> usize {
        self.start + self.l
    }
}

/// Splits `heights` into maximal reachable windows: a new window starts
/// after an increase, or at the second plateau seen since the last cliff,
/// increase or cut. `n` and `t0` are accumulated during the scan.
pub fn cut(heights: &[u64]) -> Vec<Interval> {
    let mut intervals = Vec::new();
    if heights.is_empty() {
        return intervals;
    }
    let mut start = 0;
    let mut n = 0u64;
    let mut t0 = 0i64;
    let mut plateaus = 0;
    for i in 0..heights.len() {
        let a = heights[i];
        n += a;
        t0 += ((i - start) as u64 * a) as i64;
        let Some(&next) = heights.get(i + 1) else {
            break;
        };
        let split = if next > a {
            plateaus = 0;
            true
        } else if a - next >= 2 {
            plateaus = 0;
            false
        } else if next == a {
            plateaus += 1;
            if plateaus == 2 {
                plateaus = 0;
                true
            } else {
                false
            }
        } else {
            false
        };
        if split {
            intervals.push(Interval::new(start, i + 1 - start, n, t0, false));
            start = i + 1;
            n = 0;
            t0 = 0;
        }
    }
    intervals.push(Interval::new(start, heights.len() - start, n, t0, true));
    intervals
}

fn floor_div(a: i128, b: i128) -> i128 {
    a.div_euclid(b)
}

fn ceil_div(a: i128, b: i128) -> i128 {
    -(-a).div_euclid(b)
}

/// `Σ_{i<l} i(p-i) + Σ_{l-k<=i<l} i`, the movement weight of the staircase.
pub fn staircase_weight(l: i64, p: i64, k: i64) -> i64 {
    let (l, p, k) = (l as i128, p as i128, k as i128);
    let w = l * (l - 1) * (3 * p - 2 * l + 1) / 6 + k * (2 * l - k - 1) / 2;
    w as i64
}

/// Fills `p`, `q`, `k`, the fixed-point weight and `t = weight - t0`.
/// Grain-free windows keep their length and render as zeros.
pub fn compute_interval(iv: &Interval) -> Interval {
    let mut out = iv.clone();
    out.computed = true;
    if iv.n == 0 {
        out.p = 0;
        out.q = 0;
        out.k = 0;
        out.weight = 0;
        out.t = -iv.t0;
        return out;
    }
    if iv.is_last {
        out.l = f_n(iv.n) as usize;
    }
    let (n, l) = (iv.n as i128, out.l as i128);
    let p = floor_div(2 * n + l * l - l, 2 * l);
    let k = n - l * (2 * p + 1 - l) / 2;
    let q = ceil_div(2 * n - l * l + l, 2 * l);
    debug_assert!((0..l).contains(&k), "k = {k} outside [0, {l})");
    out.p = p as i64;
    out.q = q as i64;
    out.k = k as i64;
    out.weight = staircase_weight(out.l as i64, out.p, out.k);
    out.t = out.weight - iv.t0;
    out
}

/// Heights of the window's fixed point: `(p, …, p-α, p-α, …, p-l+2)` with
/// `α = l - k - 1`, or the plain staircase when `k = 0`.
pub fn render_interval_fixpoint(iv: &Interval) -> Result<Vec<u64>> {
    if iv.n == 0 {
        return Ok(vec![0; iv.l]);
    }
    let (l, p, k) = (iv.l as i64, iv.p, iv.k);
    let bump_from = l - k;
    (0..l)
        .map(|i| {
            let h = p - i + i64::from(k > 0 && i >= bump_from);
            u64::try_from(h).map_err(|_| SandpileError::NegativeHeight { start: iv.start })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn windows(heights: &[u64]) -> Vec<Vec<u64>> {
        cut(heights)
            .iter()
            .map(|iv| heights[iv.start..iv.end()].to_vec())
            .collect()
    }

    fn stats(n: u64, l: usize, is_last: bool) -> Interval {
        compute_interval(&Interval::new(0, l, n, 0, is_last))
    }

    #[test]
    fn cut_examples() {
        assert_eq!(
            windows(&[7, 0, 0, 0, 7, 0, 0, 0, 5]),
            vec![vec![7, 0, 0], vec![0], vec![7, 0, 0], vec![0], vec![5]]
        );
        assert_eq!(windows(&[3, 2, 2, 1]), vec![vec![3, 2, 2, 1]]);
        assert_eq!(windows(&[2, 2, 1, 1, 1]), vec![vec![2, 2, 1], vec![1, 1]]);
        assert_eq!(windows(&[3, 3, 3]), vec![vec![3, 3], vec![3]]);
        assert_eq!(windows(&[1, 2, 3]), vec![vec![1], vec![2], vec![3]]);
        assert!(cut(&[]).is_empty());
    }

    #[test]
    fn cut_records_grains_and_weight() {
        let ivs = cut(&[7, 0, 0, 0, 4, 3, 3]);
        let got: Vec<(usize, usize, u64, i64, bool)> = ivs
            .iter()
            .map(|iv| (iv.start, iv.l, iv.n, iv.t0, iv.is_last))
            .collect();
        assert_eq!(
            got,
            vec![
                (0, 3, 7, 0, false),
                (3, 1, 0, 0, false),
                (4, 3, 10, 9, true)
            ]
        );
    }

    #[test]
    fn compute_examples() {
        let iv = stats(7, 3, false);
        assert_eq!((iv.p, iv.q, iv.k, iv.t), (3, 2, 1, 6));
        let iv = stats(8, 1, true);
        assert_eq!((iv.l, iv.p, iv.q, iv.k, iv.t), (4, 3, 1, 2, 9));
        let iv = stats(0, 1, false);
        assert_eq!((iv.p, iv.q, iv.k, iv.t), (0, 0, 0, 0));
    }

    #[test]
    fn render_examples() {
        assert_eq!(
            render_interval_fixpoint(&stats(7, 3, false)).unwrap(),
            [3, 2, 2]
        );
        assert_eq!(
            render_interval_fixpoint(&stats(7, 4, false)).unwrap(),
            [3, 2, 1, 1]
        );
        assert_eq!(
            render_interval_fixpoint(&stats(1, 3, false)).unwrap(),
            [1, 0, 0]
        );
        assert_eq!(
            render_interval_fixpoint(&stats(3, 4, false)).unwrap(),
            [2, 1, 0, 0]
        );
        assert_eq!(
            render_interval_fixpoint(&stats(0, 2, false)).unwrap(),
            [0, 0]
        );
        assert_eq!(render_interval_fixpoint(&stats(0, 1, true)).unwrap(), [0]);
    }

    #[test]
    fn render_rejects_negative_heights() {
        // (1,0,0,0) is not a reachable window; its staircase dips below zero.
        let iv = stats(1, 4, false);
        assert_eq!(
            render_interval_fixpoint(&iv),
            Err(SandpileError::NegativeHeight { start: 0 })
        );
    }

    #[test]
    fn q_is_the_rendered_rightmost_height() {
        for n in 1..80u64 {
            for l in 1..12usize {
                let iv = stats(n, l, false);
                if let Ok(r) = render_interval_fixpoint(&iv) {
                    assert_eq!(*r.last().unwrap() as i64, iv.q, "n={n} l={l}");
                    assert_eq!(r[0] as i64, iv.p);
                    assert_eq!(r.iter().sum::<u64>(), n);
                    let w: u64 = r.iter().enumerate().map(|(i, &h)| i as u64 * h).sum();
                    assert_eq!(w as i64, iv.weight);
                }
            }
        }
    }
}
