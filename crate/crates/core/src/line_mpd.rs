//! Max-min dispersion (MPD) on the real line.
//!
//! Two exact methods: a Bellman recurrence over "best bottleneck of a
//! `t`-subset ending at point `i`", and a binary search over the sorted
//! pairwise differences driven by a greedy left-to-right feasibility scan.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::metric::Subset;

/// Points on a line, kept sorted; subsets returned to callers refer to the
/// caller's original indices.
#[derive(Clone, Debug, PartialEq)]
pub struct LineInstance {
    xs: Vec<f64>,
    /// `original[p]` is the input index of the `p`-th smallest point.
    original: Vec<usize>,
}

#[derive(Deserialize, Serialize)]
struct LineJson {
    xs: Vec<f64>,
}

impl LineInstance {
    /// Sorts `xs`; rejects empty input, non-finite values and duplicates.
    pub fn new(xs: Vec<f64>) -> Result<Self> {
        if xs.is_empty() {
            return invalid("line instance needs at least one point");
        }
        if let Some(bad) = xs.iter().find(|x| !x.is_finite()) {
            return invalid(format!("non-finite position {bad}"));
        }
        let mut order: Vec<usize> = (0..xs.len()).collect();
        order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]).then(a.cmp(&b)));
        let sorted: Vec<f64> = order.iter().map(|&i| xs[i]).collect();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return invalid(format!("duplicate position {}", w[0]));
        }
        Ok(LineInstance { xs: sorted, original: order })
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let json: LineJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("line JSON: {e}")))?;
        LineInstance::new(json.xs)
    }

    /// One number per line; blank lines and `#` comments are skipped.
    pub fn from_text(text: &str) -> Result<Self> {
        let xs = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| {
                l.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("line instance: bad number {l:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        LineInstance::new(xs)
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// Sorted positions.
    pub fn positions(&self) -> &[f64] {
        &self.xs
    }

    /// Maps sorted positions back to input indices.
    pub fn to_original(&self, sorted_positions: &[usize]) -> Subset {
        Subset::new(sorted_positions.iter().map(|&p| self.original[p]).collect())
            .expect("sorted positions are distinct")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LineMpdResult {
    pub value: f64,
    /// Input indices of a `k`-subset attaining `value`.
    pub subset: Subset,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GreedyOutcome {
    pub feasible: bool,
    /// Every point the scan picked, as input indices.
    pub selected: Subset,
}

fn check_k(inst: &LineInstance, k: usize) -> Result<()> {
    if k < 2 || k > inst.len() {
        return invalid(format!("k must lie in 2..={}, got {k}", inst.len()));
    }
    Ok(())
}

/// `M(i, t) = max_{j < i} min(M(j, t - 1), x_i - x_j)` with `M(i, 1) = +inf`.
/// O(n^2 k).
pub fn line_mpd_dp(inst: &LineInstance, k: usize) -> Result<LineMpdResult> {
    check_k(inst, k)?;
    let xs = &inst.xs;
    let n = xs.len();
    let mut table = vec![vec![f64::NEG_INFINITY; n]; k + 1];
    let mut prev = vec![vec![usize::MAX; n]; k + 1];
    table[1].fill(f64::INFINITY);
    for t in 2..=k {
        for i in t - 1..n {
            for j in t - 2..i {
                let cand = table[t - 1][j].min(xs[i] - xs[j]);
                if cand > table[t][i] {
                    table[t][i] = cand;
                    prev[t][i] = j;
                }
            }
        }
    }
    let (mut last, value) = table[k]
        .iter()
        .copied()
        .enumerate()
        .fold((usize::MAX, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    let mut picked = Vec::with_capacity(k);
    for t in (1..=k).rev() {
        picked.push(last);
        last = prev[t][last];
    }
    picked.reverse();
    Ok(LineMpdResult { value, subset: inst.to_original(&picked) })
}

fn greedy_positions(xs: &[f64], tau: f64) -> Vec<usize> {
    let mut picked = vec![0];
    let mut last = xs[0];
    for (p, &x) in xs.iter().enumerate().skip(1) {
        if x - last >= tau {
            picked.push(p);
            last = x;
        }
    }
    picked
}

/// Scans left to right, keeping every point at least `tau` beyond the last
/// kept one; feasible iff at least `k` points are kept.
pub fn greedy_feasible(inst: &LineInstance, k: usize, tau: f64) -> Result<GreedyOutcome> {
    if tau.is_nan() || tau <= 0.0 {
        return invalid(format!("tau must be positive, got {tau}"));
    }
    let picked = greedy_positions(&inst.xs, tau);
    Ok(GreedyOutcome { feasible: picked.len() >= k, selected: inst.to_original(&picked) })
}

/// Binary search for the largest pairwise difference at which the greedy scan
/// still keeps `k` points. O(n^2 log n) time, O(n^2) memory.
pub fn line_mpd_search(inst: &LineInstance, k: usize) -> Result<LineMpdResult> {
    check_k(inst, k)?;
    let xs = &inst.xs;
    let n = xs.len();
    let mut candidates = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            candidates.push(xs[j] - xs[i]);
        }
    }
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    let feasible = |tau: f64| greedy_positions(xs, tau).len() >= k;
    // The smallest difference is always feasible: the scan then keeps every point.
    let (mut lo, mut hi) = (0, candidates.len() - 1);
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        if feasible(candidates[mid]) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    let value = candidates[lo];
    let mut picked = greedy_positions(xs, value);
    picked.truncate(k);
    Ok(LineMpdResult { value, subset: inst.to_original(&picked) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(xs: &[f64]) -> LineInstance {
        LineInstance::new(xs.to_vec()).unwrap()
    }

    #[test]
    fn four_points_k3() {
        let inst = line(&[0.0, 1.0, 3.0, 6.0]);
        let dp = line_mpd_dp(&inst, 3).unwrap();
        assert_eq!(dp.value, 3.0);
        assert_eq!(dp.subset.indices(), &[0, 2, 3]);
        let search = line_mpd_search(&inst, 3).unwrap();
        assert_eq!(search.value, 3.0);
        assert_eq!(search.subset.indices(), &[0, 2, 3]);
    }

    #[test]
    fn k2_takes_the_extremes() {
        let inst = line(&[4.0, -1.0, 2.5, 9.0]);
        let dp = line_mpd_dp(&inst, 2).unwrap();
        assert_eq!(dp.value, 10.0);
        assert_eq!(dp.subset.indices(), &[1, 3]);
        assert_eq!(line_mpd_search(&inst, 2).unwrap().value, 10.0);
    }

    #[test]
    fn ten_integers_k4() {
        let xs: Vec<f64> = (0..10).map(f64::from).collect();
        let inst = line(&xs);
        assert_eq!(line_mpd_dp(&inst, 4).unwrap().value, 3.0);
        let search = line_mpd_search(&inst, 4).unwrap();
        assert_eq!(search.value, 3.0);
        assert_eq!(search.subset.indices(), &[0, 3, 6, 9]);
    }

    #[test]
    fn greedy_examples() {
        let inst = line(&[0.0, 1.0, 3.0, 6.0]);
        let g = greedy_feasible(&inst, 3, 3.0).unwrap();
        assert!(g.feasible);
        assert_eq!(g.selected.indices(), &[0, 2, 3]);
        assert!(!greedy_feasible(&inst, 2, 6.5).unwrap().feasible);
        // Smallest gap is 1: every point is taken.
        let g = greedy_feasible(&inst, 4, 1.0).unwrap();
        assert!(g.feasible);
        assert_eq!(g.selected.len(), 4);
        assert!(!greedy_feasible(&inst, 4, 1.5).unwrap().feasible);
        assert!(greedy_feasible(&inst, 2, 0.0).is_err());
    }

    #[test]
    fn equally_spaced_forced_selection() {
        let xs: Vec<f64> = (0..7).map(|i| 0.5 * f64::from(i)).collect();
        let inst = line(&xs);
        assert_eq!(line_mpd_search(&inst, 7).unwrap().value, 0.5);
        assert_eq!(line_mpd_dp(&inst, 7).unwrap().value, 0.5);
    }

    #[test]
    fn unsorted_input_keeps_original_indices() {
        let inst = line(&[6.0, 0.0, 3.0, 1.0]);
        let dp = line_mpd_dp(&inst, 3).unwrap();
        assert_eq!(dp.subset.indices(), &[0, 1, 2]);
    }

    #[test]
    fn bad_inputs() {
        assert!(LineInstance::new(vec![]).is_err());
        assert!(LineInstance::new(vec![1.0, 1.0]).is_err());
        assert!(LineInstance::new(vec![f64::NAN]).is_err());
        let inst = line(&[0.0, 1.0]);
        assert!(line_mpd_dp(&inst, 1).is_err());
        assert!(line_mpd_search(&inst, 3).is_err());
    }

    #[test]
    fn parsing() {
        let a = LineInstance::from_json_str(r#"{"xs": [3, 1, 2]}"#).unwrap();
        let b = LineInstance::from_text("# positions\n3\n\n1\n2\n").unwrap();
        assert_eq!(a, b);
        assert!(LineInstance::from_text("1\nx\n").is_err());
    }
}
