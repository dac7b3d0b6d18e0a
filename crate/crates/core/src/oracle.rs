//! Exhaustive ground truth.
//!
//! Subsets are enumerated in lexicographic order; witnesses come back sorted
//! lexicographically. Pruning is off unless explicitly requested.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::line_mpd::{line_mpd_dp, line_mpd_search, LineInstance};
use crate::metric::{riesz_energy, Exponent, MetricInstance, Subset, REL_TOL};
use crate::random::{line_points, seeded};

pub const DEFAULT_CAP: u128 = 20_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleConfig {
    /// Largest `C(n, k)` the oracle agrees to enumerate.
    pub cap: u128,
    /// Workers; the leading index is partitioned statically across them.
    pub threads: usize,
    /// Skip branches that cannot beat the incumbent. Never used for ground truth.
    pub prune: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { cap: DEFAULT_CAP, threads: 1, prune: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleResult {
    pub optimum: f64,
    pub witnesses: Vec<Subset>,
    pub enumerated: u64,
}

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step.
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

#[derive(Clone, Copy)]
enum Objective {
    /// Minimize the sum of the weights.
    MinSum,
    /// Maximize the minimum of the weights.
    MaxMin,
}

struct Acc {
    best: f64,
    /// `(value, indices)` candidates, filtered against the final best at the end.
    hits: Vec<(f64, Vec<usize>)>,
    count: u64,
}

struct Search<'a> {
    weights: &'a [Vec<f64>],
    n: usize,
    k: usize,
    objective: Objective,
    prune: bool,
}

impl Search<'_> {
    fn within(&self, value: f64, best: f64) -> bool {
        match self.objective {
            Objective::MinSum => value <= best + REL_TOL * best,
            Objective::MaxMin => value == best,
        }
    }

    fn better(&self, value: f64, best: f64) -> bool {
        match self.objective {
            Objective::MinSum => value < best,
            Objective::MaxMin => value > best,
        }
    }

    fn combine(&self, partial: f64, w: f64) -> f64 {
        match self.objective {
            Objective::MinSum => partial + w,
            Objective::MaxMin => partial.min(w),
        }
    }

    fn hopeless(&self, partial: f64, best: f64) -> bool {
        self.prune
            && match self.objective {
                Objective::MinSum => partial > best + REL_TOL * best,
                Objective::MaxMin => partial < best,
            }
    }

    fn initial(&self) -> f64 {
        match self.objective {
            Objective::MinSum => 0.0,
            Objective::MaxMin => f64::INFINITY,
        }
    }

    fn worst(&self) -> f64 {
        match self.objective {
            Objective::MinSum => f64::INFINITY,
            Objective::MaxMin => f64::NEG_INFINITY,
        }
    }

    fn run_leading(&self, leads: impl Iterator<Item = usize>) -> Acc {
        let mut acc = Acc { best: self.worst(), hits: Vec::new(), count: 0 };
        let mut chosen = Vec::with_capacity(self.k);
        if self.k == 0 {
            self.record(&mut acc, &chosen, self.initial());
            return acc;
        }
        for lead in leads {
            chosen.push(lead);
            self.extend(&mut acc, &mut chosen, self.initial());
            chosen.pop();
        }
        acc
    }

    fn extend(&self, acc: &mut Acc, chosen: &mut Vec<usize>, partial: f64) {
        if chosen.len() == self.k {
            self.record(acc, chosen, partial);
            return;
        }
        let last = *chosen.last().expect("leading index chosen");
        let remaining = self.k - chosen.len();
        for next in last + 1..=self.n - remaining {
            let mut value = partial;
            for &c in chosen.iter() {
                value = self.combine(value, self.weights[c][next]);
            }
            if self.hopeless(value, acc.best) {
                continue;
            }
            chosen.push(next);
            self.extend(acc, chosen, value);
            chosen.pop();
        }
    }

    fn record(&self, acc: &mut Acc, chosen: &[usize], value: f64) {
        acc.count += 1;
        if self.better(value, acc.best) {
            acc.best = value;
            let best = value;
            acc.hits.retain(|(v, _)| self.within(*v, best));
        }
        if self.within(value, acc.best) {
            acc.hits.push((value, chosen.to_vec()));
        }
    }

    fn solve(&self, threads: usize) -> OracleResult {
        let leads = if self.k == 0 { 0 } else { self.n - self.k + 1 };
        let threads = threads.max(1).min(leads.max(1));
        let parts: Vec<Acc> = if threads == 1 {
            vec![self.run_leading(0..leads)]
        } else {
            std::thread::scope(|scope| {
                let handles: Vec<_> = (0..threads)
                    .map(|w| scope.spawn(move || self.run_leading((w..leads).step_by(threads))))
                    .collect();
                handles.into_iter().map(|h| h.join().expect("oracle worker panicked")).collect()
            })
        };
        let best = parts.iter().fold(self.worst(), |b, p| {
            if self.better(p.best, b) {
                p.best
            } else {
                b
            }
        });
        let mut witnesses: Vec<Vec<usize>> = parts
            .iter()
            .flat_map(|p| p.hits.iter())
            .filter(|(v, _)| self.within(*v, best))
            .map(|(_, idx)| idx.clone())
            .collect();
        witnesses.sort();
        OracleResult {
            optimum: best,
            witnesses: witnesses.into_iter().map(Subset::from_sorted).collect(),
            enumerated: parts.iter().map(|p| p.count).sum(),
        }
    }
}

/// Calls `f` on every `k`-subset of `0..n` in lexicographic order.
pub fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        // Rightmost position that can still advance.
        let Some(pos) = (0..k).rev().find(|&p| idx[p] < n - k + p) else {
            return;
        };
        idx[pos] += 1;
        for q in pos + 1..k {
            idx[q] = idx[q - 1] + 1;
        }
    }
}

fn check_size(n: usize, k: usize, cap: u128) -> Result<()> {
    if k > n {
        return invalid(format!("k = {k} exceeds the {n} available points"));
    }
    let count = binomial(n, k);
    if count > cap {
        return Err(Error::CapExceeded { count, cap });
    }
    Ok(())
}

/// Minimum Riesz energy over all `k`-subsets with every minimizer within a
/// relative 1e-9 of the optimum.
pub fn brute_force_riesz(m: &MetricInstance, k: usize, s: Exponent, cfg: &OracleConfig) -> Result<OracleResult> {
    let n = m.len();
    check_size(n, k, cfg.cap)?;
    let weights: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { 0.0 } else { m.dist(i, j).powf(-s.get()) })
                .collect()
        })
        .collect();
    let search = Search { weights: &weights, n, k, objective: Objective::MinSum, prune: cfg.prune };
    Ok(search.solve(cfg.threads))
}

/// Maximum of the minimum pairwise distance over all `k`-subsets. Values are
/// input distances, so maximizers are matched exactly.
pub fn brute_force_mpd(m: &MetricInstance, k: usize, cfg: &OracleConfig) -> Result<OracleResult> {
    let n = m.len();
    check_size(n, k, cfg.cap)?;
    let search = Search { weights: m.matrix(), n, k, objective: Objective::MaxMin, prune: cfg.prune };
    Ok(search.solve(cfg.threads))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NaiveLineResult {
    /// Objective value of the left-to-right recurrence (last-gap costs only).
    pub value: f64,
    /// Indices (into the sorted points) of the subset the recurrence selects.
    pub subset: Subset,
}

/// Left-to-right DP that charges a new point only its interaction with the
/// previously selected point:
/// `G(i, t) = min_{j < i} G(j, t - 1) + (x_i - x_j)^-s`.
/// Exact for `k <= 2`, not in general.
pub fn naive_line_riesz_dp(points: &[f64], k: usize, s: Exponent) -> Result<NaiveLineResult> {
    let n = points.len();
    if !points.windows(2).all(|w| w[0] < w[1]) {
        return invalid("points must be strictly increasing");
    }
    if k == 0 || k > n {
        return invalid(format!("k must lie in 1..={n}, got {k}"));
    }
    let mut g = vec![vec![f64::INFINITY; n]; k + 1];
    let mut prev = vec![vec![usize::MAX; n]; k + 1];
    g[1].fill(0.0);
    for t in 2..=k {
        for i in t - 1..n {
            for j in t - 2..i {
                let cand = g[t - 1][j] + (points[i] - points[j]).powf(-s.get());
                if cand < g[t][i] {
                    g[t][i] = cand;
                    prev[t][i] = j;
                }
            }
        }
    }
    let (mut last, value) = g[k]
        .iter()
        .copied()
        .enumerate()
        .fold((usize::MAX, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
    let mut picked = Vec::with_capacity(k);
    for t in (1..=k).rev() {
        picked.push(last);
        last = prev[t][last];
    }
    picked.reverse();
    Ok(NaiveLineResult { value, subset: Subset::from_sorted(picked) })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CounterexampleConfig {
    pub n_min: usize,
    pub n_max: usize,
    pub k_min: usize,
    pub k_max: usize,
    pub s: f64,
    /// Instances to try before giving up.
    pub budget: u64,
    pub seed: u64,
    /// Distinct integers below this bound when set, uniform reals in `[0, 1)` otherwise.
    pub grid: Option<usize>,
}

impl Default for CounterexampleConfig {
    fn default() -> Self {
        CounterexampleConfig {
            n_min: 2,
            n_max: 8,
            k_min: 2,
            k_max: 4,
            s: 1.0,
            budget: 100_000,
            seed: 0,
            grid: None,
        }
    }
}

impl CounterexampleConfig {
    fn check(&self) -> Result<()> {
        if self.n_min < 2 || self.n_min > self.n_max {
            return invalid("need 2 <= n_min <= n_max");
        }
        if self.k_min < 2 || self.k_min > self.k_max || self.k_min > self.n_max {
            return invalid("need 2 <= k_min <= k_max and k_min <= n_max");
        }
        if let Some(g) = self.grid {
            if g < self.n_max {
                return invalid("grid must have at least n_max positions");
            }
        }
        Ok(())
    }

    fn draw<R: rand::Rng>(&self, rng: &mut R) -> (Vec<f64>, usize) {
        let n = rng.gen_range(self.n_min.max(self.k_min)..=self.n_max);
        let k = rng.gen_range(self.k_min..=self.k_max.min(n));
        (line_points(rng, n, self.grid), k)
    }
}

/// A line instance on which the naive recurrence picks a suboptimal subset.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LineCounterexample {
    pub points: Vec<f64>,
    pub k: usize,
    pub s: f64,
    pub naive_subset: Subset,
    pub naive_value: f64,
    /// True energy of the naive subset.
    pub naive_energy: f64,
    pub optimal_subset: Subset,
    pub optimal_energy: f64,
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchReport<T> {
    pub found: Option<T>,
    pub tried: u64,
}

/// Minimum energy gap (true energy of the naive choice minus the optimum)
/// that counts as a counterexample.
pub const COUNTEREXAMPLE_GAP: f64 = 1e-6;

pub fn find_line_counterexample(cfg: &CounterexampleConfig) -> Result<SearchReport<LineCounterexample>> {
    cfg.check()?;
    let s = Exponent::new(cfg.s)?;
    let mut rng = seeded(cfg.seed);
    let oracle = OracleConfig::default();
    for tried in 1..=cfg.budget {
        let (points, k) = cfg.draw(&mut rng);
        let naive = naive_line_riesz_dp(&points, k, s)?;
        let m = MetricInstance::from_line(&points)?;
        let naive_energy = riesz_energy(&m, &naive.subset, s)?;
        let best = brute_force_riesz(&m, k, s, &oracle)?;
        let gap = naive_energy - best.optimum;
        if gap > COUNTEREXAMPLE_GAP {
            return Ok(SearchReport {
                found: Some(LineCounterexample {
                    points,
                    k,
                    s: cfg.s,
                    naive_subset: naive.subset,
                    naive_value: naive.value,
                    naive_energy,
                    optimal_subset: best.witnesses[0].clone(),
                    optimal_energy: best.optimum,
                    gap,
                }),
                tried,
            });
        }
    }
    Ok(SearchReport { found: None, tried: cfg.budget })
}

/// A line instance on which the MPD recurrence, the greedy search and the
/// brute-force optimum disagree.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MpdDiscrepancy {
    pub points: Vec<f64>,
    pub k: usize,
    pub dp_value: f64,
    pub search_value: f64,
    pub brute_value: f64,
}

/// Same search as [`find_line_counterexample`] with the MPD recurrence and
/// the greedy binary search in place of the naive Riesz DP.
pub fn find_line_mpd_discrepancy(cfg: &CounterexampleConfig) -> Result<SearchReport<MpdDiscrepancy>> {
    cfg.check()?;
    let mut rng = seeded(cfg.seed);
    let oracle = OracleConfig::default();
    for tried in 1..=cfg.budget {
        let (points, k) = cfg.draw(&mut rng);
        let inst = LineInstance::new(points.clone())?;
        let dp_value = line_mpd_dp(&inst, k)?.value;
        let search_value = line_mpd_search(&inst, k)?.value;
        let brute_value = brute_force_mpd(&MetricInstance::from_line(&points)?, k, &oracle)?.optimum;
        if dp_value != brute_value || search_value != brute_value {
            return Ok(SearchReport {
                found: Some(MpdDiscrepancy { points, k, dp_value, search_value, brute_value }),
                tried,
            });
        }
    }
    Ok(SearchReport { found: None, tried: cfg.budget })
}
