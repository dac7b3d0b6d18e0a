//! Hardness reductions into the Riesz subset-selection decision problem, and
//! the exponent above which energy minimizers are max-min dispersion optimal.
//!
//! Each constructor has an exhaustive checker next to it so small instances
//! can be verified end to end.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::metric::{euclidean, index_labels, rescale, Exponent, MetricInstance, Subset};
use crate::oracle::{binomial, brute_force_riesz, for_each_subset, OracleConfig};

/// Simple undirected graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

#[derive(Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl Graph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u == v {
                return invalid(format!("self-loop at vertex {u}"));
            }
            if u >= n || v >= n {
                return Err(Error::IndexOutOfRange { index: u.max(v), len: n });
            }
            set.insert((u.min(v), u.max(v)));
        }
        Ok(Graph { n, edges: set })
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let json: GraphJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("graph JSON: {e}")))?;
        Graph::new(json.n, json.edges.into_iter().map(|[u, v]| (u, v)))
    }

    /// One `u v` pair per line; `#` starts a comment. The vertex count is one
    /// more than the largest index unless a `# n = N` line says otherwise.
    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut edges = Vec::new();
        let mut declared = None;
        for (line_no, line) in text.lines().enumerate() {
            let line = line.trim();
            if let Some(comment) = line.strip_prefix('#') {
                let compact: String = comment.chars().filter(|c| !c.is_whitespace()).collect();
                if let Some(n) = compact.strip_prefix("n=") {
                    declared = Some(n.parse::<usize>().map_err(|_| {
                        Error::Parse(format!("edge list line {}: bad vertex count", line_no + 1))
                    })?);
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            let parse = |tok: &str| {
                tok.parse::<usize>()
                    .map_err(|_| Error::Parse(format!("edge list line {}: bad vertex {tok:?}", line_no + 1)))
            };
            match parts.as_slice() {
                [u, v] => edges.push((parse(u)?, parse(v)?)),
                _ => {
                    return Err(Error::Parse(format!(
                        "edge list line {}: expected two vertices",
                        line_no + 1
                    )))
                }
            }
        }
        let inferred = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
        Graph::new(declared.unwrap_or(inferred), edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    /// First `k`-clique in lexicographic order, by exhaustive search.
    pub fn find_clique(&self, k: usize) -> Option<Vec<usize>> {
        fn grow(g: &Graph, k: usize, chosen: &mut Vec<usize>, from: usize) -> bool {
            if chosen.len() == k {
                return true;
            }
            for v in from..g.n {
                if chosen.iter().all(|&u| g.has_edge(u, v)) {
                    chosen.push(v);
                    if grow(g, k, chosen, v + 1) {
                        return true;
                    }
                    chosen.pop();
                }
            }
            false
        }
        let mut chosen = Vec::with_capacity(k);
        grow(self, k, &mut chosen, 0).then_some(chosen)
    }
}

/// Planar point set with a separation threshold and a target size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PlanarJson")]
pub struct PlanarInstance {
    pub points: Vec<[f64; 2]>,
    pub delta: f64,
    pub k: usize,
}

#[derive(Deserialize)]
struct PlanarJson {
    points: Vec<[f64; 2]>,
    delta: f64,
    k: usize,
}

impl TryFrom<PlanarJson> for PlanarInstance {
    type Error = Error;

    fn try_from(raw: PlanarJson) -> Result<Self> {
        PlanarInstance::new(raw.points, raw.delta, raw.k)
    }
}

impl PlanarInstance {
    pub fn new(points: Vec<[f64; 2]>, delta: f64, k: usize) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0) {
            return invalid(format!("delta must be positive, got {delta}"));
        }
        if points.iter().flatten().any(|c| !c.is_finite()) {
            return invalid("non-finite coordinate");
        }
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                if points[i] == points[j] {
                    return invalid(format!("points {i} and {j} coincide"));
                }
            }
        }
        Ok(PlanarInstance { points, delta, k })
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("planar JSON: {e}")))
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        euclidean(self.points[i], self.points[j])
    }

    pub fn to_metric(&self) -> MetricInstance {
        MetricInstance::from_planar(&self.points).expect("finite coordinates")
    }

    /// Every selected pair at distance `>= delta`.
    pub fn is_independent(&self, sub: &[usize]) -> bool {
        sub.iter()
            .enumerate()
            .all(|(a, &i)| sub[a + 1..].iter().all(|&j| self.distance(i, j) >= self.delta))
    }
}

/// Closest admissible (`>= delta`) and farthest forbidden (`< delta`) pairs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GapQuantities {
    pub d_min: f64,
    pub delta_max: f64,
    pub d_min_pair: (usize, usize),
    pub delta_max_pair: (usize, usize),
}

/// `(delta_max(S), D_min(S))` restricted to the pairs of `sub`, with `-inf` and
/// `+inf` standing in for an empty class.
pub fn subset_gap(p: &PlanarInstance, sub: &[usize]) -> (f64, f64) {
    let mut delta_max = f64::NEG_INFINITY;
    let mut d_min = f64::INFINITY;
    for (a, &i) in sub.iter().enumerate() {
        for &j in &sub[a + 1..] {
            let d = p.distance(i, j);
            if d >= p.delta {
                d_min = d_min.min(d);
            } else {
                delta_max = delta_max.max(d);
            }
        }
    }
    (delta_max, d_min)
}

pub fn gap_quantities(p: &PlanarInstance) -> Result<GapQuantities> {
    let n = p.len();
    let mut admissible: Option<(f64, (usize, usize))> = None;
    let mut forbidden: Option<(f64, (usize, usize))> = None;
    for i in 0..n {
        for j in i + 1..n {
            let d = p.distance(i, j);
            if d >= p.delta {
                if admissible.is_none_or(|(best, _)| d < best) {
                    admissible = Some((d, (i, j)));
                }
            } else if forbidden.is_none_or(|(best, _)| d > best) {
                forbidden = Some((d, (i, j)));
            }
        }
    }
    match (admissible, forbidden) {
        (Some((d_min, d_min_pair)), Some((delta_max, delta_max_pair))) => {
            debug_assert!(delta_max < p.delta && p.delta <= d_min);
            Ok(GapQuantities { d_min, delta_max, d_min_pair, delta_max_pair })
        }
        (None, _) => Err(Error::TrivialInstance {
            reason: "no pair is at distance >= delta".into(),
            answer: None,
        }),
        (_, None) => Err(Error::TrivialInstance {
            reason: "no pair is at distance < delta".into(),
            answer: None,
        }),
    }
}

/// Threshold `log(c) / (log(b) - log(a))`: every `u` above it satisfies
/// `c * b^-u < a^-u`.
pub fn choose_exponent(c: f64, a: f64, b: f64) -> Result<f64> {
    if !(c > 0.0 && a > 0.0 && b > 0.0) || !(c.is_finite() && b.is_finite()) {
        return invalid("c, a and b must be positive and finite");
    }
    if a >= b {
        return invalid(format!("need a < b, got a = {a}, b = {b}"));
    }
    Ok(c.ln() / (b.ln() - a.ln()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    /// Non-edges at distance 1, edges at distance 2.
    Clique { near: f64, far: f64 },
    Gis {
        gap: GapQuantities,
        /// Value that the chosen exponent must strictly exceed.
        exponent_bound: f64,
        /// `T * D_min^s`, i.e. the threshold in units where `D_min = 1`.
        normalized_threshold: f64,
        /// `C(k,2) D_min^-s < delta_max^-s`, checked in log space.
        separated: bool,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub enum ReducedInstance {
    Metric(MetricInstance),
    Planar(PlanarInstance),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReductionOutput {
    pub instance: ReducedInstance,
    pub k: usize,
    pub s: f64,
    /// Decision threshold `T`: a `k`-subset is a yes-certificate iff `E_s <= T`.
    pub threshold: f64,
    pub provenance: Provenance,
}

/// Distances 2 on edges and 1 on non-edges, threshold `C(k,2) 2^-s`.
pub fn clique_to_rssp(g: &Graph, k: usize, s: Exponent) -> Result<ReductionOutput> {
    let n = g.vertex_count();
    if k < 2 || k > n {
        return invalid(format!("k must lie in 2..={n}, got {k}"));
    }
    let metric = MetricInstance::from_fn(index_labels(n), |u, v| if g.has_edge(u, v) { 2.0 } else { 1.0 })?;
    let pairs = binomial(k, 2) as f64;
    Ok(ReductionOutput {
        instance: ReducedInstance::Metric(metric),
        k,
        s: s.get(),
        threshold: pairs * 2f64.powf(-s.get()),
        provenance: Provenance::Clique { near: 1.0, far: 2.0 },
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CliqueVerification {
    pub threshold: f64,
    pub min_energy: f64,
    pub minimizer: Subset,
    pub clique: Option<Vec<usize>>,
    /// `min_energy <= T` (relative slack 1e-12 for summation order).
    pub decision: bool,
    pub equivalent: bool,
}

pub fn verify_clique(g: &Graph, out: &ReductionOutput, cfg: &OracleConfig) -> Result<CliqueVerification> {
    let ReducedInstance::Metric(m) = &out.instance else {
        return invalid("clique verification needs a metric reduction");
    };
    let best = brute_force_riesz(m, out.k, Exponent::new(out.s)?, cfg)?;
    let decision = best.optimum <= out.threshold * (1.0 + 1e-12);
    let clique = g.find_clique(out.k);
    Ok(CliqueVerification {
        threshold: out.threshold,
        min_energy: best.optimum,
        minimizer: best.witnesses[0].clone(),
        equivalent: decision == clique.is_some(),
        clique,
        decision,
    })
}

/// Integer exponent `s = 1 + ceil(log C(k,2) / log(D_min / delta_max))` and
/// threshold `T = C(k,2) D_min^-s`. Trivial instances come back as
/// [`Error::TrivialInstance`] carrying the direct answer.
pub fn gis_to_rssp(p: &PlanarInstance) -> Result<ReductionOutput> {
    let k = p.k;
    if k < 2 {
        return invalid(format!("k must be at least 2, got {k}"));
    }
    let gap = match gap_quantities(p) {
        Ok(gap) => gap,
        Err(Error::TrivialInstance { reason, .. }) => {
            let all_far = (0..p.len()).all(|i| (i + 1..p.len()).all(|j| p.distance(i, j) >= p.delta));
            // With no forbidden pair every k-subset is independent; with no
            // admissible pair no subset of two or more points is.
            let answer = if all_far { k <= p.len() } else { false };
            return Err(Error::TrivialInstance { reason, answer: Some(answer) });
        }
        Err(e) => return Err(e),
    };
    let pairs = binomial(k, 2) as f64;
    let exponent_bound = choose_exponent(pairs, gap.delta_max, gap.d_min)?;
    let ratio = (gap.d_min / gap.delta_max).ln();
    let s = 1.0 + (pairs.ln() / ratio).ceil();
    let separated = pairs.ln() < s * ratio;
    Ok(ReductionOutput {
        instance: ReducedInstance::Planar(p.clone()),
        k,
        s,
        threshold: pairs * gap.d_min.powf(-s),
        provenance: Provenance::Gis { gap, exponent_bound, normalized_threshold: pairs, separated },
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GisVerification {
    pub independent_exists: bool,
    pub below_threshold_exists: bool,
    pub equivalent: bool,
    /// Largest energy over independent `k`-subsets, in units where `D_min = 1`.
    pub max_independent_energy: Option<f64>,
    /// Smallest energy over non-independent `k`-subsets, same units.
    pub min_dependent_energy: Option<f64>,
    /// Every independent subset is at or below `T` and every other one above it.
    pub separated: bool,
    pub enumerated: u64,
}

/// Exhaustive check of both decisions. Energies are evaluated after scaling
/// the plane so that `D_min = 1`, which keeps large integer exponents finite.
pub fn verify_gis(out: &ReductionOutput, cfg: &OracleConfig) -> Result<GisVerification> {
    let (ReducedInstance::Planar(p), Provenance::Gis { gap, normalized_threshold, .. }) =
        (&out.instance, &out.provenance)
    else {
        return invalid("GIS verification needs a planar reduction");
    };
    let count = binomial(p.len(), out.k);
    if count > cfg.cap {
        return Err(Error::CapExceeded { count, cap: cfg.cap });
    }
    let m = rescale(&p.to_metric(), 1.0 / gap.d_min)?;
    let weights: Vec<Vec<f64>> = m
        .matrix()
        .iter()
        .map(|row| row.iter().map(|d| d.powf(-out.s)).collect())
        .collect();
    let t = *normalized_threshold;
    let mut max_ind: Option<f64> = None;
    let mut min_dep: Option<f64> = None;
    let mut enumerated = 0u64;
    for_each_subset(p.len(), out.k, |sub| {
        enumerated += 1;
        let mut energy = 0.0;
        for (a, &i) in sub.iter().enumerate() {
            for &j in &sub[a + 1..] {
                energy += weights[i][j];
            }
        }
        if p.is_independent(sub) {
            max_ind = Some(max_ind.map_or(energy, |e| e.max(energy)));
        } else {
            min_dep = Some(min_dep.map_or(energy, |e| e.min(energy)));
        }
    });
    let independent_exists = max_ind.is_some();
    let below_threshold_exists =
        max_ind.is_some_and(|e| e <= t) || min_dep.is_some_and(|e| e <= t);
    Ok(GisVerification {
        independent_exists,
        below_threshold_exists,
        equivalent: independent_exists == below_threshold_exists,
        max_independent_energy: max_ind,
        min_dependent_energy: min_dep,
        separated: max_ind.is_none_or(|e| e <= t) && min_dep.is_none_or(|e| e > t),
        enumerated,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LargeSThreshold {
    /// For every `s > s0`, each energy minimizer is MPD-optimal.
    pub s0: f64,
    /// Best minimum pairwise distance over all `k`-subsets.
    pub d_star: f64,
    /// Best minimum pairwise distance among the subsets that miss `d_star`.
    pub r: Option<f64>,
    /// Every `k`-subset attains `d_star`; `s0` is then 0.
    pub all_optimal: bool,
}

/// Instance-level exponent threshold from `R^-s > C(k,2) (D*)^-s`, computed by
/// enumerating every `k`-subset.
pub fn large_s_threshold(m: &MetricInstance, k: usize, cfg: &OracleConfig) -> Result<LargeSThreshold> {
    let n = m.len();
    if k < 2 || k > n {
        return invalid(format!("k must lie in 2..={n}, got {k}"));
    }
    let count = binomial(n, k);
    if count > cfg.cap {
        return Err(Error::CapExceeded { count, cap: cfg.cap });
    }
    let mut values = Vec::with_capacity(count as usize);
    for_each_subset(n, k, |sub| {
        let mut mm = f64::INFINITY;
        for (a, &i) in sub.iter().enumerate() {
            for &j in &sub[a + 1..] {
                mm = mm.min(m.dist(i, j));
            }
        }
        values.push(mm);
    });
    let d_star = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let r = values
        .iter()
        .copied()
        .filter(|&v| v < d_star)
        .reduce(f64::max);
    match r {
        None => Ok(LargeSThreshold { s0: 0.0, d_star, r: None, all_optimal: true }),
        Some(r) => Ok(LargeSThreshold {
            s0: choose_exponent(binomial(k, 2) as f64, r, d_star)?,
            d_star,
            r: Some(r),
            all_optimal: false,
        }),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MpdEquivalence {
    pub s: f64,
    pub d_star: f64,
    pub minimizers: Vec<Subset>,
    /// Every energy minimizer has minimum pairwise distance `d_star`.
    pub all_mpd_optimal: bool,
}

/// Brute-forces the `E_s` minimizers (on the metric scaled so `D* = 1`) and
/// checks that each one is MPD-optimal.
pub fn verify_mpd_equivalence(m: &MetricInstance, k: usize, s: Exponent, d_star: f64, cfg: &OracleConfig) -> Result<MpdEquivalence> {
    let scaled = rescale(m, 1.0 / d_star)?;
    let best = brute_force_riesz(&scaled, k, s, cfg)?;
    let all_mpd_optimal = best
        .witnesses
        .iter()
        .all(|w| crate::metric::mpd(m, w).map(|v| v == d_star).unwrap_or(false));
    Ok(MpdEquivalence { s: s.get(), d_star, minimizers: best.witnesses, all_mpd_optimal })
}
