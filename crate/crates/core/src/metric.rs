//! Finite metric spaces, the Riesz s-energy and minimum-pairwise-distance
//! objectives, and metric axiom checks.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Relative tolerance used for every floating-point equality in the crate.
pub const REL_TOL: f64 = 1e-9;

/// `|a - b| <= rel * max(|a|, |b|)`, with exact equality for infinities.
pub fn approx_eq(a: f64, b: f64, rel: f64) -> bool {
    if a == b {
        return true;
    }
    (a - b).abs() <= rel * a.abs().max(b.abs())
}

/// Riesz exponent `s > 0`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Exponent(f64);

impl Exponent {
    pub fn new(s: f64) -> Result<Self> {
        if s.is_finite() && s > 0.0 {
            Ok(Exponent(s))
        } else {
            invalid(format!("exponent must be a positive finite real, got {s}"))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Exponent {
    type Error = Error;

    fn try_from(s: f64) -> Result<Self> {
        Exponent::new(s)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Strictly increasing list of point indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Subset(Vec<usize>);

impl Subset {
    /// Sorts the indices; duplicates are rejected.
    pub fn new(mut indices: Vec<usize>) -> Result<Self> {
        indices.sort_unstable();
        if let Some(w) = indices.windows(2).find(|w| w[0] == w[1]) {
            return invalid(format!("duplicate index {} in subset", w[0]));
        }
        Ok(Subset(indices))
    }

    /// Caller guarantees the indices are strictly increasing.
    pub(crate) fn from_sorted(indices: Vec<usize>) -> Self {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        Subset(indices)
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    fn check_range(&self, n: usize) -> Result<()> {
        match self.0.last() {
            Some(&index) if index >= n => Err(Error::IndexOutOfRange { index, len: n }),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (pos, i) in self.0.iter().enumerate() {
            if pos > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

/// A finite point set with an `n x n` distance matrix.
///
/// Construction only checks the shape and that every entry is finite; the
/// metric axioms are checked on demand by [`validate_metric`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMetric")]
pub struct MetricInstance {
    labels: Vec<String>,
    dist: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
struct RawMetric {
    labels: Option<Vec<String>>,
    dist: Vec<Vec<f64>>,
}

impl TryFrom<RawMetric> for MetricInstance {
    type Error = Error;

    fn try_from(raw: RawMetric) -> Result<Self> {
        let labels = raw
            .labels
            .unwrap_or_else(|| (0..raw.dist.len()).map(|i| i.to_string()).collect());
        MetricInstance::new(labels, raw.dist)
    }
}

impl MetricInstance {
    pub fn new(labels: Vec<String>, dist: Vec<Vec<f64>>) -> Result<Self> {
        check_square(&dist)?;
        if labels.len() != dist.len() {
            return invalid(format!(
                "{} labels for a {}x{} matrix",
                labels.len(),
                dist.len(),
                dist.len()
            ));
        }
        if let Some((i, j)) = find_entry(&dist, |d| !d.is_finite()) {
            return invalid(format!("non-finite distance at ({i}, {j})"));
        }
        Ok(MetricInstance { labels, dist })
    }

    /// Builds the matrix from a distance function evaluated on `i < j`; the
    /// diagonal is zero and the lower triangle mirrors the upper one.
    pub fn from_fn(labels: Vec<String>, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let n = labels.len();
        let mut dist = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let d = f(i, j);
                dist[i][j] = d;
                dist[j][i] = d;
            }
        }
        MetricInstance::new(labels, dist)
    }

    /// `|x - y|` on the real line, labels are the input positions' indices.
    pub fn from_line(xs: &[f64]) -> Result<Self> {
        MetricInstance::from_fn(index_labels(xs.len()), |i, j| (xs[i] - xs[j]).abs())
    }

    /// Euclidean distances between planar points.
    pub fn from_planar(points: &[[f64; 2]]) -> Result<Self> {
        MetricInstance::from_fn(index_labels(points.len()), |i, j| {
            euclidean(points[i], points[j])
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.dist
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i][j]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Resolves each token as a label first and as a numeric index second.
    pub fn subset_from_tokens<S: AsRef<str>>(&self, tokens: &[S]) -> Result<Subset> {
        let indices = tokens
            .iter()
            .map(|tok| {
                let tok = tok.as_ref().trim();
                if let Some(i) = self.index_of(tok) {
                    return Ok(i);
                }
                match tok.parse::<usize>() {
                    Ok(i) if i < self.len() => Ok(i),
                    Ok(i) => Err(Error::IndexOutOfRange { index: i, len: self.len() }),
                    Err(_) => invalid(format!("unknown point label {tok:?}")),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Subset::new(indices)
    }

    pub fn labels_of(&self, sub: &Subset) -> Vec<String> {
        sub.indices().iter().map(|&i| self.labels[i].clone()).collect()
    }

    /// Smallest off-diagonal distance, `None` for fewer than two points.
    pub fn min_distance(&self) -> Option<f64> {
        let n = self.len();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| self.dist[i][j])
            .reduce(f64::min)
    }

    /// Restricts the instance to the points of `sub`, in subset order.
    pub fn restrict(&self, sub: &Subset) -> Result<MetricInstance> {
        sub.check_range(self.len())?;
        let idx = sub.indices();
        let labels = idx.iter().map(|&i| self.labels[i].clone()).collect();
        let dist = idx
            .iter()
            .map(|&i| idx.iter().map(|&j| self.dist[i][j]).collect())
            .collect();
        Ok(MetricInstance { labels, dist })
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("metric JSON: {e}")))
    }

    /// CSV with a header row of labels followed by `n` rows of distances.
    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let labels: Vec<String> = reader
            .headers()
            .map_err(|e| Error::Parse(format!("metric CSV header: {e}")))?
            .iter()
            .map(str::to_owned)
            .collect();
        let mut dist = Vec::with_capacity(labels.len());
        for (row_no, record) in reader.records().enumerate() {
            let record = record.map_err(|e| Error::Parse(format!("metric CSV: {e}")))?;
            let row = record
                .iter()
                .map(|field| {
                    field.parse::<f64>().map_err(|_| {
                        Error::Parse(format!("metric CSV row {}: bad number {field:?}", row_no + 1))
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            dist.push(row);
        }
        MetricInstance::new(labels, dist)
    }

    pub fn to_csv_string(&self) -> String {
        let mut writer = csv::Writer::from_writer(Vec::new());
        // Writing into a Vec cannot fail.
        writer.write_record(&self.labels).expect("in-memory csv");
        for row in &self.dist {
            writer
                .write_record(row.iter().map(|d| d.to_string()))
                .expect("in-memory csv");
        }
        String::from_utf8(writer.into_inner().expect("in-memory csv")).expect("utf-8 csv")
    }
}

pub(crate) fn index_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

#[inline]
pub(crate) fn euclidean(p: [f64; 2], q: [f64; 2]) -> f64 {
    (p[0] - q[0]).hypot(p[1] - q[1])
}

fn check_square(dist: &[Vec<f64>]) -> Result<()> {
    let n = dist.len();
    match dist.iter().position(|row| row.len() != n) {
        Some(r) => invalid(format!(
            "distance matrix is not square: row {r} has {} entries, expected {n}",
            dist[r].len()
        )),
        None => Ok(()),
    }
}

fn find_entry(dist: &[Vec<f64>], pred: impl Fn(f64) -> bool) -> Option<(usize, usize)> {
    dist.iter().enumerate().find_map(|(i, row)| {
        row.iter().position(|&d| pred(d)).map(|j| (i, j))
    })
}

/// `sum over unordered pairs {u, v} of sub` of `d(u, v)^-s`; zero for `|sub| <= 1`.
pub fn riesz_energy(m: &MetricInstance, sub: &Subset, s: Exponent) -> Result<f64> {
    sub.check_range(m.len())?;
    let idx = sub.indices();
    let mut energy = 0.0;
    for (a, &i) in idx.iter().enumerate() {
        for &j in &idx[a + 1..] {
            energy += m.dist(i, j).powf(-s.get());
        }
    }
    Ok(energy)
}

/// Minimum pairwise distance; `+inf` for `|sub| <= 1`.
pub fn mpd(m: &MetricInstance, sub: &Subset) -> Result<f64> {
    sub.check_range(m.len())?;
    let idx = sub.indices();
    let mut best = f64::INFINITY;
    for (a, &i) in idx.iter().enumerate() {
        for &j in &idx[a + 1..] {
            best = best.min(m.dist(i, j));
        }
    }
    Ok(best)
}

/// Multiplies every distance by `lambda > 0`.
pub fn rescale(m: &MetricInstance, lambda: f64) -> Result<MetricInstance> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return invalid(format!("rescale factor must be positive and finite, got {lambda}"));
    }
    let dist = m
        .dist
        .iter()
        .map(|row| row.iter().map(|d| d * lambda).collect())
        .collect();
    Ok(MetricInstance { labels: m.labels.clone(), dist })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "axiom", rename_all = "snake_case")]
pub enum Violation {
    NonzeroDiagonal { i: usize },
    Asymmetric { i: usize, j: usize },
    NonPositive { i: usize, j: usize },
    /// `d(i, j) > d(i, via) + d(via, j)`.
    Triangle { i: usize, via: usize, j: usize },
}

impl Violation {
    pub fn witness(&self) -> Vec<usize> {
        match *self {
            Violation::NonzeroDiagonal { i } => vec![i],
            Violation::Asymmetric { i, j } | Violation::NonPositive { i, j } => vec![i, j],
            Violation::Triangle { i, via, j } => vec![i, via, j],
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidityReport {
    pub violations: Vec<Violation>,
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every metric axiom on a raw matrix. O(n^3).
pub fn validate_matrix(dist: &[Vec<f64>]) -> Result<ValidityReport> {
    check_square(dist)?;
    let n = dist.len();
    let mut violations = Vec::new();
    for i in 0..n {
        if dist[i][i] != 0.0 {
            violations.push(Violation::NonzeroDiagonal { i });
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if !approx_eq(dist[i][j], dist[j][i], REL_TOL) {
                violations.push(Violation::Asymmetric { i, j });
            }
            if !(dist[i][j] > 0.0 && dist[j][i] > 0.0) {
                violations.push(Violation::NonPositive { i, j });
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for via in 0..n {
                if via == i || via == j {
                    continue;
                }
                let detour = dist[i][via] + dist[via][j];
                if dist[i][j] > detour * (1.0 + REL_TOL) {
                    violations.push(Violation::Triangle { i, via, j });
                }
            }
        }
    }
    Ok(ValidityReport { violations })
}

pub fn validate_metric(m: &MetricInstance) -> Result<ValidityReport> {
    validate_matrix(&m.dist)
}
