//! Near-field gap and far-field budget for configurations of non-overlapping
//! equal discs, with a hexagonal packing to test them against.

use serde::Serialize;

use crate::error::{invalid, Error, Result};

fn check_radius(r: f64) -> Result<()> {
    if !(r.is_finite() && r > 0.0) {
        return invalid(format!("radius must be positive, got {r}"));
    }
    Ok(())
}

fn check_budget_exponent(s: f64) -> Result<()> {
    if s.is_nan() || s <= 2.0 {
        return Err(Error::Divergent(s));
    }
    if s.is_infinite() {
        return invalid("s must be finite");
    }
    Ok(())
}

/// `((1.5 r)^-s, (2 r)^-s)`: the least contribution of a pair of centres
/// closer than `1.5 r`, and the most of a pair at least `2 r` apart.
pub fn overlap_gap(r: f64, s: f64) -> Result<(f64, f64)> {
    check_radius(r)?;
    if !(s.is_finite() && s > 0.0) {
        return invalid(format!("s must be positive, got {s}"));
    }
    Ok(((1.5 * r).powf(-s), (2.0 * r).powf(-s)))
}

const ZETA_TERMS: u32 = 64;

/// `zeta(s - 1)` for `s > 2`.
///
/// Partial sum to `N - 1`, then the Euler-Maclaurin tail
/// `N^(1-a)/(a-1) + N^-a/2 + sum_j B_2j/(2j)! a(a+1)..(a+2j-2) N^(-a-2j+1)`
/// with three correction terms. With `N = 64` the truncation error is below
/// `1e-15` for every `a > 1`.
pub fn zeta_minus_one(s: f64) -> Result<f64> {
    check_budget_exponent(s)?;
    let a = s - 1.0;
    let n = f64::from(ZETA_TERMS);
    // Small terms first.
    let partial: f64 = (1..ZETA_TERMS).rev().map(|i| f64::from(i).powf(-a)).sum();
    let mut tail = n.powf(1.0 - a) / (a - 1.0) + 0.5 * n.powf(-a);
    // B2/2! = 1/12, B4/4! = -1/720, B6/6! = 1/30240.
    let coeffs = [1.0 / 12.0, -1.0 / 720.0, 1.0 / 30240.0];
    let mut rising = a;
    for (j, c) in coeffs.iter().enumerate() {
        let order = 2 * j as i32 + 1;
        tail += c * rising * n.powf(-a - f64::from(order));
        rising *= (a + f64::from(order)) * (a + f64::from(order + 1));
    }
    Ok(partial + tail)
}

/// Upper bound `6 (2r)^-s zeta(s - 1)` on the interaction of one disc with
/// every other disc of a non-overlapping configuration.
pub fn pointwise_budget(r: f64, s: f64) -> Result<f64> {
    check_radius(r)?;
    Ok(6.0 * (2.0 * r).powf(-s) * zeta_minus_one(s)?)
}

/// `k/2` times the pointwise budget: a bound on the whole energy of `k`
/// non-overlapping discs.
pub fn linear_budget(r: f64, s: f64, k: usize) -> Result<f64> {
    if k < 2 {
        return invalid(format!("k must be at least 2, got {k}"));
    }
    Ok(0.5 * k as f64 * pointwise_budget(r, s)?)
}

/// `C(k,2) (2r)^-s`, the bound from counting every pair at the minimum spacing.
pub fn naive_quadratic_budget(r: f64, s: f64, k: usize) -> Result<f64> {
    check_radius(r)?;
    let pairs = (k * k.saturating_sub(1) / 2) as f64;
    Ok(pairs * (2.0 * r).powf(-s))
}

/// Smallest `k` from which the linear budget is strictly below the naive one.
/// The condition `3 k zeta(s-1) < k (k-1) / 2` does not depend on `r`.
pub fn linear_beats_naive_from(s: f64) -> Result<usize> {
    let z = zeta_minus_one(s)?;
    Ok((1.0 + 6.0 * z).floor() as usize + 1)
}

/// Centres of a hexagonal packing of discs of radius `r`: the origin plus
/// `layers` rings, `1 + 3 L (L + 1)` points in all. Neighbouring centres are
/// exactly `2r` apart.
pub fn generate_hex_packing(r: f64, layers: usize) -> Result<Vec<[f64; 2]>> {
    Ok(hex_lattice(r, layers)?
        .into_iter()
        .map(|(a, b)| lattice_point(r, a, b))
        .collect())
}

fn hex_lattice(r: f64, layers: usize) -> Result<Vec<(i64, i64)>> {
    check_radius(r)?;
    if layers == 0 {
        return invalid("layers must be at least 1");
    }
    let l = layers as i64;
    let mut cells = Vec::with_capacity(1 + 3 * layers * (layers + 1));
    for a in -l..=l {
        for b in -l..=l {
            if (a + b).abs() <= l {
                cells.push((a, b));
            }
        }
    }
    // Ring by ring, so prefixes are smaller packings.
    cells.sort_by_key(|&(a, b)| (a.abs().max(b.abs()).max((a + b).abs()), a, b));
    Ok(cells)
}

fn lattice_point(r: f64, a: i64, b: i64) -> [f64; 2] {
    let (a, b) = (a as f64, b as f64);
    [2.0 * r * (a + 0.5 * b), 2.0 * r * (b * 3f64.sqrt() / 2.0)]
}

/// Distance between lattice cells from the integer norm `a^2 + ab + b^2`,
/// avoiding the rounding in the Cartesian coordinates.
fn lattice_distance(r: f64, p: (i64, i64), q: (i64, i64)) -> f64 {
    let (a, b) = (p.0 - q.0, p.1 - q.1);
    2.0 * r * ((a * a + a * b + b * b) as f64).sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BudgetReport {
    pub r: f64,
    pub s: f64,
    pub layers: usize,
    /// Largest per-centre sum `sum_{q != p} |p - q|^-s` over the packing.
    pub measured: f64,
    pub bound: f64,
    pub slack: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PackingEnergy {
    pub points: usize,
    pub total: f64,
    pub linear_bound: f64,
}

/// Per-centre sums for every point of the packing, in ring order.
fn per_point_sums(r: f64, s: f64, layers: usize) -> Result<Vec<f64>> {
    let cells = hex_lattice(r, layers)?;
    Ok(cells
        .iter()
        .map(|&p| {
            cells
                .iter()
                .filter(|&&q| q != p)
                .map(|&q| lattice_distance(r, p, q).powf(-s))
                .sum()
        })
        .collect())
}

/// Measures the packing without judging it.
pub fn measure_budget(r: f64, s: f64, layers: usize) -> Result<BudgetReport> {
    let bound = pointwise_budget(r, s)?;
    let measured = per_point_sums(r, s, layers)?
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(BudgetReport { r, s, layers, measured, bound, slack: bound - measured })
}

/// [`measure_budget`], failing with [`Error::BudgetViolated`] when the
/// largest per-centre sum exceeds the pointwise budget.
pub fn verify_budget(r: f64, s: f64, layers: usize) -> Result<BudgetReport> {
    let report = measure_budget(r, s, layers)?;
    if report.measured > report.bound {
        return Err(Error::BudgetViolated {
            measured: report.measured,
            bound: report.bound,
            report,
        });
    }
    Ok(report)
}

/// Total pair energy of the packing against [`linear_budget`].
pub fn packing_energy(r: f64, s: f64, layers: usize) -> Result<PackingEnergy> {
    let sums = per_point_sums(r, s, layers)?;
    let total = 0.5 * sums.iter().sum::<f64>();
    Ok(PackingEnergy { points: sums.len(), total, linear_bound: linear_budget(r, s, sums.len())? })
}
