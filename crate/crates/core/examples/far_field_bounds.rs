//! Near-field gap and far-field budget, checked on hexagonal packings.

use riesz_subset::bounds::{
    linear_beats_naive_from, measure_budget, overlap_gap, pointwise_budget, zeta_minus_one,
};

fn main() -> riesz_subset::Result<()> {
    for s in [1.0, 2.0, 3.0, 4.0] {
        let (forbidden, admissible) = overlap_gap(1.0, s)?;
        println!("s = {s}: close pair >= {forbidden:.6}, far pair <= {admissible:.6}");
    }
    println!("zeta(2) = {:.12}, pi^2/6 = {:.12}", zeta_minus_one(3.0)?, std::f64::consts::PI.powi(2) / 6.0);
    println!("linear budget beats C(k,2) from k = {}", linear_beats_naive_from(3.0)?);

    let bound = pointwise_budget(0.5, 3.0)?;
    println!("\nr = 1/2, s = 3, pointwise budget {bound:.6}");
    for layers in 1..=10 {
        let rep = measure_budget(0.5, 3.0, layers)?;
        let mark = if rep.slack >= 0.0 { "ok" } else { "EXCEEDED" };
        println!("  layers {layers:>2}: centre sum {:.6}  slack {:+.6}  {mark}", rep.measured, rep.slack);
    }
    Ok(())
}
