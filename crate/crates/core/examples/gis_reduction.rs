//! Geometric independent set to energy with an integer exponent large enough
//! that one close pair outweighs every far pair together.

use riesz_subset::reductions::{gap_quantities, gis_to_rssp, verify_gis, PlanarInstance, Provenance};
use riesz_subset::OracleConfig;

fn main() -> riesz_subset::Result<()> {
    let points = (0..9).map(|c| [f64::from(c % 3), f64::from(c / 3)]).collect();
    let p = PlanarInstance::new(points, 1.5, 4)?;
    let gap = gap_quantities(&p)?;
    println!("delta_max = {:.6}, D_min = {:.6}", gap.delta_max, gap.d_min);

    let out = gis_to_rssp(&p)?;
    if let Provenance::Gis { exponent_bound, separated, .. } = &out.provenance {
        println!("s = {} (must exceed {exponent_bound:.4}), T = {:.6e}, separated {separated}", out.s, out.threshold);
    }
    let v = verify_gis(&out, &OracleConfig::default())?;
    println!(
        "independent 4-set exists {}, energy <= T exists {}, worst independent {:?}, best dependent {:?}",
        v.independent_exists, v.below_threshold_exists, v.max_independent_energy, v.min_dependent_energy
    );
    Ok(())
}
