//! k-clique to energy: edges become distance 2, non-edges distance 1, and a
//! k-subset meets the threshold exactly when it is a clique.

use riesz_subset::reductions::{clique_to_rssp, verify_clique, Graph};
use riesz_subset::{Exponent, OracleConfig};

fn main() -> riesz_subset::Result<()> {
    // Five-cycle plus one chord: one triangle, no 4-clique.
    let g = Graph::new(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2)])?;
    for k in [3, 4] {
        let out = clique_to_rssp(&g, k, Exponent::new(2.0)?)?;
        let v = verify_clique(&g, &out, &OracleConfig::default())?;
        println!(
            "k = {k}: T = {}, min energy = {}, clique {:?}, decision {}, equivalent {}",
            v.threshold, v.min_energy, v.clique, v.decision, v.equivalent
        );
    }
    Ok(())
}
