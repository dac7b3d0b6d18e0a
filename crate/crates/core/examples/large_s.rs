//! Past an instance-dependent exponent, every energy minimizer also
//! maximizes the minimum pairwise distance.
//!
//! Large exponents are only meaningful on a rescaled metric: with raw
//! distances above 1, `d^-s` underflows to zero for every pair and all
//! subsets tie. `verify_mpd_equivalence` scales so that `D* = 1` first.

use riesz_subset::reductions::{large_s_threshold, verify_mpd_equivalence};
use riesz_subset::random::{bounded_ratio_metric, seeded};
use riesz_subset::{mpd, Exponent, OracleConfig};

fn main() -> riesz_subset::Result<()> {
    let m = bounded_ratio_metric(&mut seeded(3), 8);
    let cfg = OracleConfig::default();
    let th = large_s_threshold(&m, 3, &cfg)?;
    println!("D* = {:.6}, R = {:?}, s0 = {:.4}", th.d_star, th.r, th.s0);

    for s in [0.5, 2.0, 20.0, th.s0 * (1.0 + 1e-6) + 1.0] {
        let eq = verify_mpd_equivalence(&m, 3, Exponent::new(s)?, th.d_star, &cfg)?;
        let w = &eq.minimizers[0];
        println!(
            "s = {s:>9.3}: minimizer {w} has min distance {:.6}, MPD-optimal {}",
            mpd(&m, w)?,
            eq.all_mpd_optimal
        );
    }
    Ok(())
}
