//! Exhaustive ground truth on a random planar metric, single and
//! multi-threaded, for both objectives.

use riesz_subset::oracle::binomial;
use riesz_subset::random::{euclidean_metric, seeded};
use riesz_subset::{brute_force_mpd, brute_force_riesz, Exponent, OracleConfig};

fn main() -> riesz_subset::Result<()> {
    let m = euclidean_metric(&mut seeded(11), 14);
    let k = 5;
    println!("n = {}, k = {k}: {} subsets", m.len(), binomial(m.len(), k));

    for threads in [1, 4] {
        let cfg = OracleConfig { threads, ..OracleConfig::default() };
        let e = brute_force_riesz(&m, k, Exponent::new(2.0)?, &cfg)?;
        println!("threads {threads}: min E_2 = {:.9} at {}", e.optimum, e.witnesses[0]);
    }
    let d = brute_force_mpd(&m, k, &OracleConfig::default())?;
    println!("max-min distance {:.6} at {}", d.optimum, d.witnesses[0]);

    let tight = OracleConfig { cap: 1000, ..OracleConfig::default() };
    match brute_force_riesz(&m, k, Exponent::new(1.0)?, &tight) {
        Err(e) => println!("with cap 1000: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
