//! The left-to-right recurrence that is exact for max-min dispersion is not
//! exact for energy. Search small random instances for a witness.

use riesz_subset::oracle::{find_line_counterexample, CounterexampleConfig};

fn main() -> riesz_subset::Result<()> {
    let report = find_line_counterexample(&CounterexampleConfig::default())?;
    match report.found {
        Some(c) => {
            println!("after {} instances, k = {}:", report.tried, c.k);
            println!("  points  {:?}", c.points);
            println!("  naive   {} energy {:.9}", c.naive_subset, c.naive_energy);
            println!("  optimal {} energy {:.9}", c.optimal_subset, c.optimal_energy);
        }
        None => println!("none found in {} instances", report.tried),
    }
    Ok(())
}
