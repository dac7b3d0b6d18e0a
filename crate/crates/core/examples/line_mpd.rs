//! Max-min dispersion on the line by the recurrence and by binary search.

use riesz_subset::line_mpd::{greedy_feasible, line_mpd_dp, line_mpd_search, LineInstance};
use riesz_subset::random::{line_points, seeded};

fn main() -> riesz_subset::Result<()> {
    let inst = LineInstance::new(vec![0.0, 1.0, 3.0, 6.0])?;
    let dp = line_mpd_dp(&inst, 3)?;
    println!("{{0, 1, 3, 6}}, k = 3: value {} at {}", dp.value, dp.subset);
    for tau in [2.0, 3.0, 3.5] {
        let g = greedy_feasible(&inst, 3, tau)?;
        println!("  greedy at tau = {tau}: feasible {} picks {}", g.feasible, g.selected);
    }

    let xs = line_points(&mut seeded(5), 2000, None);
    let big = LineInstance::new(xs)?;
    let a = line_mpd_dp(&big, 12)?;
    let b = line_mpd_search(&big, 12)?;
    println!("2000 random points, k = 12: dp {:.9}, search {:.9}", a.value, b.value);
    assert_eq!(a.value, b.value);
    Ok(())
}
