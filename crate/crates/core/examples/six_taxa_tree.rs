//! Six taxa, two cherries: the tree program picks one leaf from each cherry
//! plus one singleton, and the DP table shows why.

use riesz_subset::ultrametric::{cross_term_check, parse_tree, solve_ultrametric, tree_to_metric};
use riesz_subset::{riesz_energy, Exponent};

const TREE: &str = "((a:3.5,b:3.5):2,(c:4,d:4):1.5,e:5.5,f:5.5);";

fn main() -> riesz_subset::Result<()> {
    let tree = parse_tree(TREE)?;
    let s = Exponent::new(1.0)?;
    let sol = solve_ultrametric(&tree, 3, s)?;
    println!("best 3-subset {:?} with energy {:.6} (3/11 = {:.6})", sol.labels, sol.energy, 3.0 / 11.0);

    let m = tree_to_metric(&tree);
    let cherry = m.subset_from_tokens(&["a", "b", "e"])?;
    println!("{{a, b, e}} costs {:.6} (25/77 = {:.6})", riesz_energy(&m, &cherry, s)?, 25.0 / 77.0);

    println!("\nroot row of the table:");
    let root = sol.tree.root();
    for t in 0..=3 {
        println!("  F_root({t}) = {:.6}", sol.table.value(root, t));
    }

    // Parts taken from the two cherries meet only at the root.
    let left = m.subset_from_tokens(&["a"])?;
    let right = m.subset_from_tokens(&["c", "d"])?;
    let ct = cross_term_check(&tree, &left, &right, s)?;
    println!("\ncross term: direct {:.6}, recurrence {:.6}", ct.direct, ct.recurrence);
    Ok(())
}
