//! Reading matrices, checking the axioms and recovering a tree from an
//! ultrametric matrix.

use riesz_subset::metric::validate_metric;
use riesz_subset::ultrametric::{build_tree_from_matrix, ultrametric_violation};
use riesz_subset::MetricInstance;

fn main() -> riesz_subset::Result<()> {
    let broken = MetricInstance::from_json_str(r#"{"dist": [[0, 1, 5], [1, 0, 1], [5, 1, 0]]}"#)?;
    for v in validate_metric(&broken)?.violations {
        println!("violation: {v:?}");
    }

    let csv = "a,b,c,d\n0,2,6,6\n2,0,6,6\n6,6,0,4\n6,6,4,0\n";
    let m = MetricInstance::from_csv_str(csv)?;
    println!("ultrametric: {}", ultrametric_violation(&m, 1e-9).is_none());
    let t = build_tree_from_matrix(&m)?;
    println!("{}", serde_json::to_string(&t.to_json()).expect("serializable"));
    Ok(())
}
