//! Estimates the three tiling lower bounds on the ball of radius 2 in F_2.

use irelab::fire::{self, CellSet};
use irelab::{GroupSpec, SeedSpec};

fn main() -> irelab::Result<()> {
    let f2: GroupSpec = "f:2".parse()?;
    let cell_set = CellSet::from_spec(f2, "ball:2", 0.1)?;
    println!("|A| = {}, window |A^-1 A A^-1| = {}", cell_set.len(), fire::determinacy_window(&cell_set).len());

    let reports = fire::verify_lemma_bounds(&cell_set, 100_000, SeedSpec::new(1, 0))?;
    for r in &reports {
        let est = r.estimate.as_ref().map_or(f64::NAN, |e| e.value);
        println!(
            "{:<60} bound {:>8.4}  estimate {:>8.4}  99% lower {:>8.4}  {:?}",
            r.quantity,
            r.bound,
            est,
            r.lower99.unwrap_or(f64::NAN),
            r.status
        );
    }
    Ok(())
}
