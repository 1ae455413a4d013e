//! Voronoi cells of a Bernoulli subset of Z^2: the intensity identity
//! E[1/|cell|] = p and the cell-size histogram.

use irelab::voronoi::{bvt_cell_size_histogram, bvt_intensity_identity, sample_bvt_root_cell, BvtParams};
use irelab::{GroupSpec, SeedSpec};

fn main() -> irelab::Result<()> {
    let z2: GroupSpec = "z:2".parse()?;
    let params = BvtParams::new(z2, 0.3, 50)?;

    let cell = sample_bvt_root_cell(&params, SeedSpec::new(0, 0));
    let members: Vec<String> = cell.cell.members.iter().map(ToString::to_string).collect();
    println!("one cell: center {:?}, members {}", cell.center.map(|c| c.to_string()), members.join(" "));

    let r = bvt_intensity_identity(&params, 10_000, SeedSpec::new(1, 0))?;
    println!(
        "E[1/|cell|] = {:.4} +- {:.4} (p = {}), {:.2} SE",
        r.estimate.value, r.estimate.std_error, r.p, r.deviation_in_se
    );

    let h = bvt_cell_size_histogram(&params, 10_000, SeedSpec::new(2, 0));
    for (size, mass) in h.masses.iter().take(8) {
        println!("  |cell| = {size:>2}: {mass:.4}");
    }
    Ok(())
}
