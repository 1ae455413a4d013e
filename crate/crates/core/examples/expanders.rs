//! Small-set expansion of a random 3-regular graph and the check that
//! deleting a few vertices cannot make it hyperfinite.

use irelab::graph::{expansion_profile, generators, robustness_check, robustness_threshold, Budget, DEFAULT_SET_BUDGET};

fn main() -> irelab::Result<()> {
    let g = generators::random_regular(14, 3, 1)?;
    let n = 4;
    let profile = expansion_profile(&g, n, Budget(DEFAULT_SET_BUDGET))?;
    for m in &profile.minima {
        println!("|A| = {}: min |dA| = {} ({:.3}), witness {:?}", m.size, m.boundary, m.ratio, m.witness);
    }
    let kappa = profile.kappa.expect("nonempty graph");
    let threshold = robustness_threshold(kappa, g.max_degree());
    println!("kappa = {kappa:.3}, epsilon must stay below {threshold:.4}");

    let report = robustness_check(&g, kappa, n, 0.9 * threshold, 0)?;
    println!(
        "{} subsets of size >= {} checked ({:?}), counterexamples: {}",
        report.subsets_checked,
        report.min_subset_size,
        report.mode,
        report.counterexamples.len()
    );
    Ok(())
}
