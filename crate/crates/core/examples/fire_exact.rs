//! Exact law of the tiling class of the identity for A = {0, 1} in Z,
//! compared with Monte Carlo.

use irelab::fire::{compare_with_oracle, CellSet};
use irelab::{GroupSpec, SeedSpec};

fn main() -> irelab::Result<()> {
    let z: GroupSpec = "z:1".parse()?;
    for delta in [0.2, 0.5] {
        let cs = CellSet::from_spec(z, "explicit:0,1", delta)?;
        let c = compare_with_oracle(&cs, 50_000, SeedSpec::new(3, 0))?;
        for (k, p) in &c.exact.law {
            println!("delta {delta}: in class {:<5} size {}  P = {p:.6}", k.in_pi_class, k.cell_size);
        }
        println!(
            "  P[in class] exact {:.6}, MC {:.6} ({:+.2} SE)",
            c.prob_exact, c.prob_estimate.value, c.prob_deviation_se
        );
    }
    Ok(())
}
