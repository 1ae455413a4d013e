//! Rooted-neighborhood laws of Voronoi cells on Z^2 and their total
//! variation distances as the intensity moves toward a reference.

use irelab::local::{collect_distribution, tv_distance};
use irelab::voronoi::{BvtParams, BvtSampler};
use irelab::{GroupSpec, SeedSpec};

fn main() -> irelab::Result<()> {
    let z2: GroupSpec = "z:2".parse()?;
    let law = |p: f64, seed: u64| -> irelab::Result<_> {
        let s = BvtSampler(BvtParams::new(z2, p, 50)?);
        Ok(collect_distribution(&s, 1, 20_000, SeedSpec::new(seed, 0))?)
    };
    let reference = law(0.3, 1)?;
    println!("reference p = 0.3: {} neighborhood types", reference.counts.len());
    for p in [0.6, 0.45, 0.35, 0.3] {
        let d = law(p, 2)?;
        println!("p = {p}: TV to reference {:.4}", tv_distance(&reference, &d)?);
    }
    Ok(())
}
