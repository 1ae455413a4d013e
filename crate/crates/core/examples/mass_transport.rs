//! Checks that mass sent equals mass received for a few invariant
//! transport functions on Z^2.

use irelab::local::{mtp_check, BernoulliProcess, BvtProcess, NearPoint, VoronoiShare};
use irelab::voronoi::BvtParams;
use irelab::{GroupSpec, IntensitySpec, SeedSpec};

fn main() -> irelab::Result<()> {
    let z2: GroupSpec = "z:2".parse()?;
    let bern = BernoulliProcess {
        group: z2,
        intensity: IntensitySpec::new(0.3)?,
        window_radius: 6,
    };
    let near = mtp_check(&bern, &NearPoint { radius: 2 }, 3, 10_000, SeedSpec::new(0, 0))?;
    println!(
        "Bernoulli, near point: out {:.4}, in {:.4}, agree: {}",
        near.outgoing.value, near.incoming.value, near.agree_within_4se
    );

    let bvt = BvtProcess(BvtParams::new(z2, 0.5, 50)?);
    let share = mtp_check(&bvt, &VoronoiShare, 8, 3_000, SeedSpec::new(1, 0))?;
    println!(
        "Voronoi share: out {:.4}, in {:.4}, agree: {}",
        share.outgoing.value, share.incoming.value, share.agree_within_4se
    );
    Ok(())
}
