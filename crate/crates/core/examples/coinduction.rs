//! Lifts a tiling of Z to Z^2 by running independent copies on the cosets
//! of the first coordinate axis.

use irelab::fire::{CellSet, FireSampler};
use irelab::sampling::{coinduce, coset_partition, CoordinateSubgroup};
use irelab::{GroupSpec, SeedSpec};

fn main() -> irelab::Result<()> {
    let axis = CoordinateSubgroup::new(2, 1)?;
    let base = FireSampler::new(&CellSet::from_spec(axis.subgroup(), "ball:2", 0.3)?)?;
    let z2: GroupSpec = axis.ambient();
    let window = z2.ball(&z2.identity(), 3)?;
    println!("window of {} elements meets {} cosets", window.len(), coset_partition(&axis, &window).len());

    for i in 0..5 {
        let cell = coinduce(&axis, &base, &window, SeedSpec::new(4, i))?;
        let members: Vec<String> = cell.members.iter().map(ToString::to_string).collect();
        println!("sample {i}: class of the identity {{{}}}", members.join(", "));
    }
    Ok(())
}
