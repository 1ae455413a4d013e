//! Balls and word distances in Z^2 and the free group F_2.

use irelab::GroupSpec;

fn main() -> irelab::Result<()> {
    for spec in ["z:2", "f:2"] {
        let g: GroupSpec = spec.parse()?;
        let sizes: Vec<usize> = (0..=4)
            .map(|r| g.ball(&g.identity(), r).map(|b| b.len()))
            .collect::<Result<_, _>>()?;
        println!("{spec}: ball sizes for r = 0..4: {sizes:?}");
    }

    let f2: GroupSpec = "f:2".parse()?;
    let x = f2.parse_element("abA")?;
    let y = f2.parse_element("b")?;
    println!("|x| = {}, d(x, y) = {}", f2.word_distance(&f2.identity(), &x)?, f2.word_distance(&x, &y)?);
    Ok(())
}
