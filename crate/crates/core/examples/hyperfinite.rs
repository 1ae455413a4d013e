//! Exact and greedy edge deletion into small components, with certificates.

use irelab::graph::{generators, hyperfinite_exact, hyperfinite_greedy, verify_certificate, Budget, DEFAULT_NODE_BUDGET};

fn main() -> irelab::Result<()> {
    let graphs = [
        ("cycle-12", generators::cycle(12)),
        ("hypercube-3", generators::hypercube(3)),
        ("random-regular-16", generators::random_regular(16, 3, 7)?),
    ];
    for (name, g) in &graphs {
        for k in [2, 4] {
            let exact = hyperfinite_exact(g, 0.5, k, Budget(DEFAULT_NODE_BUDGET))?;
            let greedy = hyperfinite_greedy(g, 0.5, k)?;
            verify_certificate(g, &exact).map_err(irelab::Error::Invalid)?;
            verify_certificate(g, &greedy).map_err(irelab::Error::Invalid)?;
            println!(
                "{name:<18} k = {k}: optimal cut {:>2}, greedy cut {:>2}, (0.5, {k})-hyperfinite: {}",
                exact.cut_size, greedy.cut_size, exact.verdict
            );
        }
    }

    // The certificate round-trips through the text graph format.
    let g = irelab::graph::FiniteGraph::parse("# a square\n0 1\n1 2\n2 3\n3 0\n")?;
    println!("{}", serde_json::to_string(&hyperfinite_exact(&g, 0.5, 2, Budget(1_000))?).unwrap());
    Ok(())
}
