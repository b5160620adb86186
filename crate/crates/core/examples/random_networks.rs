//! Seeded Erdős–Rényi graphs at the benchmark scales n = 2^x, p = 2^(2-x).

use srpcut::netgen::{erdos_renyi, random_scale};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for x in 4..=6 {
        let (n, p) = random_scale(x);
        let g = erdos_renyi(n, p, 7)?;
        let again = erdos_renyi(n, p, 7)?;
        println!("x={x}: n={n} p={p} directed edges={} reproducible={}", g.edge_count(), g == again);
    }
    Ok(())
}
