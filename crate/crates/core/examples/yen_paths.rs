//! Shortest and second-shortest loopless paths from every fattree node to
//! the destination.

use srpcut::interface_gen::yen_two_shortest;
use srpcut::netgen::fattree;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (topo, meta) = fattree(4, None)?;
    for (node, two) in yen_two_shortest(&topo, &meta.dest) {
        let show = |p: &Option<srpcut::interface_gen::HopPath>| match p {
            Some(p) => format!("{} hops via {}", p.hops, p.path.iter().map(ToString::to_string).collect::<Vec<_>>().join(">")),
            None => "none".to_string(),
        };
        println!("{node:>3}: best {}; second {}", show(&two.best), show(&two.second));
    }
    Ok(())
}
