//! Simulates shortest-path routing on the 20-node fattree and prints every
//! node's route to the destination `e7`.

use srpcut::netgen::fattree;
use srpcut::policy::builtin::shortest_path;
use srpcut::policy::Policy;
use srpcut::solver::{solve, SolveConfig};
use srpcut::srp::{is_solution, OpenSrp};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (topo, meta) = fattree(4, None)?;
    let srp = OpenSrp::closed(topo, Policy::closed(shortest_path(&meta.dest, 15, &[]))?);
    let outcome = solve(&srp, &SolveConfig::traced());
    let lab = outcome.labeling().ok_or("no fixed point")?;
    print!("{}", lab.table(srp.nodes()));
    println!("{} label changes; solution: {}", outcome.trace().len(), is_solution(&srp, lab).is_solution());
    Ok(())
}
