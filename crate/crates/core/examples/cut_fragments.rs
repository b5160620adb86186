//! Cuts the fattree into its pods and the spine, then shows that gluing the
//! fragments' own solutions back together solves the whole network.

use srpcut::cutting::{cut_n, validate_partition, cut};
use srpcut::interface_gen::complete_interface;
use srpcut::netgen::{fattree, fattree_assignment, CutKind};
use srpcut::policy::builtin::shortest_path;
use srpcut::policy::Policy;
use srpcut::solver::{solve, SolveConfig};
use srpcut::srp::{is_solution, Labeling, OpenSrp};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (topo, meta) = fattree(4, None)?;
    let srp = OpenSrp::closed(topo, Policy::closed(shortest_path(&meta.dest, 15, &[]))?);
    let pods = fattree_assignment(srp.topology(), &meta, CutKind::Pods);
    let iface = complete_interface(&srp, &pods.cut_set(&srp)?)?;
    let fragments = cut_n(&srp, &pods, &iface)?;

    let mut glued = Labeling::new();
    for (i, t) in fragments.iter().enumerate() {
        let inputs: Vec<String> = t.inputs().iter().map(ToString::to_string).collect();
        let outputs: Vec<String> = t.outh().iter().map(|(n, r)| format!("{n}={r}")).collect();
        println!("fragment {i}: {} nodes; inputs [{}]; outputs [{}]", t.nodes().len(), inputs.join(" "), outputs.join(" "));
        let lab = solve(t, &SolveConfig::default()).into_labeling().ok_or("fragment has no solution")?;
        for (n, r) in lab.iter().filter(|(n, _)| !t.is_input(n)) {
            glued.insert(n.clone(), r.clone());
        }
    }
    println!("glued labeling solves the network: {}", is_solution(&srp, &glued).is_solution());

    let (t1, t2) = cut(&srp, &iface)?;
    println!("first binary cut is a valid partition: {}", validate_partition(&srp, &t1, &t2).valid());
    Ok(())
}
