//! Writes the k = 4 fattree scenarios as JSON spec files.
//!
//! ```text
//! cargo run --example export_specs -- data
//! ```

use std::collections::BTreeMap;
use std::path::PathBuf;

use srpcut::cutting::{FragmentAssignment, Interface};
use srpcut::interface_gen::complete_interface;
use srpcut::netgen::{fattree, fattree_assignment, CutKind};
use srpcut::policy::builtin::{shortest_path, sp_route};
use srpcut::policy::Policy;
use srpcut::specfile::{AnnotationDecl, NetworkSpecFile, PolicyDecl, PropertyDecl};
use srpcut::srp::OpenSrp;
use srpcut::topology::{Edge, NodeId, Topology};

fn base(name: &str, topo: &Topology, policy: PolicyDecl, property: PropertyDecl) -> NetworkSpecFile {
    NetworkSpecFile {
        name: Some(name.into()),
        nodes: topo.nodes().iter().map(ToString::to_string).collect(),
        edges: topo.edges().map(|e| (e.src.to_string(), e.dst.to_string())).collect(),
        undirected: false,
        policy,
        symbolics: Vec::new(),
        partition: None,
        interface: None,
        property: Some(property),
        inputs: BTreeMap::new(),
        outputs: BTreeMap::new(),
    }
}

fn sp_decl(dest: &NodeId, drop: &[&str]) -> PolicyDecl {
    PolicyDecl::Builtin {
        builtin: "SP".into(),
        dest: dest.to_string(),
        max_hops: Some(15),
        drop: drop.iter().map(|d| d.to_string()).collect(),
        tiers: None,
    }
}

fn hops(h: i64) -> PropertyDecl {
    PropertyDecl::Builtin { builtin: "max_hops".into(), hops: Some(h), except: None, nodes: None }
}

fn partition(a: &FragmentAssignment) -> BTreeMap<String, usize> {
    a.iter().map(|(n, c)| (n.to_string(), c)).collect()
}

fn annotations(iface: &Interface) -> Vec<AnnotationDecl> {
    iface
        .iter()
        .map(|(e, r)| AnnotationDecl { edge: (e.src.to_string(), e.dst.to_string()), value: r.to_sexpr().to_string() })
        .collect()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "data".into()));
    std::fs::create_dir_all(&dir)?;
    let (topo, meta) = fattree(4, None)?;
    let pods = fattree_assignment(&topo, &meta, CutKind::Pods);

    let srp = OpenSrp::closed(topo.clone(), Policy::closed(shortest_path(&meta.dest, 15, &[]))?);
    let good = complete_interface(&srp, &pods.cut_set(&srp)?)?;

    let mut sp = base("fat20", &topo, sp_decl(&meta.dest, &[]), hops(4));
    sp.partition = Some(partition(&pods));
    sp.interface = Some(annotations(&good));
    std::fs::write(dir.join("fat20_pods.json"), sp.to_json() + "\n")?;

    // a6 drops everything; the interface still claims cores are 2 hops out.
    let dropped = OpenSrp::closed(topo.clone(), Policy::closed(shortest_path(&meta.dest, 15, &[NodeId::new("a6")]))?);
    let mut hole = complete_interface(&dropped, &pods.cut_set(&dropped)?)?;
    let from_cores: Vec<Edge> = hole.edges().filter(|e| e.src.as_str().starts_with('c')).cloned().collect();
    for e in from_cores {
        hole.insert(e, sp_route(2));
    }
    let mut bh = base("fat20-blackhole", &topo, sp_decl(&meta.dest, &["a6"]), hops(4));
    bh.partition = Some(partition(&pods));
    bh.interface = Some(annotations(&hole));
    std::fs::write(dir.join("fat20_blackhole.json"), bh.to_json() + "\n")?;

    let mut wrong = good.clone();
    for c in ["c0", "c1"] {
        wrong.insert(Edge::new("a0", c), sp_route(1));
    }
    let mut bad = base("fat20-bad", &topo, sp_decl(&meta.dest, &[]), hops(4));
    bad.partition = Some(partition(&pods));
    bad.interface = Some(annotations(&wrong));
    std::fs::write(dir.join("fat20_bad_annotation.json"), bad.to_json() + "\n")?;

    let maint_policy = PolicyDecl::Builtin {
        builtin: "MAINT".into(),
        dest: meta.dest.to_string(),
        max_hops: Some(15),
        drop: Vec::new(),
        tiers: None,
    };
    let except = PropertyDecl::Builtin { builtin: "max_hops".into(), hops: Some(6), except: Some("down".into()), nodes: None };
    let mut maint = base("fat20-maint", &topo, maint_policy, except);
    maint.partition = Some(partition(&pods));
    std::fs::write(dir.join("fat20_maint.json"), maint.to_json() + "\n")?;

    println!("wrote 4 spec files to {}", dir.display());
    Ok(())
}
