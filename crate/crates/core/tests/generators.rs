//! Topology generators and file ingestion.

use srpcut::netgen::{erdos_renyi, fattree, fattree_assignment, parse_edge_list, random_scale, CutKind};
use srpcut::policy::Tier;

#[test]
fn fattree_sizes() {
    for (k, nodes) in [(4, 20), (6, 45), (8, 80), (20, 500)] {
        let (topo, meta) = fattree(k, None).unwrap();
        assert_eq!(topo.len(), nodes, "k = {k}");
        // Every aggregation node has k/2 core and k/2 edge links, both ways.
        assert_eq!(topo.edge_count(), 2 * (k * k / 2) * k);
        assert_eq!(meta.cores().count(), k * k / 4);
    }
}

#[test]
fn destination_defaults_to_the_last_edge_node() {
    let (_, meta) = fattree(4, None).unwrap();
    assert_eq!(meta.dest.as_str(), "e7");
    assert_eq!(meta.tiers[&meta.dest], Tier::Edge);
    assert!(fattree(4, Some("c0")).is_err());
}

#[test]
fn pods_cut_has_one_fragment_per_pod_plus_the_spine() {
    for k in [4, 6, 8] {
        let (topo, meta) = fattree(k, None).unwrap();
        assert_eq!(fattree_assignment(&topo, &meta, CutKind::Pods).classes().len(), k + 1);
        assert_eq!(fattree_assignment(&topo, &meta, CutKind::Full).classes().len(), topo.len());
        assert_eq!(fattree_assignment(&topo, &meta, CutKind::Monolithic).classes().len(), 1);
    }
}

#[test]
fn random_scales() {
    let table: Vec<(usize, f64)> = (4..=6).map(random_scale).collect();
    assert_eq!(table, vec![(16, 0.25), (32, 0.125), (64, 0.0625)]);
}

#[test]
fn erdos_renyi_is_deterministic_per_seed() {
    for x in 4..=6 {
        let (n, p) = random_scale(x);
        let a = erdos_renyi(n, p, 11).unwrap();
        assert_eq!(a, erdos_renyi(n, p, 11).unwrap());
        assert_eq!(a.len(), n);
        assert_ne!(a, erdos_renyi(n, p, 12).unwrap());
    }
    assert!(erdos_renyi(8, 1.5, 0).is_err());
}

#[test]
fn edge_lists_mix_links_and_directed_edges() {
    let topo = parse_edge_list("# backbone\nA B\nB -> C  # one way\n").unwrap();
    assert_eq!(topo.len(), 3);
    assert_eq!(topo.edge_count(), 3);
    assert!(parse_edge_list("A\n").is_err());
}
