//! Interfaces, cutting open SRPs into fragments, and partition validation.
//!
//! A cut splits the *input-free graph* of an SRP (its non-input nodes and the
//! edges among them) into two sides. Each cut edge `uv` carries an interface
//! annotation `I(uv)`: the route `u` is expected to have. The side containing
//! `u` guarantees that route at `u`; the other side assumes it by treating
//! `u` as an input.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::route::RouteValue;
use crate::srp::{OpenSrp, SrpError};
use crate::topology::{Edge, NodeId, Topology};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CutError {
    #[error("interface domain is not the cut-set of a 2-cut of the input-free graph: {0}")]
    NotACutSet(String),
    #[error("annotation on {0}, which is not an edge between the two sides of the cut")]
    AnnotationOffEdge(Edge),
    #[error("annotation on {0} does not conform to the route type")]
    NonConformingAnnotation(Edge),
    #[error("cut edge {0} has no annotation")]
    MissingAnnotation(Edge),
    #[error("non-input node {0} has no fragment")]
    NotTotalAssignment(NodeId),
    #[error("node {0} is unknown or is an input of the parent")]
    UnknownNode(NodeId),
    #[error("the cut edges leaving {0} carry different annotations")]
    ConflictingAnnotations(NodeId),
    #[error(transparent)]
    Srp(#[from] SrpError),
}

/// Annotations on a cut-set of directed edges.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Interface(BTreeMap<Edge, RouteValue>);

impl Interface {
    pub fn new() -> Self {
        Interface(BTreeMap::new())
    }

    pub fn insert(&mut self, e: Edge, r: RouteValue) -> Option<RouteValue> {
        self.0.insert(e, r)
    }

    pub fn get(&self, e: &Edge) -> Option<&RouteValue> {
        self.0.get(e)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Edge, &RouteValue)> {
        self.0.iter()
    }

    pub fn edges(&self) -> impl Iterator<Item = &Edge> {
        self.0.keys()
    }

    pub fn contains(&self, e: &Edge) -> bool {
        self.0.contains_key(e)
    }

    /// Annotated edges leaving `u`.
    pub fn out_of<'a>(&'a self, u: &'a NodeId) -> impl Iterator<Item = (&'a Edge, &'a RouteValue)> + 'a {
        self.0.iter().filter(move |(e, _)| &e.src == u)
    }

    /// The annotations restricted to `edges`.
    pub fn restricted<'a>(&self, edges: impl IntoIterator<Item = &'a Edge>) -> Interface {
        edges.into_iter().filter_map(|e| self.0.get(e).map(|r| (e.clone(), r.clone()))).collect()
    }
}

impl FromIterator<(Edge, RouteValue)> for Interface {
    fn from_iter<T: IntoIterator<Item = (Edge, RouteValue)>>(iter: T) -> Self {
        Interface(iter.into_iter().collect())
    }
}

/// Maps every non-input node of an SRP to a fragment index.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FragmentAssignment(BTreeMap<NodeId, usize>);

impl FragmentAssignment {
    pub fn new() -> Self {
        FragmentAssignment(BTreeMap::new())
    }

    pub fn insert(&mut self, v: NodeId, class: usize) -> Option<usize> {
        self.0.insert(v, class)
    }

    pub fn get(&self, v: &NodeId) -> Option<usize> {
        self.0.get(v).copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&NodeId, usize)> {
        self.0.iter().map(|(n, c)| (n, *c))
    }

    /// Distinct fragment indices in ascending order.
    pub fn classes(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self.0.values().copied().collect();
        set.into_iter().collect()
    }

    /// Every node in one fragment.
    pub fn identity(srp: &OpenSrp) -> Self {
        srp.nodes().iter().filter(|n| !srp.is_input(n)).map(|n| (n.clone(), 0)).collect()
    }

    /// Checks totality over the non-input nodes of `srp`.
    pub fn validate(&self, srp: &OpenSrp) -> Result<(), CutError> {
        if let Some(n) = self.0.keys().find(|n| !srp.topology().contains(n) || srp.is_input(n)) {
            return Err(CutError::UnknownNode(n.clone()));
        }
        match srp.nodes().iter().find(|n| !srp.is_input(n) && !self.0.contains_key(*n)) {
            Some(n) => Err(CutError::NotTotalAssignment(n.clone())),
            None => Ok(()),
        }
    }

    /// Edges of the input-free graph whose endpoints lie in different
    /// fragments, in canonical order.
    pub fn cut_set(&self, srp: &OpenSrp) -> Result<Vec<Edge>, CutError> {
        self.validate(srp)?;
        Ok(input_free_graph(srp).edges().filter(|e| self.0[&e.src] != self.0[&e.dst]).collect())
    }
}

impl FromIterator<(NodeId, usize)> for FragmentAssignment {
    fn from_iter<T: IntoIterator<Item = (NodeId, usize)>>(iter: T) -> Self {
        FragmentAssignment(iter.into_iter().collect())
    }
}

/// The subgraph induced on the non-input nodes.
pub fn input_free_graph(srp: &OpenSrp) -> Topology {
    srp.topology().filtered(|n| !srp.is_input(n), |_| true)
}

/// Edges of the input-free graph crossing between `w1` and the rest.
pub fn cut_set_between(srp: &OpenSrp, w1: &BTreeSet<NodeId>) -> Vec<Edge> {
    input_free_graph(srp).edges().filter(|e| w1.contains(&e.src) != w1.contains(&e.dst)).collect()
}

/// The route a node `u` guarantees according to its annotated out-edges in
/// `cut`; all of them, and any inherited guarantee, must agree.
fn guarantee_of(
    s: &OpenSrp,
    u: &NodeId,
    cut: &BTreeSet<Edge>,
    iface: &Interface,
) -> Result<Option<RouteValue>, CutError> {
    let mut found: Option<&RouteValue> = s.outh().get(u);
    for e in cut.iter().filter(|e| &e.src == u) {
        let r = iface.get(e).ok_or_else(|| CutError::MissingAnnotation(e.clone()))?;
        match found {
            Some(prev) if prev != r => return Err(CutError::ConflictingAnnotations(u.clone())),
            _ => found = Some(r),
        }
    }
    Ok(found.cloned())
}

/// Builds one side of a binary cut. Inherited inputs without out-edges
/// would otherwise belong to neither side; `keep_isolated` places them.
fn build_side(
    s: &OpenSrp,
    wi: &BTreeSet<NodeId>,
    cut: &BTreeSet<Edge>,
    iface: &Interface,
    keep_isolated: bool,
) -> Result<OpenSrp, CutError> {
    let topo = s.topology();
    let mut inh = BTreeMap::new();
    for (u, r) in s.inh() {
        let outs = topo.out_neighbors(u);
        if outs.iter().any(|v| wi.contains(v)) || (keep_isolated && outs.is_empty()) {
            inh.insert(u.clone(), r.clone());
        }
    }
    for e in cut.iter().filter(|e| wi.contains(&e.dst)) {
        if let Some(r) = guarantee_of(s, &e.src, cut, iface)? {
            inh.insert(e.src.clone(), r);
        }
    }
    let mut outh = BTreeMap::new();
    for u in wi {
        if let Some(r) = guarantee_of(s, u, cut, iface)? {
            if s.is_output(u) || cut.iter().any(|e| &e.src == u) {
                outh.insert(u.clone(), r);
            }
        }
    }
    let sub = topo.filtered(|n| wi.contains(n) || inh.contains_key(n), |e| !inh.contains_key(&e.dst));
    let init = sub.nodes().iter().map(|n| s.init(n).expect("fragment node belongs to the parent").clone()).collect();
    Ok(OpenSrp::from_parts(sub, s.policy().clone(), init, inh, outh)?)
}

/// Cuts `srp` into two fragments along the input-free graph sides `w1` and
/// its complement. `iface` must annotate exactly the crossing edges.
pub fn cut_with_sides(srp: &OpenSrp, w1: &BTreeSet<NodeId>, iface: &Interface) -> Result<(OpenSrp, OpenSrp), CutError> {
    let free = input_free_graph(srp);
    if let Some(n) = w1.iter().find(|n| !free.contains(n)) {
        return Err(CutError::UnknownNode(n.clone()));
    }
    let w2: BTreeSet<NodeId> = free.nodes().iter().filter(|n| !w1.contains(*n)).cloned().collect();
    let cut: BTreeSet<Edge> = cut_set_between(srp, w1).into_iter().collect();
    for (e, r) in iface.iter() {
        if !cut.contains(e) {
            return Err(CutError::AnnotationOffEdge(e.clone()));
        }
        if !srp.route_type().conforms(r) {
            return Err(CutError::NonConformingAnnotation(e.clone()));
        }
    }
    if let Some(e) = cut.iter().find(|e| !iface.contains(e)) {
        return Err(CutError::MissingAnnotation(e.clone()));
    }
    let t1 = build_side(srp, w1, &cut, iface, true)?;
    let t2 = build_side(srp, &w2, &cut, iface, false)?;
    Ok((t1, t2))
}

/// Cuts `srp` along `dom(iface)`, recovering the two sides from the
/// interface. The side holding the first node (in canonical order) of the
/// input-free graph is returned first.
pub fn cut(srp: &OpenSrp, iface: &Interface) -> Result<(OpenSrp, OpenSrp), CutError> {
    let free = input_free_graph(srp);
    for (e, r) in iface.iter() {
        if !free.has_edge(e) {
            return Err(CutError::AnnotationOffEdge(e.clone()));
        }
        if !srp.route_type().conforms(r) {
            return Err(CutError::NonConformingAnnotation(e.clone()));
        }
    }
    let remaining = free.filtered(|_| true, |e| !iface.contains(e));
    let comps = remaining.weak_components();
    let comp_of: BTreeMap<&NodeId, usize> =
        comps.iter().enumerate().flat_map(|(i, c)| c.iter().map(move |n| (n, i))).collect();
    let mut adj = vec![BTreeSet::new(); comps.len()];
    for e in iface.edges() {
        let (a, b) = (comp_of[&e.src], comp_of[&e.dst]);
        if a == b {
            return Err(CutError::NotACutSet(format!("{e} lies inside one side")));
        }
        adj[a].insert(b);
        adj[b].insert(a);
    }
    let mut colour: Vec<Option<bool>> = vec![None; comps.len()];
    for start in 0..comps.len() {
        if colour[start].is_some() {
            continue;
        }
        colour[start] = Some(false);
        let mut stack = vec![start];
        while let Some(c) = stack.pop() {
            let here = colour[c].expect("coloured before push");
            for &d in &adj[c] {
                match colour[d] {
                    None => {
                        colour[d] = Some(!here);
                        stack.push(d);
                    }
                    Some(x) if x == here => {
                        return Err(CutError::NotACutSet("annotated edges do not bisect the graph".into()));
                    }
                    Some(_) => {}
                }
            }
        }
    }
    let w1: BTreeSet<NodeId> =
        comps.iter().zip(&colour).filter(|(_, c)| **c == Some(false)).flat_map(|(c, _)| c.iter().cloned()).collect();
    if w1.len() == free.len() {
        return Err(CutError::NotACutSet("the interface leaves one side empty".into()));
    }
    cut_with_sides(srp, &w1, iface)
}

/// One binary step of an N-way cut.
#[derive(Debug, Clone)]
pub struct CutStep {
    pub parent: OpenSrp,
    pub first: OpenSrp,
    pub rest: OpenSrp,
}

/// Cuts `srp` into one fragment per assignment class, in ascending class
/// order, by repeatedly separating the next class from the remainder.
/// Returns the fragments and the binary steps that produced them.
pub fn cut_n_traced(
    srp: &OpenSrp,
    assignment: &FragmentAssignment,
    iface: &Interface,
) -> Result<(Vec<OpenSrp>, Vec<CutStep>), CutError> {
    let crossing: BTreeSet<Edge> = assignment.cut_set(srp)?.into_iter().collect();
    if let Some(e) = crossing.iter().find(|e| !iface.contains(e)) {
        return Err(CutError::MissingAnnotation(e.clone()));
    }
    if let Some(e) = iface.edges().find(|e| !crossing.contains(e)) {
        return Err(CutError::AnnotationOffEdge(e.clone()));
    }
    let classes = assignment.classes();
    let mut fragments = Vec::with_capacity(classes.len());
    let mut steps = Vec::new();
    let mut rest = srp.clone();
    for &class in classes.iter().take(classes.len().saturating_sub(1)) {
        let w1: BTreeSet<NodeId> =
            input_free_graph(&rest).nodes().iter().filter(|n| assignment.get(n) == Some(class)).cloned().collect();
        let step_iface = iface.restricted(&cut_set_between(&rest, &w1));
        let (first, remainder) = cut_with_sides(&rest, &w1, &step_iface)?;
        steps.push(CutStep { parent: rest, first: first.clone(), rest: remainder.clone() });
        fragments.push(first);
        rest = remainder;
    }
    fragments.push(rest);
    Ok((fragments, steps))
}

pub fn cut_n(srp: &OpenSrp, assignment: &FragmentAssignment, iface: &Interface) -> Result<Vec<OpenSrp>, CutError> {
    cut_n_traced(srp, assignment, iface).map(|(f, _)| f)
}

/// A violated partition constraint with the nodes or edges witnessing it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionViolation {
    pub constraint: String,
    pub witness: Vec<String>,
}

impl fmt::Display for PartitionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.constraint, self.witness.join(", "))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PartitionReport {
    pub violations: Vec<PartitionViolation>,
}

impl PartitionReport {
    pub fn valid(&self) -> bool {
        self.violations.is_empty()
    }

    /// Whether some violation has exactly this constraint name.
    pub fn has(&self, constraint: &str) -> bool {
        self.violations.iter().any(|v| v.constraint == constraint)
    }

    fn push(&mut self, constraint: impl Into<String>, witness: impl IntoIterator<Item = impl ToString>) {
        let witness: Vec<String> = witness.into_iter().map(|w| w.to_string()).collect();
        if !witness.is_empty() {
            self.violations.push(PartitionViolation { constraint: constraint.into(), witness });
        }
    }
}

fn node_set(t: &OpenSrp) -> BTreeSet<NodeId> {
    t.nodes().iter().cloned().collect()
}

fn edge_set(t: &OpenSrp) -> BTreeSet<Edge> {
    t.topology().edges().collect()
}

/// Checks that `t` is a fragment of `s`. Violation names are prefixed with
/// `label`.
///
/// Inputs of a fragment are the inherited inputs it contains plus nodes
/// whose out-edges into the fragment stand in for the outside network; every
/// non-input node keeps all of its in-edges. Outputs are the inherited
/// outputs that are not inputs plus every non-input node that lost an
/// out-edge.
pub fn check_fragment(s: &OpenSrp, t: &OpenSrp, label: &str) -> PartitionReport {
    let mut rep = PartitionReport::default();
    let name = |c: &str| format!("{label} fragment {c}");
    let sv = node_set(s);
    let tv = node_set(t);
    rep.push(name("V"), tv.difference(&sv));
    if !tv.is_subset(&sv) {
        return rep;
    }
    let se = edge_set(s);
    let expected_e: BTreeSet<Edge> =
        se.iter().filter(|e| tv.contains(&e.src) && tv.contains(&e.dst) && !t.is_input(&e.dst)).cloned().collect();
    let te = edge_set(t);
    rep.push(name("E"), te.symmetric_difference(&expected_e));
    if t.policy() != s.policy() {
        rep.push(name("policy"), ["route type or functions differ"]);
    }
    rep.push(name("init"), tv.iter().filter(|v| t.init(v) != s.init(v)));
    let topo = s.topology();
    let mut bad_inputs: Vec<&NodeId> = tv.iter().filter(|v| s.is_input(v) && !t.is_input(v)).collect();
    bad_inputs.extend(t.inh().keys().filter(|u| {
        !s.is_input(u) && !topo.out_neighbors(u).iter().any(|v| tv.contains(v) && !t.is_input(v))
    }));
    bad_inputs.extend(tv.iter().filter(|v| !t.is_input(v) && topo.in_neighbors(v).iter().any(|u| !tv.contains(u))));
    rep.push(name("inputs"), bad_inputs);
    let expected_out: BTreeSet<NodeId> = tv
        .iter()
        .filter(|u| !t.is_input(u))
        .filter(|u| s.is_output(u) || topo.out_neighbors(u).iter().any(|v| !te.contains(&Edge::new((*u).clone(), v.clone()))))
        .cloned()
        .collect();
    rep.push(name("outputs"), t.outputs().symmetric_difference(&expected_out));
    rep.push(name("inh"), t.inh().iter().filter(|(u, r)| s.inh().get(*u).is_some_and(|x| x != *r)).map(|(u, _)| u));
    rep.push(name("outh"), t.outh().iter().filter(|(u, r)| s.outh().get(*u).is_some_and(|x| x != *r)).map(|(u, _)| u));
    rep
}

/// Checks every clause of the partition relation between `s`, `t1` and `t2`.
pub fn validate_partition(s: &OpenSrp, t1: &OpenSrp, t2: &OpenSrp) -> PartitionReport {
    let mut rep = check_fragment(s, t1, "T1");
    rep.violations.extend(check_fragment(s, t2, "T2").violations);
    let (v1, v2, sv) = (node_set(t1), node_set(t2), node_set(s));
    let union: BTreeSet<NodeId> = v1.union(&v2).cloned().collect();
    rep.push("V coverage", union.symmetric_difference(&sv));
    let (e1, e2, se) = (edge_set(t1), edge_set(t2), edge_set(s));
    let eunion: BTreeSet<Edge> = e1.union(&e2).cloned().collect();
    rep.push("E coverage", eunion.symmetric_difference(&se));
    let s_in = s.inputs();
    let s_out = s.outputs();
    for (a, b) in [(t1, t2), (t2, t1)] {
        rep.push("input-output subset", a.inputs().difference(&s_in).filter(|u| !b.is_output(u)));
        rep.push("input-output subset", a.outputs().difference(&s_out).filter(|u| !b.is_input(u)));
        rep.push(
            "input-output equality",
            a.inputs().difference(&s_in).filter(|u| a.inh().get(*u) != b.outh().get(*u)),
        );
    }
    let shared: BTreeSet<NodeId> = v1.intersection(&v2).cloned().collect();
    let (i1, i2) = (t1.inputs(), t2.inputs());
    let both: BTreeSet<NodeId> = i1.intersection(&i2).cloned().collect();
    let either: BTreeSet<NodeId> = i1.union(&i2).filter(|u| !s_in.contains(*u)).cloned().collect();
    let expected: BTreeSet<NodeId> = both.union(&either).cloned().collect();
    rep.push("shared input", shared.symmetric_difference(&expected));
    rep
}

/// `u` is shared as an input of one fragment and an output of the other,
/// with equal assumption and guarantee.
pub fn is_input_output_node(u: &NodeId, t1: &OpenSrp, t2: &OpenSrp) -> bool {
    let eq = |a: &OpenSrp, b: &OpenSrp| match (a.inh().get(u), b.outh().get(u)) {
        (Some(x), Some(y)) => x == y,
        _ => false,
    };
    eq(t1, t2) || eq(t2, t1)
}

/// Every node in both fragments is an input or output of each.
pub fn shared_nodes_are_boundary(t1: &OpenSrp, t2: &OpenSrp) -> bool {
    node_set(t1).intersection(&node_set(t2)).all(|u| {
        (t1.is_input(u) || t1.is_output(u)) && (t2.is_input(u) || t2.is_output(u))
    })
}

/// Inputs shared by both fragments are inputs of the parent.
pub fn shared_inputs_inherited(s: &OpenSrp, t1: &OpenSrp, t2: &OpenSrp) -> bool {
    t1.inputs().intersection(&t2.inputs()).all(|u| s.is_input(u))
}
