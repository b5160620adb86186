//! JSON network spec files.
//!
//! ```json
//! {
//!   "name": "fat20",
//!   "nodes": ["c0", "a0", "e0"],
//!   "edges": [["c0", "a0"], ["a0", "e0"]],
//!   "undirected": true,
//!   "policy": {"builtin": "SP", "dest": "e0", "max_hops": 15, "drop": []},
//!   "partition": {"c0": 0, "a0": 1, "e0": 1},
//!   "interface": [{"edge": ["c0", "a0"], "value": "(some 2)"}],
//!   "property": {"builtin": "max_hops", "hops": 4}
//! }
//! ```
//!
//! A policy is either a builtin (`SP`, `FAT`, `MAINT`) or inline
//! expressions with a `route_type`. Route values are written as
//! s-expressions: `(some 2)`, `(none)`, `(some (tuple 1 Up))`. Fragments
//! written by `cut` also carry `inputs` and `outputs` (the assumed and
//! guaranteed routes).

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cutting::{FragmentAssignment, Interface};
use crate::policy::builtin::{max_hops_except_property, max_hops_property, reachable_property};
use crate::policy::{
    builtin_policy, parse_expr, print_expr, BuiltinParams, PolicyError, PolicySpec, PropertySpec, Symbolic, Tier,
    Type, Value,
};
use crate::route::{RouteType, RouteValue};
use crate::srp::{validate_open_srp, OpenSrp, OpenSrpData, SrpError, SrpTemplate};
use crate::topology::{Edge, NodeId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("cannot read {path}: {reason}")]
    Io { path: String, reason: String },
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Srp(#[from] SrpError),
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error("bad {what}: {reason}")]
    BadValue { what: String, reason: String },
    #[error("{what} refers to unknown node `{node}`")]
    UnknownNode { what: String, node: String },
    #[error("interface annotates {0}, which is not an edge")]
    UnknownEdge(Edge),
    #[error("the network has symbolic parameters; use a universal check")]
    Symbolic,
}

impl From<crate::policy::SyntaxError> for SpecError {
    fn from(e: crate::policy::SyntaxError) -> Self {
        SpecError::Policy(e.into())
    }
}

/// The policy section: a builtin or inline expressions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PolicyDecl {
    Builtin {
        builtin: String,
        dest: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        max_hops: Option<i64>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        drop: Vec<String>,
        /// Required by `FAT`; inferred from `c`/`a`/`e` name prefixes when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tiers: Option<BTreeMap<String, Tier>>,
    },
    Inline {
        route_type: String,
        merge: String,
        trans: String,
        init: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolicDecl {
    pub name: String,
    /// `node` or a route type.
    #[serde(rename = "type")]
    pub ty: String,
    pub domain: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationDecl {
    pub edge: (String, String),
    pub value: String,
}

/// The property section: a builtin or an inline predicate over `node` and
/// `r`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PropertyDecl {
    Builtin {
        builtin: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        hops: Option<i64>,
        /// For `max_hops`: a node-valued symbolic exempt from the bound.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        except: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        nodes: Option<Vec<String>>,
    },
    Predicate {
        predicate: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        nodes: Option<Vec<String>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSpecFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub nodes: Vec<String>,
    pub edges: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub undirected: bool,
    pub policy: PolicyDecl,
    /// Symbolic parameters; for builtins these override the default
    /// domains of same-named symbolics.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub symbolics: Vec<SymbolicDecl>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<BTreeMap<String, usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interface: Option<Vec<AnnotationDecl>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub property: Option<PropertyDecl>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub inputs: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub outputs: BTreeMap<String, String>,
}

/// A validated spec file.
#[derive(Debug, Clone)]
pub struct LoadedSpec {
    pub name: String,
    pub template: SrpTemplate,
    pub partition: Option<FragmentAssignment>,
    pub interface: Option<Interface>,
    pub property: Option<PropertySpec>,
    pub file: NetworkSpecFile,
}

impl LoadedSpec {
    /// The concrete SRP; fails if the policy has symbolics.
    pub fn instance(&self) -> Result<OpenSrp, SpecError> {
        if !self.template.policy.spec.symbolics.is_empty() {
            return Err(SpecError::Symbolic);
        }
        Ok(self.template.instantiate(&Default::default())?)
    }
}

fn bad(what: impl Into<String>, reason: impl ToString) -> SpecError {
    SpecError::BadValue { what: what.into(), reason: reason.to_string() }
}

fn infer_tiers(nodes: &[NodeId]) -> Option<BTreeMap<NodeId, Tier>> {
    nodes
        .iter()
        .map(|n| {
            let tier = match n.as_str().chars().next()? {
                'c' => Tier::Core,
                'a' => Tier::Aggregation,
                'e' => Tier::Edge,
                _ => return None,
            };
            Some((n.clone(), tier))
        })
        .collect()
}

fn parse_type(text: &str) -> Result<Type, SpecError> {
    match text.trim() {
        "node" => Ok(Type::Node),
        "edge" => Ok(Type::Edge),
        t => RouteType::parse(t).map(Type::Route).map_err(|e| bad("symbolic type", e)),
    }
}

fn parse_domain_value(ty: &Type, text: &str) -> Result<Value, SpecError> {
    match ty {
        Type::Node => Ok(Value::Node(NodeId::new(text))),
        Type::Route(rt) => rt.parse_value(text).map(Value::Route).map_err(|e| bad("symbolic domain value", e)),
        Type::Edge => Err(bad("symbolic", "edge-typed symbolics are not supported")),
    }
}

fn policy_spec(file: &NetworkSpecFile, nodes: &[NodeId]) -> Result<PolicySpec, SpecError> {
    let mut spec = match &file.policy {
        PolicyDecl::Builtin { builtin, dest, max_hops, drop, tiers } => {
            let tiers = match tiers {
                Some(t) => Some(t.iter().map(|(n, t)| (NodeId::new(n), *t)).collect()),
                None if builtin.eq_ignore_ascii_case("FAT") => Some(
                    infer_tiers(nodes).ok_or_else(|| bad("policy", "FAT needs `tiers` for nodes not named c*/a*/e*"))?,
                ),
                None => None,
            };
            let params = BuiltinParams {
                dest: Some(NodeId::new(dest)),
                max_hops: *max_hops,
                drop: drop.iter().map(|d| NodeId::new(d)).collect(),
                tiers,
            };
            builtin_policy(builtin, &params, nodes)?
        }
        PolicyDecl::Inline { route_type, merge, trans, init } => PolicySpec {
            route_type: RouteType::parse(route_type).map_err(|e| bad("route_type", e))?,
            merge: parse_expr(merge)?,
            trans: parse_expr(trans)?,
            init: parse_expr(init)?,
            symbolics: Vec::new(),
        },
    };
    for decl in &file.symbolics {
        let ty = parse_type(&decl.ty)?;
        let domain = decl.domain.iter().map(|v| parse_domain_value(&ty, v)).collect::<Result<Vec<_>, _>>()?;
        let sym = Symbolic { name: decl.name.clone(), ty, domain };
        match spec.symbolics.iter_mut().find(|s| s.name == decl.name) {
            Some(existing) => *existing = sym,
            None => spec.symbolics.push(sym),
        }
    }
    Ok(spec)
}

fn property_spec(decl: &PropertyDecl, rt: &RouteType, known: &dyn Fn(&str) -> bool) -> Result<PropertySpec, SpecError> {
    let (mut p, nodes) = match decl {
        PropertyDecl::Builtin { builtin, hops, except, nodes } => {
            let p = match (builtin.as_str(), hops, except) {
                ("max_hops", Some(h), None) => max_hops_property(rt, *h),
                ("max_hops", Some(h), Some(x)) => max_hops_except_property(rt, *h, x),
                ("max_hops", None, _) => return Err(bad("property", "max_hops needs `hops`")),
                ("reachable", _, _) => reachable_property(),
                (other, _, _) => return Err(bad("property", format!("unknown builtin `{other}`"))),
            };
            (p, nodes)
        }
        PropertyDecl::Predicate { predicate, nodes } => (PropertySpec::new(parse_expr(predicate)?), nodes),
    };
    if let Some(ns) = nodes {
        if let Some(u) = ns.iter().find(|n| !known(n)) {
            return Err(SpecError::UnknownNode { what: "property".into(), node: u.clone() });
        }
        p.nodes = Some(ns.iter().map(|n| NodeId::new(n)).collect());
    }
    Ok(p)
}

fn route_map(
    what: &str,
    map: &BTreeMap<String, String>,
    rt: &RouteType,
) -> Result<BTreeMap<NodeId, RouteValue>, SpecError> {
    map.iter()
        .map(|(n, v)| Ok((NodeId::new(n), rt.parse_value(v).map_err(|e| bad(format!("{what} of {n}"), e))?)))
        .collect()
}

impl NetworkSpecFile {
    pub fn from_json(text: &str) -> Result<Self, SpecError> {
        serde_json::from_str(text).map_err(|e| SpecError::Json(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec files serialize")
    }

    pub fn read(path: &Path) -> Result<Self, SpecError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SpecError::Io { path: path.display().to_string(), reason: e.to_string() })?;
        Self::from_json(&text)
    }

    fn directed_edges(&self) -> Vec<Edge> {
        let mut out = Vec::with_capacity(self.edges.len() * 2);
        for (u, v) in &self.edges {
            out.push(Edge::new(u.as_str(), v.as_str()));
            if self.undirected {
                out.push(Edge::new(v.as_str(), u.as_str()));
            }
        }
        out
    }

    /// Validates the file and builds the network, partition, interface and
    /// property it describes.
    pub fn load(&self) -> Result<LoadedSpec, SpecError> {
        let nodes: Vec<NodeId> = self.nodes.iter().map(|n| NodeId::new(n)).collect();
        let compiled = Arc::new(policy_spec(self, &nodes)?.compile()?);
        let rt = compiled.spec.route_type.clone();
        let inh = route_map("input", &self.inputs, &rt)?;
        let outh = route_map("output", &self.outputs, &rt)?;
        let policy = compiled.bind(&compiled.first_assignment())?;
        let srp = validate_open_srp(OpenSrpData {
            nodes,
            edges: self.directed_edges(),
            policy,
            init: None,
            inh: inh.clone(),
            outh: outh.clone(),
        })?;
        let topo = srp.topology();
        let known = |n: &str| topo.contains(&NodeId::new(n));
        let partition = match &self.partition {
            None => None,
            Some(map) => {
                if let Some(u) = map.keys().find(|n| !known(n)) {
                    return Err(SpecError::UnknownNode { what: "partition".into(), node: u.clone() });
                }
                Some(map.iter().map(|(n, c)| (NodeId::new(n), *c)).collect::<FragmentAssignment>())
            }
        };
        let interface = match &self.interface {
            None => None,
            Some(list) => {
                let mut iface = Interface::new();
                for a in list {
                    let e = Edge::new(a.edge.0.as_str(), a.edge.1.as_str());
                    if !topo.has_edge(&e) {
                        return Err(SpecError::UnknownEdge(e));
                    }
                    let v = rt.parse_value(&a.value).map_err(|err| bad(format!("annotation on {e}"), err))?;
                    iface.insert(e, v);
                }
                Some(iface)
            }
        };
        let property = self.property.as_ref().map(|p| property_spec(p, &rt, &known)).transpose()?;
        if let Some(p) = &property {
            p.compile(&compiled.spec)?;
        }
        Ok(LoadedSpec {
            name: self.name.clone().unwrap_or_else(|| "net".into()),
            template: SrpTemplate { topology: topo.clone(), policy: compiled, inh, outh },
            partition,
            interface,
            property,
            file: self.clone(),
        })
    }

    /// A standalone file for fragment `t` of this network, named `name`.
    ///
    /// The policy section is copied verbatim; symbolic domains are written
    /// out explicitly so that builtins keep the parent's domains.
    pub fn for_fragment(&self, name: &str, t: &OpenSrp) -> Self {
        let symbolics = t
            .policy()
            .spec()
            .symbolics
            .iter()
            .map(|s| SymbolicDecl {
                name: s.name.clone(),
                ty: s.ty.to_string(),
                domain: s
                    .domain
                    .iter()
                    .map(|v| match v {
                        Value::Node(n) => n.to_string(),
                        Value::Route(r) => r.to_sexpr().to_string(),
                        Value::Edge(e) => e.to_string(),
                    })
                    .collect(),
            })
            .collect();
        let routes = |m: &BTreeMap<NodeId, RouteValue>| -> BTreeMap<String, String> {
            m.iter().map(|(n, r)| (n.to_string(), r.to_sexpr().to_string())).collect()
        };
        let nodes: Vec<String> = t.nodes().iter().map(ToString::to_string).collect();
        let property = self.property.clone().map(|p| match p {
            PropertyDecl::Builtin { builtin, hops, except, nodes: filter } => PropertyDecl::Builtin {
                builtin,
                hops,
                except,
                nodes: filter.map(|f| f.into_iter().filter(|n| nodes.contains(n)).collect()),
            },
            PropertyDecl::Predicate { predicate, nodes: filter } => PropertyDecl::Predicate {
                predicate,
                nodes: filter.map(|f| f.into_iter().filter(|n| nodes.contains(n)).collect()),
            },
        });
        NetworkSpecFile {
            name: Some(name.to_string()),
            edges: t.topology().edges().map(|e| (e.src.to_string(), e.dst.to_string())).collect(),
            nodes,
            undirected: false,
            policy: self.policy.clone(),
            symbolics,
            partition: None,
            interface: None,
            property,
            inputs: routes(t.inh()),
            outputs: routes(t.outh()),
        }
    }

    /// An inline-policy file describing `srp` exactly.
    pub fn from_srp(name: &str, srp: &OpenSrp) -> Self {
        let spec = srp.policy().spec();
        let mut file = NetworkSpecFile {
            name: None,
            nodes: Vec::new(),
            edges: Vec::new(),
            undirected: false,
            policy: PolicyDecl::Inline {
                route_type: spec.route_type.to_string(),
                merge: print_expr(&spec.merge),
                trans: print_expr(&spec.trans),
                init: print_expr(&spec.init),
            },
            symbolics: Vec::new(),
            partition: None,
            interface: None,
            property: None,
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
        };
        file = file.for_fragment(name, srp);
        file
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"{
        "name": "line",
        "nodes": ["a", "b", "d"],
        "edges": [["a", "b"], ["b", "d"]],
        "undirected": true,
        "policy": {"builtin": "SP", "dest": "d"},
        "partition": {"a": 0, "b": 0, "d": 1},
        "interface": [{"edge": ["d", "b"], "value": "(some 0)"}, {"edge": ["b", "d"], "value": "(some 1)"}],
        "property": {"builtin": "max_hops", "hops": 2}
    }"#;

    #[test]
    fn loads_small_spec() {
        let spec = NetworkSpecFile::from_json(SMALL).unwrap().load().unwrap();
        let srp = spec.instance().unwrap();
        assert_eq!(srp.topology().edge_count(), 4);
        assert_eq!(spec.interface.unwrap().len(), 2);
        assert_eq!(spec.partition.unwrap().classes(), vec![0, 1]);
    }

    #[test]
    fn json_round_trip() {
        let file = NetworkSpecFile::from_json(SMALL).unwrap();
        assert_eq!(NetworkSpecFile::from_json(&file.to_json()).unwrap(), file);
    }

    #[test]
    fn dangling_edges_are_rejected() {
        let text = SMALL.replace(r#"["b", "d"]]"#, r#"["b", "x"]]"#);
        let err = NetworkSpecFile::from_json(&text).unwrap().load().unwrap_err();
        assert!(matches!(err, SpecError::Srp(SrpError::DanglingEdge(_))), "{err}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = SMALL.replace(r#""name""#, r#""nmae""#);
        assert!(matches!(NetworkSpecFile::from_json(&text), Err(SpecError::Json(_))));
    }

    #[test]
    fn annotations_must_be_edges() {
        let text = SMALL.replace(r#"["d", "b"]"#, r#"["d", "a"]"#);
        assert!(matches!(NetworkSpecFile::from_json(&text).unwrap().load(), Err(SpecError::UnknownEdge(_))));
    }

    #[test]
    fn inline_policy_round_trip() {
        let spec = NetworkSpecFile::from_json(SMALL).unwrap().load().unwrap();
        let srp = spec.instance().unwrap();
        let file = NetworkSpecFile::from_srp("copy", &srp);
        let again = NetworkSpecFile::from_json(&file.to_json()).unwrap().load().unwrap().instance().unwrap();
        assert_eq!(again.topology(), srp.topology());
        assert_eq!(again.policy().spec(), srp.policy().spec());
    }
}
