//! Builtin policies: shortest path (SP), valley-free (FAT) and shortest path
//! with a symbolic failed node (MAINT), plus common per-node properties.

use std::collections::BTreeMap;

use super::ast::build::*;
use super::ast::{Expr, Type, Value};
use super::spec::{PolicyError, PolicySpec, PropertySpec, Symbolic};
use crate::route::{RouteType, RouteValue};
use crate::topology::NodeId;

/// Default hop bound.
pub const DEFAULT_MAX_HOPS: i64 = 15;

/// Fattree tier of a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    Edge,
    Aggregation,
    Core,
}

impl Tier {
    pub fn level(self) -> i64 {
        match self {
            Tier::Edge => 0,
            Tier::Aggregation => 1,
            Tier::Core => 2,
        }
    }
}

/// Parameters accepted by [`builtin_policy`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BuiltinParams {
    pub dest: Option<NodeId>,
    pub max_hops: Option<i64>,
    /// Nodes that drop every route they would advertise.
    pub drop: Vec<NodeId>,
    pub tiers: Option<BTreeMap<NodeId, Tier>>,
}

/// Builds the named builtin policy for a network whose nodes are `nodes`
/// (in canonical order).
pub fn builtin_policy(name: &str, params: &BuiltinParams, nodes: &[NodeId]) -> Result<PolicySpec, PolicyError> {
    let dest = || params.dest.clone().ok_or_else(|| PolicyError::MissingParam("dest".into()));
    let h = params.max_hops.unwrap_or(DEFAULT_MAX_HOPS);
    match name.to_ascii_uppercase().as_str() {
        "SP" => Ok(shortest_path(&dest()?, h, &params.drop)),
        "MAINT" => Ok(maintenance(&dest()?, h, &params.drop, nodes)),
        "FAT" => {
            let tiers = params.tiers.as_ref().ok_or_else(|| PolicyError::MissingParam("tiers".into()))?;
            Ok(valley_free(&dest()?, h, &params.drop, tiers))
        }
        _ => Err(PolicyError::UnknownPolicy(name.to_string())),
    }
}

fn hops_type(h: i64) -> RouteType {
    RouteType::int(0, h)
}

fn dropped_by(drop: &[NodeId]) -> Expr {
    any(drop.iter().map(|n| eq(src(var("edge")), node(n))).collect())
}

/// Wraps `trans` so routes leaving any node in `drop` become `None`.
fn with_drops(drop: &[NodeId], route_none: Expr, trans: Expr) -> Expr {
    if drop.is_empty() {
        trans
    } else {
        ite(dropped_by(drop), route_none, trans)
    }
}

fn sp_trans(h: i64) -> Expr {
    match_opt(
        var("r"),
        none(hops_type(h)),
        "h",
        ite(le(int(h), var("h")), none(hops_type(h)), some(add(var("h"), int(1)))),
    )
}

fn sp_merge() -> Expr {
    match_opt(
        var("r1"),
        var("r2"),
        "h1",
        match_opt(var("r2"), var("r1"), "h2", ite(le(var("h1"), var("h2")), var("r1"), var("r2"))),
    )
}

fn dest_init(dest: &NodeId, origin: Expr, payload: RouteType) -> Expr {
    ite(eq(var("node"), node(dest)), some(origin), none(payload))
}

/// Shortest path routing to `dest`: routes are hop counts, each hop adds
/// one, and a route already at the bound `h` is dropped.
pub fn shortest_path(dest: &NodeId, h: i64, drop: &[NodeId]) -> PolicySpec {
    PolicySpec {
        route_type: RouteType::option(hops_type(h)),
        merge: sp_merge(),
        trans: with_drops(drop, none(hops_type(h)), sp_trans(h)),
        init: dest_init(dest, int_in(0, 0, h), hops_type(h)),
        symbolics: Vec::new(),
    }
}

/// SP where the symbolic node `down` drops everything it advertises.
/// `down` ranges over every node except the destination.
pub fn maintenance(dest: &NodeId, h: i64, drop: &[NodeId], nodes: &[NodeId]) -> PolicySpec {
    let mut spec = shortest_path(dest, h, drop);
    spec.trans = ite(eq(src(var("edge")), var("down")), none(hops_type(h)), spec.trans);
    spec.symbolics.push(Symbolic {
        name: "down".into(),
        ty: Type::Node,
        domain: nodes.iter().filter(|n| *n != dest).cloned().map(Value::Node).collect(),
    });
    spec
}

const DIRECTIONS: [&str; 2] = ["Up", "Down"];

fn fat_payload(h: i64) -> RouteType {
    RouteType::Tuple(vec![hops_type(h), RouteType::enumeration(DIRECTIONS)])
}

/// Tier level of the node expression `n`, as an integer in `0..=2`.
fn tier_of(n: Expr, tiers: &BTreeMap<NodeId, Tier>) -> Expr {
    let members = |t: Tier| any(tiers.iter().filter(|(_, tier)| **tier == t).map(|(m, _)| eq(n.clone(), node(m))).collect());
    ite(
        members(Tier::Core),
        int_in(2, 0, 2),
        ite(members(Tier::Aggregation), int_in(1, 0, 2), int_in(0, 0, 2)),
    )
}

/// Valley-free routing: a route remembers whether it has travelled down the
/// tier hierarchy and is dropped if it would then travel up again.
pub fn valley_free(dest: &NodeId, h: i64, drop: &[NodeId], tiers: &BTreeMap<NodeId, Tier>) -> PolicySpec {
    let up = not(le(tier_of(dst(var("edge")), tiers), tier_of(src(var("edge")), tiers)));
    let dir = |v: &str| enum_lit(&DIRECTIONS, v);
    let none_route = none(fat_payload(h));
    let trans = match_opt(
        var("r"),
        none_route.clone(),
        "p",
        let_in(
            "up",
            up,
            ite(
                and(var("up"), is_variant(proj(var("p"), 1), "Down")),
                none_route.clone(),
                ite(
                    le(int(h), proj(var("p"), 0)),
                    none_route.clone(),
                    some(tuple(vec![add(proj(var("p"), 0), int(1)), ite(var("up"), dir("Up"), dir("Down"))])),
                ),
            ),
        ),
    );
    let merge = match_opt(
        var("r1"),
        var("r2"),
        "p1",
        match_opt(
            var("r2"),
            var("r1"),
            "p2",
            ite(
                le(proj(var("p1"), 0), proj(var("p2"), 0)),
                ite(
                    le(proj(var("p2"), 0), proj(var("p1"), 0)),
                    ite(is_variant(proj(var("p1"), 1), "Up"), var("r1"), var("r2")),
                    var("r1"),
                ),
                var("r2"),
            ),
        ),
    );
    PolicySpec {
        route_type: RouteType::option(fat_payload(h)),
        merge,
        trans: with_drops(drop, none_route, trans),
        init: dest_init(dest, tuple(vec![int_in(0, 0, h), dir("Up")]), fat_payload(h)),
        symbolics: Vec::new(),
    }
}

/// Hop count of the bound payload `p` for SP-style (`int`) or FAT-style
/// (`(tuple int ...)`) routes.
fn payload_hops(route_type: &RouteType, p: Expr) -> Expr {
    match route_type {
        RouteType::Option(inner) if matches!(**inner, RouteType::Tuple(_)) => proj(p, 0),
        _ => p,
    }
}

/// Every node has a route of at most `n` hops.
pub fn max_hops_property(route_type: &RouteType, n: i64) -> PropertySpec {
    PropertySpec::new(match_opt(var("r"), boolean(false), "p", le(payload_hops(route_type, var("p")), int(n))))
}

/// Every node except the symbolic `except` has a route of at most `n` hops.
pub fn max_hops_except_property(route_type: &RouteType, n: i64, except: &str) -> PropertySpec {
    let base = max_hops_property(route_type, n).predicate;
    PropertySpec::new(or(eq(var("node"), var(except)), base))
}

/// Every node has some route.
pub fn reachable_property() -> PropertySpec {
    PropertySpec::new(match_opt(var("r"), boolean(false), "p", boolean(true)))
}

/// `Some h` for SP routes.
pub fn sp_route(h: i64) -> RouteValue {
    RouteValue::some(RouteValue::Int(h))
}

/// `Some (h, dir)` for FAT routes.
pub fn fat_route(h: i64, dir: &str) -> RouteValue {
    RouteValue::some(RouteValue::Tuple(vec![RouteValue::Int(h), RouteValue::Enum(dir.to_string())]))
}
