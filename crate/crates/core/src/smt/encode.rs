//! Compilation of fragments, policies and properties to SMT-LIB.
//!
//! Route values are flattened into leaves: an option becomes an `isSome`
//! boolean plus its payload's leaves, a tuple one leaf group per field, an
//! enum an integer code. Integers use linear arithmetic with explicit range
//! assertions. Node and edge values are always concrete and folded away
//! during compilation.

use std::fmt::Write as _;

use thiserror::Error;

use super::model::{ModelValue, SchemaError};
use crate::policy::{Name, PolicyError, PropertySpec, TExpr, TNode, Type, Value};
use crate::route::{RouteType, RouteValue};
use crate::srp::OpenSrp;
use crate::topology::{Edge, NodeId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodeError {
    #[error("property does not type check: {0}")]
    IllTypedProperty(PolicyError),
    #[error("cannot encode: {0}")]
    Unsupported(String),
}

/// Symbolic value: SMT terms arranged in the shape of a policy type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sym {
    Int(String),
    Bool(String),
    /// Integer code of an enum variant (its position in the type).
    Enum(String),
    Opt { is_some: String, payload: Box<Sym> },
    Tuple(Vec<Sym>),
    Node(NodeId),
    Edge(Edge),
}

/// Role of one flattened SMT variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VarRole {
    IsSome,
    Int { lo: i64, hi: i64 },
    Bool,
    EnumCode { variants: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaVar {
    /// Unquoted SMT symbol.
    pub name: String,
    pub role: VarRole,
}

/// The flattened variables of one node's route.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeVars {
    pub node: NodeId,
    pub route_type: RouteType,
    pub vars: Vec<SchemaVar>,
}

/// Per-node variables of a script, in canonical node order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VarSchema {
    pub nodes: Vec<NodeVars>,
}

impl VarSchema {
    pub fn all_vars(&self) -> impl Iterator<Item = &SchemaVar> {
        self.nodes.iter().flat_map(|n| n.vars.iter())
    }

    pub fn get(&self, v: &NodeId) -> Option<&NodeVars> {
        self.nodes.iter().find(|n| &n.node == v)
    }
}

/// Kind of proof obligation in a fragment query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ObligationKind {
    Guarantee,
    Property,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Obligation {
    pub node: NodeId,
    pub kind: ObligationKind,
}

/// A self-contained SMT-LIB script for one fragment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmtScript {
    pub text: String,
    pub schema: VarSchema,
    /// Guarantees, then properties, each in canonical node order.
    pub obligations: Vec<Obligation>,
}

/// Quotes `raw` as an SMT-LIB symbol when it is not a simple symbol.
pub fn smt_symbol(raw: &str) -> String {
    let simple = !raw.is_empty()
        && !raw.as_bytes()[0].is_ascii_digit()
        && raw.chars().all(|c| c.is_ascii_alphanumeric() || "~!@$%^&*_-+=<>.?/".contains(c));
    if simple {
        raw.to_string()
    } else {
        format!("|{}|", raw.replace(['|', '\\'], "_"))
    }
}

pub fn num(n: i64) -> String {
    if n < 0 {
        format!("(- {})", n.unsigned_abs())
    } else {
        n.to_string()
    }
}

fn as_num(t: &str) -> Option<i64> {
    if let Ok(n) = t.parse::<i64>() {
        return Some(n);
    }
    t.strip_prefix("(- ").and_then(|r| r.strip_suffix(')')).and_then(|r| r.parse::<i64>().ok()).map(|n| -n)
}

fn is_atomic(t: &str) -> bool {
    !t.contains([' ', '(', ')'])
}

fn mk_not(a: &str) -> String {
    match a {
        "true" => "false".into(),
        "false" => "true".into(),
        _ => format!("(not {a})"),
    }
}

fn mk_nary(op: &str, unit: &str, zero: &str, items: Vec<String>) -> String {
    let mut kept = Vec::new();
    for i in items {
        if i == zero {
            return zero.into();
        }
        if i != unit {
            kept.push(i);
        }
    }
    match kept.len() {
        0 => unit.into(),
        1 => kept.pop().expect("one item"),
        _ => format!("({op} {})", kept.join(" ")),
    }
}

fn mk_and(items: Vec<String>) -> String {
    mk_nary("and", "true", "false", items)
}

fn mk_or(items: Vec<String>) -> String {
    mk_nary("or", "false", "true", items)
}

fn mk_ite(c: &str, a: &str, b: &str) -> String {
    match c {
        "true" => a.into(),
        "false" => b.into(),
        _ if a == b => a.into(),
        _ if a == "true" && b == "false" => c.into(),
        _ if a == "false" && b == "true" => mk_not(c),
        _ => format!("(ite {c} {a} {b})"),
    }
}

fn mk_eq(a: &str, b: &str) -> String {
    if a == b {
        return "true".into();
    }
    match (as_num(a), as_num(b)) {
        (Some(x), Some(y)) => (x == y).to_string(),
        _ => match (a, b) {
            ("true" | "false", "true" | "false") => (a == b).to_string(),
            ("true", x) | (x, "true") => x.to_string(),
            ("false", x) | (x, "false") => mk_not(x),
            _ => format!("(= {a} {b})"),
        },
    }
}

fn mk_le(a: &str, b: &str) -> String {
    match (as_num(a), as_num(b)) {
        (Some(x), Some(y)) => (x <= y).to_string(),
        _ if a == b => "true".into(),
        _ => format!("(<= {a} {b})"),
    }
}

/// Structural equality of two symbolic values of compatible types.
pub fn sym_eq(a: &Sym, b: &Sym) -> Result<String, EncodeError> {
    Ok(match (a, b) {
        (Sym::Int(x), Sym::Int(y)) | (Sym::Bool(x), Sym::Bool(y)) | (Sym::Enum(x), Sym::Enum(y)) => mk_eq(x, y),
        (Sym::Opt { is_some: s1, payload: p1 }, Sym::Opt { is_some: s2, payload: p2 }) => {
            let payload = sym_eq(p1, p2)?;
            if s1 == "false" || s2 == "false" {
                mk_eq(s1, s2)
            } else if s1 == "true" || s2 == "true" {
                mk_and(vec![mk_eq(s1, s2), payload])
            } else {
                mk_and(vec![mk_eq(s1, s2), mk_or(vec![mk_not(s1), payload])])
            }
        }
        (Sym::Tuple(xs), Sym::Tuple(ys)) if xs.len() == ys.len() => {
            mk_and(xs.iter().zip(ys).map(|(x, y)| sym_eq(x, y)).collect::<Result<_, _>>()?)
        }
        (Sym::Node(x), Sym::Node(y)) => (x == y).to_string(),
        (Sym::Edge(x), Sym::Edge(y)) => (x == y).to_string(),
        _ => return Err(EncodeError::Unsupported(format!("equality between {a:?} and {b:?}"))),
    })
}

fn sym_ite(c: &str, a: &Sym, b: &Sym) -> Result<Sym, EncodeError> {
    Ok(match (a, b) {
        (Sym::Int(x), Sym::Int(y)) => Sym::Int(mk_ite(c, x, y)),
        (Sym::Bool(x), Sym::Bool(y)) => Sym::Bool(mk_ite(c, x, y)),
        (Sym::Enum(x), Sym::Enum(y)) => Sym::Enum(mk_ite(c, x, y)),
        (Sym::Opt { is_some: s1, payload: p1 }, Sym::Opt { is_some: s2, payload: p2 }) => {
            Sym::Opt { is_some: mk_ite(c, s1, s2), payload: Box::new(sym_ite(c, p1, p2)?) }
        }
        (Sym::Tuple(xs), Sym::Tuple(ys)) if xs.len() == ys.len() => {
            Sym::Tuple(xs.iter().zip(ys).map(|(x, y)| sym_ite(c, x, y)).collect::<Result<_, _>>()?)
        }
        (Sym::Node(x), Sym::Node(y)) if x == y => Sym::Node(x.clone()),
        (Sym::Edge(x), Sym::Edge(y)) if x == y => Sym::Edge(x.clone()),
        _ => return Err(EncodeError::Unsupported(format!("conditional over non-route values depends on a route ({c})"))),
    })
}

/// Symbolic constant for a route value of type `ty`.
pub fn const_sym(v: &RouteValue, ty: &RouteType) -> Sym {
    match (v, ty) {
        (RouteValue::Int(n), _) => Sym::Int(num(*n)),
        (RouteValue::Bool(b), _) => Sym::Bool(b.to_string()),
        (RouteValue::Enum(name), RouteType::Enum(_)) => {
            Sym::Enum(num(ty.variant_index(name).expect("conforming enum value") as i64))
        }
        (RouteValue::Option(None), RouteType::Option(inner)) => {
            Sym::Opt { is_some: "false".into(), payload: Box::new(const_sym(&inner.default_value(), inner)) }
        }
        (RouteValue::Option(Some(x)), RouteType::Option(inner)) => {
            Sym::Opt { is_some: "true".into(), payload: Box::new(const_sym(x, inner)) }
        }
        (RouteValue::Tuple(xs), RouteType::Tuple(ts)) => Sym::Tuple(xs.iter().zip(ts).map(|(x, t)| const_sym(x, t)).collect()),
        _ => panic!("value {v} does not conform to {ty}"),
    }
}

fn value_sym(v: &Value, ty: &Type) -> Sym {
    match (v, ty) {
        (Value::Route(r), Type::Route(t)) => const_sym(r, t),
        (Value::Node(n), _) => Sym::Node(n.clone()),
        (Value::Edge(e), _) => Sym::Edge(e.clone()),
        _ => panic!("value {v} does not have type {ty}"),
    }
}

/// Flattened variables for a route of type `ty` named after `prefix`.
fn leaves(prefix: &str, ty: &RouteType, top: bool, out: &mut Vec<SchemaVar>) -> Sym {
    match ty {
        RouteType::Option(inner) => {
            let name = format!("{prefix}_isSome");
            out.push(SchemaVar { name: name.clone(), role: VarRole::IsSome });
            let payload = leaves(&format!("{prefix}_val"), inner, false, out);
            Sym::Opt { is_some: smt_symbol(&name), payload: Box::new(payload) }
        }
        _ if top => leaves(&format!("{prefix}_val"), ty, false, out),
        RouteType::Tuple(ts) => {
            Sym::Tuple(ts.iter().enumerate().map(|(i, t)| leaves(&format!("{prefix}_{i}"), t, false, out)).collect())
        }
        RouteType::BoundedInt { lo, hi } => {
            out.push(SchemaVar { name: prefix.to_string(), role: VarRole::Int { lo: *lo, hi: *hi } });
            Sym::Int(smt_symbol(prefix))
        }
        RouteType::Bool => {
            out.push(SchemaVar { name: prefix.to_string(), role: VarRole::Bool });
            Sym::Bool(smt_symbol(prefix))
        }
        RouteType::Enum(vs) => {
            out.push(SchemaVar { name: prefix.to_string(), role: VarRole::EnumCode { variants: vs.len() } });
            Sym::Enum(smt_symbol(prefix))
        }
    }
}

/// Compilation context: a scoped environment plus hoisted `let` bindings
/// for shared subterms.
#[derive(Default)]
struct Ctx {
    env: Vec<(Name, Sym)>,
    lets: Vec<(String, String)>,
    fresh: usize,
}

impl Ctx {
    fn with_env(env: Vec<(Name, Sym)>) -> Self {
        Ctx { env, ..Default::default() }
    }

    fn lookup(&self, n: &str) -> Result<Sym, EncodeError> {
        self.env
            .iter()
            .rev()
            .find(|(x, _)| &**x == n)
            .map(|(_, s)| s.clone())
            .ok_or_else(|| EncodeError::Unsupported(format!("unbound variable {n}")))
    }

    fn bind_term(&mut self, term: String) -> String {
        if is_atomic(&term) {
            return term;
        }
        let name = format!("_let{}", self.fresh);
        self.fresh += 1;
        self.lets.push((name.clone(), term));
        name
    }

    /// Replaces every compound leaf of `s` by a fresh `let` name.
    fn bind(&mut self, s: Sym) -> Sym {
        match s {
            Sym::Int(t) => Sym::Int(self.bind_term(t)),
            Sym::Bool(t) => Sym::Bool(self.bind_term(t)),
            Sym::Enum(t) => Sym::Enum(self.bind_term(t)),
            Sym::Opt { is_some, payload } => {
                let is_some = self.bind_term(is_some);
                Sym::Opt { is_some, payload: Box::new(self.bind(*payload)) }
            }
            Sym::Tuple(xs) => Sym::Tuple(xs.into_iter().map(|x| self.bind(x)).collect()),
            other => other,
        }
    }

    /// Wraps `body` in the hoisted bindings, innermost last, and clears them.
    fn finish(&mut self, body: String) -> String {
        let lets = std::mem::take(&mut self.lets);
        let mut out = String::new();
        let mut used = Vec::new();
        for (name, term) in &lets {
            let _ = write!(out, "(let (({name} {term})) ");
            used.push(name);
        }
        out.push_str(&body);
        out.push_str(&")".repeat(lets.len()));
        out
    }

    fn int_term(&mut self, t: &TExpr) -> Result<String, EncodeError> {
        match self.compile(t)? {
            Sym::Int(x) => Ok(x),
            other => Err(EncodeError::Unsupported(format!("expected an integer, got {other:?}"))),
        }
    }

    fn bool_term(&mut self, t: &TExpr) -> Result<String, EncodeError> {
        match self.compile(t)? {
            Sym::Bool(x) => Ok(x),
            other => Err(EncodeError::Unsupported(format!("expected a boolean, got {other:?}"))),
        }
    }

    fn compile(&mut self, t: &TExpr) -> Result<Sym, EncodeError> {
        Ok(match &t.node {
            TNode::Lit(v) => value_sym(v, &t.ty),
            TNode::Var(n) => self.lookup(n)?,
            TNode::Add(a, b) => {
                let (lo, hi) = t.int_bounds();
                let ((la, ha), (lb, hb)) = (a.int_bounds(), b.int_bounds());
                let x = self.int_term(a)?;
                let y = self.int_term(b)?;
                if let (Some(p), Some(q)) = (as_num(&x), as_num(&y)) {
                    return Ok(Sym::Int(num(p.saturating_add(q).clamp(lo, hi))));
                }
                let sum = self.bind_term(format!("(+ {x} {y})"));
                let mut out = sum.clone();
                if ha.saturating_add(hb) > hi {
                    out = mk_ite(&mk_le(&sum, &num(hi)), &out, &num(hi));
                }
                if la.saturating_add(lb) < lo {
                    out = mk_ite(&mk_le(&num(lo), &sum), &out, &num(lo));
                }
                Sym::Int(out)
            }
            TNode::Min(a, b) => {
                let x = self.int_term(a)?;
                let x = self.bind_term(x);
                let y = self.int_term(b)?;
                let y = self.bind_term(y);
                Sym::Int(mk_ite(&mk_le(&x, &y), &x, &y))
            }
            TNode::LessEq(a, b) => {
                let x = self.int_term(a)?;
                let y = self.int_term(b)?;
                Sym::Bool(mk_le(&x, &y))
            }
            TNode::Eq(a, b) => {
                let x = self.compile(a)?;
                let x = self.bind(x);
                let y = self.compile(b)?;
                let y = self.bind(y);
                Sym::Bool(sym_eq(&x, &y)?)
            }
            TNode::And(a, b) => {
                let x = self.bool_term(a)?;
                let y = self.bool_term(b)?;
                Sym::Bool(mk_and(vec![x, y]))
            }
            TNode::Or(a, b) => {
                let x = self.bool_term(a)?;
                let y = self.bool_term(b)?;
                Sym::Bool(mk_or(vec![x, y]))
            }
            TNode::Not(a) => Sym::Bool(mk_not(&self.bool_term(a)?)),
            TNode::If(c, x, y) => {
                let c = self.bool_term(c)?;
                match c.as_str() {
                    "true" => self.compile(x)?,
                    "false" => self.compile(y)?,
                    _ => {
                        let c = self.bind_term(c);
                        let a = self.compile(x)?;
                        let b = self.compile(y)?;
                        sym_ite(&c, &a, &b)?
                    }
                }
            }
            TNode::Some(inner) => Sym::Opt { is_some: "true".into(), payload: Box::new(self.compile(inner)?) },
            TNode::None => match &t.ty {
                Type::Route(RouteType::Option(inner)) => {
                    Sym::Opt { is_some: "false".into(), payload: Box::new(const_sym(&inner.default_value(), inner)) }
                }
                other => panic!("None typed as {other}"),
            },
            TNode::Match { scrutinee, none_branch, binder, some_branch } => {
                let s = self.compile(scrutinee)?;
                let Sym::Opt { is_some, payload } = self.bind(s) else {
                    return Err(EncodeError::Unsupported("match on a non-option".into()));
                };
                let compile_some = |ctx: &mut Ctx| -> Result<Sym, EncodeError> {
                    ctx.env.push((binder.clone(), (*payload).clone()));
                    let r = ctx.compile(some_branch);
                    ctx.env.pop();
                    r
                };
                match is_some.as_str() {
                    "true" => compile_some(self)?,
                    "false" => self.compile(none_branch)?,
                    _ => {
                        let none_r = self.compile(none_branch)?;
                        let some_r = compile_some(self)?;
                        sym_ite(&is_some, &some_r, &none_r)?
                    }
                }
            }
            TNode::Tuple(items) => Sym::Tuple(items.iter().map(|i| self.compile(i)).collect::<Result<_, _>>()?),
            TNode::Proj(inner, i) => match self.compile(inner)? {
                Sym::Tuple(mut xs) => xs.swap_remove(*i),
                other => return Err(EncodeError::Unsupported(format!("projection from {other:?}"))),
            },
            TNode::EnumLit(v) => {
                let ty = t.ty.as_route().expect("enum literal has a route type");
                Sym::Enum(num(ty.variant_index(v).expect("checked variant") as i64))
            }
            TNode::EnumEq(inner, v) => {
                let ty = inner.ty.as_route().expect("enum term has a route type").clone();
                let Sym::Enum(code) = self.compile(inner)? else {
                    return Err(EncodeError::Unsupported("enum test on a non-enum".into()));
                };
                Sym::Bool(mk_eq(&code, &num(ty.variant_index(v).expect("checked variant") as i64)))
            }
            TNode::Let { binder, bound, body } => {
                let b = self.compile(bound)?;
                let b = self.bind(b);
                self.env.push((binder.clone(), b));
                let r = self.compile(body);
                self.env.pop();
                r?
            }
            TNode::NodeLit(n) => Sym::Node(n.clone()),
            TNode::EdgeSrc(inner) | TNode::EdgeDst(inner) => match self.compile(inner)? {
                Sym::Edge(e) => Sym::Node(if matches!(t.node, TNode::EdgeSrc(_)) { e.src } else { e.dst }),
                other => return Err(EncodeError::Unsupported(format!("endpoint of {other:?}"))),
            },
        })
    }
}

fn range_assertions(vars: &[SchemaVar], out: &mut String) {
    for v in vars {
        let s = smt_symbol(&v.name);
        match v.role {
            VarRole::Int { lo, hi } => {
                let _ = writeln!(out, "(assert (and (<= {} {s}) (<= {s} {})))", num(lo), num(hi));
            }
            VarRole::EnumCode { variants } => {
                let _ = writeln!(out, "(assert (and (<= 0 {s}) (<= {s} {})))", variants - 1);
            }
            VarRole::IsSome | VarRole::Bool => {}
        }
    }
}

fn symbolic_env(srp: &OpenSrp) -> Vec<(Name, Sym)> {
    let syms = &srp.policy().spec().symbolics;
    srp.policy()
        .bindings()
        .iter()
        .map(|(n, v)| {
            let ty = syms.iter().find(|s| s.name.as_str() == &**n).map(|s| s.ty.clone()).expect("declared symbolic");
            (n.clone(), value_sym(v, &ty))
        })
        .collect()
}

/// Builds the query `A ∧ N ∧ ¬(G ∧ P)` for fragment `t`.
///
/// `N` asserts the network equation at every non-input node, `A` the
/// assumptions at inputs, `G` the guarantees at outputs, and `P` the
/// property at every node it applies to (inputs included).
pub fn encode_fragment(t: &OpenSrp, property: &PropertySpec) -> Result<SmtScript, EncodeError> {
    let pred = property.compile(t.policy().spec()).map_err(EncodeError::IllTypedProperty)?;
    let rt = t.route_type().clone();
    let topo = t.topology();
    let mut schema = VarSchema::default();
    let mut vars = Vec::with_capacity(topo.len());
    for v in topo.nodes() {
        let mut leaves_out = Vec::new();
        let sym = leaves(v.as_str(), &rt, true, &mut leaves_out);
        vars.push(sym);
        schema.nodes.push(NodeVars { node: v.clone(), route_type: rt.clone(), vars: leaves_out });
    }
    let mut text = String::from("(set-logic QF_LIA)\n");
    for sv in schema.all_vars() {
        let sort = match sv.role {
            VarRole::IsSome | VarRole::Bool => "Bool",
            VarRole::Int { .. } | VarRole::EnumCode { .. } => "Int",
        };
        let _ = writeln!(text, "(declare-const {} {sort})", smt_symbol(&sv.name));
    }
    for nv in &schema.nodes {
        range_assertions(&nv.vars, &mut text);
    }
    let base_env = symbolic_env(t);
    let compiled = t.policy().compiled();
    for (i, v) in topo.nodes().iter().enumerate() {
        if t.is_input(v) {
            continue;
        }
        let mut ctx = Ctx::with_env(base_env.clone());
        let mut acc = const_sym(t.init_at(i), &rt);
        for &u in topo.pred_indices(i) {
            let e = Edge { src: topo.node(u).clone(), dst: v.clone() };
            ctx.env.push((Name::from("edge"), Sym::Edge(e)));
            ctx.env.push((Name::from("r"), vars[u].clone()));
            let tr = ctx.compile(&compiled.trans)?;
            ctx.env.truncate(ctx.env.len() - 2);
            let tr = ctx.bind(tr);
            let a = ctx.bind(acc);
            ctx.env.push((Name::from("r1"), a));
            ctx.env.push((Name::from("r2"), tr));
            acc = ctx.compile(&compiled.merge)?;
            ctx.env.truncate(ctx.env.len() - 2);
        }
        let eq = sym_eq(&vars[i], &acc)?;
        let body = ctx.finish(eq);
        let _ = writeln!(text, "; network {v}\n(assert {body})");
    }
    for (i, v) in topo.nodes().iter().enumerate() {
        if let Some(r) = t.inh().get(v) {
            let _ = writeln!(text, "; assumption {v}\n(assert {})", sym_eq(&vars[i], &const_sym(r, &rt))?);
        }
    }
    let mut obligations = Vec::new();
    let mut goals = Vec::new();
    for (i, v) in topo.nodes().iter().enumerate() {
        if let Some(r) = t.outh().get(v) {
            goals.push(sym_eq(&vars[i], &const_sym(r, &rt))?);
            obligations.push(Obligation { node: v.clone(), kind: ObligationKind::Guarantee });
        }
    }
    for (i, v) in topo.nodes().iter().enumerate() {
        if !property.applies_to(v) {
            continue;
        }
        let mut ctx = Ctx::with_env(base_env.clone());
        ctx.env.push((Name::from("node"), Sym::Node(v.clone())));
        ctx.env.push((Name::from("r"), vars[i].clone()));
        let Sym::Bool(b) = ctx.compile(&pred)? else {
            return Err(EncodeError::Unsupported("property is not boolean".into()));
        };
        goals.push(ctx.finish(b));
        obligations.push(Obligation { node: v.clone(), kind: ObligationKind::Property });
    }
    let _ = writeln!(text, "; guarantees and property\n(assert (not {}))", mk_and(goals));
    text.push_str("(check-sat)\n");
    let names: Vec<String> = schema.all_vars().map(|v| smt_symbol(&v.name)).collect();
    if !names.is_empty() {
        let _ = writeln!(text, "(get-value ({}))", names.join(" "));
    }
    Ok(SmtScript { text, schema, obligations })
}

/// A closed expression compiled to one SMT term per leaf of its result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExprProbe {
    pub ty: Type,
    /// Self-contained terms (with their `let` bindings), leaf order.
    pub terms: Vec<String>,
    /// The value when the result is a node or edge (always concrete).
    pub constant: Option<Value>,
}

fn sym_terms(s: &Sym, out: &mut Vec<String>) {
    match s {
        Sym::Int(t) | Sym::Bool(t) | Sym::Enum(t) => out.push(t.clone()),
        Sym::Opt { is_some, payload } => {
            out.push(is_some.clone());
            sym_terms(payload, out);
        }
        Sym::Tuple(xs) => xs.iter().for_each(|x| sym_terms(x, out)),
        Sym::Node(_) | Sym::Edge(_) => {}
    }
}

/// Rewrites the leaves of a constant so the folding helpers no longer
/// recognise them, leaving the arithmetic to the solver.
fn opaque(s: Sym) -> Sym {
    match s {
        Sym::Int(t) => Sym::Int(format!("(+ {t} 0)")),
        Sym::Enum(t) => Sym::Enum(format!("(+ {t} 0)")),
        Sym::Bool(t) => Sym::Bool(if t == "true" { "(= 0 0)".into() } else { "(= 0 1)".into() }),
        Sym::Opt { is_some, payload } => Sym::Opt {
            is_some: if is_some == "true" { "(= 0 0)".into() } else { "(= 0 1)".into() },
            payload: Box::new(opaque(*payload)),
        },
        Sym::Tuple(xs) => Sym::Tuple(xs.into_iter().map(opaque).collect()),
        other => other,
    }
}

/// Compiles `t` under concrete bindings so its value can be read back from
/// a solver with `get-value`.
pub fn probe_expr(t: &TExpr, env: &[(Name, Type, Value)]) -> Result<ExprProbe, EncodeError> {
    probe_with(t, env, false)
}

/// Like [`probe_expr`], but the bindings are hidden from constant folding so
/// the solver evaluates every operation on them.
pub fn probe_expr_opaque(t: &TExpr, env: &[(Name, Type, Value)]) -> Result<ExprProbe, EncodeError> {
    probe_with(t, env, true)
}

fn probe_with(t: &TExpr, env: &[(Name, Type, Value)], hide: bool) -> Result<ExprProbe, EncodeError> {
    let bind = |v: &Value, ty: &Type| if hide { opaque(value_sym(v, ty)) } else { value_sym(v, ty) };
    let mut ctx = Ctx::with_env(env.iter().map(|(n, ty, v)| (n.clone(), bind(v, ty))).collect());
    let s = ctx.compile(t)?;
    let constant = match &s {
        Sym::Node(n) => Some(Value::Node(n.clone())),
        Sym::Edge(e) => Some(Value::Edge(e.clone())),
        _ => None,
    };
    let mut raw = Vec::new();
    sym_terms(&s, &mut raw);
    let lets = ctx.lets.clone();
    let terms = raw
        .into_iter()
        .map(|body| {
            ctx.lets = lets.clone();
            ctx.finish(body)
        })
        .collect();
    Ok(ExprProbe { ty: t.ty.clone(), terms, constant })
}

impl ExprProbe {
    /// Rebuilds the value from solver results for `terms`, in order.
    pub fn decode(&self, values: &[ModelValue]) -> Result<Value, SchemaError> {
        if let Some(c) = &self.constant {
            return Ok(c.clone());
        }
        let rt = self.ty.as_route().expect("non-constant probes have route types");
        let mut it = values.iter().cloned();
        let v = super::model::rebuild_value(rt, &mut |_| it.next())?;
        Ok(Value::Route(v))
    }
}
