//! Reference interpreter for type-checked policy expressions.

use super::ast::{Expr, Name, Type, Value};
use super::typecheck::{annotate, TExpr, TNode, TypeEnv, TypeError};
use crate::route::{RouteType, RouteValue};

/// Value bindings for evaluation. Later bindings shadow earlier ones.
#[derive(Debug, Clone, Default)]
pub struct ValueEnv {
    bindings: Vec<(Name, Value)>,
}

impl ValueEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, value: Value) -> Self {
        self.bindings.push((Name::from(name), value));
        self
    }

    pub fn push(&mut self, name: Name, value: Value) {
        self.bindings.push((name, value));
    }

    pub fn pop(&mut self) {
        self.bindings.pop();
    }

    pub fn lookup(&self, name: &str) -> Option<&Value> {
        self.bindings.iter().rev().find(|(n, _)| &**n == name).map(|(_, v)| v)
    }
}

/// Type checks `e` against the declared parameter types, then evaluates it.
pub fn evaluate(e: &Expr, params: &[(&str, Type, Value)]) -> Result<Value, TypeError> {
    let tenv = TypeEnv::with_params(params.iter().map(|(n, t, _)| (*n, t.clone())))?;
    let typed = annotate(e, &tenv)?;
    let mut venv = ValueEnv::new();
    for (n, _, v) in params {
        venv.push(Name::from(*n), v.clone());
    }
    Ok(eval(&typed, &mut venv))
}

fn route(v: Value) -> RouteValue {
    v.into_route().expect("well-typed term produced a non-route value")
}

fn int_of(t: &TExpr, env: &mut ValueEnv) -> i64 {
    route(eval(t, env)).as_int().expect("well-typed integer term")
}

fn bool_of(t: &TExpr, env: &mut ValueEnv) -> bool {
    route(eval(t, env)).as_bool().expect("well-typed boolean term")
}

/// Evaluates an annotated expression. Total on trees produced by
/// [`annotate`] when `env` binds every free variable at its declared type.
pub fn eval(t: &TExpr, env: &mut ValueEnv) -> Value {
    let r = |v: RouteValue| Value::Route(v);
    match &t.node {
        TNode::Lit(v) => v.clone(),
        TNode::Var(name) => env.lookup(name).cloned().unwrap_or_else(|| panic!("unbound variable {name} at runtime")),
        TNode::Add(a, b) => {
            let (lo, hi) = t.int_bounds();
            let sum = int_of(a, env).saturating_add(int_of(b, env));
            r(RouteValue::Int(sum.clamp(lo, hi)))
        }
        TNode::Min(a, b) => r(RouteValue::Int(int_of(a, env).min(int_of(b, env)))),
        TNode::LessEq(a, b) => r(RouteValue::Bool(int_of(a, env) <= int_of(b, env))),
        TNode::Eq(a, b) => {
            let x = eval(a, env);
            let y = eval(b, env);
            r(RouteValue::Bool(x == y))
        }
        TNode::And(a, b) => r(RouteValue::Bool(bool_of(a, env) && bool_of(b, env))),
        TNode::Or(a, b) => r(RouteValue::Bool(bool_of(a, env) || bool_of(b, env))),
        TNode::Not(a) => r(RouteValue::Bool(!bool_of(a, env))),
        TNode::If(c, x, y) => {
            if bool_of(c, env) {
                eval(x, env)
            } else {
                eval(y, env)
            }
        }
        TNode::Some(inner) => r(RouteValue::some(route(eval(inner, env)))),
        TNode::None => r(RouteValue::none()),
        TNode::Match { scrutinee, none_branch, binder, some_branch } => match route(eval(scrutinee, env)) {
            RouteValue::Option(None) => eval(none_branch, env),
            RouteValue::Option(Some(payload)) => {
                env.push(binder.clone(), Value::Route(*payload));
                let out = eval(some_branch, env);
                env.pop();
                out
            }
            other => panic!("match on non-option {other}"),
        },
        TNode::Tuple(items) => r(RouteValue::Tuple(items.iter().map(|i| route(eval(i, env))).collect())),
        TNode::Proj(inner, index) => match route(eval(inner, env)) {
            RouteValue::Tuple(mut fields) => Value::Route(fields.swap_remove(*index)),
            other => panic!("projection from non-tuple {other}"),
        },
        TNode::EnumLit(variant) => r(RouteValue::Enum(variant.clone())),
        TNode::EnumEq(inner, variant) => match route(eval(inner, env)) {
            RouteValue::Enum(v) => r(RouteValue::Bool(&v == variant)),
            other => panic!("enum test on {other}"),
        },
        TNode::Let { binder, bound, body } => {
            let v = eval(bound, env);
            env.push(binder.clone(), v);
            let out = eval(body, env);
            env.pop();
            out
        }
        TNode::NodeLit(n) => Value::Node(n.clone()),
        TNode::EdgeSrc(inner) | TNode::EdgeDst(inner) => match eval(inner, env) {
            Value::Edge(e) => Value::Node(if matches!(t.node, TNode::EdgeSrc(_)) { e.src } else { e.dst }),
            other => panic!("edge endpoint of {other}"),
        },
    }
}

/// Checks that `v` is a value of type `ty` (route conformance, or the
/// right sort for nodes and edges).
pub fn value_conforms(ty: &Type, v: &Value) -> bool {
    match (ty, v) {
        (Type::Route(t), Value::Route(x)) => t.conforms(x),
        (Type::Node, Value::Node(_)) | (Type::Edge, Value::Edge(_)) => true,
        _ => false,
    }
}

/// Convenience for tests and examples: the route type of a route-typed term.
pub fn route_type_of(t: &TExpr) -> Option<&RouteType> {
    t.ty.as_route()
}
