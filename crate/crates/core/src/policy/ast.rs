use std::fmt;
use std::sync::Arc;

use crate::route::{RouteType, RouteValue};
use crate::topology::{Edge, NodeId};

pub type Name = Arc<str>;

/// Untyped policy expression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Literal(RouteValue, RouteType),
    Var(Name),
    /// Saturating addition on bounded integers.
    Add(Box<Expr>, Box<Expr>),
    Min(Box<Expr>, Box<Expr>),
    LessEq(Box<Expr>, Box<Expr>),
    Eq(Box<Expr>, Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
    If(Box<Expr>, Box<Expr>, Box<Expr>),
    SomeOf(Box<Expr>),
    /// `None` of an option whose payload has the given type.
    NoneOf(RouteType),
    MatchOption { scrutinee: Box<Expr>, none_branch: Box<Expr>, binder: Name, some_branch: Box<Expr> },
    TupleOf(Vec<Expr>),
    Proj(Box<Expr>, usize),
    EnumLit { variants: Vec<String>, variant: String },
    EnumEq(Box<Expr>, String),
    Let { binder: Name, bound: Box<Expr>, body: Box<Expr> },
    NodeLit(NodeId),
    /// Source endpoint of an edge-valued expression.
    EdgeSrc(Box<Expr>),
    /// Target endpoint of an edge-valued expression.
    EdgeDst(Box<Expr>),
}

/// Types of policy expressions: route types plus the node and edge sorts.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Type {
    Route(RouteType),
    Node,
    Edge,
}

impl Type {
    pub fn bool() -> Self {
        Type::Route(RouteType::Bool)
    }

    pub fn as_route(&self) -> Option<&RouteType> {
        match self {
            Type::Route(r) => Some(r),
            _ => None,
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Route(r) => write!(f, "{r}"),
            Type::Node => f.write_str("node"),
            Type::Edge => f.write_str("edge"),
        }
    }
}

/// Runtime values of the interpreter.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Route(RouteValue),
    Node(NodeId),
    Edge(Edge),
}

impl Value {
    pub fn as_route(&self) -> Option<&RouteValue> {
        match self {
            Value::Route(r) => Some(r),
            _ => None,
        }
    }

    pub fn into_route(self) -> Option<RouteValue> {
        match self {
            Value::Route(r) => Some(r),
            _ => None,
        }
    }

    pub fn as_node(&self) -> Option<&NodeId> {
        match self {
            Value::Node(n) => Some(n),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Route(r) => write!(f, "{r}"),
            Value::Node(n) => write!(f, "{n}"),
            Value::Edge(e) => write!(f, "{e}"),
        }
    }
}

/// Short constructors used by the builtin policies and tests.
pub mod build {
    use super::*;

    pub fn var(name: &str) -> Expr {
        Expr::Var(Name::from(name))
    }

    /// Integer literal typed as the singleton range `n..=n`.
    pub fn int(n: i64) -> Expr {
        Expr::Literal(RouteValue::Int(n), RouteType::int(n, n))
    }

    pub fn int_in(n: i64, lo: i64, hi: i64) -> Expr {
        Expr::Literal(RouteValue::Int(n), RouteType::int(lo, hi))
    }

    pub fn boolean(b: bool) -> Expr {
        Expr::Literal(RouteValue::Bool(b), RouteType::Bool)
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::Add(Box::new(a), Box::new(b))
    }

    pub fn min(a: Expr, b: Expr) -> Expr {
        Expr::Min(Box::new(a), Box::new(b))
    }

    pub fn le(a: Expr, b: Expr) -> Expr {
        Expr::LessEq(Box::new(a), Box::new(b))
    }

    pub fn eq(a: Expr, b: Expr) -> Expr {
        Expr::Eq(Box::new(a), Box::new(b))
    }

    pub fn and(a: Expr, b: Expr) -> Expr {
        Expr::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Expr, b: Expr) -> Expr {
        Expr::Or(Box::new(a), Box::new(b))
    }

    /// Right-nested disjunction; `false` when empty.
    pub fn any(items: Vec<Expr>) -> Expr {
        let mut it = items.into_iter().rev();
        match it.next() {
            None => boolean(false),
            Some(last) => it.fold(last, |acc, e| or(e, acc)),
        }
    }

    pub fn not(a: Expr) -> Expr {
        Expr::Not(Box::new(a))
    }

    pub fn ite(c: Expr, t: Expr, e: Expr) -> Expr {
        Expr::If(Box::new(c), Box::new(t), Box::new(e))
    }

    pub fn some(e: Expr) -> Expr {
        Expr::SomeOf(Box::new(e))
    }

    pub fn none(payload: RouteType) -> Expr {
        Expr::NoneOf(payload)
    }

    pub fn match_opt(scrutinee: Expr, none_branch: Expr, binder: &str, some_branch: Expr) -> Expr {
        Expr::MatchOption {
            scrutinee: Box::new(scrutinee),
            none_branch: Box::new(none_branch),
            binder: Name::from(binder),
            some_branch: Box::new(some_branch),
        }
    }

    pub fn tuple(items: Vec<Expr>) -> Expr {
        Expr::TupleOf(items)
    }

    pub fn proj(e: Expr, i: usize) -> Expr {
        Expr::Proj(Box::new(e), i)
    }

    pub fn enum_lit(variants: &[&str], variant: &str) -> Expr {
        Expr::EnumLit { variants: variants.iter().map(|s| s.to_string()).collect(), variant: variant.to_string() }
    }

    pub fn is_variant(e: Expr, variant: &str) -> Expr {
        Expr::EnumEq(Box::new(e), variant.to_string())
    }

    pub fn let_in(binder: &str, bound: Expr, body: Expr) -> Expr {
        Expr::Let { binder: Name::from(binder), bound: Box::new(bound), body: Box::new(body) }
    }

    pub fn node(n: &NodeId) -> Expr {
        Expr::NodeLit(n.clone())
    }

    pub fn src(e: Expr) -> Expr {
        Expr::EdgeSrc(Box::new(e))
    }

    pub fn dst(e: Expr) -> Expr {
        Expr::EdgeDst(Box::new(e))
    }
}
