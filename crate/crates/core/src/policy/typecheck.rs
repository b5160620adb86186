use thiserror::Error;

use super::ast::{Expr, Name, Type, Value};
use crate::route::RouteType;
use crate::topology::NodeId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("unbound variable `{0}`")]
    UnboundVar(Name),
    #[error("type mismatch: expected {expected}, found {found}")]
    TypeMismatch { expected: String, found: String },
    #[error("projection .{index} out of range for a {len}-tuple")]
    ProjOutOfRange { index: usize, len: usize },
    #[error("unknown enum variant `{0}`")]
    UnknownEnumVariant(String),
    #[error("duplicate binding `{0}` in one scope")]
    DuplicateBinding(Name),
}

fn mismatch(expected: impl Into<String>, found: &Type) -> TypeError {
    TypeError::TypeMismatch { expected: expected.into(), found: found.to_string() }
}

/// Scoped variable typing. Later bindings shadow earlier ones.
#[derive(Debug, Clone, Default)]
pub struct TypeEnv {
    bindings: Vec<(Name, Type)>,
}

impl TypeEnv {
    pub fn new() -> Self {
        Self::default()
    }

    /// One scope of parameters; names must be distinct.
    pub fn with_params<'a>(params: impl IntoIterator<Item = (&'a str, Type)>) -> Result<Self, TypeError> {
        let mut env = TypeEnv::new();
        for (name, ty) in params {
            if env.bindings.iter().any(|(n, _)| &**n == name) {
                return Err(TypeError::DuplicateBinding(Name::from(name)));
            }
            env.bindings.push((Name::from(name), ty));
        }
        Ok(env)
    }

    pub fn bind(&mut self, name: &str, ty: Type) -> Result<(), TypeError> {
        if self.bindings.iter().any(|(n, _)| &**n == name) {
            return Err(TypeError::DuplicateBinding(Name::from(name)));
        }
        self.bindings.push((Name::from(name), ty));
        Ok(())
    }

    pub fn lookup(&self, name: &str) -> Option<&Type> {
        self.bindings.iter().rev().find(|(n, _)| &**n == name).map(|(_, t)| t)
    }

    fn push(&mut self, name: Name, ty: Type) {
        self.bindings.push((name, ty));
    }

    fn pop(&mut self) {
        self.bindings.pop();
    }
}

/// Least common route type of two compatible types; integer ranges widen to
/// cover both sides.
pub fn join_route(a: &RouteType, b: &RouteType) -> Option<RouteType> {
    use RouteType::*;
    Some(match (a, b) {
        (BoundedInt { lo: l1, hi: h1 }, BoundedInt { lo: l2, hi: h2 }) => BoundedInt { lo: *l1.min(l2), hi: *h1.max(h2) },
        (Bool, Bool) => Bool,
        (Option(x), Option(y)) => RouteType::option(join_route(x, y)?),
        (Tuple(xs), Tuple(ys)) if xs.len() == ys.len() => {
            Tuple(xs.iter().zip(ys).map(|(x, y)| join_route(x, y)).collect::<std::option::Option<_>>()?)
        }
        (Enum(xs), Enum(ys)) if xs == ys => Enum(xs.clone()),
        _ => return None,
    })
}

pub fn join(a: &Type, b: &Type) -> Option<Type> {
    match (a, b) {
        (Type::Route(x), Type::Route(y)) => join_route(x, y).map(Type::Route),
        (Type::Node, Type::Node) => Some(Type::Node),
        (Type::Edge, Type::Edge) => Some(Type::Edge),
        _ => None,
    }
}

/// `a` is a subtype of `b`: same shape with every integer range of `a`
/// contained in the corresponding range of `b`.
pub fn is_subtype(a: &RouteType, b: &RouteType) -> bool {
    use RouteType::*;
    match (a, b) {
        (BoundedInt { lo: l1, hi: h1 }, BoundedInt { lo: l2, hi: h2 }) => l2 <= l1 && h1 <= h2,
        (Bool, Bool) => true,
        (Option(x), Option(y)) => is_subtype(x, y),
        (Tuple(xs), Tuple(ys)) => xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| is_subtype(x, y)),
        (Enum(xs), Enum(ys)) => xs == ys,
        _ => false,
    }
}

/// An expression annotated with the type of every subterm.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TExpr {
    pub ty: Type,
    pub node: TNode,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TNode {
    Lit(Value),
    Var(Name),
    Add(Box<TExpr>, Box<TExpr>),
    Min(Box<TExpr>, Box<TExpr>),
    LessEq(Box<TExpr>, Box<TExpr>),
    Eq(Box<TExpr>, Box<TExpr>),
    And(Box<TExpr>, Box<TExpr>),
    Or(Box<TExpr>, Box<TExpr>),
    Not(Box<TExpr>),
    If(Box<TExpr>, Box<TExpr>, Box<TExpr>),
    Some(Box<TExpr>),
    None,
    Match { scrutinee: Box<TExpr>, none_branch: Box<TExpr>, binder: Name, some_branch: Box<TExpr> },
    Tuple(Vec<TExpr>),
    Proj(Box<TExpr>, usize),
    EnumLit(String),
    EnumEq(Box<TExpr>, String),
    Let { binder: Name, bound: Box<TExpr>, body: Box<TExpr> },
    NodeLit(NodeId),
    EdgeSrc(Box<TExpr>),
    EdgeDst(Box<TExpr>),
}

impl TExpr {
    /// Integer bounds of this term's type; panics if it is not an integer.
    pub fn int_bounds(&self) -> (i64, i64) {
        match &self.ty {
            Type::Route(RouteType::BoundedInt { lo, hi }) => (*lo, *hi),
            other => panic!("int_bounds on {other}"),
        }
    }
}

fn expect_int(t: &TExpr) -> Result<(), TypeError> {
    match &t.ty {
        Type::Route(RouteType::BoundedInt { .. }) => Ok(()),
        other => Err(mismatch("a bounded integer", other)),
    }
}

fn expect_bool(t: &TExpr) -> Result<(), TypeError> {
    match &t.ty {
        Type::Route(RouteType::Bool) => Ok(()),
        other => Err(mismatch("bool", other)),
    }
}

fn unify(a: &TExpr, b: &TExpr) -> Result<Type, TypeError> {
    join(&a.ty, &b.ty).ok_or_else(|| mismatch(a.ty.to_string(), &b.ty))
}

/// Type checks `e` and returns the annotated tree.
pub fn annotate(e: &Expr, env: &TypeEnv) -> Result<TExpr, TypeError> {
    let mut env = env.clone();
    go(e, &mut env)
}

/// Returns the unique type of `e` under `env`.
pub fn type_check(e: &Expr, env: &TypeEnv) -> Result<Type, TypeError> {
    annotate(e, env).map(|t| t.ty)
}

fn bx(t: TExpr) -> Box<TExpr> {
    Box::new(t)
}

fn go(e: &Expr, env: &mut TypeEnv) -> Result<TExpr, TypeError> {
    Ok(match e {
        Expr::Literal(v, t) => {
            t.validate().map_err(|err| TypeError::TypeMismatch { expected: t.to_string(), found: err.to_string() })?;
            if !t.conforms(v) {
                return Err(TypeError::TypeMismatch { expected: t.to_string(), found: v.to_sexpr().to_string() });
            }
            TExpr { ty: Type::Route(t.clone()), node: TNode::Lit(Value::Route(v.clone())) }
        }
        Expr::Var(name) => {
            let ty = env.lookup(name).cloned().ok_or_else(|| TypeError::UnboundVar(name.clone()))?;
            TExpr { ty, node: TNode::Var(name.clone()) }
        }
        Expr::Add(a, b) | Expr::Min(a, b) => {
            let (ta, tb) = (go(a, env)?, go(b, env)?);
            expect_int(&ta)?;
            expect_int(&tb)?;
            let ty = unify(&ta, &tb)?;
            let node = if matches!(e, Expr::Add(..)) { TNode::Add(bx(ta), bx(tb)) } else { TNode::Min(bx(ta), bx(tb)) };
            TExpr { ty, node }
        }
        Expr::LessEq(a, b) => {
            let (ta, tb) = (go(a, env)?, go(b, env)?);
            expect_int(&ta)?;
            expect_int(&tb)?;
            TExpr { ty: Type::bool(), node: TNode::LessEq(bx(ta), bx(tb)) }
        }
        Expr::Eq(a, b) => {
            let (ta, tb) = (go(a, env)?, go(b, env)?);
            unify(&ta, &tb)?;
            TExpr { ty: Type::bool(), node: TNode::Eq(bx(ta), bx(tb)) }
        }
        Expr::And(a, b) | Expr::Or(a, b) => {
            let (ta, tb) = (go(a, env)?, go(b, env)?);
            expect_bool(&ta)?;
            expect_bool(&tb)?;
            let node = if matches!(e, Expr::And(..)) { TNode::And(bx(ta), bx(tb)) } else { TNode::Or(bx(ta), bx(tb)) };
            TExpr { ty: Type::bool(), node }
        }
        Expr::Not(a) => {
            let ta = go(a, env)?;
            expect_bool(&ta)?;
            TExpr { ty: Type::bool(), node: TNode::Not(bx(ta)) }
        }
        Expr::If(c, t, f) => {
            let tc = go(c, env)?;
            expect_bool(&tc)?;
            let (tt, tf) = (go(t, env)?, go(f, env)?);
            let ty = unify(&tt, &tf)?;
            TExpr { ty, node: TNode::If(bx(tc), bx(tt), bx(tf)) }
        }
        Expr::SomeOf(inner) => {
            let ti = go(inner, env)?;
            let Type::Route(r) = &ti.ty else {
                return Err(mismatch("a route type", &ti.ty));
            };
            TExpr { ty: Type::Route(RouteType::option(r.clone())), node: TNode::Some(bx(ti)) }
        }
        Expr::NoneOf(payload) => {
            payload.validate().map_err(|err| TypeError::TypeMismatch { expected: "a route type".into(), found: err.to_string() })?;
            TExpr { ty: Type::Route(RouteType::option(payload.clone())), node: TNode::None }
        }
        Expr::MatchOption { scrutinee, none_branch, binder, some_branch } => {
            let ts = go(scrutinee, env)?;
            let Type::Route(RouteType::Option(inner)) = &ts.ty else {
                return Err(mismatch("an option", &ts.ty));
            };
            let inner = Type::Route((**inner).clone());
            let tn = go(none_branch, env)?;
            env.push(binder.clone(), inner);
            let tsome = go(some_branch, env);
            env.pop();
            let tsome = tsome?;
            let ty = unify(&tn, &tsome)?;
            TExpr {
                ty,
                node: TNode::Match { scrutinee: bx(ts), none_branch: bx(tn), binder: binder.clone(), some_branch: bx(tsome) },
            }
        }
        Expr::TupleOf(items) => {
            if items.is_empty() {
                return Err(TypeError::TypeMismatch { expected: "a non-empty tuple".into(), found: "()".into() });
            }
            let typed: Vec<TExpr> = items.iter().map(|i| go(i, env)).collect::<Result<_, _>>()?;
            let mut elems = Vec::with_capacity(typed.len());
            for t in &typed {
                match &t.ty {
                    Type::Route(r) => elems.push(r.clone()),
                    other => return Err(mismatch("a route type", other)),
                }
            }
            TExpr { ty: Type::Route(RouteType::Tuple(elems)), node: TNode::Tuple(typed) }
        }
        Expr::Proj(inner, index) => {
            let ti = go(inner, env)?;
            let Type::Route(RouteType::Tuple(elems)) = &ti.ty else {
                return Err(mismatch("a tuple", &ti.ty));
            };
            let ty = elems
                .get(*index)
                .cloned()
                .ok_or(TypeError::ProjOutOfRange { index: *index, len: elems.len() })?;
            TExpr { ty: Type::Route(ty), node: TNode::Proj(bx(ti), *index) }
        }
        Expr::EnumLit { variants, variant } => {
            let ty = RouteType::Enum(variants.clone());
            ty.validate().map_err(|err| TypeError::TypeMismatch { expected: "an enum".into(), found: err.to_string() })?;
            if !variants.contains(variant) {
                return Err(TypeError::UnknownEnumVariant(variant.clone()));
            }
            TExpr { ty: Type::Route(ty), node: TNode::EnumLit(variant.clone()) }
        }
        Expr::EnumEq(inner, variant) => {
            let ti = go(inner, env)?;
            let Type::Route(RouteType::Enum(variants)) = &ti.ty else {
                return Err(mismatch("an enum", &ti.ty));
            };
            if !variants.contains(variant) {
                return Err(TypeError::UnknownEnumVariant(variant.clone()));
            }
            TExpr { ty: Type::bool(), node: TNode::EnumEq(bx(ti), variant.clone()) }
        }
        Expr::Let { binder, bound, body } => {
            let tb = go(bound, env)?;
            env.push(binder.clone(), tb.ty.clone());
            let tbody = go(body, env);
            env.pop();
            let tbody = tbody?;
            TExpr { ty: tbody.ty.clone(), node: TNode::Let { binder: binder.clone(), bound: bx(tb), body: bx(tbody) } }
        }
        Expr::NodeLit(n) => TExpr { ty: Type::Node, node: TNode::NodeLit(n.clone()) },
        Expr::EdgeSrc(inner) | Expr::EdgeDst(inner) => {
            let ti = go(inner, env)?;
            if ti.ty != Type::Edge {
                return Err(mismatch("edge", &ti.ty));
            }
            let node = if matches!(e, Expr::EdgeSrc(_)) { TNode::EdgeSrc(bx(ti)) } else { TNode::EdgeDst(bx(ti)) };
            TExpr { ty: Type::Node, node }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::super::ast::build::*;
    use super::*;

    fn hops() -> RouteType {
        RouteType::int(0, 15)
    }

    #[test]
    fn bounded_add_keeps_declared_range() {
        let env = TypeEnv::with_params([("x", Type::Route(hops()))]).unwrap();
        assert_eq!(type_check(&add(var("x"), int(1)), &env).unwrap(), Type::Route(hops()));
    }

    #[test]
    fn match_branches_must_agree() {
        let env = TypeEnv::with_params([("r", Type::Route(RouteType::option(hops())))]).unwrap();
        let e = match_opt(var("r"), boolean(false), "h", add(var("h"), int(1)));
        assert!(matches!(type_check(&e, &env), Err(TypeError::TypeMismatch { .. })));
    }

    #[test]
    fn option_min_merge_types() {
        let opt = RouteType::option(hops());
        let env = TypeEnv::with_params([("r1", Type::Route(opt.clone())), ("r2", Type::Route(opt.clone()))]).unwrap();
        let merge = match_opt(
            var("r1"),
            var("r2"),
            "h1",
            match_opt(var("r2"), var("r1"), "h2", ite(le(var("h1"), var("h2")), var("r1"), var("r2"))),
        );
        assert_eq!(type_check(&merge, &env).unwrap(), Type::Route(opt.clone()));
        let via_min = match_opt(var("r1"), var("r2"), "h1", match_opt(var("r2"), var("r1"), "h2", some(min(var("h1"), var("h2")))));
        assert_eq!(type_check(&via_min, &env).unwrap(), Type::Route(opt));
    }

    #[test]
    fn error_cases() {
        let env = TypeEnv::new();
        assert_eq!(type_check(&var("nope"), &env), Err(TypeError::UnboundVar("nope".into())));
        assert_eq!(
            type_check(&proj(tuple(vec![int(1)]), 3), &env),
            Err(TypeError::ProjOutOfRange { index: 3, len: 1 })
        );
        assert_eq!(
            type_check(&is_variant(enum_lit(&["Up", "Down"], "Up"), "Left"), &env),
            Err(TypeError::UnknownEnumVariant("Left".into()))
        );
        assert!(matches!(TypeEnv::with_params([("a", Type::Node), ("a", Type::Edge)]), Err(TypeError::DuplicateBinding(_))));
        assert!(type_check(&add(boolean(true), int(1)), &env).is_err());
    }

    #[test]
    fn join_and_subtype() {
        assert_eq!(join_route(&RouteType::int(0, 0), &RouteType::int(3, 7)), Some(RouteType::int(0, 7)));
        assert!(is_subtype(&RouteType::int(1, 2), &RouteType::int(0, 15)));
        assert!(!is_subtype(&RouteType::int(0, 20), &RouteType::int(0, 15)));
        assert!(join_route(&RouteType::Bool, &RouteType::int(0, 1)).is_none());
    }
}
