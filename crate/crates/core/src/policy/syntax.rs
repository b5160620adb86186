//! Textual surface syntax for policy expressions.
//!
//! ```text
//! e ::= INT | true | false | VAR
//!     | (lit TYPE VALUE)
//!     | (+ e e) | (min e e) | (<= e e) | (= e e)
//!     | (and e e ...) | (or e e ...) | (not e) | (if e e e)
//!     | (some e) | (none TYPE)
//!     | (match e (none e) ((some VAR) e))
//!     | (tuple e ...) | (proj e INDEX)
//!     | (enum-val VARIANT V1 V2 ...) | (is e VARIANT)
//!     | (let VAR e e)
//!     | (node NAME) | (src e) | (dst e)
//! ```
//!
//! An integer literal `n` has the singleton type `(int n n)`; use
//! `(lit (int lo hi) n)` to give it a wider range.

use thiserror::Error;

use super::ast::{build, Expr};
use crate::route::{parse_int, RouteType, RouteValue};
use crate::sexpr::{self, Sexpr};
use crate::topology::NodeId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("policy syntax error: {0}")]
pub struct SyntaxError(pub String);

/// Forms are recognised only in head position, so any other symbol except
/// the boolean literals can name a variable (including `node`).
const RESERVED: &[&str] = &["true", "false"];

pub fn parse_expr(text: &str) -> Result<Expr, SyntaxError> {
    let s = sexpr::parse(text).map_err(|e| SyntaxError(e.to_string()))?;
    from_sexpr(&s)
}

fn err(s: &Sexpr, what: &str) -> SyntaxError {
    SyntaxError(format!("{what} in `{s}`"))
}

fn ident(s: &Sexpr) -> Result<&str, SyntaxError> {
    match s.as_atom() {
        Some(a) if !RESERVED.contains(&a) && parse_int(s).is_none() => Ok(a),
        _ => Err(err(s, "expected an identifier")),
    }
}

fn route_type(s: &Sexpr) -> Result<RouteType, SyntaxError> {
    RouteType::from_sexpr(s).map_err(|e| SyntaxError(e.to_string()))
}

pub fn from_sexpr(s: &Sexpr) -> Result<Expr, SyntaxError> {
    let items = match s {
        Sexpr::Atom(a) => {
            return Ok(match a.as_str() {
                "true" => build::boolean(true),
                "false" => build::boolean(false),
                _ => match parse_int(s) {
                    Some(n) => build::int(n),
                    None => build::var(ident(s)?),
                },
            })
        }
        Sexpr::List(items) => items,
    };
    if let Some(n) = parse_int(s) {
        return Ok(build::int(n));
    }
    let head = s.head().ok_or_else(|| err(s, "expected an operator"))?;
    let args = &items[1..];
    let arity = |n: usize| if args.len() == n { Ok(()) } else { Err(err(s, &format!("`{head}` takes {n} arguments"))) };
    let sub = |i: usize| from_sexpr(&args[i]);
    Ok(match head {
        "lit" => {
            arity(2)?;
            let ty = route_type(&args[0])?;
            let v = ty.value_from_sexpr(&args[1]).map_err(|e| SyntaxError(e.to_string()))?;
            Expr::Literal(v, ty)
        }
        "+" => {
            arity(2)?;
            build::add(sub(0)?, sub(1)?)
        }
        "min" => {
            arity(2)?;
            build::min(sub(0)?, sub(1)?)
        }
        "<=" => {
            arity(2)?;
            build::le(sub(0)?, sub(1)?)
        }
        "=" => {
            arity(2)?;
            build::eq(sub(0)?, sub(1)?)
        }
        "and" | "or" => {
            if args.len() < 2 {
                return Err(err(s, &format!("`{head}` takes at least 2 arguments")));
            }
            let mut parts = args.iter().map(from_sexpr).collect::<Result<Vec<_>, _>>()?;
            let mut acc = parts.pop().expect("non-empty");
            while let Some(p) = parts.pop() {
                acc = if head == "and" { build::and(p, acc) } else { build::or(p, acc) };
            }
            acc
        }
        "not" => {
            arity(1)?;
            build::not(sub(0)?)
        }
        "if" => {
            arity(3)?;
            build::ite(sub(0)?, sub(1)?, sub(2)?)
        }
        "some" => {
            arity(1)?;
            build::some(sub(0)?)
        }
        "none" => {
            arity(1)?;
            build::none(route_type(&args[0])?)
        }
        "match" => {
            arity(3)?;
            let none_arm = args[1].as_list().filter(|l| l.len() == 2 && l[0].as_atom() == Some("none"));
            let none_arm = none_arm.ok_or_else(|| err(s, "expected `(none e)` arm"))?;
            let some_arm = args[2].as_list().filter(|l| l.len() == 2 && l[0].head() == Some("some"));
            let some_arm = some_arm.ok_or_else(|| err(s, "expected `((some x) e)` arm"))?;
            let pattern = some_arm[0].as_list().expect("checked by head");
            if pattern.len() != 2 {
                return Err(err(s, "expected `(some x)` pattern"));
            }
            build::match_opt(sub(0)?, from_sexpr(&none_arm[1])?, ident(&pattern[1])?, from_sexpr(&some_arm[1])?)
        }
        "tuple" => {
            if args.is_empty() {
                return Err(err(s, "empty tuple"));
            }
            build::tuple(args.iter().map(from_sexpr).collect::<Result<_, _>>()?)
        }
        "proj" => {
            arity(2)?;
            let i = args[1].as_atom().and_then(|a| a.parse::<usize>().ok()).ok_or_else(|| err(s, "bad index"))?;
            build::proj(sub(0)?, i)
        }
        "enum-val" => {
            if args.len() < 2 {
                return Err(err(s, "expected `(enum-val VARIANT V1 ...)`"));
            }
            let names = args
                .iter()
                .map(|a| a.as_atom().ok_or_else(|| err(s, "enum names must be symbols")))
                .collect::<Result<Vec<_>, _>>()?;
            build::enum_lit(&names[1..], names[0])
        }
        "is" => {
            arity(2)?;
            let v = args[1].as_atom().ok_or_else(|| err(s, "variant must be a symbol"))?;
            build::is_variant(sub(0)?, v)
        }
        "let" => {
            arity(3)?;
            build::let_in(ident(&args[0])?, sub(1)?, sub(2)?)
        }
        "node" => {
            arity(1)?;
            let n = args[0].as_atom().ok_or_else(|| err(s, "node name must be a symbol"))?;
            build::node(&NodeId::new(n))
        }
        "src" => {
            arity(1)?;
            build::src(sub(0)?)
        }
        "dst" => {
            arity(1)?;
            build::dst(sub(0)?)
        }
        _ => return Err(err(s, &format!("unknown operator `{head}`"))),
    })
}

fn lst(head: &str, rest: Vec<Sexpr>) -> Sexpr {
    let mut items = vec![Sexpr::atom(head)];
    items.extend(rest);
    Sexpr::list(items)
}

/// Prints an expression in the surface syntax; `parse_expr` inverts it.
pub fn to_sexpr(e: &Expr) -> Sexpr {
    match e {
        Expr::Literal(RouteValue::Int(n), RouteType::BoundedInt { lo, hi }) if lo == n && hi == n => {
            Sexpr::atom(n.to_string())
        }
        Expr::Literal(RouteValue::Bool(b), RouteType::Bool) => Sexpr::atom(b.to_string()),
        Expr::Literal(v, t) => lst("lit", vec![t.to_sexpr(), v.to_sexpr()]),
        Expr::Var(n) => Sexpr::atom(n.to_string()),
        Expr::Add(a, b) => lst("+", vec![to_sexpr(a), to_sexpr(b)]),
        Expr::Min(a, b) => lst("min", vec![to_sexpr(a), to_sexpr(b)]),
        Expr::LessEq(a, b) => lst("<=", vec![to_sexpr(a), to_sexpr(b)]),
        Expr::Eq(a, b) => lst("=", vec![to_sexpr(a), to_sexpr(b)]),
        Expr::And(a, b) => lst("and", vec![to_sexpr(a), to_sexpr(b)]),
        Expr::Or(a, b) => lst("or", vec![to_sexpr(a), to_sexpr(b)]),
        Expr::Not(a) => lst("not", vec![to_sexpr(a)]),
        Expr::If(c, t, f) => lst("if", vec![to_sexpr(c), to_sexpr(t), to_sexpr(f)]),
        Expr::SomeOf(a) => lst("some", vec![to_sexpr(a)]),
        Expr::NoneOf(t) => lst("none", vec![t.to_sexpr()]),
        Expr::MatchOption { scrutinee, none_branch, binder, some_branch } => lst(
            "match",
            vec![
                to_sexpr(scrutinee),
                lst("none", vec![to_sexpr(none_branch)]),
                Sexpr::list(vec![lst("some", vec![Sexpr::atom(binder.to_string())]), to_sexpr(some_branch)]),
            ],
        ),
        Expr::TupleOf(items) => lst("tuple", items.iter().map(to_sexpr).collect()),
        Expr::Proj(a, i) => lst("proj", vec![to_sexpr(a), Sexpr::atom(i.to_string())]),
        Expr::EnumLit { variants, variant } => {
            let mut rest = vec![Sexpr::atom(variant.clone())];
            rest.extend(variants.iter().map(|v| Sexpr::atom(v.clone())));
            lst("enum-val", rest)
        }
        Expr::EnumEq(a, v) => lst("is", vec![to_sexpr(a), Sexpr::atom(v.clone())]),
        Expr::Let { binder, bound, body } => {
            lst("let", vec![Sexpr::atom(binder.to_string()), to_sexpr(bound), to_sexpr(body)])
        }
        Expr::NodeLit(n) => lst("node", vec![Sexpr::atom(n.as_str())]),
        Expr::EdgeSrc(a) => lst("src", vec![to_sexpr(a)]),
        Expr::EdgeDst(a) => lst("dst", vec![to_sexpr(a)]),
    }
}

pub fn print_expr(e: &Expr) -> String {
    to_sexpr(e).to_string()
}
