//! Solver verdicts and model decoding.

use std::collections::BTreeMap;

use thiserror::Error;

use super::encode::{VarRole, VarSchema};
use crate::route::{RouteType, RouteValue};
use crate::sexpr::{self, Sexpr};
use crate::srp::Labeling;

/// A constant from a solver model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelValue {
    Bool(bool),
    Int(i64),
}

impl ModelValue {
    fn from_sexpr(s: &Sexpr) -> Option<Self> {
        match s {
            Sexpr::Atom(a) if a == "true" => Some(ModelValue::Bool(true)),
            Sexpr::Atom(a) if a == "false" => Some(ModelValue::Bool(false)),
            Sexpr::Atom(a) => a.parse().ok().map(ModelValue::Int),
            Sexpr::List(items) => match items.as_slice() {
                [Sexpr::Atom(minus), Sexpr::Atom(n)] if minus == "-" => n.parse::<i64>().ok().map(|n| ModelValue::Int(-n)),
                _ => None,
            },
        }
    }
}

/// Variable assignments returned for `get-value`, by unquoted name.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Model {
    pub values: BTreeMap<String, ModelValue>,
    /// The values in the order the solver reported them.
    pub ordered: Vec<ModelValue>,
}

/// Outcome of one solver call.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolverVerdict {
    Sat(Model),
    Unsat,
    Unknown(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("model does not match the variable schema at `{0}`")]
    SchemaMismatch(String),
    #[error("model value {value} of `{name}` is outside its declared range")]
    OutOfBoundsConstant { name: String, value: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed solver output: {0}")]
pub struct OutputError(pub String);

/// Parses `sat`/`unsat`/`unknown` and, after `sat`, the `get-value` pairs.
pub fn parse_solver_output(stdout: &str) -> Result<SolverVerdict, OutputError> {
    let items = sexpr::parse_all(stdout).map_err(|e| OutputError(e.to_string()))?;
    let mut it = items.into_iter();
    let head = it.next().ok_or_else(|| OutputError("empty output".into()))?;
    match head.as_atom() {
        Some("unsat") => Ok(SolverVerdict::Unsat),
        Some("unknown") => Ok(SolverVerdict::Unknown("solver answered unknown".into())),
        Some("sat") => {
            let mut model = Model::default();
            if let Some(pairs) = it.next() {
                if pairs.head() == Some("error") {
                    return Err(OutputError(pairs.to_string()));
                }
                let pairs = pairs.as_list().ok_or_else(|| OutputError(format!("expected value list, got {pairs}")))?;
                for p in pairs {
                    let (name, value) = match p.as_list() {
                        Some([n, v]) => (n, v),
                        _ => return Err(OutputError(format!("bad model entry {p}"))),
                    };
                    let value =
                        ModelValue::from_sexpr(value).ok_or_else(|| OutputError(format!("bad model value {value}")))?;
                    if let Some(n) = name.as_atom() {
                        model.values.insert(n.to_string(), value);
                    }
                    model.ordered.push(value);
                }
            }
            Ok(SolverVerdict::Sat(model))
        }
        _ => Err(OutputError(format!("unexpected first response {head}"))),
    }
}

/// Rebuilds a route of type `ty` from flattened leaves pulled from `next`,
/// in schema order. Payload leaves of a `None` are consumed and ignored.
pub fn rebuild_value(
    ty: &RouteType,
    next: &mut dyn FnMut(&RouteType) -> Option<ModelValue>,
) -> Result<RouteValue, SchemaError> {
    rebuild(ty, next, true)
}

fn rebuild(
    ty: &RouteType,
    next: &mut dyn FnMut(&RouteType) -> Option<ModelValue>,
    live: bool,
) -> Result<RouteValue, SchemaError> {
    let mismatch = || SchemaError::SchemaMismatch(ty.to_string());
    let out_of_bounds = |value| SchemaError::OutOfBoundsConstant { name: ty.to_string(), value };
    match ty {
        RouteType::Option(inner) => {
            let Some(ModelValue::Bool(is_some)) = next(ty) else { return Err(mismatch()) };
            let payload = rebuild(inner, next, live && is_some)?;
            Ok(if is_some { RouteValue::some(payload) } else { RouteValue::none() })
        }
        RouteType::Tuple(ts) => {
            Ok(RouteValue::Tuple(ts.iter().map(|t| rebuild(t, next, live)).collect::<Result<_, _>>()?))
        }
        RouteType::BoundedInt { lo, hi } => match next(ty) {
            Some(ModelValue::Int(n)) if (*lo..=*hi).contains(&n) => Ok(RouteValue::Int(n)),
            Some(ModelValue::Int(n)) if live => Err(out_of_bounds(n)),
            Some(ModelValue::Int(_)) => Ok(RouteValue::Int(*lo)),
            _ => Err(mismatch()),
        },
        RouteType::Bool => match next(ty) {
            Some(ModelValue::Bool(b)) => Ok(RouteValue::Bool(b)),
            _ => Err(mismatch()),
        },
        RouteType::Enum(vs) => match next(ty) {
            Some(ModelValue::Int(n)) if n >= 0 && (n as usize) < vs.len() => Ok(RouteValue::Enum(vs[n as usize].clone())),
            Some(ModelValue::Int(n)) if live => Err(out_of_bounds(n)),
            Some(ModelValue::Int(_)) => Ok(RouteValue::Enum(vs[0].clone())),
            _ => Err(mismatch()),
        },
    }
}

/// Decodes the route of every node in `schema` from `model`.
pub fn parse_model(model: &Model, schema: &VarSchema) -> Result<Labeling, SchemaError> {
    let mut lab = Labeling::new();
    for nv in &schema.nodes {
        let mut vars = nv.vars.iter();
        let mut err = None;
        let mut next = |_: &RouteType| {
            let var = vars.next()?;
            let got = model.values.get(&var.name).copied();
            if got.is_none() {
                err.get_or_insert_with(|| SchemaError::SchemaMismatch(var.name.clone()));
            }
            match (&var.role, got?) {
                (VarRole::IsSome | VarRole::Bool, v @ ModelValue::Bool(_)) => Some(v),
                (VarRole::Int { .. } | VarRole::EnumCode { .. }, v @ ModelValue::Int(_)) => Some(v),
                _ => {
                    err.get_or_insert_with(|| SchemaError::SchemaMismatch(var.name.clone()));
                    None
                }
            }
        };
        let value = rebuild_value(&nv.route_type, &mut next);
        if let Some(e) = err {
            return Err(e);
        }
        let value = value.map_err(|e| match e {
            SchemaError::OutOfBoundsConstant { value, .. } => {
                SchemaError::OutOfBoundsConstant { name: nv.node.to_string(), value }
            }
            other => other,
        })?;
        if vars.next().is_some() {
            return Err(SchemaError::SchemaMismatch(nv.node.to_string()));
        }
        lab.insert(nv.node.clone(), value);
    }
    Ok(lab)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdicts() {
        assert_eq!(parse_solver_output("unsat\n").unwrap(), SolverVerdict::Unsat);
        assert!(matches!(parse_solver_output("unknown\n").unwrap(), SolverVerdict::Unknown(_)));
        let SolverVerdict::Sat(m) = parse_solver_output("sat\n((a true)\n (|b c| (- 3)))\n").unwrap() else {
            panic!("expected sat")
        };
        assert_eq!(m.values["a"], ModelValue::Bool(true));
        assert_eq!(m.values["b c"], ModelValue::Int(-3));
        assert!(parse_solver_output("").is_err());
        assert!(parse_solver_output("(error \"x\")").is_err());
    }

    #[test]
    fn rebuild_ignores_none_payload() {
        let ty = RouteType::option(RouteType::int(0, 15));
        let mut leaves = vec![ModelValue::Bool(false), ModelValue::Int(99)].into_iter();
        assert_eq!(rebuild_value(&ty, &mut |_| leaves.next()), Ok(RouteValue::none()));
        let mut leaves = vec![ModelValue::Bool(true), ModelValue::Int(99)].into_iter();
        assert!(matches!(rebuild_value(&ty, &mut |_| leaves.next()), Err(SchemaError::OutOfBoundsConstant { .. })));
    }
}
