//! Finite route types and route values.

use std::fmt;

use thiserror::Error;

use crate::sexpr::{self, Sexpr};

/// A finite route domain.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RouteType {
    BoundedInt { lo: i64, hi: i64 },
    Bool,
    Option(Box<RouteType>),
    Tuple(Vec<RouteType>),
    Enum(Vec<String>),
}

/// A value of some [`RouteType`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RouteValue {
    Int(i64),
    Bool(bool),
    Option(Option<Box<RouteValue>>),
    Tuple(Vec<RouteValue>),
    Enum(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RouteError {
    #[error("invalid route type: {0}")]
    InvalidType(String),
    #[error("value `{value}` does not conform to type `{ty}`")]
    NonConforming { value: String, ty: String },
    #[error("cannot parse route syntax `{0}`")]
    Syntax(String),
}

impl RouteType {
    pub fn int(lo: i64, hi: i64) -> Self {
        RouteType::BoundedInt { lo, hi }
    }

    pub fn option(inner: RouteType) -> Self {
        RouteType::Option(Box::new(inner))
    }

    pub fn enumeration<S: Into<String>>(variants: impl IntoIterator<Item = S>) -> Self {
        RouteType::Enum(variants.into_iter().map(Into::into).collect())
    }

    /// Checks the structural invariants (bounds ordered, non-empty enums
    /// and tuples, distinct variant names).
    pub fn validate(&self) -> Result<(), RouteError> {
        match self {
            RouteType::BoundedInt { lo, hi } if lo > hi => {
                Err(RouteError::InvalidType(format!("empty integer range {lo}..={hi}")))
            }
            RouteType::BoundedInt { .. } | RouteType::Bool => Ok(()),
            RouteType::Option(inner) => inner.validate(),
            RouteType::Tuple(elems) => {
                if elems.is_empty() {
                    return Err(RouteError::InvalidType("empty tuple".into()));
                }
                elems.iter().try_for_each(RouteType::validate)
            }
            RouteType::Enum(variants) => {
                if variants.is_empty() {
                    return Err(RouteError::InvalidType("enum without variants".into()));
                }
                for (i, v) in variants.iter().enumerate() {
                    if variants[..i].contains(v) {
                        return Err(RouteError::InvalidType(format!("duplicate variant {v}")));
                    }
                }
                Ok(())
            }
        }
    }

    pub fn variant_index(&self, name: &str) -> Option<usize> {
        match self {
            RouteType::Enum(vs) => vs.iter().position(|v| v == name),
            _ => None,
        }
    }

    pub fn conforms(&self, value: &RouteValue) -> bool {
        match (self, value) {
            (RouteType::BoundedInt { lo, hi }, RouteValue::Int(n)) => lo <= n && n <= hi,
            (RouteType::Bool, RouteValue::Bool(_)) => true,
            (RouteType::Option(_), RouteValue::Option(None)) => true,
            (RouteType::Option(inner), RouteValue::Option(Some(v))) => inner.conforms(v),
            (RouteType::Tuple(ts), RouteValue::Tuple(vs)) => {
                ts.len() == vs.len() && ts.iter().zip(vs).all(|(t, v)| t.conforms(v))
            }
            (RouteType::Enum(variants), RouteValue::Enum(v)) => variants.contains(v),
            _ => false,
        }
    }

    pub fn check(&self, value: &RouteValue) -> Result<(), RouteError> {
        if self.conforms(value) {
            Ok(())
        } else {
            Err(RouteError::NonConforming { value: value.to_sexpr().to_string(), ty: self.to_string() })
        }
    }

    /// Number of values in the domain, saturating at `u128::MAX`.
    pub fn cardinality(&self) -> u128 {
        match self {
            RouteType::BoundedInt { lo, hi } => (*hi as i128 - *lo as i128 + 1) as u128,
            RouteType::Bool => 2,
            RouteType::Option(inner) => inner.cardinality().saturating_add(1),
            RouteType::Tuple(ts) => ts.iter().fold(1u128, |acc, t| acc.saturating_mul(t.cardinality())),
            RouteType::Enum(vs) => vs.len() as u128,
        }
    }

    /// All values of the domain, in a fixed order. Intended for small domains.
    pub fn values(&self) -> Vec<RouteValue> {
        match self {
            RouteType::BoundedInt { lo, hi } => (*lo..=*hi).map(RouteValue::Int).collect(),
            RouteType::Bool => vec![RouteValue::Bool(false), RouteValue::Bool(true)],
            RouteType::Option(inner) => std::iter::once(RouteValue::none())
                .chain(inner.values().into_iter().map(RouteValue::some))
                .collect(),
            RouteType::Tuple(ts) => {
                let mut acc: Vec<Vec<RouteValue>> = vec![Vec::new()];
                for t in ts {
                    let vals = t.values();
                    acc = acc
                        .into_iter()
                        .flat_map(|prefix| {
                            vals.iter().map(move |v| {
                                let mut p = prefix.clone();
                                p.push(v.clone());
                                p
                            })
                        })
                        .collect();
                }
                acc.into_iter().map(RouteValue::Tuple).collect()
            }
            RouteType::Enum(vs) => vs.iter().cloned().map(RouteValue::Enum).collect(),
        }
    }

    /// The value used for the unconstrained payload of a `None`.
    pub fn default_value(&self) -> RouteValue {
        match self {
            RouteType::BoundedInt { lo, .. } => RouteValue::Int(*lo),
            RouteType::Bool => RouteValue::Bool(false),
            RouteType::Option(_) => RouteValue::none(),
            RouteType::Tuple(ts) => RouteValue::Tuple(ts.iter().map(RouteType::default_value).collect()),
            RouteType::Enum(vs) => RouteValue::Enum(vs[0].clone()),
        }
    }

    pub fn to_sexpr(&self) -> Sexpr {
        match self {
            RouteType::BoundedInt { lo, hi } => {
                Sexpr::list(vec![Sexpr::atom("int"), Sexpr::atom(lo.to_string()), Sexpr::atom(hi.to_string())])
            }
            RouteType::Bool => Sexpr::atom("bool"),
            RouteType::Option(inner) => Sexpr::list(vec![Sexpr::atom("option"), inner.to_sexpr()]),
            RouteType::Tuple(ts) => {
                let mut items = vec![Sexpr::atom("tuple")];
                items.extend(ts.iter().map(RouteType::to_sexpr));
                Sexpr::list(items)
            }
            RouteType::Enum(vs) => {
                let mut items = vec![Sexpr::atom("enum")];
                items.extend(vs.iter().map(|v| Sexpr::atom(v.clone())));
                Sexpr::list(items)
            }
        }
    }

    pub fn from_sexpr(e: &Sexpr) -> Result<Self, RouteError> {
        let bad = || RouteError::Syntax(e.to_string());
        let ty = match e {
            Sexpr::Atom(a) if a == "bool" => RouteType::Bool,
            Sexpr::Atom(_) => return Err(bad()),
            Sexpr::List(items) => match (e.head(), items.len()) {
                (Some("int"), 3) => {
                    let lo = parse_int(&items[1]).ok_or_else(bad)?;
                    let hi = parse_int(&items[2]).ok_or_else(bad)?;
                    RouteType::int(lo, hi)
                }
                (Some("option"), 2) => RouteType::option(RouteType::from_sexpr(&items[1])?),
                (Some("tuple"), n) if n >= 2 => {
                    RouteType::Tuple(items[1..].iter().map(RouteType::from_sexpr).collect::<Result<_, _>>()?)
                }
                (Some("enum"), n) if n >= 2 => RouteType::Enum(
                    items[1..]
                        .iter()
                        .map(|v| v.as_atom().map(str::to_string).ok_or_else(bad))
                        .collect::<Result<_, _>>()?,
                ),
                _ => return Err(bad()),
            },
        };
        ty.validate()?;
        Ok(ty)
    }

    pub fn parse(text: &str) -> Result<Self, RouteError> {
        let e = sexpr::parse(text).map_err(|err| RouteError::Syntax(err.to_string()))?;
        Self::from_sexpr(&e)
    }

    /// Parses a value written in the s-expression value syntax
    /// (`none`, `(some 2)`, `(tuple 2 Up)`, `true`, `3`, `Up`).
    pub fn parse_value(&self, text: &str) -> Result<RouteValue, RouteError> {
        let e = sexpr::parse(text).map_err(|err| RouteError::Syntax(err.to_string()))?;
        self.value_from_sexpr(&e)
    }

    pub fn value_from_sexpr(&self, e: &Sexpr) -> Result<RouteValue, RouteError> {
        let bad = || RouteError::Syntax(format!("`{e}` as `{self}`"));
        let v = match self {
            RouteType::BoundedInt { .. } => RouteValue::Int(parse_int(e).ok_or_else(bad)?),
            RouteType::Bool => match e.as_atom() {
                Some("true") => RouteValue::Bool(true),
                Some("false") => RouteValue::Bool(false),
                _ => return Err(bad()),
            },
            RouteType::Option(inner) => match e {
                Sexpr::Atom(a) if a == "none" => RouteValue::none(),
                Sexpr::List(items) if e.head() == Some("some") && items.len() == 2 => {
                    RouteValue::some(inner.value_from_sexpr(&items[1])?)
                }
                _ => return Err(bad()),
            },
            RouteType::Tuple(ts) => match e {
                Sexpr::List(items) if e.head() == Some("tuple") && items.len() == ts.len() + 1 => RouteValue::Tuple(
                    ts.iter().zip(&items[1..]).map(|(t, x)| t.value_from_sexpr(x)).collect::<Result<_, _>>()?,
                ),
                _ => return Err(bad()),
            },
            RouteType::Enum(_) => RouteValue::Enum(e.as_atom().ok_or_else(bad)?.to_string()),
        };
        self.check(&v)?;
        Ok(v)
    }
}

pub(crate) fn parse_int(e: &Sexpr) -> Option<i64> {
    match e {
        Sexpr::Atom(a) => a.parse().ok(),
        // SMT-LIB writes negative numerals as `(- 5)`.
        Sexpr::List(items) if items.len() == 2 && items[0].as_atom() == Some("-") => {
            items[1].as_atom()?.parse::<i64>().ok().map(|n| -n)
        }
        _ => None,
    }
}

impl fmt::Display for RouteType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sexpr())
    }
}

impl RouteValue {
    pub fn none() -> Self {
        RouteValue::Option(None)
    }

    pub fn some(v: RouteValue) -> Self {
        RouteValue::Option(Some(Box::new(v)))
    }

    pub fn is_none(&self) -> bool {
        matches!(self, RouteValue::Option(None))
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            RouteValue::Int(n) => Some(*n),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            RouteValue::Bool(b) => Some(*b),
            _ => None,
        }
    }

    /// The payload of a `Some`, if any.
    pub fn payload(&self) -> Option<&RouteValue> {
        match self {
            RouteValue::Option(Some(v)) => Some(v),
            _ => None,
        }
    }

    /// Hop count carried by the shortest-path style routes used by the
    /// builtin policies: `Some h` or `Some (h, ...)`.
    pub fn hops(&self) -> Option<i64> {
        match self.payload()? {
            RouteValue::Int(h) => Some(*h),
            RouteValue::Tuple(fields) => fields.first()?.as_int(),
            _ => None,
        }
    }

    pub fn to_sexpr(&self) -> Sexpr {
        match self {
            RouteValue::Int(n) => Sexpr::atom(n.to_string()),
            RouteValue::Bool(b) => Sexpr::atom(b.to_string()),
            RouteValue::Option(None) => Sexpr::atom("none"),
            RouteValue::Option(Some(v)) => Sexpr::list(vec![Sexpr::atom("some"), v.to_sexpr()]),
            RouteValue::Tuple(vs) => {
                let mut items = vec![Sexpr::atom("tuple")];
                items.extend(vs.iter().map(RouteValue::to_sexpr));
                Sexpr::list(items)
            }
            RouteValue::Enum(v) => Sexpr::atom(v.clone()),
        }
    }
}

impl fmt::Display for RouteValue {
    /// Human-readable form: `None`, `Some 2`, `Some (2, Up)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RouteValue::Int(n) => write!(f, "{n}"),
            RouteValue::Bool(b) => write!(f, "{b}"),
            RouteValue::Option(None) => f.write_str("None"),
            RouteValue::Option(Some(v)) => write!(f, "Some {v}"),
            RouteValue::Tuple(vs) => {
                f.write_str("(")?;
                for (i, v) in vs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str(")")
            }
            RouteValue::Enum(v) => f.write_str(v),
        }
    }
}
