//! Policy declarations, symbolic parameters and compiled policies.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use super::ast::{Expr, Name, Type, Value};
use super::eval::{eval, value_conforms, ValueEnv};
use super::syntax::SyntaxError;
use super::typecheck::{annotate, is_subtype, TExpr, TypeEnv, TypeError};
use crate::route::{RouteType, RouteValue};
use crate::topology::{Edge, NodeId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolicyError {
    #[error("in {which}: {source}")]
    Type { which: &'static str, source: TypeError },
    #[error("{which} has type {found}, expected {expected}")]
    ResultType { which: &'static str, expected: String, found: String },
    #[error("unknown policy `{0}`")]
    UnknownPolicy(String),
    #[error("missing policy parameter `{0}`")]
    MissingParam(String),
    #[error("symbolic `{0}` has no value in the assignment")]
    UnboundSymbolic(String),
    #[error("value {value} is not in the domain of symbolic `{name}`")]
    NotInDomain { name: String, value: String },
    #[error("symbolic `{0}` has an empty domain")]
    DomainEmpty(String),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
}

/// A symbolic parameter with an explicit finite domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Symbolic {
    pub name: String,
    pub ty: Type,
    pub domain: Vec<Value>,
}

/// A concrete choice of value for every symbolic, in declaration order.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Assignment(pub Vec<(String, Value)>);

impl Assignment {
    pub fn empty() -> Self {
        Assignment(Vec::new())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.0.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("{}");
        }
        for (i, (n, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{n}={v}")?;
        }
        Ok(())
    }
}

/// Cartesian product of the symbolic domains, in lexicographic order of
/// domain positions.
pub fn enumerate_assignments(symbolics: &[Symbolic]) -> Result<Vec<Assignment>, PolicyError> {
    let mut acc = vec![Assignment::empty()];
    for s in symbolics {
        if s.domain.is_empty() {
            return Err(PolicyError::DomainEmpty(s.name.clone()));
        }
        acc = acc
            .into_iter()
            .flat_map(|a| {
                s.domain.iter().map(move |v| {
                    let mut next = a.clone();
                    next.0.push((s.name.clone(), v.clone()));
                    next
                })
            })
            .collect();
    }
    Ok(acc)
}

/// A routing policy: route type plus merge (`r1`, `r2`), transfer
/// (`edge`, `r`) and init (`node`) expressions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolicySpec {
    pub route_type: RouteType,
    pub merge: Expr,
    pub trans: Expr,
    pub init: Expr,
    pub symbolics: Vec<Symbolic>,
}

fn check_result(which: &'static str, t: &TExpr, expected: &RouteType) -> Result<(), PolicyError> {
    match &t.ty {
        Type::Route(r) if is_subtype(r, expected) => Ok(()),
        other => Err(PolicyError::ResultType { which, expected: expected.to_string(), found: other.to_string() }),
    }
}

impl PolicySpec {
    fn env<'a>(&'a self, params: Vec<(&'a str, Type)>) -> Result<TypeEnv, TypeError> {
        let mut all: Vec<(&str, Type)> = self.symbolics.iter().map(|s| (s.name.as_str(), s.ty.clone())).collect();
        all.extend(params);
        TypeEnv::with_params(all)
    }

    /// Type checks the three functions against the route type.
    pub fn compile(&self) -> Result<CompiledPolicy, PolicyError> {
        self.route_type
            .validate()
            .map_err(|e| PolicyError::ResultType { which: "route type", expected: "a valid type".into(), found: e.to_string() })?;
        for s in &self.symbolics {
            if s.domain.is_empty() {
                return Err(PolicyError::DomainEmpty(s.name.clone()));
            }
            if let Some(v) = s.domain.iter().find(|v| !value_conforms(&s.ty, v)) {
                return Err(PolicyError::NotInDomain { name: s.name.clone(), value: v.to_string() });
            }
        }
        let r = Type::Route(self.route_type.clone());
        let ty = |which| move |source| PolicyError::Type { which, source };
        let merge_env = self.env(vec![("r1", r.clone()), ("r2", r.clone())]).map_err(ty("merge"))?;
        let merge = annotate(&self.merge, &merge_env).map_err(ty("merge"))?;
        check_result("merge", &merge, &self.route_type)?;
        let trans_env = self.env(vec![("edge", Type::Edge), ("r", r.clone())]).map_err(ty("trans"))?;
        let trans = annotate(&self.trans, &trans_env).map_err(ty("trans"))?;
        check_result("trans", &trans, &self.route_type)?;
        let init_env = self.env(vec![("node", Type::Node)]).map_err(ty("init"))?;
        let init = annotate(&self.init, &init_env).map_err(ty("init"))?;
        check_result("init", &init, &self.route_type)?;
        Ok(CompiledPolicy { spec: self.clone(), merge, trans, init })
    }
}

/// A type-checked policy, not yet bound to symbolic values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompiledPolicy {
    pub spec: PolicySpec,
    pub merge: TExpr,
    pub trans: TExpr,
    pub init: TExpr,
}

impl CompiledPolicy {
    /// The assignment picking the first domain value of every symbolic.
    pub fn first_assignment(&self) -> Assignment {
        Assignment(self.spec.symbolics.iter().map(|s| (s.name.clone(), s.domain[0].clone())).collect())
    }

    /// Binds every symbolic to a value from its domain.
    pub fn bind(self: &Arc<Self>, assignment: &Assignment) -> Result<Policy, PolicyError> {
        let mut bindings = Vec::with_capacity(self.spec.symbolics.len());
        for s in &self.spec.symbolics {
            let v = assignment.get(&s.name).ok_or_else(|| PolicyError::UnboundSymbolic(s.name.clone()))?;
            if !s.domain.contains(v) {
                return Err(PolicyError::NotInDomain { name: s.name.clone(), value: v.to_string() });
            }
            bindings.push((Name::from(s.name.as_str()), v.clone()));
        }
        Ok(Policy { compiled: Arc::clone(self), assignment: assignment.clone(), bindings })
    }
}

/// A compiled policy with all symbolics fixed; the functions of one
/// concrete SRP.
#[derive(Debug, Clone)]
pub struct Policy {
    compiled: Arc<CompiledPolicy>,
    assignment: Assignment,
    bindings: Vec<(Name, Value)>,
}

impl PartialEq for Policy {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.compiled, &other.compiled) || self.compiled.spec == other.compiled.spec)
            && self.assignment == other.assignment
    }
}

impl Eq for Policy {}

impl Policy {
    /// Compiles a policy without symbolics.
    pub fn closed(spec: PolicySpec) -> Result<Self, PolicyError> {
        Arc::new(spec.compile()?).bind(&Assignment::empty())
    }

    pub fn compiled(&self) -> &Arc<CompiledPolicy> {
        &self.compiled
    }

    pub fn spec(&self) -> &PolicySpec {
        &self.compiled.spec
    }

    pub fn route_type(&self) -> &RouteType {
        &self.compiled.spec.route_type
    }

    pub fn assignment(&self) -> &Assignment {
        &self.assignment
    }

    /// The symbolic bindings, in declaration order.
    pub fn bindings(&self) -> &[(Name, Value)] {
        &self.bindings
    }

    /// Symbolic bindings as an evaluation environment.
    pub fn base_env(&self) -> ValueEnv {
        let mut env = ValueEnv::new();
        for (n, v) in &self.bindings {
            env.push(n.clone(), v.clone());
        }
        env
    }

    pub fn merge(&self, a: &RouteValue, b: &RouteValue) -> RouteValue {
        let mut env = self.base_env().with("r1", Value::Route(a.clone())).with("r2", Value::Route(b.clone()));
        eval(&self.compiled.merge, &mut env).into_route().expect("merge yields a route")
    }

    pub fn trans(&self, e: &Edge, r: &RouteValue) -> RouteValue {
        let mut env = self.base_env().with("edge", Value::Edge(e.clone())).with("r", Value::Route(r.clone()));
        eval(&self.compiled.trans, &mut env).into_route().expect("trans yields a route")
    }

    pub fn init(&self, v: &NodeId) -> RouteValue {
        let mut env = self.base_env().with("node", Value::Node(v.clone()));
        eval(&self.compiled.init, &mut env).into_route().expect("init yields a route")
    }
}

/// A per-node property `Q(node, r)`, optionally restricted to some nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertySpec {
    pub predicate: Expr,
    pub nodes: Option<Vec<NodeId>>,
}

impl PropertySpec {
    pub fn new(predicate: Expr) -> Self {
        PropertySpec { predicate, nodes: None }
    }

    pub fn applies_to(&self, v: &NodeId) -> bool {
        self.nodes.as_ref().map_or(true, |ns| ns.contains(v))
    }

    /// Type checks the predicate under `r : route_type`, `node : node` and the
    /// policy's symbolics; it must be boolean.
    pub fn compile(&self, policy: &PolicySpec) -> Result<TExpr, PolicyError> {
        let r = Type::Route(policy.route_type.clone());
        let env = policy
            .env(vec![("node", Type::Node), ("r", r)])
            .map_err(|source| PolicyError::Type { which: "property", source })?;
        let t = annotate(&self.predicate, &env).map_err(|source| PolicyError::Type { which: "property", source })?;
        if t.ty != Type::bool() {
            return Err(PolicyError::ResultType { which: "property", expected: "bool".into(), found: t.ty.to_string() });
        }
        Ok(t)
    }

    /// Evaluates the compiled predicate for node `v` with route `r`.
    pub fn holds(compiled: &TExpr, policy: &Policy, v: &NodeId, r: &RouteValue) -> bool {
        let mut env = policy.base_env().with("node", Value::Node(v.clone())).with("r", Value::Route(r.clone()));
        eval(compiled, &mut env).as_route().and_then(RouteValue::as_bool).expect("boolean property")
    }
}
