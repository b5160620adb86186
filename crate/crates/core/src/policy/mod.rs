//! Typed policy expression language.
//!
//! Policies are written as [`Expr`] trees (or in the s-expression surface
//! syntax of [`syntax`]), type checked into annotated [`TExpr`] trees, and
//! then either interpreted ([`eval`]) or compiled to SMT-LIB
//! ([`crate::smt`]).

pub mod ast;
pub mod builtin;
pub mod eval;
pub mod spec;
pub mod syntax;
pub mod typecheck;

pub use ast::{build, Expr, Name, Type, Value};
pub use builtin::{builtin_policy, BuiltinParams, Tier};
pub use eval::{evaluate, ValueEnv};
pub use spec::{enumerate_assignments, Assignment, CompiledPolicy, Policy, PolicyError, PolicySpec, PropertySpec, Symbolic};
pub use syntax::{parse_expr, print_expr, SyntaxError};
pub use typecheck::{annotate, type_check, TExpr, TNode, TypeEnv, TypeError};
