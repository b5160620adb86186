//! Modular verification of routing control planes.

pub mod bench;
pub mod checker;
pub mod cli;
pub mod cutting;
pub mod interface_gen;
pub mod netgen;
pub mod policy;
pub mod route;
pub mod sexpr;
pub mod smt;
pub mod solver;
pub mod specfile;
pub mod srp;
pub mod topology;
