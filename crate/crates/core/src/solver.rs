//! Fixed-point simulation of open SRPs.
//!
//! Iteration is synchronous: every round recomputes the network equation for
//! all non-input nodes from the previous round's labels, while inputs stay
//! clamped to their assumed routes. A round that changes nothing is a fixed
//! point; guarantees are then checked against it.

use std::io;

use crate::policy::{Assignment, PolicyError};
use crate::route::RouteValue;
use crate::srp::{Equation, Labeling, NodeViolation, OpenSrp, SrpError, SrpTemplate};
use crate::topology::NodeId;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolveConfig {
    /// Round budget; `None` means `2 * |V|` (at least 1).
    pub max_iterations: Option<usize>,
    pub record_trace: bool,
}

impl SolveConfig {
    pub fn traced() -> Self {
        SolveConfig { max_iterations: None, record_trace: true }
    }

    fn budget(&self, nodes: usize) -> usize {
        self.max_iterations.unwrap_or(2 * nodes).max(1)
    }
}

/// One changed label in one round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEntry {
    pub round: usize,
    pub node: NodeId,
    pub old: RouteValue,
    pub new: RouteValue,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    Solved { labeling: Labeling, rounds: usize, trace: Vec<TraceEntry> },
    /// No fixed point within the round budget.
    Diverged { rounds: usize, trace: Vec<TraceEntry> },
    /// A fixed point was reached but some guarantees do not hold there.
    NoSolution { labeling: Labeling, failures: Vec<NodeViolation> },
}

impl SolveOutcome {
    pub fn labeling(&self) -> Option<&Labeling> {
        match self {
            SolveOutcome::Solved { labeling, .. } => Some(labeling),
            _ => None,
        }
    }

    pub fn into_labeling(self) -> Option<Labeling> {
        match self {
            SolveOutcome::Solved { labeling, .. } => Some(labeling),
            _ => None,
        }
    }

    pub fn trace(&self) -> &[TraceEntry] {
        match self {
            SolveOutcome::Solved { trace, .. } | SolveOutcome::Diverged { trace, .. } => trace,
            SolveOutcome::NoSolution { .. } => &[],
        }
    }
}

/// Computes the solution of `srp` by synchronous iteration.
pub fn solve(srp: &OpenSrp, cfg: &SolveConfig) -> SolveOutcome {
    let topo = srp.topology();
    let n = topo.len();
    let mut cur: Vec<RouteValue> = (0..n)
        .map(|i| srp.inh().get(topo.node(i)).cloned().unwrap_or_else(|| srp.init_at(i).clone()))
        .collect();
    let inputs: Vec<bool> = topo.nodes().iter().map(|v| srp.is_input(v)).collect();
    let mut trace = Vec::new();
    let budget = cfg.budget(n);
    for round in 1..=budget {
        let next: Vec<RouteValue> =
            (0..n).map(|i| if inputs[i] { cur[i].clone() } else { srp.local_rhs(i, |u| cur[u].clone()) }).collect();
        if cfg.record_trace {
            for (i, (old, new)) in cur.iter().zip(&next).enumerate() {
                if old != new {
                    trace.push(TraceEntry { round, node: topo.node(i).clone(), old: old.clone(), new: new.clone() });
                }
            }
        }
        if next == cur {
            let labeling: Labeling = topo.nodes().iter().cloned().zip(cur).collect();
            let failures: Vec<NodeViolation> = srp
                .outh()
                .iter()
                .filter(|(v, r)| labeling.get(v) != Some(r))
                .map(|(v, r)| NodeViolation {
                    node: v.clone(),
                    equation: Equation::Guarantee,
                    expected: Some(r.clone()),
                    actual: labeling.get(v).cloned(),
                })
                .collect();
            return if failures.is_empty() {
                SolveOutcome::Solved { labeling, rounds: round, trace }
            } else {
                SolveOutcome::NoSolution { labeling, failures }
            };
        }
        cur = next;
    }
    SolveOutcome::Diverged { rounds: budget, trace }
}

/// Writes a trace as CSV with header `round,node,old,new`.
pub fn write_trace_csv<W: io::Write>(trace: &[TraceEntry], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["round", "node", "old", "new"])?;
    for t in trace {
        w.write_record([t.round.to_string(), t.node.to_string(), t.old.to_string(), t.new.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SymbolicSolveError {
    #[error("symbolic `{0}` has an empty domain")]
    DomainEmpty(String),
    #[error(transparent)]
    Srp(#[from] SrpError),
}

/// Solves one concrete instance per assignment of the template's symbolics,
/// in enumeration order.
pub fn solve_all_symbolic(
    template: &SrpTemplate,
    cfg: &SolveConfig,
) -> Result<Vec<(Assignment, SolveOutcome)>, SymbolicSolveError> {
    let assignments = template.assignments().map_err(|e| match e {
        PolicyError::DomainEmpty(name) => SymbolicSolveError::DomainEmpty(name),
        other => SymbolicSolveError::Srp(SrpError::Policy(other)),
    })?;
    assignments
        .into_iter()
        .map(|a| {
            let srp = template.instantiate(&a)?;
            let out = solve(&srp, cfg);
            Ok((a, out))
        })
        .collect()
}
