//! Fragment checking, interface refinement and universal checks over
//! symbolic assignments.
//!
//! A fragment is checked by asking the solver whether `A ∧ N ∧ ¬(G ∧ P)` is
//! satisfiable: assumptions on inputs, the network equation elsewhere, and
//! the negated guarantees and property. Unsat verifies the fragment. A model
//! is a counterexample, from which the first violated obligation is
//! recovered by re-evaluating it with the interpreter.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::cutting::{cut_n, CutError, FragmentAssignment, Interface};
use crate::policy::{Assignment, PolicyError, PropertySpec};
use crate::route::RouteValue;
use crate::smt::{
    encode_fragment, parse_model, run_solver, EncodeError, ObligationKind, SmtScript, SolverConfig, SolverVerdict,
};
use crate::solver::{solve, SolveConfig, SolveOutcome};
use crate::srp::{Labeling, OpenSrp, SrpError, SrpTemplate};
use crate::topology::{Edge, NodeId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error(transparent)]
    Cut(#[from] CutError),
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Srp(#[from] SrpError),
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error("cannot refine the interface: {0}")]
    NotRefinable(String),
    #[error("the interface family has no interface for {0}")]
    MissingInterfaceFor(Assignment),
    #[error("could not write {path}: {reason}")]
    Dump { path: String, reason: String },
}

/// Which obligation a counterexample violates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum ViolationKind {
    Guarantee(NodeId),
    Property(NodeId),
}

impl ViolationKind {
    pub fn node(&self) -> &NodeId {
        match self {
            ViolationKind::Guarantee(v) | ViolationKind::Property(v) => v,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub fragment: usize,
    pub kind: ViolationKind,
    pub counterexample: Labeling,
    pub assignment: Assignment,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckResult {
    Verified,
    Violation(Violation),
    Inconclusive { fragment: usize, reason: String },
}

impl CheckResult {
    pub fn is_verified(&self) -> bool {
        matches!(self, CheckResult::Verified)
    }

    /// 0 verified, 1 violation, 2 inconclusive.
    pub fn exit_code(&self) -> i32 {
        match self {
            CheckResult::Verified => 0,
            CheckResult::Violation(_) => 1,
            CheckResult::Inconclusive { .. } => 2,
        }
    }

    pub fn verdict_name(&self) -> &'static str {
        match self {
            CheckResult::Verified => "verified",
            CheckResult::Violation(_) => "violation",
            CheckResult::Inconclusive { .. } => "inconclusive",
        }
    }
}

/// Compact rendering of a route for reports: `Some n` prints as `n`.
pub fn short_route(r: &RouteValue) -> String {
    match r {
        RouteValue::Option(None) => "none".into(),
        RouteValue::Option(Some(x)) => short_route(x),
        other => other.to_string(),
    }
}

fn edge_label(e: &Edge) -> String {
    format!("{}{}", e.src, e.dst)
}

impl std::fmt::Display for CheckResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CheckResult::Verified => f.write_str("Verified"),
            CheckResult::Inconclusive { fragment, reason } => write!(f, "Inconclusive (fragment {fragment}: {reason})"),
            CheckResult::Violation(v) => {
                let (what, node) = match &v.kind {
                    ViolationKind::Guarantee(n) => ("guarantee", n),
                    ViolationKind::Property(n) => ("property", n),
                };
                let got = v.counterexample.get(node).map_or_else(|| "?".into(), ToString::to_string);
                write!(f, "Violation of {what} at {node} in fragment {}: λ({node}) = {got}", v.fragment)?;
                if !v.assignment.is_empty() {
                    write!(f, " [{}]", v.assignment)?;
                }
                Ok(())
            }
        }
    }
}

/// Options shared by all checks.
#[derive(Debug, Clone)]
pub struct CheckOptions {
    pub solver: SolverConfig,
    /// Check every fragment instead of stopping at the first failure.
    pub all: bool,
    /// Concurrent solver sessions.
    pub jobs: usize,
    /// Directory for `<net>.<fragment>.smt2` dumps.
    pub dump_dir: Option<PathBuf>,
    pub net_name: String,
    /// Wall-clock budget for the whole check.
    pub run_timeout: Option<Duration>,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            solver: SolverConfig::default(),
            all: false,
            jobs: 1,
            dump_dir: None,
            net_name: "net".into(),
            run_timeout: Some(Duration::from_secs(600)),
        }
    }
}

/// Result of checking one fragment.
#[derive(Debug, Clone)]
pub struct FragmentReport {
    pub index: usize,
    pub nodes: usize,
    pub result: CheckResult,
    pub smt_time: Duration,
    /// Set when the solver verified a fragment that simulation could not
    /// solve, so the verdict may be vacuous.
    pub warning: Option<String>,
}

#[derive(Debug, Clone)]
pub struct CheckReport {
    pub result: CheckResult,
    /// Reports of the fragments that were checked, by index.
    pub fragments: Vec<FragmentReport>,
    pub fragment_count: usize,
}

impl CheckReport {
    pub fn max_smt_time(&self) -> Duration {
        self.fragments.iter().map(|f| f.smt_time).max().unwrap_or_default()
    }
}

fn first_violated(t: &OpenSrp, p: &PropertySpec, script: &SmtScript, lab: &Labeling) -> Option<ViolationKind> {
    let pred = p.compile(t.policy().spec()).ok()?;
    script.obligations.iter().find_map(|ob| {
        let r = lab.get(&ob.node)?;
        match ob.kind {
            ObligationKind::Guarantee if t.outh().get(&ob.node) != Some(r) => {
                Some(ViolationKind::Guarantee(ob.node.clone()))
            }
            ObligationKind::Property if !PropertySpec::holds(&pred, t.policy(), &ob.node, r) => {
                Some(ViolationKind::Property(ob.node.clone()))
            }
            _ => None,
        }
    })
}

fn run_script(index: usize, t: &OpenSrp, p: &PropertySpec, script: &SmtScript, solver: &SolverConfig) -> FragmentReport {
    let start = Instant::now();
    let verdict = run_solver(&script.text, solver);
    let smt_time = start.elapsed();
    let mut warning = None;
    let inconclusive = |reason: String| CheckResult::Inconclusive { fragment: index, reason };
    let result = match verdict {
        Err(e) => inconclusive(e.to_string()),
        Ok(SolverVerdict::Unknown(reason)) => inconclusive(reason),
        Ok(SolverVerdict::Unsat) => {
            if let SolveOutcome::Diverged { rounds, .. } = solve(t, &SolveConfig::default()) {
                warning = Some(format!(
                    "fragment {index}: simulation found no solution in {rounds} rounds; the verdict may hold vacuously"
                ));
            }
            CheckResult::Verified
        }
        Ok(SolverVerdict::Sat(model)) => match parse_model(&model, &script.schema) {
            Err(e) => inconclusive(e.to_string()),
            Ok(lab) => match first_violated(t, p, script, &lab) {
                Some(kind) => CheckResult::Violation(Violation {
                    fragment: index,
                    kind,
                    counterexample: lab,
                    assignment: t.policy().assignment().clone(),
                }),
                None => inconclusive("solver model violates no obligation".into()),
            },
        },
    };
    FragmentReport { index, nodes: t.topology().len(), result, smt_time, warning }
}

/// Checks one fragment against its guarantees and `p`.
pub fn solve_fragment(
    index: usize,
    t: &OpenSrp,
    p: &PropertySpec,
    opts: &CheckOptions,
) -> Result<FragmentReport, CheckError> {
    let script = encode_fragment(t, p)?;
    dump(opts, index, &script)?;
    Ok(run_script(index, t, p, &script, &opts.solver))
}

fn dump(opts: &CheckOptions, index: usize, script: &SmtScript) -> Result<(), CheckError> {
    let Some(dir) = &opts.dump_dir else { return Ok(()) };
    let path = dir.join(format!("{}.{index}.smt2", opts.net_name));
    let err = |e: std::io::Error| CheckError::Dump { path: path.display().to_string(), reason: e.to_string() };
    fs::create_dir_all(dir).map_err(err)?;
    fs::write(&path, &script.text).map_err(err)
}

/// Restricts `p` to each fragment's nodes, inputs included.
pub fn decompose_property(p: &PropertySpec, fragments: &[OpenSrp]) -> Vec<PropertySpec> {
    if fragments.len() == 1 {
        return vec![p.clone()];
    }
    fragments
        .iter()
        .map(|t| PropertySpec {
            predicate: p.predicate.clone(),
            nodes: Some(t.nodes().iter().filter(|v| p.applies_to(v)).cloned().collect()),
        })
        .collect()
}

/// Checks already-cut fragments, `props[i]` against fragment `i`.
///
/// Scripts are encoded (and dumped) up front on the calling thread; solver
/// sessions then run on up to `opts.jobs` worker threads. Without
/// `opts.all`, no new session starts once a fragment fails, and the
/// reported result is the failure with the lowest fragment index.
pub fn check_fragments(
    fragments: &[OpenSrp],
    props: &[PropertySpec],
    opts: &CheckOptions,
) -> Result<CheckReport, CheckError> {
    let scripts: Vec<SmtScript> = fragments.iter().zip(props).map(|(t, p)| encode_fragment(t, p)).collect::<Result<_, _>>()?;
    for (i, s) in scripts.iter().enumerate() {
        dump(opts, i, s)?;
    }
    let deadline = opts.run_timeout.map(|d| Instant::now() + d);
    let next = AtomicUsize::new(0);
    let stop = AtomicBool::new(false);
    let reports = Mutex::new(Vec::new());
    let worker = || loop {
        if stop.load(Ordering::SeqCst) {
            return;
        }
        let i = next.fetch_add(1, Ordering::SeqCst);
        if i >= fragments.len() {
            return;
        }
        let mut solver = opts.solver.clone();
        if let Some(d) = deadline {
            solver.timeout = solver.timeout.min(d.saturating_duration_since(Instant::now()));
        }
        let report = run_script(i, &fragments[i], &props[i], &scripts[i], &solver);
        if !report.result.is_verified() && !opts.all {
            stop.store(true, Ordering::SeqCst);
        }
        reports.lock().expect("no worker panics while holding the lock").push(report);
    };
    std::thread::scope(|s| {
        for _ in 1..opts.jobs.max(1) {
            s.spawn(worker);
        }
        worker();
    });
    let mut fragments_done = reports.into_inner().expect("workers finished");
    fragments_done.sort_by_key(|r| r.index);
    let result = fragments_done
        .iter()
        .find(|r| !r.result.is_verified())
        .map_or(CheckResult::Verified, |r| r.result.clone());
    Ok(CheckReport { result, fragments: fragments_done, fragment_count: fragments.len() })
}

/// Cuts `s` by `assignment` and `iface` and checks every fragment.
pub fn check(
    s: &OpenSrp,
    p: &PropertySpec,
    assignment: &FragmentAssignment,
    iface: &Interface,
    opts: &CheckOptions,
) -> Result<CheckReport, CheckError> {
    let fragments = cut_n(s, assignment, iface)?;
    let props = decompose_property(p, &fragments);
    check_fragments(&fragments, &props, opts)
}

/// One annotation replaced during refinement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefineStep {
    pub round: usize,
    pub edge: Edge,
    pub old: RouteValue,
    pub new: RouteValue,
}

impl std::fmt::Display for RefineStep {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "refined I({}): {} → {}", edge_label(&self.edge), short_route(&self.old), short_route(&self.new))
    }
}

/// Replaces the annotation of every edge leaving the violated node with the
/// counterexample's route at that node.
pub fn refine_interface(iface: &Interface, v: &Violation) -> Result<(Interface, Vec<(Edge, RouteValue, RouteValue)>), CheckError> {
    let ViolationKind::Guarantee(u) = &v.kind else {
        return Err(CheckError::NotRefinable(format!("property violation at {}", v.kind.node())));
    };
    let new = v
        .counterexample
        .get(u)
        .ok_or_else(|| CheckError::NotRefinable(format!("counterexample has no route at {u}")))?;
    let mut out = iface.clone();
    let mut changed = Vec::new();
    for (e, old) in iface.out_of(u) {
        changed.push((e.clone(), old.clone(), new.clone()));
        out.insert(e.clone(), new.clone());
    }
    if changed.is_empty() {
        return Err(CheckError::NotRefinable(format!("no annotated edge leaves {u}")));
    }
    Ok((out, changed))
}

#[derive(Debug, Clone)]
pub struct RefinementOutcome {
    pub report: CheckReport,
    pub interface: Interface,
    /// Number of checks run.
    pub rounds: usize,
    pub steps: Vec<RefineStep>,
    /// Why refinement stopped early, if it did.
    pub stopped: Option<String>,
}

/// Alternates checking and refinement until verified, unrefinable, or
/// `max_rounds` checks have run.
pub fn check_with_refinement(
    s: &OpenSrp,
    p: &PropertySpec,
    assignment: &FragmentAssignment,
    iface: &Interface,
    max_rounds: usize,
    opts: &CheckOptions,
) -> Result<RefinementOutcome, CheckError> {
    let mut current = iface.clone();
    let mut steps = Vec::new();
    let mut round = 0;
    loop {
        round += 1;
        let report = check(s, p, assignment, &current, opts)?;
        let CheckResult::Violation(v) = &report.result else {
            return Ok(RefinementOutcome { report, interface: current, rounds: round, steps, stopped: None });
        };
        if round >= max_rounds.max(1) {
            let stopped = Some(format!("round budget of {max_rounds} exhausted"));
            return Ok(RefinementOutcome { report, interface: current, rounds: round, steps, stopped });
        }
        match refine_interface(&current, v) {
            Ok((next, changed)) => {
                steps.extend(changed.into_iter().map(|(edge, old, new)| RefineStep { round, edge, old, new }));
                current = next;
            }
            Err(e) => {
                let stopped = Some(e.to_string());
                return Ok(RefinementOutcome { report, interface: current, rounds: round, steps, stopped });
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct UniversalReport {
    pub per_assignment: Vec<(Assignment, CheckReport)>,
    /// Verified iff every assignment verified; otherwise the first failure.
    pub aggregate: CheckResult,
}

/// Runs [`check`] for every concrete assignment of the template's
/// symbolics, with that assignment's interface from `family`.
pub fn check_universal(
    template: &SrpTemplate,
    p: &PropertySpec,
    assignment: &FragmentAssignment,
    family: &BTreeMap<Assignment, Interface>,
    opts: &CheckOptions,
) -> Result<UniversalReport, CheckError> {
    let assignments = template.assignments()?;
    if let Some(a) = assignments.iter().find(|a| !family.contains_key(a)) {
        return Err(CheckError::MissingInterfaceFor(a.clone()));
    }
    let mut per_assignment = Vec::with_capacity(assignments.len());
    for a in assignments {
        let srp = template.instantiate(&a)?;
        let report = check(&srp, p, assignment, &family[&a], opts)?;
        per_assignment.push((a, report));
    }
    let aggregate = per_assignment
        .iter()
        .map(|(_, r)| &r.result)
        .find(|r| !r.is_verified())
        .cloned()
        .unwrap_or(CheckResult::Verified);
    Ok(UniversalReport { per_assignment, aggregate })
}
