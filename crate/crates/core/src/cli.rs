//! The `srpcut` command line: `solve`, `check`, `cut` and `bench`.
//!
//! Exit status: 0 verified (or solved), 1 violation, 2 inconclusive or
//! error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};

use crate::bench::{bench_fattree, bench_file, bench_random, parse_range, write_csv, BenchRecord, Suite};
use crate::checker::{
    check, check_universal, check_with_refinement, CheckOptions, CheckReport, CheckResult, Violation,
};
use crate::cutting::{cut_n, FragmentAssignment, Interface};
use crate::interface_gen::{complete_interface, maint_family};
use crate::netgen::CutKind;
use crate::policy::Assignment;
use crate::smt::SolverConfig;
use crate::solver::{solve, write_trace_csv, SolveConfig, SolveOutcome};
use crate::specfile::{LoadedSpec, NetworkSpecFile, PolicyDecl};
use crate::srp::OpenSrp;
use crate::topology::NodeId;

#[derive(Debug, Parser)]
#[command(name = "srpcut", about = "Modular verification of routing control planes by cutting networks into fragments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InterfaceSource {
    /// Use the `interface` section of the spec file.
    File,
    /// Annotate every cut edge with the simulated solution.
    Complete,
    /// Per-`down` interfaces from two shortest paths (MAINT networks).
    Maint,
}

#[derive(Debug, clap::Args)]
pub struct SolverArgs {
    /// Solver command line; the script is written to its stdin.
    #[arg(long, default_value = "z3 -smt2 -in")]
    pub solver: String,
    /// Per-fragment solver timeout in seconds.
    #[arg(long, default_value_t = 60.0)]
    pub timeout: f64,
    /// Timeout for the whole run in seconds.
    #[arg(long, default_value_t = 600.0)]
    pub run_timeout: f64,
    /// Concurrent solver sessions.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

impl SolverArgs {
    fn options(&self) -> CheckOptions {
        CheckOptions {
            solver: SolverConfig::default()
                .with_command(&self.solver)
                .with_timeout(Duration::from_secs_f64(self.timeout.max(0.0))),
            jobs: self.jobs.max(1),
            run_timeout: Some(Duration::from_secs_f64(self.run_timeout.max(0.0))),
            ..CheckOptions::default()
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate the network to its fixed point and print every node's route.
    Solve {
        spec: PathBuf,
        /// Write the per-round label changes as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Cut the network by its partition and check every fragment.
    Check {
        spec: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        /// Check all fragments instead of stopping at the first failure.
        #[arg(long)]
        all: bool,
        /// Refine wrong annotations from counterexamples, up to N checks.
        #[arg(long, value_name = "N")]
        refine: Option<usize>,
        /// Write each fragment's SMT script to DIR.
        #[arg(long, value_name = "DIR")]
        dump_smt: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = InterfaceSource::File)]
        interface: InterfaceSource,
    },
    /// Write one standalone spec file per fragment.
    Cut {
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = InterfaceSource::File)]
        interface: InterfaceSource,
    },
    /// Time cut-and-check runs and write a CSV table.
    Bench {
        /// fattree-sp, fattree-fat, fattree-maint, random or file.
        #[arg(long)]
        suite: Suite,
        /// Fattree sizes, e.g. `4..8` (even values) or `4,6`.
        #[arg(long, default_value = "4..8")]
        k: String,
        /// Random sizes as exponents x, with n = 2^x and p = 2^(2-x).
        #[arg(long, default_value = "4..6")]
        x: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Comma-separated cuts (fattrees: mono, vertical, horizontal,
        /// pods, full; others: mono, halves, full, file).
        #[arg(long)]
        cuts: Option<String>,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        /// Spec file for the `file` suite.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        solver: SolverArgs,
    },
}

/// A failure that ends the command with exit status 2.
struct Fail(String);

impl<E: std::fmt::Display> From<E> for Fail {
    fn from(e: E) -> Self {
        Fail(e.to_string())
    }
}

type CmdResult = Result<i32, Fail>;

fn load(path: &Path) -> Result<LoadedSpec, Fail> {
    Ok(NetworkSpecFile::read(path)?.load()?)
}

/// Parses `args` (including the program name) and runs the command.
pub fn run(args: impl IntoIterator<Item = OsString>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = match cli.command {
        Command::Solve { spec, trace } => cmd_solve(&spec, trace.as_deref(), out),
        Command::Check { spec, solver, all, refine, dump_smt, interface } => {
            let mut opts = solver.options();
            opts.all = all;
            opts.dump_dir = dump_smt;
            cmd_check(&spec, &opts, refine, interface, out, err)
        }
        Command::Cut { spec, out: dir, interface } => cmd_cut(&spec, &dir, interface, out),
        Command::Bench { suite, k, x, seed, cuts, trials, spec, csv, solver } => {
            cmd_bench(suite, &k, &x, seed, cuts.as_deref(), trials, spec.as_deref(), csv.as_deref(), &solver.options(), out)
        }
    };
    match result {
        Ok(code) => code,
        Err(Fail(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

fn print_outcome(srp: &OpenSrp, outcome: &SolveOutcome, out: &mut dyn Write) -> CmdResult {
    match outcome {
        SolveOutcome::Solved { labeling, rounds, .. } => {
            write!(out, "{}", labeling.table(srp.nodes()))?;
            writeln!(out, "converged in {rounds} rounds")?;
            Ok(0)
        }
        SolveOutcome::Diverged { rounds, .. } => Err(Fail(format!("no fixed point after {rounds} rounds"))),
        SolveOutcome::NoSolution { labeling, failures } => {
            write!(out, "{}", labeling.table(srp.nodes()))?;
            let nodes: Vec<String> = failures.iter().map(|f| f.node.to_string()).collect();
            Err(Fail(format!("guarantees fail at the fixed point: {}", nodes.join(", "))))
        }
    }
}

/// `solve`: simulate and print the node-to-route table.
fn cmd_solve(spec: &Path, trace: Option<&Path>, out: &mut dyn Write) -> CmdResult {
    let spec = load(spec)?;
    let cfg = SolveConfig { record_trace: trace.is_some(), ..SolveConfig::default() };
    let mut code = 0;
    let mut traces = Vec::new();
    for a in spec.template.assignments()? {
        let srp = spec.template.instantiate(&a)?;
        if !a.is_empty() {
            writeln!(out, "# {a}")?;
        }
        let outcome = solve(&srp, &cfg);
        traces.extend(outcome.trace().iter().cloned());
        code = code.max(print_outcome(&srp, &outcome, out)?);
    }
    if let Some(path) = trace {
        let file = std::fs::File::create(path)?;
        write_trace_csv(&traces, file)?;
    }
    Ok(code)
}

fn partition_of(spec: &LoadedSpec, srp: &OpenSrp) -> FragmentAssignment {
    spec.partition.clone().unwrap_or_else(|| FragmentAssignment::identity(srp))
}

fn interface_for(
    spec: &LoadedSpec,
    srp: &OpenSrp,
    a: &FragmentAssignment,
    source: InterfaceSource,
) -> Result<Interface, Fail> {
    match source {
        InterfaceSource::File => Ok(spec.interface.clone().unwrap_or_default()),
        InterfaceSource::Complete => Ok(complete_interface(srp, &a.cut_set(srp)?)?),
        InterfaceSource::Maint => Err(Fail("`--interface maint` needs a MAINT policy with symbolic `down`".into())),
    }
}

fn print_violation(v: &Violation, fragments: &[OpenSrp], out: &mut dyn Write) -> Result<(), Fail> {
    writeln!(out, "counterexample (fragment {}):", v.fragment)?;
    let nodes = fragments.get(v.fragment).map(|t| t.nodes().to_vec()).unwrap_or_default();
    write!(out, "{}", v.counterexample.table(&nodes))?;
    Ok(())
}

fn print_report(report: &CheckReport, fragments: &[OpenSrp], out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    for f in &report.fragments {
        writeln!(out, "fragment {} ({} nodes): {} in {:.3}s", f.index, f.nodes, f.result.verdict_name(), f.smt_time.as_secs_f64())?;
        if let Some(w) = &f.warning {
            writeln!(err, "warning: {w}")?;
        }
    }
    writeln!(out, "{}", report.result)?;
    if let CheckResult::Violation(v) = &report.result {
        print_violation(v, fragments, out)?;
    }
    Ok(report.result.exit_code())
}

/// `check`: cut by the partition and verify each fragment.
fn cmd_check(
    spec_path: &Path,
    opts: &CheckOptions,
    refine: Option<usize>,
    source: InterfaceSource,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CmdResult {
    let spec = load(spec_path)?;
    let mut opts = opts.clone();
    opts.net_name = spec.name.clone();
    let p = spec.property.clone().ok_or_else(|| Fail("the spec has no property to check".into()))?;
    if !spec.template.policy.spec.symbolics.is_empty() {
        return check_symbolic(&spec, &p, &opts, source, out, err);
    }
    let srp = spec.instance()?;
    let a = partition_of(&spec, &srp);
    let iface = interface_for(&spec, &srp, &a, source)?;
    let fragments = cut_n(&srp, &a, &iface)?;
    match refine {
        None => {
            let report = check(&srp, &p, &a, &iface, &opts)?;
            print_report(&report, &fragments, out, err)
        }
        Some(max_rounds) => {
            let outcome = check_with_refinement(&srp, &p, &a, &iface, max_rounds, &opts)?;
            let fragments = cut_n(&srp, &a, &outcome.interface)?;
            for step in &outcome.steps {
                writeln!(out, "{step}")?;
            }
            writeln!(out, "rounds: {}", outcome.rounds)?;
            if let Some(why) = &outcome.stopped {
                writeln!(out, "refinement stopped: {why}")?;
            }
            print_report(&outcome.report, &fragments, out, err)
        }
    }
}

fn spec_maint_family(spec: &LoadedSpec, a: &FragmentAssignment) -> Result<BTreeMap<Assignment, Interface>, Fail> {
    let PolicyDecl::Builtin { dest, max_hops, .. } = &spec.file.policy else {
        return Err(Fail("`--interface maint` needs a builtin MAINT policy".into()));
    };
    let probe = spec.template.instantiate(&spec.template.policy.first_assignment())?;
    let cutset = a.cut_set(&probe)?;
    let sym = spec
        .template
        .policy
        .spec
        .symbolics
        .iter()
        .find(|s| s.name == "down")
        .ok_or_else(|| Fail("`--interface maint` needs the symbolic `down`".into()))?;
    let downs: Vec<NodeId> = sym.domain.iter().filter_map(|v| v.as_node().cloned()).collect();
    let h = max_hops.unwrap_or(crate::policy::builtin::DEFAULT_MAX_HOPS);
    Ok(maint_family(&spec.template.topology, &NodeId::new(dest), &cutset, &downs, h))
}

fn check_symbolic(
    spec: &LoadedSpec,
    p: &crate::policy::PropertySpec,
    opts: &CheckOptions,
    source: InterfaceSource,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CmdResult {
    let probe = spec.template.instantiate(&spec.template.policy.first_assignment())?;
    let a = partition_of(spec, &probe);
    let family = match source {
        InterfaceSource::Maint => spec_maint_family(spec, &a)?,
        InterfaceSource::File => spec
            .template
            .assignments()?
            .into_iter()
            .map(|x| (x, spec.interface.clone().unwrap_or_default()))
            .collect(),
        InterfaceSource::Complete => {
            let mut fam = BTreeMap::new();
            for x in spec.template.assignments()? {
                let srp = spec.template.instantiate(&x)?;
                fam.insert(x, complete_interface(&srp, &a.cut_set(&srp)?)?);
            }
            fam
        }
    };
    let report = check_universal(&spec.template, p, &a, &family, opts)?;
    for (x, r) in &report.per_assignment {
        writeln!(out, "{x}: {}", r.result)?;
        for f in r.fragments.iter().filter_map(|f| f.warning.as_ref()) {
            writeln!(err, "warning: {f}")?;
        }
    }
    writeln!(out, "aggregate: {}", report.aggregate)?;
    if let CheckResult::Violation(v) = &report.aggregate {
        let srp = spec.template.instantiate(&v.assignment)?;
        let fragments = cut_n(&srp, &a, &family[&v.assignment])?;
        print_violation(v, &fragments, out)?;
    }
    Ok(report.aggregate.exit_code())
}

/// `cut`: write `<name>.<i>.json` for every fragment into `dir`.
fn cmd_cut(spec_path: &Path, dir: &Path, source: InterfaceSource, out: &mut dyn Write) -> CmdResult {
    let spec = load(spec_path)?;
    let srp = spec.template.instantiate(&spec.template.policy.first_assignment())?;
    let a = partition_of(&spec, &srp);
    let iface = interface_for(&spec, &srp, &a, source)?;
    let fragments = cut_n(&srp, &a, &iface)?;
    std::fs::create_dir_all(dir)?;
    for (i, t) in fragments.iter().enumerate() {
        let name = format!("{}.{i}", spec.name);
        let file = spec.file.for_fragment(&name, t);
        let path = dir.join(format!("{name}.json"));
        std::fs::write(&path, file.to_json() + "\n")?;
        writeln!(
            out,
            "{}: {} nodes, {} inputs, {} outputs",
            path.display(),
            t.nodes().len(),
            t.inputs().len(),
            t.outputs().len()
        )?;
    }
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_bench(
    suite: Suite,
    k: &str,
    x: &str,
    seed: u64,
    cuts: Option<&str>,
    trials: usize,
    spec: Option<&Path>,
    csv: Option<&Path>,
    opts: &CheckOptions,
    out: &mut dyn Write,
) -> CmdResult {
    let cut_names: Option<Vec<&str>> = cuts.map(|c| c.split(',').map(str::trim).collect());
    let records: Vec<BenchRecord> = match suite {
        Suite::FattreeSp | Suite::FattreeFat | Suite::FattreeMaint => {
            let ks = parse_range(k, true).map_err(Fail)?;
            let kinds = match &cut_names {
                None => vec![CutKind::Monolithic, CutKind::Pods, CutKind::Full],
                Some(names) => names.iter().map(|n| n.parse::<CutKind>()).collect::<Result<_, _>>()?,
            };
            bench_fattree(suite, &ks, &kinds, trials, opts)?
        }
        Suite::Random => {
            let xs: Vec<u32> = parse_range(x, false).map_err(Fail)?.into_iter().map(|v| v as u32).collect();
            let names = cut_names.unwrap_or_else(|| vec!["mono", "halves", "full"]);
            bench_random(&xs, seed, &names, trials, opts)?
        }
        Suite::File => {
            let path = spec.ok_or_else(|| Fail("the file suite needs --spec".into()))?;
            let loaded = load(path)?;
            let names = cut_names.unwrap_or_else(|| {
                if loaded.partition.is_some() {
                    vec!["mono", "file", "full"]
                } else {
                    vec!["mono", "halves", "full"]
                }
            });
            bench_file(&loaded, &names, trials, opts)?
        }
    };
    match csv {
        Some(path) => {
            write_csv(&records, std::fs::File::create(path)?)?;
            writeln!(out, "wrote {} rows to {}", records.len(), path.display())?;
        }
        None => write_csv(&records, &mut *out)?,
    }
    Ok(0)
}
