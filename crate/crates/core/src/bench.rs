//! Benchmark harness: times cut-and-check runs over generated networks.
//!
//! Every run checks all fragments (no early exit) so that the maximum
//! per-fragment solver time is measured over the whole cut. Interfaces are
//! derived from the simulated solution and are not part of the timed work;
//! `total_s` covers building the network, cutting, encoding and solving.

use std::collections::BTreeMap;
use std::io;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::checker::{check, check_universal, CheckError, CheckOptions, CheckResult};
use crate::cutting::{FragmentAssignment, Interface};
use crate::interface_gen::{complete_interface, maint_family, InterfaceGenError};
use crate::netgen::{erdos_renyi, fattree, fattree_assignment, random_scale, CutKind, NetgenError};
use crate::policy::builtin::{
    max_hops_except_property, max_hops_property, maintenance, reachable_property, shortest_path, valley_free,
    DEFAULT_MAX_HOPS,
};
use crate::policy::{Assignment, Policy, PolicyError, PropertySpec};
use crate::specfile::{LoadedSpec, SpecError};
use crate::srp::{OpenSrp, SrpError, SrpTemplate};
use crate::topology::NodeId;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BenchError {
    #[error(transparent)]
    Srp(#[from] SrpError),
    #[error(transparent)]
    Netgen(#[from] NetgenError),
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error(transparent)]
    Interface(#[from] InterfaceGenError),
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("cut `{cut}` does not apply to {network}")]
    UnsupportedCut { cut: String, network: String },
    #[error("trials must be at least 1")]
    NoTrials,
}

/// Which family of networks to benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    FattreeSp,
    FattreeFat,
    FattreeMaint,
    Random,
    File,
}

impl std::str::FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "fattree-sp" => Ok(Suite::FattreeSp),
            "fattree-fat" => Ok(Suite::FattreeFat),
            "fattree-maint" => Ok(Suite::FattreeMaint),
            "random" => Ok(Suite::Random),
            "file" => Ok(Suite::File),
            other => Err(format!("unknown suite `{other}`")),
        }
    }
}

/// One row of benchmark output, averaged over trials.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub network: String,
    pub k_or_n: usize,
    pub cut: String,
    pub fragments: usize,
    /// Per-fragment solver wall time of the last trial, by fragment index.
    pub fragment_smt_s: Vec<f64>,
    pub max_smt_s: f64,
    pub total_s: f64,
    pub verdict: String,
}

/// Header comment written above the CSV column names.
pub const CSV_NOTE: &str = "# total_s covers parse+cut+encode+solve; max_smt_s is the slowest single fragment query";

/// Writes records as CSV with columns
/// `network,k_or_n,cut,fragments,max_smt_s,total_s,verdict`.
pub fn write_csv<W: io::Write>(records: &[BenchRecord], mut out: W) -> Result<(), csv::Error> {
    writeln!(out, "{CSV_NOTE}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["network", "k_or_n", "cut", "fragments", "max_smt_s", "total_s", "verdict"])?;
    for r in records {
        w.write_record([
            r.network.clone(),
            r.k_or_n.to_string(),
            r.cut.clone(),
            r.fragments.to_string(),
            format!("{:.6}", r.max_smt_s),
            format!("{:.6}", r.total_s),
            r.verdict.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

struct Trial {
    fragments: usize,
    smt: Vec<Duration>,
    total: Duration,
    verdict: CheckResult,
}

/// Per-fragment times are averaged over the trials; the row's max SMT time
/// is the largest of those averages.
fn average(network: &str, k_or_n: usize, cut: &str, trials: Vec<Trial>) -> BenchRecord {
    let n = trials.len() as f64;
    let verdicts: Vec<&str> = trials.iter().map(|t| t.verdict.verdict_name()).collect();
    let verdict = if verdicts.windows(2).all(|w| w[0] == w[1]) { verdicts[0].to_string() } else { "mixed".into() };
    let width = trials.iter().map(|t| t.smt.len()).max().unwrap_or(0);
    let fragment_smt_s: Vec<f64> = (0..width)
        .map(|i| trials.iter().map(|t| t.smt.get(i).map_or(0.0, Duration::as_secs_f64)).sum::<f64>() / n)
        .collect();
    BenchRecord {
        network: network.to_string(),
        k_or_n,
        cut: cut.to_string(),
        fragments: trials.last().expect("at least one trial").fragments,
        max_smt_s: fragment_smt_s.iter().copied().fold(0.0, f64::max),
        fragment_smt_s,
        total_s: trials.iter().map(|t| t.total.as_secs_f64()).sum::<f64>() / n,
        verdict,
    }
}

fn bench_options(base: &CheckOptions) -> CheckOptions {
    CheckOptions { all: true, dump_dir: None, ..base.clone() }
}

fn timed_check(
    build: &dyn Fn() -> Result<OpenSrp, BenchError>,
    p: &PropertySpec,
    a: &FragmentAssignment,
    iface: &Interface,
    opts: &CheckOptions,
) -> Result<Trial, BenchError> {
    let start = Instant::now();
    let srp = build()?;
    let report = check(&srp, p, a, iface, opts)?;
    Ok(Trial {
        fragments: report.fragment_count,
        smt: report.fragments.iter().map(|f| f.smt_time).collect(),
        total: start.elapsed(),
        verdict: report.result,
    })
}

fn run_trials(
    trials: usize,
    mut one: impl FnMut() -> Result<Trial, BenchError>,
) -> Result<Vec<Trial>, BenchError> {
    if trials == 0 {
        return Err(BenchError::NoTrials);
    }
    (0..trials).map(|_| one()).collect()
}

/// SP, FAT or MAINT on fattrees of each `k`, with every cut in `cuts`.
pub fn bench_fattree(
    suite: Suite,
    ks: &[usize],
    cuts: &[CutKind],
    trials: usize,
    opts: &CheckOptions,
) -> Result<Vec<BenchRecord>, BenchError> {
    let opts = bench_options(opts);
    let mut out = Vec::new();
    for &k in ks {
        let (topo, meta) = fattree(k, None)?;
        let h = DEFAULT_MAX_HOPS;
        let network = format!("fat{}", topo.len());
        let spec = match suite {
            Suite::FattreeFat => valley_free(&meta.dest, h, &[], &meta.tiers),
            Suite::FattreeMaint => maintenance(&meta.dest, h, &[], topo.nodes()),
            _ => shortest_path(&meta.dest, h, &[]),
        };
        let compiled = std::sync::Arc::new(spec.compile()?);
        for &cut in cuts {
            let a = fattree_assignment(&topo, &meta, cut);
            let record_trials = if suite == Suite::FattreeMaint {
                let template = SrpTemplate {
                    topology: topo.clone(),
                    policy: compiled.clone(),
                    inh: BTreeMap::new(),
                    outh: BTreeMap::new(),
                };
                let probe = template.instantiate(&compiled.first_assignment())?;
                let cutset = a.cut_set(&probe).map_err(CheckError::from)?;
                let downs: Vec<NodeId> = topo.nodes().iter().filter(|n| **n != meta.dest).cloned().collect();
                let family = maint_family(&topo, &meta.dest, &cutset, &downs, h);
                let p = max_hops_except_property(&compiled.spec.route_type, 6, "down");
                run_trials(trials, || {
                    let start = Instant::now();
                    let report = check_universal(&template, &p, &a, &family, &opts)?;
                    let smt = report.per_assignment.iter().flat_map(|(_, r)| r.fragments.iter().map(|f| f.smt_time)).collect();
                    Ok(Trial {
                        fragments: report.per_assignment.first().map_or(0, |(_, r)| r.fragment_count),
                        smt,
                        total: start.elapsed(),
                        verdict: report.aggregate,
                    })
                })?
            } else {
                let build = || -> Result<OpenSrp, BenchError> {
                    let (topo, _) = fattree(k, None)?;
                    Ok(OpenSrp::closed(topo, compiled.bind(&Assignment::empty())?))
                };
                let srp = build()?;
                let iface = complete_interface(&srp, &a.cut_set(&srp).map_err(CheckError::from)?)?;
                let p = max_hops_property(srp.route_type(), 4);
                run_trials(trials, || timed_check(&build, &p, &a, &iface, &opts))?
            };
            out.push(average(&network, k, cut.name(), record_trials));
        }
    }
    Ok(out)
}

/// Cuts for networks without fattree structure.
fn generic_assignment(srp: &OpenSrp, cut: &str) -> Result<FragmentAssignment, BenchError> {
    let nodes = srp.nodes();
    match cut {
        "mono" => Ok(FragmentAssignment::identity(srp)),
        "full" => Ok(nodes.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect()),
        "halves" => Ok(nodes.iter().enumerate().map(|(i, n)| (n.clone(), usize::from(2 * i >= nodes.len()))).collect()),
        other => Err(BenchError::UnsupportedCut { cut: other.into(), network: "a generic network".into() }),
    }
}

/// SP to `n0` on Erdős–Rényi graphs with `n = 2^x`, `p = 2^(2-x)`, checking
/// that every node is reachable. Cuts: `mono`, `halves`, `full`.
pub fn bench_random(
    xs: &[u32],
    seed: u64,
    cuts: &[&str],
    trials: usize,
    opts: &CheckOptions,
) -> Result<Vec<BenchRecord>, BenchError> {
    let opts = bench_options(opts);
    let mut out = Vec::new();
    for &x in xs {
        let (n, p) = random_scale(x);
        let build = || -> Result<OpenSrp, BenchError> {
            let topo = erdos_renyi(n, p, seed)?;
            let policy = Policy::closed(shortest_path(&NodeId::new("n0"), DEFAULT_MAX_HOPS, &[]))?;
            Ok(OpenSrp::closed(topo, policy))
        };
        let srp = build()?;
        for cut in cuts {
            let a = generic_assignment(&srp, cut)?;
            let iface = complete_interface(&srp, &a.cut_set(&srp).map_err(CheckError::from)?)?;
            let trials = run_trials(trials, || timed_check(&build, &reachable_property(), &a, &iface, &opts))?;
            out.push(average(&format!("er{n}"), n, cut, trials));
        }
    }
    Ok(out)
}

/// A network from a spec file, with cuts `mono`, `file` (its partition),
/// `halves` and `full`.
pub fn bench_file(
    spec: &LoadedSpec,
    cuts: &[&str],
    trials: usize,
    opts: &CheckOptions,
) -> Result<Vec<BenchRecord>, BenchError> {
    let opts = bench_options(opts);
    let srp = spec.instance()?;
    let p = spec.property.clone().unwrap_or_else(reachable_property);
    let build = || -> Result<OpenSrp, BenchError> { Ok(spec.file.load()?.instance()?) };
    let mut out = Vec::new();
    for cut in cuts {
        let a = match *cut {
            "file" => spec.partition.clone().ok_or_else(|| BenchError::UnsupportedCut {
                cut: "file".into(),
                network: format!("{} (no partition)", spec.name),
            })?,
            other => generic_assignment(&srp, other)?,
        };
        let iface = complete_interface(&srp, &a.cut_set(&srp).map_err(CheckError::from)?)?;
        let trials = run_trials(trials, || timed_check(&build, &p, &a, &iface, &opts))?;
        out.push(average(&spec.name, srp.nodes().len(), cut, trials));
    }
    Ok(out)
}

/// Parses `4..8` (inclusive, step 2 when `even`), `4,6,8` or `4`.
pub fn parse_range(text: &str, even: bool) -> Result<Vec<usize>, String> {
    let bad = || format!("bad range `{text}`");
    if let Some((a, b)) = text.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        let step = if even { 2 } else { 1 };
        return Ok((a..=b).step_by(step).collect());
    }
    text.split(',').map(|s| s.trim().parse().map_err(|_| bad())).collect()
}
