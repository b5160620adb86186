//! The command line against the shipped scenario files.

mod common;

use std::ffi::OsString;
use std::path::Path;

use common::{data, z3_available};
use srpcut::bench::{bench_fattree, bench_random, Suite};
use srpcut::checker::CheckOptions;
use srpcut::netgen::CutKind;
use srpcut::specfile::NetworkSpecFile;

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn run(args: &[&str]) -> Run {
    let argv: Vec<OsString> = std::iter::once("srpcut").chain(args.iter().copied()).map(OsString::from).collect();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = srpcut::cli::run(argv, &mut out, &mut err);
    Run { code, out: String::from_utf8(out).unwrap(), err: String::from_utf8(err).unwrap() }
}

fn path(name: &str) -> String {
    data(name).display().to_string()
}

#[test]
fn solve_prints_the_route_table() {
    let r = run(&["solve", &path("fat20_pods.json")]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert!(r.out.contains("e7    Some 0"), "{}", r.out);
    assert!(r.out.contains("e0    Some 4"), "{}", r.out);
    assert!(!r.out.contains("Some 5"));
    assert_eq!(run(&["solve", &path("fat20_pods.json")]).out, r.out);
}

#[test]
fn solve_rejects_dangling_edges() {
    let dir = tempfile::tempdir().unwrap();
    let mut file = NetworkSpecFile::read(&data("fat20_pods.json")).unwrap();
    file.edges.push(("e7".into(), "ghost".into()));
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, file.to_json()).unwrap();
    let r = run(&["solve", bad.to_str().unwrap()]);
    assert_eq!(r.code, 2);
    assert!(r.err.contains("undeclared node"), "{}", r.err);
}

#[test]
fn check_verdicts_and_exit_codes() {
    if !z3_available() {
        eprintln!("z3 not found; skipping");
        return;
    }
    let ok = run(&["check", &path("fat20_pods.json")]);
    assert_eq!(ok.code, 0, "{}{}", ok.out, ok.err);

    let hole = run(&["check", &path("fat20_blackhole.json")]);
    assert_eq!(hole.code, 1, "{}", hole.out);
    assert!(hole.out.contains("guarantee at c0 in fragment 0: λ(c0) = Some 6"), "{}", hole.out);
    assert!(hole.out.contains("c0    Some 6"));

    let refined = run(&["check", &path("fat20_bad_annotation.json"), "--refine", "3"]);
    assert_eq!(refined.code, 0, "{}", refined.out);
    assert!(refined.out.contains("refined I(a0c0): 1 → 3"), "{}", refined.out);
    assert!(refined.out.contains("rounds: 2"));

    let no_solver = run(&["check", &path("fat20_pods.json"), "--solver", "/nonexistent/solver"]);
    assert_eq!(no_solver.code, 2);
}

#[test]
fn check_synthesizes_complete_interfaces() {
    if !z3_available() {
        eprintln!("z3 not found; skipping");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let mut file = NetworkSpecFile::read(&data("fat20_pods.json")).unwrap();
    file.interface = None;
    let spec = dir.path().join("bare.json");
    std::fs::write(&spec, file.to_json()).unwrap();
    let r = run(&["check", spec.to_str().unwrap(), "--interface", "complete", "--jobs", "3", "--all"]);
    assert_eq!(r.code, 0, "{}{}", r.out, r.err);
    assert_eq!(r.out.matches("verified in").count(), 5);
}

#[test]
fn maint_spec_checks_every_down_node() {
    if !z3_available() {
        eprintln!("z3 not found; skipping");
        return;
    }
    let r = run(&["check", &path("fat20_maint.json"), "--interface", "maint"]);
    assert_eq!(r.code, 0, "{}{}", r.out, r.err);
    assert_eq!(r.out.matches("down=").count(), 19);
    assert!(r.out.contains("aggregate: Verified"));
}

fn cut_into(spec: &Path, dir: &Path) -> Vec<NetworkSpecFile> {
    let r = run(&["cut", spec.to_str().unwrap(), "--out", dir.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.err);
    let mut paths: Vec<_> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    paths.sort();
    paths.iter().map(|p| NetworkSpecFile::read(p).unwrap()).collect()
}

#[test]
fn cut_writes_one_standalone_file_per_fragment() {
    let dir = tempfile::tempdir().unwrap();
    let files = cut_into(&data("fat20_pods.json"), dir.path());
    assert_eq!(files.len(), 5);
    let spine = &files[0];
    assert_eq!(spine.outputs.get("c0").map(String::as_str), Some("(some 2)"));
    assert_eq!(spine.inputs.len(), 8);
    for f in &files {
        f.load().unwrap().instance().unwrap();
    }
}

#[test]
fn identity_partition_cuts_to_the_input() {
    let dir = tempfile::tempdir().unwrap();
    let mut file = NetworkSpecFile::read(&data("fat20_pods.json")).unwrap();
    file.partition = None;
    file.interface = None;
    let spec = dir.path().join("whole.json");
    std::fs::write(&spec, file.to_json()).unwrap();
    let out = dir.path().join("out");
    let files = cut_into(&spec, &out);
    assert_eq!(files.len(), 1);
    let mut copy = files[0].clone();
    copy.name = file.name.clone();
    assert_eq!(copy, file);
}

#[test]
fn fragment_files_reproduce_the_aggregate_verdict() {
    if !z3_available() {
        eprintln!("z3 not found; skipping");
        return;
    }
    for (name, expected) in [("fat20_pods.json", 0), ("fat20_blackhole.json", 1)] {
        let dir = tempfile::tempdir().unwrap();
        cut_into(&data(name), dir.path());
        let whole = run(&["check", &path(name)]).code;
        let worst = std::fs::read_dir(dir.path())
            .unwrap()
            .map(|e| run(&["check", e.unwrap().path().to_str().unwrap()]).code)
            .max()
            .unwrap();
        assert_eq!((whole, worst), (expected, expected), "{name}");
    }
}

#[test]
fn bench_writes_csv() {
    if !z3_available() {
        eprintln!("z3 not found; skipping");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t.csv");
    let r = run(&["bench", "--suite", "fattree-sp", "--k", "4", "--cuts", "mono,pods", "--csv", csv.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.err);
    let text = std::fs::read_to_string(csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# total_s covers parse+cut+encode+solve"));
    assert_eq!(lines[1], "network,k_or_n,cut,fragments,max_smt_s,total_s,verdict");
    assert_eq!(lines.len(), 4);
    assert!(lines[3].starts_with("fat20,4,pods,5,"));
    assert!(run(&["bench", "--suite", "fattree-sp", "--cuts", "halves"]).code == 2);
}

#[test]
fn bench_rows_keep_their_bookkeeping() {
    if !z3_available() {
        eprintln!("z3 not found; skipping");
        return;
    }
    let opts = CheckOptions::default();
    let rows = bench_fattree(Suite::FattreeSp, &[4], &[CutKind::Monolithic, CutKind::Pods, CutKind::Full], 2, &opts).unwrap();
    assert_eq!(rows.len(), 3);
    for r in &rows {
        let max = r.fragment_smt_s.iter().copied().fold(0.0, f64::max);
        assert_eq!(r.max_smt_s, max);
        assert_eq!(r.fragment_smt_s.len(), r.fragments);
        assert_eq!(r.verdict, "verified");
    }
    let random = bench_random(&[4, 5, 6], 3, &["mono"], 1, &opts).unwrap();
    assert_eq!(random.iter().map(|r| r.k_or_n).collect::<Vec<_>>(), vec![16, 32, 64]);
    let again = bench_random(&[4, 5, 6], 3, &["mono"], 1, &opts).unwrap();
    let verdicts = |rs: &[srpcut::bench::BenchRecord]| rs.iter().map(|r| r.verdict.clone()).collect::<Vec<_>>();
    assert_eq!(verdicts(&random), verdicts(&again));
}
