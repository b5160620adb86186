//! Parses, type checks and evaluates policy expressions, then asks the SMT
//! solver for the same values.

use srpcut::policy::{evaluate, parse_expr, print_expr, Type, TypeEnv, annotate};
use srpcut::route::RouteType;
use srpcut::smt::{evaluate_probes, probe_expr, SolverConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let rt = RouteType::parse("(option (int 0 15))")?;
    let r = rt.parse_value("(some 3)")?;
    let texts = [
        "(match r (none (none (int 0 15))) ((some h) (if (<= h 14) (some (+ h 1)) (none (int 0 15)))))",
        "(match r (none false) ((some h) (let x (+ h 1) (and (<= 3 x) (not (= x 5))))))",
    ];
    for text in texts {
        let e = parse_expr(text)?;
        let env = [("r", Type::Route(rt.clone()), srpcut::policy::Value::Route(r.clone()))];
        let value = evaluate(&e, &env)?;
        let typed = annotate(&e, &TypeEnv::with_params(env.iter().map(|(n, t, _)| (*n, t.clone())))?)?;
        let named: Vec<_> = env.iter().map(|(n, t, v)| ((*n).into(), t.clone(), v.clone())).collect();
        let probe = probe_expr(&typed, &named)?;
        let smt = evaluate_probes(std::slice::from_ref(&probe), &SolverConfig::default())?;
        println!("{}\n  interpreter: {value}\n  solver:      {}", print_expr(&e), probe.decode(&smt[0])?);
    }
    Ok(())
}
