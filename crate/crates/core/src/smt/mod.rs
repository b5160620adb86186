//! SMT backend: encodes fragment checks as SMT-LIB queries and runs an
//! external solver on them.

pub mod encode;
pub mod model;
pub mod process;

pub use encode::{
    encode_fragment, probe_expr, probe_expr_opaque, smt_symbol, EncodeError, ExprProbe, NodeVars, Obligation, ObligationKind, SchemaVar,
    SmtScript, VarRole, VarSchema,
};
pub use model::{parse_model, parse_solver_output, Model, ModelValue, OutputError, SchemaError, SolverVerdict};
pub use process::{run_solver, SolverConfig, SolverError};

/// Evaluates closed expression probes with one solver call, returning the
/// leaf values of each probe in order.
pub fn evaluate_probes(probes: &[ExprProbe], cfg: &SolverConfig) -> Result<Vec<Vec<ModelValue>>, SolverError> {
    let terms: Vec<&String> = probes.iter().flat_map(|p| p.terms.iter()).collect();
    if terms.is_empty() {
        return Ok(probes.iter().map(|_| Vec::new()).collect());
    }
    let mut script = String::from("(set-logic QF_LIA)\n(check-sat)\n(get-value (");
    for t in &terms {
        script.push_str(t);
        script.push(' ');
    }
    script.push_str("))\n");
    let model = match run_solver(&script, cfg)? {
        SolverVerdict::Sat(m) => m,
        other => return Err(SolverError::MalformedSolverOutput(format!("expected sat, got {other:?}"))),
    };
    if model.ordered.len() != terms.len() {
        return Err(SolverError::MalformedSolverOutput(format!(
            "expected {} values, got {}",
            terms.len(),
            model.ordered.len()
        )));
    }
    let mut it = model.ordered.into_iter();
    Ok(probes.iter().map(|p| it.by_ref().take(p.terms.len()).collect()).collect())
}
