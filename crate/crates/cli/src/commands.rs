use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde_json::{json, Value as Json};

use bary_core::factorization::{factorize_awqri, factorize_general, verify_factorization, FactorError};
use bary_core::means::{
    affine_equivalent, extract_generator_refined, pre_mean_decompose_refined, psi_build, psi_mean_check, Generator, Interpolation,
    MeanError,
};
use bary_core::operations::{load_op_spec, Params};
use bary_core::properties::{
    applicable_properties, cross_check_equivalences, domain_json, replay, run_suite, Judgement, Witness,
    DEFAULT_BUDGET,
};
use bary_core::{
    builtin, check_property, CheckDomain, Execution, Interval, PropertyId, PropertyVerdict, Status, VariadicOp, Word,
};

use crate::render;
use crate::{CheckArgs, Cli, Command, Common, ExtractArgs, FactorizeArgs, Format, Interp, PsiArgs, SuiteArgs};

pub const HOLD: u8 = 0;
pub const FAIL: u8 = 1;
pub const INCONCLUSIVE: u8 = 3;

pub fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Check(a) => check(a),
        Command::Suite(a) => suite(a),
        Command::Factorize(a) => factorize(a),
        Command::Extract(a) => extract(a),
        Command::Psi(a) => psi(a),
    }
}

fn load_op(c: &Common) -> Result<VariadicOp> {
    let params: Params = match &c.params {
        Some(p) => serde_json::from_str(p).context("--params must be a JSON object")?,
        None => Params::new(),
    };
    if let Some(name) = c.op.strip_prefix("builtin:") {
        return Ok(builtin(name, &params)?);
    }
    if c.params.is_some() {
        bail!("--params only applies to builtin operations");
    }
    if let Some(name) = c.op.strip_prefix("table:") {
        return bary_core::corpus::named_table(name).ok_or_else(|| {
            anyhow!("unknown table `{name}`; known: {}", bary_core::corpus::NAMED_TABLES.join(", "))
        });
    }
    Ok(load_op_spec(Path::new(&c.op))?)
}

fn interval(c: &Common) -> Result<Option<Interval>> {
    let Some(s) = &c.interval else { return Ok(None) };
    let (lo, hi) = s.split_once(',').ok_or_else(|| anyhow!("--interval expects `lo,hi`"))?;
    let lo: f64 = lo.trim().parse().with_context(|| format!("bad lower bound `{lo}`"))?;
    let hi: f64 = hi.trim().parse().with_context(|| format!("bad upper bound `{hi}`"))?;
    Ok(Some(Interval::closed(lo, hi)?))
}

fn execution(c: &Common) -> Result<Execution> {
    match c.jobs {
        Some(0) => bail!("--jobs must be positive"),
        Some(1) => Ok(Execution::Sequential),
        Some(n) => {
            #[cfg(feature = "parallel")]
            rayon::ThreadPoolBuilder::new().num_threads(n).build_global().ok();
            let _ = n;
            Ok(Execution::Parallel)
        }
        None => Ok(Execution::Parallel),
    }
}

fn check_domain(c: &Common, op: &VariadicOp, sampled: bool, budget: Option<u64>) -> Result<CheckDomain> {
    let mut dom = if op.alphabet().is_some() && !sampled {
        if c.interval.is_some() {
            bail!("--interval applies to real-valued operations only");
        }
        CheckDomain::exhaustive(c.max_len)
    } else {
        CheckDomain::sampled(c.samples, c.seed, c.max_len)
    };
    if let Some(i) = interval(c)? {
        dom = dom.with_interval(i);
    }
    Ok(dom.with_tol(c.tol).with_budget(budget.unwrap_or(DEFAULT_BUDGET)).with_execution(execution(c)?))
}

fn emit(c: &Common, doc: &Json, text: String) -> Result<()> {
    let out = match c.format {
        Format::Json => serde_json::to_string_pretty(doc)? + "\n",
        Format::Text => text,
    };
    match &c.out {
        Some(p) => std::fs::write(p, out).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{out}"),
    }
    Ok(())
}

fn status_code(statuses: impl IntoIterator<Item = Status>) -> u8 {
    let mut code = HOLD;
    for s in statuses {
        match s {
            Status::Fails => return FAIL,
            Status::Inconclusive => code = INCONCLUSIVE,
            Status::Holds => {}
        }
    }
    code
}

fn parse_props(s: &str, op: &VariadicOp, dom: &CheckDomain) -> Result<Vec<PropertyId>> {
    if s.trim().eq_ignore_ascii_case("all") {
        return Ok(applicable_properties(op, &PropertyId::ALL, dom));
    }
    s.split(',').filter(|t| !t.trim().is_empty()).map(|t| t.parse::<PropertyId>().map_err(Into::into)).collect()
}

fn check(a: CheckArgs) -> Result<u8> {
    let c = &a.common;
    let op = load_op(c)?;
    if let Some(path) = &a.replay {
        return replay_file(c, &op, path);
    }
    let dom = check_domain(c, &op, a.sampled, a.budget)?;
    let props = parse_props(&a.prop, &op, &dom)?;
    if props.is_empty() {
        bail!("no applicable property selected");
    }
    let mut verdicts: Vec<PropertyVerdict> = Vec::new();
    for p in props {
        verdicts.push(check_property(p, &op, &dom)?);
    }
    let doc = json!({
        "schema": 1,
        "command": "check",
        "op": op.name(),
        "domain": domain_json(&dom),
        "verdicts": verdicts.iter().map(PropertyVerdict::to_json).collect::<Vec<_>>(),
    });
    emit(c, &doc, render::verdicts(&op, &dom, &verdicts))?;
    Ok(status_code(verdicts.iter().map(|v| v.status)))
}

fn read_witness(path: &Path) -> Result<Witness> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let doc: Json = serde_json::from_str(&text).with_context(|| format!("{} is not JSON", path.display()))?;
    let candidate = match doc.get("verdicts").and_then(Json::as_array) {
        Some(vs) => vs
            .iter()
            .find(|v| v.get("witness").is_some_and(|w| !w.is_null()))
            .ok_or_else(|| anyhow!("{} holds no witness", path.display()))?,
        None => &doc,
    };
    Ok(Witness::from_json(candidate)?)
}

fn replay_file(c: &Common, op: &VariadicOp, path: &Path) -> Result<u8> {
    let w = read_witness(path)?;
    let j = replay(op, &w, c.tol)?;
    let (status, code) = match &j {
        Judgement::Violated { .. } => ("violated", FAIL),
        Judgement::Holds => ("holds", HOLD),
        Judgement::Vacuous => ("vacuous", INCONCLUSIVE),
        Judgement::Skipped => ("skipped", INCONCLUSIVE),
        Judgement::IllDefined => ("ill-defined", INCONCLUSIVE),
    };
    let (lhs, rhs) = match &j {
        Judgement::Violated { lhs, rhs } => (lhs.to_json(), rhs.to_json()),
        _ => (Json::Null, Json::Null),
    };
    let doc = json!({
        "schema": 1,
        "command": "replay",
        "op": op.name(),
        "witness": w.to_json(),
        "judgement": status,
        "lhs": lhs,
        "rhs": rhs,
    });
    let mut text = format!("{} on {}: {w}\nreplay: {status}", w.property, op.name());
    if let Judgement::Violated { lhs, rhs } = &j {
        text.push_str(&format!(" (lhs {lhs}, rhs {rhs})"));
    }
    text.push('\n');
    emit(c, &doc, text)?;
    Ok(code)
}

fn suite(a: SuiteArgs) -> Result<u8> {
    let c = &a.common;
    let op = load_op(c)?;
    let dom = check_domain(c, &op, a.sampled, a.budget)?;
    let props = applicable_properties(&op, &PropertyId::ALL, &dom);
    let report = run_suite(&op, &props, &dom)?;
    let consistency = cross_check_equivalences(&op, &dom)?;
    let doc = json!({
        "schema": 1,
        "command": "suite",
        "domain": domain_json(&dom),
        "suite": report.to_json(),
        "consistency": consistency.to_json(),
    });
    emit(c, &doc, render::suite(&op, &dom, &report, &consistency))?;
    let broken = report.implications.iter().any(|f| f.violated) || !consistency.consistent();
    Ok(if broken { FAIL } else { status_code(report.verdicts.iter().map(|v| v.status)) })
}

fn factorize(a: FactorizeArgs) -> Result<u8> {
    let c = &a.common;
    let op = load_op(c)?;
    let result = if a.general { factorize_general(&op, c.max_len) } else { factorize_awqri(&op, c.max_len, None) };
    let fact = match result {
        Ok(f) => f,
        Err(FactorError::Precondition { property, witness }) => {
            let doc = json!({
                "schema": 1,
                "command": "factorize",
                "op": op.name(),
                "refused": {
                    "property": property.id(),
                    "witness": witness.as_ref().map(Witness::to_json),
                },
            });
            let text = format!(
                "{}: cannot factorize, {property} fails{}\n",
                op.name(),
                witness.map(|w| format!("\n  witness: {w}")).unwrap_or_default()
            );
            emit(c, &doc, text)?;
            return Ok(FAIL);
        }
        Err(FactorError::NotFinite(m)) => bail!("{m}"),
        Err(e) => return Err(e.into()),
    };
    let dom = CheckDomain::exhaustive(fact.max_arity).with_tol(c.tol).with_execution(execution(c)?);
    let strong = fact.certified_strong.is_some();
    let verdict = verify_factorization(&op, &fact, &dom, strong)?;
    let doc = json!({
        "schema": 1,
        "command": "factorize",
        "factorization": fact.to_json(),
        "verification": verdict.to_json(),
    });
    emit(c, &doc, render::factorization(&op, &fact, &verdict))?;
    Ok(if verdict.passed() { HOLD } else { FAIL })
}

fn mean_refusal(e: &MeanError) -> bool {
    matches!(e, MeanError::NotMonotone { .. } | MeanError::PsiNotIncreasing { .. } | MeanError::ProbeCollapse)
}

fn real_interval(c: &Common, op: &VariadicOp) -> Result<Interval> {
    match interval(c)? {
        Some(i) => Ok(i),
        None => bary_core::properties::default_interval(op)
            .filter(Interval::is_closed_bounded)
            .ok_or_else(|| anyhow!("{} needs --interval lo,hi", op.name())),
    }
}

fn refusal(c: &Common, command: &str, op: &VariadicOp, e: &MeanError) -> Result<u8> {
    let doc = json!({"schema": 1, "command": command, "op": op.name(), "refused": e.to_string()});
    emit(c, &doc, format!("{}: refused: {e}\n", op.name()))?;
    Ok(FAIL)
}

fn extract(a: ExtractArgs) -> Result<u8> {
    let c = &a.common;
    let op = load_op(c)?;
    let iv = real_interval(c, &op)?;
    let exec = execution(c)?;
    let kind = match a.interpolation {
        Interp::Linear => Interpolation::Linear,
        Interp::Cubic => Interpolation::MonotoneCubic,
    };
    let compare = match &a.compare {
        Some(name) => Some(Generator::named(name).ok_or_else(|| {
            anyhow!("unknown generator `{name}`; known: {}", Generator::catalog_names().join(", "))
        })?),
        None => None,
    };
    let (extraction, residuals) = if a.pre_mean {
        match pre_mean_decompose_refined(&op, &iv, a.grid_q, a.refine, kind, exec) {
            Ok(d) => {
                let r = d.residuals(c.max_len, c.samples, c.seed)?;
                (d.extraction, r)
            }
            Err(e) if mean_refusal(&e) => return refusal(c, "extract", &op, &e),
            Err(e) => return Err(e.into()),
        }
    } else {
        match extract_generator_refined(&op, &iv, a.grid_q, a.refine, kind, exec) {
            Ok(x) => {
                let r = x.residuals(&op, c.max_len, c.samples, c.seed)?;
                (x, r)
            }
            Err(e) if mean_refusal(&e) => return refusal(c, "extract", &op, &e),
            Err(e) => return Err(e.into()),
        }
    };
    let fit = match &compare {
        Some(g) => Some(affine_equivalent(&extraction.generator(), g, &iv, a.compare_tol)?),
        None => None,
    };
    let f_hat: Vec<Json> = (0..=16)
        .map(|k| {
            let x = iv.lo + (iv.hi - iv.lo) * k as f64 / 16.0;
            json!([x, extraction.f_hat(x)])
        })
        .collect();
    let residual_ok = residuals.max <= a.residual_tol;
    let fit_ok = fit.as_ref().map_or(true, |f| f.holds);
    let doc = json!({
        "schema": 1,
        "command": "extract",
        "op": op.name(),
        "interval": [iv.lo, iv.hi],
        "q": a.grid_q,
        "refine": a.refine,
        "interpolation": kind,
        "pre_mean": a.pre_mean,
        "psi": &extraction.table,
        "f_hat": f_hat,
        "residuals": {
            "n_max": c.max_len,
            "seed": c.seed,
            "stats": residuals,
            "tol": a.residual_tol,
            "within": residual_ok,
        },
        "compare": fit.as_ref().map(|f| json!({"generator": a.compare, "fit": f})),
        "status": if residual_ok && fit_ok { Status::Holds } else { Status::Fails },
    });
    let text = render::extraction(&op, &iv, &extraction, &residuals, a.residual_tol, a.compare.as_deref(), fit.as_ref());
    emit(c, &doc, text)?;
    Ok(if residual_ok && fit_ok { HOLD } else { FAIL })
}

fn psi(a: PsiArgs) -> Result<u8> {
    let c = &a.common;
    let op = load_op(c)?;
    let iv = real_interval(c, &op)?;
    let (lo, hi) = (Word::reals(&[iv.lo]), Word::reals(&[iv.hi]));
    let table = psi_build(&op, &lo, &hi, a.grid_q, c.tol, execution(c)?)?;
    let check = if a.check {
        Some(psi_mean_check(&op, &table, c.max_len, c.samples, c.tol, c.seed)?)
    } else {
        None
    };
    let increasing = table.first_non_increase().is_none();
    let ok = increasing && check.as_ref().map_or(true, |k| k.holds);
    let doc = json!({
        "schema": 1,
        "command": "psi",
        "op": op.name(),
        "interval": [iv.lo, iv.hi],
        "table": &table,
        "increasing": increasing,
        "check": check,
    });
    emit(c, &doc, render::psi(&op, &table, check.as_ref()))?;
    Ok(if ok { HOLD } else { FAIL })
}
