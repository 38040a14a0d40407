//! Text renderings of the JSON reports.

use std::fmt::Write;

use bary_core::factorization::{Factorization, FactorizationVerdict, Inner};
use bary_core::means::{AffineFit, Extraction, PsiCheck, PsiTable, ResidualStats};
use bary_core::properties::{ConsistencyReport, Mode, SuiteReport};
use bary_core::{CheckDomain, Interval, PropertyVerdict, VariadicOp};

fn header(op: &VariadicOp, dom: &CheckDomain) -> String {
    let mode = match &dom.mode {
        Mode::Exhaustive { .. } => "exhaustive".to_string(),
        Mode::Sampled { interval, samples, seed } => {
            let on = interval.map(|i| format!(" on {i}")).unwrap_or_default();
            format!("sampled{on}, {samples} words per length, seed {seed}")
        }
    };
    format!("{}: {mode}, max length {}, tol {:e}\n", op.name(), dom.max_len, dom.tol)
}

fn verdict_line(out: &mut String, v: &PropertyVerdict) {
    let _ = write!(out, "  {:<28} {:<12} {} instances", v.property.id(), v.status.to_string(), v.instances_checked);
    if v.vacuous > 0 {
        let _ = write!(out, ", {} vacuous", v.vacuous);
    }
    if v.skipped > 0 {
        let _ = write!(out, ", {} skipped", v.skipped);
    }
    out.push('\n');
    if let Some(w) = &v.witness {
        let _ = writeln!(out, "    witness: {w}");
    }
    if let Some(n) = &v.note {
        let _ = writeln!(out, "    note: {n}");
    }
}

pub fn verdicts(op: &VariadicOp, dom: &CheckDomain, vs: &[PropertyVerdict]) -> String {
    let mut out = header(op, dom);
    for v in vs {
        verdict_line(&mut out, v);
    }
    out
}

pub fn suite(op: &VariadicOp, dom: &CheckDomain, r: &SuiteReport, c: &ConsistencyReport) -> String {
    let mut out = header(op, dom);
    for v in &r.verdicts {
        verdict_line(&mut out, v);
    }
    for (p, reason) in &r.inapplicable {
        let _ = writeln!(out, "  {:<28} n/a          {reason}", p.id());
    }
    out.push_str("implications:\n");
    for f in &r.implications {
        let mark = if f.violated { "VIOLATED" } else { "ok" };
        let _ = writeln!(out, "  {} ⇒ {}: {mark}", f.premise, f.conclusion);
    }
    out.push_str("equivalent formulations:\n");
    for g in &c.groups {
        let members: Vec<String> = g.members.iter().map(|(n, s)| format!("{n}={s}")).collect();
        let mark = match (g.agree, g.incomplete) {
            (false, _) => "DISAGREE",
            (true, true) => "incomplete",
            (true, false) => "agree",
        };
        let _ = writeln!(out, "  {}: {mark} ({})", g.name, members.join(", "));
    }
    out
}

pub fn factorization(op: &VariadicOp, f: &Factorization, v: &FactorizationVerdict) -> String {
    let mut out = String::new();
    let kind = match &f.h {
        Inner::Op(_) => "H ε-standard operation",
        Inner::Strings(_) => "H length-preserving string function",
    };
    let _ = writeln!(out, "{}: F_n = f_n ∘ H_n for n ≤ {}, {kind}", op.name(), f.max_arity);
    for (k, fk) in f.f.iter().enumerate() {
        let pairs: Vec<String> = fk.pairs().map(|(x, y)| format!("{x}↦{y}")).collect();
        let _ = writeln!(out, "  f_{}: {}", k + 1, pairs.join(" "));
    }
    if let Some(s) = f.certified_strong {
        let _ = writeln!(out, "  F strongly B-preassociative; H certified strong: {s}");
    }
    out.push_str(&v.to_string());
    out
}

pub fn extraction(
    op: &VariadicOp,
    iv: &Interval,
    x: &Extraction,
    res: &ResidualStats,
    tol: f64,
    compare: Option<&str>,
    fit: Option<&AffineFit>,
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} on {iv}: ψ with q = {}, max spot defect {:e}", op.name(), x.table.q, x.table.max_defect);
    for w in &x.table.warnings {
        let _ = writeln!(out, "  warning: {w}");
    }
    out.push_str("  f̂ (gauge f̂(a) = 0, f̂(b) = 1):\n");
    for k in 0..=8 {
        let t = iv.lo + (iv.hi - iv.lo) * k as f64 / 8.0;
        let _ = writeln!(out, "    f̂({t:.6}) = {:.9}", x.f_hat(t));
    }
    let mark = if res.max <= tol { "ok" } else { "TOO LARGE" };
    let _ = writeln!(
        out,
        "  reconstruction over {} tuples: max residual {:e}, mean {:e} ({mark}, tol {tol:e})",
        res.samples, res.max, res.mean
    );
    if let (Some(name), Some(f)) = (compare, fit) {
        let mark = if f.holds { "affine-equivalent" } else { "NOT affine-equivalent" };
        let _ = writeln!(
            out,
            "  vs {name}: {mark}, {name} = {:.9}·f̂ + {:.9}, worst residual {:e}",
            f.r, f.s, f.worst_residual
        );
    }
    out
}

pub fn psi(op: &VariadicOp, t: &PsiTable, check: Option<&PsiCheck>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}: ψ(p/{}) = F(b^p a^(q−p)), a = {}, b = {}", op.name(), t.q, t.a, t.b);
    let step = (t.q / 16).max(1);
    for p in (0..=t.q).step_by(step as usize) {
        let _ = writeln!(out, "  ψ({p}/{}) = {:.12}", t.q, t.at(p));
    }
    match t.first_non_increase() {
        Some((p, next)) => {
            let _ = writeln!(out, "  not increasing: ψ({p}/{0}) ≥ ψ({next}/{0})", t.q);
        }
        None => out.push_str("  strictly increasing\n"),
    }
    for w in &t.warnings {
        let _ = writeln!(out, "  warning: {w}");
    }
    if let Some(c) = check {
        let scope = if c.exhaustive { "all" } else { "sampled" };
        let _ = writeln!(
            out,
            "  ψ-mean identity: {} on {scope} {} tuples ({} off grid), max residual {:e}",
            if c.holds { "holds" } else { "fails" },
            c.checked,
            c.off_grid,
            c.max_residual
        );
        if let Some(w) = &c.witness {
            let _ = writeln!(out, "    witness: numerators {:?}, lhs {}, rhs {}", w.numerators, w.lhs, w.rhs);
        }
    }
    out
}
