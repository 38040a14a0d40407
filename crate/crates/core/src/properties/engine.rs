use std::collections::HashMap;

use super::laws::{self, expand, judge, Ctx, Fault, Instance, Subst};
pub use super::laws::Judgement;
use super::sampling::{default_interval, primary_word, Source};
use super::{CheckDomain, CheckError, Mode, PropertyId, PropertyVerdict, Status, Witness};
use crate::domain::Domain;
use crate::operations::VariadicOp;
use crate::par::map_range;
use crate::value::Value;
use crate::words::{word_at, Word};

const CHUNK: u64 = 2048;

/// Errors out when `p` cannot be checked on `op` under `dom` at all.
pub fn applicable(p: PropertyId, op: &VariadicOp, dom: &CheckDomain) -> Result<(), CheckError> {
    if p.needs_closed_codomain() && !op.codomain().is_domain() {
        return Err(CheckError::Inapplicable {
            property: p,
            op: op.name().to_string(),
            reason: format!("values of F are fed back as letters, but the codomain is {}", op.codomain().describe()),
        });
    }
    if p.exhaustive_only() && !dom.is_exhaustive() {
        return Err(CheckError::Inapplicable {
            property: p,
            op: op.name().to_string(),
            reason: "quantifies over whole ranges; needs exhaustive mode over a finite alphabet".into(),
        });
    }
    Ok(())
}

enum Plan {
    Exhaustive(Vec<Value>),
    Sampled { source: Source, samples: u64, seed: u64 },
}

fn plan(op: &VariadicOp, dom: &CheckDomain) -> Result<Plan, CheckError> {
    match &dom.mode {
        Mode::Exhaustive { alphabet } => {
            let letters = match (alphabet, op.alphabet()) {
                (Some(a), _) => a.letters().to_vec(),
                (None, Some(a)) => a.letters().to_vec(),
                (None, None) => {
                    return Err(CheckError::DomainMismatch(
                        "exhaustive mode needs a finite alphabet; the operation is real-valued".into(),
                    ))
                }
            };
            if let Some(l) = letters.iter().find(|l| !op.domain().contains(l)) {
                return Err(CheckError::DomainMismatch(format!("letter {l} is outside the operation's domain")));
            }
            Ok(Plan::Exhaustive(letters))
        }
        Mode::Sampled { interval, samples, seed } => {
            let source = match op.domain() {
                Domain::Finite(a) => Source::Letters(a.letters().to_vec()),
                Domain::Real(d) => {
                    let i = match interval {
                        Some(i) => *i,
                        None => default_interval(op)
                            .ok_or_else(|| CheckError::DomainMismatch("no sampling interval fits the domain".into()))?,
                    };
                    if !d.includes(&i) {
                        return Err(CheckError::DomainMismatch(format!("sampling interval {i} is not inside {d}")));
                    }
                    Source::Reals { lo: i.sample_lo(), hi: i.sample_hi() }
                }
            };
            Ok(Plan::Sampled { source, samples: *samples, seed: *seed })
        }
    }
}

fn exhaustive_cost(p: PropertyId, a: usize, max_len: usize) -> f64 {
    let mut total = 0.0;
    for n in laws::primary_lengths(p, max_len) {
        total += (a as f64).powi(n as i32) * laws::instances_per_word(p, n, a, max_len);
    }
    if p == PropertyId::MultGrowingRange {
        total += (2..=max_len).map(|n| (a as f64).powi(n as i32)).sum::<f64>();
    }
    total
}

#[derive(Default)]
struct Tally {
    checked: u64,
    vacuous: u64,
    skipped: u64,
    ill: u64,
}

struct WordOutcome {
    tally: Tally,
    violation: Option<(Instance, Value, Value)>,
    error: Option<CheckError>,
}

fn fault(p: PropertyId, inst: &Instance, f: Fault) -> CheckError {
    match f {
        Fault::Op(source) => CheckError::Eval { instance: describe(p, inst), source },
        Fault::Malformed(m) => CheckError::Witness(m),
    }
}

fn describe(p: PropertyId, inst: &Instance) -> String {
    let parts: Vec<String> = inst.iter().map(|(n, s)| format!("{n} = {s}")).collect();
    format!("{p} [{}]", parts.join(", "))
}

fn run_word(p: PropertyId, ctx: &Ctx, x: &Word, max_len: usize, subst: &mut Subst) -> WordOutcome {
    let mut out = WordOutcome { tally: Tally::default(), violation: None, error: None };
    for inst in expand(p, ctx.op, x, max_len, subst) {
        match judge(p, ctx, &inst) {
            Ok(Judgement::Holds) => out.tally.checked += 1,
            Ok(Judgement::Vacuous) => out.tally.vacuous += 1,
            Ok(Judgement::Skipped) => out.tally.skipped += 1,
            Ok(Judgement::IllDefined) => out.tally.ill += 1,
            Ok(Judgement::Violated { lhs, rhs }) => {
                out.tally.checked += 1;
                out.violation = Some((inst, lhs, rhs));
                break;
            }
            Err(f) => {
                out.error = Some(fault(p, &inst, f));
                break;
            }
        }
    }
    out
}

/// Greedily pushes letters of a sampled witness to the interval ends (then
/// the midpoint) while the violation persists.
fn shrink(p: PropertyId, ctx: &Ctx, source: &Source, found: (Instance, Value, Value)) -> (Instance, Value, Value) {
    let (mut inst, mut lhs, mut rhs) = found;
    let targets = [source.lo(), source.hi(), source.mid()];
    for _ in 0..4 {
        let mut changed = false;
        for s in 0..inst.len() {
            let len = match &inst[s].1 {
                laws::Slot::Word(w) => w.len(),
                _ => continue,
            };
            for pos in 0..len {
                for t in &targets {
                    let laws::Slot::Word(w) = &inst[s].1 else { unreachable!() };
                    if &w.letters()[pos] == t {
                        continue;
                    }
                    let mut letters = w.letters().to_vec();
                    letters[pos] = t.clone();
                    let mut cand = inst.clone();
                    cand[s].1 = laws::Slot::Word(Word::from_letters(letters));
                    if let Ok(Judgement::Violated { lhs: l, rhs: r }) = judge(p, ctx, &cand) {
                        inst = cand;
                        (lhs, rhs) = (l, r);
                        changed = true;
                        break;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    (inst, lhs, rhs)
}

fn witness(p: PropertyId, (instance, lhs, rhs): (Instance, Value, Value)) -> Witness {
    let size = laws::size(p, &instance);
    let residual = lhs.residual(&rhs);
    Witness { property: p, instance, lhs, rhs, residual, size }
}

/// Checks one law on one operation. Fails with the first violation in the
/// global instance order; holds when every evaluated instance agrees;
/// inconclusive when nothing decisive was evaluated or the budget is too
/// small.
pub fn check_property(p: PropertyId, op: &VariadicOp, dom: &CheckDomain) -> Result<PropertyVerdict, CheckError> {
    applicable(p, op, dom)?;
    if dom.max_len == 0 {
        return Err(CheckError::DomainMismatch("max_len must be at least 1".into()));
    }
    let max_len = dom.max_len.min(op.max_arity().unwrap_or(usize::MAX)).min(63);
    let plan = plan(op, dom)?;
    let mut verdict = PropertyVerdict {
        property: p,
        status: Status::Holds,
        exhaustive: dom.is_exhaustive(),
        max_len,
        instances_checked: 0,
        vacuous: 0,
        skipped: 0,
        ill_defined: 0,
        witness: None,
        note: None,
    };
    let mut notes: Vec<String> = Vec::new();
    if max_len < dom.max_len {
        notes.push(format!("word length capped at the operation's arity {max_len}"));
    }

    let lengths = laws::primary_lengths(p, max_len);
    let mut samples = 0;
    match &plan {
        Plan::Exhaustive(letters) => {
            let cost = exhaustive_cost(p, letters.len(), max_len);
            if cost > dom.budget as f64 {
                let fits = (1..max_len).rev().find(|&m| exhaustive_cost(p, letters.len(), m) <= dom.budget as f64);
                verdict.status = Status::Inconclusive;
                verdict.note = Some(match fits {
                    Some(m) => format!("about {cost:.3e} instances exceed the budget {}; max_len {m} fits", dom.budget),
                    None => format!("about {cost:.3e} instances exceed the budget {}", dom.budget),
                });
                return Ok(verdict);
            }
        }
        Plan::Sampled { samples: s, .. } => {
            let per = (dom.budget / (lengths.clone().count() as u64).max(1)).max(1);
            samples = (*s).min(per);
            if samples < *s {
                notes.push(format!("sampling capped at {samples} words per length by the budget"));
            }
        }
    }

    let letters: Option<Vec<Value>> = match &plan {
        Plan::Exhaustive(l) => Some(l.clone()),
        Plan::Sampled { .. } => op.alphabet().map(|a| a.letters().to_vec()),
    };
    let mut ranges = HashMap::new();
    if p == PropertyId::MultGrowingRange {
        for n in 2..=max_len {
            let r = op.range(n).map_err(|source| CheckError::Eval { instance: format!("ran(F_{n})"), source })?;
            ranges.insert(n, r);
        }
    }
    let ctx = Ctx { op, tol: dom.tol, letters: letters.as_deref(), ranges: Some(&ranges) };

    let mut found: Option<(Instance, Value, Value)> = None;
    'lengths: for n in lengths {
        let count = match &plan {
            Plan::Exhaustive(l) => (l.len() as u64).pow(n as u32),
            Plan::Sampled { .. } => samples,
        };
        let mut start = 0;
        while start < count {
            let end = (start + CHUNK).min(count);
            let outcomes = map_range(dom.execution, start, end, |i| match &plan {
                Plan::Exhaustive(l) => {
                    let x = word_at(l, n, i);
                    run_word(p, &ctx, &x, max_len, &mut Subst::All(l))
                }
                Plan::Sampled { source, seed, .. } => {
                    let (x, rng) = primary_word(source, *seed, n, i);
                    run_word(p, &ctx, &x, max_len, &mut Subst::Sample { source, rng })
                }
            });
            for o in outcomes {
                verdict.instances_checked += o.tally.checked;
                verdict.vacuous += o.tally.vacuous;
                verdict.skipped += o.tally.skipped;
                verdict.ill_defined += o.tally.ill;
                if let Some(e) = o.error {
                    return Err(e);
                }
                if let Some(v) = o.violation {
                    found = Some(v);
                    break 'lengths;
                }
            }
            start = end;
        }
    }

    if let Some(f) = found {
        let f = match &plan {
            Plan::Sampled { source, .. } if !p.has_premise() => shrink(p, &ctx, source, f),
            _ => f,
        };
        verdict.status = Status::Fails;
        verdict.witness = Some(witness(p, f));
    } else if verdict.instances_checked == 0 {
        if verdict.skipped > 0 || verdict.ill_defined > 0 {
            verdict.status = Status::Inconclusive;
            notes.push("no instance could be evaluated".into());
        } else if verdict.vacuous > 0 && !verdict.exhaustive {
            verdict.status = Status::Inconclusive;
            notes.push("no sampled substitute met the premise".into());
        } else {
            notes.push("holds vacuously within the bound".into());
        }
    } else if verdict.ill_defined > 0 {
        verdict.status = Status::Inconclusive;
        notes.push(format!("{} instances have F(x|K) = ε with K nonempty", verdict.ill_defined));
    }
    if !notes.is_empty() {
        verdict.note = Some(notes.join("; "));
    }
    Ok(verdict)
}

/// The first violation in global order, if any.
pub fn search_counterexample(p: PropertyId, op: &VariadicOp, dom: &CheckDomain) -> Result<Option<Witness>, CheckError> {
    Ok(check_property(p, op, dom)?.witness)
}

/// Re-judges a stored witness against `op`.
pub fn replay(op: &VariadicOp, w: &Witness, tol: f64) -> Result<Judgement, CheckError> {
    let letters = op.alphabet().map(|a| a.letters().to_vec());
    let ctx = Ctx { op, tol, letters: letters.as_deref(), ranges: None };
    judge(w.property, &ctx, &w.instance).map_err(|f| fault(w.property, &w.instance, f))
}
