//! Suites, cross-checks between equivalent formulations, and JSON reports.

use serde_json::{json, Map, Value as Json};

use super::engine::{applicable, check_property};
use super::laws::{schema, size, Slot, SlotKind};
use super::{CheckDomain, CheckError, Mode, PropertyId, PropertyVerdict, Status, Witness};
use crate::operations::VariadicOp;
use crate::value::Value;
use crate::words::{IndexSet, Word};

/// Implications that must hold on every operation.
pub const IMPLICATIONS: [(PropertyId, PropertyId); 3] = [
    (PropertyId::StrongBAssocDef, PropertyId::BAssoc),
    (PropertyId::StrongBPreassocI, PropertyId::BPreassoc),
    (PropertyId::BAssoc, PropertyId::AwRangeIdempotent),
];

#[derive(Clone, Debug, PartialEq)]
pub struct ImplicationFlag {
    pub premise: PropertyId,
    pub conclusion: PropertyId,
    /// Premise holds but the conclusion fails.
    pub violated: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub op: String,
    pub verdicts: Vec<PropertyVerdict>,
    /// Requested laws that do not apply, with the reason.
    pub inapplicable: Vec<(PropertyId, String)>,
    pub implications: Vec<ImplicationFlag>,
}

impl SuiteReport {
    pub fn verdict(&self, p: PropertyId) -> Option<&PropertyVerdict> {
        self.verdicts.iter().find(|v| v.property == p)
    }

    pub fn status(&self, p: PropertyId) -> Option<Status> {
        self.verdict(p).map(|v| v.status)
    }
}

/// Checks each law in `props`; inapplicable ones are listed, not fatal.
pub fn run_suite(op: &VariadicOp, props: &[PropertyId], dom: &CheckDomain) -> Result<SuiteReport, CheckError> {
    let mut verdicts = Vec::new();
    let mut inapplicable = Vec::new();
    for &p in props {
        match check_property(p, op, dom) {
            Ok(v) => verdicts.push(v),
            Err(CheckError::Inapplicable { reason, .. }) => inapplicable.push((p, reason)),
            Err(e) => return Err(e),
        }
    }
    let mut report = SuiteReport { op: op.name().to_string(), verdicts, inapplicable, implications: Vec::new() };
    for (a, b) in IMPLICATIONS {
        if let (Some(sa), Some(sb)) = (report.status(a), report.status(b)) {
            report.implications.push(ImplicationFlag {
                premise: a,
                conclusion: b,
                violated: sa == Status::Holds && sb == Status::Fails,
            });
        }
    }
    Ok(report)
}

/// Laws in `props` that apply to `op` under `dom`.
pub fn applicable_properties(op: &VariadicOp, props: &[PropertyId], dom: &CheckDomain) -> Vec<PropertyId> {
    props.iter().copied().filter(|&p| applicable(p, op, dom).is_ok()).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConsistencyGroup {
    pub name: String,
    pub members: Vec<(String, Status)>,
    /// No member holds while another fails.
    pub agree: bool,
    /// Some member is inconclusive.
    pub incomplete: bool,
}

impl ConsistencyGroup {
    fn new(name: &str, members: Vec<(String, Status)>) -> Self {
        let has = |s: Status| members.iter().any(|(_, m)| *m == s);
        ConsistencyGroup {
            name: name.to_string(),
            agree: !(has(Status::Holds) && has(Status::Fails)),
            incomplete: has(Status::Inconclusive),
            members,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConsistencyReport {
    pub op: String,
    pub groups: Vec<ConsistencyGroup>,
}

impl ConsistencyReport {
    pub fn disagreements(&self) -> impl Iterator<Item = &ConsistencyGroup> {
        self.groups.iter().filter(|g| !g.agree)
    }

    pub fn consistent(&self) -> bool {
        self.groups.iter().all(|g| g.agree)
    }
}

fn both(a: Status, b: Status) -> Status {
    match (a, b) {
        (Status::Fails, _) | (_, Status::Fails) => Status::Fails,
        (Status::Holds, Status::Holds) => Status::Holds,
        _ => Status::Inconclusive,
    }
}

/// `ran(F_n) ⊆ X` for every checked arity.
fn range_inside_domain(op: &VariadicOp, max_len: usize) -> bool {
    if !op.codomain().is_domain() {
        return false;
    }
    if op.alphabet().is_none() {
        return true;
    }
    let top = max_len.min(op.max_arity().unwrap_or(max_len));
    (1..=top).all(|n| op.range(n).map(|r| r.iter().all(|v| op.domain().contains(v))).unwrap_or(false))
}

/// Runs formulations that should agree and reports every group where one
/// holds and another fails. Inconclusive members mark the group incomplete.
pub fn cross_check_equivalences(op: &VariadicOp, dom: &CheckDomain) -> Result<ConsistencyReport, CheckError> {
    use PropertyId::*;
    let mut memo: Vec<(PropertyId, Status)> = Vec::new();
    let mut status = |p: PropertyId| -> Result<Status, CheckError> {
        if let Some((_, s)) = memo.iter().find(|(q, _)| *q == p) {
            return Ok(*s);
        }
        let s = check_property(p, op, dom)?.status;
        memo.push((p, s));
        Ok(s)
    };
    let entry = |p: PropertyId, s: Status| (p.id().to_string(), s);
    let mut groups = Vec::new();
    if op.codomain().is_domain() {
        let g: Vec<_> = [StrongBAssocDef, StrongBAssocEq, StrongBAssocIii]
            .into_iter()
            .map(|p| status(p).map(|s| entry(p, s)))
            .collect::<Result<_, _>>()?;
        groups.push(ConsistencyGroup::new("strong B-associativity", g));
    }
    let g: Vec<_> = [StrongBPreassocI, StrongBPreassocIi, StrongBPreassocIii]
        .into_iter()
        .map(|p| status(p).map(|s| entry(p, s)))
        .collect::<Result<_, _>>()?;
    groups.push(ConsistencyGroup::new("strong B-preassociativity", g));
    if range_inside_domain(op, dom.max_len) {
        let def = status(StrongBAssocDef)?;
        let pre = status(StrongBPreassocI)?;
        let aw = status(AwRangeIdempotent)?;
        groups.push(ConsistencyGroup::new(
            "strong B-associativity as preassociativity plus range idempotence",
            vec![entry(StrongBAssocDef, def), ("STRONG_B_PREASSOC_I+AW_RANGE_IDEMPOTENT".into(), both(pre, aw))],
        ));
    }
    if status(Symmetric)? == Status::Holds {
        let g = vec![entry(BPreassoc, status(BPreassoc)?), entry(StrongBPreassocI, status(StrongBPreassocI)?)];
        groups.push(ConsistencyGroup::new("symmetric preassociativity", g));
    }
    Ok(ConsistencyReport { op: op.name().to_string(), groups })
}

impl Witness {
    pub fn to_json(&self) -> Json {
        let mut inst = Map::new();
        for (name, slot) in &self.instance {
            inst.insert((*name).to_string(), slot.to_json());
        }
        json!({
            "property": self.property.id(),
            "instance": inst,
            "lhs": self.lhs.to_json(),
            "rhs": self.rhs.to_json(),
            "residual": self.residual.map(|r| Value::Real(r).to_json()),
            "size": self.size,
        })
    }

    /// Parses a witness written by [`Witness::to_json`], or a bare report
    /// whose `witness` field holds one.
    pub fn from_json(v: &Json) -> Result<Witness, CheckError> {
        let bad = |m: String| CheckError::Witness(m);
        let v = match v.get("witness") {
            Some(w) if !w.is_null() => w,
            Some(_) => return Err(bad("report has no witness".into())),
            None => v,
        };
        let property: PropertyId = v
            .get("property")
            .and_then(Json::as_str)
            .ok_or_else(|| bad("missing `property`".into()))?
            .parse()
            .map_err(|e: super::UnknownProperty| bad(e.to_string()))?;
        let raw = v.get("instance").and_then(Json::as_object).ok_or_else(|| bad("missing `instance`".into()))?;
        if let Some(extra) = raw.keys().find(|k| !schema(property).iter().any(|(n, _)| n == k)) {
            return Err(bad(format!("unexpected slot `{extra}` for {property}")));
        }
        let mut instance: Vec<(&'static str, Slot)> = Vec::new();
        for &(name, kind) in schema(property) {
            let j = raw.get(name).ok_or_else(|| bad(format!("missing slot `{name}`")))?;
            let slot = match kind {
                SlotKind::Word => match Value::from_json(j).map_err(bad)? {
                    Value::Word(w) => Slot::Word(w),
                    _ => return Err(bad(format!("slot `{name}` must be an array"))),
                },
                SlotKind::Set(of) => {
                    let bound = match instance.iter().find(|(n, _)| *n == of) {
                        Some((_, Slot::Word(w))) => w.len(),
                        _ => return Err(bad(format!("slot `{name}` refers to missing `{of}`"))),
                    };
                    let ps: Vec<usize> =
                        serde_json::from_value(j.clone()).map_err(|e| bad(format!("slot `{name}`: {e}")))?;
                    Slot::Set(IndexSet::new(bound, ps).map_err(|e| bad(format!("slot `{name}`: {e}")))?)
                }
                SlotKind::Int => {
                    Slot::Int(j.as_u64().ok_or_else(|| bad(format!("slot `{name}` must be a natural number")))? as usize)
                }
                SlotKind::Lengths => Slot::Lengths(
                    serde_json::from_value(j.clone()).map_err(|e| bad(format!("slot `{name}`: {e}")))?,
                ),
            };
            instance.push((name, slot));
        }
        let value = |key: &str| -> Result<Value, CheckError> {
            Value::from_json(v.get(key).unwrap_or(&Json::Null)).map_err(bad)
        };
        let (lhs, rhs) = (value("lhs")?, value("rhs")?);
        let residual = lhs.residual(&rhs);
        let size = size(property, &instance);
        Ok(Witness { property, instance, lhs, rhs, residual, size })
    }
}

/// Mode and bounds of a check, for reports.
pub fn domain_json(dom: &CheckDomain) -> Json {
    let mut m = Map::new();
    match &dom.mode {
        Mode::Exhaustive { alphabet } => {
            m.insert("mode".into(), json!("exhaustive"));
            if let Some(a) = alphabet {
                m.insert("alphabet".into(), Value::Word(Word::from_letters(a.letters().to_vec())).to_json());
            }
        }
        Mode::Sampled { interval, samples, seed } => {
            m.insert("mode".into(), json!("sampled"));
            if let Some(i) = interval {
                m.insert("interval".into(), json!([Value::Real(i.lo).to_json(), Value::Real(i.hi).to_json()]));
            }
            m.insert("samples".into(), json!(samples));
            m.insert("seed".into(), json!(seed));
        }
    }
    m.insert("max_len".into(), json!(dom.max_len));
    m.insert("tol".into(), Value::Real(dom.tol).to_json());
    m.insert("budget".into(), json!(dom.budget));
    Json::Object(m)
}

impl PropertyVerdict {
    pub fn to_json(&self) -> Json {
        json!({
            "property": self.property.id(),
            "status": self.status,
            "exhaustive": self.exhaustive,
            "max_len": self.max_len,
            "instances_checked": self.instances_checked,
            "vacuous": self.vacuous,
            "skipped": self.skipped,
            "ill_defined": self.ill_defined,
            "witness": self.witness.as_ref().map(Witness::to_json),
            "note": self.note,
        })
    }
}

impl SuiteReport {
    pub fn to_json(&self) -> Json {
        json!({
            "op": self.op,
            "verdicts": self.verdicts.iter().map(PropertyVerdict::to_json).collect::<Vec<_>>(),
            "inapplicable": self.inapplicable.iter()
                .map(|(p, r)| json!({"property": p.id(), "reason": r}))
                .collect::<Vec<_>>(),
            "implications": self.implications.iter()
                .map(|f| json!({"premise": f.premise.id(), "conclusion": f.conclusion.id(), "violated": f.violated}))
                .collect::<Vec<_>>(),
        })
    }
}

impl ConsistencyReport {
    pub fn to_json(&self) -> Json {
        json!({
            "op": self.op,
            "groups": self.groups.iter().map(|g| json!({
                "name": g.name,
                "members": g.members.iter().map(|(n, s)| json!({"property": n, "status": s})).collect::<Vec<_>>(),
                "agree": g.agree,
                "incomplete": g.incomplete,
            })).collect::<Vec<_>>(),
        })
    }
}
