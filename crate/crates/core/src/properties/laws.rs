//! Per-law instance expansion and judgement.

use std::collections::HashMap;
use std::fmt;

use rand_chacha::ChaCha8Rng;

use super::sampling::{substitutes, Source};
use super::PropertyId;
use crate::operations::{OpError, VariadicOp};
use crate::value::Value;
use crate::words::{enumerate_subsets, enumerate_words, IndexSet, Word};

/// One named component of an instance.
#[derive(Clone, Debug, PartialEq)]
pub enum Slot {
    Word(Word),
    Set(IndexSet),
    Int(usize),
    Lengths(Vec<usize>),
}

impl Slot {
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Slot::Word(w) => Value::Word(w.clone()).to_json(),
            Slot::Set(k) => serde_json::json!(k.positions()),
            Slot::Int(i) => serde_json::json!(i),
            Slot::Lengths(l) => serde_json::json!(l),
        }
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slot::Word(w) => write!(f, "{w}"),
            Slot::Set(k) => write!(f, "{k}"),
            Slot::Int(i) => write!(f, "{i}"),
            Slot::Lengths(l) => write!(f, "{l:?}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum SlotKind {
    Word,
    /// Index set over the positions of the named word slot.
    Set(&'static str),
    Int,
    Lengths,
}

pub(crate) type Instance = Vec<(&'static str, Slot)>;

pub(crate) fn schema(p: PropertyId) -> &'static [(&'static str, SlotKind)] {
    use PropertyId::*;
    use SlotKind as K;
    match p {
        BAssoc | StrongBAssocEq | StrongBAssocIii => &[("x", K::Word), ("y", K::Word), ("z", K::Word)],
        StrongBAssocDef => &[("x", K::Word), ("K", K::Set("x"))],
        BPreassoc => &[("x", K::Word), ("y", K::Word), ("y'", K::Word), ("z", K::Word)],
        StrongBPreassocI | StrongBPreassocIi => &[("x", K::Word), ("x'", K::Word), ("K", K::Set("x"))],
        StrongBPreassocIii => &[("x", K::Word), ("x'", K::Word), ("y", K::Word), ("z", K::Word), ("z'", K::Word)],
        AwRangeIdempotent | AwQuasiRangeIdempotent | LeaveOneOutReversal | EpsilonStandard => &[("x", K::Word)],
        Symmetric | InnerSymmetric => &[("x", K::Word), ("i", K::Int)],
        ReplicationInvariant | MultGrowingRange | EqRmai => &[("x", K::Word), ("k", K::Int)],
        BlockwiseReplication => &[("x", K::Word), ("blocks", K::Lengths), ("k", K::Int)],
        BlockAggregation => &[("x", K::Word), ("m", K::Int)],
        StrongBisymmetry => &[("x", K::Word), ("p", K::Int)],
    }
}

/// Length of the primary word an instance was expanded from.
pub(crate) fn size(p: PropertyId, inst: &Instance) -> usize {
    let len = |name: &str| match inst.iter().find(|(n, _)| *n == name) {
        Some((_, Slot::Word(w))) => w.len(),
        _ => 0,
    };
    match p {
        PropertyId::BAssoc
        | PropertyId::StrongBAssocEq
        | PropertyId::StrongBAssocIii
        | PropertyId::BPreassoc
        | PropertyId::StrongBPreassocIii => len("x") + len("y") + len("z"),
        _ => len("x"),
    }
}

/// Lengths of primary words for a bound on evaluated lengths.
pub(crate) fn primary_lengths(p: PropertyId, max_len: usize) -> std::ops::RangeInclusive<usize> {
    match p {
        PropertyId::EpsilonStandard => 0..=max_len,
        PropertyId::StrongBisymmetry => 1..=max_len * max_len,
        _ => 1..=max_len,
    }
}

/// Upper bound on instances expanded from one exhaustive primary word of
/// length `n` over `a` letters.
pub(crate) fn instances_per_word(p: PropertyId, n: usize, a: usize, max_len: usize) -> f64 {
    use PropertyId::*;
    let (n_f, a_f) = (n as f64, a as f64);
    let pairs = n_f * (n_f + 1.0) / 2.0;
    match p {
        BAssoc => pairs,
        StrongBAssocDef => 2f64.powi(n as i32) - 1.0,
        StrongBAssocEq => n_f + 1.0,
        StrongBAssocIii => 1.0 + pairs,
        BPreassoc => (1..=n).map(|l| (n - l + 1) as f64 * a_f.powi(l as i32)).sum(),
        StrongBPreassocI => (1.0 + a_f).powf(n_f),
        StrongBPreassocIi => 2f64.powi(n.saturating_sub(1) as i32) * a_f.powf(n_f),
        StrongBPreassocIii => n_f * a_f.powi(n.saturating_sub(1) as i32),
        AwRangeIdempotent | LeaveOneOutReversal | EpsilonStandard => 1.0,
        AwQuasiRangeIdempotent => 1.0 + a_f,
        Symmetric | InnerSymmetric | BlockAggregation | StrongBisymmetry => n_f.max(1.0),
        ReplicationInvariant | MultGrowingRange | EqRmai => (max_len / n.max(1)) as f64,
        BlockwiseReplication => 2f64.powi(n.saturating_sub(1) as i32) * (max_len / n.max(1)) as f64,
    }
}

/// Everything a judgement may consult besides the instance.
pub(crate) struct Ctx<'a> {
    pub op: &'a VariadicOp,
    pub tol: f64,
    /// Letters of the finite domain, for diagonal and range laws.
    pub letters: Option<&'a [Value]>,
    /// Precomputed `ran(F_n)`; computed on demand when absent.
    pub ranges: Option<&'a HashMap<usize, Vec<Value>>>,
}

/// Result of judging one instance.
#[derive(Clone, Debug, PartialEq)]
pub enum Judgement {
    Holds,
    Violated { lhs: Value, rhs: Value },
    /// Premise false.
    Vacuous,
    /// Needed `F(ε)`, which is undefined.
    Skipped,
    /// A substitute `F(·)^k` collapsed to `ε` where a word of length `k` is
    /// required.
    IllDefined,
}

pub(crate) enum Fault {
    Op(OpError),
    Malformed(String),
}

impl From<OpError> for Fault {
    fn from(e: OpError) -> Self {
        Fault::Op(e)
    }
}

/// Source of same-length substitutes for premise laws.
pub(crate) enum Subst<'a> {
    All(&'a [Value]),
    Sample { source: &'a Source, rng: ChaCha8Rng },
}

impl Subst<'_> {
    fn of(&mut self, op: &VariadicOp, y: &Word) -> Vec<Word> {
        match self {
            Subst::All(letters) => enumerate_words(letters, y.len()).filter(|w| w != y).collect(),
            Subst::Sample { source, rng } => substitutes(op, source, y, rng),
        }
    }
}

fn w(word: Word) -> Slot {
    Slot::Word(word)
}

/// Sub-instances of the primary word `x`, in their canonical order.
pub(crate) fn expand(p: PropertyId, op: &VariadicOp, x: &Word, max_len: usize, subst: &mut Subst) -> Vec<Instance> {
    use PropertyId::*;
    let n = x.len();
    let mut out: Vec<Instance> = Vec::new();
    let split = |i: usize, j: usize| -> Instance {
        vec![("x", w(x.slice(0, i))), ("y", w(x.slice(i, j))), ("z", w(x.slice(j, n)))]
    };
    match p {
        BAssoc => {
            for i in 0..n {
                for j in i + 1..=n {
                    out.push(split(i, j));
                }
            }
        }
        StrongBAssocDef => {
            for k in enumerate_subsets(n).skip(1) {
                out.push(vec![("x", w(x.clone())), ("K", Slot::Set(k))]);
            }
        }
        StrongBAssocEq => {
            if n >= 1 {
                out.push(split(0, 0));
            }
            if n >= 2 {
                for i in 0..n {
                    out.push(split(i, i + 1));
                }
            }
        }
        StrongBAssocIii => {
            out.push(split(0, 0));
            for i in 0..n {
                for j in i + 1..=n {
                    out.push(split(i, j));
                }
            }
        }
        BPreassoc => {
            for i in 0..n {
                for j in i + 1..=n {
                    if i == 0 && j == n {
                        continue;
                    }
                    let y = x.slice(i, j);
                    for y2 in subst.of(op, &y) {
                        out.push(vec![
                            ("x", w(x.slice(0, i))),
                            ("y", w(y.clone())),
                            ("y'", w(y2)),
                            ("z", w(x.slice(j, n))),
                        ]);
                    }
                }
            }
        }
        StrongBPreassocI => {
            let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
            for k in enumerate_subsets(n).skip(1).filter(|k| k.mask() != full) {
                let r = x.restrict(&k).expect("bound matches");
                for r2 in subst.of(op, &r) {
                    let x2 = x.splice(&k, &r2).expect("bound matches");
                    out.push(vec![("x", w(x.clone())), ("x'", w(x2)), ("K", Slot::Set(k))]);
                }
            }
        }
        StrongBPreassocIi => {
            if n < 2 {
                return out;
            }
            let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
            for k in enumerate_subsets(n).filter(|k| k.contains(1) && k.mask() != full) {
                let candidates: Vec<Word> = match subst {
                    Subst::All(letters) => enumerate_words(letters, n).filter(|c| c != x).collect(),
                    Subst::Sample { .. } => {
                        let kc = k.complement();
                        let a = x.restrict(&k).expect("bound matches");
                        let b = x.restrict(&kc).expect("bound matches");
                        let sa = subst.of(op, &a);
                        let sb = subst.of(op, &b);
                        let mut c: Vec<Word> = Vec::new();
                        c.extend(sa.iter().map(|r| x.splice(&k, r).expect("bound matches")));
                        c.extend(sb.iter().map(|r| x.splice(&kc, r).expect("bound matches")));
                        for (ra, rb) in sa.iter().zip(&sb) {
                            let both = x.splice(&k, ra).and_then(|v| v.splice(&kc, rb)).expect("bound matches");
                            c.push(both);
                        }
                        let mut seen: Vec<Word> = Vec::new();
                        c.retain(|v| {
                            if v == x || seen.contains(v) {
                                false
                            } else {
                                seen.push(v.clone());
                                true
                            }
                        });
                        c
                    }
                };
                for x2 in candidates {
                    out.push(vec![("x", w(x.clone())), ("x'", w(x2)), ("K", Slot::Set(k))]);
                }
            }
        }
        StrongBPreassocIii => {
            if n < 2 {
                return out;
            }
            for i in 0..n {
                let (a, y, c) = (x.slice(0, i), x.slice(i, i + 1), x.slice(i + 1, n));
                let xz = a.concat(&c);
                for s in subst.of(op, &xz) {
                    out.push(vec![
                        ("x", w(a.clone())),
                        ("x'", w(s.slice(0, i))),
                        ("y", w(y.clone())),
                        ("z", w(c.clone())),
                        ("z'", w(s.slice(i, n - 1))),
                    ]);
                }
            }
        }
        AwRangeIdempotent | AwQuasiRangeIdempotent | EpsilonStandard => out.push(vec![("x", w(x.clone()))]),
        LeaveOneOutReversal => {
            if n >= 2 {
                out.push(vec![("x", w(x.clone()))]);
            }
        }
        Symmetric => {
            for i in 1..n {
                if x.letters()[i - 1] != x.letters()[i] {
                    out.push(vec![("x", w(x.clone())), ("i", Slot::Int(i))]);
                }
            }
        }
        InnerSymmetric => {
            for i in 2..n.saturating_sub(1) {
                if x.letters()[i - 1] != x.letters()[i] {
                    out.push(vec![("x", w(x.clone())), ("i", Slot::Int(i))]);
                }
            }
        }
        ReplicationInvariant | MultGrowingRange => {
            for k in (2..).take_while(|k| k * n <= max_len) {
                out.push(vec![("x", w(x.clone())), ("k", Slot::Int(k))]);
            }
        }
        EqRmai => {
            for k in (1..).take_while(|k| k * n <= max_len) {
                out.push(vec![("x", w(x.clone())), ("k", Slot::Int(k))]);
            }
        }
        BlockwiseReplication => {
            if n == 0 {
                return out;
            }
            let ks: Vec<usize> = (2..).take_while(|k| k * n <= max_len).collect();
            if ks.is_empty() {
                return out;
            }
            for cuts in 0..(1u64 << (n - 1)) {
                let mut blocks = Vec::new();
                let mut len = 1;
                for b in 0..n - 1 {
                    if cuts & (1 << b) != 0 {
                        blocks.push(len);
                        len = 1;
                    } else {
                        len += 1;
                    }
                }
                blocks.push(len);
                for &k in &ks {
                    out.push(vec![("x", w(x.clone())), ("blocks", Slot::Lengths(blocks.clone())), ("k", Slot::Int(k))]);
                }
            }
        }
        BlockAggregation => {
            for m in (1..=n).filter(|m| n % m == 0) {
                out.push(vec![("x", w(x.clone())), ("m", Slot::Int(m))]);
            }
        }
        StrongBisymmetry => {
            for p in (1..=n.min(max_len)).filter(|p| n % p == 0 && n / p <= max_len) {
                out.push(vec![("x", w(x.clone())), ("p", Slot::Int(p))]);
            }
        }
    }
    out
}

fn eval(op: &VariadicOp, x: &Word) -> Result<Option<Value>, OpError> {
    match op.evaluate(x) {
        Ok(v) => Ok(Some(v)),
        Err(OpError::EpsilonUndefined) => Ok(None),
        Err(e) => Err(e),
    }
}

macro_rules! ev {
    ($op:expr, $x:expr) => {
        match eval($op, $x)? {
            Some(v) => v,
            None => return Ok(Judgement::Skipped),
        }
    };
}

/// `v^k`, with `ε^k = ε`.
fn pow(v: &Value, k: usize) -> Word {
    if v.is_eps() || k == 0 {
        Word::empty()
    } else {
        Word::single(v.clone()).power(k)
    }
}

/// `F(x)^k`; `F` is not evaluated when `k = 0`.
fn pow_of(op: &VariadicOp, x: &Word, k: usize) -> Result<Option<Word>, OpError> {
    if k == 0 {
        return Ok(Some(Word::empty()));
    }
    Ok(eval(op, x)?.map(|v| pow(&v, k)))
}

macro_rules! pw {
    ($op:expr, $x:expr, $k:expr) => {
        match pow_of($op, $x, $k)? {
            Some(v) => v,
            None => return Ok(Judgement::Skipped),
        }
    };
}

fn compare(lhs: Value, rhs: Value, tol: f64) -> Judgement {
    if lhs.approx_eq(&rhs, tol) {
        Judgement::Holds
    } else {
        Judgement::Violated { lhs, rhs }
    }
}

fn word<'i>(inst: &'i Instance, name: &str) -> Result<&'i Word, Fault> {
    match inst.iter().find(|(n, _)| *n == name) {
        Some((_, Slot::Word(w))) => Ok(w),
        _ => Err(Fault::Malformed(format!("missing word `{name}`"))),
    }
}

fn int(inst: &Instance, name: &str) -> Result<usize, Fault> {
    match inst.iter().find(|(n, _)| *n == name) {
        Some((_, Slot::Int(i))) => Ok(*i),
        _ => Err(Fault::Malformed(format!("missing integer `{name}`"))),
    }
}

fn set(inst: &Instance, name: &str, bound: usize) -> Result<IndexSet, Fault> {
    match inst.iter().find(|(n, _)| *n == name) {
        Some((_, Slot::Set(k))) if k.bound() == bound => Ok(*k),
        Some((_, Slot::Set(k))) => {
            Err(Fault::Malformed(format!("index set bound {} does not match length {bound}", k.bound())))
        }
        _ => Err(Fault::Malformed(format!("missing index set `{name}`"))),
    }
}

fn malformed(msg: &str) -> Fault {
    Fault::Malformed(msg.to_string())
}

fn range(ctx: &Ctx, n: usize) -> Result<Vec<Value>, OpError> {
    if let Some(v) = ctx.ranges.and_then(|r| r.get(&n)) {
        return Ok(v.clone());
    }
    ctx.op.range(n)
}

fn premise(a: &Value, b: &Value, tol: f64) -> bool {
    a.approx_eq(b, tol)
}

pub(crate) fn judge(p: PropertyId, ctx: &Ctx, inst: &Instance) -> Result<Judgement, Fault> {
    use PropertyId::*;
    let op = ctx.op;
    let tol = ctx.tol;
    match p {
        BAssoc => {
            let (x, y, z) = (word(inst, "x")?, word(inst, "y")?, word(inst, "z")?);
            if y.is_empty() {
                return Err(malformed("y must be nonempty"));
            }
            let lhs = ev!(op, &Word::concat_all([x, y, z]));
            let fy = pw!(op, y, y.len());
            let rhs = ev!(op, &Word::concat_all([x, &fy, z]));
            Ok(compare(lhs, rhs, tol))
        }
        StrongBAssocDef => {
            let x = word(inst, "x")?;
            let k = set(inst, "K", x.len())?;
            if k.is_empty() {
                return Err(malformed("K must be nonempty"));
            }
            let u = ev!(op, &x.restrict(&k).expect("bound checked"));
            if u.is_eps() {
                return Ok(Judgement::IllDefined);
            }
            let x2 = x.splice(&k, &pow(&u, k.len())).expect("bound checked");
            Ok(compare(ev!(op, x), ev!(op, &x2), tol))
        }
        StrongBAssocEq | StrongBAssocIii => {
            let (x, y, z) = (word(inst, "x")?, word(inst, "y")?, word(inst, "z")?);
            if p == StrongBAssocEq && y.len() > 1 {
                return Err(malformed("|y| must be at most 1"));
            }
            let xz = x.concat(z);
            let lhs = ev!(op, &Word::concat_all([x, y, z]));
            let px = pw!(op, &xz, x.len());
            let pz = pw!(op, &xz, z.len());
            let mid = if p == StrongBAssocIii { pw!(op, y, y.len()) } else { y.clone() };
            let rhs = ev!(op, &Word::concat_all([&px, &mid, &pz]));
            Ok(compare(lhs, rhs, tol))
        }
        BPreassoc => {
            let (x, y, y2, z) = (word(inst, "x")?, word(inst, "y")?, word(inst, "y'")?, word(inst, "z")?);
            if y.len() != y2.len() || y.is_empty() {
                return Err(malformed("y and y' must be nonempty and of equal length"));
            }
            if !premise(&ev!(op, y), &ev!(op, y2), tol) {
                return Ok(Judgement::Vacuous);
            }
            let lhs = ev!(op, &Word::concat_all([x, y, z]));
            let rhs = ev!(op, &Word::concat_all([x, y2, z]));
            Ok(compare(lhs, rhs, tol))
        }
        StrongBPreassocI | StrongBPreassocIi => {
            let (x, x2) = (word(inst, "x")?, word(inst, "x'")?);
            if x.len() != x2.len() {
                return Err(malformed("x and x' must have equal length"));
            }
            let k = set(inst, "K", x.len())?;
            let kc = k.complement();
            let r = |v: &Word, s: &IndexSet| v.restrict(s).expect("bound checked");
            if p == StrongBPreassocI {
                if r(x, &kc) != r(x2, &kc) {
                    return Err(malformed("x' must agree with x outside K"));
                }
                if !premise(&ev!(op, &r(x, &k)), &ev!(op, &r(x2, &k)), tol) {
                    return Ok(Judgement::Vacuous);
                }
            } else {
                if !premise(&ev!(op, &r(x, &k)), &ev!(op, &r(x2, &k)), tol)
                    || !premise(&ev!(op, &r(x, &kc)), &ev!(op, &r(x2, &kc)), tol)
                {
                    return Ok(Judgement::Vacuous);
                }
            }
            Ok(compare(ev!(op, x), ev!(op, x2), tol))
        }
        StrongBPreassocIii => {
            let (x, x2, y) = (word(inst, "x")?, word(inst, "x'")?, word(inst, "y")?);
            let (z, z2) = (word(inst, "z")?, word(inst, "z'")?);
            if x.len() != x2.len() || z.len() != z2.len() || y.len() != 1 {
                return Err(malformed("need |x| = |x'|, |z| = |z'| and |y| = 1"));
            }
            if !premise(&ev!(op, &x.concat(z)), &ev!(op, &x2.concat(z2)), tol) {
                return Ok(Judgement::Vacuous);
            }
            let lhs = ev!(op, &Word::concat_all([x, y, z]));
            let rhs = ev!(op, &Word::concat_all([x2, y, z2]));
            Ok(compare(lhs, rhs, tol))
        }
        AwRangeIdempotent => {
            let x = word(inst, "x")?;
            let v = ev!(op, x);
            let rhs = ev!(op, &pow(&v, x.len()));
            Ok(compare(v, rhs, tol))
        }
        AwQuasiRangeIdempotent => {
            let x = word(inst, "x")?;
            let letters = ctx.letters.ok_or_else(|| malformed("needs a finite alphabet"))?;
            let v = ev!(op, x);
            let mut diag = Vec::with_capacity(letters.len());
            for c in letters {
                diag.push(ev!(op, &Word::single(c.clone()).power(x.len())));
            }
            if diag.iter().any(|d| d.approx_eq(&v, tol)) {
                Ok(Judgement::Holds)
            } else {
                Ok(Judgement::Violated { lhs: v, rhs: Value::Word(Word::from_letters(diag)) })
            }
        }
        Symmetric | InnerSymmetric => {
            let x = word(inst, "x")?;
            let i = int(inst, "i")?;
            let ok = if p == Symmetric { i >= 1 && i < x.len() } else { i >= 2 && i + 2 <= x.len() };
            if !ok {
                return Err(malformed("swap position out of range"));
            }
            Ok(compare(ev!(op, x), ev!(op, &x.swapped(i, i + 1)), tol))
        }
        ReplicationInvariant | EqRmai => {
            let x = word(inst, "x")?;
            let k = int(inst, "k")?;
            if k == 0 {
                return Err(malformed("k must be positive"));
            }
            let v = ev!(op, x);
            let lhs = if p == ReplicationInvariant { ev!(op, &x.power(k)) } else { ev!(op, &pow(&v, k * x.len())) };
            Ok(compare(lhs, v, tol))
        }
        MultGrowingRange => {
            let x = word(inst, "x")?;
            let k = int(inst, "k")?;
            let v = ev!(op, x);
            let ran = range(ctx, k * x.len())?;
            if ran.iter().any(|r| r.approx_eq(&v, tol)) {
                Ok(Judgement::Holds)
            } else {
                Ok(Judgement::Violated { lhs: v, rhs: Value::Word(Word::from_letters(ran)) })
            }
        }
        BlockwiseReplication => {
            let x = word(inst, "x")?;
            let k = int(inst, "k")?;
            let blocks = match inst.iter().find(|(n, _)| *n == "blocks") {
                Some((_, Slot::Lengths(b))) => b,
                _ => return Err(malformed("missing block lengths")),
            };
            if blocks.iter().sum::<usize>() != x.len() || blocks.contains(&0) {
                return Err(malformed("block lengths must be positive and sum to |x|"));
            }
            let mut rep = Word::empty();
            let mut at = 0;
            for &b in blocks {
                rep.extend_from(&x.slice(at, at + b).power(k));
                at += b;
            }
            Ok(compare(ev!(op, &rep), ev!(op, x), tol))
        }
        BlockAggregation => {
            let x = word(inst, "x")?;
            let m = int(inst, "m")?;
            if m == 0 || x.len() % m != 0 {
                return Err(malformed("block length must divide |x|"));
            }
            let mut agg = Word::empty();
            for b in 0..x.len() / m {
                agg.extend_from(&pow(&ev!(op, &x.slice(b * m, (b + 1) * m)), 1));
            }
            Ok(compare(ev!(op, &agg), ev!(op, x), tol))
        }
        LeaveOneOutReversal => {
            let x = word(inst, "x")?;
            if x.len() < 2 {
                return Err(malformed("needs |x| ≥ 2"));
            }
            let mut rev = Word::empty();
            for k in (1..=x.len()).rev() {
                rev.extend_from(&pow(&ev!(op, &x.without(k)), 1));
            }
            Ok(compare(ev!(op, x), ev!(op, &rev), tol))
        }
        StrongBisymmetry => {
            let x = word(inst, "x")?;
            let rows = int(inst, "p")?;
            if rows == 0 || x.len() % rows != 0 {
                return Err(malformed("row count must divide |x|"));
            }
            let cols = x.len() / rows;
            let mut by_rows = Word::empty();
            for r in 0..rows {
                by_rows.extend_from(&pow(&ev!(op, &x.slice(r * cols, (r + 1) * cols)), 1));
            }
            let mut by_cols = Word::empty();
            for c in 0..cols {
                let col = Word::from_letters((0..rows).map(|r| x.letters()[r * cols + c].clone()).collect());
                by_cols.extend_from(&pow(&ev!(op, &col), 1));
            }
            Ok(compare(ev!(op, &by_rows), ev!(op, &by_cols), tol))
        }
        EpsilonStandard => {
            let x = word(inst, "x")?;
            let v = ev!(op, x);
            match (x.is_empty(), v.is_eps()) {
                (true, true) | (false, false) => Ok(Judgement::Holds),
                (true, false) => Ok(Judgement::Violated { lhs: v, rhs: Value::Eps }),
                (false, true) => Ok(Judgement::Violated { lhs: v, rhs: Value::sym("a letter") }),
            }
        }
    }
}
