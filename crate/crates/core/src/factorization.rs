//! Quasi-inverses of finite maps and factorizations `F_n = f_n ∘ H_n`.
//!
//! Everything here is finite: operations over a finite alphabet, covered
//! arities `1..=N`. Quasi-inverses are canonical (minimal preimage in the
//! domain's declared order), so factorizations are reproducible.

use std::collections::HashMap;
use std::fmt;

use serde_json::{json, Value as Json};
use thiserror::Error;

use crate::domain::Alphabet;
use crate::operations::{OpError, VariadicOp};
use crate::properties::{check_property, CheckDomain, CheckError, PropertyId, Status, Witness};
use crate::value::Value;
use crate::words::{enumerate_words, word_at, Word};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FactorError {
    #[error("factorization needs a finite alphabet and bounded arity: {0}")]
    NotFinite(String),
    #[error("precondition {property} does not hold{}", witness.as_ref().map(|w| format!(": {w}")).unwrap_or_default())]
    Precondition { property: PropertyId, witness: Option<Witness> },
    #[error("factorization covers arities up to {covered}, but {requested} were requested")]
    Coverage { requested: usize, covered: usize },
    #[error("not a quasi-inverse of δ_{arity}: {reason}")]
    InvalidQuasiInverse { arity: usize, reason: String },
    #[error("duplicate key {0} in finite map")]
    DuplicateKey(Value),
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error(transparent)]
    Op(#[from] OpError),
}

/// A total map on an explicitly listed finite domain.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteFn {
    domain: Vec<Value>,
    values: Vec<Value>,
    index: HashMap<Value, usize>,
}

impl FiniteFn {
    /// Pairs `(x, f(x))`; their order is the domain's declared order.
    pub fn new(pairs: Vec<(Value, Value)>) -> Result<Self, FactorError> {
        let mut index = HashMap::with_capacity(pairs.len());
        let (mut domain, mut values) = (Vec::with_capacity(pairs.len()), Vec::with_capacity(pairs.len()));
        for (i, (x, y)) in pairs.into_iter().enumerate() {
            if index.insert(x.clone(), i).is_some() {
                return Err(FactorError::DuplicateKey(x));
            }
            domain.push(x);
            values.push(y);
        }
        Ok(FiniteFn { domain, values, index })
    }

    pub fn from_fn(domain: &[Value], mut f: impl FnMut(&Value) -> Value) -> Self {
        Self::new(domain.iter().map(|x| (x.clone(), f(x))).collect()).expect("caller passes distinct letters")
    }

    pub fn apply(&self, x: &Value) -> Option<&Value> {
        self.index.get(x).map(|&i| &self.values[i])
    }

    pub fn domain(&self) -> &[Value] {
        &self.domain
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&Value, &Value)> {
        self.domain.iter().zip(&self.values)
    }

    /// Distinct values in order of first appearance.
    pub fn range(&self) -> Vec<Value> {
        let mut seen = std::collections::HashSet::new();
        self.values.iter().filter(|v| seen.insert((*v).clone())).cloned().collect()
    }

    /// First pair of distinct arguments with equal values.
    pub fn collision(&self) -> Option<(Value, Value, Value)> {
        let mut first: HashMap<&Value, &Value> = HashMap::new();
        for (x, y) in self.pairs() {
            if let Some(prev) = first.insert(y, x) {
                return Some((prev.clone(), x.clone(), y.clone()));
            }
        }
        None
    }

    fn to_json(&self) -> Json {
        Json::Array(self.pairs().map(|(x, y)| json!([x.to_json(), y.to_json()])).collect())
    }
}

/// `g` with `dom(g) = ran(f)` and `f ∘ g = id` on `ran(f)`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuasiInverse {
    pub g: FiniteFn,
}

impl QuasiInverse {
    /// Confirms both defining clauses against `f`.
    pub fn is_quasi_inverse_of(&self, f: &FiniteFn) -> Result<(), String> {
        let ran = f.range();
        if self.g.domain().len() != ran.len() || ran.iter().any(|y| self.g.apply(y).is_none()) {
            return Err("domain of g differs from ran(f)".into());
        }
        for y in &ran {
            let x = self.g.apply(y).expect("checked above");
            match f.apply(x) {
                Some(back) if back == y => {}
                Some(back) => return Err(format!("f(g({y})) = {back}")),
                None => return Err(format!("g({y}) = {x} is outside dom(f)")),
            }
        }
        Ok(())
    }
}

/// The canonical quasi-inverse: each attained value goes to its first
/// preimage in declared order.
pub fn quasi_inverse(f: &FiniteFn) -> QuasiInverse {
    let mut seen = std::collections::HashSet::new();
    let pairs = f.pairs().filter(|(_, y)| seen.insert((*y).clone())).map(|(x, y)| (y.clone(), x.clone())).collect();
    QuasiInverse { g: FiniteFn::new(pairs).expect("values deduplicated") }
}

/// A map from words to words over one alphabet, tabulated per length.
#[derive(Clone, Debug, PartialEq)]
pub struct StringFunction {
    alphabet: Alphabet,
    /// `tables[n - 1]` lists images of length-`n` words in lexicographic
    /// order.
    tables: Vec<Vec<Word>>,
}

impl StringFunction {
    pub fn tabulate(alphabet: Alphabet, max_len: usize, mut f: impl FnMut(&Word) -> Word) -> Self {
        let tables = (1..=max_len).map(|n| enumerate_words(alphabet.letters(), n).map(|w| f(&w)).collect()).collect();
        StringFunction { alphabet, tables }
    }

    pub fn identity(alphabet: Alphabet, max_len: usize) -> Self {
        Self::tabulate(alphabet, max_len, Word::clone)
    }

    /// Sorts letters by the alphabet's order.
    pub fn sort_letters(alphabet: Alphabet, max_len: usize) -> Self {
        let a = alphabet.clone();
        Self::tabulate(alphabet, max_len, move |w| {
            let mut l = w.letters().to_vec();
            l.sort_by_key(|c| a.index_of(c));
            Word::from_letters(l)
        })
    }

    pub fn drop_last(alphabet: Alphabet, max_len: usize) -> Self {
        Self::tabulate(alphabet, max_len, |w| w.slice(0, w.len().saturating_sub(1)))
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn max_len(&self) -> usize {
        self.tables.len()
    }

    /// `H(ε) = ε`; `None` past the tabulated lengths or outside the alphabet.
    pub fn apply(&self, x: &Word) -> Option<&Word> {
        static EMPTY: std::sync::OnceLock<Word> = std::sync::OnceLock::new();
        if x.is_empty() {
            return Some(EMPTY.get_or_init(Word::empty));
        }
        let table = self.tables.get(x.len() - 1)?;
        let base = self.alphabet.len();
        let mut i = 0usize;
        for l in x.letters() {
            i = i * base + self.alphabet.index_of(l)?;
        }
        table.get(i)
    }

    /// The same map as an operation with word values.
    pub fn to_op(&self, name: &str) -> Result<VariadicOp, OpError> {
        let tables = self.tables.iter().map(|t| t.iter().cloned().map(Value::Word).collect()).collect();
        VariadicOp::from_tables(name, self.alphabet.clone(), tables, Some(Value::Word(Word::empty())))
    }

    fn to_json(&self) -> Json {
        let mut per = serde_json::Map::new();
        for (k, t) in self.tables.iter().enumerate() {
            let n = k + 1;
            let rows = t
                .iter()
                .enumerate()
                .map(|(i, h)| {
                    let x = word_at(self.alphabet.letters(), n, i as u64);
                    json!([Value::Word(x).to_json(), Value::Word(h.clone()).to_json()])
                })
                .collect();
            per.insert(n.to_string(), Json::Array(rows));
        }
        Json::Object(per)
    }
}

/// Outcome of one string-function law.
#[derive(Clone, Debug, PartialEq)]
pub struct StringCheck {
    pub status: Status,
    pub witness: Option<String>,
}

impl StringCheck {
    fn holds() -> Self {
        StringCheck { status: Status::Holds, witness: None }
    }

    fn fails(w: String) -> Self {
        StringCheck { status: Status::Fails, witness: Some(w) }
    }

    fn to_json(&self) -> Json {
        json!({"status": self.status, "witness": self.witness})
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StringVerdicts {
    pub associative: StringCheck,
    pub length_preserving: StringCheck,
    pub strongly_b_preassociative: StringCheck,
}

impl StringVerdicts {
    pub fn to_json(&self) -> Json {
        json!({
            "associative": self.associative.to_json(),
            "length_preserving": self.length_preserving.to_json(),
            "strongly_b_preassociative": self.strongly_b_preassociative.to_json(),
        })
    }
}

/// Decides associativity `H(xyz) = H(x H(y) z)`, length preservation and
/// strong B-preassociativity of `h` on every word of length `≤ max_len`.
pub fn check_string_properties(h: &StringFunction, max_len: usize) -> Result<StringVerdicts, FactorError> {
    let top = max_len.min(h.max_len());
    let letters = h.alphabet.letters();

    let mut length_preserving = StringCheck::holds();
    'len: for n in 1..=top {
        for x in enumerate_words(letters, n) {
            let hx = h.apply(&x).expect("tabulated");
            if hx.len() != n {
                length_preserving = StringCheck::fails(format!("x = {x}: |H(x)| = {} ≠ {n}", hx.len()));
                break 'len;
            }
        }
    }

    let mut associative = StringCheck::holds();
    'assoc: for n in 1..=top {
        for w in enumerate_words(letters, n) {
            for i in 0..n {
                for j in i + 1..=n {
                    let (x, y, z) = (w.slice(0, i), w.slice(i, j), w.slice(j, n));
                    let hy = h.apply(&y).expect("tabulated");
                    let inner = Word::concat_all([&x, hy, &z]);
                    let Some(rhs) = h.apply(&inner) else { continue };
                    let lhs = h.apply(&w).expect("tabulated");
                    if lhs != rhs {
                        associative = StringCheck::fails(format!("x = {x}, y = {y}, z = {z}: H(xyz) = {lhs}, H(xH(y)z) = {rhs}"));
                        break 'assoc;
                    }
                }
            }
        }
    }

    let op = h.to_op("H")?;
    let v = check_property(PropertyId::StrongBPreassocI, &op, &CheckDomain::exhaustive(top))?;
    let strongly_b_preassociative = StringCheck { status: v.status, witness: v.witness.map(|w| w.to_string()) };
    Ok(StringVerdicts { associative, length_preserving, strongly_b_preassociative })
}

/// The inner function of a factorization.
#[derive(Clone, Debug)]
pub enum Inner {
    /// ε-standard operation with letter values.
    Op(VariadicOp),
    /// Length-preserving string function.
    Strings(StringFunction),
}

/// `F_n = f_n ∘ H_n` on arities `1..=max_arity`.
#[derive(Clone, Debug)]
pub struct Factorization {
    pub op: String,
    pub h: Inner,
    /// `f[n - 1]`, one-to-one on `ran(H_n)`.
    pub f: Vec<FiniteFn>,
    /// The quasi-inverses `g[n - 1]` that defined `H_n = g_n ∘ F_n`.
    pub g: Vec<QuasiInverse>,
    pub max_arity: usize,
    /// Set when `F` is strongly B-preassociative: the verdict that `H` is
    /// strongly B-preassociative too.
    pub certified_strong: Option<bool>,
}

impl Factorization {
    /// `H_n(x)` as a value (letters for [`Inner::Op`], words otherwise).
    pub fn h_value(&self, x: &Word) -> Result<Value, FactorError> {
        match &self.h {
            Inner::Op(h) => Ok(h.evaluate(x)?),
            Inner::Strings(h) => h
                .apply(x)
                .cloned()
                .map(Value::Word)
                .ok_or_else(|| FactorError::Coverage { requested: x.len(), covered: h.max_len() }),
        }
    }

    pub fn to_json(&self) -> Json {
        let per = |fs: &[FiniteFn]| -> Json {
            Json::Object(fs.iter().enumerate().map(|(k, f)| ((k + 1).to_string(), f.to_json())).collect())
        };
        let g: Vec<FiniteFn> = self.g.iter().map(|q| q.g.clone()).collect();
        let (kind, h) = match &self.h {
            Inner::Op(h) => {
                let alphabet = h.alphabet().expect("finite").letters().to_vec();
                let mut tables = serde_json::Map::new();
                for n in 1..=self.max_arity {
                    let rows = enumerate_words(&alphabet, n)
                        .map(|x| {
                            let v = h.evaluate(&x).expect("tabulated");
                            json!([Value::Word(x).to_json(), v.to_json()])
                        })
                        .collect();
                    tables.insert(n.to_string(), Json::Array(rows));
                }
                ("operation", Json::Object(tables))
            }
            Inner::Strings(s) => ("string-function", s.to_json()),
        };
        json!({
            "op": self.op,
            "kind": kind,
            "max_arity": self.max_arity,
            "h": h,
            "f": per(&self.f),
            "g": per(&g),
            "certified_strong": self.certified_strong,
        })
    }
}

fn finite_arity(op: &VariadicOp, arity: usize) -> Result<(Vec<Value>, usize), FactorError> {
    let alphabet = op.alphabet().ok_or_else(|| FactorError::NotFinite(format!("{} has a real domain", op.name())))?;
    let n = match op.max_arity() {
        Some(m) => arity.min(m),
        None => arity,
    };
    if n == 0 {
        return Err(FactorError::NotFinite("no arity to cover".into()));
    }
    Ok((alphabet.letters().to_vec(), n))
}

fn require(op: &VariadicOp, p: PropertyId, arity: usize) -> Result<(), FactorError> {
    let v = check_property(p, op, &CheckDomain::exhaustive(arity))?;
    if v.status != Status::Holds {
        return Err(FactorError::Precondition { property: p, witness: v.witness });
    }
    Ok(())
}

fn strongly_preassociative(op: &VariadicOp, arity: usize) -> Result<bool, FactorError> {
    Ok(check_property(PropertyId::StrongBPreassocI, op, &CheckDomain::exhaustive(arity))?.status == Status::Holds)
}

/// Factors a B-preassociative, arity-wise quasi-range-idempotent `F` as
/// `F_n = δ_n ∘ H_n` with `H_n = g_n ∘ F_n`, `g_n` a quasi-inverse of the
/// diagonal section `δ_n(c) = F(c^n)`. Covers arities `1..=arity` (capped
/// at the op's own bound). `g_choice[n - 1]` overrides the canonical `g_n`.
pub fn factorize_awqri(
    op: &VariadicOp,
    arity: usize,
    g_choice: Option<&[QuasiInverse]>,
) -> Result<Factorization, FactorError> {
    let (letters, top) = finite_arity(op, arity)?;
    require(op, PropertyId::BPreassoc, top)?;
    require(op, PropertyId::AwQuasiRangeIdempotent, top)?;
    let mut tables = Vec::with_capacity(top);
    let (mut fs, mut gs) = (Vec::with_capacity(top), Vec::with_capacity(top));
    for n in 1..=top {
        let mut diag = Vec::with_capacity(letters.len());
        for c in &letters {
            diag.push((c.clone(), op.evaluate(&Word::single(c.clone()).power(n))?));
        }
        let delta = FiniteFn::new(diag)?;
        let g = match g_choice.and_then(|gs| gs.get(n - 1)) {
            Some(g) => {
                g.is_quasi_inverse_of(&delta)
                    .map_err(|reason| FactorError::InvalidQuasiInverse { arity: n, reason })?;
                g.clone()
            }
            None => quasi_inverse(&delta),
        };
        let mut table = Vec::new();
        for x in enumerate_words(&letters, n) {
            let v = op.evaluate(&x)?;
            let h = g.g.apply(&v).ok_or_else(|| FactorError::InvalidQuasiInverse {
                arity: n,
                reason: format!("F({x}) = {v} is not a diagonal value"),
            })?;
            table.push(h.clone());
        }
        let mut seen = std::collections::HashSet::new();
        let ran_h: Vec<Value> = table.iter().filter(|v| seen.insert((*v).clone())).cloned().collect();
        fs.push(FiniteFn::new(
            ran_h.iter().map(|h| (h.clone(), delta.apply(h).expect("letters").clone())).collect(),
        )?);
        gs.push(g);
        tables.push(table);
    }
    let alphabet = Alphabet::new(letters).map_err(OpError::from)?;
    let h = VariadicOp::from_tables(format!("H[{}]", op.name()), alphabet, tables, Some(Value::Eps))?;
    let certified_strong = if strongly_preassociative(op, top)? {
        Some(check_property(PropertyId::StrongBAssocDef, &h, &CheckDomain::exhaustive(top))?.status == Status::Holds)
    } else {
        None
    };
    Ok(Factorization { op: op.name().to_string(), h: Inner::Op(h), f: fs, g: gs, max_arity: top, certified_strong })
}

/// Factors a B-preassociative `F` through a length-preserving string
/// function: `g_n` maps each value of `F_n` to the first word attaining it,
/// `H_n = g_n ∘ F_n` and `f_n = F_n` on `ran(H_n)`.
pub fn factorize_general(op: &VariadicOp, arity: usize) -> Result<Factorization, FactorError> {
    let (letters, top) = finite_arity(op, arity)?;
    require(op, PropertyId::BPreassoc, top)?;
    let alphabet = Alphabet::new(letters.clone()).map_err(OpError::from)?;
    let (mut fs, mut gs, mut tables) = (Vec::new(), Vec::new(), Vec::new());
    for n in 1..=top {
        let mut pairs = Vec::new();
        for x in enumerate_words(&letters, n) {
            let v = op.evaluate(&x)?;
            pairs.push((Value::Word(x), v));
        }
        let fn_n = FiniteFn::new(pairs)?;
        let g = quasi_inverse(&fn_n);
        let mut table = Vec::new();
        let mut f_pairs: Vec<(Value, Value)> = Vec::new();
        for (_, v) in fn_n.pairs() {
            let Value::Word(h) = g.g.apply(v).expect("value attained") else { unreachable!("words as keys") };
            if !f_pairs.iter().any(|(k, _)| matches!(k, Value::Word(w) if w == h)) {
                f_pairs.push((Value::Word(h.clone()), v.clone()));
            }
            table.push(h.clone());
        }
        fs.push(FiniteFn::new(f_pairs)?);
        gs.push(g);
        tables.push(table);
    }
    let h = StringFunction { alphabet, tables };
    let certified_strong = if strongly_preassociative(op, top)? {
        Some(check_string_properties(&h, top)?.strongly_b_preassociative.status == Status::Holds)
    } else {
        None
    };
    Ok(Factorization { op: op.name().to_string(), h: Inner::Strings(h), f: fs, g: gs, max_arity: top, certified_strong })
}

/// One numbered verification step.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorCheck {
    pub name: &'static str,
    pub status: Status,
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FactorizationVerdict {
    pub checks: Vec<FactorCheck>,
    /// Strong check failed exhaustively although `F` is strongly
    /// B-preassociative, which the theory rules out.
    pub theorem_contradiction: bool,
}

impl FactorizationVerdict {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status == Status::Holds) && !self.theorem_contradiction
    }

    pub fn to_json(&self) -> Json {
        json!({
            "passed": self.passed(),
            "theorem_contradiction": self.theorem_contradiction,
            "checks": self.checks.iter().map(|c| json!({"name": c.name, "status": c.status, "detail": c.detail})).collect::<Vec<_>>(),
        })
    }
}

impl fmt::Display for FactorizationVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            write!(f, "{:<28} {}", c.name, c.status)?;
            if let Some(d) = &c.detail {
                write!(f, "  {d}")?;
            }
            writeln!(f)?;
        }
        if self.theorem_contradiction {
            writeln!(f, "theorem contradiction: strong check failed on an exhaustive domain")?;
        }
        Ok(())
    }
}

fn verdict_check(name: &'static str, v: Result<crate::properties::PropertyVerdict, CheckError>) -> FactorCheck {
    match v {
        Ok(v) => FactorCheck {
            name,
            status: v.status,
            detail: v.witness.map(|w| w.to_string()).or(v.note),
        },
        Err(e) => FactorCheck { name, status: Status::Inconclusive, detail: Some(e.to_string()) },
    }
}

/// Re-checks a factorization: (1) `F_n = f_n ∘ H_n` bit-exactly, (2) each
/// `f_n` one-to-one on `ran(H_n)`, (3) `H` ε-standard, (4) `H` B-associative
/// (associative and length-preserving for string functions) and, when
/// `strong`, (5) `H` strongly B-associative (strongly B-preassociative for
/// string functions).
pub fn verify_factorization(
    op: &VariadicOp,
    fact: &Factorization,
    dom: &CheckDomain,
    strong: bool,
) -> Result<FactorizationVerdict, FactorError> {
    if dom.max_len > fact.max_arity {
        return Err(FactorError::Coverage { requested: dom.max_len, covered: fact.max_arity });
    }
    let (letters, top) = finite_arity(op, dom.max_len)?;
    let mut checks = Vec::new();

    let mut roundtrip = FactorCheck { name: "F_n = f_n ∘ H_n", status: Status::Holds, detail: None };
    'rt: for n in 1..=top {
        for x in enumerate_words(&letters, n) {
            let fx = op.evaluate(&x)?;
            let hx = fact.h_value(&x)?;
            let back = fact.f[n - 1].apply(&hx);
            if back != Some(&fx) {
                let shown = back.map_or("undefined".to_string(), Value::to_string);
                roundtrip.status = Status::Fails;
                roundtrip.detail = Some(format!("x = {x}: F(x) = {fx}, f_{n}(H(x)) = {shown}"));
                break 'rt;
            }
        }
    }
    checks.push(roundtrip);

    let mut injective = FactorCheck { name: "f_n one-to-one on ran(H_n)", status: Status::Holds, detail: None };
    for (k, f) in fact.f.iter().enumerate().take(top) {
        if let Some((a, b, y)) = f.collision() {
            injective.status = Status::Fails;
            injective.detail = Some(format!("f_{}({a}) = f_{}({b}) = {y}", k + 1, k + 1));
            break;
        }
    }
    checks.push(injective);

    match &fact.h {
        Inner::Op(h) => {
            checks.push(verdict_check("H ε-standard", check_property(PropertyId::EpsilonStandard, h, dom)));
            checks.push(verdict_check("H B-associative", check_property(PropertyId::BAssoc, h, dom)));
            if strong {
                checks.push(verdict_check("H strongly B-associative", check_property(PropertyId::StrongBAssocDef, h, dom)));
            }
        }
        Inner::Strings(h) => {
            let s = check_string_properties(h, top)?;
            let c = |name, sc: StringCheck| FactorCheck { name, status: sc.status, detail: sc.witness };
            checks.push(c("H length-preserving", s.length_preserving));
            checks.push(c("H associative", s.associative));
            if strong {
                checks.push(c("H strongly B-preassociative", s.strongly_b_preassociative));
            }
        }
    }

    let strong_failed = strong && checks.last().is_some_and(|c| c.status == Status::Fails);
    let theorem_contradiction = strong_failed && dom.is_exhaustive() && strongly_preassociative(op, top)?;
    Ok(FactorizationVerdict { checks, theorem_contradiction })
}
