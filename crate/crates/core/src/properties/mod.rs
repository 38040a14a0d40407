//! The law catalog and the checking engine.
//!
//! Every law is universally quantified over words. A check walks *primary*
//! words in a fixed global order (length, then index) and expands each into
//! its sub-instances (index sets, splits, block structures, candidate
//! substitutes). Exhaustive mode enumerates every primary word over a finite
//! alphabet; sampled mode draws them from seeded per-word streams. Either
//! way, the reported witness is the first violation in that order, so
//! verdicts do not depend on the number of workers.

mod engine;
mod laws;
mod report;
mod sampling;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{Alphabet, Interval};
use crate::operations::OpError;
use crate::par::Execution;
use crate::value::Value;

pub use engine::{applicable, check_property, replay, search_counterexample, Judgement};
pub use laws::Slot;
pub use report::{
    applicable_properties, cross_check_equivalences, domain_json, run_suite, ConsistencyGroup, ConsistencyReport,
    ImplicationFlag, SuiteReport, IMPLICATIONS,
};
pub use sampling::default_interval;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PropertyId {
    BAssoc,
    StrongBAssocDef,
    StrongBAssocEq,
    StrongBAssocIii,
    BPreassoc,
    StrongBPreassocI,
    StrongBPreassocIi,
    StrongBPreassocIii,
    AwRangeIdempotent,
    AwQuasiRangeIdempotent,
    Symmetric,
    InnerSymmetric,
    ReplicationInvariant,
    MultGrowingRange,
    BlockwiseReplication,
    BlockAggregation,
    LeaveOneOutReversal,
    StrongBisymmetry,
    EqRmai,
    EpsilonStandard,
}

impl PropertyId {
    pub const ALL: [PropertyId; 20] = [
        PropertyId::BAssoc,
        PropertyId::StrongBAssocDef,
        PropertyId::StrongBAssocEq,
        PropertyId::StrongBAssocIii,
        PropertyId::BPreassoc,
        PropertyId::StrongBPreassocI,
        PropertyId::StrongBPreassocIi,
        PropertyId::StrongBPreassocIii,
        PropertyId::AwRangeIdempotent,
        PropertyId::AwQuasiRangeIdempotent,
        PropertyId::Symmetric,
        PropertyId::InnerSymmetric,
        PropertyId::ReplicationInvariant,
        PropertyId::MultGrowingRange,
        PropertyId::BlockwiseReplication,
        PropertyId::BlockAggregation,
        PropertyId::LeaveOneOutReversal,
        PropertyId::StrongBisymmetry,
        PropertyId::EqRmai,
        PropertyId::EpsilonStandard,
    ];

    /// `STRONG_B_ASSOC_DEF`-style identifier.
    pub fn id(self) -> &'static str {
        use PropertyId::*;
        match self {
            BAssoc => "B_ASSOC",
            StrongBAssocDef => "STRONG_B_ASSOC_DEF",
            StrongBAssocEq => "STRONG_B_ASSOC_EQ",
            StrongBAssocIii => "STRONG_B_ASSOC_III",
            BPreassoc => "B_PREASSOC",
            StrongBPreassocI => "STRONG_B_PREASSOC_I",
            StrongBPreassocIi => "STRONG_B_PREASSOC_II",
            StrongBPreassocIii => "STRONG_B_PREASSOC_III",
            AwRangeIdempotent => "AW_RANGE_IDEMPOTENT",
            AwQuasiRangeIdempotent => "AW_QUASI_RANGE_IDEMPOTENT",
            Symmetric => "SYMMETRIC",
            InnerSymmetric => "INNER_SYMMETRIC",
            ReplicationInvariant => "REPLICATION_INVARIANT",
            MultGrowingRange => "MULT_GROWING_RANGE",
            BlockwiseReplication => "BLOCKWISE_REPLICATION",
            BlockAggregation => "BLOCK_AGGREGATION",
            LeaveOneOutReversal => "LEAVE_ONE_OUT_REVERSAL",
            StrongBisymmetry => "STRONG_BISYMMETRY",
            EqRmai => "EQ_RMAI",
            EpsilonStandard => "EPSILON_STANDARD",
        }
    }

    /// Command-line spelling.
    pub fn kebab(self) -> &'static str {
        use PropertyId::*;
        match self {
            BAssoc => "b-assoc",
            StrongBAssocDef => "strong-b-assoc",
            StrongBAssocEq => "strong-b-assoc-eq",
            StrongBAssocIii => "strong-b-assoc-iii",
            BPreassoc => "b-preassoc",
            StrongBPreassocI => "strong-b-preassoc",
            StrongBPreassocIi => "strong-b-preassoc-ii",
            StrongBPreassocIii => "strong-b-preassoc-iii",
            AwRangeIdempotent => "aw-range-idempotent",
            AwQuasiRangeIdempotent => "aw-quasi-range-idempotent",
            Symmetric => "symmetric",
            InnerSymmetric => "inner-symmetric",
            ReplicationInvariant => "replication-invariant",
            MultGrowingRange => "mult-growing-range",
            BlockwiseReplication => "blockwise-replication",
            BlockAggregation => "block-aggregation",
            LeaveOneOutReversal => "leave-one-out-reversal",
            StrongBisymmetry => "strong-bisymmetry",
            EqRmai => "eq-rmai",
            EpsilonStandard => "epsilon-standard",
        }
    }

    pub fn law(self) -> &'static str {
        use PropertyId::*;
        match self {
            BAssoc => "F(xyz) = F(x F(y)^|y| z)",
            StrongBAssocDef => "F(x) = F(x') with x'|K = F(x|K)^|K|, x'|Kᶜ = x|Kᶜ",
            StrongBAssocEq => "F(xyz) = F(F(xz)^|x| y F(xz)^|z|), |y| ≤ 1",
            StrongBAssocIii => "F(xyz) = F(F(xz)^|x| F(y)^|y| F(xz)^|z|)",
            BPreassoc => "|y| = |y'|, F(y) = F(y') ⇒ F(xyz) = F(xy'z)",
            StrongBPreassocI => "F(x|K) = F(x'|K), x'|Kᶜ = x|Kᶜ ⇒ F(x) = F(x')",
            StrongBPreassocIi => "F(x|K) = F(x'|K), F(x|Kᶜ) = F(x'|Kᶜ) ⇒ F(x) = F(x')",
            StrongBPreassocIii => "|x| = |x'|, |z| = |z'|, F(xz) = F(x'z') ⇒ F(xyz) = F(x'yz'), |y| = 1",
            AwRangeIdempotent => "F(F(x)^|x|) = F(x)",
            AwQuasiRangeIdempotent => "ran(δ_{F_n}) = ran(F_n)",
            Symmetric => "F_n invariant under permutations",
            InnerSymmetric => "y ↦ F(x y z) symmetric for letters x, z",
            ReplicationInvariant => "F(x^k) = F(x)",
            MultGrowingRange => "ran(F_n) ⊆ ran(F_kn)",
            BlockwiseReplication => "F((x¹)^k ⋯ (xⁿ)^k) = F(x¹ ⋯ xⁿ)",
            BlockAggregation => "F(F(x¹) ⋯ F(xⁿ)) = F(x¹ ⋯ xⁿ), equal block lengths",
            LeaveOneOutReversal => "F(x_1 ⋯ x_n) = F(x'_n ⋯ x'_1), x'_k = F(x_-k)",
            StrongBisymmetry => "F(F(r_1) ⋯ F(r_p)) = F(F(c_1) ⋯ F(c_m))",
            EqRmai => "F(F(x)^(k|x|)) = F(x)",
            EpsilonStandard => "F(x) = ε ⇔ x = ε",
        }
    }

    /// Laws that feed values of `F` back in as letters.
    pub fn needs_closed_codomain(self) -> bool {
        use PropertyId::*;
        matches!(
            self,
            BAssoc
                | StrongBAssocDef
                | StrongBAssocEq
                | StrongBAssocIii
                | AwRangeIdempotent
                | BlockAggregation
                | LeaveOneOutReversal
                | StrongBisymmetry
                | EqRmai
        )
    }

    /// Laws quantified over whole ranges, which only a finite enumeration
    /// can decide.
    pub fn exhaustive_only(self) -> bool {
        matches!(self, PropertyId::AwQuasiRangeIdempotent | PropertyId::MultGrowingRange)
    }

    /// Laws with an implication whose premise must be met by a substitute.
    pub fn has_premise(self) -> bool {
        matches!(
            self,
            PropertyId::BPreassoc
                | PropertyId::StrongBPreassocI
                | PropertyId::StrongBPreassocIi
                | PropertyId::StrongBPreassocIii
        )
    }
}

impl fmt::Display for PropertyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown property `{0}`")]
pub struct UnknownProperty(pub String);

impl FromStr for PropertyId {
    type Err = UnknownProperty;

    /// Accepts `STRONG_B_ASSOC_DEF`, `strong-b-assoc-def`, the kebab aliases
    /// and the bare `STRONG_B_PREASSOC` (formulation I).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        let alias = match norm.as_str() {
            "strong-b-assoc-def" => Some(PropertyId::StrongBAssocDef),
            "strong-b-preassoc-i" => Some(PropertyId::StrongBPreassocI),
            _ => None,
        };
        alias
            .or_else(|| PropertyId::ALL.into_iter().find(|p| p.kebab() == norm))
            .ok_or_else(|| UnknownProperty(s.to_string()))
    }
}

/// How quantifiers are instantiated.
#[derive(Clone, Debug, PartialEq)]
pub enum Mode {
    /// Every word over `alphabet` (the op's own alphabet when `None`).
    Exhaustive { alphabet: Option<Alphabet> },
    /// `samples` seeded words per length from `interval` (reals) or from the
    /// op's alphabet (finite domains). `None` picks a default interval.
    Sampled { interval: Option<Interval>, samples: u64, seed: u64 },
}

/// Where and how hard to look.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckDomain {
    pub mode: Mode,
    /// Longest word ever evaluated.
    pub max_len: usize,
    /// Equality tolerance on real values (absolute).
    pub tol: f64,
    /// Cap on exhaustive instances, or on sampled primary words.
    pub budget: u64,
    pub execution: Execution,
}

pub const DEFAULT_BUDGET: u64 = 50_000_000;

impl CheckDomain {
    pub fn exhaustive(max_len: usize) -> Self {
        CheckDomain {
            mode: Mode::Exhaustive { alphabet: None },
            max_len,
            tol: 1e-9,
            budget: DEFAULT_BUDGET,
            execution: Execution::default(),
        }
    }

    pub fn exhaustive_over(alphabet: Alphabet, max_len: usize) -> Self {
        CheckDomain { mode: Mode::Exhaustive { alphabet: Some(alphabet) }, ..Self::exhaustive(max_len) }
    }

    pub fn sampled(samples: u64, seed: u64, max_len: usize) -> Self {
        CheckDomain { mode: Mode::Sampled { interval: None, samples, seed }, ..Self::exhaustive(max_len) }
    }

    pub fn with_interval(mut self, interval: Interval) -> Self {
        if let Mode::Sampled { interval: i, .. } = &mut self.mode {
            *i = Some(interval);
        }
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn is_exhaustive(&self) -> bool {
        matches!(self.mode, Mode::Exhaustive { .. })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Holds,
    Fails,
    Inconclusive,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Holds => "holds",
            Status::Fails => "fails",
            Status::Inconclusive => "inconclusive",
        })
    }
}

/// A concrete violation: the instance plus both evaluated sides.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub property: PropertyId,
    pub instance: Vec<(&'static str, Slot)>,
    pub lhs: Value,
    pub rhs: Value,
    pub residual: Option<f64>,
    /// Total length of the primary word.
    pub size: usize,
}

impl Witness {
    pub fn slot(&self, name: &str) -> Option<&Slot> {
        self.instance.iter().find(|(n, _)| *n == name).map(|(_, s)| s)
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (name, slot)) in self.instance.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{name} = {slot}")?;
        }
        write!(f, ": lhs {} vs rhs {}", self.lhs, self.rhs)?;
        if let Some(r) = self.residual {
            write!(f, " (residual {r:e})")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PropertyVerdict {
    pub property: PropertyId,
    pub status: Status,
    pub exhaustive: bool,
    /// Effective bound on word length.
    pub max_len: usize,
    /// Instances whose conclusion was evaluated.
    pub instances_checked: u64,
    /// Instances whose premise was false.
    pub vacuous: u64,
    /// Instances needing an undefined `F(ε)`.
    pub skipped: u64,
    /// Instances whose substitute `F(x|K)^{|K|}` is not a word (`F = ε`).
    pub ill_defined: u64,
    pub witness: Option<Witness>,
    pub note: Option<String>,
}

impl PropertyVerdict {
    /// A sampled "holds" is statistical; only exhaustive checks are
    /// universal within their bound.
    pub fn statistical(&self) -> bool {
        !self.exhaustive
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CheckError {
    #[error("{property} does not apply to {op}: {reason}")]
    Inapplicable { property: PropertyId, op: String, reason: String },
    #[error("check domain does not fit the operation: {0}")]
    DomainMismatch(String),
    #[error("evaluation failed at {instance}: {source}")]
    Eval { instance: String, source: OpError },
    #[error("malformed witness: {0}")]
    Witness(String),
}
