//! Variadic aggregation operations and the barycentric-associativity family
//! of laws: construction, exhaustive and sampled checking with replayable
//! witnesses, factorization through quasi-inverses, and reconstruction of
//! quasi-arithmetic mean generators.

pub mod corpus;
pub mod domain;
pub mod factorization;
pub mod means;
pub mod operations;
mod par;
pub mod properties;
pub mod value;
pub mod words;

pub use domain::{Alphabet, Codomain, Domain, Interval};
pub use operations::{builtin, OpError, VariadicOp};
pub use par::{parallel_available, Execution};
pub use properties::{check_property, run_suite, CheckDomain, PropertyId, PropertyVerdict, Status};
pub use value::Value;
pub use words::{IndexSet, Word};

/// Mixes a seed with stream coordinates (splitmix64 finalizer).
pub fn mix_seed(seed: u64, parts: &[u64]) -> u64 {
    let mut h = seed ^ 0x9e37_79b9_7f4a_7c15;
    for &p in parts {
        h = h.wrapping_add(p.wrapping_mul(0x9e37_79b9_7f4a_7c15));
        h = (h ^ (h >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        h = (h ^ (h >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        h ^= h >> 31;
    }
    h
}
