//! Seeded primary words and premise substitutes for sampled checks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::{Domain, Interval};
use crate::mix_seed;
use crate::operations::VariadicOp;
use crate::value::Value;
use crate::words::Word;

/// Where letters come from.
#[derive(Clone, Debug)]
pub(crate) enum Source {
    Reals { lo: f64, hi: f64 },
    Letters(Vec<Value>),
}

impl Source {
    pub(crate) fn lo(&self) -> Value {
        match self {
            Source::Reals { lo, .. } => Value::Real(*lo),
            Source::Letters(l) => l[0].clone(),
        }
    }

    pub(crate) fn hi(&self) -> Value {
        match self {
            Source::Reals { hi, .. } => Value::Real(*hi),
            Source::Letters(l) => l[l.len() - 1].clone(),
        }
    }

    pub(crate) fn mid(&self) -> Value {
        match self {
            Source::Reals { lo, hi } => Value::Real(0.5 * (lo + hi)),
            Source::Letters(l) => l[(l.len() - 1) / 2].clone(),
        }
    }

    pub(crate) fn draw(&self, rng: &mut ChaCha8Rng) -> Value {
        match self {
            Source::Reals { lo, hi } => Value::Real(rng.gen_range(*lo..=*hi)),
            Source::Letters(l) => l.choose(rng).expect("nonempty alphabet").clone(),
        }
    }

    pub(crate) fn random_word(&self, n: usize, rng: &mut ChaCha8Rng) -> Word {
        Word::from_letters((0..n).map(|_| self.draw(rng)).collect())
    }
}

/// Sampling interval when none is given: the op's own domain when it is
/// closed and bounded, else `[0, 1]`, else `[1, 2]`, else a probe window.
pub fn default_interval(op: &VariadicOp) -> Option<Interval> {
    let Domain::Real(d) = op.domain() else { return None };
    if d.is_closed_bounded() {
        return Some(*d);
    }
    for (lo, hi) in [(0.0, 1.0), (1.0, 2.0)] {
        let i = Interval::closed(lo, hi).expect("nontrivial");
        if d.includes(&i) {
            return Some(i);
        }
    }
    let lo = if d.lo.is_finite() { d.sample_lo() } else { d.hi.min(0.0) - 1.0 };
    let hi = if d.hi.is_finite() { d.sample_hi() } else { lo + 1.0 };
    Interval::closed(lo, hi).ok()
}

/// The `i`-th sampled word of length `n`, and the stream that produced it
/// (reused for substitutes). The first words are all-low, all-high,
/// alternating, all-equal and reversed alternating.
pub(crate) fn primary_word(source: &Source, seed: u64, n: usize, i: u64) -> (Word, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, &[n as u64, i]));
    let (lo, hi) = (source.lo(), source.hi());
    let letters = match i {
        0 => vec![lo; n],
        1 => vec![hi; n],
        2 => (0..n).map(|k| if k % 2 == 0 { lo.clone() } else { hi.clone() }).collect(),
        3 => vec![source.draw(&mut rng); n],
        4 => (0..n).map(|k| if k % 2 == 0 { hi.clone() } else { lo.clone() }).collect(),
        _ => (0..n).map(|_| source.draw(&mut rng)).collect(),
    };
    (Word::from_letters(letters), rng)
}

/// Same-length words likely to share `F(y)`: reversal, rotation, a
/// mass-preserving shift, the constant word `F(y)^{|y|}` and a random word.
pub(crate) fn substitutes(op: &VariadicOp, source: &Source, y: &Word, rng: &mut ChaCha8Rng) -> Vec<Word> {
    let n = y.len();
    let mut out: Vec<Word> = Vec::with_capacity(5);
    if n == 0 {
        return out;
    }
    out.push(y.reversed());
    if n >= 2 {
        let mut rot = y.slice(1, n).into_letters();
        rot.push(y.letters()[0].clone());
        out.push(Word::from_letters(rot));
    }
    if let (Source::Reals { lo, hi }, Some(xs)) = (source, y.to_reals()) {
        if n >= 2 {
            let up = 0.5 * (hi - xs[0]).min(xs[1] - lo);
            let down = 0.5 * (xs[0] - lo).min(hi - xs[1]);
            let delta = if up > 0.0 { up } else { -down };
            if delta != 0.0 {
                let mut s = xs.clone();
                s[0] += delta;
                s[1] -= delta;
                out.push(Word::reals(&s));
            }
        }
    }
    if let Ok(v) = op.evaluate(y) {
        if !v.is_eps() && op.domain().contains(&v) {
            out.push(Word::single(v).power(n));
        }
    }
    out.push(source.random_word(n, rng));
    let mut seen = Vec::with_capacity(out.len());
    out.retain(|w| {
        if w == y || seen.contains(w) {
            false
        } else {
            seen.push(w.clone());
            true
        }
    });
    out
}
