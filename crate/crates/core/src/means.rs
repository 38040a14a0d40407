//! Quasi-arithmetic (pre-)means, the ψ grid construction, and numerical
//! reconstruction of generators from a mean.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::domain::{Codomain, Domain, Interval};
use crate::operations::{LetterFn, OpError, VariadicOp};
use crate::par::{map_range, Execution};
use crate::value::Value;
use crate::words::Word;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeanError {
    #[error("{0} lies outside {1}")]
    OutOfInterval(f64, Interval),
    #[error("cannot bracket a preimage of {0}")]
    Bracket(f64),
    #[error("`{name}` is not strictly monotone: f({x0}) = {y0}, f({x1}) = {y1}")]
    NotMonotone { name: String, x0: f64, y0: f64, x1: f64, y1: f64 },
    #[error("probe points collapse: g∘f⁻¹ is numerically constant")]
    ProbeCollapse,
    #[error("affine coefficient r must be nonzero")]
    ZeroScale,
    #[error("{0} must be closed and bounded")]
    NotClosedBounded(Interval),
    #[error("ψ is not strictly increasing: ψ({p}/{q}) = {left} but ψ({next}/{q}) = {right}")]
    PsiNotIncreasing { p: u32, next: u32, q: u32, left: f64, right: f64 },
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error(transparent)]
    Op(#[from] OpError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Increasing,
    Decreasing,
}

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A continuous strictly monotone map `f: 𝕀 → ℝ` with an inverse.
#[derive(Clone)]
pub struct Generator {
    name: String,
    domain: Interval,
    forward: ScalarFn,
    inverse: Option<ScalarFn>,
    direction: Direction,
}

impl fmt::Debug for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Generator({} on {}, {:?})", self.name, self.domain, self.direction)
    }
}

/// Finite probe range of an interval; unbounded sides are cut at 100 units.
fn probe_bounds(i: &Interval) -> (f64, f64) {
    let lo_f = if i.lo.is_finite() { i.lo } else if i.hi.is_finite() { i.hi - 100.0 } else { -100.0 };
    let hi_f = if i.hi.is_finite() { i.hi } else { lo_f.max(0.0) + 100.0 };
    let nudge = (hi_f - lo_f) * 1e-9;
    let lo = if i.lo_closed { lo_f } else { lo_f + nudge };
    let hi = if i.hi_closed { hi_f } else { hi_f - nudge };
    (lo, hi)
}

const NAMED: &[&str] = &["identity", "ln", "log2", "exp", "square", "sqrt", "cube", "reciprocal"];

impl Generator {
    /// Wraps `forward`, probing 65 grid points for strict monotonicity.
    pub fn new(
        name: impl Into<String>,
        domain: Interval,
        forward: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self, MeanError> {
        let name = name.into();
        let (lo, hi) = probe_bounds(&domain);
        let xs: Vec<f64> = (0..=64).map(|k| lo + (hi - lo) * k as f64 / 64.0).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| forward(x)).collect();
        let direction = if ys[64] > ys[0] { Direction::Increasing } else { Direction::Decreasing };
        for k in 0..64 {
            let ok = match direction {
                Direction::Increasing => ys[k] < ys[k + 1],
                Direction::Decreasing => ys[k] > ys[k + 1],
            };
            if !ok || !ys[k].is_finite() {
                return Err(MeanError::NotMonotone { name, x0: xs[k], y0: ys[k], x1: xs[k + 1], y1: ys[k + 1] });
            }
        }
        Ok(Generator { name, domain, forward: Arc::new(forward), inverse: None, direction })
    }

    pub fn with_inverse(mut self, inverse: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.inverse = Some(Arc::new(inverse));
        self
    }

    /// Builtin generators by name, on their natural domains.
    pub fn named(name: &str) -> Option<Generator> {
        let pos = Interval::positive();
        let nonneg = Interval { lo: 0.0, hi: f64::INFINITY, lo_closed: true, hi_closed: false };
        let g = match name {
            "identity" | "id" => Generator::new("identity", Interval::reals(), |x| x).ok()?.with_inverse(|y| y),
            "ln" | "log" => Generator::new("ln", pos, f64::ln).ok()?.with_inverse(f64::exp),
            "log2" => Generator::new("log2", pos, f64::log2).ok()?.with_inverse(f64::exp2),
            "exp" => Generator::new("exp", Interval::reals(), f64::exp).ok()?.with_inverse(f64::ln),
            "square" | "x^2" => Generator::new("square", nonneg, |x| x * x).ok()?.with_inverse(f64::sqrt),
            "sqrt" => Generator::new("sqrt", nonneg, f64::sqrt).ok()?.with_inverse(|y| y * y),
            "cube" | "x^3" => Generator::new("cube", Interval::reals(), |x| x * x * x).ok()?.with_inverse(f64::cbrt),
            "reciprocal" => Generator::new("reciprocal", pos, |x| 1.0 / x).ok()?.with_inverse(|y| 1.0 / y),
            _ => return None,
        };
        Some(g)
    }

    pub fn catalog_names() -> &'static [&'static str] {
        NAMED
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> &Interval {
        &self.domain
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn has_analytic_inverse(&self) -> bool {
        self.inverse.is_some()
    }

    pub fn forward(&self, x: f64) -> f64 {
        (self.forward)(x)
    }

    pub fn checked_forward(&self, x: f64) -> Result<f64, MeanError> {
        if !self.domain.contains(x) {
            return Err(MeanError::OutOfInterval(x, self.domain));
        }
        Ok(self.forward(x))
    }

    /// `f⁻¹(y)`: analytic when known, otherwise bisection on the domain.
    pub fn inverse(&self, y: f64) -> Result<f64, MeanError> {
        if let Some(inv) = &self.inverse {
            return Ok(inv(y));
        }
        let (mut lo, mut hi) = probe_bounds(&self.domain);
        let inc = self.direction == Direction::Increasing;
        let below = |x: f64| if inc { self.forward(x) < y } else { self.forward(x) > y };
        // Widen unbounded sides until the target is bracketed.
        for _ in 0..64 {
            if !below(lo) || self.domain.lo.is_finite() {
                break;
            }
            lo -= (hi - lo).max(1.0);
        }
        for _ in 0..64 {
            if below(hi) && !self.domain.hi.is_finite() {
                hi += (hi - lo).max(1.0);
            } else {
                break;
            }
        }
        let (flo, fhi) = (self.forward(lo), self.forward(hi));
        let (min, max) = if flo < fhi { (flo, fhi) } else { (fhi, flo) };
        if !(y >= min && y <= max) {
            return Err(MeanError::Bracket(y));
        }
        Ok(bisect(lo, hi, |x| !below(x)))
    }

    /// `r·f + s`.
    pub fn affine(&self, r: f64, s: f64) -> Result<Generator, MeanError> {
        if r == 0.0 || !r.is_finite() {
            return Err(MeanError::ZeroScale);
        }
        let base = self.clone();
        let inv_base = self.clone();
        let direction = match (self.direction, r > 0.0) {
            (d, true) => d,
            (Direction::Increasing, false) => Direction::Decreasing,
            (Direction::Decreasing, false) => Direction::Increasing,
        };
        Ok(Generator {
            name: format!("{r}·{} + {s}", self.name),
            domain: self.domain,
            forward: Arc::new(move |x| r * base.forward(x) + s),
            inverse: Some(Arc::new(move |y| inv_base.inverse((y - s) / r).unwrap_or(f64::NAN))),
            direction,
        })
    }
}

/// Smallest `x` in `[lo, hi]` with `above(x)`, to full double precision;
/// `above` must be monotone (false then true).
pub(crate) fn bisect(mut lo: f64, mut hi: f64, above: impl Fn(f64) -> bool) -> f64 {
    if above(lo) {
        return lo;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if above(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    if (hi - lo) > 0.0 {
        0.5 * (lo + hi)
    } else {
        hi
    }
}

type OuterFn = Arc<dyn Fn(usize, f64) -> Result<f64, MeanError> + Send + Sync>;

/// `F_n(x) = f_n((1/n) Σ f(x_i))`; the mean case uses `f_n = f⁻¹`.
#[derive(Clone)]
pub struct QuasiArithmeticPreMean {
    inner: Generator,
    outer: Option<OuterFn>,
    name: String,
}

impl fmt::Debug for QuasiArithmeticPreMean {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QuasiArithmeticPreMean({})", self.name)
    }
}

impl QuasiArithmeticPreMean {
    pub fn mean(inner: Generator) -> Self {
        let name = format!("M[{}]", inner.name());
        QuasiArithmeticPreMean { inner, outer: None, name }
    }

    pub fn pre_mean(
        name: impl Into<String>,
        inner: Generator,
        outer: impl Fn(usize, f64) -> Result<f64, MeanError> + Send + Sync + 'static,
    ) -> Self {
        QuasiArithmeticPreMean { inner, outer: Some(Arc::new(outer)), name: name.into() }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn inner(&self) -> &Generator {
        &self.inner
    }

    pub fn is_mean(&self) -> bool {
        self.outer.is_none()
    }

    pub fn evaluate(&self, xs: &[f64]) -> Result<f64, MeanError> {
        if xs.is_empty() {
            return Err(MeanError::Grid("empty tuple".into()));
        }
        let mut total = 0.0;
        for &x in xs {
            total += self.inner.checked_forward(x)?;
        }
        let t = total / xs.len() as f64;
        match &self.outer {
            None => self.inner.inverse(t),
            Some(g) => g(xs.len(), t),
        }
    }

    /// The pre-mean as a parametric operation on its generator's domain.
    pub fn to_op(&self) -> VariadicOp {
        let m = self.clone();
        let eval: LetterFn = Arc::new(move |letters| {
            let xs: Vec<f64> = letters.iter().map(|l| l.as_real().expect("domain-checked real")).collect();
            m.evaluate(&xs).map(Value::Real).map_err(|e| OpError::Eval(e.to_string()))
        });
        let (codomain, epsilon) = if self.is_mean() {
            (Codomain::DomainWithEpsilon, Some(Value::Eps))
        } else {
            (Codomain::External("reals".into()), None)
        };
        VariadicOp::parametric(
            self.name.clone(),
            "quasi-arith-pre-mean",
            serde_json::Value::Null,
            Domain::Real(*self.inner.domain()),
            codomain,
            None,
            epsilon,
            eval,
        )
    }
}

pub fn qam_evaluate(m: &QuasiArithmeticPreMean, xs: &[f64]) -> Result<f64, MeanError> {
    m.evaluate(xs)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AffineFit {
    pub holds: bool,
    pub r: f64,
    pub s: f64,
    pub worst_residual: f64,
    pub worst_at: f64,
    pub tol: f64,
}

/// Tests `g ∘ f⁻¹ = r·id + s` on `f(dom)`: fits `(r, s)` at the interior
/// points 1/3 and 2/3 of the range, then checks a 64-point grid.
pub fn affine_equivalent(f: &Generator, g: &Generator, dom: &Interval, tol: f64) -> Result<AffineFit, MeanError> {
    if !dom.is_bounded() {
        return Err(MeanError::NotClosedBounded(*dom));
    }
    let (lo, hi) = (dom.sample_lo(), dom.sample_hi());
    let (t0, t1) = (f.forward(lo), f.forward(hi));
    let g_of = |t: f64| -> Result<f64, MeanError> { Ok(g.forward(f.inverse(t)?)) };
    let p1 = t0 + (t1 - t0) / 3.0;
    let p2 = t0 + 2.0 * (t1 - t0) / 3.0;
    if !((p2 - p1).abs() > 0.0) {
        return Err(MeanError::ProbeCollapse);
    }
    let (v1, v2) = (g_of(p1)?, g_of(p2)?);
    let r = (v2 - v1) / (p2 - p1);
    if r == 0.0 || !r.is_finite() {
        return Err(MeanError::ProbeCollapse);
    }
    let s = v1 - r * p1;
    let mut worst = (0.0f64, t0);
    for k in 0..64 {
        let t = t0 + (t1 - t0) * k as f64 / 63.0;
        let res = (g_of(t)? - (r * t + s)).abs();
        if res > worst.0 || res.is_nan() {
            worst = (res, t);
        }
    }
    Ok(AffineFit { holds: worst.0 <= tol, r, s, worst_residual: worst.0, worst_at: worst.1, tol })
}

/// `ψ(p/q) = F(b^p a^(q−p))` for `p = 0..=q`.
#[derive(Clone, Debug, Serialize)]
pub struct PsiTable {
    pub a: Word,
    pub b: Word,
    pub q: u32,
    pub values: Vec<f64>,
    pub spot_checks: usize,
    pub max_defect: f64,
    pub warnings: Vec<String>,
}

impl PsiTable {
    pub fn at(&self, p: u32) -> f64 {
        self.values[p as usize]
    }

    /// The first pair `(p, p + 1)` where ψ fails to increase strictly.
    pub fn first_non_increase(&self) -> Option<(u32, u32)> {
        (0..self.q).find(|&p| !(self.values[p as usize + 1] > self.values[p as usize])).map(|p| (p, p + 1))
    }
}

fn psi_word(a: &Word, b: &Word, p: usize, q: usize) -> Word {
    b.power(p).concat(&a.power(q - p))
}

fn real_value(op: &VariadicOp, w: &Word) -> Result<f64, MeanError> {
    match op.evaluate(w)? {
        Value::Real(x) => Ok(x),
        Value::Int(i) => Ok(i as f64),
        other => Err(MeanError::Op(OpError::Eval(format!("expected a real value, got {other}")))),
    }
}

/// Builds ψ on the denominator-`q` grid, spot-checking well-definedness
/// against denominator `2q` at up to 17 numerators.
pub fn psi_build(op: &VariadicOp, a: &Word, b: &Word, q: u32, tol: f64, exec: Execution) -> Result<PsiTable, MeanError> {
    if a.is_empty() || b.is_empty() {
        return Err(MeanError::Grid("base words must be nonempty".into()));
    }
    if q == 0 {
        return Err(MeanError::Grid("q must be positive".into()));
    }
    let qu = q as usize;
    let values = map_range(exec, 0, q as u64 + 1, |p| real_value(op, &psi_word(a, b, p as usize, qu)))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let step = (qu / 16).max(1);
    let probes: Vec<usize> = (0..=qu).step_by(step).collect();
    let doubled = map_range(exec, 0, probes.len() as u64, |i| {
        let p = probes[i as usize];
        (p, real_value(op, &psi_word(a, b, 2 * p, 2 * qu)))
    });
    let mut warnings = Vec::new();
    let mut max_defect = 0.0f64;
    let mut spot_checks = 0;
    for (p, v) in doubled {
        match v {
            Ok(v) => {
                spot_checks += 1;
                let d = (v - values[p]).abs();
                if d > max_defect || d.is_nan() {
                    max_defect = d;
                }
                if !(d <= tol) {
                    warnings.push(format!("ψ({p}/{q}) = {} but ψ({}/{}) = {v}", values[p], 2 * p, 2 * q));
                }
            }
            Err(e) => warnings.push(format!("spot check at {}/{} failed: {e}", 2 * p, 2 * q)),
        }
    }
    Ok(PsiTable { a: a.clone(), b: b.clone(), q, values, spot_checks, max_defect, warnings })
}

/// Halves the grid step `levels` times using `ψ((z + z')/2) = F(ψ(z) ψ(z'))`,
/// so only arity-2 evaluations are needed past the base denominator.
pub fn psi_refine(op: &VariadicOp, table: &PsiTable, levels: u32, exec: Execution) -> Result<PsiTable, MeanError> {
    let mut out = table.clone();
    for _ in 0..levels {
        let q = out.q.checked_mul(2).ok_or_else(|| MeanError::Grid("refined denominator overflows".into()))?;
        let prev = &out.values;
        let mids = map_range(exec, 0, out.q as u64, |p| {
            let p = p as usize;
            real_value(op, &Word::reals(&[prev[p], prev[p + 1]]))
        })
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
        let mut values = Vec::with_capacity(prev.len() + mids.len());
        for (p, m) in mids.into_iter().enumerate() {
            values.push(prev[p]);
            values.push(m);
        }
        values.push(*prev.last().unwrap());
        out.values = values;
        out.q = q;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PsiWitness {
    /// Numerators over the table denominator.
    pub numerators: Vec<u32>,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PsiCheck {
    pub holds: bool,
    pub exhaustive: bool,
    pub checked: u64,
    pub off_grid: u64,
    pub max_residual: f64,
    pub witness: Option<PsiWitness>,
}

/// Checks `F(ψ(z_1)…ψ(z_n)) = ψ((1/n) Σ z_i)` for tuples of grid points with
/// `z_1 ≠ 0`, `z_n ≠ 1`, `n ≤ n_max`. All admissible tuples are visited when
/// there are at most `samples` of them; otherwise `samples` seeded draws.
pub fn psi_mean_check(
    op: &VariadicOp,
    table: &PsiTable,
    n_max: usize,
    samples: u64,
    tol: f64,
    seed: u64,
) -> Result<PsiCheck, MeanError> {
    let q = table.q as u64;
    let mut total: u64 = 0;
    for n in 1..=n_max as u32 {
        // z_1 ∈ 1..=q, z_n ∈ 0..q, middle free; n = 1 needs 1..q.
        let count = if n == 1 { q - 1 } else { q.saturating_mul(q).saturating_mul((q + 1).saturating_pow(n - 2)) };
        total = total.saturating_add(count);
    }
    let exhaustive = total <= samples;
    let mut out = PsiCheck { holds: true, exhaustive, checked: 0, off_grid: 0, max_residual: 0.0, witness: None };
    let mut visit = |ps: &[u32]| -> Result<bool, MeanError> {
        let sum: u64 = ps.iter().map(|&p| p as u64).sum();
        let n = ps.len() as u64;
        if sum % n != 0 {
            out.off_grid += 1;
            return Ok(true);
        }
        let letters: Vec<Value> = ps.iter().map(|&p| Value::Real(table.at(p))).collect();
        let lhs = real_value(op, &Word::from_letters(letters))?;
        let rhs = table.at((sum / n) as u32);
        let residual = (lhs - rhs).abs();
        out.checked += 1;
        if residual > out.max_residual || residual.is_nan() {
            out.max_residual = residual;
        }
        if !(residual <= tol) {
            out.holds = false;
            out.witness = Some(PsiWitness { numerators: ps.to_vec(), lhs, rhs, residual });
            return Ok(false);
        }
        Ok(true)
    };
    if exhaustive {
        for n in 1..=n_max {
            let mut ps = vec![0u32; n];
            let first_lo = 1;
            ps[0] = first_lo;
            'outer: loop {
                let admissible = ps[0] != 0 && ps[n - 1] != table.q;
                if admissible && !visit(&ps)? {
                    return Ok(out);
                }
                // Odometer over {0..=q}^n with z_1 ≥ 1.
                let mut i = n;
                loop {
                    if i == 0 {
                        break 'outer;
                    }
                    i -= 1;
                    if ps[i] < table.q {
                        ps[i] += 1;
                        for p in ps.iter_mut().skip(i + 1) {
                            *p = 0;
                        }
                        break;
                    }
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in 0..samples {
            let n = 1 + (i as usize % n_max);
            let mut ps: Vec<u32> = (0..n).map(|_| rng.gen_range(0..=table.q)).collect();
            ps[0] = ps[0].max(1);
            if ps[n - 1] == table.q {
                ps[n - 1] = table.q - 1;
                if n == 1 {
                    ps[0] = ps[0].clamp(1, table.q - 1);
                }
            }
            if !visit(&ps)? {
                return Ok(out);
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Interpolation {
    /// Monotone piecewise-linear through the ψ samples.
    #[default]
    Linear,
    /// Fritsch–Carlson monotone cubic Hermite (PCHIP).
    MonotoneCubic,
}

/// A strictly increasing interpolant `ψ̂: [0, 1] → [ψ(0), ψ(1)]` through
/// `(p/q, ψ(p/q))`.
#[derive(Clone, Debug)]
pub struct Interpolant {
    values: Arc<Vec<f64>>,
    slopes: Option<Arc<Vec<f64>>>,
    q: usize,
}

impl Interpolant {
    pub fn new(values: Vec<f64>, kind: Interpolation) -> Result<Self, MeanError> {
        if values.len() < 2 {
            return Err(MeanError::Grid("need at least two samples".into()));
        }
        let q = values.len() - 1;
        let slopes = match kind {
            Interpolation::Linear => None,
            Interpolation::MonotoneCubic => Some(Arc::new(pchip_slopes(&values))),
        };
        Ok(Interpolant { values: Arc::new(values), slopes, q })
    }

    pub fn kind(&self) -> Interpolation {
        if self.slopes.is_some() {
            Interpolation::MonotoneCubic
        } else {
            Interpolation::Linear
        }
    }

    fn segment(&self, t: f64) -> (usize, f64) {
        let s = (t.clamp(0.0, 1.0) * self.q as f64).min(self.q as f64);
        let k = (s.floor() as usize).min(self.q - 1);
        (k, s - k as f64)
    }

    fn on_segment(&self, k: usize, u: f64) -> f64 {
        let (y0, y1) = (self.values[k], self.values[k + 1]);
        match &self.slopes {
            None => y0 + (y1 - y0) * u,
            Some(m) => {
                // Slopes are per unit of the grid index.
                let (m0, m1) = (m[k], m[k + 1]);
                let (u2, u3) = (u * u, u * u * u);
                let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
                let h10 = u3 - 2.0 * u2 + u;
                let h01 = -2.0 * u3 + 3.0 * u2;
                let h11 = u3 - u2;
                h00 * y0 + h10 * m0 + h01 * y1 + h11 * m1
            }
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let (k, u) = self.segment(t);
        self.on_segment(k, u)
    }

    /// `ψ̂⁻¹(x)`: binary search for the segment, then an exact solve
    /// (linear) or bisection (cubic) inside it.
    pub fn inverse(&self, x: f64) -> f64 {
        let v = &self.values;
        if x <= v[0] {
            return 0.0;
        }
        if x >= v[self.q] {
            return 1.0;
        }
        let k = v.partition_point(|&y| y <= x).saturating_sub(1).min(self.q - 1);
        let u = match &self.slopes {
            None => (x - v[k]) / (v[k + 1] - v[k]),
            Some(_) => bisect(0.0, 1.0, |u| self.on_segment(k, u) >= x),
        };
        (k as f64 + u) / self.q as f64
    }
}

fn pchip_slopes(y: &[f64]) -> Vec<f64> {
    let q = y.len() - 1;
    let d: Vec<f64> = (0..q).map(|k| y[k + 1] - y[k]).collect();
    let mut m = vec![0.0; q + 1];
    for k in 1..q {
        if d[k - 1] * d[k] > 0.0 {
            m[k] = 2.0 / (1.0 / d[k - 1] + 1.0 / d[k]);
        }
    }
    let end = |d0: f64, d1: f64| -> f64 {
        let s = (3.0 * d0 - d1) / 2.0;
        if s.signum() != d0.signum() {
            0.0
        } else if d0.signum() != d1.signum() && s.abs() > 3.0 * d0.abs() {
            3.0 * d0
        } else {
            s
        }
    };
    if q == 1 {
        m[0] = d[0];
        m[1] = d[0];
    } else {
        m[0] = end(d[0], d[1]);
        m[q] = end(d[q - 1], d[q - 2]);
    }
    m
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct ResidualStats {
    pub samples: u64,
    pub max: f64,
    pub mean: f64,
}

/// Seeded tuples from `[lo, hi]`, the `i`-th of length `1 + i mod n_max`.
pub fn sample_tuples(interval: &Interval, n_max: usize, samples: u64, seed: u64) -> Vec<Vec<f64>> {
    let (lo, hi) = (interval.sample_lo(), interval.sample_hi());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|i| {
            let n = 1 + (i as usize % n_max.max(1));
            (0..n).map(|_| rng.gen_range(lo..=hi)).collect()
        })
        .collect()
}

fn residual_stats(
    op: &VariadicOp,
    interval: &Interval,
    n_max: usize,
    samples: u64,
    seed: u64,
    model: impl Fn(&[f64]) -> Result<f64, MeanError>,
) -> Result<ResidualStats, MeanError> {
    let mut stats = ResidualStats { samples, ..Default::default() };
    let mut sum = 0.0;
    for xs in sample_tuples(interval, n_max, samples, seed) {
        let truth = op.evaluate_reals(&xs)?;
        let r = (model(&xs)? - truth).abs();
        if r > stats.max || r.is_nan() {
            stats.max = r;
        }
        sum += r;
    }
    stats.mean = if samples > 0 { sum / samples as f64 } else { 0.0 };
    Ok(stats)
}

/// A generator reconstructed from ψ, in the gauge `f̂(a) = 0`, `f̂(b) = 1`.
#[derive(Clone, Debug)]
pub struct Extraction {
    pub interval: Interval,
    pub table: PsiTable,
    pub interpolant: Interpolant,
}

impl Extraction {
    /// `f̂ = ψ̂⁻¹` as a generator on `[ψ(0), ψ(1)]`.
    pub fn generator(&self) -> Generator {
        let (fwd, inv) = (self.interpolant.clone(), self.interpolant.clone());
        let (lo, hi) = (self.table.values[0], self.table.values[self.table.q as usize]);
        Generator {
            name: "extracted".into(),
            domain: Interval { lo, hi, lo_closed: true, hi_closed: true },
            forward: Arc::new(move |x| fwd.inverse(x)),
            inverse: Some(Arc::new(move |t| inv.eval(t))),
            direction: Direction::Increasing,
        }
    }

    pub fn f_hat(&self, x: f64) -> f64 {
        self.interpolant.inverse(x)
    }

    pub fn psi_hat(&self, t: f64) -> f64 {
        self.interpolant.eval(t)
    }

    /// `ψ̂((1/n) Σ f̂(x_i))`.
    pub fn reconstruct(&self, xs: &[f64]) -> f64 {
        let t = xs.iter().map(|&x| self.f_hat(x)).sum::<f64>() / xs.len() as f64;
        self.psi_hat(t)
    }

    pub fn residuals(&self, op: &VariadicOp, n_max: usize, samples: u64, seed: u64) -> Result<ResidualStats, MeanError> {
        residual_stats(op, &self.interval, n_max, samples, seed, |xs| Ok(self.reconstruct(xs)))
    }
}

/// Reconstructs a generator of `op` on the closed interval `[a, b]` from ψ
/// with base letters `a` and `b` and denominator `q`.
pub fn extract_generator(
    op: &VariadicOp,
    interval: &Interval,
    q: u32,
    kind: Interpolation,
    exec: Execution,
) -> Result<Extraction, MeanError> {
    extract_generator_refined(op, interval, q, 0, kind, exec)
}

/// [`extract_generator`] with ψ refined `refine` times by [`psi_refine`].
pub fn extract_generator_refined(
    op: &VariadicOp,
    interval: &Interval,
    q: u32,
    refine: u32,
    kind: Interpolation,
    exec: Execution,
) -> Result<Extraction, MeanError> {
    if !interval.is_closed_bounded() {
        return Err(MeanError::NotClosedBounded(*interval));
    }
    let a = Word::single(Value::Real(interval.lo));
    let b = Word::single(Value::Real(interval.hi));
    let table = psi_refine(op, &psi_build(op, &a, &b, q, 1e-9, exec)?, refine, exec)?;
    let q = table.q;
    if let Some((p, next)) = table.first_non_increase() {
        return Err(MeanError::PsiNotIncreasing {
            p,
            next,
            q,
            left: table.at(p),
            right: table.at(next),
        });
    }
    let interpolant = Interpolant::new(table.values.clone(), kind)?;
    Ok(Extraction { interval: *interval, table, interpolant })
}

/// `F_n = f̂_n((1/n) Σ f̂(x_i))` with `f̂_n = δ_{F_n} ∘ ψ̂`, obtained by
/// extracting a generator from `H_n = δ_{F_n}⁻¹ ∘ F_n`.
#[derive(Clone, Debug)]
pub struct PreMeanDecomposition {
    pub op: VariadicOp,
    pub core: VariadicOp,
    pub extraction: Extraction,
}

impl PreMeanDecomposition {
    pub fn outer(&self, n: usize, t: f64) -> Result<f64, MeanError> {
        let y = self.extraction.psi_hat(t);
        Ok(self.op.evaluate_reals(&vec![y; n])?)
    }

    pub fn reconstruct(&self, xs: &[f64]) -> Result<f64, MeanError> {
        let t = xs.iter().map(|&x| self.extraction.f_hat(x)).sum::<f64>() / xs.len() as f64;
        self.outer(xs.len(), t)
    }

    pub fn residuals(&self, n_max: usize, samples: u64, seed: u64) -> Result<ResidualStats, MeanError> {
        residual_stats(&self.op, &self.extraction.interval, n_max, samples, seed, |xs| self.reconstruct(xs))
    }

    /// The reconstructed pre-mean.
    pub fn pre_mean(&self) -> QuasiArithmeticPreMean {
        let me = self.clone();
        QuasiArithmeticPreMean::pre_mean("reconstructed", self.extraction.generator(), move |n, t| me.outer(n, t))
    }
}

/// `H_n = δ_{F_n}⁻¹ ∘ F_n` on `interval`, inverting each diagonal by
/// bisection. Refuses when a diagonal is not strictly monotone on a
/// 65-point grid for arities `1..=check_arity`.
pub fn diagonal_core(op: &VariadicOp, interval: &Interval, check_arity: usize) -> Result<VariadicOp, MeanError> {
    if !interval.is_closed_bounded() {
        return Err(MeanError::NotClosedBounded(*interval));
    }
    let (lo, hi) = (interval.lo, interval.hi);
    for n in 1..=check_arity {
        let ys: Vec<f64> = (0..=64)
            .map(|k| op.evaluate_reals(&vec![lo + (hi - lo) * k as f64 / 64.0; n]))
            .collect::<Result<_, _>>()?;
        if let Some(k) = (0..64).find(|&k| !(ys[k + 1] > ys[k])) {
            return Err(MeanError::NotMonotone {
                name: format!("δ_{n}"),
                x0: lo + (hi - lo) * k as f64 / 64.0,
                y0: ys[k],
                x1: lo + (hi - lo) * (k + 1) as f64 / 64.0,
                y1: ys[k + 1],
            });
        }
    }
    let f = op.clone();
    let eval: LetterFn = Arc::new(move |letters| {
        let n = letters.len();
        let target = match f.evaluate(&Word::from_letters(letters.to_vec()))? {
            Value::Real(v) => v,
            other => return Err(OpError::Eval(format!("expected a real value, got {other}"))),
        };
        let diag = |y: f64| f.evaluate_reals(&vec![y; n]);
        let (dlo, dhi) = (diag(lo)?, diag(hi)?);
        let slack = 1e-12 * dlo.abs().max(dhi.abs()).max(1.0);
        if !(target >= dlo - slack && target <= dhi + slack) {
            return Err(OpError::Eval(format!("F_{n} value {target} is outside the diagonal range [{dlo}, {dhi}]")));
        }
        let x = bisect(lo, hi, |y| diag(y).map_or(true, |v| v >= target));
        Ok(Value::Real(x))
    });
    Ok(VariadicOp::parametric(
        format!("core({})", op.name()),
        "diagonal-core",
        serde_json::Value::Null,
        Domain::Real(*interval),
        Codomain::DomainWithEpsilon,
        op.max_arity(),
        Some(Value::Eps),
        eval,
    ))
}

pub fn pre_mean_decompose(
    op: &VariadicOp,
    interval: &Interval,
    q: u32,
    kind: Interpolation,
    exec: Execution,
) -> Result<PreMeanDecomposition, MeanError> {
    pre_mean_decompose_refined(op, interval, q, 0, kind, exec)
}

pub fn pre_mean_decompose_refined(
    op: &VariadicOp,
    interval: &Interval,
    q: u32,
    refine: u32,
    kind: Interpolation,
    exec: Execution,
) -> Result<PreMeanDecomposition, MeanError> {
    let core = diagonal_core(op, interval, 4)?;
    let extraction = extract_generator_refined(&core, interval, q, refine, kind, exec)?;
    Ok(PreMeanDecomposition { op: op.clone(), core, extraction })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operations::builtin;
    use serde_json::json;

    fn op(name: &str, params: serde_json::Value) -> VariadicOp {
        builtin(name, params.as_object().unwrap()).unwrap()
    }

    fn closed(lo: f64, hi: f64) -> Interval {
        Interval::closed(lo, hi).unwrap()
    }

    #[test]
    fn qam_examples() {
        let id = Generator::named("identity").unwrap();
        assert_eq!(QuasiArithmeticPreMean::mean(id).evaluate(&[1.0, 3.0]).unwrap(), 2.0);
        let ln = Generator::named("ln").unwrap();
        let product = QuasiArithmeticPreMean::pre_mean("product", ln.clone(), |n, t| Ok((n as f64 * t).exp()));
        assert!((product.evaluate(&[2.0, 3.0]).unwrap() - 6.0).abs() < 1e-12);
        let geo = QuasiArithmeticPreMean::mean(ln);
        assert!((geo.evaluate(&[1.0, 4.0]).unwrap() - 2.0).abs() < 1e-12);
        assert!(matches!(geo.evaluate(&[-1.0]), Err(MeanError::OutOfInterval(..))));
    }

    #[test]
    fn named_generators_round_trip() {
        for name in Generator::catalog_names() {
            let g = Generator::named(name).unwrap();
            let (lo, hi) = probe_bounds(g.domain());
            let (lo, hi) = (lo.max(-5.0), hi.min(5.0));
            for k in 0..64 {
                let x = lo + (hi - lo) * k as f64 / 63.0;
                let back = g.inverse(g.forward(x)).unwrap();
                assert!((back - x).abs() <= 1e-10 * x.abs().max(1.0), "{name} at {x}: {back}");
            }
        }
    }

    #[test]
    fn numeric_inverse_matches_analytic() {
        let g = Generator::new("ln", Interval::positive(), f64::ln).unwrap();
        assert!(!g.has_analytic_inverse());
        for &x in &[0.01f64, 0.5, 1.0, 7.0, 90.0, 1e4] {
            let back = g.inverse(x.ln()).unwrap();
            assert!((back - x).abs() <= 1e-12 * x.max(1.0), "{x}: {back}");
        }
    }

    #[test]
    fn non_monotone_generator_is_rejected() {
        assert!(matches!(
            Generator::new("square", Interval::closed(-1.0, 1.0).unwrap(), |x| x * x),
            Err(MeanError::NotMonotone { .. })
        ));
    }

    #[test]
    fn affine_equivalence_examples() {
        let ln = Generator::named("ln").unwrap();
        let shifted = ln.affine(2.0, 3.0).unwrap();
        let fit = affine_equivalent(&ln, &shifted, &closed(1.0, 2.0), 1e-9).unwrap();
        assert!(fit.holds);
        assert!((fit.r - 2.0).abs() < 1e-9 && (fit.s - 3.0).abs() < 1e-9);
        let id = Generator::named("identity").unwrap();
        let fit = affine_equivalent(&ln, &id, &closed(1.0, 2.0), 1e-3).unwrap();
        assert!(!fit.holds);
        let fit = affine_equivalent(&ln, &ln, &closed(1.0, 2.0), 1e-12).unwrap();
        assert!(fit.holds && (fit.r - 1.0).abs() < 1e-12 && fit.s.abs() < 1e-12);
        assert_eq!(ln.affine(0.0, 1.0).unwrap_err(), MeanError::ZeroScale);
    }

    #[test]
    fn psi_examples() {
        let mean = op("arith-mean", json!({}));
        let t = psi_build(&mean, &Word::reals(&[0.0]), &Word::reals(&[1.0]), 4, 1e-12, Execution::Sequential).unwrap();
        assert_eq!(t.values, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(t.warnings.is_empty());
        let geo = op("geometric-mean", json!({}));
        let t = psi_build(&geo, &Word::reals(&[1.0]), &Word::reals(&[2.0]), 2, 1e-12, Execution::Sequential).unwrap();
        assert!((t.values[1] - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(t.values[0], 1.0);
        assert!((t.values[2] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn psi_mean_check_geometric_small_grid() {
        let geo = op("geometric-mean", json!({}));
        let t = psi_build(&geo, &Word::reals(&[1.0]), &Word::reals(&[2.0]), 2, 1e-12, Execution::Sequential).unwrap();
        let c = psi_mean_check(&geo, &t, 2, 1000, 1e-12, 1).unwrap();
        assert!(c.holds && c.exhaustive);
        // (1), (1, 1), (2, 0) are on-grid; (1, 0) and (2, 1) are not.
        assert_eq!((c.checked, c.off_grid), (3, 2));
    }

    #[test]
    fn pchip_reproduces_quadratics_closely() {
        let q = 64;
        let values: Vec<f64> = (0..=q).map(|p| (1.0 + p as f64 / q as f64).powi(2)).collect();
        let lin = Interpolant::new(values.clone(), Interpolation::Linear).unwrap();
        let cub = Interpolant::new(values, Interpolation::MonotoneCubic).unwrap();
        let mut worst = (0.0f64, 0.0f64);
        for k in 0..=1000 {
            let t = k as f64 / 1000.0;
            let truth = (1.0 + t).powi(2);
            worst.0 = worst.0.max((lin.eval(t) - truth).abs());
            worst.1 = worst.1.max((cub.eval(t) - truth).abs());
            assert!((cub.inverse(cub.eval(t)) - t).abs() < 1e-12);
            assert!((lin.inverse(lin.eval(t)) - t).abs() < 1e-12);
        }
        assert!(worst.1 < worst.0);
    }

    #[test]
    fn extraction_refuses_non_monotone_psi() {
        let first = op("first-projection", json!({"interval": [0.0, 1.0]}));
        let err = extract_generator(&first, &closed(0.0, 1.0), 8, Interpolation::Linear, Execution::Sequential).unwrap_err();
        assert!(matches!(err, MeanError::PsiNotIncreasing { .. }), "{err}");
    }

    #[test]
    fn arithmetic_mean_extracts_identity() {
        let mean = op("arith-mean", json!({"interval": [0.0, 1.0]}));
        let ex = extract_generator(&mean, &closed(0.0, 1.0), 16, Interpolation::Linear, Execution::Sequential).unwrap();
        let fit = affine_equivalent(&ex.generator(), &Generator::named("identity").unwrap(), &closed(0.0, 1.0), 1e-12).unwrap();
        assert!(fit.holds, "{fit:?}");
        assert!((fit.r - 1.0).abs() < 1e-12 && fit.s.abs() < 1e-12);
    }

    #[test]
    fn sum_decomposes_into_mean_and_scaling() {
        let sum = op("sum", json!({"interval": [0.0, 1.0]}));
        let d = pre_mean_decompose(&sum, &closed(0.0, 1.0), 64, Interpolation::Linear, Execution::Sequential).unwrap();
        assert!((d.core.evaluate_reals(&[0.2, 0.6]).unwrap() - 0.4).abs() < 1e-12);
        assert!((d.outer(3, 0.5).unwrap() - 1.5).abs() < 1e-12);
        let stats = d.residuals(4, 200, 3).unwrap();
        assert!(stats.max < 1e-9, "{stats:?}");
    }

    #[test]
    fn diagonal_core_refuses_flat_diagonal() {
        let first = op("first-projection", json!({"interval": [0.0, 1.0]}));
        let constant = crate::operations::truncate_constant(&first, 1, Arc::new(|_| Value::Real(0.5))).unwrap();
        assert!(matches!(diagonal_core(&constant, &closed(0.0, 1.0), 3), Err(MeanError::NotMonotone { .. })));
    }
}
