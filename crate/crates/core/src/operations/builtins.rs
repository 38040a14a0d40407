//! The catalog of named operation families.

use std::collections::BTreeSet;
use std::sync::{Arc, OnceLock};

use serde_json::json;

use super::{LetterFn, OpError, VariadicOp};
use crate::domain::{Alphabet, Codomain, Domain, Interval};
use crate::means::Generator;
use crate::value::Value;
use crate::words::Word;

pub type Params = serde_json::Map<String, serde_json::Value>;
pub type FamilyBuilder = Arc<dyn Fn(&Params) -> Result<VariadicOp, OpError> + Send + Sync>;

/// Default table arity for desk-scale exhaustive checks over `size` letters.
pub fn default_table_arity(size: usize) -> usize {
    match size {
        0 | 1 => 6,
        2 => 4,
        3 => 3,
        _ => 2,
    }
}

#[derive(Clone)]
pub struct Family {
    pub name: String,
    pub aliases: Vec<String>,
    pub summary: String,
    pub epsilon_standard: bool,
    pub codomain: String,
    pub build: FamilyBuilder,
}

#[derive(Clone, Default)]
pub struct Catalog {
    families: Vec<Family>,
}

impl Catalog {
    pub fn empty() -> Self {
        Catalog::default()
    }

    pub fn register(&mut self, family: Family) {
        self.families.retain(|f| f.name != family.name);
        self.families.push(family);
    }

    pub fn families(&self) -> impl Iterator<Item = &Family> {
        self.families.iter()
    }

    pub fn get(&self, name: &str) -> Option<&Family> {
        self.families.iter().find(|f| f.name == name || f.aliases.iter().any(|a| a == name))
    }

    pub fn build(&self, name: &str, params: &Params) -> Result<VariadicOp, OpError> {
        let family = self.get(name).ok_or_else(|| OpError::UnknownFamily(name.to_string()))?;
        (family.build)(params)
    }

    pub fn standard() -> Self {
        let mut c = Catalog::empty();
        let mut add = |name: &str, aliases: &[&str], summary: &str, eps: bool, codomain: &str, build: FamilyBuilder| {
            c.register(Family {
                name: name.into(),
                aliases: aliases.iter().map(|s| s.to_string()).collect(),
                summary: summary.into(),
                epsilon_standard: eps,
                codomain: codomain.into(),
                build,
            })
        };
        add("arith-mean", &["arithmetic-mean"], "F_n(x) = (1/n) Σ x_i", true, "domain", Arc::new(arith_mean));
        add(
            "weighted-pow2",
            &["binary-power-weighted-mean"],
            "F_n(x) = Σ 2^(i-1)/(2^n - 1) x_i",
            true,
            "domain",
            Arc::new(weighted_pow2),
        );
        add("geometric-mean", &[], "F_n(x) = (Π x_i)^(1/n)", true, "domain", Arc::new(geometric_mean));
        add("power-mean", &[], "F_n(x) = ((1/n) Σ x_i^p)^(1/p)", true, "domain", Arc::new(power_mean));
        add(
            "quasi-arith-mean",
            &["quasi-arithmetic-mean"],
            "F_n(x) = f⁻¹((1/n) Σ f(x_i)) for a named generator f",
            true,
            "domain",
            Arc::new(quasi_arith_mean),
        );
        add("sum", &[], "F_n(x) = Σ x_i", false, "reals", Arc::new(sum));
        add("product", &[], "F_n(x) = Π x_i", false, "reals", Arc::new(product));
        add("first-projection", &["first"], "F_n(x) = x_1", true, "domain", Arc::new(|p| projection(p, true)));
        add("last-projection", &["last"], "F_n(x) = x_n", true, "domain", Arc::new(|p| projection(p, false)));
        add("min", &[], "smallest letter (declared order)", true, "domain", Arc::new(|p| extremum(p, false)));
        add("max", &[], "largest letter (declared order)", true, "domain", Arc::new(|p| extremum(p, true)));
        add("length", &[], "F(x) = |x|", false, "naturals", Arc::new(length));
        add("identity-lift", &["identity"], "F(x) = x as a value", false, "words", Arc::new(identity_lift));
        add("sum-mod", &[], "F_n(x) = Σ x_i mod m over {0..m-1}", true, "domain", Arc::new(sum_mod));
        add("mean-mod", &[], "F_n(x) = n⁻¹ Σ x_i mod m over {0..m-1}", true, "domain", Arc::new(mean_mod));
        add(
            "random-table",
            &["random"],
            "seeded uniformly random tables",
            true,
            "domain",
            Arc::new(random_table),
        );
        c
    }
}

fn standard_catalog() -> &'static Catalog {
    static CATALOG: OnceLock<Catalog> = OnceLock::new();
    CATALOG.get_or_init(Catalog::standard)
}

/// Builds a named family from the standard catalog.
pub fn builtin(name: &str, params: &Params) -> Result<VariadicOp, OpError> {
    standard_catalog().build(name, params)
}

struct ParamReader<'a> {
    family: &'a str,
    params: &'a Params,
    used: BTreeSet<&'static str>,
}

impl<'a> ParamReader<'a> {
    fn new(family: &'a str, params: &'a Params) -> Self {
        ParamReader { family, params, used: BTreeSet::new() }
    }

    fn invalid(&self, reason: impl Into<String>) -> OpError {
        OpError::InvalidParams { family: self.family.to_string(), reason: reason.into() }
    }

    fn get(&mut self, key: &'static str) -> Option<&'a serde_json::Value> {
        self.used.insert(key);
        self.params.get(key).filter(|v| !v.is_null())
    }

    fn f64(&mut self, key: &'static str, default: f64) -> Result<f64, OpError> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.as_f64().ok_or_else(|| self.invalid(format!("`{key}` must be a number"))),
        }
    }

    fn usize(&mut self, key: &'static str) -> Result<Option<usize>, OpError> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .as_u64()
                .map(|x| Some(x as usize))
                .ok_or_else(|| self.invalid(format!("`{key}` must be a nonnegative integer"))),
        }
    }

    fn string(&mut self, key: &'static str) -> Result<Option<String>, OpError> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .as_str()
                .map(|s| Some(s.to_string()))
                .ok_or_else(|| self.invalid(format!("`{key}` must be a string"))),
        }
    }

    fn interval(&mut self, default: Interval) -> Result<Interval, OpError> {
        match self.get("interval") {
            None => Ok(default),
            Some(v) => parse_interval(v).map_err(|e| self.invalid(e)),
        }
    }

    fn alphabet(&mut self) -> Result<Option<Alphabet>, OpError> {
        match self.get("alphabet") {
            None => Ok(None),
            Some(serde_json::Value::Array(items)) => {
                let letters = items.iter().map(Value::from_json).collect::<Result<Vec<_>, _>>().map_err(|e| self.invalid(e))?;
                Ok(Some(Alphabet::new(letters)?))
            }
            Some(_) => Err(self.invalid("`alphabet` must be an array")),
        }
    }

    /// Letter domain: an explicit alphabet, else an interval (default `fallback`).
    fn domain(&mut self, fallback: Interval) -> Result<Domain, OpError> {
        if let Some(a) = self.alphabet()? {
            if self.params.get("interval").is_some_and(|v| !v.is_null()) {
                return Err(self.invalid("give either `alphabet` or `interval`, not both"));
            }
            return Ok(Domain::Finite(a));
        }
        Ok(Domain::Real(self.interval(fallback)?))
    }

    fn finish(&self) -> Result<(), OpError> {
        if let Some(k) = self.params.keys().find(|k| !self.used.contains(k.as_str())) {
            return Err(self.invalid(format!("unknown parameter `{k}`")));
        }
        Ok(())
    }

    fn echo(&self) -> serde_json::Value {
        serde_json::Value::Object(self.params.clone())
    }
}

/// `[lo, hi]` (closed, `null` for an infinite end) or
/// `{"lo":…, "hi":…, "lo_closed":…, "hi_closed":…}`.
pub(crate) fn parse_interval(v: &serde_json::Value) -> Result<Interval, String> {
    let end = |x: &serde_json::Value, inf: f64| -> Result<f64, String> {
        if x.is_null() {
            Ok(inf)
        } else {
            x.as_f64().ok_or_else(|| "interval ends must be numbers or null".to_string())
        }
    };
    match v {
        serde_json::Value::Array(a) if a.len() == 2 => {
            let lo = end(&a[0], f64::NEG_INFINITY)?;
            let hi = end(&a[1], f64::INFINITY)?;
            Interval::new(lo, hi, true, true).map_err(|e| e.to_string())
        }
        serde_json::Value::Object(o) => {
            let lo = end(o.get("lo").unwrap_or(&serde_json::Value::Null), f64::NEG_INFINITY)?;
            let hi = end(o.get("hi").unwrap_or(&serde_json::Value::Null), f64::INFINITY)?;
            let flag = |k: &str| o.get(k).and_then(|b| b.as_bool()).unwrap_or(true);
            if let Some(k) = o.keys().find(|k| !["lo", "hi", "lo_closed", "hi_closed"].contains(&k.as_str())) {
                return Err(format!("unknown interval field `{k}`"));
            }
            Interval::new(lo, hi, flag("lo_closed"), flag("hi_closed")).map_err(|e| e.to_string())
        }
        _ => Err("interval must be [lo, hi] or an object".to_string()),
    }
}

fn reals(letters: &[Value]) -> Vec<f64> {
    letters.iter().map(|l| l.as_real().expect("domain-checked real letter")).collect()
}

fn real_family(
    name: &str,
    p: &Params,
    default: Interval,
    codomain: Codomain,
    epsilon: Option<Value>,
    f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
) -> Result<VariadicOp, OpError> {
    let mut r = ParamReader::new(name, p);
    let interval = r.interval(default)?;
    let max_arity = r.usize("max_arity")?;
    r.finish()?;
    let eval: LetterFn = Arc::new(move |letters| Ok(Value::Real(f(&reals(letters)))));
    Ok(VariadicOp::parametric(name, name, r.echo(), Domain::Real(interval), codomain, max_arity, epsilon, eval))
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn arith_mean(p: &Params) -> Result<VariadicOp, OpError> {
    real_family("arith-mean", p, Interval::reals(), Codomain::DomainWithEpsilon, Some(Value::Eps), mean)
}

/// Weights `2^(i-1) / (2^n - 1)`, computed as `2^(i-1-n) / (1 - 2^-n)` so
/// long words do not overflow.
pub(crate) fn pow2_weighted(xs: &[f64]) -> f64 {
    let n = xs.len() as i32;
    let norm = 1.0 - 2f64.powi(-n);
    xs.iter().enumerate().map(|(i, x)| 2f64.powi(i as i32 - n) * x).sum::<f64>() / norm
}

fn weighted_pow2(p: &Params) -> Result<VariadicOp, OpError> {
    real_family("weighted-pow2", p, Interval::reals(), Codomain::DomainWithEpsilon, Some(Value::Eps), pow2_weighted)
}

fn geometric_mean(p: &Params) -> Result<VariadicOp, OpError> {
    real_family("geometric-mean", p, Interval::positive(), Codomain::DomainWithEpsilon, Some(Value::Eps), |xs| {
        (xs.iter().map(|x| x.ln()).sum::<f64>() / xs.len() as f64).exp()
    })
}

fn power_mean(p: &Params) -> Result<VariadicOp, OpError> {
    let mut r = ParamReader::new("power-mean", p);
    let exponent = r.f64("exponent", 1.0)?;
    let interval = r.interval(Interval::positive())?;
    let max_arity = r.usize("max_arity")?;
    r.finish()?;
    let eval: LetterFn = Arc::new(move |letters| {
        let xs = reals(letters);
        let n = xs.len() as f64;
        let v = if exponent == 0.0 {
            (xs.iter().map(|x| x.ln()).sum::<f64>() / n).exp()
        } else {
            (xs.iter().map(|x| x.powf(exponent)).sum::<f64>() / n).powf(1.0 / exponent)
        };
        Ok(Value::Real(v))
    });
    Ok(VariadicOp::parametric(
        "power-mean",
        "power-mean",
        r.echo(),
        Domain::Real(interval),
        Codomain::DomainWithEpsilon,
        max_arity,
        Some(Value::Eps),
        eval,
    ))
}

fn quasi_arith_mean(p: &Params) -> Result<VariadicOp, OpError> {
    let mut r = ParamReader::new("quasi-arith-mean", p);
    let gname = r.string("generator")?.ok_or_else(|| r.invalid("missing `generator`"))?;
    let scale = r.f64("r", 1.0)?;
    let shift = r.f64("s", 0.0)?;
    let requested = r.get("interval").cloned();
    let max_arity = r.usize("max_arity")?;
    r.finish()?;
    let base = Generator::named(&gname).ok_or_else(|| r.invalid(format!("unknown generator `{gname}`")))?;
    let interval = match requested {
        Some(v) => parse_interval(&v).map_err(|e| r.invalid(e))?,
        None => *base.domain(),
    };
    if !base.domain().includes(&interval) {
        return Err(r.invalid(format!("generator `{gname}` is not defined on {interval}")));
    }
    let g = if scale != 1.0 || shift != 0.0 {
        base.affine(scale, shift).map_err(|e| r.invalid(e.to_string()))?
    } else {
        base
    };
    let eval: LetterFn = Arc::new(move |letters| {
        let xs = reals(letters);
        let m = xs.iter().map(|&x| g.forward(x)).sum::<f64>() / xs.len() as f64;
        g.inverse(m).map(Value::Real).map_err(|e| OpError::Eval(e.to_string()))
    });
    Ok(VariadicOp::parametric(
        "quasi-arith-mean",
        "quasi-arith-mean",
        r.echo(),
        Domain::Real(interval),
        Codomain::DomainWithEpsilon,
        max_arity,
        Some(Value::Eps),
        eval,
    ))
}

fn sum(p: &Params) -> Result<VariadicOp, OpError> {
    real_family("sum", p, Interval::reals(), Codomain::External("reals".into()), None, |xs| xs.iter().sum())
}

fn product(p: &Params) -> Result<VariadicOp, OpError> {
    real_family("product", p, Interval::positive(), Codomain::External("reals".into()), None, |xs| {
        xs.iter().product()
    })
}

fn projection(p: &Params, first: bool) -> Result<VariadicOp, OpError> {
    let name = if first { "first-projection" } else { "last-projection" };
    let mut r = ParamReader::new(name, p);
    let domain = r.domain(Interval::reals())?;
    let max_arity = r.usize("max_arity")?;
    r.finish()?;
    let eval: LetterFn = Arc::new(move |letters| {
        Ok(if first { letters[0].clone() } else { letters[letters.len() - 1].clone() })
    });
    Ok(VariadicOp::parametric(name, name, r.echo(), domain, Codomain::DomainWithEpsilon, max_arity, Some(Value::Eps), eval))
}

fn extremum(p: &Params, largest: bool) -> Result<VariadicOp, OpError> {
    let name = if largest { "max" } else { "min" };
    let mut r = ParamReader::new(name, p);
    let domain = r.domain(Interval::reals())?;
    let max_arity = r.usize("max_arity")?;
    r.finish()?;
    let order = domain.alphabet().cloned();
    let eval: LetterFn = Arc::new(move |letters| {
        let key = |l: &Value| -> f64 {
            match &order {
                Some(a) => a.index_of(l).expect("domain-checked letter") as f64,
                None => l.as_real().expect("domain-checked real letter"),
            }
        };
        let pick = letters.iter().fold(&letters[0], |best, l| {
            let better = if largest { key(l) > key(best) } else { key(l) < key(best) };
            if better {
                l
            } else {
                best
            }
        });
        Ok(pick.clone())
    });
    Ok(VariadicOp::parametric(name, name, r.echo(), domain, Codomain::DomainWithEpsilon, max_arity, Some(Value::Eps), eval))
}

fn length(p: &Params) -> Result<VariadicOp, OpError> {
    let mut r = ParamReader::new("length", p);
    let domain = if p.contains_key("alphabet") || p.contains_key("interval") {
        r.domain(Interval::reals())?
    } else {
        Domain::Finite(Alphabet::syms("ab"))
    };
    let max_arity = r.usize("max_arity")?;
    r.finish()?;
    let eval: LetterFn = Arc::new(|letters| Ok(Value::Int(letters.len() as i64)));
    Ok(VariadicOp::parametric(
        "length",
        "length",
        r.echo(),
        domain,
        Codomain::External("naturals".into()),
        max_arity,
        Some(Value::Int(0)),
        eval,
    ))
}

fn identity_lift(p: &Params) -> Result<VariadicOp, OpError> {
    let mut r = ParamReader::new("identity-lift", p);
    let alphabet = r.alphabet()?.unwrap_or_else(|| Alphabet::syms("ab"));
    let max_arity = r.usize("max_arity")?;
    r.finish()?;
    let eval: LetterFn = Arc::new(|letters| Ok(Value::Word(Word::from_letters(letters.to_vec()))));
    Ok(VariadicOp::parametric(
        "identity-lift",
        "identity-lift",
        r.echo(),
        Domain::Finite(alphabet),
        Codomain::External("words".into()),
        max_arity,
        Some(Value::Word(Word::empty())),
        eval,
    ))
}

fn modulus(r: &mut ParamReader<'_>) -> Result<i64, OpError> {
    let m = r.usize("modulus")?.unwrap_or(5);
    if m < 2 {
        return Err(r.invalid("`modulus` must be at least 2"));
    }
    Ok(m as i64)
}

fn int_letters(letters: &[Value]) -> impl Iterator<Item = i64> + '_ {
    letters.iter().map(|l| l.as_int().expect("domain-checked integer letter"))
}

fn sum_mod(p: &Params) -> Result<VariadicOp, OpError> {
    let mut r = ParamReader::new("sum-mod", p);
    let m = modulus(&mut r)?;
    let max_arity = r.usize("max_arity")?;
    r.finish()?;
    let eval: LetterFn = Arc::new(move |letters| Ok(Value::Int(int_letters(letters).sum::<i64>().rem_euclid(m))));
    Ok(VariadicOp::parametric(
        "sum-mod",
        "sum-mod",
        r.echo(),
        Domain::Finite(Alphabet::integers(m as usize)),
        Codomain::DomainWithEpsilon,
        max_arity,
        Some(Value::Eps),
        eval,
    ))
}

fn mod_inverse(a: i64, m: i64) -> Option<i64> {
    (1..m).find(|x| (a * x).rem_euclid(m) == 1)
}

fn mean_mod(p: &Params) -> Result<VariadicOp, OpError> {
    let mut r = ParamReader::new("mean-mod", p);
    let m = modulus(&mut r)?;
    // Arities must be invertible mod m: stop below the smallest prime factor.
    let smallest_factor = (2..=m).find(|d| m % d == 0).expect("m >= 2");
    let cap = (smallest_factor - 1) as usize;
    let max_arity = r.usize("max_arity")?.unwrap_or(cap);
    if max_arity > cap {
        return Err(r.invalid(format!("arity {} is not invertible mod {m}", cap + 1)));
    }
    r.finish()?;
    let eval: LetterFn = Arc::new(move |letters| {
        let inv = mod_inverse(letters.len() as i64 % m, m)
            .ok_or_else(|| OpError::Eval(format!("arity {} is not invertible mod {m}", letters.len())))?;
        Ok(Value::Int((inv * int_letters(letters).sum::<i64>()).rem_euclid(m)))
    });
    Ok(VariadicOp::parametric(
        "mean-mod",
        "mean-mod",
        r.echo(),
        Domain::Finite(Alphabet::integers(m as usize)),
        Codomain::DomainWithEpsilon,
        Some(max_arity),
        Some(Value::Eps),
        eval,
    ))
}

fn random_table(p: &Params) -> Result<VariadicOp, OpError> {
    let mut r = ParamReader::new("random-table", p);
    let seed = r.usize("seed")?.unwrap_or(42) as u64;
    let size = r.usize("alphabet_size")?.unwrap_or(2);
    if !(1..=8).contains(&size) {
        return Err(r.invalid("`alphabet_size` must be between 1 and 8"));
    }
    let max_arity = r.usize("max_arity")?.unwrap_or_else(|| default_table_arity(size));
    r.finish()?;
    let alphabet = crate::corpus::letters(size);
    Ok(crate::corpus::uniform_table(&alphabet, max_arity, seed).with_name(format!("random-table(seed={seed})")))
}

/// Canonical parameter echo for a built operation (used by spec export).
pub(crate) fn builtin_spec(op: &VariadicOp) -> Option<serde_json::Value> {
    let (family, params) = op.family()?;
    standard_catalog().get(family)?;
    Some(json!({"kind": "builtin", "name": family, "params": params}))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn build(name: &str, params: serde_json::Value) -> Result<VariadicOp, OpError> {
        builtin(name, params.as_object().unwrap())
    }

    #[test]
    fn unknown_family_and_params() {
        assert_eq!(build("nope", json!({})).unwrap_err(), OpError::UnknownFamily("nope".into()));
        assert!(matches!(build("arith-mean", json!({"bogus": 1})), Err(OpError::InvalidParams { .. })));
        assert!(matches!(build("arith-mean", json!({"interval": [2, 1]})), Err(OpError::InvalidParams { .. })));
    }

    #[test]
    fn aliases_resolve() {
        assert_eq!(build("arithmetic-mean", json!({})).unwrap().name(), "arith-mean");
        assert_eq!(build("binary-power-weighted-mean", json!({})).unwrap().name(), "weighted-pow2");
    }

    #[test]
    fn epsilon_standard_flags_follow_family() {
        let c = Catalog::standard();
        for f in c.families() {
            let mut params = Params::new();
            if f.name == "quasi-arith-mean" {
                params.insert("generator".into(), json!("ln"));
            }
            let op = (f.build)(&params).unwrap();
            assert_eq!(op.is_epsilon_standard(), f.epsilon_standard, "{}", f.name);
        }
    }

    #[test]
    fn registration_extends_catalog() {
        let mut c = Catalog::standard();
        c.register(Family {
            name: "const-zero".into(),
            aliases: vec![],
            summary: "F_n ≡ 0".into(),
            epsilon_standard: true,
            codomain: "domain".into(),
            build: Arc::new(|p| real_family("const-zero", p, Interval::reals(), Codomain::DomainWithEpsilon, Some(Value::Eps), |_| 0.0)),
        });
        let op = c.build("const-zero", &Params::new()).unwrap();
        assert_eq!(op.evaluate_reals(&[3.0, 4.0]).unwrap(), 0.0);
    }

    #[test]
    fn geometric_and_product_values() {
        let g = build("geometric-mean", json!({})).unwrap();
        assert!((g.evaluate_reals(&[1.0, 4.0]).unwrap() - 2.0).abs() < 1e-15);
        let p = build("product", json!({})).unwrap();
        assert_eq!(p.evaluate_reals(&[2.0, 3.0]).unwrap(), 6.0);
        let pm = build("power-mean", json!({"exponent": 2.0})).unwrap();
        assert!((pm.evaluate_reals(&[1.0, 7.0]).unwrap() - 5.0).abs() < 1e-14);
    }

    #[test]
    fn quasi_arith_mean_with_affine_generator() {
        let plain = build("quasi-arith-mean", json!({"generator": "ln", "interval": [1.0, 4.0]})).unwrap();
        let shifted = build("quasi-arith-mean", json!({"generator": "ln", "r": 2.0, "s": 3.0, "interval": [1.0, 4.0]})).unwrap();
        let a = plain.evaluate_reals(&[1.0, 4.0]).unwrap();
        let b = shifted.evaluate_reals(&[1.0, 4.0]).unwrap();
        assert!((a - 2.0).abs() < 1e-12 && (a - b).abs() < 1e-12);
        assert!(build("quasi-arith-mean", json!({"generator": "ln", "interval": [-1.0, 1.0]})).is_err());
    }

    #[test]
    fn modular_families() {
        let s = build("sum-mod", json!({"modulus": 5})).unwrap();
        assert_eq!(s.evaluate(&Word::from_letters(vec![Value::Int(3), Value::Int(4)])).unwrap(), Value::Int(2));
        let m = build("mean-mod", json!({"modulus": 5})).unwrap();
        assert_eq!(m.max_arity(), Some(4));
        // 2⁻¹ ≡ 3 (mod 5): mean of (1, 2) is 3·3 = 9 ≡ 4.
        assert_eq!(m.evaluate(&Word::from_letters(vec![Value::Int(1), Value::Int(2)])).unwrap(), Value::Int(4));
        assert!(build("mean-mod", json!({"modulus": 6, "max_arity": 2})).is_err());
    }

    #[test]
    fn pow2_weights_are_stable_for_long_words() {
        let v = pow2_weighted(&vec![1.0; 2000]);
        assert!((v - 1.0).abs() < 1e-12);
    }
}
