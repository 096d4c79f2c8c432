//! Closed-form positive sequences and certified infinite sums.
//!
//! Ray weights and measures are [`SequenceRule`]s. For summation every rule is
//! rewritten as an [`Expansion`]: a finite prefix followed by a [`Monomial`]
//! tail `c · ρ^k · Π (k + s_i)^{p_i}`. Monomials are closed under products,
//! reciprocals and real powers, and their tails admit explicit remainder
//! bounds (ratio test when `ρ < 1`, integral comparison when `ρ = 1`), so every
//! sum reported here is either a value with an error bound, a proven
//! divergence, or an explicit refusal.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const RATIO_EPS: f64 = 1e-12;
const MAX_TERMS: usize = 1 << 22;

/// Rule generating a strictly positive sequence indexed from `k = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SequenceRule {
    /// `first · ratio^k`
    Geometric { first: f64, ratio: f64 },
    /// `coeff · (k+1)^exponent`
    Power { coeff: f64, exponent: f64 },
    /// `values[k]` for `k < values.len()`, then `tail(k − values.len())`.
    Table { values: Vec<f64>, tail: Box<SequenceRule> },
}

impl SequenceRule {
    pub fn geometric(first: f64, ratio: f64) -> Self {
        SequenceRule::Geometric { first, ratio }
    }

    pub fn constant(value: f64) -> Self {
        SequenceRule::Geometric {
            first: value,
            ratio: 1.0,
        }
    }

    pub fn power(coeff: f64, exponent: f64) -> Self {
        SequenceRule::Power { coeff, exponent }
    }

    pub fn table(values: Vec<f64>, tail: SequenceRule) -> Self {
        SequenceRule::Table {
            values,
            tail: Box::new(tail),
        }
    }

    pub fn value(&self, k: usize) -> f64 {
        match self {
            SequenceRule::Geometric { first, ratio } => first * ratio.powi(k as i32),
            SequenceRule::Power { coeff, exponent } => coeff * ((k + 1) as f64).powf(*exponent),
            SequenceRule::Table { values, tail } => match values.get(k) {
                Some(&v) => v,
                None => tail.value(k - values.len()),
            },
        }
    }

    /// Parameters must generate strictly positive finite values.
    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        match self {
            SequenceRule::Geometric { first, ratio } if ok(*first) && ok(*ratio) => Ok(()),
            SequenceRule::Power { coeff, exponent } if ok(*coeff) && exponent.is_finite() => Ok(()),
            SequenceRule::Table { values, tail } if values.iter().all(|&v| ok(v)) => tail.validate(),
            other => Err(Error::InvalidArgument(format!(
                "sequence rule must generate positive finite values: {other:?}"
            ))),
        }
    }

    pub fn expansion(&self) -> Expansion {
        match self {
            SequenceRule::Geometric { first, ratio } => Expansion {
                prefix: Vec::new(),
                tail: Monomial::new(first.ln(), *ratio, Vec::new()),
            },
            SequenceRule::Power { coeff, exponent } => {
                let factors = if *exponent == 0.0 {
                    Vec::new()
                } else {
                    vec![(1.0, *exponent)]
                };
                Expansion {
                    prefix: Vec::new(),
                    tail: Monomial::new(coeff.ln(), 1.0, factors),
                }
            }
            SequenceRule::Table { values, tail } => {
                let inner = tail.expansion();
                let mut prefix = values.clone();
                prefix.extend(inner.prefix);
                Expansion {
                    prefix,
                    tail: inner.tail.shift(-(values.len() as f64)),
                }
            }
        }
    }

    /// `Σ_{k ≥ start} value(k)`.
    pub fn sum_from(&self, start: usize) -> SeriesSum {
        self.expansion().sum_from(start)
    }

    /// `Σ_{k ≥ start} 1 / value(k)`.
    pub fn reciprocal_sum_from(&self, start: usize) -> SeriesSum {
        self.expansion().recip().sum_from(start)
    }

    /// `Σ_{k=start}^{end-1} value(k)`, in closed form for geometric pieces.
    pub fn partial_sum(&self, start: usize, end: usize) -> f64 {
        if end <= start {
            return 0.0;
        }
        match self {
            SequenceRule::Geometric { first, ratio } if *ratio == 1.0 => first * (end - start) as f64,
            SequenceRule::Geometric { first, ratio } => {
                let ln = ratio.ln();
                first * (start as f64 * ln).exp() * ((end - start) as f64 * ln).exp_m1() / ln.exp_m1()
            }
            SequenceRule::Power { .. } => (start..end).map(|k| self.value(k)).sum(),
            SequenceRule::Table { values, tail } => {
                let l = values.len();
                let head: f64 = values.iter().take(end.min(l)).skip(start).sum();
                head + tail.partial_sum(start.max(l) - l, end.max(l) - l)
            }
        }
    }
}

/// Outcome of an infinite summation.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum SeriesSum {
    /// The true sum lies in `[value − error, value + error]`.
    Finite { value: f64, error: f64 },
    Divergent,
    NotComputable { reason: String },
}

impl SeriesSum {
    pub fn not_computable(reason: impl Into<String>) -> Self {
        SeriesSum::NotComputable {
            reason: reason.into(),
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, SeriesSum::Finite { .. })
    }

    pub fn is_divergent(&self) -> bool {
        matches!(self, SeriesSum::Divergent)
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            SeriesSum::Finite { value, .. } => Some(*value),
            _ => None,
        }
    }

    pub fn upper(&self) -> Option<f64> {
        match self {
            SeriesSum::Finite { value, error } => Some(value + error),
            _ => None,
        }
    }

    pub fn lower(&self) -> Option<f64> {
        match self {
            SeriesSum::Finite { value, error } => Some((value - error).max(0.0)),
            _ => None,
        }
    }

    /// Finite value, or [`Error::DivergentTail`] otherwise.
    pub fn require_finite(&self, what: &str) -> Result<f64> {
        match self {
            SeriesSum::Finite { value, .. } => Ok(*value),
            SeriesSum::Divergent => Err(Error::DivergentTail(what.to_string())),
            SeriesSum::NotComputable { reason } => {
                Err(Error::DivergentTail(format!("{what}: not computable ({reason})")))
            }
        }
    }

    fn shifted(self, offset: f64) -> Self {
        match self {
            SeriesSum::Finite { value, error } => SeriesSum::Finite {
                value: value + offset,
                error: error + 1e-16 * offset.abs(),
            },
            other => other,
        }
    }
}

/// `exp(log_coeff) · ratio^k · Π (k + shift)^power`, for `k` in a domain where every `k + shift ≥ 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Monomial {
    pub log_coeff: f64,
    pub ratio: f64,
    pub factors: Vec<(f64, f64)>,
}

impl Monomial {
    pub fn new(log_coeff: f64, ratio: f64, factors: Vec<(f64, f64)>) -> Self {
        let ratio = if (ratio - 1.0).abs() <= RATIO_EPS { 1.0 } else { ratio };
        Monomial {
            log_coeff,
            ratio,
            factors,
        }
    }

    pub fn value(&self, k: usize) -> f64 {
        self.value_at(k as f64)
    }

    fn value_at(&self, k: f64) -> f64 {
        let mut ln = self.log_coeff;
        if self.ratio != 1.0 {
            ln += k * self.ratio.ln();
        }
        for &(s, p) in &self.factors {
            ln += p * (k + s).ln();
        }
        ln.exp()
    }

    pub fn total_power(&self) -> f64 {
        self.factors.iter().map(|f| f.1).sum()
    }

    fn is_unit_ratio(&self) -> bool {
        self.ratio == 1.0
    }

    pub fn is_summable(&self) -> bool {
        self.ratio < 1.0 || (self.is_unit_ratio() && self.total_power() < -1.0 - RATIO_EPS)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().copied());
        Monomial::new(self.log_coeff + other.log_coeff, self.ratio * other.ratio, factors)
    }

    pub fn powf(&self, e: f64) -> Monomial {
        Monomial::new(
            self.log_coeff * e,
            self.ratio.powf(e),
            self.factors.iter().map(|&(s, p)| (s, p * e)).collect(),
        )
    }

    pub fn recip(&self) -> Monomial {
        self.powf(-1.0)
    }

    pub fn scale(&self, c: f64) -> Monomial {
        Monomial::new(self.log_coeff + c.ln(), self.ratio, self.factors.clone())
    }

    /// `k ↦ self(k + d)`.
    pub fn shift(&self, d: f64) -> Monomial {
        let log_coeff = if self.ratio == 1.0 {
            self.log_coeff
        } else {
            self.log_coeff + d * self.ratio.ln()
        };
        Monomial::new(
            log_coeff,
            self.ratio,
            self.factors.iter().map(|&(s, p)| (s + d, p)).collect(),
        )
    }

    /// `sup_{k ≥ n} self(k+1) / self(k)`.
    pub fn successor_ratio_sup(&self, n: usize) -> f64 {
        let n = n as f64;
        self.factors
            .iter()
            .filter(|f| f.1 > 0.0)
            .fold(self.ratio, |acc, &(s, p)| acc * ((n + 1.0 + s) / (n + s)).powf(p))
    }

    /// `inf_{k ≥ n} self(k+1) / self(k)`.
    pub fn successor_ratio_inf(&self, n: usize) -> f64 {
        let n = n as f64;
        self.factors
            .iter()
            .filter(|f| f.1 < 0.0)
            .fold(self.ratio, |acc, &(s, p)| acc * ((n + 1.0 + s) / (n + s)).powf(p))
    }

    /// `sup_{k ≥ n} self(k)`, or `None` when the monomial is unbounded.
    pub fn sup_from(&self, n: usize) -> Option<f64> {
        if self.ratio > 1.0 || (self.is_unit_ratio() && self.total_power() > 0.0) {
            return None;
        }
        let mut best = self.value(n);
        let mut k = n;
        while self.successor_ratio_sup(k) > 1.0 {
            k += 1;
            best = best.max(self.value(k));
            if k - n > MAX_TERMS {
                return None;
            }
        }
        Some(best)
    }

    fn domain_ok(&self, start: usize) -> bool {
        self.factors.iter().all(|&(s, _)| start as f64 + s >= 1.0 - 1e-12)
    }

    /// Certified `Σ_{k ≥ start} self(k)`.
    pub fn sum_from(&self, start: usize) -> SeriesSum {
        if !self.domain_ok(start) {
            return SeriesSum::not_computable("monomial evaluated outside its domain");
        }
        if !self.is_summable() {
            return SeriesSum::Divergent;
        }
        if self.factors.is_empty() {
            let value = self.value(start) / (1.0 - self.ratio);
            return SeriesSum::Finite {
                value,
                error: 4.0 * f64::EPSILON * value,
            };
        }
        if self.ratio < 1.0 {
            self.sum_ratio_test(start)
        } else {
            self.sum_integral_test(start)
        }
    }

    fn sum_ratio_test(&self, start: usize) -> SeriesSum {
        let mut acc = 0.0;
        let mut k = start;
        loop {
            acc += self.value(k);
            k += 1;
            let q = self.successor_ratio_sup(k);
            if q < 1.0 {
                let first = self.value(k);
                let hi = first / (1.0 - q);
                if hi <= 1e-16 * acc || k - start > MAX_TERMS {
                    let lo = first;
                    return SeriesSum::Finite {
                        value: acc + 0.5 * (lo + hi),
                        error: 0.5 * (hi - lo) + 1e-14 * acc,
                    };
                }
            } else if k - start > MAX_TERMS {
                return SeriesSum::not_computable("ratio test did not engage");
            }
        }
    }

    fn sum_integral_test(&self, start: usize) -> SeriesSum {
        let p = self.total_power();
        let c = self.log_coeff.exp();
        let s_lo = self.factors.iter().map(|f| f.0).fold(f64::INFINITY, f64::min);
        let s_hi = self.factors.iter().map(|f| f.0).fold(f64::NEG_INFINITY, f64::max);
        let mut acc = 0.0;
        let mut k = start;
        let mut next_check = start + 64;
        loop {
            acc += self.value(k);
            k += 1;
            if k < next_check && k - start <= MAX_TERMS {
                continue;
            }
            next_check = start + 2 * (next_check - start);
            let n = k as f64;
            if n - 1.0 + s_lo <= 0.0 {
                continue;
            }
            let mut k_hi = 1.0;
            let mut k_lo = 1.0;
            for &(_, q) in self.factors.iter().filter(|f| f.1 > 0.0) {
                k_hi *= ((n + s_hi) / (n + s_lo)).powf(q);
                k_lo *= ((n + s_lo) / (n + s_hi)).powf(q);
            }
            let hi = c * k_hi * (n - 1.0 + s_lo).powf(p + 1.0) / (-p - 1.0);
            let lo = c * k_lo * (n + s_hi).powf(p + 1.0) / (-p - 1.0);
            if hi - lo <= 1e-13 * (acc + lo) || k - start > MAX_TERMS {
                return SeriesSum::Finite {
                    value: acc + 0.5 * (lo + hi),
                    error: 0.5 * (hi - lo) + 1e-14 * acc,
                };
            }
        }
    }

    /// Upper envelope `U` with `Σ_{k=a}^{r} self(k) ≤ U(r)` for all `r ≥ a`,
    /// `U` nondecreasing. Only meaningful for non-summable monomials.
    fn cumulative_envelope(&self, a: usize) -> Option<Monomial> {
        if !self.domain_ok(a) {
            return None;
        }
        let c = self.log_coeff.exp();
        let af = a as f64;
        if self.ratio > 1.0 {
            let neg: f64 = self
                .factors
                .iter()
                .filter(|f| f.1 < 0.0)
                .map(|&(s, p)| (af + s).powf(p))
                .product();
            let coeff = c * self.ratio / (self.ratio - 1.0) * neg;
            let pos = self.factors.iter().copied().filter(|f| f.1 > 0.0).collect();
            return Some(Monomial::new(coeff.ln(), self.ratio, pos));
        }
        if self.ratio < 1.0 {
            return None;
        }
        let p = self.total_power();
        let (s_lo, s_hi) = if self.factors.is_empty() {
            (1.0 - af, 1.0 - af)
        } else {
            (
                self.factors.iter().map(|f| f.0).fold(f64::INFINITY, f64::min),
                self.factors.iter().map(|f| f.0).fold(f64::NEG_INFINITY, f64::max),
            )
        };
        let k_bound: f64 = self
            .factors
            .iter()
            .filter(|f| f.1 > 0.0)
            .map(|&(_, q)| ((af + s_hi) / (af + s_lo)).powf(q))
            .product();
        let base = c * k_bound;
        let (coeff, exponent) = if p >= 0.0 {
            (base, p + 1.0)
        } else if (p + 1.0).abs() <= RATIO_EPS {
            (2.0 * base, 0.5)
        } else if p > -1.0 {
            (base * (1.0 + 1.0 / (p + 1.0)), p + 1.0)
        } else {
            return None;
        };
        Some(Monomial::new(coeff.ln(), 1.0, vec![(s_lo, exponent)]))
    }
}

/// A finite prefix followed by a monomial tail valid for `k ≥ prefix.len()`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Expansion {
    pub prefix: Vec<f64>,
    pub tail: Monomial,
}

impl Expansion {
    pub fn value(&self, k: usize) -> f64 {
        match self.prefix.get(k) {
            Some(&v) => v,
            None => self.tail.value(k),
        }
    }

    fn padded_prefix(&self, len: usize) -> Vec<f64> {
        (0..len).map(|k| self.value(k)).collect()
    }

    pub fn mul(&self, other: &Expansion) -> Expansion {
        let len = self.prefix.len().max(other.prefix.len());
        let a = self.padded_prefix(len);
        let b = other.padded_prefix(len);
        Expansion {
            prefix: a.iter().zip(&b).map(|(x, y)| x * y).collect(),
            tail: self.tail.mul(&other.tail),
        }
    }

    pub fn powf(&self, e: f64) -> Expansion {
        Expansion {
            prefix: self.prefix.iter().map(|v| v.powf(e)).collect(),
            tail: self.tail.powf(e),
        }
    }

    pub fn recip(&self) -> Expansion {
        self.powf(-1.0)
    }

    pub fn scale(&self, c: f64) -> Expansion {
        Expansion {
            prefix: self.prefix.iter().map(|v| v * c).collect(),
            tail: self.tail.scale(c),
        }
    }

    /// `k ↦ self(k + d)`.
    pub fn shift(&self, d: usize) -> Expansion {
        Expansion {
            prefix: self.prefix.iter().skip(d).copied().collect(),
            tail: self.tail.shift(d as f64),
        }
    }

    /// Certified `Σ_{k ≥ start} self(k)`.
    pub fn sum_from(&self, start: usize) -> SeriesSum {
        let len = self.prefix.len();
        let head: f64 = self.prefix.iter().skip(start).sum();
        self.tail.sum_from(start.max(len)).shifted(head)
    }
}

/// `Σ_{r ≥ from} S_r² · next(r)` where `S_r = Σ_{k=1}^{r} inv(k)`, `from ≥ 1`.
///
/// With `inv = 1/b` along a ray and `next(r) = m(r+1)` this is the summability
/// quantity deciding whether a harmonic extension along the ray is square
/// integrable.
pub fn cumulative_square_sum(inv: &Expansion, next: &Expansion, from: usize) -> SeriesSum {
    let from = from.max(1);
    let s_inf = inv.sum_from(1);
    let next_tail = next.sum_from(from);
    match (&s_inf, &next_tail) {
        (SeriesSum::NotComputable { .. }, _) => return s_inf,
        (_, SeriesSum::Divergent) => return SeriesSum::Divergent,
        (_, SeriesSum::NotComputable { .. }) => return next_tail,
        _ => {}
    }
    let mut s: f64 = (1..from).map(|k| inv.value(k)).sum();
    match s_inf {
        SeriesSum::Finite { value, error } => {
            let s_hi = value + error;
            let mut acc = 0.0;
            let mut r = from;
            let mut next_check = from + 64;
            loop {
                s += inv.value(r);
                acc += s * s * next.value(r);
                r += 1;
                if r < next_check && r - from <= MAX_TERMS {
                    continue;
                }
                next_check = from + 2 * (next_check - from);
                if let SeriesSum::Finite { value: tv, error: te } = next.sum_from(r) {
                    let lo = s * s * (tv - te).max(0.0);
                    let hi = s_hi * s_hi * (tv + te);
                    if hi - lo <= 1e-13 * (acc + lo) || r - from > MAX_TERMS {
                        return SeriesSum::Finite {
                            value: acc + 0.5 * (lo + hi),
                            error: 0.5 * (hi - lo) + 1e-14 * acc,
                        };
                    }
                } else {
                    return SeriesSum::not_computable("measure tail lost summability");
                }
            }
        }
        SeriesSum::Divergent => {
            // S_r ≥ inv(r), so divergence of Σ inv(r)² next(r) settles it
            if inv.mul(inv).mul(next).sum_from(from).is_divergent() {
                return SeriesSum::Divergent;
            }
            let a = inv.prefix.len().max(1);
            let Some(env) = inv.tail.cumulative_envelope(a) else {
                return SeriesSum::not_computable("no envelope for partial sums");
            };
            let head: f64 = (1..a).map(|k| inv.value(k)).sum();
            let env = env.scale(1.0 + head / env.value(a));
            let start = from.max(a) + 1024;
            let mut acc = 0.0;
            for r in from..start {
                s += inv.value(r);
                acc += s * s * next.value(r);
            }
            let env_next = Expansion {
                prefix: Vec::new(),
                tail: env.powf(2.0),
            }
            .mul(next);
            match env_next.sum_from(start) {
                SeriesSum::Finite { value, error } => {
                    let hi = value + error;
                    let lo = match next.sum_from(start) {
                        SeriesSum::Finite { value, error } => s * s * (value - error).max(0.0),
                        _ => 0.0,
                    };
                    SeriesSum::Finite {
                        value: acc + 0.5 * (lo + hi),
                        error: 0.5 * (hi - lo) + 1e-14 * acc,
                    }
                }
                _ => SeriesSum::not_computable("envelope bound not summable"),
            }
        }
        SeriesSum::NotComputable { .. } => unreachable!(),
    }
}
