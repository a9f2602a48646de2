//! Arithmetic in the finite local rings `Z/p^r` and `F_p[t]/t^r`.
//!
//! Elements are carried around as `u32` codes in `[0, p^r)`. For `Z/p^r` the
//! code is the least non-negative residue; for `F_p[t]/t^r` it is the
//! coefficient vector read as base-`p` digits, `a_0 + a_1 p + ... `. With this
//! encoding several operations coincide for both flavors:
//!
//! * the residue modulo the maximal ideal is `code % p`,
//! * the valuation is the number of trailing zero base-`p` digits,
//! * reduction modulo `m^k` is `code % p^k`, and division of an element of
//!   valuation `>= k` by `pi^k` is `code / p^k`,
//! * the uniformizer `pi^k` has code `p^k`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest ring size we agree to build.
pub const MAX_RING_SIZE: u64 = 1 << 24;
const TABLE_LIMIT: u32 = 1024;
const UNARY_TABLE_LIMIT: u32 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("exponent r must be at least 1")]
    ZeroExponent,
    #[error("ring of size {p}^{r} exceeds the supported size")]
    TooLarge { p: u32, r: u32 },
    #[error("elements belong to different rings ({0} vs {1})")]
    SpecMismatch(RingSpec, RingSpec),
    #[error("{0} is not a unit")]
    NotAUnit(String),
    #[error("representative {value} is out of range for {spec}")]
    OutOfRange { spec: RingSpec, value: u32 },
    #[error("malformed element: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Flavor {
    /// `Z/p^r`
    #[serde(rename = "zmod")]
    IntegerMod,
    /// `F_p[t]/t^r`
    #[serde(rename = "tpoly")]
    TruncatedPoly,
}

impl Flavor {
    pub fn label(self) -> &'static str {
        match self {
            Flavor::IntegerMod => "zmod",
            Flavor::TruncatedPoly => "tpoly",
        }
    }
}

impl std::str::FromStr for Flavor {
    type Err = RingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "zmod" => Ok(Flavor::IntegerMod),
            "tpoly" => Ok(Flavor::TruncatedPoly),
            other => Err(RingError::Malformed(format!(
                "unknown ring flavor {other:?}"
            ))),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RawSpec {
    flavor: Flavor,
    p: u32,
    r: u32,
}

/// Which finite local ring we work over. Serialized as
/// `{"flavor":"zmod"|"tpoly","p":int,"r":int}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct RingSpec {
    flavor: Flavor,
    p: u32,
    r: u32,
}

impl TryFrom<RawSpec> for RingSpec {
    type Error = RingError;

    fn try_from(raw: RawSpec) -> Result<Self, Self::Error> {
        RingSpec::new(raw.flavor, raw.p, raw.r)
    }
}

impl From<RingSpec> for RawSpec {
    fn from(s: RingSpec) -> Self {
        RawSpec {
            flavor: s.flavor,
            p: s.p,
            r: s.r,
        }
    }
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let n = n as u64;
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl RingSpec {
    pub fn new(flavor: Flavor, p: u32, r: u32) -> Result<Self, RingError> {
        if !is_prime(p) {
            return Err(RingError::NotPrime(p));
        }
        if r == 0 {
            return Err(RingError::ZeroExponent);
        }
        let size = (p as u64).checked_pow(r).filter(|&s| s <= MAX_RING_SIZE);
        if size.is_none() {
            return Err(RingError::TooLarge { p, r });
        }
        Ok(RingSpec { flavor, p, r })
    }

    pub fn zmod(p: u32, r: u32) -> Result<Self, RingError> {
        Self::new(Flavor::IntegerMod, p, r)
    }

    pub fn tpoly(p: u32, r: u32) -> Result<Self, RingError> {
        Self::new(Flavor::TruncatedPoly, p, r)
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// Residue field order; always `p` for the two shipped flavors.
    pub fn q(&self) -> u32 {
        self.p
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn size(&self) -> u32 {
        self.p.pow(self.r)
    }

    /// Short machine label, e.g. `zmod:2:2`.
    pub fn label(&self) -> String {
        format!("{}:{}:{}", self.flavor.label(), self.p, self.r)
    }

    /// Parses the `flavor:p:r` label produced by [`RingSpec::label`].
    pub fn parse_label(s: &str) -> Result<Self, RingError> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(RingError::Malformed(format!("bad ring label {s:?}")));
        }
        let flavor: Flavor = parts[0].parse()?;
        let p = parts[1]
            .parse()
            .map_err(|_| RingError::Malformed(format!("bad p in {s:?}")))?;
        let r = parts[2]
            .parse()
            .map_err(|_| RingError::Malformed(format!("bad r in {s:?}")))?;
        Self::new(flavor, p, r)
    }

    fn pow_p(&self, k: u32) -> u32 {
        self.p.pow(k)
    }

    pub fn valuation(&self, a: u32) -> u32 {
        if a == 0 {
            return self.r;
        }
        let mut a = a;
        let mut k = 0;
        while a.is_multiple_of(self.p) {
            a /= self.p;
            k += 1;
        }
        k
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        match self.flavor {
            Flavor::IntegerMod => ((a as u64 + b as u64) % self.size() as u64) as u32,
            Flavor::TruncatedPoly => {
                if self.p == 2 {
                    return a ^ b;
                }
                let (mut a, mut b) = (a, b);
                let mut out = 0;
                let mut place = 1;
                for _ in 0..self.r {
                    let s = (a % self.p + b % self.p) % self.p;
                    out += s * place;
                    place *= self.p;
                    a /= self.p;
                    b /= self.p;
                }
                out
            }
        }
    }

    pub fn neg(&self, a: u32) -> u32 {
        match self.flavor {
            Flavor::IntegerMod => (self.size() - a) % self.size(),
            Flavor::TruncatedPoly => {
                let mut a = a;
                let mut out = 0;
                let mut place = 1;
                for _ in 0..self.r {
                    out += ((self.p - a % self.p) % self.p) * place;
                    place *= self.p;
                    a /= self.p;
                }
                out
            }
        }
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        match self.flavor {
            Flavor::IntegerMod => ((a as u64 * b as u64) % self.size() as u64) as u32,
            Flavor::TruncatedPoly => {
                let r = self.r as usize;
                let da = self.digits(a);
                let db = self.digits(b);
                let mut out = 0u32;
                let mut place = 1u32;
                for k in 0..r {
                    let mut c = 0u64;
                    for i in 0..=k {
                        c += da[i] as u64 * db[k - i] as u64;
                    }
                    out += (c % self.p as u64) as u32 * place;
                    place = place.wrapping_mul(self.p);
                }
                out
            }
        }
    }

    /// Coefficients (for `TruncatedPoly`) or base-`p` digits (for `IntegerMod`).
    pub fn digits(&self, a: u32) -> Vec<u32> {
        let mut a = a;
        (0..self.r)
            .map(|_| {
                let d = a % self.p;
                a /= self.p;
                d
            })
            .collect()
    }

    pub fn from_digits(&self, digits: &[u32]) -> u32 {
        digits.iter().rev().fold(0, |acc, &d| acc * self.p + d)
    }

    pub fn pow(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a;
        let mut acc = 1 % self.size();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn is_unit(&self, a: u32) -> bool {
        !a.is_multiple_of(self.p)
    }

    /// Order of the unit group, `p^r - p^(r-1)`.
    pub fn unit_count(&self) -> u64 {
        self.size() as u64 - self.pow_p(self.r - 1) as u64
    }

    pub fn inverse(&self, a: u32) -> Option<u32> {
        if !self.is_unit(a) {
            return None;
        }
        Some(self.pow(a, self.unit_count() - 1))
    }

    pub fn uniformizer(&self) -> u32 {
        if self.r == 1 {
            0
        } else {
            self.p
        }
    }

    pub fn format_elem(&self, a: u32) -> String {
        match self.flavor {
            Flavor::IntegerMod => a.to_string(),
            Flavor::TruncatedPoly => {
                let terms: Vec<String> = self
                    .digits(a)
                    .into_iter()
                    .enumerate()
                    .filter(|&(_, c)| c != 0)
                    .map(|(i, c)| match (i, c) {
                        (0, c) => c.to_string(),
                        (1, 1) => "t".to_string(),
                        (1, c) => format!("{c}t"),
                        (i, 1) => format!("t^{i}"),
                        (i, c) => format!("{c}t^{i}"),
                    })
                    .collect();
                if terms.is_empty() {
                    "0".to_string()
                } else {
                    terms.join("+")
                }
            }
        }
    }

    /// JSON form of an element: reduced integer or coefficient array.
    pub fn elem_to_json(&self, a: u32) -> serde_json::Value {
        match self.flavor {
            Flavor::IntegerMod => serde_json::Value::from(a),
            Flavor::TruncatedPoly => serde_json::Value::from(self.digits(a)),
        }
    }

    pub fn elem_from_json(&self, v: &serde_json::Value) -> Result<u32, RingError> {
        let bad = || RingError::Malformed(v.to_string());
        let code = match (self.flavor, v) {
            (Flavor::IntegerMod, serde_json::Value::Number(n)) => n
                .as_u64()
                .and_then(|x| u32::try_from(x).ok())
                .ok_or_else(bad)?,
            (Flavor::TruncatedPoly, serde_json::Value::Array(items)) => {
                if items.len() != self.r as usize {
                    return Err(bad());
                }
                let mut digits = Vec::with_capacity(items.len());
                for it in items {
                    let d = it.as_u64().filter(|&d| d < self.p as u64).ok_or_else(bad)?;
                    digits.push(d as u32);
                }
                self.from_digits(&digits)
            }
            _ => return Err(bad()),
        };
        if code >= self.size() {
            return Err(RingError::OutOfRange {
                spec: *self,
                value: code,
            });
        }
        Ok(code)
    }
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.flavor {
            Flavor::IntegerMod => write!(f, "Z/{}^{}", self.p, self.r),
            Flavor::TruncatedPoly => write!(f, "F{}[t]/t^{}", self.p, self.r),
        }
    }
}

#[derive(Debug)]
struct Tables {
    size: u32,
    add: Option<Vec<u32>>,
    mul: Option<Vec<u32>>,
    neg: Vec<u32>,
    inv: Vec<u32>,
    val: Vec<u8>,
}

/// A ring together with lookup tables for its arithmetic. Cheap to clone.
#[derive(Debug, Clone)]
pub struct Ring {
    spec: RingSpec,
    tables: Option<Arc<Tables>>,
}

impl Ring {
    pub fn new(spec: RingSpec) -> Self {
        let size = spec.size();
        let tables = (size <= UNARY_TABLE_LIMIT).then(|| {
            let n = size as usize;
            let binary = |f: &dyn Fn(u32, u32) -> u32| {
                let mut t = vec![0u32; n * n];
                for a in 0..size {
                    for b in 0..size {
                        t[a as usize * n + b as usize] = f(a, b);
                    }
                }
                t
            };
            let (add, mul) = if size <= TABLE_LIMIT {
                (
                    Some(binary(&|a, b| spec.add(a, b))),
                    Some(binary(&|a, b| spec.mul(a, b))),
                )
            } else {
                (None, None)
            };
            Arc::new(Tables {
                size,
                add,
                mul,
                neg: (0..size).map(|a| spec.neg(a)).collect(),
                inv: (0..size).map(|a| spec.inverse(a).unwrap_or(0)).collect(),
                val: (0..size).map(|a| spec.valuation(a) as u8).collect(),
            })
        });
        Ring { spec, tables }
    }

    pub fn spec(&self) -> RingSpec {
        self.spec
    }

    pub fn p(&self) -> u32 {
        self.spec.p
    }

    pub fn q(&self) -> u32 {
        self.spec.q()
    }

    pub fn r(&self) -> u32 {
        self.spec.r
    }

    pub fn size(&self) -> u32 {
        self.spec.size()
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        match self.tables.as_deref() {
            Some(Tables {
                size, add: Some(t), ..
            }) => t[(a * size + b) as usize],
            _ => self.spec.add(a, b),
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        match self.tables.as_deref() {
            Some(Tables {
                size, mul: Some(t), ..
            }) => t[(a * size + b) as usize],
            _ => self.spec.mul(a, b),
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        match self.tables.as_deref() {
            Some(t) => t.neg[a as usize],
            None => self.spec.neg(a),
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    /// `a - c * b`, the row-operation kernel.
    #[inline]
    pub fn sub_mul(&self, a: u32, c: u32, b: u32) -> u32 {
        self.sub(a, self.mul(c, b))
    }

    #[inline]
    pub fn valuation(&self, a: u32) -> u32 {
        match self.tables.as_deref() {
            Some(t) => t.val[a as usize] as u32,
            None => self.spec.valuation(a),
        }
    }

    #[inline]
    pub fn is_unit(&self, a: u32) -> bool {
        !a.is_multiple_of(self.spec.p)
    }

    pub fn inverse(&self, a: u32) -> Option<u32> {
        if !self.is_unit(a) {
            return None;
        }
        match self.tables.as_deref() {
            Some(t) => Some(t.inv[a as usize]),
            None => self.spec.inverse(a),
        }
    }

    /// `pi^k` (zero for `k >= r`).
    #[inline]
    pub fn pi_pow(&self, k: u32) -> u32 {
        if k >= self.spec.r {
            0
        } else {
            self.spec.pow_p(k)
        }
    }

    /// Quotient `a / pi^k` for `valuation(a) >= k`; a unit when the valuation is exactly `k`.
    #[inline]
    pub fn div_pi_pow(&self, a: u32, k: u32) -> u32 {
        debug_assert!(self.valuation(a) >= k);
        a / self.spec.pow_p(k)
    }

    /// Digit shift: `a = pi^k * quo_pi_pow(a, k) + reduce_mod_pi_pow(a, k)`.
    #[inline]
    pub fn quo_pi_pow(&self, a: u32, k: u32) -> u32 {
        a / self.spec.pow_p(k)
    }

    /// Canonical representative of `a` modulo `m^k`.
    #[inline]
    pub fn reduce_mod_pi_pow(&self, a: u32, k: u32) -> u32 {
        if k >= self.spec.r {
            a
        } else {
            a % self.spec.pow_p(k)
        }
    }

    pub fn uniformizer(&self) -> u32 {
        self.spec.uniformizer()
    }

    pub fn units(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.size()).filter(move |&a| self.is_unit(a))
    }

    pub fn elements(&self) -> std::ops::Range<u32> {
        0..self.size()
    }

    pub fn elem(&self, rep: u32) -> Result<RingElem, RingError> {
        RingElem::new(self.spec, rep)
    }
}

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl Eq for Ring {}

/// A standalone element with its ring attached; binary operations check
/// that both operands live in the same ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RingElem {
    spec: RingSpec,
    rep: u32,
}

impl RingElem {
    pub fn new(spec: RingSpec, rep: u32) -> Result<Self, RingError> {
        if rep >= spec.size() {
            return Err(RingError::OutOfRange { spec, value: rep });
        }
        Ok(RingElem { spec, rep })
    }

    /// Builds a `TruncatedPoly` (or digit-encoded) element from coefficients.
    pub fn from_coeffs(spec: RingSpec, coeffs: &[u32]) -> Result<Self, RingError> {
        if coeffs.len() > spec.r as usize || coeffs.iter().any(|&c| c >= spec.p) {
            return Err(RingError::Malformed(format!("{coeffs:?}")));
        }
        Self::new(spec, spec.from_digits(coeffs))
    }

    pub fn spec(&self) -> RingSpec {
        self.spec
    }

    pub fn rep(&self) -> u32 {
        self.rep
    }

    fn same(&self, other: &RingElem) -> Result<(), RingError> {
        if self.spec != other.spec {
            return Err(RingError::SpecMismatch(self.spec, other.spec));
        }
        Ok(())
    }

    pub fn add(&self, other: &RingElem) -> Result<RingElem, RingError> {
        self.same(other)?;
        Ok(RingElem {
            spec: self.spec,
            rep: self.spec.add(self.rep, other.rep),
        })
    }

    pub fn sub(&self, other: &RingElem) -> Result<RingElem, RingError> {
        self.same(other)?;
        Ok(RingElem {
            spec: self.spec,
            rep: self.spec.sub(self.rep, other.rep),
        })
    }

    pub fn mul(&self, other: &RingElem) -> Result<RingElem, RingError> {
        self.same(other)?;
        Ok(RingElem {
            spec: self.spec,
            rep: self.spec.mul(self.rep, other.rep),
        })
    }

    pub fn neg(&self) -> RingElem {
        RingElem {
            spec: self.spec,
            rep: self.spec.neg(self.rep),
        }
    }

    pub fn valuation(&self) -> u32 {
        self.spec.valuation(self.rep)
    }

    pub fn is_unit(&self) -> bool {
        self.spec.is_unit(self.rep)
    }

    pub fn inverse(&self) -> Result<RingElem, RingError> {
        self.spec
            .inverse(self.rep)
            .map(|rep| RingElem {
                spec: self.spec,
                rep,
            })
            .ok_or_else(|| RingError::NotAUnit(self.to_string()))
    }

    pub fn to_json(&self) -> serde_json::Value {
        self.spec.elem_to_json(self.rep)
    }

    pub fn from_json(spec: RingSpec, v: &serde_json::Value) -> Result<Self, RingError> {
        Ok(RingElem {
            spec,
            rep: spec.elem_from_json(v)?,
        })
    }
}

impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.spec.format_elem(self.rep))
    }
}

pub fn uniformizer(spec: RingSpec) -> RingElem {
    RingElem {
        spec,
        rep: spec.uniformizer(),
    }
}

/// A ring automorphism. `Z/p^r` only has the identity; for `F_p[t]/t^r` an
/// automorphism is the substitution `t -> f` with `f` of valuation exactly 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RingAut {
    spec: RingSpec,
    image_of_t: u32,
}

impl RingAut {
    pub fn identity(spec: RingSpec) -> Self {
        RingAut {
            spec,
            image_of_t: spec.uniformizer(),
        }
    }

    /// The substitution `t -> f`. Returns `None` unless `f` is a valid image.
    pub fn substitution(spec: RingSpec, f: u32) -> Option<Self> {
        match spec.flavor {
            Flavor::IntegerMod => (f == spec.uniformizer()).then_some(Self::identity(spec)),
            Flavor::TruncatedPoly => {
                if spec.r == 1 {
                    return (f == 0).then_some(Self::identity(spec));
                }
                (f < spec.size() && spec.valuation(f) == 1).then_some(RingAut {
                    spec,
                    image_of_t: f,
                })
            }
        }
    }

    pub fn spec(&self) -> RingSpec {
        self.spec
    }

    pub fn image_of_t(&self) -> u32 {
        self.image_of_t
    }

    pub fn is_identity(&self) -> bool {
        self.image_of_t == self.spec.uniformizer()
    }

    pub fn apply(&self, a: u32) -> u32 {
        if self.is_identity() {
            return a;
        }
        let spec = &self.spec;
        let mut acc = 0;
        let mut power = 1 % spec.size();
        for d in spec.digits(a) {
            acc = spec.add(acc, spec.mul(d, power));
            power = spec.mul(power, self.image_of_t);
        }
        acc
    }

    /// Image of every element, indexed by code.
    pub fn table(&self) -> Vec<u32> {
        (0..self.spec.size()).map(|a| self.apply(a)).collect()
    }

    pub fn compose(&self, inner: &RingAut) -> RingAut {
        RingAut {
            spec: self.spec,
            image_of_t: self.apply(inner.image_of_t),
        }
    }

    pub fn inverse(&self) -> RingAut {
        ring_automorphisms(self.spec)
            .into_iter()
            .find(|g| g.compose(self).is_identity())
            .expect("automorphism group is finite")
    }
}

impl fmt::Display for RingAut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            write!(f, "id")
        } else {
            write!(f, "t -> {}", self.spec.format_elem(self.image_of_t))
        }
    }
}

/// All ring automorphisms, identity first.
pub fn ring_automorphisms(spec: RingSpec) -> Vec<RingAut> {
    match spec.flavor {
        Flavor::IntegerMod => vec![RingAut::identity(spec)],
        Flavor::TruncatedPoly if spec.r == 1 => vec![RingAut::identity(spec)],
        Flavor::TruncatedPoly => {
            let id = RingAut::identity(spec);
            let mut out = vec![id];
            out.extend(
                (0..spec.size())
                    .filter(|&f| spec.valuation(f) == 1 && f != id.image_of_t)
                    .map(|f| RingAut {
                        spec,
                        image_of_t: f,
                    }),
            );
            out
        }
    }
}
