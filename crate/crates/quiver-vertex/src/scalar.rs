//! Exact scalars, Laurent monomials and seeded sample points.
//!
//! Exponents of `q` and `ħ` are stored doubled so that `ħ^{1/2}` is an
//! ordinary monomial. Framing parameters `a_{j,k}` are keyed by vertex label
//! and slot, Kähler variables `z_i` by vertex index.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// A framing parameter `a_{vertex,slot}`; slots count from 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FramingVar {
    pub vertex: String,
    pub slot: u32,
}

impl FramingVar {
    pub fn new(vertex: impl Into<String>, slot: u32) -> Self {
        FramingVar {
            vertex: vertex.into(),
            slot,
        }
    }

    /// The `"j.k"` key used in fixed-point files.
    pub fn key(&self) -> String {
        format!("{}.{}", self.vertex, self.slot)
    }

    pub fn from_key(key: &str) -> Result<Self> {
        let (v, s) = key
            .rsplit_once('.')
            .ok_or_else(|| Error::Schema(format!("framing key `{key}` is not of the form j.k")))?;
        let slot = s
            .parse::<u32>()
            .map_err(|_| Error::Schema(format!("framing key `{key}` has a bad slot")))?;
        if v.is_empty() || slot == 0 {
            return Err(Error::Schema(format!("framing key `{key}` is malformed")));
        }
        Ok(FramingVar::new(v, slot))
    }

    pub fn prefixed(&self, prefix: &str) -> Self {
        FramingVar::new(format!("{prefix}{}", self.vertex), self.slot)
    }
}

impl fmt::Display for FramingVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a[{}]", self.key())
    }
}

/// A signed Laurent monomial in `q^{1/2}`, `ħ^{1/2}`, the framing parameters
/// and the Kähler variables. Zero exponents are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial {
    q2: i64,
    h2: i64,
    a: BTreeMap<FramingVar, i64>,
    z: BTreeMap<usize, i64>,
    negative: bool,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    /// `q^{half/2}`.
    pub fn q_half(half: i64) -> Self {
        Monomial {
            q2: half,
            ..Default::default()
        }
    }

    /// `ħ^{half/2}`.
    pub fn hbar_half(half: i64) -> Self {
        Monomial {
            h2: half,
            ..Default::default()
        }
    }

    pub fn q() -> Self {
        Self::q_half(2)
    }

    pub fn hbar() -> Self {
        Self::hbar_half(2)
    }

    /// `κ = q/ħ`.
    pub fn kappa() -> Self {
        Monomial {
            q2: 2,
            h2: -2,
            ..Default::default()
        }
    }

    pub fn a(var: FramingVar) -> Self {
        let mut m = Monomial::one();
        m.a.insert(var, 1);
        m
    }

    pub fn z(i: usize) -> Self {
        let mut m = Monomial::one();
        m.z.insert(i, 1);
        m
    }

    pub fn z_vec(exps: &[u32]) -> Self {
        let mut m = Monomial::one();
        for (i, &e) in exps.iter().enumerate() {
            if e != 0 {
                m.z.insert(i, e as i64);
            }
        }
        m
    }

    pub fn minus_one() -> Self {
        Monomial {
            negative: true,
            ..Default::default()
        }
    }

    pub fn from_parts(
        q2: i64,
        h2: i64,
        a: BTreeMap<FramingVar, i64>,
        z: BTreeMap<usize, i64>,
        negative: bool,
    ) -> Self {
        let mut m = Monomial {
            q2,
            h2,
            a,
            z,
            negative,
        };
        m.a.retain(|_, e| *e != 0);
        m.z.retain(|_, e| *e != 0);
        m
    }

    pub fn q_exp2(&self) -> i64 {
        self.q2
    }

    pub fn hbar_exp2(&self) -> i64 {
        self.h2
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    pub fn framing(&self) -> &BTreeMap<FramingVar, i64> {
        &self.a
    }

    pub fn kahler(&self) -> &BTreeMap<usize, i64> {
        &self.z
    }

    pub fn is_one(&self) -> bool {
        *self == Monomial::one()
    }

    pub fn a_degree(&self) -> i64 {
        self.a.values().sum()
    }

    pub fn z_degree(&self) -> i64 {
        self.z.values().sum()
    }

    pub fn has_z(&self) -> bool {
        !self.z.is_empty()
    }

    pub fn pow(&self, k: i64) -> Self {
        if k == 0 {
            return Monomial::one();
        }
        Monomial {
            q2: self.q2 * k,
            h2: self.h2 * k,
            a: self.a.iter().map(|(v, e)| (v.clone(), e * k)).collect(),
            z: self.z.iter().map(|(v, e)| (*v, e * k)).collect(),
            negative: self.negative && k % 2 != 0,
        }
    }

    pub fn inv(&self) -> Self {
        self.pow(-1)
    }

    /// Everything but the Kähler part.
    pub fn without_z(&self) -> Self {
        Monomial {
            z: BTreeMap::new(),
            ..self.clone()
        }
    }

    /// The Kähler part only, as a dense exponent vector of length `n`.
    pub fn z_exponents(&self, n: usize) -> Result<Vec<u32>> {
        let mut out = vec![0u32; n];
        for (&i, &e) in &self.z {
            if i >= n || e < 0 {
                return Err(Error::Usage(format!(
                    "Kähler exponent z{}^{} outside a {}-variable series",
                    i + 1,
                    e,
                    n
                )));
            }
            out[i] = e as u32;
        }
        Ok(out)
    }

    /// If the monomial is exactly `q^k` for an integer `k`, return `k`.
    pub fn q_power(&self) -> Option<i64> {
        if self.negative || self.h2 != 0 || !self.a.is_empty() || !self.z.is_empty() {
            return None;
        }
        if self.q2 % 2 != 0 {
            return None;
        }
        Some(self.q2 / 2)
    }

    pub fn map_framing(&self, f: impl Fn(&FramingVar) -> Monomial) -> Monomial {
        let mut out = Monomial {
            a: BTreeMap::new(),
            ..self.clone()
        };
        for (v, &e) in &self.a {
            out = &out * &f(v).pow(e);
        }
        out
    }

    pub fn prefix_framing(&self, prefix: &str) -> Monomial {
        self.map_framing(|v| Monomial::a(v.prefixed(prefix)))
    }

    pub fn map_kahler(&self, f: impl Fn(usize) -> usize) -> Monomial {
        let mut out = Monomial {
            z: BTreeMap::new(),
            ..self.clone()
        };
        for (&i, &e) in &self.z {
            *out.z.entry(f(i)).or_insert(0) += e;
        }
        out.z.retain(|_, e| *e != 0);
        out
    }

    /// Text form; with `kappa` the balanced part `q^k ħ^{-k}` prints as `κ^k`.
    pub fn display(&self, kappa: bool) -> String {
        let mut parts: Vec<String> = Vec::new();
        let (mut q2, mut h2) = (self.q2, self.h2);
        if kappa && q2 != 0 && h2 != 0 && q2.signum() == -h2.signum() {
            let k = if q2 > 0 { q2.min(-h2) } else { q2.max(-h2) };
            parts.push(power("κ", k));
            q2 -= k;
            h2 += k;
        }
        if q2 != 0 {
            parts.push(power("q", q2));
        }
        if h2 != 0 {
            parts.push(power("ħ", h2));
        }
        for (v, &e) in &self.a {
            parts.push(power(&v.to_string(), 2 * e));
        }
        for (&i, &e) in &self.z {
            parts.push(power(&format!("z{}", i + 1), 2 * e));
        }
        let body = if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("·")
        };
        if self.negative {
            format!("-{body}")
        } else {
            body
        }
    }
}

fn power(base: &str, e2: i64) -> String {
    if e2 == 2 {
        base.to_string()
    } else if e2 % 2 == 0 {
        format!("{base}^{}", e2 / 2)
    } else {
        format!("{base}^({}/2)", e2)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display(false))
    }
}

impl Mul for &Monomial {
    type Output = Monomial;
    fn mul(self, rhs: &Monomial) -> Monomial {
        let mut out = self.clone();
        out.q2 += rhs.q2;
        out.h2 += rhs.h2;
        for (v, e) in &rhs.a {
            *out.a.entry(v.clone()).or_insert(0) += e;
        }
        out.a.retain(|_, e| *e != 0);
        for (v, e) in &rhs.z {
            *out.z.entry(*v).or_insert(0) += e;
        }
        out.z.retain(|_, e| *e != 0);
        out.negative ^= rhs.negative;
        out
    }
}

impl Mul for Monomial {
    type Output = Monomial;
    fn mul(self, rhs: Monomial) -> Monomial {
        &self * &rhs
    }
}

impl Div for &Monomial {
    type Output = Monomial;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &Monomial) -> Monomial {
        self * &rhs.inv()
    }
}

impl Div for Monomial {
    type Output = Monomial;
    fn div(self, rhs: Monomial) -> Monomial {
        &self / &rhs
    }
}

impl Neg for Monomial {
    type Output = Monomial;
    fn neg(mut self) -> Monomial {
        self.negative = !self.negative;
        self
    }
}

/// An exact rational with a sticky pole flag.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Scalar {
    pub value: Rational,
    pub pole: bool,
}

impl Scalar {
    pub fn new(value: Rational) -> Self {
        Scalar { value, pole: false }
    }

    pub fn int(n: i64) -> Self {
        Scalar::new(int(n))
    }

    pub fn zero() -> Self {
        Scalar::int(0)
    }

    pub fn one() -> Self {
        Scalar::int(1)
    }

    pub fn pole() -> Self {
        Scalar {
            value: Rational::zero(),
            pole: true,
        }
    }

    pub fn is_zero(&self) -> bool {
        !self.pole && self.value.is_zero()
    }

    pub fn pow(&self, k: i64) -> Scalar {
        if k >= 0 {
            Scalar {
                value: Pow::pow(&self.value, k as u64),
                pole: self.pole,
            }
        } else if self.value.is_zero() {
            Scalar::pole()
        } else {
            Scalar {
                value: Pow::pow(&self.value.recip(), (-k) as u64),
                pole: self.pole,
            }
        }
    }

    pub fn recip(&self) -> Scalar {
        self.pow(-1)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pole {
            write!(f, "pole")
        } else {
            write!(f, "{}", self.value)
        }
    }
}

impl From<Rational> for Scalar {
    fn from(value: Rational) -> Self {
        Scalar::new(value)
    }
}

macro_rules! scalar_binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl $tr for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                let f: fn(&Scalar, &Scalar) -> Scalar = $body;
                f(self, rhs)
            }
        }
        impl $tr for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
    };
}

scalar_binop!(Add, add, |a, b| Scalar {
    value: &a.value + &b.value,
    pole: a.pole || b.pole
});
scalar_binop!(Sub, sub, |a, b| Scalar {
    value: &a.value - &b.value,
    pole: a.pole || b.pole
});
scalar_binop!(Mul, mul, |a, b| Scalar {
    value: &a.value * &b.value,
    pole: a.pole || b.pole
});
scalar_binop!(Div, div, |a, b| {
    if b.value.is_zero() {
        Scalar::pole()
    } else {
        Scalar {
            value: &a.value / &b.value,
            pole: a.pole || b.pole,
        }
    }
});

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            value: -self.value,
            pole: self.pole,
        }
    }
}

/// `(x)_k` in base `q`; negative `k` gives the reciprocal product.
pub fn pochhammer(x: &Scalar, k: i64, q: &Rational) -> Scalar {
    let one = Rational::one();
    let mut acc = Scalar::one();
    if k >= 0 {
        let mut qi = one.clone();
        for _ in 0..k {
            acc = &acc * &Scalar::new(&one - &x.value * &qi);
            qi = &qi * q;
        }
        acc.pole |= x.pole;
        acc
    } else {
        let qinv = q.recip();
        let mut qi = qinv.clone();
        for _ in 0..(-k) {
            acc = &acc / &Scalar::new(&one - &x.value * &qi);
            qi = &qi * &qinv;
        }
        acc.pole |= x.pole;
        acc
    }
}

fn primes(count: usize) -> Vec<i64> {
    let mut out = Vec::with_capacity(count);
    let mut n = 2i64;
    while out.len() < count {
        if out.iter().take_while(|&&p| p * p <= n).all(|&p| n % p != 0) {
            out.push(n);
        }
        n += 1;
    }
    out
}

/// Exact values for `q^{1/2}`, `ħ^{1/2}` and each declared framing parameter.
///
/// Every value is a ratio of two primes and no prime is used twice, so
/// distinct monomials in `q^{1/2}, ħ^{1/2}, a` take distinct values.
#[derive(Clone, Debug, PartialEq)]
pub struct SamplePoint {
    pub seed: u64,
    pub q_equals_hbar: bool,
    q_half: Option<Rational>,
    h_half: Option<Rational>,
    q: Rational,
    h: Rational,
    a: BTreeMap<FramingVar, Rational>,
}

const BASE_POOL: usize = 26;

impl SamplePoint {
    pub fn new(seed: u64, vars: &[FramingVar]) -> Self {
        Self::build(seed, seed, vars, false)
    }

    pub fn q_equals_hbar(seed: u64, vars: &[FramingVar]) -> Self {
        Self::build(seed, seed, vars, true)
    }

    /// Keep `q` and `ħ` of this point and redraw the framing values from
    /// `framing_seed`.
    pub fn reseed_framing(&self, framing_seed: u64) -> Self {
        let vars: Vec<FramingVar> = self.a.keys().cloned().collect();
        Self::build(self.seed, framing_seed, &vars, self.q_equals_hbar)
    }

    pub fn with_vars(&self, vars: &[FramingVar]) -> Self {
        Self::build(self.seed, self.seed, vars, self.q_equals_hbar)
    }

    fn build(seed: u64, framing_seed: u64, vars: &[FramingVar], q_eq_h: bool) -> Self {
        let mut vars: Vec<FramingVar> = vars.to_vec();
        vars.sort();
        vars.dedup();
        let pool = primes(BASE_POOL.max(4 + 2 * vars.len()));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut shuffled = pool.clone();
        shuffled.shuffle(&mut rng);
        let (qh, rest) = shuffled.split_at(4);
        let mut rest = rest.to_vec();
        if framing_seed != seed {
            let mut rng2 = ChaCha8Rng::seed_from_u64(framing_seed ^ 0x9e37_79b9_7f4a_7c15);
            rest.shuffle(&mut rng2);
        }
        let q_half = rat(qh[0], qh[1]);
        let h_half = if q_eq_h { q_half.clone() } else { rat(qh[2], qh[3]) };
        let a = vars
            .into_iter()
            .enumerate()
            .map(|(i, v)| (v, rat(rest[2 * i], rest[2 * i + 1])))
            .collect();
        SamplePoint {
            seed,
            q_equals_hbar: q_eq_h,
            q: &q_half * &q_half,
            h: &h_half * &h_half,
            q_half: Some(q_half),
            h_half: Some(h_half),
            a,
        }
    }

    /// Explicit values for `q^{1/2}` and `ħ^{1/2}`.
    pub fn from_values(q_half: Rational, h_half: Rational, a: BTreeMap<FramingVar, Rational>) -> Self {
        SamplePoint {
            seed: 0,
            q_equals_hbar: q_half == h_half,
            q: &q_half * &q_half,
            h: &h_half * &h_half,
            q_half: Some(q_half),
            h_half: Some(h_half),
            a,
        }
    }

    /// Explicit values for `q` and `ħ`; monomials with half-integer powers
    /// then fail to evaluate.
    pub fn from_integral_values(q: Rational, h: Rational, a: BTreeMap<FramingVar, Rational>) -> Self {
        SamplePoint {
            seed: 0,
            q_equals_hbar: q == h,
            q,
            h,
            q_half: None,
            h_half: None,
            a,
        }
    }

    pub fn q(&self) -> &Rational {
        &self.q
    }

    pub fn hbar(&self) -> &Rational {
        &self.h
    }

    pub fn framing_values(&self) -> &BTreeMap<FramingVar, Rational> {
        &self.a
    }

    pub fn framing_vars(&self) -> Vec<FramingVar> {
        self.a.keys().cloned().collect()
    }

    pub fn eval(&self, m: &Monomial) -> Result<Scalar> {
        if m.has_z() {
            return Err(Error::Usage(format!(
                "cannot evaluate `{m}`: Kähler variables stay formal"
            )));
        }
        let mut v = half_pow(&self.q, self.q_half.as_ref(), m.q2, "q")?
            * half_pow(&self.h, self.h_half.as_ref(), m.h2, "ħ")?;
        for (var, &e) in &m.a {
            let base = self
                .a
                .get(var)
                .ok_or_else(|| Error::Schema(format!("undeclared framing variable {var}")))?;
            v *= pow_i(base, e);
        }
        if m.negative {
            v = -v;
        }
        Ok(Scalar::new(v))
    }
}

fn half_pow(full: &Rational, half: Option<&Rational>, e2: i64, name: &str) -> Result<Rational> {
    if e2 % 2 == 0 {
        return Ok(pow_i(full, e2 / 2));
    }
    half.map(|h| pow_i(h, e2))
        .ok_or_else(|| Error::Usage(format!("no square root of {name} at this sample point")))
}

fn pow_i(x: &Rational, e: i64) -> Rational {
    if e >= 0 {
        Pow::pow(x, e as u64)
    } else {
        Pow::pow(&x.recip(), (-e) as u64)
    }
}

/// Format a rational as `p` or `p/q`.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let parse = |t: &str| {
        t.trim()
            .parse::<BigInt>()
            .map_err(|_| Error::Schema(format!("bad rational `{s}`")))
    };
    match s.split_once('/') {
        Some((n, d)) => {
            let d = parse(d)?;
            if d.is_zero() {
                return Err(Error::Schema(format!("zero denominator in `{s}`")));
            }
            Ok(BigRational::new(parse(n)?, d))
        }
        None => Ok(BigRational::from_integer(parse(s)?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;

    fn point() -> SamplePoint {
        SamplePoint::new(7, &[FramingVar::new("1", 1), FramingVar::new("1", 2)])
    }

    #[test]
    fn empty_monomial_is_one() {
        assert_eq!(point().eval(&Monomial::one()).unwrap(), Scalar::one());
    }

    #[test]
    fn hbar_from_half_power() {
        let s = SamplePoint::from_values(rat(3, 5), rat(2, 3), BTreeMap::new());
        assert_eq!(s.eval(&Monomial::hbar()).unwrap().value, rat(4, 9));
    }

    #[test]
    fn kappa_value() {
        let s = SamplePoint::from_integral_values(rat(3, 5), rat(4, 9), BTreeMap::new());
        assert_eq!(s.eval(&Monomial::kappa()).unwrap().value, rat(27, 20));
        assert!(s.eval(&Monomial::hbar_half(1)).is_err());
    }

    #[test]
    fn kahler_is_not_evaluated() {
        assert!(matches!(point().eval(&Monomial::z(0)), Err(Error::Usage(_))));
    }

    #[test]
    fn undeclared_framing_is_schema_error() {
        let m = Monomial::a(FramingVar::new("9", 1));
        assert!(matches!(point().eval(&m), Err(Error::Schema(_))));
    }

    #[test]
    fn sample_values_avoid_units() {
        for seed in 0..50 {
            let s = point().reseed_framing(seed);
            let halves = [s.q_half.clone().unwrap(), s.h_half.clone().unwrap()];
            for v in s.a.values().chain(halves.iter()) {
                assert!(!v.is_zero() && v.abs() != Rational::one());
            }
            assert_ne!(s.q, s.h);
        }
    }

    #[test]
    fn sample_is_deterministic() {
        assert_eq!(point(), point());
        assert_ne!(point(), point().reseed_framing(8));
        assert_eq!(point().reseed_framing(8).q(), point().q());
    }

    #[test]
    fn pochhammer_basics() {
        let q = rat(2, 7);
        let x = Scalar::new(rat(5, 3));
        assert_eq!(pochhammer(&x, 0, &q), Scalar::one());
        for k in 1..5 {
            assert!(pochhammer(&Scalar::one(), k, &q).is_zero());
        }
        // (x)_{-1} = 1/(1 - x/q)
        let expect = Scalar::one() / (Scalar::one() - &x / &Scalar::new(q.clone()));
        assert_eq!(pochhammer(&x, -1, &q), expect);
        // x = q makes the reciprocal factor vanish
        assert!(pochhammer(&Scalar::new(q.clone()), -1, &q).pole);
    }

    #[test]
    fn monomial_algebra() {
        let m = &(&Monomial::kappa() * &Monomial::z(1)) * &Monomial::hbar();
        assert_eq!(m.q_exp2(), 2);
        assert_eq!(m.hbar_exp2(), 0);
        assert_eq!(m.z_degree(), 1);
        assert_eq!((&m / &m), Monomial::one());
        assert_eq!(Monomial::minus_one().pow(2), Monomial::one());
        assert_eq!(Monomial::q().pow(3).q_power(), Some(3));
        assert_eq!(Monomial::hbar().q_power(), None);
        assert_eq!(Monomial::kappa().display(true), "κ");
        assert_eq!(Monomial::hbar_half(-1).display(false), "ħ^(-1/2)");
    }

    #[test]
    fn framing_keys_round_trip() {
        let v = FramingVar::new("1.x", 3);
        assert_eq!(FramingVar::from_key(&v.key()).unwrap(), v);
        assert!(FramingVar::from_key("nodot").is_err());
    }
}
