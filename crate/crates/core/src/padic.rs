//! Prime-parameterized integer arithmetic: valuations, balanced residues,
//! modular inverses and Hensel-lifted square roots.
//!
//! Balanced digits live in `{-(p-1)/2, ..., (p-1)/2}`. A useful fact used
//! throughout the crate: the numbers `sum_{i<k} d_i p^i` with balanced digits
//! are exactly the integers of absolute value at most `(p^k - 1)/2`, so the
//! balanced expansion of `x mod p^k` is the symmetric residue of `x`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An odd prime, checked at construction.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Prime(BigInt);

impl Prime {
    pub fn new(p: impl Into<BigInt>) -> Result<Self> {
        let p = p.into();
        if p < BigInt::from(3) {
            return Err(Error::InvalidArgument(format!("{p} is not an odd prime")));
        }
        if !is_probable_prime(&p) {
            return Err(Error::InvalidArgument(format!("{p} is not prime")));
        }
        Ok(Prime(p))
    }

    pub fn value(&self) -> &BigInt {
        &self.0
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }

    pub fn pow(&self, k: u32) -> BigInt {
        num_traits::pow(self.0.clone(), k as usize)
    }

    /// `(p - 1) / 2`, the largest balanced digit.
    pub fn half(&self) -> BigInt {
        (&self.0 - 1u32) >> 1
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl FromStr for Prime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let p = BigInt::from_str(s.trim())
            .map_err(|_| Error::InvalidArgument(format!("cannot parse prime {s:?}")))?;
        Prime::new(p)
    }
}

impl Serialize for Prime {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0.to_u64() {
            Some(v) => s.serialize_u64(v),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Prime {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Small(u64),
            Text(String),
        }
        let p = match Repr::deserialize(d)? {
            Repr::Small(v) => Prime::new(v),
            Repr::Text(s) => s.parse(),
        };
        p.map_err(serde::de::Error::custom)
    }
}

const MR_BASES: [u32; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// Miller-Rabin over the first thirteen primes; deterministic below 3.3e24.
fn is_probable_prime(n: &BigInt) -> bool {
    if n < &BigInt::from(2) {
        return false;
    }
    for &b in &MR_BASES {
        let b = BigInt::from(b);
        if n == &b {
            return true;
        }
        if (n % &b).is_zero() {
            return false;
        }
    }
    let n1: BigInt = n - 1u32;
    let s = n1.trailing_zeros().unwrap_or(0);
    let d = &n1 >> s;
    'bases: for &b in &MR_BASES {
        let mut x = BigInt::from(b).modpow(&d, n);
        if x.is_one() || x == n1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// A p-adic valuation; zero has valuation `Infinite`.
///
/// The derived ordering puts every finite value below `Infinite`, so
/// `min` over valuations behaves as it should.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == Valuation::Infinite
    }
}

impl Add for Valuation {
    type Output = Valuation;

    fn add(self, rhs: Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinite,
        }
    }
}

impl PartialEq<i64> for Valuation {
    fn eq(&self, other: &i64) -> bool {
        *self == Valuation::Finite(*other)
    }
}

impl PartialOrd<i64> for Valuation {
    fn partial_cmp(&self, other: &i64) -> Option<Ordering> {
        Some(self.cmp(&Valuation::Finite(*other)))
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

/// Splits a nonzero integer as `p^v * u` with `p` not dividing `u`.
///
/// Uses a squaring ladder so large valuations cost O(log v) divisions.
pub fn strip_p(n: &BigInt, p: &Prime) -> (u64, BigInt) {
    debug_assert!(!n.is_zero());
    let mut m = n.clone();
    let mut v = 0u64;
    let mut ladder = vec![p.value().clone()];
    loop {
        let top = ladder.last().unwrap();
        let (q, r) = m.div_rem(top);
        if !r.is_zero() {
            break;
        }
        m = q;
        v += 1u64 << (ladder.len() - 1);
        let sq = top * top;
        ladder.push(sq);
    }
    for (i, pw) in ladder.iter().enumerate().rev() {
        let (q, r) = m.div_rem(pw);
        if r.is_zero() {
            m = q;
            v += 1u64 << i;
        }
    }
    (v, m)
}

pub fn valuation_int(n: &BigInt, p: &Prime) -> Valuation {
    if n.is_zero() {
        Valuation::Infinite
    } else {
        Valuation::Finite(strip_p(n, p).0 as i64)
    }
}

/// `v_p(num / den)`.
pub fn valuation_rational(num: &BigInt, den: &BigInt, p: &Prime) -> Result<Valuation> {
    if den.is_zero() {
        return Err(Error::InvalidArgument("zero denominator".into()));
    }
    if num.is_zero() {
        return Ok(Valuation::Infinite);
    }
    let vn = strip_p(num, p).0 as i64;
    let vd = strip_p(den, p).0 as i64;
    Ok(Valuation::Finite(vn - vd))
}

/// Residue of `x` modulo an odd `m`, in `[-(m-1)/2, (m-1)/2]`.
pub fn symmetric_mod(x: &BigInt, m: &BigInt) -> BigInt {
    let r = x.mod_floor(m);
    if (&r << 1) > *m {
        r - m
    } else {
        r
    }
}

/// One digit of a balanced p-adic expansion.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BalancedDigit(BigInt);

impl BalancedDigit {
    pub fn new(value: BigInt, p: &Prime) -> Result<Self> {
        if value.abs() > p.half() {
            return Err(Error::InvalidArgument(format!(
                "{value} is not a balanced digit for p = {p}"
            )));
        }
        Ok(BalancedDigit(value))
    }

    pub fn value(&self) -> &BigInt {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl From<BalancedDigit> for BigInt {
    fn from(d: BalancedDigit) -> BigInt {
        d.0
    }
}

impl PartialEq<i64> for BalancedDigit {
    fn eq(&self, other: &i64) -> bool {
        self.0 == BigInt::from(*other)
    }
}

impl fmt::Display for BalancedDigit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Digits `d_0..d_{k-1}` with `sum d_i p^i == x (mod p^k)`.
pub fn balanced_digits_mod(x: &BigInt, p: &Prime, k: u32) -> Vec<BalancedDigit> {
    let pk = p.pow(k);
    let mut rest = symmetric_mod(x, &pk);
    let mut out = Vec::with_capacity(k as usize);
    for _ in 0..k {
        let d = symmetric_mod(&rest, p.value());
        rest = (rest - &d) / p.value();
        out.push(BalancedDigit(d));
    }
    debug_assert!(rest.is_zero());
    out
}

/// `y` in `[0, m)` with `x * y == 1 (mod m)`.
pub fn mod_inverse(x: &BigInt, m: &BigInt) -> Result<BigInt> {
    if m < &BigInt::from(2) {
        return Err(Error::InvalidArgument(format!("modulus {m} must be at least 2")));
    }
    let e = x.mod_floor(m).extended_gcd(m);
    if !e.gcd.is_one() {
        return Err(Error::InvalidArgument(format!("{x} is not invertible modulo {m}")));
    }
    Ok(e.x.mod_floor(m))
}

fn is_residue_mod_p(d: &BigInt, p: &Prime) -> bool {
    let pv = p.value();
    let r = d.mod_floor(pv);
    r.is_zero() || r.modpow(&p.half(), pv).is_one()
}

/// Tonelli-Shanks; `d` must be a nonzero residue mod `p`.
fn sqrt_mod_p(d: &BigInt, p: &Prime) -> BigInt {
    let pv = p.value();
    let n = d.mod_floor(pv);
    let p1: BigInt = pv - 1u32;
    let s = p1.trailing_zeros().unwrap_or(0);
    let q = &p1 >> s;
    if s == 1 {
        return n.modpow(&((pv + 1u32) >> 2), pv);
    }
    let mut z = BigInt::from(2);
    while is_residue_mod_p(&z, p) {
        z += 1u32;
    }
    let mut m = s;
    let mut c = z.modpow(&q, pv);
    let mut t = n.modpow(&q, pv);
    let mut r = n.modpow(&((&q + 1u32) >> 1), pv);
    while !t.is_one() {
        let mut i = 0u64;
        let mut t2 = t.clone();
        while !t2.is_one() {
            t2 = (&t2 * &t2) % pv;
            i += 1;
        }
        let mut b = c.clone();
        for _ in 0..(m - i - 1) {
            b = (&b * &b) % pv;
        }
        m = i;
        c = (&b * &b) % pv;
        t = (t * &c) % pv;
        r = (r * &b) % pv;
    }
    r
}

/// Square root of `d` modulo `p^k`, in `[0, p^k)`.
///
/// Of the two roots the one whose balanced residue mod `p` is positive is
/// returned, so lifts to different precisions agree on their common digits.
pub fn hensel_sqrt(d: &BigInt, p: &Prime, k: u32) -> Result<BigInt> {
    if k == 0 {
        return Err(Error::InvalidArgument("precision must be at least 1".into()));
    }
    if d.mod_floor(p.value()).is_zero() {
        return Err(Error::InvalidArgument(format!("{p} divides {d}")));
    }
    if !is_residue_mod_p(d, p) {
        return Err(Error::NotAResidue { d: d.to_string(), p: p.to_string() });
    }
    let mut r = sqrt_mod_p(d, p);
    if symmetric_mod(&r, p.value()).is_negative() {
        r = p.value() - r;
    }
    let mut prec = 1u32;
    while prec < k {
        prec = (prec * 2).min(k);
        r = newton_sqrt_step(&r, d, &p.pow(prec))?;
    }
    Ok(r.mod_floor(&p.pow(k)))
}

/// One Newton step `r - (r^2 - d) / (2r)` modulo `m`.
pub(crate) fn newton_sqrt_step(r: &BigInt, d: &BigInt, m: &BigInt) -> Result<BigInt> {
    let inv = mod_inverse(&(r << 1), m)?;
    Ok((r - (r * r - d) * inv).mod_floor(m))
}

/// Balanced digits of a p-adic number over a window of exponents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DigitWindow {
    /// Exponent of `digits[0]`.
    pub start_exp: i64,
    pub digits: Vec<BalancedDigit>,
}

impl DigitWindow {
    /// Digit at exponent `e`, zero outside the window.
    pub fn digit(&self, e: i64) -> BigInt {
        let i = e - self.start_exp;
        if i < 0 {
            return BigInt::zero();
        }
        self.digits
            .get(i as usize)
            .map(|d| d.value().clone())
            .unwrap_or_default()
    }

    pub fn end_exp(&self) -> i64 {
        self.start_exp + self.digits.len() as i64 - 1
    }
}

/// An element `num / p^pexp` of `Z[1/p]`, kept with `p` not dividing `num`
/// whenever `pexp > 0`.
///
/// Used both for partial quotients and for the continuants `A_n`, `B_n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PartialQuotient {
    num: BigInt,
    pexp: u32,
    den: BigInt,
}

impl PartialQuotient {
    pub fn new(num: BigInt, pexp: u32, p: &Prime) -> Self {
        let mut num = num;
        let mut pexp = pexp;
        if num.is_zero() {
            pexp = 0;
        } else if pexp > 0 {
            let (v, u) = strip_p(&num, p);
            let cut = (v.min(pexp as u64)) as u32;
            if cut > 0 {
                num = u * p.pow(v as u32 - cut);
                pexp -= cut;
            }
        }
        let den = p.pow(pexp);
        PartialQuotient { num, pexp, den }
    }

    pub fn integer(n: impl Into<BigInt>) -> Self {
        PartialQuotient { num: n.into(), pexp: 0, den: BigInt::one() }
    }

    pub fn zero() -> Self {
        Self::integer(0)
    }

    pub fn num(&self) -> &BigInt {
        &self.num
    }

    pub fn pexp(&self) -> u32 {
        self.pexp
    }

    /// `p^pexp`.
    pub fn den(&self) -> &BigInt {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Euclidean sign of the value: -1, 0 or 1.
    pub fn signum(&self) -> i8 {
        if self.num.is_positive() {
            1
        } else if self.num.is_negative() {
            -1
        } else {
            0
        }
    }

    pub fn valuation(&self, p: &Prime) -> Valuation {
        if self.num.is_zero() {
            Valuation::Infinite
        } else if self.pexp > 0 {
            Valuation::Finite(-(self.pexp as i64))
        } else {
            valuation_int(&self.num, p)
        }
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.num.clone(), self.den.clone())
    }

    /// Euclidean absolute value as `f64`, for reporting only.
    pub fn to_f64(&self) -> f64 {
        self.to_rational().to_f64().unwrap_or(f64::NAN)
    }

    fn aligned(&self, other: &Self) -> (BigInt, BigInt, u32) {
        match self.pexp.cmp(&other.pexp) {
            Ordering::Equal => (self.num.clone(), other.num.clone(), self.pexp),
            Ordering::Less => {
                let scale = &other.den / &self.den;
                (&self.num * scale, other.num.clone(), other.pexp)
            }
            Ordering::Greater => {
                let scale = &self.den / &other.den;
                (self.num.clone(), &other.num * scale, self.pexp)
            }
        }
    }

    pub fn add(&self, other: &Self, p: &Prime) -> Self {
        let (a, b, e) = self.aligned(other);
        PartialQuotient::new(a + b, e, p)
    }

    pub fn sub(&self, other: &Self, p: &Prime) -> Self {
        let (a, b, e) = self.aligned(other);
        PartialQuotient::new(a - b, e, p)
    }

    pub fn mul(&self, other: &Self, p: &Prime) -> Self {
        PartialQuotient::new(&self.num * &other.num, self.pexp + other.pexp, p)
    }

    /// `self * other + addend`, the continuant step.
    pub fn mul_add(&self, other: &Self, addend: &Self, p: &Prime) -> Self {
        self.mul(other, p).add(addend, p)
    }

    /// Parses `n` or `n/d` where `d` is a power of `p`.
    pub fn parse(s: &str, p: &Prime) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("cannot parse partial quotient {s:?}"));
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s.trim(), "1"),
        };
        let n = BigInt::from_str(n).map_err(|_| bad())?;
        let d = BigInt::from_str(d).map_err(|_| bad())?;
        if !d.is_positive() {
            return Err(bad());
        }
        let (e, u) = strip_p(&d, p);
        if !u.is_one() {
            return Err(Error::InvalidArgument(format!("{d} is not a power of {p}")));
        }
        Ok(PartialQuotient::new(n, e as u32, p))
    }
}

impl fmt::Display for PartialQuotient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pexp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl Serialize for PartialQuotient {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Serde adapter writing big integers as decimal strings.
pub mod bigint_str {
    use super::*;

    pub fn serialize<S: Serializer>(n: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(n)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        BigInt::from_str(&s).map_err(serde::de::Error::custom)
    }
}
