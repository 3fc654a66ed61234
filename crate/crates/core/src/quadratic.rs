//! Exact elements `(a + b*sqrt(D)) / c` of `Q(sqrt(D))`, embedded in `Q_p`.
//!
//! The embedding fixes one of the two p-adic square roots of `D`: the one
//! whose first nonzero balanced digit is positive. Every p-adic quantity
//! (valuation, digits, Browkin's floors `s` and `t`) is computed by lifting
//! that root only as far as the question requires.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{
    balanced_digits_mod, hensel_sqrt, mod_inverse, newton_sqrt_step, strip_p, symmetric_mod,
    valuation_int, DigitWindow, PartialQuotient, Prime, Valuation,
};

/// Which of Browkin's two floor functions to apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FloorKind {
    /// Digits at exponents `<= 0`.
    S,
    /// Digits at exponents `<= -1`.
    T,
}

#[derive(Debug)]
struct Radicand {
    d: BigInt,
    /// `D = p^(2j) * unit`.
    half_val: u32,
    unit: BigInt,
    /// Root of `unit` modulo `p^prec`, grown on demand.
    root: RwLock<(BigInt, u32)>,
}

/// The context every element lives in: the prime and, for irrational
/// elements, the fixed radicand `D`.
#[derive(Debug)]
pub struct QuadField {
    p: Prime,
    radicand: Option<Radicand>,
}

impl QuadField {
    /// `Q(sqrt(D))` inside `Q_p`. Fails when `D` is a perfect square or has no
    /// square root in `Q_p`.
    pub fn new(d: impl Into<BigInt>, p: &Prime) -> Result<Arc<Self>> {
        let d = d.into();
        if d.is_zero() {
            return Err(Error::InvalidArgument("D must be nonzero".into()));
        }
        if !d.is_negative() && d.sqrt().pow(2) == d {
            return Err(Error::InvalidArgument(format!("D = {d} is a perfect square")));
        }
        let (v, unit) = strip_p(&d, p);
        if v % 2 == 1 {
            return Err(Error::NotAResidue { d: d.to_string(), p: p.to_string() });
        }
        let r = hensel_sqrt(&unit, p, 1)?;
        Ok(Arc::new(QuadField {
            p: p.clone(),
            radicand: Some(Radicand {
                d,
                half_val: (v / 2) as u32,
                unit,
                root: RwLock::new((r, 1)),
            }),
        }))
    }

    /// A context for rational elements only.
    pub fn rational(p: &Prime) -> Arc<Self> {
        Arc::new(QuadField { p: p.clone(), radicand: None })
    }

    pub fn prime(&self) -> &Prime {
        &self.p
    }

    pub fn radicand(&self) -> Option<&BigInt> {
        self.radicand.as_ref().map(|r| &r.d)
    }

    fn d_or_zero(&self) -> BigInt {
        self.radicand().cloned().unwrap_or_default()
    }

    /// `sqrt(D) mod p^prec`.
    pub fn sqrt_mod(&self, prec: u32) -> BigInt {
        let Some(rad) = &self.radicand else {
            return BigInt::zero();
        };
        if prec <= rad.half_val {
            return BigInt::zero();
        }
        let k = prec - rad.half_val;
        let unit_root = self.unit_root(rad, k);
        (unit_root * self.p.pow(rad.half_val)).mod_floor(&self.p.pow(prec))
    }

    fn unit_root(&self, rad: &Radicand, k: u32) -> BigInt {
        {
            let guard = rad.root.read().unwrap();
            if guard.1 >= k {
                return guard.0.mod_floor(&self.p.pow(k));
            }
        }
        let mut guard = rad.root.write().unwrap();
        if guard.1 < k {
            // Overshoot so that slowly growing requests lift rarely.
            let target = k.max(guard.1 * 2);
            let (mut r, mut prec) = guard.clone();
            while prec < target {
                prec = (prec * 2).min(target);
                r = newton_sqrt_step(&r, &rad.unit, &self.p.pow(prec))
                    .expect("the unit root is invertible");
            }
            *guard = (r, prec);
        }
        guard.0.mod_floor(&self.p.pow(k))
    }

    fn same_as(&self, other: &QuadField) -> bool {
        self.p == other.p && self.radicand() == other.radicand()
    }
}

/// A canonical element `(a + b*sqrt(D)) / c` with `gcd(a, b, c) = 1`, `c > 0`.
///
/// Equality compares the canonical coefficients, so two complete quotients
/// are equal exactly when they are the same field element.
#[derive(Clone)]
pub struct QuadElem {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    field: Arc<QuadField>,
}

/// Browkin's floors and the exponent-0 digit of an element, from one lift.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Floors {
    pub s: PartialQuotient,
    pub t: PartialQuotient,
    /// The digit at exponent 0.
    pub a0: BigInt,
    /// `v_p(x)` when it is `<= 0`; `None` when `v_p(x) >= 1` or `x = 0`.
    pub nonpositive_valuation: Option<i64>,
}

impl QuadElem {
    pub fn new(
        a: impl Into<BigInt>,
        b: impl Into<BigInt>,
        c: impl Into<BigInt>,
        field: &Arc<QuadField>,
    ) -> Result<Self> {
        let (a, b, c) = (a.into(), b.into(), c.into());
        if c.is_zero() {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        if !b.is_zero() && field.radicand.is_none() {
            return Err(Error::InvalidArgument(
                "irrational part requires a radicand".into(),
            ));
        }
        Ok(Self::canonical(a, b, c, field.clone()))
    }

    fn canonical(mut a: BigInt, mut b: BigInt, mut c: BigInt, field: Arc<QuadField>) -> Self {
        let g = a.gcd(&b).gcd(&c);
        if !g.is_one() {
            a /= &g;
            b /= &g;
            c /= &g;
        }
        if c.is_negative() {
            a = -a;
            b = -b;
            c = -c;
        }
        QuadElem { a, b, c, field }
    }

    /// `sqrt(D)` itself.
    pub fn sqrt(field: &Arc<QuadField>) -> Result<Self> {
        Self::new(0, 1, 1, field)
    }

    pub fn rational(
        num: impl Into<BigInt>,
        den: impl Into<BigInt>,
        field: &Arc<QuadField>,
    ) -> Result<Self> {
        Self::new(num, 0, den, field)
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }

    pub fn b(&self) -> &BigInt {
        &self.b
    }

    pub fn c(&self) -> &BigInt {
        &self.c
    }

    pub fn field(&self) -> &Arc<QuadField> {
        &self.field
    }

    pub fn prime(&self) -> &Prime {
        &self.field.p
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// `(a, -b, c)`.
    pub fn conjugate(&self) -> Self {
        QuadElem {
            a: self.a.clone(),
            b: -&self.b,
            c: self.c.clone(),
            field: self.field.clone(),
        }
    }

    /// `a^2 - b^2 D`, the norm of the numerator.
    pub fn norm_numerator(&self) -> BigInt {
        &self.a * &self.a - &self.b * &self.b * self.field.d_or_zero()
    }

    fn numerator_mod(&self, prec: u32) -> BigInt {
        let m = self.field.p.pow(prec);
        if self.b.is_zero() {
            return self.a.mod_floor(&m);
        }
        (&self.a + &self.b * self.field.sqrt_mod(prec)).mod_floor(&m)
    }

    /// Exact p-adic valuation.
    ///
    /// `v(a + b sqrt D) <= v(a^2 - b^2 D)` because both conjugates are
    /// integral, so lifting the root one digit past the norm's valuation
    /// always exposes the leading digit, however much cancellation occurs.
    pub fn valuation(&self) -> Valuation {
        if self.is_zero() {
            return Valuation::Infinite;
        }
        let p = &self.field.p;
        let vc = strip_p(&self.c, p).0 as i64;
        if self.b.is_zero() {
            return Valuation::Finite(valuation_int(&self.a, p).finite().unwrap() - vc);
        }
        let vn = valuation_int(&self.norm_numerator(), p)
            .finite()
            .expect("D is not a square");
        let r = self.numerator_mod(vn as u32 + 1);
        let w = strip_p(&r, p).0 as i64;
        Valuation::Finite(w - vc)
    }

    /// `x * p^(-e) mod p^k` as an integer in `[0, p^k)`. Requires `v(x) >= e`.
    pub fn residue(&self, e: i64, k: u32) -> Result<BigInt> {
        let p = &self.field.p;
        let m = p.pow(k);
        if self.is_zero() {
            return Ok(BigInt::zero());
        }
        let (vc, cu) = strip_p(&self.c, p);
        let inv = mod_inverse(&cu, &m)?;
        let shift = vc as i64 + e;
        let r = if shift >= 0 {
            let shift = shift as u32;
            let r = self.numerator_mod(shift + k);
            let (q, rem) = r.div_rem(&p.pow(shift));
            if !rem.is_zero() {
                return Err(Error::InvalidArgument(format!(
                    "valuation of {self} is below {e}"
                )));
            }
            q
        } else {
            self.numerator_mod(k) * p.pow((-shift) as u32)
        };
        Ok((r * inv).mod_floor(&m))
    }

    /// Balanced digits from `v_p(x)` up to `up_to_exp` inclusive.
    pub fn digits(&self, up_to_exp: i64) -> Result<DigitWindow> {
        let Valuation::Finite(v) = self.valuation() else {
            return Err(Error::InvalidArgument("digits of zero".into()));
        };
        if up_to_exp < v {
            return Ok(DigitWindow { start_exp: v, digits: Vec::new() });
        }
        let k = (up_to_exp - v + 1) as u32;
        let r = self.residue(v, k)?;
        Ok(DigitWindow { start_exp: v, digits: balanced_digits_mod(&r, &self.field.p, k) })
    }

    /// `s(x)`, `t(x)` and the digit `a_0`, from a lift of the root to
    /// precision `v_p(c) + 1` only.
    pub fn floors(&self) -> Floors {
        let zero = || Floors {
            s: PartialQuotient::zero(),
            t: PartialQuotient::zero(),
            a0: BigInt::zero(),
            nonpositive_valuation: None,
        };
        if self.is_zero() {
            return zero();
        }
        let p = &self.field.p;
        let (vc, cu) = strip_p(&self.c, p);
        let r = self.numerator_mod(vc as u32 + 1);
        if r.is_zero() {
            return zero();
        }
        // v(numerator) = w <= v(c), so v(x) = -(vc - w).
        let (w, ru) = strip_p(&r, p);
        let m = (vc - w) as u32;
        let pm1 = p.pow(m + 1);
        let inv = mod_inverse(&cu, &pm1).expect("unit denominator");
        let u = symmetric_mod(&(ru * inv), &pm1);
        let pm = p.pow(m);
        let t = if m == 0 { BigInt::zero() } else { symmetric_mod(&u, &pm) };
        let a0 = (&u - &t) / &pm;
        Floors {
            s: PartialQuotient::new(u, m, p),
            t: PartialQuotient::new(t, m, p),
            a0,
            nonpositive_valuation: Some(-(m as i64)),
        }
    }

    pub fn floor(&self, kind: FloorKind) -> PartialQuotient {
        let f = self.floors();
        match kind {
            FloorKind::S => f.s,
            FloorKind::T => f.t,
        }
    }

    pub fn sub_pq(&self, q: &PartialQuotient) -> Self {
        self.sub_rational(q.num(), q.den())
    }

    /// `x - num/den`; `den` must be nonzero.
    pub fn sub_rational(&self, num: &BigInt, den: &BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        Self::canonical(
            &self.a * den - num * &self.c,
            &self.b * den,
            &self.c * den,
            self.field.clone(),
        )
    }

    pub fn add_rational(&self, num: &BigInt, den: &BigInt) -> Self {
        self.sub_rational(&-num, den)
    }

    /// `1/x = c (a - b sqrt D) / (a^2 - b^2 D)`.
    pub fn invert(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::canonical(
            &self.c * &self.a,
            -(&self.c * &self.b),
            self.norm_numerator(),
            self.field.clone(),
        ))
    }

    /// The rational value when `b = 0`.
    pub fn to_rational(&self) -> Option<num_rational::BigRational> {
        self.is_rational()
            .then(|| num_rational::BigRational::new(self.a.clone(), self.c.clone()))
    }
}

impl PartialEq for QuadElem {
    fn eq(&self, other: &Self) -> bool {
        self.a == other.a
            && self.b == other.b
            && self.c == other.c
            && (Arc::ptr_eq(&self.field, &other.field) || self.field.same_as(&other.field))
    }
}

impl Eq for QuadElem {}

impl Hash for QuadElem {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.a.hash(state);
        self.b.hash(state);
        self.c.hash(state);
    }
}

impl fmt::Display for QuadElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return if self.c.is_one() {
                write!(f, "{}", self.a)
            } else {
                write!(f, "{}/{}", self.a, self.c)
            };
        }
        let d = self.field.d_or_zero();
        let surd = if self.b.is_one() {
            format!("sqrt({d})")
        } else if self.b == -BigInt::one() {
            format!("-sqrt({d})")
        } else {
            format!("{}*sqrt({d})", self.b)
        };
        let num = if self.a.is_zero() {
            surd
        } else if surd.starts_with('-') {
            format!("{} - {}", self.a, &surd[1..])
        } else {
            format!("{} + {}", self.a, surd)
        };
        if self.c.is_one() {
            f.write_str(&num)
        } else {
            write!(f, "({num})/{}", self.c)
        }
    }
}

impl fmt::Debug for QuadElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QuadElem[{self} in Q_{}]", self.field.p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(v: u64) -> Prime {
        Prime::new(v).unwrap()
    }

    fn bi(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn field(d: i64, q: u64) -> Arc<QuadField> {
        QuadField::new(d, &p(q)).unwrap()
    }

    fn coeffs(x: &QuadElem) -> (BigInt, BigInt, BigInt) {
        (x.a().clone(), x.b().clone(), x.c().clone())
    }

    #[test]
    fn field_construction() {
        assert!(QuadField::new(36, &p(5)).is_err());
        assert!(matches!(QuadField::new(2, &p(5)), Err(Error::NotAResidue { .. })));
        assert!(matches!(QuadField::new(10, &p(5)), Err(Error::NotAResidue { .. })));
        assert!(QuadField::new(150, &p(5)).is_ok());
        assert!(QuadField::new(-1, &p(5)).is_ok());
    }

    #[test]
    fn normalize_examples() {
        let f = field(34, 5);
        let x = QuadElem::new(2, 2, 4, &f).unwrap();
        assert_eq!(coeffs(&x), (bi(1), bi(1), bi(2)));
        let y = QuadElem::new(1, 0, -3, &f).unwrap();
        assert_eq!(coeffs(&y), (bi(-1), bi(0), bi(3)));
        let z = QuadElem::new(0, 5, 5, &field(19, 5)).unwrap();
        assert_eq!(coeffs(&z), (bi(0), bi(1), bi(1)));
        assert!(QuadElem::new(1, 1, 0, &f).is_err());
        let again = QuadElem::new(x.a().clone(), x.b().clone(), x.c().clone(), &f).unwrap();
        assert_eq!(again, x);
    }

    #[test]
    fn conjugates() {
        let f = field(30, 7);
        let x = QuadElem::new(3, 1, 1, &f).unwrap();
        assert_eq!(coeffs(&x.conjugate()), (bi(3), bi(-1), bi(1)));
        let r = QuadElem::rational(5, 3, &f).unwrap();
        assert_eq!(r.conjugate(), r);
        assert_eq!(x.conjugate().conjugate(), x);
    }

    #[test]
    fn valuation_examples() {
        let f = field(34, 5);
        let s = QuadElem::sqrt(&f).unwrap();
        assert_eq!(s.valuation(), 0);
        let x = QuadElem::new(2, -1, 1, &f).unwrap();
        assert_eq!(x.valuation(), 1);
        assert_eq!(x.conjugate().valuation(), 0);
        let r = QuadElem::rational(50, 3, &f).unwrap();
        assert_eq!(r.valuation(), 2);
        let zero = QuadElem::rational(0, 1, &f).unwrap();
        assert_eq!(zero.valuation(), Valuation::Infinite);
    }

    #[test]
    fn valuation_deep_cancellation() {
        // a = r mod 5^40 agrees with sqrt(34) to 40 digits.
        let f = field(34, 5);
        let r = f.sqrt_mod(40);
        let x = QuadElem::new(-r, 1, 1, &f).unwrap();
        assert!(x.valuation() >= 40);
        assert_eq!(x.conjugate().valuation(), 0);
    }

    #[test]
    fn digit_examples() {
        let f = field(34, 5);
        let s = QuadElem::sqrt(&f).unwrap();
        let w = s.digits(1).unwrap();
        assert_eq!((w.start_exp, w.digit(0), w.digit(1)), (0, bi(2), bi(-1)));
        let half = QuadElem::rational(1, 2, &f).unwrap();
        let w = half.digits(0).unwrap();
        assert_eq!((w.start_exp, w.digits.len(), w.digit(0)), (0, 1, bi(-2)));
        let fifth = QuadElem::rational(1, 5, &f).unwrap();
        let w = fifth.digits(0).unwrap();
        assert_eq!((w.start_exp, w.digit(-1), w.digit(0)), (-1, bi(1), bi(0)));
        assert!(QuadElem::rational(0, 1, &f).unwrap().digits(3).is_err());
    }

    #[test]
    fn digits_of_scaled_root() {
        // sqrt(150) = 5 sqrt(6) in Q_5.
        let f = field(150, 5);
        let s = QuadElem::sqrt(&f).unwrap();
        assert_eq!(s.valuation(), 1);
        let w = s.digits(3).unwrap();
        let six = hensel_sqrt(&bi(6), &p(5), 3).unwrap();
        let expect = balanced_digits_mod(&six, &p(5), 3);
        assert_eq!(w.start_exp, 1);
        assert_eq!(w.digits, expect);
    }

    #[test]
    fn floor_examples() {
        let f = field(34, 5);
        let s = QuadElem::sqrt(&f).unwrap();
        assert_eq!(s.floor(FloorKind::S).to_string(), "2");
        assert!(s.floor(FloorKind::T).is_zero());
        let rf = QuadField::rational(&p(23));
        let x = QuadElem::rational(-17, 29, &rf).unwrap();
        assert_eq!(x.floor(FloorKind::S).to_string(), "1");
        let y = QuadElem::rational(-15, 109, &rf).unwrap();
        assert_eq!(y.floor(FloorKind::S).to_string(), "-9");
        let small = QuadElem::rational(5, 7, &rf).unwrap();
        assert!(small.floor(FloorKind::T).is_zero());
    }

    #[test]
    fn sub_and_invert() {
        let f = field(34, 5);
        let s = QuadElem::sqrt(&f).unwrap();
        let inv = s.invert().unwrap();
        assert_eq!(coeffs(&inv), (bi(0), bi(1), bi(34)));
        assert_eq!(s.sub_pq(&PartialQuotient::zero()), s);
        let a1 = s.sub_pq(&PartialQuotient::integer(2)).invert().unwrap();
        assert_eq!(a1.floor(FloorKind::T).to_string(), "-1/5");
        assert!(matches!(
            QuadElem::rational(0, 1, &f).unwrap().invert(),
            Err(Error::DivisionByZero)
        ));
    }

    #[test]
    fn rational_field_rejects_surds() {
        let rf = QuadField::rational(&p(5));
        assert!(QuadElem::new(1, 1, 1, &rf).is_err());
        assert!(QuadElem::sqrt(&rf).is_err());
    }

    #[test]
    fn display() {
        let f = field(34, 5);
        assert_eq!(QuadElem::sqrt(&f).unwrap().to_string(), "sqrt(34)");
        assert_eq!(QuadElem::new(2, -1, 3, &f).unwrap().to_string(), "(2 - sqrt(34))/3");
        assert_eq!(QuadElem::new(1, 4, 1, &f).unwrap().to_string(), "1 + 4*sqrt(34)");
    }

    fn arb_elem() -> impl Strategy<Value = (i64, i64, i64, usize)> {
        (-400i64..400, -30i64..30, 1i64..400, 0usize..4)
    }

    const CASES: [(i64, u64); 4] = [(34, 5), (19, 5), (2, 7), (41, 23)];

    fn s_values(x: &QuadElem) -> (PartialQuotient, PartialQuotient) {
        (x.floor(FloorKind::S), x.floor(FloorKind::T))
    }

    proptest! {
        #[test]
        fn floor_bounds_and_stripping((a, b, c, i) in arb_elem()) {
            let (d, q) = CASES[i];
            let f = field(d, q);
            let x = QuadElem::new(a, b, c, &f).unwrap();
            prop_assume!(!x.is_zero());
            let (s, t) = s_values(&x);
            let half_p = q as f64 / 2.0;
            prop_assert!(s.to_f64().abs() < half_p);
            prop_assert!(t.to_f64().abs() < 0.5);
            prop_assert!(x.sub_pq(&s).valuation() >= 1);
            if x.valuation() < 0 {
                prop_assert!(x.sub_pq(&t).valuation() >= 0);
            }
            // Floors agree with explicit digit extraction.
            if x.valuation() <= 0 {
                let w = x.digits(0).unwrap();
                let mut acc = PartialQuotient::zero();
                for e in w.start_exp..=0 {
                    let term = PartialQuotient::new(w.digit(e), (-e) as u32, &p(q));
                    acc = acc.add(&term, &p(q));
                }
                prop_assert_eq!(acc, s);
            }
        }

        #[test]
        fn floor_value_separation((a1, b1, c1, i) in arb_elem(), (a2, b2, c2, _j) in arb_elem()) {
            let (d, q) = CASES[i];
            let f = field(d, q);
            let pr = p(q);
            let x = QuadElem::new(a1, b1, c1, &f).unwrap();
            let y = QuadElem::new(a2, b2, c2, &f).unwrap();
            let (sx, tx) = s_values(&x);
            let (sy, ty) = s_values(&y);
            if sx != sy {
                prop_assert!(sx.sub(&sy, &pr).valuation(&pr) <= 0);
            }
            if tx != ty {
                prop_assert!(tx.sub(&ty, &pr).valuation(&pr) < 0);
            }
        }

        #[test]
        fn field_identities((a, b, c, i) in arb_elem(), n in -50i64..50, e in 0u32..4) {
            let (d, q) = CASES[i];
            let f = field(d, q);
            let pr = p(q);
            let x = QuadElem::new(a, b, c, &f).unwrap();
            prop_assume!(!x.is_zero());
            prop_assert_eq!(x.invert().unwrap().invert().unwrap(), x.clone());
            prop_assert_eq!(x.invert().unwrap().conjugate(), x.conjugate().invert().unwrap());
            let bq = PartialQuotient::new(bi(n), e, &pr);
            prop_assert_eq!(x.sub_pq(&bq).conjugate(), x.conjugate().sub_pq(&bq));
            // valuation is multiplicative under inversion
            let v = x.valuation().finite().unwrap();
            prop_assert_eq!(x.invert().unwrap().valuation(), -v);
        }
    }
}
