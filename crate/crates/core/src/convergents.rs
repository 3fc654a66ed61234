//! Continuants `A_n`, `B_n` and the valuation of the approximation error.
//!
//! `A_n = b_n A_{n-1} + A_{n-2}` and `B_n = b_n B_{n-1} + B_{n-2}` with
//! `A_{-1} = 1`, `B_{-1} = 0`, `A_0 = b_0`, `B_0 = 1`. Since `B_0 = 1` does
//! not depend on `b_0`, the closed form for the valuation of `B_n` starts
//! at `b_1`: `v_p(B_n) = v_p(b_1) + ... + v_p(b_n)`.

use num_bigint::BigInt;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::padic::{PartialQuotient, Prime, Valuation};
use crate::quadratic::QuadElem;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Convergent {
    pub index: usize,
    pub numer: PartialQuotient,
    pub denom: PartialQuotient,
}

/// `A_n / B_n` for `n = 0..=up_to`.
pub fn convergent_seq(
    quotients: &[PartialQuotient],
    up_to: usize,
    p: &Prime,
) -> Result<Vec<Convergent>> {
    if up_to >= quotients.len() {
        return Err(Error::Range { index: up_to, available: quotients.len() });
    }
    let mut out = Vec::with_capacity(up_to + 1);
    let (mut a_prev, mut b_prev) = (PartialQuotient::integer(1), PartialQuotient::zero());
    let (mut a, mut b) = (quotients[0].clone(), PartialQuotient::integer(1));
    out.push(Convergent { index: 0, numer: a.clone(), denom: b.clone() });
    for (i, q) in quotients.iter().enumerate().take(up_to + 1).skip(1) {
        let a_next = q.mul_add(&a, &a_prev, p);
        let b_next = q.mul_add(&b, &b_prev, p);
        a_prev = std::mem::replace(&mut a, a_next);
        b_prev = std::mem::replace(&mut b, b_next);
        out.push(Convergent { index: i, numer: a.clone(), denom: b.clone() });
    }
    Ok(out)
}

/// `v_p(b_1) + ... + v_p(b_n)`.
pub fn valuation_sum(quotients: &[PartialQuotient], n: usize, p: &Prime) -> Result<i64> {
    if n >= quotients.len() {
        return Err(Error::Range { index: n, available: quotients.len() });
    }
    let mut total = 0i64;
    for (i, q) in quotients.iter().enumerate().take(n + 1).skip(1) {
        match q.valuation(p) {
            Valuation::Finite(v) => total += v,
            Valuation::Infinite => {
                return Err(Error::InvalidArgument(format!("b_{i} = 0")));
            }
        }
    }
    Ok(total)
}

/// `v_p(B_n)`, computed from the closed form and from the exact continuant;
/// the two must agree.
pub fn valuation_of_b(quotients: &[PartialQuotient], n: usize, p: &Prime) -> Result<i64> {
    let seq = convergent_seq(quotients, n, p)?;
    check_valuations(quotients, &seq, p)?;
    Ok(seq[n].denom.valuation(p).finite().expect("checked nonzero"))
}

/// Checks the closed form against every `B_i` in `seq`.
pub fn check_valuations(
    quotients: &[PartialQuotient],
    seq: &[Convergent],
    p: &Prime,
) -> Result<()> {
    let mut sum = 0i64;
    for c in seq {
        if c.index > 0 {
            sum += quotients[c.index]
                .valuation(p)
                .finite()
                .ok_or_else(|| Error::InvalidArgument(format!("b_{} = 0", c.index)))?;
        }
        let direct = c.denom.valuation(p);
        if direct != sum {
            return Err(Error::InvariantViolation(format!(
                "v_p(B_{}) is {direct} but the quotient valuations sum to {sum}",
                c.index
            )));
        }
    }
    Ok(())
}

/// `v_p(x - A_n/B_n)`, checked against `-v_p(B_n B_{n+1})`.
pub fn approx_error_valuation(x: &QuadElem, quotients: &[PartialQuotient], n: usize) -> Result<i64> {
    let p = x.prime();
    let seq = convergent_seq(quotients, n + 1, p)?;
    let (cn, cn1) = (&seq[n], &seq[n + 1]);
    // A_n / B_n = (numer.num * denom.den) / (numer.den * denom.num)
    let num = cn.numer.num() * cn.denom.den();
    let den = cn.numer.den() * cn.denom.num();
    if den == BigInt::from(0) {
        return Err(Error::DivisionByZero);
    }
    let diff = x.sub_rational(&num, &den);
    let direct = match diff.valuation() {
        Valuation::Finite(v) => v,
        Valuation::Infinite => {
            return Err(Error::InvalidArgument(format!(
                "x equals its convergent A_{n}/B_{n}"
            )))
        }
    };
    let vb = cn.denom.valuation(p) + cn1.denom.valuation(p);
    if vb != -direct {
        return Err(Error::InvariantViolation(format!(
            "v_p(x - A_{n}/B_{n}) = {direct} but v_p(B_n B_n+1) = {vb}"
        )));
    }
    Ok(direct)
}

/// `v_p(x - C_n)` for the digit truncation `C_n` of `x` through exponent
/// `n`, checked to be at least `n + 1`.
pub fn truncation_error(x: &QuadElem, n: i64) -> Result<Valuation> {
    if x.is_zero() {
        return Ok(Valuation::Infinite);
    }
    let w = x.digits(n)?;
    let p = x.prime();
    let low = w.start_exp.min(0);
    let shift = (-low) as u32;
    let mut num = BigInt::from(0);
    for e in (low..=n).rev() {
        num = num * p.value() + w.digit(e);
    }
    let v = x.sub_rational(&num, &p.pow(shift)).valuation();
    if v < n + 1 {
        return Err(Error::InvariantViolation(format!(
            "digit truncation through p^{n} leaves valuation {v}"
        )));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::{expand, AlgorithmKind};
    use crate::quadratic::QuadField;
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn p(v: u64) -> Prime {
        Prime::new(v).unwrap()
    }

    fn ratio(c: &Convergent) -> BigRational {
        c.numer.to_rational() / c.denom.to_rational()
    }

    #[test]
    fn single_quotient() {
        let p = p(5);
        let q = vec![PartialQuotient::parse("7/5", &p).unwrap()];
        let seq = convergent_seq(&q, 0, &p).unwrap();
        assert_eq!(seq[0].numer, q[0]);
        assert_eq!(seq[0].denom, PartialQuotient::integer(1));
        assert!(matches!(convergent_seq(&q, 1, &p), Err(Error::Range { index: 1, available: 1 })));
        assert_eq!(valuation_of_b(&q, 0, &p).unwrap(), 0);
    }

    #[test]
    fn finite_expansions_reconstruct() {
        let p23 = p(23);
        let f = QuadField::rational(&p23);
        for (n, d) in [(-17, 29), (-15, 109)] {
            for alg in [AlgorithmKind::New, AlgorithmKind::BrowkinII] {
                let x = QuadElem::rational(n, d, &f).unwrap();
                let run = expand(&x, alg, 100).unwrap();
                let last = run.quotients.len() - 1;
                let seq = convergent_seq(&run.quotients, last, &p23).unwrap();
                assert_eq!(ratio(&seq[last]), BigRational::new(n.into(), d.into()));
            }
        }
    }

    #[test]
    fn sqrt34_first_error() {
        let p5 = p(5);
        let f = QuadField::new(34, &p5).unwrap();
        let x = QuadElem::sqrt(&f).unwrap();
        let run = expand(&x, AlgorithmKind::BrowkinII, 50).unwrap();
        assert_eq!(approx_error_valuation(&x, &run.quotients, 0).unwrap(), 1);
        assert_eq!(valuation_of_b(&run.quotients, 1, &p5).unwrap(), -1);
    }

    #[test]
    fn closed_form_without_b0_is_the_right_one() {
        // b_0 = 7/5 has valuation -1, yet B_1 = b_1 only.
        let p5 = p(5);
        let q: Vec<_> = ["7/5", "2/5"].iter().map(|s| PartialQuotient::parse(s, &p5).unwrap()).collect();
        let seq = convergent_seq(&q, 1, &p5).unwrap();
        assert_eq!(seq[1].denom.valuation(&p5), -1);
        assert_eq!(valuation_sum(&q, 1, &p5).unwrap(), -1);
    }

    #[test]
    fn truncation_of_sqrt34() {
        let p5 = p(5);
        let f = QuadField::new(34, &p5).unwrap();
        let x = QuadElem::sqrt(&f).unwrap();
        assert!(truncation_error(&x, 0).unwrap() >= 1);
        assert!(truncation_error(&x, 1).unwrap() >= 2);
        let y = QuadElem::new(1, 1, 25, &f).unwrap();
        assert!(truncation_error(&y, 3).unwrap() >= 4);
    }

    const CASES: [(i64, u64); 5] = [(34, 5), (19, 5), (2, 7), (41, 23), (3, 11)];

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn continuant_identities(
            case in 0..CASES.len(),
            a in -50i64..50,
            b in 1i64..6,
            c in 1i64..60,
            alg in 0..4usize,
        ) {
            let (d, pv) = CASES[case];
            let p = p(pv);
            let f = QuadField::new(d, &p).unwrap();
            let x = QuadElem::new(a, b, c, &f).unwrap();
            let run = expand(&x, AlgorithmKind::ALL[alg], 40).unwrap();
            let q = run.quotients_up_to(24);
            let seq = convergent_seq(&q, 22, &p).unwrap();
            check_valuations(&q, &seq, &p).unwrap();
            for n in 1..=20 {
                approx_error_valuation(&x, &q, n).unwrap();
                // A_n B_{n-1} - A_{n-1} B_n = (-1)^{n-1}
                let det = seq[n].numer.mul(&seq[n - 1].denom, &p)
                    .sub(&seq[n - 1].numer.mul(&seq[n].denom, &p), &p);
                let sign = if n % 2 == 1 { 1 } else { -1 };
                prop_assert_eq!(det, PartialQuotient::integer(sign));
            }
            // v(alpha_{n+1} B_n + B_{n-1}) = v(B_{n+1})
            let mut alpha = x.clone();
            for n in 0..=20usize {
                let next = alpha.sub_pq(&q[n]).invert().unwrap();
                if n >= 1 {
                    let bn = &seq[n].denom;
                    let bm = &seq[n - 1].denom;
                    let scaled = QuadElem::new(
                        next.a() * bn.num(), next.b() * bn.num(), next.c() * bn.den(), &f,
                    ).unwrap();
                    let lhs = scaled.add_rational(bm.num(), bm.den()).valuation();
                    prop_assert_eq!(lhs, seq[n + 1].denom.valuation(&p));
                }
                alpha = next;
            }
        }
    }
}
