//! Determinant test predicting when Browkin II needs its sign correction.
//!
//! For an even-step complete quotient `x` let `n = v_p(x - s(x))` and let
//! `c_n, c_{n+1}, ...` be the digits of `x - s(x)`. The sign matrix is the
//! `n x n` Toeplitz matrix with entry `(i, j) = c_{n+1+i-j}` for `j <= i + 1`
//! and zero above that band. The prediction is `B(alpha_{k+1}) != 0` exactly
//! when its determinant vanishes; both the integer determinant and its
//! residue mod `p` are measured.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::algorithms::{b_classify, ExpansionResult, ExpansionStatus};
use crate::error::{Error, Result};
use crate::padic::{symmetric_mod, Valuation};
use crate::quadratic::{FloorKind, QuadElem};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignMatrix {
    pub n: usize,
    /// Row-major.
    pub entries: Vec<Vec<BigInt>>,
}

impl SignMatrix {
    /// Builds the matrix from the digits `c_n, ..., c_{2n}`.
    pub fn from_digits(c: &[BigInt]) -> Result<Self> {
        if c.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "need digits c_n..c_2n, got {} values",
                c.len()
            )));
        }
        let n = c.len() - 1;
        // c[k] holds c_{n+k}
        let entries = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if j <= i + 1 { c[1 + i - j].clone() } else { BigInt::zero() })
                    .collect()
            })
            .collect();
        Ok(SignMatrix { n, entries })
    }

    /// Exact determinant by fraction-free elimination.
    pub fn determinant(&self) -> BigInt {
        bareiss(self.entries.clone())
    }
}

fn bareiss(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// The sign matrix of `x`.
pub fn sign_matrix(x: &QuadElem) -> Result<SignMatrix> {
    let rest = x.sub_pq(&x.floor(FloorKind::S));
    let n = match rest.valuation() {
        Valuation::Infinite => return Err(Error::Terminated),
        Valuation::Finite(n) => n,
    };
    if n < 1 {
        return Err(Error::ImpossibleState(format!("v(x - s(x)) = {n} for {x}")));
    }
    let window = rest.digits(2 * n)?;
    let c: Vec<BigInt> = (n..=2 * n).map(|e| window.digit(e)).collect();
    SignMatrix::from_digits(&c)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SignPrediction {
    #[serde(with = "crate::padic::bigint_str")]
    pub det_int: BigInt,
    /// Balanced residue of `det_int` mod `p`.
    #[serde(with = "crate::padic::bigint_str")]
    pub det_mod_p: BigInt,
    /// `det_int = 0`.
    pub predicted_nonzero_b: bool,
}

pub fn predict_from_matrix(m: &SignMatrix, p: &BigInt) -> SignPrediction {
    let det_int = m.determinant();
    let det_mod_p = symmetric_mod(&det_int, p);
    let predicted_nonzero_b = det_int.is_zero();
    SignPrediction { det_int, det_mod_p, predicted_nonzero_b }
}

pub fn predict_sign_usage(x: &QuadElem) -> Result<SignPrediction> {
    let m = sign_matrix(x)?;
    Ok(predict_from_matrix(&m, x.prime().value()))
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VariantCounts {
    pub agree: usize,
    pub disagree: usize,
}

/// One even step where at least one determinant variant got it wrong.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Disagreement {
    pub label: String,
    pub step: usize,
    pub n: usize,
    #[serde(with = "crate::padic::bigint_str")]
    pub det_int: BigInt,
    #[serde(with = "crate::padic::bigint_str")]
    pub det_mod_p: BigInt,
    /// `B(alpha_{step+1}) != 0`.
    pub truth_nonzero_b: bool,
    pub int_agrees: bool,
    pub mod_p_agrees: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PredictorReport {
    pub steps: usize,
    pub integer: VariantCounts,
    pub mod_p: VariantCounts,
    pub disagreements: Vec<Disagreement>,
}

/// One row per even step inspected, in input order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepCheck {
    pub step: usize,
    pub n: usize,
    pub prediction: SignPrediction,
    pub truth_nonzero_b: bool,
}

/// Checks every even step `k` of `run` whose successor `alpha_{k+1}` is
/// known, wrapping around the period for periodic runs.
pub fn check_run(run: &ExpansionResult) -> Result<Vec<StepCheck>> {
    let cq = &run.complete_quotients;
    let mut out = Vec::new();
    for k in (0..cq.len()).step_by(2) {
        let next = match (cq.get(k + 1), run.status) {
            (Some(x), _) => x,
            (None, ExpansionStatus::Periodic { preperiod, .. }) => &cq[preperiod],
            (None, _) => break,
        };
        let m = sign_matrix(&cq[k])?;
        let prediction = predict_from_matrix(&m, cq[k].prime().value());
        let truth_nonzero_b = b_classify(next)? != 0;
        out.push(StepCheck { step: k, n: m.n, prediction, truth_nonzero_b });
    }
    Ok(out)
}

/// Compares both determinant variants with `B(alpha_{k+1})` over labelled runs.
pub fn predictor_agreement<'a, I>(runs: I) -> Result<PredictorReport>
where
    I: IntoIterator<Item = (&'a str, &'a ExpansionResult)>,
{
    let mut report = PredictorReport::default();
    for (label, run) in runs {
        for check in check_run(run)? {
            let truth = check.truth_nonzero_b;
            let int_agrees = check.prediction.predicted_nonzero_b == truth;
            let mod_p_agrees = check.prediction.det_mod_p.is_zero() == truth;
            report.steps += 1;
            tally(&mut report.integer, int_agrees);
            tally(&mut report.mod_p, mod_p_agrees);
            if !(int_agrees && mod_p_agrees) {
                report.disagreements.push(Disagreement {
                    label: label.to_string(),
                    step: check.step,
                    n: check.n,
                    det_int: check.prediction.det_int,
                    det_mod_p: check.prediction.det_mod_p,
                    truth_nonzero_b: truth,
                    int_agrees,
                    mod_p_agrees,
                });
            }
        }
    }
    Ok(report)
}

fn tally(c: &mut VariantCounts, ok: bool) {
    if ok {
        c.agree += 1;
    } else {
        c.disagree += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::{expand, AlgorithmKind};
    use crate::padic::Prime;
    use crate::quadratic::QuadField;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn one_by_one() {
        let p = BigInt::from(5);
        let zero = SignMatrix::from_digits(&ints(&[1, 0])).unwrap();
        assert_eq!(zero.entries, vec![ints(&[0])]);
        let pred = predict_from_matrix(&zero, &p);
        assert_eq!((pred.det_int, pred.det_mod_p, pred.predicted_nonzero_b), (0.into(), 0.into(), true));

        let m = SignMatrix::from_digits(&ints(&[1, 2])).unwrap();
        let pred = predict_from_matrix(&m, &p);
        assert_eq!((pred.det_int, pred.det_mod_p, pred.predicted_nonzero_b), (2.into(), 2.into(), false));
    }

    #[test]
    fn two_by_two_layout() {
        // c_2..c_4 = 1, -2, 2
        let m = SignMatrix::from_digits(&ints(&[1, -2, 2])).unwrap();
        assert_eq!(m.entries, vec![ints(&[-2, 1]), ints(&[2, -2])]);
        assert_eq!(m.determinant(), BigInt::from(2));
    }

    #[test]
    fn three_by_three_band() {
        let m = SignMatrix::from_digits(&ints(&[1, 2, 0, -1])).unwrap();
        assert_eq!(m.entries[0], ints(&[2, 1, 0]));
        assert_eq!(m.entries[1], ints(&[0, 2, 1]));
        assert_eq!(m.entries[2], ints(&[-1, 0, 2]));
        // 2(4 - 0) - 1(0 + 1) = 7
        assert_eq!(m.determinant(), BigInt::from(7));
    }

    #[test]
    fn bareiss_with_pivoting() {
        let m = vec![ints(&[0, 1, 2]), ints(&[3, 0, 1]), ints(&[1, 1, 0])];
        // 0 - 1(0 - 1) + 2(3 - 0) = 7
        assert_eq!(bareiss(m), BigInt::from(7));
        assert_eq!(bareiss(vec![ints(&[1, 2]), ints(&[2, 4])]), BigInt::zero());
    }

    #[test]
    fn terminated_input() {
        let p = Prime::new(5u64).unwrap();
        let f = QuadField::rational(&p);
        let x = QuadElem::rational(2, 1, &f).unwrap();
        assert!(matches!(sign_matrix(&x), Err(Error::Terminated)));
    }

    #[test]
    fn empty_report() {
        let report = predictor_agreement(std::iter::empty()).unwrap();
        assert_eq!(report, PredictorReport::default());
    }

    #[test]
    fn counts_cover_every_even_step() {
        let p = Prime::new(5u64).unwrap();
        let f = QuadField::new(34, &p).unwrap();
        let run = expand(&QuadElem::sqrt(&f).unwrap(), AlgorithmKind::BrowkinII, 100).unwrap();
        let report = predictor_agreement([("sqrt:34", &run)]).unwrap();
        // h + k = 13 stored quotients, even steps 0, 2, ..., 12
        assert_eq!(report.steps, 7);
        assert_eq!(report.integer.agree + report.integer.disagree, 7);
        assert_eq!(report.mod_p.agree + report.mod_p.disagree, 7);
    }
}
