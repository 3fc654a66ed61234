//! The four p-adic continued fraction algorithms and exact period detection.
//!
//! Every algorithm produces `b_n` from the complete quotient `alpha_n` and
//! continues with `alpha_{n+1} = 1 / (alpha_n - b_n)`:
//!
//! | algorithm     | even `n`  | odd `n`                                     |
//! |---------------|-----------|---------------------------------------------|
//! | `BrowkinI`    | `s`       | `s`                                         |
//! | `BrowkinII`   | `s`       | `t`, or `t - sign(t)` when `a_0(alpha_n) = 0` |
//! | `New`         | `s`       | `t`                                         |
//! | `NewSwapped`  | `t`       | `s`                                         |

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::PartialQuotient;
use crate::quadratic::{FloorKind, QuadElem};

/// Number of complete quotients examined when nothing else is specified.
pub const DEFAULT_MAX_STEPS: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AlgorithmKind {
    BrowkinI,
    BrowkinII,
    New,
    NewSwapped,
}

impl AlgorithmKind {
    pub const ALL: [AlgorithmKind; 4] = [
        AlgorithmKind::BrowkinI,
        AlgorithmKind::BrowkinII,
        AlgorithmKind::New,
        AlgorithmKind::NewSwapped,
    ];

    /// The three algorithms compared in the periodicity tables.
    pub const TABLED: [AlgorithmKind; 3] =
        [AlgorithmKind::BrowkinI, AlgorithmKind::BrowkinII, AlgorithmKind::New];

    /// Short command-line name.
    pub fn flag(self) -> &'static str {
        match self {
            AlgorithmKind::BrowkinI => "b1",
            AlgorithmKind::BrowkinII => "b2",
            AlgorithmKind::New => "new",
            AlgorithmKind::NewSwapped => "new-swapped",
        }
    }

    /// Whether the floor used depends on the parity of the step.
    pub fn alternates(self) -> bool {
        self != AlgorithmKind::BrowkinI
    }
}

impl fmt::Display for AlgorithmKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.flag())
    }
}

impl FromStr for AlgorithmKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AlgorithmKind::ALL
            .into_iter()
            .find(|a| a.flag() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown algorithm {s:?}")))
    }
}

/// Outcome of one step of an algorithm.
#[derive(Clone, Debug)]
pub struct StepOutcome {
    pub quotient: PartialQuotient,
    /// `None` when `alpha_n = b_n` and the expansion stops.
    pub next: Option<QuadElem>,
    /// Value of Browkin's `B` function at odd Browkin II steps.
    pub sign: Option<i8>,
}

/// `B(x)`: 0 when the digit `a_0(x)` is nonzero, otherwise the Euclidean
/// sign of `t(x)`.
pub fn b_classify(x: &QuadElem) -> Result<i8> {
    if x.is_zero() {
        return Err(Error::InvalidArgument("B(0) is undefined".into()));
    }
    let f = x.floors();
    if f.a0 != BigInt::from(0) {
        return Ok(0);
    }
    match f.t.signum() {
        0 => Err(Error::ImpossibleState(format!(
            "a_0 and t both vanish for {x}"
        ))),
        s => Ok(s),
    }
}

/// One step of `alg` at index `n`.
pub fn step(alg: AlgorithmKind, n: usize, x: &QuadElem) -> Result<StepOutcome> {
    let even = n % 2 == 0;
    let mut sign = None;
    let quotient = match (alg, even) {
        (AlgorithmKind::BrowkinI, _) | (AlgorithmKind::New, true) | (AlgorithmKind::BrowkinII, true) => {
            x.floor(FloorKind::S)
        }
        (AlgorithmKind::New, false) | (AlgorithmKind::NewSwapped, true) => x.floor(FloorKind::T),
        (AlgorithmKind::NewSwapped, false) => x.floor(FloorKind::S),
        (AlgorithmKind::BrowkinII, false) => {
            let f = x.floors();
            if f.a0 != BigInt::from(0) {
                sign = Some(0);
                f.t
            } else {
                let s = f.t.signum();
                if s == 0 {
                    return Err(Error::ImpossibleState(format!(
                        "sign(t) requested with t = 0 at odd step {n} for {x}"
                    )));
                }
                sign = Some(s);
                f.t.sub(&PartialQuotient::integer(s), x.prime())
            }
        }
    };
    let rest = x.sub_pq(&quotient);
    let next = if rest.is_zero() { None } else { Some(rest.invert()?) };
    Ok(StepOutcome { quotient, next, sign })
}

/// How an expansion ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ExpansionStatus {
    Finite,
    Periodic { preperiod: usize, period: usize },
    Truncated { steps: usize },
}

impl fmt::Display for ExpansionStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExpansionStatus::Finite => f.write_str("finite"),
            ExpansionStatus::Periodic { preperiod, period } => {
                write!(f, "periodic h={preperiod} k={period}")
            }
            ExpansionStatus::Truncated { steps } => write!(f, "truncated steps={steps}"),
        }
    }
}

/// Partial quotients of an expansion together with its classification.
#[derive(Clone, Debug)]
pub struct ExpansionResult {
    pub algorithm: AlgorithmKind,
    /// `b_0, b_1, ...`; for periodic results exactly pre-period plus one period.
    pub quotients: Vec<PartialQuotient>,
    /// `alpha_0, alpha_1, ...`, one per quotient.
    pub complete_quotients: Vec<QuadElem>,
    pub status: ExpansionStatus,
    /// `B(alpha_n)` for each odd step of a Browkin II run, in step order.
    pub sign_trace: Vec<i8>,
}

impl ExpansionResult {
    pub fn is_periodic(&self) -> bool {
        matches!(self.status, ExpansionStatus::Periodic { .. })
    }

    /// `b_i`, unrolling the period when `i` lies past the stored quotients.
    pub fn quotient(&self, i: usize) -> Option<&PartialQuotient> {
        if i < self.quotients.len() {
            return self.quotients.get(i);
        }
        match self.status {
            ExpansionStatus::Periodic { preperiod, period } => {
                self.quotients.get(preperiod + (i - preperiod) % period)
            }
            _ => None,
        }
    }

    /// The first `n` quotients, unrolled for periodic results. Shorter when
    /// the expansion is finite or truncated before `n`.
    pub fn quotients_up_to(&self, n: usize) -> Vec<PartialQuotient> {
        (0..n).map_while(|i| self.quotient(i).cloned()).collect()
    }
}

fn state_key(alg: AlgorithmKind, n: usize, x: &QuadElem) -> (BigInt, BigInt, BigInt, u8) {
    let parity = if alg.alternates() { (n % 2) as u8 } else { 0 };
    (x.a().clone(), x.b().clone(), x.c().clone(), parity)
}

/// Expands `x` for at most `max_steps` complete quotients.
///
/// A period is reported once a complete quotient recurs exactly at the same
/// step parity (any parity for Browkin I); the reported `(h, k)` are minimal.
pub fn expand(x: &QuadElem, alg: AlgorithmKind, max_steps: usize) -> Result<ExpansionResult> {
    if max_steps == 0 {
        return Err(Error::InvalidArgument("max_steps must be at least 1".into()));
    }
    let mut seen: HashMap<(BigInt, BigInt, BigInt, u8), usize> = HashMap::new();
    let mut quotients = Vec::new();
    let mut complete = Vec::new();
    let mut signs = Vec::new();
    let mut current = x.clone();
    let mut status = ExpansionStatus::Truncated { steps: max_steps };
    for n in 0..max_steps {
        let key = state_key(alg, n, &current);
        if let Some(&first) = seen.get(&key) {
            let period = n - first;
            let mut h = first;
            while h > 0
                && state_key(alg, h - 1, &complete[h - 1])
                    == state_key(alg, h - 1 + period, &complete[h - 1 + period])
            {
                h -= 1;
            }
            status = ExpansionStatus::Periodic { preperiod: h, period };
            break;
        }
        seen.insert(key, n);
        let out = step(alg, n, &current)?;
        quotients.push(out.quotient);
        complete.push(current);
        if let Some(s) = out.sign {
            signs.push(s);
        }
        match out.next {
            Some(next) => current = next,
            None => {
                status = ExpansionStatus::Finite;
                break;
            }
        }
    }
    if let ExpansionStatus::Periodic { preperiod, period } = status {
        quotients.truncate(preperiod + period);
        complete.truncate(preperiod + period);
    }
    Ok(ExpansionResult {
        algorithm: alg,
        quotients,
        complete_quotients: complete,
        status,
        sign_trace: signs,
    })
}
