//! Sweeps over `(p, D)` that reproduce the periodicity, pre-period and
//! approximation tables, plus the classical real continued fraction period.

mod figures;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use num_bigint::BigInt;
use num_integer::Roots;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algorithms::{expand, AlgorithmKind, ExpansionStatus};
use crate::convergents::{check_valuations, convergent_seq};
use crate::error::{Error, Result};
use crate::padic::Prime;
use crate::quadratic::{QuadElem, QuadField};

pub use figures::{emit_figures, FigureData};

/// Step counts at which the mean valuation of `B` is reported.
pub const APPROX_STEPS: [usize; 3] = [10, 100, 1000];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    /// `p` in {3, 5, 7, 11, 13}, `D <= 300`, 300 steps.
    Desk,
    /// Odd primes below 100, `D <= 1000`, 1000 steps.
    Paper,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub primes: Vec<Prime>,
    pub d_max: u64,
    pub max_steps: usize,
    pub algorithms: Vec<AlgorithmKind>,
    pub parallelism: usize,
    pub out_dir: PathBuf,
}

impl SweepConfig {
    pub fn profile(profile: Profile) -> Self {
        let (primes, d_max, max_steps): (Vec<u64>, u64, usize) = match profile {
            Profile::Desk => (vec![3, 5, 7, 11, 13], 300, 300),
            Profile::Paper => (odd_primes_below(100), 1000, 1000),
        };
        SweepConfig {
            primes: primes.into_iter().map(|p| Prime::new(p).expect("prime")).collect(),
            d_max,
            max_steps,
            algorithms: AlgorithmKind::TABLED.to_vec(),
            parallelism: 1,
            out_dir: PathBuf::from("out"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d_max < 2 {
            return Err(Error::InvalidArgument("d_max must be at least 2".into()));
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidArgument("max_steps must be at least 1".into()));
        }
        if self.parallelism == 0 {
            return Err(Error::InvalidArgument("parallelism must be at least 1".into()));
        }
        Ok(())
    }
}

fn odd_primes_below(n: u64) -> Vec<u64> {
    (3..n).filter(|&k| (2..k).take_while(|d| d * d <= k).all(|d| k % d != 0)).collect()
}

/// Non-square `D` in `[1, d_max]` with `p` not dividing `D` and `D` a
/// square mod `p`, i.e. those with `sqrt(D)` in `Q_p \ Q`.
pub fn eligible_d(p: &Prime, d_max: u64) -> Vec<u64> {
    let pv = p.value();
    (1..=d_max)
        .filter(|&d| {
            let r = d.sqrt();
            if r * r == d {
                return false;
            }
            let db = BigInt::from(d);
            if (&db % pv) == BigInt::from(0) {
                return false;
            }
            let e = (pv - 1u32) / 2u32;
            db.modpow(&e, pv) == BigInt::from(1)
        })
        .collect()
}

/// Classification of one `sqrt(D)` expansion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Detection {
    pub p: u64,
    pub d: u64,
    pub algorithm: AlgorithmKind,
    pub status: ExpansionStatus,
}

impl Detection {
    pub fn period(&self) -> Option<usize> {
        match self.status {
            ExpansionStatus::Periodic { period, .. } => Some(period),
            _ => None,
        }
    }

    pub fn preperiod(&self) -> Option<usize> {
        match self.status {
            ExpansionStatus::Periodic { preperiod, .. } => Some(preperiod),
            _ => None,
        }
    }
}

/// Runs `f` on every `(p, D, algorithm)` of the sweep on a pool of
/// `cfg.parallelism` threads. Results come back in the order primes, then
/// algorithms, then increasing `D`, whatever the thread count.
pub fn sweep_map<T, F>(cfg: &SweepConfig, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&Prime, u64, AlgorithmKind) -> Result<T> + Sync,
{
    cfg.validate()?;
    let mut items = Vec::new();
    for p in &cfg.primes {
        for &alg in &cfg.algorithms {
            for d in eligible_d(p, cfg.d_max) {
                items.push((p, d, alg));
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.parallelism)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    pool.install(|| items.par_iter().map(|&(p, d, alg)| f(p, d, alg)).collect())
}

fn sqrt_of(p: &Prime, d: u64) -> Result<QuadElem> {
    QuadElem::sqrt(&QuadField::new(d, p)?)
}

/// Expands `sqrt(D)` for every eligible `D` and records the outcome.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<Detection>> {
    sweep_map(cfg, |p, d, alg| {
        let run = expand(&sqrt_of(p, d)?, alg, cfg.max_steps)?;
        Ok(Detection { p: p.to_u64().unwrap_or(0), d, algorithm: alg, status: run.status })
    })
}

/// `num / den` rounded half-up to two decimals.
pub fn round2(num: u64, den: u64) -> f64 {
    if den == 0 {
        return 0.0;
    }
    let hundredths = (200 * num as u128 + den as u128) / (2 * den as u128);
    hundredths as f64 / 100.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub p: u64,
    pub algorithm: AlgorithmKind,
    pub periodic_count: usize,
    /// Rounded half-up to two decimals.
    pub mean_period: f64,
    /// Exact mean as `sum/count`.
    pub mean_period_exact: String,
    pub q75: usize,
    pub q90: usize,
    pub total: usize,
}

impl TableRow {
    pub fn period_sum(&self) -> u64 {
        self.mean_period_exact
            .split_once('/')
            .and_then(|(n, _)| n.parse().ok())
            .unwrap_or(0)
    }

    /// Exact mean period as a float, for tolerance checks.
    pub fn mean_period_value(&self) -> f64 {
        if self.periodic_count == 0 {
            0.0
        } else {
            self.period_sum() as f64 / self.periodic_count as f64
        }
    }
}

/// The `num/den` quantile of a sorted sample: the value at 1-based position
/// `floor(n * num / den)`, so at least that many observations are `<=` it.
pub fn quantile(sorted: &[usize], num: usize, den: usize) -> usize {
    let pos = (sorted.len() * num / den).max(1);
    sorted.get(pos - 1).copied().unwrap_or(0)
}

/// One row per `(p, algorithm)` in sweep order.
pub fn table_rows(detections: &[Detection]) -> Vec<TableRow> {
    let mut groups: Vec<((u64, AlgorithmKind), Vec<&Detection>)> = Vec::new();
    for det in detections {
        let key = (det.p, det.algorithm);
        match groups.last_mut() {
            Some((k, v)) if *k == key => v.push(det),
            _ => groups.push((key, vec![det])),
        }
    }
    groups
        .into_iter()
        .map(|((p, algorithm), dets)| {
            let mut periods: Vec<usize> = dets.iter().filter_map(|d| d.period()).collect();
            periods.sort_unstable();
            let sum: u64 = periods.iter().map(|&k| k as u64).sum();
            let count = periods.len();
            TableRow {
                p,
                algorithm,
                periodic_count: count,
                mean_period: round2(sum, count as u64),
                mean_period_exact: format!("{sum}/{count}"),
                q75: quantile(&periods, 3, 4),
                q90: quantile(&periods, 9, 10),
                total: dets.len(),
            }
        })
        .collect()
}

pub fn run_table(cfg: &SweepConfig) -> Result<Vec<TableRow>> {
    Ok(table_rows(&run_sweep(cfg)?))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PreperiodRow {
    pub p: u64,
    pub periodic_count: usize,
    pub mean_preperiod: f64,
    pub mean_preperiod_exact: String,
    /// `h:count` pairs separated by `;`, increasing in `h`.
    pub histogram: String,
}

/// Browkin II pre-period statistics per prime. An odd pre-period larger
/// than 1 is reported as an invariant violation.
pub fn run_preperiod_stats(cfg: &SweepConfig) -> Result<Vec<PreperiodRow>> {
    let mut cfg = cfg.clone();
    cfg.algorithms = vec![AlgorithmKind::BrowkinII];
    let detections = run_sweep(&cfg)?;
    preperiod_rows(&detections)
}

pub fn preperiod_rows(detections: &[Detection]) -> Result<Vec<PreperiodRow>> {
    let mut by_p: BTreeMap<u64, BTreeMap<usize, usize>> = BTreeMap::new();
    for det in detections.iter().filter(|d| d.algorithm == AlgorithmKind::BrowkinII) {
        let hist = by_p.entry(det.p).or_default();
        if let Some(h) = det.preperiod() {
            if h > 1 && h % 2 == 1 {
                return Err(Error::InvariantViolation(format!(
                    "Browkin II pre-period {h} for sqrt({}) in Q_{}",
                    det.d, det.p
                )));
            }
            *hist.entry(h).or_default() += 1;
        }
    }
    Ok(by_p
        .into_iter()
        .map(|(p, hist)| {
            let count: usize = hist.values().sum();
            let sum: u64 = hist.iter().map(|(h, c)| (h * c) as u64).sum();
            PreperiodRow {
                p,
                periodic_count: count,
                mean_preperiod: round2(sum, count as u64),
                mean_preperiod_exact: format!("{sum}/{count}"),
                histogram: hist
                    .iter()
                    .map(|(h, c)| format!("{h}:{c}"))
                    .collect::<Vec<_>>()
                    .join(";"),
            }
        })
        .collect())
}

/// Mean `v_p(B_{n-1})`, the valuation reached after `n` steps, at each
/// `n` in [`APPROX_STEPS`]. `None` where the sweep has fewer than `n` steps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproxRow {
    pub p: u64,
    pub algorithm: AlgorithmKind,
    pub mean_val10: Option<f64>,
    pub mean_val100: Option<f64>,
    pub mean_val1000: Option<f64>,
    pub total: usize,
}

/// Valuations of `B_{n-1}` for each `n` in `steps`; periodic expansions
/// are unrolled.
pub fn b_valuations_after(
    x: &QuadElem,
    alg: AlgorithmKind,
    steps: &[usize],
) -> Result<Vec<i64>> {
    let p = x.prime();
    let n_max = steps.iter().copied().max().unwrap_or(1);
    let run = expand(x, alg, n_max)?;
    let q = run.quotients_up_to(n_max);
    if q.len() < n_max {
        return Err(Error::InvalidArgument(format!(
            "expansion of {x} stops after {} quotients",
            q.len()
        )));
    }
    let seq = convergent_seq(&q, n_max - 1, p)?;
    check_valuations(&q, &seq, p)?;
    Ok(steps
        .iter()
        .map(|&n| seq[n - 1].denom.valuation(p).finite().expect("nonzero B"))
        .collect())
}

pub fn run_approx(cfg: &SweepConfig) -> Result<Vec<ApproxRow>> {
    let steps: Vec<usize> = APPROX_STEPS.iter().copied().filter(|&n| n <= cfg.max_steps).collect();
    let vals = sweep_map(cfg, |p, d, alg| {
        Ok((p.to_u64().unwrap_or(0), alg, b_valuations_after(&sqrt_of(p, d)?, alg, &steps)?))
    })?;
    let mut rows: Vec<ApproxRow> = Vec::new();
    let mut sums: Vec<Vec<i64>> = Vec::new();
    for (p, alg, v) in vals {
        match rows.last_mut() {
            Some(r) if r.p == p && r.algorithm == alg => {
                r.total += 1;
                let s = sums.last_mut().unwrap();
                s.iter_mut().zip(&v).for_each(|(a, b)| *a += b);
            }
            _ => {
                rows.push(ApproxRow {
                    p,
                    algorithm: alg,
                    mean_val10: None,
                    mean_val100: None,
                    mean_val1000: None,
                    total: 1,
                });
                sums.push(v);
            }
        }
    }
    for (row, s) in rows.iter_mut().zip(&sums) {
        let mean = |n: usize| {
            steps.iter().position(|&m| m == n).map(|i| s[i] as f64 / row.total as f64)
        };
        row.mean_val10 = mean(10);
        row.mean_val100 = mean(100);
        row.mean_val1000 = mean(1000);
    }
    Ok(rows)
}

/// Period length of the regular continued fraction of `sqrt(D)`, which
/// always has pre-period 1.
pub fn real_cf_period(d: u64) -> Result<usize> {
    let a0 = d.sqrt();
    if a0 * a0 == d {
        return Err(Error::InvalidArgument(format!("{d} is a perfect square")));
    }
    let (mut m, mut q, mut a) = (0u64, 1u64, a0);
    let mut k = 0;
    while a != 2 * a0 {
        m = q * a - m;
        q = (d - m * m) / q;
        a = (a0 + m) / q;
        k += 1;
    }
    Ok(k)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealCfRow {
    pub d: u64,
    pub period: usize,
}

pub fn run_real_cf(d_max: u64) -> Vec<RealCfRow> {
    (2..=d_max)
        .filter_map(|d| real_cf_period(d).ok().map(|period| RealCfRow { d, period }))
        .collect()
}

/// Writes `rows` as CSV with a header row named after the fields.
pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(true).from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub config: SweepConfig,
    pub version: String,
    pub wall_time_secs: f64,
    pub outputs: Vec<String>,
}

pub fn write_manifest(
    cfg: &SweepConfig,
    command: &str,
    wall: Duration,
    outputs: &[String],
) -> Result<PathBuf> {
    let m = Manifest {
        command: command.to_string(),
        config: cfg.clone(),
        version: format!("v{}", env!("CARGO_PKG_VERSION")),
        wall_time_secs: wall.as_secs_f64(),
        outputs: outputs.to_vec(),
    };
    let path = cfg.out_dir.join(format!("{command}_manifest.json"));
    fs::write(&path, serde_json::to_string_pretty(&m)? + "\n")?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: u64) -> Prime {
        Prime::new(v).unwrap()
    }

    #[test]
    fn eligible_counts() {
        assert_eq!(eligible_d(&p(5), 10), vec![6]);
        assert_eq!(eligible_d(&p(5), 1000).len(), 375);
        assert_eq!(eligible_d(&p(3), 1000).len(), 313);
        assert_eq!(eligible_d(&p(7), 1000).len(), 402);
    }

    #[test]
    fn profiles() {
        let desk = SweepConfig::profile(Profile::Desk);
        assert_eq!(desk.primes.len(), 5);
        assert_eq!((desk.d_max, desk.max_steps), (300, 300));
        let paper = SweepConfig::profile(Profile::Paper);
        assert_eq!(paper.primes.len(), 24);
        assert_eq!(paper.primes.last().unwrap().to_u64(), Some(97));
    }

    #[test]
    fn rounding_is_half_up() {
        assert_eq!(round2(1, 8), 0.13);
        assert_eq!(round2(2, 3), 0.67);
        assert_eq!(round2(7, 1), 7.0);
        assert_eq!(round2(0, 0), 0.0);
    }

    #[test]
    fn quantile_rule() {
        let v = [2, 4, 6, 6, 6, 6, 8, 10, 10, 10, 12, 14, 24, 24, 26, 60];
        // positions 12 and floor(14.4) = 14
        assert_eq!(quantile(&v, 3, 4), 14);
        assert_eq!(quantile(&v, 9, 10), 24);
        let w = [2, 2, 2, 4, 4, 4, 6, 6, 6, 8, 8, 8, 10, 12, 16, 20, 22];
        assert_eq!((quantile(&w, 3, 4), quantile(&w, 9, 10)), (8, 16));
        assert_eq!(quantile(&[7], 3, 4), 7);
        assert_eq!(quantile(&[], 3, 4), 0);
    }

    #[test]
    fn real_cf_examples() {
        assert_eq!(real_cf_period(2).unwrap(), 1);
        assert_eq!(real_cf_period(19).unwrap(), 6);
        assert_eq!(real_cf_period(7).unwrap(), 4);
        assert!(real_cf_period(49).is_err());
    }

    #[test]
    fn sweep_order_ignores_thread_count() {
        let mut cfg = SweepConfig::profile(Profile::Desk);
        cfg.primes = vec![p(5), p(7)];
        cfg.d_max = 80;
        cfg.max_steps = 60;
        let one = run_sweep(&cfg).unwrap();
        cfg.parallelism = 4;
        assert_eq!(one, run_sweep(&cfg).unwrap());
    }

    #[test]
    fn preperiod_parity_is_enforced() {
        let bad = Detection {
            p: 5,
            d: 6,
            algorithm: AlgorithmKind::BrowkinII,
            status: ExpansionStatus::Periodic { preperiod: 3, period: 4 },
        };
        assert!(matches!(preperiod_rows(&[bad]), Err(Error::InvariantViolation(_))));
    }
}
