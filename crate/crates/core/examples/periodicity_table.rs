//! Counts periodic `sqrt(D)` for a few small primes, with period statistics
//! and Browkin II pre-periods. A small version of `padic-cf table`.

use padic_cf::experiments::{preperiod_rows, run_sweep, table_rows, Profile, SweepConfig};
use padic_cf::padic::Prime;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut cfg = SweepConfig::profile(Profile::Desk);
    cfg.primes = [3u64, 5, 7].into_iter().map(Prime::new).collect::<Result<_, _>>()?;
    cfg.d_max = 300;
    cfg.max_steps = 500;
    cfg.parallelism = std::thread::available_parallelism().map_or(1, |n| n.get());

    let detections = run_sweep(&cfg)?;
    println!("{:>3} {:>12} {:>8} {:>8} {:>4} {:>4} {:>6}", "p", "algorithm", "periodic", "mean", "q75", "q90", "total");
    for r in table_rows(&detections) {
        println!(
            "{:>3} {:>12} {:>8} {:>8.2} {:>4} {:>4} {:>6}",
            r.p, r.algorithm.to_string(), r.periodic_count, r.mean_period, r.q75, r.q90, r.total
        );
    }
    println!();
    for r in preperiod_rows(&detections)? {
        println!("p={} mean pre-period {:.2} histogram {}", r.p, r.mean_preperiod, r.histogram);
    }
    Ok(())
}
