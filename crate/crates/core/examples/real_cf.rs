//! The classical real continued fraction of `sqrt(D)` is always periodic.

use padic_cf::experiments::run_real_cf;

fn main() {
    let rows = run_real_cf(100);
    for r in rows.iter().take(20) {
        println!("sqrt({}) period {}", r.d, r.period);
    }
    let longest = rows.iter().max_by_key(|r| r.period).expect("non-square D below 100");
    println!("{} non-square D <= 100, longest period {} at D = {}", rows.len(), longest.period, longest.d);
}
