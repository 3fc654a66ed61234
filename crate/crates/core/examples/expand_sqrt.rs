//! Expands `sqrt(D)` in Q_p with each algorithm and prints the quotients.
//!
//!     cargo run --example expand_sqrt -- 5 34

use padic_cf::algorithms::{expand, AlgorithmKind};
use padic_cf::padic::Prime;
use padic_cf::quadratic::{QuadElem, QuadField};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let p: u64 = args.next().map_or(Ok(5), |s| s.parse())?;
    let d: i64 = args.next().map_or(Ok(34), |s| s.parse())?;

    let p = Prime::new(p)?;
    let field = QuadField::new(d, &p)?;
    let x = QuadElem::sqrt(&field)?;
    println!("sqrt({d}) in Q_{}", p.value());

    for alg in AlgorithmKind::ALL {
        let run = expand(&x, alg, 500)?;
        let shown: Vec<String> = run.quotients.iter().take(24).map(|q| q.to_string()).collect();
        let more = if run.quotients.len() > 24 { ", ..." } else { "" };
        println!("{:>12}: {} [{}{more}]", alg.to_string(), run.status, shown.join(", "));
    }
    Ok(())
}
