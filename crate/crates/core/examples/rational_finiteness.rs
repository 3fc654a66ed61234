//! Every rational number has a finite expansion. Rebuilds the input from the
//! last convergent to show it.

use padic_cf::algorithms::{expand, AlgorithmKind};
use padic_cf::convergents::convergent_seq;
use padic_cf::padic::Prime;
use padic_cf::quadratic::{QuadElem, QuadField};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = Prime::new(23)?;
    let field = QuadField::rational(&p);
    for (num, den) in [(-17, 29), (-15, 109), (355, 113), (1, 23 * 23)] {
        let x = QuadElem::rational(num, den, &field)?;
        let run = expand(&x, AlgorithmKind::BrowkinII, 1000)?;
        let q = &run.quotients;
        let last = convergent_seq(q, q.len() - 1, &p)?.pop().expect("at least one convergent");
        let back = last.numer.to_rational() / last.denom.to_rational();
        let shown: Vec<String> = q.iter().map(|b| b.to_string()).collect();
        println!("{num}/{den}: {} [{}] -> {back}", run.status, shown.join(", "));
    }
    Ok(())
}
