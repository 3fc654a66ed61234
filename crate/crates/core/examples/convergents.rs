//! Convergents `A_n / B_n` of a p-adic expansion, with `v_p(B_n)` and the
//! valuation of the approximation error `x - A_n/B_n`.

use padic_cf::algorithms::{expand, AlgorithmKind};
use padic_cf::convergents::{approx_error_valuation, convergent_seq, valuation_sum};
use padic_cf::padic::Prime;
use padic_cf::quadratic::{QuadElem, QuadField};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = Prime::new(5)?;
    let x = QuadElem::sqrt(&QuadField::new(34, &p)?)?;
    let run = expand(&x, AlgorithmKind::BrowkinII, 100)?;
    let q = run.quotients_up_to(12);
    let seq = convergent_seq(&q, q.len() - 1, &p)?;

    println!("{:>2}  {:>8}  {:>8}  {:>30}", "n", "v(B_n)", "v(err)", "A_n / B_n");
    for c in &seq {
        let vb = valuation_sum(&q, c.index, &p)?;
        let err = if c.index + 1 < q.len() {
            approx_error_valuation(&x, &q, c.index)?.to_string()
        } else {
            "-".into()
        };
        let value = c.numer.to_rational() / c.denom.to_rational();
        println!("{:>2}  {vb:>8}  {err:>8}  {value:>30}", c.index);
    }
    Ok(())
}
