//! The determinant test that predicts, before an even Browkin II step, whether
//! the step takes a non-zero floor. Compared with what the expansion does.

use padic_cf::algorithms::{expand, AlgorithmKind};
use padic_cf::padic::Prime;
use padic_cf::predictor::{check_run, predictor_agreement};
use padic_cf::quadratic::{QuadElem, QuadField};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = Prime::new(5)?;
    let x = QuadElem::sqrt(&QuadField::new(34, &p)?)?;
    let run = expand(&x, AlgorithmKind::BrowkinII, 200)?;
    println!("sqrt(34) in Q_5: {}", run.status);
    for c in check_run(&run)? {
        println!(
            "step {:>2} n={:<2} det={:<8} det mod p={:<3} predicted nonzero={:<5} actual={}",
            c.step,
            c.n,
            c.prediction.det_int,
            c.prediction.det_mod_p,
            c.prediction.predicted_nonzero_b,
            c.truth_nonzero_b,
        );
    }

    let mut runs = Vec::new();
    for d in 2..=120i64 {
        let Ok(field) = QuadField::new(d, &p) else { continue };
        let run = expand(&QuadElem::sqrt(&field)?, AlgorithmKind::BrowkinII, 300)?;
        runs.push((format!("sqrt({d})"), run));
    }
    let report = predictor_agreement(runs.iter().map(|(l, r)| (l.as_str(), r)))?;
    println!(
        "\n{} runs, {} even steps: integer agree {} / disagree {}, mod p agree {} / disagree {}",
        runs.len(),
        report.steps,
        report.integer.agree,
        report.integer.disagree,
        report.mod_p.agree,
        report.mod_p.disagree,
    );
    Ok(())
}
