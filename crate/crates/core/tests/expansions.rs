use std::process::Command;

use padic_cf::algorithms::{expand, AlgorithmKind, ExpansionStatus};
use padic_cf::cli::ExpandOutput;
use padic_cf::padic::Prime;
use padic_cf::quadratic::{QuadElem, QuadField};

fn strs(run: &padic_cf::algorithms::ExpansionResult) -> Vec<String> {
    run.quotients.iter().map(|q| q.to_string()).collect()
}

#[test]
fn sqrt30_plus_3_browkin_ii() {
    let p = Prime::new(7).unwrap();
    let x = QuadElem::new(3, 1, 1, &QuadField::new(30, &p).unwrap()).unwrap();
    let run = expand(&x, AlgorithmKind::BrowkinII, 200).unwrap();
    assert_eq!(run.status, ExpansionStatus::Periodic { preperiod: 4, period: 10 });
    assert_eq!(
        strs(&run),
        ["-1", "3/7", "3", "2/7", "1", "2/7", "-2", "3/7", "1", "2/7", "2", "1/7", "-1", "-5/7"]
    );
}

// With v_p(sqrt(D)) > 0 the New expansion has pre-period 2, and from the
// second quotient on it follows the swapped expansion of sqrt(D)/D.
#[test]
fn new_tail_of_scaled_root() {
    let p = Prime::new(5).unwrap();
    let f = QuadField::new(150, &p).unwrap();
    let run = expand(&QuadElem::sqrt(&f).unwrap(), AlgorithmKind::New, 1000).unwrap();
    assert_eq!(run.status, ExpansionStatus::Periodic { preperiod: 2, period: 16 });
    assert!(run.quotients[0].is_zero());

    let tail = expand(&QuadElem::new(0, 1, 150, &f).unwrap(), AlgorithmKind::NewSwapped, 1000).unwrap();
    assert_eq!(tail.status, ExpansionStatus::Periodic { preperiod: 1, period: 16 });
    let n = 80;
    assert_eq!(run.quotients_up_to(n + 1)[1..], tail.quotients_up_to(n)[..]);
}

fn cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_padic-cf")).args(args).output().unwrap()
}

#[test]
fn cli_json_round_trips() {
    let out = cli(&["expand", "--p", "5", "--input", "sqrt:34", "--alg", "b2", "--format", "json"]);
    assert!(out.status.success());
    let parsed: ExpandOutput = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(parsed.status, ExpansionStatus::Periodic { preperiod: 1, period: 12 });
    assert_eq!(parsed.quotients[..3], ["2", "-1/5", "1"]);
    assert_eq!(parsed.sign_trace.len(), 6);
    let again = serde_json::to_string(&parsed).unwrap();
    assert_eq!(serde_json::from_str::<ExpandOutput>(&again).unwrap(), parsed);
}

#[test]
fn cli_csv_is_deterministic() {
    let args = ["expand", "--p", "7", "--input", "quad:3,1,1,30", "--format", "csv"];
    let (a, b) = (cli(&args), cli(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,quotient,in_period"));
    assert_eq!(lines.next(), Some("0,-1,false"));
    assert_eq!(lines.count(), 13);
}

#[test]
fn cli_exit_codes() {
    // not a square mod 5
    let out = cli(&["expand", "--p", "5", "--input", "sqrt:2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    assert_eq!(cli(&["expand", "--p", "9", "--input", "sqrt:34"]).status.code(), Some(2));
    assert_eq!(cli(&["predict", "--p", "5", "--input", "sqrt:34", "--alg", "new"]).status.code(), Some(2));
    assert_eq!(cli(&["expand", "--p", "5", "--input", "bogus"]).status.code(), Some(2));
}

#[test]
fn sweep_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let run = |jobs: &str| {
        let o = cli(&["table", "--out", out, "--primes", "5", "--d-max", "60", "--max-steps", "200", "--jobs", jobs]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read(dir.path().join("table.csv")).unwrap()
    };
    assert_eq!(run("1"), run("3"));
    assert!(dir.path().join("table_manifest.json").exists());
}
