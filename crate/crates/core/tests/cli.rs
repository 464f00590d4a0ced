mod common;

use std::process::Command;

use qdisplace::cli::{run_args, ExitStatus};
use qdisplace::Record;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_qdisplace"));
    c.env_remove("QDISPLACE_TOLERANCE");
    c
}

fn code(args: &[&str]) -> i32 {
    bin().args(args).output().unwrap().status.code().unwrap()
}

fn run(args: &[&str]) -> qdisplace::cli::CommandOutput {
    let mut all = vec!["qdisplace"];
    all.extend_from_slice(args);
    run_args(all)
}

#[test]
fn exit_codes_from_the_binary() {
    assert_eq!(code(&["bases", "--family", "ququart-pair"]), 0);
    assert_eq!(code(&["bases", "--family", "bogus"]), 2);
    assert_eq!(code(&["verify-paper"]), 0);
    assert_eq!(code(&["verify-paper", "--strict"]), 1);
    assert_eq!(code(&["swap", "--forced-outcome", "Q_7"]), 2);
    assert_eq!(code(&["noclone", "--overlap", "1.5"]), 2);
    assert_eq!(code(&["displace", "--variant", "i", "--seed", "1", "--input", "0,0,0,0,0,0,0,0"]), 2);
    assert_eq!(code(&["displace", "--variant", "ix", "--seed", "1"]), 2);
    assert_eq!(code(&["displace", "--variant", "i"]), 2);
    assert_eq!(code(&["displace", "--variant", "i", "--seed", "1", "--trials", "0"]), 2);
    assert_eq!(code(&["frobnicate"]), 2);
    assert_eq!(code(&["--help"]), 0);
}

#[test]
fn tolerance_override() {
    let out =
        bin().args(["displace", "--variant", "ii", "--seed", "3"]).env("QDISPLACE_TOLERANCE", "1e-6").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("gate 9.9999899999999997e-1"));
    let out =
        bin().args(["displace", "--variant", "ii", "--seed", "3"]).env("QDISPLACE_TOLERANCE", "-1").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bases_dump_shows_x1_row() {
    let out = run(&["bases", "--family", "coupled-shift-qi"]);
    assert_eq!(out.status, ExitStatus::Ok);
    let row: Vec<&str> =
        out.stdout.lines().find(|l| l.starts_with("X_1 ")).unwrap().split_whitespace().skip(1).collect();
    // |1,00>, |2,01>, |3,10>, |0,11> in big-endian order over [I:4, 1:2, 2:2]
    assert_eq!(row[4], "+1/2");
    assert_eq!(row[9], "+1/2");
    assert_eq!(row[14], "-1/2");
    assert_eq!(row[3], "-1/2");
    assert_eq!(row.iter().filter(|c| **c != "0").count(), 4);
    assert!(out.stdout.ends_with("max gram deviation 0.0000000000000000e0\n"));
}

#[test]
fn displace_single_trial_recovers() {
    let out = run(&["--machine", "displace", "--variant", "iv", "--seed", "7"]);
    assert_eq!(out.status, ExitStatus::Ok);
    let trace = Record::parse(out.stdout.lines().next().unwrap()).unwrap();
    assert_eq!(trace.kind(), "displace_trace");
    assert!(trace.get_num("fidelity").unwrap() >= 1.0 - 1e-10);
}

#[test]
fn human_and_machine_outputs_agree() {
    let human = run(&["displace", "--variant", "vi", "--seed", "11", "--trials", "20"]);
    let machine = run(&["--machine", "displace", "--variant", "vi", "--seed", "11", "--trials", "20"]);
    let rows: Vec<Vec<&str>> =
        human.stdout.lines().filter(|l| !l.starts_with('#')).take(20).map(|l| l.split_whitespace().collect()).collect();
    let recs: Vec<Record> = machine.stdout.lines().take(20).map(|l| Record::parse(l).unwrap()).collect();
    for (row, rec) in rows.iter().zip(&recs) {
        assert_eq!(row[1].parse::<u64>().unwrap(), rec.get_u64("seed").unwrap());
        assert_eq!(row[2], rec.get_str("outcome").unwrap());
        assert_eq!(row[3], rec.get_str("classical_message").unwrap());
        assert_eq!(row[4].parse::<f64>().unwrap(), rec.get_num("probability").unwrap());
        assert_eq!(row[5].parse::<f64>().unwrap(), rec.get_num("fidelity").unwrap());
    }
}

#[test]
fn displace_output_is_byte_stable() {
    let args = ["--machine", "displace", "--variant", "vii", "--seed", "99", "--trials", "40"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn explicit_input_is_accepted() {
    let out = run(&["displace", "--variant", "iii", "--seed", "5", "--input", "1,0,0,1,-1,0,0,-1"]);
    assert_eq!(out.status, ExitStatus::Ok, "{}", out.stderr);
}

#[test]
fn large_batches_check_frequencies() {
    let out = run(&["--machine", "displace", "--variant", "v", "--seed", "123", "--trials", "1600"]);
    assert_eq!(out.status, ExitStatus::Ok);
    let summary = Record::parse(out.stdout.lines().last().unwrap()).unwrap();
    assert_eq!(summary.kind(), "displace_summary");
    assert!(summary.get_num("max_z").unwrap() <= 5.0);
}

#[test]
fn swap_forced_sweep() {
    let out = run(&["--machine", "swap", "--variant", "i", "--forced-outcome", "all"]);
    assert_eq!(out.status, ExitStatus::Ok);
    let recs: Vec<Record> = out.stdout.lines().map(|l| Record::parse(l).unwrap()).collect();
    let pairing: Vec<&Record> = recs.iter().filter(|r| r.kind() == "pairing").collect();
    assert_eq!(pairing.len(), 16);
    assert!(pairing.iter().all(|r| r.get_num("probability").unwrap() == 0.0625));
    let outcomes: Vec<&Record> = recs.iter().filter(|r| r.kind() == "swap_outcome").collect();
    assert_eq!(outcomes.len(), 16);
    assert!(outcomes.iter().all(|r| r.get_num("probability").unwrap() == 0.0625));
}

#[test]
fn swap_forced_w0_reports_residual() {
    let out = run(&["swap", "--forced-outcome", "W_0"]);
    let line = out.stdout.lines().find(|l| l.starts_with("outcome W_0")).unwrap();
    assert!(line.contains("residual superposition"), "{line}");
    let out = run(&["swap", "--forced-outcome", "W_3"]);
    let line = out.stdout.lines().find(|l| l.starts_with("outcome W_3")).unwrap();
    assert!(line.contains("residual +W_1"), "{line}");
}

#[test]
fn swap_sampled_outcome_is_seeded() {
    let a = run(&["--machine", "swap", "--variant", "iv", "--seed", "8"]);
    let b = run(&["--machine", "swap", "--variant", "iv", "--seed", "8"]);
    assert_eq!(a, b);
    assert!(a.stdout.contains("\"swap_outcome\""));
}

#[test]
fn verify_paper_report() {
    let out = run(&["verify-paper"]);
    assert_eq!(out.status, ExitStatus::Ok);
    let verdicts = out.stdout.lines().filter(|l| l.starts_with("correction") || l.starts_with("pairing")).count();
    assert_eq!(verdicts, 32);
    assert!(out.stdout.lines().any(|l| l.starts_with("warning:") && l.contains("partner X_3")));
    assert_eq!(run(&["verify-paper", "--strict"]).status, ExitStatus::Mismatch);
}

#[test]
fn noclone_reports() {
    let out = run(&["--machine", "noclone", "--kind", "imprecise-4-to-22", "--overlap", "0.5", "--overlap", "0"]);
    assert_eq!(out.status, ExitStatus::Ok);
    let recs: Vec<Record> = out.stdout.lines().map(|l| Record::parse(l).unwrap()).collect();
    assert_eq!(recs[0].get_num("deficit").unwrap(), 0.25);
    assert_eq!(recs[1].get_num("deficit").unwrap(), 0.0);
    let demo = recs.iter().find(|r| r.kind() == "linear_extension").unwrap();
    assert!(demo.get_num("fidelity").unwrap() < 1.0);
}
