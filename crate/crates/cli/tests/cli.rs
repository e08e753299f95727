//! End-to-end checks against the `tqss` binary.

use std::process::{Command, Output};

use tqss_cli::report::{Record, Report};

fn tqss(args: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tqss"))
        .args(args.split_whitespace())
        .output()
        .expect("binary runs")
}

fn structured(args: &str) -> Report {
    let out = tqss(&format!("{args} --format structured"));
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    Report::parse_structured(&String::from_utf8(out.stdout).unwrap()).unwrap()
}

fn summaries(report: &Report) -> Vec<(String, usize, usize, usize)> {
    report
        .records
        .iter()
        .filter_map(|r| match r {
            Record::Summary {
                protocol,
                trials,
                correct,
                honest_verdicts,
                ..
            } => Some((protocol.clone(), *trials, *correct, *honest_verdicts)),
            _ => None,
        })
        .collect()
}

fn trials(report: &Report) -> Vec<(u64, String)> {
    report
        .records
        .iter()
        .filter_map(|r| match r {
            Record::Trial {
                secret, verdict, ..
            } => Some((*secret, verdict.clone())),
            _ => None,
        })
        .collect()
}

#[test]
fn worked_example_recovers_every_trial() {
    let report = structured("run --d 3 --t 2 --n 2 --secret 2 --seed 7 --trials 50");
    assert_eq!(summaries(&report), vec![("proposed".into(), 50, 50, 50)]);
    assert!(trials(&report)
        .iter()
        .all(|(s, v)| *s == 2 && v == "honest"));
}

#[test]
fn worked_example_with_four_participants_is_refused() {
    let out = tqss("run --d 3 --t 2 --n 4 --secret 2");
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("n <= d - 1"));
}

#[test]
fn threshold_one_reconstructs() {
    let report = structured("run --t 1 --n 1 --d 5 --secret 4");
    assert_eq!(trials(&report), vec![(4, "honest".into())]);
}

#[test]
fn tamper_shifts_and_is_detected() {
    let report = structured("run --d 5 --t 2 --n 4 --secret 2 --tamper 2:1 --trials 20");
    let t = trials(&report);
    assert_eq!(t.len(), 20);
    assert!(t.iter().all(|(s, v)| *s == 3 && v == "corrupt-detected"));
}

#[test]
fn tamper_by_inactive_participant_is_a_config_error() {
    let out = tqss("run --d 5 --t 2 --n 4 --tamper 4:1");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn flaw_demo_defaults() {
    let report = structured("flaw-demo");
    let counts = report
        .records
        .iter()
        .find_map(|r| match r {
            Record::Histogram { counts, .. } => Some(counts.clone()),
            _ => None,
        })
        .unwrap();
    assert_eq!(counts.len(), 3);
    assert_eq!(counts.iter().sum::<u64>(), 3000);
    let uniform = report
        .records
        .iter()
        .any(|r| matches!(r, Record::ChiSquare { uniform: true, .. }));
    assert!(uniform);
    let marginal = report
        .records
        .iter()
        .find_map(|r| match r {
            Record::Marginal { probabilities, .. } => Some(probabilities.clone()),
            _ => None,
        })
        .unwrap();
    assert!(marginal.iter().all(|p| (p - 1.0 / 3.0).abs() < 1e-9));
    let proposed = summaries(&report)
        .into_iter()
        .find(|s| s.0 == "proposed")
        .unwrap();
    assert_eq!(proposed, ("proposed".into(), 3000, 3000, 3000));
}

#[test]
fn flaw_demo_five_levels_three_participants() {
    let report = structured("flaw-demo --d 5 --t 3 --n 3 --trials 2000 --seed 11");
    let marginal = report
        .records
        .iter()
        .find_map(|r| match r {
            Record::Marginal { probabilities, .. } => Some(probabilities.clone()),
            _ => None,
        })
        .unwrap();
    assert_eq!(marginal.len(), 5);
    assert!(marginal.iter().all(|p| (p - 0.2).abs() < 1e-9));
    assert!(report
        .records
        .iter()
        .any(|r| matches!(r, Record::ChiSquare { uniform: true, .. })));
}

#[test]
fn flaw_demo_needs_two_shares() {
    let out = tqss("flaw-demo --d 5 --t 1");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tally_text_marks_divergence() {
    let out = tqss("tally --d 5 --t 3");
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("song (secret round):"));
    assert!(text.contains("proposed (hash[0] round):"));
    assert!(text.contains("note: iqft and measure are counted as t = 3"));
}

#[test]
fn tally_threshold_one() {
    let report = structured("tally --d 5 --t 1");
    for r in &report.records {
        if let Record::Tally { measured, .. } = r {
            assert_eq!(measured.cnot, Some(0));
            assert_eq!(measured.message_particles, Some(0));
            assert_eq!(measured.measure, Some(1));
        }
    }
}

#[test]
fn identical_seed_gives_identical_output() {
    let args = "run --d 7 --t 3 --n 5 --active 5,2,4 --seed 99 --trials 25 --hash-digits 3 --format structured";
    let a = tqss(args);
    let b = tqss(args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = tqss("flaw-demo --trials 300 --seed 5 --format structured");
    let e = tqss("flaw-demo --trials 300 --seed 5 --format structured");
    assert_eq!(c.stdout, e.stdout);
}

#[test]
fn structured_output_round_trips() {
    let out = tqss("run --d 5 --t 2 --n 4 --tamper 1:3 --reconstructor 2 --active 1,2 --trials 3 --format structured");
    let text = String::from_utf8(out.stdout).unwrap();
    let report = Report::parse_structured(&text).unwrap();
    assert_eq!(report.to_structured(), text);
    match &report.records[0] {
        Record::Header {
            tamper,
            reconstructor,
            ..
        } => {
            assert_eq!(*tamper, Some((1, 3)));
            assert_eq!(*reconstructor, Some(2));
        }
        other => panic!("{other:?}"),
    }
    assert!(text.lines().all(|l| l.starts_with("{\"schema\":1,")));
}

#[test]
fn oversized_register_is_refused() {
    let out = tqss("run --d 13 --t 8 --n 8");
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("13^8 = 815730721"));
    let out = tqss("run --d 5 --t 3 --max-amplitudes 100");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_flags_exit_two() {
    assert_eq!(tqss("run --tamper 2").status.code(), Some(2));
    assert_eq!(tqss("run --protocol other").status.code(), Some(2));
}
