//! The `run`, `flaw-demo` and `tally` subcommands. Each returns a report and
//! leaves printing to the caller.

use rayon::prelude::*;
use tqss_core::protocol::{
    replay, run, song_outcome_marginal, tally_resources, DealerConfig, Phase, ProtocolError,
    RunOutcome, Transcript, Variant, Verdict,
};
use tqss_core::rng::{Purpose, SeedTree};
use tqss_core::stats::chi_square_uniform;

use crate::config::{Command, Format, RunConfig};
use crate::report::{Counts, Measurement, Record, Report};
use crate::CliError;

/// Significance level of the flaw demo's uniformity test.
pub const SIGNIFICANCE: f64 = 0.01;
pub const FLAW_DEMO_TRIALS: usize = 3000;
/// Largest tolerated gap between recorded and replayed measurement probabilities.
pub const REPLAY_TOLERANCE: f64 = 1e-9;

pub fn execute(command: &Command) -> Result<(Report, Format), CliError> {
    let (args, report) = match command {
        Command::Run(args) => (args, cmd_run(&RunConfig::from_args(args, 1)?)?),
        Command::FlawDemo(args) => (
            args,
            cmd_flaw_demo(&RunConfig::from_args(args, FLAW_DEMO_TRIALS)?)?,
        ),
        Command::Tally(args) => (args, cmd_tally(&RunConfig::from_args(args, 1)?)?),
    };
    Ok((report, args.format))
}

fn protocol_error(e: ProtocolError) -> CliError {
    match e {
        ProtocolError::Field(_)
        | ProtocolError::ActiveSetSize { .. }
        | ProtocolError::UnknownParticipant(_)
        | ProtocolError::DuplicateParticipant(_)
        | ProtocolError::ReconstructorNotActive(_)
        | ProtocolError::TamperNotActive(_)
        | ProtocolError::NullTamper(_)
        | ProtocolError::StateTooLarge { .. }
        | ProtocolError::NoDigestDigits => CliError::Config(e.to_string()),
        _ => CliError::Invariant(e.to_string()),
    }
}

fn variant_name(variant: Variant) -> &'static str {
    match variant {
        Variant::Proposed => "proposed",
        Variant::Song => "song",
    }
}

fn verdict_name(verdict: Verdict) -> &'static str {
    match verdict {
        Verdict::Honest => "honest",
        Verdict::CorruptDetected => "corrupt-detected",
    }
}

/// Dealer configuration for trial `index`; every trial draws fresh polynomials.
pub fn trial_dealer(config: &RunConfig, index: usize) -> DealerConfig {
    let mut dealer = config.dealer.clone();
    dealer.seed = SeedTree::new(config.dealer.seed)
        .child(Purpose::Trial, index as u64)
        .master();
    dealer
}

fn header(command: &str, protocol: &str, config: &RunConfig) -> Record {
    Record::Header {
        command: command.into(),
        protocol: protocol.into(),
        d: config.d(),
        t: config.t(),
        n: config.n(),
        secret: config.dealer.secret.value(),
        seed: config.dealer.seed,
        trials: config.trials,
        active: config.options.active.clone(),
        reconstructor: config.options.reconstructor,
        tamper: config.options.tamper.map(|t| (t.participant, t.delta)),
        hash_digits: config.dealer.digest_mode.digits(),
    }
}

/// Reference cost-table counts for one reconstruction round; `None` where the table has no row.
pub fn table_counts(variant: Variant, t: usize) -> Counts {
    let (iqft, measure) = match variant {
        Variant::Song => (1, 1),
        Variant::Proposed => (t.saturating_sub(1), t.saturating_sub(1)),
    };
    Counts {
        qft: Some(1),
        iqft: Some(iqft),
        unitary: Some(t),
        cnot: None,
        sum_op: Some(0),
        measure: Some(measure),
        message_particles: Some(t.saturating_sub(1)),
        decoy_particles: Some(0),
    }
}

/// Operation counts the proposed protocol produces per round, as executed here.
pub fn proposed_round_counts(t: usize) -> Counts {
    Counts {
        qft: Some(1),
        iqft: Some(t),
        unitary: Some(t),
        cnot: Some(t - 1),
        sum_op: Some(0),
        measure: Some(t),
        message_particles: Some(t - 1),
        decoy_particles: Some(0),
    }
}

pub fn proposed_note(t: usize, rounds: usize) -> String {
    format!(
        "iqft and measure are counted as t = {t}: every active participant, the reconstructor included, applies IQFT to its own wire and measures it, while the table lists t-1 = {}; a full proposed run repeats the round once per shared digest digit, {rounds} rounds in total",
        t.saturating_sub(1)
    )
}

fn tally_phase(transcript: &Transcript, phase: Phase) -> Result<Counts, CliError> {
    Ok(tally_resources(&transcript.phase(phase))
        .map_err(|e| CliError::Invariant(e.to_string()))?
        .into())
}

fn measurements(outcome: &RunOutcome) -> Vec<Measurement> {
    outcome
        .rounds
        .iter()
        .flat_map(|round| {
            round.measurements.iter().map(move |m| Measurement {
                round: round.phase.to_string(),
                wire: m.wire,
                outcome: m.outcome,
                probability: m.probability,
            })
        })
        .collect()
}

struct Trial {
    dealer: DealerConfig,
    outcome: RunOutcome,
    transcript: Transcript,
}

fn run_trials(config: &RunConfig, variant: Variant) -> Result<Vec<Trial>, CliError> {
    (0..config.trials)
        .into_par_iter()
        .map(|i| {
            let dealer = trial_dealer(config, i);
            let (outcome, transcript) =
                run(variant, &dealer, &config.options).map_err(protocol_error)?;
            Ok(Trial {
                dealer,
                outcome,
                transcript,
            })
        })
        .collect()
}

/// Secret the proposed protocol must reconstruct, tamper shift included.
fn expected_secret(config: &RunConfig) -> u64 {
    let d = config.d();
    let shift = config.options.tamper.map_or(0, |t| t.delta % d);
    (config.dealer.secret.value() + shift) % d
}

fn check_proposed(config: &RunConfig, index: usize, trial: &Trial) -> Result<(), CliError> {
    let got = trial.outcome.secret.value();
    let want = expected_secret(config);
    if got != want {
        return Err(CliError::Invariant(format!(
            "trial {index}: reconstructed {got}, expected {want}"
        )));
    }
    if trial.transcript.digest_deliveries().next().is_some() {
        return Err(CliError::Invariant(format!(
            "trial {index}: digest delivered to a participant"
        )));
    }
    let deviation = replay(&trial.transcript).map_err(|e| CliError::Invariant(e.to_string()))?;
    if deviation > REPLAY_TOLERANCE {
        return Err(CliError::Invariant(format!(
            "trial {index}: replay deviates by {deviation:e}"
        )));
    }
    Ok(())
}

pub fn cmd_run(config: &RunConfig) -> Result<Report, CliError> {
    let variant = config.variant;
    let trials = run_trials(config, variant)?;
    let mut report = Report::default();
    report.push(header("run", variant_name(variant), config));
    let secret = config.dealer.secret.value();
    let mut correct = 0;
    let mut honest = 0;
    for (i, trial) in trials.iter().enumerate() {
        if variant == Variant::Proposed {
            check_proposed(config, i, trial)?;
        }
        let out = &trial.outcome;
        let is_correct = out.secret.value() == secret;
        correct += usize::from(is_correct);
        honest += usize::from(out.verdict == Verdict::Honest);
        report.push(Record::Trial {
            trial: i,
            seed: trial.dealer.seed,
            secret: out.secret.value(),
            hash: out.hash.iter().map(|h| h.value()).collect(),
            recomputed: out.recomputed.iter().map(|h| h.value()).collect(),
            verdict: verdict_name(out.verdict).into(),
            correct: is_correct,
            measurements: measurements(out),
        });
    }
    report.push(Record::Summary {
        protocol: variant_name(variant).into(),
        trials: config.trials,
        correct,
        honest_verdicts: honest,
        success_rate: correct as f64 / config.trials as f64,
    });
    let t = config.t();
    report.push(Record::Tally {
        protocol: variant_name(variant).into(),
        round: Phase::SecretRound.to_string(),
        measured: tally_phase(&trials[0].transcript, Phase::SecretRound)?,
        table: table_counts(variant, t),
        note: (variant == Variant::Proposed)
            .then(|| proposed_note(t, 1 + config.dealer.digest_mode.digits())),
    });
    Ok(report)
}

pub fn cmd_flaw_demo(config: &RunConfig) -> Result<Report, CliError> {
    if config.t() < 2 {
        return Err(CliError::Config(
            "flaw-demo needs t >= 2; with one share the baseline reconstructs directly".into(),
        ));
    }
    let d = config.d() as usize;
    let song = run_trials(config, Variant::Song)?;
    let proposed = run_trials(config, Variant::Proposed)?;
    let mut report = Report::default();
    report.push(header("flaw-demo", "song+proposed", config));

    let mut counts = vec![0u64; d];
    for trial in &song {
        let m =
            trial.outcome.measurements().next().ok_or_else(|| {
                CliError::Invariant("baseline run recorded no measurement".into())
            })?;
        counts[m.outcome] += 1;
    }
    let secret = config.dealer.secret.value();
    let song_correct = song
        .iter()
        .filter(|t| t.outcome.secret.value() == secret)
        .count();
    let test = chi_square_uniform(&counts);
    report.push(Record::Histogram {
        protocol: "song".into(),
        counts,
    });
    report.push(Record::ChiSquare {
        statistic: test.statistic,
        degrees_of_freedom: test.degrees_of_freedom,
        p_value: test.p_value,
        significance: SIGNIFICANCE,
        critical_value: test.critical_value(SIGNIFICANCE),
        uniform: test.passes(SIGNIFICANCE),
    });
    let marginal =
        song_outcome_marginal(&trial_dealer(config, 0), &config.options).map_err(protocol_error)?;
    report.push(Record::Marginal {
        protocol: "song".into(),
        probabilities: marginal,
    });
    report.push(Record::Summary {
        protocol: "song".into(),
        trials: config.trials,
        correct: song_correct,
        honest_verdicts: song
            .iter()
            .filter(|t| t.outcome.verdict == Verdict::Honest)
            .count(),
        success_rate: song_correct as f64 / config.trials as f64,
    });

    for (i, trial) in proposed.iter().enumerate() {
        check_proposed(config, i, trial)?;
    }
    let proposed_correct = proposed
        .iter()
        .filter(|t| t.outcome.secret.value() == secret)
        .count();
    if config.options.tamper.is_none() && proposed_correct != config.trials {
        return Err(CliError::Invariant(format!(
            "proposed protocol recovered the secret in {proposed_correct}/{} trials",
            config.trials
        )));
    }
    report.push(Record::Summary {
        protocol: "proposed".into(),
        trials: config.trials,
        correct: proposed_correct,
        honest_verdicts: proposed
            .iter()
            .filter(|t| t.outcome.verdict == Verdict::Honest)
            .count(),
        success_rate: proposed_correct as f64 / config.trials as f64,
    });
    Ok(report)
}

pub fn cmd_tally(config: &RunConfig) -> Result<Report, CliError> {
    let t = config.t();
    let dealer = trial_dealer(config, 0);
    let mut report = Report::default();
    report.push(header("tally", "song+proposed", config));

    let (_, song) = run(Variant::Song, &dealer, &config.options).map_err(protocol_error)?;
    report.push(Record::Tally {
        protocol: "song".into(),
        round: Phase::SecretRound.to_string(),
        measured: tally_phase(&song, Phase::SecretRound)?,
        table: table_counts(Variant::Song, t),
        note: None,
    });

    let (_, proposed) = run(Variant::Proposed, &dealer, &config.options).map_err(protocol_error)?;
    let digits = config.dealer.digest_mode.digits();
    report.push(Record::Tally {
        protocol: "proposed".into(),
        round: Phase::SecretRound.to_string(),
        measured: tally_phase(&proposed, Phase::SecretRound)?,
        table: table_counts(Variant::Proposed, t),
        note: Some(proposed_note(t, 1 + digits)),
    });
    for k in 0..digits {
        report.push(Record::Tally {
            protocol: "proposed".into(),
            round: Phase::HashRound(k).to_string(),
            measured: tally_phase(&proposed, Phase::HashRound(k))?,
            table: table_counts(Variant::Proposed, t),
            note: None,
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::CommonArgs;

    fn config(args: CommonArgs, default_trials: usize) -> RunConfig {
        RunConfig::from_args(&args, default_trials).unwrap()
    }

    #[test]
    fn proposed_counts_follow_formula() {
        for (d, t) in [(2, 1), (3, 2), (5, 3), (5, 4), (7, 2)] {
            let cfg = config(
                CommonArgs {
                    d,
                    t,
                    n: Some(t),
                    secret: 1,
                    ..CommonArgs::default()
                },
                1,
            );
            let report = cmd_tally(&cfg).unwrap();
            let proposed: Vec<&Counts> = report
                .records
                .iter()
                .filter_map(|r| match r {
                    Record::Tally {
                        protocol, measured, ..
                    } if protocol == "proposed" => Some(measured),
                    _ => None,
                })
                .collect();
            assert_eq!(proposed.len(), 2);
            for measured in proposed {
                assert_eq!(*measured, proposed_round_counts(t), "d={d} t={t}");
            }
        }
    }

    #[test]
    fn trial_seeds_are_distinct() {
        let cfg = config(CommonArgs::default(), 1);
        let seeds: std::collections::BTreeSet<u64> =
            (0..100).map(|i| trial_dealer(&cfg, i).seed).collect();
        assert_eq!(seeds.len(), 100);
    }

    #[test]
    fn flaw_demo_rejects_threshold_one() {
        let cfg = config(
            CommonArgs {
                d: 5,
                t: 1,
                ..CommonArgs::default()
            },
            10,
        );
        assert!(matches!(cmd_flaw_demo(&cfg), Err(CliError::Config(_))));
    }

    #[test]
    fn tamper_outside_active_set_is_a_config_error() {
        let cfg = config(
            CommonArgs {
                d: 5,
                t: 2,
                n: Some(4),
                tamper: Some(crate::config::TamperArg {
                    participant: 4,
                    delta: 1,
                }),
                ..CommonArgs::default()
            },
            1,
        );
        assert!(matches!(cmd_run(&cfg), Err(CliError::Config(_))));
    }
}
