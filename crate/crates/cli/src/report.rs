//! Report records and their text and line-delimited JSON renderings.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use tqss_core::protocol::ResourceCount;

/// Bumped only on incompatible changes; new fields and record kinds are additive.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub round: String,
    pub wire: usize,
    pub outcome: usize,
    pub probability: f64,
}

/// Operation counts; `None` where a column has no entry.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub qft: Option<usize>,
    pub iqft: Option<usize>,
    pub unitary: Option<usize>,
    pub cnot: Option<usize>,
    pub sum_op: Option<usize>,
    pub measure: Option<usize>,
    pub message_particles: Option<usize>,
    pub decoy_particles: Option<usize>,
}

impl From<ResourceCount> for Counts {
    fn from(c: ResourceCount) -> Self {
        Self {
            qft: Some(c.qft),
            iqft: Some(c.iqft),
            unitary: Some(c.unitary),
            cnot: Some(c.cnot),
            sum_op: Some(c.sum_op),
            measure: Some(c.measure),
            message_particles: Some(c.message_particles),
            decoy_particles: Some(c.decoy_particles),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "kebab-case")]
pub enum Record {
    Header {
        command: String,
        protocol: String,
        d: u64,
        t: usize,
        n: usize,
        secret: u64,
        seed: u64,
        trials: usize,
        active: Vec<usize>,
        reconstructor: Option<usize>,
        tamper: Option<(usize, u64)>,
        hash_digits: usize,
    },
    Trial {
        trial: usize,
        seed: u64,
        secret: u64,
        hash: Vec<u64>,
        recomputed: Vec<u64>,
        verdict: String,
        correct: bool,
        measurements: Vec<Measurement>,
    },
    Summary {
        protocol: String,
        trials: usize,
        correct: usize,
        honest_verdicts: usize,
        success_rate: f64,
    },
    Histogram {
        protocol: String,
        counts: Vec<u64>,
    },
    ChiSquare {
        statistic: f64,
        degrees_of_freedom: usize,
        p_value: f64,
        significance: f64,
        critical_value: f64,
        uniform: bool,
    },
    Marginal {
        protocol: String,
        probabilities: Vec<f64>,
    },
    Tally {
        protocol: String,
        round: String,
        measured: Counts,
        table: Counts,
        note: Option<String>,
    },
}

#[derive(Serialize, Deserialize)]
struct Line {
    schema: u32,
    #[serde(flatten)]
    record: Record,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub records: Vec<Record>,
}

fn cell(v: Option<usize>) -> String {
    v.map_or_else(|| "-".to_string(), |v| v.to_string())
}

fn counts_row(label: &str, c: &Counts) -> String {
    format!(
        "  {label:<9}{:>5}{:>6}{:>9}{:>6}{:>5}{:>9}{:>9}{:>7}",
        cell(c.qft),
        cell(c.iqft),
        cell(c.unitary),
        cell(c.cnot),
        cell(c.sum_op),
        cell(c.measure),
        cell(c.message_particles),
        cell(c.decoy_particles)
    )
}

impl Report {
    pub fn push(&mut self, record: Record) {
        self.records.push(record);
    }

    pub fn to_structured(&self) -> String {
        let mut out = String::new();
        for record in &self.records {
            let line = Line {
                schema: SCHEMA_VERSION,
                record: record.clone(),
            };
            out.push_str(&serde_json::to_string(&line).expect("report records serialize"));
            out.push('\n');
        }
        out
    }

    pub fn parse_structured(text: &str) -> Result<Self, String> {
        let mut records = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            if raw.trim().is_empty() {
                continue;
            }
            let line: Line =
                serde_json::from_str(raw).map_err(|e| format!("line {}: {e}", i + 1))?;
            if line.schema != SCHEMA_VERSION {
                return Err(format!(
                    "line {}: unsupported schema {}",
                    i + 1,
                    line.schema
                ));
            }
            records.push(line.record);
        }
        Ok(Self { records })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for record in &self.records {
            match record {
                Record::Header {
                    command,
                    protocol,
                    d,
                    t,
                    n,
                    secret,
                    seed,
                    trials,
                    active,
                    reconstructor,
                    tamper,
                    hash_digits,
                } => {
                    let active: Vec<String> = active.iter().map(usize::to_string).collect();
                    let _ = write!(
                        out,
                        "{command}: protocol={protocol} d={d} t={t} n={n} secret={secret} seed={seed} trials={trials} active={} hash-digits={hash_digits}",
                        active.join(",")
                    );
                    if let Some(r) = reconstructor {
                        let _ = write!(out, " reconstructor={r}");
                    }
                    if let Some((v, delta)) = tamper {
                        let _ = write!(out, " tamper={v}:{delta}");
                    }
                    out.push('\n');
                }
                Record::Trial {
                    trial,
                    secret,
                    hash,
                    recomputed,
                    verdict,
                    correct,
                    ..
                } => {
                    let join =
                        |v: &[u64]| v.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
                    let _ = writeln!(
                        out,
                        "  trial {trial:>5}: p(0)'={secret} h(0)'=[{}] H(p(0)')=[{}] verdict={verdict}{}",
                        join(hash),
                        join(recomputed),
                        if *correct { "" } else { " (differs from dealer secret)" }
                    );
                }
                Record::Summary {
                    protocol,
                    trials,
                    correct,
                    honest_verdicts,
                    success_rate,
                } => {
                    let _ = writeln!(
                        out,
                        "{protocol}: {correct}/{trials} correct reconstructions ({:.2}%), {honest_verdicts}/{trials} honest verdicts",
                        success_rate * 100.0
                    );
                }
                Record::Histogram { protocol, counts } => {
                    let total: u64 = counts.iter().sum();
                    let _ = writeln!(out, "{protocol} outcome histogram over {total} trials:");
                    for (outcome, &c) in counts.iter().enumerate() {
                        let share = if total == 0 {
                            0.0
                        } else {
                            c as f64 / total as f64
                        };
                        let _ = writeln!(out, "  {outcome:>3}: {c:>7}  ({share:.4})");
                    }
                }
                Record::ChiSquare {
                    statistic,
                    degrees_of_freedom,
                    p_value,
                    significance,
                    critical_value,
                    uniform,
                } => {
                    let _ = writeln!(
                        out,
                        "chi-square vs uniform: statistic={statistic:.4} dof={degrees_of_freedom} critical({significance})={critical_value:.4} p={p_value:.4} -> {}",
                        if *uniform { "consistent with uniform" } else { "NOT uniform" }
                    );
                }
                Record::Marginal {
                    protocol,
                    probabilities,
                } => {
                    let ps: Vec<String> =
                        probabilities.iter().map(|p| format!("{p:.12}")).collect();
                    let _ = writeln!(
                        out,
                        "{protocol} exact outcome marginal: [{}]",
                        ps.join(", ")
                    );
                }
                Record::Tally {
                    protocol,
                    round,
                    measured,
                    table,
                    note,
                } => {
                    let _ = writeln!(out, "{protocol} ({round} round):");
                    let _ = writeln!(
                        out,
                        "  {:<9}{:>5}{:>6}{:>9}{:>6}{:>5}{:>9}{:>9}{:>7}",
                        "", "qft", "iqft", "unitary", "cnot", "sum", "measure", "message", "decoy"
                    );
                    let _ = writeln!(out, "{}", counts_row("measured", measured));
                    let _ = writeln!(out, "{}", counts_row("table", table));
                    if let Some(note) = note {
                        let _ = writeln!(out, "  note: {note}");
                    }
                }
            }
        }
        out
    }
}
