//! Ordered log of a protocol run and the resource counts derived from it.

use std::fmt;
use std::fmt::Write as _;

use super::hash::DIGEST_LEN;
use super::{ProtocolError, Result};
use crate::qsim::{MeasurementRecord, QuditRegister};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Phase {
    Distribution,
    SecretRound,
    /// Reconstruction of hash digit `k`.
    HashRound(usize),
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Phase::Distribution => f.write_str("distribution"),
            Phase::SecretRound => f.write_str("secret"),
            Phase::HashRound(k) => write!(f, "hash[{k}]"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Actor {
    Dealer,
    /// Participant by 1-based index.
    Participant(usize),
}

impl fmt::Display for Actor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Actor::Dealer => f.write_str("dealer"),
            Actor::Participant(v) => write!(f, "bob{v}"),
        }
    }
}

/// Classical data handed from the dealer to one participant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Payload {
    SecretShare {
        x: u64,
        y: u64,
    },
    HashShare {
        digit: usize,
        x: u64,
        y: u64,
    },
    /// The full SHA-1 digest of the secret. Only the baseline variant sends this.
    Digest([u8; DIGEST_LEN]),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gate {
    Qft { wire: usize },
    Iqft { wire: usize },
    Cnot { control: usize, target: usize },
    Pauli { wire: usize, exponent: u64 },
}

#[derive(Clone, Debug, PartialEq)]
pub enum EventKind {
    Deliver {
        to: usize,
        payload: Payload,
    },
    /// A fresh register of `wires` qudits at `|0...0>`.
    Prepare {
        levels: usize,
        wires: usize,
    },
    Gate(Gate),
    /// Particle `wire` handed to participant `to` over the quantum channel.
    Transmit {
        to: usize,
        wire: usize,
    },
    Measure(MeasurementRecord),
    Broadcast {
        value: u64,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Event {
    pub seq: usize,
    pub phase: Phase,
    pub actor: Actor,
    pub kind: EventKind,
}

impl Event {
    fn kind_name(&self) -> &'static str {
        match &self.kind {
            EventKind::Deliver { .. } => "deliver",
            EventKind::Prepare { .. } => "prepare",
            EventKind::Gate(Gate::Qft { .. }) => "qft",
            EventKind::Gate(Gate::Iqft { .. }) => "iqft",
            EventKind::Gate(Gate::Cnot { .. }) => "cnot",
            EventKind::Gate(Gate::Pauli { .. }) => "pauli",
            EventKind::Transmit { .. } => "transmit",
            EventKind::Measure(_) => "measure",
            EventKind::Broadcast { .. } => "broadcast",
        }
    }

    fn wire_field(&self) -> String {
        match &self.kind {
            EventKind::Gate(Gate::Qft { wire })
            | EventKind::Gate(Gate::Iqft { wire })
            | EventKind::Gate(Gate::Pauli { wire, .. })
            | EventKind::Transmit { wire, .. } => wire.to_string(),
            EventKind::Measure(m) => m.wire.to_string(),
            EventKind::Gate(Gate::Cnot { control, target }) => format!("{control}>{target}"),
            _ => "-".to_string(),
        }
    }

    fn value_field(&self) -> String {
        match &self.kind {
            EventKind::Deliver { to, payload } => match payload {
                Payload::SecretShare { x, y } => format!("to=bob{to} p({x})={y}"),
                Payload::HashShare { digit, x, y } => format!("to=bob{to} h{digit}({x})={y}"),
                Payload::Digest(bytes) => {
                    let hex: String = bytes.iter().map(|b| format!("{b:02x}")).collect();
                    format!("to=bob{to} sha1={hex}")
                }
            },
            EventKind::Prepare { levels, wires } => format!("d={levels} wires={wires}"),
            EventKind::Gate(Gate::Pauli { exponent, .. }) => format!("s={exponent}"),
            EventKind::Gate(_) => "-".to_string(),
            EventKind::Transmit { to, .. } => format!("to=bob{to}"),
            EventKind::Measure(m) => format!("outcome={} p={:.12}", m.outcome, m.probability),
            EventKind::Broadcast { value } => format!("value={value}"),
        }
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}\t{}\t{}\t{}\t{}\t{}",
            self.seq,
            self.phase,
            self.kind_name(),
            self.actor,
            self.wire_field(),
            self.value_field()
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Transcript {
    events: Vec<Event>,
}

impl Transcript {
    pub fn new() -> Self {
        Self::default()
    }

    pub(crate) fn push(&mut self, phase: Phase, actor: Actor, kind: EventKind) {
        let seq = self.events.len();
        self.events.push(Event {
            seq,
            phase,
            actor,
            kind,
        });
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Events of one phase, sequence numbers preserved.
    pub fn phase(&self, phase: Phase) -> Transcript {
        Transcript {
            events: self
                .events
                .iter()
                .filter(|e| e.phase == phase)
                .cloned()
                .collect(),
        }
    }

    /// Events that hand the full digest to a participant.
    pub fn digest_deliveries(&self) -> impl Iterator<Item = &Event> {
        self.events.iter().filter(|e| {
            matches!(
                e.kind,
                EventKind::Deliver {
                    payload: Payload::Digest(_),
                    ..
                }
            )
        })
    }

    /// Tab-separated records: `seq phase kind actor wire value`.
    pub fn to_text(&self) -> String {
        let mut out = String::from("# seq\tphase\tkind\tactor\twire\tvalue\n");
        for event in &self.events {
            let _ = writeln!(out, "{event}");
        }
        out
    }

    /// Builds a transcript from raw events; used to check replay of
    /// externally assembled logs.
    pub fn from_events(events: Vec<Event>) -> Self {
        Self { events }
    }
}

/// Operation counts of the kind compared across sharing schemes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ResourceCount {
    pub qft: usize,
    pub iqft: usize,
    /// Pauli phase operators.
    pub unitary: usize,
    pub cnot: usize,
    pub sum_op: usize,
    pub measure: usize,
    pub message_particles: usize,
    pub decoy_particles: usize,
}

fn malformed(seq: usize, reason: impl Into<String>) -> ProtocolError {
    ProtocolError::MalformedTranscript {
        seq,
        reason: reason.into(),
    }
}

/// Walks the transcript checking register bookkeeping; calls `visit` for
/// every quantum event together with the current register width.
fn walk(transcript: &Transcript, mut visit: impl FnMut(&Event) -> Result<()>) -> Result<()> {
    let mut last_seq: Option<usize> = None;
    let mut width: Option<(Phase, usize)> = None;
    for event in transcript.events() {
        if last_seq.is_some_and(|s| event.seq <= s) {
            return Err(malformed(event.seq, "sequence numbers must increase"));
        }
        last_seq = Some(event.seq);
        let check = |wire: usize| match width {
            Some((phase, w)) if phase == event.phase && wire < w => Ok(()),
            Some((phase, w)) if phase == event.phase => Err(malformed(
                event.seq,
                format!("wire {wire} outside {w}-wire register"),
            )),
            _ => Err(malformed(
                event.seq,
                "quantum operation before any prepared register",
            )),
        };
        match &event.kind {
            EventKind::Prepare { wires, .. } => {
                if *wires == 0 {
                    return Err(malformed(event.seq, "empty register"));
                }
                width = Some((event.phase, *wires));
            }
            EventKind::Gate(Gate::Qft { wire })
            | EventKind::Gate(Gate::Iqft { wire })
            | EventKind::Gate(Gate::Pauli { wire, .. })
            | EventKind::Transmit { wire, .. } => check(*wire)?,
            EventKind::Gate(Gate::Cnot { control, target }) => {
                check(*control)?;
                check(*target)?;
                if control == target {
                    return Err(malformed(event.seq, "cnot control equals target"));
                }
            }
            EventKind::Measure(m) => {
                check(m.wire)?;
                if m.probability.is_nan() || m.probability <= 0.0 {
                    return Err(malformed(event.seq, "measurement with zero probability"));
                }
            }
            EventKind::Deliver { .. } | EventKind::Broadcast { .. } => {}
        }
        visit(event)?;
    }
    Ok(())
}

/// Counts operations by replaying the event log.
pub fn tally_resources(transcript: &Transcript) -> Result<ResourceCount> {
    let mut count = ResourceCount::default();
    walk(transcript, |event| {
        match &event.kind {
            EventKind::Gate(Gate::Qft { .. }) => count.qft += 1,
            EventKind::Gate(Gate::Iqft { .. }) => count.iqft += 1,
            EventKind::Gate(Gate::Pauli { .. }) => count.unitary += 1,
            EventKind::Gate(Gate::Cnot { .. }) => count.cnot += 1,
            EventKind::Measure(_) => count.measure += 1,
            EventKind::Transmit { .. } => count.message_particles += 1,
            _ => {}
        }
        Ok(())
    })?;
    Ok(count)
}

/// Re-executes every gate against a fresh simulator, forcing each recorded
/// outcome, and returns the largest deviation between recorded and replayed
/// measurement probabilities.
pub fn replay(transcript: &Transcript) -> Result<f64> {
    let mut register: Option<QuditRegister> = None;
    let mut worst: f64 = 0.0;
    walk(transcript, |event| {
        let reg = match &event.kind {
            EventKind::Prepare { levels, wires } => {
                register = Some(QuditRegister::zeros(*levels, *wires)?);
                return Ok(());
            }
            EventKind::Deliver { .. }
            | EventKind::Broadcast { .. }
            | EventKind::Transmit { .. } => return Ok(()),
            _ => register
                .as_mut()
                .ok_or_else(|| malformed(event.seq, "no register"))?,
        };
        match &event.kind {
            EventKind::Gate(Gate::Qft { wire }) => reg.apply_qft(*wire)?,
            EventKind::Gate(Gate::Iqft { wire }) => reg.apply_iqft(*wire)?,
            EventKind::Gate(Gate::Cnot { control, target }) => reg.apply_cnot(*control, *target)?,
            EventKind::Gate(Gate::Pauli { wire, exponent }) => {
                reg.apply_phase_pauli(*wire, *exponent as usize)?
            }
            EventKind::Measure(m) => {
                let p = reg.project(m.wire, m.outcome)?;
                worst = worst.max((p - m.probability).abs());
            }
            _ => unreachable!(),
        }
        Ok(())
    })?;
    Ok(worst)
}
