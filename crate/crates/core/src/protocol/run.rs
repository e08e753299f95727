use super::dealer::{distribute, distribute_song, DealerConfig, ParticipantState};
use super::hash::{digest_to_field, secret_digest};
use super::transcript::{Actor, EventKind, Gate, Phase, Transcript};
use super::{ProtocolError, Result};
use crate::field::{shadow, FieldElement, Share};
use crate::qsim::{MeasurementRecord, QuditRegister};
use crate::rng::Purpose;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    Proposed,
    Song,
}

/// A cheating participant applies `U_{0, s_v + delta}` instead of `U_{0, s_v}`
/// during the secret round.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TamperSpec {
    pub participant: usize,
    pub delta: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunOptions {
    /// 1-based participant indices; exactly `t` of them.
    pub active: Vec<usize>,
    /// Defaults to the lowest active index.
    pub reconstructor: Option<usize>,
    pub tamper: Option<TamperSpec>,
}

impl RunOptions {
    pub fn new(active: Vec<usize>) -> Self {
        Self {
            active,
            reconstructor: None,
            tamper: None,
        }
    }

    /// Participants `1..=t`.
    pub fn first(t: usize) -> Self {
        Self::new((1..=t).collect())
    }

    pub fn with_tamper(mut self, tamper: TamperSpec) -> Self {
        self.tamper = Some(tamper);
        self
    }

    pub fn with_reconstructor(mut self, reconstructor: usize) -> Self {
        self.reconstructor = Some(reconstructor);
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Honest,
    CorruptDetected,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoundRecord {
    pub phase: Phase,
    pub measurements: Vec<MeasurementRecord>,
    /// Sum of broadcasts mod `d` (or the reconstructor's lone outcome).
    pub value: FieldElement,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOutcome {
    pub secret: FieldElement,
    /// Reconstructed digest digits `h(0)'`.
    pub hash: Vec<FieldElement>,
    /// Digest digits of `SHA-1(p(0)')`.
    pub recomputed: Vec<FieldElement>,
    pub verdict: Verdict,
    pub rounds: Vec<RoundRecord>,
}

impl RunOutcome {
    pub fn measurements(&self) -> impl Iterator<Item = &MeasurementRecord> {
        self.rounds.iter().flat_map(|r| r.measurements.iter())
    }
}

/// Active participants ordered by wire: reconstructor first, the rest ascending.
fn wire_order(config: &DealerConfig, options: &RunOptions) -> Result<Vec<usize>> {
    let t = config.params.threshold();
    let n = config.params.participants();
    if options.active.len() != t {
        return Err(ProtocolError::ActiveSetSize {
            expected: t,
            got: options.active.len(),
        });
    }
    let mut active = options.active.clone();
    active.sort_unstable();
    for (i, &v) in active.iter().enumerate() {
        if v == 0 || v > n {
            return Err(ProtocolError::UnknownParticipant(v));
        }
        if i > 0 && active[i - 1] == v {
            return Err(ProtocolError::DuplicateParticipant(v));
        }
    }
    let reconstructor = options.reconstructor.unwrap_or(active[0]);
    if !active.contains(&reconstructor) {
        return Err(ProtocolError::ReconstructorNotActive(reconstructor));
    }
    if let Some(tamper) = options.tamper {
        if !active.contains(&tamper.participant) {
            return Err(ProtocolError::TamperNotActive(tamper.participant));
        }
        if tamper.delta % config.params.modulus() == 0 {
            return Err(ProtocolError::NullTamper(tamper.delta));
        }
    }
    let mut order = vec![reconstructor];
    order.extend(active.into_iter().filter(|&v| v != reconstructor));
    Ok(order)
}

fn check_state_size(config: &DealerConfig) -> Result<usize> {
    let d = config.params.modulus();
    let t = config.params.threshold();
    let levels = usize::try_from(d).map_err(|_| ProtocolError::StateTooLarge { d, t })?;
    QuditRegister::dimension(levels, t).map_err(|_| ProtocolError::StateTooLarge { d, t })?;
    Ok(levels)
}

/// One pass of preparation, entanglement, distribution of particles and
/// phase encoding; the caller decides who transforms and measures.
struct Round<'a> {
    register: QuditRegister,
    transcript: &'a mut Transcript,
    phase: Phase,
    order: &'a [usize],
}

impl<'a> Round<'a> {
    fn prepare(
        levels: usize,
        order: &'a [usize],
        phase: Phase,
        transcript: &'a mut Transcript,
    ) -> Result<Self> {
        let wires = order.len();
        let mut round = Round {
            register: QuditRegister::zeros(levels, wires)?,
            transcript,
            phase,
            order,
        };
        let reconstructor = round.actor(0);
        round.log(reconstructor, EventKind::Prepare { levels, wires });
        round.gate(0, Gate::Qft { wire: 0 })?;
        for target in 1..wires {
            round.gate(0, Gate::Cnot { control: 0, target })?;
        }
        for (wire, &to) in order.iter().enumerate().skip(1) {
            round.log(reconstructor, EventKind::Transmit { to, wire });
        }
        Ok(round)
    }

    fn actor(&self, wire: usize) -> Actor {
        Actor::Participant(self.order[wire])
    }

    fn log(&mut self, actor: Actor, kind: EventKind) {
        self.transcript.push(self.phase, actor, kind);
    }

    /// Applies `gate`, performed by the holder of wire `by`.
    fn gate(&mut self, by: usize, gate: Gate) -> Result<()> {
        match gate {
            Gate::Qft { wire } => self.register.apply_qft(wire)?,
            Gate::Iqft { wire } => self.register.apply_iqft(wire)?,
            Gate::Cnot { control, target } => self.register.apply_cnot(control, target)?,
            Gate::Pauli { wire, exponent } => {
                self.register.apply_phase_pauli(wire, exponent as usize)?
            }
        }
        let actor = self.actor(by);
        self.log(actor, EventKind::Gate(gate));
        Ok(())
    }

    fn encode(&mut self, exponents: &[u64]) -> Result<()> {
        for (wire, &exponent) in exponents.iter().enumerate() {
            self.gate(wire, Gate::Pauli { wire, exponent })?;
        }
        Ok(())
    }

    fn measure<R: rand::Rng + ?Sized>(
        &mut self,
        wire: usize,
        rng: &mut R,
    ) -> Result<MeasurementRecord> {
        self.gate(wire, Gate::Iqft { wire })?;
        let record = self.register.measure_wire(wire, rng)?;
        let actor = self.actor(wire);
        self.log(actor, EventKind::Measure(record));
        Ok(record)
    }
}

fn exponents_for(
    shares: &[(usize, Share)],
    modulus: u64,
    tamper: Option<TamperSpec>,
) -> Result<Vec<(usize, FieldElement)>> {
    let active_x: Vec<FieldElement> = shares.iter().map(|(_, s)| s.x).collect();
    shares
        .iter()
        .map(|&(v, share)| {
            let mut s = shadow(v, &share, &active_x)?.value;
            if let Some(t) = tamper.filter(|t| t.participant == v) {
                s = s + FieldElement::reduce(t.delta, modulus);
            }
            Ok((v, s))
        })
        .collect()
}

/// Proposed reconstruction: all participants transform, measure, broadcast.
fn distributed_round(
    levels: usize,
    order: &[usize],
    phase: Phase,
    exponents: &[u64],
    rng: &mut rand_chacha::ChaCha20Rng,
    transcript: &mut Transcript,
) -> Result<RoundRecord> {
    let mut round = Round::prepare(levels, order, phase, transcript)?;
    round.encode(exponents)?;
    let mut measurements = Vec::with_capacity(order.len());
    let mut sum = FieldElement::zero(levels as u64);
    for wire in 0..order.len() {
        let record = round.measure(wire, rng)?;
        let actor = round.actor(wire);
        round.log(
            actor,
            EventKind::Broadcast {
                value: record.outcome as u64,
            },
        );
        sum = sum + FieldElement::reduce(record.outcome as u64, levels as u64);
        measurements.push(record);
    }
    Ok(RoundRecord {
        phase,
        measurements,
        value: sum,
    })
}

fn shares_in_order(
    participants: &[ParticipantState],
    order: &[usize],
    pick: impl Fn(&ParticipantState) -> Share,
) -> Vec<(usize, Share)> {
    order
        .iter()
        .map(|&v| (v, pick(&participants[v - 1])))
        .collect()
}

fn log_distribution(record: &super::dealer::PublicRecord, transcript: &mut Transcript) {
    for delivery in &record.deliveries {
        transcript.push(
            Phase::Distribution,
            Actor::Dealer,
            EventKind::Deliver {
                to: delivery.to,
                payload: delivery.payload,
            },
        );
    }
}

/// Full proposed protocol: distribution, the secret round, one hash round
/// per digest digit, and the final digest comparison.
pub fn run_proposed(
    config: &DealerConfig,
    options: &RunOptions,
) -> Result<(RunOutcome, Transcript)> {
    let order = wire_order(config, options)?;
    let levels = check_state_size(config)?;
    let d = config.params.modulus();
    let seeds = config.seeds();
    let mut transcript = Transcript::new();
    let (mut participants, record) = distribute(config)?;
    log_distribution(&record, &mut transcript);

    let secret_shares = shares_in_order(&participants, &order, |p| p.secret_share);
    let shadows = exponents_for(&secret_shares, d, options.tamper)?;
    for &(v, s) in &shadows {
        participants[v - 1].shadow = Some(crate::field::Shadow { owner: v, value: s });
    }
    let exponents: Vec<u64> = shadows.iter().map(|(_, s)| s.value()).collect();
    let mut rng = seeds.stream(Purpose::Measurement, 0);
    let secret_round = distributed_round(
        levels,
        &order,
        Phase::SecretRound,
        &exponents,
        &mut rng,
        &mut transcript,
    )?;
    let secret = secret_round.value;

    let mut rounds = vec![secret_round];
    let mut hash = Vec::with_capacity(config.digest_mode.digits());
    for k in 0..config.digest_mode.digits() {
        let shares = shares_in_order(&participants, &order, |p| p.hash_shares[k]);
        let shadows = exponents_for(&shares, d, None)?;
        for &(v, g) in &shadows {
            participants[v - 1]
                .hash_shadows
                .push(crate::field::Shadow { owner: v, value: g });
        }
        let exponents: Vec<u64> = shadows.iter().map(|(_, g)| g.value()).collect();
        let mut rng = seeds.stream(Purpose::Measurement, 1 + k as u64);
        let round = distributed_round(
            levels,
            &order,
            Phase::HashRound(k),
            &exponents,
            &mut rng,
            &mut transcript,
        )?;
        hash.push(round.value);
        rounds.push(round);
    }

    let recomputed = digest_to_field(&secret_digest(secret), d, config.digest_mode)?;
    let verdict = if recomputed == hash {
        Verdict::Honest
    } else {
        Verdict::CorruptDetected
    };
    Ok((
        RunOutcome {
            secret,
            hash,
            recomputed,
            verdict,
            rounds,
        },
        transcript,
    ))
}

/// Baseline reconstruction: only the reconstructor transforms and measures
/// its own wire, and checks the outcome against the digest it was handed.
pub fn run_song(config: &DealerConfig, options: &RunOptions) -> Result<(RunOutcome, Transcript)> {
    let order = wire_order(config, options)?;
    let levels = check_state_size(config)?;
    let d = config.params.modulus();
    let mut transcript = Transcript::new();
    let (mut participants, record) = distribute_song(config, order[0])?;
    log_distribution(&record, &mut transcript);

    let secret_shares = shares_in_order(&participants, &order, |p| p.secret_share);
    let shadows = exponents_for(&secret_shares, d, options.tamper)?;
    for &(v, s) in &shadows {
        participants[v - 1].shadow = Some(crate::field::Shadow { owner: v, value: s });
    }
    let exponents: Vec<u64> = shadows.iter().map(|(_, s)| s.value()).collect();
    let mut rng = config.seeds().stream(Purpose::Measurement, 0);
    let mut round = Round::prepare(levels, &order, Phase::SecretRound, &mut transcript)?;
    round.encode(&exponents)?;
    let measurement = round.measure(0, &mut rng)?;
    let secret = FieldElement::reduce(measurement.outcome as u64, d);

    let digest = participants[order[0] - 1]
        .received_digest
        .expect("baseline reconstructor holds the digest");
    let hash = digest_to_field(&digest, d, config.digest_mode)?;
    let recomputed = digest_to_field(&secret_digest(secret), d, config.digest_mode)?;
    let verdict = if recomputed == hash {
        Verdict::Honest
    } else {
        Verdict::CorruptDetected
    };
    Ok((
        RunOutcome {
            secret,
            hash,
            recomputed,
            verdict,
            rounds: vec![RoundRecord {
                phase: Phase::SecretRound,
                measurements: vec![measurement],
                value: secret,
            }],
        },
        transcript,
    ))
}

pub fn run(
    variant: Variant,
    config: &DealerConfig,
    options: &RunOptions,
) -> Result<(RunOutcome, Transcript)> {
    match variant {
        Variant::Proposed => run_proposed(config, options),
        Variant::Song => run_song(config, options),
    }
}

/// State after preparation, entanglement and phase encoding with the given
/// per-wire exponents: `d^{-1/2} sum_u w^{(sum s_v) u} |u...u>`.
pub fn phase_sum_state(levels: usize, exponents: &[u64]) -> Result<QuditRegister> {
    let order: Vec<usize> = (1..=exponents.len()).collect();
    let mut scratch = Transcript::new();
    let mut round = Round::prepare(levels, &order, Phase::SecretRound, &mut scratch)?;
    round.encode(exponents)?;
    Ok(round.register)
}

/// Exact distribution of the baseline reconstructor's outcome for this
/// configuration, from the simulator rather than from sampling.
pub fn song_outcome_marginal(config: &DealerConfig, options: &RunOptions) -> Result<Vec<f64>> {
    let order = wire_order(config, options)?;
    let levels = check_state_size(config)?;
    let (participants, _) = distribute_song(config, order[0])?;
    let shares = shares_in_order(&participants, &order, |p| p.secret_share);
    let exponents: Vec<u64> = exponents_for(&shares, config.params.modulus(), options.tamper)?
        .iter()
        .map(|(_, s)| s.value())
        .collect();
    let mut register = phase_sum_state(levels, &exponents)?;
    register.apply_iqft(0)?;
    Ok(register.marginal(0)?)
}
