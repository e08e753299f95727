//! Dealer and participant logic for threshold quantum secret sharing.
//!
//! Two reconstruction variants share the same distribution and the same
//! entangling preparation:
//!
//! * [`Variant::Proposed`]: every active participant applies the inverse
//!   Fourier transform to its own wire, measures and broadcasts; the outcomes
//!   sum to the secret. A second sharing of the secret's SHA-1 digest is
//!   reconstructed the same way and compared against the recovered secret.
//! * [`Variant::Song`]: only the reconstructor transforms and measures its
//!   wire, which yields a uniformly random value once `t >= 2`. The dealer
//!   hands the digest to the reconstructor directly.

mod dealer;
mod hash;
mod run;
mod transcript;

use thiserror::Error;

use crate::field::FieldError;
use crate::qsim::QsimError;

pub use dealer::{
    distribute, distribute_song, DealerConfig, Delivery, ParticipantState, PublicRecord,
};
pub use hash::{digest_to_field, secret_digest, secret_preimage, DigestMode, DIGEST_LEN};
pub use run::{
    phase_sum_state, run, run_proposed, run_song, song_outcome_marginal, RoundRecord, RunOptions,
    RunOutcome, TamperSpec, Variant, Verdict,
};
pub use transcript::{
    replay, tally_resources, Actor, Event, EventKind, Gate, Payload, Phase, ResourceCount,
    Transcript,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProtocolError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Qsim(#[from] QsimError),
    #[error("digest must be {expected} bytes, got {got}")]
    DigestLength { expected: usize, got: usize },
    #[error("multi-digit digest mode needs at least one digit")]
    NoDigestDigits,
    #[error("active set must contain exactly t = {expected} participants, got {got}")]
    ActiveSetSize { expected: usize, got: usize },
    #[error("participant {0} does not exist")]
    UnknownParticipant(usize),
    #[error("participant {0} listed twice in the active set")]
    DuplicateParticipant(usize),
    #[error("reconstructor {0} is not in the active set")]
    ReconstructorNotActive(usize),
    #[error("tampering participant {0} is not in the active set")]
    TamperNotActive(usize),
    #[error("tamper delta {0} is zero mod d")]
    NullTamper(u64),
    #[error("register of d^t = {d}^{t} amplitudes is too large")]
    StateTooLarge { d: u64, t: usize },
    #[error("malformed transcript at event {seq}: {reason}")]
    MalformedTranscript { seq: usize, reason: String },
}

pub type Result<T> = std::result::Result<T, ProtocolError>;
