use super::hash::{digest_to_field, secret_digest, DigestMode, DIGEST_LEN};
use super::transcript::Payload;
use super::{ProtocolError, Result};
use crate::field::{FieldElement, Polynomial, ProtocolParams, Shadow, Share, ShareLabel};
use crate::rng::{Purpose, SeedTree};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DealerConfig {
    pub params: ProtocolParams,
    pub secret: FieldElement,
    pub digest_mode: DigestMode,
    pub seed: u64,
}

impl DealerConfig {
    pub fn new(
        params: ProtocolParams,
        secret: u64,
        digest_mode: DigestMode,
        seed: u64,
    ) -> Result<Self> {
        let secret = params.element(secret)?;
        if digest_mode.digits() == 0 {
            return Err(ProtocolError::NoDigestDigits);
        }
        Ok(Self {
            params,
            secret,
            digest_mode,
            seed,
        })
    }

    pub fn seeds(&self) -> SeedTree {
        SeedTree::new(self.seed)
    }
}

/// Everything one participant holds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParticipantState {
    /// 1-based.
    pub index: usize,
    pub x: FieldElement,
    pub secret_share: Share,
    /// One share per shared digest digit; empty in the baseline variant.
    pub hash_shares: Vec<Share>,
    /// Digest received directly from the dealer (baseline reconstructor only).
    pub received_digest: Option<[u8; DIGEST_LEN]>,
    pub shadow: Option<Shadow>,
    pub hash_shadows: Vec<Shadow>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Delivery {
    pub to: usize,
    pub payload: Payload,
}

/// What the dealer published, plus the log of what it sent to whom.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PublicRecord {
    pub modulus: u64,
    pub threshold: usize,
    pub coordinates: Vec<u64>,
    pub digest_mode: DigestMode,
    pub deliveries: Vec<Delivery>,
}

fn secret_polynomial(config: &DealerConfig) -> Result<Polynomial> {
    let mut rng = config.seeds().stream(Purpose::Polynomial, 0);
    Ok(Polynomial::sample(config.secret, &config.params, &mut rng)?)
}

fn share_secret(config: &DealerConfig) -> Result<(Vec<ParticipantState>, Vec<Delivery>)> {
    let p = secret_polynomial(config)?;
    let mut participants = Vec::with_capacity(config.params.participants());
    let mut deliveries = Vec::new();
    for (i, &x) in config.params.coordinates().iter().enumerate() {
        let share = Share::from_polynomial(&p, x, ShareLabel::Secret)?;
        deliveries.push(Delivery {
            to: i + 1,
            payload: Payload::SecretShare {
                x: x.value(),
                y: share.y.value(),
            },
        });
        participants.push(ParticipantState {
            index: i + 1,
            x,
            secret_share: share,
            hash_shares: Vec::new(),
            received_digest: None,
            shadow: None,
            hash_shadows: Vec::new(),
        });
    }
    Ok((participants, deliveries))
}

fn record(config: &DealerConfig, deliveries: Vec<Delivery>) -> PublicRecord {
    PublicRecord {
        modulus: config.params.modulus(),
        threshold: config.params.threshold(),
        coordinates: config
            .params
            .coordinates()
            .iter()
            .map(|x| x.value())
            .collect(),
        digest_mode: config.digest_mode,
        deliveries,
    }
}

/// Shares the secret with `p(x)` and each digest digit with its own `h(x)`,
/// using the same coordinates for both.
pub fn distribute(config: &DealerConfig) -> Result<(Vec<ParticipantState>, PublicRecord)> {
    let (mut participants, mut deliveries) = share_secret(config)?;
    let d = config.params.modulus();
    let digits = digest_to_field(&secret_digest(config.secret), d, config.digest_mode)?;
    for (k, &digit) in digits.iter().enumerate() {
        let mut rng = config.seeds().stream(Purpose::Polynomial, 1 + k as u64);
        let h = Polynomial::sample(digit, &config.params, &mut rng)?;
        for participant in participants.iter_mut() {
            let share = Share::from_polynomial(&h, participant.x, ShareLabel::Hash { digit: k })?;
            deliveries.push(Delivery {
                to: participant.index,
                payload: Payload::HashShare {
                    digit: k,
                    x: share.x.value(),
                    y: share.y.value(),
                },
            });
            participant.hash_shares.push(share);
        }
    }
    Ok((participants, record(config, deliveries)))
}

/// Baseline distribution: identical secret shares, with the digest handed to
/// `reconstructor` in the clear.
pub fn distribute_song(
    config: &DealerConfig,
    reconstructor: usize,
) -> Result<(Vec<ParticipantState>, PublicRecord)> {
    let (mut participants, mut deliveries) = share_secret(config)?;
    let holder = participants
        .get_mut(reconstructor.wrapping_sub(1))
        .ok_or(ProtocolError::UnknownParticipant(reconstructor))?;
    let digest = secret_digest(config.secret);
    holder.received_digest = Some(digest);
    deliveries.push(Delivery {
        to: reconstructor,
        payload: Payload::Digest(digest),
    });
    Ok((participants, record(config, deliveries)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::interpolate_at_zero;

    fn config(d: u64, t: usize, n: usize, s: u64, mode: DigestMode, seed: u64) -> DealerConfig {
        DealerConfig::new(ProtocolParams::new(d, t, n).unwrap(), s, mode, seed).unwrap()
    }

    #[test]
    fn worked_example_shares_interpolate_to_secret() {
        let cfg = config(3, 2, 2, 2, DigestMode::Single, 7);
        // n = 4 needs d >= 5; the worked example's field only has two nonzero points
        assert!(ProtocolParams::new(3, 2, 4).is_err());
        let (parts, rec) = distribute(&cfg).unwrap();
        assert_eq!(parts.len(), 2);
        let shares: Vec<Share> = parts.iter().map(|p| p.secret_share).collect();
        assert_eq!(interpolate_at_zero(&shares, 2).unwrap().value(), 2);
        assert_eq!(rec.coordinates, vec![1, 2]);
    }

    #[test]
    fn every_pair_recovers_secret_and_digest() {
        for seed in 0..20 {
            let cfg = config(7, 2, 4, 5, DigestMode::MultiDigit(3), seed);
            let (parts, _) = distribute(&cfg).unwrap();
            let expected = digest_to_field(&secret_digest(cfg.secret), 7, cfg.digest_mode).unwrap();
            for a in 0..4 {
                for b in 0..4 {
                    if a == b {
                        continue;
                    }
                    let pair = [parts[a].secret_share, parts[b].secret_share];
                    assert_eq!(interpolate_at_zero(&pair, 2).unwrap().value(), 5);
                    for (k, &digit) in expected.iter().enumerate() {
                        let pair = [parts[a].hash_shares[k], parts[b].hash_shares[k]];
                        assert_eq!(interpolate_at_zero(&pair, 2).unwrap(), digit);
                    }
                }
            }
        }
    }

    #[test]
    fn threshold_one_hands_out_the_secret() {
        let cfg = config(5, 1, 4, 3, DigestMode::Single, 1);
        let (parts, _) = distribute(&cfg).unwrap();
        assert!(parts.iter().all(|p| p.secret_share.y.value() == 3));
    }

    #[test]
    fn digest_only_reaches_baseline_reconstructor() {
        let cfg = config(5, 2, 4, 3, DigestMode::Single, 1);
        let (_, rec) = distribute(&cfg).unwrap();
        assert!(!rec
            .deliveries
            .iter()
            .any(|d| matches!(d.payload, Payload::Digest(_))));
        let (parts, rec_song) = distribute_song(&cfg, 2).unwrap();
        let digests: Vec<&Delivery> = rec_song
            .deliveries
            .iter()
            .filter(|d| matches!(d.payload, Payload::Digest(_)))
            .collect();
        assert_eq!(digests.len(), 1);
        assert_eq!(digests[0].to, 2);
        assert!(parts[1].received_digest.is_some());
        // identical secret shares in both variants
        let (proposed, _) = distribute(&cfg).unwrap();
        for (a, b) in parts.iter().zip(&proposed) {
            assert_eq!(a.secret_share, b.secret_share);
        }
        assert_eq!(
            distribute_song(&cfg, 9),
            Err(ProtocolError::UnknownParticipant(9))
        );
    }

    #[test]
    fn config_validation() {
        let params = ProtocolParams::new(5, 2, 3).unwrap();
        assert!(DealerConfig::new(params.clone(), 5, DigestMode::Single, 0).is_err());
        assert_eq!(
            DealerConfig::new(params, 1, DigestMode::MultiDigit(0), 0),
            Err(ProtocolError::NoDigestDigits)
        );
    }
}
