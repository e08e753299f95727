use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use tqss_core::field::{interpolate_at_zero, ProtocolParams, Share};
use tqss_core::protocol::{
    distribute, replay, run_proposed, run_song, tally_resources, DealerConfig, DigestMode, Phase,
    ResourceCount, RunOptions, TamperSpec, Verdict,
};
use tqss_core::stats::chi_square_uniform;

const PRIMES: [u64; 6] = [2, 3, 5, 7, 11, 13];

fn random_instance(rng: &mut ChaCha20Rng, mode: DigestMode) -> (DealerConfig, RunOptions) {
    let d = PRIMES[rng.random_range(0..PRIMES.len())];
    let max_n = (d as usize - 1).min(6);
    let n = rng.random_range(1..=max_n);
    let t = rng.random_range(1..=n.min(4));
    let params = ProtocolParams::new(d, t, n).unwrap();
    let config = DealerConfig::new(params, rng.random_range(0..d), mode, rng.random()).unwrap();
    let mut pool: Vec<usize> = (1..=n).collect();
    for i in (1..pool.len()).rev() {
        pool.swap(i, rng.random_range(0..=i));
    }
    pool.truncate(t);
    (config, RunOptions::new(pool))
}

#[test]
fn honest_runs_recover_secret_and_agree_with_interpolation() {
    let mut rng = ChaCha20Rng::seed_from_u64(0x5eed);
    for _ in 0..100 {
        let (config, options) = random_instance(&mut rng, DigestMode::Single);
        let (out, transcript) = run_proposed(&config, &options).unwrap();
        assert_eq!(out.secret, config.secret);
        assert_eq!(out.verdict, Verdict::Honest);
        let (parts, _) = distribute(&config).unwrap();
        let shares: Vec<Share> = options
            .active
            .iter()
            .map(|&v| parts[v - 1].secret_share)
            .collect();
        assert_eq!(
            out.secret,
            interpolate_at_zero(&shares, shares.len()).unwrap()
        );
        assert!(replay(&transcript).unwrap() < 1e-9);
        assert_eq!(transcript.digest_deliveries().count(), 0);
    }
}

#[test]
fn every_tamper_shifts_by_delta() {
    for (d, t, n) in [(3, 2, 2), (5, 2, 3), (7, 3, 4)] {
        let params = ProtocolParams::new(d, t, n).unwrap();
        for delta in 1..d {
            for secret in 0..d {
                let config = DealerConfig::new(
                    params.clone(),
                    secret,
                    DigestMode::Single,
                    delta * 31 + secret,
                )
                .unwrap();
                let options = RunOptions::first(t).with_tamper(TamperSpec {
                    participant: t,
                    delta,
                });
                let (out, _) = run_proposed(&config, &options).unwrap();
                assert_eq!(out.secret.value(), (secret + delta) % d);
                let detected = out.hash != out.recomputed;
                assert_eq!(detected, out.verdict == Verdict::CorruptDetected);
            }
        }
    }
}

#[test]
fn song_outcome_is_uniform_when_sampled() {
    let params = ProtocolParams::new(3, 2, 2).unwrap();
    let mut counts = [0u64; 3];
    for seed in 0..3000 {
        let config = DealerConfig::new(params.clone(), 2, DigestMode::Single, seed).unwrap();
        let (out, _) = run_song(&config, &RunOptions::first(2)).unwrap();
        counts[out.secret.value() as usize] += 1;
    }
    assert!(chi_square_uniform(&counts).passes(0.01), "{counts:?}");
}

#[test]
fn song_transcript_counts_and_digest_delivery() {
    for t in 1..=4 {
        let config = DealerConfig::new(
            ProtocolParams::new(7, t, 5).unwrap(),
            3,
            DigestMode::Single,
            1,
        )
        .unwrap();
        let (_, transcript) = run_song(&config, &RunOptions::first(t)).unwrap();
        let counts = tally_resources(&transcript.phase(Phase::SecretRound)).unwrap();
        assert_eq!(
            counts,
            ResourceCount {
                qft: 1,
                iqft: 1,
                unitary: t,
                cnot: t - 1,
                sum_op: 0,
                measure: 1,
                message_particles: t - 1,
                decoy_particles: 0,
            }
        );
        let digests: Vec<_> = transcript.digest_deliveries().collect();
        assert_eq!(digests.len(), 1);
        assert!(replay(&transcript).unwrap() < 1e-9);
    }
}

#[test]
fn proposed_counts_per_round() {
    for t in 1..=4 {
        let config = DealerConfig::new(
            ProtocolParams::new(7, t, 6).unwrap(),
            3,
            DigestMode::MultiDigit(2),
            1,
        )
        .unwrap();
        let (_, transcript) = run_proposed(&config, &RunOptions::first(t)).unwrap();
        let expected = ResourceCount {
            qft: 1,
            iqft: t,
            unitary: t,
            cnot: t - 1,
            sum_op: 0,
            measure: t,
            message_particles: t - 1,
            decoy_particles: 0,
        };
        for phase in [Phase::SecretRound, Phase::HashRound(0), Phase::HashRound(1)] {
            assert_eq!(tally_resources(&transcript.phase(phase)).unwrap(), expected);
        }
    }
}

#[test]
fn golden_transcript() {
    let config = DealerConfig::new(
        ProtocolParams::new(3, 2, 2).unwrap(),
        2,
        DigestMode::Single,
        7,
    )
    .unwrap();
    let (out, transcript) = run_proposed(&config, &RunOptions::first(2)).unwrap();
    assert_eq!(out.secret.value(), 2);
    let golden = include_str!("golden/proposed_d3_t2_s2_seed7.tsv");
    assert_eq!(transcript.to_text(), golden);
}
