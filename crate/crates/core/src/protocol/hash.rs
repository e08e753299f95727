use sha1::{Digest, Sha1};

use super::{ProtocolError, Result};
use crate::field::FieldElement;

pub const DIGEST_LEN: usize = 20;

/// How the SHA-1 digest is carried into `Z_d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DigestMode {
    /// The whole digest reduced mod `d`, shared with one hash polynomial.
    #[default]
    Single,
    /// The lowest `L` base-`d` digits, each shared with its own polynomial.
    MultiDigit(usize),
}

impl DigestMode {
    pub fn digits(self) -> usize {
        match self {
            DigestMode::Single => 1,
            DigestMode::MultiDigit(l) => l,
        }
    }

    pub fn from_digits(digits: usize) -> Result<Self> {
        match digits {
            0 => Err(ProtocolError::NoDigestDigits),
            1 => Ok(DigestMode::Single),
            l => Ok(DigestMode::MultiDigit(l)),
        }
    }
}

/// Secrets are hashed as their ASCII decimal representation.
pub fn secret_preimage(secret: FieldElement) -> Vec<u8> {
    secret.value().to_string().into_bytes()
}

pub fn secret_digest(secret: FieldElement) -> [u8; DIGEST_LEN] {
    Sha1::digest(secret_preimage(secret)).into()
}

/// Interprets `digest` as a big-endian integer and returns its lowest
/// `mode.digits()` base-`d` digits, most significant first.
pub fn digest_to_field(digest: &[u8], d: u64, mode: DigestMode) -> Result<Vec<FieldElement>> {
    if digest.len() != DIGEST_LEN {
        return Err(ProtocolError::DigestLength {
            expected: DIGEST_LEN,
            got: digest.len(),
        });
    }
    if mode.digits() == 0 {
        return Err(ProtocolError::NoDigestDigits);
    }
    let mut number = digest.to_vec();
    let mut digits = Vec::with_capacity(mode.digits());
    for _ in 0..mode.digits() {
        // schoolbook long division of the byte string by d
        let mut rem: u128 = 0;
        for byte in number.iter_mut() {
            let acc = (rem << 8) | *byte as u128;
            *byte = (acc / d as u128) as u8;
            rem = acc % d as u128;
        }
        digits.push(FieldElement::reduce(rem as u64, d));
    }
    digits.reverse();
    Ok(digits)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hex(bytes: &[u8]) -> String {
        bytes.iter().map(|b| format!("{b:02x}")).collect()
    }

    fn values(v: Vec<FieldElement>) -> Vec<u64> {
        v.into_iter().map(FieldElement::value).collect()
    }

    // Reference values from an independent SHA-1 implementation (Python hashlib).
    #[test]
    fn sha1_reference_vectors() {
        let two = FieldElement::reduce(2, 3);
        assert_eq!(secret_preimage(two), b"2");
        assert_eq!(
            hex(&secret_digest(two)),
            "da4b9237bacccdf19c0760cab7aec4a8359010b0"
        );
        assert_eq!(
            hex(&secret_digest(FieldElement::reduce(0, 3))),
            "b6589fc6ab0dc82cf12099d1c2d40ab994e8410c"
        );
        assert_eq!(
            hex(&secret_digest(FieldElement::reduce(1, 3))),
            "356a192b7913b04c54574d18c28d46e6395428ab"
        );
    }

    #[test]
    fn digest_reductions_match_reference() {
        let digest = |s: u64| secret_digest(FieldElement::reduce(s, 101));
        assert_eq!(
            values(digest_to_field(&digest(2), 3, DigestMode::Single).unwrap()),
            [0]
        );
        assert_eq!(
            values(digest_to_field(&digest(2), 7, DigestMode::Single).unwrap()),
            [2]
        );
        let mod5: Vec<u64> = (0..5)
            .map(|s| digest_to_field(&digest(s), 5, DigestMode::Single).unwrap()[0].value())
            .collect();
        assert_eq!(mod5, [3, 3, 1, 4, 0]);
        let mod3: Vec<u64> = (0..3)
            .map(|s| digest_to_field(&digest(s), 3, DigestMode::Single).unwrap()[0].value())
            .collect();
        // every single-digit secret hashes to 0 mod 3
        assert_eq!(mod3, [0, 0, 0]);
        assert_eq!(
            values(digest_to_field(&digest(2), 7, DigestMode::MultiDigit(4)).unwrap()),
            [4, 0, 0, 2]
        );
        assert_eq!(
            values(digest_to_field(&digest(3), 7, DigestMode::MultiDigit(4)).unwrap()),
            [6, 0, 2, 6]
        );
        assert_eq!(
            values(digest_to_field(&digest(2), 3, DigestMode::MultiDigit(8)).unwrap()),
            [2, 1, 2, 0, 1, 1, 0, 0]
        );
    }

    #[test]
    fn zero_digest_and_errors() {
        for d in [2, 3, 13, 101] {
            assert_eq!(
                values(digest_to_field(&[0; 20], d, DigestMode::Single).unwrap()),
                [0]
            );
        }
        assert_eq!(
            digest_to_field(&[0; 19], 3, DigestMode::Single),
            Err(ProtocolError::DigestLength {
                expected: 20,
                got: 19
            })
        );
        assert_eq!(
            digest_to_field(&[0; 20], 3, DigestMode::MultiDigit(0)),
            Err(ProtocolError::NoDigestDigits)
        );
        assert_eq!(DigestMode::from_digits(1).unwrap(), DigestMode::Single);
        assert_eq!(
            DigestMode::from_digits(8).unwrap(),
            DigestMode::MultiDigit(8)
        );
    }

    #[test]
    fn lowest_digit_equals_single_mode() {
        for s in 0..50 {
            let dg = secret_digest(FieldElement::reduce(s, 101));
            for d in [2, 5, 11, 13] {
                let single = digest_to_field(&dg, d, DigestMode::Single).unwrap();
                let multi = digest_to_field(&dg, d, DigestMode::MultiDigit(6)).unwrap();
                assert_eq!(single[0], multi[5]);
            }
        }
    }

    #[test]
    fn multi_digit_distinguishes_every_tamper() {
        // every pair of distinct secrets in Z_d has distinct 8-digit and
        // 4-digit digests for the small fields used in tests
        for (d, l) in [(2, 8), (3, 8), (5, 8), (7, 8), (11, 8), (13, 8), (7, 4)] {
            let tuples: Vec<Vec<FieldElement>> = (0..d)
                .map(|s| {
                    digest_to_field(
                        &secret_digest(FieldElement::reduce(s, d)),
                        d,
                        DigestMode::MultiDigit(l),
                    )
                    .unwrap()
                })
                .collect();
            for a in 0..tuples.len() {
                for b in 0..a {
                    assert_ne!(tuples[a], tuples[b], "d={d} L={l} secrets {a},{b}");
                }
            }
        }
    }
}
