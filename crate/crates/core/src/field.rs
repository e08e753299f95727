//! Prime-field arithmetic and Shamir-style polynomial sharing over `Z_d`.
//!
//! Both the secret polynomial `p(x)` and the hash polynomial `h(x)` live here,
//! together with the Lagrange-at-zero weights that turn a share into a
//! participant's shadow.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("invalid threshold: need 1 <= t <= n <= d - 1, got t={t}, n={n}, d={d}")]
    InvalidThreshold { t: usize, n: usize, d: u64 },
    #[error("expected {expected} participant coordinates, got {got}")]
    CoordinateCount { expected: usize, got: usize },
    #[error("coordinate {0} must be a nonzero element of Z_d")]
    InvalidCoordinate(u64),
    #[error("value {value} is not an element of Z_{modulus}")]
    OutOfRange { value: u64, modulus: u64 },
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("x-coordinates must be distinct and nonzero (offending x = {0})")]
    Degenerate(u64),
    #[error("share x = {0} is not part of the active coordinate set")]
    NotActive(u64),
    #[error("need {needed} shares, got {got}")]
    InsufficientShares { needed: usize, got: usize },
    #[error(
        "polynomial for threshold {threshold} needs exactly {threshold} coefficients, got {got}"
    )]
    CoefficientCount { threshold: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, FieldError>;

pub fn is_prime(d: u64) -> bool {
    if d < 2 {
        return false;
    }
    if d < 4 {
        return true;
    }
    if d.is_multiple_of(2) {
        return false;
    }
    let mut k = 3;
    while k * k <= d {
        if d.is_multiple_of(k) {
            return false;
        }
        k += 2;
    }
    true
}

/// An element of `Z_d` for a prime `d`.
///
/// The modulus travels with the value. Mixing elements of different fields is a
/// logic error and is caught by debug assertions in the arithmetic operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    value: u64,
    modulus: u64,
}

impl FieldElement {
    pub fn new(value: u64, modulus: u64) -> Result<Self> {
        if value >= modulus {
            return Err(FieldError::OutOfRange { value, modulus });
        }
        Ok(Self { value, modulus })
    }

    /// Reduces an arbitrary integer into the field.
    pub fn reduce(value: u64, modulus: u64) -> Self {
        Self {
            value: value % modulus,
            modulus,
        }
    }

    pub fn zero(modulus: u64) -> Self {
        Self { value: 0, modulus }
    }

    pub fn one(modulus: u64) -> Self {
        Self::reduce(1, modulus)
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn modulus(self) -> u64 {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    /// Multiplicative inverse via the extended Euclidean algorithm.
    pub fn inverse(self) -> Result<Self> {
        if self.value == 0 {
            return Err(FieldError::ZeroInverse);
        }
        let (mut r0, mut r1) = (self.modulus as i128, self.value as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        // r0 is gcd(d, a); 1 whenever d is prime and a != 0
        if r0 != 1 {
            return Err(FieldError::ZeroInverse);
        }
        Ok(Self::reduce(
            t0.rem_euclid(self.modulus as i128) as u64,
            self.modulus,
        ))
    }

    pub fn pow(self, mut exp: u64) -> Self {
        let mut base = self;
        let mut acc = Self::one(self.modulus);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            exp >>= 1;
        }
        acc
    }
}

/// Free-function form of [`FieldElement::inverse`].
pub fn mod_inverse(a: FieldElement) -> Result<FieldElement> {
    a.inverse()
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for FieldElement {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        debug_assert_eq!(self.modulus, rhs.modulus);
        let sum = (self.value as u128 + rhs.value as u128) % self.modulus as u128;
        Self {
            value: sum as u64,
            modulus: self.modulus,
        }
    }
}

impl Sub for FieldElement {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for FieldElement {
    type Output = Self;

    fn neg(self) -> Self {
        if self.value == 0 {
            self
        } else {
            Self {
                value: self.modulus - self.value,
                modulus: self.modulus,
            }
        }
    }
}

impl Mul for FieldElement {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        debug_assert_eq!(self.modulus, rhs.modulus);
        let prod = (self.value as u128 * rhs.value as u128) % self.modulus as u128;
        Self {
            value: prod as u64,
            modulus: self.modulus,
        }
    }
}

/// Public parameters of one `(t, n)` sharing over `Z_d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProtocolParams {
    modulus: u64,
    threshold: usize,
    coordinates: Vec<FieldElement>,
}

impl ProtocolParams {
    /// Parameters with the default coordinates `x_i = i`.
    pub fn new(d: u64, t: usize, n: usize) -> Result<Self> {
        Self::with_coordinates(d, t, n, (1..=n as u64).collect())
    }

    pub fn with_coordinates(d: u64, t: usize, n: usize, xs: Vec<u64>) -> Result<Self> {
        if !is_prime(d) {
            return Err(FieldError::NotPrime(d));
        }
        if t < 1 || t > n || n as u64 > d - 1 {
            return Err(FieldError::InvalidThreshold { t, n, d });
        }
        if xs.len() != n {
            return Err(FieldError::CoordinateCount {
                expected: n,
                got: xs.len(),
            });
        }
        let mut coordinates = Vec::with_capacity(n);
        for &x in &xs {
            if x == 0 || x >= d {
                return Err(FieldError::InvalidCoordinate(x));
            }
            let x = FieldElement::reduce(x, d);
            if coordinates.contains(&x) {
                return Err(FieldError::Degenerate(x.value()));
            }
            coordinates.push(x);
        }
        Ok(Self {
            modulus: d,
            threshold: t,
            coordinates,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn threshold(&self) -> usize {
        self.threshold
    }

    pub fn participants(&self) -> usize {
        self.coordinates.len()
    }

    pub fn coordinates(&self) -> &[FieldElement] {
        &self.coordinates
    }

    /// Coordinate of participant `index` (1-based).
    pub fn coordinate(&self, index: usize) -> Option<FieldElement> {
        index
            .checked_sub(1)
            .and_then(|i| self.coordinates.get(i))
            .copied()
    }

    pub fn element(&self, value: u64) -> Result<FieldElement> {
        FieldElement::new(value, self.modulus)
    }

    /// Number of amplitudes in a `t`-wire register, `None` on overflow.
    pub fn state_size(&self) -> Option<usize> {
        usize::try_from(self.modulus)
            .ok()?
            .checked_pow(self.threshold as u32)
    }
}

/// A degree `<= t - 1` polynomial stored as exactly `t` coefficients,
/// constant term first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    coefficients: Vec<FieldElement>,
}

impl Polynomial {
    pub fn new(coefficients: Vec<FieldElement>, threshold: usize) -> Result<Self> {
        if coefficients.len() != threshold || threshold == 0 {
            return Err(FieldError::CoefficientCount {
                threshold,
                got: coefficients.len(),
            });
        }
        Ok(Self { coefficients })
    }

    /// Fixes the constant term to `secret` and draws the other `t - 1`
    /// coefficients uniformly from `Z_d`.
    pub fn sample<R: Rng + ?Sized>(
        secret: FieldElement,
        params: &ProtocolParams,
        rng: &mut R,
    ) -> Result<Self> {
        let d = params.modulus();
        if secret.modulus() != d {
            return Err(FieldError::OutOfRange {
                value: secret.value(),
                modulus: d,
            });
        }
        let mut coefficients = Vec::with_capacity(params.threshold());
        coefficients.push(secret);
        coefficients.extend(
            (1..params.threshold()).map(|_| FieldElement::reduce(rng.random_range(0..d), d)),
        );
        Ok(Self { coefficients })
    }

    pub fn coefficients(&self) -> &[FieldElement] {
        &self.coefficients
    }

    pub fn constant_term(&self) -> FieldElement {
        self.coefficients[0]
    }

    /// Horner evaluation.
    pub fn evaluate(&self, x: FieldElement) -> FieldElement {
        let zero = FieldElement::zero(x.modulus());
        self.coefficients
            .iter()
            .rev()
            .fold(zero, |acc, &c| acc * x + c)
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.coefficients.len(), rhs.coefficients.len());
        Polynomial {
            coefficients: self
                .coefficients
                .iter()
                .zip(&rhs.coefficients)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }
}

/// Convenience wrapper matching the free-function style used by callers.
pub fn sample_polynomial<R: Rng + ?Sized>(
    secret: FieldElement,
    params: &ProtocolParams,
    rng: &mut R,
) -> Result<Polynomial> {
    Polynomial::sample(secret, params, rng)
}

pub fn evaluate(poly: &Polynomial, x: FieldElement) -> FieldElement {
    poly.evaluate(x)
}

/// Which polynomial a share was evaluated from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ShareLabel {
    Secret,
    /// Hash polynomial for digest digit `digit` (always 0 in single-element mode).
    Hash {
        digit: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Share {
    pub x: FieldElement,
    pub y: FieldElement,
    pub label: ShareLabel,
}

impl Share {
    pub fn new(x: FieldElement, y: FieldElement, label: ShareLabel) -> Result<Self> {
        if x.is_zero() {
            return Err(FieldError::InvalidCoordinate(0));
        }
        Ok(Self { x, y, label })
    }

    /// Evaluates `poly` at `x`.
    pub fn from_polynomial(poly: &Polynomial, x: FieldElement, label: ShareLabel) -> Result<Self> {
        Self::new(x, poly.evaluate(x), label)
    }
}

/// Lagrange-weighted share `s_v`; shadows of an active set sum to the shared
/// constant term.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Shadow {
    pub owner: usize,
    pub value: FieldElement,
}

fn check_distinct(active_x: &[FieldElement]) -> Result<()> {
    for (i, x) in active_x.iter().enumerate() {
        if x.is_zero() || active_x[..i].contains(x) {
            return Err(FieldError::Degenerate(x.value()));
        }
    }
    Ok(())
}

/// `prod_{j != v} x_j / (x_j - x_v)` over the active coordinates.
pub fn lagrange_weight_at_zero(
    x_v: FieldElement,
    active_x: &[FieldElement],
) -> Result<FieldElement> {
    check_distinct(active_x)?;
    if !active_x.contains(&x_v) {
        return Err(FieldError::NotActive(x_v.value()));
    }
    active_x
        .iter()
        .filter(|&&x_j| x_j != x_v)
        .try_fold(FieldElement::one(x_v.modulus()), |acc, &x_j| {
            Ok(acc * x_j * (x_j - x_v).inverse()?)
        })
}

pub fn shadow(owner: usize, share: &Share, active_x: &[FieldElement]) -> Result<Shadow> {
    let weight = lagrange_weight_at_zero(share.x, active_x)?;
    Ok(Shadow {
        owner,
        value: share.y * weight,
    })
}

/// Classical reconstruction of `f(0)` from the first `threshold` shares.
pub fn interpolate_at_zero(shares: &[Share], threshold: usize) -> Result<FieldElement> {
    if threshold == 0 || shares.len() < threshold {
        return Err(FieldError::InsufficientShares {
            needed: threshold.max(1),
            got: shares.len(),
        });
    }
    let used = &shares[..threshold];
    let xs: Vec<FieldElement> = used.iter().map(|s| s.x).collect();
    check_distinct(&xs)?;
    let modulus = xs[0].modulus();
    used.iter()
        .try_fold(FieldElement::zero(modulus), |acc, share| {
            Ok(acc + share.y * lagrange_weight_at_zero(share.x, &xs)?)
        })
}
