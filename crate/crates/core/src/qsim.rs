//! Dense state-vector simulation of a register of `d`-level qudits.
//!
//! Amplitudes are indexed in base `d` with wire 0 as the most significant
//! digit, so the basis state `|a_0 a_1 ... a_{w-1}>` lives at index
//! `a_0 d^{w-1} + ... + a_{w-1}`.
//!
//! The gate set is exactly what the sharing protocol needs: the single-wire
//! Fourier transform and its inverse, the SUM gate (the `d`-level CNOT), the
//! diagonal Pauli phase operator `U_{0,s} = sum_u w^{su} |u><u|`, and
//! computational-basis measurement.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

/// Amplitudes below this magnitude squared are treated as absent.
pub const PRUNE_EPSILON: f64 = 1e-12;

/// Tolerance for normalization checks.
pub const NORM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QsimError {
    #[error("qudit level count must be at least 2, got {0}")]
    Levels(usize),
    #[error("register needs at least one wire")]
    NoWires,
    #[error("register of {wires} wires with d = {d} exceeds addressable memory")]
    TooLarge { d: usize, wires: usize },
    #[error("digit {digit} out of range for d = {d}")]
    DigitOutOfRange { digit: usize, d: usize },
    #[error("wire {wire} out of range for a {wires}-wire register")]
    WireOutOfRange { wire: usize, wires: usize },
    #[error("control and target must differ (both {0})")]
    SameWire(usize),
    #[error("expected {expected} amplitudes, got {got}")]
    Length { expected: usize, got: usize },
    #[error("register has (numerically) zero norm")]
    ZeroNorm,
    #[error("outcome {outcome} on wire {wire} has zero probability")]
    ImpossibleOutcome { wire: usize, outcome: usize },
    #[error("malformed state dump at line {line}: {reason}")]
    Dump { line: usize, reason: String },
}

pub type Result<T> = std::result::Result<T, QsimError>;

/// One computational-basis measurement of a single wire.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasurementRecord {
    pub wire: usize,
    pub outcome: usize,
    /// Probability of `outcome` at the moment it was sampled.
    pub probability: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuditRegister {
    d: usize,
    wires: usize,
    amplitudes: Vec<Complex64>,
    /// `roots[k] = exp(2 pi i k / d)`.
    roots: Vec<Complex64>,
}

fn roots_of_unity(d: usize) -> Vec<Complex64> {
    (0..d)
        .map(|k| Complex64::from_polar(1.0, TAU * k as f64 / d as f64))
        .collect()
}

impl QuditRegister {
    /// `|0...0>` on `wires` qudits.
    pub fn zeros(d: usize, wires: usize) -> Result<Self> {
        Self::basis_state(d, &vec![0; wires])
    }

    pub fn basis_state(d: usize, digits: &[usize]) -> Result<Self> {
        let dim = Self::dimension(d, digits.len())?;
        let mut index = 0;
        for &digit in digits {
            if digit >= d {
                return Err(QsimError::DigitOutOfRange { digit, d });
            }
            index = index * d + digit;
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self {
            d,
            wires: digits.len(),
            amplitudes,
            roots: roots_of_unity(d),
        })
    }

    /// Builds a register from raw amplitudes, renormalizing them.
    pub fn from_amplitudes(d: usize, wires: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        let dim = Self::dimension(d, wires)?;
        if amplitudes.len() != dim {
            return Err(QsimError::Length {
                expected: dim,
                got: amplitudes.len(),
            });
        }
        let mut reg = Self {
            d,
            wires,
            amplitudes,
            roots: roots_of_unity(d),
        };
        reg.renormalize()?;
        Ok(reg)
    }

    /// `d^wires`, or an error if it does not fit in memory indexing.
    pub fn dimension(d: usize, wires: usize) -> Result<usize> {
        if d < 2 {
            return Err(QsimError::Levels(d));
        }
        if wires == 0 {
            return Err(QsimError::NoWires);
        }
        u32::try_from(wires)
            .ok()
            .and_then(|w| d.checked_pow(w))
            .ok_or(QsimError::TooLarge { d, wires })
    }

    pub fn levels(&self) -> usize {
        self.d
    }

    pub fn wires(&self) -> usize {
        self.wires
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `exp(2 pi i k / d)` for `k` taken mod `d`.
    pub fn root(&self, k: usize) -> Complex64 {
        self.roots[k % self.d]
    }

    pub fn index_of(&self, digits: &[usize]) -> Result<usize> {
        if digits.len() != self.wires {
            return Err(QsimError::Length {
                expected: self.wires,
                got: digits.len(),
            });
        }
        digits.iter().try_fold(0, |acc, &digit| {
            if digit >= self.d {
                Err(QsimError::DigitOutOfRange { digit, d: self.d })
            } else {
                Ok(acc * self.d + digit)
            }
        })
    }

    pub fn digits_of(&self, mut index: usize) -> Vec<usize> {
        let mut digits = vec![0; self.wires];
        for slot in digits.iter_mut().rev() {
            *slot = index % self.d;
            index /= self.d;
        }
        digits
    }

    pub fn amplitude(&self, digits: &[usize]) -> Result<Complex64> {
        Ok(self.amplitudes[self.index_of(digits)?])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`.
    pub fn inner_product(&self, other: &Self) -> Complex64 {
        assert_eq!(self.amplitudes.len(), other.amplitudes.len());
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    fn check_wire(&self, wire: usize) -> Result<()> {
        if wire >= self.wires {
            Err(QsimError::WireOutOfRange {
                wire,
                wires: self.wires,
            })
        } else {
            Ok(())
        }
    }

    /// Distance between consecutive values of `wire`'s digit in the index.
    fn stride(&self, wire: usize) -> usize {
        self.d.pow((self.wires - 1 - wire) as u32)
    }

    fn digit_at(&self, index: usize, wire: usize) -> usize {
        index / self.stride(wire) % self.d
    }

    fn renormalize(&mut self) -> Result<()> {
        let norm = self.norm_sqr().sqrt();
        if !norm.is_finite() || norm <= f64::EPSILON {
            return Err(QsimError::ZeroNorm);
        }
        let scale = 1.0 / norm;
        self.amplitudes.iter_mut().for_each(|a| *a *= scale);
        Ok(())
    }

    /// `|a> -> d^{-1/2} sum_b w^{ab} |b>` on `wire`.
    pub fn apply_qft(&mut self, wire: usize) -> Result<()> {
        self.fourier(wire, false)
    }

    /// `|b> -> d^{-1/2} sum_a w^{-ab} |a>` on `wire`.
    pub fn apply_iqft(&mut self, wire: usize) -> Result<()> {
        self.fourier(wire, true)
    }

    fn fourier(&mut self, wire: usize, inverse: bool) -> Result<()> {
        self.check_wire(wire)?;
        let d = self.d;
        let stride = self.stride(wire);
        let scale = 1.0 / (d as f64).sqrt();
        let mut column = Vec::with_capacity(d);
        let mut out = vec![Complex64::new(0.0, 0.0); d];
        for block in 0..self.amplitudes.len() / (d * stride) {
            for offset in 0..stride {
                let base = block * d * stride + offset;
                column.clear();
                column.extend(
                    (0..d)
                        .map(|a| (a, self.amplitudes[base + a * stride]))
                        .filter(|(_, amp)| amp.norm_sqr() > 0.0),
                );
                out.fill(Complex64::new(0.0, 0.0));
                for &(a, amp) in &column {
                    // phase index runs through +-a*b mod d as b increases
                    let step = if inverse { (d - a) % d } else { a };
                    let mut phase = 0;
                    for acc in out.iter_mut() {
                        *acc += self.roots[phase] * amp;
                        phase += step;
                        if phase >= d {
                            phase -= d;
                        }
                    }
                }
                for (b, acc) in out.iter().enumerate() {
                    self.amplitudes[base + b * stride] = acc * scale;
                }
            }
        }
        Ok(())
    }

    /// SUM gate: `|a>_control |b>_target -> |a>|a + b mod d>`.
    pub fn apply_cnot(&mut self, control: usize, target: usize) -> Result<()> {
        self.check_wire(control)?;
        self.check_wire(target)?;
        if control == target {
            return Err(QsimError::SameWire(control));
        }
        let d = self.d;
        let target_stride = self.stride(target);
        let mut next = vec![Complex64::new(0.0, 0.0); self.amplitudes.len()];
        for (index, &amp) in self.amplitudes.iter().enumerate() {
            let a = self.digit_at(index, control);
            let b = self.digit_at(index, target);
            let shifted = (a + b) % d;
            next[index - b * target_stride + shifted * target_stride] = amp;
        }
        self.amplitudes = next;
        Ok(())
    }

    /// Generalized Pauli phase `U_{0,s}` on `wire`.
    pub fn apply_phase_pauli(&mut self, wire: usize, s: usize) -> Result<()> {
        self.check_wire(wire)?;
        if s >= self.d {
            return Err(QsimError::DigitOutOfRange {
                digit: s,
                d: self.d,
            });
        }
        let stride = self.stride(wire);
        let d = self.d;
        for (index, amp) in self.amplitudes.iter_mut().enumerate() {
            let u = index / stride % d;
            *amp *= self.roots[s * u % d];
        }
        Ok(())
    }

    /// Probability of each digit value on `wire` (unnormalized if the
    /// register has drifted).
    pub fn marginal(&self, wire: usize) -> Result<Vec<f64>> {
        self.check_wire(wire)?;
        let stride = self.stride(wire);
        let mut probs = vec![0.0; self.d];
        for (index, amp) in self.amplitudes.iter().enumerate() {
            probs[index / stride % self.d] += amp.norm_sqr();
        }
        Ok(probs)
    }

    /// Samples `wire` in the computational basis and collapses the register.
    pub fn measure_wire<R: Rng + ?Sized>(
        &mut self,
        wire: usize,
        rng: &mut R,
    ) -> Result<MeasurementRecord> {
        let probs = self.marginal(wire)?;
        let total: f64 = probs.iter().sum();
        if !total.is_finite() || total <= f64::EPSILON {
            return Err(QsimError::ZeroNorm);
        }
        // inverse CDF; the fallback guards against rounding at the top end
        let draw = rng.random::<f64>() * total;
        let mut cumulative = 0.0;
        let mut outcome = None;
        for (digit, &p) in probs.iter().enumerate() {
            if p <= 0.0 {
                continue;
            }
            cumulative += p;
            if draw < cumulative {
                outcome = Some(digit);
                break;
            }
        }
        let outcome = outcome
            .or_else(|| probs.iter().rposition(|&p| p > 0.0))
            .ok_or(QsimError::ZeroNorm)?;
        let probability = probs[outcome] / total;
        self.collapse(wire, outcome)?;
        Ok(MeasurementRecord {
            wire,
            outcome,
            probability,
        })
    }

    /// Forces `wire` into `outcome` and returns that outcome's probability.
    pub fn project(&mut self, wire: usize, outcome: usize) -> Result<f64> {
        let probs = self.marginal(wire)?;
        if outcome >= self.d {
            return Err(QsimError::DigitOutOfRange {
                digit: outcome,
                d: self.d,
            });
        }
        let total: f64 = probs.iter().sum();
        if total.is_nan() || total <= f64::EPSILON {
            return Err(QsimError::ZeroNorm);
        }
        let p = probs[outcome] / total;
        if p.is_nan() || p <= 0.0 {
            return Err(QsimError::ImpossibleOutcome { wire, outcome });
        }
        self.collapse(wire, outcome)?;
        Ok(p)
    }

    fn collapse(&mut self, wire: usize, outcome: usize) -> Result<()> {
        let stride = self.stride(wire);
        let d = self.d;
        for (index, amp) in self.amplitudes.iter_mut().enumerate() {
            if index / stride % d != outcome {
                *amp = Complex64::new(0.0, 0.0);
            }
        }
        self.renormalize()
            .map_err(|_| QsimError::ImpossibleOutcome { wire, outcome })
    }

    /// Exact `|amplitude|^2` per basis tuple, omitting entries below
    /// [`PRUNE_EPSILON`].
    pub fn outcome_distribution(&self) -> BTreeMap<Vec<usize>, f64> {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm_sqr() >= PRUNE_EPSILON)
            .map(|(i, a)| (self.digits_of(i), a.norm_sqr()))
            .collect()
    }

    /// Text dump: a header line, then one `(digits) re im` line per basis
    /// state with non-negligible amplitude, in index order.
    pub fn to_dump(&self) -> String {
        let mut out = format!("# qudits d={} wires={}\n", self.d, self.wires);
        for (index, amp) in self.amplitudes.iter().enumerate() {
            if amp.norm_sqr() < PRUNE_EPSILON {
                continue;
            }
            let digits: Vec<String> = self.digits_of(index).iter().map(usize::to_string).collect();
            let _ = writeln!(out, "({}) {} {}", digits.join(","), amp.re, amp.im);
        }
        out
    }

    pub fn from_dump(text: &str) -> Result<Self> {
        let bad = |line: usize, reason: &str| QsimError::Dump {
            line,
            reason: reason.to_string(),
        };
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| bad(1, "empty dump"))?;
        let mut d = None;
        let mut wires = None;
        for field in header.trim_start_matches('#').split_whitespace() {
            if let Some(v) = field.strip_prefix("d=") {
                d = v.parse::<usize>().ok();
            } else if let Some(v) = field.strip_prefix("wires=") {
                wires = v.parse::<usize>().ok();
            }
        }
        let (d, wires) = d.zip(wires).ok_or_else(|| bad(1, "missing d= or wires="))?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); Self::dimension(d, wires)?];
        let probe = Self {
            d,
            wires,
            amplitudes: Vec::new(),
            roots: Vec::new(),
        };
        for (n, line) in lines {
            let line_no = n + 1;
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let tuple = parts.next().ok_or_else(|| bad(line_no, "missing digits"))?;
            let tuple = tuple
                .strip_prefix('(')
                .and_then(|s| s.strip_suffix(')'))
                .ok_or_else(|| bad(line_no, "digits must be parenthesized"))?;
            let digits = tuple
                .split(',')
                .map(|s| s.parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| bad(line_no, "bad digit"))?;
            let mut number = || -> Result<f64> {
                parts
                    .next()
                    .and_then(|s| s.parse::<f64>().ok())
                    .ok_or_else(|| bad(line_no, "bad amplitude"))
            };
            let re = number()?;
            let im = number()?;
            amplitudes[probe.index_of(&digits)?] = Complex64::new(re, im);
        }
        Self::from_amplitudes(d, wires, amplitudes)
    }
}
