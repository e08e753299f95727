//! Qudit state-vector simulation and a `(t, n)` threshold quantum secret
//! sharing engine.
//!
//! * [`field`]: arithmetic in `Z_d`, polynomial sharing and Lagrange shadows.
//! * [`qsim`]: dense `d`-level register with Fourier, SUM, phase and measurement.
//! * [`protocol`]: dealer, participants, both reconstruction variants,
//!   hash verification and transcript accounting.

pub mod field;
pub mod protocol;
pub mod qsim;
pub mod rng;
pub mod stats;
