//! Exact continued-fraction machinery for the unweighted error-sum function
//! `E(x) = Σ (x - p_n/q_n)` and the relative error-sum function
//! `P(x) = Σ (q_n x - p_n)`.
//!
//! The crate is organised bottom-up:
//!
//! * [`arith`]: rationals, Möbius function, ζ partial sums with rigorous tails, Fibonacci numbers.
//! * [`interval`]: outward-rounded enclosures of real numbers.
//! * [`digits`]: digit strings, convergent tables and the Gauss-map expansion.
//! * [`symbolic`]: fundamental intervals and enumeration of digit strings.
//! * [`error_sum`]: `E`, `P`, their digit-string counterparts and cylinder oscillations.
//! * [`series`]: the coprime-pair conversion of covering series and their ζ bounds.
//! * [`transfer`]: rigorous enclosures of per-length covering sums under a digit cap.
//! * [`dimension`]: covering rectangles, graph sampling and box counting.
//! * [`verify`]: self-check suites that produce deterministic reports.

pub mod arith;
pub mod digits;
pub mod dimension;
pub mod error;
pub mod error_sum;
pub mod interval;
pub mod series;
pub mod symbolic;
pub mod transfer;
pub mod verify;

pub use arith::{Integer, Rational, DEFAULT_PRECISION};
pub use digits::{ConvergentTable, DigitString, RealNumber};
pub use error::{CfError, Result};
pub use interval::Enclosure;
