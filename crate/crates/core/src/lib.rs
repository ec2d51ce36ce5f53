//! Exact arithmetic for Cantor-series numeral systems.
//!
//! * [`schedule`] and [`codec`]: base sequences, digit words, cylinders and
//!   the shift operator.
//! * [`projection`]: the digit projection `f` from base `Q` into base `q`.
//! * [`salem`]: Salem-type functions driven by a weight matrix.
//! * [`block_map`]: the block map `g` on `u…uα` digit blocks.
//! * [`dimension`]: dimension solvers and box counting for `g`.
//! * [`cli`]: the `cantor-lab` command-line surface.

pub mod block_map;
pub mod cli;
pub mod codec;
pub mod dimension;
pub mod exec;
pub mod projection;
pub mod rational;
pub mod salem;
pub mod schedule;
pub mod selftest;

pub use block_map::{BlockAlphabet, BlockError, BlockWord, MonotonicityClass};
pub use codec::{CantorDigits, CodecError, Cylinder, Encoding, QaryDigits, TailKind};
pub use dimension::{BoxCountRecord, DimensionError, DimensionEstimate};
pub use exec::Strategy;
pub use projection::{DerivativeProbe, JumpReport, ProjectionContext, ProjectionError, Verdict};
pub use rational::Rational;
pub use salem::{EvalResult, SalemError, WeightMatrix};
pub use schedule::{BaseSchedule, Boundedness, ScheduleError, Tail};
