//! Remote state preparation (RSP) at desk scale.
//!
//! The crate simulates the protocols by which a sender who classically knows a
//! quantum state prepares it in a receiver's lab using shared entanglement and
//! classical messages, and meters the resources each run consumes:
//!
//! * [`highent`]: exact equatorial RSP, the success-table protocol for qubits
//!   and qudits, and teleportation as the fallback.
//! * [`recycle`]: the two-outcome subblock measurement, the Bell-diagonal
//!   statistics of its failure branch, twirled entropy and the distillation
//!   ledger that yields the recycling cost point.
//! * [`lowent`]: spherical-cap geometry, the low-entanglement cost curve and
//!   a rotation-table protocol simulation.
//! * [`entprep`]: preparation of entangled states by local filtering.
//! * [`bounds`]: guessing channels, average fidelity, entangled fraction and
//!   the causality check for restricted protocols.
//! * [`runner`]: experiment configuration, CSV / JSON-lines output and the CLI.
//!
//! Everything is built on the dense linear algebra in [`qmath`].

pub mod bounds;
pub mod entprep;
pub mod error;
pub mod highent;
pub mod lowent;
pub mod qmath;
pub mod recycle;
pub mod runner;
pub mod stats;
pub mod transcript;

pub use error::{Error, Result};
pub use qmath::{DensityMatrix, RngStream, StateVector, UnitaryMatrix};
pub use transcript::{Direction, Transcript};
