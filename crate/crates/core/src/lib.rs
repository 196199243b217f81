//! Simulation and exact evaluation of online algorithms that may toss coins,
//! measure qubits, or receive advice over classical, quantum, or
//! entanglement-assisted channels.
//!
//! * [`qcore`] is a small state-vector simulator.
//! * [`game`] runs the request–answer game, either enumerating every
//!   random/measurement branch exactly or sampling a single run.
//! * [`pnh`], [`pneh`] and [`paging`] hold the concrete problems and their
//!   algorithms.

pub mod bits;
pub mod error;
pub mod game;
pub mod hats;
pub mod paging;
pub mod par;
pub mod pneh;
pub mod pnh;
pub mod qcore;

pub use bits::BitString;
pub use error::{Error, Result};
