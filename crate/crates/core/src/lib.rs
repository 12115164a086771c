//! Placement delivery arrays for coded caching: verification, constructions,
//! lower bounds, exact search and a delivery simulator.

pub mod bounds;
pub mod cli;
pub mod constructions;
pub mod format;
pub mod pda;
pub mod search;
pub mod sim;

pub use pda::{verify, Cell, Entry, Grid, Params, Pda, PdaError, VerificationReport};
