//! Command-line front end for the `repcoh` simulator: configuration files,
//! parameter sweeps, figure presets and the verification suite.

pub mod config;
pub mod error;
pub mod figures;
pub mod sweep;
pub mod table;
pub mod verify;
