//! Coherence generation in a target system driven by repeated collisions with
//! freshly thermalised bath clusters.
//!
//! The crate is layered bottom-up:
//!
//! - [`linalg`]: dense operators on tensor-product spaces, partial traces,
//!   Hermitian exponentials and Gibbs states.
//! - [`model`]: scenario description and the operators and bath moments it implies.
//! - [`collision`]: the exact discrete collision map and its trajectories.
//! - [`mastereq`]: the coarse-grained Lindblad generator, Bloch equations and
//!   closed-form steady states.
//! - [`transient`]: transient coherence maxima, numerically and in closed form.
//! - [`thermo`]: heat, work and energy currents.

pub mod collision;
pub mod error;
pub mod linalg;
pub mod mastereq;
pub mod model;
pub mod thermo;
pub mod transient;

pub use error::{Error, Result};
