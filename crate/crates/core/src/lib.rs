//! Numerical core for semilinear wave-type equations with fading (Prony) memory
//! and time-varying delayed velocity feedback on a 1-D interval.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure function
//! of its inputs, so independent scenarios can be evaluated concurrently.
//!
//! Module overview:
//! * [`kernel`]: Prony memory kernels, the exact ODE reduction of the memory
//!   convolution and the quadrature of the history (Dafermos) energy.
//! * [`operators`]: sine spectrum of the Dirichlet Laplacian, observation Gram
//!   matrix and the two source nonlinearities.
//! * [`delay`]: delays, gains, initial histories and the dense-output buffer.
//! * [`dynamics`]: RK4 integration with delayed lookups and a Picard oracle.
//! * [`analysis`]: energy, inequality audits, semigroup constants, the
//!   small-data certificate and decay fits.
//! * [`scenarios`]: configuration, validation and presets.

#![no_std]
#![forbid(unsafe_code)]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod delay;
pub mod dynamics;
mod error;
pub mod kernel;
pub mod linalg;
pub mod operators;
pub mod quad;
pub mod scenarios;

pub use error::{Error, Result};
