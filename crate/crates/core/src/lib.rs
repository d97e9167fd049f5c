//! Numerical analysis of perturbed Hamiltonian two-saddle loops.
//!
//! The crate is `no_std` (it needs `alloc`). IO, file formats and the command
//! line front end live in the companion `saddleloop-cli` crate.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod bounds;
pub mod counting;
pub mod dulac;
pub mod error;
pub mod fit;
pub mod flow;
pub mod melnikov;
pub mod ode;
pub mod poly;
pub mod roots;
pub mod system;

pub use error::{Error, ErrorClass, Result};
pub use num_complex::Complex64 as C64;
pub use num_rational::Rational64;
