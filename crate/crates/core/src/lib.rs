//! Controllability of discrete-time linear systems `x_k = D x_{k-1} + H h_k`
//! when every input vector `h_k` may have at most `s` nonzero entries.
//!
//! Input indices are 0-based throughout.
//!
//! The crate is `no_std` (with `alloc`); the `std` feature only adds
//! wall-clock deadlines to the combinatorial searches.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod bounds;
pub mod combinations;
pub mod ctrb;
pub mod decomp;
mod error;
pub mod fixtures;
pub mod matcore;
pub mod oracle;
pub mod steer;
mod system;

pub use error::{Error, Result};
pub use matcore::{Matrix, Tolerance};
pub use system::{ModelWarning, SystemModel};

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
struct ReadmeDoctests;
