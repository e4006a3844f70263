#![cfg_attr(not(test), no_std)]
//! DtN symbol, window bases, Birman–Schwinger assembly and the finite-difference oracle.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod error;
pub mod quad;
pub mod special;
pub mod symbol;
pub mod window;
pub mod basis;
pub mod assembly;
pub mod solver;
pub mod asymptotics;
pub mod disk;
pub mod fd;

pub use error::{Error, Result};
