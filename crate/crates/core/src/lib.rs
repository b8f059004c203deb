#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

//! Mixed-state partitions of unity in a truncated Fock space.

pub mod channels;
pub mod error;
pub mod fockcore;
pub mod output;
pub mod partition;
pub mod specfun;
pub mod states;
pub mod verify;

pub use error::{Error, Result};
