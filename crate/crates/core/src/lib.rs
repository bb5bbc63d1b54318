//! Desk-scale computational companion for sign changes of real multiplicative
//! functions in arithmetic progressions.

pub mod arith;
pub mod charsums;
pub mod densemodel;
pub mod error;
pub mod group;
pub mod multfunc;
pub mod pipeline;
pub mod setcomb;
pub mod sieve;

pub use error::{Error, Result};
