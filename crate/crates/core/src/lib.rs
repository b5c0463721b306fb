//! Small-cancellation toolkit: free words, piece enumeration, relator
//! families, HNN extensions, the cyclic reduction engine, graded chains and
//! the G_L construction.

pub mod chain;
pub mod error;
pub mod glang;
pub mod harness;
pub mod hnn;
pub mod parse;
pub mod reduction;
pub mod smallcancel;
pub mod steps;
pub mod word;

pub use error::{Error, Result};
pub use word::{Alphabet, CyclicWord, Letter, Word};
