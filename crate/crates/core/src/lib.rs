//! Staircase codes over extended-BCH component codes, with a standard
//! sliding-window decoder and the improved soft-aided bit-marking (iSABM)
//! decoder, plus the Monte Carlo and rate/reach analysis around them.

pub mod air;
pub mod bch;
pub mod decoder;
pub mod error;
pub mod gf;
pub mod marking;
pub mod modem;
pub mod scc;
pub mod sim;
pub mod word;

pub use bch::{BchCode, BddOutcome};
pub use error::{Error, Result};
pub use gf::GfContext;
pub use word::Word;
