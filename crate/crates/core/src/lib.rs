//! Cayley automatic representations of finitely generated groups.
//!
//! The crate is organised bottom-up:
//!
//! * [`automata`]: synchronous multi-tape automata over convolution alphabets
//!   (boolean operations, projection, joins, determinization, minimization,
//!   enumeration, counting and growth classification).
//! * [`groups`]: exact arithmetic for the supported group families.
//! * [`encodings`]: signed binary and unary integer codecs together with the
//!   arithmetic relation automata built on top of them.
//! * [`representations`]: the [`representations::CayleyRep`] type, the built-in
//!   representations and combinators, block re-encoding and the verifier.
//! * [`metrics`]: word metrics on Cayley graphs.
//! * [`measurement`]: deviation `h(n)`, fellow-traveler `s(n)`, almost-all
//!   statistics and the symbolic growth-class algebra.
//! * [`foquery`]: first-order queries over FA-recognizable relations.
//! * [`cli`]: the batch entry point used by the `cayley` binary.

pub mod automata;
pub mod cli;
pub mod encodings;
pub mod error;
pub mod foquery;
pub mod groups;
pub mod measurement;
pub mod metrics;
pub mod par;
pub mod representations;

pub use error::{Error, Result};
