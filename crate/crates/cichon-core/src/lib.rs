//! Finite, executable combinatorics of measure and category on Cantor
//! space.
//!
//! The crate has three layers:
//!
//! * exact clopen combinatorics: canonical cylinder antichains, dyadic
//!   measure, indexed clopen families ([`clopen`], [`dyadic`], [`index`]);
//! * codecs for null and meager sets as index functions against those
//!   families, with budgeted searches and explicit truncation markers
//!   ([`codecs`], [`tree`]);
//! * relational systems and executable morphisms between them, checked by
//!   seeded window-semantics contract runs, plus a small combinatorial lab
//!   of finite analogues ([`tukey`], [`zoo`], [`pideal`], [`comblab`]).
//!
//! Everything is deterministic for a fixed seed and window, and every
//! unbounded search carries a budget that turns exhaustion into an explicit
//! marker instead of divergence.

pub mod bits;
pub mod clopen;
pub mod codecs;
pub mod comblab;
pub mod dyadic;
pub mod error;
pub mod index;
pub mod json_int;
pub mod ell1;
pub mod par;
pub mod pideal;
pub mod sampler;
pub mod slalom;
pub mod tree;
pub mod tukey;
pub mod zoo;

pub use bits::BitString;
pub use clopen::ClopenSet;
pub use dyadic::Dyadic;
pub use error::{Error, Result, Truncation};
