//! Codecs for null and meager sets as index functions.

pub mod good;
pub mod meager;
pub mod null;

pub use good::{GoodFamily, GoodFamilyKind};
pub use meager::{change_of_basis, meager_encode, meager_stage, MeagerCode};
pub use null::{avoid_null, null_encode, null_stage, NullCode};
