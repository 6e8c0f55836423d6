//! Exact arithmetic for checking the tame local Langlands construction for
//! `GL(ℓ, F)` at finite level: `p`-adic numbers and tame extensions, local
//! symbols and Weil indices, characters of elliptic tori and their double
//! covers, the character formula and finite Deligne–Lusztig values.
//!
//! The crate is `no_std` with `alloc`. The `std` feature only adds caching of
//! cyclotomic reduction tables.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod arith;
pub mod characters;
pub mod covers;
pub mod cyclo;
pub mod error;
pub mod exact;
pub mod ext;
pub mod finite_dl;
pub mod formula;
pub mod fq;
pub mod padic;
pub mod symbols;

pub use cyclo::{CycInt, RootOfUnity};
pub use error::{Error, Result};
pub use exact::ExactValue;
pub use padic::{PadicNumber, PrimeConfig};
