#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod haupt;
pub mod kring;
pub mod lattice;
pub mod modrep;
pub mod replicate;
pub mod series;
pub mod sieve;
pub mod supersplit;

pub use num_bigint::BigInt;
pub use num_rational::BigRational;
