//! Exact and modular arithmetic building blocks: word-size prime fields,
//! Chinese remaindering with rational reconstruction, and dense univariate
//! polynomials over Q and over F_p.

pub mod crt;
pub mod fp64;
pub mod intpoly;
pub mod modpoly;

pub use crt::{rational_reconstruct, symmetric_lift, CrtAccumulator};
pub use fp64::{is_prime_u64, Fp, FixedMul, PrimePool};
pub use intpoly::QPoly;
pub use modpoly::ModPoly;
