//! Exact computation of the critical polynomial of an optimal elliptic curve
//! over Q, and of its factorization into class polynomials, yielding a proof
//! certificate that the critical subgroup has rank zero when the relevant
//! criteria apply.
//!
//! The crate is organized bottom-up:
//!
//! * [`arith`] — prime fields on 64-bit words, CRT + rational reconstruction,
//!   dense polynomials over Q and F_p (with factorization over F_p);
//! * [`qseries`] — exact and modular q-expansions: Dedekind eta, the modular
//!   discriminant, Eisenstein series, the j-invariant, plus series reversion
//!   and composition used by the relation solver;
//! * [`gamma0`] — numerical invariants and cusp data of the modular curve
//!   X_0(N);
//! * [`newform`] — weight-2 newform coefficients attached to a rational
//!   elliptic curve (point counts, Hecke recursions, caching);
//! * [`eta`] — eta quotients on Gamma_0(N): admissibility, exact cusp orders,
//!   divisors, and solving for prescribed pole divisors;
//! * [`bivar`] — small exact bivariate polynomials (relation certificates);
//! * [`relation`] — the two relation-finding algorithms (dense kernel and
//!   pole-cancellation against an eta pair) over F_p and over Q;
//! * [`pipeline`] — the multimodular driver that assembles the critical
//!   polynomial exactly from per-prime runs;
//! * [`classpoly`] — Hilbert class polynomials via arbitrary-precision
//!   complex floats;
//! * [`verdict`] — factorization of the critical polynomial into class
//!   polynomials and the rank-zero decision rules;
//! * [`report`], [`cache`], [`fetch`] — serialization, on-disk caches, and
//!   curve-database retrieval.

pub mod arith;
pub mod bivar;
pub mod classpoly;
pub mod eta;
pub mod gamma0;
pub mod newform;
pub mod pipeline;
pub mod qseries;
pub mod relation;
pub mod report;
pub mod verdict;
pub mod error;

pub use error::{Error, Result};
