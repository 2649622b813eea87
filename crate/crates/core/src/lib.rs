//! Exact computations around reciprocal polynomials whose Galois groups are
//! signed-permutation groups: finite-field polynomial arithmetic, finite
//! orthogonal groups, hyperoctahedral groups, a mod-ℓ witness classifier,
//! the Selberg sieve, L-functions of elliptic curves over `F_q(t)` and
//! Hodge numbers of hypersurfaces.

pub mod error;
pub mod ffpoly;
pub mod galclass;
pub mod hodgelab;
pub mod lfunclab;
pub mod orthfin;
pub mod recpoly;
pub mod signedperm;
pub mod ser;
pub mod sieve;

pub use error::{Error, Result};
