//! Group distance magic labelings of graphs, with a focus on lexicographic
//! products `G[C4]`.
//!
//! * [`abelian`]: finite abelian groups, enumeration up to isomorphism, and
//!   CRT splitting into a `p`-part and its complement.
//! * [`graphs`]: simple graphs, named families, and `G[H]`.
//! * [`labelings`]: weights and the classic and group verifiers.
//! * [`constructions`]: explicit magic labelings of `G[C4]` and `G[H]`.
//! * [`oracle`]: exhaustive searches, the pair-sum reduction for classic
//!   labelings of `X[C4]`, and infeasibility certificates.

pub mod abelian;
pub mod constructions;
pub mod error;
pub mod graphs;
pub mod labelings;
pub mod oracle;

pub use error::{Error, Result};
