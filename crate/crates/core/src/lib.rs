//! Impartial games under normal and misère play: outcomes, Grundy values,
//! octal games, finite bipartite monoids and misère quotients.

pub mod games;
pub mod monoid;
pub mod octal;
pub mod quotient;
