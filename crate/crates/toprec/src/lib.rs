//! Exact-arithmetic topological recursion on genus-0 spectral curves.
//!
//! The crate is organized around a small tower of exact types
//! ([`exactarith`]), a spectral-curve data model with per-branch-point
//! local expansions ([`curve`]), the recursion engine itself ([`trcore`]),
//! and three application pipelines that each come with an independent
//! oracle: simple Hurwitz numbers ([`hurwitz`]), psi-class intersection
//! numbers ([`intersect`]) and matrix-model applications — planar maps,
//! hard-wall free energies, Tracy-Widom tail coefficients, Selberg
//! integrals ([`matrixapps`]).

pub mod curve;
pub mod exactarith;
pub mod hurwitz;
pub mod intersect;
pub mod matrixapps;
pub mod trcore;

pub use exactarith::{LSeries, Poly, Rat, RatFunc};
