//! Statistical laboratory for parametric families of L-functions.
//!
//! The crate is organized around the objects that a family study needs:
//! conjugacy-class data on the n-torus and measures on it ([`measures`]),
//! Haar samplers for the classical compact groups ([`rmt`]), the predicted
//! fluctuation densities of the four universality classes ([`densities`]),
//! quadratic and universal Dirichlet families ([`dirichlet`]), numerical
//! evaluation and zero finding for quadratic L-functions ([`lfunctions`]),
//! elliptic-curve sweeps, Nagao rank sums and Möbius averages
//! ([`elliptic`]), cubic-field splitting statistics ([`cubic`]),
//! local conductors and L-factors of explicit Weil–Deligne data
//! ([`weil_deligne`]), and the generic per-prime averaging layer that turns
//! coefficient data into indicator triples and a symmetry-type verdict
//! ([`family_stats`]).

#![allow(clippy::manual_is_multiple_of)]
#![allow(clippy::needless_range_loop)]
#![allow(clippy::neg_multiply)]

pub mod cubic;
pub mod densities;
pub mod dirichlet;
pub mod elliptic;
pub mod experiments;
pub mod family_stats;
pub mod lfunctions;
pub mod measures;
pub mod rmt;
pub mod util;
pub mod weil_deligne;

pub use num_complex::Complex64;
