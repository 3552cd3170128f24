//! Exact and convex-relaxation bounds for exclusivity graphs, context
//! hypergraphs, and bipartite Bell scenarios.
//!
//! The crate computes, for a graph `G` of pairwise-exclusive events (or a
//! hypergraph `Γ` of measurement contexts), the three nested value hierarchies
//!
//! * classical: the (weighted) independence number `α(G)`, by exact
//!   branch-and-bound ([`classical`]),
//! * quantum: the (weighted) Lovász number `ϑ(G)`, by a dense primal-dual
//!   interior-point SDP solver ([`sdp`], [`theta`]),
//! * generalized probabilistic: the fractional packing number `α*(Γ)`, by a
//!   dense simplex LP solver ([`linprog`]),
//!
//! together with membership tests for the corresponding convex sets of
//! probability assignments, and the Bell-scenario layer ([`bell`]) that maps
//! two-party inequalities onto exclusivity graphs (CHSH and I3322 built in).
//!
//! The crate is `no_std` (with `alloc`); all floating-point math goes through
//! `libm`, so results are bit-stable across platforms. IO, file formats, and
//! the command-line front end live in the companion `ncx-cli` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod bell;
pub mod bitset;
pub mod classical;
pub mod graph;
pub mod kcbs;
pub mod linalg;
pub mod linprog;
pub mod reproduce;
pub mod sdp;
pub mod theta;

pub use bell::{BellFunctional, BellScenario};
pub use classical::{
    independence_number, weighted_independence, ProbabilityAssignment, WeightVector,
};
pub use graph::{ContextHypergraph, Graph};
pub use linprog::{fractional_packing_number, fuzzy_membership};
pub use theta::{constrained_theta_max, lovasz_theta, theta_body_membership, weighted_theta};
