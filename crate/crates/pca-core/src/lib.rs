//! Core model for a two-state one-dimensional probabilistic cellular
//! automaton with local rule
//!
//! ```text
//! theta(+|--) = 0      theta(+|+-) = beta
//! theta(+|-+) = alpha  theta(+|++) = 1
//! ```
//!
//! applied synchronously, each site reading itself and its right
//! neighbour. The crate carries the domain types (ring and compact
//! lattice configurations, finite island mixtures), the closed-form
//! absorption analysis of the induced island-length walks, and exact
//! counter-seeded steppers suitable for coupled and replicated
//! simulation. No IO lives here; the companion CLI crate adds the
//! brute-force oracle and the Monte Carlo layer on top.
//!
//! The crate is `no_std` (with `alloc`) so the steppers can be embedded
//! anywhere; float math goes through `libm`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod analytics;
pub mod config;
pub mod dynamics;
pub mod measure;
pub mod params;
pub mod rule;

pub use analytics::{ExtReal, Side};
pub use config::{Cell, Comparison, RingConfig, WindowConfig};
pub use params::Params;
pub use rule::TransitionTable;
