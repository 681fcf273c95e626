//! Edge-preserving Bayesian inversion with Cauchy and α-stable difference
//! priors.
//!
//! The crate covers the whole pipeline for linear problems `m = A X + e`:
//! stable-law sampling ([`stable`]), random walks and prior draws ([`walk`]),
//! difference priors ([`prior`]), forward
//! operators ([`forward`], [`operator`]), single-component
//! Metropolis–Hastings ([`sampler`]), a majorize–minimize Gauss–Newton MAP
//! solver ([`map`]), fan-beam filtered back-projection ([`fbp`]) and test
//! phantoms ([`phantom`]).

pub mod error;
pub mod fbp;
pub mod field;
pub mod forward;
pub mod map;
pub mod operator;
pub mod phantom;
pub mod prior;
pub mod sampler;
pub mod stable;
pub mod walk;

pub use error::{Error, Result};
pub use field::{Field, Grid1D, Lattice2D, Layout};
pub use operator::SparseOperator;
