//! Desk-scale topos quantum theory reduced by a context selector.
//!
//! The crate models a finite poset of commutative operator contexts on a
//! finite-dimensional Hilbert space, the Grothendieck and Lawvere-Tierney
//! topologies a context selector induces on it, truth values of projection
//! propositions in the resulting sheaf topos, Born-rule measures, the
//! probability poset `[0,1]` with its left-limit topology, and the product
//! site joining both.
//!
//! Module map:
//!
//! * [`operator`]: complex matrices, projections, density matrices, spectral
//!   decomposition.
//! * [`context`]: contexts as partitions of unity, the context poset and
//!   context selectors.
//! * [`sheaf`]: presheaves, sieves, the topologies `J`/`j`, closure,
//!   selector pullback and `Ω_j`.
//! * [`semantics`]: the spectral presheaf, clopen subobjects, daseinization,
//!   truth objects and valuations.
//! * [`measure`]: measures on the spectral (pre)sheaf and Born probabilities.
//! * [`interval`]: exact symbolic down-sets of `[0,1]`.
//! * [`product`]: the product site of contexts and probability levels.
//! * [`translation`]: presheaf/sheaf translation ranges and the reduced
//!   presheaf theory on selected contexts.
//! * [`verify`]: invariant suites runnable against any built system.

pub mod context;
pub mod error;
pub mod fixtures;
pub mod interval;
pub mod measure;
pub mod operator;
pub mod product;
pub mod semantics;
pub mod sheaf;
pub mod tolerance;
pub mod translation;
pub mod verify;

pub use context::{Context, ContextId, ContextPoset, Selector, SelectorSpec, SpectrumElement};
pub use error::{Error, Result};
pub use operator::{
    BorelSelection, ComplexMatrix, DensityMatrix, Projection, SpectralDecomposition,
};
pub use tolerance::{epsilon, set_epsilon, DEFAULT_MAX_ENUM};
