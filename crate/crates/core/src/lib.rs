//! Numerical core for regularized Dirac-sea constructions: momentum-space
//! Dirac algebra, cutoff regularizations, wave-packet solutions, the
//! (doubly) regularized kernel of the fermionic projector, local correlation
//! operators and the particle / hole machinery, all at desk scale.

pub mod bessel;
pub mod correlation;
pub mod cutoff;
pub mod dirac;
pub mod error;
pub mod family;
pub mod holes;
pub mod kernel;
pub mod lattice;
pub mod linalg;
pub mod packet;
pub mod quad;

pub use dirac::{Bispinor, EnergySign, Mass, SpacetimePoint, Spin, SpinMatrix, ThreeMomentum};
pub use error::{CfsError, Result};
