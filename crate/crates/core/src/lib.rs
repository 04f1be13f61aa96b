//! Orbifold, equivariant Lefschetz and localized indices of Dirac-type operators on
//! explicit global-quotient models, with exact oracles and heat-kernel quadrature.

pub mod error;
pub mod rational;
pub mod cyclotomic;
pub mod scalar;
pub mod group;
pub mod algebra;
pub mod sector;
pub mod charclass;
pub mod index;
pub mod heat;
pub mod oracle;
pub mod io;

pub use cyclotomic::Cyclotomic;
pub use error::{Error, Result};
pub use group::{AffineIsometry, CrystGroup, FiniteGroupTable, FixedSet, Group};
pub use rational::Rat;
pub use scalar::Scalar;
