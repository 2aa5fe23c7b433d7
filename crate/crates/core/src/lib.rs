//! Crepant toric wall-crossing computations: chambers and walls of GIT data,
//! stacky fans, equivariant restrictions, I- and H-functions, Mellin-Barnes
//! continuation, connection coefficients and the Fourier-Mukai transform on
//! localized K-theory.

pub mod cohomology;
pub mod continuation;
pub mod cyclotomic;
pub mod error;
pub mod fan;
pub mod gamma;
pub mod git;
pub mod io;
pub mod ktheory;
pub mod lattice;
pub mod linalg;
pub mod params;
pub mod polyhedral;
pub mod quadrature;
pub mod rat;
pub mod series;
pub mod symbolic;

pub use error::{Error, Result};
