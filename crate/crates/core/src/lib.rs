//! Selberg zeta functions, resonances and trace identities for Fuchsian
//! Schottky groups acting on the upper half-plane.

pub mod conventions;
pub mod error;
pub mod geom;
pub mod numerics;
pub mod parallel;
pub mod trace;
pub mod zeta;

pub use error::{Error, GeomError, TraceError, ZetaError};
