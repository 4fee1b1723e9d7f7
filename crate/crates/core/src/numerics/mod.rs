//! Numerical building blocks shared by the geometric and spectral modules.

pub mod jet;
pub mod quad;
pub mod sum;

pub use jet::Jet;
pub use quad::{tanh_sinh, ChebyshevPanel, GaussLegendre, QuadEstimate, Stalled};
pub use sum::{sum_ordered, ComplexSum, NeumaierSum};
