//! Hyperbolic geometry, Schottky groups, words, classes and domain integrals.

pub mod classes;
pub mod domain;
pub mod group;
pub mod hyperbolic;
pub mod mobius;
pub mod orbit;
pub mod word;

pub use classes::{enumerate_classes, enumerate_classes_with_budget, ClassTable, ConjClassRecord};
pub use domain::{domain_quadrature, DomainIntegral, DomainOptions};
pub use group::{build_schottky, GroupSpec, GroupTemplate, Interval, SchottkyData, ValidationReport};
pub use hyperbolic::{distance, hyperbolic_distance, PolarFrame};
pub use mobius::MobiusMap;
pub use orbit::{orbit_distances, orbit_sum, OrbitSum};
pub use word::{canonical_necklace, Word};
