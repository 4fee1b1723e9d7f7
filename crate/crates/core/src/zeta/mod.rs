//! Selberg zeta function: product, transfer traces, dynamical determinant,
//! critical exponent, `L_Γ`, resonances and the functional equation.
//!
//! Every class record enters through [`ZetaEngine`], which lays the class
//! table out shell by shell (word length `n`) as flat arrays.

pub mod determinant;
pub mod exponent;
pub mod functional;
pub mod lgamma;
pub mod product;
pub mod sigma;
pub mod traces;
pub mod zeros;

pub use determinant::{dynamical_determinant, DetExpansion, NOISE_FLOOR};
pub use exponent::CriticalExponent;
pub use lgamma::{LValue, Method};
pub use product::{ZetaEval, ZetaOptions};
pub use sigma::Sigma;
pub use traces::TraceTable;
pub use zeros::{isolating_radius, Rect, Resonance, ResidueCheck, ZeroSearch, ZeroSearchOptions};

use crate::error::{GeomError, ZetaError};
use crate::geom::classes::cyclically_reduced_count;
use crate::geom::{ClassTable, SchottkyData};
use std::sync::OnceLock;

/// Classes of one word length, as parallel arrays in table order.
#[derive(Clone, Debug, Default)]
pub(crate) struct Shell {
    pub lengths: Vec<f64>,
    pub primitive_lengths: Vec<f64>,
    /// Number of distinct rotations of the canonical word.
    pub periods: Vec<f64>,
    pub signs: Vec<i8>,
    /// `1 / (1 − e^{−ℓ})`.
    pub inv_gap: Vec<f64>,
}

impl Shell {
    fn push(&mut self, length: f64, primitive_length: f64, period: usize, sign: i8) {
        self.lengths.push(length);
        self.primitive_lengths.push(primitive_length);
        self.periods.push(period as f64);
        self.signs.push(sign);
        self.inv_gap.push(1.0 / -(-length).exp_m1());
    }

    pub fn len(&self) -> usize {
        self.lengths.len()
    }
}

/// Class data for zeta computations on one group.
#[derive(Debug)]
pub struct ZetaEngine {
    group_hash: String,
    rank: usize,
    n_max: usize,
    pub(crate) shells: Vec<Shell>,
    pub(crate) primitive: Shell,
    /// Smallest and largest `ℓ / n` over the table.
    per_letter: (f64, f64),
    min_length: f64,
    delta: OnceLock<Result<CriticalExponent, ZetaError>>,
}

impl ZetaEngine {
    pub fn new(group: &SchottkyData, table: &ClassTable) -> Result<Self, ZetaError> {
        if table.group_hash != group.content_hash() {
            return Err(ZetaError::Geometry(GeomError::InvalidSpec(
                "class table belongs to a different group".into(),
            )));
        }
        let mut shells = vec![Shell::default(); table.n_max];
        let mut primitive = Shell::default();
        let mut per_letter = (f64::INFINITY, 0.0f64);
        let mut min_length = f64::INFINITY;
        for r in &table.records {
            let n = r.word_length();
            shells[n - 1].push(r.length, r.primitive_length, r.period(), r.sign);
            if r.is_primitive() {
                primitive.push(r.length, r.primitive_length, r.period(), r.sign);
            }
            let q = r.length / n as f64;
            per_letter = (per_letter.0.min(q), per_letter.1.max(q));
            min_length = min_length.min(r.length);
        }
        Ok(Self {
            group_hash: table.group_hash.clone(),
            rank: group.rank(),
            n_max: table.n_max,
            shells,
            primitive,
            per_letter,
            min_length,
            delta: OnceLock::new(),
        })
    }

    /// Enumerate classes to `n_max` and build the engine.
    pub fn for_group(group: &SchottkyData, n_max: usize) -> Result<Self, ZetaError> {
        let table = crate::geom::enumerate_classes(group, n_max)?;
        Self::new(group, &table)
    }

    pub fn group_hash(&self) -> &str {
        &self.group_hash
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn min_length(&self) -> f64 {
        self.min_length
    }

    /// Smallest and largest `ℓ / n` over the table.
    pub fn per_letter(&self) -> (f64, f64) {
        self.per_letter
    }

    /// Heuristic bound on `Σ_{n > n_max} Σ_{|c| = n} ω(n)·e^{−xℓ_c}/(1 − e^{−ℓ_c})`
    /// using `#classes(n) ≤ CR(n)`, `ℓ ≥ c_min·n` and `ω(n) = n^power`
    /// times `c_max^power`. Infinite when the bound diverges.
    pub(crate) fn class_tail(&self, x: f64, power: i32) -> f64 {
        let (c_min, c_max) = self.per_letter;
        if !(x > 0.0) {
            return f64::INFINITY;
        }
        let q = (2 * self.rank - 1) as f64 * (-x * c_min).exp();
        if q >= 1.0 {
            return f64::INFINITY;
        }
        let inv = 1.0 / -(-self.min_length).exp_m1();
        let mut total = 0.0;
        let mut n = self.n_max + 1;
        loop {
            let term = cyclically_reduced_count(self.rank, n)
                * (-x * c_min * n as f64).exp()
                * (c_max * n as f64).powi(power)
                * inv;
            total += term;
            if term < 1e-30 * total || n > self.n_max + 100_000 {
                break;
            }
            n += 1;
        }
        total
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn cylinder(n_max: usize) -> (SchottkyData, ZetaEngine) {
        let g = SchottkyData::cylinder(2.0).unwrap();
        let e = ZetaEngine::for_group(&g, n_max).unwrap();
        (g, e)
    }

    pub fn thin2(n_max: usize) -> (SchottkyData, ZetaEngine) {
        let g = SchottkyData::symmetric(2, 2.0, 0.1).unwrap();
        let e = ZetaEngine::for_group(&g, n_max).unwrap();
        (g, e)
    }
}
