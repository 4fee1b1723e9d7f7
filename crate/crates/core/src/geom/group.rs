//! Schottky groups: specification files, templates and validation.

use super::hyperbolic::distance_to_semicircle;
use super::mobius::MobiusMap;
use crate::error::GeomError;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fmt;

/// Hyperbolic distance below which a point counts as lying on a side of `F`.
pub const SIDE_TOLERANCE: f64 = 1e-9;

/// Closed interval `[lo, hi]` of the real line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn centered(center: f64, radius: f64) -> Self {
        Self::new(center - radius, center + radius)
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn radius(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }

    /// Closed intervals intersect (touching counts).
    pub fn meets(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn contains_interior(&self, x: f64) -> bool {
        x > self.lo && x < self.hi
    }

    /// `z` lies strictly inside the half-disk over this interval.
    pub fn disk_contains(&self, z: Complex64) -> bool {
        let dx = z.re - self.center();
        dx * dx + z.im * z.im < self.radius() * self.radius()
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// The pair `(I₊, I₋)` of a generator: it maps the exterior of `I₋` onto
/// the interior of `I₊`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntervalPair {
    pub plus: Interval,
    pub minus: Interval,
}

/// Parametrised families of groups.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupTemplate {
    /// One generator conjugate to `diag(e^{ℓ/2}, e^{-ℓ/2})`.
    Cylinder { length: String },
    /// `2r` intervals of common radius at equally spaced centres
    /// `(j − (2r − 1)/2)·spacing`; generator `i` pairs centre `i` with
    /// centre `i + r`.
    Symmetric {
        rank: usize,
        spacing: String,
        radius: String,
    },
}

/// Interval pair as written in a group file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalPairSpec {
    pub plus: [String; 2],
    pub minus: [String; 2],
}

/// On-disk group specification. Reals are decimal strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub rank: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub generators: Vec<[String; 4]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub intervals: Vec<IntervalPairSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_point: Option<[String; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub template: Option<GroupTemplate>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, String>,
}

impl GroupSpec {
    pub fn from_json(text: &str) -> Result<Self, GeomError> {
        serde_json::from_str(text).map_err(|e| GeomError::InvalidSpec(e.to_string()))
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("group spec serialises")
    }

    pub fn cylinder(length: f64) -> Self {
        Self::from_template(1, GroupTemplate::Cylinder {
            length: format_real(length),
        })
    }

    pub fn symmetric(rank: usize, spacing: f64, radius: f64) -> Self {
        Self::from_template(
            rank,
            GroupTemplate::Symmetric {
                rank,
                spacing: format_real(spacing),
                radius: format_real(radius),
            },
        )
    }

    fn from_template(rank: usize, template: GroupTemplate) -> Self {
        Self {
            rank,
            generators: Vec::new(),
            intervals: Vec::new(),
            base_point: None,
            template: Some(template),
            metadata: BTreeMap::new(),
        }
    }

    /// Replace template-only data by explicit generators and intervals.
    pub fn materialize(&self) -> Result<Self, GeomError> {
        let (gens, pairs) = self.resolve()?;
        let mut out = self.clone();
        out.generators = gens
            .iter()
            .map(|g| [g.a, g.b, g.c, g.d].map(format_real))
            .collect();
        out.intervals = pairs
            .iter()
            .map(|p| IntervalPairSpec {
                plus: [format_real(p.plus.lo), format_real(p.plus.hi)],
                minus: [format_real(p.minus.lo), format_real(p.minus.hi)],
            })
            .collect();
        Ok(out)
    }

    fn resolve(&self) -> Result<(Vec<MobiusMap>, Vec<IntervalPair>), GeomError> {
        if self.rank == 0 {
            return Err(GeomError::InvalidSpec("rank must be at least 1".into()));
        }
        if !self.generators.is_empty() || !self.intervals.is_empty() {
            if self.generators.len() != self.rank || self.intervals.len() != self.rank {
                return Err(GeomError::InvalidSpec(format!(
                    "rank {} needs {} generators and interval pairs, found {} and {}",
                    self.rank,
                    self.rank,
                    self.generators.len(),
                    self.intervals.len()
                )));
            }
            let mut gens = Vec::with_capacity(self.rank);
            for (i, g) in self.generators.iter().enumerate() {
                let [a, b, c, d] = [
                    parse_real(&g[0])?,
                    parse_real(&g[1])?,
                    parse_real(&g[2])?,
                    parse_real(&g[3])?,
                ];
                let det = a * d - b * c;
                if (det - 1.0).abs() > 1e-9 * (1.0 + (a * d).abs()) {
                    return Err(GeomError::InvalidSpec(format!(
                        "generator {i} has determinant {det}, expected 1"
                    )));
                }
                gens.push(MobiusMap::normalized(a, b, c, d).expect("positive determinant"));
            }
            let mut pairs = Vec::with_capacity(self.rank);
            for p in &self.intervals {
                let plus = Interval::new(parse_real(&p.plus[0])?, parse_real(&p.plus[1])?);
                let minus = Interval::new(parse_real(&p.minus[0])?, parse_real(&p.minus[1])?);
                for iv in [plus, minus] {
                    if !(iv.lo < iv.hi) {
                        return Err(GeomError::InvalidSpec(format!("empty interval {iv}")));
                    }
                }
                pairs.push(IntervalPair { plus, minus });
            }
            return Ok((gens, pairs));
        }
        match &self.template {
            None => Err(GeomError::InvalidSpec(
                "either generators with intervals or a template is required".into(),
            )),
            Some(GroupTemplate::Cylinder { length }) => {
                if self.rank != 1 {
                    return Err(GeomError::InvalidSpec("cylinder template has rank 1".into()));
                }
                let length = parse_real(length)?;
                if !(length > 0.0) {
                    return Err(GeomError::InvalidSpec("cylinder length must be positive".into()));
                }
                let c = (0.5 * length).cosh();
                Ok((
                    vec![circle_pairing(-c, 1.0, c, 1.0)],
                    vec![IntervalPair {
                        plus: Interval::centered(c, 1.0),
                        minus: Interval::centered(-c, 1.0),
                    }],
                ))
            }
            Some(GroupTemplate::Symmetric {
                rank,
                spacing,
                radius,
            }) => {
                if *rank != self.rank {
                    return Err(GeomError::InvalidSpec("template rank differs from rank".into()));
                }
                let spacing = parse_real(spacing)?;
                let radius = parse_real(radius)?;
                if !(spacing > 0.0 && radius > 0.0) {
                    return Err(GeomError::InvalidSpec(
                        "spacing and radius must be positive".into(),
                    ));
                }
                let r = *rank;
                let center = |j: usize| (j as f64 - (2 * r - 1) as f64 / 2.0) * spacing;
                let mut gens = Vec::with_capacity(r);
                let mut pairs = Vec::with_capacity(r);
                for i in 0..r {
                    let (a, b) = (center(i), center(i + r));
                    gens.push(circle_pairing(a, radius, b, radius));
                    pairs.push(IntervalPair {
                        plus: Interval::centered(b, radius),
                        minus: Interval::centered(a, radius),
                    });
                }
                Ok((gens, pairs))
            }
        }
    }

    fn base(&self) -> Result<Complex64, GeomError> {
        match &self.base_point {
            None => Ok(Complex64::new(0.0, 1.0)),
            Some([re, im]) => Ok(Complex64::new(parse_real(re)?, parse_real(im)?)),
        }
    }
}

/// `z ↦ b − r₋r₊/(z − a)`: maps the exterior of the circle `(a, r₋)` onto the
/// interior of `(b, r₊)`.
pub fn circle_pairing(a: f64, r_minus: f64, b: f64, r_plus: f64) -> MobiusMap {
    let rr = r_minus * r_plus;
    MobiusMap::normalized(b, -a * b - rr, 1.0, -a).expect("circle pairing has det r₋r₊ > 0")
}

pub fn parse_real(s: &str) -> Result<f64, GeomError> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| GeomError::InvalidSpec(format!("'{s}' is not a finite decimal real")))
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

/// One invariant checked while validating a group.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<ValidationCheck>,
}

impl ValidationReport {
    fn record(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(ValidationCheck {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Per-letter geometry: the matrix of the letter and the half-disk `D_x`
/// into which it maps the complement of `D_{x⁻¹}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LetterGeometry {
    pub letter: i32,
    pub map: MobiusMap,
    pub disk: Interval,
}

/// A validated convex-cocompact Schottky group.
#[derive(Clone, Debug, PartialEq)]
pub struct SchottkyData {
    rank: usize,
    generators: Vec<MobiusMap>,
    intervals: Vec<IntervalPair>,
    base_point: Complex64,
    letters: Vec<LetterGeometry>,
    hash: String,
    spec: GroupSpec,
}

/// Position of a letter `±i` in letter-indexed tables.
#[inline]
pub fn letter_index(letter: i32) -> usize {
    if letter > 0 {
        2 * (letter as usize - 1)
    } else {
        2 * ((-letter) as usize - 1) + 1
    }
}

/// Validate a specification and build the group.
pub fn build_schottky(spec: &GroupSpec) -> Result<(SchottkyData, ValidationReport), GeomError> {
    let (generators, intervals) = spec.resolve()?;
    let base_point = spec.base()?;
    let mut report = ValidationReport::default();

    // all 2r closed intervals pairwise disjoint
    let mut labelled: Vec<(String, Interval)> = Vec::new();
    for (i, p) in intervals.iter().enumerate() {
        labelled.push((format!("I+{}", i + 1), p.plus));
        labelled.push((format!("I-{}", i + 1), p.minus));
    }
    for i in 0..labelled.len() {
        for j in i + 1..labelled.len() {
            let (ni, a) = &labelled[i];
            let (nj, b) = &labelled[j];
            if a.meets(b) {
                report.record("intervals disjoint", false, format!("{ni} {a} meets {nj} {b}"));
                return Err(GeomError::OverlappingIntervals {
                    first: format!("{ni} {a}"),
                    second: format!("{nj} {b}"),
                });
            }
        }
    }
    report.record(
        "intervals disjoint",
        true,
        format!("{} closed intervals", labelled.len()),
    );

    for (i, g) in generators.iter().enumerate() {
        let tr = g.trace().abs();
        if !(tr > 2.0) {
            report.record(format!("generator {} hyperbolic", i + 1), false, format!("|tr| = {tr}"));
            return Err(GeomError::NonHyperbolicGenerator {
                index: i + 1,
                trace_abs: tr,
            });
        }
        report.record(format!("generator {} hyperbolic", i + 1), true, format!("|tr| = {tr}"));
        check_pairing(i, g, &intervals[i])?;
        report.record(
            format!("generator {} pairs I-{} onto I+{}", i + 1, i + 1, i + 1),
            true,
            "endpoints and exterior sample",
        );
    }

    if !(base_point.im > 0.0) {
        return Err(GeomError::NonInteriorPoint {
            re: base_point.re,
            im: base_point.im,
        });
    }
    if labelled.iter().any(|(_, iv)| {
        let dx = base_point.re - iv.center();
        dx * dx + base_point.im * base_point.im <= iv.radius() * iv.radius()
    }) {
        return Err(GeomError::InvalidSpec(
            "base point must lie in the interior of the fundamental domain".into(),
        ));
    }
    report.record("base point interior to domain", true, format!("{base_point}"));

    let mut letters = Vec::with_capacity(2 * generators.len());
    for (i, g) in generators.iter().enumerate() {
        let l = (i + 1) as i32;
        letters.push(LetterGeometry {
            letter: l,
            map: *g,
            disk: intervals[i].plus,
        });
        letters.push(LetterGeometry {
            letter: -l,
            map: g.inverse(),
            disk: intervals[i].minus,
        });
    }

    let materialized = spec.materialize()?;
    let hash = content_hash(&generators, &intervals, base_point);
    Ok((
        SchottkyData {
            rank: spec.rank,
            generators,
            intervals,
            base_point,
            letters,
            hash,
            spec: materialized,
        },
        report,
    ))
}

fn check_pairing(i: usize, g: &MobiusMap, pair: &IntervalPair) -> Result<(), GeomError> {
    let tol = |x: f64| 1e-9 * (1.0 + x.abs());
    let img_lo = g.apply_real(pair.minus.lo);
    let img_hi = g.apply_real(pair.minus.hi);
    let ends = match (img_lo, img_hi) {
        (Some(x), Some(y)) => (x.min(y), x.max(y)),
        _ => {
            return Err(GeomError::GeneratorMismatch {
                index: i + 1,
                detail: "an endpoint of I- is sent to infinity".into(),
            })
        }
    };
    if (ends.0 - pair.plus.lo).abs() > tol(pair.plus.lo)
        || (ends.1 - pair.plus.hi).abs() > tol(pair.plus.hi)
    {
        return Err(GeomError::GeneratorMismatch {
            index: i + 1,
            detail: format!(
                "I- endpoints map to [{}, {}], expected {}",
                ends.0, ends.1, pair.plus
            ),
        });
    }
    // ∞ lies outside every interval, so its image must land inside I+
    match g.image_of_infinity() {
        Some(x) if pair.plus.contains_interior(x) => Ok(()),
        other => Err(GeomError::GeneratorMismatch {
            index: i + 1,
            detail: format!("exterior sample ∞ maps to {other:?}, outside the interior of I+"),
        }),
    }
}

fn content_hash(gens: &[MobiusMap], pairs: &[IntervalPair], base: Complex64) -> String {
    let mut canon = String::new();
    for g in gens {
        canon.push_str(&format!(
            "g {} {} {} {}\n",
            format_real(g.a),
            format_real(g.b),
            format_real(g.c),
            format_real(g.d)
        ));
    }
    for p in pairs {
        canon.push_str(&format!(
            "i {} {} {} {}\n",
            format_real(p.plus.lo),
            format_real(p.plus.hi),
            format_real(p.minus.lo),
            format_real(p.minus.hi)
        ));
    }
    canon.push_str(&format!("b {} {}\n", format_real(base.re), format_real(base.im)));
    hex::encode(Sha256::digest(canon.as_bytes()))
}

impl SchottkyData {
    /// Cylinder of the given translation length.
    pub fn cylinder(length: f64) -> Result<Self, GeomError> {
        build_schottky(&GroupSpec::cylinder(length)).map(|(g, _)| g)
    }

    /// Symmetric template group.
    pub fn symmetric(rank: usize, spacing: f64, radius: f64) -> Result<Self, GeomError> {
        build_schottky(&GroupSpec::symmetric(rank, spacing, radius)).map(|(g, _)| g)
    }

    pub fn from_json(text: &str) -> Result<Self, GeomError> {
        build_schottky(&GroupSpec::from_json(text)?).map(|(g, _)| g)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn generators(&self) -> &[MobiusMap] {
        &self.generators
    }

    pub fn intervals(&self) -> &[IntervalPair] {
        &self.intervals
    }

    pub fn base_point(&self) -> Complex64 {
        self.base_point
    }

    /// SHA-256 of the canonical group data.
    pub fn content_hash(&self) -> &str {
        &self.hash
    }

    /// The specification with generators and intervals written out.
    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    /// Letters in the order `1, −1, 2, −2, …`.
    pub fn letters(&self) -> &[LetterGeometry] {
        &self.letters
    }

    #[inline]
    pub fn letter(&self, letter: i32) -> &LetterGeometry {
        &self.letters[letter_index(letter)]
    }

    /// All letters sorted by the canonical order `−r < … < −1 < 1 < … < r`.
    pub fn alphabet(&self) -> Vec<i32> {
        let r = self.rank as i32;
        (-r..=r).filter(|&l| l != 0).collect()
    }

    pub fn is_valid_letter(&self, letter: i32) -> bool {
        letter != 0 && letter.unsigned_abs() as usize <= self.rank
    }

    /// Membership in the closed fundamental domain: outside every open
    /// half-disk.
    pub fn domain_contains(&self, z: Complex64) -> bool {
        z.im > 0.0 && self.letters.iter().all(|l| !l.disk.disk_contains(z))
    }

    /// Move an interior point into the closed fundamental domain by
    /// ping-pong reduction; also returns the group element applied. Points
    /// within hyperbolic distance `SIDE_TOLERANCE` of a side are not moved.
    pub fn reduce_to_domain(&self, z: Complex64) -> Result<(Complex64, MobiusMap), GeomError> {
        if !(z.im > 0.0) {
            return Err(GeomError::NonInteriorPoint { re: z.re, im: z.im });
        }
        let mut p = z;
        let mut acc = MobiusMap::IDENTITY;
        for _ in 0..100_000 {
            // points within rounding of a side already lie in the closed domain
            let inside = |l: &&LetterGeometry| {
                l.disk.disk_contains(p)
                    && distance_to_semicircle(p, l.disk.center(), l.disk.radius()) > SIDE_TOLERANCE
            };
            match self.letters.iter().find(inside) {
                None => return Ok((p, acc)),
                Some(l) => {
                    let back = l.map.inverse();
                    p = back.apply_interior(p);
                    acc = back.compose(&acc);
                }
            }
        }
        Err(GeomError::InvalidSpec(
            "domain reduction did not terminate".into(),
        ))
    }

    /// Shortest generator translation length.
    pub fn min_generator_length(&self) -> f64 {
        self.generators
            .iter()
            .map(|g| g.translation_length())
            .fold(f64::INFINITY, f64::min)
    }
}
