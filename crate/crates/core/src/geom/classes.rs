//! Conjugacy classes of the free group as rotation-minimal necklaces.

use super::group::{format_real, SchottkyData};
use super::mobius::{translation_length_from_trace, MobiusMap};
use super::word::{is_rotation_minimal, primitive_root, Word};
use crate::error::GeomError;
use crate::parallel;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::io::{BufRead, Write};

/// Default ceiling on the number of class records held in memory.
pub const DEFAULT_RECORD_BUDGET: usize = 20_000_000;

/// One nontrivial conjugacy class. `[γ]` and `[γ⁻¹]` are distinct records.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConjClassRecord {
    pub canonical_word: Vec<i32>,
    pub primitive_root: Vec<i32>,
    pub power: usize,
    pub trace: f64,
    pub length: f64,
    pub primitive_length: f64,
    pub sign: i8,
    pub weight: f64,
}

impl ConjClassRecord {
    fn from_word(letters: Vec<i32>, m: &MobiusMap) -> Self {
        let (root, power) = primitive_root(&letters);
        let trace = m.trace();
        let length = translation_length_from_trace(trace);
        let primitive_length = length / power as f64;
        Self {
            canonical_word: letters,
            primitive_root: root,
            power,
            trace,
            length,
            primitive_length,
            sign: if trace < 0.0 { -1 } else { 1 },
            weight: primitive_length,
        }
    }

    pub fn word_length(&self) -> usize {
        self.canonical_word.len()
    }

    /// Number of distinct rotations of the canonical word.
    pub fn period(&self) -> usize {
        self.primitive_root.len()
    }

    pub fn is_primitive(&self) -> bool {
        self.power == 1
    }

    pub fn word(&self) -> Word {
        Word::new(self.canonical_word.clone()).expect("canonical words are nonempty letters")
    }

    fn order(&self, other: &Self) -> Ordering {
        self.length
            .total_cmp(&other.length)
            .then_with(|| self.canonical_word.cmp(&other.canonical_word))
    }
}

/// All classes with cyclically reduced length `1..=n_max`, sorted by
/// `(ℓ, canonical_word)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassTable {
    pub group_hash: String,
    pub n_max: usize,
    pub records: Vec<ConjClassRecord>,
    /// `counts[n]` classes of word length `n`; `counts[0] = 0`.
    pub counts: Vec<usize>,
}

/// Number of cyclically reduced words of length `n` in the free group of
/// rank `r`.
pub fn cyclically_reduced_count(rank: usize, n: usize) -> f64 {
    let q = (2 * rank - 1) as f64;
    let parity = if n % 2 == 0 { 2.0 } else { 0.0 };
    q.powi(n as i32) + 1.0 + (rank as f64 - 1.0) * parity
}

/// Projected record count: every class of length `n` has at most `n`
/// rotations, so the count is about `Σ CR(n)/n`; the divisor-free
/// upper estimate `Σ CR(n)·2/n` is used for budgeting.
pub fn projected_records(rank: usize, n_max: usize) -> f64 {
    (1..=n_max)
        .map(|n| 2.0 * cyclically_reduced_count(rank, n) / n as f64)
        .sum()
}

pub fn enumerate_classes(group: &SchottkyData, n_max: usize) -> Result<ClassTable, GeomError> {
    enumerate_classes_with_budget(group, n_max, DEFAULT_RECORD_BUDGET)
}

pub fn enumerate_classes_with_budget(
    group: &SchottkyData,
    n_max: usize,
    budget: usize,
) -> Result<ClassTable, GeomError> {
    if n_max == 0 {
        return Err(GeomError::InvalidSpec("n_max must be at least 1".into()));
    }
    let projected = projected_records(group.rank(), n_max);
    if projected > budget as f64 {
        return Err(GeomError::CapacityExceeded {
            projected: projected.ceil(),
            budget,
            formula: "sum over n <= n_max of 2*((2r-1)^n + 1 + (r-1)(1+(-1)^n))/n".into(),
        });
    }

    let alphabet = group.alphabet();
    // disjoint blocks keyed by the first letter, which is the minimum letter
    // of a canonical necklace
    let prefixes: Vec<Vec<i32>> = alphabet.iter().map(|&a| vec![a]).collect();
    let blocks = parallel::map_ordered(&prefixes, |p| {
        let mut out = Vec::new();
        let mut path = p.clone();
        let mut mats = vec![group.letter(p[0]).map];
        dfs(group, &alphabet, n_max, &mut path, &mut mats, &mut out);
        out
    });
    let mut records: Vec<ConjClassRecord> = blocks.into_iter().flatten().collect();
    records.sort_by(|a, b| a.order(b));
    let mut counts = vec![0usize; n_max + 1];
    for r in &records {
        counts[r.word_length()] += 1;
    }
    Ok(ClassTable {
        group_hash: group.content_hash().to_string(),
        n_max,
        records,
        counts,
    })
}

fn dfs(
    group: &SchottkyData,
    alphabet: &[i32],
    n_max: usize,
    path: &mut Vec<i32>,
    mats: &mut Vec<MobiusMap>,
    out: &mut Vec<ConjClassRecord>,
) {
    let first = path[0];
    let last = *path.last().expect("nonempty path");
    if (path.len() == 1 || last != -first) && is_rotation_minimal(path) {
        out.push(ConjClassRecord::from_word(path.clone(), mats.last().unwrap()));
    }
    if path.len() == n_max {
        return;
    }
    for &l in alphabet.iter().filter(|&&l| l >= first && l != -last) {
        let m = mats.last().unwrap().compose(&group.letter(l).map);
        path.push(l);
        mats.push(m);
        dfs(group, alphabet, n_max, path, mats, out);
        path.pop();
        mats.pop();
    }
}

#[derive(Serialize, Deserialize)]
struct CacheHeader {
    format: String,
    version: u32,
    group_hash: String,
    n_max: usize,
    records: usize,
}

#[derive(Serialize, Deserialize)]
struct CacheFooter {
    end: usize,
}

#[derive(Serialize, Deserialize)]
struct CacheLine {
    w: Vec<i32>,
    tr: String,
    l: String,
}

pub const CACHE_FORMAT: &str = "schottky-class-table";
pub const CACHE_VERSION: u32 = 1;

impl ClassTable {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn primitive(&self) -> impl Iterator<Item = &ConjClassRecord> {
        self.records.iter().filter(|r| r.is_primitive())
    }

    /// Smallest length among classes of word length exactly `n_max`; every
    /// class absent from the table is at least this long up to the growth
    /// of lengths with word length.
    pub fn boundary_length(&self) -> f64 {
        self.records
            .iter()
            .filter(|r| r.word_length() == self.n_max)
            .map(|r| r.length)
            .fold(f64::INFINITY, f64::min)
    }

    /// Restrict to classes of word length at most `n`.
    pub fn truncated(&self, n: usize) -> ClassTable {
        let n = n.min(self.n_max);
        ClassTable {
            group_hash: self.group_hash.clone(),
            n_max: n,
            records: self
                .records
                .iter()
                .filter(|r| r.word_length() <= n)
                .cloned()
                .collect(),
            counts: self.counts[..=n].to_vec(),
        }
    }

    /// JSON-lines: header, one line per record, footer with the count.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let header = CacheHeader {
            format: CACHE_FORMAT.into(),
            version: CACHE_VERSION,
            group_hash: self.group_hash.clone(),
            n_max: self.n_max,
            records: self.records.len(),
        };
        writeln!(w, "{}", serde_json::to_string(&header)?)?;
        for r in &self.records {
            let line = CacheLine {
                w: r.canonical_word.clone(),
                tr: format_real(r.trace),
                l: format_real(r.length),
            };
            writeln!(w, "{}", serde_json::to_string(&line)?)?;
        }
        writeln!(
            w,
            "{}",
            serde_json::to_string(&CacheFooter {
                end: self.records.len()
            })?
        )?;
        w.flush()
    }

    /// Inverse of [`ClassTable::write_jsonl`]; any inconsistency is an error.
    pub fn read_jsonl<R: BufRead>(r: R) -> Result<ClassTable, String> {
        let mut lines = r.lines();
        let header: CacheHeader = match lines.next() {
            Some(Ok(l)) => serde_json::from_str(&l).map_err(|e| format!("header: {e}"))?,
            _ => return Err("missing header".into()),
        };
        if header.format != CACHE_FORMAT || header.version != CACHE_VERSION {
            return Err("unknown format or version".into());
        }
        let mut records = Vec::with_capacity(header.records);
        for _ in 0..header.records {
            let line = match lines.next() {
                Some(Ok(l)) => l,
                _ => return Err("truncated record list".into()),
            };
            let c: CacheLine = serde_json::from_str(&line).map_err(|e| format!("record: {e}"))?;
            let trace: f64 = c.tr.parse().map_err(|_| "bad trace")?;
            let length: f64 = c.l.parse().map_err(|_| "bad length")?;
            if c.w.is_empty() || c.w.len() > header.n_max {
                return Err("word length out of range".into());
            }
            let (root, power) = primitive_root(&c.w);
            records.push(ConjClassRecord {
                canonical_word: c.w,
                primitive_root: root,
                power,
                trace,
                length,
                primitive_length: length / power as f64,
                sign: if trace < 0.0 { -1 } else { 1 },
                weight: length / power as f64,
            });
        }
        let footer: CacheFooter = match lines.next() {
            Some(Ok(l)) => serde_json::from_str(&l).map_err(|e| format!("footer: {e}"))?,
            _ => return Err("missing footer".into()),
        };
        if footer.end != records.len() {
            return Err("footer count mismatch".into());
        }
        let mut counts = vec![0usize; header.n_max + 1];
        for r in &records {
            counts[r.word_length()] += 1;
        }
        Ok(ClassTable {
            group_hash: header.group_hash,
            n_max: header.n_max,
            records,
            counts,
        })
    }
}
