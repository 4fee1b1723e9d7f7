//! Words over the alphabet `{±1, …, ±r}` and their cyclic normal forms.

use super::group::SchottkyData;
use super::mobius::MobiusMap;
use crate::error::GeomError;
use serde::{Deserialize, Serialize};
use std::fmt;

/// A word; `reduced` records whether no letter is followed by its inverse.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Word {
    letters: Vec<i32>,
    reduced: bool,
}

impl Word {
    pub fn identity() -> Self {
        Self {
            letters: Vec::new(),
            reduced: true,
        }
    }

    /// Wrap a letter sequence as given; letters must be nonzero.
    pub fn new(letters: Vec<i32>) -> Result<Self, GeomError> {
        if let Some(&bad) = letters.iter().find(|&&l| l == 0) {
            return Err(GeomError::InvalidLetter {
                letter: bad,
                rank: 0,
            });
        }
        let reduced = is_reduced(&letters);
        Ok(Self { letters, reduced })
    }

    /// Wrap and check letters against a group rank.
    pub fn for_rank(letters: Vec<i32>, rank: usize) -> Result<Self, GeomError> {
        if let Some(&bad) = letters
            .iter()
            .find(|&&l| l == 0 || l.unsigned_abs() as usize > rank)
        {
            return Err(GeomError::InvalidLetter { letter: bad, rank });
        }
        Self::new(letters)
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    /// Free reduction.
    pub fn reduce(&self) -> Word {
        let mut out: Vec<i32> = Vec::with_capacity(self.letters.len());
        for &l in &self.letters {
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word {
            letters: out,
            reduced: true,
        }
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: inverse_letters(&self.letters),
            reduced: self.reduced,
        }
    }

    /// Concatenation followed by free reduction.
    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word {
            letters,
            reduced: false,
        }
        .reduce()
    }

    /// `M_{x₁}·M_{x₂}⋯M_{xₙ}`, accumulated left to right.
    pub fn matrix(&self, group: &SchottkyData) -> MobiusMap {
        word_matrix(group, &self.letters)
    }

    /// Same product accumulated right to left.
    pub fn matrix_right_to_left(&self, group: &SchottkyData) -> MobiusMap {
        self.letters
            .iter()
            .rev()
            .fold(MobiusMap::IDENTITY, |acc, &l| group.letter(l).map.compose(&acc))
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        is_cyclically_reduced(&self.letters)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self.letters.iter().map(|l| l.to_string()).collect();
        f.write_str(&parts.join(" "))
    }
}

pub fn word_matrix(group: &SchottkyData, letters: &[i32]) -> MobiusMap {
    letters
        .iter()
        .fold(MobiusMap::IDENTITY, |acc, &l| acc.compose(&group.letter(l).map))
}

pub fn inverse_letters(letters: &[i32]) -> Vec<i32> {
    letters.iter().rev().map(|l| -l).collect()
}

pub fn is_reduced(letters: &[i32]) -> bool {
    letters.windows(2).all(|w| w[0] != -w[1])
}

/// Reduced, and the last letter does not cancel the first.
pub fn is_cyclically_reduced(letters: &[i32]) -> bool {
    is_reduced(letters)
        && match (letters.first(), letters.last()) {
            (Some(&a), Some(&b)) => letters.len() == 1 || a != -b,
            _ => true,
        }
}

/// Strip cancelling letter pairs from both ends of a reduced word.
pub fn cyclically_reduce(letters: &[i32]) -> Vec<i32> {
    let reduced = Word::new(letters.to_vec()).expect("nonzero letters").reduce();
    let l = reduced.letters();
    let (mut i, mut j) = (0, l.len());
    while j - i >= 2 && l[i] == -l[j - 1] {
        i += 1;
        j -= 1;
    }
    l[i..j].to_vec()
}

/// Rotation-minimal representative in the order `−r < … < −1 < 1 < … < r`.
pub fn canonical_necklace(letters: &[i32]) -> Vec<i32> {
    let n = letters.len();
    if n == 0 {
        return Vec::new();
    }
    let best = (0..n)
        .min_by(|&a, &b| {
            (0..n)
                .map(|k| letters[(a + k) % n].cmp(&letters[(b + k) % n]))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .expect("nonempty");
    (0..n).map(|k| letters[(best + k) % n]).collect()
}

/// True when no nontrivial rotation is lexicographically smaller.
pub fn is_rotation_minimal(letters: &[i32]) -> bool {
    let n = letters.len();
    (1..n).all(|r| {
        (0..n)
            .map(|k| letters[(r + k) % n].cmp(&letters[k]))
            .find(|o| o.is_ne())
            .map_or(true, |o| o.is_gt())
    })
}

/// Smallest period `p` with `letters = root^(n/p)`; returns `(root, n/p)`.
pub fn primitive_root(letters: &[i32]) -> (Vec<i32>, usize) {
    let n = letters.len();
    for p in 1..=n {
        if n % p == 0 && (p..n).all(|i| letters[i] == letters[i - p]) {
            return (letters[..p].to_vec(), n / p);
        }
    }
    (Vec::new(), 1)
}

/// All reduced words of length exactly `n` in lexicographic order.
pub fn reduced_words(rank: usize, n: usize) -> Vec<Vec<i32>> {
    let r = rank as i32;
    let alphabet: Vec<i32> = (-r..=r).filter(|&l| l != 0).collect();
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(out.len() * (2 * rank));
        for w in &out {
            for &l in &alphabet {
                if w.last() != Some(&-l) {
                    let mut v: Vec<i32> = w.clone();
                    v.push(l);
                    next.push(v);
                }
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction_and_inverse() {
        let w = Word::new(vec![1, 2, -2, -1, 1]).unwrap();
        assert!(!w.is_reduced());
        assert_eq!(w.reduce().letters(), &[1]);
        let v = Word::new(vec![1, -2, 2, 1]).unwrap().reduce();
        assert_eq!(v.letters(), &[1, 1]);
        assert_eq!(
            Word::new(vec![1, -2]).unwrap().inverse().letters(),
            &[2, -1]
        );
        assert!(Word::for_rank(vec![3], 2).is_err());
    }

    #[test]
    fn necklace_forms() {
        assert_eq!(canonical_necklace(&[2, 1, -1]), vec![-1, 2, 1]);
        assert!(is_rotation_minimal(&[-2, 1, 1]));
        assert!(!is_rotation_minimal(&[1, -2, 1]));
        assert_eq!(primitive_root(&[1, 2, 1, 2]), (vec![1, 2], 2));
        assert_eq!(primitive_root(&[1, 2, 1]), (vec![1, 2, 1], 1));
        assert_eq!(cyclically_reduce(&[2, 1, 1, -2]), vec![1, 1]);
    }

    #[test]
    fn reduced_word_counts() {
        for n in 1..=5 {
            assert_eq!(reduced_words(2, n).len(), 4 * 3usize.pow(n as u32 - 1));
        }
    }

    #[test]
    fn inverse_word_has_inverse_matrix() {
        let g = SchottkyData::symmetric(2, 2.0, 0.1).unwrap();
        let w = Word::new(vec![1, -2, -2, 1, 2]).unwrap();
        let m = w.matrix(&g).compose(&w.inverse().matrix(&g));
        assert!(m.max_abs_diff(&MobiusMap::IDENTITY) < 1e-10 * w.matrix(&g).norm().powi(2));
        let prod = w.matrix(&g);
        let inv = w.inverse().matrix(&g);
        assert!(prod.inverse().max_abs_diff(&inv) <= 1e-10 * prod.norm());
    }
}
