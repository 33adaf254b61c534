//! Permutations in one-line notation.
//!
//! A permutation of `1..=n` is stored as the sequence `(σ_1, …, σ_n)`.
//! Acting on a labeled object replaces every label `k` by `σ_k`, so that
//! `[1|2|3]·(1,3,2) = [1|3|2]`. Right action: `(t·σ)·ρ = t·(σ.then(ρ))`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::level_trees::Label;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<Label>", into = "Vec<Label>")]
pub struct Perm(Vec<Label>);

impl TryFrom<Vec<Label>> for Perm {
    type Error = crate::error::Error;
    fn try_from(v: Vec<Label>) -> Result<Self> {
        Perm::new(v)
    }
}

impl From<Perm> for Vec<Label> {
    fn from(p: Perm) -> Self {
        p.0
    }
}

impl Perm {
    pub fn new(seq: Vec<Label>) -> Result<Perm> {
        if !is_permutation(&seq) {
            return invalid(format!("{seq:?} is not a permutation of 1..={}", seq.len()));
        }
        Ok(Perm(seq))
    }

    pub(crate) fn new_unchecked(seq: Vec<Label>) -> Perm {
        debug_assert!(is_permutation(&seq));
        Perm(seq)
    }

    pub fn identity(n: usize) -> Perm {
        Perm((1..=n as Label).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Label] {
        &self.0
    }

    /// Image of the label `k` (1-based).
    pub fn apply(&self, k: Label) -> Label {
        self.0[k as usize - 1]
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &v)| v as usize == i + 1)
    }

    /// The product acting first by `self`, then by `other`.
    pub fn then(&self, other: &Perm) -> Perm {
        assert_eq!(self.len(), other.len());
        Perm(self.0.iter().map(|&k| other.apply(k)).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.len()];
        for (i, &v) in self.0.iter().enumerate() {
            inv[v as usize - 1] = (i + 1) as Label;
        }
        Perm(inv)
    }

    pub fn is_odd(&self) -> bool {
        inversions(&self.0) % 2 == 1
    }

    /// Operadic block substitution: the entry equal to `i` is replaced by the
    /// block `ρ` shifted to start at `i`, larger entries move up by `|ρ| - 1`.
    pub fn substitute(&self, i: Label, rho: &Perm) -> Perm {
        let q = rho.len() as Label;
        let mut out = Vec::with_capacity(self.len() + rho.len() - 1);
        for &v in &self.0 {
            if v == i {
                out.extend(rho.0.iter().map(|&r| r + i - 1));
            } else if v > i {
                out.push(v + q - 1);
            } else {
                out.push(v);
            }
        }
        Perm(out)
    }

    /// All permutations of `1..=n` in lexicographic order.
    pub fn all(n: usize) -> Vec<Perm> {
        let mut out = Vec::new();
        let mut cur: Vec<Label> = (1..=n as Label).collect();
        loop {
            out.push(Perm(cur.clone()));
            if !next_permutation(&mut cur) {
                return out;
            }
        }
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

pub(crate) fn is_permutation(seq: &[Label]) -> bool {
    let n = seq.len();
    let mut seen = vec![false; n];
    for &v in seq {
        let v = v as usize;
        if v == 0 || v > n || seen[v - 1] {
            return false;
        }
        seen[v - 1] = true;
    }
    true
}

pub(crate) fn inversions<T: Ord>(seq: &[T]) -> usize {
    let mut c = 0;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] > seq[j] {
                c += 1;
            }
        }
    }
    c
}

pub(crate) fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}
