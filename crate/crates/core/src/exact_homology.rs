//! Integer chain complexes of labeled reduced trees and their homology.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, One, Signed};
use serde::{Serialize, Serializer};

use crate::bar_diff::d_lin_bar;
use crate::criticality::Height;
use crate::error::{capacity, invalid, Error, Result};
use crate::level_trees::{enumerate_labeled, Barcode};
use crate::perm::Perm;

/// A sparse integer matrix stored by rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BTreeMap<usize, i64>>,
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntegerMatrix { rows, cols, data: vec![BTreeMap::new(); rows] }
    }

    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged matrix");
            for (j, &v) in r.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i].get(&j).copied().unwrap_or(0)
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        assert!(i < self.rows && j < self.cols, "index out of range");
        if v == 0 {
            self.data[i].remove(&j);
        } else {
            self.data[i].insert(j, v);
        }
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(|r| r.len()).sum()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.data[i].iter().map(|(&j, &v)| (j, v))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.is_empty())
    }

    /// `self · other`, `None` on overflow.
    pub fn mul(&self, other: &IntegerMatrix) -> Option<IntegerMatrix> {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
            for (k, a) in self.row(i) {
                for (j, b) in other.row(k) {
                    let e = acc.entry(j).or_insert(0);
                    *e = e.checked_add(a.checked_mul(b)?)?;
                }
            }
            acc.retain(|_, v| *v != 0);
            out.data[i] = acc;
        }
        Some(out)
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self.get(i, j)).collect()).collect()
    }

    /// Coordinate format with 1-based indices.
    pub fn to_matrix_market(&self) -> String {
        let mut s = String::from("%%MatrixMarket matrix coordinate integer general\n");
        let _ = writeln!(s, "{} {} {}", self.rows, self.cols, self.nnz());
        for i in 0..self.rows {
            for (j, v) in self.row(i) {
                let _ = writeln!(s, "{} {} {}", i + 1, j + 1, v);
            }
        }
        s
    }
}

/// Integers the elimination can run on; every operation is checked.
pub trait SnfInt: Clone + Ord + Signed + Integer + CheckedAdd + CheckedSub + CheckedMul {
    fn from_i64(v: i64) -> Self;
    fn to_big(&self) -> BigInt;
}

impl SnfInt for i64 {
    fn from_i64(v: i64) -> Self {
        v
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl SnfInt for i128 {
    fn from_i64(v: i64) -> Self {
        v as i128
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl SnfInt for BigInt {
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SmithForm {
    /// Nonzero invariant factors `d_1 | d_2 | …`, all positive.
    #[serde(serialize_with = "ser_bigs")]
    pub divisors: Vec<BigInt>,
    pub rank: usize,
}

fn ser_bigs<S: Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|b| b.to_string()))
}

impl SmithForm {
    pub fn unit_count(&self) -> usize {
        self.divisors.iter().filter(|d| d.is_one()).count()
    }

    pub fn torsion(&self) -> Vec<BigInt> {
        self.divisors.iter().filter(|d| !d.is_one()).cloned().collect()
    }
}

/// Smith normal form with exact arithmetic: machine integers first, then
/// arbitrary precision if an intermediate value overflows.
pub fn smith_normal_form(m: &IntegerMatrix) -> SmithForm {
    if let Some(f) = snf_with::<i64>(m) {
        return f;
    }
    snf_with::<BigInt>(m).expect("arbitrary precision does not overflow")
}

/// Smith normal form computed in `T`; `None` if `T` overflows.
pub fn snf_with<T: SnfInt>(m: &IntegerMatrix) -> Option<SmithForm> {
    let mut rows: Vec<BTreeMap<usize, T>> =
        m.data.iter().map(|r| r.iter().map(|(&j, &v)| (j, T::from_i64(v))).collect()).collect();
    let mut cols: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); m.cols];
    for (i, r) in rows.iter().enumerate() {
        for &j in r.keys() {
            cols[j].insert(i);
        }
    }
    let mut alive = vec![true; m.rows];
    let mut units = 0usize;
    // unit pivots with the smallest fill-in estimate
    loop {
        let mut best: Option<(usize, usize, usize)> = None;
        for (i, r) in rows.iter().enumerate() {
            if !alive[i] || r.is_empty() {
                continue;
            }
            let rl = r.len() - 1;
            if best.is_some_and(|b| b.0 == 0) {
                break;
            }
            for (&j, v) in r {
                if v.abs().is_one() {
                    let cost = rl * (cols[j].len() - 1);
                    if best.is_none_or(|b| cost < b.0) {
                        best = Some((cost, i, j));
                    }
                }
            }
        }
        let Some((_, pr, pc)) = best else { break };
        let prow = std::mem::take(&mut rows[pr]);
        let p = prow[&pc].clone();
        let others: Vec<usize> = cols[pc].iter().copied().filter(|&i| i != pr).collect();
        for i in others {
            // row_i -= (a_ic / p) row_p, exact since p = ±1
            let f = rows[i][&pc].checked_mul(&p)?;
            for (j, v) in &prow {
                let delta = f.checked_mul(v)?;
                let cur = rows[i].get(j).cloned().unwrap_or_else(T::zero);
                let new = cur.checked_sub(&delta)?;
                if new.is_zero() {
                    rows[i].remove(j);
                    cols[*j].remove(&i);
                } else {
                    if !rows[i].contains_key(j) {
                        cols[*j].insert(i);
                    }
                    rows[i].insert(*j, new);
                }
            }
        }
        for j in prow.keys() {
            cols[*j].remove(&pr);
        }
        alive[pr] = false;
        units += 1;
    }
    // dense phase on what is left
    let live_rows: Vec<usize> = (0..m.rows).filter(|&i| alive[i] && !rows[i].is_empty()).collect();
    let live_cols: Vec<usize> = (0..m.cols).filter(|&j| !cols[j].is_empty()).collect();
    let col_pos: HashMap<usize, usize> = live_cols.iter().enumerate().map(|(k, &j)| (j, k)).collect();
    let mut dense: Vec<Vec<T>> = live_rows
        .iter()
        .map(|&i| {
            let mut r = vec![T::zero(); live_cols.len()];
            for (j, v) in &rows[i] {
                r[col_pos[j]] = v.clone();
            }
            r
        })
        .collect();
    let mut diag = dense_diagonal(&mut dense)?;
    normalize_chain(&mut diag)?;
    let mut divisors = vec![BigInt::one(); units];
    divisors.extend(diag.iter().map(|d| d.to_big()));
    divisors.sort();
    Some(SmithForm { rank: divisors.len(), divisors })
}

/// Diagonalizes by row and column operations, smallest pivot first.
fn dense_diagonal<T: SnfInt>(a: &mut [Vec<T>]) -> Option<Vec<T>> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        let Some((pi, pj)) = min_entry(a, t) else { break };
        a.swap(t, pi);
        for r in a.iter_mut() {
            r.swap(t, pj);
        }
        loop {
            let mut again = false;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                for j in t..cols {
                    let d = q.checked_mul(&a[t][j])?;
                    a[i][j] = a[i][j].checked_sub(&d)?;
                }
                if !a[i][t].is_zero() {
                    again = true;
                }
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                for r in a.iter_mut().skip(t) {
                    let d = q.checked_mul(&r[t])?;
                    r[j] = r[j].checked_sub(&d)?;
                }
                if !a[t][j].is_zero() {
                    again = true;
                }
            }
            if !again {
                break;
            }
            // a smaller remainder appeared in row or column t
            let (bi, bj) = min_in_cross(a, t);
            a.swap(t, bi);
            for r in a.iter_mut() {
                r.swap(t, bj);
            }
        }
        diag.push(a[t][t].abs());
        t += 1;
    }
    Some(diag)
}

fn min_entry<T: SnfInt>(a: &[Vec<T>], t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(T, usize, usize)> = None;
    for (i, r) in a.iter().enumerate().skip(t) {
        for (j, v) in r.iter().enumerate().skip(t) {
            if !v.is_zero() && best.as_ref().is_none_or(|b| v.abs() < b.0) {
                best = Some((v.abs(), i, j));
            }
        }
    }
    best.map(|b| (b.1, b.2))
}

fn min_in_cross<T: SnfInt>(a: &[Vec<T>], t: usize) -> (usize, usize) {
    let mut best = (a[t][t].abs(), t, t);
    for (i, r) in a.iter().enumerate().skip(t + 1) {
        if !r[t].is_zero() && r[t].abs() < best.0 {
            best = (r[t].abs(), i, t);
        }
    }
    for j in t + 1..a[t].len() {
        if !a[t][j].is_zero() && a[t][j].abs() < best.0 {
            best = (a[t][j].abs(), t, j);
        }
    }
    (best.1, best.2)
}

/// Turns a diagonal into a divisibility chain with the same module.
fn normalize_chain<T: SnfInt>(d: &mut [T]) -> Option<()> {
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            let g = d[i].gcd(&d[j]);
            let l = (d[i].clone() / g.clone()).checked_mul(&d[j])?;
            d[i] = g;
            d[j] = l;
        }
    }
    Some(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomologyGroup {
    pub rank: usize,
    #[serde(serialize_with = "ser_bigs")]
    pub torsion: Vec<BigInt>,
}

impl HomologyGroup {
    pub fn is_zero(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }
}

/// `(G^h_*(n), ∂_lin)` in degrees `0..=d_max`.
#[derive(Clone, Debug)]
pub struct ChainComplex {
    pub arity: usize,
    pub height: Height,
    pub d_max: usize,
    /// True when no generator lives above `d_max`.
    pub complete: bool,
    pub bases: Vec<Vec<Barcode>>,
    /// `boundaries[d]` maps degree `d` to degree `d - 1` (rows indexed by
    /// the target basis); `boundaries[0]` has no rows.
    pub boundaries: Vec<IntegerMatrix>,
}

/// The largest degree of `G^h(n)`, `None` for `h = ∞`.
pub fn top_degree(n: usize, h: Height) -> Option<usize> {
    match h {
        Height::Finite(h) => Some(h * n - h - 1),
        Height::Infinite => None,
    }
}

#[allow(non_snake_case)]
pub fn build_G_complex(n: usize, h: Height, d_max: usize) -> Result<ChainComplex> {
    if n < 2 {
        return invalid("arity must be at least 2");
    }
    if n > 8 {
        return Err(Error::Capacity("complexes are limited to arity ≤ 8".into()));
    }
    let max_height = match h {
        Height::Finite(h) => h,
        Height::Infinite => usize::MAX,
    };
    let cap = capacity();
    let mut bases = Vec::with_capacity(d_max + 1);
    let mut total = 0usize;
    for d in 0..=d_max {
        let basis = if d + 2 < n { Vec::new() } else { enumerate_labeled(n, d, max_height) };
        total += basis.len();
        if total > cap {
            return Err(Error::Capacity(format!("more than {cap} basis elements up to degree {d}")));
        }
        bases.push(basis);
    }
    let mut boundaries = vec![IntegerMatrix::zeros(0, bases[0].len())];
    for d in 1..=d_max {
        let index: HashMap<&Barcode, usize> = bases[d - 1].iter().enumerate().map(|(i, b)| (b, i)).collect();
        let mut m = IntegerMatrix::zeros(bases[d - 1].len(), bases[d].len());
        for (j, b) in bases[d].iter().enumerate() {
            for (s, c) in d_lin_bar::<i64>(b).iter() {
                let Some(&i) = index.get(s) else {
                    return Err(Error::Internal(format!("∂{b} leaves the complex at {s}")));
                };
                m.set(i, j, *c);
            }
        }
        boundaries.push(m);
    }
    for d in 2..=d_max {
        let sq = boundaries[d - 1].mul(&boundaries[d]).expect("small entries");
        if !sq.is_zero() {
            return Err(Error::Internal(format!("∂∂ ≠ 0 from degree {d}")));
        }
    }
    let complete = top_degree(n, h).is_some_and(|t| d_max >= t);
    Ok(ChainComplex { arity: n, height: h, d_max, complete, bases, boundaries })
}

impl ChainComplex {
    pub fn rank(&self, d: usize) -> usize {
        self.bases.get(d).map_or(0, |b| b.len())
    }

    /// Smith forms of all boundary maps, computed once.
    pub fn smith_forms(&self) -> Vec<SmithForm> {
        self.boundaries.iter().map(smith_normal_form).collect()
    }

    pub fn homology(&self, d: usize) -> Result<HomologyGroup> {
        let forms = self.smith_forms();
        self.homology_from(&forms, d)
    }

    pub fn homology_from(&self, forms: &[SmithForm], d: usize) -> Result<HomologyGroup> {
        if d > self.d_max || (d == self.d_max && !self.complete) {
            return invalid(format!(
                "homology in degree {d} needs the boundary from degree {}, built only to {}",
                d + 1,
                self.d_max
            ));
        }
        let out_rank = forms[d].rank;
        let (in_rank, torsion) = match forms.get(d + 1) {
            Some(f) => (f.rank, f.torsion()),
            None => (0, Vec::new()),
        };
        Ok(HomologyGroup { rank: self.rank(d) - out_rank - in_rank, torsion })
    }

    /// Permutation of basis indices induced by `σ` in degree `d`.
    pub fn permutation_action(&self, d: usize, sigma: &Perm) -> Vec<usize> {
        let index: HashMap<&Barcode, usize> = self.bases[d].iter().enumerate().map(|(i, b)| (b, i)).collect();
        self.bases[d].iter().map(|b| index[&b.act(sigma)]).collect()
    }

    /// `∂_d` commutes with the action of `σ` on both bases.
    pub fn is_equivariant(&self, d: usize, sigma: &Perm) -> bool {
        if d == 0 || d > self.d_max {
            return true;
        }
        let src = self.permutation_action(d, sigma);
        let dst = self.permutation_action(d - 1, sigma);
        let m = &self.boundaries[d];
        for i in 0..m.rows() {
            for (j, v) in m.row(i) {
                if m.get(dst[i], src[j]) != v {
                    return false;
                }
            }
        }
        // same number of entries, so the index maps are a bijection on entries
        true
    }
}

/// Ranks of the configuration-space homology reindexed to the tree complex:
/// degree `(n−2) + j(h−1)` carries the coefficient of `t^{n−1−j}` in
/// `∏_{k=1}^{n−1} (1 + k t)`.
pub fn poincare_ranks(n: usize, h: usize) -> BTreeMap<usize, u64> {
    let mut poly = vec![1u64];
    for k in 1..n as u64 {
        let mut next = vec![0u64; poly.len() + 1];
        for (i, &c) in poly.iter().enumerate() {
            next[i] += c;
            next[i + 1] += c * k;
        }
        poly = next;
    }
    (0..n).map(|j| ((n - 2) + j * (h - 1), poly[n - 1 - j])).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct HomologyReport {
    pub arity: usize,
    pub height: Height,
    pub degree: usize,
    pub chain_rank: usize,
    pub rank: usize,
    #[serde(serialize_with = "ser_bigs")]
    pub torsion: Vec<BigInt>,
}

/// Homology in every degree the complex determines.
pub fn homology_reports(c: &ChainComplex) -> Result<Vec<HomologyReport>> {
    let forms = c.smith_forms();
    let last = if c.complete { c.d_max } else { c.d_max.saturating_sub(1) };
    let mut out = Vec::new();
    for d in 0..=last {
        if d == c.d_max && !c.complete {
            break;
        }
        let g = c.homology_from(&forms, d)?;
        out.push(HomologyReport {
            arity: c.arity,
            height: c.height,
            degree: d,
            chain_rank: c.rank(d),
            rank: g.rank,
            torsion: g.torsion,
        });
    }
    Ok(out)
}
