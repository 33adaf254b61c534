//! The multilinear part of the free Lie algebra over ℤ.
//!
//! A word `e_σ = x_{σ_1} ⊗ ⋯ ⊗ x_{σ_n}` is stored as the permutation `σ`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::error::{invalid, Result};
use crate::exact_homology::{smith_normal_form, IntegerMatrix, SmithForm};
use crate::free_operad::LinComb;
use crate::level_trees::Label;
use crate::perm::Perm;

pub type TensorElement = LinComb<Perm, i64>;

/// The left-normed words `λ×1` for `λ ∈ Σ_{n−1}`, in lexicographic order.
pub fn basis_indices(n: usize) -> Vec<Perm> {
    Perm::all(n - 1)
}

fn extend_by_last(lambda: &Perm) -> Perm {
    let mut v = lambda.as_slice().to_vec();
    v.push(v.len() as Label + 1);
    Perm::new_unchecked(v)
}

/// `b_λ = [x_{λ_1}, [x_{λ_2}, …, [x_{λ_{n−1}}, x_n]⋯]]` expanded in words.
pub fn expand_left_normed(lambda: &Perm) -> TensorElement {
    let n = lambda.len() + 1;
    let mut cur: BTreeMap<Vec<Label>, i64> = BTreeMap::from([(vec![n as Label], 1)]);
    for &x in lambda.as_slice().iter().rev() {
        let mut next = BTreeMap::new();
        for (w, c) in cur {
            let mut left = vec![x];
            left.extend(&w);
            let mut right = w;
            right.push(x);
            *next.entry(left).or_insert(0) += c;
            *next.entry(right).or_insert(0) -= c;
        }
        cur = next;
    }
    let mut out = TensorElement::new();
    for (w, c) in cur {
        out.add(Perm::new_unchecked(w), c);
    }
    out
}

/// Shuffles of `ρ[..s]` and `ρ[s..]`, each with the sign of its riffle.
pub fn shuffles(rho: &Perm, s: usize) -> Vec<(Perm, bool)> {
    let n = rho.len();
    let (u, v) = rho.as_slice().split_at(s);
    let mut out = Vec::new();
    // positions taken by u, increasing
    let mut pos: Vec<usize> = (0..s).collect();
    loop {
        let mut w = Vec::with_capacity(n);
        let (mut i, mut j) = (0, 0);
        let mut odd = false;
        for p in 0..n {
            if i < s && pos[i] == p {
                w.push(u[i]);
                // every v-letter already placed crosses this u-letter
                odd ^= j % 2 == 1;
                i += 1;
            } else {
                w.push(v[j]);
                j += 1;
            }
        }
        out.push((Perm::new_unchecked(w), odd));
        // next increasing position tuple
        let mut k = s;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if pos[k] < n - s + k {
                pos[k] += 1;
                for l in k + 1..s {
                    pos[l] = pos[l - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Every sum `Σ_τ a_{ρτ}` over the shuffles of `ρ[..s]` and `ρ[s..]`.
pub fn ree_sums(f: &TensorElement, n: usize) -> impl Iterator<Item = (Perm, usize, i64)> + '_ {
    Perm::all(n).into_iter().flat_map(move |rho| {
        (1..n)
            .map(|s| {
                let sum = shuffles(&rho, s).iter().map(|(w, _)| f.get(w)).sum();
                (rho.clone(), s, sum)
            })
            .collect::<Vec<_>>()
    })
}

/// Whether `F` is a Lie element: all unshuffle sums vanish.
pub fn ree_test(f: &TensorElement, n: usize) -> bool {
    ree_sums(f, n).all(|(_, _, s)| s == 0)
}

/// Coordinates in the basis `b_λ`, read off the coefficients of `e_{λ×1}`
/// and confirmed by reconstruction; `None` when `F` is not a Lie element.
pub fn lie_coordinates(f: &TensorElement, n: usize) -> Option<BTreeMap<Perm, i64>> {
    let coords: BTreeMap<Perm, i64> = basis_indices(n)
        .into_iter()
        .map(|l| {
            let c = f.get(&extend_by_last(&l));
            (l, c)
        })
        .filter(|(_, c)| *c != 0)
        .collect();
    let mut rebuilt = TensorElement::new();
    for (l, c) in &coords {
        rebuilt.add_scaled(&expand_left_normed(l), c);
    }
    (rebuilt == *f).then_some(coords)
}

/// Coordinates of `F` in the span of the `b_λ` by exact rational
/// elimination; `None` unless the unique solution exists and is integral.
pub fn span_coordinates(f: &TensorElement, n: usize) -> Option<BTreeMap<Perm, i64>> {
    let lambdas = basis_indices(n);
    let words = Perm::all(n);
    let word_index: BTreeMap<&Perm, usize> = words.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let k = lambdas.len();
    // augmented system, one row per word
    let mut a: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); k + 1]; words.len()];
    for (j, l) in lambdas.iter().enumerate() {
        for (w, c) in expand_left_normed(l).iter() {
            a[word_index[w]][j] = BigRational::from_integer(BigInt::from(*c));
        }
    }
    for (w, c) in f.iter() {
        if w.len() != n {
            return None;
        }
        a[word_index[w]][k] = BigRational::from_integer(BigInt::from(*c));
    }
    let mut r = 0;
    let mut pivots = Vec::new();
    for col in 0..k {
        let Some(p) = (r..a.len()).find(|&i| !a[i][col].is_zero()) else { continue };
        a.swap(r, p);
        let inv = a[r][col].recip();
        for x in a[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..a.len() {
            if i != r && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                for j in col..=k {
                    let d = &f * &a[r][j];
                    a[i][j] = &a[i][j] - d;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    if a[r..].iter().any(|row| !row[k].is_zero()) {
        return None;
    }
    let mut out = BTreeMap::new();
    for (i, &col) in pivots.iter().enumerate() {
        let v = &a[i][k];
        if !v.is_integer() {
            return None;
        }
        let v: i64 = v.to_integer().try_into().ok()?;
        if v != 0 {
            out.insert(lambdas[col].clone(), v);
        }
    }
    Some(out)
}

/// Rows of the unshuffle span: one row per `(ρ, s)`, columns indexed by
/// `Perm::all(n)`, entries `1` or `sgn(τ)`.
pub fn unshuffle_matrix(n: usize, signed: bool) -> IntegerMatrix {
    let words = Perm::all(n);
    let index: BTreeMap<&Perm, usize> = words.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let mut rows = Vec::new();
    for rho in &words {
        for s in 1..n {
            let mut row = BTreeMap::new();
            for (w, odd) in shuffles(rho, s) {
                let c = if signed && odd { -1 } else { 1 };
                *row.entry(index[&w]).or_insert(0i64) += c;
            }
            rows.push(row);
        }
    }
    let mut m = IntegerMatrix::zeros(rows.len(), words.len());
    for (i, row) in rows.into_iter().enumerate() {
        for (j, v) in row {
            m.set(i, j, v);
        }
    }
    m
}

/// `Ψ(e_w) = sgn(w)·e_w`.
pub fn psi(f: &TensorElement) -> TensorElement {
    let mut out = TensorElement::new();
    for (w, &c) in f.iter() {
        out.add(w.clone(), if w.is_odd() { -c } else { c });
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct DivisorCount {
    #[serde(serialize_with = "ser_big")]
    pub value: BigInt,
    pub count: usize,
}

fn ser_big<S: Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn divisor_counts(f: &SmithForm) -> Vec<DivisorCount> {
    let mut out: Vec<DivisorCount> = Vec::new();
    for d in &f.divisors {
        match out.last_mut() {
            Some(last) if &last.value == d => last.count += 1,
            _ => out.push(DivisorCount { value: d.clone(), count: 1 }),
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct UshReport {
    pub n: usize,
    pub signed_variant: bool,
    pub words: usize,
    pub ush_rank: usize,
    pub divisors: Vec<DivisorCount>,
    pub quotient_rank: usize,
    pub torsion_free: bool,
    /// Unshuffles together with the words `e_{λ×1}` span every word.
    pub basis_extends: bool,
    #[serde(serialize_with = "ser_big")]
    pub pairing_det: BigInt,
    /// Every `b_λ` (or `Ψ b_λ`) is orthogonal to the unshuffle rows.
    pub orthogonal: bool,
}

pub fn ush_quotient_report(n: usize, signed: bool) -> Result<UshReport> {
    if !(2..=6).contains(&n) {
        return invalid(format!("unshuffle reports need 2 ≤ n ≤ 6, got {n}"));
    }
    let ush = unshuffle_matrix(n, signed);
    let snf = smith_normal_form(&ush);
    let words = Perm::all(n);
    let index: BTreeMap<&Perm, usize> = words.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let lambdas = basis_indices(n);
    // stack the classes e_{λ×1} under the unshuffles
    let mut stacked = IntegerMatrix::zeros(ush.rows() + lambdas.len(), words.len());
    for i in 0..ush.rows() {
        for (j, v) in ush.row(i) {
            stacked.set(i, j, v);
        }
    }
    for (k, l) in lambdas.iter().enumerate() {
        stacked.set(ush.rows() + k, index[&extend_by_last(l)], 1);
    }
    let ext = smith_normal_form(&stacked);
    let duals: Vec<TensorElement> = lambdas
        .iter()
        .map(|l| {
            let b = expand_left_normed(l);
            if signed {
                psi(&b)
            } else {
                b
            }
        })
        .collect();
    let orthogonal = duals.iter().all(|b| {
        (0..ush.rows()).all(|i| ush.row(i).map(|(j, v)| v * b.get(&words[j])).sum::<i64>() == 0)
    });
    let pairing: Vec<Vec<i64>> = lambdas
        .iter()
        .map(|l| {
            let w = extend_by_last(l);
            duals.iter().map(|b| b.get(&w)).collect()
        })
        .collect();
    Ok(UshReport {
        n,
        signed_variant: signed,
        words: words.len(),
        ush_rank: snf.rank,
        torsion_free: snf.divisors.iter().all(|d| d.is_one()),
        divisors: divisor_counts(&snf),
        quotient_rank: words.len() - snf.rank,
        basis_extends: ext.rank == words.len() && ext.divisors.iter().all(|d| d.is_one()),
        pairing_det: determinant(&pairing),
        orthogonal,
    })
}

/// Exact determinant by fraction-free elimination.
pub fn determinant(m: &[Vec<i64>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else { return BigInt::zero() };
        if p != k {
            a.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// `signed · diag(sgn w) = diag(sgn ρ) · plain`, row by row.
pub fn psi_exchanges_unshuffles(n: usize) -> bool {
    let plain = unshuffle_matrix(n, false);
    let signed = unshuffle_matrix(n, true);
    let words = Perm::all(n);
    let row_sign: Vec<i64> = words
        .iter()
        .flat_map(|rho| std::iter::repeat(if rho.is_odd() { -1 } else { 1 }).take(n - 1))
        .collect();
    (0..plain.rows()).all(|i| {
        let lhs: Vec<(usize, i64)> =
            signed.row(i).map(|(j, v)| (j, if words[j].is_odd() { -v } else { v })).collect();
        let rhs: Vec<(usize, i64)> = plain.row(i).map(|(j, v)| (j, row_sign[i] * v)).collect();
        lhs == rhs
    })
}

/// Whether the element lies in the span of `b_λ`, by both routes.
#[derive(Clone, Debug, Serialize)]
pub struct ReeReport {
    pub n: usize,
    pub ree: bool,
    pub coordinates: Option<BTreeMap<String, i64>>,
    pub oracle: bool,
}

pub fn ree_report(f: &TensorElement, n: usize) -> ReeReport {
    let coords = lie_coordinates(f, n);
    ReeReport {
        n,
        ree: ree_test(f, n),
        coordinates: coords.map(|c| c.into_iter().map(|(k, v)| (k.to_string(), v)).collect()),
        oracle: span_coordinates(f, n).is_some(),
    }
}

/// Parse `+3*(1,2,3) -(2,1,3)` style sums of words.
pub fn parse_tensor(s: &str) -> Result<TensorElement> {
    let mut out = TensorElement::new();
    let mut n = None;
    for tok in s.split_whitespace() {
        let (neg, rest) = match tok.as_bytes()[0] {
            b'-' => (true, &tok[1..]),
            b'+' => (false, &tok[1..]),
            _ => (false, tok),
        };
        let (mag, word) = match rest.split_once('*') {
            Some((m, w)) => (m.parse::<i64>().map_err(|_| bad(tok))?, w),
            None => (1, rest),
        };
        let inner = word.strip_prefix('(').and_then(|w| w.strip_suffix(')')).ok_or_else(|| bad(tok))?;
        let labels: Vec<Label> =
            inner.split(',').map(|x| x.trim().parse::<Label>()).collect::<std::result::Result<_, _>>().map_err(|_| bad(tok))?;
        let w = Perm::new(labels)?;
        if *n.get_or_insert(w.len()) != w.len() {
            return invalid("all words must have the same length");
        }
        out.add(w, if neg { -mag } else { mag });
    }
    Ok(out)
}

fn bad(tok: &str) -> crate::error::Error {
    crate::error::Error::Parse { pos: 0, msg: format!("cannot read word {tok}") }
}
