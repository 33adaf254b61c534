//! The linear differential on generators.
//!
//! Two independent implementations:
//!
//! * [`d_lin_bar`] transports the differential of the iterated bar
//!   construction on the trivial algebra through `ω`;
//! * [`d_lin_merge`] merges two adjacent sibling vertices and interleaves
//!   their branches (the quasibijection faces).
//!
//! Sign convention. A bar word of height `h` is a sequence of factors, each a
//! word of height `h - 1`, with generators `x_j` at height 0. A factor `N`
//! has degree `|N| + 1` where `|x_j| = 0` and `|[N_1 … N_u]| = Σ(|N_i| + 1)`.
//! With `P_i = Σ_{j<i}(|N_j| + 1)`:
//!
//! * applying `∂` inside factor `i` costs `(-1)^{P_i + 1}`;
//! * merging factors `i, i+1` (never at height 0) into their shuffle product
//!   costs `(-1)^{P_i + |N_i|}`, the shuffle itself carrying the Koszul sign
//!   of the factor degrees;
//! * the whole is multiplied by `(-1)^{h+1}`.
//!
//! The basis is normalised by `η(T) = (-1)^{Σ_{j : g_j even} (j - 1)}`
//! (gap positions counted from 1), i.e. `ω̃(T) = η(T)·ω(T)`. This
//! normalisation is what makes `∂[1||2||3]`, `∂[1|2|||3]` and `∂[1|||2]` come
//! out with the classical signs while keeping `∂² = 0`.

use crate::coeff::Coeff;
use crate::error::{invalid, Result};
use crate::free_operad::{FormalSum, LinComb, OperadTerm};
use crate::level_trees::{Barcode, Gap, Label};

/// A monomial of the iterated bar construction on the generators `x_j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BarMonomial {
    Gen(Label),
    Seq(Vec<BarMonomial>),
}

impl BarMonomial {
    /// Internal degree `|N|` (without the suspension of the factor itself).
    pub fn degree(&self) -> usize {
        match self {
            BarMonomial::Gen(_) => 0,
            BarMonomial::Seq(fs) => fs.iter().map(|f| f.degree() + 1).sum(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            BarMonomial::Gen(_) => 0,
            BarMonomial::Seq(fs) => 1 + fs.iter().map(|f| f.depth()).max().unwrap_or(0),
        }
    }
}

impl std::fmt::Display for BarMonomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BarMonomial::Gen(l) => write!(f, "x{l}"),
            BarMonomial::Seq(fs) => {
                f.write_str("(")?;
                for (i, x) in fs.iter().enumerate() {
                    if i > 0 {
                        f.write_str("⊗")?;
                    }
                    write!(f, "↑{x}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// `η` of a gap sequence: true when negative.
pub fn eta(gaps: &[Gap]) -> bool {
    gaps.iter()
        .enumerate()
        .filter(|(_, &g)| g % 2 == 0)
        .map(|(j, _)| j)
        .sum::<usize>()
        % 2
        == 1
}

fn encode(labels: &[Label], gaps: &[Gap], h: usize) -> BarMonomial {
    if h == 0 {
        return BarMonomial::Gen(labels[0]);
    }
    let mut factors = Vec::new();
    let mut start = 0;
    for i in 0..=gaps.len() {
        if i == gaps.len() || gaps[i] as usize == h {
            factors.push(encode(&labels[start..=i], &gaps[start..i], h - 1));
            start = i + 1;
        }
    }
    BarMonomial::Seq(factors)
}

/// `ω̃(t)`: sign and bar monomial of height `h(t)`.
pub fn omega_encode(t: &Barcode) -> (bool, BarMonomial) {
    (eta(&t.gaps), encode(&t.labels, &t.gaps, t.height()))
}

fn decode(w: &BarMonomial, h: usize, labels: &mut Vec<Label>, gaps: &mut Vec<Gap>) -> Result<()> {
    match (w, h) {
        (BarMonomial::Gen(l), 0) => {
            labels.push(*l);
            Ok(())
        }
        (BarMonomial::Seq(fs), h) if h > 0 && !fs.is_empty() => {
            for (k, f) in fs.iter().enumerate() {
                if k > 0 {
                    gaps.push(h as Gap);
                }
                decode(f, h - 1, labels, gaps)?;
            }
            Ok(())
        }
        _ => invalid("bar monomial does not have uniform depth"),
    }
}

/// `ω̃⁻¹` of a monomial read at height `h`: the sign and the (reduced) barcode.
pub fn omega_decode(w: &BarMonomial, h: usize) -> Result<(bool, Barcode)> {
    let mut labels = Vec::new();
    let mut gaps = Vec::new();
    decode(w, h, &mut labels, &mut gaps)?;
    let b = Barcode::new(labels, gaps)?;
    Ok((eta(&b.gaps), b))
}

fn shuffle_product(a: &[BarMonomial], b: &[BarMonomial], out: &mut Vec<(bool, Vec<BarMonomial>)>) {
    let da: Vec<usize> = a.iter().map(|x| x.degree() + 1).collect();
    let db: Vec<usize> = b.iter().map(|x| x.degree() + 1).collect();
    let n = a.len() + b.len();
    let mut cur = Vec::with_capacity(n);
    fn rec(
        a: &[BarMonomial],
        b: &[BarMonomial],
        da: &[usize],
        db: &[usize],
        ia: usize,
        ib: usize,
        neg: bool,
        cur: &mut Vec<BarMonomial>,
        out: &mut Vec<(bool, Vec<BarMonomial>)>,
    ) {
        if ia == a.len() && ib == b.len() {
            out.push((neg, cur.clone()));
            return;
        }
        if ia < a.len() {
            cur.push(a[ia].clone());
            rec(a, b, da, db, ia + 1, ib, neg, cur, out);
            cur.pop();
        }
        if ib < b.len() {
            // b[ib] jumps over the remaining a's
            let jump: usize = da[ia..].iter().map(|&p| p * db[ib]).sum();
            cur.push(b[ib].clone());
            rec(a, b, da, db, ia, ib + 1, neg ^ (jump % 2 == 1), cur, out);
            cur.pop();
        }
    }
    rec(a, b, &da, &db, 0, 0, false, &mut cur, out);
}

/// The bar differential `∂_B` (before the global desuspension sign).
pub fn d_bar(w: &BarMonomial) -> LinComb<BarMonomial, i64> {
    let mut out = LinComb::new();
    let fs = match w {
        BarMonomial::Gen(_) => return out,
        BarMonomial::Seq(fs) => fs,
    };
    let mut p = 0usize;
    for i in 0..fs.len() {
        for (t, c) in d_bar(&fs[i]).iter() {
            let mut nw = fs.clone();
            nw[i] = t.clone();
            let s = if (p + 1) % 2 == 1 { -c } else { *c };
            out.add(BarMonomial::Seq(nw), s);
        }
        if i + 1 < fs.len() {
            if let (BarMonomial::Seq(a), BarMonomial::Seq(b)) = (&fs[i], &fs[i + 1]) {
                let base = (p + fs[i].degree()) % 2 == 1;
                let mut prods = Vec::new();
                shuffle_product(a, b, &mut prods);
                for (neg, merged) in prods {
                    let mut nw: Vec<BarMonomial> = fs[..i].to_vec();
                    nw.push(BarMonomial::Seq(merged));
                    nw.extend_from_slice(&fs[i + 2..]);
                    out.add(BarMonomial::Seq(nw), if base ^ neg { -1 } else { 1 });
                }
            }
        }
        p += fs[i].degree() + 1;
    }
    out
}

/// `∂_lin(t) = ω̃⁻¹ ∂_B ω̃(t)`.
pub fn d_lin_bar<R: Coeff>(t: &Barcode) -> LinComb<Barcode, R> {
    let h = t.height();
    let (eta_t, w) = omega_encode(t);
    let glob = (h + 1) % 2 == 1;
    let mut out = LinComb::new();
    for (x, c) in d_bar(&w).iter() {
        let (eta_s, s) = omega_decode(x, h).expect("bar differential preserves depth");
        let neg = (*c < 0) ^ glob ^ eta_t ^ eta_s;
        out.add(s, R::from_i64(c.abs()) * R::sign(neg));
    }
    out
}

/// Splits a run of tips (given by its internal gaps) at gaps equal to `d`.
fn branches(gaps: &[Gap], d: Gap) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = 0;
    for (i, &g) in gaps.iter().enumerate() {
        if g == d {
            out.push((start, i + 1));
            start = i + 1;
        }
    }
    out.push((start, gaps.len() + 1));
    out
}

/// The merge-and-unshuffle description of `∂_lin`.
pub fn d_lin_merge<R: Coeff>(t: &Barcode) -> LinComb<Barcode, R> {
    let n = t.arity();
    let g = &t.gaps;
    let eta_t = eta(g);
    let mut out = LinComb::new();
    let mut prefix = 0usize;
    for i in 0..g.len() {
        let d = g[i];
        if d >= 2 {
            // block A = tips a0..=i, block B = tips i+1..=b1
            let a0 = (0..i).rev().find(|&j| g[j] >= d).map_or(0, |j| j + 1);
            let b1 = (i + 1..g.len()).find(|&j| g[j] >= d).unwrap_or(n - 1);
            let ba: Vec<(usize, usize)> = branches(&g[a0..i], d - 1)
                .into_iter()
                .map(|(s, e)| (s + a0, e + a0))
                .collect();
            let bb: Vec<(usize, usize)> = branches(&g[i + 1..b1], d - 1)
                .into_iter()
                .map(|(s, e)| (s + i + 1, e + i + 1))
                .collect();
            let weight = |(s, e): (usize, usize)| -> usize {
                (d as usize - 1) + g[s..e - 1].iter().map(|&x| x as usize).sum::<usize>()
            };
            let wa: Vec<usize> = ba.iter().map(|&r| weight(r)).collect();
            let wb: Vec<usize> = bb.iter().map(|&r| weight(r)).collect();
            let p = ba.len();
            let q = bb.len();
            for_each_interleaving(p, q, |order, kappa_pairs| {
                let kappa: usize = kappa_pairs.iter().map(|&(x, y)| wa[x] * wb[y]).sum();
                let mut labels: Vec<Label> = t.labels[..a0].to_vec();
                let mut gaps: Vec<Gap> = g[..a0].to_vec();
                for (k, &(from_a, idx)) in order.iter().enumerate() {
                    if k > 0 {
                        gaps.push(d - 1);
                    }
                    let (s, e) = if from_a { ba[idx] } else { bb[idx] };
                    labels.extend_from_slice(&t.labels[s..e]);
                    gaps.extend_from_slice(&g[s..e - 1]);
                }
                gaps.extend_from_slice(&g[b1.min(g.len())..]);
                labels.extend_from_slice(&t.labels[b1 + 1..]);
                let s = Barcode::new_unchecked(labels, gaps);
                let neg = (prefix + kappa) % 2 == 1;
                let neg = neg ^ eta_t ^ eta(&s.gaps);
                out.add(s, R::sign(neg));
            });
        }
        prefix += d as usize;
    }
    out
}

/// Calls `f` with every interleaving of `p` A-items and `q` B-items,
/// together with the pairs `(a, b)` where B-item `b` precedes A-item `a`.
fn for_each_interleaving(p: usize, q: usize, mut f: impl FnMut(&[(bool, usize)], &[(usize, usize)])) {
    fn rec(
        p: usize,
        q: usize,
        ia: usize,
        ib: usize,
        cur: &mut Vec<(bool, usize)>,
        f: &mut impl FnMut(&[(bool, usize)], &[(usize, usize)]),
    ) {
        if ia == p && ib == q {
            let mut pairs = Vec::new();
            let mut seen_b = Vec::new();
            for &(from_a, idx) in cur.iter() {
                if from_a {
                    pairs.extend(seen_b.iter().map(|&b| (idx, b)));
                } else {
                    seen_b.push(idx);
                }
            }
            f(cur, &pairs);
            return;
        }
        if ia < p {
            cur.push((true, ia));
            rec(p, q, ia + 1, ib, cur, f);
            cur.pop();
        }
        if ib < q {
            cur.push((false, ib));
            rec(p, q, ia, ib + 1, cur, f);
            cur.pop();
        }
    }
    rec(p, q, 0, 0, &mut Vec::with_capacity(p + q), &mut f);
}

/// `∂_lin` as a sum of generators; the bar route is authoritative.
pub fn d_lin<R: Coeff>(t: &Barcode) -> FormalSum<R> {
    d_lin_bar::<R>(t).map_keys(OperadTerm::generator)
}

/// `∂_lin ∘ ∂_lin` on a generator.
pub fn d_lin_squared(t: &Barcode) -> LinComb<Barcode, i64> {
    let mut out = LinComb::new();
    for (s, c) in d_lin_bar::<i64>(t).iter() {
        out.add_scaled(&d_lin_bar::<i64>(s), c);
    }
    out
}
