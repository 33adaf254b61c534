//! Critical dimensions, bad-cell witnesses, source-target data and
//! counterterms at the critical dimension.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::coeff::F2;
use crate::error::{invalid, Error, Result};
use crate::f2linalg::{F2System, Outcome};
use crate::faces::{d_reg_mod2, enumerate_faces, Mod2Faces, TreeMorphism};
use crate::free_operad::{apply_derivation, derivation, substitute_vertex, FormalSum, OperadTerm};
use crate::level_trees::{Barcode, Gap, LevelTree};

/// Ambient height `h` of `F_h`, or `∞` for `F`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Height {
    Finite(usize),
    Infinite,
}

impl fmt::Display for Height {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Height::Finite(h) => write!(f, "{h}"),
            Height::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Height {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inf" | "∞" | "infinity" => Ok(Height::Infinite),
            _ => match s.parse::<usize>() {
                Ok(h) if h >= 1 => Ok(Height::Finite(h)),
                _ => invalid(format!("height must be a positive integer or 'inf', got {s:?}")),
            },
        }
    }
}

impl Serialize for Height {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Height::Finite(h) => s.serialize_u64(*h as u64),
            Height::Infinite => s.serialize_str("inf"),
        }
    }
}

impl Height {
    pub fn admits(&self, tree_height: usize) -> bool {
        match self {
            Height::Finite(h) => tree_height <= *h,
            Height::Infinite => true,
        }
    }
}

/// `d_crit^h(n)`; `None` stands for `∞`.
pub fn d_crit(n: usize, h: Height) -> Option<usize> {
    assert!(n >= 2, "arity must be at least 2");
    let regular = match h {
        Height::Infinite => n <= 3,
        Height::Finite(h) => n <= 3 || (n <= 5 && h <= 2) || h == 1,
    };
    if regular {
        None
    } else {
        Some(n)
    }
}

/// The largest dimension of a cell of `F_h(n)`.
pub fn max_dim(n: usize, h: usize) -> usize {
    h * n - h - 1
}

#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    /// The reduced tree; the cell of `F_h(n)` is its `suspensions`-fold suspension.
    pub barcode: Barcode,
    pub suspensions: usize,
    pub dim: usize,
    pub certificate: Vec<SourceTargetDatum>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Classification {
    pub arity: usize,
    pub height: Height,
    #[serde(serialize_with = "ser_crit")]
    pub d_crit: Option<usize>,
    pub regular: bool,
    pub witness: Option<Witness>,
}

fn ser_crit<S: Serializer>(v: &Option<usize>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(d) => s.serialize_u64(*d as u64),
        None => s.serialize_str("inf"),
    }
}

/// `e_4^3`, `e_5^3` and `e_n^2` (n ≥ 6).
pub fn bad_cell_barcode(n: usize, reduced_height: usize) -> Barcode {
    let gaps: Vec<Gap> = match (n, reduced_height) {
        (4, 3) => vec![1, 3, 1],
        (5, 3) => vec![1, 3, 1, 1],
        (n, 2) if n >= 6 => {
            let mut g = vec![1, 2, 1, 2];
            g.extend(std::iter::repeat(1).take(n - 5));
            g
        }
        _ => panic!("no standard bad cell for n = {n}, height {reduced_height}"),
    };
    Barcode::unlabeled(&gaps)
}

pub fn classify(n: usize, h: Height) -> Result<Classification> {
    if n < 2 {
        return invalid("arity must be at least 2");
    }
    let crit = d_crit(n, h);
    let witness = match crit {
        None => None,
        Some(_) => {
            let base = if n <= 5 { 3 } else { 2 };
            let barcode = bad_cell_barcode(n, base);
            let suspensions = match h {
                Height::Finite(h) => h - base,
                Height::Infinite => 0,
            };
            let certificate = source_target_witnesses(&barcode)?;
            Some(Witness { dim: barcode.dim(), barcode, suspensions, certificate })
        }
    };
    Ok(Classification { arity: n, height: h, d_crit: crit, regular: crit.is_none(), witness })
}

/// A nontrivial source-target condition carried by a face `ν : T → [u|v]`.
#[derive(Clone, Debug, Serialize)]
pub struct SourceTargetDatum {
    pub level: usize,
    pub size: usize,
    /// Tip positions (1-based) sent to `u`.
    pub a: Vec<usize>,
    /// Tip positions (1-based) sent to `v`.
    pub b: Vec<usize>,
    pub u: usize,
    pub v: usize,
    /// The amputated tree `R`, of height `level` with `size` tips.
    pub amputated: LevelTree,
    pub amputated_gaps: Vec<Gap>,
    pub amputated_dim: usize,
    pub face: TreeMorphism,
    pub element: OperadTerm,
}

/// Every selection of level-`m` vertices and tip pairs under them whose
/// amputated tree has positive dimension, each with its canonical face.
pub fn source_target_witnesses(t: &Barcode) -> Result<Vec<SourceTargetDatum>> {
    let lt = t.to_tree();
    let tree = &lt.tree;
    let h = tree.height();
    if t.arity() > 12 {
        return Err(Error::Capacity("source-target search is limited to arity ≤ 12".into()));
    }
    let mut out = Vec::new();
    for m in 1..h {
        // level-m vertices with their tips
        let mut under: Vec<Vec<usize>> = vec![Vec::new(); tree.level_sizes()[m]];
        for tip in 0..tree.tips() {
            under[tree.ancestor(h, tip, m)].push(tip);
        }
        let cands: Vec<usize> = (0..under.len()).filter(|&c| under[c].len() >= 2).collect();
        for mask in 1u32..(1 << cands.len()) {
            if mask.count_ones() < 2 {
                continue;
            }
            let cs: Vec<usize> = (0..cands.len()).filter(|&i| mask >> i & 1 == 1).map(|i| cands[i]).collect();
            let r_gaps: Vec<Gap> = cs.windows(2).map(|w| (m - tree.join(m, w[0], w[1])) as Gap).collect();
            let r_dim = r_gaps.iter().map(|&g| g as usize).sum::<usize>() - 1;
            if r_dim == 0 {
                continue;
            }
            let amputated = LevelTree::from_gaps(&r_gaps, m)?;
            let pair_lists: Vec<Vec<(usize, usize)>> = cs
                .iter()
                .map(|&c| {
                    let tips = &under[c];
                    let mut v = Vec::new();
                    for i in 0..tips.len() {
                        for j in i + 1..tips.len() {
                            v.push((tips[i], tips[j]));
                        }
                    }
                    v
                })
                .collect();
            for_each_product(&pair_lists, &mut |pairs: &[(usize, usize)]| {
                let face = canonical_face(&lt, pairs);
                debug_assert!(face.is_face());
                let element = face.fiber_element();
                out.push(SourceTargetDatum {
                    level: m,
                    size: pairs.len(),
                    a: pairs.iter().map(|p| p.0 + 1).collect(),
                    b: pairs.iter().map(|p| p.1 + 1).collect(),
                    u: 1,
                    v: 2,
                    amputated: amputated.clone(),
                    amputated_gaps: r_gaps.clone(),
                    amputated_dim: r_dim,
                    face,
                    element,
                });
            });
        }
    }
    Ok(out)
}

fn for_each_product<T: Clone>(lists: &[Vec<T>], f: &mut impl FnMut(&[T])) {
    fn rec<T: Clone>(lists: &[Vec<T>], cur: &mut Vec<T>, f: &mut impl FnMut(&[T])) {
        if cur.len() == lists.len() {
            f(cur);
            return;
        }
        for x in &lists[cur.len()] {
            cur.push(x.clone());
            rec(lists, cur, f);
            cur.pop();
        }
    }
    rec(lists, &mut Vec::new(), f)
}

/// The face onto the two-tip tree joined at `J = max join(a_i, b_i)` that
/// sends every `a_i` to the left tip and every `b_i` to the right one.
fn canonical_face(lt: &crate::level_trees::LabeledLevelTree, pairs: &[(usize, usize)]) -> TreeMorphism {
    let tree = &lt.tree;
    let h = tree.height();
    let j = pairs.iter().map(|&(a, b)| tree.join(h, a, b)).max().unwrap();
    let target = LevelTree::from_gaps(&[(h - j) as Gap], h).unwrap();
    let mut maps: Vec<Vec<usize>> = (0..=j).map(|m| vec![0; tree.level_sizes()[m]]).collect();
    // sides of the level-(j+1) vertices
    let mut side = vec![0usize; tree.level_sizes()[j + 1]];
    for y in 0..tree.level_sizes()[j] {
        let kids = tree.children(j, y);
        let anc = |tip: usize| tree.ancestor(h, tip, j + 1);
        let a_here = pairs.iter().map(|p| anc(p.0)).find(|&x| kids.contains(&x));
        let b_here = pairs.iter().map(|p| anc(p.1)).find(|&x| kids.contains(&x));
        for k in kids {
            side[k] = match (a_here, b_here) {
                (Some(xa), _) => usize::from(k > xa),
                (None, Some(xb)) => usize::from(k >= xb),
                (None, None) => 0,
            };
        }
    }
    maps.push(side);
    for m in j + 2..=h {
        let prev = maps[m - 1].clone();
        maps.push(tree.parent_maps()[m - 1].iter().map(|&p| prev[p]).collect());
    }
    TreeMorphism { source: lt.clone(), target, maps }
}

/// Terms of degree `dim T - 1` obtained from an equal-dimensional face
/// element by replacing one vertex decoration with one of its codimension-one
/// face elements.
pub fn counterterm_pool(t: &Barcode) -> Result<Vec<OperadTerm>> {
    let dim = t.dim();
    let mut pool = BTreeMap::new();
    for f in enumerate_faces(t)? {
        if f.degree != dim || f.top {
            continue;
        }
        for (p, v) in f.element.vertices().iter().enumerate() {
            for (y, _) in d_reg_mod2(&Barcode::unlabeled(&v.gaps))?.iter() {
                let (_, x) = substitute_vertex(&f.element, p, y);
                pool.insert(x.to_string(), x);
            }
        }
    }
    Ok(pool.into_values().collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct CountertermReport {
    pub barcode: Barcode,
    pub dim: usize,
    pub d_reg: Vec<String>,
    pub d_reg_linear: usize,
    pub d_reg_decomposable: usize,
    /// Support of `∂(∂_reg g_T)` modulo 2.
    pub intersection: Vec<String>,
    pub pool_size: usize,
    pub counterterm: Option<Vec<String>>,
    pub verified: bool,
}

fn support(s: &FormalSum<F2>) -> Vec<String> {
    s.sorted_terms().into_iter().map(|(k, _)| k).collect()
}

/// Solves `∂x = ∂(∂_reg g_T)` over 𝔽₂ inside [`counterterm_pool`].
pub fn find_counterterm(t: &Barcode) -> Result<CountertermReport> {
    let n = t.arity();
    let dim = t.dim();
    if n < 4 || dim != n {
        return invalid(format!("{t} is not at the critical dimension of its arity"));
    }
    let dgen = Mod2Faces::default();
    let d_reg = d_reg_mod2(t)?;
    let target = apply_derivation(&d_reg, &dgen)?;
    let pool = counterterm_pool(t)?;
    let columns: Vec<FormalSum<F2>> = pool.iter().map(|x| derivation(x, &dgen)).collect::<Result<_>>()?;
    let mut rows: BTreeMap<OperadTerm, Vec<usize>> = BTreeMap::new();
    for (i, col) in columns.iter().enumerate() {
        for (x, _) in col.iter() {
            rows.entry(x.clone()).or_default().push(i);
        }
    }
    for (x, _) in target.iter() {
        rows.entry(x.clone()).or_default();
    }
    let mut sys = F2System::new(pool.len());
    let mut solvable = true;
    for (x, vars) in &rows {
        if sys.add(vars, target.get(x) == F2(true)) == Outcome::Conflict {
            solvable = false;
            break;
        }
    }
    let linear = d_reg.keys().filter(|k| k.as_generator().is_some()).count();
    let mut report = CountertermReport {
        barcode: t.clone(),
        dim,
        d_reg: support(&d_reg),
        d_reg_linear: linear,
        d_reg_decomposable: d_reg.len() - linear,
        intersection: support(&target),
        pool_size: pool.len(),
        counterterm: None,
        verified: false,
    };
    if solvable {
        let x = sys.solve_lexmin();
        let chosen: Vec<OperadTerm> = pool.iter().zip(&x).filter(|(_, &b)| b).map(|(t, _)| t.clone()).collect();
        report.verified = verify_counterterm(t, &chosen)?;
        report.counterterm = Some(chosen.iter().map(|c| c.to_string()).collect());
    }
    Ok(report)
}

/// `∂(∂_reg g_T + Σ U) = 0` modulo 2.
pub fn verify_counterterm(t: &Barcode, u: &[OperadTerm]) -> Result<bool> {
    let dgen = Mod2Faces::default();
    let mut total = d_reg_mod2(t)?;
    for x in u {
        if x.degree() + 1 != t.dim() || x.arity() != t.arity() {
            return Ok(false);
        }
        total.add(x.clone(), F2(true));
    }
    Ok(apply_derivation(&total, &dgen)?.is_empty())
}

/// Whether some labeled tree of arity `n`, dimension `d` and height
/// admitted by `h` carries a nontrivial source-target datum.
pub fn exists_bad_tree(n: usize, d: usize, h: Height) -> Result<Option<Barcode>> {
    for gaps in crate::level_trees::reduced_gap_sequences(Some(n), d) {
        let b = Barcode::unlabeled(&gaps);
        if !h.admits(b.height()) {
            continue;
        }
        if !source_target_witnesses(&b)?.is_empty() {
            return Ok(Some(b));
        }
    }
    Ok(None)
}

