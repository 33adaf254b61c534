//! Tree morphisms, faces, fiber elements and the boundary of regular cells.

use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use serde::Serialize;

use crate::bar_diff::d_lin_bar;
use crate::coeff::F2;
use crate::criticality::{d_crit, Height};
use crate::error::{capacity, Error, Result};
use crate::f2linalg::{F2System, Outcome};
use crate::free_operad::{derivation, FormalSum, GeneratorDifferential, Node, OperadTerm, Vertex};
use crate::level_trees::{reduced_gap_sequences, Barcode, Gap, LabeledLevelTree, LevelTree};

/// A tower `σ_m : [k_m] → [s_m]` from a labeled tree onto a pruned tree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TreeMorphism {
    pub source: LabeledLevelTree,
    pub target: LevelTree,
    /// `maps[m][v]` is the image of vertex `v` on level `m`.
    pub maps: Vec<Vec<usize>>,
}

impl TreeMorphism {
    /// Commutes with the parent maps, preserves the order of siblings and is
    /// onto on tips.
    pub fn is_face(&self) -> bool {
        let t = &self.source.tree;
        let s = &self.target;
        let h = t.height();
        if s.height() != h || self.maps.len() != h + 1 || !s.is_pruned() {
            return false;
        }
        for m in 0..=h {
            if self.maps[m].len() != t.level_sizes()[m]
                || self.maps[m].iter().any(|&x| x >= s.level_sizes()[m])
            {
                return false;
            }
        }
        for m in 1..=h {
            for v in 0..t.level_sizes()[m] {
                let up = self.maps[m - 1][t.parent_maps()[m - 1][v]];
                if s.parent_maps()[m - 1][self.maps[m][v]] != up {
                    return false;
                }
            }
            for p in 0..t.level_sizes()[m - 1] {
                let kids = t.children(m - 1, p);
                let imgs: Vec<usize> = kids.map(|c| self.maps[m][c]).collect();
                if imgs.windows(2).any(|w| w[0] > w[1]) {
                    return false;
                }
            }
        }
        let mut hit = vec![false; s.tips()];
        for &x in &self.maps[h] {
            hit[x] = true;
        }
        hit.iter().all(|&b| b)
    }

    /// Bijective on tips.
    pub fn is_quasibijection(&self) -> bool {
        self.target.tips() == self.source.tree.tips()
    }

    /// `F_j = σ⁻¹(S_j)`, represented by its tips (in source order).
    pub fn fiber_tips(&self, j: usize) -> Vec<usize> {
        let h = self.source.tree.height();
        (0..self.source.tree.tips()).filter(|&t| self.maps[h][t] == j).collect()
    }

    /// `C_σ = r(S) ∘ (r(F_1), …, r(F_s))`.
    pub fn fiber_element(&self) -> OperadTerm {
        let t = &self.source.tree;
        let h = t.height();
        let slots: Vec<Node> = (0..self.target.tips())
            .map(|j| {
                let tips = self.fiber_tips(j);
                if tips.len() == 1 {
                    Node::Leaf(self.source.labeling[tips[0]])
                } else {
                    Node::Vertex(Vertex {
                        gaps: tips.windows(2).map(|w| (h - t.join(h, w[0], w[1])) as Gap).collect(),
                        children: tips.iter().map(|&x| Node::Leaf(self.source.labeling[x])).collect(),
                    })
                }
            })
            .collect();
        if slots.len() == 1 {
            return OperadTerm::from_node_unchecked(slots.into_iter().next().unwrap());
        }
        let outer = self.target.tip_gaps();
        OperadTerm::from_node_unchecked(Node::Vertex(Vertex { gaps: outer, children: slots }))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Face {
    pub serial: usize,
    pub morphism: TreeMorphism,
    pub element: OperadTerm,
    pub degree: usize,
    pub quasibijection: bool,
    /// The element is the source generator itself (a single target tip, or
    /// an isomorphism).
    pub top: bool,
}

/// All faces of a reduced labeled tree, target trees taken up to isomorphism.
pub fn enumerate_faces(b: &Barcode) -> Result<Vec<Face>> {
    let source = b.to_tree();
    if source.tree.tips() > 8 || source.tree.height() > 5 {
        return Err(Error::Capacity(format!(
            "face enumeration is limited to arity ≤ 8 and height ≤ 5, got {b}"
        )));
    }
    let cap = capacity();
    let mut out = Vec::new();
    let t = source.tree.clone();
    let h = t.height();
    let mut st = Search {
        t: &t,
        maps: vec![vec![0]],
        s_sizes: vec![1],
        s_parents: Vec::new(),
        count: 0,
        cap,
    };
    let mut towers = Vec::new();
    st.level(0, &mut towers)?;
    let own = OperadTerm::generator(b);
    for (serial, (maps, s_sizes, s_parents)) in towers.into_iter().enumerate() {
        let target = LevelTree::new(h, s_sizes, s_parents).expect("search builds valid trees");
        let morphism = TreeMorphism { source: source.clone(), target, maps };
        let element = morphism.fiber_element();
        let degree = element.degree();
        let quasibijection = morphism.is_quasibijection();
        let top = element == own;
        out.push(Face { serial, morphism, element, degree, quasibijection, top });
    }
    Ok(out)
}

type Tower = (Vec<Vec<usize>>, Vec<usize>, Vec<Vec<usize>>);

struct Search<'a> {
    t: &'a LevelTree,
    maps: Vec<Vec<usize>>,
    s_sizes: Vec<usize>,
    s_parents: Vec<Vec<usize>>,
    count: usize,
    cap: usize,
}

impl Search<'_> {
    fn level(&mut self, m: usize, out: &mut Vec<Tower>) -> Result<()> {
        let h = self.t.height();
        if m == h {
            self.count += 1;
            if self.count > self.cap {
                return Err(Error::Capacity(format!("more than {} faces", self.cap)));
            }
            out.push((self.maps.clone(), self.s_sizes.clone(), self.s_parents.clone()));
            return Ok(());
        }
        // group the level-m vertices of T by their image
        let s_m = self.s_sizes[m];
        let mut groups: Vec<Vec<usize>> = vec![Vec::new(); s_m];
        for (x, &w) in self.maps[m].iter().enumerate() {
            groups[w].push(x);
        }
        let k_next = self.t.level_sizes()[m + 1];
        let mut next = vec![0usize; k_next];
        let mut parents = Vec::new();
        self.group(m, &groups, 0, &mut next, &mut parents, out)
    }

    fn group(
        &mut self,
        m: usize,
        groups: &[Vec<usize>],
        w: usize,
        next: &mut Vec<usize>,
        parents: &mut Vec<usize>,
        out: &mut Vec<Tower>,
    ) -> Result<()> {
        if w == groups.len() {
            self.maps.push(next.clone());
            self.s_sizes.push(parents.len());
            self.s_parents.push(parents.clone());
            let r = self.level(m + 1, out);
            self.maps.pop();
            self.s_sizes.pop();
            self.s_parents.pop();
            return r;
        }
        let chains: Vec<std::ops::Range<usize>> =
            groups[w].iter().map(|&x| self.t.children(m, x)).collect();
        let total: usize = chains.iter().map(|c| c.len()).sum();
        let offset = parents.len();
        let elems: Vec<(usize, bool)> = chains
            .iter()
            .flat_map(|c| c.clone().enumerate().map(|(i, v)| (v, i == 0)))
            .collect();
        for c in 1..=total {
            parents.extend(std::iter::repeat(w).take(c));
            let mut covered = vec![0usize; c];
            self.assign(m, groups, w, &elems, 0, 0, c, offset, &mut covered, next, parents, out)?;
            parents.truncate(offset);
        }
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn assign(
        &mut self,
        m: usize,
        groups: &[Vec<usize>],
        w: usize,
        elems: &[(usize, bool)],
        i: usize,
        prev: usize,
        c: usize,
        offset: usize,
        covered: &mut Vec<usize>,
        next: &mut Vec<usize>,
        parents: &mut Vec<usize>,
        out: &mut Vec<Tower>,
    ) -> Result<()> {
        if i == elems.len() {
            if covered.iter().all(|&k| k > 0) {
                return self.group(m, groups, w + 1, next, parents, out);
            }
            return Ok(());
        }
        let (v, first) = elems[i];
        let lo = if first { 0 } else { prev };
        for val in lo..c {
            next[v] = offset + val;
            covered[val] += 1;
            self.assign(m, groups, w, elems, i + 1, val, c, offset, covered, next, parents, out)?;
            covered[val] -= 1;
        }
        Ok(())
    }
}

/// Faces of codimension one, i.e. `deg C_σ = dim T - 1`.
pub fn codim_one_faces(b: &Barcode) -> Result<Vec<Face>> {
    let dim = b.dim();
    if dim == 0 {
        return Ok(Vec::new());
    }
    Ok(enumerate_faces(b)?.into_iter().filter(|f| f.degree + 1 == dim).collect())
}

/// Elements `C_σ` produced by more than one face, with their counts.
pub fn face_multiplicities(faces: &[Face]) -> Vec<(OperadTerm, usize)> {
    let mut counts: BTreeMap<&OperadTerm, usize> = BTreeMap::new();
    for f in faces {
        *counts.entry(&f.element).or_default() += 1;
    }
    counts.into_iter().filter(|(_, c)| *c > 1).map(|(t, c)| (t.clone(), c)).collect()
}

/// The sum of the codimension-one face elements modulo 2.
pub fn d_reg_mod2(b: &Barcode) -> Result<FormalSum<F2>> {
    let mut out = FormalSum::new();
    for f in codim_one_faces(b)? {
        out.add(f.element, F2(true));
    }
    Ok(out)
}

/// `∂` modulo 2 on every generator, through its codimension-one faces.
#[derive(Default)]
pub struct Mod2Faces {
    cache: Mutex<HashMap<Vec<Gap>, FormalSum<F2>>>,
}

impl GeneratorDifferential<F2> for Mod2Faces {
    fn d_generator(&self, gaps: &[Gap]) -> Result<FormalSum<F2>> {
        if let Some(s) = self.cache.lock().unwrap().get(gaps) {
            return Ok(s.clone());
        }
        let s = d_reg_mod2(&Barcode::unlabeled(gaps))?;
        self.cache.lock().unwrap().insert(gaps.to_vec(), s.clone());
        Ok(s)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SignedFace {
    pub serial: usize,
    pub element: OperadTerm,
    pub sign: i8,
    pub quasibijection: bool,
    /// Fixed by a fixture formula rather than forced or chosen.
    pub anchored: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneratorSigns {
    pub barcode: Barcode,
    pub faces: Vec<SignedFace>,
    #[serde(serialize_with = "ser_sum")]
    pub boundary: FormalSum<i64>,
}

fn ser_sum<S: serde::Serializer>(s: &FormalSum<i64>, ser: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let terms = s.sorted_terms();
    let mut seq = ser.serialize_seq(Some(terms.len()))?;
    for t in terms {
        seq.serialize_element(&t)?;
    }
    seq.end()
}

/// A fixture sign that contradicts the signs forced by `∂² = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AnchorConflict {
    pub generator: String,
    pub term: String,
    pub fixture_sign: i64,
    pub forced_sign: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Multiplicity {
    pub generator: String,
    pub element: String,
    pub count: usize,
}

/// Signs `ε(T, σ)` for the codimension-one faces of regular generators.
#[derive(Clone, Debug, Default, Serialize)]
pub struct SignTable {
    pub n_max: usize,
    pub d_max: usize,
    pub entries: BTreeMap<Vec<Gap>, GeneratorSigns>,
    pub conflicts: Vec<AnchorConflict>,
    pub multiplicities: Vec<Multiplicity>,
}

impl GeneratorDifferential<i64> for SignTable {
    fn d_generator(&self, gaps: &[Gap]) -> Result<FormalSum<i64>> {
        match self.entries.get(gaps) {
            Some(e) => Ok(e.boundary.clone()),
            None => Err(Error::Capacity(format!(
                "{} lies outside the solved sign range",
                Barcode::unlabeled(gaps)
            ))),
        }
    }
}

impl SignTable {
    /// `∂` of a labeled regular generator.
    pub fn d_reg_signed(&self, b: &Barcode) -> Result<FormalSum<i64>> {
        Ok(self.d_generator(&b.gaps)?.act(&b.labels_perm()))
    }

    /// `∂` of any term built from generators in range.
    pub fn d(&self, t: &OperadTerm) -> Result<FormalSum<i64>> {
        derivation(t, self)
    }
}

/// Regular generators covered by `solve_signs(n_max, d_max)`, in solving order.
pub fn regular_range(n_max: usize, d_max: usize) -> Vec<Vec<Gap>> {
    let mut out = Vec::new();
    for d in 0..=d_max {
        for n in 2..=n_max {
            if d_crit(n, Height::Infinite).is_some_and(|c| d >= c) {
                continue;
            }
            out.extend(reduced_gap_sequences(Some(n), d));
        }
    }
    out
}

/// Solves for the face signs of all regular generators with arity ≤ `n_max`
/// and dimension ≤ `d_max`, anchored to `anchors` (identity-labeled
/// generators with their expected boundaries).
pub fn solve_signs(n_max: usize, d_max: usize, anchors: &BTreeMap<Barcode, FormalSum<i64>>) -> Result<SignTable> {
    if n_max > 6 || d_max > 5 {
        return Err(Error::Capacity(format!(
            "sign solving is limited to n ≤ 6 and d ≤ 5, got n = {n_max}, d = {d_max}"
        )));
    }
    let mut table = SignTable { n_max, d_max, ..Default::default() };
    for gaps in regular_range(n_max, d_max) {
        let b = Barcode::unlabeled(&gaps);
        let (entry, conflicts, mult) = solve_generator(&table, &b, anchors.get(&b))?;
        table.conflicts.extend(conflicts);
        table.multiplicities.extend(mult);
        table.entries.insert(gaps, entry);
    }
    Ok(table)
}

type Solved = (GeneratorSigns, Vec<AnchorConflict>, Vec<Multiplicity>);

fn solve_generator(
    table: &SignTable,
    b: &Barcode,
    anchor: Option<&FormalSum<i64>>,
) -> Result<Solved> {
    let faces = codim_one_faces(b)?;
    let mult = face_multiplicities(&faces)
        .into_iter()
        .map(|(t, c)| Multiplicity { generator: b.to_string(), element: t.to_string(), count: c })
        .collect();
    let lin = d_lin_bar::<i64>(b);
    // fixed signs on quasibijections, unknowns elsewhere
    let mut fixed: Vec<Option<i64>> = Vec::with_capacity(faces.len());
    let mut var_of: Vec<Option<usize>> = Vec::with_capacity(faces.len());
    let mut nvars = 0;
    let mut quasi_seen = LinCombCount::default();
    for f in &faces {
        if f.quasibijection {
            let s = f.element.as_generator().expect("quasibijections give generators");
            let c = lin.get(&s);
            if c.abs() != 1 {
                return Err(Error::Internal(format!(
                    "quasibijection face {} of {b} has ∂_lin coefficient {c}",
                    f.element
                )));
            }
            quasi_seen.bump(s);
            fixed.push(Some(c));
            var_of.push(None);
        } else {
            fixed.push(None);
            var_of.push(Some(nvars));
            nvars += 1;
        }
    }
    if quasi_seen.0.len() != lin.len() || quasi_seen.0.values().any(|&k| k != 1) {
        return Err(Error::Internal(format!(
            "quasibijection faces of {b} do not match the support of ∂_lin"
        )));
    }
    // contributions of every face to ∂∂
    let mut contrib: BTreeMap<OperadTerm, Vec<(usize, i64)>> = BTreeMap::new();
    for (i, f) in faces.iter().enumerate() {
        for (x, c) in derivation(&f.element, table)?.iter() {
            contrib.entry(x.clone()).or_default().push((i, *c));
        }
    }
    let mut sys = F2System::new(nvars);
    for (x, cs) in &contrib {
        if cs.len() != 2 || cs.iter().any(|(_, c)| c.abs() != 1) {
            continue;
        }
        let (i, ci) = cs[0];
        let (j, cj) = cs[1];
        let outcome = match (var_of[i], var_of[j], fixed[i], fixed[j]) {
            (Some(u), Some(v), _, _) => sys.add(&[u, v], ci == cj),
            (Some(u), None, _, Some(fj)) => sys.add(&[u], ci == fj * cj),
            (None, Some(v), Some(fi), _) => sys.add(&[v], cj == fi * ci),
            _ => {
                if fixed[i].unwrap() * ci + fixed[j].unwrap() * cj != 0 {
                    Outcome::Conflict
                } else {
                    Outcome::Redundant
                }
            }
        };
        if outcome == Outcome::Conflict {
            return Err(Error::Internal(format!("sign system of {b} is inconsistent at {x}")));
        }
    }
    let mut conflicts = Vec::new();
    let mut anchored = vec![false; faces.len()];
    if let Some(expected) = anchor {
        for (term, &sign) in expected.iter() {
            let hits: Vec<usize> = (0..faces.len()).filter(|&i| &faces[i].element == term).collect();
            if hits.len() != 1 {
                continue;
            }
            let i = hits[0];
            match (var_of[i], fixed[i]) {
                (Some(u), _) => match sys.add(&[u], sign < 0) {
                    Outcome::Conflict => conflicts.push(AnchorConflict {
                        generator: b.to_string(),
                        term: term.to_string(),
                        fixture_sign: sign,
                        forced_sign: -sign,
                    }),
                    _ => anchored[i] = true,
                },
                (None, Some(f)) => {
                    if f != sign {
                        conflicts.push(AnchorConflict {
                            generator: b.to_string(),
                            term: term.to_string(),
                            fixture_sign: sign,
                            forced_sign: f,
                        });
                    }
                }
                _ => unreachable!(),
            }
        }
    }
    let x = sys.solve_lexmin();
    let mut boundary = FormalSum::new();
    let mut signed = Vec::with_capacity(faces.len());
    for (i, f) in faces.iter().enumerate() {
        let sign = match (var_of[i], fixed[i]) {
            (Some(u), _) => {
                if x[u] {
                    -1
                } else {
                    1
                }
            }
            (None, Some(s)) => s,
            _ => unreachable!(),
        };
        boundary.add(f.element.clone(), sign);
        signed.push(SignedFace {
            serial: f.serial,
            element: f.element.clone(),
            sign: sign as i8,
            quasibijection: f.quasibijection,
            anchored: anchored[i],
        });
    }
    // ∂∂ = 0 over ℤ, including the terms the 𝔽₂ system did not see
    let mut dd = FormalSum::<i64>::new();
    for (t, c) in boundary.iter() {
        dd.add_scaled(&derivation(t, table)?, c);
    }
    if let Some((t, c)) = dd.iter().next() {
        return Err(Error::Internal(format!("∂∂{b} has the term {c}·{t}")));
    }
    Ok((GeneratorSigns { barcode: b.clone(), faces: signed, boundary }, conflicts, mult))
}

#[derive(Default)]
struct LinCombCount(BTreeMap<Barcode, usize>);

impl LinCombCount {
    fn bump(&mut self, b: Barcode) {
        *self.0.entry(b).or_default() += 1;
    }
}

/// Faces of a labeled tree whose element is `target`, for fixtures.
pub fn faces_with_element(b: &Barcode, target: &OperadTerm) -> Result<Vec<Face>> {
    Ok(enumerate_faces(b)?.into_iter().filter(|f| &f.element == target).collect())
}
