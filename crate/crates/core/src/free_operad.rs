//! The free operad on reduced trees.
//!
//! A term is a planar rooted tree whose vertices carry unlabeled reduced
//! trees (stored as gap sequences) of matching arity and whose leaves carry
//! the labels `1..=n`. Reading the leaf labels left to right gives the
//! permutation `σ` with `term = (unlabeled term)·σ`.
//!
//! Vertices are ordered in pre-order (root first, then the subtrees from
//! left to right). A generator of dimension `d` has degree `d`; reordering
//! vertices into pre-order after a grafting costs the Koszul sign of the
//! odd-degree vertices.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::coeff::{Coeff, F2};
use crate::error::{invalid, Error, Result};
use crate::level_trees::{Barcode, Gap, Label, Parser};
use crate::perm::{inversions, Perm};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Leaf(Label),
    Vertex(Vertex),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    pub gaps: Vec<Gap>,
    pub children: Vec<Node>,
}

impl Vertex {
    pub fn degree(&self) -> usize {
        gaps_dim(&self.gaps)
    }
}

pub(crate) fn gaps_dim(gaps: &[Gap]) -> usize {
    gaps.iter().map(|&g| g as usize).sum::<usize>() - 1
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OperadTerm {
    root: Node,
}

impl OperadTerm {
    pub fn identity() -> Self {
        OperadTerm { root: Node::Leaf(1) }
    }

    /// `ι(T)`: the generator of a labeled reduced tree.
    pub fn generator(b: &Barcode) -> Self {
        OperadTerm {
            root: Node::Vertex(Vertex {
                gaps: b.gaps.clone(),
                children: b.labels.iter().map(|&l| Node::Leaf(l)).collect(),
            }),
        }
    }

    pub fn from_node(root: Node) -> Result<Self> {
        let t = OperadTerm { root };
        t.validate()?;
        Ok(t)
    }

    pub(crate) fn from_node_unchecked(root: Node) -> Self {
        OperadTerm { root }
    }

    fn validate(&self) -> Result<()> {
        fn walk(n: &Node, labels: &mut Vec<Label>) -> Result<()> {
            match n {
                Node::Leaf(l) => labels.push(*l),
                Node::Vertex(v) => {
                    if v.children.len() < 2 || v.gaps.len() + 1 != v.children.len() {
                        return invalid("vertex arity must be at least 2 and match its decoration");
                    }
                    if v.gaps.contains(&0) {
                        return invalid("gaps must be positive");
                    }
                    for c in &v.children {
                        walk(c, labels)?;
                    }
                }
            }
            Ok(())
        }
        let mut labels = Vec::new();
        walk(&self.root, &mut labels)?;
        if !crate::perm::is_permutation(&labels) {
            return invalid("leaf labels must be a permutation of 1..=n");
        }
        Ok(())
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn is_identity(&self) -> bool {
        matches!(self.root, Node::Leaf(_))
    }

    /// The generator when the term has a single vertex.
    pub fn as_generator(&self) -> Option<Barcode> {
        match &self.root {
            Node::Vertex(v) if v.children.iter().all(|c| matches!(c, Node::Leaf(_))) => {
                let labels = v
                    .children
                    .iter()
                    .map(|c| match c {
                        Node::Leaf(l) => *l,
                        _ => unreachable!(),
                    })
                    .collect();
                Some(Barcode::new_unchecked(labels, v.gaps.clone()))
            }
            _ => None,
        }
    }

    pub fn arity(&self) -> usize {
        fn walk(n: &Node) -> usize {
            match n {
                Node::Leaf(_) => 1,
                Node::Vertex(v) => v.children.iter().map(walk).sum(),
            }
        }
        walk(&self.root)
    }

    pub fn degree(&self) -> usize {
        self.vertices().iter().map(|v| v.degree()).sum()
    }

    /// Vertices in pre-order.
    pub fn vertices(&self) -> Vec<&Vertex> {
        fn walk<'a>(n: &'a Node, out: &mut Vec<&'a Vertex>) {
            if let Node::Vertex(v) = n {
                out.push(v);
                for c in &v.children {
                    walk(c, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(&self.root, &mut out);
        out
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices().len()
    }

    /// Leaf labels in planar order.
    pub fn leaf_labels(&self) -> Vec<Label> {
        fn walk(n: &Node, out: &mut Vec<Label>) {
            match n {
                Node::Leaf(l) => out.push(*l),
                Node::Vertex(v) => v.children.iter().for_each(|c| walk(c, out)),
            }
        }
        let mut out = Vec::new();
        walk(&self.root, &mut out);
        out
    }

    /// The unique factorization `self = u·σ` with `u` labeled in planar order.
    pub fn factor(&self) -> (OperadTerm, Perm) {
        let sigma = Perm::new_unchecked(self.leaf_labels());
        let mut next = 0;
        let u = map_leaves(&self.root, &mut |_| {
            next += 1;
            next
        });
        (OperadTerm { root: u }, sigma)
    }

    pub fn act(&self, sigma: &Perm) -> Result<OperadTerm> {
        if sigma.len() != self.arity() {
            return invalid("permutation size differs from the arity");
        }
        Ok(self.act_unchecked(sigma))
    }

    pub(crate) fn act_unchecked(&self, sigma: &Perm) -> OperadTerm {
        OperadTerm { root: map_leaves(&self.root, &mut |l| sigma.apply(l)) }
    }

    /// `a ∘_i b`: graft `b` into the leaf labeled `i`. Returns the Koszul
    /// sign (true when negative) together with the composite.
    pub fn compose(&self, i: usize, b: &OperadTerm) -> Result<(bool, OperadTerm)> {
        let na = self.arity();
        if i == 0 || i > na {
            return invalid(format!("position {i} outside 1..={na}"));
        }
        let i = i as Label;
        let nb = b.arity() as Label;
        let shifted = map_leaves(&b.root, &mut |l| l + i - 1);
        // tag vertices by construction order: a first, then b
        let ta = tag(&self.root, &mut 0);
        let mut start = self.vertex_count();
        let tb = tag(&shifted, &mut start);
        let grafted = graft(ta, i, nb, &tb);
        let (neg, root) = untag(grafted);
        Ok((neg, OperadTerm { root }))
    }

    /// Printed form, e.g. `[[1||3]|2]`.
    pub fn extended_barcode(&self) -> String {
        self.to_string()
    }
}

fn map_leaves(n: &Node, f: &mut impl FnMut(Label) -> Label) -> Node {
    match n {
        Node::Leaf(l) => Node::Leaf(f(*l)),
        Node::Vertex(v) => Node::Vertex(Vertex {
            gaps: v.gaps.clone(),
            children: v.children.iter().map(|c| map_leaves(c, f)).collect(),
        }),
    }
}

/// A vertex tree whose vertices remember their position in a reference order.
#[derive(Clone, Debug)]
pub(crate) enum TNode {
    Leaf(Label),
    V { key: (usize, usize), gaps: Vec<Gap>, children: Vec<TNode> },
}

pub(crate) fn tag(n: &Node, counter: &mut usize) -> TNode {
    match n {
        Node::Leaf(l) => TNode::Leaf(*l),
        Node::Vertex(v) => {
            let key = (*counter, 0);
            *counter += 1;
            TNode::V {
                key,
                gaps: v.gaps.clone(),
                children: v.children.iter().map(|c| tag(c, counter)).collect(),
            }
        }
    }
}

fn graft(n: TNode, i: Label, nb: Label, b: &TNode) -> TNode {
    match n {
        TNode::Leaf(l) if l == i => b.clone(),
        TNode::Leaf(l) if l > i => TNode::Leaf(l + nb - 1),
        TNode::Leaf(l) => TNode::Leaf(l),
        TNode::V { key, gaps, children } => TNode::V {
            key,
            gaps,
            children: children.into_iter().map(|c| graft(c, i, nb, b)).collect(),
        },
    }
}

/// Drop the tags; the sign is the parity of the permutation of odd-degree
/// vertices from the reference order into pre-order.
pub(crate) fn untag(n: TNode) -> (bool, Node) {
    fn walk(n: TNode, odd: &mut Vec<(usize, usize)>) -> Node {
        match n {
            TNode::Leaf(l) => Node::Leaf(l),
            TNode::V { key, gaps, children } => {
                if gaps_dim(&gaps) % 2 == 1 {
                    odd.push(key);
                }
                Node::Vertex(Vertex {
                    gaps,
                    children: children.into_iter().map(|c| walk(c, odd)).collect(),
                })
            }
        }
    }
    let mut odd = Vec::new();
    let node = walk(n, &mut odd);
    (inversions(&odd) % 2 == 1, node)
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Leaf(l) => write!(f, "{l}"),
            Node::Vertex(v) => {
                write!(f, "[{}", v.children[0])?;
                for (c, g) in v.children[1..].iter().zip(&v.gaps) {
                    for _ in 0..*g {
                        f.write_str("|")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str("]")
            }
        }
    }
}

impl fmt::Display for OperadTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.root {
            Node::Leaf(_) => f.write_str("1"),
            n => write!(f, "{n}"),
        }
    }
}

impl FromStr for OperadTerm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        fn item(p: &mut Parser) -> Result<Node> {
            if p.peek() == Some(b'[') {
                term(p)
            } else {
                Ok(Node::Leaf(p.label()?))
            }
        }
        fn term(p: &mut Parser) -> Result<Node> {
            p.expect(b'[')?;
            let mut children = vec![item(p)?];
            let mut gaps = Vec::new();
            while p.peek() == Some(b'|') {
                gaps.push(p.bars()?);
                children.push(item(p)?);
            }
            if children.len() < 2 {
                return p.err("a vertex needs at least two inputs");
            }
            p.expect(b']')?;
            Ok(Node::Vertex(Vertex { gaps, children }))
        }
        if s == "1" {
            return Ok(OperadTerm::identity());
        }
        let mut p = Parser::new(s);
        let root = term(&mut p)?;
        p.end()?;
        OperadTerm::from_node(root)
    }
}

impl Serialize for OperadTerm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// A finite linear combination with no zero coefficients stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinComb<K: Ord, R> {
    terms: BTreeMap<K, R>,
}

pub type FormalSum<R> = LinComb<OperadTerm, R>;

impl<K: Ord, R> Default for LinComb<K, R> {
    fn default() -> Self {
        LinComb { terms: BTreeMap::new() }
    }
}

impl<K: Ord + Clone, R: Coeff> LinComb<K, R> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(k: K, c: R) -> Self {
        let mut s = Self::new();
        s.add(k, c);
        s
    }

    pub fn add(&mut self, k: K, c: R) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(k) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = e.get().clone() + c;
                if v.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Self, c: &R) {
        for (k, v) in &other.terms {
            self.add(k.clone(), v.clone() * c.clone());
        }
    }

    pub fn get(&self, k: &K) -> R {
        self.terms.get(k).cloned().unwrap_or_else(R::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &R)> {
        self.terms.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.terms.keys()
    }

    pub fn map_keys<K2: Ord + Clone>(&self, mut f: impl FnMut(&K) -> K2) -> LinComb<K2, R> {
        let mut out = LinComb::new();
        for (k, v) in &self.terms {
            out.add(f(k), v.clone());
        }
        out
    }

    pub fn map_coeffs<R2: Coeff>(&self, mut f: impl FnMut(&R) -> R2) -> LinComb<K, R2> {
        let mut out = LinComb::new();
        for (k, v) in &self.terms {
            out.add(k.clone(), f(v));
        }
        out
    }
}

impl<K: Ord + Clone> LinComb<K, i64> {
    /// Reduction modulo 2.
    pub fn to_f2(&self) -> LinComb<K, F2> {
        self.map_coeffs(|&c| F2::from_i64(c))
    }
}

impl<K: Ord + Clone + fmt::Display, R: Coeff> LinComb<K, R> {
    /// Terms ordered by their printed keys.
    pub fn sorted_terms(&self) -> Vec<(String, R)> {
        let mut v: Vec<(String, R)> =
            self.terms.iter().map(|(k, c)| (k.to_string(), c.clone())).collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    }
}

impl<K: Ord + Clone + fmt::Display, R: Coeff> fmt::Display for LinComb<K, R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.sorted_terms();
        if terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (k, c)) in terms.iter().enumerate() {
            let cs = c.to_string();
            let (neg, mag) = match cs.strip_prefix('-') {
                Some(m) => (true, m.to_string()),
                None => (false, cs),
            };
            let sign = if neg { "-" } else if i > 0 { "+" } else { "" };
            if i > 0 {
                f.write_str(" ")?;
            }
            if mag == "1" {
                write!(f, "{sign}{k}")?;
            } else {
                write!(f, "{sign}{mag}*{k}")?;
            }
        }
        Ok(())
    }
}

impl<R: Coeff> FormalSum<R> {
    pub fn act(&self, sigma: &Perm) -> FormalSum<R> {
        self.map_keys(|t| t.act_unchecked(sigma))
    }
}

/// Parse sums such as `+[1|2] -[2|1] +3*[[1|2]|3]` over ℤ.
pub fn parse_sum(s: &str) -> Result<FormalSum<i64>> {
    let mut out = FormalSum::new();
    for tok in s.split_whitespace() {
        let (neg, rest) = match tok.as_bytes()[0] {
            b'-' => (true, &tok[1..]),
            b'+' => (false, &tok[1..]),
            _ => (false, tok),
        };
        let (mag, term) = match rest.split_once('*') {
            Some((m, t)) => (
                m.parse::<i64>().map_err(|_| Error::Parse { pos: 0, msg: format!("bad coefficient in {tok}") })?,
                t,
            ),
            None => (1, rest),
        };
        let t: OperadTerm = term.parse()?;
        out.add(t, if neg { -mag } else { mag });
    }
    Ok(out)
}

/// Differentials of the generators, indexed by unlabeled decorations.
pub trait GeneratorDifferential<R: Coeff> {
    /// `∂` of the identity-labeled generator with these gaps.
    fn d_generator(&self, gaps: &[Gap]) -> Result<FormalSum<R>>;
}

impl<R: Coeff, F: Fn(&[Gap]) -> Result<FormalSum<R>>> GeneratorDifferential<R> for F {
    fn d_generator(&self, gaps: &[Gap]) -> Result<FormalSum<R>> {
        self(gaps)
    }
}

/// The derivation extending `dgen` to all of the free operad:
/// `∂` hits one vertex at a time with the sign of the degrees in front of it.
pub fn derivation<R: Coeff>(t: &OperadTerm, dgen: &impl GeneratorDifferential<R>) -> Result<FormalSum<R>> {
    let mut out = FormalSum::new();
    let mut before = 0usize;
    for (p, v) in t.vertices().iter().enumerate() {
        let dv = dgen.d_generator(&v.gaps)?;
        for (x, c) in dv.iter() {
            let (neg, term) = substitute_vertex(t, p, x);
            let neg = neg ^ (before % 2 == 1);
            out.add(term, if neg { -c.clone() } else { c.clone() });
        }
        before += v.degree();
    }
    Ok(out)
}

/// Replace the `p`-th vertex (pre-order) by `x`, leaf `l` of `x` receiving
/// the `l`-th input of the vertex. Returns the Koszul sign of moving the new
/// vertices into pre-order, and the resulting term.
pub fn substitute_vertex(t: &OperadTerm, p: usize, x: &OperadTerm) -> (bool, OperadTerm) {
    let tagged = tag(&t.root, &mut 0);
    let tx = rekey(tag(&x.root, &mut 0), p);
    let (neg, root) = untag(substitute_at(&tagged, p, &tx));
    (neg, OperadTerm { root })
}

fn rekey(n: TNode, p: usize) -> TNode {
    match n {
        TNode::Leaf(l) => TNode::Leaf(l),
        TNode::V { key, gaps, children } => TNode::V {
            key: (p, key.0 + 1),
            gaps,
            children: children.into_iter().map(|c| rekey(c, p)).collect(),
        },
    }
}

/// Replace the vertex with key `(p, 0)` by `x`, whose leaf `l` receives child `l`.
fn substitute_at(n: &TNode, p: usize, x: &TNode) -> TNode {
    match n {
        TNode::Leaf(l) => TNode::Leaf(*l),
        TNode::V { key, gaps, children } => {
            let children: Vec<TNode> = children.iter().map(|c| substitute_at(c, p, x)).collect();
            if *key == (p, 0) {
                plug(x, &children)
            } else {
                TNode::V { key: *key, gaps: gaps.clone(), children }
            }
        }
    }
}

fn plug(x: &TNode, slots: &[TNode]) -> TNode {
    match x {
        TNode::Leaf(l) => slots[*l as usize - 1].clone(),
        TNode::V { key, gaps, children } => TNode::V {
            key: *key,
            gaps: gaps.clone(),
            children: children.iter().map(|c| plug(c, slots)).collect(),
        },
    }
}

/// `∂ ∘ ∂` applied to a sum, for checks.
pub fn apply_derivation<R: Coeff>(s: &FormalSum<R>, dgen: &impl GeneratorDifferential<R>) -> Result<FormalSum<R>> {
    let mut out = FormalSum::new();
    for (t, c) in s.iter() {
        out.add_scaled(&derivation(t, dgen)?, c);
    }
    Ok(out)
}

/// Drop every term that is not a single generator.
pub fn linear_part<R: Coeff>(s: &FormalSum<R>) -> FormalSum<R> {
    let mut out = FormalSum::new();
    for (t, c) in s.iter() {
        if t.as_generator().is_some() {
            out.add(t.clone(), c.clone());
        }
    }
    out
}
