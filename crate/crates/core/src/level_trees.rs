//! Trees with levels, barcodes and flags of pre-orders.
//!
//! A height-`h` tree is a tower of order-preserving maps
//! `[k_h] → [k_{h-1}] → ⋯ → [k_0] = [1]`. Vertex indices are 0-based in
//! this crate, so `parent_maps[m - 1][v]` is the parent (on level `m - 1`)
//! of vertex `v` on level `m`.
//!
//! Pruned trees are determined by their height and the *gap sequence*:
//! the gap between adjacent tips is `h` minus the level of their deepest
//! common ancestor. For reduced trees this is the bar count in the barcode.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::perm::{is_permutation, Perm};

pub type Label = u16;
pub type Gap = u8;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawLevelTree")]
pub struct LevelTree {
    height: usize,
    level_sizes: Vec<usize>,
    parent_maps: Vec<Vec<usize>>,
}

#[derive(Deserialize)]
struct RawLevelTree {
    height: usize,
    level_sizes: Vec<usize>,
    parent_maps: Vec<Vec<usize>>,
}

impl TryFrom<RawLevelTree> for LevelTree {
    type Error = Error;
    fn try_from(r: RawLevelTree) -> Result<Self> {
        LevelTree::new(r.height, r.level_sizes, r.parent_maps)
    }
}

impl LevelTree {
    pub fn new(height: usize, level_sizes: Vec<usize>, parent_maps: Vec<Vec<usize>>) -> Result<Self> {
        if height == 0 {
            return invalid("height must be at least 1");
        }
        if level_sizes.len() != height + 1 || parent_maps.len() != height {
            return invalid("level_sizes needs h+1 entries and parent_maps h entries");
        }
        if level_sizes[0] != 1 {
            return invalid("k_0 must be 1");
        }
        if level_sizes.iter().any(|&k| k == 0) {
            return invalid("every level needs at least one vertex");
        }
        for m in 1..=height {
            let map = &parent_maps[m - 1];
            if map.len() != level_sizes[m] {
                return invalid(format!("parent map of level {m} has wrong length"));
            }
            if map.iter().any(|&p| p >= level_sizes[m - 1]) {
                return invalid(format!("parent map of level {m} leaves [k_{}]", m - 1));
            }
            if map.windows(2).any(|w| w[0] > w[1]) {
                return invalid(format!("parent map of level {m} is not order-preserving"));
            }
        }
        Ok(LevelTree { height, level_sizes, parent_maps })
    }

    /// The tree `U_h` with a single tip.
    pub fn terminal(height: usize) -> Self {
        assert!(height >= 1);
        LevelTree {
            height,
            level_sizes: vec![1; height + 1],
            parent_maps: vec![vec![0]; height],
        }
    }

    /// The pruned tree of height `height` with the given gaps between tips.
    pub fn from_gaps(gaps: &[Gap], height: usize) -> Result<Self> {
        if height == 0 {
            return invalid("height must be at least 1");
        }
        if gaps.iter().any(|&g| g == 0 || g as usize > height) {
            return invalid(format!("gaps {gaps:?} must lie in 1..={height}"));
        }
        let n = gaps.len() + 1;
        // anc[m][t]: ancestor of tip t on level m
        let mut level_sizes = Vec::with_capacity(height + 1);
        let mut anc: Vec<Vec<usize>> = Vec::with_capacity(height + 1);
        for m in 0..=height {
            let mut row = Vec::with_capacity(n);
            let mut cur = 0;
            row.push(0);
            for &g in gaps {
                if g as usize > height - m {
                    cur += 1;
                }
                row.push(cur);
            }
            level_sizes.push(cur + 1);
            anc.push(row);
        }
        let mut parent_maps = Vec::with_capacity(height);
        for m in 1..=height {
            let mut map = vec![0; level_sizes[m]];
            for t in 0..n {
                map[anc[m][t]] = anc[m - 1][t];
            }
            parent_maps.push(map);
        }
        Ok(LevelTree { height, level_sizes, parent_maps })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn level_sizes(&self) -> &[usize] {
        &self.level_sizes
    }

    pub fn parent_maps(&self) -> &[Vec<usize>] {
        &self.parent_maps
    }

    pub fn tips(&self) -> usize {
        self.level_sizes[self.height]
    }

    /// `e(T)`, the number of edges.
    pub fn edges(&self) -> usize {
        self.level_sizes[1..].iter().sum()
    }

    pub fn is_terminal(&self) -> bool {
        self.level_sizes.iter().all(|&k| k == 1)
    }

    /// `e(T) - h - 1`, with the terminal trees placed in dimension 0.
    pub fn dim(&self) -> usize {
        if self.is_terminal() {
            0
        } else {
            self.edges() - self.height - 1
        }
    }

    pub fn ancestor(&self, level: usize, vertex: usize, to: usize) -> usize {
        assert!(to <= level && level <= self.height);
        let mut v = vertex;
        for m in (to + 1..=level).rev() {
            v = self.parent_maps[m - 1][v];
        }
        v
    }

    pub fn children(&self, level: usize, vertex: usize) -> std::ops::Range<usize> {
        let map = &self.parent_maps[level];
        let lo = map.partition_point(|&p| p < vertex);
        let hi = map.partition_point(|&p| p <= vertex);
        lo..hi
    }

    /// Level of the deepest common ancestor of two vertices on `level`.
    pub fn join(&self, level: usize, a: usize, b: usize) -> usize {
        let (mut x, mut y, mut m) = (a, b, level);
        while x != y {
            x = self.parent_maps[m - 1][x];
            y = self.parent_maps[m - 1][y];
            m -= 1;
        }
        m
    }

    pub fn is_pruned(&self) -> bool {
        (1..=self.height).all(|m| {
            let map = &self.parent_maps[m - 1];
            map[0] == 0
                && map.last() == Some(&(self.level_sizes[m - 1] - 1))
                && map.windows(2).all(|w| w[1] - w[0] <= 1)
        })
    }

    pub fn has_trunk(&self) -> bool {
        self.level_sizes[1..].iter().any(|&k| k == 1)
    }

    pub fn is_reduced(&self) -> bool {
        self.is_pruned() && !self.has_trunk()
    }

    /// Gaps between consecutive tips.
    pub fn tip_gaps(&self) -> Vec<Gap> {
        let h = self.height;
        (1..self.tips())
            .map(|t| (h - self.join(h, t - 1, t)) as Gap)
            .collect()
    }

    /// `r(T)`: prune, then cut off the trunk.
    pub fn reduce(&self) -> LevelTree {
        if self.tips() == 1 {
            return LevelTree::terminal(self.height);
        }
        let gaps = self.tip_gaps();
        let h = *gaps.iter().max().unwrap() as usize;
        LevelTree::from_gaps(&gaps, h).expect("gaps of a tree are valid")
    }

    /// Adjoin a trunk of height one.
    pub fn suspend(&self) -> LevelTree {
        let mut level_sizes = vec![1];
        level_sizes.extend_from_slice(&self.level_sizes);
        let mut parent_maps = vec![vec![0]];
        parent_maps.extend(self.parent_maps.iter().cloned());
        LevelTree { height: self.height + 1, level_sizes, parent_maps }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LabeledLevelTree {
    pub tree: LevelTree,
    /// `labeling[t]` is the label of tip `t`.
    pub labeling: Vec<Label>,
}

impl LabeledLevelTree {
    pub fn new(tree: LevelTree, labeling: Vec<Label>) -> Result<Self> {
        if labeling.len() != tree.tips() || !is_permutation(&labeling) {
            return invalid("labeling must be a bijection from the tips onto 1..=n");
        }
        Ok(LabeledLevelTree { tree, labeling })
    }

    pub fn act(&self, sigma: &Perm) -> Result<Self> {
        if sigma.len() != self.labeling.len() {
            return invalid("permutation size differs from the number of tips");
        }
        Ok(LabeledLevelTree {
            tree: self.tree.clone(),
            labeling: self.labeling.iter().map(|&k| sigma.apply(k)).collect(),
        })
    }
}

/// A labeled reduced tree written as labels separated by runs of bars.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Barcode {
    pub labels: Vec<Label>,
    pub gaps: Vec<Gap>,
}

impl Barcode {
    pub fn new(labels: Vec<Label>, gaps: Vec<Gap>) -> Result<Self> {
        if labels.len() < 2 {
            return invalid("a barcode needs at least two tips");
        }
        if gaps.len() + 1 != labels.len() {
            return invalid("a barcode with n labels has n-1 gaps");
        }
        if gaps.contains(&0) {
            return invalid("gaps must be positive");
        }
        if !is_permutation(&labels) {
            return invalid(format!("labels {labels:?} are not a permutation of 1..=n"));
        }
        Ok(Barcode { labels, gaps })
    }

    pub(crate) fn new_unchecked(labels: Vec<Label>, gaps: Vec<Gap>) -> Self {
        Barcode { labels, gaps }
    }

    /// The identity-labeled barcode with the given gaps.
    pub fn unlabeled(gaps: &[Gap]) -> Self {
        Barcode {
            labels: (1..=gaps.len() as Label + 1).collect(),
            gaps: gaps.to_vec(),
        }
    }

    pub fn arity(&self) -> usize {
        self.labels.len()
    }

    pub fn height(&self) -> usize {
        *self.gaps.iter().max().unwrap() as usize
    }

    pub fn dim(&self) -> usize {
        self.gaps.iter().map(|&g| g as usize).sum::<usize>() - 1
    }

    pub fn is_identity_labeled(&self) -> bool {
        self.labels.iter().enumerate().all(|(i, &l)| l as usize == i + 1)
    }

    pub fn labels_perm(&self) -> Perm {
        Perm::new_unchecked(self.labels.clone())
    }

    pub fn act(&self, sigma: &Perm) -> Barcode {
        Barcode {
            labels: self.labels.iter().map(|&k| sigma.apply(k)).collect(),
            gaps: self.gaps.clone(),
        }
    }

    pub fn to_tree(&self) -> LabeledLevelTree {
        LabeledLevelTree {
            tree: LevelTree::from_gaps(&self.gaps, self.height()).unwrap(),
            labeling: self.labels.clone(),
        }
    }

    pub fn from_tree(t: &LabeledLevelTree) -> Result<Self> {
        if !t.tree.is_reduced() {
            return invalid("only reduced trees have barcodes");
        }
        Barcode::new(t.labeling.clone(), t.tree.tip_gaps())
    }
}

impl fmt::Display for Barcode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}", self.labels[0])?;
        for (l, g) in self.labels[1..].iter().zip(&self.gaps) {
            for _ in 0..*g {
                f.write_str("|")?;
            }
            write!(f, "{l}")?;
        }
        f.write_str("]")
    }
}

impl FromStr for Barcode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser::new(s);
        p.expect(b'[')?;
        let mut labels = vec![p.label()?];
        let mut gaps = Vec::new();
        while p.peek() == Some(b'|') {
            gaps.push(p.bars()?);
            labels.push(p.label()?);
        }
        p.expect(b']')?;
        p.end()?;
        Barcode::new(labels, gaps)
    }
}

pub(crate) struct Parser<'a> {
    s: &'a [u8],
    pub pos: usize,
}

impl<'a> Parser<'a> {
    pub fn new(s: &'a str) -> Self {
        Parser { s: s.as_bytes(), pos: 0 }
    }

    pub fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.pos, msg: msg.into() })
    }

    pub fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    pub fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected '{}'", c as char))
        }
    }

    pub fn end(&self) -> Result<()> {
        if self.pos == self.s.len() {
            Ok(())
        } else {
            self.err("trailing input")
        }
    }

    pub fn label(&mut self) -> Result<Label> {
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a label");
        }
        let txt = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
        txt.parse().or_else(|_| {
            Err(Error::Parse { pos: start, msg: format!("label {txt} out of range") })
        })
    }

    pub fn bars(&mut self) -> Result<Gap> {
        let start = self.pos;
        while self.peek() == Some(b'|') {
            self.pos += 1;
        }
        u8::try_from(self.pos - start)
            .or_else(|_| Err(Error::Parse { pos: start, msg: "too many bars".into() }))
    }
}

/// A chain of ordered partitions `π_1 ≺ ⋯ ≺ π_h` ending in a total order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FlagOfPreorders {
    /// `blocks[s - 1]` is `π_s`; each block is stored sorted.
    pub blocks: Vec<Vec<Vec<Label>>>,
}

impl FlagOfPreorders {
    pub fn new(blocks: Vec<Vec<Vec<Label>>>) -> Result<Self> {
        let flag = FlagOfPreorders { blocks };
        flag.to_tree()?;
        Ok(flag)
    }

    pub fn height(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_reduced(&self) -> bool {
        self.blocks.first().map_or(false, |p| p.len() > 1)
    }

    /// `Σ|π_s| - h - 1`.
    pub fn dim(&self) -> usize {
        let total: usize = self.blocks.iter().map(|p| p.len()).sum();
        total - self.height() - 1
    }

    /// The flag of a pruned labeled tree: `π_s` lists the tip sets of the level-`s` vertices.
    pub fn from_tree(t: &LabeledLevelTree) -> Result<Self> {
        if !t.tree.is_pruned() {
            return invalid("flags correspond to pruned trees");
        }
        let h = t.tree.height();
        let mut blocks = Vec::with_capacity(h);
        for s in 1..=h {
            let mut pi: Vec<Vec<Label>> = vec![Vec::new(); t.tree.level_sizes()[s]];
            for (tip, &l) in t.labeling.iter().enumerate() {
                pi[t.tree.ancestor(h, tip, s)].push(l);
            }
            for b in &mut pi {
                b.sort_unstable();
            }
            blocks.push(pi);
        }
        Ok(FlagOfPreorders { blocks })
    }

    pub fn to_tree(&self) -> Result<LabeledLevelTree> {
        let h = self.height();
        if h == 0 {
            return invalid("a flag needs at least one partition");
        }
        let n: usize = self.blocks[0].iter().map(|b| b.len()).sum();
        let mut owner = vec![usize::MAX; n + 1];
        let mut level_sizes = vec![1];
        let mut parent_maps = Vec::with_capacity(h);
        for (s, pi) in self.blocks.iter().enumerate() {
            let mut seen = vec![false; n + 1];
            let mut map = Vec::with_capacity(pi.len());
            let mut next_owner = vec![usize::MAX; n + 1];
            for (bi, b) in pi.iter().enumerate() {
                if b.is_empty() {
                    return invalid("blocks must be nonempty");
                }
                if b.iter().any(|&x| x == 0 || x as usize > n) {
                    return invalid(format!("π_{} is not a partition of 1..={n}", s + 1));
                }
                let parent = if s == 0 { 0 } else { owner[b[0] as usize] };
                for &x in b {
                    let x = x as usize;
                    if x == 0 || x > n || seen[x] {
                        return invalid(format!("π_{} is not a partition of 1..={n}", s + 1));
                    }
                    seen[x] = true;
                    if s > 0 && owner[x] != parent {
                        return invalid(format!("π_{} does not refine π_{}", s + 1, s));
                    }
                    next_owner[x] = bi;
                }
                map.push(parent);
            }
            if seen[1..].iter().any(|&v| !v) {
                return invalid(format!("π_{} does not cover 1..={n}", s + 1));
            }
            if map.windows(2).any(|w| w[0] > w[1]) {
                return invalid(format!("π_{} does not preserve the order of π_{}", s + 1, s));
            }
            level_sizes.push(pi.len());
            parent_maps.push(map);
            owner = next_owner;
        }
        if self.blocks[h - 1].iter().any(|b| b.len() != 1) {
            return invalid("π_h must be a total order");
        }
        let labeling = self.blocks[h - 1].iter().map(|b| b[0]).collect();
        LabeledLevelTree::new(LevelTree::new(h, level_sizes, parent_maps)?, labeling)
    }
}

/// Compositions of `total` (into exactly `parts` parts when given), each part ≤ `max_part`.
pub fn compositions(total: usize, parts: Option<usize>, max_part: usize) -> Vec<Vec<Gap>> {
    fn rec(
        left: usize,
        parts_left: Option<usize>,
        max_part: usize,
        cur: &mut Vec<Gap>,
        out: &mut Vec<Vec<Gap>>,
    ) {
        match parts_left {
            Some(0) => {
                if left == 0 {
                    out.push(cur.clone());
                }
                return;
            }
            None if left == 0 => {
                out.push(cur.clone());
                return;
            }
            _ => {}
        }
        let rest = parts_left.map(|p| p - 1);
        let reserve = rest.unwrap_or(0);
        for g in 1..=max_part.min(left.saturating_sub(reserve)).min(Gap::MAX as usize) {
            cur.push(g as Gap);
            rec(left - g, rest, max_part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if parts == Some(0) {
        return out;
    }
    rec(total, parts, max_part, &mut Vec::new(), &mut out);
    out
}

/// Gap sequences of the unlabeled reduced trees of dimension `d`
/// (arity `arity` when given), sorted by barcode string.
pub fn reduced_gap_sequences(arity: Option<usize>, d: usize) -> Vec<Vec<Gap>> {
    reduced_gap_sequences_bounded(arity, d, usize::MAX)
}

/// As [`reduced_gap_sequences`], restricted to height at most `max_height`.
pub fn reduced_gap_sequences_bounded(arity: Option<usize>, d: usize, max_height: usize) -> Vec<Vec<Gap>> {
    if arity.map_or(false, |n| n < 2) {
        return Vec::new();
    }
    let seqs = compositions(d + 1, arity.map(|n| n - 1), max_height);
    sort_by_barcode(seqs.into_iter().map(|g| Barcode::unlabeled(&g)).collect())
        .into_iter()
        .map(|b| b.gaps)
        .collect()
}

/// Unlabeled reduced trees of dimension `d`, lexicographic by barcode.
pub fn enumerate_reduced(arity: Option<usize>, d: usize) -> Vec<LevelTree> {
    reduced_gap_sequences(arity, d)
        .iter()
        .map(|g| LevelTree::from_gaps(g, *g.iter().max().unwrap() as usize).unwrap())
        .collect()
}

/// All labeled reduced trees of arity `n`, dimension `d` and height ≤ `max_height`.
pub fn enumerate_labeled(n: usize, d: usize, max_height: usize) -> Vec<Barcode> {
    let perms = Perm::all(n);
    let mut out = Vec::new();
    for g in compositions(d + 1, Some(n.saturating_sub(1)), max_height) {
        for p in &perms {
            out.push(Barcode::new_unchecked(p.as_slice().to_vec(), g.clone()));
        }
    }
    sort_by_barcode(out)
}

pub fn sort_by_barcode(mut v: Vec<Barcode>) -> Vec<Barcode> {
    let mut keyed: Vec<(String, Barcode)> = v.drain(..).map(|b| (b.to_string(), b)).collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    keyed.into_iter().map(|(_, b)| b).collect()
}
