//! Reference data shipped with the crate, parsed from `fixtures/`.

use std::collections::BTreeMap;

use crate::criticality::Height;
use crate::free_operad::{parse_sum, FormalSum, OperadTerm};
use crate::level_trees::Barcode;

const DIFFERENTIALS: &str = include_str!("../fixtures/differentials.txt");
const REDUCED_TREES: &str = include_str!("../fixtures/reduced_trees.txt");
const BAD_CELLS: &str = include_str!("../fixtures/bad_cells.txt");
const MARKS: &str = include_str!("../fixtures/criticality_marks.txt");

fn lines(src: &str) -> impl Iterator<Item = &str> {
    src.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FixtureKind {
    Linear,
    Full,
    Reference,
    Corrected,
}

#[derive(Clone, Debug)]
pub struct DifferentialFixture {
    pub kind: FixtureKind,
    pub generator: Barcode,
    pub boundary: FormalSum<i64>,
}

pub fn differentials() -> Vec<DifferentialFixture> {
    lines(DIFFERENTIALS)
        .map(|l| {
            let (head, rhs) = l.split_once('=').expect("fixture line has '='");
            let (kind, gen) = head.trim().split_once(' ').expect("fixture line has a kind");
            let kind = match kind {
                "linear" => FixtureKind::Linear,
                "full" => FixtureKind::Full,
                "reference" => FixtureKind::Reference,
                "corrected" => FixtureKind::Corrected,
                k => panic!("unknown fixture kind {k}"),
            };
            DifferentialFixture {
                kind,
                generator: gen.trim().parse().expect("fixture generator"),
                boundary: parse_sum(rhs).expect("fixture sum"),
            }
        })
        .collect()
}

/// The full and reference differentials, which anchor the sign solver.
pub fn anchor_differentials() -> BTreeMap<Barcode, FormalSum<i64>> {
    differentials()
        .into_iter()
        .filter(|f| matches!(f.kind, FixtureKind::Full | FixtureKind::Reference))
        .map(|f| (f.generator, f.boundary))
        .collect()
}

/// Reduced unlabeled trees of dimension `d` for `d = 0..=3`.
pub fn reduced_trees() -> Vec<Vec<Barcode>> {
    lines(REDUCED_TREES)
        .map(|l| {
            let (_, rest) = l.split_once(':').expect("dimension prefix");
            rest.split_whitespace().map(|b| b.parse().expect("barcode")).collect()
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct BadCellLists {
    pub cell: Barcode,
    pub lists: BTreeMap<String, Vec<OperadTerm>>,
}

/// Keyed by the short cell name (`four`, `six`).
pub fn bad_cells() -> BTreeMap<String, BadCellLists> {
    let mut out: BTreeMap<String, BadCellLists> = BTreeMap::new();
    for l in lines(BAD_CELLS) {
        if let Some((name, cell)) = l.split_once("-cell ") {
            out.insert(
                name.to_string(),
                BadCellLists { cell: cell.trim().parse().expect("cell"), lists: BTreeMap::new() },
            );
            continue;
        }
        let (head, rhs) = l.split_once('=').expect("list line has '='");
        let (name, list) = head.trim().split_once(' ').expect("cell and list names");
        let terms = rhs.split_whitespace().map(|t| t.parse().expect("term")).collect();
        out.get_mut(name).expect("cell declared first").lists.insert(list.to_string(), terms);
    }
    out
}

#[derive(Clone, Debug)]
pub struct CriticalityMark {
    pub height: Height,
    pub bad: bool,
    pub arity: usize,
    pub dims: std::ops::RangeInclusive<usize>,
}

pub fn criticality_marks() -> Vec<CriticalityMark> {
    lines(MARKS)
        .map(|l| {
            let f: Vec<&str> = l.split_whitespace().collect();
            let height = match f[0] {
                "F" => Height::Infinite,
                "F2" => Height::Finite(2),
                c => panic!("unknown complex {c}"),
            };
            let (a, b) = f[3].split_once('-').expect("dimension range");
            CriticalityMark {
                height,
                bad: f[1] == "bad",
                arity: f[2].parse().expect("arity"),
                dims: a.parse().expect("dim")..=b.parse().expect("dim"),
            }
        })
        .collect()
}
