//! The acceptance suite, one function per criterion. Each returns a list
//! of named checks; reports carry no timings so that two runs serialize
//! byte-identically.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bar_diff::{d_lin_bar, d_lin_merge, d_lin_squared};
use crate::criticality::{
    classify, d_crit, exists_bad_tree, find_counterterm, max_dim, source_target_witnesses, verify_counterterm,
    Height,
};
use crate::exact_homology::{build_G_complex, homology_reports, poincare_ranks};
use crate::faces::{d_reg_mod2, solve_signs, Mod2Faces};
use crate::fixtures::{bad_cells, differentials, anchor_differentials, criticality_marks, reduced_trees, FixtureKind};
use crate::free_lie::{
    basis_indices, expand_left_normed, lie_coordinates, psi_exchanges_unshuffles, ree_test, span_coordinates,
    ush_quotient_report, TensorElement,
};
use crate::free_operad::{apply_derivation, derivation, linear_part, OperadTerm};
use crate::level_trees::{enumerate_labeled, enumerate_reduced};
use crate::perm::Perm;
use crate::{Barcode, Result, ZSum, F2, F2Sum};

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    pub criterion: usize,
    pub title: String,
    pub pass: bool,
    pub checks: Vec<Check>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl CriterionReport {
    /// `criterion N PASS title` followed by the failing checks, if any.
    pub fn line(&self) -> String {
        let mut s = format!(
            "criterion {} {} {}",
            self.criterion,
            if self.pass { "PASS" } else { "FAIL" },
            self.title
        );
        for c in self.checks.iter().filter(|c| !c.pass) {
            s.push_str(&format!("; {}: {}", c.name, c.detail));
        }
        s
    }
}

struct Builder {
    checks: Vec<Check>,
}

impl Builder {
    fn new() -> Self {
        Builder { checks: Vec::new() }
    }

    fn check(&mut self, name: &str, pass: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), pass, detail: detail.into() });
    }

    fn result(&mut self, name: &str, r: Result<(bool, String)>) {
        match r {
            Ok((pass, detail)) => self.check(name, pass, detail),
            Err(e) => self.check(name, false, format!("error: {e}")),
        }
    }
}

pub const CRITERIA: [(usize, &str); 7] = [
    (1, "enumeration counts"),
    (2, "linear differential"),
    (3, "full differential on the regular range"),
    (4, "criticality table"),
    (5, "bad-cell case studies"),
    (6, "homology"),
    (7, "free Lie algebra over Z"),
];

pub fn run(criterion: usize) -> CriterionReport {
    let start = Instant::now();
    let mut b = Builder::new();
    match criterion {
        1 => enumeration(&mut b),
        2 => linear(&mut b),
        3 => full(&mut b),
        4 => criticality(&mut b),
        5 => bad_cell_studies(&mut b),
        6 => homology(&mut b),
        7 => free_lie(&mut b),
        _ => b.check("criterion", false, format!("no criterion {criterion}")),
    }
    let title = CRITERIA.iter().find(|c| c.0 == criterion).map_or("unknown", |c| c.1);
    CriterionReport {
        criterion,
        title: title.to_string(),
        pass: !b.checks.is_empty() && b.checks.iter().all(|c| c.pass),
        checks: b.checks,
        elapsed: start.elapsed(),
    }
}

pub fn run_all() -> Vec<CriterionReport> {
    CRITERIA.iter().map(|&(i, _)| run(i)).collect()
}

fn enumeration(b: &mut Builder) {
    let counts: Vec<usize> = (0..=8).map(|d| enumerate_reduced(None, d).len()).collect();
    let ok = counts.iter().enumerate().all(|(d, &c)| c == 1 << d);
    b.check("2^d reduced trees, d = 0..8", ok, format!("{counts:?}"));
    let reference = reduced_trees();
    for (d, expected) in reference.iter().enumerate() {
        let ours: BTreeSet<String> =
            enumerate_reduced(None, d).iter().map(|t| Barcode::unlabeled(&t.tip_gaps()).to_string()).collect();
        let want: BTreeSet<String> = expected.iter().map(|x| x.to_string()).collect();
        let missing: Vec<&String> = want.difference(&ours).collect();
        let extra: Vec<&String> = ours.difference(&want).collect();
        b.check(
            &format!("reference list d = {d}"),
            missing.is_empty() && extra.is_empty() && want.len() == expected.len(),
            format!("{} trees, missing {missing:?}, extra {extra:?}", ours.len()),
        );
    }
}

fn linear(b: &mut Builder) {
    for f in differentials().into_iter().filter(|f| f.kind == FixtureKind::Linear) {
        let got = d_lin_bar::<i64>(&f.generator).map_keys(OperadTerm::generator);
        b.check(&format!("formula {}", f.generator), got == f.boundary, format!("{got}"));
    }
    let mut count = 0;
    let mut bad = Vec::new();
    for n in 2..=6 {
        for d in n - 2..=8 {
            for t in enumerate_labeled(n, d, usize::MAX) {
                count += 1;
                if !d_lin_squared(&t).is_empty() {
                    bad.push(t.to_string());
                }
            }
        }
    }
    b.check("square zero, n ≤ 6, dim ≤ 8", bad.is_empty(), format!("{count} generators, failures {bad:?}"));
    let mut count = 0;
    let mut bad = Vec::new();
    for n in 2..=5 {
        for d in n - 2..=6 {
            for t in enumerate_labeled(n, d, usize::MAX) {
                count += 1;
                if d_lin_bar::<i64>(&t) != d_lin_merge::<i64>(&t) {
                    bad.push(t.to_string());
                }
            }
        }
    }
    b.check("bar and merge routes agree, n ≤ 5, dim ≤ 6", bad.is_empty(), format!("{count} generators, failures {bad:?}"));
}

fn full(b: &mut Builder) {
    let table = match solve_signs(5, 4, &anchor_differentials()) {
        Ok(t) => t,
        Err(e) => return b.check("sign solver", false, format!("error: {e}")),
    };
    b.check("sign solver", true, format!("{} generators", table.entries.len()));
    for f in differentials() {
        let got = match table.d_reg_signed(&f.generator) {
            Ok(g) => g,
            Err(e) => {
                b.check(&format!("{}", f.generator), false, format!("error: {e}"));
                continue;
            }
        };
        match f.kind {
            FixtureKind::Full | FixtureKind::Reference => {
                let ok = got == f.boundary;
                let detail = if ok {
                    "matches".to_string()
                } else {
                    let conflicts: Vec<String> = table
                        .conflicts
                        .iter()
                        .filter(|c| c.generator == f.generator.to_string())
                        .map(|c| {
                            format!(
                                "term {} recorded with sign {:+}, d∘d = 0 forces {:+}",
                                c.term, c.fixture_sign, c.forced_sign
                            )
                        })
                        .collect();
                    format!("got {got}; {}", conflicts.join(", "))
                };
                b.check(&format!("reference formula {}", f.generator), ok, detail);
            }
            FixtureKind::Corrected => {
                b.check(&format!("corrected formula {}", f.generator), got == f.boundary, format!("{got}"));
            }
            FixtureKind::Linear => {
                let ok = linear_part(&got) == f.boundary;
                b.check(&format!("linear part {}", f.generator), ok, format!("{}", linear_part(&got)));
            }
        }
    }
    let mut count = 0;
    let mut bad = Vec::new();
    for (n, dmax) in [(2, 3), (3, 3), (4, 3), (5, 4)] {
        for d in 0..=dmax {
            for t in enumerate_labeled(n, d, usize::MAX) {
                count += 1;
                let ok = derivation(&OperadTerm::generator(&t), &table)
                    .and_then(|dt| {
                        let mut dd = ZSum::new();
                        for (x, c) in dt.iter() {
                            dd.add_scaled(&derivation(x, &table)?, c);
                        }
                        Ok(dd.is_empty())
                    })
                    .unwrap_or(false);
                if !ok {
                    bad.push(t.to_string());
                }
            }
        }
    }
    b.check("d∘d = 0 on regular generators", bad.is_empty(), format!("{count} generators, failures {bad:?}"));
}

fn criticality(b: &mut Builder) {
    let heights: Vec<Height> = (1..=5).map(Height::Finite).chain([Height::Infinite]).collect();
    let mut wrong = Vec::new();
    let mut witnesses = 0;
    let mut bad_witness = Vec::new();
    for n in 2..=10 {
        for &h in &heights {
            let expected_regular = match h {
                Height::Infinite => n <= 3,
                Height::Finite(h) => n <= 3 || (n <= 5 && h <= 2) || h == 1,
            };
            let c = match classify(n, h) {
                Ok(c) => c,
                Err(e) => {
                    wrong.push(format!("({n}, {h}): {e}"));
                    continue;
                }
            };
            if c.regular != expected_regular {
                wrong.push(format!("({n}, {h})"));
            }
            if !c.regular {
                match &c.witness {
                    Some(w) if Some(w.dim) == c.d_crit && !w.certificate.is_empty() => witnesses += 1,
                    _ => bad_witness.push(format!("({n}, {h})")),
                }
            }
        }
    }
    b.check("regularity for n ≤ 10, h ≤ 5 and h = ∞", wrong.is_empty(), format!("mismatches {wrong:?}"));
    b.check(
        "witnesses at the critical dimension",
        bad_witness.is_empty(),
        format!("{witnesses} witnesses with certificates, failures {bad_witness:?}"),
    );
    let mut marks = 0;
    let mut wrong = Vec::new();
    for m in criticality_marks() {
        for d in m.dims.clone() {
            marks += 1;
            let predicted = d_crit(m.arity, m.height).is_some_and(|c| d >= c);
            if predicted != m.bad {
                wrong.push(format!("({}, {d})", m.arity));
            }
        }
    }
    b.check("plotted marks", wrong.is_empty(), format!("{marks} plotted pairs, mismatches {wrong:?}"));
    // exhaustive confirmation where the search is cheap
    let mut searched = 0;
    let mut wrong = Vec::new();
    for (h, n_max) in [(Height::Infinite, 6), (Height::Finite(2), 7)] {
        for n in 2..=n_max {
            let top = match h {
                Height::Finite(hh) => max_dim(n, hh).min(n + 1),
                Height::Infinite => n + 1,
            };
            for d in n.saturating_sub(2)..=top {
                let crit = d_crit(n, h);
                if crit.is_some_and(|c| d > c) {
                    continue;
                }
                searched += 1;
                match exists_bad_tree(n, d, h) {
                    Ok(found) => {
                        if found.is_some() != (crit == Some(d)) {
                            wrong.push(format!("{h}: ({n}, {d})"));
                        }
                    }
                    Err(e) => wrong.push(format!("{h}: ({n}, {d}): {e}")),
                }
            }
        }
    }
    b.check(
        "exhaustive search below and at the critical dimension",
        wrong.is_empty(),
        format!("{searched} (arity, dimension) pairs, mismatches {wrong:?}"),
    );
}

fn strings(v: &[OperadTerm]) -> BTreeSet<String> {
    v.iter().map(|t| t.to_string()).collect()
}

fn bad_cell_studies(b: &mut Builder) {
    let cells = bad_cells();
    let four = &cells["four"];
    let six = &cells["six"];
    b.result(
        "4-cell: boundary support of 2 linear + 8 decomposable terms",
        find_counterterm(&four.cell).map(|r| {
            let listed = strings(&four.lists["d_reg_listed"]);
            let ours: BTreeSet<String> = r.d_reg.iter().cloned().collect();
            let extra: Vec<&String> = ours.difference(&listed).collect();
            let ok = r.d_reg_linear == 2 && r.d_reg_decomposable == 8;
            (
                ok,
                format!(
                    "found {} linear + {} decomposable; the listed ten are all present, plus {extra:?}, \
                     which are codimension-one faces as well",
                    r.d_reg_linear, r.d_reg_decomposable
                ),
            )
        }),
    );
    b.result(
        "4-cell: the listed ten terms alone are not closed",
        (|| {
            let mut s = F2Sum::new();
            for t in &four.lists["d_reg_listed"] {
                s.add(t.clone(), F2(true));
            }
            let dd = apply_derivation(&s, &Mod2Faces::default())?;
            let full = apply_derivation(&d_reg_mod2(&four.cell)?, &Mod2Faces::default())?;
            Ok((
                dd.len() > full.len(),
                format!("{} terms in their boundary against {} for the full support", dd.len(), full.len()),
            ))
        })(),
    );
    b.result(
        "4-cell: boundary of the boundary",
        find_counterterm(&four.cell).map(|r| {
            let ours: BTreeSet<String> = r.intersection.iter().cloned().collect();
            let want = strings(&four.lists["intersection"]);
            (ours == want, format!("{} cells", ours.len()))
        }),
    );
    for list in ["u1", "u2"] {
        b.result(
            &format!("4-cell: counterterm {list}"),
            verify_counterterm(&four.cell, &four.lists[list]).map(|ok| (ok, format!("{} terms", four.lists[list].len()))),
        );
    }
    b.result(
        "6-cell: source-target element",
        source_target_witnesses(&six.cell).map(|st| {
            let found = st.iter().any(|d| d.element == six.lists["c_nu"][0] && d.element.degree() == six.cell.dim());
            (found && six.cell.dim() == 6, format!("{} data, degree {}", st.len(), six.cell.dim()))
        }),
    );
    for list in ["u1", "u2"] {
        b.result(
            &format!("6-cell: counterterm {list}"),
            verify_counterterm(&six.cell, &six.lists[list]).map(|ok| (ok, format!("{} terms", six.lists[list].len()))),
        );
    }
}

fn homology(b: &mut Builder) {
    for (n, d_max) in [(2, 4), (3, 5), (4, 6), (5, 7)] {
        let fact: usize = (1..n).product();
        b.result(
            &format!("G({n}) up to degree {d_max}"),
            build_G_complex(n, Height::Infinite, d_max).and_then(|c| homology_reports(&c)).map(|reports| {
                let ok = reports.iter().all(|r| {
                    r.torsion.is_empty() && r.rank == if r.degree == n - 2 { fact } else { 0 }
                });
                let ranks: Vec<usize> = reports.iter().map(|r| r.rank).collect();
                (ok, format!("ranks {ranks:?}"))
            }),
        );
    }
    for n in 2..=5 {
        for h in 1..=3 {
            b.result(
                &format!("G^{h}({n})"),
                build_G_complex(n, Height::Finite(h), max_dim(n, h)).and_then(|c| homology_reports(&c)).map(
                    |reports| {
                        let expected = poincare_ranks(n, h);
                        let ok = reports.iter().all(|r| {
                            let want = if h == 1 {
                                if r.degree == n - 2 { (1..=n as u64).product() } else { 0 }
                            } else {
                                expected.get(&r.degree).copied().unwrap_or(0)
                            };
                            r.torsion.is_empty() && r.rank as u64 == want
                        });
                        let ranks: Vec<(usize, usize)> =
                            reports.iter().filter(|r| r.rank > 0).map(|r| (r.degree, r.rank)).collect();
                        (ok, format!("nonzero ranks {ranks:?}"))
                    },
                ),
            );
        }
    }
}

/// A random integer combination of brackets, sometimes perturbed off the span.
pub fn random_tensor(rng: &mut ChaCha8Rng, n: usize) -> TensorElement {
    let mut f = TensorElement::new();
    for l in basis_indices(n) {
        if rng.gen_bool(0.5) {
            f.add_scaled(&expand_left_normed(&l), &rng.gen_range(-3..=3));
        }
    }
    let words = Perm::all(n);
    match rng.gen_range(0..3) {
        0 => {}
        1 => f.add(words[rng.gen_range(0..words.len())].clone(), rng.gen_range(-2..=2)),
        _ => {
            let mut g = TensorElement::new();
            g.add_scaled(&f, &2);
            g.add(words[rng.gen_range(0..words.len())].clone(), 1);
            f = g;
        }
    }
    f
}

fn free_lie(b: &mut Builder) {
    let words = Perm::all(3);
    let mut disagree = 0;
    let mut members = 0;
    for code in 0..3usize.pow(6) {
        let mut f = TensorElement::new();
        let mut c = code;
        for w in &words {
            f.add(w.clone(), (c % 3) as i64 - 1);
            c /= 3;
        }
        let oracle = span_coordinates(&f, 3);
        members += usize::from(oracle.is_some());
        if ree_test(&f, 3) != oracle.is_some() || lie_coordinates(&f, 3) != oracle {
            disagree += 1;
        }
    }
    b.check("exhaustive n = 3", disagree == 0, format!("729 vectors, {members} Lie, {disagree} disagreements"));
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut disagree = 0;
    let mut members = 0;
    let trials = 240;
    for t in 0..trials {
        let n = 2 + t % 4;
        let f = random_tensor(&mut rng, n);
        let oracle = span_coordinates(&f, n);
        members += usize::from(oracle.is_some());
        if ree_test(&f, n) != oracle.is_some() || lie_coordinates(&f, n) != oracle {
            disagree += 1;
        }
    }
    b.check(
        "randomized n ≤ 5",
        disagree == 0,
        format!("{trials} trials, {members} Lie, {disagree} disagreements"),
    );
    for n in 2..=6 {
        for signed in [false, true] {
            let name = format!("unshuffle quotient n = {n}{}", if signed { ", signed" } else { "" });
            b.result(
                &name,
                ush_quotient_report(n, signed).map(|r| {
                    let fact: usize = (1..n).product();
                    let det_ok = n > 5 || r.pairing_det == 1.into() || r.pairing_det == (-1).into();
                    let ok = r.torsion_free && r.quotient_rank == fact && r.basis_extends && r.orthogonal && det_ok;
                    (
                        ok,
                        format!(
                            "rank {}, quotient {}, torsion free {}, pairing det {}",
                            r.ush_rank, r.quotient_rank, r.torsion_free, r.pairing_det
                        ),
                    )
                }),
            );
        }
    }
    let ok: Vec<usize> = (2..=6).filter(|&n| !psi_exchanges_unshuffles(n)).collect();
    b.check("sign twist exchanges signed and plain unshuffles", ok.is_empty(), format!("failures {ok:?}"));
}
