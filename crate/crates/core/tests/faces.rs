use std::collections::BTreeSet;

use proptest::prelude::*;
use treecells::bar_diff::d_lin_bar;
use treecells::faces::{codim_one_faces, d_reg_mod2, enumerate_faces, face_multiplicities, solve_signs, TreeMorphism};
use treecells::fixtures::{differentials, anchor_differentials, FixtureKind};
use treecells::free_operad::{derivation, linear_part};
use treecells::level_trees::{enumerate_labeled, reduced_gap_sequences};
use treecells::{Barcode, LevelTree, OperadTerm};

fn bc(s: &str) -> Barcode {
    s.parse().unwrap()
}

fn term(s: &str) -> OperadTerm {
    s.parse().unwrap()
}

/// Every pruned tree of height `h` with at most `max_tips` tips.
fn pruned_trees(h: usize, max_tips: usize) -> Vec<LevelTree> {
    fn grow(h: usize, max_tips: usize, sizes: Vec<usize>, parents: Vec<Vec<usize>>, out: &mut Vec<LevelTree>) {
        let m = sizes.len() - 1;
        if m == h {
            out.push(LevelTree::new(h, sizes, parents).unwrap());
            return;
        }
        let prev = sizes[m];
        for next in prev..=max_tips {
            // monotone surjections [next] -> [prev]
            for cuts in combinations(next - 1, prev - 1) {
                let mut pm = Vec::with_capacity(next);
                let mut p = 0;
                for i in 0..next {
                    if i > 0 && cuts.contains(&(i - 1)) {
                        p += 1;
                    }
                    pm.push(p);
                }
                let mut s = sizes.clone();
                s.push(next);
                let mut ps = parents.clone();
                ps.push(pm);
                grow(h, max_tips, s, ps, out);
            }
        }
    }
    let mut out = Vec::new();
    grow(h, max_tips, vec![1], Vec::new(), &mut out);
    out
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = combinations(n - 1, k);
    for mut c in combinations(n - 1, k - 1) {
        c.push(n - 1);
        out.push(c);
    }
    out
}

fn all_maps(k: usize, s: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out.into_iter().flat_map(|v| (0..s).map(move |x| [v.clone(), vec![x]].concat())).collect();
    }
    out
}

/// Faces by trying every tower of maps into every pruned target.
fn brute_force_elements(b: &Barcode) -> Vec<String> {
    let lt = b.to_tree();
    let h = lt.tree.height();
    let mut out = Vec::new();
    for s in pruned_trees(h, lt.tree.tips()) {
        let mut towers: Vec<Vec<Vec<usize>>> = vec![vec![]];
        for m in 0..=h {
            let choices = all_maps(lt.tree.level_sizes()[m], s.level_sizes()[m]);
            towers = towers
                .into_iter()
                .flat_map(|t| choices.iter().map(move |c| [t.clone(), vec![c.clone()]].concat()))
                .collect();
        }
        for maps in towers {
            let f = TreeMorphism { source: lt.clone(), target: s.clone(), maps };
            if f.is_face() {
                out.push(f.fiber_element().to_string());
            }
        }
    }
    out.sort();
    out
}

#[test]
fn faces_match_brute_force() {
    for b in ["[1|2||3]", "[1||2|3]", "[1|2|||3]", "[1||2||3]", "[1|2|3|4]", "[1|2||3|4]", "[2|1||3]"] {
        let b = bc(b);
        let mut ours: Vec<String> = enumerate_faces(&b).unwrap().iter().map(|f| f.element.to_string()).collect();
        ours.sort();
        assert_eq!(ours, brute_force_elements(&b), "{b}");
    }
}

#[test]
fn fiber_diagrams_of_the_small_tree() {
    let faces = enumerate_faces(&bc("[1|2||3]")).unwrap();
    let find = |s: &str| faces.iter().find(|f| f.element == term(s)).unwrap_or_else(|| panic!("{s}"));
    // clusters {2,3}, {1,2} at two levels, and a reordering of tips
    assert_eq!(find("[1|[2||3]]").degree, 1);
    assert_eq!(find("[[1|2]|3]").degree, 0);
    let q = find("[1|3|2]");
    assert_eq!(q.degree, 1);
    assert!(q.quasibijection);
    assert_eq!(find("[[1|2]||3]").degree, 1);
    // the identity and the collapse onto a single tip
    assert_eq!(faces.iter().filter(|f| f.top).count(), 2);
}

#[test]
fn codim_one_support_small_tree() {
    let got: BTreeSet<String> = d_reg_mod2(&bc("[1|2||3]")).unwrap().keys().map(|t| t.to_string()).collect();
    let want: BTreeSet<String> = ["[1|2|3]", "[1|3|2]", "[3|1|2]", "[[1|2]||3]", "[1|[2||3]]", "[[1||3]|2]"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    assert_eq!(got, want);
}

#[test]
fn no_repeated_codim_one_elements() {
    for n in 2..=5 {
        for d in 0..=5 {
            for g in reduced_gap_sequences(Some(n), d).into_iter().filter(|g| g.iter().all(|&x| x <= 5)) {
                let b = Barcode::unlabeled(&g);
                let faces = codim_one_faces(&b).unwrap();
                assert!(face_multiplicities(&faces).is_empty(), "{b}");
            }
        }
    }
}

#[test]
fn signed_differential_matches_fixtures() {
    let table = solve_signs(5, 4, &anchor_differentials()).unwrap();
    for f in differentials() {
        let got = table.d_reg_signed(&f.generator).unwrap();
        match f.kind {
            FixtureKind::Linear => assert_eq!(linear_part(&got), f.boundary, "{}", f.generator),
            FixtureKind::Full | FixtureKind::Corrected => assert_eq!(got, f.boundary, "{}", f.generator),
            FixtureKind::Reference => assert_ne!(got, f.boundary, "{}", f.generator),
        }
    }
    assert_eq!(table.conflicts.len(), 1);
    let c = &table.conflicts[0];
    assert_eq!((c.generator.as_str(), c.term.as_str()), ("[1||2||3]", "[1||[2||3]]"));
    assert_eq!((c.fixture_sign, c.forced_sign), (1, -1));
}

#[test]
fn signed_square_zero_on_labeled_generators() {
    let table = solve_signs(5, 4, &anchor_differentials()).unwrap();
    for (n, dmax) in [(2, 4), (3, 4), (4, 3), (5, 4)] {
        for d in 0..=dmax {
            for b in enumerate_labeled(n, d, usize::MAX) {
                let t = OperadTerm::generator(&b);
                let dt = derivation(&t, &table).unwrap();
                let mut dd = treecells::ZSum::new();
                for (x, c) in dt.iter() {
                    dd.add_scaled(&derivation(x, &table).unwrap(), c);
                }
                assert!(dd.is_empty(), "{b}");
                // the linear part is the bar-route differential
                let lin = linear_part(&dt);
                let bar = d_lin_bar::<i64>(&b).map_keys(OperadTerm::generator);
                assert_eq!(lin, bar, "{b}");
            }
        }
    }
}

fn reduced_tree() -> impl Strategy<Value = Barcode> {
    (2usize..=5, 0usize..=4)
        .prop_flat_map(|(n, d)| {
            let seqs = reduced_gap_sequences(Some(n), d.max(n - 2));
            let k = seqs.len();
            (Just(seqs), 0..k, Just(n))
        })
        .prop_flat_map(|(seqs, i, n)| {
            let g = seqs[i].clone();
            (Just(g), shuffled_labels(n))
        })
        .prop_map(|(g, labels)| Barcode::new(labels, g).unwrap())
}

fn shuffled_labels(n: usize) -> impl Strategy<Value = Vec<u16>> {
    Just((1..=n as u16).collect::<Vec<_>>()).prop_shuffle()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn faces_are_faces(b in reduced_tree()) {
        let faces = enumerate_faces(&b).unwrap();
        let dim = b.dim();
        let mut seen = BTreeSet::new();
        for f in &faces {
            prop_assert!(f.morphism.is_face());
            prop_assert!(f.degree <= dim);
            prop_assert_eq!(f.element.arity(), b.arity());
            let key = format!("{:?}{:?}", f.morphism.target, f.morphism.maps);
            prop_assert!(seen.insert(key));
        }
        prop_assert_eq!(faces.iter().filter(|f| f.top).count(), 2);
    }

    #[test]
    fn faces_are_equivariant(b in reduced_tree()) {
        let id = Barcode::unlabeled(&b.gaps);
        let sigma = b.labels_perm();
        let ours: BTreeSet<String> = enumerate_faces(&b).unwrap().iter().map(|f| f.element.to_string()).collect();
        let moved: BTreeSet<String> = enumerate_faces(&id).unwrap().iter()
            .map(|f| f.element.act(&sigma).unwrap().to_string()).collect();
        prop_assert_eq!(ours, moved);
    }
}
