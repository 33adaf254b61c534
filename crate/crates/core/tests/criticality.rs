use std::collections::BTreeSet;

use treecells::criticality::{
    classify, d_crit, exists_bad_tree, find_counterterm, max_dim, source_target_witnesses, verify_counterterm, Height,
};
use treecells::faces::d_reg_mod2;
use treecells::fixtures::{bad_cells, criticality_marks};
use treecells::{Barcode, OperadTerm};

fn bc(s: &str) -> Barcode {
    s.parse().unwrap()
}

fn strings(v: &[OperadTerm]) -> BTreeSet<String> {
    v.iter().map(|t| t.to_string()).collect()
}

#[test]
fn critical_dimension_cases() {
    assert_eq!(d_crit(3, Height::Infinite), None);
    assert_eq!(d_crit(5, Height::Infinite), Some(5));
    assert_eq!(d_crit(5, Height::Finite(2)), None);
    assert_eq!(d_crit(4, Height::Finite(3)), Some(4));
    assert_eq!(d_crit(9, Height::Finite(1)), None);
    assert_eq!(d_crit(6, Height::Finite(2)), Some(6));
}

#[test]
fn limit_in_height() {
    for n in 2..=10 {
        assert_eq!(d_crit(n, Height::Finite(50)), d_crit(n, Height::Infinite));
    }
}

#[test]
fn regularity_cases() {
    for n in 2..=10 {
        for h in (1..=5).map(Height::Finite).chain([Height::Infinite]) {
            let c = classify(n, h).unwrap();
            let Height::Finite(hh) = h else {
                assert_eq!(c.regular, n <= 3);
                continue;
            };
            let expected = n <= 3 || (n <= 5 && hh <= 2) || hh == 1;
            assert_eq!(c.regular, expected, "n = {n}, h = {hh}");
            assert_eq!(c.regular, c.d_crit.is_none());
        }
    }
}

#[test]
fn witnesses_have_the_critical_dimension() {
    for n in 2..=10 {
        for h in (1..=5).map(Height::Finite).chain([Height::Infinite]) {
            let c = classify(n, h).unwrap();
            let Some(w) = c.witness else { continue };
            assert_eq!(Some(w.dim), c.d_crit);
            assert!(!w.certificate.is_empty());
            let reduced_h = w.barcode.height();
            if let Height::Finite(hh) = h {
                assert_eq!(reduced_h + w.suspensions, hh);
            }
        }
    }
    assert_eq!(classify(4, Height::Finite(3)).unwrap().witness.unwrap().barcode, bc("[1|2|||3|4]"));
    assert_eq!(classify(5, Height::Finite(4)).unwrap().witness.unwrap().barcode, bc("[1|2|||3|4|5]"));
    assert_eq!(classify(6, Height::Finite(2)).unwrap().witness.unwrap().barcode, bc("[1|2||3|4||5|6]"));
    assert_eq!(classify(8, Height::Finite(2)).unwrap().witness.unwrap().barcode, bc("[1|2||3|4||5|6|7|8]"));
    assert!(classify(5, Height::Finite(2)).unwrap().witness.is_none());
}

#[test]
fn source_target_examples() {
    let six = source_target_witnesses(&bc("[1|2||3|4||5|6]")).unwrap();
    assert_eq!(six.len(), 1);
    let d = &six[0];
    assert_eq!((d.size, d.level), (3, 1));
    assert_eq!((d.a.clone(), d.b.clone()), (vec![1, 3, 5], vec![2, 4, 6]));
    assert_eq!(d.amputated_gaps, vec![1, 1]);
    assert_eq!(d.element.to_string(), "[[1||3||5]|[2||4||6]]");
    assert_eq!(d.element.degree(), 6);

    let four = source_target_witnesses(&bc("[1|2|||3|4]")).unwrap();
    assert_eq!(four.len(), 1);
    assert_eq!((four[0].size, four[0].level), (2, 2));
    assert_eq!(four[0].amputated_gaps, vec![2]);
    assert_eq!(four[0].element.to_string(), "[[1|||3]|[2|||4]]");

    assert!(source_target_witnesses(&bc("[1|2||3]")).unwrap().is_empty());
}

#[test]
fn source_target_faces_are_faces() {
    for s in ["[1|2||3|4||5|6]", "[1|2|||3|4|5]", "[2|1||4|3||5|6|7]"] {
        for d in source_target_witnesses(&bc(s)).unwrap() {
            assert!(d.face.is_face());
            assert!(d.amputated_dim >= 1);
            let h = d.face.source.tree.height();
            for (&a, &b) in d.a.iter().zip(&d.b) {
                assert_eq!(d.face.maps[h][a - 1], 0);
                assert_eq!(d.face.maps[h][b - 1], 1);
            }
        }
    }
}

/// Cells in the two-sided cases of the proof carry no datum.
#[test]
fn shallow_trees_have_no_datum() {
    for n in 2..=7 {
        for d in 0..=8 {
            for g in treecells::level_trees::reduced_gap_sequences(Some(n), d) {
                let b = Barcode::unlabeled(&g);
                let h = b.height();
                let k1 = b.to_tree().tree.level_sizes()[1];
                if h == 1 || (h == 2 && k1 == 2) {
                    assert!(source_target_witnesses(&b).unwrap().is_empty(), "{b}");
                }
            }
        }
    }
}

#[test]
fn criticality_marks_follow_the_critical_dimension() {
    for m in criticality_marks() {
        for d in m.dims.clone() {
            assert!(d + 2 >= m.arity, "{m:?}");
            if let Height::Finite(h) = m.height {
                assert!(d <= max_dim(m.arity, h), "{m:?}");
            }
            let crit = d_crit(m.arity, m.height);
            assert_eq!(m.bad, crit.is_some_and(|c| d >= c), "arity {} dim {d}", m.arity);
        }
    }
}

#[test]
fn exhaustive_bad_tree_existence() {
    for (h, n_max) in [(Height::Infinite, 6), (Height::Finite(2), 7)] {
        for n in 2..=n_max {
            let top = match h {
                Height::Finite(hh) => max_dim(n, hh),
                Height::Infinite => 10,
            };
            for d in n.saturating_sub(2)..=top {
                let found = exists_bad_tree(n, d, h).unwrap();
                let crit = d_crit(n, h);
                if crit.is_none_or(|c| d < c) {
                    assert!(found.is_none(), "n = {n}, d = {d}: {found:?}");
                }
                if crit == Some(d) {
                    assert!(found.is_some(), "n = {n}, d = {d}");
                }
            }
        }
    }
}

#[test]
fn four_dimensional_cell() {
    let cells = bad_cells();
    let four = &cells["four"];
    let d_reg = d_reg_mod2(&four.cell).unwrap();
    let support: BTreeSet<String> = d_reg.keys().map(|t| t.to_string()).collect();
    let listed = strings(&four.lists["d_reg_listed"]);
    assert!(listed.is_subset(&support));
    let extra: BTreeSet<String> = support.difference(&listed).cloned().collect();
    let expected_extra: BTreeSet<String> = ["[1|[2|||3|4]]", "[3|[1|2|||4]]", "[[1|2|||3]|4]", "[[1|||3|4]|2]"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    assert_eq!(extra, expected_extra);

    let r = find_counterterm(&four.cell).unwrap();
    assert_eq!(r.d_reg_linear, 2);
    assert_eq!(r.intersection.iter().cloned().collect::<BTreeSet<_>>(), strings(&four.lists["intersection"]));
    assert!(r.verified);
    let found: BTreeSet<String> = r.counterterm.unwrap().into_iter().collect();
    assert!(found == strings(&four.lists["u1"]) || found == strings(&four.lists["u2"]));
    assert!(verify_counterterm(&four.cell, &four.lists["u1"]).unwrap());
    assert!(verify_counterterm(&four.cell, &four.lists["u2"]).unwrap());
    assert!(!verify_counterterm(&four.cell, &four.lists["u1"][..1]).unwrap());
}

/// The ten listed cells alone leave twenty unmatched terms in `∂∂`.
#[test]
fn listed_boundary_of_the_four_cell_is_not_closed() {
    use treecells::faces::Mod2Faces;
    use treecells::free_operad::apply_derivation;
    let cells = bad_cells();
    let four = &cells["four"];
    let mut s = treecells::F2Sum::new();
    for t in &four.lists["d_reg_listed"] {
        s.add(t.clone(), treecells::F2(true));
    }
    let dd = apply_derivation(&s, &Mod2Faces::default()).unwrap();
    assert_eq!(dd.len(), 26);
}

#[test]
fn six_dimensional_cell() {
    let cells = bad_cells();
    let six = &cells["six"];
    let st = source_target_witnesses(&six.cell).unwrap();
    assert_eq!(st[0].element, six.lists["c_nu"][0]);
    assert!(verify_counterterm(&six.cell, &six.lists["u1"]).unwrap());
    assert!(verify_counterterm(&six.cell, &six.lists["u2"]).unwrap());
    let r = find_counterterm(&six.cell).unwrap();
    assert!(r.verified);
    assert_eq!(r.counterterm.unwrap().len(), 6);
}

#[test]
fn counterterm_requires_the_critical_dimension() {
    assert!(find_counterterm(&bc("[1|2||3]")).is_err());
    assert!(find_counterterm(&bc("[1|2||3|4]")).is_err());
}

#[test]
fn height_parsing() {
    assert_eq!("inf".parse::<Height>().unwrap(), Height::Infinite);
    assert_eq!("3".parse::<Height>().unwrap(), Height::Finite(3));
    assert!("0".parse::<Height>().is_err());
}
