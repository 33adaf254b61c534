use treecells::bar_diff::{d_lin_bar, d_lin_merge, d_lin_squared, omega_decode, omega_encode};
use treecells::level_trees::enumerate_labeled;
use treecells::{Barcode, LinComb};

fn bc(s: &str) -> Barcode {
    s.parse().unwrap()
}

fn sum(pairs: &[(&str, i64)]) -> LinComb<Barcode, i64> {
    let mut out = LinComb::new();
    for (s, c) in pairs {
        out.add(bc(s), *c);
    }
    out
}

#[test]
fn quoted_linear_formulas() {
    let cases: Vec<(&str, Vec<(&str, i64)>)> = vec![
        ("[1|2||3]", vec![("[1|2|3]", 1), ("[1|3|2]", -1), ("[3|1|2]", 1)]),
        ("[1|2|||3]", vec![("[1|2||3]", 1), ("[3||1|2]", -1)]),
        ("[1|2]", vec![]),
        ("[1||2]", vec![("[1|2]", 1), ("[2|1]", -1)]),
        ("[1||2|3]", vec![("[1|2|3]", 1), ("[2|1|3]", -1), ("[2|3|1]", 1)]),
        ("[1|||2]", vec![("[1||2]", 1), ("[2||1]", 1)]),
        (
            "[1||2||3]",
            vec![("[1|2||3]", 1), ("[2|1||3]", -1), ("[1||2|3]", -1), ("[1||3|2]", 1)],
        ),
    ];
    for (t, expected) in cases {
        assert_eq!(d_lin_bar::<i64>(&bc(t)), sum(&expected), "bar route on {t}");
        assert_eq!(d_lin_merge::<i64>(&bc(t)), sum(&expected), "merge route on {t}");
    }
}

#[test]
fn regression_equal_boundaries() {
    assert_eq!(d_lin_bar::<i64>(&bc("[1|2||3]")), d_lin_bar::<i64>(&bc("[3||1|2]")));
}

#[test]
fn routes_agree_small() {
    for n in 2..=4 {
        for d in 0..=5 {
            for t in enumerate_labeled(n, d, usize::MAX) {
                assert_eq!(d_lin_bar::<i64>(&t), d_lin_merge::<i64>(&t), "{t}");
            }
        }
    }
}

#[test]
fn square_zero_small() {
    for n in 2..=4 {
        for d in 0..=6 {
            for t in enumerate_labeled(n, d, usize::MAX) {
                assert!(d_lin_squared(&t).is_empty(), "{t}");
            }
        }
    }
}

#[test]
fn omega_examples() {
    let (neg, w) = omega_encode(&bc("[1|2|3]"));
    assert!(!neg);
    assert_eq!(w.to_string(), "(↑x1⊗↑x2⊗↑x3)");
    let (neg, w) = omega_encode(&bc("[1||2|3]"));
    assert!(!neg);
    assert_eq!(w.to_string(), "(↑(↑x1)⊗↑(↑x2⊗↑x3))");
    for d in 0..=4 {
        for t in enumerate_labeled(4, d, usize::MAX) {
            let (s1, w) = omega_encode(&t);
            let (s2, back) = omega_decode(&w, t.height()).unwrap();
            assert_eq!(back, t);
            assert_eq!(s1, s2);
        }
    }
}
