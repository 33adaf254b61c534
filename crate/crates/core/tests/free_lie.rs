use num_traits::Signed;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use treecells::free_lie::{
    basis_indices, expand_left_normed, lie_coordinates, parse_tensor, psi_exchanges_unshuffles, ree_test,
    span_coordinates, ush_quotient_report, TensorElement,
};
use treecells::Perm;

fn p(v: &[u16]) -> Perm {
    Perm::new(v.to_vec()).unwrap()
}

#[test]
fn small_expansions() {
    assert_eq!(expand_left_normed(&p(&[1])), parse_tensor("(1,2) -(2,1)").unwrap());
    assert_eq!(expand_left_normed(&p(&[1, 2])), parse_tensor("(1,2,3) -(1,3,2) -(2,3,1) +(3,2,1)").unwrap());
}

#[test]
fn leading_word_has_coefficient_one() {
    for n in 2..=5 {
        for l in basis_indices(n) {
            let b = expand_left_normed(&l);
            let mut w = l.as_slice().to_vec();
            w.push(n as u16);
            assert_eq!(b.get(&p(&w)), 1);
            assert_eq!(b.len(), 1 << (n - 1));
            // no other basis element contains this word
            for m in basis_indices(n) {
                if m != l {
                    assert_eq!(expand_left_normed(&m).get(&p(&w)), 0);
                }
            }
        }
    }
}

#[test]
fn ree_examples() {
    assert!(ree_test(&parse_tensor("(1,2) -(2,1)").unwrap(), 2));
    assert!(!ree_test(&parse_tensor("(1,2)").unwrap(), 2));
    for n in 2..=5 {
        for l in basis_indices(n) {
            assert!(ree_test(&expand_left_normed(&l), n));
        }
    }
}

#[test]
fn coordinates() {
    let mut f = TensorElement::new();
    f.add_scaled(&expand_left_normed(&p(&[1, 2])), &3);
    f.add_scaled(&expand_left_normed(&p(&[2, 1])), &-2);
    let c = lie_coordinates(&f, 3).unwrap();
    assert_eq!(c[&p(&[1, 2])], 3);
    assert_eq!(c[&p(&[2, 1])], -2);
    assert_eq!(span_coordinates(&f, 3).unwrap(), c);
    assert!(lie_coordinates(&parse_tensor("(1,2,3)").unwrap(), 3).is_none());
}

/// Every vector with entries in {-1, 0, 1} on the six words of length 3.
#[test]
fn exhaustive_arity_three() {
    let words = Perm::all(3);
    for code in 0..3usize.pow(6) {
        let mut f = TensorElement::new();
        let mut c = code;
        for w in &words {
            f.add(w.clone(), (c % 3) as i64 - 1);
            c /= 3;
        }
        let oracle = span_coordinates(&f, 3);
        assert_eq!(ree_test(&f, 3), oracle.is_some(), "{f}");
        assert_eq!(lie_coordinates(&f, 3), oracle, "{f}");
    }
}

fn random_element(rng: &mut ChaCha8Rng, n: usize) -> TensorElement {
    let mut f = TensorElement::new();
    for l in basis_indices(n) {
        if rng.gen_bool(0.5) {
            f.add_scaled(&expand_left_normed(&l), &rng.gen_range(-3..=3));
        }
    }
    match rng.gen_range(0..3) {
        0 => {}
        1 => {
            let words = Perm::all(n);
            let w = words[rng.gen_range(0..words.len())].clone();
            f.add(w, rng.gen_range(-2..=2));
        }
        _ => {
            // divisible by 2 after a perturbation that is itself Lie or not
            let g = f.clone();
            f = TensorElement::new();
            f.add_scaled(&g, &2);
            let words = Perm::all(n);
            f.add(words[rng.gen_range(0..words.len())].clone(), 1);
        }
    }
    f
}

#[test]
fn randomized_agreement() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut members = 0;
    for trial in 0..240 {
        let n = 2 + trial % 4;
        let f = random_element(&mut rng, n);
        let oracle = span_coordinates(&f, n);
        members += usize::from(oracle.is_some());
        assert_eq!(ree_test(&f, n), oracle.is_some(), "{f}");
        assert_eq!(lie_coordinates(&f, n), oracle, "{f}");
    }
    assert!(members > 40 && members < 200);
}

#[test]
fn quotient_reports() {
    let r2 = ush_quotient_report(2, false).unwrap();
    assert_eq!((r2.ush_rank, r2.quotient_rank), (1, 1));
    let r3 = ush_quotient_report(3, false).unwrap();
    assert_eq!((r3.ush_rank, r3.quotient_rank), (4, 2));
    assert_eq!(r3.divisors.len(), 1);
    assert_eq!(r3.divisors[0].count, 4);
    for n in 2..=6 {
        for signed in [false, true] {
            let r = ush_quotient_report(n, signed).unwrap();
            let fact: usize = (1..n).product();
            assert!(r.torsion_free, "n = {n}");
            assert_eq!(r.quotient_rank, fact);
            assert!(r.basis_extends);
            assert!(r.orthogonal);
            if n <= 5 {
                assert_eq!(r.pairing_det.abs(), 1.into());
            }
        }
    }
}

#[test]
fn sign_twist_exchanges_the_two_spans() {
    for n in 2..=6 {
        assert!(psi_exchanges_unshuffles(n));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn brackets_are_lie(n in 2usize..=5, coeffs in prop::collection::vec(-4i64..=4, 24)) {
        let mut f = TensorElement::new();
        for (l, c) in basis_indices(n).iter().zip(&coeffs) {
            f.add_scaled(&expand_left_normed(l), c);
        }
        prop_assert!(ree_test(&f, n));
        let coords = lie_coordinates(&f, n).unwrap();
        for (l, c) in basis_indices(n).iter().zip(&coeffs) {
            prop_assert_eq!(coords.get(l).copied().unwrap_or(0), *c);
        }
    }
}
