use proptest::prelude::*;
use treecells::free_operad::{derivation, linear_part, parse_sum, substitute_vertex};
use treecells::{Barcode, OperadTerm, Perm, ZSum};

fn term(s: &str) -> OperadTerm {
    s.parse().unwrap()
}

#[test]
fn parse_and_print() {
    for s in ["[1|2]", "[[1|2]|3]", "[1|[2||3]]", "[[1||3]|2]", "[[1||3||5]|[2||4||6]]", "1"] {
        assert_eq!(term(s).to_string(), s);
    }
    assert!("[1|1]".parse::<OperadTerm>().is_err());
    assert!("[[1]|2]".parse::<OperadTerm>().is_err());
    assert!("[1|3]".parse::<OperadTerm>().is_err());
}

#[test]
fn degrees_and_arity() {
    let t = term("[[1||3||5]|[2||4||6]]");
    assert_eq!((t.arity(), t.degree(), t.vertex_count()), (6, 6, 3));
    assert_eq!(term("[1|[2||3]]").degree(), 1);
    assert_eq!(OperadTerm::identity().degree(), 0);
}

#[test]
fn factorization() {
    let (u, s) = term("[[1||3]|2]").factor();
    assert_eq!(u, term("[[1||2]|3]"));
    assert_eq!(s, Perm::new(vec![1, 3, 2]).unwrap());
    assert_eq!(u.act(&s).unwrap(), term("[[1||3]|2]"));
}

#[test]
fn composition_examples() {
    let a = term("[1||2]");
    let b = term("[1||2]");
    let (neg, c) = a.compose(1, &b).unwrap();
    assert_eq!(c, term("[[1||2]||3]"));
    // one odd vertex moves past another
    assert!(!neg);
    let (neg, c) = a.compose(2, &b).unwrap();
    assert_eq!(c, term("[1||[2||3]]"));
    assert!(!neg);
    let (neg, c) = term("[1|2]").compose(2, &term("[1|2|3]")).unwrap();
    assert_eq!(c, term("[1|[2|3|4]]"));
    assert!(!neg);
    assert!(a.compose(3, &b).is_err());
}

#[test]
fn koszul_sign_of_substitution() {
    let t = term("[[1||2]|[3||4]|5]");
    // the odd inner vertex of x lands after the odd vertex [1||2]
    let (neg, out) = substitute_vertex(&t, 0, &term("[1|[2||3]]"));
    assert_eq!(out, term("[[1||2]|[[3||4]||5]]"));
    assert!(neg);
    let (neg, out) = substitute_vertex(&t, 0, &term("[1||[2|3]]"));
    assert_eq!(out, term("[[1||2]||[[3||4]|5]]"));
    assert!(!neg);
}

#[test]
fn generators_and_sums() {
    let b: Barcode = "[2|1||3]".parse().unwrap();
    let g = OperadTerm::generator(&b);
    assert_eq!(g.as_generator(), Some(b));
    assert_eq!(term("[[1|2]|3]").as_generator(), None);
    let s = parse_sum("+[1|2|3] -2*[1|[2||3]] +[1|2|3]").unwrap();
    assert_eq!(s.get(&term("[1|2|3]")), 2);
    assert_eq!(s.get(&term("[1|[2||3]]")), -2);
    assert_eq!(linear_part(&s).len(), 1);
}

#[test]
fn derivation_of_a_decomposable() {
    // d on generators: [1||2] ↦ [1|2] − [2|1], everything else 0
    let dgen = |g: &[u8]| -> treecells::Result<ZSum> {
        Ok(if g == [2] { parse_sum("+[1|2] -[2|1]").unwrap() } else { ZSum::new() })
    };
    let d = derivation(&term("[1||[2||3]]"), &dgen).unwrap();
    // the second vertex is reached past the odd root
    let want = parse_sum("+[1|[2||3]] -[[2||3]|1] -[1||[2|3]] +[1||[3|2]]").unwrap();
    assert_eq!(d, want);
}

fn permutation(n: usize) -> impl Strategy<Value = Perm> {
    Just((1..=n as u16).collect::<Vec<_>>()).prop_shuffle().prop_map(|v| Perm::new(v).unwrap())
}

fn small_term() -> impl Strategy<Value = OperadTerm> {
    prop::sample::select(vec![
        "[1|2]", "[1||2]", "[1|2|3]", "[1|2||3]", "[2||1|3]", "[[1|2]|3]", "[1|[2||3]]", "[[1||3]|2]",
        "[[1|2]||[3|4]]", "[1|[2|||3|4]]", "[[1|||3]|[2||4]]",
    ])
    .prop_map(term)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn printed_form_round_trips(t in small_term(), seed in any::<u64>()) {
        let all = Perm::all(t.arity());
        let s = &all[(seed % all.len() as u64) as usize];
        let moved = t.act(s).unwrap();
        prop_assert_eq!(moved.to_string().parse::<OperadTerm>().unwrap(), moved.clone());
        prop_assert_eq!(moved.degree(), t.degree());
        let (u, sigma) = moved.factor();
        prop_assert_eq!(u.act(&sigma).unwrap(), moved);
    }

    #[test]
    fn action_is_a_right_action(t in small_term(), seed in any::<u64>()) {
        let all = Perm::all(t.arity());
        let s = &all[(seed % all.len() as u64) as usize];
        let r = &all[((seed >> 20) % all.len() as u64) as usize];
        prop_assert_eq!(t.act(s).unwrap().act(r).unwrap(), t.act(&s.then(r)).unwrap());
    }

    #[test]
    fn composition_is_associative(a in small_term(), b in small_term(), c in small_term(), i in 1usize..=4, j in 1usize..=4) {
        prop_assume!(i <= a.arity() && j <= b.arity());
        // (a ∘_i b) ∘_{i+j-1} c = a ∘_i (b ∘_j c)
        let (s1, ab) = a.compose(i, &b).unwrap();
        let (s2, left) = ab.compose(i + j - 1, &c).unwrap();
        let (s3, bc) = b.compose(j, &c).unwrap();
        let (s4, right) = a.compose(i, &bc).unwrap();
        prop_assert_eq!(&left, &right);
        prop_assert_eq!(s1 ^ s2, s3 ^ s4);
        prop_assert_eq!(left.degree(), a.degree() + b.degree() + c.degree());
    }

    #[test]
    fn composition_is_equivariant(a in small_term(), b in small_term(), i in 1usize..=4, p in permutation(3)) {
        prop_assume!(i <= a.arity() && b.arity() == 3);
        let (s1, x) = a.compose(i, &b).unwrap();
        let (s2, y) = a.compose(i, &b.act(&p).unwrap()).unwrap();
        prop_assert_eq!(s1, s2);
        let lifted = Perm::identity(a.arity()).substitute(i as u16, &p);
        prop_assert_eq!(x.act(&lifted).unwrap(), y);
    }
}
