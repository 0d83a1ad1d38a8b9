//! Cross-checks the tableau classes against the general-purpose reduction
//! machinery on chains small enough for the lattice phase.

use troplin_chain::{make_admissible_chain, tableau_to_divisor, ChainModel, Tableau};
use troplin_core::divisor::canonical_divisor;
use troplin_core::reduced::{is_reduced, reduce};
use troplin_core::Divisor;

#[test]
fn genus_one_canonical_class_is_trivial() {
    // on one loop the canonical divisor is principal, and the one-box tableau
    // gives the empty divisor data
    let m = ChainModel::new(make_admissible_chain(1, 2).unwrap()).unwrap();
    let g = m.graph();
    let t = Tableau::standard_rect(0, 1).unwrap();
    let data = tableau_to_divisor(m.params(), &t, 0).unwrap();
    assert_eq!(m.divisor(&data).unwrap(), Divisor::zero());

    let k = canonical_divisor(g);
    let q = g.vertex_point(m.params().w(0));
    let (red, psi) = reduce(g, &k, &q).unwrap();
    assert_eq!(red, Divisor::zero());
    assert_eq!(k.add(&psi.divisor(g)), red);
}

#[test]
fn genus_two_canonical_class_matches_the_tableau() {
    // reduction of K at w_0 must land on the divisor of the one-row tableau
    // class: one chip at w_0 and one 2m_1 along loop 1
    let m = ChainModel::new(make_admissible_chain(2, 1).unwrap()).unwrap();
    let g = m.graph();
    let t = Tableau::standard_rect(1, 1).unwrap();
    let data = tableau_to_divisor(m.params(), &t, 2).unwrap();
    let expect = m.divisor(&data).unwrap();

    let q = g.vertex_point(m.params().w(0));
    assert!(is_reduced(g, &expect, &q).unwrap());

    let k = canonical_divisor(g);
    let (red, psi) = reduce(g, &k, &q).unwrap();
    assert_eq!(k.add(&psi.divisor(g)), red);
    assert_eq!(red, expect);
}
