//! Exact identities of the built-in example processes.

use cubeproc::examples::{
    example_intro, example_intro_restricted, example_one_sep, example_simplicial, independent_process,
    one_sep_subspace, one_sep_witness_set, simplicial_parts,
};
use cubeproc::hypercube::{all_words, project_or_same, variable_words};
use cubeproc::invariants::types_up_to;
use cubeproc::probspace::{Event, Formula};
use cubeproc::process::{
    base_rate, classify_gamma, classify_type, stationarity_modulus_lines, stationarity_modulus_types, Label,
};
use cubeproc::{Alphabet, Rational, Word};

fn r(a: i64, b: i64) -> Rational {
    Rational::new(a, b)
}

#[test]
fn intro_marginals_count() {
    for n in 1..=4 {
        let p = example_intro(n, &r(1, 3)).unwrap();
        let full = all_words(3, n).filter(|t| p.prob(t) == r(1, 3)).count();
        let squared = all_words(3, n).filter(|t| p.prob(t) == r(1, 9)).count();
        assert_eq!(full, 1 << n);
        assert_eq!(full + squared, 3usize.pow(n as u32));
    }
    assert_eq!(base_rate(&example_intro(2, &r(1, 2)).unwrap(), None), (r(1, 2), r(1, 4)));
}

#[test]
fn intro_identities_at_a_third() {
    let eps = r(1, 3);
    let p = example_intro(3, &eps).unwrap();
    for v in variable_words(3, 3).unwrap() {
        let line = v.line_of(3).unwrap();
        if v.contains_const(2) {
            assert_eq!(p.joint_prob(&line), eps.pow(4));
        }
        let sp = p.space();
        let all = sp.and(&[p.event(&line[0]), p.event(&line[1]), p.event(&line[2])]).unwrap();
        let two = sp.and(&[p.event(&line[0]), p.event(&line[1])]).unwrap();
        assert!(sp.events_equal(&all, &two).unwrap());
    }
}

#[test]
fn intro_restricted_pairs() {
    let eps = r(1, 2);
    let p = example_intro_restricted(3, &eps).unwrap();
    assert_eq!(p.n(), 2);
    assert_eq!(base_rate(&p, None), (r(1, 4), r(0, 1)));
    assert!(stationarity_modulus_lines(&p).eta_star.is_zero());
    for v in variable_words(3, 2).unwrap() {
        let (a, b, c) = (v.at(0), v.at(1), v.at(2));
        assert_eq!(p.joint_prob([&a, &b]), eps.pow(4));
        assert_eq!(p.joint_prob([&a, &c]), eps.pow(3));
        assert_eq!(p.joint_prob([&b, &c]), eps.pow(3));
    }
}

#[test]
fn one_separated_example() {
    let eps = r(1, 2);
    let p = example_one_sep(5, &eps, false).unwrap();
    let special = Word(vec![1, 1, 2]);
    for t in all_words(3, 5) {
        let z = t.slice(3, 5);
        let want = if t.slice(0, 3) == special || z.contains(2) { eps.pow(2) } else { eps.clone() };
        assert_eq!(p.prob(&t), want, "{t:?}");
    }
    for wd in all_words(3, 1) {
        assert_eq!(p.joint_prob(&one_sep_witness_set(&wd)), eps.pow(4));
    }
    // on {(2,2,3)z}, D_z is the meet of a (1,3)-insensitive and a
    // (2,3)-insensitive factor, so it contains D_{z^{3->1}} ∩ D_{z^{3->2}}
    let q = p.restrict(&one_sep_subspace(5).unwrap()).unwrap();
    let sp = q.space();
    for z in all_words(3, 2) {
        let (z1, z2) = (project_or_same(&z, 2, 0), project_or_same(&z, 2, 1));
        let joint = sp.and(&[q.event(&z1), q.event(&z2)]).unwrap();
        assert!(sp.is_subset(&joint, q.event(&z)).unwrap());
        assert_eq!(q.prob(&z), eps.pow(2));
    }
}

#[test]
fn simplicial_example_factors() {
    let eps = r(1, 2);
    let p = example_simplicial(2, &eps).unwrap();
    for z in all_words(3, 4) {
        let parts = simplicial_parts(2, &eps, &z).unwrap();
        let both = Event::Formula(Formula::and([parts.s1, parts.s2]));
        assert!(p.space().events_equal(p.event(&z), &both).unwrap());
    }
}

#[test]
fn independent_is_pseudorandom() {
    let eps = r(1, 4);
    let p = independent_process(Alphabet::numeric(3), 2, &eps).unwrap();
    for gamma in [vec![0], vec![0, 1], vec![0, 1, 2]] {
        assert_eq!(classify_gamma(&p, &gamma, &r(0, 1), &eps).unwrap().label, Label::Pseudorandom);
    }
    let tm = stationarity_modulus_types(&p, 4, 2, usize::MAX).unwrap();
    assert!(tm.eta_star.is_zero() && !tm.partial);
    for tau in types_up_to(3, 4, 2) {
        assert_eq!(classify_type(&p, &tau, &r(0, 1), &eps).unwrap().label, Label::Pseudorandom);
    }
}
