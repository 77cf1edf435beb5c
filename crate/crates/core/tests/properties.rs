use std::sync::Arc;

use itertools::Itertools;
use proptest::prelude::*;

use cubeproc::dhjlab::{density_increment_step, find_line_in_set, seeded_instance, DenseSet, IncrementParams};
use cubeproc::examples::{example_intro_restricted, random_atom_space, random_process};
use cubeproc::extractor::{extract_line_witness, ExtractOptions};
use cubeproc::format::{parse_process, write_process};
use cubeproc::hypercube::{all_words, enumerate_subspaces, equivalent, project, variable_words};
use cubeproc::invariants::{
    separation_index_set, separation_index_tuple, type_of_set, type_of_tuple, TypeSet, DEFAULT_EXACT_CAP,
};
use cubeproc::probspace::{materialize, BernoulliProduct, Formula, Space};
use cubeproc::process::{
    boolean_stability_check, classify_gamma, classify_type, stationarity_modulus_lines, AnalysisParams, CubeProcess,
    Label,
};
use cubeproc::report::line_witness_json;
use cubeproc::{Alphabet, CombinatorialSpace, Entry, Rational, VariableWord, Word};

fn word(k: u8, n: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(0..k, n).prop_map(Word)
}

/// Codes `>= k` mark variable positions; a change of code starts the next
/// variable block, up to `max_m` blocks.
fn var_word(k: u8, n: usize, max_m: u8) -> impl Strategy<Value = VariableWord> {
    prop::collection::vec(0..k + max_m, n).prop_map(move |mut codes| {
        if codes.iter().all(|&c| c < k) {
            codes[0] = k;
        }
        let mut var: Option<u8> = None;
        let mut last = None;
        let entries = codes
            .iter()
            .map(|&c| {
                if c < k {
                    return Entry::Const(c);
                }
                let next = match (var, last) {
                    (None, _) => 0,
                    (Some(v), Some(l)) if l != c && v + 1 < max_m => v + 1,
                    (Some(v), _) => v,
                };
                var = Some(next);
                last = Some(c);
                Entry::Var(next)
            })
            .collect();
        VariableWord::new(entries).unwrap()
    })
}

fn distinct_words(k: u8, n: usize, max: usize) -> impl Strategy<Value = Vec<Word>> {
    prop::collection::btree_set(word(k, n), 1..=max).prop_map(|s| s.into_iter().collect::<Vec<_>>()).prop_shuffle()
}

fn fuzzed(k: usize, n: usize, seed: u64) -> CubeProcess {
    let space = random_atom_space(12, seed).unwrap();
    random_process(Alphabet::numeric(k), n, Arc::new(space), seed ^ 0x5eed).unwrap()
}

fn bernoulli(gens: usize, eps: Rational) -> BernoulliProduct {
    BernoulliProduct::new((0..gens).map(|i| format!("g{i}")).collect(), eps).unwrap()
}

fn formula(gens: u32) -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![Just(Formula::tt()), Just(Formula::ff()), (0..gens).prop_map(Formula::gen)];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(|f| Formula::not(&f)),
            prop::collection::vec(inner.clone(), 1..4).prop_map(Formula::and),
            prop::collection::vec(inner.clone(), 1..4).prop_map(Formula::or),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::diff(&a, &b)),
        ]
    })
}

fn epsilon() -> impl Strategy<Value = Rational> {
    (1i64..4, 2i64..5).prop_filter_map("proper fraction", |(a, b)| (a < b).then(|| Rational::new(a, b)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn iso_is_an_order_preserving_bijection(v in var_word(3, 5, 3)) {
        let space = CombinatorialSpace::new(v);
        let pts = space.points(3);
        prop_assert!(pts.windows(2).all(|p| p[0] < p[1]));
        for (s, t) in all_words(3, space.dim()).zip(&pts) {
            prop_assert_eq!(space.preimage(t), Some(s));
        }
    }

    #[test]
    fn iso_maps_lines_to_lines(v in var_word(3, 5, 3), u in any::<prop::sample::Index>()) {
        let space = CombinatorialSpace::new(v);
        let lines = variable_words(3, space.dim()).unwrap();
        let line = CombinatorialSpace::new(lines[u.index(lines.len())].clone());
        let image = space.compose(&line).unwrap();
        prop_assert_eq!(image.dim(), 1);
        let mapped: Vec<Word> = line.points(3).iter().map(|s| space.iso(s).unwrap()).collect();
        prop_assert_eq!(image.points(3), mapped);
    }

    #[test]
    fn projection_is_idempotent(t in word(4, 6), b in 0u8..4, a in 0u8..4) {
        prop_assume!(a != b);
        let p = project(&t, b, a).unwrap();
        prop_assert!(!p.contains(b));
        prop_assert_eq!(project(&p, b, a).unwrap(), p.clone());
        prop_assert!(equivalent(&t, &p, a, b, None).unwrap());
    }

    #[test]
    fn equivalence_is_an_equivalence(s in word(3, 5), t in word(3, 5), u in word(3, 5)) {
        let (a, b) = (0, 2);
        prop_assert!(equivalent(&s, &s, a, b, None).unwrap());
        prop_assert_eq!(equivalent(&s, &t, a, b, None).unwrap(), equivalent(&t, &s, a, b, None).unwrap());
        if equivalent(&s, &t, a, b, None).unwrap() && equivalent(&t, &u, a, b, None).unwrap() {
            prop_assert!(equivalent(&s, &u, a, b, None).unwrap());
        }
    }

    #[test]
    fn types_survive_isomorphisms(g in distinct_words(3, 3, 6), v in var_word(3, 5, 3)) {
        let v = CombinatorialSpace::new(v);
        prop_assume!(v.dim() == 3);
        let img: Vec<Word> = g.iter().map(|t| v.iso(t).unwrap()).collect();
        prop_assert_eq!(type_of_tuple(&g).unwrap(), type_of_tuple(&img).unwrap());
        prop_assert_eq!(type_of_set(g.iter()).unwrap(), type_of_set(img.iter()).unwrap());
        prop_assert_eq!(separation_index_tuple(&g).unwrap().value, separation_index_tuple(&img).unwrap().value);
        prop_assert_eq!(
            separation_index_set(&g, DEFAULT_EXACT_CAP).unwrap().value,
            separation_index_set(&img, DEFAULT_EXACT_CAP).unwrap().value
        );
    }

    #[test]
    fn tuple_types_permute_with_the_tuple(g in distinct_words(4, 4, 6), seed in any::<u64>()) {
        prop_assume!(g.len() >= 2);
        let tt = type_of_tuple(&g).unwrap();
        let p = g.len();
        let perm: Vec<usize> = (0..p).map(|i| (i + seed as usize) % p).collect();
        let permuted: Vec<Word> = perm.iter().map(|&i| g[i].clone()).collect();
        let pt = type_of_tuple(&permuted).unwrap();
        prop_assert_eq!(pt.dim, tt.dim);
        prop_assert_eq!(pt.columns, perm.iter().map(|&i| tt.columns[i].clone()).collect::<Vec<_>>());
    }

    #[test]
    fn type_shape_and_separation(g in distinct_words(3, 4, 7)) {
        let ts = type_of_set(g.iter()).unwrap();
        if g.len() >= 2 {
            prop_assert_eq!(ts.len(), g.len());
        }
        prop_assert!(ts.is_reduced() || g.len() == 1);
        prop_assert!(g.len() <= 3usize.pow(ts.dim as u32));
        let s = separation_index_set(&g, DEFAULT_EXACT_CAP).unwrap();
        prop_assert!(s.value <= ts.dim.max(1));
        prop_assert!(s.value <= separation_index_tuple(&g).unwrap().value);
        // a realization of the type has the same index
        if ts.dim >= 1 {
            let elems: Vec<Word> = ts.elements.iter().cloned().collect();
            prop_assert_eq!(separation_index_set(&elems, DEFAULT_EXACT_CAP).unwrap().value, s.value);
        }
    }

    #[test]
    fn probability_axioms(f in formula(6), g in formula(6), eps in epsilon()) {
        let b = bernoulli(6, eps.clone());
        let m = materialize(&b, &(0..6).collect::<Vec<_>>()).unwrap();
        let bern = Space::Bernoulli(b);
        let atoms = Space::Atoms(m.space.clone());
        prop_assert!(bern.prob(&bern.omega()).unwrap().is_one());
        prop_assert!(atoms.prob(&atoms.null()).unwrap().is_zero());
        let union = Formula::or([f.clone(), g.clone()]);
        let meet = Formula::and([f.clone(), g.clone()]);
        prop_assert_eq!(union.prob(&eps) + meet.prob(&eps), f.prob(&eps) + g.prob(&eps));
        let (mf, mg) = (m.formula_to_mask(&f).unwrap(), m.formula_to_mask(&g).unwrap());
        let pa = |x| m.space.prob(&x);
        prop_assert_eq!(pa(mf.or(&mg)) + pa(mf.and(&mg)), pa(mf.clone()) + pa(mg.clone()));
        prop_assert_eq!(pa(mf), f.prob(&eps));
        prop_assert_eq!(pa(m.formula_to_mask(&union).unwrap()), union.prob(&eps));
    }

    #[test]
    fn generators_are_independent(set in prop::collection::btree_set(0u32..10, 1..6), eps in epsilon()) {
        let f = Formula::and(set.iter().map(|&g| Formula::gen(g)));
        prop_assert_eq!(f.prob(&eps), eps.pow(set.len() as u32));
        let neg = Formula::and(set.iter().map(|&g| Formula::not(&Formula::gen(g))));
        prop_assert_eq!(neg.prob(&eps), (Rational::one() - eps).pow(set.len() as u32));
    }

    #[test]
    fn sweeps_do_not_depend_on_the_worker_count(seed in any::<u64>()) {
        let p = fuzzed(3, 2, seed);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        prop_assert_eq!(one.install(|| stationarity_modulus_lines(&p)), four.install(|| stationarity_modulus_lines(&p)));
    }

    #[test]
    fn classification_is_never_mixed_above_the_modulus(seed in any::<u64>(), slack in 0i64..3) {
        let p = fuzzed(3, 2, seed);
        let eta = stationarity_modulus_lines(&p).eta_star;
        let theta = &eta * &Rational::new(2 + slack, 2);
        for gamma in [vec![0], vec![1, 2], vec![0, 1, 2]] {
            for eps in [Rational::new(1, 2), Rational::new(1, 5)] {
                prop_assert_ne!(classify_gamma(&p, &gamma, &theta, &eps).unwrap().label, Label::Mixed);
            }
        }
    }

    #[test]
    fn line_types_agree_with_gamma_classes(seed in any::<u64>(), n in 1usize..4) {
        let p = fuzzed(3, n, seed);
        let theta = Rational::new(1, 20);
        let eps = Rational::new(1, 3);
        for gamma in [vec![0u8, 1], vec![0, 2], vec![1, 2], vec![0, 1, 2]] {
            let a = classify_gamma(&p, &gamma, &theta, &eps).unwrap();
            let b = classify_type(&p, &TypeSet::line_type(&gamma).unwrap(), &theta, &eps).unwrap();
            prop_assert_eq!((a.min_corr, a.max_corr, a.label), (b.min_corr, b.max_corr, b.label));
        }
    }

    #[test]
    fn complemented_lines_obey_the_doubling_bound(seed in any::<u64>(), split in 0usize..27) {
        let p = fuzzed(3, 2, seed);
        let eta = stationarity_modulus_lines(&p).eta_star;
        let side: Vec<usize> = (0..3).map(|i| split / 3usize.pow(i) % 3).collect();
        let g1: Vec<u8> = (0..3u8).filter(|&a| side[a as usize] == 1).collect();
        let g2: Vec<u8> = (0..3u8).filter(|&a| side[a as usize] == 2).collect();
        let bound = Rational::from(1i64 << g2.len()) * eta;
        let words = variable_words(3, 2).unwrap();
        for (v1, v2) in words.iter().tuple_combinations() {
            prop_assert!(boolean_stability_check(&p, &g1, &g2, v1, v2).unwrap() <= bound);
        }
    }

    #[test]
    fn restriction_reads_through_the_isomorphism(seed in any::<u64>(), v in var_word(3, 3, 2)) {
        let p = fuzzed(3, 3, seed);
        let space = CombinatorialSpace::new(v);
        let q = p.restrict(&space).unwrap();
        for s in all_words(3, space.dim()) {
            prop_assert_eq!(q.prob(&s), p.prob(&space.iso(&s).unwrap()));
        }
    }

    #[test]
    fn process_files_round_trip(seed in any::<u64>(), n in 1usize..3) {
        let p = fuzzed(3, n, seed);
        let back = parse_process(&write_process(&p)).unwrap();
        prop_assert!(p.same_events(&back).unwrap());
    }

    #[test]
    fn increments_clear_the_target(seed in any::<u64>(), k in 1usize..4) {
        let params = IncrementParams { epsilon: Rational::new(1, 3), sigma: Rational::new(1, 8), k };
        let inst = seeded_instance(&params, 6, 10, true, seed).unwrap();
        let out = density_increment_step(&inst, &params).unwrap();
        prop_assert!(out.value >= params.target());
        prop_assert!(!out.small.contains(&out.index));
        prop_assert!(out.transcript.all_hold());
    }
}

#[test]
fn line_search_matches_brute_force() {
    let pts: Vec<Word> = all_words(2, 3).collect();
    let lines: Vec<Vec<Word>> = variable_words(2, 3).unwrap().iter().map(|v| v.line_of(2).unwrap()).collect();
    for mask in 0u32..256 {
        let members: Vec<Word> =
            pts.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, w)| w.clone()).collect();
        let d = DenseSet::new(2, 3, members.clone()).unwrap();
        let brute = lines.iter().any(|l| l.iter().all(|t| members.contains(t)));
        let found = find_line_in_set(&d).unwrap();
        assert_eq!(found.is_some(), brute, "mask {mask:08b}");
        if let Some(v) = found {
            assert!(v.line_of(2).unwrap().iter().all(|t| d.contains(t)));
        }
    }
}

#[test]
fn subspace_enumeration_has_no_repeats() {
    for (n, m) in [(3, 1), (3, 2), (4, 2)] {
        let all: Vec<CombinatorialSpace> = enumerate_subspaces(3, n, m).unwrap().collect();
        assert!(all.iter().all_unique());
        assert_eq!(all.len() as u128, cubeproc::hypercube::count_subspaces(3, n, m));
    }
}

#[test]
fn extraction_is_deterministic_and_self_consistent() {
    let p = example_intro_restricted(3, &Rational::new(1, 2)).unwrap();
    let params = AnalysisParams::new(Rational::new(1, 4), Rational::new(1, 96), Rational::zero(), 3, 1).unwrap();
    let opts = ExtractOptions { allow_small_n: true, ..Default::default() };
    let run = || {
        let out = extract_line_witness(&p, &params, &opts).unwrap();
        let w = out.witness().unwrap().clone();
        assert!(w.transcript.recheck() && w.transcript.all_hold());
        line_witness_json(p.alphabet(), &w)
    };
    assert_eq!(run(), run());
}
