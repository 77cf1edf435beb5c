//! Worked-example processes over `{1,2,3}^n` and seeded random processes.

use std::collections::HashMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypercube::{
    all_words, cube_size, project_or_same, Alphabet, CombinatorialSpace, Entry, VariableWord, Word,
};
use crate::probspace::{AtomSpace, BernoulliProduct, Event, Formula, Mask, Space};
use crate::process::CubeProcess;
use crate::rational::Rational;

const ONE: u8 = 0;
const TWO: u8 = 1;
const THREE: u8 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExampleName {
    Intro,
    IntroRestricted,
    Extreme,
    Onesep,
    Simplicial,
    Independent,
}

impl std::str::FromStr for ExampleName {
    type Err = Error;

    fn from_str(s: &str) -> Result<ExampleName> {
        Ok(match s {
            "intro" => ExampleName::Intro,
            "intro-restricted" => ExampleName::IntroRestricted,
            "extreme" => ExampleName::Extreme,
            "onesep" => ExampleName::Onesep,
            "simplicial" => ExampleName::Simplicial,
            "independent" => ExampleName::Independent,
            _ => return Err(Error::Parse(format!("unknown example {s:?}"))),
        })
    }
}

/// A named example with its size and base probability.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExampleSpec {
    pub name: ExampleName,
    pub alphabet: Alphabet,
    pub n: usize,
    pub epsilon: Rational,
    pub seed: Option<u64>,
    /// Allow `n = 4` for the one-separated example.
    #[serde(default)]
    pub relaxed: bool,
}

impl ExampleSpec {
    pub fn new(name: ExampleName, n: usize, epsilon: Rational) -> ExampleSpec {
        ExampleSpec { name, alphabet: Alphabet::numeric(3), n, epsilon, seed: None, relaxed: false }
    }

    pub fn build(&self) -> Result<CubeProcess> {
        let (n, e) = (self.n, &self.epsilon);
        match self.name {
            ExampleName::Intro => example_intro(n, e),
            ExampleName::IntroRestricted => example_intro_restricted(n, e),
            ExampleName::Extreme => example_remark_extreme(n, e),
            ExampleName::Onesep => example_one_sep(n, e, self.relaxed),
            ExampleName::Simplicial => example_simplicial(n, e),
            ExampleName::Independent => independent_process(self.alphabet.clone(), n, e),
        }
    }
}

fn check_epsilon(eps: &Rational) -> Result<()> {
    if !eps.is_positive() || *eps >= Rational::one() {
        return Err(Error::Invalid(format!("epsilon {eps} is outside (0, 1)")));
    }
    Ok(())
}

fn name_of(alphabet: &Alphabet, w: &Word) -> String {
    let tokens = alphabet.render(w);
    let sep = if tokens.iter().all(|t| t.len() == 1) { "" } else { "," };
    format!("E{}", tokens.join(sep))
}

/// Generators indexed by an explicit list of words.
struct Family {
    index: HashMap<Word, u32>,
    space: Arc<Space>,
}

impl Family {
    fn new(alphabet: &Alphabet, words: Vec<Word>, eps: &Rational) -> Result<Family> {
        let names = words.iter().map(|w| name_of(alphabet, w)).collect();
        let index = words.into_iter().enumerate().map(|(i, w)| (w, i as u32)).collect();
        let space = Arc::new(Space::Bernoulli(BernoulliProduct::new(names, eps.clone())?));
        Ok(Family { index, space })
    }

    fn e(&self, w: &Word) -> Formula {
        Formula::gen(*self.index.get(w).expect("word indexes a generator"))
    }
}

fn binary_words(n: usize) -> Vec<Word> {
    all_words(2, n).collect()
}

fn ev(f: Formula) -> Event {
    Event::Formula(f)
}

/// `D_t = E_{t^{3→1}} ∩ E_{t^{3→2}}` with independent `E_s`, `s ∈ {1,2}^n`.
pub fn example_intro(n: usize, eps: &Rational) -> Result<CubeProcess> {
    check_epsilon(eps)?;
    let a = Alphabet::numeric(3);
    cube_size(3, n)?;
    let fam = Family::new(&a, binary_words(n), eps)?;
    let space = fam.space.clone();
    CubeProcess::from_fn(a, n, space, |t| {
        ev(Formula::and([fam.e(&project_or_same(t, THREE, ONE)), fam.e(&project_or_same(t, THREE, TWO))]))
    })
}

/// The subspace `{3⌢z}` of `A^n`.
pub fn leading_three(n: usize) -> Result<CombinatorialSpace> {
    if n < 2 {
        return Err(Error::Invalid("n must be at least 2".into()));
    }
    let mut entries = vec![Entry::Const(THREE)];
    entries.extend((0..n - 1).map(|i| Entry::Var(i as u8)));
    Ok(CombinatorialSpace::new(VariableWord::new(entries)?))
}

/// The intro example restricted to `{3⌢z}`, a process on `A^{n-1}` whose
/// marginals all equal `ε²`.
pub fn example_intro_restricted(n: usize, eps: &Rational) -> Result<CubeProcess> {
    example_intro(n, eps)?.restrict(&leading_three(n)?)
}

/// `D_t = E_{t^{3→1}}`, so that `D_{v(3)} = D_{v(1)}` on every line.
pub fn example_remark_extreme(n: usize, eps: &Rational) -> Result<CubeProcess> {
    check_epsilon(eps)?;
    let a = Alphabet::numeric(3);
    cube_size(3, n)?;
    let fam = Family::new(&a, binary_words(n), eps)?;
    let space = fam.space.clone();
    CubeProcess::from_fn(a, n, space, |t| ev(fam.e(&project_or_same(t, THREE, ONE))))
}

fn w(v: &[u8]) -> Word {
    Word(v.to_vec())
}

/// The distinguished prefix `(2,2,3)`.
fn prefix_223() -> Word {
    w(&[TWO, TWO, THREE])
}

/// Process with a one-separated correlation of type
/// `{(1,2,1),(2,1,2),(2,2,3)}`. Needs `n >= 5`, or `n >= 4` when relaxed.
pub fn example_one_sep(n: usize, eps: &Rational, relaxed: bool) -> Result<CubeProcess> {
    check_epsilon(eps)?;
    let min = if relaxed { 4 } else { 5 };
    if n < min {
        return Err(Error::Invalid(format!("the one-separated example needs n >= {min}")));
    }
    let a = Alphabet::numeric(3);
    cube_size(3, n)?;
    let special = prefix_223();
    let heads: Vec<Word> = all_words(3, 3).filter(|y| *y != special).collect();
    let tails = binary_words(n - 3);
    let words: Vec<Word> = heads.iter().flat_map(|y| tails.iter().map(move |s| y.concat(s))).collect();
    let fam = Family::new(&a, words, eps)?;
    let (p121, p212) = (w(&[ONE, TWO, ONE]), w(&[TWO, ONE, TWO]));
    let space = fam.space.clone();
    CubeProcess::from_fn(a, n, space, |t| {
        let (y, z) = (t.slice(0, 3), t.slice(3, n));
        let (z1, z2) = (project_or_same(&z, THREE, ONE), project_or_same(&z, THREE, TWO));
        let f = if y == special {
            Formula::and([fam.e(&p121.concat(&z1)), fam.e(&p212.concat(&z2))])
        } else {
            Formula::and([fam.e(&y.concat(&z1)), fam.e(&y.concat(&z2))])
        };
        ev(f)
    })
}

/// `G_w` for `w ∈ A^{n-4}`: a three-point set of the one-separated type.
pub fn one_sep_witness_set(wd: &Word) -> Vec<Word> {
    let head = |p: &[u8], tail: Word| w(p).concat(&w(&[THREE])).concat(&tail);
    vec![
        head(&[ONE, TWO, ONE], project_or_same(wd, THREE, ONE)),
        head(&[TWO, ONE, TWO], project_or_same(wd, THREE, TWO)),
        head(&[TWO, TWO, THREE], wd.clone()),
    ]
}

/// The subspace `{(2,2,3)⌢z}`.
pub fn one_sep_subspace(n: usize) -> Result<CombinatorialSpace> {
    if n < 4 {
        return Err(Error::Invalid("n must be at least 4".into()));
    }
    let mut entries: Vec<Entry> = prefix_223().0.into_iter().map(Entry::Const).collect();
    entries.extend((0..n - 3).map(|i| Entry::Var(i as u8)));
    Ok(CombinatorialSpace::new(VariableWord::new(entries)?))
}

/// The two factors of the two-block example at `t⌢s`, as formulas.
pub struct SimplicialParts {
    pub s1: Formula,
    pub s2: Formula,
}

struct SimplicialFamily {
    fam: Family,
    n: usize,
}

impl SimplicialFamily {
    fn new(n: usize, eps: &Rational) -> Result<SimplicialFamily> {
        let a = Alphabet::numeric(3);
        cube_size(3, 2 * n)?;
        let pure = |u: &Word| !u.contains(THREE);
        let words: Vec<Word> =
            all_words(3, 2 * n).filter(|z| pure(&z.slice(0, n)) || pure(&z.slice(n, 2 * n))).collect();
        Ok(SimplicialFamily { fam: Family::new(&a, words, eps)?, n })
    }

    fn parts(&self, z: &Word) -> SimplicialParts {
        let (t, s) = (z.slice(0, self.n), z.slice(self.n, 2 * self.n));
        let p = |u: &Word, a| project_or_same(u, THREE, a);
        let (t1, t2, s1, s2) = (p(&t, ONE), p(&t, TWO), p(&s, ONE), p(&s, TWO));
        let e = |x: &Word, y: &Word| self.fam.e(&x.concat(y));
        SimplicialParts {
            s1: Formula::and([e(&t1, &s1), e(&t1, &s2), e(&t1, &s), e(&t2, &s1), e(&t2, &s2), e(&t2, &s)]),
            s2: Formula::and([e(&t, &s1), e(&t, &s2)]),
        }
    }
}

/// Process on `{1,2,3}^{2n}` with `D_{t⌢s} = S¹ ∩ S²`.
pub fn example_simplicial(n: usize, eps: &Rational) -> Result<CubeProcess> {
    check_epsilon(eps)?;
    if n == 0 {
        return Err(Error::Invalid("n must be positive".into()));
    }
    let sf = SimplicialFamily::new(n, eps)?;
    let space = sf.fam.space.clone();
    CubeProcess::from_fn(Alphabet::numeric(3), 2 * n, space, |z| {
        let p = sf.parts(z);
        ev(Formula::and([p.s1, p.s2]))
    })
}

/// `S¹_{t⌢s}` and `S²_{t⌢s}` of the two-block example, over the same
/// generators as [`example_simplicial`].
pub fn simplicial_parts(n: usize, eps: &Rational, z: &Word) -> Result<SimplicialParts> {
    if z.len() != 2 * n {
        return Err(Error::LengthMismatch { expected: 2 * n, got: z.len() });
    }
    z.check(3)?;
    Ok(SimplicialFamily::new(n, eps)?.parts(z))
}

/// `G_{t,s}`: the nine points `t^a⌢s^b` with `a, b ∈ {3→1, 3→2, id}`.
pub fn simplicial_witness_set(t: &Word, s: &Word) -> Vec<Word> {
    let vs = |u: &Word| [project_or_same(u, THREE, ONE), project_or_same(u, THREE, TWO), u.clone()];
    let mut out = Vec::with_capacity(9);
    for x in vs(t) {
        for y in vs(s) {
            out.push(x.concat(&y));
        }
    }
    out
}

/// One fresh generator per point.
pub fn independent_process(alphabet: Alphabet, n: usize, eps: &Rational) -> Result<CubeProcess> {
    check_epsilon(eps)?;
    let k = alphabet.k();
    cube_size(k, n)?;
    let words: Vec<Word> = all_words(k, n).collect();
    let fam = Family::new(&alphabet, words, eps)?;
    let space = fam.space.clone();
    CubeProcess::from_fn(alphabet, n, space, |t| ev(fam.e(t)))
}

/// An atom space with `atoms` atoms and random positive integer weights.
pub fn random_atom_space(atoms: usize, seed: u64) -> Result<Space> {
    if atoms == 0 {
        return Err(Error::Empty("atoms"));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let raw: Vec<i64> = (0..atoms).map(|_| rng.random_range(1..=8)).collect();
    let total: i64 = raw.iter().sum();
    Ok(Space::Atoms(AtomSpace::new(raw.into_iter().map(|x| Rational::new(x, total)).collect())?))
}

/// Random events on `space`: masks with each atom kept with probability 1/2,
/// or conjunctions of one to three random literals.
pub fn random_process(alphabet: Alphabet, n: usize, space: Arc<Space>, seed: u64) -> Result<CubeProcess> {
    let k = alphabet.k();
    let size = cube_size(k, n)?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut events = Vec::with_capacity(size);
    for _ in 0..size {
        events.push(match &*space {
            Space::Atoms(a) => {
                let ones: Vec<usize> = (0..a.atom_count()).filter(|_| rng.random_bool(0.5)).collect();
                Event::Mask(Mask::from_atoms(a.atom_count(), ones)?)
            }
            Space::Bernoulli(b) => {
                let g = b.generator_count() as u32;
                if g == 0 {
                    return Err(Error::Empty("generators"));
                }
                let width = rng.random_range(1..=3);
                let lits: Vec<Formula> = (0..width)
                    .map(|_| {
                        let f = Formula::gen(rng.random_range(0..g));
                        if rng.random_bool(0.25) {
                            Formula::not(&f)
                        } else {
                            f
                        }
                    })
                    .collect();
                Event::Formula(Formula::and(lits))
            }
        });
    }
    CubeProcess::new(alphabet, n, space, events)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypercube::variable_words;

    fn half() -> Rational {
        Rational::new(1, 2)
    }

    #[test]
    fn intro_marginals_split_by_three() {
        let e = Rational::new(1, 3);
        let p = example_intro(3, &e).unwrap();
        let mut pure = 0;
        for t in all_words(3, 3) {
            let pr = p.prob(&t);
            if t.contains(THREE) {
                assert_eq!(pr, e.pow(2));
            } else {
                assert_eq!(pr, e);
                pure += 1;
            }
        }
        assert_eq!(pure, 8);
    }

    #[test]
    fn intro_lines_with_constant_three() {
        let p = example_intro(3, &half()).unwrap();
        let sp = p.space().clone();
        for v in variable_words(3, 3).unwrap() {
            let line = v.line_of(3).unwrap();
            if v.contains_const(THREE) {
                assert_eq!(p.joint_prob(&line), Rational::new(1, 16));
            }
            let all = sp.and(&line.iter().map(|t| p.event(t)).collect::<Vec<_>>()).unwrap();
            let two = sp.and(&[p.event(&v.at(ONE)), p.event(&v.at(TWO))]).unwrap();
            assert!(sp.events_equal(&all, &two).unwrap());
        }
    }

    #[test]
    fn restricted_pairs() {
        let e = Rational::new(1, 4);
        let p = example_intro_restricted(3, &e).unwrap();
        assert_eq!(p.n(), 2);
        for v in variable_words(3, 2).unwrap() {
            assert_eq!(p.joint_prob(&[v.at(ONE), v.at(TWO)]), e.pow(4));
            assert_eq!(p.joint_prob(&[v.at(ONE), v.at(THREE)]), e.pow(3));
            assert_eq!(p.joint_prob(&v.line_of(3).unwrap()), e.pow(4));
        }
    }

    #[test]
    fn one_sep_marginals_and_witness_sets() {
        let e = half();
        let n = 5;
        let p = example_one_sep(n, &e, false).unwrap();
        for t in all_words(3, n) {
            let pure_tail = !t.slice(3, n).contains(THREE);
            let expect = if pure_tail && t.slice(0, 3) != prefix_223() { e.clone() } else { e.pow(2) };
            assert_eq!(p.prob(&t), expect, "{t:?}");
        }
        let tau = crate::invariants::TypeSet::from_elements([
            w(&[ONE, TWO, ONE]),
            w(&[TWO, ONE, TWO]),
            w(&[TWO, TWO, THREE]),
        ])
        .unwrap();
        for wd in all_words(3, n - 4) {
            let g = one_sep_witness_set(&wd);
            assert_eq!(crate::invariants::type_of_set(&g).unwrap(), tau);
            assert_eq!(p.joint_prob(&g), e.pow(4));
        }
        assert!(example_one_sep(4, &e, false).is_err());
        assert!(example_one_sep(4, &e, true).is_ok());
    }

    #[test]
    fn simplicial_marginals_and_nine_point_sets() {
        let e = half();
        let n = 2;
        let p = example_simplicial(n, &e).unwrap();
        match &**p.space() {
            Space::Bernoulli(b) => assert_eq!(b.generator_count(), 56),
            _ => panic!(),
        }
        for z in all_words(3, 2 * n) {
            let c = [z.slice(0, n), z.slice(n, 2 * n)].iter().filter(|u| u.contains(THREE)).count();
            let expect = match c {
                2 => e.pow(8),
                1 => e.pow(3),
                _ => e.clone(),
            };
            assert_eq!(p.prob(&z), expect);
        }
        let t = w(&[THREE, ONE]);
        let s = w(&[TWO, THREE]);
        let g = simplicial_witness_set(&t, &s);
        assert_eq!(p.joint_prob(&g), e.pow(8));
        let sp = p.space();
        let all = sp.and(&g.iter().map(|z| p.event(z)).collect::<Vec<_>>()).unwrap();
        assert!(sp.events_equal(&all, p.event(&t.concat(&s))).unwrap());
    }

    #[test]
    fn random_process_is_reproducible() {
        let sp = Arc::new(random_atom_space(6, 3).unwrap());
        let a = random_process(Alphabet::numeric(3), 2, sp.clone(), 11).unwrap();
        let b = random_process(Alphabet::numeric(3), 2, sp, 11).unwrap();
        assert_eq!(a.events(), b.events());
    }

    #[test]
    fn extreme_example_repeats_lines() {
        let p = example_remark_extreme(2, &half()).unwrap();
        for v in variable_words(3, 2).unwrap() {
            assert!(p.space().events_equal(p.event(&v.at(THREE)), p.event(&v.at(ONE))).unwrap());
        }
    }
}
