//! Small-scale density Hales-Jewett experiments: line search, extremal
//! line-free densities, dense sections and the final counting step of the
//! density increment.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extractor::{LineWitness, Transcript};
use crate::hypercube::{
    all_words, cube_size, enumerate_subspaces, variable_words, CombinatorialSpace, VariableWord, Word,
};
use crate::probspace::{materialize, Event, Space};
use crate::process::CubeProcess;
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DenseSet {
    pub k: usize,
    pub n: usize,
    pub members: BTreeSet<Word>,
}

impl DenseSet {
    pub fn new(k: usize, n: usize, members: impl IntoIterator<Item = Word>) -> Result<DenseSet> {
        let members: BTreeSet<Word> = members.into_iter().collect();
        for w in &members {
            if w.len() != n {
                return Err(Error::LengthMismatch { expected: n, got: w.len() });
            }
            w.check(k)?;
        }
        Ok(DenseSet { k, n, members })
    }

    pub fn full(k: usize, n: usize) -> DenseSet {
        DenseSet { k, n, members: all_words(k, n).collect() }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.members.contains(w)
    }

    pub fn density(&self) -> Rational {
        Rational::new(self.members.len() as i64, (self.k as i64).pow(self.n as u32))
    }
}

/// First variable word, in enumeration order, whose line lies in `d`.
pub fn find_line_in_set(d: &DenseSet) -> Result<Option<VariableWord>> {
    if d.members.len() < d.k {
        return Ok(None);
    }
    let words = variable_words(d.k, d.n)?;
    Ok(words.into_par_iter().find_first(|v| (0..d.k).all(|a| d.contains(&v.at(a as u8)))))
}

/// Largest cube handled by the plain exhaustive search.
pub const EXHAUSTIVE_LIMIT: usize = 16;
/// Largest cube handled at all; points are bits of a `u128`.
pub const POINT_LIMIT: usize = 128;
pub const DEFAULT_NODE_BUDGET: u64 = 50_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineFree {
    pub k: usize,
    pub n: usize,
    pub density: Rational,
    pub size: usize,
    pub witness: Vec<Word>,
    /// False when the node budget ran out; `density` is then a lower bound.
    pub exact: bool,
    pub nodes: u64,
}

fn line_masks(k: usize, n: usize) -> Result<Vec<u128>> {
    Ok(variable_words(k, n)?.iter().map(|v| (0..k).fold(0u128, |m, a| m | 1u128 << v.at(a as u8).rank(k))).collect())
}

/// Exact maximum density of a line-free subset of `A^n`.
pub fn max_linefree_density(k: usize, n: usize, node_budget: u64) -> Result<LineFree> {
    let size = cube_size(k, n)?;
    if size > POINT_LIMIT {
        return Err(Error::Budget(format!("{size} points exceed the search limit of {POINT_LIMIT}")));
    }
    let lines = line_masks(k, n)?;
    let (best, nodes, exact) = if size <= EXHAUSTIVE_LIMIT {
        let best = (0u32..1 << size)
            .into_par_iter()
            .filter(|&s| lines.iter().all(|&l| (s as u128) & l != l))
            .max_by_key(|&s| (s.count_ones(), std::cmp::Reverse(s)))
            .unwrap_or(0) as u128;
        (best, 1u64 << size, true)
    } else {
        branch_and_bound(size, &lines, node_budget)
    };
    let witness: Vec<Word> = (0..size).filter(|&i| best >> i & 1 == 1).map(|i| Word::from_rank(i, k, n)).collect();
    Ok(LineFree {
        k,
        n,
        density: Rational::new(witness.len() as i64, size as i64),
        size: witness.len(),
        witness,
        exact,
        nodes,
    })
}

fn branch_and_bound(size: usize, lines: &[u128], budget: u64) -> (u128, u64, bool) {
    // greedy disjoint lines inside each suffix; each costs one point
    let mut forced = vec![0usize; size + 1];
    for i in (0..size).rev() {
        let mut used = 0u128;
        let mut c = 0;
        for l in lines.iter().filter(|l| (l.trailing_zeros() as usize) >= i) {
            if l & used == 0 {
                used |= l;
                c += 1;
            }
        }
        forced[i] = c;
    }
    struct St<'a> {
        size: usize,
        lines: &'a [u128],
        forced: &'a [usize],
        best: u128,
        best_n: usize,
        nodes: u64,
        budget: u64,
    }
    fn go(st: &mut St, i: usize, cur: u128, n: usize) {
        if st.nodes >= st.budget {
            return;
        }
        st.nodes += 1;
        if n > st.best_n {
            st.best = cur;
            st.best_n = n;
        }
        if i == st.size || n + (st.size - i) - st.forced[i] <= st.best_n {
            return;
        }
        let with = cur | 1u128 << i;
        if st.lines.iter().all(|&l| with & l != l) {
            go(st, i + 1, with, n + 1);
        }
        go(st, i + 1, cur, n);
    }
    let mut st = St { size, lines, forced: &forced, best: 0, best_n: 0, nodes: 0, budget };
    go(&mut st, 0, 0, 0);
    let exact = st.nodes < budget;
    (st.best, st.nodes, exact)
}

/// Greedy disjoint packing of `m`-dimensional subspaces lying inside `d`.
/// An experimental utility with no correctness guarantee beyond
/// disjointness and containment.
pub fn greedy_pack(d: &DenseSet, m: usize) -> Result<Vec<CombinatorialSpace>> {
    let mut free = d.members.clone();
    let mut out = Vec::new();
    for v in enumerate_subspaces(d.k, d.n, m)? {
        let pts = v.points(d.k);
        if pts.iter().all(|p| free.contains(p)) {
            for p in &pts {
                free.remove(p);
            }
            out.push(v);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionsOutcome {
    pub found: bool,
    /// The qualifying `(ℓ, V)`, or the best one scanned.
    pub ell: usize,
    pub v: CombinatorialSpace,
    pub worst_section: Rational,
    /// `|D|/k^n - η`.
    pub target: Rational,
    /// Section densities over the points of `V`.
    pub sections: Vec<(Word, Rational)>,
    /// `k^m m / η`; existence is only guaranteed when `n` reaches it.
    pub threshold: Option<Rational>,
    pub threshold_met: bool,
    pub scanned: usize,
}

/// Scan `ℓ = m..n-1` and the `m`-dimensional subspaces of `A^ℓ` for one whose
/// sections all have density at least `|D|/k^n - η`.
pub fn dense_sections_search(d: &DenseSet, m: usize, eta: &Rational) -> Result<SectionsOutcome> {
    let (k, n) = (d.k, d.n);
    if m == 0 || m >= n {
        return Err(Error::Invalid(format!("need 1 <= m <= n - 1, got m = {m}, n = {n}")));
    }
    if eta.is_negative() {
        return Err(Error::Invalid("eta must be nonnegative".into()));
    }
    let target = d.density() - eta;
    let threshold = (!eta.is_zero()).then(|| Rational::from((k as i64).pow(m as u32) * m as i64) / eta);
    let threshold_met = threshold.as_ref().is_some_and(|t| Rational::from(n as i64) >= *t);
    let mut best: Option<(usize, CombinatorialSpace, Rational)> = None;
    let mut scanned = 0;
    for ell in m..n {
        let tail = cube_size(k, n - ell)? as i64;
        let mut counts = vec![0i64; cube_size(k, ell)?];
        for w in &d.members {
            counts[w.slice(0, ell).rank(k)] += 1;
        }
        let spaces: Vec<CombinatorialSpace> = enumerate_subspaces(k, ell, m)?.collect();
        scanned += spaces.len();
        let worst: Vec<i64> =
            spaces.par_iter().map(|v| v.points(k).iter().map(|t| counts[t.rank(k)]).min().unwrap_or(0)).collect();
        let hit = worst.iter().position(|&c| Rational::new(c, tail) >= target);
        if let Some(i) = hit {
            let v = spaces[i].clone();
            let sections = v.points(k).into_iter().map(|t| {
                let c = counts[t.rank(k)];
                (t, Rational::new(c, tail))
            });
            return Ok(SectionsOutcome {
                found: true,
                ell,
                sections: sections.collect(),
                v,
                worst_section: Rational::new(worst[i], tail),
                target,
                threshold,
                threshold_met,
                scanned,
            });
        }
        if let Some((i, &c)) = worst.iter().enumerate().rev().max_by_key(|(_, &c)| c) {
            let r = Rational::new(c, tail);
            if best.as_ref().is_none_or(|(_, _, b)| r > *b) {
                best = Some((ell, spaces[i].clone(), r));
            }
        }
    }
    let (ell, v, worst_section) = best.expect("at least one subspace");
    let tail = cube_size(k, n - ell)? as i64;
    let sections = v
        .points(k)
        .into_iter()
        .map(|t| {
            let c = d.members.iter().filter(|w| w.slice(0, ell) == t).count() as i64;
            (t, Rational::new(c, tail))
        })
        .collect();
    Ok(SectionsOutcome { found: false, ell, v, worst_section, target, threshold, threshold_met, scanned, sections })
}

/// `D` and `S` as subsets of `rows × tail`, both uniform.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IncrementInstance {
    pub rows: Vec<Word>,
    pub tail: Vec<Word>,
    /// `d[t][s]`.
    pub d: Vec<Vec<bool>>,
    pub s: Vec<Vec<bool>>,
}

impl IncrementInstance {
    fn check(&self) -> Result<()> {
        if self.rows.is_empty() || self.tail.is_empty() {
            return Err(Error::Empty("increment instance"));
        }
        for grid in [&self.d, &self.s] {
            if grid.len() != self.rows.len() {
                return Err(Error::LengthMismatch { expected: self.rows.len(), got: grid.len() });
            }
            if let Some(r) = grid.iter().find(|r| r.len() != self.tail.len()) {
                return Err(Error::LengthMismatch { expected: self.tail.len(), got: r.len() });
            }
        }
        Ok(())
    }

    fn count(&self, f: impl Fn(usize, usize) -> bool) -> i64 {
        let mut c = 0;
        for t in 0..self.rows.len() {
            for s in 0..self.tail.len() {
                if f(t, s) {
                    c += 1;
                }
            }
        }
        c
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IncrementParams {
    pub epsilon: Rational,
    pub sigma: Rational,
    /// One less than the alphabet size.
    pub k: usize,
}

impl IncrementParams {
    fn four_k(&self) -> Rational {
        Rational::from(4).pow(self.k as u32)
    }

    /// `ε^k/(4(k+1))` and `ε + σ/4^k`.
    pub fn entry_bounds(&self) -> (Rational, Rational) {
        let k1 = Rational::from(self.k as i64 + 1);
        (self.epsilon.pow(self.k as u32) / (Rational::from(4) * &k1), &self.epsilon + &self.sigma / self.four_k())
    }

    /// `ε^k σ/(2(k+1)4^(k+1))`.
    pub fn small_section(&self) -> Rational {
        let k1 = Rational::from(self.k as i64 + 1);
        self.epsilon.pow(self.k as u32) * &self.sigma / (Rational::from(8) * k1 * self.four_k())
    }

    /// `ε + σ/(2·4^k)`.
    pub fn target(&self) -> Rational {
        &self.epsilon + &self.sigma / (Rational::from(2) * self.four_k())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IncrementOutcome {
    pub index: usize,
    pub s: Word,
    /// `P_2(D^s | S^s)`.
    pub value: Rational,
    pub target: Rational,
    /// Tail points with a small `S`-section.
    pub small: Vec<usize>,
    pub p_s: Rational,
    pub p_d_given_s: Rational,
    pub p_c_given_s: Rational,
    /// `P_3(D | S \ C)`, the weighted average of the section values off `B`.
    pub average: Rational,
    pub transcript: Transcript,
}

/// The first-moment step: find a tail point off the small-section set whose
/// relative density of `D` in `S` clears `ε + σ/(2·4^k)`.
pub fn density_increment_step(inst: &IncrementInstance, params: &IncrementParams) -> Result<IncrementOutcome> {
    inst.check()?;
    if params.k == 0 {
        return Err(Error::Invalid("k must be positive".into()));
    }
    let rows = inst.rows.len() as i64;
    let total = rows * inst.tail.len() as i64;
    let s_count = inst.count(|t, s| inst.s[t][s]);
    let ds_count = inst.count(|t, s| inst.s[t][s] && inst.d[t][s]);
    let p_s = Rational::new(s_count, total);
    let mut tr = Transcript::default();
    let (ls, ld) = params.entry_bounds();
    tr.ge("entry bound on P3(S)", None, p_s.clone(), ls);
    let p_d_given_s = if s_count == 0 { Rational::zero() } else { Rational::new(ds_count, s_count) };
    tr.ge("entry bound on P3(D | S)", None, p_d_given_s.clone(), ld);
    tr.require()?;

    let cut = params.small_section();
    let cols: Vec<(i64, i64)> = (0..inst.tail.len())
        .map(|s| {
            let sc = (0..inst.rows.len()).filter(|&t| inst.s[t][s]).count() as i64;
            let dc = (0..inst.rows.len()).filter(|&t| inst.s[t][s] && inst.d[t][s]).count() as i64;
            (sc, dc)
        })
        .collect();
    let small: Vec<usize> = (0..cols.len()).filter(|&s| Rational::new(cols[s].0, rows) <= cut).collect();
    let c_count: i64 = small.iter().map(|&s| cols[s].0).sum();
    let p_c_given_s = Rational::new(c_count, s_count);
    tr.le("P3(C | S) small", None, p_c_given_s.clone(), &params.sigma / (Rational::from(2) * params.four_k()));
    let rest = s_count - c_count;
    let rest_d: i64 = (0..cols.len()).filter(|s| !small.contains(s)).map(|s| cols[s].1).sum();
    let average = if rest == 0 { Rational::zero() } else { Rational::new(rest_d, rest) };
    let target = params.target();
    tr.ge("P3(D | S minus C) first moment", None, average.clone(), target.clone());
    tr.require()?;

    let index = (0..cols.len())
        .find(|s| !small.contains(s) && cols[*s].0 > 0 && Rational::new(cols[*s].1, cols[*s].0) >= target)
        .ok_or_else(|| Error::Invalid("no section clears the target although the average does".into()))?;
    let value = Rational::new(cols[index].1, cols[index].0);
    tr.ge("P2(D^s | S^s)", Some(&inst.tail[index]), value.clone(), target.clone());
    Ok(IncrementOutcome {
        index,
        s: inst.tail[index].clone(),
        value,
        target,
        small,
        p_s,
        p_d_given_s,
        p_c_given_s,
        average,
        transcript: tr,
    })
}

/// A seeded instance on `rows × tail` points. With `satisfying`, cells are
/// redrawn until the entry bounds hold; otherwise `S` is a single cell.
pub fn seeded_instance(
    params: &IncrementParams,
    rows: usize,
    tail: usize,
    satisfying: bool,
    seed: u64,
) -> Result<IncrementInstance> {
    if rows == 0 || tail == 0 {
        return Err(Error::Empty("increment instance"));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let eps = params.epsilon.to_f64();
    let lift = (params.sigma.to_f64() * 4.0).min(1.0 - eps);
    let label = |i: usize, len: usize| Word::from_rank(i, len.max(2), 1);
    let row_words: Vec<Word> = (0..rows).map(|i| label(i, rows)).collect();
    let tail_words: Vec<Word> = (0..tail).map(|i| label(i, tail)).collect();
    for _ in 0..1000 {
        let (s, d) = if satisfying {
            let s: Vec<Vec<bool>> = (0..rows).map(|_| (0..tail).map(|_| rng.random_bool(0.5)).collect()).collect();
            let d = s
                .iter()
                .map(|r| r.iter().map(|&x| rng.random_bool(if x { eps + lift } else { eps })).collect())
                .collect();
            (s, d)
        } else {
            let mut s = vec![vec![false; tail]; rows];
            s[rng.random_range(0..rows)][rng.random_range(0..tail)] = true;
            let d = (0..rows).map(|_| (0..tail).map(|_| rng.random_bool(eps)).collect()).collect();
            (s, d)
        };
        let inst = IncrementInstance { rows: row_words.clone(), tail: tail_words.clone(), d, s };
        if !satisfying {
            return Ok(inst);
        }
        let (ls, ld) = params.entry_bounds();
        let sc = inst.count(|t, x| inst.s[t][x]);
        let dc = inst.count(|t, x| inst.s[t][x] && inst.d[t][x]);
        if sc > 0 && Rational::new(sc, (rows * tail) as i64) >= ls && Rational::new(dc, sc) >= ld {
            return Ok(inst);
        }
    }
    Err(Error::Budget("no satisfying instance after 1000 draws".into()))
}

/// The instance given by a line witness: rows are the points starting with
/// `β`, the tail is the atoms of the materialized space.
pub fn instance_from_line_witness(proc: &CubeProcess, w: &LineWitness) -> Result<IncrementInstance> {
    let b = match proc.space().as_ref() {
        Space::Bernoulli(b) => b,
        Space::Atoms(_) => return Err(Error::Invalid("expected a Bernoulli family".into())),
    };
    let gens: Vec<u32> = (0..b.generator_count() as u32).collect();
    let mat = materialize(b, &gens)?;
    let atoms = mat.space.atom_count();
    let mask = |e: &Event| match e {
        Event::Formula(f) => mat.formula_to_mask(f),
        Event::Mask(m) => Ok(m.clone()),
    };
    let rows: Vec<Word> = all_words(proc.k(), proc.n()).filter(|t| t.0[0] == w.beta).collect();
    let mut d = Vec::with_capacity(rows.len());
    let mut s = Vec::with_capacity(rows.len());
    for t in &rows {
        let dm = mask(proc.event(t))?;
        let sm = mask(w.s.event(t))?;
        d.push((0..atoms).map(|i| dm.get(i)).collect());
        s.push((0..atoms).map(|i| sm.get(i)).collect());
    }
    let tail = (0..atoms).map(|i| Word::from_rank(i, 2.max(atoms), 1)).collect();
    Ok(IncrementInstance { rows, tail, d, s })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(v: &[u8]) -> Word {
        Word(v.iter().map(|x| x - 1).collect())
    }

    #[test]
    fn line_search() {
        let d = DenseSet::new(2, 2, [w(&[1, 1]), w(&[2, 2])]).unwrap();
        assert_eq!(format!("{:?}", find_line_in_set(&d).unwrap().unwrap()), "(x1,x1)");
        let d = DenseSet::new(2, 2, [w(&[1, 2]), w(&[2, 1])]).unwrap();
        assert!(find_line_in_set(&d).unwrap().is_none());
        assert!(find_line_in_set(&DenseSet::new(2, 2, []).unwrap()).unwrap().is_none());
    }

    #[test]
    fn small_linefree() {
        let r = max_linefree_density(2, 2, DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!(r.density, Rational::new(1, 2));
        assert_eq!(r.witness, vec![w(&[1, 2]), w(&[2, 1])]);
        let r = max_linefree_density(3, 2, DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!(r.size, 6);
    }

    #[test]
    fn bnb_agrees_with_exhaustive() {
        for (k, n) in [(2, 3), (2, 4), (3, 2)] {
            let size = cube_size(k, n).unwrap();
            let (best, _, exact) = branch_and_bound(size, &line_masks(k, n).unwrap(), DEFAULT_NODE_BUDGET);
            assert!(exact);
            let r = max_linefree_density(k, n, DEFAULT_NODE_BUDGET).unwrap();
            assert_eq!(best.count_ones() as usize, r.size);
        }
    }

    #[test]
    fn sections_upper_half() {
        let d = DenseSet::new(2, 8, all_words(2, 8).filter(|t| t.0[0] == 1)).unwrap();
        let out = dense_sections_search(&d, 1, &Rational::new(1, 4)).unwrap();
        assert!(out.found);
        assert_eq!(out.ell, 2);
        assert_eq!(format!("{:?}", out.v.generator()), "(2,x1)");
        assert!(out.sections.iter().all(|(_, r)| r.is_one()));
        let out = dense_sections_search(&DenseSet::new(2, 4, []).unwrap(), 1, &Rational::new(1, 4)).unwrap();
        assert!(out.found && out.ell == 1);
    }

    #[test]
    fn uniform_increment() {
        let p = IncrementParams { epsilon: Rational::new(1, 2), sigma: Rational::new(1, 4), k: 1 };
        // every row has S everywhere and D on 3 of 4 tail points
        let tail: Vec<Word> = (0..4).map(|i| Word::from_rank(i, 4, 1)).collect();
        let inst = IncrementInstance {
            rows: vec![w(&[1]), w(&[2])],
            tail,
            d: vec![vec![true, true, true, false], vec![true, false, true, true]],
            s: vec![vec![true; 4]; 2],
        };
        let out = density_increment_step(&inst, &p).unwrap();
        assert!(out.value >= p.target());
        assert_eq!(out.index, 0);
        let bad = seeded_instance(&p, 8, 8, false, 1).unwrap();
        match density_increment_step(&bad, &p) {
            Err(Error::Inequality { name, .. }) => assert_eq!(name, "entry bound on P3(S)"),
            other => panic!("{other:?}"),
        }
    }
}
