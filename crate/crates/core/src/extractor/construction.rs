//! The subspace `V` and the maps `T_j` built from a separated tuple.

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypercube::{all_words, project_or_same, CombinatorialSpace, Entry, Sym, VariableWord, Word};
use crate::invariants::{is_separated, separation_index_tuple, type_of_tuple, TypeTuple};

/// Exhaustive below this many points of `V`, sampled above.
pub const EXHAUSTIVE_POINTS: usize = 81;
pub const SAMPLED_POINTS: usize = 1000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactCheck {
    pub points: usize,
    pub subsets: usize,
    pub exhaustive: bool,
    pub violations: usize,
    /// Preimage of the point and the 0-based index subset.
    pub first_violation: Option<(Word, Vec<usize>)>,
}

/// Block data for a tuple `t_1, ..., t_{p+1}`; with one block this is the
/// one-separated construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Construction {
    pub tuple: Vec<Word>,
    /// Columns `s_j` of the type, in tuple order.
    pub columns: Vec<Word>,
    pub d: usize,
    pub n: usize,
    /// 0-based coordinates `ι_1 < ... < ι_ℓ` of the type.
    pub iotas: Vec<usize>,
    pub betas: Vec<Sym>,
    pub r: Vec<usize>,
    /// `segments[j][l] = y_j^(l+1)`; the last entry is the tail after `ι_ℓ`.
    pub segments: Vec<Vec<Word>>,
    /// Length of the constant suffix filling `A^n` when `r < n - d`.
    pub pad: usize,
    pub v: CombinatorialSpace,
    pub fact: FactCheck,
}

impl Construction {
    pub fn p(&self) -> usize {
        self.tuple.len() - 1
    }

    pub fn ell(&self) -> usize {
        self.iotas.len()
    }

    pub fn dim(&self) -> usize {
        self.r.iter().sum()
    }

    /// `s_j(ι_l)`.
    pub fn symbol(&self, j: usize, l: usize) -> Sym {
        self.columns[j].0[self.iotas[l]]
    }

    pub fn iota(&self) -> usize {
        self.iotas[0]
    }

    pub fn beta(&self) -> Sym {
        self.betas[0]
    }

    /// `β_j = s_j(ι)` for the first block.
    pub fn block_symbols(&self, l: usize) -> Vec<Sym> {
        (0..self.p()).map(|j| self.symbol(j, l)).collect()
    }

    /// Distinct `β_j` of the first block, sorted.
    pub fn gamma(&self) -> Vec<Sym> {
        let mut g = self.block_symbols(0);
        g.sort();
        g.dedup();
        g
    }

    /// Prefix `x_j` and suffix `y_j` of a one-block construction.
    pub fn split(&self, j: usize) -> (Word, Word) {
        (self.segments[j][0].clone(), self.segments[j][1].clone())
    }

    /// Blocks `I_l` as 0-based coordinates of `A^r`.
    pub fn intervals(&self) -> Vec<Vec<usize>> {
        let mut start = 0;
        self.r
            .iter()
            .map(|&len| {
                let b = (start..start + len).collect();
                start += len;
                b
            })
            .collect()
    }

    /// First block in which `t_j` differs from `t_{p+1}`, with the symbol there.
    pub fn block_of(&self, j: usize) -> Option<(usize, Sym)> {
        (0..self.ell()).find(|&l| self.symbol(j, l) != self.betas[l]).map(|l| (l, self.symbol(j, l)))
    }

    /// `T_j(I_V(z))` for `z ∈ A^r`, `j` 0-based.
    pub fn map(&self, j: usize, z: &Word) -> Word {
        let mut out = Vec::with_capacity(self.n);
        let mut at = 0;
        for l in 0..self.ell() {
            out.extend_from_slice(&self.segments[j][l].0);
            let block = z.slice(at, at + self.r[l]);
            at += self.r[l];
            out.extend_from_slice(&project_or_same(&block, self.betas[l], self.symbol(j, l)).0);
        }
        out.extend_from_slice(&self.segments[j][self.ell()].0);
        out.extend(std::iter::repeat_n(0, self.pad));
        Word(out)
    }

    /// `I_V(z)`.
    pub fn point(&self, z: &Word) -> Word {
        self.v.iso_unchecked(z)
    }
}

fn first_unseparated(tuple: &[Word], ell: usize) -> usize {
    (1..tuple.len()).find(|&j| !is_separated(&tuple[..=j], ell)).unwrap_or(0)
}

/// One-block construction for a 1-separated tuple of distinct words.
pub fn one_sep_construction(tuple: &[Word], k: usize, seed: u64) -> Result<Construction> {
    if tuple.len() < 2 {
        return Err(Error::Invalid("the construction needs at least two words".into()));
    }
    type_of_tuple(tuple)?;
    if !is_separated(tuple, 1) {
        return Err(Error::NotSeparated { ell: 1, j: first_unseparated(tuple, 1) + 1 });
    }
    let tt = type_of_tuple(tuple)?;
    let n = tuple[0].len();
    if n <= tt.dim {
        return Err(Error::Invalid(format!("no room for V: n = {n} equals the type dimension")));
    }
    let r = vec![n - tt.dim];
    build(tuple, tt, r, k, seed)
}

/// Multi-block construction for a tuple of separation index `r.len()`.
pub fn simplicial_construction(tuple: &[Word], r: &[usize], k: usize, seed: u64) -> Result<Construction> {
    if tuple.len() < 2 {
        return Err(Error::Invalid("the construction needs at least two words".into()));
    }
    if r.is_empty() || r.contains(&0) {
        return Err(Error::Invalid("block sizes must be positive".into()));
    }
    let s = separation_index_tuple(tuple)?.value;
    if s != r.len() {
        return Err(Error::Invalid(format!("tuple has separation index {s}, but {} blocks were given", r.len())));
    }
    let tt = type_of_tuple(tuple)?;
    let n = tuple[0].len();
    let total: usize = r.iter().sum();
    if total + tt.dim > n {
        return Err(Error::Invalid(format!("block sizes sum to {total}, more than n - d = {}", n - tt.dim)));
    }
    build(tuple, tt, r.to_vec(), k, seed)
}

fn build(tuple: &[Word], tt: TypeTuple, r: Vec<usize>, k: usize, seed: u64) -> Result<Construction> {
    for t in tuple {
        t.check(k)?;
    }
    let n = tuple[0].len();
    let d = tt.dim;
    let p = tuple.len() - 1;
    let ell = r.len();
    let cols = tt.columns;
    let last = &cols[p];
    let hits = |set: &[usize]| (0..p).all(|j| set.iter().any(|&i| cols[j].0[i] != last.0[i]));
    let iotas: Vec<usize> = (0..d).combinations(ell).find(|c| hits(c)).ok_or(Error::NotSeparated { ell, j: p + 1 })?;
    let betas: Vec<Sym> = iotas.iter().map(|&i| last.0[i]).collect();
    let mut bounds = vec![0];
    bounds.extend(iotas.iter().map(|&i| i + 1));
    bounds.push(d);
    let segments: Vec<Vec<Word>> =
        cols.iter().map(|c| bounds.windows(2).map(|w| c.slice(w[0], w[1])).collect()).collect();
    let pad = n - d - r.iter().sum::<usize>();
    let mut entries = Vec::with_capacity(n);
    let mut var = 0u8;
    for l in 0..ell {
        entries.extend(segments[p][l].0.iter().map(|&s| Entry::Const(s)));
        for _ in 0..r[l] {
            entries.push(Entry::Var(var));
            var += 1;
        }
    }
    entries.extend(segments[p][ell].0.iter().map(|&s| Entry::Const(s)));
    entries.extend(std::iter::repeat_n(Entry::Const(0), pad));
    let v = CombinatorialSpace::new(VariableWord::new(entries)?);
    let mut c = Construction {
        tuple: tuple.to_vec(),
        columns: cols,
        d,
        n,
        iotas,
        betas,
        r,
        segments,
        pad,
        v,
        fact: FactCheck { points: 0, subsets: 0, exhaustive: true, violations: 0, first_violation: None },
    };
    c.fact = type_preservation(&c, k, seed);
    if let Some((z, set)) = &c.fact.first_violation {
        return Err(Error::Invalid(format!(
            "type preservation fails at {:?} for indices {:?}",
            c.point(z),
            set.iter().map(|j| j + 1).collect::<Vec<_>>()
        )));
    }
    Ok(c)
}

/// Every index subset keeps its type under the maps, with and without the
/// point itself appended.
pub fn type_preservation(c: &Construction, k: usize, seed: u64) -> FactCheck {
    let p = c.p();
    let r = c.dim();
    let total = k.checked_pow(r as u32);
    let exhaustive = total.is_some_and(|t| t <= EXHAUSTIVE_POINTS);
    let points: Vec<Word> = if exhaustive {
        all_words(k, r).collect()
    } else {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        (0..SAMPLED_POINTS).map(|_| Word((0..r).map(|_| rng.random_range(0..k as Sym)).collect())).collect()
    };
    let subsets: Vec<Vec<usize>> = (1..=p).flat_map(|q| (0..p).combinations(q)).collect();
    let expected: Vec<(TypeTuple, TypeTuple)> = subsets
        .iter()
        .map(|set| {
            let mut with: Vec<Word> = set.iter().map(|&j| c.tuple[j].clone()).collect();
            let without = type_of_tuple(&with).expect("distinct words");
            with.push(c.tuple[p].clone());
            (type_of_tuple(&with).expect("distinct words"), without)
        })
        .collect();
    let mut out =
        FactCheck { points: points.len(), subsets: subsets.len(), exhaustive, violations: 0, first_violation: None };
    for z in &points {
        let t = c.point(z);
        let images: Vec<Word> = (0..p).map(|j| c.map(j, z)).collect();
        for (set, (e_with, e_without)) in subsets.iter().zip(&expected) {
            let mut tup: Vec<Word> = set.iter().map(|&j| images[j].clone()).collect();
            let without = type_of_tuple(&tup);
            tup.push(t.clone());
            let with = type_of_tuple(&tup);
            let ok = with.as_ref().is_ok_and(|x| x == e_with) && without.as_ref().is_ok_and(|x| x == e_without);
            if !ok {
                out.violations += 1;
                if out.first_violation.is_none() {
                    out.first_violation = Some((z.clone(), set.clone()));
                }
            }
        }
    }
    out
}
