//! Exact stationarity moduli and the desk-scale search for stationary subspaces.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypercube::{all_words, enumerate_subspaces, variable_words, CombinatorialSpace, Sym, VariableWord, Word};
use crate::invariants::{realizations, types_up_to, TypeSet};
use crate::process::CubeProcess;
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineModulus {
    pub eta_star: Rational,
    /// `(Γ, word with the largest correlation, word with the smallest)`.
    pub witness: Option<(Vec<Sym>, VariableWord, VariableWord)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeModulus {
    pub eta_star: Rational,
    pub witness: Option<(TypeSet, Vec<Word>, Vec<Word>)>,
    /// True when the realization budget ran out before the sweep finished.
    pub partial: bool,
    pub evaluated: usize,
}

pub(crate) fn nonempty_subsets(k: usize) -> Vec<Vec<Sym>> {
    let mut out: Vec<Vec<Sym>> = (1u32..1 << k).map(|m| (0..k as Sym).filter(|&a| m >> a & 1 == 1).collect()).collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

fn spread_over_words(proc: &CubeProcess, words: &[VariableWord]) -> LineModulus {
    let mut best = LineModulus { eta_star: Rational::zero(), witness: None };
    for gamma in nonempty_subsets(proc.k()) {
        let vals: Vec<Rational> = words
            .par_iter()
            .map(|v| {
                let pts: Vec<Word> = gamma.iter().map(|&a| v.at(a)).collect();
                proc.joint_prob(&pts)
            })
            .collect();
        let (Some(imax), Some(imin)) = (argmax(&vals), argmin(&vals)) else { continue };
        let spread = &vals[imax] - &vals[imin];
        if spread > best.eta_star || best.witness.is_none() {
            best = LineModulus { eta_star: spread, witness: Some((gamma, words[imax].clone(), words[imin].clone())) };
        }
    }
    best
}

/// First index of the largest value.
pub(crate) fn argmax(v: &[Rational]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, x) in v.iter().enumerate() {
        if best.is_none_or(|b| *x > v[b]) {
            best = Some(i);
        }
    }
    best
}

pub(crate) fn argmin(v: &[Rational]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, x) in v.iter().enumerate() {
        if best.is_none_or(|b| *x < v[b]) {
            best = Some(i);
        }
    }
    best
}

/// Largest deviation of line correlations over all `Γ` and all pairs of
/// variable words.
pub fn stationarity_modulus_lines(proc: &CubeProcess) -> LineModulus {
    let words = variable_words(proc.k(), proc.n()).expect("n >= 1");
    spread_over_words(proc, &words)
}

/// The same sweep restricted to variable words containing the constant `letter`.
pub fn stationarity_modulus_lines_filtered(proc: &CubeProcess, letter: Sym) -> LineModulus {
    let words: Vec<VariableWord> =
        variable_words(proc.k(), proc.n()).expect("n >= 1").into_iter().filter(|v| v.contains_const(letter)).collect();
    spread_over_words(proc, &words)
}

/// Largest deviation between sets of equal type, over sets of size at most
/// `kappa` whose type has dimension at most `m`. At most `budget`
/// realizations are evaluated.
pub fn stationarity_modulus_types(proc: &CubeProcess, kappa: usize, m: usize, budget: usize) -> Result<TypeModulus> {
    if kappa == 0 {
        return Err(Error::Invalid("kappa must be positive".into()));
    }
    let m = m.min(proc.n());
    let mut out = TypeModulus { eta_star: Rational::zero(), witness: None, partial: false, evaluated: 0 };
    let mut types = vec![TypeSet::empty_type()];
    types.extend(types_up_to(proc.k(), kappa, m));
    for tau in types {
        let sets = realizations(&tau, proc.k(), proc.n())?;
        if out.evaluated + sets.len() > budget {
            out.partial = true;
            break;
        }
        out.evaluated += sets.len();
        let vals: Vec<Rational> = sets.par_iter().map(|g| proc.joint_prob(g)).collect();
        let (Some(imax), Some(imin)) = (argmax(&vals), argmin(&vals)) else { continue };
        let spread = &vals[imax] - &vals[imin];
        if spread > out.eta_star || out.witness.is_none() {
            out.eta_star = spread;
            out.witness = Some((tau, sets[imax].clone(), sets[imin].clone()));
        }
    }
    Ok(out)
}

/// `(ε, max_t |P(D_t) - ε|)` with `ε` the largest marginal, optionally
/// floored by `eta`.
pub fn base_rate(proc: &CubeProcess, eta_floor: Option<&Rational>) -> (Rational, Rational) {
    let marg: Vec<Rational> = all_words(proc.k(), proc.n()).map(|t| proc.prob(&t)).collect();
    let mut eps = marg.iter().max().cloned().unwrap_or_else(Rational::zero);
    if let Some(e) = eta_floor {
        eps = eps.max(e.clone());
    }
    let dev = marg.iter().map(|p| (p - &eps).abs()).max().unwrap_or_else(Rational::zero);
    (eps, dev)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SearchCriterion {
    Lines,
    Types { kappa: usize, m: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SubspaceSearch {
    Found { space: CombinatorialSpace, modulus: Rational },
    NotFound { best: Option<(CombinatorialSpace, Rational)>, scanned: usize },
}

/// First `m`-dimensional subspace (in enumeration order) whose restriction has
/// modulus at most `eta`, scanning at most `max_subspaces` candidates.
pub fn find_stationary_subspace(
    proc: &CubeProcess,
    m: usize,
    eta: &Rational,
    criterion: SearchCriterion,
    max_subspaces: usize,
) -> Result<SubspaceSearch> {
    let mut best: Option<(CombinatorialSpace, Rational)> = None;
    let mut scanned = 0;
    for v in enumerate_subspaces(proc.k(), proc.n(), m)?.take(max_subspaces) {
        scanned += 1;
        let r = proc.restrict(&v)?;
        let modulus = match criterion {
            SearchCriterion::Lines => stationarity_modulus_lines(&r).eta_star,
            SearchCriterion::Types { kappa, m: tm } => {
                let t = stationarity_modulus_types(&r, kappa, tm, usize::MAX)?;
                t.eta_star
            }
        };
        if modulus <= *eta {
            return Ok(SubspaceSearch::Found { space: v, modulus });
        }
        if best.as_ref().is_none_or(|(_, b)| modulus < *b) {
            best = Some((v, modulus));
        }
    }
    Ok(SubspaceSearch::NotFound { best, scanned })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets_ordered_by_size_then_lex() {
        let s = nonempty_subsets(3);
        assert_eq!(s, vec![vec![0], vec![1], vec![2], vec![0, 1], vec![0, 2], vec![1, 2], vec![0, 1, 2]]);
    }
}
