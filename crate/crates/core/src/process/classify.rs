//! Pseudorandom / supercorrelated / subcorrelated classification.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypercube::{variable_words, CombinatorialSpace, Sym, VariableWord, Word};
use crate::invariants::{realizations, TypeSet};
use crate::process::stationarity::{argmax, argmin};
use crate::process::CubeProcess;
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Target {
    Gamma(Vec<Sym>),
    Type(TypeSet),
}

impl Target {
    pub fn size(&self) -> usize {
        match self {
            Target::Gamma(g) => g.len(),
            Target::Type(t) => t.len(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "label", rename_all = "lowercase")]
pub enum Label {
    Pseudorandom,
    /// `margin = min_corr - expected > 0`.
    Super {
        margin: Rational,
    },
    /// `margin = expected - max_corr > 0`.
    Sub {
        margin: Rational,
    },
    Mixed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub target: Target,
    pub theta: Rational,
    pub expected: Rational,
    pub min_corr: Rational,
    pub max_corr: Rational,
    pub instances: usize,
    pub label: Label,
}

impl ClassificationReport {
    fn build(target: Target, theta: &Rational, eps: &Rational, vals: &[Rational]) -> Result<ClassificationReport> {
        let (Some(imin), Some(imax)) = (argmin(vals), argmax(vals)) else {
            return Err(Error::NoRealization("no instances of the target".into()));
        };
        let expected = eps.pow(target.size() as u32);
        let min_corr = vals[imin].clone();
        let max_corr = vals[imax].clone();
        let worst = (&max_corr - &expected).abs().max((&min_corr - &expected).abs());
        let label = if worst <= *theta {
            Label::Pseudorandom
        } else if min_corr > expected {
            Label::Super { margin: &min_corr - &expected }
        } else if max_corr < expected {
            Label::Sub { margin: &expected - &max_corr }
        } else {
            Label::Mixed
        };
        Ok(ClassificationReport {
            target,
            theta: theta.clone(),
            expected,
            min_corr,
            max_corr,
            instances: vals.len(),
            label,
        })
    }

    pub fn is_pseudorandom(&self) -> bool {
        self.label == Label::Pseudorandom
    }

    /// Largest `|corr - expected|`.
    pub fn max_deviation(&self) -> Rational {
        (&self.max_corr - &self.expected).abs().max((&self.min_corr - &self.expected).abs())
    }
}

/// `P(∩_{α∈Γ} D_{v(α)})` for every variable word `v`, in enumeration order.
pub fn gamma_correlations(proc: &CubeProcess, gamma: &[Sym]) -> Result<Vec<(VariableWord, Rational)>> {
    check_gamma(proc, gamma)?;
    let words = variable_words(proc.k(), proc.n())?;
    Ok(words
        .into_par_iter()
        .map(|v| {
            let pts: Vec<Word> = gamma.iter().map(|&a| v.at(a)).collect();
            let p = proc.joint_prob(&pts);
            (v, p)
        })
        .collect())
}

fn check_gamma(proc: &CubeProcess, gamma: &[Sym]) -> Result<()> {
    if gamma.is_empty() {
        return Err(Error::Empty("gamma"));
    }
    if let Some(&a) = gamma.iter().find(|&&a| a as usize >= proc.k()) {
        return Err(Error::ForeignSymbol(a as usize));
    }
    let mut g = gamma.to_vec();
    g.sort();
    g.dedup();
    if g.len() != gamma.len() {
        return Err(Error::Invalid("gamma has repeated symbols".into()));
    }
    Ok(())
}

/// `P(∩_{G} D_t)` for every `G` with `τ(G) = τ`.
pub fn type_correlations(proc: &CubeProcess, tau: &TypeSet) -> Result<Vec<(Vec<Word>, Rational)>> {
    let sets = realizations(tau, proc.k(), proc.n())?;
    if sets.is_empty() {
        return Err(Error::NoRealization(format!("{tau:?} has no realization in A^{}", proc.n())));
    }
    Ok(sets
        .into_par_iter()
        .map(|g| {
            let p = proc.joint_prob(&g);
            (g, p)
        })
        .collect())
}

pub fn classify_gamma(
    proc: &CubeProcess,
    gamma: &[Sym],
    theta: &Rational,
    eps: &Rational,
) -> Result<ClassificationReport> {
    let vals: Vec<Rational> = gamma_correlations(proc, gamma)?.into_iter().map(|(_, p)| p).collect();
    ClassificationReport::build(Target::Gamma(gamma.to_vec()), theta, eps, &vals)
}

pub fn classify_type(
    proc: &CubeProcess,
    tau: &TypeSet,
    theta: &Rational,
    eps: &Rational,
) -> Result<ClassificationReport> {
    let vals: Vec<Rational> = type_correlations(proc, tau)?.into_iter().map(|(_, p)| p).collect();
    ClassificationReport::build(Target::Type(tau.clone()), theta, eps, &vals)
}

/// `|P(∩_{Γ1} D_{v1(α)} ∩ ∩_{Γ2} D^c_{v1(α)}) - (same at v2)|`.
pub fn boolean_stability_check(
    proc: &CubeProcess,
    gamma1: &[Sym],
    gamma2: &[Sym],
    v1: &VariableWord,
    v2: &VariableWord,
) -> Result<Rational> {
    if gamma1.iter().any(|a| gamma2.contains(a)) {
        return Err(Error::Invalid("the two symbol sets overlap".into()));
    }
    let at = |v: &VariableWord| {
        let pos: Vec<Word> = gamma1.iter().map(|&a| v.at(a)).collect();
        let neg: Vec<Word> = gamma2.iter().map(|&a| v.at(a)).collect();
        let pr: Vec<&Word> = pos.iter().collect();
        let nr: Vec<&Word> = neg.iter().collect();
        proc.joint_with_complements(&pr, &nr)
    };
    Ok((at(v1) - at(v2)).abs())
}

/// The type version: points of `I_V(Q)` kept, points of `I_V(τ \ Q)`
/// complemented, compared across two subspaces of dimension `dim τ`.
pub fn boolean_stability_types(
    proc: &CubeProcess,
    tau: &TypeSet,
    q: &[Word],
    v1: &CombinatorialSpace,
    v2: &CombinatorialSpace,
) -> Result<Rational> {
    if q.iter().any(|s| !tau.elements.contains(s)) {
        return Err(Error::Invalid("Q is not a subset of the type".into()));
    }
    for v in [v1, v2] {
        if v.dim() != tau.dim || v.ambient_n() != proc.n() {
            return Err(Error::Invalid("subspace dimensions do not match the type".into()));
        }
    }
    let at = |v: &CombinatorialSpace| {
        let pos: Vec<Word> = q.iter().map(|s| v.iso_unchecked(s)).collect();
        let neg: Vec<Word> = tau.elements.iter().filter(|s| !q.contains(s)).map(|s| v.iso_unchecked(s)).collect();
        let pr: Vec<&Word> = pos.iter().collect();
        let nr: Vec<&Word> = neg.iter().collect();
        proc.joint_with_complements(&pr, &nr)
    };
    Ok((at(v1) - at(v2)).abs())
}
