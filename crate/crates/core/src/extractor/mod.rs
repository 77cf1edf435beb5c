//! Structured witnesses for non-pseudorandom correlations.

pub mod construction;
pub mod insensitive;
pub mod lines;
pub mod separated;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypercube::Word;
use crate::process::{AnalysisParams, ClassificationReport, CubeProcess, Label, ThetaSchedule};
use crate::rational::Rational;

pub use construction::{one_sep_construction, simplicial_construction, Construction, FactCheck};
pub use insensitive::{build_insensitive_family, verify_insensitive, InsensitivityCheck};
pub use lines::{extract_line_witness, LineWitness};
pub use separated::{
    extract_one_sep_witness, extract_simplicial_witness, find_collapse, BlockFactor, SeparatedWitness,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Ge,
    Le,
}

/// One inequality, evaluated exactly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// The index the inequality is about, 1-based, if any.
    pub at: Option<String>,
    pub lhs: Rational,
    pub relation: Relation,
    pub rhs: Rational,
    pub holds: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub checks: Vec<Check>,
}

impl Transcript {
    pub fn ge(&mut self, name: &str, at: Option<&Word>, lhs: Rational, rhs: Rational) {
        let holds = lhs >= rhs;
        self.push(name, at, lhs, Relation::Ge, rhs, holds);
    }

    pub fn le(&mut self, name: &str, at: Option<&Word>, lhs: Rational, rhs: Rational) {
        let holds = lhs <= rhs;
        self.push(name, at, lhs, Relation::Le, rhs, holds);
    }

    fn push(&mut self, name: &str, at: Option<&Word>, lhs: Rational, relation: Relation, rhs: Rational, holds: bool) {
        self.checks.push(Check { name: name.to_string(), at: at.map(|w| format!("{w:?}")), lhs, relation, rhs, holds });
    }

    pub fn extend(&mut self, other: Transcript) {
        self.checks.extend(other.checks);
    }

    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.holds)
    }

    /// Re-evaluate every stored inequality.
    pub fn recheck(&self) -> bool {
        self.checks.iter().all(|c| {
            let ok = match c.relation {
                Relation::Ge => c.lhs >= c.rhs,
                Relation::Le => c.lhs <= c.rhs,
            };
            ok == c.holds
        })
    }

    /// `Err` naming the first failing inequality.
    pub fn require(&self) -> Result<()> {
        match self.first_failure() {
            None => Ok(()),
            Some(c) => Err(Error::Inequality {
                name: match &c.at {
                    Some(at) => format!("{} at {at}", c.name),
                    None => c.name.clone(),
                },
                lhs: c.lhs.to_string(),
                relation: match c.relation {
                    Relation::Ge => ">=".into(),
                    Relation::Le => "<=".into(),
                },
                rhs: c.rhs.to_string(),
            }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Supercorrelated,
    Subcorrelated,
}

/// Knobs shared by the three extractors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractOptions {
    /// Skip the stationarity and marginal hypotheses; bounds are reported
    /// but not enforced.
    pub proof_shape: bool,
    /// Allow `n < k` for line extraction.
    pub allow_small_n: bool,
    /// Add full-space factors so that the factor set is `A \ {β}`.
    pub pad_gamma: bool,
    /// Skip the search and use this target.
    pub target: Option<crate::process::Target>,
    /// Block sizes for simplicial extraction; defaults to all ones.
    pub r: Option<Vec<usize>>,
    /// Realization budget for the type stationarity sweep.
    pub budget: usize,
    /// Seed for sampled type-preservation checks.
    pub seed: u64,
}

impl Default for ExtractOptions {
    fn default() -> ExtractOptions {
        ExtractOptions {
            proof_shape: false,
            allow_small_n: false,
            pad_gamma: false,
            target: None,
            r: None,
            budget: 2_000_000,
            seed: 0,
        }
    }
}

/// Every target is pseudorandom at its threshold.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PseudorandomCertificate {
    pub params: AnalysisParams,
    pub theta: ThetaSchedule,
    pub reports: Vec<ClassificationReport>,
    pub transcript: Transcript,
}

impl PseudorandomCertificate {
    pub fn max_deviation(&self) -> Rational {
        self.reports.iter().map(|r| r.max_deviation()).max().unwrap_or_else(Rational::zero)
    }
}

#[derive(Clone, Debug)]
#[allow(clippy::large_enum_variant)]
pub enum Extraction<W> {
    Pseudorandom(PseudorandomCertificate),
    Witness(Box<W>),
}

impl<W> Extraction<W> {
    pub fn witness(&self) -> Option<&W> {
        match self {
            Extraction::Witness(w) => Some(w),
            Extraction::Pseudorandom(_) => None,
        }
    }

    pub fn certificate(&self) -> Option<&PseudorandomCertificate> {
        match self {
            Extraction::Pseudorandom(c) => Some(c),
            Extraction::Witness(_) => None,
        }
    }
}

/// `P(S_t)` and `P(D_t | S_t)` at one index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexStat {
    pub t: Word,
    pub p_s: Rational,
    /// `None` when `P(S_t) = 0`.
    pub p_d_given_s: Option<Rational>,
}

/// `ε^(κ-1)/(4κ)` and `ε + σ/4^(κ-1)`.
pub fn witness_bounds(params: &AnalysisParams) -> (Rational, Rational) {
    let kappa = params.kappa as u32;
    let s = params.epsilon.pow(kappa - 1) / Rational::from_integer(4 * params.kappa as i64);
    let c = &params.epsilon + &params.sigma / Rational::from_integer(4).pow(kappa - 1);
    (s, c)
}

/// Decide the branch from a non-pseudorandom report; a mixed label picks the
/// side of the larger deviation when `proof_shape` is set.
pub(crate) fn branch_of(report: &ClassificationReport, proof_shape: bool) -> Result<Branch> {
    match &report.label {
        Label::Super { .. } => Ok(Branch::Supercorrelated),
        Label::Sub { .. } => Ok(Branch::Subcorrelated),
        Label::Pseudorandom => Err(Error::Invalid("target is pseudorandom at its threshold".into())),
        Label::Mixed if proof_shape => {
            let up = &report.max_corr - &report.expected;
            let down = &report.expected - &report.min_corr;
            Ok(if up >= down { Branch::Supercorrelated } else { Branch::Subcorrelated })
        }
        Label::Mixed => Err(Error::Mixed),
    }
}

/// Check `|P(D_t) - ε| <= η` everywhere.
pub(crate) fn marginal_checks(proc: &CubeProcess, params: &AnalysisParams, tr: &mut Transcript) {
    let mut worst = Rational::zero();
    for e in proc.events() {
        let d = (proc.space().prob(e).expect("event of the space") - &params.epsilon).abs();
        worst = worst.max(d);
    }
    tr.le("marginals within eta of epsilon", None, worst, params.eta.clone());
}

/// Per-index stats with the two witness bounds recorded in `tr`.
pub(crate) fn record_stats(stats: &[IndexStat], params: &AnalysisParams, tr: &mut Transcript) {
    let (ls, lc) = witness_bounds(params);
    for st in stats {
        tr.ge("P(S_t) lower bound", Some(&st.t), st.p_s.clone(), ls.clone());
        match &st.p_d_given_s {
            Some(c) => tr.ge("P(D_t | S_t) lower bound", Some(&st.t), c.clone(), lc.clone()),
            None => tr.ge("P(D_t | S_t) lower bound", Some(&st.t), Rational::zero(), lc.clone()),
        }
    }
}
