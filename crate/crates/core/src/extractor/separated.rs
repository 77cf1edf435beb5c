//! Witness extraction over one-separated sets and over arbitrary sets.

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extractor::construction::{one_sep_construction, simplicial_construction, Construction};
use crate::extractor::insensitive::{verify_insensitive, InsensitivityCheck};
use crate::extractor::{
    branch_of, marginal_checks, record_stats, Branch, Check, ExtractOptions, Extraction, IndexStat,
    PseudorandomCertificate, Relation, Transcript,
};
use crate::hypercube::{all_words, Sym, Word};
use crate::invariants::{realizations, separation_index_set, types_up_to, TypeSet, DEFAULT_EXACT_CAP};
use crate::process::{
    classify_type, stationarity_modulus_types, AnalysisParams, ClassificationReport, CubeProcess, Target,
};
use crate::rational::Rational;

/// `z -> D_{T_j(I_V(z))}`, possibly complemented, as a factor of block `l`.
#[derive(Clone, Debug)]
pub struct BlockFactor {
    /// 0-based position in the tuple.
    pub j: usize,
    pub block: usize,
    pub alpha: Sym,
    pub beta: Sym,
    pub complemented: bool,
    pub process: CubeProcess,
    pub insensitivity: InsensitivityCheck,
}

#[derive(Clone, Debug)]
pub struct SeparatedWitness {
    pub params: AnalysisParams,
    pub ell: usize,
    pub target: TypeSet,
    /// The enumeration of the violating set; its last element is distinguished.
    pub tuple: Vec<Word>,
    pub construction: Construction,
    pub branch: Branch,
    pub report: ClassificationReport,
    pub reports: Vec<ClassificationReport>,
    /// `θ_p`.
    pub theta: Rational,
    pub factors: Vec<BlockFactor>,
    /// Distinct symbols `α` of each block.
    pub gammas: Vec<Vec<Sym>>,
    /// Blocks without a factor; they take a full-space factor.
    pub trivial_blocks: Vec<usize>,
    /// The structured process on `A^r`, read through `I_V`.
    pub s: CubeProcess,
    pub stats: Vec<IndexStat>,
    pub s_within_d: bool,
    pub eta_star: Option<Rational>,
    pub transcript: Transcript,
}

impl SeparatedWitness {
    /// The simplicial certificate: every factor is locally insensitive in its
    /// block and every block carries a symbol.
    pub fn simplicial_certified(&self) -> bool {
        self.factors.iter().all(|f| f.insensitivity.holds && f.alpha != f.beta)
            && self.gammas.iter().zip(&self.construction.betas).all(|(g, b)| !g.contains(b))
    }
}

/// `Stationary(η)` for the type sweep, or an error when it fails.
fn type_stationarity(
    proc: &CubeProcess,
    params: &AnalysisParams,
    opts: &ExtractOptions,
    tr: &mut Transcript,
) -> Result<Option<Rational>> {
    if opts.proof_shape {
        return Ok(None);
    }
    let tm = stationarity_modulus_types(proc, params.kappa, params.m, opts.budget)?;
    if tm.partial {
        return Err(Error::Budget(format!("type stationarity sweep stopped after {} realizations", tm.evaluated)));
    }
    tr.le("type stationarity modulus", None, tm.eta_star.clone(), params.eta.clone());
    if tm.eta_star > params.eta {
        return Err(Error::NotStationary { eta: params.eta.to_string(), eta_star: tm.eta_star.to_string() });
    }
    Ok(Some(tm.eta_star))
}

fn separation_of(tau: &TypeSet) -> Result<usize> {
    Ok(separation_index_set(&tau.tuple(), DEFAULT_EXACT_CAP)?.value)
}

/// One-separated witness (`ℓ = 1`, `V` of dimension `n - d`).
pub fn extract_one_sep_witness(
    proc: &CubeProcess,
    params: &AnalysisParams,
    opts: &ExtractOptions,
) -> Result<Extraction<SeparatedWitness>> {
    extract(proc, params, opts, true)
}

/// Simplicial witness over all sets, `ℓ = s(G)`.
pub fn extract_simplicial_witness(
    proc: &CubeProcess,
    params: &AnalysisParams,
    opts: &ExtractOptions,
) -> Result<Extraction<SeparatedWitness>> {
    extract(proc, params, opts, false)
}

fn extract(
    proc: &CubeProcess,
    params: &AnalysisParams,
    opts: &ExtractOptions,
    one_sep: bool,
) -> Result<Extraction<SeparatedWitness>> {
    params.validate()?;
    let (k, n) = (proc.k(), proc.n());
    if n <= params.m {
        return Err(Error::Invalid(format!("need n > m, got n = {n}, m = {}", params.m)));
    }
    let mut tr = Transcript::default();
    let eta_star = type_stationarity(proc, params, opts, &mut tr)?;
    marginal_checks(proc, params, &mut tr);
    if !opts.proof_shape {
        tr.require()?;
    }

    let theta = params.theta();
    let eps = &params.epsilon;
    let candidates: Vec<TypeSet> = match &opts.target {
        Some(Target::Type(t)) => {
            if t.len() > params.kappa || t.dim > params.m {
                return Err(Error::Invalid(format!("target {t:?} exceeds kappa or m")));
            }
            vec![t.clone()]
        }
        Some(Target::Gamma(g)) => {
            let mut g = g.clone();
            g.sort();
            vec![TypeSet::line_type(&g)?]
        }
        None => {
            let mut v = Vec::new();
            if !opts.proof_shape {
                v.push(TypeSet::empty_type());
            }
            v.extend(types_up_to(k, params.kappa, params.m));
            v
        }
    };
    let mut reports = Vec::new();
    let mut found: Option<(TypeSet, ClassificationReport, usize)> = None;
    for tau in candidates {
        let ell = if tau.dim == 0 { 1 } else { separation_of(&tau)? };
        if one_sep && ell != 1 {
            if opts.target.is_some() {
                return Err(Error::NotSeparated { ell: 1, j: tau.len() });
            }
            continue;
        }
        let rep = classify_type(proc, &tau, theta.get(tau.len()), eps)?;
        let bad = !rep.is_pseudorandom();
        reports.push(rep.clone());
        if bad {
            found = Some((tau, rep, ell));
            break;
        }
    }

    let Some((tau, report, ell)) = found else {
        if opts.target.is_some() {
            return Err(Error::Invalid("target is pseudorandom at its threshold".into()));
        }
        for r in &reports {
            let dev = r.max_deviation();
            tr.checks.push(Check {
                name: format!("deviation within sigma for {:?}", r.target_key()),
                at: None,
                holds: dev <= params.sigma,
                lhs: dev,
                relation: Relation::Le,
                rhs: params.sigma.clone(),
            });
        }
        if !opts.proof_shape {
            tr.require()?;
        }
        return Ok(Extraction::Pseudorandom(PseudorandomCertificate {
            params: params.clone(),
            theta,
            reports,
            transcript: tr,
        }));
    };
    if tau.len() < 2 {
        return Err(Error::Invalid("a singleton is not pseudorandom: marginals deviate".into()));
    }

    let branch = branch_of(&report, opts.proof_shape)?;
    let g = realizations(&tau, k, n)?.into_iter().next().ok_or_else(|| Error::NoRealization(format!("{tau:?}")))?;
    let tuple = separation_index_set(&g, DEFAULT_EXACT_CAP)?.witness.expect("set witness");
    let c = if one_sep {
        one_sep_construction(&tuple, k, opts.seed)?
    } else {
        let r = opts.r.clone().unwrap_or_else(|| vec![1; ell]);
        if r.len() != ell {
            return Err(Error::Invalid(format!("the violating set has separation index {ell}; r needs {ell} entries")));
        }
        let total: usize = r.iter().sum();
        tr.le("block sizes within n - m", None, Rational::from(total as i64), Rational::from((n - params.m) as i64));
        simplicial_construction(&tuple, &r, k, opts.seed)?
    };
    let p = c.p();
    let dim = c.dim();
    let space = proc.space().clone();
    let blocks = c.intervals();
    let zs: Vec<Word> = all_words(k, dim).collect();

    let mut factors = Vec::with_capacity(p);
    for j in 0..p {
        let (block, alpha) = c.block_of(j).ok_or(Error::NotSeparated { ell, j: j + 1 })?;
        let beta = c.betas[block];
        let events = zs.iter().map(|z| proc.event(&c.map(j, z)).clone()).collect();
        let plain = CubeProcess::new(proc.alphabet().clone(), dim, space.clone(), events)?;
        let within = if ell == 1 { None } else { Some(blocks[block].as_slice()) };
        let insensitivity = verify_insensitive(&plain, alpha, beta, None, within)?;
        let complemented = branch == Branch::Subcorrelated && j == p - 1;
        let process = if complemented {
            let ev = plain.events().iter().map(|e| space.not(e)).collect::<Result<Vec<_>>>()?;
            CubeProcess::new(proc.alphabet().clone(), dim, space.clone(), ev)?
        } else {
            plain
        };
        factors.push(BlockFactor { j, block, alpha, beta, complemented, process, insensitivity });
    }
    if let Some(f) = factors.iter().find(|f| !f.insensitivity.holds) {
        return Err(Error::Invalid(format!(
            "factor {} is not ({},{})-insensitive: {:?}",
            f.j + 1,
            f.alpha + 1,
            f.beta + 1,
            f.insensitivity.counterexample
        )));
    }
    let mut gammas = vec![Vec::new(); ell];
    for f in &factors {
        if !gammas[f.block].contains(&f.alpha) {
            gammas[f.block].push(f.alpha);
        }
    }
    gammas.iter_mut().for_each(|g| g.sort());
    let trivial_blocks: Vec<usize> = (0..ell).filter(|&l| gammas[l].is_empty()).collect();

    let s_events = (0..zs.len())
        .map(|i| {
            let evs: Vec<_> = factors.iter().map(|f| &f.process.events()[i]).collect();
            space.and(&evs)
        })
        .collect::<Result<Vec<_>>>()?;
    let s = CubeProcess::new(proc.alphabet().clone(), dim, space.clone(), s_events)?;
    let stats: Vec<IndexStat> = zs
        .par_iter()
        .map(|z| {
            let t = c.point(z);
            let p_s = s.prob(z);
            let p_d_given_s = space.conditional(proc.event(&t), s.event(z)).ok();
            IndexStat { t, p_s, p_d_given_s }
        })
        .collect();
    record_stats(&stats, params, &mut tr);
    let th = theta.get(p).clone();
    if branch == Branch::Supercorrelated {
        let target = eps.pow(p as u32);
        for st in &stats {
            tr.le("|P(S_t) - eps^p| within theta", Some(&st.t), (&st.p_s - &target).abs(), th.clone());
        }
    }
    let mut s_within_d = true;
    for z in &zs {
        if !space.is_subset(s.event(z), proc.event(&c.point(z)))? {
            s_within_d = false;
            break;
        }
    }
    let all_one = stats.iter().all(|st| st.p_d_given_s.as_ref().is_some_and(|x| x.is_one()));
    if all_one != s_within_d {
        return Err(Error::Invalid("conditional probability one disagrees with event inclusion".into()));
    }
    if !opts.proof_shape {
        tr.require()?;
    }
    Ok(Extraction::Witness(Box::new(SeparatedWitness {
        params: params.clone(),
        ell,
        target: tau,
        tuple,
        construction: c,
        branch,
        report,
        reports,
        theta: th,
        factors,
        gammas,
        trivial_blocks,
        s,
        stats,
        s_within_d,
        eta_star,
        transcript: tr,
    })))
}

impl ClassificationReport {
    fn target_key(&self) -> String {
        match &self.target {
            Target::Gamma(g) => format!("{:?}", Word(g.clone())),
            Target::Type(t) => format!("{t:?}"),
        }
    }
}

/// A nonempty `G` and a point `x ∉ G` with `G ∪ {x}` `ℓ`-separated and
/// `∩_{G ∪ {x}} S = ∩_G S`, searching sets of size at most `max_size`.
pub fn find_collapse(s: &CubeProcess, ell: usize, max_size: usize) -> Result<Option<(Vec<Word>, Word)>> {
    let pts: Vec<Word> = all_words(s.k(), s.n()).collect();
    let space = s.space();
    for size in 1..=max_size.min(pts.len() - 1) {
        for g in pts.iter().combinations(size) {
            let evs: Vec<_> = g.iter().map(|t| s.event(t)).collect();
            let meet = space.and(&evs)?;
            for x in &pts {
                if g.contains(&x) {
                    continue;
                }
                let mut all: Vec<Word> = g.iter().map(|w| (*w).clone()).collect();
                all.push(x.clone());
                if separation_index_set(&all, DEFAULT_EXACT_CAP)?.value > ell {
                    continue;
                }
                if space.is_subset(&meet, s.event(x))? {
                    return Ok(Some((g.into_iter().cloned().collect(), x.clone())));
                }
            }
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSummary {
    pub block: usize,
    pub beta: Sym,
    pub gamma: Vec<Sym>,
    pub factors: Vec<usize>,
}

impl SeparatedWitness {
    pub fn block_summaries(&self) -> Vec<BlockSummary> {
        (0..self.ell)
            .map(|l| BlockSummary {
                block: l,
                beta: self.construction.betas[l],
                gamma: self.gammas[l].clone(),
                factors: self.factors.iter().filter(|f| f.block == l).map(|f| f.j).collect(),
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::{example_one_sep, example_simplicial, independent_process};
    use crate::hypercube::Alphabet;

    fn r(a: i64, b: i64) -> Rational {
        Rational::new(a, b)
    }

    fn w(v: &[u8]) -> Word {
        Word(v.iter().map(|x| x - 1).collect())
    }

    #[test]
    fn independent_certificate() {
        let p = independent_process(Alphabet::numeric(2), 3, &r(1, 4)).unwrap();
        let params = AnalysisParams::new(r(1, 4), r(1, 32), r(0, 1), 2, 1).unwrap();
        let out = extract_one_sep_witness(&p, &params, &ExtractOptions::default()).unwrap();
        assert!(out.certificate().unwrap().max_deviation().is_zero());
    }

    #[test]
    fn one_separated_example_super_branch() {
        let p = example_one_sep(5, &r(1, 2), false).unwrap();
        let params = AnalysisParams::new(r(1, 4), r(1, 96), r(0, 1), 3, 3).unwrap();
        let tau = TypeSet::from_elements([w(&[1, 2, 1]), w(&[2, 1, 2]), w(&[2, 2, 3])]).unwrap();
        let opts = ExtractOptions { proof_shape: true, target: Some(Target::Type(tau)), ..Default::default() };
        let out = extract_one_sep_witness(&p, &params, &opts).unwrap();
        let wt = out.witness().unwrap();
        assert_eq!(wt.branch, Branch::Supercorrelated);
        assert_eq!(wt.construction.iota(), 2);
        assert_eq!(wt.construction.beta(), 2);
        assert_eq!(wt.construction.gamma(), vec![0, 1]);
        assert_eq!(wt.construction.point(&w(&[1, 3])), w(&[2, 2, 3, 1, 3]));
        assert!(wt.stats.iter().all(|s| s.p_d_given_s.as_ref().unwrap().is_one()));
        assert!(wt.s_within_d);
    }

    #[test]
    fn two_block_example() {
        let e = r(1, 256);
        let p = example_simplicial(2, &r(1, 2)).unwrap();
        let sigma = e.pow(8) / Rational::from(18);
        let params = AnalysisParams::new(e, sigma, r(0, 1), 9, 2).unwrap();
        let full: Vec<Word> = all_words(3, 2).collect();
        let tau = TypeSet::from_elements(full).unwrap();
        let opts = ExtractOptions {
            proof_shape: true,
            target: Some(Target::Type(tau)),
            r: Some(vec![1, 1]),
            ..Default::default()
        };
        let out = extract_simplicial_witness(&p, &params, &opts).unwrap();
        let wt = out.witness().unwrap();
        assert_eq!(wt.ell, 2);
        assert_eq!(wt.construction.iotas, vec![0, 1]);
        assert_eq!(wt.construction.betas, vec![2, 2]);
        assert!(wt.simplicial_certified());
        assert!(wt.trivial_blocks.is_empty());
        let sizes: Vec<usize> = wt.block_summaries().iter().map(|b| b.factors.len()).collect();
        assert_eq!(sizes, vec![6, 2]);
        assert!(wt.stats.iter().all(|s| s.p_d_given_s.as_ref().unwrap().is_one()));
        assert!(find_collapse(&wt.s, 2, 3).unwrap().is_none());
        let (g, x) = find_collapse(&wt.s, 2, 4).unwrap().unwrap();
        assert_eq!(g, vec![w(&[1, 3]), w(&[2, 3]), w(&[3, 1]), w(&[3, 2])]);
        assert_eq!(x, w(&[3, 3]));
    }
}
