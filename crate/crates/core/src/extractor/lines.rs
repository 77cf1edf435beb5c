//! Witness extraction for correlations over combinatorial lines.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::extractor::insensitive::{build_insensitive_family, verify_insensitive, InsensitivityCheck};
use crate::extractor::{
    branch_of, marginal_checks, record_stats, Branch, ExtractOptions, Extraction, IndexStat, PseudorandomCertificate,
    Transcript,
};
use crate::hypercube::{all_words, Sym};
use crate::process::stationarity::nonempty_subsets;
use crate::process::{
    classify_gamma, stationarity_modulus_lines, AnalysisParams, ClassificationReport, CubeProcess, Target,
};
use crate::rational::Rational;

#[derive(Clone, Debug)]
pub struct LineWitness {
    pub params: AnalysisParams,
    pub gamma0: Vec<Sym>,
    pub gamma: Vec<Sym>,
    pub beta: Sym,
    /// The complemented factor on the subcorrelated branch.
    pub gamma_sym: Option<Sym>,
    pub branch: Branch,
    /// Classification of `Γ_0` at `Θ = θ_(p+1)`.
    pub report: ClassificationReport,
    pub reports: Vec<ClassificationReport>,
    /// `θ_p`.
    pub theta: Rational,
    pub factors: Vec<(Sym, CubeProcess)>,
    /// Symbols of `A \ (Γ ∪ {β})` given full-space factors.
    pub padding: Vec<Sym>,
    pub s: CubeProcess,
    /// One entry per `t` containing `β`.
    pub stats: Vec<IndexStat>,
    pub insensitivity: Vec<(Sym, InsensitivityCheck)>,
    /// `S_t ⊆ D_t` for every `t` containing `β`.
    pub s_within_d: bool,
    pub eta_star: Rational,
    pub transcript: Transcript,
}

pub fn extract_line_witness(
    proc: &CubeProcess,
    params: &AnalysisParams,
    opts: &ExtractOptions,
) -> Result<Extraction<LineWitness>> {
    params.validate()?;
    let k = proc.k();
    if params.kappa != k {
        return Err(Error::Invalid(format!("line extraction runs with kappa = |A| = {k}, got {}", params.kappa)));
    }
    if proc.n() < k && !opts.allow_small_n {
        return Err(Error::Invalid(format!("n = {} is smaller than k = {k}", proc.n())));
    }
    let mut tr = Transcript::default();
    let eta_star = stationarity_modulus_lines(proc).eta_star;
    tr.le("line stationarity modulus", None, eta_star.clone(), params.eta.clone());
    if !opts.proof_shape && eta_star > params.eta {
        return Err(Error::NotStationary { eta: params.eta.to_string(), eta_star: eta_star.to_string() });
    }
    marginal_checks(proc, params, &mut tr);
    if !opts.proof_shape {
        tr.require()?;
    }

    let theta = params.theta();
    let eps = &params.epsilon;
    let forced = match &opts.target {
        Some(Target::Gamma(g)) => {
            let mut g = g.clone();
            g.sort();
            Some(g)
        }
        Some(Target::Type(_)) => return Err(Error::Invalid("line extraction takes a symbol-set target".into())),
        None => None,
    };
    let mut reports = Vec::new();
    let mut gamma0: Option<(Vec<Sym>, ClassificationReport)> = None;
    for g in nonempty_subsets(k) {
        let rep = classify_gamma(proc, &g, theta.get(g.len()), eps)?;
        let eligible = match &forced {
            Some(f) => *f == g,
            None => !(opts.proof_shape && g.len() == 1),
        };
        if gamma0.is_none() && eligible && !rep.is_pseudorandom() {
            gamma0 = Some((g.clone(), rep.clone()));
        }
        reports.push(rep);
    }

    let Some((gamma0, report)) = gamma0 else {
        if let Some(f) = &forced {
            return Err(Error::Invalid(format!("target {f:?} is pseudorandom at its threshold")));
        }
        for r in &reports {
            let at = match &r.target {
                Target::Gamma(g) => format!("{:?}", crate::hypercube::Word(g.clone())),
                Target::Type(t) => format!("{t:?}"),
            };
            tr.checks.push(crate::extractor::Check {
                name: format!("deviation within sigma for {at}"),
                at: None,
                lhs: r.max_deviation(),
                relation: crate::extractor::Relation::Le,
                rhs: params.sigma.clone(),
                holds: r.max_deviation() <= params.sigma,
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
    if gamma0.len() < 2 {
        return Err(Error::Invalid("a single symbol is not pseudorandom: marginals deviate".into()));
    }

    let branch = branch_of(&report, opts.proof_shape)?;
    let beta = *gamma0.last().expect("nonempty");
    let gamma: Vec<Sym> = gamma0[..gamma0.len() - 1].to_vec();
    let p = gamma.len();
    let factors = build_insensitive_family(proc, &gamma, beta)?;
    let space = proc.space().clone();
    let gamma_sym = match branch {
        Branch::Supercorrelated => None,
        Branch::Subcorrelated => Some(*gamma.last().expect("p >= 1")),
    };
    let s_events = all_words(k, proc.n())
        .map(|t| {
            let mut evs = Vec::with_capacity(p);
            for (a, e) in &factors {
                let ev = e.event(&t).clone();
                evs.push(if Some(*a) == gamma_sym { space.not(&ev) } else { Ok(ev) }?);
            }
            let refs: Vec<_> = evs.iter().collect();
            space.and(&refs)
        })
        .collect::<Result<Vec<_>>>()?;
    let s = CubeProcess::new(proc.alphabet().clone(), proc.n(), space.clone(), s_events)?;

    let with_beta: Vec<_> = all_words(k, proc.n()).filter(|t| t.contains(beta)).collect();
    let stats: Vec<IndexStat> = with_beta
        .par_iter()
        .map(|t| {
            let p_s = s.prob(t);
            let p_d_given_s = space.conditional(proc.event(t), s.event(t)).ok();
            IndexStat { t: t.clone(), p_s, p_d_given_s }
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

    let insensitivity = factors
        .iter()
        .map(|(a, e)| Ok((*a, verify_insensitive(e, *a, beta, None, None)?)))
        .collect::<Result<Vec<_>>>()?;
    if let Some((a, c)) = insensitivity.iter().find(|(_, c)| !c.holds) {
        return Err(Error::Invalid(format!("factor {} is not insensitive: {:?}", a + 1, c.counterexample)));
    }
    for t in all_words(k, proc.n()).filter(|t| !t.contains(beta)) {
        for (a, e) in &factors {
            if !space.events_equal(e.event(&t), proc.event(&t))? {
                return Err(Error::Invalid(format!("factor {} differs from D at {t:?}", a + 1)));
            }
        }
    }
    let mut s_within_d = true;
    for t in &with_beta {
        if !space.is_subset(s.event(t), proc.event(t))? {
            s_within_d = false;
            break;
        }
    }
    let all_one = stats.iter().all(|st| st.p_d_given_s.as_ref().is_some_and(|c| c.is_one()));
    if all_one != s_within_d {
        return Err(Error::Invalid("conditional probability one disagrees with event inclusion".into()));
    }
    let padding =
        if opts.pad_gamma { (0..k as Sym).filter(|a| *a != beta && !gamma.contains(a)).collect() } else { Vec::new() };
    if !opts.proof_shape {
        tr.require()?;
    }
    Ok(Extraction::Witness(Box::new(LineWitness {
        params: params.clone(),
        gamma0,
        gamma,
        beta,
        gamma_sym,
        branch,
        report,
        reports,
        theta: th,
        factors,
        padding,
        s,
        stats,
        insensitivity,
        s_within_d,
        eta_star,
        transcript: tr,
    })))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::{example_intro_restricted, example_remark_extreme, independent_process};
    use crate::hypercube::Alphabet;

    fn r(a: i64, b: i64) -> Rational {
        Rational::new(a, b)
    }

    #[test]
    fn intro_restricted_supercorrelated() {
        let p = example_intro_restricted(3, &r(1, 2)).unwrap();
        let params = AnalysisParams::new(r(1, 4), r(1, 96), r(0, 1), 3, 1).unwrap();
        let opts = ExtractOptions { allow_small_n: true, ..Default::default() };
        let out = extract_line_witness(&p, &params, &opts).unwrap();
        let w = out.witness().expect("witness");
        assert_eq!(w.gamma0, vec![0, 2]);
        assert_eq!(w.beta, 2);
        assert_eq!(w.gamma, vec![0]);
        assert_eq!(w.branch, Branch::Supercorrelated);
        for st in &w.stats {
            assert_eq!(st.p_s, r(1, 4));
            assert_eq!(st.p_d_given_s, Some(r(1, 2)));
        }
        assert!(w.transcript.all_hold());
    }

    #[test]
    fn independent_gives_certificate() {
        let p = independent_process(Alphabet::numeric(3), 3, &r(1, 4)).unwrap();
        let params = AnalysisParams::new(r(1, 4), r(1, 96), r(0, 1), 3, 1).unwrap();
        let out = extract_line_witness(&p, &params, &ExtractOptions::default()).unwrap();
        let c = out.certificate().expect("certificate");
        assert!(c.max_deviation().is_zero());
    }

    #[test]
    fn extreme_case_has_conditional_one() {
        let p = example_remark_extreme(3, &r(1, 4)).unwrap();
        let params = AnalysisParams::new(r(1, 4), r(1, 96), r(0, 1), 3, 1).unwrap();
        let out = extract_line_witness(&p, &params, &ExtractOptions::default()).unwrap();
        let w = out.witness().unwrap();
        assert!(w.s_within_d);
        assert!(w.stats.iter().all(|s| s.p_d_given_s.as_ref().unwrap().is_one()));
    }
}
