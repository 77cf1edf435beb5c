//! Projections `t^{β→α}` as a source of insensitive processes.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypercube::{all_words, project_or_same, CombinatorialSpace, Sym, Word};
use crate::process::CubeProcess;

/// `E^α_t = D_{t^{β→α}}` for each `α ∈ Γ`.
pub fn build_insensitive_family(proc: &CubeProcess, gamma: &[Sym], beta: Sym) -> Result<Vec<(Sym, CubeProcess)>> {
    if gamma.contains(&beta) {
        return Err(Error::Invalid(format!("beta {} lies in gamma", beta + 1)));
    }
    let k = proc.k();
    if let Some(&a) = gamma.iter().chain(std::iter::once(&beta)).find(|&&a| a as usize >= k) {
        return Err(Error::ForeignSymbol(a as usize));
    }
    gamma
        .iter()
        .map(|&alpha| {
            let events =
                all_words(k, proc.n()).map(|t| proc.event(&project_or_same(&t, beta, alpha)).clone()).collect();
            Ok((alpha, CubeProcess::new(proc.alphabet().clone(), proc.n(), proc.space().clone(), events)?))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InsensitivityCheck {
    pub holds: bool,
    /// First equivalent pair with different events.
    pub counterexample: Option<(Word, Word)>,
    pub pairs_checked: usize,
}

/// Exhaustive `(α,β)`-insensitivity check, or `(α,β,I)` when `block` (0-based
/// coordinates) is given. With `v`, the process is first pulled back
/// through `I_V`.
pub fn verify_insensitive(
    proc: &CubeProcess,
    alpha: Sym,
    beta: Sym,
    v: Option<&CombinatorialSpace>,
    block: Option<&[usize]>,
) -> Result<InsensitivityCheck> {
    if alpha == beta {
        return Err(Error::Invalid("insensitivity needs distinct symbols".into()));
    }
    let pulled;
    let p = match v {
        Some(v) => {
            pulled = proc.restrict(v)?;
            &pulled
        }
        None => proc,
    };
    if let Some(b) = block {
        if let Some(&i) = b.iter().find(|&&i| i >= p.n()) {
            return Err(Error::Invalid(format!("block coordinate {} exceeds dimension {}", i + 1, p.n())));
        }
    }
    let key = |t: &Word| {
        Word(
            t.0.iter()
                .enumerate()
                .map(|(i, &s)| if s == beta && block.is_none_or(|b| b.contains(&i)) { alpha } else { s })
                .collect(),
        )
    };
    let mut rep: HashMap<Word, Word> = HashMap::new();
    let mut pairs = 0;
    for t in all_words(p.k(), p.n()) {
        let kt = key(&t);
        match rep.get(&kt) {
            None => {
                rep.insert(kt, t);
            }
            Some(r) => {
                pairs += 1;
                if !p.space().events_equal(p.event(r), p.event(&t))? {
                    return Ok(InsensitivityCheck {
                        holds: false,
                        counterexample: Some((r.clone(), t)),
                        pairs_checked: pairs,
                    });
                }
            }
        }
    }
    Ok(InsensitivityCheck { holds: true, counterexample: None, pairs_checked: pairs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::example_intro;
    use crate::rational::Rational;

    #[test]
    fn intro_is_the_intersection_of_its_family() {
        let p = example_intro(2, &Rational::new(1, 2)).unwrap();
        let fam = build_insensitive_family(&p, &[0, 1], 2).unwrap();
        for (a, e) in &fam {
            assert!(verify_insensitive(e, *a, 2, None, None).unwrap().holds);
        }
        for t in all_words(3, 2) {
            let s = p.space().and(&[fam[0].1.event(&t), fam[1].1.event(&t)]).unwrap();
            assert!(p.space().events_equal(&s, p.event(&t)).unwrap());
            if !t.contains(2) {
                assert!(p.space().events_equal(fam[0].1.event(&t), p.event(&t)).unwrap());
            }
        }
        let bad = verify_insensitive(&p, 0, 2, None, None).unwrap();
        assert!(!bad.holds && bad.counterexample.is_some());
        assert!(build_insensitive_family(&p, &[2], 2).is_err());
    }
}
