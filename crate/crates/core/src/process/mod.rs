//! Stochastic processes indexed by `A^n`.

pub mod classify;
pub mod stationarity;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypercube::{all_words, cube_size, Alphabet, CombinatorialSpace, Word};
use crate::probspace::{Event, Space};
use crate::rational::Rational;

pub use classify::{
    boolean_stability_check, boolean_stability_types, classify_gamma, classify_type, gamma_correlations,
    type_correlations, ClassificationReport, Label, Target,
};
pub use stationarity::{
    base_rate, find_stationary_subspace, stationarity_modulus_lines, stationarity_modulus_lines_filtered,
    stationarity_modulus_types, LineModulus, SearchCriterion, SubspaceSearch, TypeModulus,
};

/// A family `<D_t : t in A^n>` of events of one space, stored by word rank.
#[derive(Clone, Debug)]
pub struct CubeProcess {
    alphabet: Alphabet,
    n: usize,
    space: Arc<Space>,
    events: Vec<Event>,
}

impl CubeProcess {
    pub fn new(alphabet: Alphabet, n: usize, space: Arc<Space>, events: Vec<Event>) -> Result<CubeProcess> {
        if n == 0 {
            return Err(Error::Invalid("a process needs n >= 1".into()));
        }
        let size = cube_size(alphabet.k(), n)?;
        if events.len() != size {
            return Err(Error::LengthMismatch { expected: size, got: events.len() });
        }
        for e in &events {
            space.check(e)?;
        }
        Ok(CubeProcess { alphabet, n, space, events })
    }

    pub fn from_fn(alphabet: Alphabet, n: usize, space: Arc<Space>, f: impl Fn(&Word) -> Event) -> Result<CubeProcess> {
        let k = alphabet.k();
        cube_size(k, n)?;
        let events = all_words(k, n).map(|w| f(&w)).collect();
        CubeProcess::new(alphabet, n, space, events)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn k(&self) -> usize {
        self.alphabet.k()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn space(&self) -> &Arc<Space> {
        &self.space
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn event(&self, t: &Word) -> &Event {
        &self.events[t.rank(self.k())]
    }

    pub fn prob(&self, t: &Word) -> Rational {
        self.space.prob(self.event(t)).expect("events belong to the space")
    }

    /// `P(∩_{t in G} D_t)`.
    pub fn joint_prob<'a>(&self, g: impl IntoIterator<Item = &'a Word>) -> Rational {
        let evs: Vec<&Event> = g.into_iter().map(|t| self.event(t)).collect();
        self.space.joint(&evs).expect("events belong to the space")
    }

    /// `P(∩_{G1} D_t ∩ ∩_{G2} D_t^c)`.
    pub fn joint_with_complements(&self, pos: &[&Word], neg: &[&Word]) -> Rational {
        let mut evs: Vec<Event> = pos.iter().map(|t| self.event(t).clone()).collect();
        for t in neg {
            evs.push(self.space.not(self.event(t)).expect("same space"));
        }
        let refs: Vec<&Event> = evs.iter().collect();
        self.space.joint(&refs).expect("same space")
    }

    /// `s -> D_{I_V(s)}` on `A^dim(V)`.
    pub fn restrict(&self, v: &CombinatorialSpace) -> Result<CubeProcess> {
        if v.ambient_n() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: v.ambient_n() });
        }
        v.generator().check(self.k())?;
        let k = self.k();
        let events = all_words(k, v.dim()).map(|s| self.event(&v.iso_unchecked(&s)).clone()).collect();
        CubeProcess::new(self.alphabet.clone(), v.dim(), self.space.clone(), events)
    }

    /// Event-by-event equality with another process on the same space.
    pub fn same_events(&self, other: &CubeProcess) -> Result<bool> {
        if self.n != other.n || self.k() != other.k() {
            return Ok(false);
        }
        for (a, b) in self.events.iter().zip(&other.events) {
            if !self.space.events_equal(a, b)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// `ε, σ, η, κ, m` for the dichotomy theorems.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisParams {
    pub epsilon: Rational,
    pub sigma: Rational,
    pub eta: Rational,
    pub kappa: usize,
    pub m: usize,
}

impl AnalysisParams {
    pub fn new(epsilon: Rational, sigma: Rational, eta: Rational, kappa: usize, m: usize) -> Result<AnalysisParams> {
        let p = AnalysisParams { epsilon, sigma, eta, kappa, m };
        p.validate()?;
        Ok(p)
    }

    /// Check `ε <= 1 - 1/(2κ)`, `σ <= ε^(κ-1)/(2κ)` and `η <= σ/4^(κ-1)`.
    pub fn validate(&self) -> Result<()> {
        let fail = |name: &'static str, lhs: &Rational, rhs: &Rational| Error::Params {
            name,
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
        };
        if self.kappa < 2 {
            return Err(Error::Invalid("kappa must be at least 2".into()));
        }
        if self.m == 0 {
            return Err(Error::Invalid("m must be positive".into()));
        }
        if !self.epsilon.is_positive() {
            return Err(fail("epsilon_positive", &Rational::zero(), &self.epsilon));
        }
        if !self.sigma.is_positive() {
            return Err(fail("sigma_positive", &Rational::zero(), &self.sigma));
        }
        if self.eta.is_negative() {
            return Err(fail("eta_nonnegative", &Rational::zero(), &self.eta));
        }
        let k2 = Rational::from_integer(2 * self.kappa as i64);
        let eps_max = Rational::one() - k2.recip();
        if self.epsilon > eps_max {
            return Err(fail("epsilon_upper", &self.epsilon, &eps_max));
        }
        let sigma_max = self.epsilon.pow(self.kappa as u32 - 1) / &k2;
        if self.sigma > sigma_max {
            return Err(fail("sigma_upper", &self.sigma, &sigma_max));
        }
        let eta_max = &self.sigma / Rational::from_integer(4).pow(self.kappa as u32 - 1);
        if self.eta > eta_max {
            return Err(fail("eta_upper", &self.eta, &eta_max));
        }
        Ok(())
    }

    pub fn theta(&self) -> ThetaSchedule {
        ThetaSchedule::new(self)
    }
}

/// `θ_0 = 0`, `θ_1 = η`, `θ_p = 4^(p-κ) σ` for `2 <= p <= κ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaSchedule(pub Vec<Rational>);

impl ThetaSchedule {
    pub fn new(p: &AnalysisParams) -> ThetaSchedule {
        let mut v = vec![Rational::zero(), p.eta.clone()];
        for i in 2..=p.kappa {
            v.push(&p.sigma * Rational::from_integer(4).powi(i as i32 - p.kappa as i32));
        }
        ThetaSchedule(v)
    }

    pub fn get(&self, p: usize) -> &Rational {
        &self.0[p]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_diagnostics_are_named() {
        let r = |a, b| Rational::new(a, b);
        assert!(AnalysisParams::new(r(1, 4), r(1, 96), r(0, 1), 3, 1).is_ok());
        match AnalysisParams::new(r(9, 10), r(1, 96), r(0, 1), 3, 1) {
            Err(Error::Params { name, .. }) => assert_eq!(name, "epsilon_upper"),
            other => panic!("{other:?}"),
        }
        match AnalysisParams::new(r(1, 4), r(1, 90), r(0, 1), 3, 1) {
            Err(Error::Params { name, .. }) => assert_eq!(name, "sigma_upper"),
            other => panic!("{other:?}"),
        }
        match AnalysisParams::new(r(1, 4), r(1, 96), r(1, 1000), 3, 1) {
            Err(Error::Params { name, .. }) => assert_eq!(name, "eta_upper"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn theta_schedule_increases() {
        let p = AnalysisParams::new(Rational::new(1, 4), Rational::new(1, 96), Rational::new(1, 1536), 3, 1).unwrap();
        let t = p.theta();
        assert_eq!(t.0, vec![Rational::zero(), Rational::new(1, 1536), Rational::new(1, 384), Rational::new(1, 96)]);
        assert!(t.0.windows(2).all(|w| w[0] <= w[1]));
    }
}
