//! Probability spaces and events with two backends: explicit atom masks and
//! formulas over an independent Bernoulli family.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::probspace::formula::Formula;
use crate::rational::Rational;

/// A finite sample space with rational atom weights summing to 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtomSpace {
    weights: Vec<Rational>,
}

impl AtomSpace {
    pub fn new(weights: Vec<Rational>) -> Result<AtomSpace> {
        if weights.is_empty() {
            return Err(Error::Empty("atom weights"));
        }
        if weights.iter().any(|w| w.is_negative()) {
            return Err(Error::Invalid("negative atom weight".into()));
        }
        let total: Rational = weights.iter().sum();
        if !total.is_one() {
            return Err(Error::Invalid(format!("atom weights sum to {total}, not 1")));
        }
        Ok(AtomSpace { weights })
    }

    pub fn uniform(count: usize) -> AtomSpace {
        AtomSpace { weights: vec![Rational::new(1, count as i64); count] }
    }

    pub fn atom_count(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn prob(&self, m: &Mask) -> Rational {
        m.ones().map(|i| &self.weights[i]).sum()
    }
}

/// Independent generators, each true with probability `epsilon`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BernoulliProduct {
    pub names: Vec<String>,
    pub epsilon: Rational,
}

impl BernoulliProduct {
    pub fn new(names: Vec<String>, epsilon: Rational) -> Result<BernoulliProduct> {
        if !epsilon.is_positive() || epsilon > Rational::one() {
            return Err(Error::Invalid(format!("epsilon {epsilon} is outside (0, 1]")));
        }
        let mut sorted = names.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != names.len() {
            return Err(Error::Invalid("repeated generator name".into()));
        }
        Ok(BernoulliProduct { names, epsilon })
    }

    pub fn generator_count(&self) -> usize {
        self.names.len()
    }

    pub fn index_of(&self, name: &str) -> Result<u32> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| i as u32)
            .ok_or_else(|| Error::Parse(format!("unknown generator {name:?}")))
    }
}

/// A set of atoms as a bitset.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Mask {
    bits: Vec<u64>,
    len: usize,
}

impl Mask {
    pub fn empty(len: usize) -> Mask {
        Mask { bits: vec![0; len.div_ceil(64)], len }
    }

    pub fn full(len: usize) -> Mask {
        let mut m = Mask::empty(len);
        for i in 0..len {
            m.set(i);
        }
        m
    }

    pub fn from_atoms(len: usize, atoms: impl IntoIterator<Item = usize>) -> Result<Mask> {
        let mut m = Mask::empty(len);
        for a in atoms {
            if a >= len {
                return Err(Error::Invalid(format!("atom {a} out of range")));
            }
            m.set(a);
        }
        Ok(m)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&b| b == 0)
    }

    pub fn set(&mut self, i: usize) {
        self.bits[i / 64] |= 1u64 << (i % 64);
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().flat_map(|(w, &b)| {
            let mut b = b;
            std::iter::from_fn(move || {
                if b == 0 {
                    return None;
                }
                let i = b.trailing_zeros() as usize;
                b &= b - 1;
                Some(w * 64 + i)
            })
        })
    }

    pub fn and(&self, o: &Mask) -> Mask {
        Mask { bits: self.bits.iter().zip(&o.bits).map(|(a, b)| a & b).collect(), len: self.len }
    }

    pub fn or(&self, o: &Mask) -> Mask {
        Mask { bits: self.bits.iter().zip(&o.bits).map(|(a, b)| a | b).collect(), len: self.len }
    }

    pub fn not(&self) -> Mask {
        let mut m = Mask { bits: self.bits.iter().map(|a| !a).collect(), len: self.len };
        let extra = m.bits.len() * 64 - self.len;
        if extra > 0 {
            let last = m.bits.len() - 1;
            m.bits[last] &= u64::MAX >> extra;
        }
        m
    }

    pub fn is_subset(&self, o: &Mask) -> bool {
        self.bits.iter().zip(&o.bits).all(|(a, b)| a & !b == 0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Space {
    Atoms(AtomSpace),
    Bernoulli(BernoulliProduct),
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Event {
    Mask(Mask),
    Formula(Formula),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    And,
    Or,
    Not,
    Diff,
}

impl Space {
    pub fn omega(&self) -> Event {
        match self {
            Space::Atoms(a) => Event::Mask(Mask::full(a.atom_count())),
            Space::Bernoulli(_) => Event::Formula(Formula::tt()),
        }
    }

    pub fn null(&self) -> Event {
        match self {
            Space::Atoms(a) => Event::Mask(Mask::empty(a.atom_count())),
            Space::Bernoulli(_) => Event::Formula(Formula::ff()),
        }
    }

    pub fn epsilon(&self) -> Option<&Rational> {
        match self {
            Space::Bernoulli(b) => Some(&b.epsilon),
            Space::Atoms(_) => None,
        }
    }

    pub fn check(&self, e: &Event) -> Result<()> {
        match (self, e) {
            (Space::Atoms(a), Event::Mask(m)) if m.len() == a.atom_count() => Ok(()),
            (Space::Bernoulli(b), Event::Formula(f)) => match f.support().iter().next_back() {
                Some(&g) if g as usize >= b.generator_count() => {
                    Err(Error::Invalid(format!("formula uses unknown generator {g}")))
                }
                _ => Ok(()),
            },
            _ => Err(Error::Invalid("event does not belong to this space".into())),
        }
    }

    pub fn prob(&self, e: &Event) -> Result<Rational> {
        match (self, e) {
            (Space::Atoms(a), Event::Mask(m)) if m.len() == a.atom_count() => Ok(a.prob(m)),
            (Space::Bernoulli(b), Event::Formula(f)) => Ok(f.prob(&b.epsilon)),
            _ => Err(Error::Invalid("event does not belong to this space".into())),
        }
    }

    pub fn combine(&self, op: Op, events: &[&Event]) -> Result<Event> {
        match self {
            Space::Atoms(a) => {
                let masks = events
                    .iter()
                    .map(|e| match e {
                        Event::Mask(m) if m.len() == a.atom_count() => Ok(m),
                        _ => Err(Error::Invalid("mixed event backends".into())),
                    })
                    .collect::<Result<Vec<_>>>()?;
                let n = a.atom_count();
                Ok(Event::Mask(match op {
                    Op::And => masks.iter().fold(Mask::full(n), |acc, m| acc.and(m)),
                    Op::Or => masks.iter().fold(Mask::empty(n), |acc, m| acc.or(m)),
                    Op::Not => unary(&masks)?.not(),
                    Op::Diff => {
                        let (x, y) = binary(&masks)?;
                        x.and(&y.not())
                    }
                }))
            }
            Space::Bernoulli(_) => {
                let fs = events
                    .iter()
                    .map(|e| match e {
                        Event::Formula(f) => Ok(f.clone()),
                        _ => Err(Error::Invalid("mixed event backends".into())),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Event::Formula(match op {
                    Op::And => Formula::and(fs),
                    Op::Or => Formula::or(fs),
                    Op::Not => Formula::not(unary(&fs)?),
                    Op::Diff => {
                        let (x, y) = binary(&fs)?;
                        Formula::diff(x, y)
                    }
                }))
            }
        }
    }

    pub fn and(&self, events: &[&Event]) -> Result<Event> {
        self.combine(Op::And, events)
    }

    pub fn not(&self, e: &Event) -> Result<Event> {
        self.combine(Op::Not, &[e])
    }

    /// `P(A ∩ ... )` for a family of events.
    pub fn joint(&self, events: &[&Event]) -> Result<Rational> {
        self.prob(&self.and(events)?)
    }

    pub fn conditional(&self, a: &Event, b: &Event) -> Result<Rational> {
        let pb = self.prob(b)?;
        if pb.is_zero() {
            return Err(Error::NullConditioning);
        }
        Ok(self.joint(&[a, b])? / pb)
    }

    /// Equality as events: identical masks, or formulas whose symmetric
    /// difference has probability zero.
    pub fn events_equal(&self, a: &Event, b: &Event) -> Result<bool> {
        if a == b {
            return Ok(true);
        }
        match (a, b) {
            (Event::Formula(x), Event::Formula(y)) => {
                let xor = Formula::or([Formula::diff(x, y), Formula::diff(y, x)]);
                Ok(self.prob(&Event::Formula(xor))?.is_zero())
            }
            (Event::Mask(_), Event::Mask(_)) => Ok(false),
            _ => Err(Error::Invalid("mixed event backends".into())),
        }
    }

    /// `A ⊆ B` as events.
    pub fn is_subset(&self, a: &Event, b: &Event) -> Result<bool> {
        match (a, b) {
            (Event::Mask(x), Event::Mask(y)) => Ok(x.is_subset(y)),
            (Event::Formula(x), Event::Formula(y)) => Ok(self.prob(&Event::Formula(Formula::diff(x, y)))?.is_zero()),
            _ => Err(Error::Invalid("mixed event backends".into())),
        }
    }
}

fn unary<T>(xs: &[T]) -> Result<&T> {
    match xs {
        [x] => Ok(x),
        _ => Err(Error::Invalid("NOT takes exactly one event".into())),
    }
}

fn binary<T>(xs: &[T]) -> Result<(&T, &T)> {
    match xs {
        [x, y] => Ok((x, y)),
        _ => Err(Error::Invalid("DIFF takes exactly two events".into())),
    }
}
