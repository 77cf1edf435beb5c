//! Expand part of a Bernoulli family into an explicit atom space.

use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::probspace::formula::{Formula, Node};
use crate::probspace::space::{AtomSpace, BernoulliProduct, Mask};

pub const MATERIALIZE_CAP: usize = 24;
/// Largest atom count we are willing to allocate.
pub const ATOM_CAP: usize = 1 << 24;

/// An atom space of `b^g` equally likely atoms for `ε = a/b`; generator `i`
/// holds on the atoms whose `i`-th base-`b` digit is below `a`.
#[derive(Clone, Debug)]
pub struct Materialized {
    pub space: AtomSpace,
    /// Generator ids, in digit order.
    pub generators: Vec<u32>,
    pub masks: Vec<Mask>,
}

pub fn materialize(product: &BernoulliProduct, generators: &[u32]) -> Result<Materialized> {
    if generators.len() > MATERIALIZE_CAP {
        return Err(Error::Budget(format!(
            "{} generators exceed the materialization cap of {MATERIALIZE_CAP}",
            generators.len()
        )));
    }
    if let Some(&g) = generators.iter().find(|&&g| g as usize >= product.generator_count()) {
        return Err(Error::Invalid(format!("unknown generator {g}")));
    }
    let a = product.epsilon.numer().to_usize().ok_or_else(|| Error::Budget("epsilon numerator".into()))?;
    let b = product.epsilon.denom().to_usize().ok_or_else(|| Error::Budget("epsilon denominator".into()))?;
    let count = b
        .checked_pow(generators.len() as u32)
        .filter(|&c| c <= ATOM_CAP)
        .ok_or_else(|| Error::Budget(format!("{b}^{} atoms exceed the atom cap", generators.len())))?;
    let mut masks = vec![Mask::empty(count); generators.len()];
    for atom in 0..count {
        let mut x = atom;
        for m in masks.iter_mut() {
            if x % b < a {
                m.set(atom);
            }
            x /= b;
        }
    }
    Ok(Materialized { space: AtomSpace::uniform(count), generators: generators.to_vec(), masks })
}

impl Materialized {
    /// The mask of a formula whose support lies in the materialized generators.
    pub fn formula_to_mask(&self, f: &Formula) -> Result<Mask> {
        let n = self.space.atom_count();
        Ok(match f.node() {
            Node::True => Mask::full(n),
            Node::False => Mask::empty(n),
            Node::Gen(g) => {
                let i = self
                    .generators
                    .iter()
                    .position(|h| h == g)
                    .ok_or_else(|| Error::Invalid(format!("generator {g} was not materialized")))?;
                self.masks[i].clone()
            }
            Node::Not(x) => self.formula_to_mask(x)?.not(),
            Node::And(cs) => {
                let mut m = Mask::full(n);
                for c in cs {
                    m = m.and(&self.formula_to_mask(c)?);
                }
                m
            }
            Node::Or(cs) => {
                let mut m = Mask::empty(n);
                for c in cs {
                    m = m.or(&self.formula_to_mask(c)?);
                }
                m
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::Rational;

    fn product(g: usize, eps: Rational) -> BernoulliProduct {
        BernoulliProduct::new((0..g).map(|i| format!("g{i}")).collect(), eps).unwrap()
    }

    #[test]
    fn sizes_and_marginals() {
        let m = materialize(&product(1, Rational::new(1, 2)), &[0]).unwrap();
        assert_eq!(m.space.atom_count(), 2);
        let m = materialize(&product(2, Rational::new(1, 3)), &[0, 1]).unwrap();
        assert_eq!(m.space.atom_count(), 9);
        let both = m.masks[0].and(&m.masks[1]);
        assert_eq!(m.space.prob(&both), Rational::new(1, 9));
    }

    #[test]
    fn cap_enforced() {
        assert!(materialize(&product(30, Rational::new(1, 2)), &(0..25).collect::<Vec<_>>()).is_err());
    }
}
