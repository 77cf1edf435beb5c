//! Boolean formulas over independent generators and their exact probability.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::rational::Rational;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    False,
    True,
    Gen(u32),
    Not(Formula),
    And(Vec<Formula>),
    Or(Vec<Formula>),
}

/// Shared, structurally compared formula.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Formula(Arc<Node>);

impl Formula {
    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn tt() -> Formula {
        Formula(Arc::new(Node::True))
    }

    pub fn ff() -> Formula {
        Formula(Arc::new(Node::False))
    }

    pub fn gen(g: u32) -> Formula {
        Formula(Arc::new(Node::Gen(g)))
    }

    pub fn is_true(&self) -> bool {
        matches!(*self.0, Node::True)
    }

    pub fn is_false(&self) -> bool {
        matches!(*self.0, Node::False)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: &Formula) -> Formula {
        match f.node() {
            Node::True => Formula::ff(),
            Node::False => Formula::tt(),
            Node::Not(inner) => inner.clone(),
            _ => Formula(Arc::new(Node::Not(f.clone()))),
        }
    }

    pub fn and(items: impl IntoIterator<Item = Formula>) -> Formula {
        Formula::junction(items, true)
    }

    pub fn or(items: impl IntoIterator<Item = Formula>) -> Formula {
        Formula::junction(items, false)
    }

    pub fn diff(a: &Formula, b: &Formula) -> Formula {
        Formula::and([a.clone(), Formula::not(b)])
    }

    fn junction(items: impl IntoIterator<Item = Formula>, conj: bool) -> Formula {
        let mut flat: Vec<Formula> = Vec::new();
        for f in items {
            match f.node() {
                Node::True if conj => {}
                Node::False if !conj => {}
                Node::False if conj => return Formula::ff(),
                Node::True if !conj => return Formula::tt(),
                Node::And(cs) if conj => flat.extend(cs.iter().cloned()),
                Node::Or(cs) if !conj => flat.extend(cs.iter().cloned()),
                _ => flat.push(f),
            }
        }
        flat.sort();
        flat.dedup();
        // x together with not-x annihilates
        for f in &flat {
            if let Node::Not(inner) = f.node() {
                if flat.binary_search(inner).is_ok() {
                    return if conj { Formula::ff() } else { Formula::tt() };
                }
            }
        }
        match flat.len() {
            0 => {
                if conj {
                    Formula::tt()
                } else {
                    Formula::ff()
                }
            }
            1 => flat.pop().expect("one item"),
            _ => Formula(Arc::new(if conj { Node::And(flat) } else { Node::Or(flat) })),
        }
    }

    pub fn support(&self) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        self.collect_support(&mut out);
        out
    }

    fn collect_support(&self, out: &mut BTreeSet<u32>) {
        match self.node() {
            Node::True | Node::False => {}
            Node::Gen(g) => {
                out.insert(*g);
            }
            Node::Not(f) => f.collect_support(out),
            Node::And(cs) | Node::Or(cs) => cs.iter().for_each(|c| c.collect_support(out)),
        }
    }

    fn min_gen(&self) -> Option<u32> {
        match self.node() {
            Node::True | Node::False => None,
            Node::Gen(g) => Some(*g),
            Node::Not(f) => f.min_gen(),
            Node::And(cs) | Node::Or(cs) => cs.iter().filter_map(|c| c.min_gen()).min(),
        }
    }

    pub fn eval(&self, assign: &dyn Fn(u32) -> bool) -> bool {
        match self.node() {
            Node::True => true,
            Node::False => false,
            Node::Gen(g) => assign(*g),
            Node::Not(f) => !f.eval(assign),
            Node::And(cs) => cs.iter().all(|c| c.eval(assign)),
            Node::Or(cs) => cs.iter().any(|c| c.eval(assign)),
        }
    }

    /// Substitute a constant for generator `g`.
    pub fn restrict(&self, g: u32, value: bool) -> Formula {
        match self.node() {
            Node::True | Node::False => self.clone(),
            Node::Gen(h) if *h == g => {
                if value {
                    Formula::tt()
                } else {
                    Formula::ff()
                }
            }
            Node::Gen(_) => self.clone(),
            Node::Not(f) => Formula::not(&f.restrict(g, value)),
            Node::And(cs) => Formula::and(cs.iter().map(|c| c.restrict(g, value))),
            Node::Or(cs) => Formula::or(cs.iter().map(|c| c.restrict(g, value))),
        }
    }

    /// Rename generators.
    pub fn map_gens(&self, f: &dyn Fn(u32) -> u32) -> Formula {
        match self.node() {
            Node::True | Node::False => self.clone(),
            Node::Gen(g) => Formula::gen(f(*g)),
            Node::Not(x) => Formula::not(&x.map_gens(f)),
            Node::And(cs) => Formula::and(cs.iter().map(|c| c.map_gens(f))),
            Node::Or(cs) => Formula::or(cs.iter().map(|c| c.map_gens(f))),
        }
    }

    /// Exact probability when every generator is independently true with
    /// probability `eps`.
    pub fn prob(&self, eps: &Rational) -> Rational {
        let mut memo = HashMap::new();
        prob_rec(self, eps, &mut memo)
    }
}

/// Split children into groups with pairwise disjoint generator support.
fn components(children: &[Formula]) -> Vec<Vec<Formula>> {
    let supports: Vec<BTreeSet<u32>> = children.iter().map(|c| c.support()).collect();
    let mut parent: Vec<usize> = (0..children.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    let mut owner: HashMap<u32, usize> = HashMap::new();
    for (i, s) in supports.iter().enumerate() {
        for g in s {
            match owner.get(g) {
                Some(&j) => {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a != b {
                        parent[a] = b;
                    }
                }
                None => {
                    owner.insert(*g, i);
                }
            }
        }
    }
    let mut groups: HashMap<usize, Vec<Formula>> = HashMap::new();
    let mut order = Vec::new();
    for (i, c) in children.iter().enumerate() {
        let r = find(&mut parent, i);
        if !groups.contains_key(&r) {
            order.push(r);
        }
        groups.entry(r).or_default().push(c.clone());
    }
    order.into_iter().map(|r| groups.remove(&r).expect("group")).collect()
}

fn prob_rec(f: &Formula, eps: &Rational, memo: &mut HashMap<Formula, Rational>) -> Rational {
    match f.node() {
        Node::True => return Rational::one(),
        Node::False => return Rational::zero(),
        Node::Gen(_) => return eps.clone(),
        Node::Not(x) => return Rational::one() - prob_rec(x, eps, memo),
        _ => {}
    }
    if let Some(v) = memo.get(f) {
        return v.clone();
    }
    let value = match f.node() {
        Node::And(cs) | Node::Or(cs) => {
            let conj = matches!(f.node(), Node::And(_));
            let groups = components(cs);
            if groups.len() > 1 {
                if conj {
                    groups.into_iter().map(|g| prob_rec(&Formula::and(g), eps, memo)).product()
                } else {
                    Rational::one()
                        - groups
                            .into_iter()
                            .map(|g| Rational::one() - prob_rec(&Formula::or(g), eps, memo))
                            .product::<Rational>()
                }
            } else {
                let g = f.min_gen().expect("a junction of constants is simplified away");
                let hi = prob_rec(&f.restrict(g, true), eps, memo);
                let lo = prob_rec(&f.restrict(g, false), eps, memo);
                eps * hi + (Rational::one() - eps) * lo
            }
        }
        _ => unreachable!(),
    };
    memo.insert(f.clone(), value.clone());
    value
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::True => write!(f, "T"),
            Node::False => write!(f, "F"),
            Node::Gen(g) => write!(f, "g{g}"),
            Node::Not(x) => write!(f, "!{x:?}"),
            Node::And(cs) | Node::Or(cs) => {
                let sep = if matches!(self.node(), Node::And(_)) { " & " } else { " | " };
                write!(f, "(")?;
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        write!(f, "{sep}")?;
                    }
                    write!(f, "{c:?}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// JSON shape: `"true"`, `"false"`, `{"gen": name}`, `{"not": f}`,
/// `{"and": [..]}`, `{"or": [..]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FormulaJson {
    Const(String),
    Gen { gen: String },
    Not { not: Box<FormulaJson> },
    And { and: Vec<FormulaJson> },
    Or { or: Vec<FormulaJson> },
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(i: u32) -> Formula {
        Formula::gen(i)
    }

    #[test]
    fn simple_probabilities() {
        let h = Rational::new(1, 2);
        assert_eq!(g(0).prob(&h), h);
        assert_eq!(Formula::and([g(0), g(1), g(2)]).prob(&h), Rational::new(1, 8));
        let a = Formula::and([g(0), g(1)]);
        let b = Formula::and([g(0), g(1), g(2)]);
        assert_eq!(Formula::diff(&a, &b).prob(&h), Rational::new(1, 8));
    }

    #[test]
    fn simplification() {
        assert!(Formula::and([]).is_true());
        assert!(Formula::or([]).is_false());
        assert!(Formula::diff(&g(3), &g(3)).is_false());
        assert_eq!(Formula::not(&Formula::not(&g(1))), g(1));
        assert_eq!(Formula::and([g(2), Formula::and([g(1), g(2)])]), Formula::and([g(1), g(2)]));
    }

    #[test]
    fn shannon_matches_inclusion_exclusion() {
        let e = Rational::new(1, 3);
        let a = Formula::and([g(0), g(1)]);
        let b = Formula::and([g(1), g(2)]);
        let u = Formula::or([a.clone(), b.clone()]);
        let ab = Formula::and([a.clone(), b.clone()]);
        assert_eq!(u.prob(&e), a.prob(&e) + b.prob(&e) - ab.prob(&e));
    }
}
