//! The type of a tuple or a set of words.

use std::collections::BTreeSet;
use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypercube::{all_words, enumerate_subspaces, Word};

/// Columns of the reduced coordinate matrix of a tuple, in tuple order.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct TypeTuple {
    pub columns: Vec<Word>,
    pub dim: usize,
}

/// The unordered set of columns; its own sorted order is the canonical key.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TypeSet {
    pub elements: BTreeSet<Word>,
    pub dim: usize,
}

impl fmt::Debug for TypeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.elements.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e:?}")?;
        }
        write!(f, "}}")
    }
}

impl TypeSet {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// The type of a singleton: one empty column.
    pub fn empty_type() -> TypeSet {
        TypeSet { elements: std::iter::once(Word::default()).collect(), dim: 0 }
    }

    /// Build from explicit elements, checking that they are already reduced.
    pub fn from_elements(elements: impl IntoIterator<Item = Word>) -> Result<TypeSet> {
        let elements: BTreeSet<Word> = elements.into_iter().collect();
        let Some(first) = elements.iter().next() else {
            return Err(Error::Empty("type elements"));
        };
        let dim = first.len();
        if elements.iter().any(|e| e.len() != dim) {
            return Err(Error::Invalid("type elements have different lengths".into()));
        }
        let ts = TypeSet { elements, dim };
        if !ts.is_reduced() {
            return Err(Error::Invalid(format!("{ts:?} is not a reduced type")));
        }
        Ok(ts)
    }

    /// The one-dimensional type `Γ` of a line restricted to `Γ` (`|Γ| >= 2`).
    pub fn line_type(gamma: &[u8]) -> Result<TypeSet> {
        TypeSet::from_elements(gamma.iter().map(|&g| Word(vec![g])))
    }

    /// No constant row and no two consecutive identical rows.
    pub fn is_reduced(&self) -> bool {
        if self.elements.len() == 1 {
            return self.dim == 0;
        }
        let cols: Vec<&Word> = self.elements.iter().collect();
        let row = |i: usize| cols.iter().map(|c| c.0[i]).collect::<Vec<_>>();
        (0..self.dim).all(|i| {
            let r = row(i);
            r.iter().any(|&x| x != r[0]) && (i == 0 || row(i - 1) != r)
        })
    }

    /// A fixed enumeration of the type (sorted order).
    pub fn tuple(&self) -> Vec<Word> {
        self.elements.iter().cloned().collect()
    }
}

/// Reduce the coordinate matrix of `ts` (`ts[j]` is column `j`).
fn reduce(ts: &[&Word]) -> TypeTuple {
    let n = ts[0].len();
    let mut rows: Vec<Vec<u8>> = Vec::new();
    for i in 0..n {
        let row: Vec<u8> = ts.iter().map(|t| t.0[i]).collect();
        if row.iter().all(|&x| x == row[0]) {
            continue;
        }
        if rows.last() == Some(&row) {
            continue;
        }
        rows.push(row);
    }
    let dim = rows.len();
    let columns = (0..ts.len()).map(|j| Word(rows.iter().map(|r| r[j]).collect())).collect();
    TypeTuple { columns, dim }
}

fn check_tuple(ts: &[Word]) -> Result<()> {
    let Some(first) = ts.first() else {
        return Err(Error::Empty("tuple"));
    };
    let n = first.len();
    for (j, t) in ts.iter().enumerate() {
        if t.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: t.len() });
        }
        if ts[..j].contains(t) {
            return Err(Error::Duplicate(j));
        }
    }
    Ok(())
}

/// The row reduction alone, without the distinctness check. Repeated
/// entries give repeated columns.
pub fn reduce_rows(ts: &[Word]) -> Result<TypeTuple> {
    let Some(first) = ts.first() else {
        return Err(Error::Empty("tuple"));
    };
    if let Some(t) = ts.iter().find(|t| t.len() != first.len()) {
        return Err(Error::LengthMismatch { expected: first.len(), got: t.len() });
    }
    if ts.len() == 1 {
        return Ok(TypeTuple { columns: vec![Word::default()], dim: 0 });
    }
    Ok(reduce(&ts.iter().collect::<Vec<_>>()))
}

pub fn type_of_tuple(ts: &[Word]) -> Result<TypeTuple> {
    check_tuple(ts)?;
    if ts.len() == 1 {
        return Ok(TypeTuple { columns: vec![Word::default()], dim: 0 });
    }
    Ok(reduce(&ts.iter().collect::<Vec<_>>()))
}

pub fn type_of_set<'a>(g: impl IntoIterator<Item = &'a Word>) -> Result<TypeSet> {
    let sorted: BTreeSet<&Word> = g.into_iter().collect();
    let tuple: Vec<Word> = sorted.into_iter().cloned().collect();
    let tt = type_of_tuple(&tuple)?;
    Ok(TypeSet { elements: tt.columns.into_iter().collect(), dim: tt.dim })
}

/// All sets `G` in `A^n` with `τ(G) = τ`, each as a sorted point list,
/// deduplicated and sorted.
pub fn realizations(tau: &TypeSet, k: usize, n: usize) -> Result<Vec<Vec<Word>>> {
    if tau.dim == 0 {
        return Ok(all_words(k, n).map(|w| vec![w]).collect());
    }
    if tau.dim > n {
        return Err(Error::NoRealization(format!("type of dimension {} does not fit in A^{n}", tau.dim)));
    }
    let mut out: BTreeSet<Vec<Word>> = BTreeSet::new();
    for w in enumerate_subspaces(k, n, tau.dim)? {
        let mut pts: Vec<Word> = tau.elements.iter().map(|s| w.iso_unchecked(s)).collect();
        pts.sort();
        out.insert(pts);
    }
    Ok(out.into_iter().collect())
}

/// Every reduced type with `2 <= |τ| <= kappa` and `1 <= dim <= m`, ordered
/// by (cardinality, dimension, sorted elements).
pub fn types_up_to(k: usize, kappa: usize, m: usize) -> Vec<TypeSet> {
    let mut out = Vec::new();
    for size in 2..=kappa {
        for d in 1..=m {
            let Some(total) = k.checked_pow(d as u32) else { break };
            if size > total {
                continue;
            }
            let words: Vec<Word> = all_words(k, d).collect();
            for combo in words.iter().combinations(size) {
                let ts = TypeSet { elements: combo.into_iter().cloned().collect(), dim: d };
                if ts.is_reduced() {
                    out.push(ts);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(v: &[u8]) -> Word {
        Word(v.iter().map(|x| x - 1).collect())
    }

    #[test]
    fn single_word_has_empty_type() {
        let t = type_of_tuple(&[w(&[1, 2, 3])]).unwrap();
        assert_eq!(t.dim, 0);
        assert_eq!(type_of_set([&w(&[2, 2])]).unwrap(), TypeSet::empty_type());
    }

    #[test]
    fn full_square_has_dimension_two() {
        let all: Vec<Word> = all_words(2, 2).collect();
        let t = type_of_set(&all).unwrap();
        assert_eq!(t.dim, 2);
        assert_eq!(t.len(), 4);
    }

    #[test]
    fn duplicates_rejected() {
        assert!(type_of_tuple(&[w(&[1]), w(&[1])]).is_err());
        assert!(type_of_tuple(&[w(&[1]), w(&[1, 2])]).is_err());
    }

    #[test]
    fn reduced_types_enumeration() {
        // k=2, dim 1: the single type {1,2}
        let ts = types_up_to(2, 2, 1);
        assert_eq!(ts.len(), 1);
        // every enumerated type is the type of itself
        for t in types_up_to(3, 3, 2) {
            assert_eq!(type_of_set(&t.elements).unwrap(), t);
        }
    }

    #[test]
    fn realizations_have_the_type() {
        let tau = TypeSet::from_elements([w(&[1, 2]), w(&[2, 1])]).unwrap();
        let r = realizations(&tau, 3, 3).unwrap();
        assert!(!r.is_empty());
        for g in &r {
            assert_eq!(type_of_set(g).unwrap(), tau);
        }
    }
}
