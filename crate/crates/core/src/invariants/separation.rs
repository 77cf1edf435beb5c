//! Separation index of tuples and sets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypercube::Word;

pub const DEFAULT_EXACT_CAP: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparationIndex {
    pub value: usize,
    /// An enumeration achieving `value` (set version only).
    pub witness: Option<Vec<Word>>,
    /// False when `value` is only an upper bound.
    pub exact: bool,
}

fn diff_mask(a: &Word, b: &Word) -> u128 {
    a.0.iter().zip(&b.0).enumerate().filter(|(_, (x, y))| x != y).fold(0u128, |m, (i, _)| m | (1u128 << i))
}

/// Smallest set of coordinates meeting every mask, by branch and bound.
/// Returns `(size, chosen)`; an empty family gives `(0, 0)`.
pub fn min_hitting_set(sets: &[u128]) -> (usize, u128) {
    fn greedy(sets: &[u128]) -> u128 {
        let mut chosen = 0u128;
        let mut open: Vec<u128> = sets.to_vec();
        while !open.is_empty() {
            let mut best = (0u32, 0usize);
            for i in 0..128 {
                let c = open.iter().filter(|&&s| s >> i & 1 == 1).count() as u32;
                if c > best.0 {
                    best = (c, i);
                }
            }
            chosen |= 1u128 << best.1;
            open.retain(|&s| s & chosen == 0);
        }
        chosen
    }

    fn search(open: &[u128], chosen: u128, depth: usize, best: &mut (usize, u128)) {
        let open: Vec<u128> = open.iter().copied().filter(|&s| s & chosen == 0).collect();
        if open.is_empty() {
            if depth < best.0 {
                *best = (depth, chosen);
            }
            return;
        }
        if depth + 1 >= best.0 {
            return;
        }
        // pairwise-disjoint open sets each need their own coordinate
        let mut lower = 0;
        let mut used = 0u128;
        for &s in &open {
            if s & used == 0 {
                lower += 1;
                used |= s;
            }
        }
        if depth + lower >= best.0 {
            return;
        }
        let pivot = *open.iter().min_by_key(|s| s.count_ones()).expect("nonempty");
        let mut bits = pivot;
        while bits != 0 {
            let i = bits.trailing_zeros();
            bits &= bits - 1;
            search(&open, chosen | (1u128 << i), depth + 1, best);
        }
    }

    if sets.is_empty() {
        return (0, 0);
    }
    let g = greedy(sets);
    let mut best = (g.count_ones() as usize, g);
    search(sets, 0, 0, &mut best);
    best
}

fn check_words(ts: &[Word]) -> Result<usize> {
    let Some(first) = ts.first() else {
        return Err(Error::Empty("tuple"));
    };
    let n = first.len();
    if n > 128 {
        return Err(Error::Budget("separation index supports n <= 128".into()));
    }
    for (j, t) in ts.iter().enumerate() {
        if t.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: t.len() });
        }
        if ts[..j].contains(t) {
            return Err(Error::Duplicate(j));
        }
    }
    Ok(n)
}

/// Minimum number of coordinates separating `x` from every word in `prev`.
fn window(x: &Word, prev: &[&Word]) -> (usize, u128) {
    let masks: Vec<u128> = prev.iter().map(|q| diff_mask(x, q)).collect();
    min_hitting_set(&masks)
}

/// For element `j` of the tuple, a minimum window of 0-based coordinates
/// separating it from all predecessors.
pub fn separating_window(ts: &[Word], j: usize) -> Vec<usize> {
    let prev: Vec<&Word> = ts[..j].iter().collect();
    let (_, mask) = window(&ts[j], &prev);
    (0..128).filter(|i| mask >> i & 1 == 1).collect()
}

pub fn separation_index_tuple(ts: &[Word]) -> Result<SeparationIndex> {
    check_words(ts)?;
    let mut value = 1;
    for j in 1..ts.len() {
        let prev: Vec<&Word> = ts[..j].iter().collect();
        value = value.max(window(&ts[j], &prev).0);
    }
    Ok(SeparationIndex { value, witness: Some(ts.to_vec()), exact: true })
}

/// True when every element is separated from its predecessors within
/// `ell` coordinates.
pub fn is_separated(ts: &[Word], ell: usize) -> bool {
    (1..ts.len()).all(|j| {
        let prev: Vec<&Word> = ts[..j].iter().collect();
        window(&ts[j], &prev).0 <= ell
    })
}

/// Minimum over enumerations. Exact by subset dynamic programming up to
/// `exact_cap` elements; greedy upper bound above.
pub fn separation_index_set(g: &[Word], exact_cap: usize) -> Result<SeparationIndex> {
    let mut items: Vec<Word> = g.to_vec();
    items.sort();
    items.dedup();
    if items.len() != g.len() {
        return Err(Error::Invalid("set contains repeated words".into()));
    }
    check_words(&items)?;
    let p = items.len();
    if p == 1 {
        return Ok(SeparationIndex { value: 1, witness: Some(items), exact: true });
    }
    if p > exact_cap || p > 24 {
        return Ok(greedy_order(&items));
    }
    let full = (1usize << p) - 1;
    // f[S] = best index over enumerations of S; last[S] = chosen last element
    let mut f = vec![usize::MAX; 1 << p];
    let mut last = vec![0u8; 1 << p];
    for x in 0..p {
        f[1 << x] = 1;
        last[1 << x] = x as u8;
    }
    for s in 1..=full {
        if s.count_ones() < 2 {
            continue;
        }
        let mut best = (usize::MAX, 0usize);
        // greatest last element wins ties
        for x in (0..p).rev() {
            if s >> x & 1 == 0 {
                continue;
            }
            let rest = s & !(1 << x);
            if f[rest] >= best.0 {
                continue;
            }
            let prev: Vec<&Word> = (0..p).filter(|q| rest >> q & 1 == 1).map(|q| &items[q]).collect();
            let h = window(&items[x], &prev).0;
            let v = f[rest].max(h).max(1);
            if v < best.0 {
                best = (v, x);
            }
        }
        f[s] = best.0;
        last[s] = best.1 as u8;
    }
    let mut order = Vec::with_capacity(p);
    let mut s = full;
    while s != 0 {
        let x = last[s] as usize;
        order.push(items[x].clone());
        s &= !(1 << x);
    }
    order.reverse();
    Ok(SeparationIndex { value: f[full], witness: Some(order), exact: true })
}

fn greedy_order(items: &[Word]) -> SeparationIndex {
    let mut rest: Vec<Word> = items.to_vec();
    let mut order = Vec::new();
    let mut value = 1;
    while rest.len() > 1 {
        let mut best = (usize::MAX, 0usize);
        for x in (0..rest.len()).rev() {
            let prev: Vec<&Word> = rest.iter().enumerate().filter(|(q, _)| *q != x).map(|(_, w)| w).collect();
            let h = window(&rest[x], &prev).0;
            if h < best.0 {
                best = (h, x);
            }
        }
        value = value.max(best.0);
        order.push(rest.remove(best.1));
    }
    order.push(rest.remove(0));
    order.reverse();
    // whichever element comes last must be separated from all the others
    let exact = value <= last_element_bound(items);
    SeparationIndex { value, witness: Some(order), exact }
}

/// `min_x window(x, G \ {x})`, a lower bound for the separation index of `G`.
pub fn last_element_bound(items: &[Word]) -> usize {
    (0..items.len())
        .map(|x| {
            let prev: Vec<&Word> = items.iter().enumerate().filter(|(q, _)| *q != x).map(|(_, w)| w).collect();
            window(&items[x], &prev).0
        })
        .min()
        .unwrap_or(1)
        .max(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypercube::all_words;

    fn b(v: &[u8]) -> Word {
        Word(v.to_vec())
    }

    #[test]
    fn remark_pair_of_enumerations() {
        let t = [b(&[1, 0]), b(&[0, 1]), b(&[0, 0])];
        assert_eq!(separation_index_tuple(&t).unwrap().value, 2);
        let s = separation_index_set(&t, DEFAULT_EXACT_CAP).unwrap();
        assert_eq!(s.value, 1);
        let wit = s.witness.unwrap();
        assert_eq!(separation_index_tuple(&wit).unwrap().value, 1);
        assert_eq!(separation_index_tuple(&[b(&[0, 0]), b(&[1, 0]), b(&[0, 1])]).unwrap().value, 1);
    }

    #[test]
    fn single_word() {
        assert_eq!(separation_index_tuple(&[b(&[0])]).unwrap().value, 1);
    }

    #[test]
    fn full_cube_index_is_n() {
        for k in 2..=3 {
            for n in 1..=2 {
                let all: Vec<Word> = all_words(k, n).collect();
                assert_eq!(separation_index_set(&all, 12).unwrap().value, n);
            }
        }
        let all: Vec<Word> = all_words(2, 3).collect();
        assert_eq!(separation_index_set(&all, 12).unwrap().value, 3);
        let all: Vec<Word> = all_words(3, 3).collect();
        let s = separation_index_set(&all, 12).unwrap();
        assert_eq!((s.value, s.exact), (3, true));
    }

    #[test]
    fn hitting_set_small() {
        assert_eq!(min_hitting_set(&[0b011, 0b110]).0, 1);
        assert_eq!(min_hitting_set(&[0b001, 0b010, 0b100]).0, 3);
        assert_eq!(min_hitting_set(&[]).0, 0);
    }
}
