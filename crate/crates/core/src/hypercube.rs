//! Alphabets, words, variable words and combinatorial subspaces of `A^n`.
//!
//! Symbols are `u8` indices into an [`Alphabet`]'s ordered token list. All
//! orderings in the crate compare indices, never tokens.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Sym = u8;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet {
    tokens: Vec<String>,
}

impl Alphabet {
    pub fn new(tokens: Vec<String>) -> Result<Alphabet> {
        if tokens.len() < 2 {
            return Err(Error::Invalid("an alphabet needs at least two symbols".into()));
        }
        if tokens.len() > 64 {
            return Err(Error::Invalid("alphabets are limited to 64 symbols".into()));
        }
        for (i, t) in tokens.iter().enumerate() {
            if tokens[..i].contains(t) {
                return Err(Error::Invalid(format!("repeated symbol {t:?}")));
            }
            if is_variable_token(t) {
                return Err(Error::Invalid(format!("symbol {t:?} collides with a variable token")));
            }
        }
        Ok(Alphabet { tokens })
    }

    /// The alphabet `{1, ..., k}`.
    pub fn numeric(k: usize) -> Alphabet {
        Alphabet::new((1..=k).map(|i| i.to_string()).collect()).expect("k >= 2")
    }

    pub fn k(&self) -> usize {
        self.tokens.len()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn token(&self, s: Sym) -> &str {
        &self.tokens[s as usize]
    }

    pub fn index_of(&self, token: &str) -> Result<Sym> {
        self.tokens
            .iter()
            .position(|t| t == token)
            .map(|i| i as Sym)
            .ok_or_else(|| Error::Parse(format!("unknown symbol {token:?}")))
    }

    pub fn parse_word(&self, tokens: &[String]) -> Result<Word> {
        tokens.iter().map(|t| self.index_of(t)).collect::<Result<Vec<_>>>().map(Word)
    }

    pub fn render(&self, w: &Word) -> Vec<String> {
        w.0.iter().map(|&s| self.token(s).to_string()).collect()
    }
}

fn is_variable_token(t: &str) -> bool {
    t == "x" || (t.starts_with('x') && t.len() > 1 && t[1..].chars().all(|c| c.is_ascii_digit()))
}

/// A point of `A^n`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct Word(pub Vec<Sym>);

impl Word {
    pub fn new(letters: Vec<Sym>) -> Word {
        Word(letters)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Sym] {
        &self.0
    }

    pub fn contains(&self, s: Sym) -> bool {
        self.0.contains(&s)
    }

    pub fn check(&self, k: usize) -> Result<()> {
        match self.0.iter().find(|&&s| s as usize >= k) {
            Some(&s) => Err(Error::ForeignSymbol(s as usize)),
            None => Ok(()),
        }
    }

    /// Position in the lexicographic order of `A^n`, first coordinate most
    /// significant.
    pub fn rank(&self, k: usize) -> usize {
        self.0.iter().fold(0usize, |acc, &s| acc * k + s as usize)
    }

    pub fn from_rank(mut rank: usize, k: usize, n: usize) -> Word {
        let mut v = vec![0; n];
        for i in (0..n).rev() {
            v[i] = (rank % k) as Sym;
            rank /= k;
        }
        Word(v)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn slice(&self, from: usize, to: usize) -> Word {
        Word(self.0[from..to].to_vec())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", s + 1)?;
        }
        write!(f, ")")
    }
}

/// Number of points of `A^n`, failing instead of overflowing.
pub fn cube_size(k: usize, n: usize) -> Result<usize> {
    k.checked_pow(n as u32).ok_or_else(|| Error::Budget(format!("{k}^{n} points do not fit in memory")))
}

/// All words of `A^n` in rank order.
pub fn all_words(k: usize, n: usize) -> impl Iterator<Item = Word> {
    let size = k.pow(n as u32);
    (0..size).map(move |r| Word::from_rank(r, k, n))
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Entry {
    Const(Sym),
    /// 0-based variable index.
    Var(u8),
}

impl fmt::Debug for Entry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Entry::Const(s) => write!(f, "{}", s + 1),
            Entry::Var(i) => write!(f, "x{}", i + 1),
        }
    }
}

/// An `m`-variable word: every variable occurs, and the blocks of `x_i` come in
/// increasing order of `i`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VariableWord {
    entries: Vec<Entry>,
    m: usize,
}

impl VariableWord {
    pub fn new(entries: Vec<Entry>) -> Result<VariableWord> {
        let mut seen = 0usize;
        let mut current: Option<u8> = None;
        for e in &entries {
            if let Entry::Var(i) = *e {
                match current {
                    Some(c) if c == i => {}
                    _ if i as usize == seen => {
                        current = Some(i);
                        seen += 1;
                    }
                    _ => return Err(Error::Invalid(format!("variable x{} out of order in {:?}", i + 1, entries))),
                }
            }
        }
        if seen == 0 {
            return Err(Error::Invalid("a variable word needs at least one variable".into()));
        }
        Ok(VariableWord { entries, m: seen })
    }

    /// Check that all constants lie in an alphabet of size `k`.
    pub fn check(&self, k: usize) -> Result<()> {
        for e in &self.entries {
            if let Entry::Const(s) = e {
                if *s as usize >= k {
                    return Err(Error::ForeignSymbol(*s as usize));
                }
            }
        }
        Ok(())
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn contains_const(&self, s: Sym) -> bool {
        self.entries.contains(&Entry::Const(s))
    }

    pub fn substitute(&self, letters: &[Sym]) -> Result<Word> {
        if letters.len() != self.m {
            return Err(Error::LengthMismatch { expected: self.m, got: letters.len() });
        }
        Ok(self.substitute_unchecked(letters))
    }

    pub(crate) fn substitute_unchecked(&self, letters: &[Sym]) -> Word {
        Word(
            self.entries
                .iter()
                .map(|e| match *e {
                    Entry::Const(s) => s,
                    Entry::Var(i) => letters[i as usize],
                })
                .collect(),
        )
    }

    /// `v(α)` for a one-variable word.
    pub fn at(&self, a: Sym) -> Word {
        self.substitute_unchecked(&[a])
    }

    pub fn line_of(&self, k: usize) -> Result<Vec<Word>> {
        if self.m != 1 {
            return Err(Error::Invalid(format!("line_of needs m = 1, got m = {}", self.m)));
        }
        Ok((0..k as Sym).map(|a| self.at(a)).collect())
    }
}

impl fmt::Debug for VariableWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e:?}")?;
        }
        write!(f, ")")
    }
}

/// The point set `{v(a_1, ..., a_m)}` of a variable word.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct CombinatorialSpace {
    generator: VariableWord,
}

impl CombinatorialSpace {
    pub fn new(generator: VariableWord) -> CombinatorialSpace {
        CombinatorialSpace { generator }
    }

    /// `A^n` itself.
    pub fn full(n: usize) -> CombinatorialSpace {
        let entries = (0..n).map(|i| Entry::Var(i as u8)).collect();
        CombinatorialSpace::new(VariableWord::new(entries).expect("n >= 1"))
    }

    pub fn generator(&self) -> &VariableWord {
        &self.generator
    }

    pub fn dim(&self) -> usize {
        self.generator.m
    }

    pub fn ambient_n(&self) -> usize {
        self.generator.n()
    }

    /// The canonical isomorphism `A^dim -> V`.
    pub fn iso(&self, s: &Word) -> Result<Word> {
        self.generator.substitute(&s.0)
    }

    pub(crate) fn iso_unchecked(&self, s: &Word) -> Word {
        self.generator.substitute_unchecked(&s.0)
    }

    /// Inverse of [`Self::iso`]; `None` when `t` is not in the space.
    pub fn preimage(&self, t: &Word) -> Option<Word> {
        if t.len() != self.ambient_n() {
            return None;
        }
        let mut out: Vec<Option<Sym>> = vec![None; self.dim()];
        for (e, &x) in self.generator.entries.iter().zip(&t.0) {
            match *e {
                Entry::Const(s) if s != x => return None,
                Entry::Const(_) => {}
                Entry::Var(i) => match out[i as usize] {
                    Some(y) if y != x => return None,
                    _ => out[i as usize] = Some(x),
                },
            }
        }
        Some(Word(out.into_iter().map(|x| x.expect("every variable occurs")).collect()))
    }

    pub fn contains(&self, t: &Word) -> bool {
        self.preimage(t).is_some()
    }

    /// Points in the order of their preimages.
    pub fn points(&self, k: usize) -> Vec<Word> {
        all_words(k, self.dim()).map(|s| self.iso_unchecked(&s)).collect()
    }

    /// The image of a subspace of `A^dim` under the canonical isomorphism.
    pub fn compose(&self, inner: &CombinatorialSpace) -> Result<CombinatorialSpace> {
        if inner.ambient_n() != self.dim() {
            return Err(Error::LengthMismatch { expected: self.dim(), got: inner.ambient_n() });
        }
        let entries = self
            .generator
            .entries
            .iter()
            .map(|e| match *e {
                Entry::Const(s) => Entry::Const(s),
                Entry::Var(i) => inner.generator.entries[i as usize],
            })
            .collect();
        Ok(CombinatorialSpace::new(VariableWord::new(entries)?))
    }
}

/// `t^{β→α}`.
pub fn project(t: &Word, beta: Sym, alpha: Sym) -> Result<Word> {
    if alpha == beta {
        return Err(Error::Invalid("projection needs distinct symbols".into()));
    }
    Ok(project_or_same(t, beta, alpha))
}

/// `t^{β→α}` with `t^{α→α} = t`.
pub fn project_or_same(t: &Word, beta: Sym, alpha: Sym) -> Word {
    Word(t.0.iter().map(|&s| if s == beta { alpha } else { s }).collect())
}

/// `(α,β)`-equivalence, or `(α,β,I)`-equivalence when `within` is given.
/// Coordinates in `within` are 0-based.
pub fn equivalent(s: &Word, t: &Word, alpha: Sym, beta: Sym, within: Option<&[usize]>) -> Result<bool> {
    if s.len() != t.len() {
        return Err(Error::LengthMismatch { expected: s.len(), got: t.len() });
    }
    if alpha == beta {
        return Err(Error::Invalid("equivalence needs distinct symbols".into()));
    }
    let ab = |x: Sym| x == alpha || x == beta;
    for (i, (&x, &y)) in s.0.iter().zip(&t.0).enumerate() {
        let free = within.is_none_or(|set| set.contains(&i));
        if free {
            if x != y && !(ab(x) && ab(y)) {
                return Ok(false);
            }
        } else if x != y {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `{α^{n-m} β^m : 0 <= m <= n}`.
pub fn shelah_line(n: usize, alpha: Sym, beta: Sym) -> Result<Vec<Word>> {
    if alpha == beta {
        return Err(Error::Invalid("distinct symbols required".into()));
    }
    if n == 0 {
        return Err(Error::Invalid("n must be positive".into()));
    }
    Ok((0..=n).map(|m| Word((0..n).map(|i| if i < n - m { alpha } else { beta }).collect())).collect())
}

/// Lazy depth-first enumeration of the `m`-dimensional subspaces of `A^n`.
/// Generators come out in lexicographic order with constants `0..k` before
/// `x_1 < x_2 < ...`.
pub struct Subspaces {
    k: usize,
    n: usize,
    m: usize,
    stack: Vec<(Vec<u8>, usize)>,
    started: bool,
    done: bool,
}

impl Subspaces {
    fn used(&self) -> usize {
        self.stack
            .iter()
            .filter(|&(c, i)| c[*i] as usize >= self.k)
            .map(|(c, i)| c[*i] as usize - self.k + 1)
            .max()
            .unwrap_or(0)
    }

    fn descend(&mut self) {
        while self.stack.len() < self.n {
            let pos = self.stack.len();
            let used = self.used();
            let remaining = self.n - pos - 1;
            let mut cands = Vec::with_capacity(self.k + 2);
            if self.m - used <= remaining {
                cands.extend(0..self.k as u8);
                if used > 0 {
                    cands.push((self.k + used - 1) as u8);
                }
            }
            if used < self.m && self.m - used - 1 <= remaining {
                cands.push((self.k + used) as u8);
            }
            debug_assert!(!cands.is_empty());
            self.stack.push((cands, 0));
        }
    }

    fn current(&self) -> CombinatorialSpace {
        let entries = self
            .stack
            .iter()
            .map(|(c, i)| {
                let v = c[*i] as usize;
                if v < self.k {
                    Entry::Const(v as Sym)
                } else {
                    Entry::Var((v - self.k) as u8)
                }
            })
            .collect();
        CombinatorialSpace::new(VariableWord { entries, m: self.m })
    }
}

impl Iterator for Subspaces {
    type Item = CombinatorialSpace;

    fn next(&mut self) -> Option<CombinatorialSpace> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            self.descend();
            return Some(self.current());
        }
        loop {
            match self.stack.last_mut() {
                None => {
                    self.done = true;
                    return None;
                }
                Some((c, i)) if *i + 1 < c.len() => {
                    *i += 1;
                    break;
                }
                Some(_) => {
                    self.stack.pop();
                }
            }
        }
        self.descend();
        Some(self.current())
    }
}

pub fn enumerate_subspaces(k: usize, n: usize, m: usize) -> Result<Subspaces> {
    if m == 0 || m > n {
        return Err(Error::Invalid(format!("need 1 <= m <= n, got m = {m}, n = {n}")));
    }
    if k < 2 {
        return Err(Error::Invalid("k must be at least 2".into()));
    }
    Ok(Subspaces { k, n, m, stack: Vec::new(), started: false, done: false })
}

/// All variable words of length `n` (the generators of combinatorial lines).
pub fn variable_words(k: usize, n: usize) -> Result<Vec<VariableWord>> {
    Ok(enumerate_subspaces(k, n, 1)?.map(|v| v.generator).collect())
}

/// Number of `m`-dimensional subspaces of `A^n`, by counting surjective
/// block layouts: `sum_j C(n, j) k^(n-j) S'(j, m)` where `S'` counts
/// ordered-block compositions.
pub fn count_subspaces(k: usize, n: usize, m: usize) -> u128 {
    // dp[i][j] = number of valid prefixes of length i using j variables.
    let mut dp = vec![vec![0u128; m + 1]; n + 1];
    dp[0][0] = 1;
    for i in 0..n {
        for j in 0..=m {
            let c = dp[i][j];
            if c == 0 {
                continue;
            }
            dp[i + 1][j] += c * k as u128;
            if j > 0 {
                dp[i + 1][j] += c;
            }
            if j < m {
                dp[i + 1][j + 1] += c;
            }
        }
    }
    dp[n][m]
}
