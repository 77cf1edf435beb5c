//! JSON shapes for processes, word lists and dense sets.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dhjlab::DenseSet;
use crate::error::{Error, Result};
use crate::hypercube::{all_words, cube_size, Alphabet, Word};
use crate::probspace::{AtomSpace, BernoulliProduct, Event, Formula, FormulaJson, Mask, Node, Space};
use crate::process::CubeProcess;
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SpaceJson {
    Bernoulli { epsilon: Rational, generators: Vec<String> },
    Atoms { weights: Vec<Rational> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EventJson {
    Mask { atoms: Vec<usize> },
    Formula(FormulaJson),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EventEntry {
    pub word: Vec<String>,
    pub event: EventJson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProcessJson {
    pub alphabet: Vec<String>,
    pub n: usize,
    pub space: SpaceJson,
    /// One entry per point of `A^n`, in any order.
    pub events: Vec<EventEntry>,
}

pub fn formula_to_json(f: &Formula, names: &[String]) -> FormulaJson {
    match f.node() {
        Node::True => FormulaJson::Const("true".into()),
        Node::False => FormulaJson::Const("false".into()),
        Node::Gen(g) => FormulaJson::Gen { gen: names[*g as usize].clone() },
        Node::Not(x) => FormulaJson::Not { not: Box::new(formula_to_json(x, names)) },
        Node::And(cs) => FormulaJson::And { and: cs.iter().map(|c| formula_to_json(c, names)).collect() },
        Node::Or(cs) => FormulaJson::Or { or: cs.iter().map(|c| formula_to_json(c, names)).collect() },
    }
}

pub fn formula_from_json(j: &FormulaJson, index: &HashMap<&str, u32>) -> Result<Formula> {
    Ok(match j {
        FormulaJson::Const(c) if c == "true" => Formula::tt(),
        FormulaJson::Const(c) if c == "false" => Formula::ff(),
        FormulaJson::Const(c) => return Err(Error::Parse(format!("unknown formula constant {c:?}"))),
        FormulaJson::Gen { gen } => {
            Formula::gen(*index.get(gen.as_str()).ok_or_else(|| Error::Parse(format!("unknown generator {gen:?}")))?)
        }
        FormulaJson::Not { not } => Formula::not(&formula_from_json(not, index)?),
        FormulaJson::And { and } => {
            Formula::and(and.iter().map(|c| formula_from_json(c, index)).collect::<Result<Vec<_>>>()?)
        }
        FormulaJson::Or { or } => {
            Formula::or(or.iter().map(|c| formula_from_json(c, index)).collect::<Result<Vec<_>>>()?)
        }
    })
}

pub fn process_to_json(p: &CubeProcess) -> ProcessJson {
    let alphabet = p.alphabet();
    let space = match p.space().as_ref() {
        Space::Bernoulli(b) => SpaceJson::Bernoulli { epsilon: b.epsilon.clone(), generators: b.names.clone() },
        Space::Atoms(a) => SpaceJson::Atoms { weights: a.weights().to_vec() },
    };
    let names = match p.space().as_ref() {
        Space::Bernoulli(b) => b.names.clone(),
        Space::Atoms(_) => Vec::new(),
    };
    let events = all_words(p.k(), p.n())
        .zip(p.events())
        .map(|(t, e)| EventEntry {
            word: alphabet.render(&t),
            event: match e {
                Event::Mask(m) => EventJson::Mask { atoms: m.ones().collect() },
                Event::Formula(f) => EventJson::Formula(formula_to_json(f, &names)),
            },
        })
        .collect();
    ProcessJson { alphabet: alphabet.tokens().to_vec(), n: p.n(), space, events }
}

pub fn process_from_json(j: &ProcessJson) -> Result<CubeProcess> {
    let alphabet = Alphabet::new(j.alphabet.clone())?;
    let k = alphabet.k();
    let size = cube_size(k, j.n)?;
    let space = match &j.space {
        SpaceJson::Bernoulli { epsilon, generators } => {
            Space::Bernoulli(BernoulliProduct::new(generators.clone(), epsilon.clone())?)
        }
        SpaceJson::Atoms { weights } => Space::Atoms(AtomSpace::new(weights.clone())?),
    };
    let index: HashMap<&str, u32> = match &j.space {
        SpaceJson::Bernoulli { generators, .. } => {
            generators.iter().enumerate().map(|(i, g)| (g.as_str(), i as u32)).collect()
        }
        SpaceJson::Atoms { .. } => HashMap::new(),
    };
    let mut events: Vec<Option<Event>> = vec![None; size];
    for entry in &j.events {
        let w = alphabet.parse_word(&entry.word)?;
        if w.len() != j.n {
            return Err(Error::LengthMismatch { expected: j.n, got: w.len() });
        }
        let ev = match (&entry.event, &space) {
            (EventJson::Mask { atoms }, Space::Atoms(a)) => {
                Event::Mask(Mask::from_atoms(a.atom_count(), atoms.iter().copied())?)
            }
            (EventJson::Formula(f), Space::Bernoulli(_)) => Event::Formula(formula_from_json(f, &index)?),
            _ => return Err(Error::Parse(format!("event at {:?} does not match the space kind", entry.word))),
        };
        let r = w.rank(k);
        if events[r].is_some() {
            return Err(Error::Parse(format!("event at {:?} given twice", entry.word)));
        }
        events[r] = Some(ev);
    }
    let events = events
        .into_iter()
        .enumerate()
        .map(|(r, e)| {
            e.ok_or_else(|| Error::Parse(format!("no event at {:?}", alphabet.render(&Word::from_rank(r, k, j.n)))))
        })
        .collect::<Result<Vec<_>>>()?;
    CubeProcess::new(alphabet, j.n, Arc::new(space), events)
}

pub fn parse_process(text: &str) -> Result<CubeProcess> {
    process_from_json(&serde_json::from_str(text)?)
}

pub fn write_process(p: &CubeProcess) -> String {
    serde_json::to_string_pretty(&process_to_json(p)).expect("process JSON")
}

/// A word token: a string, or a number read as its decimal string.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Token {
    Num(u64),
    Str(String),
}

impl Token {
    fn text(&self) -> String {
        match self {
            Token::Num(x) => x.to_string(),
            Token::Str(s) => s.clone(),
        }
    }
}

/// `{"alphabet": [...], "words": [[...], ...]}`, or a bare array of words
/// over `{1, ..., k}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WordListJson {
    Full { alphabet: Vec<String>, words: Vec<Vec<Token>> },
    Bare(Vec<Vec<Token>>),
}

/// Parse a word list; bare lists use `{1..k}` with `k` given or taken from
/// the largest token.
pub fn parse_words(text: &str, k: Option<usize>) -> Result<(Alphabet, Vec<Word>)> {
    let j: WordListJson = serde_json::from_str(text)?;
    let (alphabet, words) = match j {
        WordListJson::Full { alphabet, words } => (Alphabet::new(alphabet)?, words),
        WordListJson::Bare(words) => {
            let top = words
                .iter()
                .flatten()
                .map(|t| {
                    t.text().parse::<usize>().map_err(|_| Error::Parse(format!("token {:?} is not numeric", t.text())))
                })
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .max()
                .unwrap_or(2);
            (Alphabet::numeric(k.unwrap_or(top).max(2)), words)
        }
    };
    let words = words
        .iter()
        .map(|w| alphabet.parse_word(&w.iter().map(Token::text).collect::<Vec<_>>()))
        .collect::<Result<Vec<_>>>()?;
    Ok((alphabet, words))
}

pub fn render_words(alphabet: &Alphabet, words: &[Word]) -> Vec<Vec<String>> {
    words.iter().map(|w| alphabet.render(w)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DenseSetJson {
    pub alphabet: Vec<String>,
    pub n: usize,
    /// Sorted.
    pub members: Vec<Vec<String>>,
}

pub fn dense_set_to_json(d: &DenseSet, alphabet: &Alphabet) -> DenseSetJson {
    DenseSetJson {
        alphabet: alphabet.tokens().to_vec(),
        n: d.n,
        members: d.members.iter().map(|w| alphabet.render(w)).collect(),
    }
}

pub fn dense_set_from_json(j: &DenseSetJson) -> Result<(Alphabet, DenseSet)> {
    let alphabet = Alphabet::new(j.alphabet.clone())?;
    let words = j.members.iter().map(|w| alphabet.parse_word(w)).collect::<Result<Vec<_>>>()?;
    let d = DenseSet::new(alphabet.k(), j.n, words)?;
    Ok((alphabet, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::{example_intro, random_atom_space, random_process};

    #[test]
    fn round_trip_formulas() {
        let p = example_intro(2, &Rational::new(1, 2)).unwrap();
        let text = write_process(&p);
        let q = parse_process(&text).unwrap();
        assert!(p.same_events(&q).unwrap());
        assert_eq!(write_process(&q), text);
    }

    #[test]
    fn round_trip_masks() {
        let space = random_atom_space(12, 3).unwrap();
        let p = random_process(Alphabet::numeric(3), 2, Arc::new(space), 5).unwrap();
        let q = parse_process(&write_process(&p)).unwrap();
        assert!(p.same_events(&q).unwrap());
    }

    #[test]
    fn words_and_errors() {
        let (a, w) = parse_words("[[1,2],[2,1]]", Some(3)).unwrap();
        assert_eq!(a.k(), 3);
        assert_eq!(w[1], Word(vec![1, 0]));
        let (a, _) = parse_words(r#"{"alphabet":["a","b"],"words":[["a","b"]]}"#, None).unwrap();
        assert_eq!(a.tokens(), ["a", "b"]);
        assert!(parse_process("{").is_err());
        let mut j = process_to_json(&example_intro(1, &Rational::new(1, 2)).unwrap());
        j.events.pop();
        assert!(process_from_json(&j).is_err());
    }
}
