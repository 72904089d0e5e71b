//! JSON exchange format.
//!
//! ```json
//! {"alphabet": ["0", "1", ["0", "~"], ["1", "1"]],
//!  "states": 2, "initial": 0, "accepting": [1],
//!  "transitions": [[0, ["0", "~"], 1]]}
//! ```
//!
//! Plain strings declare base symbols in order. Arrays declare tuple letters
//! of a multi-track automaton, with `"~"` as padding; a one-track automaton
//! uses plain strings only.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{Alphabet, Dfa, Letter, PAD_TOKEN};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SymbolJson {
    Base(String),
    Tuple(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialJson {
    One(usize),
    Many(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AutomatonJson {
    pub alphabet: Vec<SymbolJson>,
    pub states: usize,
    pub initial: InitialJson,
    pub accepting: Vec<usize>,
    pub transitions: Vec<(usize, SymbolJson, usize)>,
}

impl AutomatonJson {
    pub fn from_dfa(dfa: &Dfa) -> AutomatonJson {
        let al = dfa.alphabet();
        let render = |l: &Letter| -> SymbolJson {
            if dfa.tracks() == 1 {
                SymbolJson::Base(al.name(l.0[0].expect("one-track letter")).to_string())
            } else {
                SymbolJson::Tuple(
                    l.0.iter().map(|c| c.map_or(PAD_TOKEN.to_string(), |s| al.name(s).to_string())).collect(),
                )
            }
        };
        let mut alphabet: Vec<SymbolJson> = al.symbols().iter().map(|s| SymbolJson::Base(s.clone())).collect();
        if dfa.tracks() > 1 {
            let mut used: Vec<&Letter> = dfa.delta.iter().flat_map(|r| r.keys()).collect();
            used.sort();
            used.dedup();
            alphabet.extend(used.into_iter().map(render));
        }
        let transitions = (0..dfa.state_count())
            .flat_map(|q| dfa.transitions(q).map(move |(l, t)| (q, l, t)))
            .map(|(q, l, t)| (q, render(l), t))
            .collect();
        AutomatonJson {
            alphabet,
            states: dfa.state_count(),
            initial: InitialJson::One(dfa.initial()),
            accepting: (0..dfa.state_count()).filter(|&q| dfa.is_accepting(q)).collect(),
            transitions,
        }
    }

    pub fn to_dfa(&self) -> Result<Dfa> {
        let base: Vec<&str> = self
            .alphabet
            .iter()
            .filter_map(|s| match s {
                SymbolJson::Base(b) => Some(b.as_str()),
                SymbolJson::Tuple(_) => None,
            })
            .collect();
        let tuple_widths: Vec<usize> = self
            .alphabet
            .iter()
            .filter_map(|s| match s {
                SymbolJson::Tuple(t) => Some(t.len()),
                SymbolJson::Base(_) => None,
            })
            .collect();
        let tracks = match tuple_widths.first() {
            None => 1,
            Some(&w) => {
                if tuple_widths.iter().any(|&x| x != w) || w == 0 {
                    return Err(Error::Parse("tuple letters of differing widths".into()));
                }
                w
            }
        };
        let alphabet: Arc<Alphabet> = Alphabet::new(base.iter().copied())?;
        let letter = |s: &SymbolJson| -> Result<Letter> {
            match (s, tracks) {
                (SymbolJson::Base(b), 1) => Ok(Letter::single(alphabet.sym_or_err(b)?)),
                (SymbolJson::Tuple(t), k) if t.len() == k && k > 1 => t
                    .iter()
                    .map(|c| if c == PAD_TOKEN { Ok(None) } else { alphabet.sym_or_err(c).map(Some) })
                    .collect::<Result<_>>()
                    .map(Letter),
                _ => Err(Error::Parse(format!("letter {s:?} does not match a {tracks}-track alphabet"))),
            }
        };
        let declared: Vec<Letter> = self
            .alphabet
            .iter()
            .filter(|s| matches!(s, SymbolJson::Tuple(_)))
            .map(letter)
            .collect::<Result<_>>()?;
        let initial = match &self.initial {
            InitialJson::One(q) => *q,
            InitialJson::Many(v) if v.len() == 1 => v[0],
            InitialJson::Many(_) => return Err(Error::Parse("a deterministic automaton has one initial state".into())),
        };
        let transitions = self
            .transitions
            .iter()
            .map(|(f, s, t)| {
                let l = letter(s)?;
                if tracks > 1 && !declared.contains(&l) {
                    return Err(Error::Parse(format!("tuple {s:?} not declared in the alphabet")));
                }
                Ok((*f, l, *t))
            })
            .collect::<Result<Vec<_>>>()?;
        Dfa::from_parts(alphabet, tracks, self.states, initial, &self.accepting, transitions)
    }
}

impl Dfa {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&AutomatonJson::from_dfa(self)).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Dfa> {
        let raw: AutomatonJson = serde_json::from_str(text)?;
        raw.to_dfa()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Dfa> {
        Dfa::from_json(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_two_track() {
        let al = Alphabet::new(["0", "1"]).unwrap();
        let d = Dfa::from_parts(
            al,
            2,
            2,
            0,
            &[1],
            [(0, Letter::from_slice(&[Some(0), None]), 1), (1, Letter::from_slice(&[Some(1), Some(1)]), 1)],
        )
        .unwrap();
        let text = d.to_json();
        assert!(text.contains("\"~\""));
        assert_eq!(Dfa::from_json(&text).unwrap(), d);
    }

    #[test]
    fn rejects_unknown_fields_and_bad_letters() {
        let bad = r#"{"alphabet":["a"],"states":1,"initial":0,"accepting":[0],"transitions":[],"extra":1}"#;
        assert!(Dfa::from_json(bad).is_err());
        let unknown = r#"{"alphabet":["a"],"states":1,"initial":0,"accepting":[0],"transitions":[[0,"b",0]]}"#;
        assert!(Dfa::from_json(unknown).is_err());
        let pad = r#"{"alphabet":["a","~"],"states":1,"initial":0,"accepting":[0],"transitions":[]}"#;
        assert!(Dfa::from_json(pad).is_err());
        let ok = r#"{"alphabet":["a"],"states":1,"initial":[0],"accepting":[0],"transitions":[[0,"a",0]]}"#;
        assert!(Dfa::from_json(ok).unwrap().accepts_syms(&[0, 0]));
    }
}
