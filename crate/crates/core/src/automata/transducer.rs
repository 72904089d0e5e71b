//! Asynchronous two-tape transducers with a bounded-delay conversion to
//! synchronous two-track automata.
//!
//! Multipliers that act on a prefix of a word and shift the remainder (for
//! example on concatenated encodings) are easiest to describe asynchronously.
//! When the length difference between the two tapes stays bounded along every
//! accepting run, the relation is synchronous and [`Transducer::to_sync`]
//! recovers it exactly.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::Arc;

use smallvec::SmallVec;

use super::{Alphabet, Dfa, Letter, Nfa, Sym};
use crate::{Error, Result};

type Buf = SmallVec<[Sym; 4]>;
/// `(input, output, target)`
type Edge = (Vec<Sym>, Vec<Sym>, usize);

#[derive(Clone, Debug)]
pub struct Transducer {
    alphabet: Arc<Alphabet>,
    /// `(input, output, target)` per state.
    edges: Vec<Vec<Edge>>,
    initial: usize,
    accepting: Vec<bool>,
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct Config {
    q: usize,
    left: Buf,
    right: Buf,
    left_done: bool,
    right_done: bool,
}

impl Transducer {
    pub fn new(alphabet: Arc<Alphabet>) -> Transducer {
        Transducer { alphabet, edges: vec![Vec::new()], initial: 0, accepting: vec![false] }
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn add_state(&mut self, accepting: bool) -> usize {
        self.edges.push(Vec::new());
        self.accepting.push(accepting);
        self.edges.len() - 1
    }

    pub fn set_accepting(&mut self, q: usize, acc: bool) {
        self.accepting[q] = acc;
    }

    pub fn add_edge(&mut self, from: usize, input: &[Sym], output: &[Sym], to: usize) {
        self.edges[from].push((input.to_vec(), output.to_vec(), to));
    }

    /// Adds a path reading `input` and writing `output` from `from` to `to`.
    pub fn add_pair(&mut self, from: usize, input: &[Sym], output: &[Sym], to: usize) {
        self.add_edge(from, input, output, to);
    }

    /// The relation of a synchronous two-track automaton.
    pub fn from_sync(dfa: &Dfa) -> Result<Transducer> {
        if dfa.tracks() != 2 {
            return Err(Error::arg("expected a two-track automaton"));
        }
        let mut t = Transducer {
            alphabet: dfa.alphabet().clone(),
            edges: vec![Vec::new(); dfa.state_count()],
            initial: dfa.initial(),
            accepting: (0..dfa.state_count()).map(|q| dfa.is_accepting(q)).collect(),
        };
        for q in 0..dfa.state_count() {
            for (l, r) in dfa.transitions(q) {
                let i: Vec<Sym> = l.0[0].into_iter().collect();
                let o: Vec<Sym> = l.0[1].into_iter().collect();
                t.edges[q].push((i, o, r));
            }
        }
        Ok(t)
    }

    /// Identity relation on a one-track language.
    pub fn identity_on(dfa: &Dfa) -> Result<Transducer> {
        Transducer::from_sync(&dfa.diagonal()?)
    }

    /// A finite relation given as explicit pairs.
    pub fn from_pairs(alphabet: Arc<Alphabet>, pairs: &[(Vec<Sym>, Vec<Sym>)]) -> Transducer {
        let mut t = Transducer::new(alphabet);
        let end = t.add_state(true);
        for (u, v) in pairs {
            t.add_edge(0, u, v, end);
        }
        t
    }

    fn append(&mut self, other: &Transducer) -> usize {
        let off = self.edges.len();
        for (q, row) in other.edges.iter().enumerate() {
            self.edges.push(row.iter().map(|(i, o, t)| (i.clone(), o.clone(), t + off)).collect());
            self.accepting.push(other.accepting[q]);
        }
        off
    }

    /// Relation concatenation: pairs `(u1 u2, v1 v2)`.
    pub fn concat(&self, other: &Transducer) -> Result<Transducer> {
        if self.alphabet != other.alphabet {
            return Err(Error::AlphabetMismatch("transducer concatenation".into()));
        }
        let mut t = self.clone();
        let off = t.append(other);
        for q in 0..self.edges.len() {
            if self.accepting[q] {
                t.edges[q].push((Vec::new(), Vec::new(), other.initial + off));
                t.accepting[q] = false;
            }
        }
        Ok(t)
    }

    /// Union of relations.
    pub fn union(parts: &[Transducer]) -> Result<Transducer> {
        let first = parts.first().ok_or_else(|| Error::arg("union of no transducers"))?;
        let mut t = Transducer::new(first.alphabet.clone());
        for p in parts {
            if p.alphabet != first.alphabet {
                return Err(Error::AlphabetMismatch("transducer union".into()));
            }
            let off = t.append(p);
            t.edges[0].push((Vec::new(), Vec::new(), p.initial + off));
        }
        Ok(t)
    }

    /// Kleene star of the relation.
    pub fn star(&self) -> Transducer {
        let mut t = Transducer::new(self.alphabet.clone());
        t.accepting[0] = true;
        let off = t.append(self);
        t.edges[0].push((Vec::new(), Vec::new(), self.initial + off));
        for q in 0..self.edges.len() {
            if self.accepting[q] {
                t.edges[q + off].push((Vec::new(), Vec::new(), 0));
            }
        }
        t
    }

    /// One or more repetitions.
    pub fn plus(&self) -> Result<Transducer> {
        self.concat(&self.star())
    }

    /// States from which an accepting state is reachable.
    fn coaccessible(&self) -> Vec<bool> {
        let mut co = self.accepting.clone();
        loop {
            let mut changed = false;
            for q in 0..self.edges.len() {
                if !co[q] && self.edges[q].iter().any(|(_, _, t)| co[*t]) {
                    co[q] = true;
                    changed = true;
                }
            }
            if !changed {
                return co;
            }
        }
    }

    /// Whether some accepting run from `c.q` reads input starting with the
    /// left buffer and writes output starting with the right buffer (exactly
    /// those, on a finished tape).
    fn viable(&self, c: &Config, co: &[bool]) -> bool {
        let (l, r) = (&c.left[..], &c.right[..]);
        let fits = |buf: &[Sym], w: &[Sym], done: bool| {
            if done { buf.starts_with(w) } else { buf.starts_with(w) || w.starts_with(buf) }
        };
        let mut seen: HashSet<(usize, usize, usize)> = HashSet::new();
        let mut stack = vec![(c.q, 0usize, 0usize)];
        while let Some((q, i, j)) = stack.pop() {
            if !seen.insert((q, i, j)) {
                continue;
            }
            if i == l.len() && j == r.len() && (if c.left_done || c.right_done { self.accepting[q] } else { co[q] }) {
                return true;
            }
            for (inp, out, t) in &self.edges[q] {
                if co[*t] && fits(&l[i..], inp, c.left_done) && fits(&r[j..], out, c.right_done) {
                    stack.push((*t, (i + inp.len()).min(l.len()), (j + out.len()).min(r.len())));
                }
            }
        }
        false
    }

    fn closure(&self, start: Config, delay: usize, co: &[bool]) -> Vec<Config> {
        let mut seen: HashSet<Config> = HashSet::new();
        let mut stack = vec![start];
        while let Some(c) = stack.pop() {
            if !seen.insert(c.clone()) {
                continue;
            }
            for (i, o, t) in &self.edges[c.q] {
                if c.left.starts_with(i) && c.right.starts_with(o) {
                    stack.push(Config {
                        q: *t,
                        left: SmallVec::from_slice(&c.left[i.len()..]),
                        right: SmallVec::from_slice(&c.right[o.len()..]),
                        left_done: c.left_done,
                        right_done: c.right_done,
                    });
                }
            }
        }
        // configurations waiting for symbols that can never arrive are dead
        seen.into_iter()
            .filter(|c| c.left.len() <= delay && c.right.len() <= delay && self.viable(c, co))
            .filter(|c| !(c.left_done && c.right_done) || self.accepting[c.q] && c.left.is_empty() && c.right.is_empty())
            .collect()
    }

    /// Converts to a synchronous two-track automaton, assuming every accepting
    /// run can be scheduled so that no more than `delay` symbols are read ahead
    /// on either tape. Runs needing more lookahead are lost, so `delay` must be
    /// at least the relation's length-lag bound.
    pub fn to_sync(&self, delay: usize) -> Dfa {
        let n_sym = self.alphabet.len() as Sym;
        let co = self.coaccessible();
        let mut nfa = Nfa::new(self.alphabet.clone(), 2);
        let mut index: HashMap<Config, usize> = HashMap::new();
        let mut queue: Vec<Config> = Vec::new();
        let id_of = |c: Config, nfa: &mut Nfa, index: &mut HashMap<Config, usize>, queue: &mut Vec<Config>| {
            *index.entry(c.clone()).or_insert_with(|| {
                let acc = self.accepting[c.q] && c.left.is_empty() && c.right.is_empty();
                queue.push(c);
                nfa.add_state(acc)
            })
        };
        let start = Config { q: self.initial, left: Buf::new(), right: Buf::new(), left_done: false, right_done: false };
        for c in self.closure(start, delay, &co) {
            let id = id_of(c, &mut nfa, &mut index, &mut queue);
            nfa.add_initial(id);
        }
        let options = |done: bool| -> Vec<Option<Sym>> {
            if done {
                vec![None]
            } else {
                std::iter::once(None).chain((0..n_sym).map(Some)).collect()
            }
        };
        let mut i = 0;
        while i < queue.len() {
            let c = queue[i].clone();
            let from = index[&c];
            i += 1;
            let mut moves: BTreeMap<Letter, Vec<usize>> = BTreeMap::new();
            for a in options(c.left_done) {
                for b in options(c.right_done) {
                    if a.is_none() && b.is_none() {
                        continue;
                    }
                    let mut next = c.clone();
                    match a {
                        Some(s) => next.left.push(s),
                        None => next.left_done = true,
                    }
                    match b {
                        Some(s) => next.right.push(s),
                        None => next.right_done = true,
                    }
                    let targets = self.closure(next, delay, &co);
                    let letter = Letter::from_slice(&[a, b]);
                    for t in targets {
                        let id = id_of(t, &mut nfa, &mut index, &mut queue);
                        moves.entry(letter.clone()).or_default().push(id);
                    }
                }
            }
            for (l, ts) in moves {
                for t in ts {
                    nfa.add_transition(from, l.clone(), t);
                }
            }
        }
        nfa.determinize_minimize()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{finite_language, universal};

    fn ab() -> Arc<Alphabet> {
        Alphabet::new(["a", "b"]).unwrap()
    }

    #[test]
    fn shift_by_prefix() {
        // (w, a w) for w in {a,b}*: lag 1 throughout
        let al = ab();
        let prefix = Transducer::from_pairs(al.clone(), &[(vec![], vec![0])]);
        let rest = Transducer::identity_on(&universal(al.clone())).unwrap();
        let t = prefix.concat(&rest).unwrap();
        let d = t.to_sync(1);
        assert!(d.accepts_tuple(&[&[1, 1], &[0, 1, 1]]));
        assert!(d.accepts_tuple(&[&[], &[0]]));
        assert!(!d.accepts_tuple(&[&[1, 1], &[0, 1]]));
        assert!(!d.accepts_tuple(&[&[1, 0], &[0, 0, 1]]));
        // with no lookahead allowed the shifted pairs are lost
        let d0 = t.to_sync(0);
        assert!(!d0.accepts_tuple(&[&[1, 1], &[0, 1, 1]]));
    }

    #[test]
    fn union_of_finite_pairs() {
        let al = ab();
        let t1 = Transducer::from_pairs(al.clone(), &[(vec![0], vec![1, 1])]);
        let t2 = Transducer::from_pairs(al.clone(), &[(vec![1, 1, 1], vec![])]);
        let d = Transducer::union(&[t1, t2]).unwrap().to_sync(3);
        assert!(d.accepts_tuple(&[&[0], &[1, 1]]));
        assert!(d.accepts_tuple(&[&[1, 1, 1], &[]]));
        assert!(!d.accepts_tuple(&[&[0], &[]]));
        let fl = finite_language(al, &[vec![0]]);
        let id = Transducer::identity_on(&fl).unwrap().to_sync(0);
        assert!(id.accepts_tuple(&[&[0], &[0]]));
    }
}
