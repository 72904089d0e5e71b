//! Finite automata over symbol-tuple (convolution) alphabets.
//!
//! A k-track automaton reads letters that are k-tuples of base symbols or the
//! padding token. The all-padding tuple is never a letter. Transition maps are
//! sparse: a missing `(state, letter)` entry goes to an implicit rejecting sink,
//! which keeps product constructions over large tuple alphabets tractable.

mod growth;
mod json;
mod ops;
mod relation;
mod transducer;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use smallvec::SmallVec;

use crate::{Error, Result};

pub use growth::{classify_growth, count_by_length, enumerate_upto, enumerate_words, sample_word, Enumerate, GrowthClass};
pub use json::{AutomatonJson, InitialJson, SymbolJson};
pub use ops::{combine, CombineMode};
pub use relation::{join, permute_tracks, project, project_nfa, regroup, select_tracks, select_tracks_nfa, substitute, universal};
pub use transducer::Transducer;

/// Index of a base symbol in its [`Alphabet`].
pub type Sym = u16;

/// Reserved token for padding in the exchange format.
pub const PAD_TOKEN: &str = "~";

/// An ordered finite base alphabet. Symbol order is fixed at construction and
/// drives enumeration order.
#[derive(Clone, Debug)]
pub struct Alphabet {
    symbols: Vec<String>,
    index: HashMap<String, Sym>,
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        self.symbols == other.symbols
    }
}
impl Eq for Alphabet {}

impl Alphabet {
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = S>) -> Result<Arc<Alphabet>> {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        let mut index = HashMap::new();
        for (i, s) in symbols.iter().enumerate() {
            if s == PAD_TOKEN {
                return Err(Error::arg("the padding token cannot be a base symbol"));
            }
            if s.is_empty() {
                return Err(Error::arg("empty symbol name"));
            }
            if index.insert(s.clone(), i as Sym).is_some() {
                return Err(Error::arg(format!("duplicate symbol `{s}`")));
            }
        }
        if symbols.len() > Sym::MAX as usize {
            return Err(Error::arg("alphabet too large"));
        }
        Ok(Arc::new(Alphabet { symbols, index }))
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn name(&self, s: Sym) -> &str {
        &self.symbols[s as usize]
    }

    pub fn sym(&self, name: &str) -> Option<Sym> {
        self.index.get(name).copied()
    }

    pub fn sym_or_err(&self, name: &str) -> Result<Sym> {
        self.sym(name).ok_or_else(|| Error::UnknownLetter(name.to_string()))
    }

    /// Renders a one-track word by concatenating symbol names.
    pub fn render(&self, word: &[Sym]) -> String {
        word.iter().map(|&s| self.name(s)).collect()
    }

    /// Parses a word by greedy longest-match over symbol names.
    pub fn parse(&self, text: &str) -> Result<Vec<Sym>> {
        let mut out = Vec::new();
        let mut rest = text;
        while !rest.is_empty() {
            let best = self
                .symbols
                .iter()
                .enumerate()
                .filter(|(_, s)| rest.starts_with(s.as_str()))
                .max_by_key(|(_, s)| s.len());
            match best {
                Some((i, s)) => {
                    out.push(i as Sym);
                    rest = &rest[s.len()..];
                }
                None => return Err(Error::UnknownLetter(rest.to_string())),
            }
        }
        Ok(out)
    }
}

/// One letter of a k-track convolution: `None` is the padding token.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(pub SmallVec<[Option<Sym>; 4]>);

impl Letter {
    pub fn single(s: Sym) -> Letter {
        Letter(smallvec::smallvec![Some(s)])
    }

    pub fn from_slice(parts: &[Option<Sym>]) -> Letter {
        Letter(SmallVec::from_slice(parts))
    }

    pub fn tracks(&self) -> usize {
        self.0.len()
    }

    pub fn is_all_pad(&self) -> bool {
        self.0.iter().all(Option::is_none)
    }

    pub fn get(&self, track: usize) -> Option<Sym> {
        self.0[track]
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            match c {
                Some(s) => write!(f, "{s}")?,
                None => write!(f, "~")?,
            }
        }
        write!(f, ")")
    }
}

/// Convolution `w_1 ⊗ … ⊗ w_n`: track i reads word i followed by padding.
pub fn convolve(words: &[&[Sym]]) -> Result<Vec<Letter>> {
    if words.is_empty() {
        return Err(Error::arg("convolution needs at least one track"));
    }
    let len = words.iter().map(|w| w.len()).max().unwrap_or(0);
    Ok((0..len)
        .map(|k| Letter(words.iter().map(|w| w.get(k).copied()).collect()))
        .collect())
}

/// Inverse of [`convolve`]; rejects padding in the middle of a track.
pub fn deconvolve(cw: &[Letter], tracks: usize) -> Result<Vec<Vec<Sym>>> {
    let mut out = vec![Vec::new(); tracks];
    let mut ended = vec![false; tracks];
    for (pos, letter) in cw.iter().enumerate() {
        if letter.tracks() != tracks {
            return Err(Error::MalformedConvolution(format!(
                "letter at {pos} has {} tracks, expected {tracks}",
                letter.tracks()
            )));
        }
        if letter.is_all_pad() {
            return Err(Error::MalformedConvolution(format!("all-padding letter at {pos}")));
        }
        for (t, c) in letter.0.iter().enumerate() {
            match c {
                Some(s) if ended[t] => {
                    return Err(Error::MalformedConvolution(format!(
                        "track {} resumes after padding at position {pos} (symbol {s})",
                        t + 1
                    )))
                }
                Some(s) => out[t].push(*s),
                None => ended[t] = true,
            }
        }
    }
    Ok(out)
}

/// Deterministic automaton with a partial transition function (missing
/// transitions go to an implicit sink).
#[derive(Clone, PartialEq, Eq)]
pub struct Dfa {
    pub(crate) alphabet: Arc<Alphabet>,
    pub(crate) tracks: usize,
    pub(crate) delta: Vec<BTreeMap<Letter, usize>>,
    pub(crate) initial: usize,
    pub(crate) accepting: Vec<bool>,
}

impl fmt::Debug for Dfa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Dfa")
            .field("tracks", &self.tracks)
            .field("states", &self.delta.len())
            .field("transitions", &self.transition_count())
            .finish()
    }
}

impl Dfa {
    /// Automaton with a single non-accepting state: the empty language.
    pub fn empty(alphabet: Arc<Alphabet>, tracks: usize) -> Dfa {
        Dfa { alphabet, tracks, delta: vec![BTreeMap::new()], initial: 0, accepting: vec![false] }
    }

    /// Builds a Dfa from explicit parts; checks arities and determinism.
    pub fn from_parts(
        alphabet: Arc<Alphabet>,
        tracks: usize,
        states: usize,
        initial: usize,
        accepting: &[usize],
        transitions: impl IntoIterator<Item = (usize, Letter, usize)>,
    ) -> Result<Dfa> {
        if states == 0 || initial >= states {
            return Err(Error::arg("initial state out of range"));
        }
        let mut delta = vec![BTreeMap::new(); states];
        for (from, letter, to) in transitions {
            check_letter(&alphabet, tracks, &letter)?;
            if from >= states || to >= states {
                return Err(Error::arg("transition state out of range"));
            }
            if let Some(prev) = delta[from].insert(letter.clone(), to) {
                if prev != to {
                    return Err(Error::arg(format!("nondeterministic transition {from} {letter:?}")));
                }
            }
        }
        let mut acc = vec![false; states];
        for &a in accepting {
            if a >= states {
                return Err(Error::arg("accepting state out of range"));
            }
            acc[a] = true;
        }
        Ok(Dfa { alphabet, tracks, delta, initial, accepting: acc })
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn tracks(&self) -> usize {
        self.tracks
    }

    pub fn state_count(&self) -> usize {
        self.delta.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting[q]
    }

    pub fn accepts_empty(&self) -> bool {
        self.accepting[self.initial]
    }

    pub fn transition_count(&self) -> usize {
        self.delta.iter().map(BTreeMap::len).sum()
    }

    pub fn transitions(&self, q: usize) -> impl Iterator<Item = (&Letter, usize)> {
        self.delta[q].iter().map(|(l, &t)| (l, t))
    }

    pub fn step(&self, q: usize, letter: &Letter) -> Option<usize> {
        self.delta[q].get(letter).copied()
    }

    pub fn run(&self, word: &[Letter]) -> Option<usize> {
        word.iter().try_fold(self.initial, |q, l| self.step(q, l))
    }

    pub fn accepts(&self, word: &[Letter]) -> bool {
        self.run(word).is_some_and(|q| self.accepting[q])
    }

    /// Membership of a one-track word.
    pub fn accepts_syms(&self, word: &[Sym]) -> bool {
        let mut q = self.initial;
        let mut buf = Letter::single(0);
        for &s in word {
            buf.0[0] = Some(s);
            match self.step(q, &buf) {
                Some(t) => q = t,
                None => return false,
            }
        }
        self.accepting[q]
    }

    /// Membership of the convolution of `words`.
    pub fn accepts_tuple(&self, words: &[&[Sym]]) -> bool {
        if words.len() != self.tracks {
            return false;
        }
        match convolve(words) {
            Ok(cw) => self.accepts(&cw),
            Err(_) => false,
        }
    }

    pub fn is_empty(&self) -> bool {
        let reach = self.reachable();
        !(0..self.delta.len()).any(|q| reach[q] && self.accepting[q])
    }

    /// Language equality via emptiness of both differences.
    pub fn equivalent(&self, other: &Dfa) -> Result<bool> {
        Ok(combine(self, other, CombineMode::Difference)?.is_empty()
            && combine(other, self, CombineMode::Difference)?.is_empty())
    }

    pub(crate) fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.delta.len()];
        let mut stack = vec![self.initial];
        seen[self.initial] = true;
        while let Some(q) = stack.pop() {
            for &t in self.delta[q].values() {
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        seen
    }

    /// Re-expresses the automaton over a different alphabet by symbol name.
    pub fn with_alphabet(&self, alphabet: Arc<Alphabet>) -> Result<Dfa> {
        if *alphabet == *self.alphabet {
            return Ok(Dfa { alphabet, ..self.clone() });
        }
        let map: Vec<Sym> = self
            .alphabet
            .symbols()
            .iter()
            .map(|s| alphabet.sym_or_err(s))
            .collect::<Result<_>>()?;
        let delta = self
            .delta
            .iter()
            .map(|m| {
                m.iter()
                    .map(|(l, &t)| (Letter(l.0.iter().map(|c| c.map(|s| map[s as usize])).collect()), t))
                    .collect()
            })
            .collect();
        Ok(Dfa { alphabet, tracks: self.tracks, delta, initial: self.initial, accepting: self.accepting.clone() })
    }

    /// Redirects one transition; used for fault-injection tests.
    pub fn retarget(&mut self, state: usize, letter: &Letter, to: usize) -> bool {
        match self.delta.get_mut(state).and_then(|m| m.get_mut(letter)) {
            Some(t) if to < self.accepting.len() => {
                *t = to;
                true
            }
            _ => false,
        }
    }

    /// The diagonal relation `{(w, w) | w ∈ L}` as a two-track automaton.
    pub fn diagonal(&self) -> Result<Dfa> {
        if self.tracks != 1 {
            return Err(Error::arg("diagonal needs a one-track automaton"));
        }
        let delta = self
            .delta
            .iter()
            .map(|m| m.iter().map(|(l, &t)| (Letter::from_slice(&[l.0[0], l.0[0]]), t)).collect())
            .collect();
        Ok(Dfa { alphabet: self.alphabet.clone(), tracks: 2, delta, initial: self.initial, accepting: self.accepting.clone() })
    }

    pub fn to_nfa(&self) -> Nfa {
        Nfa {
            alphabet: self.alphabet.clone(),
            tracks: self.tracks,
            delta: self.delta.iter().map(|m| m.iter().map(|(l, &t)| (l.clone(), t)).collect()).collect(),
            initial: vec![self.initial],
            accepting: self.accepting.clone(),
        }
    }
}

pub(crate) fn check_letter(alphabet: &Alphabet, tracks: usize, letter: &Letter) -> Result<()> {
    if letter.tracks() != tracks {
        return Err(Error::arg(format!("letter {letter:?} does not have {tracks} tracks")));
    }
    if letter.is_all_pad() {
        return Err(Error::arg("the all-padding tuple is not a letter"));
    }
    if letter.0.iter().flatten().any(|&s| s as usize >= alphabet.len()) {
        return Err(Error::AlphabetMismatch(format!("letter {letter:?} uses an undeclared symbol")));
    }
    Ok(())
}

/// Nondeterministic automaton (no ε-moves; multiple initial states allowed).
#[derive(Clone, Debug)]
pub struct Nfa {
    pub(crate) alphabet: Arc<Alphabet>,
    pub(crate) tracks: usize,
    pub(crate) delta: Vec<Vec<(Letter, usize)>>,
    pub(crate) initial: Vec<usize>,
    pub(crate) accepting: Vec<bool>,
}

impl Nfa {
    pub fn new(alphabet: Arc<Alphabet>, tracks: usize) -> Nfa {
        Nfa { alphabet, tracks, delta: Vec::new(), initial: Vec::new(), accepting: Vec::new() }
    }

    pub fn add_state(&mut self, accepting: bool) -> usize {
        self.delta.push(Vec::new());
        self.accepting.push(accepting);
        self.delta.len() - 1
    }

    pub fn add_initial(&mut self, q: usize) {
        if !self.initial.contains(&q) {
            self.initial.push(q);
        }
    }

    pub fn set_accepting(&mut self, q: usize, acc: bool) {
        self.accepting[q] = acc;
    }

    pub fn add_transition(&mut self, from: usize, letter: Letter, to: usize) {
        debug_assert_eq!(letter.tracks(), self.tracks);
        debug_assert!(!letter.is_all_pad());
        self.delta[from].push((letter, to));
    }

    pub fn state_count(&self) -> usize {
        self.delta.len()
    }

    pub fn tracks(&self) -> usize {
        self.tracks
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn accepts(&self, word: &[Letter]) -> bool {
        let mut cur: Vec<usize> = self.initial.clone();
        for l in word {
            let mut next: Vec<usize> = cur
                .iter()
                .flat_map(|&q| self.delta[q].iter().filter(|(m, _)| m == l).map(|&(_, t)| t))
                .collect();
            next.sort_unstable();
            next.dedup();
            if next.is_empty() {
                return false;
            }
            cur = next;
        }
        cur.iter().any(|&q| self.accepting[q])
    }

    /// Subset construction followed by trimming and minimization.
    pub fn determinize_minimize(&self) -> Dfa {
        ops::determinize(self).minimize()
    }

    /// Subset construction only (reachable subsets).
    pub fn determinize(&self) -> Dfa {
        ops::determinize(self)
    }
}

/// Symbol-level helper: the one-track automaton accepting exactly the listed words.
pub fn finite_language(alphabet: Arc<Alphabet>, words: &[Vec<Sym>]) -> Dfa {
    let mut nfa = Nfa::new(alphabet, 1);
    let root = nfa.add_state(false);
    nfa.add_initial(root);
    for w in words {
        let mut q = root;
        for &s in w {
            let t = nfa.add_state(false);
            nfa.add_transition(q, Letter::single(s), t);
            q = t;
        }
        nfa.set_accepting(q, true);
    }
    nfa.determinize_minimize()
}

/// Concatenation `L_1 L_2` of one-track languages.
pub fn concat(a: &Dfa, b: &Dfa) -> Result<Dfa> {
    if a.alphabet != b.alphabet || a.tracks != b.tracks {
        return Err(Error::AlphabetMismatch("concatenation operands differ".into()));
    }
    let mut nfa = Nfa::new(a.alphabet.clone(), a.tracks);
    let off = a.state_count();
    for q in 0..off {
        nfa.add_state(a.accepting[q] && b.accepting[b.initial]);
    }
    for q in 0..b.state_count() {
        nfa.add_state(b.accepting[q]);
    }
    nfa.add_initial(a.initial);
    for q in 0..off {
        for (l, t) in a.transitions(q) {
            nfa.add_transition(q, l.clone(), t);
        }
        if a.accepting[q] {
            for (l, t) in b.transitions(b.initial) {
                nfa.add_transition(q, l.clone(), t + off);
            }
        }
    }
    for q in 0..b.state_count() {
        for (l, t) in b.transitions(q) {
            nfa.add_transition(q + off, l.clone(), t + off);
        }
    }
    Ok(nfa.determinize_minimize())
}

/// Union of an arbitrary number of same-alphabet automata.
pub fn union_all(parts: &[Dfa]) -> Result<Dfa> {
    let mut it = parts.iter();
    let first = it.next().ok_or_else(|| Error::arg("union of nothing"))?.clone();
    it.try_fold(first, |acc, d| combine(&acc, d, CombineMode::Union))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Arc<Alphabet> {
        Alphabet::new(["a", "b"]).unwrap()
    }

    #[test]
    fn convolve_examples() {
        let al = Alphabet::new(["a", "b", "x", "y", "0", "1"]).unwrap();
        let p = |s: &str| al.parse(s).unwrap();
        let (a, b) = (al.sym("a").unwrap(), al.sym("b").unwrap());
        let cw = convolve(&[&p("ab"), &p("a")]).unwrap();
        assert_eq!(cw, vec![Letter::from_slice(&[Some(a), Some(a)]), Letter::from_slice(&[Some(b), None])]);
        let (x, y) = (al.sym("x").unwrap(), al.sym("y").unwrap());
        let cw = convolve(&[&p(""), &p("xy")]).unwrap();
        assert_eq!(cw, vec![Letter::from_slice(&[None, Some(x)]), Letter::from_slice(&[None, Some(y)])]);
        let (z, o) = (al.sym("0").unwrap(), al.sym("1").unwrap());
        let cw = convolve(&[&p("1"), &p("101"), &p("")]).unwrap();
        assert_eq!(
            cw,
            vec![
                Letter::from_slice(&[Some(o), Some(o), None]),
                Letter::from_slice(&[None, Some(z), None]),
                Letter::from_slice(&[None, Some(o), None]),
            ]
        );
        assert!(convolve(&[]).is_err());
    }

    #[test]
    fn deconvolve_examples() {
        let cw = vec![Letter::from_slice(&[Some(0), Some(0)]), Letter::from_slice(&[Some(1), None])];
        assert_eq!(deconvolve(&cw, 2).unwrap(), vec![vec![0, 1], vec![0]]);
        assert_eq!(deconvolve(&[], 2).unwrap(), vec![Vec::<Sym>::new(), vec![]]);
        let bad = vec![Letter::from_slice(&[Some(0), None]), Letter::from_slice(&[None, Some(1)])];
        assert!(matches!(deconvolve(&bad, 2), Err(Error::MalformedConvolution(_))));
    }

    #[test]
    fn finite_language_and_concat() {
        let al = ab();
        let l = finite_language(al.clone(), &[vec![0], vec![0, 1]]);
        assert!(l.accepts_syms(&[0]) && l.accepts_syms(&[0, 1]) && !l.accepts_syms(&[1]));
        let c = concat(&l, &l).unwrap();
        assert!(c.accepts_syms(&[0, 0, 1]) && c.accepts_syms(&[0, 1, 0, 1]) && !c.accepts_syms(&[0]));
    }

    #[test]
    fn parse_render_roundtrip() {
        let al = Alphabet::new(["C0", "C1", "#", "+", "1"]).unwrap();
        let w = al.parse("+1#11C0").unwrap();
        assert_eq!(w.len(), 6);
        assert_eq!(al.render(&w), "+1#11C0");
        assert!(Alphabet::new(["~"]).is_err());
        assert!(Alphabet::new(["a", "a"]).is_err());
    }
}
