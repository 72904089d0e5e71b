//! Subset construction, minimization and product constructions.

use std::collections::{BTreeMap, HashMap, VecDeque};

use super::{Dfa, Letter, Nfa};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CombineMode {
    Intersect,
    Union,
    Difference,
}

impl std::str::FromStr for CombineMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "intersect" => Ok(CombineMode::Intersect),
            "union" => Ok(CombineMode::Union),
            "difference" => Ok(CombineMode::Difference),
            other => Err(Error::arg(format!("unknown combine mode `{other}`"))),
        }
    }
}

pub(crate) fn determinize(nfa: &Nfa) -> Dfa {
    let mut start: Vec<usize> = nfa.initial.clone();
    start.sort_unstable();
    start.dedup();
    let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut subsets = vec![start.clone()];
    index.insert(start, 0);
    let mut delta: Vec<BTreeMap<Letter, usize>> = Vec::new();
    let mut i = 0;
    while i < subsets.len() {
        let mut moves: BTreeMap<Letter, Vec<usize>> = BTreeMap::new();
        for &q in &subsets[i] {
            for (l, t) in &nfa.delta[q] {
                moves.entry(l.clone()).or_default().push(*t);
            }
        }
        let mut row = BTreeMap::new();
        for (l, mut target) in moves {
            target.sort_unstable();
            target.dedup();
            let id = match index.get(&target) {
                Some(&id) => id,
                None => {
                    let id = subsets.len();
                    index.insert(target.clone(), id);
                    subsets.push(target);
                    id
                }
            };
            row.insert(l, id);
        }
        delta.push(row);
        i += 1;
    }
    let accepting = subsets.iter().map(|s| s.iter().any(|&q| nfa.accepting[q])).collect();
    Dfa { alphabet: nfa.alphabet.clone(), tracks: nfa.tracks, delta, initial: 0, accepting }
}

impl Dfa {
    /// Removes states that are unreachable or cannot reach acceptance.
    pub fn trim(&self) -> Dfa {
        let reach = self.reachable();
        let n = self.delta.len();
        let mut rev: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (q, row) in self.delta.iter().enumerate() {
            for &t in row.values() {
                rev[t].push(q);
            }
        }
        let mut live = vec![false; n];
        let mut stack: Vec<usize> = (0..n).filter(|&q| self.accepting[q]).collect();
        for &q in &stack {
            live[q] = true;
        }
        while let Some(q) = stack.pop() {
            for &p in &rev[q] {
                if !live[p] {
                    live[p] = true;
                    stack.push(p);
                }
            }
        }
        let keep: Vec<bool> = (0..n).map(|q| reach[q] && live[q]).collect();
        if !keep[self.initial] {
            return Dfa::empty(self.alphabet.clone(), self.tracks);
        }
        let mut new_id = vec![usize::MAX; n];
        let mut count = 0;
        for q in 0..n {
            if keep[q] {
                new_id[q] = count;
                count += 1;
            }
        }
        let mut delta = vec![BTreeMap::new(); count];
        let mut accepting = vec![false; count];
        for q in (0..n).filter(|&q| keep[q]) {
            accepting[new_id[q]] = self.accepting[q];
            delta[new_id[q]] = self.delta[q]
                .iter()
                .filter(|(_, &t)| keep[t])
                .map(|(l, &t)| (l.clone(), new_id[t]))
                .collect();
        }
        Dfa { alphabet: self.alphabet.clone(), tracks: self.tracks, delta, initial: new_id[self.initial], accepting }
    }

    /// Trim, Moore partition refinement, then canonical renumbering in
    /// breadth-first order from the initial state (letters in order). Two
    /// language-equal automata minimize to identical values.
    pub fn minimize(&self) -> Dfa {
        let t = self.trim();
        let n = t.delta.len();
        let mut letter_ids: BTreeMap<&Letter, u32> = BTreeMap::new();
        for row in &t.delta {
            for l in row.keys() {
                let next = letter_ids.len() as u32;
                letter_ids.entry(l).or_insert(next);
            }
        }
        let rows: Vec<Vec<(u32, usize)>> = t
            .delta
            .iter()
            .map(|row| row.iter().map(|(l, &q)| (letter_ids[l], q)).collect())
            .collect();
        let mut class: Vec<usize> = t.accepting.iter().map(|&a| a as usize).collect();
        let mut classes = usize::from(class.contains(&0)) + usize::from(class.contains(&1));
        loop {
            let mut sig_index: HashMap<(usize, Vec<(u32, usize)>), usize> = HashMap::new();
            let mut next = vec![0; n];
            for q in 0..n {
                let sig: Vec<(u32, usize)> = rows[q].iter().map(|&(l, r)| (l, class[r])).collect();
                let len = sig_index.len();
                next[q] = *sig_index.entry((class[q], sig)).or_insert(len);
            }
            let count = sig_index.len();
            class = next;
            if count == classes {
                break;
            }
            classes = count;
        }
        // canonical BFS numbering of classes
        let mut order = vec![usize::MAX; classes];
        let mut rep = Vec::with_capacity(classes);
        let mut queue = VecDeque::new();
        order[class[t.initial]] = 0;
        rep.push(t.initial);
        queue.push_back(t.initial);
        while let Some(q) = queue.pop_front() {
            for &r in t.delta[q].values() {
                if order[class[r]] == usize::MAX {
                    order[class[r]] = rep.len();
                    rep.push(r);
                    queue.push_back(r);
                }
            }
        }
        let delta = rep
            .iter()
            .map(|&q| t.delta[q].iter().map(|(l, &r)| (l.clone(), order[class[r]])).collect())
            .collect();
        let accepting = rep.iter().map(|&q| t.accepting[q]).collect();
        Dfa { alphabet: t.alphabet, tracks: t.tracks, delta, initial: 0, accepting }
    }
}

/// Product construction with implicit sinks; result is trimmed and minimized.
pub fn combine(a: &Dfa, b: &Dfa, mode: CombineMode) -> Result<Dfa> {
    if a.alphabet != b.alphabet {
        return Err(Error::AlphabetMismatch("operands use different base alphabets".into()));
    }
    if a.tracks != b.tracks {
        return Err(Error::AlphabetMismatch(format!("{} tracks vs {} tracks", a.tracks, b.tracks)));
    }
    type Pair = (Option<usize>, Option<usize>);
    let acc = |p: &Pair| {
        let x = p.0.is_some_and(|q| a.accepting[q]);
        let y = p.1.is_some_and(|q| b.accepting[q]);
        match mode {
            CombineMode::Intersect => x && y,
            CombineMode::Union => x || y,
            CombineMode::Difference => x && !y,
        }
    };
    let start: Pair = (Some(a.initial), Some(b.initial));
    let mut index: HashMap<Pair, usize> = HashMap::from([(start, 0)]);
    let mut pairs = vec![start];
    let mut delta = Vec::new();
    let mut i = 0;
    while i < pairs.len() {
        let (pa, pb) = pairs[i];
        let ra = pa.map(|q| &a.delta[q]);
        let rb = pb.map(|q| &b.delta[q]);
        let mut row = BTreeMap::new();
        let mut visit = |l: &Letter, ta: Option<usize>, tb: Option<usize>| {
            let live = match mode {
                CombineMode::Intersect => ta.is_some() && tb.is_some(),
                CombineMode::Union => ta.is_some() || tb.is_some(),
                CombineMode::Difference => ta.is_some(),
            };
            if !live {
                return;
            }
            let key = (ta, tb);
            let id = *index.entry(key).or_insert_with(|| {
                pairs.push(key);
                pairs.len() - 1
            });
            row.insert(l.clone(), id);
        };
        if let Some(ra) = ra {
            for (l, &ta) in ra {
                visit(l, Some(ta), rb.and_then(|r| r.get(l).copied()));
            }
        }
        if let Some(rb) = rb {
            for (l, &tb) in rb {
                if ra.is_none_or(|r| !r.contains_key(l)) {
                    visit(l, None, Some(tb));
                }
            }
        }
        delta.push(row);
        i += 1;
    }
    let accepting = pairs.iter().map(acc).collect();
    Ok(Dfa { alphabet: a.alphabet.clone(), tracks: a.tracks, delta, initial: 0, accepting }.minimize())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{enumerate_upto, Alphabet};

    fn a_star() -> Dfa {
        let al = Alphabet::new(["a"]).unwrap();
        Dfa::from_parts(al, 1, 1, 0, &[0], [(0, Letter::single(0), 0)]).unwrap()
    }

    fn aa_star() -> Dfa {
        let al = Alphabet::new(["a"]).unwrap();
        Dfa::from_parts(al, 1, 2, 0, &[0], [(0, Letter::single(0), 1), (1, Letter::single(0), 0)]).unwrap()
    }

    #[test]
    fn combine_examples() {
        let i = combine(&a_star(), &aa_star(), CombineMode::Intersect).unwrap();
        assert_eq!(i, aa_star().minimize());
        let empty = Dfa::empty(a_star().alphabet.clone(), 1);
        let u = combine(&empty, &aa_star(), CombineMode::Union).unwrap();
        assert!(u.equivalent(&aa_star()).unwrap());
        let d = combine(&aa_star(), &aa_star(), CombineMode::Difference).unwrap();
        assert!(d.is_empty());
        let other = Dfa::empty(Alphabet::new(["b"]).unwrap(), 1);
        assert!(matches!(combine(&a_star(), &other, CombineMode::Union), Err(Error::AlphabetMismatch(_))));
    }

    #[test]
    fn minimize_refines_when_every_state_accepts() {
        // a^{<=2}: three accepting states, none equivalent
        let al = Alphabet::new(["a"]).unwrap();
        let d = Dfa::from_parts(al, 1, 3, 0, &[0, 1, 2], [(0, Letter::single(0), 1), (1, Letter::single(0), 2)]).unwrap();
        let m = d.minimize();
        assert_eq!(m.state_count(), 3);
        assert_eq!(enumerate_upto(&m, 5).count(), 3);
    }

    #[test]
    fn determinize_a_or_ab() {
        let al = Alphabet::new(["a", "b"]).unwrap();
        let mut n = Nfa::new(al, 1);
        let s = n.add_state(false);
        let p = n.add_state(true);
        let q1 = n.add_state(false);
        let q2 = n.add_state(true);
        let _unreachable = n.add_state(true);
        n.add_initial(s);
        n.add_transition(s, Letter::single(0), p);
        n.add_transition(s, Letter::single(0), q1);
        n.add_transition(q1, Letter::single(1), q2);
        let d = n.determinize_minimize();
        assert_eq!(d.state_count(), 3);
        let words: Vec<_> = enumerate_upto(&d, 6).collect();
        assert_eq!(words, vec![vec![Letter::single(0)], vec![Letter::single(0), Letter::single(1)]]);
        // minimization is a fixpoint
        assert_eq!(d.minimize(), d);
    }
}
