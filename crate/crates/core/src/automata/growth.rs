//! Enumeration, counting and growth classification.

use std::fmt;

use petgraph::algo::tarjan_scc;
use rand::Rng;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use super::{Dfa, Letter, Sym};

/// Streams the accepted words of length `<= max_len` in length-then-lexicographic
/// order (padding sorts before every base symbol).
pub struct Enumerate {
    dfa: Dfa,
    level: Vec<(Vec<Letter>, usize)>,
    pos: usize,
    len: usize,
    max_len: usize,
}

impl Iterator for Enumerate {
    type Item = Vec<Letter>;

    fn next(&mut self) -> Option<Vec<Letter>> {
        loop {
            while self.pos < self.level.len() {
                let (w, q) = &self.level[self.pos];
                self.pos += 1;
                if self.dfa.accepting[*q] {
                    return Some(w.clone());
                }
            }
            if self.len >= self.max_len || self.level.is_empty() {
                return None;
            }
            let mut next = Vec::new();
            for (w, q) in &self.level {
                for (l, t) in self.dfa.transitions(*q) {
                    let mut v = Vec::with_capacity(w.len() + 1);
                    v.extend_from_slice(w);
                    v.push(l.clone());
                    next.push((v, t));
                }
            }
            self.level = next;
            self.pos = 0;
            self.len += 1;
        }
    }
}

pub fn enumerate_upto(dfa: &Dfa, max_len: usize) -> Enumerate {
    let dfa = dfa.trim();
    let level = if dfa.is_empty() { Vec::new() } else { vec![(Vec::new(), dfa.initial)] };
    Enumerate { dfa, level, pos: 0, len: 0, max_len }
}

/// One-track convenience wrapper around [`enumerate_upto`].
pub fn enumerate_words(dfa: &Dfa, max_len: usize) -> Vec<Vec<Sym>> {
    enumerate_upto(dfa, max_len)
        .map(|w| w.iter().map(|l| l.0[0].expect("one-track words carry no padding")).collect())
        .collect()
}

/// `c[k]` = number of accepted words of length exactly `k`, saturating at
/// `u128::MAX`.
pub fn count_by_length(dfa: &Dfa, max_len: usize) -> Vec<u128> {
    let n = dfa.state_count();
    let mut cur = vec![0u128; n];
    cur[dfa.initial] = 1;
    let mut out = Vec::with_capacity(max_len + 1);
    for k in 0..=max_len {
        let acc = (0..n).filter(|&q| dfa.accepting[q]).fold(0u128, |s, q| s.saturating_add(cur[q]));
        out.push(acc);
        if k == max_len {
            break;
        }
        let mut next = vec![0u128; n];
        for (q, &c) in cur.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for &t in dfa.delta[q].values() {
                next[t] = next[t].saturating_add(c);
            }
        }
        cur = next;
    }
    out
}

/// A uniformly random accepted word of length exactly `len` (descent weighted
/// by the number of accepted completions), or `None` if there is none.
pub fn sample_word<R: Rng + ?Sized>(dfa: &Dfa, len: usize, rng: &mut R) -> Option<Vec<Letter>> {
    let n = dfa.state_count();
    // ways[k][q]: accepted words of length k readable from q
    let mut ways = vec![(0..n).map(|q| u128::from(dfa.accepting[q])).collect::<Vec<_>>()];
    for k in 1..=len {
        let prev = &ways[k - 1];
        let row = (0..n).map(|q| dfa.delta[q].values().fold(0u128, |s, &t| s.saturating_add(prev[t]))).collect();
        ways.push(row);
    }
    let mut q = dfa.initial;
    if ways[len][q] == 0 {
        return None;
    }
    let mut word = Vec::with_capacity(len);
    for k in (0..len).rev() {
        let total = ways[k + 1][q];
        let mut pick = rng.gen_range(0..total);
        for (l, &t) in &dfa.delta[q] {
            let w = ways[k][t];
            if pick < w {
                word.push(l.clone());
                q = t;
                break;
            }
            pick -= w;
        }
    }
    Some(word)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "degree")]
pub enum GrowthClass {
    PolynomialBounded(u32),
    Exponential,
}

impl fmt::Display for GrowthClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrowthClass::PolynomialBounded(d) => write!(f, "polynomial({d})"),
            GrowthClass::Exponential => write!(f, "exponential"),
        }
    }
}

/// Exponential iff some strongly connected component of the trimmed automaton
/// carries two distinct cycles through one state, i.e. has more internal edges
/// than states. Otherwise the degree is the longest chain of cycle-bearing
/// components minus one (an upper bound on the polynomial degree).
pub fn classify_growth(dfa: &Dfa) -> GrowthClass {
    let t = dfa.trim();
    let n = t.state_count();
    let mut g = DiGraph::<(), ()>::with_capacity(n, t.transition_count());
    let nodes: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
    for q in 0..n {
        for &r in t.delta[q].values() {
            g.add_edge(nodes[q], nodes[r], ());
        }
    }
    let sccs = tarjan_scc(&g);
    let mut comp = vec![0usize; n];
    for (i, scc) in sccs.iter().enumerate() {
        for v in scc {
            comp[v.index()] = i;
        }
    }
    let mut internal = vec![0usize; sccs.len()];
    for q in 0..n {
        for &r in t.delta[q].values() {
            if comp[q] == comp[r] {
                internal[comp[q]] += 1;
            }
        }
    }
    if sccs.iter().enumerate().any(|(i, s)| internal[i] > s.len()) {
        return GrowthClass::Exponential;
    }
    // tarjan_scc yields components in reverse topological order, so every
    // successor component has a smaller index and is finished first.
    let mut best = vec![0u32; sccs.len()];
    for (i, scc) in sccs.iter().enumerate() {
        let own = u32::from(internal[i] > 0);
        let mut succ = 0;
        for v in scc {
            for &r in t.delta[v.index()].values() {
                if comp[r] != i {
                    succ = succ.max(best[comp[r]]);
                }
            }
        }
        best[i] = own + succ;
    }
    let chain = if n == 0 { 0 } else { best[comp[t.initial]] };
    GrowthClass::PolynomialBounded(chain.saturating_sub(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{Alphabet, Nfa};

    fn dfa(states: usize, acc: &[usize], tr: &[(usize, Sym, usize)]) -> Dfa {
        let al = Alphabet::new(["a", "b"]).unwrap();
        Dfa::from_parts(al, 1, states, 0, acc, tr.iter().map(|&(f, s, t)| (f, Letter::single(s), t))).unwrap()
    }

    #[test]
    fn enumerate_examples() {
        let a_star = dfa(1, &[0], &[(0, 0, 0)]);
        assert_eq!(enumerate_words(&a_star, 2), vec![vec![], vec![0], vec![0, 0]]);
        let empty = Dfa::empty(a_star.alphabet.clone(), 1);
        assert_eq!(enumerate_upto(&empty, 100).count(), 0);
        let ends_b = dfa(2, &[1], &[(0, 0, 0), (0, 1, 1), (1, 0, 0), (1, 1, 1)]);
        assert_eq!(enumerate_words(&ends_b, 2), vec![vec![1], vec![0, 1], vec![1, 1]]);
    }

    #[test]
    fn count_examples() {
        let astar_bstar = dfa(2, &[0, 1], &[(0, 0, 0), (0, 1, 1), (1, 1, 1)]);
        assert_eq!(count_by_length(&astar_bstar, 3), vec![1, 2, 3, 4]);
        let all = dfa(1, &[0], &[(0, 0, 0), (0, 1, 0)]);
        assert_eq!(count_by_length(&all, 3), vec![1, 2, 4, 8]);
        let ab_star = dfa(2, &[0], &[(0, 0, 1), (1, 1, 0)]);
        assert_eq!(count_by_length(&ab_star, 4), vec![1, 0, 1, 0, 1]);
    }

    #[test]
    fn growth_examples() {
        let astar_bstar = dfa(2, &[0, 1], &[(0, 0, 0), (0, 1, 1), (1, 1, 1)]);
        assert_eq!(classify_growth(&astar_bstar), GrowthClass::PolynomialBounded(1));
        let all = dfa(1, &[0], &[(0, 0, 0), (0, 1, 0)]);
        assert_eq!(classify_growth(&all), GrowthClass::Exponential);
        let finite = dfa(2, &[1], &[(0, 0, 1)]);
        assert_eq!(classify_growth(&finite), GrowthClass::PolynomialBounded(0));
        // a cycle a b a b ... through two states is still simple
        let ab_star = dfa(2, &[0], &[(0, 0, 1), (1, 1, 0)]);
        assert_eq!(classify_growth(&ab_star), GrowthClass::PolynomialBounded(0));
        // dead cycles are trimmed away
        let mut n = Nfa::new(all.alphabet.clone(), 1);
        let s = n.add_state(true);
        let dead = n.add_state(false);
        n.add_initial(s);
        n.add_transition(s, Letter::single(0), dead);
        n.add_transition(dead, Letter::single(0), dead);
        n.add_transition(dead, Letter::single(1), dead);
        assert_eq!(classify_growth(&n.determinize()), GrowthClass::PolynomialBounded(0));
    }
}
