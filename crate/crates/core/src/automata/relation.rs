//! Relation algebra over tracks: projection, permutation, natural join and
//! letter substitution.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use smallvec::SmallVec;

use super::{Alphabet, Dfa, Letter, Nfa, Sym};
use crate::{Error, Result};

/// Keeps the listed tracks in the listed order and existentially quantifies
/// the rest. Positions where every kept track is padded form a trailing block
/// in any valid convolution, so they are folded into acceptance.
pub fn select_tracks_nfa(dfa: &Dfa, keep: &[usize]) -> Result<Nfa> {
    if keep.is_empty() {
        return Err(Error::arg("must keep at least one track"));
    }
    for &k in keep {
        if k >= dfa.tracks {
            return Err(Error::TrackOutOfRange { index: k, tracks: dfa.tracks });
        }
    }
    let n = dfa.state_count();
    let mut nfa = Nfa::new(dfa.alphabet.clone(), keep.len());
    for _ in 0..n {
        nfa.add_state(false);
    }
    nfa.add_initial(dfa.initial);
    let mut tail_rev: Vec<Vec<usize>> = vec![Vec::new(); n];
    for q in 0..n {
        for (l, t) in dfa.transitions(q) {
            let kept = Letter(keep.iter().map(|&k| l.0[k]).collect());
            if kept.is_all_pad() {
                tail_rev[t].push(q);
            } else {
                nfa.add_transition(q, kept, t);
            }
        }
    }
    let mut stack: Vec<usize> = (0..n).filter(|&q| dfa.accepting[q]).collect();
    for &q in &stack {
        nfa.accepting[q] = true;
    }
    while let Some(q) = stack.pop() {
        for &p in &tail_rev[q] {
            if !nfa.accepting[p] {
                nfa.accepting[p] = true;
                stack.push(p);
            }
        }
    }
    Ok(nfa)
}

/// Keeps the listed tracks (in that order); result is determinized and minimized.
pub fn select_tracks(dfa: &Dfa, keep: &[usize]) -> Result<Dfa> {
    Ok(select_tracks_nfa(dfa, keep)?.determinize_minimize())
}

/// Drops one track (0-based) and returns the unminimized nondeterministic result.
pub fn project_nfa(dfa: &Dfa, drop: usize) -> Result<Nfa> {
    if dfa.tracks < 2 {
        return Err(Error::arg("projection needs at least two tracks"));
    }
    if drop >= dfa.tracks {
        return Err(Error::TrackOutOfRange { index: drop, tracks: dfa.tracks });
    }
    let keep: Vec<usize> = (0..dfa.tracks).filter(|&k| k != drop).collect();
    select_tracks_nfa(dfa, &keep)
}

/// Drops one track (0-based); the result is determinized and minimized.
pub fn project(dfa: &Dfa, drop: usize) -> Result<Dfa> {
    Ok(project_nfa(dfa, drop)?.determinize_minimize())
}

/// Reorders tracks: output track `i` is input track `perm[i]`.
pub fn permute_tracks(dfa: &Dfa, perm: &[usize]) -> Result<Dfa> {
    let mut seen = vec![false; dfa.tracks];
    if perm.len() != dfa.tracks {
        return Err(Error::arg("permutation length differs from track count"));
    }
    for &p in perm {
        if p >= dfa.tracks || std::mem::replace(&mut seen[p], true) {
            return Err(Error::arg("not a permutation of the tracks"));
        }
    }
    let delta = dfa
        .delta
        .iter()
        .map(|row| row.iter().map(|(l, &t)| (Letter(perm.iter().map(|&p| l.0[p]).collect()), t)).collect())
        .collect();
    Ok(Dfa { alphabet: dfa.alphabet.clone(), tracks: dfa.tracks, delta, initial: dfa.initial, accepting: dfa.accepting.clone() }
        .minimize())
}

/// Fuses groups of tracks into single tracks over a tuple alphabet. `name`
/// maps a group's components (never all padding) to a symbol of `target`; an
/// all-padding group becomes padding.
pub fn regroup(
    dfa: &Dfa,
    groups: &[Vec<usize>],
    target: Arc<Alphabet>,
    name: impl Fn(&[Option<Sym>]) -> Result<Sym>,
) -> Result<Dfa> {
    let mut seen = vec![false; dfa.tracks];
    for &k in groups.iter().flatten() {
        if k >= dfa.tracks {
            return Err(Error::TrackOutOfRange { index: k, tracks: dfa.tracks });
        }
        if std::mem::replace(&mut seen[k], true) {
            return Err(Error::arg("track listed in two groups"));
        }
    }
    if seen.contains(&false) {
        return Err(Error::arg("every track must belong to a group"));
    }
    let mut delta = Vec::with_capacity(dfa.state_count());
    for row in &dfa.delta {
        let mut out = BTreeMap::new();
        for (l, &t) in row {
            let mut parts = SmallVec::new();
            for g in groups {
                let comp: SmallVec<[Option<Sym>; 8]> = g.iter().map(|&k| l.0[k]).collect();
                parts.push(if comp.iter().all(Option::is_none) { None } else { Some(name(&comp)?) });
            }
            let letter = Letter(parts);
            if letter.is_all_pad() {
                return Err(Error::arg("regrouping drops a nonempty track"));
            }
            out.insert(letter, t);
        }
        delta.push(out);
    }
    Ok(Dfa { alphabet: target, tracks: groups.len(), delta, initial: dfa.initial, accepting: dfa.accepting.clone() }.minimize())
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Side {
    At(usize),
    Done,
}

/// Natural join of two relations whose tracks are named by `a_vars` and
/// `b_vars`: a tuple is accepted iff its restriction to each side's names is
/// accepted by that side. Output tracks are `a_vars` followed by the names of
/// `b_vars` not already present. Returns the minimized result and its names.
pub fn join<V: Clone + Eq>(a: &Dfa, a_vars: &[V], b: &Dfa, b_vars: &[V]) -> Result<(Dfa, Vec<V>)> {
    if a.alphabet != b.alphabet {
        return Err(Error::AlphabetMismatch("join operands use different base alphabets".into()));
    }
    if a_vars.len() != a.tracks || b_vars.len() != b.tracks {
        return Err(Error::arg("variable list length differs from track count"));
    }
    let mut out_vars: Vec<V> = a_vars.to_vec();
    let mut b_pos = Vec::with_capacity(b_vars.len());
    for v in b_vars {
        match out_vars.iter().position(|w| w == v) {
            Some(p) => b_pos.push(p),
            None => {
                out_vars.push(v.clone());
                b_pos.push(out_vars.len() - 1);
            }
        }
    }
    let width = out_vars.len();
    let pad_a = Letter(SmallVec::from_elem(None, a.tracks));
    let pad_b = Letter(SmallVec::from_elem(None, b.tracks));
    let moves = |d: &Dfa, s: Side, pad: &Letter| -> Vec<(Letter, Side)> {
        let mut v = Vec::new();
        match s {
            Side::Done => v.push((pad.clone(), Side::Done)),
            Side::At(q) => {
                if d.accepting[q] {
                    v.push((pad.clone(), Side::Done));
                }
                v.extend(d.transitions(q).map(|(l, t)| (l.clone(), Side::At(t))));
            }
        }
        v
    };
    let accepts = |d: &Dfa, s: Side| match s {
        Side::Done => true,
        Side::At(q) => d.accepting[q],
    };
    let start = (Side::At(a.initial), Side::At(b.initial));
    let mut index = HashMap::from([(start, 0usize)]);
    let mut states = vec![start];
    let mut delta: Vec<BTreeMap<Letter, usize>> = Vec::new();
    let mut i = 0;
    while i < states.len() {
        let (sa, sb) = states[i];
        let ma = moves(a, sa, &pad_a);
        let mb = moves(b, sb, &pad_b);
        let mut row = BTreeMap::new();
        for (la, ta) in &ma {
            let mut base: SmallVec<[Option<u16>; 4]> = SmallVec::from_elem(None, width);
            base[..a.tracks].copy_from_slice(&la.0);
            'inner: for (lb, tb) in &mb {
                let mut out = base.clone();
                for (j, &p) in b_pos.iter().enumerate() {
                    if p < a.tracks {
                        if out[p] != lb.0[j] {
                            continue 'inner;
                        }
                    } else {
                        out[p] = lb.0[j];
                    }
                }
                let letter = Letter(out);
                if letter.is_all_pad() {
                    continue;
                }
                let key = (*ta, *tb);
                let id = *index.entry(key).or_insert_with(|| {
                    states.push(key);
                    states.len() - 1
                });
                row.insert(letter, id);
            }
        }
        delta.push(row);
        i += 1;
    }
    let accepting = states.iter().map(|&(sa, sb)| accepts(a, sa) && accepts(b, sb)).collect();
    let d = Dfa { alphabet: a.alphabet.clone(), tracks: width, delta, initial: 0, accepting };
    Ok((d.minimize(), out_vars))
}

/// The one-track automaton accepting every word over the alphabet.
pub fn universal(alphabet: Arc<Alphabet>) -> Dfa {
    let n = alphabet.len();
    Dfa::from_parts(alphabet, 1, 1, 0, &[0], (0..n).map(|s| (0, Letter::single(s as u16), 0)))
        .expect("well-formed universal automaton")
}

/// Replaces every letter by a fixed nonempty word of letters over a new
/// alphabet (a letter-to-word homomorphism applied position-synchronously).
pub fn substitute(
    dfa: &Dfa,
    alphabet: Arc<Alphabet>,
    tracks: usize,
    f: impl Fn(&Letter) -> Result<Vec<Letter>>,
) -> Result<Dfa> {
    let mut nfa = Nfa::new(alphabet, tracks);
    for q in 0..dfa.state_count() {
        nfa.add_state(dfa.accepting[q]);
    }
    nfa.add_initial(dfa.initial);
    for q in 0..dfa.state_count() {
        for (l, t) in dfa.transitions(q) {
            let word = f(l)?;
            if word.is_empty() {
                return Err(Error::arg("substitution image must be nonempty"));
            }
            let mut cur = q;
            for (k, m) in word.iter().enumerate() {
                let next = if k + 1 == word.len() { t } else { nfa.add_state(false) };
                nfa.add_transition(cur, m.clone(), next);
                cur = next;
            }
        }
    }
    Ok(nfa.determinize_minimize())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{convolve, enumerate_upto, CombineMode};

    fn bin() -> Arc<Alphabet> {
        Alphabet::new(["0", "1"]).unwrap()
    }

    /// MSB-first binary naturals without leading zeros (0 is "0").
    fn naturals() -> Dfa {
        Dfa::from_parts(
            bin(),
            1,
            3,
            0,
            &[1, 2],
            [(0, Letter::single(0), 1), (0, Letter::single(1), 2), (2, Letter::single(0), 2), (2, Letter::single(1), 2)],
        )
        .unwrap()
    }

    fn value(w: &[u16]) -> u64 {
        w.iter().fold(0, |v, &b| 2 * v + b as u64)
    }

    fn render(n: u64) -> Vec<u16> {
        format!("{n:b}").bytes().map(|b| (b - b'0') as u16).collect()
    }

    /// Successor relation built by brute force over small values.
    fn successor_upto(limit: u64) -> Dfa {
        let mut nfa = Nfa::new(bin(), 2);
        let root = nfa.add_state(false);
        nfa.add_initial(root);
        for n in 0..limit {
            let (a, b) = (render(n), render(n + 1));
            let cw = convolve(&[&a, &b]).unwrap();
            let mut q = root;
            for l in cw {
                let t = nfa.add_state(false);
                nfa.add_transition(q, l, t);
                q = t;
            }
            nfa.set_accepting(q, true);
        }
        nfa.determinize_minimize()
    }

    #[test]
    fn project_equality_gives_domain() {
        let eq = naturals().diagonal().unwrap();
        assert!(project(&eq, 1).unwrap().equivalent(&naturals()).unwrap());
        let empty = Dfa::empty(bin(), 2);
        assert!(project(&empty, 0).unwrap().is_empty());
        assert!(matches!(project(&eq, 2), Err(Error::TrackOutOfRange { .. })));
    }

    #[test]
    fn project_successor_drop_first() {
        let succ = successor_upto(64);
        let img = project(&succ, 0).unwrap();
        let got: Vec<u64> = enumerate_upto(&img, 6).map(|w| value(&w.iter().map(|l| l.0[0].unwrap()).collect::<Vec<_>>())).collect();
        let mut expect: Vec<u64> = (1..64).collect();
        expect.sort_by_key(|&n| (render(n).len(), n));
        assert_eq!(got, expect);
    }

    #[test]
    fn join_then_project_composes() {
        // succ ∘ succ via join on the middle variable
        let succ = successor_upto(200);
        let (j, vars) = join(&succ, &["x", "y"], &succ, &["y", "z"]).unwrap();
        assert_eq!(vars, vec!["x", "y", "z"]);
        let comp = project(&j, 1).unwrap();
        for n in 0..100u64 {
            assert!(comp.accepts_tuple(&[&render(n), &render(n + 2)]));
            assert!(!comp.accepts_tuple(&[&render(n), &render(n + 1)]));
        }
        // joining with itself on identical names is intersection
        let (same, _) = join(&succ, &["x", "y"], &succ, &["x", "y"]).unwrap();
        assert!(same.equivalent(&succ).unwrap());
    }

    #[test]
    fn join_disjoint_is_cross_product() {
        let (j, _) = join(&naturals(), &["x"], &naturals(), &["y"]).unwrap();
        assert!(j.accepts_tuple(&[&render(5), &render(100)]));
        assert!(j.accepts_tuple(&[&render(100), &render(0)]));
        assert!(!j.accepts_tuple(&[&[0, 1], &render(1)]));
        let back = project(&j, 1).unwrap();
        assert!(back.equivalent(&naturals()).unwrap());
    }

    #[test]
    fn permute_swaps() {
        let succ = successor_upto(40);
        let pred = permute_tracks(&succ, &[1, 0]).unwrap();
        assert!(pred.accepts_tuple(&[&render(8), &render(7)]));
        let back = permute_tracks(&pred, &[1, 0]).unwrap();
        assert!(combine_eq(&back, &succ));
    }

    fn combine_eq(a: &Dfa, b: &Dfa) -> bool {
        crate::automata::combine(a, b, CombineMode::Difference).unwrap().is_empty()
            && crate::automata::combine(b, a, CombineMode::Difference).unwrap().is_empty()
    }

    #[test]
    fn substitute_doubles_letters() {
        let d = substitute(&naturals(), bin(), 1, |l| Ok(vec![l.clone(), l.clone()])).unwrap();
        assert!(d.accepts_syms(&[1, 1, 0, 0]));
        assert!(!d.accepts_syms(&[1, 0]));
    }
}
