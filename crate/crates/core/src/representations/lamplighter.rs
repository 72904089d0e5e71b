//! The lamplighter representation over `Σ = {+, -, 0, 1, C0, C1, #}`.
//!
//! `(f, z)` is written `u # f(s) … C_{f(z)} … f(t)` where `[s, t]` is the hull
//! of the lit lamps and the cursor and `u` is `s` in sign-magnitude binary,
//! most significant digit first (zero is `+0`).

use std::sync::Arc;

use crate::automata::{join, Alphabet, CombineMode, Dfa, Letter, Sym, Transducer};
use crate::groups::Group;
use crate::Result;

use super::codec::{
    LamplighterCodec, LAMP_C0 as C0, LAMP_C1 as C1, LAMP_HASH as HASH, LAMP_MINUS as MINUS, LAMP_ONE as ONE,
    LAMP_PLUS as PLUS, LAMP_ZERO as ZERO,
};
use super::{CayleyRep, RepSpec};

pub const LAMPLIGHTER_SYMBOLS: [&str; 7] = ["+", "-", "0", "1", "C0", "C1", "#"];

fn dfa(sigma: &Arc<Alphabet>, states: usize, accepting: &[usize], edges: &[(usize, Sym, usize)]) -> Dfa {
    Dfa::from_parts(sigma.clone(), 1, states, 0, accepting, edges.iter().map(|&(q, s, t)| (q, Letter::single(s), t)))
        .expect("well-formed automaton")
}

/// Canonical offsets `+0`, `+1(0|1)*`, `-1(0|1)*`.
fn offsets(sigma: &Arc<Alphabet>) -> Dfa {
    dfa(sigma, 5, &[3, 4], &[(0, PLUS, 1), (0, MINUS, 2), (1, ZERO, 3), (1, ONE, 4), (2, ONE, 4), (4, ZERO, 4), (4, ONE, 4)])
}

/// Tight windows: exactly one cursor cell, both ends lit or the cursor.
fn windows(sigma: &Arc<Alphabet>) -> Dfa {
    // 0 start, 1/2 no cursor yet (last lit / dark), 3 cursor last, 4/5 after cursor (lit / dark)
    let mut e = vec![(0, ONE, 1)];
    for q in [0, 1, 2] {
        e.push((q, C0, 3));
        e.push((q, C1, 3));
    }
    for q in [1, 2] {
        e.push((q, ONE, 1));
        e.push((q, ZERO, 2));
    }
    for q in [3, 4, 5] {
        e.push((q, ONE, 4));
        e.push((q, ZERO, 5));
    }
    dfa(sigma, 6, &[3, 4], &e)
}

fn language(sigma: &Arc<Alphabet>) -> Result<Dfa> {
    let hash = dfa(sigma, 2, &[1], &[(0, HASH, 1)]);
    crate::automata::concat(&crate::automata::concat(&offsets(sigma), &hash)?, &windows(sigma))
}

fn pairs(sigma: &Arc<Alphabet>, p: &[(&[Sym], &[Sym])]) -> Transducer {
    Transducer::from_pairs(sigma.clone(), &p.iter().map(|(u, v)| (u.to_vec(), v.to_vec())).collect::<Vec<_>>())
}

/// `s ↦ s + 1` on canonical offsets (non-canonical outputs are removed later).
fn offset_successor(sigma: &Arc<Alphabet>) -> Result<Transducer> {
    let digits = Transducer::identity_on(&dfa(sigma, 1, &[0], &[(0, ZERO, 0), (0, ONE, 0)]))?;
    let one_zero = pairs(sigma, &[(&[ONE], &[ZERO])]);
    let zero_one = pairs(sigma, &[(&[ZERO], &[ONE])]);
    let plus = pairs(sigma, &[(&[PLUS], &[PLUS])]);
    let minus = pairs(sigma, &[(&[MINUS], &[MINUS])]);
    Transducer::union(&[
        pairs(sigma, &[(&[PLUS, ZERO], &[PLUS, ONE]), (&[MINUS, ONE], &[PLUS, ZERO])]),
        // +p01^k -> +p10^k
        plus.concat(&digits)?.concat(&zero_one)?.concat(&one_zero.star())?,
        // +1^k -> +10^k
        plus.concat(&pairs(sigma, &[(&[], &[ONE])]))?.concat(&one_zero.plus()?)?,
        // -p10^k -> -p01^k
        minus.concat(&digits)?.concat(&one_zero)?.concat(&zero_one.star())?,
        // -10^k -> -1^k
        minus.concat(&pairs(sigma, &[(&[ONE], &[])]))?.concat(&zero_one.plus()?)?,
    ])
}

/// Right multiplication by `t`: the cursor moves right, extending the window
/// at the right end or trimming a dark first cell (then `s` increases).
fn move_right(sigma: &Arc<Alphabet>, lang: &Dfa) -> Result<Dfa> {
    let cells = Transducer::identity_on(&dfa(sigma, 1, &[0], &[(0, ZERO, 0), (0, ONE, 0)]))?;
    let hash = pairs(sigma, &[(&[HASH], &[HASH])]);
    let same_offset = Transducer::identity_on(&offsets(sigma))?;
    // the window keeps its left end
    let step = pairs(
        sigma,
        &[(&[C0, ZERO], &[ZERO, C0]), (&[C0, ONE], &[ZERO, C1]), (&[C1, ZERO], &[ONE, C0]), (&[C1, ONE], &[ONE, C1])],
    );
    let grow = pairs(sigma, &[(&[C0], &[ZERO, C0]), (&[C1], &[ONE, C0])]);
    let inner = Transducer::union(&[cells.concat(&step)?.concat(&cells)?, cells.concat(&grow)?])?;
    // the dark cursor cell was the left end
    let trim = Transducer::union(&[
        pairs(sigma, &[(&[C0, ZERO], &[C0]), (&[C0, ONE], &[C1])]).concat(&cells)?,
        pairs(sigma, &[(&[C0], &[C0])]),
    ])?;
    let t = Transducer::union(&[
        same_offset.concat(&hash)?.concat(&inner)?,
        offset_successor(sigma)?.concat(&hash)?.concat(&trim)?,
    ])?;
    let (both, _) = join(lang, &[0], lang, &[1])?;
    crate::automata::combine(&t.to_sync(2), &both, CombineMode::Intersect)
}

pub fn rep_lamplighter_sigma() -> Result<CayleyRep> {
    let sigma = Alphabet::new(LAMPLIGHTER_SYMBOLS)?;
    let language = language(&sigma)?;
    let swap = |s: Sym| match s {
        C0 => C1,
        C1 => C0,
        s => s,
    };
    let toggle = crate::automata::substitute(&language.diagonal()?, sigma.clone(), 2, |l| {
        Ok(vec![Letter::from_slice(&[l.0[0], l.0[1].map(swap)])])
    })?;
    let right = move_right(&sigma, &language)?;
    Ok(CayleyRep {
        name: "lamplighter".into(),
        spec: RepSpec::Lamplighter {},
        group: Arc::new(Group::lamplighter()),
        language,
        multipliers: vec![toggle, right],
        codec: Arc::new(LamplighterCodec),
        sigma_to_s: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::Element;
    use num_bigint::BigInt;
    use std::collections::BTreeSet;

    fn lamp(lit: &[i64], z: i64) -> Element {
        Element::Lamp { lamps: lit.iter().map(|&i| BigInt::from(i)).collect::<BTreeSet<_>>(), cursor: BigInt::from(z) }
    }

    #[test]
    fn literal_examples() {
        let r = rep_lamplighter_sigma().unwrap();
        for (g, w) in [(lamp(&[1, 2], 3), "+1#11C0"), (lamp(&[-4, -3, -2], -3), "-100#1C11"), (lamp(&[], 0), "+0#C0")] {
            assert_eq!(r.encode_str(&g).unwrap(), w);
            assert_eq!(r.decode_str(w).unwrap(), g);
            assert!(r.language().accepts_syms(&r.alphabet().parse(w).unwrap()));
        }
        for bad in ["+1#0C0", "+01#C0", "-0#C0", "+1#11", "+1C0", "+1#C0C1", "+1#0"] {
            assert!(r.decode_str(bad).is_err(), "{bad}");
            assert!(!r.language().accepts_syms(&r.alphabet().parse(bad).unwrap()), "{bad}");
        }
    }

    #[test]
    fn moving_right_trims_and_extends() {
        let r = rep_lamplighter_sigma().unwrap();
        let p = |w: &str| r.alphabet().parse(w).unwrap();
        let t = r.multiplier(1);
        assert!(t.accepts_tuple(&[&p("+0#C0"), &p("+1#C0")]));
        assert!(t.accepts_tuple(&[&p("-1#C0"), &p("+0#C0")]));
        assert!(t.accepts_tuple(&[&p("+11#C01"), &p("+100#C1")]));
        assert!(t.accepts_tuple(&[&p("-100#1C11"), &p("-100#11C1")]));
        assert!(t.accepts_tuple(&[&p("+1#11C0"), &p("+1#110C0")]));
        assert!(!t.accepts_tuple(&[&p("+0#C0"), &p("+0#0C0")]));
        assert!(r.multiplier(0).accepts_tuple(&[&p("+1#11C0"), &p("+1#11C1")]));
    }
}
