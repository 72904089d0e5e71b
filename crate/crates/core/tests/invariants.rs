//! Cross-module invariants checked against independent oracles: plain
//! integer arithmetic, brute-force enumeration and BFS balls.

use std::collections::BTreeSet;

use cayley_core::automata::{combine, enumerate_words, Alphabet, CombineMode, Dfa, Letter, Nfa};
use cayley_core::encodings::{affine_map_automaton, encode_binary_syms, successor_automaton, BlockMap};
use cayley_core::groups::{Element, Group};
use cayley_core::measurement::{measure_h, measure_s, MeasureOptions};
use cayley_core::metrics::ball;
use cayley_core::par::Exec;
use cayley_core::representations::{bounded_difference_const, heisenberg_matrix, CayleyRep, RepSpec, BUILTIN_NAMES};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn build(name: &str) -> CayleyRep {
    RepSpec::from_name(name).and_then(|s| s.build()).expect("built-in")
}

fn int(v: i64) -> BigInt {
    BigInt::from(v)
}

#[test]
fn group_laws_and_path_homomorphism() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for name in BUILTIN_NAMES {
        let g = build(name).group().clone();
        let e = g.identity();
        for _ in 0..1000 {
            let (a, b, c) = (g.random_element(&mut rng, 6), g.random_element(&mut rng, 6), g.random_element(&mut rng, 6));
            assert_eq!(g.multiply(&g.multiply(&a, &b), &c), g.multiply(&a, &g.multiply(&b, &c)), "{name}");
            assert_eq!(g.multiply(&a, &e), a);
            assert_eq!(g.multiply(&e, &a), a);
            assert_eq!(g.multiply(&a, &g.inverse(&a)), e);
        }
        for _ in 0..200 {
            let w = g.random_word(&mut rng, 10);
            let cut = rng.gen_range(0..=w.len());
            assert_eq!(g.evaluate(&w), g.multiply(&g.evaluate(&w[..cut]), &g.evaluate(&w[cut..])), "{name}");
        }
    }
}

#[test]
fn heisenberg_is_the_semidirect_product() {
    let h = Group::heisenberg();
    let sd = Group::semidirect(heisenberg_matrix()).unwrap();
    // (x, y, z) -> (y, (x, z))
    let iso = |g: &Element| match g {
        Element::Vector(v) => Element::Semidirect { y: v[1].clone(), z: vec![v[0].clone(), v[2].clone()] },
        _ => unreachable!(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10_000 {
        let (a, b) = (h.random_element(&mut rng, 12), h.random_element(&mut rng, 12));
        assert_eq!(iso(&h.multiply(&a, &b)), sd.multiply(&iso(&a), &iso(&b)));
    }
}

fn random_nfa(rng: &mut ChaCha8Rng, alphabet: &std::sync::Arc<Alphabet>) -> Nfa {
    let mut nfa = Nfa::new(alphabet.clone(), 1);
    let n = rng.gen_range(1..5);
    for _ in 0..n {
        nfa.add_state(rng.gen_bool(0.4));
    }
    nfa.add_initial(0);
    for _ in 0..rng.gen_range(n..3 * n + 2) {
        nfa.add_transition(rng.gen_range(0..n), Letter::single(rng.gen_range(0..2)), rng.gen_range(0..n));
    }
    nfa
}

#[test]
fn products_and_minimization_match_enumeration() {
    let alphabet = Alphabet::new(["a", "b"]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let (na, nb) = (random_nfa(&mut rng, &alphabet), random_nfa(&mut rng, &alphabet));
        let (a, b) = (na.determinize(), nb.determinize());
        let min = na.determinize_minimize();
        assert!(min.equivalent(&a).unwrap());
        assert!(min.state_count() <= a.state_count());
        let words = |d: &Dfa| enumerate_words(d, 8).into_iter().collect::<BTreeSet<_>>();
        let (wa, wb) = (words(&a), words(&b));
        let both = words(&combine(&a, &b, CombineMode::Intersect).unwrap());
        assert_eq!(both, wa.intersection(&wb).cloned().collect());
        let either = words(&combine(&a, &b, CombineMode::Union).unwrap());
        assert_eq!(either, wa.union(&wb).cloned().collect());
        for w in &wa {
            assert!(na.accepts(&w.iter().map(|&s| Letter::single(s)).collect::<Vec<_>>()));
        }
    }
}

#[test]
fn arithmetic_automata_agree_with_integers() {
    let succ = successor_automaton();
    for z in -1024..=1024i64 {
        let (w, v) = (encode_binary_syms(&int(z)), encode_binary_syms(&int(z + 1)));
        assert!(succ.accepts_tuple(&[&w, &v]), "{z}");
        assert!(!succ.accepts_tuple(&[&w, &encode_binary_syms(&int(z + 2))]));
    }
    // (x, z) -> (x, z + x) + (3, -1)
    let affine = affine_map_automaton(&[vec![1, 0], vec![1, 1]], &[3, -1]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for i in 0..10_000 {
        let bound = if i < 2000 { 1i64 << 10 } else { 1i64 << 40 };
        let (x, z) = (rng.gen_range(-bound..=bound), rng.gen_range(-bound..=bound));
        let enc = |v: i64| encode_binary_syms(&int(v));
        let (a, b, c, d) = (enc(x), enc(z), enc(x + 3), enc(z + x - 1));
        assert!(affine.accepts_tuple(&[&a, &b, &c, &d]), "({x},{z})");
        assert!(!affine.accepts_tuple(&[&a, &b, &c, &enc(z + x)]));
    }
}

#[test]
fn block_maps_scale_lengths() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for sigma in 2..12 {
        let map = BlockMap::default_for(sigma, 4).unwrap();
        for _ in 0..50 {
            let w: Vec<u16> = (0..rng.gen_range(0..10)).map(|_| rng.gen_range(0..sigma as u16)).collect();
            let image = map.apply(&w);
            assert_eq!(image.len(), map.block_len() * w.len());
            assert_eq!(map.invert(&image).unwrap(), w);
        }
    }
}

#[test]
fn bounded_difference_constant_is_stable() {
    for name in BUILTIN_NAMES {
        let rep = build(name);
        // lengths 5..=8 until the word cap is hit
        let c: Vec<usize> = (5..=8).map_while(|k| bounded_difference_const(&rep, k, 5_000_000, Exec::Parallel).ok()).collect();
        assert!(c.len() >= 3, "{name}: {c:?}");
        assert!(c.windows(2).all(|w| w[0] <= w[1]), "{name}: {c:?}");
        // the lamplighter's worst neighbour pair first fits at length 6
        assert!(c[c.len() - 3..].windows(2).all(|w| w[0] == w[1]), "{name}: {c:?}");
    }
}

#[test]
fn balls_are_symmetric_and_satisfy_the_triangle_inequality() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for name in BUILTIN_NAMES {
        let g = build(name).group().clone();
        let b = ball(&g, 6, 2_000_000, Exec::Parallel).unwrap();
        for (x, d) in b.elements() {
            assert_eq!(b.distance(&g.inverse(x)), Some(*d), "{name}: {x}");
        }
        let inner: Vec<&Element> = b.elements().iter().filter(|(_, d)| *d <= 3).map(|(x, _)| x).collect();
        for _ in 0..10_000 {
            let (x, y) = (inner[rng.gen_range(0..inner.len())], inner[rng.gen_range(0..inner.len())]);
            let dxy = b.distance(&g.multiply(x, y)).expect("within radius 6");
            assert!(dxy <= b.distance(x).unwrap() + b.distance(y).unwrap(), "{name}");
        }
    }
}

#[test]
fn deviation_rows_are_monotone_and_policy_independent() {
    for name in ["unary-z", "binary-z-s", "lamplighter-s", "dihedral", "z-free-z", "heisenberg-s"] {
        let rep = build(name);
        let seq = MeasureOptions { exec: Exec::Sequential, ..MeasureOptions::default() };
        let par = MeasureOptions { exec: Exec::Parallel, ..MeasureOptions::default() };
        let n = if name == "heisenberg-s" { 8 } else { 10 };
        let h = measure_h(&rep, n, &seq).unwrap();
        assert_eq!(h.to_csv(), measure_h(&rep, n, &par).unwrap().to_csv(), "{name}");
        let s = measure_s(&rep, n.min(8), &seq).unwrap();
        assert_eq!(s.to_csv(), measure_s(&rep, n.min(8), &par).unwrap().to_csv(), "{name}");
        let lower = h.h_lower();
        assert!(lower.windows(2).all(|w| w[0] <= w[1]), "{name}: {lower:?}");
        for row in &h.rows {
            let i = row.h.as_ref().unwrap();
            assert!(i.upper.is_none_or(|u| i.lower <= u));
        }
        let s_upper: Vec<u64> = s.rows.iter().map(|r| r.s.as_ref().unwrap().upper.unwrap()).collect();
        assert!(s_upper.windows(2).all(|w| w[0] <= w[1]), "{name}: {s_upper:?}");
    }
}

#[test]
fn zero_deviation_means_decoding_is_evaluation() {
    for name in ["unary-z", "z-times-z", "binary-z-s", "dihedral"] {
        let rep = build(name);
        let h = measure_h(&rep, 8, &MeasureOptions::default()).unwrap();
        let all_zero = h.rows.iter().all(|r| r.h.as_ref().unwrap().upper == Some(0));
        let agrees = enumerate_words(rep.language(), 8).iter().all(|w| rep.evaluate_path(w).unwrap() == rep.decode(w).unwrap());
        assert_eq!(all_zero, agrees, "{name}");
    }
}
