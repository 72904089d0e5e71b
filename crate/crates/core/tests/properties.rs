//! Property tests for the structural invariants: convolution and codec
//! round-trips, multiplier exactness on random elements, metric symmetry and
//! subadditivity, the coarse order, and first-order compilation.

use std::collections::HashMap;
use std::sync::OnceLock;

use cayley_core::automata::{convolve, deconvolve, Dfa, Letter};
use cayley_core::encodings::{binary_domain, decode_binary, encode_binary, encode_binary_syms, linear_system_automaton, LinearEquation};
use cayley_core::foquery::{eval_formula, Formula};
use cayley_core::groups::GenLetter;
use cayley_core::measurement::{coarse_compare, CoarseOrder, FunctionClass};
use cayley_core::metrics::estimate;
use cayley_core::representations::{CayleyRep, RepSpec, BUILTIN_NAMES};
use num_bigint::BigInt;
use num_rational::Ratio;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn reps() -> &'static [CayleyRep] {
    static REPS: OnceLock<Vec<CayleyRep>> = OnceLock::new();
    REPS.get_or_init(|| BUILTIN_NAMES.iter().map(|n| RepSpec::from_name(n).and_then(|s| s.build()).expect("built-in")).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn convolution_round_trips(words in prop::collection::vec(prop::collection::vec(0u16..4, 0..6), 1..4)) {
        let refs: Vec<&[u16]> = words.iter().map(Vec::as_slice).collect();
        let cw = convolve(&refs).unwrap();
        prop_assert_eq!(cw.len(), words.iter().map(Vec::len).max().unwrap());
        prop_assert!(cw.iter().all(|l: &Letter| !l.is_all_pad()));
        prop_assert_eq!(deconvolve(&cw, words.len()).unwrap(), words);
    }

    #[test]
    fn binary_codec_round_trips(z in any::<i64>()) {
        let z = BigInt::from(z);
        let w = encode_binary(&z);
        prop_assert!(w.starts_with('+') || w.starts_with('-'));
        prop_assert_eq!(decode_binary(&w).unwrap(), z.clone());
        prop_assert!(binary_domain(1).unwrap().accepts_syms(&encode_binary_syms(&z)));
    }

    #[test]
    fn representations_round_trip_and_multiply(which in 0..BUILTIN_NAMES.len(), seed in any::<u64>(), len in 0usize..14) {
        let rep = &reps()[which];
        let g = rep.group();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = g.random_element(&mut rng, len);
        let w = rep.encode(&x).unwrap();
        prop_assert!(rep.language().accepts_syms(&w), "{} rejects its encoding of {}", rep.name(), x);
        prop_assert_eq!(rep.decode(&w).unwrap(), x.clone());
        for (i, m) in rep.multipliers().iter().enumerate() {
            let y = g.multiply_letter(&x, GenLetter::new(i, false));
            let v = rep.encode(&y).unwrap();
            prop_assert!(m.accepts_tuple(&[&w, &v]), "{} multiplier {} misses {} -> {}", rep.name(), i, x, y);
        }
    }

    #[test]
    fn distance_bounds_are_symmetric_and_subadditive(which in 0..BUILTIN_NAMES.len(), seed in any::<u64>(), len in 0usize..10) {
        let g = reps()[which].group();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, y) = (g.random_element(&mut rng, len), g.random_element(&mut rng, len));
        let (dx, dinv) = (estimate(g, &x), estimate(g, &g.inverse(&x)));
        if dx.is_exact() && dinv.is_exact() {
            prop_assert_eq!(dx.lower, dinv.lower);
        }
        let dxy = estimate(g, &g.multiply(&x, &y));
        if let (Some(ux), Some(uy)) = (dx.upper, estimate(g, &y).upper) {
            prop_assert!(dxy.lower <= ux + uy, "d({}) >= {} but d(x)+d(y) <= {}", g.multiply(&x, &y), dxy.lower, ux + uy);
        }
        // a word of length len reaches x, so no certified lower bound exceeds it
        prop_assert!(dx.lower <= len as u64);
    }

    #[test]
    fn coarse_order_is_a_total_preorder(f in class(), g in class(), h in class()) {
        let flip = |o| match o {
            CoarseOrder::StrictlyLess => CoarseOrder::StrictlyGreater,
            CoarseOrder::StrictlyGreater => CoarseOrder::StrictlyLess,
            CoarseOrder::Equal => CoarseOrder::Equal,
        };
        prop_assert_eq!(coarse_compare(f, g), flip(coarse_compare(g, f)));
        let le = |a, b| coarse_compare(a, b) != CoarseOrder::StrictlyGreater;
        if le(f, g) && le(g, h) {
            prop_assert!(le(f, h));
        }
        prop_assert_eq!(f.to_string().parse::<FunctionClass>().unwrap(), f.normalized());
    }

    #[test]
    fn formulas_print_and_parse_back(phi in formula()) {
        prop_assert_eq!(Formula::parse(&phi.to_string()).unwrap(), phi);
    }

    #[test]
    fn quantifier_free_formulas_match_arithmetic(phi in quantifier_free(), values in prop::collection::vec(-20i64..20, 3)) {
        let rel = compile(&phi);
        let env: HashMap<&str, i64> = ["x", "y", "z"].into_iter().zip(values.iter().copied()).collect();
        let words: Vec<Vec<u16>> = rel.vars.iter().map(|v| encode_binary_syms(&BigInt::from(env[v.as_str()]))).collect();
        let refs: Vec<&[u16]> = words.iter().map(Vec::as_slice).collect();
        prop_assert_eq!(rel.holds(&refs), truth(&phi, &env), "{}", phi);
    }

    #[test]
    fn boolean_laws_hold_as_language_equalities(phi in formula()) {
        let base = compile(&phi);
        let order: Vec<&str> = base.vars.iter().map(String::as_str).collect();
        let same = |text: String| {
            let other = compile(&Formula::parse(&text).unwrap()).reorder(&order).unwrap();
            base.automaton.equivalent(&other.automaton).unwrap()
        };
        prop_assert!(same(format!("({phi}) & ({phi})")), "idempotence");
        prop_assert!(same(format!("!!({phi})")), "double negation");
        prop_assert!(same(format!("({phi}) | (({phi}) & ({phi}))")), "absorption");
    }
}

fn class() -> impl Strategy<Value = FunctionClass> {
    prop_oneof![
        Just(FunctionClass::Zero),
        Just(FunctionClass::Const),
        (1u32..4).prop_map(FunctionClass::LogPow),
        ((1u32..7), (1u32..4), (0u32..3)).prop_map(|(a, b, k)| FunctionClass::PolyLog(Ratio::new(a, b), k)),
        Just(FunctionClass::Exp),
    ]
}

/// Relations over signed binary integers: `S` successor, `A` addition, `Z` zero.
fn env() -> &'static (HashMap<String, Dfa>, Dfa) {
    static ENV: OnceLock<(HashMap<String, Dfa>, Dfa)> = OnceLock::new();
    ENV.get_or_init(|| {
        let eq = |coeffs: Vec<i64>, constant: i64| linear_system_automaton(coeffs.len(), &[LinearEquation { coeffs, constant }]).unwrap();
        let mut m = HashMap::new();
        m.insert("S".to_string(), eq(vec![1, -1], 1));
        m.insert("A".to_string(), eq(vec![1, 1, -1], 0));
        m.insert("Z".to_string(), eq(vec![1], 0));
        let domain = binary_domain(1).unwrap();
        let alpha = domain.alphabet().clone();
        let m = m.into_iter().map(|(k, d)| (k, d.with_alphabet(alpha.clone()).unwrap())).collect();
        (m, domain)
    })
}

fn compile(phi: &Formula) -> cayley_core::foquery::RelAutomaton {
    let (env, domain) = env();
    eval_formula(phi, env, domain).unwrap()
}

fn var() -> impl Strategy<Value = String> {
    prop_oneof![Just("x"), Just("y"), Just("z")].prop_map(String::from)
}

fn atom() -> impl Strategy<Value = Formula> {
    prop_oneof![
        (var(), var()).prop_map(|(a, b)| Formula::Atom("S".into(), vec![a, b])),
        (var(), var(), var()).prop_map(|(a, b, c)| Formula::Atom("A".into(), vec![a, b, c])),
        var().prop_map(|a| Formula::Atom("Z".into(), vec![a])),
    ]
}

fn connect(inner: impl Strategy<Value = Formula> + Clone) -> impl Strategy<Value = Formula> {
    prop_oneof![
        (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::And(Box::new(a), Box::new(b))),
        (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::Or(Box::new(a), Box::new(b))),
        inner.prop_map(|a| Formula::Not(Box::new(a))),
    ]
}

fn quantifier_free() -> impl Strategy<Value = Formula> {
    atom().prop_recursive(2, 6, 2, connect)
}

/// Formulas with at least one free variable (sentences are not compiled).
fn formula() -> impl Strategy<Value = Formula> {
    atom()
        .prop_recursive(2, 6, 2, |inner| {
            prop_oneof![connect(inner.clone()), (var(), inner).prop_map(|(v, a)| Formula::Exists(vec![v], Box::new(a)))]
        })
        .prop_filter("needs a free variable", |f| !f.free_vars().is_empty())
}

fn truth(phi: &Formula, env: &HashMap<&str, i64>) -> bool {
    match phi {
        Formula::Atom(name, args) => {
            let v: Vec<i64> = args.iter().map(|a| env[a.as_str()]).collect();
            match name.as_str() {
                "S" => v[1] == v[0] + 1,
                "A" => v[0] + v[1] == v[2],
                _ => v[0] == 0,
            }
        }
        Formula::And(a, b) => truth(a, env) && truth(b, env),
        Formula::Or(a, b) => truth(a, env) || truth(b, env),
        Formula::Not(a) => !truth(a, env),
        Formula::Exists(..) => unreachable!("quantifier-free"),
    }
}
