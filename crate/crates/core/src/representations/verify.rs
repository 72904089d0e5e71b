//! Exhaustive small-length check of the representation axioms against the
//! group-arithmetic oracle.

use std::collections::HashMap;

use serde::Serialize;

use crate::automata::{count_by_length, enumerate_upto, enumerate_words, Dfa, Sym};
use crate::groups::{Element, GenLetter};
use crate::metrics::ball;
use crate::par::Exec;
use crate::{Error, Result};

use super::CayleyRep;

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    /// Length bound for enumerated words.
    pub k: usize,
    /// Refuse to enumerate more words than this.
    pub cap_words: u128,
    /// Every element of this ball must encode into the language and back.
    pub ball_radius: usize,
    pub cap_ball: usize,
    pub exec: Exec,
}

impl VerifyOptions {
    pub fn new(k: usize) -> VerifyOptions {
        VerifyOptions { k, cap_words: 2_000_000, ball_radius: 3, cap_ball: 1_000_000, exec: Exec::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub rep: String,
    pub k: usize,
    pub words: usize,
    pub codec_consistent: bool,
    pub injective: bool,
    pub multipliers_exact: bool,
    pub ball_covered: bool,
    /// Largest `||ψ⁻¹(ga)| − |ψ⁻¹(g)||` over enumerated `g` and generators `a`.
    pub bounded_difference: usize,
    pub passed: bool,
    pub counterexample: Option<String>,
}

fn guard(dfa: &Dfa, k: usize, cap: u128, what: &str) -> Result<u128> {
    let total: u128 = count_by_length(dfa, k).iter().fold(0u128, |a, &b| a.saturating_add(b));
    if total > cap {
        return Err(Error::CapExceeded { what: what.into(), needed: total, cap });
    }
    Ok(total)
}

/// Checks, for words of length at most `k`: every word decodes and
/// re-encodes to itself, decoding is injective, each multiplier accepts
/// exactly the group-true pairs, and every element of a small ball is encoded
/// by a word of the language.
pub fn verify_rep(rep: &CayleyRep, opts: &VerifyOptions) -> Result<VerifyReport> {
    let k = opts.k;
    guard(&rep.language, k, opts.cap_words, "language words")?;
    let words = enumerate_words(&rep.language, k);
    let render = |w: &[Sym]| format!("`{}`", rep.alphabet().render(w));
    let mut failures: Vec<String> = Vec::new();

    let decoded: Vec<Result<Element>> = opts.exec.map(&words, |w| {
        let g = rep.decode(w)?;
        let back = rep.encode(&g)?;
        if back != *w {
            return Err(Error::Decode(format!("re-encodes to {}", render(&back))));
        }
        Ok(g)
    });
    let mut codec_consistent = true;
    let mut elements: Vec<Option<Element>> = Vec::with_capacity(words.len());
    for (w, d) in words.iter().zip(decoded) {
        match d {
            Ok(g) => elements.push(Some(g)),
            Err(e) => {
                codec_consistent = false;
                failures.push(format!("word {} fails the codec: {e}", render(w)));
                elements.push(None);
            }
        }
    }

    let mut injective = true;
    let mut seen: HashMap<&Element, usize> = HashMap::new();
    for (i, g) in elements.iter().enumerate() {
        if let Some(g) = g {
            if let Some(j) = seen.insert(g, i) {
                injective = false;
                failures.push(format!("words {} and {} both decode to {g}", render(&words[j]), render(&words[i])));
            }
        }
    }

    let mut multipliers_exact = true;
    let mut bounded_difference = 0usize;
    let items: Vec<(usize, &Vec<Sym>, &Option<Element>)> = words.iter().zip(&elements).enumerate().map(|(i, (w, g))| (i, w, g)).collect();
    for (a, m) in rep.multipliers.iter().enumerate() {
        let gen = rep.group.letter_element(GenLetter::new(a, false));
        let name = rep.group.generator_name(a);
        // completeness: each true pair within the length bound is accepted
        let rows: Vec<Result<(usize, Option<String>)>> = opts.exec.map(&items, |&(_, w, g)| {
            let Some(g) = g else { return Ok((0, None)) };
            let w2 = rep.encode(&rep.group.multiply(g, &gen))?;
            let diff = w.len().abs_diff(w2.len());
            if !rep.language.accepts_syms(&w2) {
                return Ok((diff, Some(format!("encoding {} of {g}·{name} is outside the language", render(&w2)))));
            }
            if w2.len() <= k && !m.accepts_tuple(&[w, &w2]) {
                return Ok((diff, Some(format!("multiplier {name} rejects ({}, {})", render(w), render(&w2)))));
            }
            Ok((diff, None))
        });
        for r in rows {
            let (diff, fail) = r?;
            bounded_difference = bounded_difference.max(diff);
            if let Some(f) = fail {
                multipliers_exact = false;
                failures.push(f);
            }
        }
        // soundness: each accepted pair within the bound is group-true
        guard(m, k, opts.cap_words, "multiplier pairs")?;
        let pairs: Vec<Vec<Vec<Sym>>> = enumerate_upto(m, k)
            .map(|cw| crate::automata::deconvolve(&cw, 2))
            .collect::<Result<_>>()?;
        let index: HashMap<&Vec<Sym>, usize> = words.iter().enumerate().map(|(i, w)| (w, i)).collect();
        let checks: Vec<Option<String>> = opts.exec.map(&pairs, |p| {
            let (u, v) = (&p[0], &p[1]);
            if !rep.language.accepts_syms(u) || !rep.language.accepts_syms(v) {
                return Some(format!("multiplier {name} accepts ({}, {}) outside the language", render(u), render(v)));
            }
            let g = match index.get(u).and_then(|&i| elements[i].clone()) {
                Some(g) => g,
                None => return Some(format!("multiplier {name} accepts an undecodable word {}", render(u))),
            };
            match rep.decode(v) {
                Ok(h) if h == rep.group.multiply(&g, &gen) => None,
                Ok(h) => Some(format!("multiplier {name} accepts ({}, {}) but {g}·{name} ≠ {h}", render(u), render(v))),
                Err(e) => Some(format!("multiplier {name} accepts an undecodable word {}: {e}", render(v))),
            }
        });
        for f in checks.into_iter().flatten() {
            multipliers_exact = false;
            failures.push(f);
        }
    }

    let mut ball_covered = true;
    let b = ball(&rep.group, opts.ball_radius, opts.cap_ball, opts.exec)?;
    let cover: Vec<Option<String>> = opts.exec.map(b.elements(), |(g, _)| match rep.encode(g) {
        Ok(w) if rep.language.accepts_syms(&w) && rep.decode(&w).ok().as_ref() == Some(g) => None,
        Ok(w) => Some(format!("{g} encodes to {} which does not decode back inside the language", render(&w))),
        Err(e) => Some(format!("{g} cannot be encoded: {e}")),
    });
    for f in cover.into_iter().flatten() {
        ball_covered = false;
        failures.push(f);
    }

    let passed = codec_consistent && injective && multipliers_exact && ball_covered;
    Ok(VerifyReport {
        rep: rep.name.clone(),
        k,
        words: words.len(),
        codec_consistent,
        injective,
        multipliers_exact,
        ball_covered,
        bounded_difference,
        passed,
        counterexample: failures.into_iter().next(),
    })
}

/// `max ||ψ⁻¹(ga)| − |ψ⁻¹(g)||` over `g` encoded by words of length `<= k`.
pub fn bounded_difference_const(rep: &CayleyRep, k: usize, cap_words: u128, exec: Exec) -> Result<usize> {
    guard(&rep.language, k, cap_words, "language words")?;
    let words = enumerate_words(&rep.language, k);
    let gens: Vec<Element> = (0..rep.group.generator_count()).map(|a| rep.group.letter_element(GenLetter::new(a, false))).collect();
    let diffs: Vec<Result<usize>> = exec.map(&words, |w| {
        let g = rep.decode(w)?;
        gens.iter().try_fold(0usize, |acc, a| Ok(acc.max(rep.encode(&rep.group.multiply(&g, a))?.len().abs_diff(w.len()))))
    });
    diffs.into_iter().try_fold(0, |acc, d| Ok(acc.max(d?)))
}
