//! Representations assembled from other representations: direct and free
//! products, finite extensions and block re-encoding over the generators.

use std::sync::Arc;

use crate::automata::{
    combine, concat, finite_language, join, permute_tracks, Alphabet, CombineMode, Dfa, Letter, Nfa, Sym,
};
use crate::encodings::BlockMap;
use crate::groups::{disjoint_names, CosetSpec, CosetSystem, Element, GenLetter, Group};
use crate::{Error, Result};

use super::codec::{DirectCodec, ExtensionCodec, FreeCodec, ReencodedCodec, RepointedCodec};
use super::{compose, embed, pairs_automaton, relation_concat, CayleyRep, RepSpec};

/// `Σ₁ ∪ Σ₂′` with colliding second-factor names primed, plus the two renamings.
fn joint_alphabet(a: &Alphabet, b: &Alphabet) -> Result<(Arc<Alphabet>, Vec<Sym>, Vec<Sym>)> {
    let first = a.symbols().to_vec();
    let mut names = first.clone();
    names.extend(disjoint_names(&first, b.symbols()));
    let alphabet = Alphabet::new(names)?;
    let n = a.len() as Sym;
    Ok((alphabet, (0..n).collect(), (0..b.len() as Sym).map(|s| s + n).collect()))
}

fn shifted_letters(letters: Option<&[GenLetter]>, by: usize) -> Option<Vec<GenLetter>> {
    letters.map(|v| v.iter().map(|l| GenLetter::new(l.generator + by, l.inverse)).collect())
}

fn joint_sigma_to_s(a: &CayleyRep, b: &CayleyRep) -> Option<Vec<GenLetter>> {
    let mut v = a.sigma_to_s.clone()?;
    v.extend(shifted_letters(b.sigma_to_s(), a.group.generator_count())?);
    Some(v)
}

/// `G₁ × G₂` with `L = L₁L₂` and `ψ(uv) = (ψ₁(u), ψ₂(v))`.
pub fn rep_direct_product(a: &CayleyRep, b: &CayleyRep) -> Result<CayleyRep> {
    let (sigma, ma, mb) = joint_alphabet(a.alphabet(), b.alphabet())?;
    let la = embed(&a.language, &sigma, &ma)?;
    let lb = embed(&b.language, &sigma, &mb)?;
    let mut multipliers = Vec::new();
    // a first-factor step rewrites u and shifts v when |u| changes
    let lb_id = lb.diagonal()?;
    for m in &a.multipliers {
        multipliers.push(relation_concat(&embed(m, &sigma, &ma)?, &lb_id)?);
    }
    let la_id = la.diagonal()?;
    for m in &b.multipliers {
        multipliers.push(concat(&la_id, &embed(m, &sigma, &mb)?)?);
    }
    Ok(CayleyRep {
        name: format!("{}-times-{}", a.name, b.name),
        spec: RepSpec::Direct { factors: vec![a.spec.clone(), b.spec.clone()] },
        group: Arc::new(Group::direct_product(a.group.clone(), b.group.clone())),
        language: concat(&la, &lb)?,
        multipliers,
        codec: Arc::new(DirectCodec { left: a.codec.clone(), right: b.codec.clone(), split: a.alphabet().len() as Sym }),
        sigma_to_s: joint_sigma_to_s(a, b),
    })
}

/// Makes `ε` the code word of the identity. The old identity word leaves the
/// language; multiplier pairs touching it are rewritten explicitly.
pub fn repoint_identity(r: &CayleyRep) -> Result<CayleyRep> {
    let e = r.group.identity();
    if r.language.accepts_empty() {
        return if r.decode(&[])? == e {
            Ok(r.clone())
        } else {
            Err(Error::Unsupported("the empty word is in the language but does not encode the identity".into()))
        };
    }
    let sigma = r.alphabet().clone();
    let w0 = r.encode(&e)?;
    let others = combine(&r.language, &finite_language(sigma.clone(), std::slice::from_ref(&w0)), CombineMode::Difference)?;
    let language = combine(&others, &finite_language(sigma.clone(), &[vec![]]), CombineMode::Union)?;
    let (cross, _) = join(&others, &[0], &others, &[1])?;
    let mut multipliers = Vec::new();
    for (i, m) in r.multipliers.iter().enumerate() {
        let a = r.group.letter_element(GenLetter::new(i, false));
        let a_inv = r.group.inverse(&a);
        let kept = combine(m, &cross, CombineMode::Intersect)?;
        let ends = pairs_automaton(&sigma, &[(vec![], r.encode(&a)?), (r.encode(&a_inv)?, vec![])])?;
        multipliers.push(combine(&kept, &ends, CombineMode::Union)?);
    }
    Ok(CayleyRep {
        name: format!("{}-pointed", r.name),
        spec: r.spec.clone(),
        group: r.group.clone(),
        language,
        multipliers,
        codec: Arc::new(RepointedCodec { inner: r.codec.clone(), identity_word: w0, identity: e }),
        sigma_to_s: r.sigma_to_s.clone(),
    })
}

/// Words that are empty or end with a symbol of `side`.
fn ends_in(sigma: &Arc<Alphabet>, side: &[Sym]) -> Result<Dfa> {
    let target = |s: Sym| if side.contains(&s) { 1 } else { 2 };
    let transitions = (0..3).flat_map(|q| (0..sigma.len() as Sym).map(move |s| (q, Letter::single(s), target(s))));
    Ok(Dfa::from_parts(sigma.clone(), 1, 3, 0, &[0, 1], transitions)?.minimize())
}

/// `G₁ ∗ G₂` with words of alternating nonempty syllables from `L₁′ = L₁∖{ε}`
/// and `L₂′`. A generator of `G₁` acts on the final `Σ₁`-syllable only
/// (which is empty when the word ends in `Σ₂`), so its multiplier is the
/// identity on the rest followed by the factor multiplier; cancellation and
/// merging are the factor multiplier's pairs `(u, ε)` and `(ε, ψ₁⁻¹(a))`.
pub fn rep_free_product(a: &CayleyRep, b: &CayleyRep) -> Result<CayleyRep> {
    let (a, b) = (repoint_identity(a)?, repoint_identity(b)?);
    let (sigma, ma, mb) = joint_alphabet(a.alphabet(), b.alphabet())?;
    let nonempty = |l: &Dfa, map: &[Sym]| -> Result<Dfa> {
        let l = embed(l, &sigma, map)?;
        combine(&l, &finite_language(sigma.clone(), &[vec![]]), CombineMode::Difference)
    };
    let syllables = [nonempty(&a.language, &ma)?, nonempty(&b.language, &mb)?];
    // alternation: a fresh accepting start, and from any syllable-final state
    // the other factor's syllable may begin
    let mut nfa = Nfa::new(sigma.clone(), 1);
    let start = nfa.add_state(true);
    nfa.add_initial(start);
    let mut offsets = [0usize; 2];
    for (k, d) in syllables.iter().enumerate() {
        offsets[k] = nfa.state_count();
        for q in 0..d.state_count() {
            nfa.add_state(d.is_accepting(q));
        }
    }
    for (k, d) in syllables.iter().enumerate() {
        let other = &syllables[1 - k];
        for q in 0..d.state_count() {
            for (l, t) in d.transitions(q) {
                nfa.add_transition(q + offsets[k], l.clone(), t + offsets[k]);
            }
            if d.is_accepting(q) {
                for (l, t) in other.transitions(other.initial()) {
                    nfa.add_transition(q + offsets[k], l.clone(), t + offsets[1 - k]);
                }
            }
        }
        for (l, t) in d.transitions(d.initial()) {
            nfa.add_transition(start, l.clone(), t + offsets[k]);
        }
    }
    let language = nfa.determinize_minimize();
    let mut multipliers = Vec::new();
    for (rep, map, other) in [(&a, &ma, &mb), (&b, &mb, &ma)] {
        let prefix = combine(&language, &ends_in(&sigma, other)?, CombineMode::Intersect)?.diagonal()?;
        for m in &rep.multipliers {
            multipliers.push(concat(&prefix, &embed(m, &sigma, map)?)?);
        }
    }
    let identities = [a.group.identity(), b.group.identity()];
    Ok(CayleyRep {
        name: format!("{}-free-{}", a.name.trim_end_matches("-pointed"), b.name.trim_end_matches("-pointed")),
        spec: RepSpec::Free { factors: vec![a.spec.clone(), b.spec.clone()] },
        group: Arc::new(Group::free_product(a.group.clone(), b.group.clone())),
        language,
        multipliers,
        codec: Arc::new(FreeCodec { left: a.codec.clone(), right: b.codec.clone(), split: ma.len() as Sym, identities }),
        sigma_to_s: joint_sigma_to_s(&a, &b),
    })
}

/// The relation `{(u, u′) | ψ(u)·h = ψ(u′)}` composed from generator multipliers.
fn right_multiplication(r: &CayleyRep, h: &Element) -> Result<Dfa> {
    let mut rel = r.language.diagonal()?;
    for l in r.group.word_for(h) {
        let m = &r.multipliers[l.generator];
        let step = if l.inverse { permute_tracks(m, &[1, 0])? } else { m.clone() };
        rel = compose(&rel, &step)?;
    }
    Ok(rel)
}

/// A finite extension `G ⊇ H`: `L = L_H · {ε, k₁, …, k_m}` and
/// `ψ(u k_j) = ψ_H(u)·k_j`. Since `k_i g = h k_j`, the multiplier for `g`
/// is the union over cosets of `R_h` followed by the pair `(k_i, k_j)`.
pub fn rep_finite_extension(rh: &CayleyRep, system: CosetSystem) -> Result<CayleyRep> {
    let base = system.base.clone();
    let same = rh.group.family().tag() == base.family().tag()
        && rh.group.generator_count() == base.generator_count()
        && (0..base.generator_count()).all(|i| rh.group.generator(i) == base.generator(i));
    if !same {
        return Err(Error::InconsistentCosets("the subgroup representation is for a different group".into()));
    }
    let rh = CayleyRep { group: base.clone(), ..rh.clone() };
    let m = system.representatives.len();
    let hk = base.generator_count();
    // a representative that is one generator names its coset symbol
    let single = |j: usize| match system.representatives[j].as_slice() {
        [l] if !l.inverse && l.generator >= hk => Some(*l),
        _ => None,
    };
    let wanted: Vec<String> =
        (1..m).map(|j| single(j).map_or(format!("k{j}"), |l| system.names[l.generator].clone())).collect();
    let names_h = rh.alphabet().symbols().to_vec();
    let mut names = names_h.clone();
    names.extend(disjoint_names(&names_h, &wanted));
    let sigma = Alphabet::new(names)?;
    let map: Vec<Sym> = (0..names_h.len() as Sym).collect();
    let first = names_h.len() as Sym;
    let coset_word = |j: usize| if j == 0 { vec![] } else { vec![first + j as Sym - 1] };
    let lh = embed(&rh.language, &sigma, &map)?;
    let tails = finite_language(sigma.clone(), &(0..m).map(coset_word).collect::<Vec<_>>());
    let language = concat(&lh, &tails)?;
    let mut multipliers = Vec::new();
    for g in 0..system.names.len() {
        let mut parts = Vec::new();
        for i in 0..m {
            let (h, j) = &system.table[i][g];
            let rel = embed(&right_multiplication(&rh, h)?, &sigma, &map)?;
            let step = pairs_automaton(&sigma, &[(coset_word(i), coset_word(*j))])?;
            parts.push(relation_concat(&rel, &step)?);
        }
        multipliers.push(crate::automata::union_all(&parts)?);
    }
    let sigma_to_s = rh.sigma_to_s.clone().and_then(|mut v| {
        for j in 1..m {
            v.push(single(j)?);
        }
        Some(v)
    });
    let spec = RepSpec::Extension { base: Box::new(rh.spec.clone()), cosets: CosetSpec::from_system(&system) };
    let group = Arc::new(Group::finite_extension(system));
    Ok(CayleyRep {
        name: format!("{}-extended", rh.name),
        spec,
        group,
        language,
        multipliers,
        codec: Arc::new(ExtensionCodec { base: rh.codec.clone(), first, cosets: m }),
        sigma_to_s,
    })
}

/// `D∞ = ℤ ⋊ ℤ₂` as the extension of unary `ℤ` by the flip `r`.
pub fn rep_dihedral() -> Result<CayleyRep> {
    let mut r = rep_finite_extension(&super::rep_unary_z(), CosetSystem::infinite_dihedral())?;
    r.name = "dihedral".into();
    r.spec = RepSpec::Dihedral {};
    Ok(r)
}

/// Re-encodes over `S` by the default block map `Σ → S^ℓ`.
pub fn block_reencode(r: &CayleyRep) -> Result<CayleyRep> {
    let letters = r.group.letters();
    let target = Alphabet::new(letters.iter().map(|&l| r.group.letter_name(l)))?;
    let block = BlockMap::default_for(r.alphabet().len(), target.len())?;
    let language = block.transport(&r.language, target.clone())?;
    let multipliers = r.multipliers.iter().map(|m| block.transport(m, target.clone())).collect::<Result<_>>()?;
    Ok(CayleyRep {
        name: format!("{}-s", r.name),
        spec: RepSpec::Reencoded { base: Box::new(r.spec.clone()) },
        group: r.group.clone(),
        language,
        multipliers,
        codec: Arc::new(ReencodedCodec { inner: r.codec.clone(), block }),
        sigma_to_s: Some(letters),
    })
}
