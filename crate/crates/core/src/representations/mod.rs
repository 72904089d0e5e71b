//! Cayley automatic representations: a regular language `L ⊆ Σ*`, a
//! bijection `ψ: L → G` and one synchronous multiplier automaton per
//! generator recognizing `{ψ⁻¹(g) ⊗ ψ⁻¹(ga)}`.
//!
//! Built-in families live in [`builtin`], product and extension constructions
//! in [`combinators`], and the exhaustive small-length checker in [`verify`].

pub mod builtin;
pub mod codec;
pub mod combinators;
pub mod lamplighter;
pub mod verify;

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::automata::{join, substitute, Alphabet, Dfa, Letter, Sym, Transducer};
use crate::groups::{CosetSpec, Element, GenLetter, Group};
use crate::{Error, Result};

pub use builtin::{heisenberg_matrix, rep_binary_z, rep_heisenberg, rep_semidirect, rep_unary_z, rep_unitriangular};
pub use codec::{Codec, SharedCodec};
pub use combinators::{
    block_reencode, rep_dihedral, rep_direct_product, rep_finite_extension, rep_free_product, repoint_identity,
};
pub use lamplighter::rep_lamplighter_sigma;
pub use verify::{bounded_difference_const, verify_rep, VerifyOptions, VerifyReport};

/// Serializable recipe for a representation, stored as `codec.json` in bundles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rep", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RepSpec {
    UnaryZ {},
    BinaryZ {
        n: usize,
    },
    Semidirect {
        #[serde(rename = "A")]
        a: Vec<Vec<i64>>,
    },
    Heisenberg {},
    Unitriangular {
        n: usize,
    },
    Lamplighter {},
    Direct {
        factors: Vec<RepSpec>,
    },
    Free {
        factors: Vec<RepSpec>,
    },
    Extension {
        base: Box<RepSpec>,
        cosets: CosetSpec,
    },
    Dihedral {},
    Reencoded {
        base: Box<RepSpec>,
    },
}

/// Names accepted by [`RepSpec::from_name`]; a `-s` suffix re-encodes over `S`.
pub const BUILTIN_NAMES: [&str; 10] =
    ["unary-z", "binary-z", "binary-z2", "heisenberg", "ut3", "lamplighter", "dihedral", "z-times-z", "z-free-z", "z2-semidirect"];

impl RepSpec {
    pub fn from_name(name: &str) -> Result<RepSpec> {
        if let Some(base) = name.strip_suffix("-s") {
            return Ok(RepSpec::Reencoded { base: Box::new(RepSpec::from_name(base)?) });
        }
        let unary = || RepSpec::UnaryZ {};
        Ok(match name {
            "unary-z" => unary(),
            "binary-z" => RepSpec::BinaryZ { n: 1 },
            "binary-z2" => RepSpec::BinaryZ { n: 2 },
            "heisenberg" => RepSpec::Heisenberg {},
            "ut3" => RepSpec::Unitriangular { n: 3 },
            "lamplighter" => RepSpec::Lamplighter {},
            "dihedral" => RepSpec::Dihedral {},
            "z-times-z" => RepSpec::Direct { factors: vec![unary(), unary()] },
            "z-free-z" => RepSpec::Free { factors: vec![unary(), unary()] },
            // the hyperbolic (Anosov) torus bundle
            "z2-semidirect" => RepSpec::Semidirect { a: vec![vec![2, 1], vec![1, 1]] },
            _ => {
                return Err(Error::arg(format!(
                    "unknown representation `{name}` (known: {}, optionally with a `-s` suffix)",
                    BUILTIN_NAMES.join(", ")
                )))
            }
        })
    }

    /// Builds the representation from scratch.
    pub fn build(&self) -> Result<CayleyRep> {
        let pair = |factors: &[RepSpec]| -> Result<(CayleyRep, CayleyRep)> {
            match factors {
                [a, b] => Ok((a.build()?, b.build()?)),
                _ => Err(Error::arg("products take exactly two factors")),
            }
        };
        match self {
            RepSpec::UnaryZ {} => Ok(rep_unary_z()),
            RepSpec::BinaryZ { n } => rep_binary_z(*n),
            RepSpec::Semidirect { a } => rep_semidirect(a.clone()),
            RepSpec::Heisenberg {} => rep_heisenberg(),
            RepSpec::Unitriangular { n } => rep_unitriangular(*n),
            RepSpec::Lamplighter {} => rep_lamplighter_sigma(),
            RepSpec::Direct { factors } => {
                let (a, b) = pair(factors)?;
                rep_direct_product(&a, &b)
            }
            RepSpec::Free { factors } => {
                let (a, b) = pair(factors)?;
                rep_free_product(&a, &b)
            }
            RepSpec::Extension { base, cosets } => rep_finite_extension(&base.build()?, cosets.build()?),
            RepSpec::Dihedral {} => rep_dihedral(),
            RepSpec::Reencoded { base } => block_reencode(&base.build()?),
        }
    }
}

/// A Cayley automatic representation. Immutable once built.
#[derive(Clone, Debug)]
pub struct CayleyRep {
    pub(crate) name: String,
    pub(crate) spec: RepSpec,
    pub(crate) group: Arc<Group>,
    pub(crate) language: Dfa,
    pub(crate) multipliers: Vec<Dfa>,
    pub(crate) codec: SharedCodec,
    /// Reading of each `Σ` symbol as a letter of `S`, when `Σ ⊆ S`.
    pub(crate) sigma_to_s: Option<Vec<GenLetter>>,
}

impl CayleyRep {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn spec(&self) -> &RepSpec {
        &self.spec
    }

    pub fn group(&self) -> &Arc<Group> {
        &self.group
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        self.language.alphabet()
    }

    pub fn language(&self) -> &Dfa {
        &self.language
    }

    pub fn multiplier(&self, generator: usize) -> &Dfa {
        &self.multipliers[generator]
    }

    pub fn multipliers(&self) -> &[Dfa] {
        &self.multipliers
    }

    pub fn codec(&self) -> &SharedCodec {
        &self.codec
    }

    pub fn sigma_to_s(&self) -> Option<&[GenLetter]> {
        self.sigma_to_s.as_deref()
    }

    /// The largest multiplier state count.
    pub fn max_multiplier_states(&self) -> usize {
        self.multipliers.iter().map(Dfa::state_count).max().unwrap_or(0)
    }

    pub fn encode(&self, g: &Element) -> Result<Vec<Sym>> {
        self.codec.encode(g)
    }

    pub fn decode(&self, w: &[Sym]) -> Result<Element> {
        self.codec.decode(w)
    }

    pub fn encode_str(&self, g: &Element) -> Result<String> {
        Ok(self.alphabet().render(&self.encode(g)?))
    }

    pub fn decode_str(&self, w: &str) -> Result<Element> {
        self.decode(&self.alphabet().parse(w)?)
    }

    /// `π(w)` for a word over `Σ = S`.
    pub fn evaluate_path(&self, w: &[Sym]) -> Result<Element> {
        let map = self.sigma_to_s.as_ref().ok_or_else(|| {
            Error::Unsupported(format!("`{}` is not over the generators; block-reencode it first", self.name))
        })?;
        Ok(self.group.evaluate(&w.iter().map(|&s| map[s as usize]).collect::<Vec<_>>()))
    }

    /// Replaces one multiplier (fault injection, loaded bundles).
    pub fn with_multiplier(mut self, generator: usize, dfa: Dfa) -> Result<CayleyRep> {
        if generator >= self.multipliers.len() {
            return Err(Error::arg(format!("no generator {generator}")));
        }
        if dfa.alphabet() != self.alphabet() || dfa.tracks() != 2 {
            return Err(Error::AlphabetMismatch("multiplier must be two-track over the language alphabet".into()));
        }
        self.multipliers[generator] = dfa;
        Ok(self)
    }

    /// Writes `language.json`, `mult_<generator>.json` and `codec.json`.
    pub fn save_bundle(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        self.language.save(&dir.join("language.json"))?;
        for (i, m) in self.multipliers.iter().enumerate() {
            m.save(&dir.join(format!("mult_{}.json", self.group.generator_name(i))))?;
        }
        std::fs::write(dir.join("codec.json"), serde_json::to_string_pretty(&self.spec)?)?;
        Ok(())
    }

    /// Reads a bundle: the codec is rebuilt from `codec.json` and the stored
    /// automata replace the rebuilt ones, so edited files are what gets verified.
    pub fn load_bundle(dir: &Path) -> Result<CayleyRep> {
        let spec: RepSpec = serde_json::from_str(&std::fs::read_to_string(dir.join("codec.json"))?)?;
        let mut rep = spec.build()?;
        let remap = |d: Dfa| -> Result<Dfa> {
            if d.alphabet().symbols() != rep.alphabet().symbols() {
                return Err(Error::AlphabetMismatch("bundle automaton alphabet differs from the codec's".into()));
            }
            d.with_alphabet(rep.alphabet().clone())
        };
        let language = remap(Dfa::load(&dir.join("language.json"))?)?;
        if language.tracks() != 1 {
            return Err(Error::arg("language automaton must have one track"));
        }
        let mut multipliers = Vec::new();
        for i in 0..rep.group.generator_count() {
            let m = remap(Dfa::load(&dir.join(format!("mult_{}.json", rep.group.generator_name(i))))?)?;
            if m.tracks() != 2 {
                return Err(Error::arg("multiplier automata must have two tracks"));
            }
            multipliers.push(m);
        }
        rep.language = language;
        rep.multipliers = multipliers;
        Ok(rep)
    }
}

/// Two-track automaton accepting exactly the listed pairs.
pub(crate) fn pairs_automaton(alphabet: &Arc<Alphabet>, pairs: &[(Vec<Sym>, Vec<Sym>)]) -> Result<Dfa> {
    Ok(Transducer::from_pairs(alphabet.clone(), pairs).to_sync(pairs.iter().map(|(u, v)| u.len().max(v.len())).max().unwrap_or(0)))
}

/// Renames symbols one-for-one into a larger alphabet.
pub(crate) fn embed(dfa: &Dfa, target: &Arc<Alphabet>, map: &[Sym]) -> Result<Dfa> {
    substitute(dfa, target.clone(), dfa.tracks(), |l| Ok(vec![Letter(l.0.iter().map(|c| c.map(|s| map[s as usize])).collect())]))
}

/// Longest run of one-sided (padded) letters on an accepting path of a
/// two-track automaton: the largest length difference of an accepted pair.
pub(crate) fn lag(dfa: &Dfa) -> Result<usize> {
    let d = dfa.trim();
    let n = d.state_count();
    // longest padded path starting at each state, by memoized DFS with cycle detection
    let mut memo: Vec<Option<usize>> = vec![None; n];
    let mut on_stack = vec![false; n];
    fn visit(d: &Dfa, q: usize, memo: &mut [Option<usize>], on_stack: &mut [bool]) -> Result<usize> {
        if let Some(v) = memo[q] {
            return Ok(v);
        }
        if on_stack[q] {
            return Err(Error::Unsupported("relation has unbounded length difference".into()));
        }
        on_stack[q] = true;
        let mut best = 0;
        let next: Vec<usize> = d.transitions(q).filter(|(l, _)| l.0.iter().any(Option::is_none)).map(|(_, t)| t).collect();
        for t in next {
            best = best.max(1 + visit(d, t, memo, on_stack)?);
        }
        on_stack[q] = false;
        memo[q] = Some(best);
        Ok(best)
    }
    let mut best = 0;
    for q in 0..n {
        best = best.max(visit(&d, q, &mut memo, &mut on_stack)?);
    }
    Ok(best)
}

/// Concatenation of two synchronous relations `{(u₁u₂, v₁v₂)}`, resynchronized.
pub(crate) fn relation_concat(a: &Dfa, b: &Dfa) -> Result<Dfa> {
    let delay = lag(a)? + lag(b)? + 1;
    Ok(Transducer::from_sync(a)?.concat(&Transducer::from_sync(b)?)?.to_sync(delay))
}

/// Composition `{(u, w) | (u, v) ∈ a, (v, w) ∈ b}`.
pub(crate) fn compose(a: &Dfa, b: &Dfa) -> Result<Dfa> {
    let (j, vars) = join(a, &[0, 1], b, &[1, 2])?;
    let keep: Vec<usize> = [0, 2].iter().map(|v| vars.iter().position(|x| x == v).expect("joined variable")).collect();
    crate::automata::select_tracks(&j, &keep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_resolve() {
        for n in BUILTIN_NAMES {
            assert!(RepSpec::from_name(n).is_ok());
            assert!(RepSpec::from_name(&format!("{n}-s")).is_ok());
        }
        assert!(RepSpec::from_name("nope").is_err());
        let spec = RepSpec::from_name("heisenberg-s").unwrap();
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<RepSpec>(&text).unwrap(), spec);
    }

    #[test]
    fn lag_of_unary_successor() {
        let r = rep_unary_z();
        assert_eq!(lag(r.multiplier(0)).unwrap(), 1);
    }
}
