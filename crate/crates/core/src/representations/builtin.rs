//! Representations of `ℤ`, `ℤⁿ`, `ℤⁿ ⋊_A ℤ`, `ℋ₃` and `UTₙ(ℤ)` built from
//! unary prefixes and convolutions of signed binary words.

use std::sync::Arc;

use crate::automata::{concat, Alphabet, Dfa, Letter, Transducer};
use crate::encodings::{
    affine_map_automaton, binary_alphabet, binary_domain, linear_map_automaton, unary_alphabet, TupleAlphabet,
};
use crate::groups::{ut_index, GenLetter, Group};
use crate::{Error, Result};

use super::codec::{HeisenbergCodec, SemidirectCodec, UnaryCodec, VectorCodec};
use super::{CayleyRep, RepSpec};

/// `P* ∪ N*` over an alphabet whose symbols 0 and 1 are `P` and `N`.
fn unary_language(alphabet: Arc<Alphabet>) -> Dfa {
    let (p, n) = (Letter::single(0), Letter::single(1));
    Dfa::from_parts(alphabet, 1, 3, 0, &[0, 1, 2], [(0, p.clone(), 1), (1, p, 1), (0, n.clone(), 2), (2, n, 2)])
        .expect("well-formed unary language")
}

/// `ℤ` with `L = P* ∪ N*` and `ψ = π`.
pub fn rep_unary_z() -> CayleyRep {
    let alphabet = unary_alphabet();
    let l = |a: Option<u16>, b: Option<u16>| Letter::from_slice(&[a, b]);
    let (p, n) = (Some(0), Some(1));
    // P^k ⊗ P^{k+1} and N^{k+1} ⊗ N^k
    let mult = Dfa::from_parts(
        alphabet.clone(),
        2,
        4,
        0,
        &[2],
        [
            (0, l(p, p), 1),
            (1, l(p, p), 1),
            (0, l(None, p), 2),
            (1, l(None, p), 2),
            (0, l(n, n), 3),
            (3, l(n, n), 3),
            (0, l(n, None), 2),
            (3, l(n, None), 2),
        ],
    )
    .expect("well-formed successor");
    CayleyRep {
        name: "unary-z".into(),
        spec: RepSpec::UnaryZ {},
        group: Arc::new(Group::abelian(1)),
        language: unary_language(alphabet),
        multipliers: vec![mult],
        codec: Arc::new(UnaryCodec),
        sigma_to_s: Some(vec![GenLetter::new(0, false), GenLetter::new(0, true)]),
    }
}

fn unit(n: usize, i: usize) -> Vec<i64> {
    (0..n).map(|j| i64::from(i == j)).collect()
}

fn identity(n: usize) -> Vec<Vec<i64>> {
    (0..n).map(|i| unit(n, i)).collect()
}

/// `ℤⁿ` as convolutions of signed binary words; generator `i` adds `ē_i`.
pub fn rep_binary_z(n: usize) -> Result<CayleyRep> {
    if n == 0 {
        return Err(Error::arg("rank must be positive"));
    }
    let tuples = TupleAlphabet::new(binary_alphabet(), n, &[])?;
    let language = tuples.group(&binary_domain(n)?)?;
    let multipliers =
        (0..n).map(|i| tuples.group(&affine_map_automaton(&identity(n), &unit(n, i))?)).collect::<Result<_>>()?;
    Ok(CayleyRep {
        name: if n == 1 { "binary-z".into() } else { format!("binary-z{n}") },
        spec: RepSpec::BinaryZ { n },
        group: Arc::new(Group::abelian(n)),
        language,
        multipliers,
        codec: Arc::new(VectorCodec { tuples }),
        sigma_to_s: None,
    })
}

/// `ℤⁿ ⋊_A ℤ`: the unary word of `y` followed by the convolution of `β(z̄)`.
/// `z_i` adds `ē_i` to the tuple part; `t` lengthens (or shortens) the unary
/// prefix and applies `A` to the tuple part.
pub fn rep_semidirect(a: Vec<Vec<i64>>) -> Result<CayleyRep> {
    let group = Arc::new(Group::semidirect(a.clone())?);
    let n = a.len();
    let tuples = TupleAlphabet::new(binary_alphabet(), n, &["P", "N"])?;
    let sigma = tuples.alphabet().clone();
    let prefix = unary_language(sigma.clone());
    let language = concat(&prefix, &tuples.group(&binary_domain(n)?)?)?;
    let prefix_id = prefix.diagonal()?;
    let mut multipliers: Vec<Dfa> = (0..n)
        .map(|i| concat(&prefix_id, &tuples.group(&affine_map_automaton(&identity(n), &unit(n, i))?)?))
        .collect::<Result<_>>()?;
    // P^y ↦ P^{y+1} for y >= 0 and N^k ↦ N^{k-1} for k >= 1
    let ps = Dfa::from_parts(sigma.clone(), 1, 1, 0, &[0], [(0, Letter::single(0), 0)])?;
    let ns = Dfa::from_parts(sigma.clone(), 1, 1, 0, &[0], [(0, Letter::single(1), 0)])?;
    let up = Transducer::identity_on(&ps)?.concat(&Transducer::from_pairs(sigma.clone(), &[(vec![], vec![0])]))?;
    let down = Transducer::identity_on(&ns)?.concat(&Transducer::from_pairs(sigma.clone(), &[(vec![1], vec![])]))?;
    let shift = Transducer::union(&[up, down])?;
    let act = Transducer::from_sync(&tuples.group(&linear_map_automaton(&a)?)?)?;
    multipliers.push(shift.concat(&act)?.to_sync(2));
    Ok(CayleyRep {
        name: "semidirect".into(),
        spec: RepSpec::Semidirect { a },
        group,
        language,
        multipliers,
        codec: Arc::new(SemidirectCodec { inner: VectorCodec { tuples } }),
        sigma_to_s: None,
    })
}

/// The matrix `T` with `T(x, z) = (x, x + z)`.
pub fn heisenberg_matrix() -> Vec<Vec<i64>> {
    vec![vec![1, 0], vec![1, 1]]
}

/// `ℋ₃` through its isomorphism with `ℤ² ⋊_T ℤ`: `(x, y, z) ↔ (y, (x, z))`,
/// so `s`, `p`, `q` act as `z1`, `t`, `z2`.
pub fn rep_heisenberg() -> Result<CayleyRep> {
    let base = rep_semidirect(heisenberg_matrix())?;
    let inner = SemidirectCodec { inner: VectorCodec { tuples: TupleAlphabet::new(binary_alphabet(), 2, &["P", "N"])? } };
    let m = base.multipliers;
    Ok(CayleyRep {
        name: "heisenberg".into(),
        spec: RepSpec::Heisenberg {},
        group: Arc::new(Group::heisenberg()),
        language: base.language,
        multipliers: vec![m[0].clone(), m[2].clone(), m[1].clone()],
        codec: Arc::new(HeisenbergCodec { inner }),
        sigma_to_s: None,
    })
}

/// `UTₙ(ℤ)` as the convolution of `β(m_ij)` over the entries above the
/// diagonal; `t_ij` adds column `i` to column `j` and then one to `m_ij`.
pub fn rep_unitriangular(n: usize) -> Result<CayleyRep> {
    if n < 3 {
        return Err(Error::arg("unitriangular representations need n >= 3"));
    }
    let group = Arc::new(Group::unitriangular(n)?);
    let d = n * (n - 1) / 2;
    let tuples = TupleAlphabet::new(binary_alphabet(), d, &[])?;
    let language = tuples.group(&binary_domain(d)?)?;
    let mut multipliers = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let mut m = identity(d);
            for k in 0..i {
                m[ut_index(n, k, j)][ut_index(n, k, i)] += 1;
            }
            multipliers.push(tuples.group(&affine_map_automaton(&m, &unit(d, ut_index(n, i, j)))?)?);
        }
    }
    Ok(CayleyRep {
        name: format!("ut{n}"),
        spec: RepSpec::Unitriangular { n },
        group,
        language,
        multipliers,
        codec: Arc::new(VectorCodec { tuples }),
        sigma_to_s: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encodings::encode_binary_syms;
    use crate::groups::Element;
    use num_bigint::BigInt;

    fn v(x: &[i64]) -> Element {
        Element::Vector(x.iter().map(|&a| BigInt::from(a)).collect())
    }

    #[test]
    fn unary_examples() {
        let r = rep_unary_z();
        assert_eq!(r.decode_str("PPP").unwrap(), v(&[3]));
        assert!(r.multiplier(0).accepts_tuple(&[&[0], &[0, 0]]));
        assert!(r.multiplier(0).accepts_tuple(&[&[1], &[]]));
        assert!(!r.multiplier(0).accepts_tuple(&[&[1], &[0]]));
        assert!(r.decode_str("PN").is_err());
    }

    #[test]
    fn heisenberg_decoding_follows_the_isomorphism() {
        let r = rep_heisenberg().unwrap();
        let tuples = TupleAlphabet::new(binary_alphabet(), 2, &["P", "N"]).unwrap();
        let mut w = vec![0];
        w.extend(tuples.convolve(&[encode_binary_syms(&1.into()), encode_binary_syms(&0.into())]).unwrap());
        assert_eq!(r.decode(&w).unwrap(), v(&[1, 1, 0]));
        // the identity is ε followed by conv(+0, +0)
        assert_eq!(r.encode_str(&v(&[0, 0, 0])).unwrap(), "++00");
        // p maps (1,1,0) to (1,2,1)
        let w2 = r.encode(&v(&[1, 2, 1])).unwrap();
        assert!(r.multiplier(1).accepts_tuple(&[&w, &w2]));
    }

    #[test]
    fn unitriangular_column_addition() {
        let r = rep_unitriangular(3).unwrap();
        let tuples = TupleAlphabet::new(binary_alphabet(), 3, &[]).unwrap();
        let enc = |x: &[i64]| tuples.convolve(&x.iter().map(|&a| encode_binary_syms(&a.into())).collect::<Vec<_>>()).unwrap();
        assert_eq!(r.decode(&enc(&[1, 0, 0])).unwrap(), v(&[1, 0, 0]));
        // t23 is the third generator (t12, t13, t23)
        assert!(r.multiplier(2).accepts_tuple(&[&enc(&[2, 0, 5]), &enc(&[2, 2, 6])]));
        assert!(!r.multiplier(2).accepts_tuple(&[&enc(&[2, 0, 5]), &enc(&[2, 0, 6])]));
        assert!(rep_unitriangular(2).is_err());
    }
}
