//! Encoders and decoders `G ↔ Σ*` for every representation family.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::automata::Sym;
use crate::encodings::{decode_binary_syms, encode_binary_syms, BlockMap, TupleAlphabet};
use crate::groups::Element;
use crate::{Error, Result};

/// The bijection `ψ` between a regular language and a group, in both directions.
pub trait Codec: fmt::Debug + Send + Sync {
    fn encode(&self, g: &Element) -> Result<Vec<Sym>>;
    /// Decodes a word of the language; words outside it are rejected.
    fn decode(&self, w: &[Sym]) -> Result<Element>;
}

pub type SharedCodec = Arc<dyn Codec>;

fn usize_of(k: &BigInt) -> Result<usize> {
    usize::try_from(k.magnitude()).map_err(|_| Error::CapExceeded {
        what: "unary word length".into(),
        needed: u128::MAX,
        cap: usize::MAX as u128,
    })
}

fn vector(g: &Element, len: usize) -> Result<&[BigInt]> {
    match g {
        Element::Vector(v) if v.len() == len => Ok(v),
        _ => Err(Error::FamilyMismatch(format!("expected a {len}-coordinate element, got {g}"))),
    }
}

/// Splits off a leading run of `P` (symbol `p`) or `N` (symbol `p + 1`).
fn split_unary(w: &[Sym], p: Sym) -> Result<(BigInt, &[Sym])> {
    let run = w.iter().take_while(|&&s| s == p || s == p + 1).count();
    let (head, rest) = w.split_at(run);
    match head.first() {
        None => Ok((BigInt::zero(), rest)),
        Some(&first) if head.iter().all(|&s| s == first) => {
            let k = BigInt::from(run);
            Ok((if first == p { k } else { -k }, rest))
        }
        Some(_) => Err(Error::Decode("mixed unary prefix".into())),
    }
}

fn unary_word(y: &BigInt, p: Sym) -> Result<Vec<Sym>> {
    Ok(vec![if y.is_negative() { p + 1 } else { p }; usize_of(y)?])
}

/// `ℤ` as `P^y` or `N^|y|` over `{P, N}`.
#[derive(Debug)]
pub struct UnaryCodec;

impl Codec for UnaryCodec {
    fn encode(&self, g: &Element) -> Result<Vec<Sym>> {
        unary_word(&vector(g, 1)?[0], 0)
    }

    fn decode(&self, w: &[Sym]) -> Result<Element> {
        let (y, rest) = split_unary(w, 0)?;
        if !rest.is_empty() {
            return Err(Error::Decode("unknown symbol in a unary word".into()));
        }
        Ok(Element::Vector(vec![y]))
    }
}

/// Integer vectors as convolutions of signed binary words.
#[derive(Debug)]
pub struct VectorCodec {
    pub(crate) tuples: TupleAlphabet,
}

impl VectorCodec {
    fn encode_vec(&self, v: &[BigInt]) -> Result<Vec<Sym>> {
        self.tuples.convolve(&v.iter().map(encode_binary_syms).collect::<Vec<_>>())
    }

    fn decode_vec(&self, w: &[Sym]) -> Result<Vec<BigInt>> {
        self.tuples.deconvolve(w)?.iter().map(|c| decode_binary_syms(c)).collect()
    }
}

impl Codec for VectorCodec {
    fn encode(&self, g: &Element) -> Result<Vec<Sym>> {
        self.encode_vec(vector(g, self.tuples.width())?)
    }

    fn decode(&self, w: &[Sym]) -> Result<Element> {
        Ok(Element::Vector(self.decode_vec(w)?))
    }
}

/// `(y, z̄) ∈ ℤⁿ ⋊ ℤ` as the unary word of `y` followed by the convolution of
/// the `β(z_i)`; the tuple alphabet carries `P`, `N` as prefix symbols 0, 1.
#[derive(Debug)]
pub struct SemidirectCodec {
    pub(crate) inner: VectorCodec,
}

impl Codec for SemidirectCodec {
    fn encode(&self, g: &Element) -> Result<Vec<Sym>> {
        match g {
            Element::Semidirect { y, z } => {
                let mut w = unary_word(y, 0)?;
                w.extend(self.inner.encode_vec(z)?);
                Ok(w)
            }
            _ => Err(Error::FamilyMismatch(format!("expected a semidirect element, got {g}"))),
        }
    }

    fn decode(&self, w: &[Sym]) -> Result<Element> {
        let (y, rest) = split_unary(w, 0)?;
        Ok(Element::Semidirect { y, z: self.inner.decode_vec(rest)? })
    }
}

/// `ℋ₃` through `(x, y, z) ↔ (y, (x, z)) ∈ ℤ² ⋊_T ℤ`.
#[derive(Debug)]
pub struct HeisenbergCodec {
    pub(crate) inner: SemidirectCodec,
}

impl Codec for HeisenbergCodec {
    fn encode(&self, g: &Element) -> Result<Vec<Sym>> {
        let v = vector(g, 3)?;
        self.inner.encode(&Element::Semidirect { y: v[1].clone(), z: vec![v[0].clone(), v[2].clone()] })
    }

    fn decode(&self, w: &[Sym]) -> Result<Element> {
        match self.inner.decode(w)? {
            Element::Semidirect { y, z } => Ok(Element::Vector(vec![z[0].clone(), y, z[1].clone()])),
            _ => unreachable!("semidirect codec yields semidirect elements"),
        }
    }
}

pub(crate) const LAMP_PLUS: Sym = 0;
pub(crate) const LAMP_MINUS: Sym = 1;
pub(crate) const LAMP_ZERO: Sym = 2;
pub(crate) const LAMP_ONE: Sym = 3;
pub(crate) const LAMP_C0: Sym = 4;
pub(crate) const LAMP_C1: Sym = 5;
pub(crate) const LAMP_HASH: Sym = 6;

/// Lamplighter elements as `u # f(s) … C_{f(z)} … f(t)` where `[s, t]` is the
/// hull of the lit lamps and the cursor and `u` is `s` in sign-magnitude
/// binary, most significant digit first.
#[derive(Debug)]
pub struct LamplighterCodec;

impl Codec for LamplighterCodec {
    fn encode(&self, g: &Element) -> Result<Vec<Sym>> {
        let (lamps, cursor) = match g {
            Element::Lamp { lamps, cursor } => (lamps, cursor),
            _ => return Err(Error::FamilyMismatch(format!("expected a lamplighter element, got {g}"))),
        };
        let s = lamps.first().map_or(cursor, |m| m.min(cursor)).clone();
        let t = lamps.last().map_or(cursor, |m| m.max(cursor)).clone();
        let mut w = vec![if s.is_negative() { LAMP_MINUS } else { LAMP_PLUS }];
        let mag = s.magnitude();
        if mag.is_zero() {
            w.push(LAMP_ZERO);
        } else {
            w.extend((0..mag.bits()).rev().map(|i| if mag.bit(i) { LAMP_ONE } else { LAMP_ZERO }));
        }
        w.push(LAMP_HASH);
        let span = usize_of(&(&t - &s))? + 1;
        let mut i = s;
        for _ in 0..span {
            let lit = lamps.contains(&i);
            w.push(match (&i == cursor, lit) {
                (true, false) => LAMP_C0,
                (true, true) => LAMP_C1,
                (false, false) => LAMP_ZERO,
                (false, true) => LAMP_ONE,
            });
            i += 1;
        }
        Ok(w)
    }

    fn decode(&self, w: &[Sym]) -> Result<Element> {
        let bad = |m: &str| Error::Decode(format!("lamplighter word: {m}"));
        let hash = w.iter().position(|&c| c == LAMP_HASH).ok_or_else(|| bad("no `#`"))?;
        let (u, window) = (&w[..hash], &w[hash + 1..]);
        let (&sign, digits) = u.split_first().ok_or_else(|| bad("empty offset"))?;
        if (sign != LAMP_PLUS && sign != LAMP_MINUS) || digits.is_empty() {
            return Err(bad("offset needs a sign and digits"));
        }
        if digits.iter().any(|&d| d != LAMP_ZERO && d != LAMP_ONE) {
            return Err(bad("non-binary offset digit"));
        }
        let canonical = digits[0] == LAMP_ONE || (digits == [LAMP_ZERO] && sign == LAMP_PLUS);
        if !canonical {
            return Err(bad("non-canonical offset"));
        }
        let mut s = BigInt::zero();
        for &d in digits {
            s = s * 2 + u32::from(d == LAMP_ONE);
        }
        if sign == LAMP_MINUS {
            s = -s;
        }
        let mut lamps = BTreeSet::new();
        let mut cursor = None;
        let mut i = s;
        for (k, &c) in window.iter().enumerate() {
            match c {
                LAMP_ZERO => {}
                LAMP_ONE => {
                    lamps.insert(i.clone());
                }
                LAMP_C0 | LAMP_C1 if cursor.is_none() => {
                    if c == LAMP_C1 {
                        lamps.insert(i.clone());
                    }
                    cursor = Some(i.clone());
                }
                LAMP_C0 | LAMP_C1 => return Err(bad("two cursor cells")),
                _ => return Err(bad("unexpected symbol in the window")),
            }
            // window ends must be lit or hold the cursor
            if (k == 0 || k + 1 == window.len()) && c == LAMP_ZERO {
                return Err(bad("window is not tight"));
            }
            i += BigInt::one();
        }
        let cursor = cursor.ok_or_else(|| bad("no cursor cell"))?;
        Ok(Element::Lamp { lamps, cursor })
    }
}

/// Words `u v` with `u` over the first factor's symbols `0..split` and `v`
/// over the second factor's symbols shifted by `split`.
#[derive(Debug)]
pub struct DirectCodec {
    pub(crate) left: SharedCodec,
    pub(crate) right: SharedCodec,
    pub(crate) split: Sym,
}

impl Codec for DirectCodec {
    fn encode(&self, g: &Element) -> Result<Vec<Sym>> {
        match g {
            Element::Pair(a, b) => {
                let mut w = self.left.encode(a)?;
                w.extend(self.right.encode(b)?.into_iter().map(|s| s + self.split));
                Ok(w)
            }
            _ => Err(Error::FamilyMismatch(format!("expected a pair, got {g}"))),
        }
    }

    fn decode(&self, w: &[Sym]) -> Result<Element> {
        let cut = w.iter().position(|&s| s >= self.split).unwrap_or(w.len());
        let (u, v) = w.split_at(cut);
        if v.iter().any(|&s| s < self.split) {
            return Err(Error::Decode("first-factor symbol after the boundary".into()));
        }
        let v: Vec<Sym> = v.iter().map(|&s| s - self.split).collect();
        Ok(Element::Pair(Box::new(self.left.decode(u)?), Box::new(self.right.decode(&v)?)))
    }
}

/// Alternating nonempty syllables over the two factor alphabets.
#[derive(Debug)]
pub struct FreeCodec {
    pub(crate) left: SharedCodec,
    pub(crate) right: SharedCodec,
    pub(crate) split: Sym,
    pub(crate) identities: [Element; 2],
}

impl Codec for FreeCodec {
    fn encode(&self, g: &Element) -> Result<Vec<Sym>> {
        let syllables = match g {
            Element::Free(s) => s,
            _ => return Err(Error::FamilyMismatch(format!("expected a free-product element, got {g}"))),
        };
        let mut w = Vec::new();
        for (side, e) in syllables {
            let part = if *side == 0 { self.left.encode(e)? } else { self.right.encode(e)? };
            if part.is_empty() {
                return Err(Error::Decode("a nontrivial syllable encodes to the empty word".into()));
            }
            let shift = if *side == 0 { 0 } else { self.split };
            w.extend(part.into_iter().map(|s| s + shift));
        }
        Ok(w)
    }

    fn decode(&self, w: &[Sym]) -> Result<Element> {
        let mut out = Vec::new();
        for run in w.chunk_by(|a, b| (*a < self.split) == (*b < self.split)) {
            let side = u8::from(run[0] >= self.split);
            let e = if side == 0 {
                self.left.decode(run)?
            } else {
                self.right.decode(&run.iter().map(|&s| s - self.split).collect::<Vec<_>>())?
            };
            if e == self.identities[side as usize] {
                return Err(Error::Decode("syllable decodes to the identity".into()));
            }
            out.push((side, e));
        }
        Ok(Element::Free(out))
    }
}

/// Words `u k` with `u` in the subgroup language and `k` empty or one coset symbol.
#[derive(Debug)]
pub struct ExtensionCodec {
    pub(crate) base: SharedCodec,
    /// first coset symbol; coset `j >= 1` uses `first + j - 1`
    pub(crate) first: Sym,
    pub(crate) cosets: usize,
}

impl Codec for ExtensionCodec {
    fn encode(&self, g: &Element) -> Result<Vec<Sym>> {
        match g {
            Element::Coset { base, coset } if *coset < self.cosets => {
                let mut w = self.base.encode(base)?;
                if *coset > 0 {
                    w.push(self.first + *coset as Sym - 1);
                }
                Ok(w)
            }
            _ => Err(Error::FamilyMismatch(format!("expected a coset element, got {g}"))),
        }
    }

    fn decode(&self, w: &[Sym]) -> Result<Element> {
        let (u, coset) = match w.split_last() {
            Some((&k, u)) if k >= self.first => (u, (k - self.first) as usize + 1),
            _ => (w, 0),
        };
        if u.iter().any(|&s| s >= self.first) {
            return Err(Error::Decode("coset symbol before the end".into()));
        }
        Ok(Element::Coset { base: Box::new(self.base.decode(u)?), coset })
    }
}

/// Block substitution `Σ → S^ℓ` applied after the inner codec.
#[derive(Debug)]
pub struct ReencodedCodec {
    pub(crate) inner: SharedCodec,
    pub(crate) block: BlockMap,
}

impl Codec for ReencodedCodec {
    fn encode(&self, g: &Element) -> Result<Vec<Sym>> {
        Ok(self.block.apply(&self.inner.encode(g)?))
    }

    fn decode(&self, w: &[Sym]) -> Result<Element> {
        self.inner.decode(&self.block.invert(w)?)
    }
}

/// Moves the identity's code word to `ε` (the codec precondition of free products).
#[derive(Debug)]
pub struct RepointedCodec {
    pub(crate) inner: SharedCodec,
    pub(crate) identity_word: Vec<Sym>,
    pub(crate) identity: Element,
}

impl Codec for RepointedCodec {
    fn encode(&self, g: &Element) -> Result<Vec<Sym>> {
        if *g == self.identity {
            Ok(Vec::new())
        } else {
            self.inner.encode(g)
        }
    }

    fn decode(&self, w: &[Sym]) -> Result<Element> {
        if w.is_empty() {
            Ok(self.identity.clone())
        } else if w == self.identity_word {
            Err(Error::Decode("the identity is written as the empty word".into()))
        } else {
            self.inner.decode(w)
        }
    }
}
