//! Integer codecs and the arithmetic relation automata built on them.
//!
//! Signed binary words are a sign symbol followed by digits least significant
//! first, with zero written `+0`: 5 is `+101` and -3 is `-11`. Unary words are
//! `P^y` for `y >= 0` and `N^|y|` otherwise.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use smallvec::SmallVec;

use crate::automata::{regroup, substitute, Alphabet, Dfa, Letter, Sym};
use crate::{Error, Result};

/// Symbols of the signed binary codec, in declared order.
pub const BINARY_SYMBOLS: [&str; 4] = ["+", "-", "0", "1"];
/// Symbols of the unary codec.
pub const UNARY_SYMBOLS: [&str; 2] = ["P", "N"];
/// Inner padding character used when naming tuple symbols.
pub const INNER_PAD: char = '_';

const PLUS: Sym = 0;
const MINUS: Sym = 1;
const ZERO: Sym = 2;
const ONE: Sym = 3;

pub fn binary_alphabet() -> Arc<Alphabet> {
    Alphabet::new(BINARY_SYMBOLS).expect("static alphabet")
}

pub fn unary_alphabet() -> Arc<Alphabet> {
    Alphabet::new(UNARY_SYMBOLS).expect("static alphabet")
}

pub fn encode_binary_syms(z: &BigInt) -> Vec<Sym> {
    let mut out = vec![if z.is_negative() { MINUS } else { PLUS }];
    let mag = z.magnitude();
    if mag.is_zero() {
        out.push(ZERO);
        return out;
    }
    for i in 0..mag.bits() {
        out.push(if mag.bit(i) { ONE } else { ZERO });
    }
    out
}

pub fn encode_binary(z: &BigInt) -> String {
    encode_binary_syms(z).iter().map(|&s| BINARY_SYMBOLS[s as usize]).collect()
}

pub fn decode_binary_syms(w: &[Sym]) -> Result<BigInt> {
    let (&sign, digits) = w.split_first().ok_or_else(|| Error::Decode("empty binary word".into()))?;
    let negative = match sign {
        PLUS => false,
        MINUS => true,
        _ => return Err(Error::Decode("binary word must start with a sign".into())),
    };
    if digits.is_empty() {
        return Err(Error::Decode("binary word has no digits".into()));
    }
    if digits.iter().any(|&d| d != ZERO && d != ONE) {
        return Err(Error::Decode("sign symbol among digits".into()));
    }
    if digits == [ZERO] {
        return if negative { Err(Error::Decode("negative zero".into())) } else { Ok(BigInt::zero()) };
    }
    if *digits.last().unwrap() != ONE {
        return Err(Error::Decode("trailing zero digit".into()));
    }
    let mut v = BigInt::zero();
    for &d in digits.iter().rev() {
        v = v * 2 + u32::from(d == ONE);
    }
    Ok(if negative { -v } else { v })
}

pub fn decode_binary(w: &str) -> Result<BigInt> {
    let syms = binary_alphabet().parse(w).map_err(|_| Error::Decode(format!("not a binary word: `{w}`")))?;
    decode_binary_syms(&syms)
}

pub fn encode_unary(y: &BigInt) -> String {
    let letter = if y.is_negative() { "N" } else { "P" };
    let n: usize = y.magnitude().try_into().expect("unary length fits in memory");
    letter.repeat(n)
}

pub fn decode_unary(w: &str) -> Result<BigInt> {
    let n = w.chars().count();
    if w.chars().all(|c| c == 'P') {
        Ok(BigInt::from(n))
    } else if w.chars().all(|c| c == 'N') {
        Ok(-BigInt::from(n))
    } else {
        Err(Error::Decode(format!("not a unary word: `{w}`")))
    }
}

/// (symbol, next phase, sign, bit)
type TrackOption = (Option<Sym>, Phase, i8, i64);

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum Phase {
    Start,
    NeedDigit,
    /// first digit was 0: may end only after `+`
    Zero,
    /// last digit was 1, the track may end
    One,
    /// last digit was 0 after a 1, the track may not end
    ZeroTail,
    Ended,
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct EqState {
    phases: SmallVec<[Phase; 8]>,
    signs: SmallVec<[i8; 8]>,
    carries: SmallVec<[i64; 4]>,
}

/// One affine equation `Σ coeffs[i]·z_i + constant = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearEquation {
    pub coeffs: Vec<i64>,
    pub constant: i64,
}

/// Automaton over `tracks` signed binary tracks accepting exactly the tuples
/// of canonical words whose values satisfy every equation. With no equations
/// it accepts every tuple of canonical words.
///
/// Digits are processed synchronously with one carry per equation: at each
/// digit position `t = carry + Σ c_i·sign_i·bit_i` must be even and the new
/// carry is `t / 2`; acceptance requires all carries to be zero.
pub fn linear_system_automaton(tracks: usize, equations: &[LinearEquation]) -> Result<Dfa> {
    if tracks == 0 {
        return Err(Error::arg("at least one track required"));
    }
    if equations.iter().any(|e| e.coeffs.len() != tracks) {
        return Err(Error::arg("equation width differs from track count"));
    }
    let alphabet = binary_alphabet();
    let start = EqState {
        phases: SmallVec::from_elem(Phase::Start, tracks),
        signs: SmallVec::from_elem(0, tracks),
        carries: equations.iter().map(|e| e.constant).collect(),
    };
    let accepting = |s: &EqState| {
        s.phases.iter().zip(&s.signs).all(|(p, &sg)| match p {
            Phase::Zero => sg > 0,
            Phase::One | Phase::Ended => true,
            _ => false,
        }) && s.carries.iter().all(|&c| c == 0)
    };
    // per-track options
    let options = |p: Phase, sign: i8| -> SmallVec<[TrackOption; 3]> {
        let mut v = SmallVec::new();
        match p {
            Phase::Start => {
                v.push((Some(PLUS), Phase::NeedDigit, 1, 0));
                v.push((Some(MINUS), Phase::NeedDigit, -1, 0));
            }
            Phase::NeedDigit => {
                v.push((Some(ZERO), Phase::Zero, sign, 0));
                v.push((Some(ONE), Phase::One, sign, 1));
            }
            Phase::Zero | Phase::One | Phase::ZeroTail => {
                v.push((Some(ZERO), Phase::ZeroTail, sign, 0));
                v.push((Some(ONE), Phase::One, sign, 1));
                if p == Phase::One || p == Phase::Zero && sign > 0 {
                    v.push((None, Phase::Ended, 0, 0));
                }
            }
            Phase::Ended => v.push((None, Phase::Ended, 0, 0)),
        }
        v
    };
    let mut index: HashMap<EqState, usize> = HashMap::from([(start.clone(), 0)]);
    let mut states = vec![start];
    let mut delta: Vec<BTreeMap<Letter, usize>> = Vec::new();
    let mut i = 0;
    while i < states.len() {
        let s = states[i].clone();
        i += 1;
        let opts: Vec<_> = (0..tracks).map(|k| options(s.phases[k], s.signs[k])).collect();
        let digit_position = s.phases[0] != Phase::Start;
        let mut row = BTreeMap::new();
        let mut choice = vec![0usize; tracks];
        'product: loop {
            let picks: SmallVec<[&TrackOption; 8]> =
                (0..tracks).map(|k| &opts[k][choice[k]]).collect();
            let letter = Letter(picks.iter().map(|p| p.0).collect());
            if !letter.is_all_pad() {
                let mut carries = SmallVec::new();
                let mut ok = true;
                for (r, eq) in equations.iter().enumerate() {
                    let mut t = s.carries[r];
                    if !digit_position {
                        carries.push(t);
                        continue;
                    }
                    for k in 0..tracks {
                        t += eq.coeffs[k] * i64::from(picks[k].2) * picks[k].3;
                    }
                    if t % 2 != 0 {
                        ok = false;
                        break;
                    }
                    carries.push(t / 2);
                }
                if ok {
                    let next = EqState {
                        phases: picks.iter().map(|p| p.1).collect(),
                        signs: picks.iter().map(|p| p.2).collect(),
                        carries,
                    };
                    let id = *index.entry(next.clone()).or_insert_with(|| {
                        states.push(next);
                        states.len() - 1
                    });
                    row.insert(letter, id);
                }
            }
            for k in 0..tracks {
                choice[k] += 1;
                if choice[k] < opts[k].len() {
                    continue 'product;
                }
                choice[k] = 0;
            }
            break;
        }
        delta.push(row);
    }
    let acc: Vec<usize> = states.iter().enumerate().filter(|(_, s)| accepting(s)).map(|(q, _)| q).collect();
    let transitions = delta.into_iter().enumerate().flat_map(|(q, row)| row.into_iter().map(move |(l, t)| (q, l, t)));
    Ok(Dfa::from_parts(alphabet, tracks, states.len(), 0, &acc, transitions)?.minimize())
}

/// All tuples of canonical signed binary words on `tracks` tracks.
pub fn binary_domain(tracks: usize) -> Result<Dfa> {
    linear_system_automaton(tracks, &[])
}

/// Accepts `β(z) ⊗ β(z+1)`.
pub fn successor_automaton() -> Dfa {
    linear_system_automaton(2, &[LinearEquation { coeffs: vec![1, -1], constant: 1 }]).expect("well-formed")
}

/// Accepts `β(z̄) ⊗ β(M z̄ + c̄)` over `2k` tracks (inputs then outputs).
pub fn affine_map_automaton(m: &[Vec<i64>], c: &[i64]) -> Result<Dfa> {
    let k = m.len();
    if k == 0 || m.iter().any(|r| r.len() != k) || c.len() != k {
        return Err(Error::arg("affine map needs a square matrix and a matching offset"));
    }
    let equations: Vec<LinearEquation> = (0..k)
        .map(|i| {
            let mut coeffs = m[i].clone();
            coeffs.extend((0..k).map(|j| if i == j { -1 } else { 0 }));
            LinearEquation { coeffs, constant: c[i] }
        })
        .collect();
    linear_system_automaton(2 * k, &equations)
}

/// Accepts `β(z̄) ⊗ β(M z̄)` over `2k` tracks.
pub fn linear_map_automaton(m: &[Vec<i64>]) -> Result<Dfa> {
    affine_map_automaton(m, &vec![0; m.len()])
}

/// The alphabet of `width`-tuples over a base alphabet of one-character
/// symbols, named by concatenation with `_` for inner padding, optionally
/// preceded by extra plain symbols. Width one yields the base names.
#[derive(Clone, Debug)]
pub struct TupleAlphabet {
    base: Arc<Alphabet>,
    width: usize,
    alphabet: Arc<Alphabet>,
    offset: usize,
    index: HashMap<SmallVec<[Option<Sym>; 8]>, Sym>,
    tuples: Vec<SmallVec<[Option<Sym>; 8]>>,
}

impl TupleAlphabet {
    pub fn new(base: Arc<Alphabet>, width: usize, prefix: &[&str]) -> Result<TupleAlphabet> {
        if width == 0 {
            return Err(Error::arg("tuple width must be positive"));
        }
        if base.symbols().iter().any(|s| s.chars().count() != 1 || s.starts_with(INNER_PAD)) {
            return Err(Error::arg("tuple alphabets need one-character base symbols"));
        }
        let b = base.len();
        let total = (b + 1).checked_pow(width as u32).filter(|&t| t <= 1 << 15).ok_or(Error::CapExceeded {
            what: "tuple alphabet size".into(),
            needed: (b as u128 + 1).saturating_pow(width as u32),
            cap: 1 << 15,
        })?;
        let mut tuples = Vec::with_capacity(total);
        for code in 0..total {
            let mut c = code;
            let mut t: SmallVec<[Option<Sym>; 8]> = SmallVec::new();
            for _ in 0..width {
                let d = c % (b + 1);
                c /= b + 1;
                t.push(if d == b { None } else { Some(d as Sym) });
            }
            t.reverse();
            if t.iter().any(Option::is_some) {
                tuples.push(t);
            }
        }
        // order: base-symbol order with padding last, first component most significant
        tuples.sort_by_key(|t| t.iter().map(|c| c.map_or(b, |s| s as usize)).collect::<Vec<_>>());
        let names = tuples.iter().map(|t| {
            t.iter().map(|c| c.map_or(INNER_PAD.to_string(), |s| base.name(s).to_string())).collect::<String>()
        });
        let all: Vec<String> = prefix.iter().map(|s| s.to_string()).chain(names).collect();
        let alphabet = Alphabet::new(all)?;
        let offset = prefix.len();
        let index = tuples.iter().enumerate().map(|(i, t)| (t.clone(), (i + offset) as Sym)).collect();
        Ok(TupleAlphabet { base, width, alphabet, offset, index, tuples })
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn base(&self) -> &Arc<Alphabet> {
        &self.base
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn symbol(&self, components: &[Option<Sym>]) -> Result<Sym> {
        self.index
            .get(components)
            .copied()
            .ok_or_else(|| Error::arg(format!("no tuple symbol for {components:?}")))
    }

    /// Components of a tuple symbol, or `None` for a prefix symbol.
    pub fn components(&self, s: Sym) -> Option<&[Option<Sym>]> {
        (s as usize).checked_sub(self.offset).and_then(|i| self.tuples.get(i)).map(|t| t.as_slice())
    }

    /// Convolution of `width` base words as one word over the tuple alphabet.
    pub fn convolve(&self, words: &[Vec<Sym>]) -> Result<Vec<Sym>> {
        if words.len() != self.width {
            return Err(Error::arg("wrong number of tuple components"));
        }
        let len = words.iter().map(Vec::len).max().unwrap_or(0);
        (0..len)
            .map(|k| self.symbol(&words.iter().map(|w| w.get(k).copied()).collect::<SmallVec<[_; 8]>>()))
            .collect()
    }

    /// Splits a tuple word back into its components, checking padding.
    pub fn deconvolve(&self, w: &[Sym]) -> Result<Vec<Vec<Sym>>> {
        let mut out = vec![Vec::new(); self.width];
        let mut ended = vec![false; self.width];
        for &s in w {
            let comps = self.components(s).ok_or_else(|| Error::Decode("prefix symbol inside a tuple word".into()))?;
            for (t, c) in comps.iter().enumerate() {
                match c {
                    Some(_) if ended[t] => return Err(Error::MalformedConvolution("padding inside a component".into())),
                    Some(x) => out[t].push(*x),
                    None => ended[t] = true,
                }
            }
        }
        Ok(out)
    }

    /// Re-expresses a `k·width`-track automaton over base symbols as a
    /// `k`-track automaton over this alphabet (consecutive groups of tracks).
    pub fn group(&self, dfa: &Dfa) -> Result<Dfa> {
        if dfa.alphabet() != &self.base || !dfa.tracks().is_multiple_of(self.width) {
            return Err(Error::AlphabetMismatch("automaton does not match the tuple base".into()));
        }
        let groups: Vec<Vec<usize>> =
            (0..dfa.tracks() / self.width).map(|g| (g * self.width..(g + 1) * self.width).collect()).collect();
        regroup(dfa, &groups, self.alphabet.clone(), |c| self.symbol(c))
    }
}

/// An injective map from `Σ` to words of one common length `ℓ` over `S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockMap {
    images: Vec<Vec<Sym>>,
    ell: usize,
    target_len: usize,
    inverse: HashMap<Vec<Sym>, Sym>,
}

impl BlockMap {
    pub fn new(images: Vec<Vec<Sym>>, target_len: usize) -> Result<BlockMap> {
        let ell = images.first().map_or(1, Vec::len);
        if ell == 0 || images.iter().any(|w| w.len() != ell) {
            return Err(Error::arg("block images must share one positive length"));
        }
        if images.iter().flatten().any(|&s| s as usize >= target_len) {
            return Err(Error::arg("block image uses an undeclared target symbol"));
        }
        let mut inverse = HashMap::new();
        for (i, w) in images.iter().enumerate() {
            if inverse.insert(w.clone(), i as Sym).is_some() {
                return Err(Error::arg("block map is not injective"));
            }
        }
        Ok(BlockMap { images, ell, target_len, inverse })
    }

    /// Lexicographically first injective assignment with the shortest block
    /// length: the `i`-th symbol of `Σ` maps to the `i`-th word of `S^ℓ`.
    pub fn default_for(sigma_len: usize, target_len: usize) -> Result<BlockMap> {
        if target_len < 2 && sigma_len > 1 {
            return Err(Error::arg("a one-letter target cannot encode several symbols"));
        }
        let mut ell = 1;
        while (target_len as u128).pow(ell as u32) < sigma_len as u128 {
            ell += 1;
        }
        let images = (0..sigma_len)
            .map(|i| {
                let mut w = vec![0 as Sym; ell];
                let mut c = i;
                for k in (0..ell).rev() {
                    w[k] = (c % target_len) as Sym;
                    c /= target_len;
                }
                w
            })
            .collect();
        BlockMap::new(images, target_len)
    }

    pub fn block_len(&self) -> usize {
        self.ell
    }

    pub fn image(&self, s: Sym) -> &[Sym] {
        &self.images[s as usize]
    }

    pub fn apply(&self, w: &[Sym]) -> Vec<Sym> {
        w.iter().flat_map(|&s| self.images[s as usize].iter().copied()).collect()
    }

    pub fn invert(&self, w: &[Sym]) -> Result<Vec<Sym>> {
        if !w.len().is_multiple_of(self.ell) {
            return Err(Error::Decode("length is not a multiple of the block length".into()));
        }
        w.chunks(self.ell)
            .map(|c| self.inverse.get(c).copied().ok_or_else(|| Error::Decode("unknown block".into())))
            .collect()
    }

    /// Transports an automaton through the substitution, track by track;
    /// padding becomes `ℓ` padding cells.
    pub fn transport(&self, dfa: &Dfa, target: Arc<Alphabet>) -> Result<Dfa> {
        if target.len() != self.target_len || dfa.alphabet().len() != self.images.len() {
            return Err(Error::AlphabetMismatch("block map does not fit the automaton".into()));
        }
        let tracks = dfa.tracks();
        substitute(dfa, target, tracks, |l| {
            Ok((0..self.ell)
                .map(|k| Letter(l.0.iter().map(|c| c.map(|s| self.images[s as usize][k])).collect()))
                .collect())
        })
    }
}

/// Every integer whose binary word has length at most `n`.
pub fn binary_range_upto(n: usize) -> std::ops::RangeInclusive<i64> {
    if n < 2 {
        return std::ops::RangeInclusive::new(1, 0);
    }
    let m = (1i64 << (n - 1).min(62)) - 1;
    -m..=m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::enumerate_upto;

    fn b(z: i64) -> Vec<Sym> {
        encode_binary_syms(&BigInt::from(z))
    }

    #[test]
    fn binary_examples() {
        assert_eq!(encode_binary(&BigInt::from(0)), "+0");
        assert_eq!(encode_binary(&BigInt::from(5)), "+101");
        assert_eq!(encode_binary(&BigInt::from(-3)), "-11");
        for bad in ["+10", "-0", "0", "+", "", "+1-"] {
            assert!(decode_binary(bad).is_err(), "{bad}");
        }
        for z in -1030..1030 {
            assert_eq!(decode_binary(&encode_binary(&BigInt::from(z))).unwrap(), BigInt::from(z));
        }
    }

    #[test]
    fn unary_examples() {
        assert_eq!(encode_unary(&BigInt::from(0)), "");
        assert_eq!(encode_unary(&BigInt::from(3)), "PPP");
        assert_eq!(encode_unary(&BigInt::from(-2)), "NN");
        assert_eq!(decode_unary("NN").unwrap(), BigInt::from(-2));
        assert!(decode_unary("PN").is_err());
    }

    #[test]
    fn domain_is_canonical_words() {
        let d = binary_domain(1).unwrap();
        let words: Vec<Vec<Sym>> = enumerate_upto(&d, 6).map(|w| w.iter().map(|l| l.0[0].unwrap()).collect()).collect();
        let mut expect: Vec<Vec<Sym>> = binary_range_upto(6).map(b).collect();
        expect.sort_by(|x, y| x.len().cmp(&y.len()).then(x.cmp(y)));
        assert_eq!(words, expect);
        assert_eq!(words.len(), (-31..=31).count());
    }

    #[test]
    fn successor_small() {
        let s = successor_automaton();
        assert!(s.accepts_tuple(&[&b(0), &b(1)]));
        assert!(s.accepts_tuple(&[&b(-1), &b(0)]));
        for x in -64..=64 {
            for y in -64..=64 {
                assert_eq!(s.accepts_tuple(&[&b(x), &b(y)]), y == x + 1, "{x} {y}");
            }
        }
    }

    #[test]
    fn linear_map_examples() {
        let t = linear_map_automaton(&[vec![1, 0], vec![1, 1]]).unwrap();
        assert!(t.accepts_tuple(&[&b(3), &b(4), &b(3), &b(7)]));
        assert!(!t.accepts_tuple(&[&b(3), &b(4), &b(3), &b(8)]));
        let p1 = linear_map_automaton(&[vec![1, 0], vec![0, 0]]).unwrap();
        assert!(p1.accepts_tuple(&[&b(3), &b(4), &b(3), &b(0)]));
        let id = linear_map_automaton(&[vec![1]]).unwrap();
        let eq = binary_domain(1).unwrap().diagonal().unwrap();
        assert!(id.equivalent(&eq).unwrap());
    }

    #[test]
    fn tuple_alphabet_names() {
        let ta = TupleAlphabet::new(binary_alphabet(), 2, &["P", "N"]).unwrap();
        assert_eq!(ta.alphabet().len(), 2 + 24);
        let w = ta.convolve(&[b(1), b(0)]).unwrap();
        assert_eq!(ta.alphabet().render(&w), "++10");
        let w = ta.convolve(&[b(5), b(0)]).unwrap();
        assert_eq!(w.iter().map(|&s| ta.alphabet().name(s)).collect::<Vec<_>>(), vec!["++", "10", "0_", "1_"]);
        assert_eq!(ta.deconvolve(&w).unwrap(), vec![b(5), b(0)]);
        let one = TupleAlphabet::new(binary_alphabet(), 1, &[]).unwrap();
        assert_eq!(one.alphabet().symbols(), &BINARY_SYMBOLS.map(String::from));
    }

    #[test]
    fn block_map_default() {
        let bm = BlockMap::default_for(4, 2).unwrap();
        assert_eq!(bm.block_len(), 2);
        assert_eq!(bm.apply(&[0, 3]), vec![0, 0, 1, 1]);
        assert_eq!(bm.invert(&[1, 0]).unwrap(), vec![2]);
        assert_eq!(BlockMap::default_for(7, 4).unwrap().block_len(), 2);
        assert_eq!(BlockMap::default_for(4, 4).unwrap().block_len(), 1);
        assert!(BlockMap::new(vec![vec![0], vec![0]], 2).is_err());
        assert!(BlockMap::new(vec![vec![0], vec![0, 1]], 2).is_err());
    }
}
