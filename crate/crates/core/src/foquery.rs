//! First-order queries over FA-recognizable relations, compiled to automata:
//! atoms are cylindrified to the formula's variables, connectives become
//! products, negation is taken relative to the domain, and `∃` projects.
//!
//! Also builds the endomorphism relations of `H = ⟨s, q⟩ ≤ ℋ₃` for the
//! semidirect representation and materializes the formula that defines
//! addition on `⟨s⟩` from them.

use std::collections::HashMap;
use std::fmt;

use crate::automata::{combine, finite_language, join, permute_tracks, select_tracks, CombineMode, Dfa};
use crate::encodings::{linear_map_automaton, TupleAlphabet};
use crate::groups::Element;
use crate::representations::{heisenberg_matrix, CayleyRep, RepSpec};
use crate::{Error, Result};

/// A relation over named variables; every accepted tuple consists of domain
/// words.
#[derive(Clone, Debug)]
pub struct RelAutomaton {
    pub automaton: Dfa,
    pub vars: Vec<String>,
    pub domain: Dfa,
}

impl RelAutomaton {
    /// Whether the tuple, given in `vars` order, is accepted.
    pub fn holds(&self, words: &[&[u16]]) -> bool {
        self.automaton.accepts_tuple(words)
    }

    /// The same relation with tracks in the order of `vars`.
    pub fn reorder(&self, vars: &[&str]) -> Result<RelAutomaton> {
        let perm: Vec<usize> = vars
            .iter()
            .map(|v| self.vars.iter().position(|w| w == v).ok_or_else(|| Error::arg(format!("no variable `{v}`"))))
            .collect::<Result<_>>()?;
        if perm.len() != self.vars.len() {
            return Err(Error::arg("reordering must list every variable once"));
        }
        Ok(RelAutomaton {
            automaton: permute_tracks(&self.automaton, &perm)?,
            vars: vars.iter().map(|v| v.to_string()).collect(),
            domain: self.domain.clone(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    Atom(String, Vec<String>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Not(Box<Formula>),
    Exists(Vec<String>, Box<Formula>),
}

impl Formula {
    pub fn parse(text: &str) -> Result<Formula> {
        let tokens = tokenize(text)?;
        let mut p = Parser { tokens, pos: 0 };
        let f = p.disjunction()?;
        if p.pos != p.tokens.len() {
            return Err(Error::Parse(format!("unexpected `{}`", p.tokens[p.pos])));
        }
        Ok(f)
    }

    /// Free variables in order of first appearance.
    pub fn free_vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut Vec<String>) {
        match self {
            Formula::Atom(_, vs) => {
                for v in vs {
                    if !bound.contains(v) && !out.contains(v) {
                        out.push(v.clone());
                    }
                }
            }
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Not(a) => a.collect_free(bound, out),
            Formula::Exists(vs, a) => {
                let depth = bound.len();
                bound.extend(vs.iter().cloned());
                a.collect_free(bound, out);
                bound.truncate(depth);
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom(r, vs) => write!(f, "{r}({})", vs.join(",")),
            Formula::And(a, b) => write!(f, "({a} & {b})"),
            Formula::Or(a, b) => write!(f, "({a} | {b})"),
            Formula::Not(a) => write!(f, "!{a}"),
            Formula::Exists(vs, a) => write!(f, "exists {} {a}", vs.join(",")),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if "(),&|!~{}".contains(c) {
            out.push(match c {
                '{' => "(".to_string(),
                '}' => ")".to_string(),
                '~' => "!".to_string(),
                c => c.to_string(),
            });
            chars.next();
        } else if c.is_alphanumeric() || c == '_' {
            let mut id = String::new();
            while let Some(&d) = chars.peek() {
                if d.is_alphanumeric() || d == '_' || d == '\'' {
                    id.push(d);
                    chars.next();
                } else {
                    break;
                }
            }
            out.push(id);
        } else {
            return Err(Error::Parse(format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<String>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&str> {
        self.tokens.get(self.pos).map(String::as_str)
    }

    fn expect(&mut self, t: &str) -> Result<()> {
        match self.peek() {
            Some(x) if x == t => {
                self.pos += 1;
                Ok(())
            }
            Some(x) => Err(Error::Parse(format!("expected `{t}`, found `{x}`"))),
            None => Err(Error::Parse(format!("expected `{t}` at end of input"))),
        }
    }

    fn ident(&mut self) -> Result<String> {
        match self.peek() {
            Some(x) if x.chars().next().is_some_and(|c| c.is_alphanumeric() || c == '_') => {
                self.pos += 1;
                Ok(self.tokens[self.pos - 1].clone())
            }
            Some(x) => Err(Error::Parse(format!("expected a name, found `{x}`"))),
            None => Err(Error::Parse("expected a name at end of input".into())),
        }
    }

    fn names(&mut self) -> Result<Vec<String>> {
        let mut v = vec![self.ident()?];
        while self.peek() == Some(",") {
            self.pos += 1;
            v.push(self.ident()?);
        }
        Ok(v)
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut f = self.conjunction()?;
        while matches!(self.peek(), Some("|") | Some("or")) {
            self.pos += 1;
            f = Formula::Or(Box::new(f), Box::new(self.conjunction()?));
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut f = self.unary()?;
        while matches!(self.peek(), Some("&") | Some("and")) {
            self.pos += 1;
            f = Formula::And(Box::new(f), Box::new(self.unary()?));
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula> {
        match self.peek() {
            Some("!") | Some("not") => {
                self.pos += 1;
                Ok(Formula::Not(Box::new(self.unary()?)))
            }
            Some("exists") => {
                self.pos += 1;
                let vs = self.names()?;
                Ok(Formula::Exists(vs, Box::new(self.unary()?)))
            }
            Some("forall") => {
                self.pos += 1;
                let vs = self.names()?;
                let body = self.unary()?;
                Ok(Formula::Not(Box::new(Formula::Exists(vs, Box::new(Formula::Not(Box::new(body)))))))
            }
            Some("(") => {
                self.pos += 1;
                let f = self.disjunction()?;
                self.expect(")")?;
                Ok(f)
            }
            _ => {
                let r = self.ident()?;
                self.expect("(")?;
                let vs = self.names()?;
                self.expect(")")?;
                Ok(Formula::Atom(r, vs))
            }
        }
    }
}

/// `D^k`: the convolutions of `k`-tuples of domain words.
fn domain_power(domain: &Dfa, vars: &[String]) -> Result<Dfa> {
    let mut acc = domain.clone();
    for i in 1..vars.len() {
        acc = join(&acc, &vars[..i], domain, &vars[i..=i])?.0;
    }
    Ok(acc)
}

/// Adds the variables of `extra` missing from `r`, each ranging over the domain.
fn cylindrify(r: &Dfa, vars: &[String], extra: &[String], domain: &Dfa) -> Result<(Dfa, Vec<String>)> {
    let mut acc = (r.clone(), vars.to_vec());
    for v in extra {
        if !acc.1.contains(v) {
            acc = join(&acc.0, &acc.1, domain, std::slice::from_ref(v))?;
        }
    }
    Ok(acc)
}

/// Compiles `phi` to the relation of its satisfying assignments within the
/// domain. Tracks follow the free variables' order of first appearance.
/// Sentences have no tracks to carry them; use [`decide_sentence`].
pub fn eval_formula(phi: &Formula, env: &HashMap<String, Dfa>, domain: &Dfa) -> Result<RelAutomaton> {
    check_domain(domain)?;
    let order = phi.free_vars();
    if order.is_empty() {
        return Err(Error::Unsupported("formula is a sentence; decide it instead of compiling a relation".into()));
    }
    let Compiled::Rel(automaton, vars) = compile(phi, env, domain)? else {
        unreachable!("free variables yield tracks")
    };
    let perm: Vec<usize> = order.iter().map(|v| vars.iter().position(|w| w == v).expect("free variable")).collect();
    Ok(RelAutomaton { automaton: permute_tracks(&automaton, &perm)?, vars: order, domain: domain.clone() })
}

/// Truth of a formula without free variables over the domain.
pub fn decide_sentence(phi: &Formula, env: &HashMap<String, Dfa>, domain: &Dfa) -> Result<bool> {
    check_domain(domain)?;
    if !phi.free_vars().is_empty() {
        return Err(Error::arg(format!("not a sentence: free variables {}", phi.free_vars().join(", "))));
    }
    match compile(phi, env, domain)? {
        Compiled::Truth(b) => Ok(b),
        Compiled::Rel(..) => unreachable!("sentences have no tracks"),
    }
}

fn check_domain(domain: &Dfa) -> Result<()> {
    if domain.tracks() != 1 {
        return Err(Error::arg("the domain must be a one-track language"));
    }
    Ok(())
}

/// A compiled subformula: a relation over named tracks, or the truth value
/// of a closed subformula.
enum Compiled {
    Rel(Dfa, Vec<String>),
    Truth(bool),
}

fn compile(phi: &Formula, env: &HashMap<String, Dfa>, domain: &Dfa) -> Result<Compiled> {
    let all = |vars: Vec<String>| -> Result<Compiled> { Ok(Compiled::Rel(domain_power(domain, &vars)?, vars)) };
    let none = |vars: Vec<String>| Compiled::Rel(Dfa::empty(domain.alphabet().clone(), vars.len()), vars);
    match phi {
        Formula::Atom(name, args) => {
            let rel = env.get(name).ok_or_else(|| Error::UnboundRelation(name.clone()))?;
            if rel.tracks() != args.len() {
                return Err(Error::ArityMismatch { name: name.clone(), expected: rel.tracks(), got: args.len() });
            }
            // repeated arguments become fresh names tied by an equality
            let mut names: Vec<String> = Vec::new();
            let mut ties: Vec<(String, String)> = Vec::new();
            for (i, a) in args.iter().enumerate() {
                if names.contains(a) {
                    let fresh = format!("{a}#{i}");
                    ties.push((a.clone(), fresh.clone()));
                    names.push(fresh);
                } else {
                    names.push(a.clone());
                }
            }
            let mut acc = (rel.clone(), names.clone());
            for v in &names {
                acc = join(&acc.0, &acc.1, domain, std::slice::from_ref(v))?;
            }
            for (a, fresh) in &ties {
                acc = join(&acc.0, &acc.1, &domain.diagonal()?, &[a.clone(), fresh.clone()])?;
                let keep: Vec<usize> = (0..acc.1.len()).filter(|&i| acc.1[i] != *fresh).collect();
                acc = (select_tracks(&acc.0, &keep)?, keep.iter().map(|&i| acc.1[i].clone()).collect());
            }
            Ok(Compiled::Rel(acc.0, acc.1))
        }
        Formula::And(a, b) => Ok(match (compile(a, env, domain)?, compile(b, env, domain)?) {
            (Compiled::Truth(x), Compiled::Truth(y)) => Compiled::Truth(x && y),
            (Compiled::Truth(true), r) | (r, Compiled::Truth(true)) => r,
            (Compiled::Truth(false), Compiled::Rel(_, v)) | (Compiled::Rel(_, v), Compiled::Truth(false)) => none(v),
            (Compiled::Rel(da, va), Compiled::Rel(db, vb)) => {
                let (d, v) = join(&da, &va, &db, &vb)?;
                Compiled::Rel(d, v)
            }
        }),
        Formula::Or(a, b) => match (compile(a, env, domain)?, compile(b, env, domain)?) {
            (Compiled::Truth(x), Compiled::Truth(y)) => Ok(Compiled::Truth(x || y)),
            (Compiled::Truth(false), r) | (r, Compiled::Truth(false)) => Ok(r),
            (Compiled::Truth(true), Compiled::Rel(_, v)) | (Compiled::Rel(_, v), Compiled::Truth(true)) => all(v),
            (Compiled::Rel(da, va), Compiled::Rel(db, vb)) => {
                let (da, va) = cylindrify(&da, &va, &vb, domain)?;
                let (db, vb) = cylindrify(&db, &vb, &va, domain)?;
                let perm: Vec<usize> = va.iter().map(|v| vb.iter().position(|w| w == v).expect("same variables")).collect();
                Ok(Compiled::Rel(combine(&da, &permute_tracks(&db, &perm)?, CombineMode::Union)?, va))
            }
        },
        Formula::Not(a) => match compile(a, env, domain)? {
            Compiled::Truth(x) => Ok(Compiled::Truth(!x)),
            Compiled::Rel(da, va) => Ok(Compiled::Rel(combine(&domain_power(domain, &va)?, &da, CombineMode::Difference)?, va)),
        },
        Formula::Exists(qs, body) => {
            let (mut d, mut vs) = match compile(body, env, domain)? {
                // a vacuous quantifier: true iff the body holds and the domain is inhabited
                Compiled::Truth(x) => return Ok(Compiled::Truth(x && !domain.is_empty())),
                Compiled::Rel(d, vs) => (d, vs),
            };
            for q in qs {
                let Some(i) = vs.iter().position(|v| v == q) else {
                    if domain.is_empty() {
                        return Ok(none(vs));
                    }
                    continue;
                };
                if vs.len() == 1 {
                    return Ok(Compiled::Truth(!d.is_empty()));
                }
                let keep: Vec<usize> = (0..vs.len()).filter(|&k| k != i).collect();
                d = select_tracks(&d, &keep)?;
                vs.remove(i);
            }
            Ok(Compiled::Rel(d, vs))
        }
    }
}

/// The relations `R₀, R₁, R₂`, the identity word `w₀` and the languages
/// `L_H, L_{H₁}, L_{H₂}` for the semidirect representation of `ℋ₃`, where
/// `H = ⟨s, q⟩` is encoded by the words with an empty unary prefix.
#[derive(Clone, Debug)]
pub struct HeisenbergRelations {
    /// `L_H ◁ T`: `(x, z) ↦ (x, x + z)`
    pub r0: Dfa,
    /// `L_H ◁ P₁`: `(x, z) ↦ (x, 0)`
    pub r1: Dfa,
    /// `L_H ◁ P₂`: `(x, z) ↦ (0, z)`
    pub r2: Dfa,
    pub w0: Vec<u16>,
    pub l_h: Dfa,
    pub l_h1: Dfa,
    pub l_h2: Dfa,
}

impl HeisenbergRelations {
    pub fn env(&self) -> HashMap<String, Dfa> {
        HashMap::from([
            ("R0".to_string(), self.r0.clone()),
            ("R1".to_string(), self.r1.clone()),
            ("R2".to_string(), self.r2.clone()),
            ("W0".to_string(), finite_language(self.l_h.alphabet().clone(), std::slice::from_ref(&self.w0))),
            ("LH".to_string(), self.l_h.clone()),
            ("LH1".to_string(), self.l_h1.clone()),
            ("LH2".to_string(), self.l_h2.clone()),
        ])
    }
}

pub fn build_heisenberg_relations(rep: &CayleyRep) -> Result<HeisenbergRelations> {
    let is_semidirect_t = matches!(rep.spec(), RepSpec::Semidirect { a } if *a == heisenberg_matrix());
    if !is_semidirect_t && !matches!(rep.spec(), RepSpec::Heisenberg {}) {
        return Err(Error::FamilyMismatch(format!("`{}` is not the semidirect representation of ℋ₃", rep.name())));
    }
    let tuples = TupleAlphabet::new(crate::encodings::binary_alphabet(), 2, &["P", "N"])?;
    if tuples.alphabet() != rep.alphabet() {
        return Err(Error::AlphabetMismatch("unexpected alphabet for the semidirect representation".into()));
    }
    let map = |m: Vec<Vec<i64>>| -> Result<Dfa> { tuples.group(&linear_map_automaton(&m)?) };
    let l_h = tuples.group(&crate::encodings::binary_domain(2)?)?;
    let restrict = |r: Dfa| -> Result<Dfa> { Ok(join(&r, &[0, 1], &l_h, &[0])?.0) };
    let r0 = restrict(map(heisenberg_matrix())?)?;
    let r1 = restrict(map(vec![vec![1, 0], vec![0, 0]])?)?;
    let r2 = restrict(map(vec![vec![0, 0], vec![0, 1]])?)?;
    let l_h1 = select_tracks(&r1, &[1])?;
    let l_h2 = select_tracks(&r2, &[1])?;
    let w0 = rep.encode(&rep.group().identity())?;
    Ok(HeisenbergRelations { r0, r1, r2, w0, l_h, l_h1, l_h2 })
}

/// The addition formula over `R₀, R₁, R₂`; the constant `w₀` is the variable
/// `w` bound by the one-word relation `W0`.
pub const ETA: &str = "exists r,s1,s2,t1,t2,t3,w (R1(r,a) & (R0(b,s1) & R2(s1,s2) & R2(r,s2)) \
                       & (R0(r,t1) & R2(t1,t2)) & (R2(c,w) & W0(w) & R0(c,t3) & R2(t3,t2)))";

/// The relation `{(a, b, c) : a, b ∈ L_{H₁}, η(a, b, c)}` over tracks
/// `(a, b, c)`; it coincides with addition on `⟨s⟩`.
pub fn eta_addition(rel: &HeisenbergRelations) -> Result<RelAutomaton> {
    let phi = Formula::parse(&format!("({ETA}) & LH1(a) & LH1(b)"))?;
    eval_formula(&phi, &rel.env(), &rel.l_h)?.reorder(&["a", "b", "c"])
}

/// Word for `s^k` in the representation, for queries against [`eta_addition`].
pub fn encode_s_power(rep: &CayleyRep, k: i64) -> Result<Vec<u16>> {
    let g = rep.group();
    let s = g.generator(0).clone();
    let e = crate::measurement::power(g, &s, k.unsigned_abs());
    let e: Element = if k < 0 { g.inverse(&e) } else { e };
    rep.encode(&e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::Alphabet;

    fn ab() -> std::sync::Arc<Alphabet> {
        Alphabet::new(["a", "b"]).unwrap()
    }

    #[test]
    fn parse_round_trip() {
        let f = Formula::parse("exists y (R(x,y) & !S(y)) | T(x)").unwrap();
        assert_eq!(f.free_vars(), vec!["x"]);
        assert_eq!(Formula::parse(&f.to_string()).unwrap(), f);
        assert!(Formula::parse("R(x").is_err());
        assert!(Formula::parse("R(x) &").is_err());
        let g = Formula::parse("forall y R(x,y)").unwrap();
        assert!(matches!(g, Formula::Not(_)));
    }

    #[test]
    fn trivial_compilations() {
        let al = ab();
        let dom = finite_language(al.clone(), &[vec![0], vec![1], vec![0, 1]]);
        let r = Dfa::from_parts(al.clone(), 2, 2, 0, &[1], [(0, crate::automata::Letter::from_slice(&[Some(0), Some(1)]), 1)]).unwrap();
        let env = HashMap::from([("R".to_string(), r.clone()), ("Eq".to_string(), dom.diagonal().unwrap())]);
        let atom = eval_formula(&Formula::parse("R(x,y)").unwrap(), &env, &dom).unwrap();
        assert!(atom.automaton.equivalent(&r).unwrap());
        let ex = eval_formula(&Formula::parse("exists y Eq(x,y)").unwrap(), &env, &dom).unwrap();
        assert!(ex.automaton.equivalent(&dom).unwrap());
        let neg = eval_formula(&Formula::parse("!(Eq(x,x) & !Eq(x,x))").unwrap(), &env, &dom).unwrap();
        assert!(neg.automaton.equivalent(&dom).unwrap());
        let swapped = eval_formula(&Formula::parse("R(y,x)").unwrap(), &env, &dom).unwrap();
        assert_eq!(swapped.vars, vec!["y", "x"]);
        assert!(matches!(eval_formula(&Formula::parse("Q(x)").unwrap(), &env, &dom), Err(Error::UnboundRelation(_))));
        assert!(matches!(eval_formula(&Formula::parse("R(x)").unwrap(), &env, &dom), Err(Error::ArityMismatch { .. })));
    }

    #[test]
    fn closed_subformulas() {
        let al = ab();
        let dom = finite_language(al.clone(), &[vec![0], vec![1], vec![0, 1]]);
        let r = Dfa::from_parts(al.clone(), 2, 2, 0, &[1], [(0, crate::automata::Letter::from_slice(&[Some(0), Some(1)]), 1)]).unwrap();
        let env = HashMap::from([("R".to_string(), r.clone()), ("Eq".to_string(), dom.diagonal().unwrap())]);
        let decide = |t: &str| decide_sentence(&Formula::parse(t).unwrap(), &env, &dom).unwrap();
        assert!(decide("exists x,y R(x,y)"));
        assert!(!decide("exists x R(x,x)"));
        assert!(decide("forall x Eq(x,x)"));
        assert!(!decide("forall x exists y R(x,y)"));
        let eval = |t: &str| eval_formula(&Formula::parse(t).unwrap(), &env, &dom).unwrap().automaton;
        assert!(eval("Eq(x,x) & exists y,z R(y,z)").equivalent(&dom).unwrap());
        assert!(eval("Eq(x,x) & exists y R(y,y)").is_empty());
        assert!(eval("Eq(x,x) | exists y R(y,y)").equivalent(&dom).unwrap());
        assert!(eval("Eq(x,x) | !exists y R(y,y)").equivalent(&dom).unwrap());
        assert!(matches!(eval_formula(&Formula::parse("exists x Eq(x,x)").unwrap(), &env, &dom), Err(Error::Unsupported(_))));
    }

    #[test]
    fn relations_follow_the_matrices() {
        let rep = RepSpec::Heisenberg {}.build().unwrap();
        let rel = build_heisenberg_relations(&rep).unwrap();
        let tuples = TupleAlphabet::new(crate::encodings::binary_alphabet(), 2, &["P", "N"]).unwrap();
        let h = |x: i64, z: i64| {
            tuples
                .convolve(&[crate::encodings::encode_binary_syms(&x.into()), crate::encodings::encode_binary_syms(&z.into())])
                .unwrap()
        };
        assert!(rel.r0.accepts_tuple(&[&h(3, 4), &h(3, 7)]));
        assert!(!rel.r0.accepts_tuple(&[&h(3, 4), &h(3, 4)]));
        assert!(rel.r2.accepts_tuple(&[&h(5, 2), &h(0, 2)]));
        assert!(rel.r1.accepts_tuple(&[&h(5, 2), &h(5, 0)]));
        assert_eq!(rep.decode(&rel.w0).unwrap(), rep.group().identity());
        assert!(rel.l_h1.accepts_syms(&h(-6, 0)) && !rel.l_h1.accepts_syms(&h(-6, 1)));
        assert!(build_heisenberg_relations(&RepSpec::from_name("lamplighter").unwrap().build().unwrap()).is_err());
    }
}
