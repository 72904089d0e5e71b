//! Exact arithmetic for the supported group families.
//!
//! Every group carries an ordered generating list `A`; words are sequences of
//! [`GenLetter`]s over `S = A ∪ A⁻¹`. Elements are canonical values, so
//! equality and hashing on [`Element`] are equality in the group.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub type Matrix = Vec<Vec<BigInt>>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    /// ℤⁿ vectors, Heisenberg triples `(x, y, z)` and unitriangular entries
    /// `m_12, m_13, …, m_1n, m_23, …` (row-major above the diagonal).
    Vector(Vec<BigInt>),
    /// `(y, z̄)` in `ℤⁿ ⋊_A ℤ`.
    Semidirect { y: BigInt, z: Vec<BigInt> },
    /// Lamplighter: finite set of lit lamps and the cursor.
    Lamp { lamps: BTreeSet<BigInt>, cursor: BigInt },
    Pair(Box<Element>, Box<Element>),
    /// Alternating syllables `(factor, nonidentity element)`.
    Free(Vec<(u8, Element)>),
    /// `h · k_coset` in a finite extension.
    Coset { base: Box<Element>, coset: usize },
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list<T: fmt::Display>(f: &mut fmt::Formatter<'_>, v: impl IntoIterator<Item = T>) -> fmt::Result {
            for (i, x) in v.into_iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
            }
            Ok(())
        }
        match self {
            Element::Vector(v) => {
                write!(f, "(")?;
                list(f, v)?;
                write!(f, ")")
            }
            Element::Semidirect { y, z } => {
                write!(f, "({y};")?;
                list(f, z)?;
                write!(f, ")")
            }
            Element::Lamp { lamps, cursor } => {
                write!(f, "({{")?;
                list(f, lamps)?;
                write!(f, "}};{cursor})")
            }
            Element::Pair(a, b) => write!(f, "<{a}|{b}>"),
            Element::Free(s) => {
                write!(f, "[")?;
                list(f, s.iter().map(|(k, e)| format!("{k}:{e}")))?;
                write!(f, "]")
            }
            Element::Coset { base, coset } => write!(f, "{base}*k{coset}"),
        }
    }
}

/// A letter of `S`: generator index and orientation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GenLetter {
    pub generator: usize,
    pub inverse: bool,
}

impl GenLetter {
    pub fn new(generator: usize, inverse: bool) -> GenLetter {
        GenLetter { generator, inverse }
    }

    pub fn inv(self) -> GenLetter {
        GenLetter { inverse: !self.inverse, ..self }
    }
}

/// Data defining a finite extension `G ⊇ H` with `[G:H] = m`: representatives
/// `k_0 = e, k_1, …` given as words over `G`'s generators, and for every
/// coset `i` and generator `g` of `G` the rewrite `k_i · g = h · k_j`.
#[derive(Clone, Debug)]
pub struct CosetSystem {
    pub base: Arc<Group>,
    /// generators of `G`; the first ones are `H`'s generators
    pub names: Vec<String>,
    pub representatives: Vec<Vec<GenLetter>>,
    /// `table[i][g] = (h, j)`
    pub table: Vec<Vec<(Element, usize)>>,
    inverse_table: Vec<Vec<(Element, usize)>>,
}

impl CosetSystem {
    pub fn new(
        base: Arc<Group>,
        extra_generators: &[&str],
        representatives: Vec<Vec<GenLetter>>,
        table: Vec<Vec<(Element, usize)>>,
    ) -> Result<CosetSystem> {
        let m = representatives.len();
        let mut names: Vec<String> = base.gens.iter().map(|g| g.0.clone()).collect();
        names.extend(extra_generators.iter().map(|s| s.to_string()));
        let k = names.len();
        if m == 0 || table.len() != m || table.iter().any(|r| r.len() != k) {
            return Err(Error::InconsistentCosets("table must have one row per coset and one entry per generator".into()));
        }
        if !representatives[0].is_empty() {
            return Err(Error::InconsistentCosets("the first representative must be the identity".into()));
        }
        let mut inverse_table = vec![vec![(base.identity(), 0); k]; m];
        for g in 0..k {
            let mut hit = vec![false; m];
            for (i, row) in table.iter().enumerate() {
                let (h, j) = &row[g];
                if *j >= m || std::mem::replace(&mut hit[*j], true) {
                    return Err(Error::InconsistentCosets(format!("generator {} does not permute the cosets", names[g])));
                }
                // k_i g = h k_j  =>  k_j g⁻¹ = h⁻¹ k_i
                inverse_table[*j][g] = (base.inverse(h), i);
            }
        }
        for (a, _) in base.gens.iter().enumerate() {
            if table[0][a] != (base.gens[a].1.clone(), 0) {
                return Err(Error::InconsistentCosets(format!("subgroup generator {} must fix the trivial coset", names[a])));
            }
        }
        let sys = CosetSystem { base, names, representatives, table, inverse_table };
        for (j, w) in sys.representatives.iter().enumerate() {
            let mut e = (sys.base.identity(), 0usize);
            for l in w {
                if l.generator >= k {
                    return Err(Error::InconsistentCosets("representative uses an unknown generator".into()));
                }
                e = sys.step(&e.0, e.1, *l);
            }
            if e != (sys.base.identity(), j) {
                return Err(Error::InconsistentCosets(format!("representative {j} does not evaluate to its coset")));
            }
        }
        Ok(sys)
    }

    fn step(&self, h: &Element, coset: usize, l: GenLetter) -> (Element, usize) {
        let (c, j) = if l.inverse { &self.inverse_table[coset][l.generator] } else { &self.table[coset][l.generator] };
        (self.base.multiply(h, c), *j)
    }

    /// The infinite dihedral group as `ℤ` extended by a flip `r`:
    /// `k_1 = r`, `r a = a⁻¹ r`.
    pub fn infinite_dihedral() -> CosetSystem {
        let z = Arc::new(Group::abelian_named(&["a"]));
        let a = z.gens[0].1.clone();
        let a_inv = z.inverse(&a);
        let e = z.identity();
        let table = vec![vec![(a, 0), (e.clone(), 1)], vec![(a_inv, 1), (e, 0)]];
        CosetSystem::new(z, &["r"], vec![vec![], vec![GenLetter::new(1, false)]], table).expect("consistent table")
    }
}

#[derive(Clone, Debug)]
pub enum Family {
    Abelian { n: usize },
    Heisenberg,
    Semidirect { n: usize, a: Matrix, a_inv: Matrix },
    Unitriangular { n: usize },
    Lamplighter,
    Direct(Arc<Group>, Arc<Group>),
    Free(Arc<Group>, Arc<Group>),
    Extension(Arc<CosetSystem>),
}

impl Family {
    pub fn tag(&self) -> &'static str {
        match self {
            Family::Abelian { .. } => "abelian",
            Family::Heisenberg => "heisenberg",
            Family::Semidirect { .. } => "semidirect",
            Family::Unitriangular { .. } => "unitriangular",
            Family::Lamplighter => "lamplighter",
            Family::Direct(..) => "direct",
            Family::Free(..) => "free",
            Family::Extension(..) => "extension",
        }
    }
}

/// A finitely generated group with an ordered generating list.
#[derive(Clone, Debug)]
pub struct Group {
    family: Family,
    gens: Vec<(String, Element)>,
    spec: GroupSpec,
}

fn big(v: i64) -> BigInt {
    BigInt::from(v)
}

fn identity_matrix(n: usize) -> Matrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| &a[i][k] * &b[k][j]).sum()).collect()).collect()
}

fn mat_vec(a: &Matrix, v: &[BigInt]) -> Vec<BigInt> {
    a.iter().map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

fn mat_pow(a: &Matrix, e: &BigInt) -> Matrix {
    let mut result = identity_matrix(a.len());
    let mut base = a.clone();
    let mut e = e.magnitude().clone();
    while !e.is_zero() {
        if e.bit(0) {
            result = mat_mul(&result, &base);
        }
        base = mat_mul(&base, &base);
        e >>= 1;
    }
    result
}

/// Determinant by fraction-free elimination (Bareiss).
fn determinant(a: &Matrix) -> BigInt {
    let n = a.len();
    let mut m = a.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Inverse of a unimodular matrix via the adjugate.
fn unimodular_inverse(a: &Matrix) -> Result<Matrix> {
    let n = a.len();
    let det = determinant(a);
    if det.abs() != BigInt::one() {
        return Err(Error::arg(format!("matrix is not unimodular (determinant {det})")));
    }
    if n == 1 {
        return Ok(vec![vec![det]]);
    }
    let minor = |r: usize, c: usize| -> Matrix {
        (0..n).filter(|&i| i != r).map(|i| (0..n).filter(|&j| j != c).map(|j| a[i][j].clone()).collect()).collect()
    };
    Ok((0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let cof = determinant(&minor(j, i));
                    let s = if (i + j) % 2 == 0 { cof } else { -cof };
                    s * &det
                })
                .collect()
        })
        .collect())
}

pub fn ut_index(n: usize, i: usize, j: usize) -> usize {
    // entries (i,j), 0 <= i < j < n, in row-major order
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// Generator names `x, y, z, w` for small ranks, `x1, x2, …` beyond.
fn abelian_names(n: usize) -> Vec<String> {
    if n <= 4 {
        ["x", "y", "z", "w"][..n].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=n).map(|i| format!("x{i}")).collect()
    }
}

/// Renames colliding names by appending primes until all are distinct.
pub fn disjoint_names(taken: &[String], names: &[String]) -> Vec<String> {
    let mut used: Vec<String> = taken.to_vec();
    names
        .iter()
        .map(|n| {
            let mut m = n.clone();
            while used.contains(&m) {
                m.push('\'');
            }
            used.push(m.clone());
            m
        })
        .collect()
}

impl Group {
    pub fn abelian(n: usize) -> Group {
        let names = abelian_names(n);
        Group::abelian_named(&names.iter().map(String::as_str).collect::<Vec<_>>())
    }

    fn abelian_named(names: &[&str]) -> Group {
        let n = names.len();
        let gens = (0..n)
            .map(|i| (names[i].to_string(), Element::Vector((0..n).map(|j| big(i64::from(i == j))).collect())))
            .collect();
        let names = (names != abelian_names(n)).then(|| names.iter().map(|s| s.to_string()).collect());
        Group { family: Family::Abelian { n }, gens, spec: GroupSpec::Abelian { n, names } }
    }

    /// Integer Heisenberg group with `s = (1,0,0)`, `p = (0,1,0)`, `q = (0,0,1)`
    /// and `(x,y,z)(x',y',z') = (x+x', y+y', z+z'+xy')`.
    pub fn heisenberg() -> Group {
        let v = |a, b, c| Element::Vector(vec![big(a), big(b), big(c)]);
        Group {
            family: Family::Heisenberg,
            gens: vec![("s".into(), v(1, 0, 0)), ("p".into(), v(0, 1, 0)), ("q".into(), v(0, 0, 1))],
            spec: GroupSpec::Heisenberg {},
        }
    }

    /// `ℤⁿ ⋊_A ℤ` with `(y,z̄)(y',z̄') = (y+y', A^{y'}z̄ + z̄')`; generators
    /// `z1…zn = (0, ē_i)` then `t = (1, 0̄)`.
    pub fn semidirect(a: Vec<Vec<i64>>) -> Result<Group> {
        let n = a.len();
        if n == 0 || a.iter().any(|r| r.len() != n) {
            return Err(Error::arg("semidirect product needs a square matrix"));
        }
        let spec = GroupSpec::Semidirect { n, a: a.clone() };
        let a: Matrix = a.into_iter().map(|r| r.into_iter().map(big).collect()).collect();
        let a_inv = unimodular_inverse(&a)?;
        let zero = || vec![BigInt::zero(); n];
        let mut gens: Vec<(String, Element)> = (0..n)
            .map(|i| {
                let mut z = zero();
                z[i] = BigInt::one();
                (format!("z{}", i + 1), Element::Semidirect { y: BigInt::zero(), z })
            })
            .collect();
        gens.push(("t".into(), Element::Semidirect { y: BigInt::one(), z: zero() }));
        Ok(Group { family: Family::Semidirect { n, a, a_inv }, gens, spec })
    }

    /// `UTₙ(ℤ)` generated by the elementary matrices `t_ij`, `i < j`, in
    /// coordinate order.
    pub fn unitriangular(n: usize) -> Result<Group> {
        if n < 2 {
            return Err(Error::arg("unitriangular groups need n >= 2"));
        }
        let dim = n * (n - 1) / 2;
        let mut gens = Vec::with_capacity(dim);
        for i in 0..n {
            for j in i + 1..n {
                let mut v = vec![BigInt::zero(); dim];
                v[ut_index(n, i, j)] = BigInt::one();
                gens.push((format!("t{}{}", i + 1, j + 1), Element::Vector(v)));
            }
        }
        Ok(Group { family: Family::Unitriangular { n }, gens, spec: GroupSpec::Unitriangular { n } })
    }

    /// `ℤ₂ ≀ ℤ` with `a` toggling the lamp at the cursor and `t` moving it right.
    pub fn lamplighter() -> Group {
        let a = Element::Lamp { lamps: BTreeSet::from([BigInt::zero()]), cursor: BigInt::zero() };
        let t = Element::Lamp { lamps: BTreeSet::new(), cursor: BigInt::one() };
        Group { family: Family::Lamplighter, gens: vec![("a".into(), a), ("t".into(), t)], spec: GroupSpec::Lamplighter {} }
    }

    pub fn direct_product(g1: Arc<Group>, g2: Arc<Group>) -> Group {
        let names1: Vec<String> = g1.gens.iter().map(|g| g.0.clone()).collect();
        let names2 = disjoint_names(&names1, &g2.gens.iter().map(|g| g.0.clone()).collect::<Vec<_>>());
        let mut gens: Vec<(String, Element)> = g1
            .gens
            .iter()
            .map(|(n, e)| (n.clone(), Element::Pair(Box::new(e.clone()), Box::new(g2.identity()))))
            .collect();
        gens.extend(
            g2.gens.iter().zip(names2).map(|((_, e), n)| (n, Element::Pair(Box::new(g1.identity()), Box::new(e.clone())))),
        );
        let spec = GroupSpec::Direct { factors: vec![g1.spec.clone(), g2.spec.clone()] };
        Group { family: Family::Direct(g1, g2), gens, spec }
    }

    pub fn free_product(g1: Arc<Group>, g2: Arc<Group>) -> Group {
        let names1: Vec<String> = g1.gens.iter().map(|g| g.0.clone()).collect();
        let names2 = disjoint_names(&names1, &g2.gens.iter().map(|g| g.0.clone()).collect::<Vec<_>>());
        let mut gens: Vec<(String, Element)> =
            g1.gens.iter().map(|(n, e)| (n.clone(), Element::Free(vec![(0, e.clone())]))).collect();
        gens.extend(g2.gens.iter().zip(names2).map(|((_, e), n)| (n, Element::Free(vec![(1, e.clone())]))));
        let spec = GroupSpec::Free { factors: vec![g1.spec.clone(), g2.spec.clone()] };
        Group { family: Family::Free(g1, g2), gens, spec }
    }

    pub fn finite_extension(system: CosetSystem) -> Group {
        let system = Arc::new(system);
        let gens = (0..system.names.len())
            .map(|g| {
                let (h, j) = system.step(&system.base.identity(), 0, GenLetter::new(g, false));
                (system.names[g].clone(), Element::Coset { base: Box::new(h), coset: j })
            })
            .collect();
        let spec = GroupSpec::Extension { system: CosetSpec::from_system(&system) };
        Group { family: Family::Extension(system), gens, spec }
    }

    pub fn infinite_dihedral() -> Group {
        Group::finite_extension(CosetSystem::infinite_dihedral())
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn generator_count(&self) -> usize {
        self.gens.len()
    }

    pub fn generator_name(&self, i: usize) -> &str {
        &self.gens[i].0
    }

    pub fn generator_names(&self) -> Vec<String> {
        self.gens.iter().map(|g| g.0.clone()).collect()
    }

    pub fn generator(&self, i: usize) -> &Element {
        &self.gens[i].1
    }

    /// `S` in declared order: `a_1, a_1⁻¹, a_2, a_2⁻¹, …`.
    pub fn letters(&self) -> Vec<GenLetter> {
        (0..self.gens.len()).flat_map(|g| [GenLetter::new(g, false), GenLetter::new(g, true)]).collect()
    }

    pub fn letter_name(&self, l: GenLetter) -> String {
        if l.inverse {
            format!("{}^-1", self.gens[l.generator].0)
        } else {
            self.gens[l.generator].0.clone()
        }
    }

    pub fn letter_element(&self, l: GenLetter) -> Element {
        let g = &self.gens[l.generator].1;
        if l.inverse {
            self.inverse(g)
        } else {
            g.clone()
        }
    }

    pub fn identity(&self) -> Element {
        match &self.family {
            Family::Abelian { n } => Element::Vector(vec![BigInt::zero(); *n]),
            Family::Heisenberg => Element::Vector(vec![BigInt::zero(); 3]),
            Family::Semidirect { n, .. } => Element::Semidirect { y: BigInt::zero(), z: vec![BigInt::zero(); *n] },
            Family::Unitriangular { n } => Element::Vector(vec![BigInt::zero(); n * (n - 1) / 2]),
            Family::Lamplighter => Element::Lamp { lamps: BTreeSet::new(), cursor: BigInt::zero() },
            Family::Direct(a, b) => Element::Pair(Box::new(a.identity()), Box::new(b.identity())),
            Family::Free(..) => Element::Free(Vec::new()),
            Family::Extension(s) => Element::Coset { base: Box::new(s.base.identity()), coset: 0 },
        }
    }

    /// Checks that `g` has this group's shape.
    pub fn check(&self, g: &Element) -> Result<()> {
        let ok = match (&self.family, g) {
            (Family::Abelian { n }, Element::Vector(v)) => v.len() == *n,
            (Family::Heisenberg, Element::Vector(v)) => v.len() == 3,
            (Family::Unitriangular { n }, Element::Vector(v)) => v.len() == n * (n - 1) / 2,
            (Family::Semidirect { n, .. }, Element::Semidirect { z, .. }) => z.len() == *n,
            (Family::Lamplighter, Element::Lamp { .. }) => true,
            (Family::Direct(a, b), Element::Pair(x, y)) => a.check(x).is_ok() && b.check(y).is_ok(),
            (Family::Free(a, b), Element::Free(s)) => {
                s.windows(2).all(|w| w[0].0 != w[1].0)
                    && s.iter().all(|(k, e)| {
                        let f = if *k == 0 { a } else { b };
                        *k < 2 && f.check(e).is_ok() && *e != f.identity()
                    })
            }
            (Family::Extension(s), Element::Coset { base, coset }) => {
                *coset < s.representatives.len() && s.base.check(base).is_ok()
            }
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::FamilyMismatch(format!("{g} is not an element of the {} group", self.family.tag())))
        }
    }

    pub fn try_multiply(&self, g: &Element, h: &Element) -> Result<Element> {
        self.check(g)?;
        self.check(h)?;
        Ok(self.multiply(g, h))
    }

    /// Group product. Both arguments must belong to this group.
    pub fn multiply(&self, g: &Element, h: &Element) -> Element {
        match (&self.family, g, h) {
            (Family::Abelian { .. }, Element::Vector(a), Element::Vector(b)) => {
                Element::Vector(a.iter().zip(b).map(|(x, y)| x + y).collect())
            }
            (Family::Heisenberg, Element::Vector(a), Element::Vector(b)) => {
                Element::Vector(vec![&a[0] + &b[0], &a[1] + &b[1], &a[2] + &b[2] + &a[0] * &b[1]])
            }
            (Family::Semidirect { a, a_inv, .. }, Element::Semidirect { y, z }, Element::Semidirect { y: y2, z: z2 }) => {
                let m = if y2.is_negative() { mat_pow(a_inv, y2) } else { mat_pow(a, y2) };
                let az = mat_vec(&m, z);
                Element::Semidirect { y: y + y2, z: az.into_iter().zip(z2).map(|(p, q)| p + q).collect() }
            }
            (Family::Unitriangular { n }, Element::Vector(a), Element::Vector(b)) => {
                let n = *n;
                let at = |v: &[BigInt], i: usize, j: usize| -> BigInt {
                    match i.cmp(&j) {
                        std::cmp::Ordering::Equal => BigInt::one(),
                        std::cmp::Ordering::Greater => BigInt::zero(),
                        std::cmp::Ordering::Less => v[ut_index(n, i, j)].clone(),
                    }
                };
                let mut out = vec![BigInt::zero(); a.len()];
                for i in 0..n {
                    for j in i + 1..n {
                        out[ut_index(n, i, j)] = (i..=j).map(|k| at(a, i, k) * at(b, k, j)).sum();
                    }
                }
                Element::Vector(out)
            }
            (Family::Lamplighter, Element::Lamp { lamps, cursor }, Element::Lamp { lamps: l2, cursor: c2 }) => {
                let mut out = lamps.clone();
                for p in l2 {
                    let q = p + cursor;
                    if !out.remove(&q) {
                        out.insert(q);
                    }
                }
                Element::Lamp { lamps: out, cursor: cursor + c2 }
            }
            (Family::Direct(a, b), Element::Pair(x1, y1), Element::Pair(x2, y2)) => {
                Element::Pair(Box::new(a.multiply(x1, x2)), Box::new(b.multiply(y1, y2)))
            }
            (Family::Free(a, b), Element::Free(s1), Element::Free(s2)) => {
                let mut out = s1.clone();
                for (k, e) in s2 {
                    let f = if *k == 0 { a } else { b };
                    match out.last_mut() {
                        Some((k0, e0)) if k0 == k => {
                            let m = f.multiply(e0, e);
                            if m == f.identity() {
                                out.pop();
                            } else {
                                *e0 = m;
                            }
                        }
                        _ => out.push((*k, e.clone())),
                    }
                }
                Element::Free(out)
            }
            (Family::Extension(sys), Element::Coset { base, coset }, _) => {
                let mut cur = ((**base).clone(), *coset);
                for l in self.word_for(h) {
                    cur = sys.step(&cur.0, cur.1, l);
                }
                Element::Coset { base: Box::new(cur.0), coset: cur.1 }
            }
            _ => panic!("multiply: element does not belong to the {} group", self.family.tag()),
        }
    }

    pub fn inverse(&self, g: &Element) -> Element {
        match (&self.family, g) {
            (Family::Abelian { .. }, Element::Vector(v)) => Element::Vector(v.iter().map(|x| -x).collect()),
            (Family::Heisenberg, Element::Vector(v)) => Element::Vector(vec![-&v[0], -&v[1], &v[0] * &v[1] - &v[2]]),
            (Family::Semidirect { a, a_inv, .. }, Element::Semidirect { y, z }) => {
                // (y,z)⁻¹ = (-y, -A^{-y} z)
                let m = if y.is_negative() { mat_pow(a, y) } else { mat_pow(a_inv, y) };
                Element::Semidirect { y: -y, z: mat_vec(&m, z).into_iter().map(|x| -x).collect() }
            }
            (Family::Unitriangular { n }, Element::Vector(m)) => {
                // back substitution for M X = I
                let n = *n;
                let mut x = vec![BigInt::zero(); m.len()];
                for j in 1..n {
                    for i in (0..j).rev() {
                        let mut acc = m[ut_index(n, i, j)].clone();
                        for k in i + 1..j {
                            acc += &m[ut_index(n, i, k)] * &x[ut_index(n, k, j)];
                        }
                        x[ut_index(n, i, j)] = -acc;
                    }
                }
                Element::Vector(x)
            }
            (Family::Extension(_), _) => {
                let w = self.word_for(g);
                self.evaluate(&w.iter().rev().map(|l| l.inv()).collect::<Vec<_>>())
            }
            (Family::Lamplighter, Element::Lamp { lamps, cursor }) => {
                Element::Lamp { lamps: lamps.iter().map(|p| p - cursor).collect(), cursor: -cursor }
            }
            (Family::Direct(a, b), Element::Pair(x, y)) => Element::Pair(Box::new(a.inverse(x)), Box::new(b.inverse(y))),
            (Family::Free(a, b), Element::Free(s)) => Element::Free(
                s.iter().rev().map(|(k, e)| (*k, if *k == 0 { a.inverse(e) } else { b.inverse(e) })).collect(),
            ),
            _ => panic!("inverse: element does not belong to the {} group", self.family.tag()),
        }
    }

    /// `π(w)`.
    pub fn evaluate(&self, w: &[GenLetter]) -> Element {
        let mut g = self.identity();
        for &l in w {
            g = self.multiply_letter(&g, l);
        }
        g
    }

    pub fn try_evaluate(&self, w: &[GenLetter]) -> Result<Element> {
        if let Some(l) = w.iter().find(|l| l.generator >= self.gens.len()) {
            return Err(Error::UnknownLetter(format!("generator index {}", l.generator)));
        }
        Ok(self.evaluate(w))
    }

    pub fn multiply_letter(&self, g: &Element, l: GenLetter) -> Element {
        match (&self.family, g) {
            (Family::Extension(sys), Element::Coset { base, coset }) => {
                let (h, j) = sys.step(base, *coset, l);
                Element::Coset { base: Box::new(h), coset: j }
            }
            _ => self.multiply(g, &self.letter_element(l)),
        }
    }

    /// A word `w` with `π(w) = g` (not necessarily geodesic).
    pub fn word_for(&self, g: &Element) -> Vec<GenLetter> {
        let power = |gen: usize, k: &BigInt| -> Vec<GenLetter> {
            let n = k.magnitude().to_usize().expect("exponent fits in memory");
            vec![GenLetter::new(gen, k.is_negative()); n]
        };
        match (&self.family, g) {
            (Family::Abelian { .. }, Element::Vector(v)) => v.iter().enumerate().flat_map(|(i, k)| power(i, k)).collect(),
            (Family::Heisenberg, Element::Vector(v)) => {
                // s^x p^y = (x, y, xy), then central q
                let mut w = power(0, &v[0]);
                w.extend(power(1, &v[1]));
                w.extend(power(2, &(&v[2] - &v[0] * &v[1])));
                w
            }
            (Family::Semidirect { n, .. }, Element::Semidirect { y, z }) => {
                // (y,0)(0,z) = (y,z)
                let mut w = power(*n, y);
                for (i, k) in z.iter().enumerate() {
                    w.extend(power(i, k));
                }
                w
            }
            (Family::Unitriangular { n }, Element::Vector(v)) => {
                // column j of M is cleared bottom-up by right multiplication
                // with t_ij^{-c}, which only changes column j
                let n = *n;
                let mut cur = v.clone();
                let mut ops: Vec<(usize, BigInt)> = Vec::new();
                for j in (1..n).rev() {
                    for i in (0..j).rev() {
                        let c = cur[ut_index(n, i, j)].clone();
                        if c.is_zero() {
                            continue;
                        }
                        for k in 0..i {
                            let d = &cur[ut_index(n, k, i)] * &c;
                            cur[ut_index(n, k, j)] -= d;
                        }
                        cur[ut_index(n, i, j)] = BigInt::zero();
                        ops.push((ut_index(n, i, j), c));
                    }
                }
                // M · Π t^{-c} = I  =>  M = Π reversed t^{c}
                ops.iter().rev().flat_map(|(g, c)| power(*g, c)).collect()
            }
            (Family::Lamplighter, Element::Lamp { lamps, cursor }) => {
                let mut w = Vec::new();
                let mut at = BigInt::zero();
                for p in lamps {
                    w.extend(power(1, &(p - &at)));
                    w.push(GenLetter::new(0, false));
                    at = p.clone();
                }
                w.extend(power(1, &(cursor - &at)));
                w
            }
            (Family::Direct(a, b), Element::Pair(x, y)) => {
                let k = a.gens.len();
                let mut w = a.word_for(x);
                w.extend(b.word_for(y).into_iter().map(|l| GenLetter::new(l.generator + k, l.inverse)));
                w
            }
            (Family::Free(a, b), Element::Free(s)) => {
                let k = a.gens.len();
                s.iter()
                    .flat_map(|(f, e)| {
                        if *f == 0 {
                            a.word_for(e)
                        } else {
                            b.word_for(e).into_iter().map(|l| GenLetter::new(l.generator + k, l.inverse)).collect()
                        }
                    })
                    .collect()
            }
            (Family::Extension(sys), Element::Coset { base, coset }) => {
                let mut w = sys.base.word_for(base);
                w.extend(sys.representatives[*coset].iter().copied());
                w
            }
            _ => panic!("word_for: element does not belong to the {} group", self.family.tag()),
        }
    }

    /// Parses a word such as `"s p q^-1"`, `"xyx^-1y^-1"` or `"x⁻¹"`:
    /// greedy longest generator names, each optionally followed by `^-1`,
    /// `⁻¹` or `'`-free inverse markers; whitespace separates freely.
    pub fn parse_word(&self, text: &str) -> Result<Vec<GenLetter>> {
        let mut out = Vec::new();
        let mut rest = text.trim_start();
        while !rest.is_empty() {
            let best = self
                .gens
                .iter()
                .enumerate()
                .filter(|(_, (n, _))| rest.starts_with(n.as_str()))
                .max_by_key(|(_, (n, _))| n.len());
            let (i, name) = match best {
                Some((i, (n, _))) => (i, n.len()),
                None => return Err(Error::UnknownLetter(rest.chars().take(8).collect())),
            };
            rest = &rest[name..];
            let mut inverse = false;
            for marker in ["^-1", "⁻¹"] {
                if let Some(r) = rest.strip_prefix(marker) {
                    inverse = true;
                    rest = r;
                    break;
                }
            }
            out.push(GenLetter::new(i, inverse));
            rest = rest.trim_start();
        }
        Ok(out)
    }

    pub fn render_word(&self, w: &[GenLetter]) -> String {
        w.iter().map(|&l| self.letter_name(l)).collect::<Vec<_>>().join(" ")
    }

    /// Canonical hashing key: family tag plus the canonical payload.
    pub fn key(&self, g: &Element) -> String {
        format!("{}:{}", self.family.tag(), g)
    }

    /// `π` of a uniformly random word of the given length.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R, len: usize) -> Element {
        self.evaluate(&self.random_word(rng, len))
    }

    pub fn random_word<R: Rng + ?Sized>(&self, rng: &mut R, len: usize) -> Vec<GenLetter> {
        let k = self.gens.len();
        (0..len).map(|_| GenLetter::new(rng.gen_range(0..k), rng.gen_bool(0.5))).collect()
    }

    pub fn from_spec(spec: &GroupSpec) -> Result<Group> {
        Ok(match spec {
            GroupSpec::Abelian { n, names } => {
                if *n == 0 {
                    return Err(Error::arg("rank must be positive"));
                }
                match names {
                    None => Group::abelian(*n),
                    Some(v) if v.len() == *n => Group::abelian_named(&v.iter().map(String::as_str).collect::<Vec<_>>()),
                    Some(_) => return Err(Error::arg("one name per generator required")),
                }
            }
            GroupSpec::Heisenberg {} => Group::heisenberg(),
            GroupSpec::Semidirect { n, a } => {
                if a.len() != *n {
                    return Err(Error::arg("matrix size differs from n"));
                }
                Group::semidirect(a.clone())?
            }
            GroupSpec::Unitriangular { n } => Group::unitriangular(*n)?,
            GroupSpec::Lamplighter {} => Group::lamplighter(),
            GroupSpec::Dihedral {} => Group::infinite_dihedral(),
            GroupSpec::Direct { factors } | GroupSpec::Free { factors } => {
                if factors.len() != 2 {
                    return Err(Error::arg("products take exactly two factors"));
                }
                let a = Arc::new(Group::from_spec(&factors[0])?);
                let b = Arc::new(Group::from_spec(&factors[1])?);
                if matches!(spec, GroupSpec::Direct { .. }) {
                    Group::direct_product(a, b)
                } else {
                    Group::free_product(a, b)
                }
            }
            GroupSpec::Extension { system } => Group::finite_extension(system.build()?),
        })
    }
}

/// Group specification exchanged by the command line, e.g.
/// `{"family":"semidirect","n":2,"A":[[1,0],[1,1]]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum GroupSpec {
    Abelian {
        n: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        names: Option<Vec<String>>,
    },
    Heisenberg {},
    Semidirect {
        n: usize,
        #[serde(rename = "A")]
        a: Vec<Vec<i64>>,
    },
    Unitriangular {
        n: usize,
    },
    Lamplighter {},
    Dihedral {},
    Direct {
        factors: Vec<GroupSpec>,
    },
    Free {
        factors: Vec<GroupSpec>,
    },
    Extension {
        system: CosetSpec,
    },
}

/// Serializable coset data: words are written in the extension's generator
/// names; subgroup elements as words over the subgroup generators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CosetSpec {
    pub base: Box<GroupSpec>,
    pub extra_generators: Vec<String>,
    pub representatives: Vec<String>,
    /// `table[i][g] = [h-word, j]`
    pub table: Vec<Vec<(String, usize)>>,
}

impl CosetSpec {
    pub fn from_system(sys: &CosetSystem) -> CosetSpec {
        let k = sys.base.generator_count();
        let name = |l: &GenLetter| {
            let n = &sys.names[l.generator];
            if l.inverse {
                format!("{n}^-1")
            } else {
                n.clone()
            }
        };
        CosetSpec {
            base: Box::new(sys.base.spec.clone()),
            extra_generators: sys.names[k..].to_vec(),
            representatives: sys.representatives.iter().map(|w| w.iter().map(name).collect::<Vec<_>>().join(" ")).collect(),
            table: sys
                .table
                .iter()
                .map(|row| row.iter().map(|(h, j)| (sys.base.render_word(&sys.base.word_for(h)), *j)).collect())
                .collect(),
        }
    }

    pub fn build(&self) -> Result<CosetSystem> {
        let base = Arc::new(Group::from_spec(&self.base)?);
        let extras: Vec<&str> = self.extra_generators.iter().map(String::as_str).collect();
        // parse representative words against the full generator list
        let mut names = base.generator_names();
        names.extend(self.extra_generators.iter().cloned());
        let full = Group::abelian_named(&names.iter().map(String::as_str).collect::<Vec<_>>());
        let reps = self.representatives.iter().map(|w| full.parse_word(w)).collect::<Result<Vec<_>>>()?;
        let table = self
            .table
            .iter()
            .map(|row| row.iter().map(|(w, j)| Ok((base.evaluate(&base.parse_word(w)?), *j))).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        CosetSystem::new(base, &extras, reps, table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn v(x: &[i64]) -> Element {
        Element::Vector(x.iter().map(|&a| big(a)).collect())
    }

    #[test]
    fn heisenberg_examples() {
        let h = Group::heisenberg();
        let p = h.generator(1).clone();
        assert_eq!(h.multiply(&v(&[1, 0, 0]), &p), v(&[1, 1, 1]));
        assert_eq!(h.multiply(&h.identity(), h.generator(0)), v(&[1, 0, 0]));
        assert_eq!(h.evaluate(&h.parse_word("sp").unwrap()), v(&[1, 1, 1]));
        // generator actions: gs, gp, gq
        let g = v(&[2, 3, 5]);
        assert_eq!(h.multiply(&g, h.generator(0)), v(&[3, 3, 5]));
        assert_eq!(h.multiply(&g, h.generator(1)), v(&[2, 4, 7]));
        assert_eq!(h.multiply(&g, h.generator(2)), v(&[2, 3, 6]));
    }

    #[test]
    fn lamplighter_example() {
        let l = Group::lamplighter();
        let g = l.evaluate(&l.parse_word("a t").unwrap());
        assert_eq!(g, Element::Lamp { lamps: BTreeSet::from([big(0)]), cursor: big(1) });
    }

    #[test]
    fn abelian_commutator_and_empty_word() {
        let z2 = Group::abelian(2);
        assert_eq!(z2.evaluate(&z2.parse_word("x y x^-1 y⁻¹").unwrap()), z2.identity());
        assert_eq!(z2.evaluate(&[]), z2.identity());
        assert!(matches!(z2.parse_word("xq"), Err(Error::UnknownLetter(_))));
    }

    #[test]
    fn direct_and_free_products() {
        let z = Arc::new(Group::abelian(1));
        let d = Group::direct_product(z.clone(), z.clone());
        assert_eq!(d.generator_names(), vec!["x", "x'"]);
        let a = Element::Pair(Box::new(v(&[2])), Box::new(v(&[0])));
        let b = Element::Pair(Box::new(v(&[0])), Box::new(v(&[3])));
        assert_eq!(d.multiply(&a, &b), Element::Pair(Box::new(v(&[2])), Box::new(v(&[3]))));
        let f = Group::free_product(z.clone(), z);
        let a2 = Element::Free(vec![(0, v(&[2]))]);
        let am2 = Element::Free(vec![(0, v(&[-2]))]);
        assert_eq!(f.multiply(&a2, &am2), f.identity());
        let x = f.generator(0).clone();
        let y = f.generator(1).clone();
        assert_eq!(f.multiply(&x, &y), Element::Free(vec![(0, v(&[1])), (1, v(&[1]))]));
    }

    #[test]
    fn dihedral_against_affine_maps() {
        let d = Group::infinite_dihedral();
        // affine oracle: element as (sign, shift) acting x -> sign*x + shift;
        // words act on the right, so compose left-to-right
        let affine = |w: &[GenLetter]| {
            let (mut s, mut t) = (1i64, 0i64);
            for l in w {
                // apply after current: x -> g(f(x))
                match (l.generator, l.inverse) {
                    (0, false) => t += 1,
                    (0, true) => t -= 1,
                    _ => {
                        s = -s;
                        t = -t;
                    }
                }
            }
            (s, t)
        };
        let r = d.generator(1).clone();
        assert_eq!(d.multiply(&r, &r), d.identity());
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let u = d.random_word(&mut rng, 8);
            let w = d.random_word(&mut rng, 8);
            let eq = d.evaluate(&u) == d.evaluate(&w);
            assert_eq!(eq, affine(&u) == affine(&w));
        }
        let frf = d.evaluate(&d.parse_word("r a r").unwrap());
        assert_eq!(frf, d.inverse(d.generator(0)));
        let n = Element::Coset { base: Box::new(v(&[4])), coset: 0 };
        assert_eq!(d.multiply(&n, d.generator(0)), Element::Coset { base: Box::new(v(&[5])), coset: 0 });
    }

    #[test]
    fn bad_coset_tables_rejected() {
        let z = Arc::new(Group::abelian_named(&["a"]));
        let e = z.identity();
        let a = z.generator(0).clone();
        let not_perm = vec![vec![(a.clone(), 0), (e.clone(), 0)], vec![(a.clone(), 1), (e.clone(), 0)]];
        assert!(CosetSystem::new(z.clone(), &["r"], vec![vec![], vec![GenLetter::new(1, false)]], not_perm).is_err());
        let bad_rep = vec![vec![(a.clone(), 0), (e.clone(), 1)], vec![(a, 1), (e, 0)]];
        assert!(CosetSystem::new(z, &["r"], vec![vec![], vec![GenLetter::new(0, false)]], bad_rep).is_err());
    }

    #[test]
    fn semidirect_and_unitriangular() {
        assert!(Group::semidirect(vec![vec![2, 0], vec![0, 1]]).is_err());
        let g = Group::semidirect(vec![vec![1, 0], vec![1, 1]]).unwrap();
        let t = g.generator(2).clone();
        let z1 = g.generator(0).clone();
        // (0,e1)(1,0) = (1, A e1) = (1, (1,1))
        assert_eq!(g.multiply(&z1, &t), Element::Semidirect { y: big(1), z: vec![big(1), big(1)] });
        let u = Group::unitriangular(3).unwrap();
        assert_eq!(u.generator_names(), vec!["t12", "t13", "t23"]);
        // (m12,m13,m23) = (2,0,5) times t23 adds column 2 to column 3
        assert_eq!(u.multiply(&v(&[2, 0, 5]), u.generator(2)), v(&[2, 2, 6]));
    }

    #[test]
    fn group_laws_all_families() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for g in sample_groups() {
            for _ in 0..200 {
                let a = g.random_element(&mut rng, 6);
                let b = g.random_element(&mut rng, 6);
                let c = g.random_element(&mut rng, 6);
                assert_eq!(g.multiply(&g.multiply(&a, &b), &c), g.multiply(&a, &g.multiply(&b, &c)), "{}", g.family.tag());
                assert_eq!(g.multiply(&a, &g.inverse(&a)), g.identity());
                assert_eq!(g.multiply(&g.identity(), &a), a);
                assert_eq!(g.evaluate(&g.word_for(&a)), a, "{}", g.family.tag());
                assert!(g.check(&a).is_ok());
            }
        }
    }

    fn sample_groups() -> Vec<Group> {
        let z = Arc::new(Group::abelian(1));
        vec![
            Group::abelian(3),
            Group::heisenberg(),
            Group::semidirect(vec![vec![1, 0], vec![1, 1]]).unwrap(),
            Group::semidirect(vec![vec![2, 1], vec![1, 1]]).unwrap(),
            Group::unitriangular(4).unwrap(),
            Group::lamplighter(),
            Group::direct_product(Arc::new(Group::heisenberg()), z.clone()),
            Group::free_product(z.clone(), Arc::new(Group::abelian(2))),
            Group::infinite_dihedral(),
        ]
    }

    #[test]
    fn group_description_json_round_trip() {
        let text = r#"{"family":"semidirect","n":2,"A":[[1,0],[1,1]]}"#;
        let spec: GroupSpec = serde_json::from_str(text).unwrap();
        let g = Group::from_spec(&spec).unwrap();
        assert_eq!(g.generator_names(), vec!["z1", "z2", "t"]);
        for g in sample_groups() {
            let text = serde_json::to_string(g.spec()).unwrap();
            let back = Group::from_spec(&serde_json::from_str(&text).unwrap()).unwrap();
            assert_eq!(back.generator_names(), g.generator_names());
        }
        assert!(serde_json::from_str::<GroupSpec>(r#"{"family":"heisenberg","x":1}"#).is_err());
    }
}
