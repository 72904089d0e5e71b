//! Word metrics on Cayley graphs: exact balls by breadth-first search,
//! certified distance intervals from family estimators, and path prefixes.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::groups::{CosetSpec, CosetSystem, Element, Family, GenLetter, Group};
use crate::par::Exec;
use crate::{Error, Result};

/// Exact ball `B_r`: every element within distance `r`, in BFS order
/// (layer by layer, generators in declared order).
#[derive(Clone, Debug)]
pub struct Ball {
    radius: usize,
    elements: Vec<(Element, usize)>,
    index: HashMap<Element, usize>,
}

impl Ball {
    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[(Element, usize)] {
        &self.elements
    }

    pub fn distance(&self, g: &Element) -> Option<usize> {
        self.index.get(g).map(|&i| self.elements[i].1)
    }

    /// `#B_m` for every `m <= radius`.
    pub fn counts(&self) -> Vec<usize> {
        let mut c = vec![0usize; self.radius + 1];
        for (_, d) in &self.elements {
            c[*d] += 1;
        }
        for m in 1..c.len() {
            c[m] += c[m - 1];
        }
        c
    }
}

/// Breadth-first ball of radius `radius`; fails once more than `cap` elements
/// would be stored. Frontier expansion runs under `exec`; the result does not
/// depend on it.
pub fn ball(group: &Group, radius: usize, cap: usize, exec: Exec) -> Result<Ball> {
    let b = largest_ball(group, radius, cap, exec);
    if b.radius < radius {
        return Err(Error::CapExceeded { what: "ball size".into(), needed: cap as u128 + 1, cap: cap as u128 });
    }
    Ok(b)
}

/// The complete ball of the largest radius `<= radius` with at most `cap`
/// elements.
pub fn largest_ball(group: &Group, radius: usize, cap: usize, exec: Exec) -> Ball {
    let letters: Vec<Element> = group.letters().into_iter().map(|l| group.letter_element(l)).collect();
    let e = group.identity();
    let mut index = HashMap::from([(e.clone(), 0usize)]);
    let mut elements = vec![(e, 0usize)];
    let mut frontier = 0..1;
    for d in 1..=radius {
        let layer: Vec<&Element> = elements[frontier.clone()].iter().map(|(g, _)| g).collect();
        let expanded: Vec<Vec<Element>> =
            exec.map(&layer, |g| letters.iter().map(|a| group.multiply(g, a)).collect());
        let start = elements.len();
        for h in expanded.into_iter().flatten() {
            if !index.contains_key(&h) {
                if elements.len() >= cap {
                    for (g, _) in elements.drain(start..) {
                        index.remove(&g);
                    }
                    return Ball { radius: d - 1, elements, index };
                }
                index.insert(h.clone(), elements.len());
                elements.push((h, d));
            }
        }
        if elements.len() == start {
            // finite group: the ball is the whole group
            return Ball { radius, elements, index };
        }
        frontier = start..elements.len();
    }
    Ball { radius, elements, index }
}

/// Source of one side of a distance interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Estimator {
    Bfs,
    /// outside a complete ball of known radius
    BallRadius,
    L1Norm,
    LampSweep,
    DihedralFormula,
    Abelianization,
    CentralArea,
    ExplicitWord,
    Trivial,
}

/// Certified bounds `lower <= d(g) <= upper`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DistanceBound {
    pub lower: u64,
    pub upper: Option<u64>,
    pub lower_by: Estimator,
    pub upper_by: Option<Estimator>,
}

impl DistanceBound {
    pub fn exact(d: u64, by: Estimator) -> DistanceBound {
        DistanceBound { lower: d, upper: Some(d), lower_by: by, upper_by: Some(by) }
    }

    pub fn is_exact(&self) -> bool {
        self.upper == Some(self.lower)
    }

    fn sum(a: DistanceBound, b: DistanceBound) -> DistanceBound {
        DistanceBound {
            lower: a.lower.saturating_add(b.lower),
            upper: a.upper.zip(b.upper).map(|(x, y)| x.saturating_add(y)),
            lower_by: a.lower_by,
            upper_by: a.upper_by,
        }
    }

    fn raise_lower(mut self, v: u64, by: Estimator) -> DistanceBound {
        if v > self.lower {
            self.lower = v;
            self.lower_by = by;
        }
        self
    }
}

impl fmt::Display for DistanceBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.upper {
            Some(u) if u == self.lower => write!(f, "{u}"),
            Some(u) => write!(f, "[{},{u}]", self.lower),
            None => write!(f, "[{},?]", self.lower),
        }
    }
}

fn sat(v: &BigInt) -> u64 {
    v.magnitude().to_u64().unwrap_or(u64::MAX)
}

fn l1(v: &[BigInt]) -> u64 {
    v.iter().fold(0u64, |a, x| a.saturating_add(sat(x)))
}

fn ceil_sqrt(v: &BigUint) -> BigUint {
    let r = v.sqrt();
    if &r * &r < *v { r + 1u32 } else { r }
}

/// Smallest length `L` of a word reaching central value `m` with planar
/// displacement `|x| + |y| = p`. Closing the planar path by an L-shaped return
/// gives a rectilinear loop whose signed area `∫x dy` is `z` or `z − xy`, and
/// such a loop of length `ℓ` encloses at most `ℓ²/16`; central letters add
/// one each. As `(L − c + p)²/16 + c` is convex in the count `c` of central
/// letters, only `c = 0` and `c = L` matter.
fn area_lower(m: &BigInt, p: u64) -> u64 {
    let m = m.magnitude();
    if m.is_zero() {
        return 0;
    }
    let sixteen_m = m * 16u32;
    let by_area = ceil_sqrt(&sixteen_m).to_u64().unwrap_or(u64::MAX).saturating_sub(p);
    let p2 = BigUint::from(p) * p;
    let by_letters = if p2 >= sixteen_m {
        0
    } else {
        let d = sixteen_m - p2;
        ((&d + 15u32) / 16u32).to_u64().unwrap_or(u64::MAX)
    };
    by_area.min(by_letters)
}

/// Length of an explicit word with central value `r`: a commutator
/// `[s^a, p^b]` contributes `ab` for `2a + 2b` letters, `q` covers the rest.
fn central_upper(r: &BigInt) -> u64 {
    let r = r.magnitude();
    let mut best = r.to_u64().unwrap_or(u64::MAX);
    let root = r.sqrt().to_u64().unwrap_or(u64::MAX / 8);
    for a in root.saturating_sub(2).max(1)..=root + 2 {
        let b = r / a;
        let rem = (r % a).to_u64().unwrap_or(u64::MAX);
        let cost = (2 * a).saturating_add(b.to_u64().unwrap_or(u64::MAX).saturating_mul(2)).saturating_add(rem);
        best = best.min(cost);
    }
    best
}

/// Interval for `(x, y, z) ∈ ℋ₃` with `(x,y,z)(x',y',z') = (x+x', y+y', z+z'+xy')`.
pub fn heisenberg_bounds(x: &BigInt, y: &BigInt, z: &BigInt) -> DistanceBound {
    let planar = sat(x).saturating_add(sat(y));
    let twisted = z - x * y;
    let area = area_lower(z, planar).max(area_lower(&twisted, planar));
    let (lower, lower_by) = if area > planar { (area, Estimator::CentralArea) } else { (planar, Estimator::Abelianization) };
    let upper = planar.saturating_add(central_upper(&twisted));
    DistanceBound { lower, upper: Some(upper), lower_by, upper_by: Some(Estimator::ExplicitWord) }
}

fn is_dihedral(sys: &CosetSystem) -> bool {
    CosetSpec::from_system(sys) == CosetSpec::from_system(&CosetSystem::infinite_dihedral())
}

/// Family estimator without any ball.
pub fn estimate(group: &Group, g: &Element) -> DistanceBound {
    match (group.family(), g) {
        (Family::Abelian { .. }, Element::Vector(v)) => DistanceBound::exact(l1(v), Estimator::L1Norm),
        (Family::Heisenberg, Element::Vector(v)) => heisenberg_bounds(&v[0], &v[1], &v[2]),
        (Family::Unitriangular { n: 3 }, Element::Vector(v)) => heisenberg_bounds(&v[0], &v[2], &v[1]),
        (Family::Unitriangular { n }, Element::Vector(v)) => {
            let diag: u64 = (0..n - 1).map(|i| sat(&v[crate::groups::ut_index(*n, i, i + 1)])).sum();
            DistanceBound {
                lower: diag,
                upper: Some(group.word_for(g).len() as u64),
                lower_by: Estimator::Abelianization,
                upper_by: Some(Estimator::ExplicitWord),
            }
        }
        (Family::Semidirect { a, .. }, Element::Semidirect { y, z }) => {
            let t = [[1, 0], [1, 1]];
            let is_t = a.len() == 2 && (0..2).all(|i| (0..2).all(|j| a[i][j] == BigInt::from(t[i][j])));
            if is_t {
                return heisenberg_bounds(&z[0], y, &z[1]);
            }
            DistanceBound {
                lower: sat(y),
                upper: Some(sat(y).saturating_add(l1(z))),
                lower_by: Estimator::Abelianization,
                upper_by: Some(Estimator::ExplicitWord),
            }
        }
        (Family::Lamplighter, Element::Lamp { lamps, cursor }) => {
            let zero = BigInt::zero();
            let lo = lamps.first().map_or(&zero, |m| m.min(&zero)).min(cursor).clone();
            let hi = lamps.last().map_or(&zero, |m| m.max(&zero)).max(cursor).clone();
            let left_first = &hi - cursor - &lo;
            let right_first = &hi + cursor - &lo;
            let d = BigInt::from(lamps.len()) + (&hi - &lo) + left_first.min(right_first);
            DistanceBound::exact(sat(&d), Estimator::LampSweep)
        }
        (Family::Direct(a, b), Element::Pair(x, y)) => DistanceBound::sum(estimate(a, x), estimate(b, y)),
        (Family::Free(a, b), Element::Free(s)) => s
            .iter()
            .map(|(f, e)| if *f == 0 { estimate(a, e) } else { estimate(b, e) })
            .fold(DistanceBound::exact(0, Estimator::Trivial), DistanceBound::sum),
        (Family::Extension(sys), Element::Coset { base, coset }) if is_dihedral(sys) => match &**base {
            Element::Vector(v) => DistanceBound::exact(sat(&v[0]) + u64::from(*coset != 0), Estimator::DihedralFormula),
            _ => DistanceBound { lower: 0, upper: None, lower_by: Estimator::Trivial, upper_by: None },
        },
        _ => DistanceBound {
            lower: u64::from(*g != group.identity()),
            upper: Some(group.word_for(g).len() as u64),
            lower_by: Estimator::Trivial,
            upper_by: Some(Estimator::ExplicitWord),
        },
    }
}

/// Whether [`estimate`] is exact on every element of `group`.
pub fn has_exact_estimator(group: &Group) -> bool {
    match group.family() {
        Family::Abelian { .. } | Family::Lamplighter => true,
        Family::Direct(a, b) | Family::Free(a, b) => has_exact_estimator(a) && has_exact_estimator(b),
        Family::Extension(sys) => is_dihedral(sys),
        _ => false,
    }
}

/// Distance oracle: family estimators refined by an exact ball.
#[derive(Clone, Debug)]
pub struct Metric {
    group: Arc<Group>,
    ball: Option<Ball>,
}

impl Metric {
    /// Uses estimators only.
    pub fn formulas(group: Arc<Group>) -> Metric {
        Metric { group, ball: None }
    }

    /// Estimators, plus a ball (see [`Metric::with_ball`]) only for families
    /// where they are not exact.
    pub fn auto(group: Arc<Group>, radius: usize, cap: usize, exec: Exec) -> Metric {
        if has_exact_estimator(&group) {
            Metric::formulas(group)
        } else {
            Metric::with_ball(group, radius, cap, exec)
        }
    }

    /// Adds a ball of radius `radius` (as large as `cap` allows) for elements
    /// the estimators cannot pin down.
    pub fn with_ball(group: Arc<Group>, radius: usize, cap: usize, exec: Exec) -> Metric {
        let b = largest_ball(&group, radius, cap, exec);
        Metric { group, ball: Some(b) }
    }

    pub fn group(&self) -> &Arc<Group> {
        &self.group
    }

    pub fn ball(&self) -> Option<&Ball> {
        self.ball.as_ref()
    }

    pub fn distance(&self, g: &Element) -> DistanceBound {
        let est = estimate(&self.group, g);
        if est.is_exact() {
            return est;
        }
        match &self.ball {
            Some(b) => match b.distance(g) {
                Some(d) => DistanceBound::exact(d as u64, Estimator::Bfs),
                None => est.raise_lower(b.radius() as u64 + 1, Estimator::BallRadius),
            },
            None => est,
        }
    }

    /// `d(g, h) = d(g⁻¹h)`.
    pub fn between(&self, g: &Element, h: &Element) -> DistanceBound {
        self.distance(&self.group.multiply(&self.group.inverse(g), h))
    }
}

/// One-off distance query with a ball of at most `cap` elements.
pub fn distance(group: &Arc<Group>, g: &Element, cap: usize) -> DistanceBound {
    let est = estimate(group, g);
    if est.is_exact() {
        return est;
    }
    Metric::with_ball(group.clone(), usize::MAX, cap, Exec::default()).distance(g)
}

/// `ŵ(t) = π(w(t))`, with `w(t) = w` once `t >= |w|`.
pub fn path_point(group: &Group, w: &[GenLetter], t: usize) -> Element {
    group.evaluate(&w[..t.min(w.len())])
}
