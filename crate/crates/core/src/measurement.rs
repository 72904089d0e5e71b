//! Quantitative instruments on a representation: the deviation `h(n)`, the
//! fellow-traveler function `s(n)`, almost-all ball statistics, and the
//! symbolic coarse order with its Dehn-function rule table.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::automata::{count_by_length, deconvolve, enumerate_upto, enumerate_words, sample_word, Dfa, Sym};
use crate::groups::{Element, Family, Group};
use crate::metrics::{largest_ball, DistanceBound, Metric};
use crate::par::Exec;
use crate::representations::CayleyRep;
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// coarse order

/// Growth classes up to the coarse equivalence `f ≍ g`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FunctionClass {
    Zero,
    Const,
    /// `log^a n`, `a >= 1`
    LogPow(u32),
    /// `n^α log^a n`, `α > 0`
    PolyLog(Ratio<u32>, u32),
    Exp,
}

impl FunctionClass {
    /// `𝔦`: the identity function.
    pub fn identity() -> FunctionClass {
        FunctionClass::PolyLog(Ratio::one(), 0)
    }

    pub fn poly(d: u32) -> FunctionClass {
        FunctionClass::PolyLog(Ratio::from_integer(d), 0)
    }

    /// Canonical form: `n^0 log^a n` is `LogPow(a)`, `log^0 n` is `Const`.
    pub fn normalized(self) -> FunctionClass {
        match self {
            FunctionClass::PolyLog(a, k) if a.is_zero() => FunctionClass::LogPow(k).normalized(),
            FunctionClass::LogPow(0) => FunctionClass::Const,
            c => c,
        }
    }

    fn rank(self) -> (u8, Ratio<u32>, u32) {
        match self.normalized() {
            FunctionClass::Zero => (0, Ratio::zero(), 0),
            FunctionClass::Const => (1, Ratio::zero(), 0),
            FunctionClass::LogPow(k) => (2, Ratio::zero(), k),
            FunctionClass::PolyLog(a, k) => (3, a, k),
            FunctionClass::Exp => (4, Ratio::zero(), 0),
        }
    }

    /// A representative function, for numeric checks.
    pub fn eval(self, n: f64) -> f64 {
        match self.normalized() {
            FunctionClass::Zero => 0.0,
            FunctionClass::Const => 1.0,
            FunctionClass::LogPow(k) => n.ln().powi(k as i32),
            FunctionClass::PolyLog(a, k) => n.powf(f64::from(*a.numer()) / f64::from(*a.denom())) * n.ln().powi(k as i32),
            FunctionClass::Exp => n.exp2(),
        }
    }
}

impl fmt::Display for FunctionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.normalized() {
            FunctionClass::Zero => write!(f, "zero"),
            FunctionClass::Const => write!(f, "const"),
            FunctionClass::LogPow(k) => write!(f, "log:{k}"),
            FunctionClass::PolyLog(a, 0) => write!(f, "poly:{a}"),
            FunctionClass::PolyLog(a, k) => write!(f, "polylog:{a}:{k}"),
            FunctionClass::Exp => write!(f, "exp"),
        }
    }
}

impl Serialize for FunctionClass {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl FromStr for FunctionClass {
    type Err = Error;

    /// `zero`, `const`, `id`, `exp`, `log:a`, `poly:α`, `polylog:α:a` with
    /// `α` an integer or a fraction `p/q`.
    fn from_str(s: &str) -> Result<FunctionClass> {
        let bad = || Error::Parse(format!("unknown function class `{s}` (try poly:3, exp, log:1, id)"));
        let ratio = |t: &str| -> Result<Ratio<u32>> {
            match t.split_once('/') {
                Some((p, q)) => {
                    let (p, q): (u32, u32) = (p.parse().map_err(|_| bad())?, q.parse().map_err(|_| bad())?);
                    if q == 0 {
                        return Err(bad());
                    }
                    Ok(Ratio::new(p, q))
                }
                None => Ok(Ratio::from_integer(t.parse().map_err(|_| bad())?)),
            }
        };
        let parts: Vec<&str> = s.trim().split(':').collect();
        let class = match parts.as_slice() {
            ["zero"] => FunctionClass::Zero,
            ["const"] => FunctionClass::Const,
            ["id"] => FunctionClass::identity(),
            ["exp"] => FunctionClass::Exp,
            ["log", k] => FunctionClass::LogPow(k.parse().map_err(|_| bad())?),
            ["poly", a] => FunctionClass::PolyLog(ratio(a)?, 0),
            ["polylog", a, k] => FunctionClass::PolyLog(ratio(a)?, k.parse().map_err(|_| bad())?),
            _ => return Err(bad()),
        };
        Ok(class.normalized())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CoarseOrder {
    StrictlyLess,
    Equal,
    StrictlyGreater,
}

/// Total order on classes: `Zero ≺ Const ≺ log^a ≺ n^α log^a ≺ 2^n`, with
/// polynomial-logarithmic classes compared lexicographically by `(α, a)`.
pub fn coarse_compare(f: FunctionClass, g: FunctionClass) -> CoarseOrder {
    match f.rank().cmp(&g.rank()) {
        Ordering::Less => CoarseOrder::StrictlyLess,
        Ordering::Equal => CoarseOrder::Equal,
        Ordering::Greater => CoarseOrder::StrictlyGreater,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DehnBound {
    /// every representation of the group has `h ⪰` this class
    LowerBound(FunctionClass),
    NoInformation,
}

impl fmt::Display for DehnBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DehnBound::LowerBound(c) => write!(f, "{c}"),
            DehnBound::NoInformation => write!(f, "no-information"),
        }
    }
}

/// Lower bound on `h` implied by a Dehn function: `n^d` with `d > 2` gives
/// `n^{(d-2)/d}`, an exponential Dehn function gives `𝔦`.
pub fn dehn_lower_bound(dehn: FunctionClass) -> Result<DehnBound> {
    match dehn.normalized() {
        FunctionClass::Exp => Ok(DehnBound::LowerBound(FunctionClass::identity())),
        FunctionClass::PolyLog(d, 0) if d > Ratio::from_integer(2) => {
            let two = Ratio::from_integer(2);
            Ok(DehnBound::LowerBound(FunctionClass::PolyLog((d - two) / d, 0)))
        }
        FunctionClass::PolyLog(_, 0) | FunctionClass::Const | FunctionClass::Zero => Ok(DehnBound::NoInformation),
        other => Err(Error::arg(format!("the rule table covers n^d and exponential Dehn functions, not {other}"))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Superadditivity {
    pub holds: bool,
    /// `f(x) + f(y) <= f(x + y)` for all `x, y >= n0`
    pub n0: Option<u64>,
    /// a violating pair `(x, y)` when `holds` is false
    pub witness: Option<(u64, u64)>,
}

/// Numeric superadditivity test of the class representative on
/// `[n0, 256]²`, trying thresholds `n0 = 1..=16`.
pub fn superadditivity_check(f: FunctionClass) -> Superadditivity {
    const TOP: u64 = 256;
    let holds_on = |x: u64, y: u64| {
        let (a, b, c) = (f.eval(x as f64), f.eval(y as f64), f.eval((x + y) as f64));
        a + b <= c * (1.0 + 1e-12) + 1e-12
    };
    let mut witness = None;
    for n0 in 1..=16u64 {
        let bad = (n0..=TOP).flat_map(|x| (x..=TOP).map(move |y| (x, y))).find(|&(x, y)| !holds_on(x, y));
        match bad {
            None => return Superadditivity { holds: true, n0: Some(n0), witness: None },
            Some(p) => witness = Some(p),
        }
    }
    // report the violation at the largest tried threshold: it persists for large x = y
    Superadditivity { holds: false, n0: None, witness }
}

// ---------------------------------------------------------------------------
// series

#[derive(Clone, Copy, Debug)]
pub struct MeasureOptions {
    pub cap_words: u128,
    pub cap_ball: usize,
    /// radius bound for the exact ball backing non-formula distances
    pub ball_radius: usize,
    pub exec: Exec,
}

impl Default for MeasureOptions {
    fn default() -> MeasureOptions {
        MeasureOptions { cap_words: 2_000_000, cap_ball: 2_000_000, ball_radius: 64, exec: Exec::default() }
    }
}

/// A certified interval, rendered `v` when exact and `lo..hi` otherwise.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Interval {
    pub lower: u64,
    pub upper: Option<u64>,
}

impl Interval {
    fn of(d: &DistanceBound) -> Interval {
        Interval { lower: d.lower, upper: d.upper }
    }

    fn max(self, o: Interval) -> Interval {
        Interval { lower: self.lower.max(o.lower), upper: self.upper.zip(o.upper).map(|(a, b)| a.max(b)) }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.upper {
            Some(u) if u == self.lower => write!(f, "{u}"),
            Some(u) => write!(f, "{}..{u}", self.lower),
            None => write!(f, "{}..", self.lower),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SeriesRow {
    pub n: usize,
    pub h: Option<Interval>,
    pub s: Option<Interval>,
    /// `|L^{<=n}|`
    pub l_count: Option<u128>,
    /// `#B_n`
    pub ball: Option<usize>,
    /// `#Q_n`
    pub q: Option<usize>,
    pub fraction: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasurementSeries {
    pub rep: String,
    /// false for sampled rows: they are lower estimates, not exact maxima
    pub exhaustive: bool,
    pub cap_words: u128,
    pub cap_ball: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda2: Option<f64>,
    pub rows: Vec<SeriesRow>,
}

impl MeasurementSeries {
    fn new(rep: &CayleyRep, opts: &MeasureOptions, n: usize) -> MeasurementSeries {
        MeasurementSeries {
            rep: rep.name().to_string(),
            exhaustive: true,
            cap_words: opts.cap_words,
            cap_ball: opts.cap_ball,
            seed: None,
            lambda: None,
            lambda1: None,
            lambda2: None,
            rows: (0..=n).map(|n| SeriesRow { n, ..SeriesRow::default() }).collect(),
        }
    }

    pub fn h_lower(&self) -> Vec<u64> {
        self.rows.iter().map(|r| r.h.map_or(0, |h| h.lower)).collect()
    }

    pub fn to_csv(&self) -> String {
        let opt = |v: Option<String>| v.unwrap_or_default();
        let mut out = String::from("n,h_lower,h_upper,s,L_count,ball,Q,fraction\n");
        for r in &self.rows {
            out += &format!(
                "{},{},{},{},{},{},{},{}\n",
                r.n,
                opt(r.h.map(|h| h.lower.to_string())),
                opt(r.h.and_then(|h| h.upper).map(|u| u.to_string())),
                opt(r.s.map(|s| s.to_string())),
                opt(r.l_count.map(|c| c.to_string())),
                opt(r.ball.map(|c| c.to_string())),
                opt(r.q.map(|c| c.to_string())),
                opt(r.fraction.map(|f| format!("{f:.6}"))),
            );
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn require_generators(rep: &CayleyRep) -> Result<()> {
    if rep.sigma_to_s().is_none() {
        return Err(Error::Unsupported(format!(
            "`{}` is not written over the generators; measure its block re-encoding `{}-s` instead",
            rep.name(),
            rep.name()
        )));
    }
    Ok(())
}

fn cumulative(counts: &[u128]) -> Vec<u128> {
    counts.iter().scan(0u128, |s, &c| {
        *s = s.saturating_add(c);
        Some(*s)
    }).collect()
}

fn guard_words(dfa: &Dfa, n: usize, cap: u128, what: &str) -> Result<Vec<u128>> {
    let counts = count_by_length(dfa, n);
    let total = cumulative(&counts).last().copied().unwrap_or(0);
    if total > cap {
        return Err(Error::CapExceeded { what: format!("{what} (use sampling mode)"), needed: total, cap });
    }
    Ok(counts)
}

/// Folds per-length maxima into nondecreasing prefix maxima.
fn prefix_max(per_len: Vec<Option<Interval>>) -> Vec<Interval> {
    let mut acc = Interval { lower: 0, upper: Some(0) };
    per_len
        .into_iter()
        .map(|v| {
            if let Some(v) = v {
                acc = acc.max(v);
            }
            acc
        })
        .collect()
}

fn deviation(rep: &CayleyRep, metric: &Metric, w: &[Sym]) -> Result<Interval> {
    Ok(Interval::of(&metric.between(&rep.evaluate_path(w)?, &rep.decode(w)?)))
}

/// `h(m) = max{ d(π(w), ψ(w)) : w ∈ L, |w| <= m }` for every `m <= n`, by
/// exhaustive enumeration.
pub fn measure_h(rep: &CayleyRep, n: usize, opts: &MeasureOptions) -> Result<MeasurementSeries> {
    require_generators(rep)?;
    let counts = guard_words(rep.language(), n, opts.cap_words, "language words")?;
    let metric = Metric::auto(rep.group().clone(), opts.ball_radius, opts.cap_ball, opts.exec);
    let words = enumerate_words(rep.language(), n);
    let devs: Vec<Result<Interval>> = opts.exec.map(&words, |w| deviation(rep, &metric, w));
    let mut per_len: Vec<Option<Interval>> = vec![None; n + 1];
    for (w, d) in words.iter().zip(devs) {
        let d = d?;
        let slot = &mut per_len[w.len()];
        *slot = Some(slot.map_or(d, |s| s.max(d)));
    }
    let mut series = MeasurementSeries::new(rep, opts, n);
    for ((row, h), c) in series.rows.iter_mut().zip(prefix_max(per_len)).zip(cumulative(&counts)) {
        row.h = Some(h);
        row.l_count = Some(c);
    }
    Ok(series)
}

/// Sampling mode for `h`: `samples` uniform words of each length, drawn from
/// one generator seeded with `seed`. Rows are lower estimates and the series
/// is flagged non-exhaustive.
pub fn measure_h_sampled(rep: &CayleyRep, n: usize, samples: usize, seed: u64, opts: &MeasureOptions) -> Result<MeasurementSeries> {
    require_generators(rep)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let metric = Metric::auto(rep.group().clone(), opts.ball_radius, opts.cap_ball, opts.exec);
    let mut drawn: Vec<Vec<Sym>> = Vec::new();
    for len in 0..=n {
        for _ in 0..samples {
            match sample_word(rep.language(), len, &mut rng) {
                Some(w) => drawn.push(w.iter().map(|l| l.0[0].expect("one-track word")).collect()),
                None => break,
            }
        }
    }
    let devs: Vec<Result<Interval>> = opts.exec.map(&drawn, |w| deviation(rep, &metric, w));
    let mut per_len: Vec<Option<Interval>> = vec![None; n + 1];
    for (w, d) in drawn.iter().zip(devs) {
        let d = d?;
        let slot = &mut per_len[w.len()];
        *slot = Some(slot.map_or(d, |s| s.max(d)));
    }
    let counts = cumulative(&count_by_length(rep.language(), n));
    let mut series = MeasurementSeries::new(rep, opts, n);
    series.exhaustive = false;
    series.seed = Some(seed);
    for ((row, h), c) in series.rows.iter_mut().zip(prefix_max(per_len)).zip(counts) {
        row.h = Some(h);
        row.l_count = Some(c);
    }
    Ok(series)
}

/// `s(m) = max d(ŵ₁(t), ŵ₂(t))` over pairs accepted by a multiplier with
/// convolution length `<= m` and all `t` (beyond the longer word both paths
/// are constant, so `t <= m` is automatic).
pub fn measure_s(rep: &CayleyRep, n: usize, opts: &MeasureOptions) -> Result<MeasurementSeries> {
    require_generators(rep)?;
    let map = rep.sigma_to_s().expect("checked above").to_vec();
    let group = rep.group();
    let metric = Metric::auto(group.clone(), opts.ball_radius, opts.cap_ball, opts.exec);
    let mut per_len: Vec<Option<Interval>> = vec![None; n + 1];
    for m in rep.multipliers() {
        guard_words(m, n, opts.cap_words, "multiplier pairs")?;
        let pairs: Vec<Vec<Vec<Sym>>> = enumerate_upto(m, n).map(|cw| deconvolve(&cw, 2)).collect::<Result<_>>()?;
        let spans: Vec<(usize, Interval)> = opts.exec.map(&pairs, |p| {
            let (u, v) = (&p[0], &p[1]);
            let (mut a, mut b) = (group.identity(), group.identity());
            let mut worst = Interval { lower: 0, upper: Some(0) };
            for t in 0..u.len().max(v.len()) {
                if let Some(&x) = u.get(t) {
                    a = group.multiply_letter(&a, map[x as usize]);
                }
                if let Some(&y) = v.get(t) {
                    b = group.multiply_letter(&b, map[y as usize]);
                }
                worst = worst.max(Interval::of(&metric.between(&a, &b)));
            }
            (u.len().max(v.len()), worst)
        });
        for (len, d) in spans {
            let slot = &mut per_len[len];
            *slot = Some(slot.map_or(d, |s| s.max(d)));
        }
    }
    let mut series = MeasurementSeries::new(rep, opts, n);
    for (row, s) in series.rows.iter_mut().zip(prefix_max(per_len)) {
        row.s = Some(s);
    }
    Ok(series)
}

// ---------------------------------------------------------------------------
// almost-all statistics

/// Whether `group` has polynomial growth (virtually nilpotent). Semidirect
/// products `ℤⁿ ⋊_A ℤ` qualify iff the powers of `A` grow polynomially, which
/// is tested by comparing the bit sizes of `A^k` and `A^{2k}` for `k = 2^10`.
pub fn has_polynomial_growth(group: &Group) -> bool {
    match group.family() {
        Family::Abelian { .. } | Family::Heisenberg | Family::Unitriangular { .. } => true,
        Family::Lamplighter => false,
        Family::Semidirect { n, a, .. } => {
            let mut p = a.clone();
            let mut bits = Vec::new();
            for j in 1..=11 {
                p = mat_mul(&p, &p);
                if j >= 10 {
                    bits.push(p.iter().flatten().map(|x| x.bits()).max().unwrap_or(0));
                }
            }
            // polynomial: entries of A^k stay within O(k^{n-1}), so doubling k adds about n - 1 bits
            bits[1].saturating_sub(bits[0]) <= *n as u64 + 1
        }
        Family::Direct(a, b) => has_polynomial_growth(a) && has_polynomial_growth(b),
        // a free product of two infinite factors contains a free subgroup of rank 2
        Family::Free(..) => false,
        Family::Extension(sys) => has_polynomial_growth(&sys.base),
    }
}

fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| &a[i][k] * &b[k][j]).sum()).collect()).collect()
}

/// `#Q_m / #B_m` for `m <= n`, where `Q_m = { g ∈ B_m : λ₁ d(g) <= |ψ⁻¹(g)| <= λ₂ d(g) }`
/// (the identity counts as a member). Defaults: `λ₁ = ½ log_{|S|} λ` with
/// `λ = (#B_n / #B_{n-2})^{1/2}`, and `λ₂ = |ψ⁻¹(e)| + C` with `C` the
/// bounded-difference constant measured on `B_n`, which makes the upper
/// inequality hold for every element.
pub fn almost_all_stats(
    rep: &CayleyRep,
    n: usize,
    lambda1: Option<f64>,
    lambda2: Option<f64>,
    opts: &MeasureOptions,
) -> Result<MeasurementSeries> {
    let group = rep.group();
    if has_polynomial_growth(group) {
        return Err(Error::Unsupported(format!(
            "`{}` has polynomial growth; the almost-all estimate needs exponential growth and does not extend to this group",
            rep.name()
        )));
    }
    let b = largest_ball(group, n, opts.cap_ball, opts.exec);
    if b.radius() < n {
        return Err(Error::CapExceeded { what: format!("ball of radius {n}"), needed: opts.cap_ball as u128 + 1, cap: opts.cap_ball as u128 });
    }
    let lengths: Vec<Result<usize>> = opts.exec.map(b.elements(), |(g, _)| Ok(rep.encode(g)?.len()));
    let lengths: Vec<usize> = lengths.into_iter().collect::<Result<_>>()?;
    let counts = b.counts();
    let lambda = if n >= 2 { (counts[n] as f64 / counts[n - 2] as f64).sqrt() } else { 1.0 };
    let generators = {
        let mut seen: Vec<Element> = Vec::new();
        for l in group.letters() {
            let e = group.letter_element(l);
            if !seen.contains(&e) {
                seen.push(e);
            }
        }
        seen.len() as f64
    };
    let l1 = lambda1.unwrap_or(0.5 * lambda.ln() / generators.ln());
    let l2 = match lambda2 {
        Some(v) => v,
        None => {
            let inner: Vec<&(Element, usize)> = b.elements().iter().filter(|(_, d)| *d < n).collect();
            let letters: Vec<Element> = group.letters().into_iter().map(|l| group.letter_element(l)).collect();
            let diffs: Vec<Result<usize>> = opts.exec.map(&inner, |(g, _)| {
                let here = rep.encode(g)?.len();
                letters.iter().try_fold(0usize, |acc, a| Ok(acc.max(rep.encode(&group.multiply(g, a))?.len().abs_diff(here))))
            });
            let c = diffs.into_iter().try_fold(0usize, |acc, d| d.map(|d| acc.max(d)))?;
            (rep.encode(&group.identity())?.len() + c) as f64
        }
    };
    let mut q_by_d = vec![0usize; n + 1];
    for ((_, d), &len) in b.elements().iter().zip(&lengths) {
        let (df, lf) = (*d as f64, len as f64);
        if *d == 0 || (l1 * df <= lf && lf <= l2 * df) {
            q_by_d[*d] += 1;
        }
    }
    let mut series = MeasurementSeries::new(rep, opts, n);
    series.lambda = Some(lambda);
    series.lambda1 = Some(l1);
    series.lambda2 = Some(l2);
    let mut q = 0;
    for (m, row) in series.rows.iter_mut().enumerate() {
        q += q_by_d[m];
        row.ball = Some(counts[m]);
        row.q = Some(q);
        row.fraction = Some(q as f64 / counts[m] as f64);
    }
    Ok(series)
}

// ---------------------------------------------------------------------------
// fits

/// Least-squares slope of `ys` against `xs`.
pub fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let cov: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}

/// Encoding lengths `|ψ⁻¹(g^m)|` for each `m` in `powers`, without any search.
pub fn power_encoding_lengths(rep: &CayleyRep, g: &Element, powers: &[u64]) -> Result<Vec<(u64, usize)>> {
    let group = rep.group();
    powers
        .iter()
        .map(|&m| {
            let p = power(group, g, m);
            Ok((m, rep.encode(&p)?.len()))
        })
        .collect()
}

/// `g^m` by repeated squaring.
pub fn power(group: &Group, g: &Element, mut m: u64) -> Element {
    let mut acc = group.identity();
    let mut base = g.clone();
    while m > 0 {
        if m & 1 == 1 {
            acc = group.multiply(&acc, &base);
        }
        base = group.multiply(&base, &base);
        m >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::representations::RepSpec;

    #[test]
    fn class_order() {
        use FunctionClass::*;
        assert_eq!(coarse_compare(FunctionClass::poly(2), FunctionClass::poly(3)), CoarseOrder::StrictlyLess);
        assert_eq!(coarse_compare(Exp, FunctionClass::poly(100)), CoarseOrder::StrictlyGreater);
        assert_eq!(coarse_compare(FunctionClass::identity(), FunctionClass::identity()), CoarseOrder::Equal);
        assert_eq!(coarse_compare(LogPow(0), Const), CoarseOrder::Equal);
        assert_eq!(coarse_compare(PolyLog(Ratio::new(1, 2), 5), FunctionClass::identity()), CoarseOrder::StrictlyLess);
        assert_eq!("poly:1/3".parse::<FunctionClass>().unwrap(), PolyLog(Ratio::new(1, 3), 0));
        assert_eq!("id".parse::<FunctionClass>().unwrap().to_string(), "poly:1");
        assert!("poly:1/0".parse::<FunctionClass>().is_err());
    }

    #[test]
    fn dehn_table() {
        assert_eq!(dehn_lower_bound(FunctionClass::poly(3)).unwrap().to_string(), "poly:1/3");
        assert_eq!(dehn_lower_bound(FunctionClass::Exp).unwrap(), DehnBound::LowerBound(FunctionClass::identity()));
        assert_eq!(dehn_lower_bound(FunctionClass::poly(2)).unwrap(), DehnBound::NoInformation);
        assert_eq!(dehn_lower_bound(FunctionClass::poly(4)).unwrap().to_string(), "poly:1/2");
        assert!(dehn_lower_bound(FunctionClass::LogPow(1)).is_err());
    }

    #[test]
    fn superadditive_classes() {
        for f in [FunctionClass::identity(), FunctionClass::Exp, FunctionClass::poly(2)] {
            assert_eq!(superadditivity_check(f), Superadditivity { holds: true, n0: Some(1), witness: None }, "{f}");
        }
        for f in [FunctionClass::LogPow(1), FunctionClass::Const, FunctionClass::PolyLog(Ratio::new(1, 3), 0)] {
            let r = superadditivity_check(f);
            assert!(!r.holds && r.witness.is_some(), "{f}");
        }
    }

    #[test]
    fn growth_detection() {
        assert!(has_polynomial_growth(&Group::abelian(2)));
        assert!(has_polynomial_growth(&Group::semidirect(vec![vec![1, 0], vec![1, 1]]).unwrap()));
        assert!(has_polynomial_growth(&Group::semidirect(vec![vec![0, -1], vec![1, 0]]).unwrap()));
        assert!(!has_polynomial_growth(&Group::semidirect(vec![vec![2, 1], vec![1, 1]]).unwrap()));
        assert!(!has_polynomial_growth(&Group::lamplighter()));
        assert!(has_polynomial_growth(&Group::infinite_dihedral()));
    }

    #[test]
    fn unary_is_automatic() {
        let r = RepSpec::from_name("unary-z").unwrap().build().unwrap();
        let s = measure_h(&r, 12, &MeasureOptions::default()).unwrap();
        assert!(s.rows.iter().all(|row| row.h == Some(Interval { lower: 0, upper: Some(0) })));
        assert_eq!(s.rows[12].l_count, Some(25));
        assert!(s.to_csv().starts_with("n,h_lower,h_upper,s,L_count,ball,Q,fraction\n0,0,0,,1,,,\n"));
        let s = measure_s(&r, 12, &MeasureOptions::default()).unwrap();
        assert!(s.rows.iter().all(|row| row.s.unwrap().upper.unwrap() <= 1));
        let refused = almost_all_stats(&r, 4, None, None, &MeasureOptions::default());
        assert!(matches!(refused, Err(Error::Unsupported(_))));
    }

    #[test]
    fn needs_generator_alphabet() {
        let r = RepSpec::from_name("binary-z").unwrap().build().unwrap();
        assert!(matches!(measure_h(&r, 4, &MeasureOptions::default()), Err(Error::Unsupported(_))));
    }

    #[test]
    fn sampling_is_reproducible() {
        let r = RepSpec::from_name("binary-z-s").unwrap().build().unwrap();
        let a = measure_h_sampled(&r, 10, 20, 7, &MeasureOptions::default()).unwrap();
        let b = measure_h_sampled(&r, 10, 20, 7, &MeasureOptions { exec: Exec::Sequential, ..MeasureOptions::default() }).unwrap();
        assert_eq!(a, b);
        assert!(!a.exhaustive);
        let exact = measure_h(&r, 10, &MeasureOptions::default()).unwrap();
        for (x, y) in a.rows.iter().zip(&exact.rows) {
            assert!(x.h.unwrap().lower <= y.h.unwrap().lower);
        }
    }

    #[test]
    fn fits() {
        assert!((slope(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]) - 2.0).abs() < 1e-12);
        let h = Group::heisenberg();
        let s = h.generator(0).clone();
        assert_eq!(power(&h, &s, 5), h.evaluate(&h.parse_word("s s s s s").unwrap()));
    }
}
