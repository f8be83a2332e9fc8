//! Two-dimensional integer lattices attached to short intervals.
//!
//! For an interval `(x3/M, (x3+1)/M]` the integer points `x` with `x1/x2`
//! inside it live, after the shear `x -> (M x1 - x3 x2, x2)`, in the lattice
//! spanned by `(M, 0)` and `(-x3, 1)`. Lagrange-Gauss reduction of that
//! lattice gives the successive minima used to bound solution coordinates.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use thiserror::Error;

use crate::detmethod::{IntervalSpec, RationalPoint};
use crate::solutions::{self, phi, Q1Kind, Quadruple};

/// Constant in the coordinate bound `|lambda_i| <= C * L_i`.
pub const COORDINATE_CONSTANT: f64 = 4.0;
/// Constant in the census envelope `C * E / L_lo^2`.
pub const CENSUS_CONSTANT: f64 = 10.0;
/// Maximum number of intervals allowed to share one `t3`.
pub const T3_MULTIPLICITY_CAP: usize = 4;

pub type Vec2 = [i64; 2];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("basis vectors {0:?} and {1:?} are linearly dependent")]
    DegenerateLattice(Vec2, Vec2),
    #[error("reduced vector {0:?} has no integral preimage for x3 = {1}, M = {2}")]
    NonIntegralPreimage(Vec2, i64, u64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

fn norm2(v: Vec2) -> i128 {
    let (a, b) = (v[0] as i128, v[1] as i128);
    a * a + b * b
}

fn dot(u: Vec2, v: Vec2) -> i128 {
    u[0] as i128 * v[0] as i128 + u[1] as i128 * v[1] as i128
}

fn det(u: Vec2, v: Vec2) -> i128 {
    u[0] as i128 * v[1] as i128 - u[1] as i128 * v[0] as i128
}

fn sub_mul(u: Vec2, mu: i128, v: Vec2) -> Vec2 {
    let c = |a: i64, b: i64| -> i64 {
        (a as i128 - mu * b as i128)
            .try_into()
            .expect("reduced coordinates fit in i64")
    };
    [c(u[0], v[0]), c(u[1], v[1])]
}

/// Nearest integer to `num / den`, ties toward zero.
fn round_ties_to_zero(num: i128, den: i128) -> i128 {
    let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
    let q = num.div_euclid(den);
    let r2 = 2 * num.rem_euclid(den);
    if r2 > den || (r2 == den && q < 0) {
        q + 1
    } else {
        q
    }
}

/// Lagrange-Gauss reduction. Returns `(g1, g2)` with `|g1| <= |g2|` spanning
/// the same lattice, and `|<g1, g2>| <= |g1|^2 / 2`.
pub fn gauss_reduce(b1: Vec2, b2: Vec2) -> Result<(Vec2, Vec2), LatticeError> {
    if det(b1, b2) == 0 {
        return Err(LatticeError::DegenerateLattice(b1, b2));
    }
    let (mut u, mut v) = if norm2(b1) <= norm2(b2) {
        (b1, b2)
    } else {
        (b2, b1)
    };
    loop {
        let mu = round_ties_to_zero(dot(u, v), norm2(u));
        let w = sub_mul(v, mu, u);
        if norm2(w) >= norm2(u) {
            return Ok((u, w));
        }
        v = u;
        u = w;
    }
}

/// The lattice spanned by `b1` and `b2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntLattice2 {
    pub b1: Vec2,
    pub b2: Vec2,
}

impl IntLattice2 {
    /// The sheared interval lattice `(M, 0), (-x3, 1)`.
    pub fn interval(x3: i64, m: u64) -> Self {
        IntLattice2 {
            b1: [m as i64, 0],
            b2: [-x3, 1],
        }
    }

    pub fn det(&self) -> i128 {
        det(self.b1, self.b2)
    }

    pub fn contains(&self, v: Vec2) -> bool {
        let d = self.det();
        d != 0 && det(v, self.b2) % d == 0 && det(self.b1, v) % d == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    S,
    T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedBasis {
    pub g1: Vec2,
    pub g2: Vec2,
    /// `sqrt(scale) / |g1|`
    pub l1: f64,
    /// `sqrt(scale) / |g2|`
    pub l2: f64,
    pub side: Side,
}

impl ReducedBasis {
    fn new(g1: Vec2, g2: Vec2, scale: u64, side: Side) -> Self {
        let root = (scale as f64).sqrt();
        ReducedBasis {
            g1,
            g2,
            l1: root / (norm2(g1) as f64).sqrt(),
            l2: root / (norm2(g2) as f64).sqrt(),
            side,
        }
    }
}

/// The `s`-side lattice and its reduced basis, with `L_i = sqrt(E) / |g_i|`.
/// `x3` is taken modulo `M`.
pub fn interval_lattice(
    x3: i64,
    m: u64,
    e_top: u64,
) -> Result<(IntLattice2, ReducedBasis), LatticeError> {
    side_lattice(x3, m, e_top, Side::S)
}

/// The `t`-side analogue for `t3`, with `T_i = sqrt(F) / |g_i|`.
pub fn t_lattice(t3: i64, m: u64, f_top: u64) -> Result<(IntLattice2, ReducedBasis), LatticeError> {
    side_lattice(t3, m, f_top, Side::T)
}

fn side_lattice(
    x3: i64,
    m: u64,
    scale: u64,
    side: Side,
) -> Result<(IntLattice2, ReducedBasis), LatticeError> {
    if m == 0 || m > i64::MAX as u64 / 4 {
        return Err(LatticeError::InvalidArgument(format!(
            "M = {m} out of range"
        )));
    }
    let lat = IntLattice2::interval(x3.rem_euclid(m as i64), m);
    let (g1, g2) = gauss_reduce(lat.b1, lat.b2)?;
    Ok((lat, ReducedBasis::new(g1, g2, scale, side)))
}

/// Preimages `h_i` of the reduced vectors under the shear; `det(h1, h2) = +-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UnimodularBasis {
    pub h1: Vec2,
    pub h2: Vec2,
}

impl UnimodularBasis {
    pub fn det(&self) -> i128 {
        det(self.h1, self.h2)
    }

    /// Integer coordinates `(lambda1, lambda2)` of `x` in this basis.
    pub fn coordinates(&self, x: Vec2) -> [i128; 2] {
        let d = self.det();
        [det(x, self.h2) * d, det(self.h1, x) * d]
    }
}

/// Inverts `(x1, x2) -> (M x1 - x3 x2, x2)` on `g1`, `g2`, with `x3` reduced
/// modulo `M` as in [`interval_lattice`].
pub fn h_basis(rb: &ReducedBasis, x3: i64, m: u64) -> Result<UnimodularBasis, LatticeError> {
    let x3r = x3.rem_euclid(m as i64);
    let pre = |g: Vec2| -> Result<Vec2, LatticeError> {
        let num = g[0] as i128 + x3r as i128 * g[1] as i128;
        if num % m as i128 != 0 {
            return Err(LatticeError::NonIntegralPreimage(g, x3, m));
        }
        Ok([(num / m as i128) as i64, g[1]])
    };
    Ok(UnimodularBasis {
        h1: pre(rb.g1)?,
        h2: pre(rb.g2)?,
    })
}

/// Result of checking `|lambda_i| <= 4 L_i` for the solutions of one interval.
#[derive(Debug, Clone, PartialEq)]
pub struct CoordinateReport {
    pub x3: i64,
    pub checked: usize,
    /// Largest `|lambda_i| / L_i` seen.
    pub max_ratio: f64,
    pub violations: Vec<(Vec2, [i128; 2])>,
}

impl CoordinateReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Writes `x = (x1, x2)` of each solution in `interval` in the `h`-basis
/// and checks the coordinate bound. Solutions outside the interval are skipped.
pub fn coordinate_bounds_check(
    solutions: &[Quadruple],
    e_top: u64,
    interval: &IntervalSpec,
) -> Result<CoordinateReport, LatticeError> {
    let (_, rb) = interval_lattice(interval.x3, interval.m, e_top)?;
    // With x3 reduced mod M the points shift by an integer multiple of x2.
    let shift = interval.x3.div_euclid(interval.m as i64);
    let h = h_basis(&rb, interval.x3, interval.m)?;
    let mut report = CoordinateReport {
        x3: interval.x3,
        checked: 0,
        max_ratio: 0.0,
        violations: Vec::new(),
    };
    for q in solutions {
        if q.x2 == BigInt::from(0) {
            continue;
        }
        let s = BigRational::new(q.x1.clone(), q.x2.clone());
        if !interval.contains(&s) {
            continue;
        }
        let to_i64 = |v: &BigInt| {
            v.to_i64()
                .ok_or_else(|| LatticeError::InvalidArgument(format!("coordinate {v} too large")))
        };
        let (x1, x2) = (to_i64(&q.x1)?, to_i64(&q.x2)?);
        let x = [x1 - shift * x2, x2];
        let lam = h.coordinates(x);
        report.checked += 1;
        let r1 = lam[0].abs() as f64 / rb.l1;
        let r2 = lam[1].abs() as f64 / rb.l2;
        report.max_ratio = report.max_ratio.max(r1).max(r2);
        if r1 > COORDINATE_CONSTANT || r2 > COORDINATE_CONSTANT {
            report.violations.push((x, lam));
        }
    }
    Ok(report)
}

/// Number of `x3` in `[0, M)` with `L_lo < L_1(x3) <= L_hi`.
pub fn census_by_l(e_top: u64, m: u64, l_lo: f64, l_hi: f64) -> Result<u64, LatticeError> {
    let mut count = 0;
    for x3 in 0..m as i64 {
        let l1 = interval_lattice(x3, m, e_top)?.1.l1;
        if l1 > l_lo && l1 <= l_hi {
            count += 1;
        }
    }
    Ok(count)
}

/// One dyadic range `(L_lo, 2 L_lo]` of a census.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct CensusBin {
    pub l_lo: f64,
    pub l_hi: f64,
    pub count: u64,
    /// `10 * scale / L_lo^2`
    pub envelope: f64,
}

impl CensusBin {
    pub fn within_envelope(&self) -> bool {
        self.count as f64 <= self.envelope
    }
}

fn dyadic_bins(values: impl IntoIterator<Item = f64>, scale: u64) -> Vec<CensusBin> {
    let top = (scale as f64).sqrt();
    let mut counts: BTreeMap<u32, u64> = BTreeMap::new();
    for l in values {
        // l in (top / 2^(j+1), top / 2^j]
        let j = if l >= top {
            0
        } else {
            ((top / l).log2().ceil() as u32).saturating_sub(1)
        };
        // guard against rounding at bin edges
        let mut j = j;
        while j > 0 && l > top / 2f64.powi(j as i32) {
            j -= 1;
        }
        while l <= top / 2f64.powi(j as i32 + 1) {
            j += 1;
        }
        *counts.entry(j).or_default() += 1;
    }
    counts
        .into_iter()
        .map(|(j, count)| {
            let l_hi = top / 2f64.powi(j as i32);
            let l_lo = l_hi / 2.0;
            CensusBin {
                l_lo,
                l_hi,
                count,
                envelope: CENSUS_CONSTANT * scale as f64 / (l_lo * l_lo),
            }
        })
        .collect()
}

/// Dyadic census of `L_1` over every `x3` in `[0, M)`, computed on `threads`
/// workers. Only non-empty bins are returned, largest `L` first.
pub fn census_dyadic(e_top: u64, m: u64, threads: usize) -> Result<Vec<CensusBin>, LatticeError> {
    let run = || -> Result<Vec<f64>, LatticeError> {
        (0..m as i64)
            .into_par_iter()
            .map(|x3| interval_lattice(x3, m, e_top).map(|(_, rb)| rb.l1))
            .collect()
    };
    let ls = match rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
    {
        Ok(pool) => pool.install(run)?,
        Err(_) => run()?,
    };
    Ok(dyadic_bins(ls, e_top))
}

/// The `t`-side census over the intervals that contain a solution.
#[derive(Debug, Clone, PartialEq)]
pub struct TSideCensus {
    pub bins: Vec<CensusBin>,
    /// Number of distinct `x3` with a solution.
    pub intervals: usize,
    /// Largest number of intervals mapped to one `t3`.
    pub max_multiplicity: usize,
    /// Intervals skipped because `phi` is singular at their left end.
    pub singular: usize,
}

impl TSideCensus {
    pub fn within_cap(&self) -> bool {
        self.max_multiplicity <= T3_MULTIPLICITY_CAP
    }
}

/// `t3 = floor(M phi(s0))` for the interval with left end `s0`, using the
/// `q1` kind selected by `s0`.
pub fn t3_of(interval: &IntervalSpec) -> Option<i64> {
    let s0 = interval.s0();
    let kind = Q1Kind::for_slope(&s0);
    let v = phi(kind, &s0).ok()? * BigRational::from_integer(interval.m.into());
    v.floor().to_integer().to_i64()
}

/// Builds the `t`-side lattices `(M, 0), (-t3, 1)` with `T_i = sqrt(F) / |g_i|`
/// for each interval holding one of `points`.
pub fn t_side_census(
    f_top: u64,
    m: u64,
    points: &[RationalPoint],
) -> Result<TSideCensus, LatticeError> {
    let mut x3s: Vec<i64> = points
        .iter()
        .map(|p| IntervalSpec::containing(&p.s, m).x3)
        .collect();
    x3s.sort_unstable();
    x3s.dedup();
    let mut mult: BTreeMap<i64, usize> = BTreeMap::new();
    let mut ts = Vec::with_capacity(x3s.len());
    let mut singular = 0;
    for &x3 in &x3s {
        let Some(t3) = t3_of(&IntervalSpec::new(x3, m)) else {
            singular += 1;
            continue;
        };
        *mult.entry(t3).or_default() += 1;
        ts.push(t_lattice(t3, m, f_top)?.1.l1);
    }
    Ok(TSideCensus {
        bins: dyadic_bins(ts, f_top),
        intervals: x3s.len(),
        max_multiplicity: mult.values().copied().max().unwrap_or(0),
        singular,
    })
}

/// Decomposes triples into quadruples, dropping any that fail.
pub fn quadruples(triples: &[solutions::SolutionTriple]) -> Vec<Quadruple> {
    triples
        .iter()
        .filter_map(|t| solutions::decompose(t).ok())
        .collect()
}

/// Shortest non-zero vector by brute force over `|a|, |b| <= r`.
pub fn brute_shortest(b1: Vec2, b2: Vec2, r: i64) -> i128 {
    let mut best = i128::MAX;
    for a in -r..=r {
        for b in -r..=r {
            if a == 0 && b == 0 {
                continue;
            }
            let v = [
                a as i128 * b1[0] as i128 + b as i128 * b2[0] as i128,
                a as i128 * b1[1] as i128 + b as i128 * b2[1] as i128,
            ];
            best = best.min(v[0] * v[0] + v[1] * v[1]);
        }
    }
    best
}

/// Checks the reduction invariants of `rb` against the interval lattice of
/// `(x3, M)` with scale `E`; returns a description of the first failure.
pub fn check_invariants(rb: &ReducedBasis, x3: i64, m: u64, e_top: u64) -> Option<String> {
    let lat = IntLattice2::interval(x3.rem_euclid(m as i64), m);
    let (g1, g2) = (rb.g1, rb.g2);
    if det(g1, g2).abs() != m as i128 {
        return Some(format!("det(g1, g2) = {} != M", det(g1, g2)));
    }
    if !lat.contains(g1) || !lat.contains(g2) {
        return Some("reduced vectors outside lattice".into());
    }
    if norm2(g1) > norm2(g2) {
        return Some("|g1| > |g2|".into());
    }
    if 2 * dot(g1, g2).abs() > norm2(g1) {
        return Some("size condition fails".into());
    }
    if brute_shortest(g1, g2, 3) < norm2(g1) {
        return Some("g1 not shortest over small combinations".into());
    }
    let hermite = 2.0 / 3f64.sqrt() * m as f64;
    if (norm2(g1) as f64).sqrt() * (norm2(g2) as f64).sqrt() > hermite * (1.0 + 1e-12) {
        return Some("Hermite bound fails".into());
    }
    if rb.l1 < rb.l2 {
        return Some("L1 < L2".into());
    }
    if rb.l1 > (e_top as f64).sqrt() * (1.0 + 1e-12) {
        return Some("L1 > sqrt(E)".into());
    }
    match h_basis(rb, x3, m) {
        Ok(h) if h.det().abs() == 1 => None,
        Ok(h) => Some(format!("det(h) = {}", h.det())),
        Err(e) => Some(e.to_string()),
    }
}
