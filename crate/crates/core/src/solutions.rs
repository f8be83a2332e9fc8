//! Solutions of `e^2 f = n^2 + 1`.
//!
//! Triples are enumerated box by box through the roots of `m^2 + 1` modulo
//! `e^2`. Each triple factors over the Gaussian integers as
//! `(x1 + i x2)^2 (y1 + i y2) = n + i` (up to the swap normalization), which
//! yields the unit equation `2 x1 x2 y1 + (x1^2 - x2^2) y2 = 1` and the
//! rational point `(s, t)` close to the curve `t = phi(s)`.

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::arith::{self, GaussianInt};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolutionError {
    #[error("({e}, {f}, {n}) does not satisfy e^2 f = n^2 + 1")]
    BadTriple { e: BigUint, f: BigUint, n: BigUint },
    #[error("zero denominator: {0}")]
    DegenerateDenominator(&'static str),
    #[error("bi-homogeneous form: {0}")]
    InvalidForm(String),
    #[error("form vanishes identically on the fiber over x = ({x1}, {x2})")]
    VanishingFiber { x1: i64, x2: i64 },
}

/// `(e, f, n)` with `e^2 f = n^2 + 1`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SolutionTriple {
    pub e: BigUint,
    pub f: BigUint,
    pub n: BigUint,
}

impl SolutionTriple {
    pub fn new(
        e: impl Into<BigUint>,
        f: impl Into<BigUint>,
        n: impl Into<BigUint>,
    ) -> Result<Self, SolutionError> {
        let t = SolutionTriple {
            e: e.into(),
            f: f.into(),
            n: n.into(),
        };
        if t.is_valid() {
            Ok(t)
        } else {
            Err(SolutionError::BadTriple {
                e: t.e,
                f: t.f,
                n: t.n,
            })
        }
    }

    pub fn is_valid(&self) -> bool {
        !self.e.is_zero() && &self.e * &self.e * &self.f == &self.n * &self.n + 1u32
    }
}

/// The box `(E/2, E] x (F/2, F]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DyadicBox {
    pub e_top: u64,
    pub f_top: u64,
}

impl DyadicBox {
    pub fn new(e_top: u64, f_top: u64) -> Self {
        DyadicBox { e_top, f_top }
    }

    pub fn contains_e(&self, e: u64) -> bool {
        2 * e as u128 > self.e_top as u128 && e <= self.e_top
    }

    pub fn contains_f(&self, f: &BigUint) -> bool {
        f * 2u32 > BigUint::from(self.f_top) && f <= &BigUint::from(self.f_top)
    }

    fn e_range(&self) -> std::ops::RangeInclusive<u64> {
        self.e_top / 2 + 1..=self.e_top
    }
}

/// All triples in `box`, ordered by `(e, n)`.
pub fn enumerate_mef(bx: DyadicBox) -> Vec<SolutionTriple> {
    bx.e_range()
        .flat_map(|e| triples_for_e(e, bx.f_top))
        .collect()
}

/// [`enumerate_mef`] with the `e`-range sharded across `threads` workers.
pub fn enumerate_mef_threads(bx: DyadicBox, threads: usize) -> Vec<SolutionTriple> {
    if threads <= 1 {
        return enumerate_mef(bx);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool");
    let es: Vec<u64> = bx.e_range().collect();
    pool.install(|| {
        es.par_iter()
            .map(|&e| triples_for_e(e, bx.f_top))
            .collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect()
}

fn triples_for_e(e: u64, f_top: u64) -> Vec<SolutionTriple> {
    let roots = arith::roots_mod_square(e);
    if roots.is_empty() {
        return Vec::new();
    }
    let q = BigUint::from(e) * e;
    let a = &q * f_top;
    if a.is_zero() {
        return Vec::new();
    }
    // f in (F/2, F]  <=>  A/2 < n^2 + 1 <= A  with A = e^2 F
    let n_max = (&a - 1u32).sqrt();
    let n_min = if a <= BigUint::from(2u32) {
        BigUint::one()
    } else {
        (((&a - 2u32) >> 1u32).sqrt() + 1u32).max(BigUint::one())
    };
    if n_min > n_max {
        return Vec::new();
    }
    let mut out = Vec::new();
    for m in &roots {
        let offset = ((m + &q) - (&n_min % &q)) % &q;
        let mut n = &n_min + offset;
        while n <= n_max {
            let f = (&n * &n + 1u32) / &q;
            out.push(SolutionTriple {
                e: BigUint::from(e),
                f,
                n: n.clone(),
            });
            n += &q;
        }
    }
    out.sort_by(|x, y| x.n.cmp(&y.n));
    out
}

// ---------------------------------------------------------------------------
// Negative Pell equation
// ---------------------------------------------------------------------------

/// Partial quotients `[a0; a1, ..., ar]` of `sqrt(f)`, one full period.
/// `None` when `f` is a perfect square.
pub fn sqrt_continued_fraction(f: u64) -> Option<(u64, Vec<u64>)> {
    let a0 = f.isqrt();
    if a0 * a0 == f {
        return None;
    }
    let (mut m, mut d, mut a) = (0u64, 1u64, a0);
    let mut period = Vec::new();
    while a != 2 * a0 {
        m = d * a - m;
        d = (f - m * m) / d;
        a = (a0 + m) / d;
        period.push(a);
    }
    Some((a0, period))
}

/// Smallest positive solution of `n^2 - f e^2 = -1`, if any.
///
/// It exists exactly when the period of `sqrt(f)` is odd, and is then the
/// convergent just before the end of the first period.
pub fn negative_pell_fundamental(f: u64) -> Option<(BigUint, BigUint)> {
    let (a0, period) = sqrt_continued_fraction(f)?;
    if period.len() % 2 == 0 {
        return None;
    }
    let (mut h_prev, mut h) = (BigUint::one(), BigUint::from(a0));
    let (mut k_prev, mut k) = (BigUint::zero(), BigUint::one());
    for &a in &period[..period.len() - 1] {
        let h_next = &h * a + &h_prev;
        let k_next = &k * a + &k_prev;
        (h_prev, h) = (h, h_next);
        (k_prev, k) = (k, k_next);
    }
    Some((h, k))
}

/// All `(n, e)` with `n^2 - f e^2 = -1` and `1 <= e <= e_bound`, ascending.
pub fn pell_solutions(f: u64, e_bound: &BigUint) -> Vec<(BigUint, BigUint)> {
    let Some((n0, e0)) = negative_pell_fundamental(f) else {
        return Vec::new();
    };
    // Successive solutions differ by the square of the fundamental unit.
    let step_n = &n0 * &n0 + &e0 * &e0 * f;
    let step_e = BigUint::from(2u32) * &n0 * &e0;
    let (mut n, mut e) = (n0, e0);
    let mut out = Vec::new();
    while &e <= e_bound {
        out.push((n.clone(), e.clone()));
        let next_n = &n * &step_n + &e * &step_e * f;
        let next_e = &n * &step_e + &e * &step_n;
        (n, e) = (next_n, next_e);
    }
    out
}

// ---------------------------------------------------------------------------
// Gaussian decomposition
// ---------------------------------------------------------------------------

/// `(x1, x2, y1, y2)` with `2 x1 x2 y1 + (x1^2 - x2^2) y2 = 1` and `|x1| <= |x2|`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Quadruple {
    pub x1: BigInt,
    pub x2: BigInt,
    pub y1: BigInt,
    pub y2: BigInt,
}

impl Quadruple {
    pub fn cross(&self) -> BigInt {
        BigInt::from(2) * &self.x1 * &self.x2
    }

    pub fn diff(&self) -> BigInt {
        &self.x1 * &self.x1 - &self.x2 * &self.x2
    }

    /// `2 x1 x2 y1 + (x1^2 - x2^2) y2`.
    pub fn unit_form(&self) -> BigInt {
        self.cross() * &self.y1 + self.diff() * &self.y2
    }

    pub fn e(&self) -> BigInt {
        &self.x1 * &self.x1 + &self.x2 * &self.x2
    }

    pub fn f(&self) -> BigInt {
        &self.y1 * &self.y1 + &self.y2 * &self.y2
    }

    /// `(x1 + i x2)^2 (y1 + i y2)`. Equals `n + i`, or `-n + i` when the
    /// decomposition swapped `x1, x2`.
    pub fn gaussian_product(&self) -> GaussianInt {
        let x = GaussianInt::new(self.x1.clone(), self.x2.clone());
        let y = GaussianInt::new(self.y1.clone(), self.y2.clone());
        &x.square() * &y
    }

    pub fn is_valid(&self) -> bool {
        self.unit_form().is_one()
            && self.x1.gcd(&self.x2).is_one()
            && self.y1.gcd(&self.y2).is_one()
            && self.x1.abs() <= self.x2.abs()
    }
}

/// The Gaussian factorization `n + i = v^2 y` before normalization, with `v`
/// the canonical `gcd(n + i, e)`.
pub fn gaussian_factors(t: &SolutionTriple) -> Result<(GaussianInt, GaussianInt), SolutionError> {
    if !t.is_valid() {
        return Err(SolutionError::BadTriple {
            e: t.e.clone(),
            f: t.f.clone(),
            n: t.n.clone(),
        });
    }
    let target = GaussianInt::new(BigInt::from(t.n.clone()), 1);
    let v = arith::gaussian_gcd(&target, &GaussianInt::new(BigInt::from(t.e.clone()), 0));
    debug_assert_eq!(v.norm(), BigInt::from(t.e.clone()));
    // No rational prime divides n + i, so v^2 divides it whenever e^2 divides n^2 + 1.
    let y = target
        .div_exact(&v.square())
        .expect("v^2 divides n + i for a valid triple");
    Ok((v, y))
}

/// Gaussian quadruple of a triple, with `|x1| <= |x2|` enforced by swapping
/// `x1, x2` and negating `y2`.
pub fn decompose(t: &SolutionTriple) -> Result<Quadruple, SolutionError> {
    let (v, y) = gaussian_factors(t)?;
    let mut q = Quadruple {
        x1: v.re,
        x2: v.im,
        y1: y.re,
        y2: y.im,
    };
    if q.x1.abs() > q.x2.abs() {
        std::mem::swap(&mut q.x1, &mut q.x2);
        q.y2 = -q.y2;
    }
    Ok(q)
}

/// Which quadratic form plays the role of `q1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Q1Kind {
    /// `q1 = 2 x1 x2`
    Cross,
    /// `q1 = x1^2 - x2^2`
    Diff,
}

impl Q1Kind {
    /// `q1(s, 1)`
    pub fn q1_at(self, s: &BigRational) -> BigRational {
        match self {
            Q1Kind::Cross => s * BigRational::from_integer(2.into()),
            Q1Kind::Diff => s * s - BigRational::one(),
        }
    }

    /// `q2(s, 1)`
    pub fn q2_at(self, s: &BigRational) -> BigRational {
        match self {
            Q1Kind::Cross => s * s - BigRational::one(),
            Q1Kind::Diff => s * BigRational::from_integer(2.into()),
        }
    }

    /// The kind chosen for `s = x1/x2`: cross when `|2s| >= |s^2 - 1|`.
    pub fn for_slope(s: &BigRational) -> Self {
        let cross = (s * BigRational::from_integer(2.into())).abs();
        let diff = (s * s - BigRational::one()).abs();
        if cross >= diff {
            Q1Kind::Cross
        } else {
            Q1Kind::Diff
        }
    }
}

/// `phi(s) = -q2(s, 1) / q1(s, 1)`.
pub fn phi(kind: Q1Kind, s: &BigRational) -> Result<BigRational, SolutionError> {
    let den = kind.q1_at(s);
    if den.is_zero() {
        return Err(SolutionError::DegenerateDenominator("q1(s, 1) = 0"));
    }
    Ok(-kind.q2_at(s) / den)
}

/// `phi'(s)`, from the closed forms `phi = (1 - s^2)/(2s)` (cross) and
/// `phi = 2s/(1 - s^2)` (diff).
pub fn phi_derivative(kind: Q1Kind, s: &BigRational) -> Result<BigRational, SolutionError> {
    let one = BigRational::one();
    let two = BigRational::from_integer(2.into());
    match kind {
        Q1Kind::Cross => {
            if s.is_zero() {
                return Err(SolutionError::DegenerateDenominator("s = 0"));
            }
            Ok(-(&one + s * s) / (&two * s * s))
        }
        Q1Kind::Diff => {
            let w = &one - s * s;
            if w.is_zero() {
                return Err(SolutionError::DegenerateDenominator("s^2 = 1"));
            }
            Ok(two * (one + s * s) / (&w * &w))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QLabeling {
    pub quadruple: Quadruple,
    pub q1_kind: Q1Kind,
    pub z1: BigInt,
    pub z2: BigInt,
    pub s: BigRational,
    pub t: BigRational,
    /// `|z2| / sqrt(F)`, recorded for the box the labeling was made in.
    pub z2_ratio: f64,
}

impl QLabeling {
    pub fn q1_value(&self) -> BigInt {
        match self.q1_kind {
            Q1Kind::Cross => self.quadruple.cross(),
            Q1Kind::Diff => self.quadruple.diff(),
        }
    }

    pub fn q2_value(&self) -> BigInt {
        match self.q1_kind {
            Q1Kind::Cross => self.quadruple.diff(),
            Q1Kind::Diff => self.quadruple.cross(),
        }
    }
}

/// Labels `q1` as the larger of the two forms (ties go to the cross term) and
/// orders `(y1, y2)` into `(z1, z2)` so that `q1 z1 + q2 z2 = 1`.
pub fn q_label(q: &Quadruple, bx: DyadicBox) -> Result<QLabeling, SolutionError> {
    if q.x2.is_zero() {
        return Err(SolutionError::DegenerateDenominator("x2 = 0"));
    }
    let q1_kind = if q.cross().abs() >= q.diff().abs() {
        Q1Kind::Cross
    } else {
        Q1Kind::Diff
    };
    let (z1, z2) = match q1_kind {
        Q1Kind::Cross => (q.y1.clone(), q.y2.clone()),
        Q1Kind::Diff => (q.y2.clone(), q.y1.clone()),
    };
    if z2.is_zero() {
        return Err(SolutionError::DegenerateDenominator("z2 = 0"));
    }
    let s = BigRational::new(q.x1.clone(), q.x2.clone());
    let t = BigRational::new(z1.clone(), z2.clone());
    let z2_ratio = z2.abs().to_f64().unwrap_or(f64::INFINITY) / (bx.f_top as f64).sqrt();
    Ok(QLabeling {
        quadruple: q.clone(),
        q1_kind,
        z1,
        z2,
        s,
        t,
        z2_ratio,
    })
}

/// `t - phi(s)`.
pub fn residual(l: &QLabeling) -> Result<BigRational, SolutionError> {
    Ok(&l.t - phi(l.q1_kind, &l.s)?)
}

/// `1 / (q1(x1, x2) z2)`, which [`residual`] must equal exactly.
pub fn residual_identity(l: &QLabeling) -> Result<BigRational, SolutionError> {
    let den = l.q1_value() * &l.z2;
    if den.is_zero() {
        return Err(SolutionError::DegenerateDenominator("q1(x) z2 = 0"));
    }
    Ok(BigRational::new(BigInt::one(), den))
}

// ---------------------------------------------------------------------------
// Bi-homogeneous forms
// ---------------------------------------------------------------------------

/// `G(x; y) = sum c[i][j] x1^i x2^(a-i) y1^j y2^(b-j)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BihomForm {
    pub a: u32,
    pub b: u32,
    coeffs: Vec<Vec<BigInt>>,
}

impl BihomForm {
    /// `coeffs` is row-major with `i` (the `x1` power) outer, `(a+1)(b+1)` entries.
    pub fn new(a: u32, b: u32, coeffs: &[i64]) -> Result<Self, SolutionError> {
        if a == 0 || b == 0 {
            return Err(SolutionError::InvalidForm(
                "bidegree must have a, b >= 1".into(),
            ));
        }
        let want = (a as usize + 1) * (b as usize + 1);
        if coeffs.len() != want {
            return Err(SolutionError::InvalidForm(format!(
                "bidegree ({a}, {b}) needs {want} coefficients, got {}",
                coeffs.len()
            )));
        }
        if coeffs.iter().all(|&c| c == 0) {
            return Err(SolutionError::InvalidForm("zero form".into()));
        }
        let coeffs = coeffs
            .chunks(b as usize + 1)
            .map(|row| row.iter().map(|&c| BigInt::from(c)).collect())
            .collect();
        Ok(BihomForm { a, b, coeffs })
    }

    pub fn coeff(&self, i: usize, j: usize) -> &BigInt {
        &self.coeffs[i][j]
    }

    /// `||G||`, the largest coefficient in absolute value.
    pub fn height(&self) -> BigInt {
        self.coeffs
            .iter()
            .flatten()
            .map(|c| c.abs())
            .max()
            .unwrap_or_default()
    }

    pub fn eval(&self, x1: &BigInt, x2: &BigInt, y1: &BigInt, y2: &BigInt) -> BigInt {
        let fiber = self.fiber(x1, x2);
        fiber
            .iter()
            .enumerate()
            .map(|(j, c)| c * y1.pow(j as u32) * y2.pow(self.b - j as u32))
            .sum()
    }

    /// Coefficients `A_j(x)` of `G(x; y) = sum_j A_j(x) y1^j y2^(b-j)`.
    fn fiber(&self, x1: &BigInt, x2: &BigInt) -> Vec<BigInt> {
        (0..=self.b as usize)
            .map(|j| {
                (0..=self.a as usize)
                    .map(|i| &self.coeffs[i][j] * x1.pow(i as u32) * x2.pow(self.a - i as u32))
                    .sum()
            })
            .collect()
    }
}

/// Largest `X` accepted by [`bihom_count`].
pub const BIHOM_MAX_X: i64 = 1000;

/// Number of `(x, y)` with `x, y` primitive, `max |x_i| <= X`,
/// `max |y_i| <= ||G|| X^a` and `G(x; y) = 0`.
///
/// For each `x` the fiber is a binary form in `y`; its primitive zeros are
/// `±(p, q)` for the rational roots `p/q` of `A(t, 1)` plus `±(1, 0)` when the
/// `y1^b` coefficient vanishes.
pub fn bihom_count(g: &BihomForm, x_max: i64) -> Result<u64, SolutionError> {
    if !(1..=BIHOM_MAX_X).contains(&x_max) {
        return Err(SolutionError::InvalidForm(format!(
            "X must lie in [1, {BIHOM_MAX_X}], got {x_max}"
        )));
    }
    let y_bound = g.height() * BigInt::from(x_max).pow(g.a);
    let mut count = 0u64;
    for x1 in -x_max..=x_max {
        for x2 in -x_max..=x_max {
            if x1.gcd(&x2) != 1 {
                continue;
            }
            let fiber = g.fiber(&BigInt::from(x1), &BigInt::from(x2));
            if fiber.iter().all(Zero::is_zero) {
                return Err(SolutionError::VanishingFiber { x1, x2 });
            }
            let mut zeros: Vec<(BigInt, BigInt)> = rational_roots(&fiber)?
                .into_iter()
                .map(|r| (r.numer().clone(), r.denom().clone()))
                .collect();
            if fiber[g.b as usize].is_zero() {
                zeros.push((BigInt::one(), BigInt::zero()));
            }
            count += 2 * zeros
                .iter()
                .filter(|(p, q)| p.abs() <= y_bound && q.abs() <= y_bound)
                .count() as u64;
        }
    }
    Ok(count)
}

/// Distinct rational roots of `sum_j c[j] t^j`.
fn rational_roots(c: &[BigInt]) -> Result<Vec<BigRational>, SolutionError> {
    let mut roots = BTreeSet::new();
    let Some(top) = c.iter().rposition(|v| !v.is_zero()) else {
        return Ok(Vec::new());
    };
    let low = c
        .iter()
        .position(|v| !v.is_zero())
        .expect("non-zero exists");
    if low > 0 {
        roots.insert(BigRational::zero());
    }
    let poly = &c[low..=top];
    match poly.len() {
        1 => {}
        2 => {
            roots.insert(BigRational::new(-poly[0].clone(), poly[1].clone()));
        }
        3 => {
            let (a, b, cc) = (&poly[2], &poly[1], &poly[0]);
            let disc = b * b - BigInt::from(4) * a * cc;
            if !disc.is_negative() {
                let r = disc.sqrt();
                if &r * &r == disc {
                    let two_a = BigInt::from(2) * a;
                    roots.insert(BigRational::new(-b + &r, two_a.clone()));
                    roots.insert(BigRational::new(-b - &r, two_a));
                }
            }
        }
        _ => {
            // p | constant term, q | leading coefficient
            for p in divisors(&poly[0])? {
                for q in divisors(&poly[poly.len() - 1])? {
                    for sign in [1, -1] {
                        let cand = BigRational::new(BigInt::from(sign) * &p, q.clone());
                        if eval_rational(poly, &cand).is_zero() {
                            roots.insert(cand);
                        }
                    }
                }
            }
        }
    }
    Ok(roots.into_iter().collect())
}

fn eval_rational(poly: &[BigInt], t: &BigRational) -> BigRational {
    poly.iter().rev().fold(BigRational::zero(), |acc, c| {
        acc * t + BigRational::from_integer(c.clone())
    })
}

fn divisors(n: &BigInt) -> Result<Vec<BigInt>, SolutionError> {
    let m = n
        .abs()
        .to_u128()
        .ok_or_else(|| SolutionError::InvalidForm("coefficient too large to factor".into()))?;
    let mut divs = vec![1u128];
    for (p, e) in arith::factor(m) {
        let current = divs.clone();
        let mut pk = 1u128;
        for _ in 0..e {
            pk *= p;
            divs.extend(current.iter().map(|d| d * pk));
        }
    }
    Ok(divs.into_iter().map(BigInt::from).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triple(e: u64, f: u64, n: u64) -> SolutionTriple {
        SolutionTriple::new(e, f, n).unwrap()
    }

    fn quad(v: [i64; 4]) -> Quadruple {
        Quadruple {
            x1: v[0].into(),
            x2: v[1].into(),
            y1: v[2].into(),
            y2: v[3].into(),
        }
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn enumerate_examples() {
        assert_eq!(enumerate_mef(DyadicBox::new(5, 2)), vec![triple(5, 2, 7)]);
        assert!(enumerate_mef(DyadicBox::new(5, 1)).is_empty());
        assert_eq!(
            enumerate_mef(DyadicBox::new(169, 2)),
            vec![triple(169, 2, 239)]
        );
    }

    #[test]
    fn enumerate_threads_match() {
        for (e, f) in [(64u64, 1024u64), (128, 512), (1, 1 << 20)] {
            let bx = DyadicBox::new(e, f);
            assert_eq!(enumerate_mef(bx), enumerate_mef_threads(bx, 4));
        }
    }

    #[test]
    fn bad_triple_rejected() {
        assert!(matches!(
            SolutionTriple::new(5u32, 2u32, 8u32),
            Err(SolutionError::BadTriple { .. })
        ));
        let fake = SolutionTriple {
            e: 5u32.into(),
            f: 3u32.into(),
            n: 7u32.into(),
        };
        assert!(decompose(&fake).is_err());
    }

    #[test]
    fn pell_examples() {
        let b = |v: u64| BigUint::from(v);
        let sols = pell_solutions(2, &b(200));
        let expect: Vec<_> = [(1, 1), (7, 5), (41, 29), (239, 169)]
            .iter()
            .map(|&(n, e)| (b(n), b(e)))
            .collect();
        assert_eq!(sols, expect);
        assert!(pell_solutions(3, &b(1_000_000)).is_empty());
        assert_eq!(
            pell_solutions(5, &b(20)),
            vec![(b(2), b(1)), (b(38), b(17))]
        );
        assert!(pell_solutions(4, &b(100)).is_empty());
        assert!(pell_solutions(1, &b(100)).is_empty());
    }

    #[test]
    fn continued_fraction_periods() {
        assert_eq!(sqrt_continued_fraction(2), Some((1, vec![2])));
        assert_eq!(sqrt_continued_fraction(13), Some((3, vec![1, 1, 1, 1, 6])));
        assert_eq!(sqrt_continued_fraction(9), None);
        let (n, e) = negative_pell_fundamental(13).unwrap();
        assert_eq!((n, e), (BigUint::from(18u32), BigUint::from(5u32)));
    }

    #[test]
    fn decompose_examples() {
        assert_eq!(decompose(&triple(5, 2, 7)).unwrap(), quad([1, 2, 1, 1]));
        assert_eq!(
            decompose(&triple(169, 2, 239)).unwrap(),
            quad([5, 12, 1, 1])
        );
        // (3 - 2i)^2 (2 + 5i) = 70 + i, canonical x = (2, 3)
        let q = decompose(&triple(13, 29, 70)).unwrap();
        assert_eq!(q, quad([2, 3, -2, -5]));
        assert!(q.is_valid());
    }

    #[test]
    fn decompose_e_one() {
        let q = decompose(&triple(1, 50, 7)).unwrap();
        assert!(q.is_valid());
        assert_eq!(q.e(), BigInt::one());
        assert_eq!(q.f(), BigInt::from(50));
    }

    #[test]
    fn gaussian_factors_reconstruct() {
        let t = triple(13, 29, 70);
        let (v, y) = gaussian_factors(&t).unwrap();
        assert_eq!(&v.square() * &y, GaussianInt::new(70, 1));
        let q = decompose(&t).unwrap();
        let prod = q.gaussian_product();
        assert_eq!(prod.im, BigInt::one());
        assert_eq!(prod.re.abs(), BigInt::from(70));
    }

    #[test]
    fn q_label_examples() {
        let bx = DyadicBox::new(8, 2);
        let l = q_label(&quad([1, 2, 1, 1]), bx).unwrap();
        assert_eq!(l.q1_kind, Q1Kind::Cross);
        assert_eq!((l.z1.clone(), l.z2.clone()), (BigInt::one(), BigInt::one()));
        assert_eq!((l.s.clone(), l.t.clone()), (rat(1, 2), rat(1, 1)));

        let l = q_label(&quad([-2, 3, 2, -5]), DyadicBox::new(16, 32)).unwrap();
        assert_eq!(l.q1_kind, Q1Kind::Cross);
        assert_eq!(
            (l.z1.clone(), l.z2.clone()),
            (BigInt::from(2), BigInt::from(-5))
        );
        assert_eq!((l.s.clone(), l.t.clone()), (rat(-2, 3), rat(-2, 5)));

        // diff = 0 ties go to the cross term
        let l = q_label(&quad([1, 1, 1, 7]), bx).unwrap();
        assert_eq!(l.q1_kind, Q1Kind::Cross);
    }

    #[test]
    fn q_label_degenerate() {
        let bx = DyadicBox::new(2, 2);
        assert!(matches!(
            q_label(&quad([1, 0, 0, 1]), bx),
            Err(SolutionError::DegenerateDenominator(_))
        ));
        // x = (0, 1): q1 = diff = -1, z = (y2, y1) = (-1, 0)
        assert!(matches!(
            q_label(&quad([0, 1, 0, -1]), bx),
            Err(SolutionError::DegenerateDenominator(_))
        ));
    }

    #[test]
    fn residual_examples() {
        let l = q_label(&quad([1, 2, 1, 1]), DyadicBox::new(8, 2)).unwrap();
        assert_eq!(residual(&l).unwrap(), rat(1, 4));
        assert_eq!(residual_identity(&l).unwrap(), rat(1, 4));

        let l = q_label(&quad([5, 12, 1, 1]), DyadicBox::new(256, 2)).unwrap();
        assert_eq!(l.q1_value(), BigInt::from(120));
        assert_eq!(residual(&l).unwrap(), rat(1, 120));
    }

    #[test]
    fn phi_closed_forms() {
        let s = rat(1, 2);
        assert_eq!(phi(Q1Kind::Cross, &s).unwrap(), rat(3, 4));
        assert_eq!(phi(Q1Kind::Diff, &rat(1, 3)).unwrap(), rat(3, 4));
        // derivative against a symmetric difference quotient with exact rationals
        for kind in [Q1Kind::Cross, Q1Kind::Diff] {
            let s = rat(2, 7);
            let h = rat(1, 1_000_000);
            let fd = (phi(kind, &(&s + &h)).unwrap() - phi(kind, &(&s - &h)).unwrap())
                / (rat(2, 1) * &h);
            let d = phi_derivative(kind, &s).unwrap();
            let err = (fd - d).abs();
            assert!(err < rat(1, 1_000_000), "{kind:?}");
        }
    }

    #[test]
    fn bihom_examples() {
        let g = BihomForm::new(1, 1, &[0, -1, 1, 0]).unwrap(); // x1 y2 - x2 y1
        assert_eq!(bihom_count(&g, 1).unwrap(), 16);
        assert_eq!(bihom_count(&g, 2).unwrap(), 32);
        // x1^2 (y1^2 + y2^2) + x2^2 (y1^2 + 2 y2^2) is positive definite
        let g = BihomForm::new(2, 2, &[2, 0, 1, 0, 0, 0, 1, 0, 1]).unwrap();
        assert_eq!(bihom_count(&g, 5).unwrap(), 0);
    }

    #[test]
    fn bihom_rejects_bad_input() {
        assert!(BihomForm::new(0, 1, &[1, 1]).is_err());
        assert!(BihomForm::new(1, 1, &[1, 1, 1]).is_err());
        assert!(BihomForm::new(1, 1, &[0, 0, 0, 0]).is_err());
        let g = BihomForm::new(1, 1, &[0, -1, 1, 0]).unwrap();
        assert!(bihom_count(&g, 0).is_err());
        // x1 y1 - x1 y2 vanishes on the whole fiber over x = (0, 1)
        let g = BihomForm::new(1, 1, &[0, 0, -1, 1]).unwrap();
        assert!(matches!(
            bihom_count(&g, 2),
            Err(SolutionError::VanishingFiber { .. })
        ));
    }

    /// Direct scan over a small `y` box.
    fn bihom_brute(g: &BihomForm, x_max: i64, y_max: i64) -> u64 {
        let mut n = 0;
        for x1 in -x_max..=x_max {
            for x2 in -x_max..=x_max {
                if x1.gcd(&x2) != 1 {
                    continue;
                }
                for y1 in -y_max..=y_max {
                    for y2 in -y_max..=y_max {
                        if y1.gcd(&y2) == 1
                            && g.eval(&x1.into(), &x2.into(), &y1.into(), &y2.into())
                                .is_zero()
                        {
                            n += 1;
                        }
                    }
                }
            }
        }
        n
    }

    #[test]
    fn bihom_matches_brute_scan() {
        let forms = [
            BihomForm::new(1, 1, &[0, -1, 1, 0]).unwrap(),
            BihomForm::new(2, 1, &[-1, 0, 0, 2, 1, 0]).unwrap(),
            BihomForm::new(1, 2, &[1, 0, -1, 0, 1, 0]).unwrap(),
            BihomForm::new(2, 3, &[0, 1, 0, -1, 2, 0, 0, 0, 0, 0, 3, -1]).unwrap(),
        ];
        for g in &forms {
            let x_max = 4;
            // every root has |y| <= ||G|| X^a, which is small enough to scan
            let y_max = (g.height() * BigInt::from(x_max).pow(g.a))
                .to_i64()
                .unwrap();
            assert_eq!(bihom_count(g, x_max).unwrap(), bihom_brute(g, x_max, y_max));
        }
    }
}
