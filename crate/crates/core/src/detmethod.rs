//! Real-variable determinant method on short `s`-intervals.
//!
//! The `s`-axis is cut into intervals `(x3/M, (x3+1)/M]`. For each interval
//! the rational points `(s, t)` of the solutions falling in it are evaluated
//! on the monomials `s^k t^l` (`k <= K`, `l <= L`); a rank deficiency of that
//! matrix yields an integer polynomial `C_I(s, t)` through every point.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::solutions::{self, DyadicBox, Q1Kind, SolutionError, SolutionTriple};

/// Default cap on the `t`-degree.
pub const DEFAULT_L: u32 = 3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DetError {
    #[error("monomial matrix has full rank {rank} = H with J = {rows} rows")]
    FullRank { rank: usize, rows: usize },
    #[error(transparent)]
    Solution(#[from] SolutionError),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Clamp {
    /// `M` was raised to `ceil(sqrt(x))`.
    Lower,
    /// `M` was cut down to `x`.
    Upper,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetConfig {
    pub x: u64,
    pub e_top: u64,
    pub f_top: u64,
    pub eta: f64,
    pub m: u64,
    pub k: u32,
    pub l: u32,
    /// Set when the unclamped `M` fell outside `[ceil(sqrt x), x]`.
    pub clamped: Option<Clamp>,
}

impl DetConfig {
    /// `H = (K + 1)(L + 1)`, the number of monomials.
    pub fn h(&self) -> usize {
        (self.k as usize + 1) * (self.l as usize + 1)
    }

    pub fn dyadic_box(&self) -> DyadicBox {
        DyadicBox::new(self.e_top, self.f_top)
    }
}

/// Picks the interval count `M` from `log M >= (9/8)(1 + eta) log E log F / log x`,
/// with the default `L`.
pub fn choose_m(x: u64, e_top: u64, f_top: u64, eta: f64) -> Result<DetConfig, DetError> {
    choose_m_with_l(x, e_top, f_top, eta, DEFAULT_L)
}

pub fn choose_m_with_l(
    x: u64,
    e_top: u64,
    f_top: u64,
    eta: f64,
    l: u32,
) -> Result<DetConfig, DetError> {
    if x < 4 || e_top < 2 || f_top < 2 || eta.is_nan() || eta <= 0.0 || l == 0 {
        return Err(DetError::InvalidConfig(format!(
            "need x >= 4, E, F >= 2, eta > 0, L >= 1; got x = {x}, E = {e_top}, F = {f_top}, eta = {eta}, L = {l}"
        )));
    }
    let (lx, le, lf) = ((x as f64).ln(), (e_top as f64).ln(), (f_top as f64).ln());
    let log_m = 9.0 / 8.0 * (1.0 + eta) * le * lf / lx;
    let lower = x.isqrt() + u64::from(x.isqrt().pow(2) != x);
    let raw = log_m.exp().ceil();
    let (m, clamped) = if raw < lower as f64 {
        (lower, Some(Clamp::Lower))
    } else if raw > x as f64 {
        (x, Some(Clamp::Upper))
    } else {
        (raw as u64, None)
    };
    let k = ((l as f64 * lf / le).floor() as u32).max(1);
    Ok(DetConfig {
        x,
        e_top,
        f_top,
        eta,
        m,
        k,
        l,
        clamped,
    })
}

/// The interval `(x3/M, (x3+1)/M]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IntervalSpec {
    pub x3: i64,
    pub m: u64,
}

impl IntervalSpec {
    pub fn new(x3: i64, m: u64) -> Self {
        assert!(m >= 1, "M must be positive");
        IntervalSpec { x3, m }
    }

    /// The unique interval of denominator `m` containing `s`.
    pub fn containing(s: &BigRational, m: u64) -> Self {
        // x3 < sM <= x3 + 1
        let sm = s * BigRational::from_integer(m.into());
        let x3: BigInt = sm.ceil().to_integer() - 1;
        IntervalSpec::new(x3.to_i64().expect("x3 fits in i64"), m)
    }

    pub fn s0(&self) -> BigRational {
        BigRational::new(self.x3.into(), self.m.into())
    }

    pub fn contains(&self, s: &BigRational) -> bool {
        let sm = s * BigRational::from_integer(self.m.into());
        sm > BigRational::from_integer(self.x3.into())
            && sm <= BigRational::from_integer((self.x3 + 1).into())
    }
}

/// Exact point `(s, t)`; both fractions are kept in lowest terms with
/// positive denominators.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RationalPoint {
    pub s: BigRational,
    pub t: BigRational,
    pub kind: Q1Kind,
}

impl RationalPoint {
    pub fn new(s: BigRational, t: BigRational, kind: Q1Kind) -> Self {
        RationalPoint { s, t, kind }
    }

    pub fn s_num(&self) -> &BigInt {
        self.s.numer()
    }

    pub fn s_den(&self) -> &BigInt {
        self.s.denom()
    }

    pub fn t_num(&self) -> &BigInt {
        self.t.numer()
    }

    pub fn t_den(&self) -> &BigInt {
        self.t.denom()
    }

    /// Taylor coordinates `u = s - s0`, `v = t - phi(s0) - u phi'(s0)`
    /// against the interval's left end. `None` where `phi` is singular at `s0`.
    pub fn shift(&self, interval: &IntervalSpec) -> Option<(BigRational, BigRational)> {
        let s0 = interval.s0();
        let u = &self.s - &s0;
        let phi0 = solutions::phi(self.kind, &s0).ok()?;
        let dphi0 = solutions::phi_derivative(self.kind, &s0).ok()?;
        let v = &self.t - phi0 - &u * dphi0;
        Some((u, v))
    }
}

/// Decomposes and labels each triple once.
pub fn label_points(
    triples: &[SolutionTriple],
    bx: DyadicBox,
) -> Result<Vec<RationalPoint>, DetError> {
    triples
        .iter()
        .map(|t| {
            let q = solutions::decompose(t)?;
            let l = solutions::q_label(&q, bx)?;
            Ok(RationalPoint::new(l.s, l.t, l.q1_kind))
        })
        .collect()
}

/// The points of `triples` whose `s` lies in `interval`. No deduplication.
pub fn collect_points(
    triples: &[SolutionTriple],
    cfg: &DetConfig,
    interval: &IntervalSpec,
) -> Result<Vec<RationalPoint>, DetError> {
    Ok(label_points(triples, cfg.dyadic_box())?
        .into_iter()
        .filter(|p| interval.contains(&p.s))
        .collect())
}

/// `J x H` matrix of `s^k t^l`, columns in `(k, l)` lexicographic order, `k` outer.
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialMatrix {
    pub k: u32,
    pub l: u32,
    pub rows: Vec<Vec<BigRational>>,
}

impl MonomialMatrix {
    pub fn h(&self) -> usize {
        (self.k as usize + 1) * (self.l as usize + 1)
    }

    pub fn column(k: u32, l: u32, cap_l: u32) -> usize {
        k as usize * (cap_l as usize + 1) + l as usize
    }
}

pub fn monomial_matrix(points: &[RationalPoint], k: u32, l: u32) -> MonomialMatrix {
    let rows = points
        .iter()
        .map(|p| {
            let s_pows = powers(&p.s, k);
            let t_pows = powers(&p.t, l);
            s_pows
                .iter()
                .flat_map(|sk| t_pows.iter().map(move |tl| sk * tl))
                .collect()
        })
        .collect();
    MonomialMatrix { k, l, rows }
}

fn powers(v: &BigRational, n: u32) -> Vec<BigRational> {
    let mut out = Vec::with_capacity(n as usize + 1);
    out.push(BigRational::one());
    for i in 1..=n as usize {
        let next = &out[i - 1] * v;
        out.push(next);
    }
    out
}

/// Integer polynomial `sum c[k][l] s^k t^l` with content 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuxPolynomial {
    pub k: u32,
    pub l: u32,
    pub coeffs: Vec<Vec<BigInt>>,
}

impl AuxPolynomial {
    pub fn constant_one(k: u32, l: u32) -> Self {
        let mut coeffs = vec![vec![BigInt::zero(); l as usize + 1]; k as usize + 1];
        coeffs[0][0] = BigInt::one();
        AuxPolynomial { k, l, coeffs }
    }

    fn from_vector(k: u32, l: u32, v: &[BigInt]) -> Self {
        let coeffs = v.chunks(l as usize + 1).map(|c| c.to_vec()).collect();
        AuxPolynomial { k, l, coeffs }
    }

    pub fn as_vector(&self) -> Vec<BigInt> {
        self.coeffs.iter().flatten().cloned().collect()
    }

    pub fn max_abs_coeff(&self) -> BigInt {
        self.coeffs
            .iter()
            .flatten()
            .map(Signed::abs)
            .max()
            .unwrap_or_default()
    }

    pub fn content(&self) -> BigInt {
        self.coeffs
            .iter()
            .flatten()
            .fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    pub fn eval(&self, s: &BigRational, t: &BigRational) -> BigRational {
        let sp = powers(s, self.k);
        let tp = powers(t, self.l);
        let mut acc = BigRational::zero();
        for (k, row) in self.coeffs.iter().enumerate() {
            for (l, c) in row.iter().enumerate() {
                if !c.is_zero() {
                    acc += BigRational::from_integer(c.clone()) * &sp[k] * &tp[l];
                }
            }
        }
        acc
    }

    /// Exact vanishing test with denominators cleared: evaluates
    /// `sum c[k][l] a^k b^(K-k) c^l d^(L-l)` for `s = a/b`, `t = c/d`.
    pub fn vanishes_at(&self, p: &RationalPoint) -> bool {
        let (a, b) = (p.s_num(), p.s_den());
        let (c, d) = (p.t_num(), p.t_den());
        let mut acc = BigInt::zero();
        for (k, row) in self.coeffs.iter().enumerate() {
            let sk = a.pow(k as u32) * b.pow(self.k - k as u32);
            for (l, coeff) in row.iter().enumerate() {
                if !coeff.is_zero() {
                    acc += coeff * &sk * c.pow(l as u32) * d.pow(self.l - l as u32);
                }
            }
        }
        acc.is_zero()
    }
}

/// Row echelon form by fraction-free (Bareiss) elimination. Returns the pivot
/// column of each non-zero row.
fn bareiss_echelon(a: &mut [Vec<BigInt>]) -> Vec<usize> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let num = &a[r][c] * &a[i][j] - &a[i][c] * &a[r][j];
                let (q, rem) = num.div_rem(&prev);
                debug_assert!(rem.is_zero(), "Bareiss division must be exact");
                a[i][j] = q;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Scales each row by the lcm of its denominators.
fn integer_rows(m: &MonomialMatrix) -> Vec<Vec<BigInt>> {
    m.rows
        .iter()
        .map(|row| {
            let lcm = row.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
            row.iter().map(|v| v.numer() * (&lcm / v.denom())).collect()
        })
        .collect()
}

/// Integer kernel vector of `matrix` attached to its first non-pivot column,
/// normalized to content 1 with that column's coefficient positive.
pub fn kernel_polynomial(matrix: &MonomialMatrix) -> Result<AuxPolynomial, DetError> {
    let h = matrix.h();
    let mut a = integer_rows(matrix);
    let pivots = bareiss_echelon(&mut a);
    let Some(free) = (0..h).find(|&c| pivots.get(c) != Some(&c)) else {
        return Err(DetError::FullRank {
            rank: pivots.len(),
            rows: matrix.rows.len(),
        });
    };
    // Columns 0..free are pivots of rows 0..free; set c[free] = 1 and every
    // later coordinate to 0, then back-substitute.
    let mut sol = vec![BigRational::zero(); h];
    sol[free] = BigRational::one();
    for r in (0..free).rev() {
        let mut acc = BigRational::from_integer(a[r][free].clone());
        for (j, sj) in sol.iter().enumerate().take(free).skip(r + 1) {
            acc += BigRational::from_integer(a[r][j].clone()) * sj;
        }
        sol[r] = -acc / BigRational::from_integer(a[r][r].clone());
    }
    let lcm = sol.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let ints: Vec<BigInt> = sol.iter().map(|v| v.numer() * (&lcm / v.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    let ints: Vec<BigInt> = ints.into_iter().map(|c| c / &g).collect();
    Ok(AuxPolynomial::from_vector(matrix.k, matrix.l, &ints))
}

/// `matrix * coeffs == 0` exactly.
pub fn annihilates(matrix: &MonomialMatrix, poly: &AuxPolynomial) -> bool {
    let v = poly.as_vector();
    matrix.rows.iter().all(|row| {
        row.iter()
            .zip(&v)
            .fold(BigRational::zero(), |acc, (m, c)| {
                acc + m * BigRational::from_integer(c.clone())
            })
            .is_zero()
    })
}

/// Outcome of the determinant method on one interval.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxiliaryCurve {
    pub interval: IntervalSpec,
    pub poly: AuxPolynomial,
    /// Number of points `J` the curve was fitted through.
    pub points: usize,
    /// No solutions fell in the interval; `poly` is the constant 1.
    pub no_points: bool,
    pub verified: bool,
    pub max_abs_coeff: BigInt,
    /// `log(max |coeff|) / log x`.
    pub kappa: f64,
    /// `(u, v)` per point where the Taylor shift is defined.
    pub shifts: Vec<Option<(BigRational, BigRational)>>,
}

pub fn auxiliary_curve(
    triples: &[SolutionTriple],
    cfg: &DetConfig,
    interval: &IntervalSpec,
) -> Result<AuxiliaryCurve, DetError> {
    let points = collect_points(triples, cfg, interval)?;
    curve_through(&points, cfg, interval)
}

/// Fits and verifies the curve for points already known to lie in `interval`.
pub fn curve_through(
    points: &[RationalPoint],
    cfg: &DetConfig,
    interval: &IntervalSpec,
) -> Result<AuxiliaryCurve, DetError> {
    if points.is_empty() {
        return Ok(AuxiliaryCurve {
            interval: *interval,
            poly: AuxPolynomial::constant_one(cfg.k, cfg.l),
            points: 0,
            no_points: true,
            verified: true,
            max_abs_coeff: BigInt::one(),
            kappa: 0.0,
            shifts: Vec::new(),
        });
    }
    let matrix = monomial_matrix(points, cfg.k, cfg.l);
    let poly = kernel_polynomial(&matrix)?;
    let verified = points.iter().all(|p| poly.vanishes_at(p));
    let max_abs_coeff = poly.max_abs_coeff();
    let kappa = big_ln(&max_abs_coeff) / (cfg.x as f64).ln();
    Ok(AuxiliaryCurve {
        interval: *interval,
        points: points.len(),
        no_points: false,
        verified,
        max_abs_coeff,
        kappa,
        shifts: points.iter().map(|p| p.shift(interval)).collect(),
        poly,
    })
}

fn big_ln(v: &BigInt) -> f64 {
    let bits = v.bits();
    if bits < 1000 {
        v.to_f64().expect("finite").ln()
    } else {
        let shift = bits - 900;
        (v >> shift).to_f64().expect("finite").ln() + shift as f64 * std::f64::consts::LN_2
    }
}

/// One row of an interval sweep.
#[derive(Debug, Clone, PartialEq)]
pub enum SweepOutcome {
    Curve(AuxiliaryCurve),
    Failed {
        interval: IntervalSpec,
        points: usize,
        error: DetError,
    },
}

/// Runs [`curve_through`] on every non-empty interval of `triples`, in `x3` order.
pub fn sweep_intervals(
    triples: &[SolutionTriple],
    cfg: &DetConfig,
) -> Result<Vec<SweepOutcome>, DetError> {
    let mut groups: BTreeMap<i64, Vec<RationalPoint>> = BTreeMap::new();
    for p in label_points(triples, cfg.dyadic_box())? {
        let iv = IntervalSpec::containing(&p.s, cfg.m);
        groups.entry(iv.x3).or_default().push(p);
    }
    Ok(groups
        .into_iter()
        .map(|(x3, pts)| {
            let iv = IntervalSpec::new(x3, cfg.m);
            match curve_through(&pts, cfg, &iv) {
                Ok(c) => SweepOutcome::Curve(c),
                Err(error) => SweepOutcome::Failed {
                    interval: iv,
                    points: pts.len(),
                    error,
                },
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solutions::enumerate_mef;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn pt(s: BigRational, t: BigRational) -> RationalPoint {
        RationalPoint::new(s, t, Q1Kind::Cross)
    }

    fn cfg_kl(k: u32, l: u32) -> DetConfig {
        DetConfig {
            x: 100,
            e_top: 8,
            f_top: 2,
            eta: 0.1,
            m: 10,
            k,
            l,
            clamped: None,
        }
    }

    #[test]
    fn choose_m_balanced_box() {
        // E = F = x^(2/3): log M / log x = (1 + eta) / 2
        let x = 1_000_000u64;
        let c = choose_m(x, 10_000, 10_000, 0.1).unwrap();
        let expect = (0.55f64 * (x as f64).ln()).exp().ceil() as u64;
        assert!(c.m.abs_diff(expect) <= 1, "{} vs {expect}", c.m);
        assert_eq!(c.k, 3);
        assert_eq!(c.l, 3);
        assert_eq!(c.h(), 16);
    }

    #[test]
    fn choose_m_unbalanced_box() {
        // E = x^(1/2), F = x: exponent 9 (1 + eta) / 16
        let x = 100_000_000u64;
        let c = choose_m(x, 10_000, x, 0.2).unwrap();
        let expect = (9.0 * 1.2 / 16.0 * (x as f64).ln()).exp();
        assert!((c.m as f64 / expect - 1.0).abs() < 1e-4);
        assert_eq!(c.k, 6);
        assert_eq!(c.clamped, None);
    }

    #[test]
    fn choose_m_clamps() {
        let c = choose_m(10_000, 5_000, 5_000, 100.0).unwrap();
        assert_eq!((c.m, c.clamped), (10_000, Some(Clamp::Upper)));
        let c = choose_m(10_000, 2, 2, 0.1).unwrap();
        assert_eq!((c.m, c.clamped), (100, Some(Clamp::Lower)));
        let c = choose_m(10, 2, 2, 0.1).unwrap();
        assert_eq!(c.m, 4);
        assert!(choose_m(3, 2, 2, 0.1).is_err());
        assert!(choose_m(100, 2, 2, 0.0).is_err());
        assert!(choose_m(100, 2, 2, f64::NAN).is_err());
    }

    #[test]
    fn interval_membership() {
        let iv = IntervalSpec::new(3, 10);
        assert!(iv.contains(&rat(4, 10)));
        assert!(!iv.contains(&rat(3, 10)));
        assert!(iv.contains(&rat(7, 20)));
        assert_eq!(IntervalSpec::containing(&rat(4, 10), 10), iv);
        assert_eq!(IntervalSpec::containing(&rat(-1, 3), 10).x3, -4);
        assert_eq!(IntervalSpec::containing(&rat(-1, 1), 10).x3, -11);
    }

    #[test]
    fn collect_points_examples() {
        let t = SolutionTriple::new(5u32, 2u32, 7u32).unwrap();
        let cfg = cfg_kl(1, 1);
        let pts =
            collect_points(std::slice::from_ref(&t), &cfg, &IntervalSpec::new(4, 10)).unwrap();
        assert_eq!(pts.len(), 1);
        assert_eq!((pts[0].s.clone(), pts[0].t.clone()), (rat(1, 2), rat(1, 1)));
        assert!(collect_points(&[t], &cfg, &IntervalSpec::new(0, 10))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn collect_points_keeps_equal_s() {
        // (13, 29, 70) gives s = 2/3; search a box for another triple with s = 2/3
        let triples = vec![
            SolutionTriple::new(13u32, 29u32, 70u32).unwrap(),
            SolutionTriple::new(13u32, 29u32, 70u32).unwrap(),
        ];
        let cfg = DetConfig {
            e_top: 16,
            f_top: 32,
            ..cfg_kl(1, 1)
        };
        let pts = collect_points(&triples, &cfg, &IntervalSpec::new(6, 10)).unwrap();
        assert_eq!(pts.len(), 2);
    }

    #[test]
    fn monomial_matrix_examples() {
        let m = monomial_matrix(&[pt(rat(1, 2), rat(3, 4))], 1, 1);
        assert_eq!(m.rows[0], vec![rat(1, 1), rat(3, 4), rat(1, 2), rat(3, 8)]);
        assert_eq!(m.h(), 4);
        let m = monomial_matrix(&[pt(rat(1, 2), rat(0, 1)), pt(rat(2, 3), rat(5, 1))], 1, 0);
        assert_eq!(
            m.rows,
            vec![vec![rat(1, 1), rat(1, 2)], vec![rat(1, 1), rat(2, 3)]]
        );
    }

    #[test]
    fn kernel_single_point() {
        let p = pt(rat(1, 2), rat(3, 4));
        let m = monomial_matrix(std::slice::from_ref(&p), 1, 1);
        let poly = kernel_polynomial(&m).unwrap();
        assert!(poly.vanishes_at(&p));
        assert!(annihilates(&m, &poly));
        assert!(poly.content().is_one());
        // first free column is t (index 1): -3/4 + t
        assert_eq!(
            poly.as_vector(),
            vec![(-3).into(), 4.into(), 0.into(), 0.into()]
        );
    }

    #[test]
    fn kernel_on_diagonal_line() {
        let pts: Vec<_> = [(1, 2), (1, 3), (2, 5)]
            .iter()
            .map(|&(a, b)| pt(rat(a, b), rat(a, b)))
            .collect();
        let m = monomial_matrix(&pts, 1, 1);
        let poly = kernel_polynomial(&m).unwrap();
        // s - t, attached to the free column of s
        assert_eq!(
            poly.as_vector(),
            vec![0.into(), (-1).into(), 1.into(), 0.into()]
        );
    }

    #[test]
    fn kernel_full_rank() {
        let pts = [
            pt(rat(1, 2), rat(3, 7)),
            pt(rat(2, 9), rat(-5, 4)),
            pt(rat(7, 3), rat(1, 11)),
            pt(rat(-4, 5), rat(6, 13)),
        ];
        let m = monomial_matrix(&pts, 1, 1);
        assert!(matches!(
            kernel_polynomial(&m),
            Err(DetError::FullRank { rank: 4, rows: 4 })
        ));
    }

    #[test]
    fn bareiss_rank_deficient_middle_column() {
        // second column is a multiple of the first
        let mut a: Vec<Vec<BigInt>> = [[1, 2, 3], [2, 4, 7], [3, 6, 1]]
            .iter()
            .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
            .collect();
        let piv = bareiss_echelon(&mut a);
        assert_eq!(piv, vec![0, 2]);
    }

    #[test]
    fn auxiliary_curve_marks_empty_interval() {
        let cfg = cfg_kl(1, 1);
        let c = auxiliary_curve(&[], &cfg, &IntervalSpec::new(0, 10)).unwrap();
        assert!(c.no_points && c.verified);
        assert_eq!(c.poly, AuxPolynomial::constant_one(1, 1));
    }

    #[test]
    fn auxiliary_curve_one_point() {
        let t = SolutionTriple::new(5u32, 2u32, 7u32).unwrap();
        let cfg = cfg_kl(1, 1);
        let c = auxiliary_curve(&[t], &cfg, &IntervalSpec::new(4, 10)).unwrap();
        assert!(c.verified && !c.no_points);
        assert_eq!(c.points, 1);
        assert!(c.shifts[0].is_some());
    }

    #[test]
    fn sweep_small_box() {
        let x = 10_000u64;
        let (e, f) = (464u64, 464u64);
        let cfg = choose_m(x, e, f, 0.1).unwrap();
        let triples = enumerate_mef(cfg.dyadic_box());
        assert!(!triples.is_empty());
        let out = sweep_intervals(&triples, &cfg).unwrap();
        let total: usize = out
            .iter()
            .map(|o| match o {
                SweepOutcome::Curve(c) => c.points,
                SweepOutcome::Failed { points, .. } => *points,
            })
            .sum();
        assert_eq!(total, triples.len());
        for o in &out {
            if let SweepOutcome::Curve(c) = o {
                assert!(c.verified);
            }
        }
    }

    #[test]
    fn taylor_shift_matches_definition() {
        let p = pt(rat(1, 2), rat(1, 1));
        let iv = IntervalSpec::new(4, 10);
        let (u, v) = p.shift(&iv).unwrap();
        assert_eq!(u, rat(1, 10));
        // phi(2/5) = (1 - 4/25) / (4/5) = 21/20, phi'(2/5) = -(1 + 4/25) / (8/25) = -29/8
        assert_eq!(v, rat(1, 1) - rat(21, 20) + rat(1, 10) * rat(29, 8));
        assert!(pt(rat(1, 2), rat(1, 1))
            .shift(&IntervalSpec::new(0, 10))
            .is_none());
    }
}
