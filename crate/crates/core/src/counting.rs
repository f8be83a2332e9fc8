//! Exact counts of square-free `n^2 + 1`, the windowed Möbius decomposition,
//! the density constant `c0`, error-term scans and the exponent bounds.

use std::fmt;
use std::sync::OnceLock;

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::arith;

/// Largest `x` accepted by [`count_direct`] unless a different limit is passed.
pub const DIRECT_LIMIT: u64 = 10_000_000;

/// Prime cutoff for the cached reference value of `c0`.
pub const REFERENCE_CUTOFF: u64 = 100_000_000;

/// Engineering constant in the series tail bound `sum_{d>D} mu^2(d) rho(d) / d^2 <= C / D`.
pub const SERIES_TAIL_CONSTANT: f64 = 8.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CountError {
    #[error("x = {x} exceeds the configured limit {limit}")]
    RangeTooLarge { x: u64, limit: u64 },
    #[error("need at least 3 rows with non-zero error to fit, got {usable}")]
    DegenerateFit { usable: usize },
    #[error("psi = {psi} lies outside [1/2, 3/4]")]
    OutOfRange { psi: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// One row of `(x, N(x), c0 x, N(x) - c0 x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CountReport {
    pub x: u64,
    pub count: u64,
    pub main: f64,
    pub error: f64,
    /// Uncertainty in `main` inherited from the tail bound of the reference `c0`.
    pub main_tol: f64,
}

impl CountReport {
    fn new(x: u64, count: u64) -> Self {
        let c0 = c0_reference();
        let main = c0.value * x as f64;
        CountReport {
            x,
            count,
            main,
            error: count as f64 - main,
            main_tol: c0.tail_bound * x as f64,
        }
    }

    pub const CSV_HEADER: &'static str = "x,count,main,error";
}

/// Exact `N(x)` by testing every `n^2 + 1` for square-freeness.
pub fn count_direct(x: u64) -> Result<CountReport, CountError> {
    count_direct_with_limit(x, DIRECT_LIMIT)
}

pub fn count_direct_with_limit(x: u64, limit: u64) -> Result<CountReport, CountError> {
    if x == 0 {
        return Err(CountError::InvalidArgument("x must be at least 1".into()));
    }
    if x > limit {
        return Err(CountError::RangeTooLarge { x, limit });
    }
    let count = (1..=x)
        .filter(|&n| arith::is_squarefree_u128(n as u128 * n as u128 + 1))
        .count() as u64;
    Ok(CountReport::new(x, count))
}

/// Exact `N(x)` by marking the two progressions `n = m (mod p^2)` for each
/// prime `p = 1 (mod 4)` up to `x`.
///
/// Primes above `x` cannot matter: `p^2 | n^2 + 1` with `n <= x` forces
/// `p^2 <= x^2 + 1`, hence `p <= x`.
pub fn count_sieve(x: u64) -> CountReport {
    count_sieve_threads(x, 1)
}

pub fn count_sieve_threads(x: u64, threads: usize) -> CountReport {
    assert!(x >= 1, "x must be at least 1");
    let marks = non_squarefree_marks(x, threads);
    let bad = marks.iter().filter(|&&m| m).count() as u64;
    CountReport::new(x, x - bad)
}

/// `marks[n - 1]` is true when `n^2 + 1` is not square-free, for `1 <= n <= x`.
pub(crate) fn non_squarefree_marks(x: u64, threads: usize) -> Vec<bool> {
    let roots: Vec<(u64, [u64; 2])> = arith::primes_up_to(x)
        .into_iter()
        .filter(|p| p % 4 == 1)
        .map(|p| (p * p, arith::roots_mod_prime_square(p)))
        .collect();
    let mut marks = vec![false; x as usize];
    let threads = threads.max(1);
    let chunk = (x as usize).div_ceil(threads).max(1);
    let mark_chunk = |(ci, slice): (usize, &mut [bool])| {
        // slice covers n in [lo, hi]
        let lo = (ci * chunk) as u64 + 1;
        let hi = lo + slice.len() as u64 - 1;
        for &(q, rs) in &roots {
            for r in rs {
                if r > hi {
                    continue;
                }
                let mut n = if r >= lo {
                    r
                } else {
                    r + (lo - r).div_ceil(q) * q
                };
                while n <= hi {
                    slice[(n - lo) as usize] = true;
                    n += q;
                }
            }
        }
    };
    if threads == 1 {
        marks.chunks_mut(chunk).enumerate().for_each(mark_chunk);
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool");
        pool.install(|| marks.par_chunks_mut(chunk).enumerate().for_each(mark_chunk));
    }
    marks
}

// ---------------------------------------------------------------------------
// Windowed decomposition
// ---------------------------------------------------------------------------

/// The decomposition of `N(2x) - N(x)` into small-`d` progression counts and
/// an enumerated large-`d` tail.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstermannSplit {
    pub x: u64,
    pub d_cut: u64,
    /// `x * sum_{d <= D} mu(d) rho(d) / d^2`.
    pub main_sum: f64,
    /// `sum_{d <= D} mu(d) #{x < n <= 2x : d^2 | n^2 + 1}`.
    pub progression_total: i64,
    /// `#{(d, n) : d > D, mu(d) != 0, d^2 | n^2 + 1, x < n <= 2x}`.
    pub tail_triples: u64,
    /// The signed version of `tail_triples`, weighted by `mu(d)`.
    pub tail_signed: i64,
    /// `N(2x) - N(x)`.
    pub exact: i64,
}

impl EstermannSplit {
    pub fn discrepancy(&self) -> i64 {
        self.exact - self.progression_total - self.tail_signed
    }

    pub fn identity_holds(&self) -> bool {
        self.discrepancy() == 0
    }
}

/// `#{lo < n <= hi : n = m (mod q)}`.
fn progression_count(lo: i128, hi: i128, m: i128, q: i128) -> i128 {
    (hi - m).div_euclid(q) - (lo - m).div_euclid(q)
}

pub fn estermann_split(x: u64, d_cut: u64) -> Result<EstermannSplit, CountError> {
    if x == 0 || d_cut == 0 || d_cut > x {
        return Err(CountError::InvalidArgument(format!(
            "need 1 <= D <= x, got x = {x}, D = {d_cut}"
        )));
    }
    let (lo, hi) = (x as i128, 2 * x as i128);

    let mut progression_total = 0i64;
    let mut density = 0f64;
    for d in 1..=d_cut {
        let mu = arith::mobius(d);
        if mu == 0 {
            continue;
        }
        let roots = arith::roots_mod_square(d);
        if roots.is_empty() {
            continue;
        }
        let q = d as i128 * d as i128;
        let hits: i128 = roots
            .iter()
            .map(|m| progression_count(lo, hi, m.to_i128().expect("m < d^2"), q))
            .sum();
        progression_total += mu as i64 * hits as i64;
        density += mu as f64 * roots.len() as f64 / (d as f64 * d as f64);
    }

    let mut tail_triples = 0u64;
    let mut tail_signed = 0i64;
    for n in x + 1..=2 * x {
        let square_primes: Vec<u128> = arith::factor(n as u128 * n as u128 + 1)
            .into_iter()
            .filter(|&(_, e)| e >= 2)
            .map(|(p, _)| p)
            .collect();
        for mask in 1u32..(1 << square_primes.len()) {
            let mut d = 1u128;
            for (i, p) in square_primes.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    d *= p;
                }
            }
            if d > d_cut as u128 {
                tail_triples += 1;
                tail_signed += if mask.count_ones() % 2 == 0 { 1 } else { -1 };
            }
        }
    }

    let marks = non_squarefree_marks(2 * x, 1);
    let exact = marks[x as usize..].iter().filter(|&&m| !m).count() as i64;

    Ok(EstermannSplit {
        x,
        d_cut,
        main_sum: x as f64 * density,
        progression_total,
        tail_triples,
        tail_signed,
        exact,
    })
}

/// [`estermann_split`] with the default cut `D = floor(sqrt(x))`.
pub fn estermann_split_default(x: u64) -> Result<EstermannSplit, CountError> {
    estermann_split(x, x.isqrt().max(1))
}

// ---------------------------------------------------------------------------
// The constant c0
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstantMethod {
    PrimeProduct,
    MuRhoSeries,
}

impl fmt::Display for ConstantMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConstantMethod::PrimeProduct => "prime-product",
            ConstantMethod::MuRhoSeries => "mu-rho-series",
        })
    }
}

/// An estimate of `c0` with a rigorous half-width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantEstimate {
    pub value: f64,
    pub tail_bound: f64,
    pub method: ConstantMethod,
    pub cutoff: u64,
}

impl ConstantEstimate {
    pub fn lower(&self) -> f64 {
        self.value - self.tail_bound
    }

    pub fn upper(&self) -> f64 {
        self.value + self.tail_bound
    }

    pub fn width(&self) -> f64 {
        2.0 * self.tail_bound
    }

    pub fn overlaps(&self, other: &ConstantEstimate) -> bool {
        self.lower() <= other.upper() && other.lower() <= self.upper()
    }
}

/// Kahan-compensated running sum.
#[derive(Default)]
struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    fn add(&mut self, v: f64) {
        let y = v - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }
}

/// `c0 ~ (1/2) prod_{p <= P, p = 1 mod 4} (1 - 2/p^2)`.
///
/// The omitted factors satisfy `0 <= -sum_{p > P} log(1 - 2/p^2) <= sum_{n > P} 4/n^2 <= 4/P`
/// (using `-log(1 - y) <= 2y` for `y <= 1/2`), so the truncated product
/// overshoots `c0` by at most `value * 4/P < 4/P`.
pub fn c0_product(cutoff: u64) -> Result<ConstantEstimate, CountError> {
    if cutoff < 5 {
        return Err(CountError::InvalidArgument(format!(
            "prime cutoff must be at least 5, got {cutoff}"
        )));
    }
    let mut log_sum = KahanSum::default();
    arith::for_each_prime(cutoff, |p| {
        if p % 4 == 1 {
            let pf = p as f64;
            log_sum.add((-2.0 / (pf * pf)).ln_1p());
        }
    });
    Ok(ConstantEstimate {
        value: 0.5 * log_sum.sum.exp(),
        tail_bound: 4.0 / cutoff as f64,
        method: ConstantMethod::PrimeProduct,
        cutoff,
    })
}

/// `c0 ~ (1/2) sum_{d <= D} mu(d) rho(d) / d^2` with tail bound `8 / D`.
pub fn c0_series(cutoff: u64) -> Result<ConstantEstimate, CountError> {
    if cutoff == 0 {
        return Err(CountError::InvalidArgument(
            "cutoff must be at least 1".into(),
        ));
    }
    let weights = mu_rho_table(cutoff);
    let mut sum = KahanSum::default();
    for (d, &w) in weights.iter().enumerate().skip(1) {
        if w != 0 {
            let df = d as f64;
            sum.add(w as f64 / (df * df));
        }
    }
    Ok(ConstantEstimate {
        value: 0.5 * sum.sum,
        tail_bound: SERIES_TAIL_CONSTANT / cutoff as f64,
        method: ConstantMethod::MuRhoSeries,
        cutoff,
    })
}

/// `table[d] = mu(d) rho(d)` for `d <= limit`; multiplicative with value `-2`
/// at primes `p = 1 (mod 4)`, `0` at other primes and at all prime squares.
pub(crate) fn mu_rho_table(limit: u64) -> Vec<i32> {
    let n = limit as usize;
    let mut table = vec![1i32; n + 1];
    table[0] = 0;
    for p in arith::primes_up_to(limit) {
        let p = p as usize;
        let factor = if p % 4 == 1 { -2 } else { 0 };
        for m in (p..=n).step_by(p) {
            table[m] *= factor;
        }
        if let Some(pp) = p.checked_mul(p).filter(|&pp| pp <= n) {
            for m in (pp..=n).step_by(pp) {
                table[m] = 0;
            }
        }
    }
    table
}

/// `c0_product(10^8)`, computed once per process.
pub fn c0_reference() -> &'static ConstantEstimate {
    static REFERENCE: OnceLock<ConstantEstimate> = OnceLock::new();
    REFERENCE.get_or_init(|| c0_product(REFERENCE_CUTOFF).expect("cutoff above 5"))
}

// ---------------------------------------------------------------------------
// Error-term scans
// ---------------------------------------------------------------------------

/// Exact `N(x)` at each grid point, from a single sieve up to the largest `x`.
pub fn error_scan(grid: &[u64]) -> Result<Vec<CountReport>, CountError> {
    error_scan_with_limit(grid, DIRECT_LIMIT, 1)
}

pub fn error_scan_with_limit(
    grid: &[u64],
    limit: u64,
    threads: usize,
) -> Result<Vec<CountReport>, CountError> {
    if grid.is_empty() {
        return Ok(Vec::new());
    }
    if grid[0] == 0 || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CountError::InvalidArgument(
            "grid must be strictly ascending and start at x >= 1".into(),
        ));
    }
    let top = *grid.last().expect("non-empty");
    if top > limit {
        return Err(CountError::RangeTooLarge { x: top, limit });
    }
    let marks = non_squarefree_marks(top, threads);
    let mut reports = Vec::with_capacity(grid.len());
    let (mut bad, mut upto) = (0u64, 0u64);
    for &x in grid {
        bad += marks[upto as usize..x as usize]
            .iter()
            .filter(|&&m| m)
            .count() as u64;
        upto = x;
        reports.push(CountReport::new(x, x - bad));
    }
    Ok(reports)
}

/// `points` values from `lo` to `hi`, equally spaced in `log x`, rounded.
pub fn log_grid(lo: u64, hi: u64, points: usize) -> Vec<u64> {
    assert!(lo >= 1 && hi > lo && points >= 2);
    let (a, b) = ((lo as f64).ln(), (hi as f64).ln());
    let mut grid: Vec<u64> = (0..points)
        .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp().round() as u64)
        .collect();
    grid.dedup();
    grid
}

/// Unweighted least-squares slope of `log |error|` against `log x`.
pub fn fit_exponent(reports: &[CountReport]) -> Result<f64, CountError> {
    let pts: Vec<(f64, f64)> = reports
        .iter()
        .filter(|r| r.error != 0.0 && r.error.is_finite())
        .map(|r| ((r.x as f64).ln(), r.error.abs().ln()))
        .collect();
    if pts.len() < 3 {
        return Err(CountError::DegenerateFit { usable: pts.len() });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(CountError::DegenerateFit { usable: pts.len() });
    }
    Ok(sxy / sxx)
}

// ---------------------------------------------------------------------------
// Exponent bounds
// ---------------------------------------------------------------------------

pub const PSI_MIN: f64 = 0.5;
pub const PSI_MAX: f64 = 0.75;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentPoint {
    pub psi: f64,
    pub bound: f64,
}

/// Result of maximizing an exponent bound over `[1/2, 3/4]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentOptimum {
    pub psi: f64,
    pub value: f64,
    /// Best point of a uniform grid, as an independent cross-check.
    pub grid_psi: f64,
    pub grid_value: f64,
}

/// `a psi^2 + b psi + c`.
#[derive(Debug, Clone, Copy)]
struct Quadratic {
    a: f64,
    b: f64,
    c: f64,
}

impl Quadratic {
    const fn new(a: f64, b: f64, c: f64) -> Self {
        Quadratic { a, b, c }
    }

    fn eval(self, t: f64) -> f64 {
        (self.a * t + self.b) * t + self.c
    }

    fn plus(self, o: Self) -> Self {
        Quadratic::new(self.a + o.a, self.b + o.b, self.c + o.c)
    }

    fn minus(self, o: Self) -> Self {
        Quadratic::new(self.a - o.a, self.b - o.b, self.c - o.c)
    }

    fn roots(self) -> Vec<f64> {
        let Quadratic { a, b, c } = self;
        if a == 0.0 {
            return if b == 0.0 { vec![] } else { vec![-c / b] };
        }
        let disc = b * b - 4.0 * a * c;
        if disc < 0.0 {
            return vec![];
        }
        let s = disc.sqrt();
        // numerically stable pair
        let q = -0.5 * (b + b.signum() * s);
        if q == 0.0 {
            return vec![0.0];
        }
        vec![q / a, c / q]
    }

    fn critical_point(self) -> Option<f64> {
        (self.a != 0.0).then(|| -self.b / (2.0 * self.a))
    }
}

// 1/2 min(psi, 2 - 2psi) + max(9 psi (1 - psi) / 8, 1/4)
const HALF_PSI: Quadratic = Quadratic::new(0.0, 0.5, 0.0);
const ONE_MINUS_PSI: Quadratic = Quadratic::new(0.0, -1.0, 1.0);
const DETERMINANT_TERM: Quadratic = Quadratic::new(-9.0 / 8.0, 9.0 / 8.0, 0.0);
const QUARTER: Quadratic = Quadratic::new(0.0, 0.0, 0.25);
// 1 - 2 psi / 3
const BILINEAR_TERM: Quadratic = Quadratic::new(0.0, -2.0 / 3.0, 1.0);

fn check_psi(psi: f64) -> Result<(), CountError> {
    if (PSI_MIN..=PSI_MAX).contains(&psi) {
        Ok(())
    } else {
        Err(CountError::OutOfRange { psi })
    }
}

fn bound_value(psi: f64) -> f64 {
    HALF_PSI.eval(psi).min(ONE_MINUS_PSI.eval(psi))
        + DETERMINANT_TERM.eval(psi).max(QUARTER.eval(psi))
}

fn bound_v7_value(psi: f64) -> f64 {
    bound_value(psi).min(BILINEAR_TERM.eval(psi))
}

/// `1/2 min(psi, 2 - 2psi) + max(9 psi (1 - psi)/8, 1/4)`.
pub fn exponent_bound(psi: f64) -> Result<ExponentPoint, CountError> {
    check_psi(psi)?;
    Ok(ExponentPoint {
        psi,
        bound: bound_value(psi),
    })
}

/// [`exponent_bound`] capped by the bilinear bound `1 - 2 psi / 3`.
pub fn exponent_bound_v7(psi: f64) -> Result<ExponentPoint, CountError> {
    check_psi(psi)?;
    Ok(ExponentPoint {
        psi,
        bound: bound_v7_value(psi),
    })
}

pub fn exponent_optimum() -> ExponentOptimum {
    optimize(bound_value, false)
}

pub fn exponent_optimum_v7() -> ExponentOptimum {
    optimize(bound_v7_value, true)
}

const GRID_POINTS: usize = 1_000_000;

/// Both objectives are continuous and piecewise quadratic, with pieces drawn
/// from the sums `min-branch + max-branch` (and the bilinear line for v7).
/// The maximum therefore sits at an endpoint, a branch switch, or a critical
/// point of some piece; all of those are solved for in closed form.
fn optimize(objective: fn(f64) -> f64, with_bilinear: bool) -> ExponentOptimum {
    let mins = [HALF_PSI, ONE_MINUS_PSI];
    let maxs = [DETERMINANT_TERM, QUARTER];
    let pieces: Vec<Quadratic> = mins
        .iter()
        .flat_map(|&m| maxs.iter().map(move |&x| m.plus(x)))
        .collect();

    let mut candidates = vec![PSI_MIN, PSI_MAX];
    candidates.extend(mins[0].minus(mins[1]).roots());
    candidates.extend(maxs[0].minus(maxs[1]).roots());
    candidates.extend(pieces.iter().filter_map(|p| p.critical_point()));
    if with_bilinear {
        for p in &pieces {
            candidates.extend(p.minus(BILINEAR_TERM).roots());
        }
    }

    let (psi, value) = candidates
        .into_iter()
        .filter(|t| (PSI_MIN..=PSI_MAX).contains(t))
        .map(|t| (t, objective(t)))
        .fold((f64::NAN, f64::NEG_INFINITY), |best, cur| {
            if cur.1 > best.1 {
                cur
            } else {
                best
            }
        });

    let (grid_psi, grid_value) = (0..=GRID_POINTS)
        .map(|i| {
            let t = PSI_MIN + (PSI_MAX - PSI_MIN) * i as f64 / GRID_POINTS as f64;
            (t, objective(t))
        })
        .fold((f64::NAN, f64::NEG_INFINITY), |best, cur| {
            if cur.1 > best.1 {
                cur
            } else {
                best
            }
        });

    ExponentOptimum {
        psi,
        value,
        grid_psi,
        grid_value,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn count_direct_examples() {
        assert_eq!(count_direct(1).unwrap().count, 1);
        assert_eq!(count_direct(10).unwrap().count, 9);
        assert_eq!(count_direct(100).unwrap().count, 88);
        assert!(matches!(
            count_direct_with_limit(11, 10),
            Err(CountError::RangeTooLarge { x: 11, limit: 10 })
        ));
        assert!(count_direct(0).is_err());
    }

    #[test]
    fn count_sieve_examples() {
        assert_eq!(count_sieve(1).count, 1);
        assert_eq!(count_sieve(10).count, 9);
        assert_eq!(count_sieve(100).count, 88);
    }

    #[test]
    fn sieve_thread_counts_agree() {
        for x in [1u64, 7, 100, 12_345, 100_000] {
            let one = count_sieve_threads(x, 1).count;
            for t in [2, 3, 8] {
                assert_eq!(
                    count_sieve_threads(x, t).count,
                    one,
                    "x = {x}, threads = {t}"
                );
            }
        }
    }

    #[test]
    fn report_error_is_count_minus_main() {
        let r = count_sieve(1000);
        assert_eq!(r.error, r.count as f64 - r.main);
        assert!(r.count <= r.x);
    }

    #[test]
    fn estermann_examples() {
        let s = estermann_split(100, 1).unwrap();
        assert_eq!(s.progression_total, 100);
        let s = estermann_split(100, 5).unwrap();
        assert_eq!(s.progression_total, 100 - 8);
        assert!(s.identity_holds());
        let s = estermann_split(50, 7).unwrap();
        let exact = count_direct(100).unwrap().count - count_direct(50).unwrap().count;
        assert_eq!(s.exact, exact as i64);
        assert!(s.identity_holds());
    }

    #[test]
    fn estermann_rejects_bad_cut() {
        assert!(estermann_split(10, 0).is_err());
        assert!(estermann_split(10, 11).is_err());
        assert_eq!(estermann_split_default(100).unwrap().d_cut, 10);
    }

    #[test]
    fn progression_count_half_open() {
        // n in (100, 200] with n = 7 mod 25
        assert_eq!(progression_count(100, 200, 7, 25), 4);
        assert_eq!(progression_count(0, 7, 7, 25), 1);
        assert_eq!(progression_count(7, 31, 7, 25), 0);
    }

    #[test]
    fn c0_product_examples() {
        let e = c0_product(5).unwrap();
        assert!((e.value - 0.46).abs() < 1e-15);
        let e = c0_product(13).unwrap();
        let expect = 0.5 * (23.0 / 25.0) * (167.0 / 169.0);
        assert!((e.value - expect).abs() < 1e-15);
        assert!(c0_product(4).is_err());
    }

    #[test]
    fn c0_product_is_monotone() {
        let mut last = f64::INFINITY;
        for p in [5u64, 13, 100, 1000, 10_000, 100_000] {
            let v = c0_product(p).unwrap().value;
            assert!(v <= last);
            last = v;
        }
    }

    #[test]
    fn c0_series_examples() {
        assert_eq!(c0_series(1).unwrap().value, 0.5);
        assert!((c0_series(5).unwrap().value - 0.46).abs() < 1e-15);
        let s = c0_series(10_000).unwrap();
        let p = c0_product(1_000_000).unwrap();
        assert!(s.overlaps(&p));
    }

    #[test]
    fn mu_rho_table_matches_factorization() {
        let t = mu_rho_table(2000);
        for d in 1..=2000u64 {
            let expect = arith::mobius(d) as i32 * arith::rho(d).rho as i32;
            assert_eq!(t[d as usize], expect, "d = {d}");
        }
    }

    #[test]
    fn series_tail_constant_holds_empirically() {
        // sum_{D < d <= 10^6} |mu(d) rho(d)| / d^2 against 8 / D
        let t = mu_rho_table(1_000_000);
        for cut in [1usize, 10, 100, 1000, 10_000] {
            let tail: f64 = t[cut + 1..]
                .iter()
                .enumerate()
                .map(|(i, &w)| w.unsigned_abs() as f64 / ((cut + 1 + i) as f64).powi(2))
                .sum();
            // remainder beyond 10^6 is below 8 / 10^6 by the same bound
            assert!(
                tail + 8e-6 <= SERIES_TAIL_CONSTANT / cut as f64,
                "D = {cut}: {tail}"
            );
        }
    }

    #[test]
    fn error_scan_small_grid() {
        let r = error_scan(&[10, 100]).unwrap();
        assert_eq!(r[0].count, 9);
        assert_eq!(r[1].count, 88);
        assert!(error_scan(&[100, 10]).is_err());
        assert!(matches!(
            error_scan_with_limit(&[10, 20], 15, 1),
            Err(CountError::RangeTooLarge { .. })
        ));
    }

    #[test]
    fn fit_degenerate() {
        let rows: Vec<CountReport> = (1..5)
            .map(|i| CountReport {
                x: i * 10,
                count: 0,
                main: 0.0,
                error: 0.0,
                main_tol: 0.0,
            })
            .collect();
        assert_eq!(
            fit_exponent(&rows),
            Err(CountError::DegenerateFit { usable: 0 })
        );
    }

    #[test]
    fn fit_recovers_power_law() {
        let rows: Vec<CountReport> = [10u64, 100, 1000, 10_000]
            .iter()
            .map(|&x| CountReport {
                x,
                count: 0,
                main: 0.0,
                error: -3.0 * (x as f64).powf(0.5),
                main_tol: 0.0,
            })
            .collect();
        assert!((fit_exponent(&rows).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn log_grid_endpoints() {
        let g = log_grid(1000, 10_000_000, 9);
        assert_eq!(g.len(), 9);
        assert_eq!(g[0], 1000);
        assert_eq!(g[8], 10_000_000);
        assert_eq!(g[4], 100_000);
    }

    #[test]
    fn exponent_bound_examples() {
        let at = exponent_bound(2.0 / 3.0).unwrap().bound;
        assert!((at - 7.0 / 12.0).abs() < 1e-15);
        let at = exponent_bound(0.5).unwrap().bound;
        assert!((at - 17.0 / 32.0).abs() < 1e-15);
        assert!(matches!(
            exponent_bound(0.49),
            Err(CountError::OutOfRange { .. })
        ));
        assert!(exponent_bound_v7(0.8).is_err());
    }

    #[test]
    fn exponent_optima() {
        let o = exponent_optimum();
        assert!((o.value - 7.0 / 12.0).abs() < 1e-12);
        assert!((o.psi - 2.0 / 3.0).abs() < 1e-6);
        assert!((o.grid_value - o.value).abs() < 1e-6);

        let v = exponent_optimum_v7();
        let s = 433f64.sqrt();
        assert!((v.value - (26.0 + s) / 81.0).abs() < 1e-9);
        assert!((v.psi - (55.0 - s) / 54.0).abs() < 1e-6);
        assert!(v.value < 7.0 / 12.0);
        assert!((v.grid_value - v.value).abs() < 1e-6);
    }

    #[test]
    fn quadratic_roots() {
        let q = Quadratic::new(27.0, -55.0, 24.0);
        let mut r = q.roots();
        r.sort_by(f64::total_cmp);
        let s = 433f64.sqrt();
        assert!((r[0] - (55.0 - s) / 54.0).abs() < 1e-14);
        assert!((r[1] - (55.0 + s) / 54.0).abs() < 1e-14);
    }
}
