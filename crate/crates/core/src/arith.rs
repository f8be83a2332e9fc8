//! Exact modular and Gaussian-integer arithmetic.
//!
//! Everything that needs to know which residues satisfy `m^2 + 1 = 0 (mod d^2)`
//! goes through this module: square roots of `-1` modulo primes, Hensel lifting
//! to prime powers, CRT assembly, the multiplicative count `rho(d)`, and a
//! square-freeness test sized for values of the form `n^2 + 1`.
//!
//! Public residues and Gaussian integers are arbitrary precision. Moduli are
//! given as `u64` (`d`) or `u128` (values tested for square-freeness); the
//! machine-word paths underneath are an implementation detail.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Trial division bound used by [`is_squarefree`] before switching to
/// primality testing and Pollard splitting of the cofactor.
pub const TRIAL_DIVISION_BOUND: u32 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("{p} is not congruent to 1 mod 4, so -1 has no square root")]
    NotOneModFour { p: u64 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("value exceeds the supported factorization range (< 2^128)")]
    FactorizationOverflow,
    #[error("{r} is not a square root of -1 modulo {p}^{k}")]
    InvalidRoot { p: u64, k: u32, r: BigUint },
    #[error("cannot lift from level {from} down to level {to}")]
    LiftBelowLevel { from: u32, to: u32 },
}

// ---------------------------------------------------------------------------
// Primes
// ---------------------------------------------------------------------------

/// All primes up to `limit` by a plain sieve of Eratosthenes.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    let mut out = Vec::new();
    for_each_prime(limit, |p| out.push(p));
    out
}

/// Calls `f` on every prime `p <= limit` in increasing order.
///
/// Segmented, so memory stays at `O(sqrt(limit))` plus one segment; the
/// constant computation walks primes up to `10^8` through this.
pub fn for_each_prime(limit: u64, mut f: impl FnMut(u64)) {
    if limit < 2 {
        return;
    }
    let root = limit.sqrt();
    let base = simple_sieve(root.max(2) as usize);
    const SEGMENT: u64 = 1 << 18;
    let mut lo = 2u64;
    let mut composite = vec![false; SEGMENT as usize];
    while lo <= limit {
        let hi = (lo + SEGMENT - 1).min(limit);
        let len = (hi - lo + 1) as usize;
        composite[..len].iter_mut().for_each(|c| *c = false);
        for &p in &base {
            let p = p as u64;
            if p * p > hi {
                break;
            }
            let mut start = (lo.div_ceil(p) * p).max(p * p);
            while start <= hi {
                composite[(start - lo) as usize] = true;
                start += p;
            }
        }
        for (i, &c) in composite[..len].iter().enumerate() {
            if !c {
                f(lo + i as u64);
            }
        }
        lo = hi + 1;
    }
}

fn simple_sieve(limit: usize) -> Vec<u32> {
    let mut is_comp = vec![false; limit + 1];
    let mut primes = Vec::new();
    for i in 2..=limit {
        if !is_comp[i] {
            primes.push(i as u32);
            let mut j = i * i;
            while j <= limit {
                is_comp[j] = true;
                j += i;
            }
        }
    }
    primes
}

fn trial_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| simple_sieve(TRIAL_DIVISION_BOUND as usize))
}

// ---------------------------------------------------------------------------
// Word-size modular helpers
// ---------------------------------------------------------------------------

#[inline]
pub(crate) fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u64(acc, base, m);
        }
        base = mul_mod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

fn mul_mod_u128(a: u128, b: u128, m: u128) -> u128 {
    if let (Ok(a64), Ok(b64)) = (u64::try_from(a), u64::try_from(b)) {
        return (a64 as u128 * b64 as u128) % m;
    }
    // Double-and-add; only reached for moduli above 2^64.
    let (mut a, mut b) = (a % m, b % m);
    let mut acc = 0u128;
    while b > 0 {
        if b & 1 == 1 {
            acc = add_mod_u128(acc, a, m);
        }
        a = add_mod_u128(a, a, m);
        b >>= 1;
    }
    acc
}

#[inline]
fn add_mod_u128(a: u128, b: u128, m: u128) -> u128 {
    let (s, overflow) = a.overflowing_add(b);
    if overflow || s >= m {
        s.wrapping_sub(m)
    } else {
        s
    }
}

fn pow_mod_u128(mut base: u128, mut exp: u128, m: u128) -> u128 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u128(acc, base, m);
        }
        base = mul_mod_u128(base, base, m);
        exp >>= 1;
    }
    acc
}

const MR_BASES: [u128; 20] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71,
];

/// Strong-probable-prime test against the first prime bases.
///
/// The first 12 bases are a proven deterministic set below `3.3 * 10^24`;
/// larger inputs use all 20 bases.
pub fn is_prime_u128(n: u128) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let bases: &[u128] = if n < 3_317_044_064_679_887_385_961_981 {
        &MR_BASES[..13]
    } else {
        &MR_BASES
    };
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in bases {
        let mut x = pow_mod_u128(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u128(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn is_prime(n: u64) -> bool {
    is_prime_u128(n as u128)
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Brent's variant of Pollard rho. `n` must be odd and composite.
fn pollard_brent(n: u128) -> u128 {
    let mut c = 1u128;
    loop {
        let f = |x: u128| add_mod_u128(mul_mod_u128(x, x, n), c, n);
        let (mut x, mut y, mut g, mut q) = (2u128, 2u128, 1u128, 1u128);
        let mut ys = 0u128;
        let mut r = 1u64;
        const BATCH: u64 = 64;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..BATCH.min(r - k) {
                    y = f(y);
                    q = mul_mod_u128(q, x.abs_diff(y), n);
                }
                g = gcd_u128(q, n);
                k += BATCH;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd_u128(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

fn split_into(n: u128, out: &mut Vec<u128>) {
    if n == 1 {
        return;
    }
    if is_prime_u128(n) {
        out.push(n);
        return;
    }
    let r = isqrt_u128(n);
    if r * r == n {
        split_into(r, out);
        split_into(r, out);
        return;
    }
    let d = pollard_brent(n);
    split_into(d, out);
    split_into(n / d, out);
}

pub(crate) fn isqrt_u128(n: u128) -> u128 {
    n.sqrt()
}

/// Full factorization `n = prod p^e`, primes ascending. `factor(1)` is empty.
pub fn factor(n: u128) -> Vec<(u128, u32)> {
    assert!(n > 0, "factor(0) is undefined");
    let mut n = n;
    let mut primes = Vec::new();
    for &p in trial_primes() {
        let p = p as u128;
        if p * p > n {
            break;
        }
        while n.is_multiple_of(p) {
            primes.push(p);
            n /= p;
        }
    }
    if n > 1 {
        split_into(n, &mut primes);
    }
    primes.sort_unstable();
    let mut out: Vec<(u128, u32)> = Vec::new();
    for p in primes {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out
}

/// Factorization of a `u64`, for moduli `d`.
pub fn factor_u64(n: u64) -> Vec<(u64, u32)> {
    factor(n as u128)
        .into_iter()
        .map(|(p, e)| (p as u64, e))
        .collect()
}

/// Square-freeness of `n` for `n < 2^128`.
///
/// Trial division runs over primes `p` while `p^3` can still divide the
/// cofactor, capped at [`TRIAL_DIVISION_BOUND`]. A cofactor surviving the
/// cube test has at most two prime factors, so it is square-free unless it is
/// a perfect square. Beyond the cap the cofactor is split with Pollard rho.
pub fn is_squarefree_u128(n: u128) -> bool {
    assert!(n > 0);
    let mut c = n;
    for &p in trial_primes() {
        let p = p as u128;
        if p * p * p > c {
            let r = isqrt_u128(c);
            return !(c > 1 && r * r == c);
        }
        if c.is_multiple_of(p) {
            c /= p;
            if c.is_multiple_of(p) {
                return false;
            }
        }
    }
    let mut parts = Vec::new();
    split_into(c, &mut parts);
    parts.sort_unstable();
    parts.windows(2).all(|w| w[0] != w[1])
}

pub fn is_squarefree(n: &BigUint) -> Result<bool, ArithError> {
    assert!(!n.is_zero(), "square-freeness of 0 is undefined");
    let n = n.to_u128().ok_or(ArithError::FactorizationOverflow)?;
    Ok(is_squarefree_u128(n))
}

/// Möbius function via [`factor_u64`].
pub fn mobius(n: u64) -> i8 {
    let mut sign = 1i8;
    for (_, e) in factor_u64(n) {
        if e > 1 {
            return 0;
        }
        sign = -sign;
    }
    sign
}

// ---------------------------------------------------------------------------
// Square roots of -1
// ---------------------------------------------------------------------------

/// Tonelli–Shanks square root of `a` modulo an odd prime `p`, if one exists.
pub fn sqrt_mod_prime(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if p == 2 {
        return Some(a);
    }
    if pow_mod_u64(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(pow_mod_u64(a, (p + 1) / 4, p));
    }
    let s = (p - 1).trailing_zeros();
    let q = (p - 1) >> s;
    let z = (2..p)
        .find(|&z| pow_mod_u64(z, (p - 1) / 2, p) == p - 1)
        .expect("odd prime has a non-residue");
    let mut m = s;
    let mut c = pow_mod_u64(z, q, p);
    let mut t = pow_mod_u64(a, q, p);
    let mut r = pow_mod_u64(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod_u64(t2, t2, p);
            i += 1;
        }
        let b = pow_mod_u64(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod_u64(b, b, p);
        t = mul_mod_u64(t, c, p);
        r = mul_mod_u64(r, b, p);
    }
    Some(r)
}

/// The smallest `r` in `(0, p)` with `r^2 = -1 (mod p)`.
pub fn sqrt_minus_one(p: u64) -> Result<u64, ArithError> {
    if p % 4 != 1 {
        return Err(ArithError::NotOneModFour { p });
    }
    if !is_prime(p) {
        return Err(ArithError::NotPrime(p));
    }
    // 2 is a non-residue when p = 5 (mod 8), so 2^((p-1)/4) is a root directly.
    let r = if p % 8 == 5 {
        pow_mod_u64(2, (p - 1) / 4, p)
    } else {
        sqrt_mod_prime(p - 1, p).expect("-1 is a residue for p = 1 mod 4")
    };
    Ok(r.min(p - r))
}

/// The two roots of `m^2 + 1 = 0` modulo `p^2` for a prime `p = 1 (mod 4)`,
/// ascending. Word-size path used by the sieve.
pub(crate) fn roots_mod_prime_square(p: u64) -> [u64; 2] {
    let r = sqrt_minus_one(p).expect("caller passes primes = 1 mod 4");
    let m = p as u128 * p as u128;
    // One Newton step r' = r - (r^2 + 1) / (2r) is exact mod p^2.
    let r128 = r as u128;
    let fr = (r128 * r128 + 1) % m;
    let inv = mod_inverse_u128(2 * r128 % m, m).expect("2r is a unit mod p^2");
    let lifted = ((r128 + m) - mul_mod_u128(fr, inv, m)) % m;
    let other = m - lifted;
    let (a, b) = (lifted as u64, other as u64);
    if a < b {
        [a, b]
    } else {
        [b, a]
    }
}

fn mod_inverse_u128(a: u128, m: u128) -> Option<u128> {
    let g = BigInt::from(a).extended_gcd(&BigInt::from(m));
    if !g.gcd.is_one() {
        return None;
    }
    g.x.mod_floor(&BigInt::from(m)).to_u128()
}

/// A root of `r^2 + 1 = 0 (mod p^k)` for a prime `p = 1 (mod 4)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModRoot {
    pub p: u64,
    pub k: u32,
    pub r: BigUint,
}

impl ModRoot {
    pub fn new(p: u64, k: u32, r: BigUint) -> Result<Self, ArithError> {
        if p % 4 != 1 {
            return Err(ArithError::NotOneModFour { p });
        }
        if !is_prime(p) {
            return Err(ArithError::NotPrime(p));
        }
        let root = ModRoot { p, k, r };
        if k == 0 || root.r >= root.modulus() || !root.is_valid() {
            return Err(ArithError::InvalidRoot { p, k, r: root.r });
        }
        Ok(root)
    }

    pub fn modulus(&self) -> BigUint {
        BigUint::from(self.p).pow(self.k)
    }

    fn is_valid(&self) -> bool {
        ((&self.r * &self.r + 1u32) % self.modulus()).is_zero()
    }
}

/// Hensel-lifts `root` to level `target_k`. The lift is unique because the
/// derivative `2r` is a unit modulo odd `p`.
pub fn lift_root(root: &ModRoot, target_k: u32) -> Result<ModRoot, ArithError> {
    if target_k < root.k {
        return Err(ArithError::LiftBelowLevel {
            from: root.k,
            to: target_k,
        });
    }
    let p = BigInt::from(root.p);
    let mut r = BigInt::from(root.r.clone());
    let mut k = root.k;
    while k < target_k {
        k = (2 * k).min(target_k);
        let m = p.pow(k);
        let f = (&r * &r + 1u32).mod_floor(&m);
        let inv = (BigInt::from(2u32) * &r).extended_gcd(&m).x.mod_floor(&m);
        r = (&r - f * inv).mod_floor(&m);
    }
    Ok(ModRoot {
        p: root.p,
        k,
        r: r.to_biguint().expect("reduced residue is non-negative"),
    })
}

/// `rho(d) = #{m mod d^2 : d^2 | m^2 + 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RhoValue {
    pub d: u64,
    pub rho: u64,
}

pub fn rho(d: u64) -> RhoValue {
    assert!(d >= 1, "rho is defined for d >= 1");
    let rho = factor_u64(d)
        .into_iter()
        .map(|(p, _)| if p % 4 == 1 { 2 } else { 0 })
        .product();
    RhoValue { d, rho }
}

/// The residues `m` in `[0, d^2)` with `d^2 | m^2 + 1`, ascending.
pub fn roots_mod_square(d: u64) -> Vec<BigUint> {
    assert!(d >= 1, "roots_mod_square is defined for d >= 1");
    let factors = factor_u64(d);
    if factors.iter().any(|&(p, _)| p % 4 != 1) {
        return Vec::new();
    }
    // Combine prime-power root pairs by CRT.
    let mut modulus = BigUint::one();
    let mut roots = vec![BigUint::zero()];
    for (p, e) in factors {
        let r = sqrt_minus_one(p).expect("p = 1 mod 4 is prime");
        let base = ModRoot {
            p,
            k: 1,
            r: BigUint::from(r),
        };
        let lifted = lift_root(&base, 2 * e).expect("lifting upward");
        let pk = lifted.modulus();
        let pair = [lifted.r.clone(), &pk - &lifted.r];
        let mut next = Vec::with_capacity(roots.len() * 2);
        for a in &roots {
            for b in &pair {
                next.push(crt_pair(a, &modulus, b, &pk));
            }
        }
        modulus *= &pk;
        roots = next;
    }
    roots.sort();
    roots
}

fn crt_pair(a: &BigUint, m: &BigUint, b: &BigUint, n: &BigUint) -> BigUint {
    // x = a + m * ((b - a) * m^{-1} mod n)
    let (mi, ni) = (BigInt::from(m.clone()), BigInt::from(n.clone()));
    let inv = mi.extended_gcd(&ni).x.mod_floor(&ni);
    let diff = (BigInt::from(b.clone()) - BigInt::from(a.clone())).mod_floor(&ni);
    let t = (diff * inv).mod_floor(&ni);
    (BigInt::from(a.clone()) + mi * t)
        .to_biguint()
        .expect("non-negative CRT result")
}

// ---------------------------------------------------------------------------
// Gaussian integers
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GaussianInt {
    pub re: BigInt,
    pub im: BigInt,
}

impl GaussianInt {
    pub fn new(re: impl Into<BigInt>, im: impl Into<BigInt>) -> Self {
        GaussianInt {
            re: re.into(),
            im: im.into(),
        }
    }

    pub fn zero() -> Self {
        Self::new(0, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn norm(&self) -> BigInt {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn conj(&self) -> Self {
        GaussianInt {
            re: self.re.clone(),
            im: -&self.im,
        }
    }

    /// Multiplication by `i`.
    pub fn mul_i(&self) -> Self {
        GaussianInt {
            re: -&self.im,
            im: self.re.clone(),
        }
    }

    /// The associate with `re > 0, im >= 0`; zero maps to zero.
    pub fn canonical(&self) -> Self {
        let mut z = self.clone();
        if z.is_zero() {
            return z;
        }
        while !(z.re.is_positive() && !z.im.is_negative()) {
            z = z.mul_i();
        }
        z
    }

    /// Quotient rounded to the nearest Gaussian integer, so the remainder has
    /// norm at most half the divisor's.
    pub fn div_round(&self, rhs: &Self) -> Self {
        assert!(!rhs.is_zero(), "division by zero");
        let n = rhs.norm();
        let num = self * &rhs.conj();
        GaussianInt {
            re: round_div(&num.re, &n),
            im: round_div(&num.im, &n),
        }
    }

    pub fn rem_round(&self, rhs: &Self) -> Self {
        self - &(&self.div_round(rhs) * rhs)
    }

    /// `self / rhs` when the division is exact.
    pub fn div_exact(&self, rhs: &Self) -> Option<Self> {
        if rhs.is_zero() {
            return None;
        }
        let n = rhs.norm();
        let num = self * &rhs.conj();
        let (qr, rr) = num.re.div_rem(&n);
        let (qi, ri) = num.im.div_rem(&n);
        (rr.is_zero() && ri.is_zero()).then_some(GaussianInt { re: qr, im: qi })
    }

    pub fn divides(&self, other: &Self) -> bool {
        if self.is_zero() {
            return other.is_zero();
        }
        other.div_exact(self).is_some()
    }

    pub fn square(&self) -> Self {
        self * self
    }
}

fn round_div(a: &BigInt, n: &BigInt) -> BigInt {
    // floor((2a + n) / 2n), n > 0
    (BigInt::from(2) * a + n).div_floor(&(BigInt::from(2) * n))
}

impl fmt::Display for GaussianInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_negative() {
            write!(f, "{}-{}i", self.re, -&self.im)
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

impl Add for &GaussianInt {
    type Output = GaussianInt;
    fn add(self, rhs: &GaussianInt) -> GaussianInt {
        GaussianInt {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
}

impl Sub for &GaussianInt {
    type Output = GaussianInt;
    fn sub(self, rhs: &GaussianInt) -> GaussianInt {
        GaussianInt {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
}

impl Mul for &GaussianInt {
    type Output = GaussianInt;
    fn mul(self, rhs: &GaussianInt) -> GaussianInt {
        GaussianInt {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Neg for &GaussianInt {
    type Output = GaussianInt;
    fn neg(self) -> GaussianInt {
        GaussianInt {
            re: -&self.re,
            im: -&self.im,
        }
    }
}

/// Euclidean gcd in `Z[i]`, normalized to the canonical associate.
pub fn gaussian_gcd(a: &GaussianInt, b: &GaussianInt) -> GaussianInt {
    assert!(
        !(a.is_zero() && b.is_zero()),
        "gcd(0, 0) has no canonical value"
    );
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_zero() {
        let r = a.rem_round(&b);
        a = b;
        b = r;
    }
    a.canonical()
}
