//! Exact rationals and the elementary number-theoretic kernels used by the
//! rest of the crate: Möbius function (single query and linear sieve), ζ
//! partial sums with rigorous integral tails, and Fibonacci numbers.

use rug::float::{Constant, Round};
use rug::ops::{AddAssignRound, DivAssignRound, PowAssignRound};
use rug::Float;
pub use rug::{Integer, Rational};

use crate::error::{CfError, Result};
use crate::interval::Enclosure;

/// Default mantissa size for high-precision reals.
pub const DEFAULT_PRECISION: u32 = 128;

/// Möbius function by trial factorisation.
pub fn mobius(n: u64) -> Result<i8> {
    if n == 0 {
        return Err(CfError::domain("mobius(0) is undefined"));
    }
    let mut m = n;
    let mut sign = 1i8;
    let mut p = 2u64;
    while p.saturating_mul(p) <= m {
        if m % p == 0 {
            m /= p;
            if m % p == 0 {
                return Ok(0);
            }
            sign = -sign;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        sign = -sign;
    }
    Ok(sign)
}

/// `Σ_{d | n} μ(d)`, by direct divisor enumeration.
pub fn mobius_divisor_sum(n: u64) -> Result<i64> {
    if n == 0 {
        return Err(CfError::domain("divisor sum of 0 is undefined"));
    }
    let mut total = 0i64;
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            total += i64::from(mobius(d)?);
            let e = n / d;
            if e != d {
                total += i64::from(mobius(e)?);
            }
        }
        d += 1;
    }
    Ok(total)
}

/// Euler's totient by trial factorisation.
pub fn euler_phi(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut m = n;
    let mut result = n;
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Möbius values for `1..=limit`, built once by a linear sieve.
#[derive(Clone, Debug)]
pub struct MobiusSieve {
    mu: Vec<i8>,
}

impl MobiusSieve {
    pub fn new(limit: usize) -> Self {
        let mut mu = vec![0i8; limit + 1];
        let mut composite = vec![false; limit + 1];
        let mut primes: Vec<usize> = Vec::new();
        if limit >= 1 {
            mu[1] = 1;
        }
        for i in 2..=limit {
            if !composite[i] {
                primes.push(i);
                mu[i] = -1;
            }
            for &p in &primes {
                let ip = i * p;
                if ip > limit {
                    break;
                }
                composite[ip] = true;
                if i % p == 0 {
                    mu[ip] = 0;
                    break;
                }
                mu[ip] = -mu[i];
            }
        }
        MobiusSieve { mu }
    }

    pub fn limit(&self) -> usize {
        self.mu.len().saturating_sub(1)
    }

    /// Panics if `n` is 0 or beyond the sieve limit.
    pub fn get(&self, n: usize) -> i8 {
        assert!(
            n >= 1 && n <= self.limit(),
            "mobius index {n} outside 1..={}",
            self.limit()
        );
        self.mu[n]
    }
}

/// Partial sum `Σ_{n ≤ terms} n^{-s}` with the integral tail of `ζ(s)`.
#[derive(Clone, Debug)]
pub struct ZetaPartial {
    pub s: f64,
    pub terms: u64,
    /// Outward-rounded bracket of the finite sum itself.
    pub partial: Enclosure,
    /// `terms^{1-s}/(s-1)`, rounded up: dominates the omitted tail.
    pub tail_bound: Float,
    /// `(terms+1)^{1-s}/(s-1)`, rounded down: dominated by the omitted tail.
    pub tail_floor: Float,
}

impl ZetaPartial {
    /// Rigorous enclosure of `ζ(s)`.
    pub fn enclosure(&self) -> Enclosure {
        let prec = self.partial.prec();
        let mut lo = Float::with_val(prec, self.partial.lo());
        lo.add_assign_round(&self.tail_floor, Round::Down);
        let mut hi = Float::with_val(prec, self.partial.hi());
        hi.add_assign_round(&self.tail_bound, Round::Up);
        Enclosure::new(lo, hi)
    }
}

fn check_zeta_args(s: f64, terms: u64) -> Result<()> {
    if !(s > 1.0) || !s.is_finite() {
        return Err(CfError::domain(format!(
            "ζ(s) diverges for s = {s}; need s > 1"
        )));
    }
    if terms == 0 {
        return Err(CfError::param("terms must be at least 1"));
    }
    Ok(())
}

/// `m^{-s}` correctly rounded in the given direction; `neg_s = -s`.
fn inv_pow(prec: u32, m: u64, neg_s: &Float, round: Round) -> Float {
    let mut t = Float::with_val(prec, m);
    t.pow_assign_round(neg_s, round);
    t
}

fn integral_tail(prec: u32, from: u64, s: f64, round: Round) -> Float {
    // from^{1-s} / (s-1)
    let denom = Float::with_val(prec, s) - 1u32;
    let exponent = Float::with_val(prec, -&denom);
    let mut t = Float::with_val(prec, from);
    t.pow_assign_round(&exponent, round);
    t.div_assign_round(&denom, round);
    t
}

pub fn zeta_partial(s: f64, terms: u64, prec: u32) -> Result<ZetaPartial> {
    check_zeta_args(s, terms)?;
    let neg_s = Float::with_val(prec, -s);
    let mut lo = Float::with_val(prec, 0);
    let mut hi = Float::with_val(prec, 0);
    // smallest terms last would be more accurate; the directed rounding keeps
    // the bracket valid either way.
    for m in (1..=terms).rev() {
        lo.add_assign_round(&inv_pow(prec, m, &neg_s, Round::Down), Round::Down);
        hi.add_assign_round(&inv_pow(prec, m, &neg_s, Round::Up), Round::Up);
    }
    Ok(ZetaPartial {
        s,
        terms,
        partial: Enclosure::new(lo, hi),
        tail_bound: integral_tail(prec, terms, s, Round::Up),
        tail_floor: integral_tail(prec, terms + 1, s, Round::Down),
    })
}

/// Default truncation for [`zeta_enclosure`].
pub const ZETA_TERMS: u64 = 20_000;

/// Rigorous enclosure of `ζ(s)`, `s > 1`.
pub fn zeta_enclosure(s: f64, prec: u32) -> Result<Enclosure> {
    Ok(zeta_partial(s, ZETA_TERMS, prec)?.enclosure())
}

/// `Σ_{n ≤ terms} μ(n) n^{-s}`, which tends to `1/ζ(s)`.
pub fn mobius_zeta_partial(s: f64, terms: u64, prec: u32) -> Result<Float> {
    check_zeta_args(s, terms)?;
    let sieve = MobiusSieve::new(terms as usize);
    let sf = Float::with_val(prec, -s);
    let mut sum = Float::with_val(prec, 0);
    for m in (1..=terms).rev() {
        let mu = sieve.get(m as usize);
        if mu == 0 {
            continue;
        }
        let mut t = Float::with_val(prec, m);
        t.pow_assign_round(&sf, Round::Nearest);
        if mu > 0 {
            sum += &t;
        } else {
            sum -= &t;
        }
    }
    Ok(sum)
}

/// Growable table `F_0, F_1, …` filled by the recurrence.
#[derive(Clone, Debug)]
pub struct FibonacciCache {
    values: Vec<Integer>,
}

impl Default for FibonacciCache {
    fn default() -> Self {
        FibonacciCache::new()
    }
}

impl FibonacciCache {
    pub fn new() -> Self {
        FibonacciCache {
            values: vec![Integer::from(0), Integer::from(1)],
        }
    }

    pub fn get(&mut self, n: usize) -> &Integer {
        while self.values.len() <= n {
            let k = self.values.len();
            let next = Integer::from(&self.values[k - 1] + &self.values[k - 2]);
            self.values.push(next);
        }
        &self.values[n]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub fn fibonacci(n: usize) -> Integer {
    let mut a = Integer::from(0);
    let mut b = Integer::from(1);
    for _ in 0..n {
        let next = Integer::from(&a + &b);
        a = std::mem::replace(&mut b, next);
    }
    a
}

/// `F_n` as an `f64`, exact for `n ≤ 78`.
pub fn fibonacci_f64(n: usize) -> f64 {
    let mut a = 0f64;
    let mut b = 1f64;
    for _ in 0..n {
        let next = a + b;
        a = b;
        b = next;
    }
    a
}

/// Golden ratio `(1 + √5) / 2`.
pub fn golden_ratio(prec: u32) -> Float {
    let mut g = Float::with_val(prec, 5);
    g.sqrt_mut();
    g += 1;
    g /= 2;
    g
}

pub fn pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

/// `2^{-(1+ε)}` enclosed by directed rounding.
pub fn two_pow_neg(exponent: f64, prec: u32) -> Enclosure {
    let e = Float::with_val(prec, -exponent);
    let mut lo = Float::with_val(prec, 2);
    lo.pow_assign_round(&e, Round::Down);
    let mut hi = Float::with_val(prec, 2);
    hi.pow_assign_round(&e, Round::Up);
    Enclosure::new(lo, hi)
}

/// `base^{exponent}` enclosed by directed rounding, `base > 0`.
pub fn pow_enclosure(base: &Rational, exponent: f64, prec: u32) -> Enclosure {
    let e = Float::with_val(prec, exponent);
    let b = Enclosure::from_rational(prec + 16, base);
    // x^e is monotone in x for x > 0; the direction depends on the sign of e.
    let (blo, bhi) = if exponent >= 0.0 {
        (b.lo().clone(), b.hi().clone())
    } else {
        (b.hi().clone(), b.lo().clone())
    };
    let mut lo = Float::with_val(prec, &blo);
    let mut lo_base = blo;
    lo_base.pow_assign_round(&e, Round::Down);
    lo.assign_round_from(&lo_base, Round::Down);
    let mut hi_base = bhi;
    hi_base.pow_assign_round(&e, Round::Up);
    let mut hi = Float::with_val(prec, 0);
    hi.assign_round_from(&hi_base, Round::Up);
    Enclosure::new(lo, hi)
}

trait AssignRoundFrom {
    fn assign_round_from(&mut self, src: &Float, round: Round);
}

impl AssignRoundFrom for Float {
    fn assign_round_from(&mut self, src: &Float, round: Round) {
        let prec = self.prec();
        *self = Float::with_val_round(prec, src, round).0;
    }
}
