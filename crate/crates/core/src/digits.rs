//! Finite continued-fraction digit strings, their convergent tables and the
//! Gauss-map expansion of rationals and of reals known to finite precision.

use std::fmt;
use std::str::FromStr;

use rug::{Float, Integer, Rational};
use serde::{Serialize, Serializer};

use crate::error::{CfError, Result};

/// A finite digit string `(σ₁, …, σₙ)` followed by an implicit tail of `∞`.
///
/// The empty string stands for `(∞, ∞, …)`, the expansion of 0.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DigitString(Vec<u64>);

impl DigitString {
    pub fn new(digits: Vec<u64>) -> Result<Self> {
        if let Some(pos) = digits.iter().position(|&d| d == 0) {
            return Err(CfError::domain(format!(
                "digit {} is zero; digits must be ≥ 1",
                pos + 1
            )));
        }
        Ok(DigitString(digits))
    }

    /// Caller guarantees every digit is positive.
    pub(crate) fn from_vec_unchecked(digits: Vec<u64>) -> Self {
        debug_assert!(digits.iter().all(|&d| d >= 1));
        DigitString(digits)
    }

    pub fn empty() -> Self {
        DigitString(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn digits(&self) -> &[u64] {
        &self.0
    }

    pub fn last(&self) -> Option<u64> {
        self.0.last().copied()
    }

    /// `σ ⌢ d`.
    pub fn extended(&self, digit: u64) -> Result<Self> {
        if digit == 0 {
            return Err(CfError::domain("cannot append a zero digit"));
        }
        let mut v = self.0.clone();
        v.push(digit);
        Ok(DigitString(v))
    }

    /// `σ^{(k)}`: the first `k` digits.
    pub fn truncated(&self, k: usize) -> Self {
        DigitString(self.0[..k.min(self.0.len())].to_vec())
    }

    /// Empty, or last digit greater than one.
    pub fn is_realizable(&self) -> bool {
        self.0.last().map_or(true, |&d| d > 1)
    }

    /// The other digit string with the same value:
    /// `(…, σₙ) ↦ (…, σₙ−1, 1)` when `σₙ > 1`, and back again when `σₙ = 1`.
    pub fn sibling(&self) -> Result<Self> {
        let last = self.last().ok_or(CfError::EmptyString)?;
        let mut v = self.0.clone();
        if last > 1 {
            *v.last_mut().unwrap() = last - 1;
            v.push(1);
        } else {
            if v.len() == 1 {
                return Err(CfError::domain("(1) has no sibling digit string"));
            }
            v.pop();
            *v.last_mut().unwrap() += 1;
        }
        Ok(DigitString(v))
    }

    /// `σ̂`: last digit incremented.
    pub fn hat(&self) -> Result<Self> {
        if self.0.is_empty() {
            return Err(CfError::EmptyString);
        }
        let mut v = self.0.clone();
        *v.last_mut().unwrap() += 1;
        Ok(DigitString(v))
    }
}

impl fmt::Display for DigitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl FromStr for DigitString {
    type Err = CfError;

    /// Accepts `"3,2,1"`; an empty string, `"()"` or `"(empty)"` is the empty digit string.
    fn from_str(s: &str) -> Result<Self> {
        let t = s
            .trim()
            .trim_start_matches('(')
            .trim_end_matches(')')
            .trim();
        if t.is_empty() || t == "empty" {
            return Ok(DigitString::empty());
        }
        let digits = t
            .split(',')
            .map(|part| {
                part.trim()
                    .parse::<u64>()
                    .map_err(|e| CfError::Parse(format!("bad digit {part:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        DigitString::new(digits)
    }
}

impl Serialize for DigitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// The numerators `p_k*` and denominators `q_k*` for `-1 ≤ k ≤ n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvergentTable {
    p: Vec<Integer>,
    q: Vec<Integer>,
}

impl ConvergentTable {
    /// Length `n` of the underlying digit string.
    pub fn n(&self) -> usize {
        self.p.len() - 2
    }

    /// `p_k*` for `-1 ≤ k ≤ n`.
    pub fn p(&self, k: isize) -> &Integer {
        &self.p[(k + 1) as usize]
    }

    /// `q_k*` for `-1 ≤ k ≤ n`.
    pub fn q(&self, k: isize) -> &Integer {
        &self.q[(k + 1) as usize]
    }

    /// `p_{-1}*, p_0*, …, p_n*`.
    pub fn p_values(&self) -> &[Integer] {
        &self.p
    }

    /// `q_{-1}*, q_0*, …, q_n*`.
    pub fn q_values(&self) -> &[Integer] {
        &self.q
    }

    /// `φ_k(σ) = p_k*/q_k*` for `0 ≤ k ≤ n`.
    pub fn convergent(&self, k: usize) -> Rational {
        Rational::from((self.p(k as isize).clone(), self.q(k as isize).clone()))
    }

    /// `q_0* + q_1* + … + q_n*`.
    pub fn q_sum(&self) -> Integer {
        self.q[1..].iter().sum()
    }
}

pub fn convergent_table(sigma: &DigitString) -> ConvergentTable {
    let n = sigma.len();
    let mut p = Vec::with_capacity(n + 2);
    let mut q = Vec::with_capacity(n + 2);
    p.push(Integer::from(1));
    p.push(Integer::from(0));
    q.push(Integer::from(0));
    q.push(Integer::from(1));
    for (i, &d) in sigma.digits().iter().enumerate() {
        let pk = Integer::from(&p[i + 1] * d) + &p[i];
        let qk = Integer::from(&q[i + 1] * d) + &q[i];
        p.push(pk);
        q.push(qk);
    }
    ConvergentTable { p, q }
}

/// `φ(σ) = [σ₁, …, σₙ]`.
pub fn phi(sigma: &DigitString) -> Rational {
    convergent_table(sigma).convergent(sigma.len())
}

/// `φ_k(σ)` for `0 ≤ k ≤ n`.
pub fn phi_k(sigma: &DigitString, k: usize) -> Result<Rational> {
    if k > sigma.len() {
        return Err(CfError::domain(format!(
            "convergent index {k} exceeds string length {}",
            sigma.len()
        )));
    }
    Ok(convergent_table(sigma).convergent(k))
}

/// `{x} = x - ⌊x⌋`.
pub fn fractional_part(x: &Rational) -> Rational {
    let floor = Rational::from(x.floor_ref());
    Rational::from(x - &floor)
}

fn check_unit_interval(x: &Rational) -> Result<()> {
    if *x < 0 || *x >= 1 {
        return Err(CfError::domain(format!("{x} is outside [0, 1)")));
    }
    Ok(())
}

/// The algorithmic digit string `f(x)` of a rational `x ∈ [0, 1)`.
pub fn expand_rational(x: &Rational) -> Result<DigitString> {
    check_unit_interval(x)?;
    let mut num = x.numer().clone();
    let mut den = x.denom().clone();
    let mut digits = Vec::new();
    while num != 0 {
        let (d, r) = den.div_rem_floor(num.clone());
        let d = d
            .to_u64()
            .ok_or_else(|| CfError::domain(format!("digit {d} exceeds the 64-bit digit range")))?;
        digits.push(d);
        den = num;
        num = r;
    }
    Ok(DigitString::from_vec_unchecked(digits))
}

/// `φ^{-1}({x})`: `{f(x), sibling(f(x))}` for `x ∈ (0,1) ∩ ℚ` and `{()}` for `x = 0`.
pub fn preimages_of(x: &Rational) -> Result<Vec<DigitString>> {
    let sigma = expand_rational(x)?;
    if sigma.is_empty() {
        return Ok(vec![sigma]);
    }
    let other = sigma.sibling()?;
    Ok(vec![sigma, other])
}

/// A real number in `[0, 1)` known to lie in `[center - radius, center + radius]`.
#[derive(Clone, Debug, PartialEq)]
pub struct RealNumber {
    pub center: Rational,
    pub radius: Rational,
}

impl RealNumber {
    pub fn exact(x: Rational) -> Self {
        RealNumber {
            center: x,
            radius: Rational::new(),
        }
    }

    /// The float's value, taken as exact.
    pub fn exact_float(x: &Float) -> Self {
        RealNumber::exact(x.to_rational().expect("finite float"))
    }

    /// The float's value widened by one unit in the last place.
    pub fn from_float(x: &Float) -> Self {
        let center = x.to_rational().expect("finite float");
        let radius = match x.get_exp() {
            Some(e) => {
                let shift = e - x.prec() as i32;
                let mut r = Rational::from(1);
                if shift >= 0 {
                    r <<= shift as u32;
                } else {
                    r >>= (-shift) as u32;
                }
                r
            }
            None => Rational::new(),
        };
        RealNumber { center, radius }
    }

    /// Parses a plain decimal such as `0.6180339887`; the radius is half a unit
    /// in the last written place.
    pub fn from_decimal(s: &str) -> Result<Self> {
        let value = parse_decimal(s)?;
        let places = s.trim().split_once('.').map_or(0, |(_, frac)| frac.len());
        let mut radius = Rational::from((1, 2));
        for _ in 0..places {
            radius /= 10;
        }
        Ok(RealNumber {
            center: value,
            radius,
        })
    }

    pub fn is_exact(&self) -> bool {
        self.radius == 0
    }

    /// `[center - radius, center + radius] ∩ [0, 1]`.
    pub fn bounds(&self) -> (Rational, Rational) {
        let mut lo = Rational::from(&self.center - &self.radius);
        let mut hi = Rational::from(&self.center + &self.radius);
        if lo < 0 {
            lo = Rational::new();
        }
        if hi > 1 {
            hi = Rational::from(1);
        }
        (lo, hi)
    }
}

/// Exact value of a decimal literal (`"0.25"` is `1/4`), also accepting `p/q`.
pub fn parse_decimal(s: &str) -> Result<Rational> {
    let t = s.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p: Integer = p
            .trim()
            .parse()
            .map_err(|e| CfError::Parse(format!("bad numerator {p:?}: {e}")))?;
        let q: Integer = q
            .trim()
            .parse()
            .map_err(|e| CfError::Parse(format!("bad denominator {q:?}: {e}")))?;
        if q == 0 {
            return Err(CfError::Parse("zero denominator".into()));
        }
        return Ok(Rational::from((p, q)));
    }
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty()
        || !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return Err(CfError::Parse(format!("not a number: {s:?}")));
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: Integer = if digits.is_empty() {
        Integer::new()
    } else {
        digits
            .parse()
            .map_err(|e| CfError::Parse(format!("{s:?}: {e}")))?
    };
    let denom = Integer::from(Integer::u_pow_u(10, frac_part.len() as u32));
    let v = Rational::from((numer, denom));
    Ok(if neg { -v } else { v })
}

/// Digits of a real number obtained by interval agreement.
#[derive(Clone, Debug, PartialEq)]
pub struct DigitPrefix {
    pub digits: DigitString,
    /// The expansion ended (`x` is rational and every digit was emitted).
    pub terminated: bool,
}

/// First `count` digits of `x`. A digit is emitted only when every point of
/// the current enclosure shares it; otherwise the digits that are certain are
/// returned inside [`CfError::PrecisionExhausted`].
pub fn digits_prefix_of_real(x: &RealNumber, count: usize) -> Result<DigitPrefix> {
    if count == 0 {
        return Err(CfError::param("digit count must be at least 1"));
    }
    check_unit_interval(&x.center)?;
    let (mut lo, mut hi) = x.bounds();
    let mut digits = Vec::new();
    while digits.len() < count {
        if hi == 0 {
            return Ok(DigitPrefix {
                digits: DigitString::from_vec_unchecked(digits),
                terminated: true,
            });
        }
        if lo <= 0 {
            return Err(CfError::PrecisionExhausted {
                emitted: DigitString::from_vec_unchecked(digits),
            });
        }
        let inv_hi = Rational::from(hi.recip_ref());
        let inv_lo = Rational::from(lo.recip_ref());
        let d_min = Integer::from(inv_hi.floor_ref());
        let d_max = Integer::from(inv_lo.floor_ref());
        if d_min != d_max {
            return Err(CfError::PrecisionExhausted {
                emitted: DigitString::from_vec_unchecked(digits),
            });
        }
        let d = d_min
            .to_u64()
            .ok_or_else(|| CfError::domain("digit exceeds the 64-bit digit range"))?;
        let d_rat = Rational::from(d_min);
        lo = inv_hi - &d_rat;
        hi = inv_lo - &d_rat;
        digits.push(d);
    }
    let terminated = hi == 0;
    Ok(DigitPrefix {
        digits: DigitString::from_vec_unchecked(digits),
        terminated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::float::Constant;

    fn ds(v: &[u64]) -> DigitString {
        DigitString::new(v.to_vec()).unwrap()
    }

    fn r(p: i64, q: i64) -> Rational {
        Rational::from((p, q))
    }

    /// Quotients of the Euclidean algorithm on (q, p): independent of the Gauss map code.
    fn euclid_digits(p: u64, q: u64) -> Vec<u64> {
        let (mut a, mut b) = (q, p);
        let mut out = Vec::new();
        while b != 0 {
            out.push(a / b);
            let t = a % b;
            a = b;
            b = t;
        }
        out
    }

    #[test]
    fn expand_examples() {
        assert_eq!(expand_rational(&r(3, 10)).unwrap(), ds(&[3, 3]));
        assert_eq!(expand_rational(&r(0, 1)).unwrap(), DigitString::empty());
        assert_eq!(
            expand_rational(&r(355, 452)).unwrap().digits(),
            euclid_digits(355, 452).as_slice()
        );
        assert!(expand_rational(&r(1, 1)).is_err());
        assert!(expand_rational(&r(-1, 3)).is_err());
    }

    #[test]
    fn expansion_ends_in_digit_above_one() {
        for q in 2..=120i64 {
            for p in 1..q {
                let sigma = expand_rational(&r(p, q)).unwrap();
                assert!(sigma.last().unwrap() > 1, "{p}/{q} -> {sigma}");
            }
        }
    }

    #[test]
    fn convergent_table_examples() {
        let t = convergent_table(&ds(&[3, 3]));
        assert_eq!(t.q_values(), &[0, 1, 3, 10]);
        assert_eq!(t.p_values(), &[1, 0, 1, 3]);
        let t = convergent_table(&DigitString::empty());
        assert_eq!(t.q_values(), &[0, 1]);
        assert_eq!(t.p_values(), &[1, 0]);
        let t = convergent_table(&ds(&[1, 2, 3]));
        assert_eq!(t.q_values(), &[0, 1, 1, 3, 10]);
        assert_eq!(*t.q(3), 10);
        assert_eq!(*t.q(2), 3);
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi(&ds(&[1, 1])), r(1, 2));
        assert_eq!(phi(&DigitString::empty()), 0);
        assert_eq!(phi(&ds(&[3, 2, 1])), r(3, 10));
        assert_eq!(phi_k(&ds(&[3, 2, 1]), 1).unwrap(), r(1, 3));
        assert_eq!(phi_k(&ds(&[3, 2, 1]), 0).unwrap(), 0);
        assert!(phi_k(&ds(&[3, 2, 1]), 4).is_err());
    }

    #[test]
    fn realizability() {
        assert!(ds(&[3, 3]).is_realizable());
        assert!(!ds(&[3, 2, 1]).is_realizable());
        assert!(DigitString::empty().is_realizable());
    }

    #[test]
    fn sibling_and_hat() {
        assert_eq!(ds(&[3, 3]).sibling().unwrap(), ds(&[3, 2, 1]));
        assert_eq!(ds(&[2]).sibling().unwrap(), ds(&[1, 1]));
        assert_eq!(ds(&[1, 1]).sibling().unwrap(), ds(&[2]));
        assert!(ds(&[1]).sibling().is_err());
        assert_eq!(DigitString::empty().sibling(), Err(CfError::EmptyString));

        assert_eq!(ds(&[2]).hat().unwrap(), ds(&[3]));
        assert_eq!(ds(&[1, 1]).hat().unwrap(), ds(&[1, 2]));
        assert_eq!(ds(&[3, 3]).hat().unwrap(), ds(&[3, 4]));
        assert!(DigitString::empty().hat().is_err());
    }

    #[test]
    fn preimages() {
        assert_eq!(preimages_of(&r(1, 2)).unwrap(), vec![ds(&[2]), ds(&[1, 1])]);
        assert_eq!(preimages_of(&r(0, 1)).unwrap(), vec![DigitString::empty()]);
        assert_eq!(
            preimages_of(&r(3, 10)).unwrap(),
            vec![ds(&[3, 3]), ds(&[3, 2, 1])]
        );
        for s in preimages_of(&r(7, 19)).unwrap() {
            assert_eq!(phi(&s), r(7, 19));
        }
    }

    #[test]
    fn digit_string_text_form() {
        assert_eq!(ds(&[3, 2, 1]).to_string(), "3,2,1");
        assert_eq!("3, 2,1".parse::<DigitString>().unwrap(), ds(&[3, 2, 1]));
        assert_eq!("".parse::<DigitString>().unwrap(), DigitString::empty());
        assert_eq!(
            "(empty)".parse::<DigitString>().unwrap(),
            DigitString::empty()
        );
        assert!("3,0".parse::<DigitString>().is_err());
        assert!("3,x".parse::<DigitString>().is_err());
    }

    #[test]
    fn decimal_parsing_is_exact() {
        assert_eq!(parse_decimal("0.25").unwrap(), r(1, 4));
        assert_eq!(parse_decimal("7/5").unwrap(), r(7, 5));
        assert_eq!(parse_decimal("-1.5").unwrap(), r(-3, 2));
        assert_eq!(parse_decimal("3").unwrap(), 3);
        assert!(parse_decimal("abc").is_err());
        assert!(parse_decimal("1/0").is_err());
        let x = RealNumber::from_decimal("0.618").unwrap();
        assert_eq!(x.radius, r(1, 2000));
    }

    #[test]
    fn golden_ratio_digits_are_all_one() {
        let mut x = Float::with_val(256, 5);
        x.sqrt_mut();
        x -= 1;
        x /= 2;
        let prefix = digits_prefix_of_real(&RealNumber::from_float(&x), 20).unwrap();
        assert_eq!(prefix.digits.digits(), &[1u64; 20][..]);
        assert!(!prefix.terminated);
    }

    #[test]
    fn exact_half_terminates() {
        let prefix = digits_prefix_of_real(&RealNumber::exact(r(1, 2)), 5).unwrap();
        assert_eq!(prefix.digits, ds(&[2]));
        assert!(prefix.terminated);
    }

    #[test]
    fn pi_fractional_digits() {
        let x = Float::with_val(256, Constant::Pi) - 3u32;
        let prefix = digits_prefix_of_real(&RealNumber::from_float(&x), 10).unwrap();
        let expected = [7u64, 15, 1, 292, 1, 1, 1, 2, 1, 3];
        assert_eq!(prefix.digits.digits(), &expected);
        // oracle: exact expansion of the binary value itself
        let exact = expand_rational(&x.to_rational().unwrap()).unwrap();
        assert_eq!(exact.truncated(10).digits(), &expected);
    }

    #[test]
    fn low_precision_exhausts() {
        let mut x = Float::with_val(24, 5);
        x.sqrt_mut();
        x -= 1;
        x /= 2;
        match digits_prefix_of_real(&RealNumber::from_float(&x), 200) {
            Err(CfError::PrecisionExhausted { emitted }) => {
                assert!(emitted.len() >= 5 && emitted.len() < 40, "{emitted}");
                assert!(emitted.digits().iter().all(|&d| d == 1));
            }
            other => panic!("expected exhaustion, got {other:?}"),
        }
    }
}
