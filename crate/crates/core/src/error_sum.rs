//! The error-sum functions `E`, `P` on rationals and reals, their digit-string
//! counterparts `E*`, `P*`, sibling differences and cylinder extrema.

use rug::{Float, Integer, Rational};

use crate::arith::FibonacciCache;
use crate::digits::{
    convergent_table, digits_prefix_of_real, expand_rational, fractional_part, DigitString,
    RealNumber,
};
use crate::error::{CfError, Result};
use crate::interval::Enclosure;
use crate::symbolic::interval_length;

/// `E*(σ) = Σ_{k=0}^{n} (φ(σ) − φ_k(σ))`.
pub fn e_star(sigma: &DigitString) -> Rational {
    let t = convergent_table(sigma);
    let n = sigma.len();
    let value = t.convergent(n);
    let mut sum = Rational::from(&value * Integer::from(n + 1));
    for k in 0..=n {
        sum -= t.convergent(k);
    }
    sum
}

/// `P*(σ) = Σ_{k=0}^{n} (φ(σ) − φ_k(σ)) q_k*(σ)`.
pub fn p_star(sigma: &DigitString) -> Rational {
    let t = convergent_table(sigma);
    let n = sigma.len();
    let value = t.convergent(n);
    let p_sum: Integer = t.p_values()[1..].iter().sum();
    Rational::from(&value * t.q_sum()) - p_sum
}

/// `E(x)` for any rational `x`, using `E(x + 1) = E(x)`.
pub fn eval_e(x: &Rational) -> Rational {
    let frac = fractional_part(x);
    e_star(&expand_rational(&frac).expect("fractional part lies in [0, 1)"))
}

/// `P(x)` for any rational `x`, using `P(x + 1) = P(x)`.
pub fn eval_p(x: &Rational) -> Rational {
    let frac = fractional_part(x);
    p_star(&expand_rational(&frac).expect("fractional part lies in [0, 1)"))
}

/// Value of `E` or `P` at a real number.
#[derive(Clone, Debug, PartialEq)]
pub enum ErrorSumValue {
    Exact(Rational),
    Enclosed {
        enclosure: Enclosure,
        terms_used: usize,
        tail_bound: Float,
    },
}

impl ErrorSumValue {
    pub fn enclosure(&self, prec: u32) -> Enclosure {
        match self {
            ErrorSumValue::Exact(r) => Enclosure::from_rational(prec, r),
            ErrorSumValue::Enclosed { enclosure, .. } => enclosure.clone(),
        }
    }

    pub fn terms_used(&self) -> Option<usize> {
        match self {
            ErrorSumValue::Exact(_) => None,
            ErrorSumValue::Enclosed { terms_used, .. } => Some(*terms_used),
        }
    }

    pub fn tail_bound(&self, prec: u32) -> Float {
        match self {
            ErrorSumValue::Exact(_) => Float::new(prec),
            ErrorSumValue::Enclosed { tail_bound, .. } => tail_bound.clone(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, ErrorSumValue::Exact(_))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Which {
    E,
    P,
}

/// `Σ_{k≥K} 1/(F_{k+1} F_{k+2}) ≤ 2/(F_{K+1} F_{K+2})`.
pub fn e_tail_bound(k: usize, fib: &mut FibonacciCache) -> Rational {
    let a = fib.get(k + 1).clone();
    let b = fib.get(k + 2).clone();
    Rational::from((Integer::from(2), a * b))
}

/// `Σ_{k≥K} 1/F_{k+1} ≤ 3/F_{K+1}` for `K ≥ 1`.
pub fn p_tail_bound(k: usize, fib: &mut FibonacciCache) -> Rational {
    assert!(k >= 1, "P tail bound needs K ≥ 1");
    Rational::from((Integer::from(3), fib.get(k + 1).clone()))
}

fn tail_bound(which: Which, k: usize, fib: &mut FibonacciCache) -> Rational {
    match which {
        Which::E => e_tail_bound(k, fib),
        Which::P => p_tail_bound(k, fib),
    }
}

fn eval_real(which: Which, x: &RealNumber, tolerance: f64, prec: u32) -> Result<ErrorSumValue> {
    if !(tolerance > 0.0 && tolerance.is_finite()) {
        return Err(CfError::param("tolerance must be a positive finite number"));
    }
    if x.center < 0 || x.center >= 1 {
        return Err(CfError::domain(format!("{} is outside [0, 1)", x.center)));
    }
    if x.is_exact() {
        return Ok(ErrorSumValue::Exact(match which {
            Which::E => eval_e(&x.center),
            Which::P => eval_p(&x.center),
        }));
    }
    let tol = Rational::from_f64(tolerance).expect("finite tolerance");
    let mut fib = FibonacciCache::new();
    let mut k = 1;
    while tail_bound(which, k, &mut fib) >= tol {
        k += 1;
    }
    let tail = tail_bound(which, k, &mut fib);
    let prefix = digits_prefix_of_real(x, k)?;
    let t = convergent_table(&prefix.digits);
    let terms = k.min(prefix.digits.len() + 1);
    let (lo_x, hi_x) = x.bounds();
    // Σ_{j<terms} (w_j x − c_j), with w_j = 1, c_j = p_j/q_j for E and w_j = q_j, c_j = p_j for P.
    let mut weight = Rational::new();
    let mut offset = Rational::new();
    for j in 0..terms {
        let (p, q) = (t.p(j as isize), t.q(j as isize));
        match which {
            Which::E => {
                weight += 1;
                offset += Rational::from((p.clone(), q.clone()));
            }
            Which::P => {
                weight += q;
                offset += p;
            }
        }
    }
    let lo = Rational::from(&weight * &lo_x) - &offset - &tail;
    let hi = Rational::from(&weight * &hi_x) - &offset + &tail;
    let tail_float = Float::with_val_round(prec, &tail, rug::float::Round::Up).0;
    Ok(ErrorSumValue::Enclosed {
        enclosure: Enclosure::from_rationals(prec, &lo, &hi),
        terms_used: terms,
        tail_bound: tail_float,
    })
}

/// `E(x)` for a real `x ∈ [0,1)` known to finite precision.
///
/// Exact inputs are evaluated exactly. Otherwise the first `K` terms are summed
/// with `K` the least index whose Fibonacci tail bound falls below `tolerance`.
pub fn eval_e_real(x: &RealNumber, tolerance: f64, prec: u32) -> Result<ErrorSumValue> {
    eval_real(Which::E, x, tolerance, prec)
}

/// `P(x)` for a real `x ∈ [0,1)` known to finite precision.
pub fn eval_p_real(x: &RealNumber, tolerance: f64, prec: u32) -> Result<ErrorSumValue> {
    eval_real(Which::P, x, tolerance, prec)
}

fn check_sibling_input(sigma: &DigitString) -> Result<()> {
    match sigma.last() {
        None => Err(CfError::EmptyString),
        Some(1) => Err(CfError::domain(format!(
            "({sigma}) ends in 1; pass its realizable sibling instead"
        ))),
        Some(_) => Ok(()),
    }
}

fn sign(n: usize) -> i32 {
    if n % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `E*(sibling(σ)) − E*(σ) = (−1)ⁿ/(qₙ*(qₙ* − qₙ₋₁*))` for `σ` with last digit `> 1`.
pub fn e_star_sibling_delta(sigma: &DigitString) -> Result<Rational> {
    check_sibling_input(sigma)?;
    let n = sigma.len();
    let t = convergent_table(sigma);
    let (q, qp) = (t.q(n as isize), t.q(n as isize - 1));
    let denom = Integer::from(q - qp) * q;
    Ok(Rational::from((Integer::from(sign(n)), denom)))
}

/// `P*(sibling(σ)) − P*(σ) = (−1)ⁿ/qₙ*` for `σ` with last digit `> 1`.
pub fn p_star_sibling_delta(sigma: &DigitString) -> Result<Rational> {
    check_sibling_input(sigma)?;
    let n = sigma.len();
    let t = convergent_table(sigma);
    Ok(Rational::from((
        Integer::from(sign(n)),
        t.q(n as isize).clone(),
    )))
}

/// Extreme values of `E*` or `P*` over all strings extending `σ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CylinderExtrema {
    pub min: Rational,
    pub max: Rational,
    pub argmin: DigitString,
    pub argmax: DigitString,
    pub spread: Rational,
}

fn extrema(sigma: &DigitString, at_sigma: Rational, spread: Rational) -> Result<CylinderExtrema> {
    let other = sigma.extended(1)?;
    Ok(if sigma.len() % 2 == 1 {
        CylinderExtrema {
            min: Rational::from(&at_sigma - &spread),
            max: at_sigma,
            argmin: other,
            argmax: sigma.clone(),
            spread,
        }
    } else {
        CylinderExtrema {
            max: Rational::from(&at_sigma + &spread),
            min: at_sigma,
            argmin: sigma.clone(),
            argmax: other,
            spread,
        }
    })
}

/// `(n+1)·𝓛(I_σ)`.
pub fn oscillation_e(sigma: &DigitString) -> Result<Rational> {
    if sigma.is_empty() {
        return Err(CfError::EmptyString);
    }
    let n = sigma.len();
    let t = convergent_table(sigma);
    let len = interval_length(t.q(n as isize), t.q(n as isize - 1));
    Ok(len * Integer::from(n + 1))
}

/// `𝓛(I_σ)·Σ_{k=0}^{n} q_k*`.
pub fn oscillation_p(sigma: &DigitString) -> Result<Rational> {
    if sigma.is_empty() {
        return Err(CfError::EmptyString);
    }
    let n = sigma.len();
    let t = convergent_table(sigma);
    let len = interval_length(t.q(n as isize), t.q(n as isize - 1));
    Ok(len * t.q_sum())
}

pub fn cylinder_extrema_e(sigma: &DigitString) -> Result<CylinderExtrema> {
    let spread = oscillation_e(sigma)?;
    extrema(sigma, e_star(sigma), spread)
}

pub fn cylinder_extrema_p(sigma: &DigitString) -> Result<CylinderExtrema> {
    let spread = oscillation_p(sigma)?;
    extrema(sigma, p_star(sigma), spread)
}
