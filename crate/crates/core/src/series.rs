//! Covering series over digit strings and their coprime-pair form.
//!
//! For a weight `Φ(j, k) ≥ 0`, the string sum `S = Σ_{σ≠()} Φ(qₙ*, qₙ₋₁*)` and the
//! pair sum `−2Φ(1,0) + Φ(1,1) + 2 Σ_{j≥1} Σ_{0≤k<j, gcd(j,k)=1} Φ(j,k)` agree
//! term by term once both are cut at `qₙ* ≤ J` and `j ≤ J`.

use rayon::prelude::*;
use rug::{Float, Integer, Rational};
use serde::Serialize;

use crate::arith::{pow_enclosure, two_pow_neg, zeta_enclosure, FibonacciCache, MobiusSieve};
use crate::error::{CfError, Result};
use crate::interval::Enclosure;
use crate::symbolic::enumerate_by_denominator;
use crate::transfer::{cylinder_sums, CylinderWeight};

const U: f64 = f64::EPSILON / 2.0;

/// Number of `j` values per parallel work item.
const J_CHUNK: u64 = 64;

/// `Φ(j, k)` for the covering series.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightFunction {
    /// `(j(j+k))^{-(1+ε)}`.
    Error { epsilon: f64 },
    /// `j^{-ε} (j+k)^{-(1+ε)}`.
    Relative { epsilon: f64 },
    /// `1/(j²(j+k)²)`.
    SquaredTest,
}

impl WeightFunction {
    pub fn validate(&self) -> Result<()> {
        match *self {
            WeightFunction::Error { epsilon } | WeightFunction::Relative { epsilon } => {
                if !(epsilon >= 0.0 && epsilon.is_finite()) {
                    return Err(CfError::param(format!(
                        "ε must be finite and ≥ 0, got {epsilon}"
                    )));
                }
                Ok(())
            }
            WeightFunction::SquaredTest => Ok(()),
        }
    }

    pub fn eval_f64(&self, j: u64, k: u64) -> f64 {
        match *self {
            WeightFunction::Error { epsilon } => ((j * (j + k)) as f64).powf(-(1.0 + epsilon)),
            WeightFunction::Relative { epsilon } => {
                (j as f64).powf(-epsilon) * ((j + k) as f64).powf(-(1.0 + epsilon))
            }
            WeightFunction::SquaredTest => {
                let x = (j * (j + k)) as f64;
                1.0 / (x * x)
            }
        }
    }

    /// Exact value when it is rational for every pair.
    pub fn eval_rational(&self, j: u64, k: u64) -> Option<Rational> {
        let base = Integer::from(j) * (j + k);
        match *self {
            WeightFunction::SquaredTest => Some(Rational::from((1, base.square()))),
            WeightFunction::Error { epsilon } if epsilon == 1.0 => {
                Some(Rational::from((1, base.square())))
            }
            WeightFunction::Error { epsilon } if epsilon == 0.0 => Some(Rational::from((1, base))),
            _ => None,
        }
    }

    /// Directed-rounding enclosure of `Φ(j, k)`.
    pub fn eval_enclosure(&self, j: u64, k: u64, prec: u32) -> Enclosure {
        if let Some(r) = self.eval_rational(j, k) {
            return Enclosure::from_rational(prec, &r);
        }
        match *self {
            WeightFunction::Error { epsilon } => {
                let base = Rational::from(Integer::from(j) * (j + k));
                pow_enclosure(&base, -(1.0 + epsilon), prec)
            }
            WeightFunction::Relative { epsilon } => {
                let a = pow_enclosure(&Rational::from(j), -epsilon, prec);
                let b = pow_enclosure(&Rational::from(j + k), -(1.0 + epsilon), prec);
                a.mul(&b)
            }
            WeightFunction::SquaredTest => unreachable!(),
        }
    }

    /// Relative error bound for one [`eval_f64`](Self::eval_f64) term with `j + k ≤ 2J`.
    fn term_rel_error(&self, cutoff: u64) -> f64 {
        let log_max = ((2 * cutoff * cutoff + 2) as f64).ln();
        match *self {
            WeightFunction::Error { epsilon } => (4.0 + 2.0 * (1.0 + epsilon) * log_max) * U,
            WeightFunction::Relative { epsilon } => {
                (8.0 + 2.0 * (1.0 + 2.0 * epsilon) * log_max) * U
            }
            WeightFunction::SquaredTest => 4.0 * U,
        }
    }
}

/// `S_J = Σ_{σ : qₙ* ≤ J} Φ(qₙ*, qₙ₋₁*)` over the string enumeration, exactly.
pub fn conversion_lhs_exact(phi: impl Fn(u64, u64) -> Rational, cutoff: u64) -> Result<Rational> {
    let mut sum = Rational::new();
    for (q, qp) in enumerate_by_denominator(cutoff)?.pairs() {
        sum += phi(q, qp);
    }
    Ok(sum)
}

/// `−2Φ(1,0) + Φ(1,1) + 2 Σ_{j≤J} Σ_{0≤k<j, gcd=1} Φ(j,k)`, exactly.
pub fn conversion_rhs_exact(phi: impl Fn(u64, u64) -> Rational, cutoff: u64) -> Result<Rational> {
    if cutoff == 0 {
        return Err(CfError::param("cutoff must be at least 1"));
    }
    let mut pairs = Rational::new();
    for j in 1..=cutoff {
        for k in 0..j {
            if crate::arith::gcd(j, k) == 1 {
                pairs += phi(j, k);
            }
        }
    }
    Ok(Rational::from(-2 * phi(1, 0)) + phi(1, 1) + Rational::from(2 * pairs))
}

/// String-side sum with each term enclosed separately.
pub fn conversion_lhs(weight: &WeightFunction, cutoff: u64, prec: u32) -> Result<Enclosure> {
    weight.validate()?;
    let mut acc = Enclosure::from_rational(prec, &Rational::new());
    for (q, qp) in enumerate_by_denominator(cutoff)?.pairs() {
        acc = acc.add(&weight.eval_enclosure(q, qp, prec));
    }
    Ok(acc)
}

/// Pair-side sum `Φ(1,1) + 2 Σ_{2≤j≤J} Σ_{1≤k<j, gcd=1} Φ(j,k)`.
pub fn conversion_rhs(weight: &WeightFunction, cutoff: u64, prec: u32) -> Result<Enclosure> {
    weight.validate()?;
    if cutoff == 0 {
        return Err(CfError::param("cutoff must be at least 1"));
    }
    let one_one = weight.eval_enclosure(1, 1, prec);
    let pairs = coprime_pair_sum(weight, cutoff, prec)?;
    Ok(one_one.add(&pairs.scale(&Rational::from(2))))
}

fn smallest_prime_factors(limit: u64) -> Vec<u32> {
    let n = limit as usize;
    let mut spf = vec![0u32; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            let mut m = i;
            while m <= n {
                if spf[m] == 0 {
                    spf[m] = i as u32;
                }
                m += i;
            }
        }
    }
    spf
}

fn distinct_primes(mut j: u64, spf: &[u32]) -> Vec<u64> {
    let mut out = Vec::new();
    while j > 1 {
        let p = spf[j as usize] as u64;
        out.push(p);
        while j % p == 0 {
            j /= p;
        }
    }
    out
}

/// `Σ_{2≤j≤J} Σ_{1≤k<j, gcd(j,k)=1} Φ(j,k)` in `f64`, enclosed with a rigorous
/// relative error budget. Work items are fixed `j`-ranges combined in order, so
/// the result does not depend on the number of threads.
pub fn coprime_pair_sum(weight: &WeightFunction, cutoff: u64, prec: u32) -> Result<Enclosure> {
    weight.validate()?;
    if cutoff == 0 {
        return Err(CfError::param("cutoff must be at least 1"));
    }
    let spf = smallest_prime_factors(cutoff);
    let chunks: Vec<(u64, u64)> = (0..cutoff.div_ceil(J_CHUNK))
        .map(|c| (c * J_CHUNK + 1, ((c + 1) * J_CHUNK).min(cutoff)))
        .collect();
    let partials: Vec<f64> = chunks
        .par_iter()
        .map(|&(start, end)| {
            let mut blocked = vec![false; cutoff as usize];
            let mut chunk_sum = 0.0;
            for j in start.max(2)..=end {
                let primes = distinct_primes(j, &spf);
                for &p in &primes {
                    let mut m = p;
                    while m < j {
                        blocked[m as usize] = true;
                        m += p;
                    }
                }
                let mut inner = 0.0;
                for k in 1..j {
                    if !blocked[k as usize] {
                        inner += weight.eval_f64(j, k);
                    }
                }
                for &p in &primes {
                    let mut m = p;
                    while m < j {
                        blocked[m as usize] = false;
                        m += p;
                    }
                }
                chunk_sum += inner;
            }
            chunk_sum
        })
        .collect();
    let total: f64 = partials.iter().sum();
    let rel = weight.term_rel_error(cutoff)
        + 1.01 * (cutoff as f64 + J_CHUNK as f64 + partials.len() as f64 + 4.0) * U;
    Ok(Enclosure::from_f64_rel(prec, total, rel))
}

/// Both sides of the Möbius unfolding of the coprime sum.
#[derive(Clone, Debug, Serialize)]
pub struct MobiusUnfold {
    pub epsilon: f64,
    pub cutoff: u64,
    /// `Σ_{j≤J} Σ_{1≤k<j, gcd=1} (j(j+k))^{-(1+ε)}`.
    pub coprime_sum: Enclosure,
    /// `Σ_{d≤J} μ(d) d^{-(2+2ε)} Σ_{j'≤J/d} Σ_{1≤k'<j'} (j'(j'+k'))^{-(1+ε)}`.
    pub mobius_sum: Enclosure,
}

impl MobiusUnfold {
    /// Do the two enclosures overlap?
    pub fn consistent(&self) -> bool {
        !self.coprime_sum.certainly_lt(&self.mobius_sum)
            && !self.mobius_sum.certainly_lt(&self.coprime_sum)
    }
}

pub fn mobius_unfold_check(epsilon: f64, cutoff: u64, prec: u32) -> Result<MobiusUnfold> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(CfError::param(format!("ε must be positive, got {epsilon}")));
    }
    let weight = WeightFunction::Error { epsilon };
    let coprime_sum = coprime_pair_sum(&weight, cutoff, prec)?;
    // all-pairs prefix sums T(m) = Σ_{j≤m} Σ_{1≤k<j} Φ(j,k)
    let inner: Vec<f64> = (1..=cutoff)
        .into_par_iter()
        .map(|j| (1..j).map(|k| weight.eval_f64(j, k)).sum())
        .collect();
    let mut prefix = Vec::with_capacity(cutoff as usize + 1);
    prefix.push(0.0);
    let mut run = 0.0;
    for v in &inner {
        run += v;
        prefix.push(run);
    }
    let rel = weight.term_rel_error(cutoff) + 1.01 * (2.0 * cutoff as f64 + 4.0) * U;
    let sieve = MobiusSieve::new(cutoff as usize);
    let mut mobius_sum = Enclosure::from_rational(prec, &Rational::new());
    for d in 1..=cutoff {
        let mu = sieve.get(d as usize);
        let m = cutoff / d;
        if mu == 0 || m < 2 {
            continue;
        }
        let t = Enclosure::from_f64_rel(prec, prefix[m as usize], rel);
        let scale = pow_enclosure(&Rational::from(d), -(2.0 + 2.0 * epsilon), prec);
        let term = t.mul(&scale);
        mobius_sum = if mu > 0 {
            mobius_sum.add(&term)
        } else {
            mobius_sum.sub(&term)
        };
    }
    Ok(MobiusUnfold {
        epsilon,
        cutoff,
        coprime_sum,
        mobius_sum,
    })
}

/// Outcome of comparing an enclosure against a bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Violated,
    Undecided,
}

impl Verdict {
    /// `value ≤ bound`, decided only when the enclosures separate.
    pub fn le(value: &Enclosure, bound: &Enclosure) -> Verdict {
        if value.certainly_le(bound) {
            Verdict::Holds
        } else if bound.certainly_lt(value) {
            Verdict::Violated
        } else {
            Verdict::Undecided
        }
    }

    pub fn holds(self) -> bool {
        self == Verdict::Holds
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundCheck {
    pub label: String,
    pub bound: Enclosure,
    pub verdict: Verdict,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesKind {
    /// Terms `𝓛(I_σ)^{1+ε}`.
    A,
    /// Terms `qₙ^{-ε}(qₙ + qₙ₋₁)^{-(1+ε)}`.
    B,
}

/// Per-length sum over strings with digits `≤ cap`.
#[derive(Clone, Debug, Serialize)]
pub struct PerLengthValue {
    pub n: usize,
    pub value: Enclosure,
    pub n_plus_1_times_value: Enclosure,
}

#[derive(Clone, Debug, Serialize)]
pub struct SeriesReport {
    pub kind: SeriesKind,
    pub epsilon: f64,
    pub cutoff: u64,
    pub partial_sum: Enclosure,
    pub bounds: Vec<BoundCheck>,
    /// `ε` within 0.05 of the divergence threshold `1/2`.
    pub near_divergence: bool,
    pub digit_cap: Option<u64>,
    pub per_length: Vec<PerLengthValue>,
}

impl SeriesReport {
    pub fn all_bounds_hold(&self) -> bool {
        self.bounds.iter().all(|b| b.verdict.holds())
    }
}

/// Optional per-length breakdown: lengths `1..=n_max`, digits `≤ digit_cap`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PerLength {
    pub n_max: usize,
    pub digit_cap: u64,
}

/// `−2 + 2^{-(1+ε)} + 2ζ(s₁)/ζ(s₂)`.
fn zeta_ratio_bound(epsilon: f64, s1: f64, s2: f64, prec: u32) -> Result<Enclosure> {
    let z1 = zeta_enclosure(s1, prec)?;
    let z2 = zeta_enclosure(s2, prec)?;
    let ratio = z1
        .div(&z2)
        .ok_or_else(|| CfError::domain("ζ enclosure straddles zero"))?;
    let minus_two = Enclosure::from_rational(prec, &Rational::from(-2));
    Ok(minus_two
        .add(&two_pow_neg(1.0 + epsilon, prec))
        .add(&ratio.scale(&Rational::from(2))))
}

fn per_length(
    weight: CylinderWeight,
    per: Option<PerLength>,
    prec: u32,
) -> Result<Vec<PerLengthValue>> {
    let Some(per) = per else {
        return Ok(Vec::new());
    };
    let sums = cylinder_sums(weight, per.digit_cap, per.n_max, prec)?;
    Ok(sums
        .into_iter()
        .enumerate()
        .map(|(i, value)| PerLengthValue {
            n: i + 1,
            n_plus_1_times_value: value.scale(&Rational::from(i as u64 + 2)),
            value,
        })
        .collect())
}

/// `Σₙ aₙ` with `aₙ = Σ_{σ∈Σₙ} 𝓛(I_σ)^{1+ε}`, truncated at `qₙ* ≤ J`.
///
/// The report compares the partial sum with `2^{-(1+ε)}` and with
/// `−2 + 2^{-(1+ε)} + 2ζ(1+2ε)/ζ(2+2ε)`.
pub fn a_n_partial(
    epsilon: f64,
    cutoff: u64,
    per: Option<PerLength>,
    prec: u32,
) -> Result<SeriesReport> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(CfError::param(format!("ε must be positive, got {epsilon}")));
    }
    let partial_sum = conversion_rhs(&WeightFunction::Error { epsilon }, cutoff, prec)?;
    let two_pow = two_pow_neg(1.0 + epsilon, prec);
    let zeta = zeta_ratio_bound(epsilon, 1.0 + 2.0 * epsilon, 2.0 + 2.0 * epsilon, prec)?;
    let bounds = vec![
        BoundCheck {
            label: "2^-(1+e)".into(),
            verdict: Verdict::le(&partial_sum, &two_pow),
            bound: two_pow,
        },
        BoundCheck {
            label: "-2 + 2^-(1+e) + 2 zeta(1+2e)/zeta(2+2e)".into(),
            verdict: Verdict::le(&partial_sum, &zeta),
            bound: zeta,
        },
    ];
    Ok(SeriesReport {
        kind: SeriesKind::A,
        epsilon,
        cutoff,
        partial_sum,
        bounds,
        near_divergence: false,
        digit_cap: per.map(|p| p.digit_cap),
        per_length: per_length(CylinderWeight::length_power(epsilon), per, prec)?,
    })
}

fn check_b_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.5 && epsilon.is_finite()) {
        return Err(CfError::param("series bound requires ε > 1/2"));
    }
    Ok(())
}

/// `Σₙ bₙ` with `bₙ = Σ_{σ∈Σₙ} qₙ^{-ε}(qₙ + qₙ₋₁)^{-(1+ε)}`, truncated at `qₙ* ≤ J`,
/// compared with `−2 + 2^{-(1+ε)} + 2ζ(2ε)/ζ(1+2ε)`.
pub fn b_n_partial(
    epsilon: f64,
    cutoff: u64,
    per: Option<PerLength>,
    prec: u32,
) -> Result<SeriesReport> {
    check_b_epsilon(epsilon)?;
    let partial_sum = conversion_rhs(&WeightFunction::Relative { epsilon }, cutoff, prec)?;
    let zeta = zeta_ratio_bound(epsilon, 2.0 * epsilon, 1.0 + 2.0 * epsilon, prec)?;
    let bounds = vec![BoundCheck {
        label: "-2 + 2^-(1+e) + 2 zeta(2e)/zeta(1+2e)".into(),
        verdict: Verdict::le(&partial_sum, &zeta),
        bound: zeta,
    }];
    Ok(SeriesReport {
        kind: SeriesKind::B,
        epsilon,
        cutoff,
        partial_sum,
        bounds,
        near_divergence: epsilon - 0.5 < 0.05,
        digit_cap: per.map(|p| p.digit_cap),
        per_length: per_length(CylinderWeight::relative(epsilon), per, prec)?,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TailBoundRow {
    pub n: usize,
    /// `bₙ` over strings with digits `≤ cap`.
    pub b_n: Enclosure,
    /// `1/((2ε−1) F_n^{2ε−1})`.
    pub bound: Enclosure,
    pub n_plus_1_times_bound: Enclosure,
    pub verdict: Verdict,
}

/// `1/((2ε−1) F_n^{2ε−1})`.
pub fn fibonacci_tail_bound(
    epsilon: f64,
    n: usize,
    fib: &mut FibonacciCache,
    prec: u32,
) -> Result<Enclosure> {
    check_b_epsilon(epsilon)?;
    if n == 0 {
        return Err(CfError::param("n must be at least 1"));
    }
    let e = 2.0 * epsilon - 1.0;
    let f_pow = pow_enclosure(&Rational::from(fib.get(n).clone()), e, prec);
    let coeff = Enclosure::point(&Float::with_val(prec, e));
    let one = Enclosure::from_rational(prec, &Rational::from(1));
    one.div(&coeff.mul(&f_pow))
        .ok_or_else(|| CfError::domain("degenerate tail bound"))
}

/// Truncated `bₙ ≤ 1/((2ε−1)F_n^{2ε−1})` for `n = 1, …, n_max`.
pub fn rp_tail_bound_check(
    epsilon: f64,
    n_max: usize,
    digit_cap: u64,
    prec: u32,
) -> Result<Vec<TailBoundRow>> {
    check_b_epsilon(epsilon)?;
    let sums = cylinder_sums(CylinderWeight::relative(epsilon), digit_cap, n_max, prec)?;
    let mut fib = FibonacciCache::new();
    sums.into_iter()
        .enumerate()
        .map(|(i, b_n)| {
            let n = i + 1;
            let bound = fibonacci_tail_bound(epsilon, n, &mut fib, prec)?;
            Ok(TailBoundRow {
                n,
                verdict: Verdict::le(&b_n, &bound),
                n_plus_1_times_bound: bound.scale(&Rational::from(n as u64 + 1)),
                b_n,
                bound,
            })
        })
        .collect()
}

/// `Σ_{j≤m<2j} m^{-(1+ε)}` and the estimates used for it.
#[derive(Clone, Debug, Serialize)]
pub struct InnerSumEstimate {
    pub j: u64,
    pub epsilon: f64,
    pub sum: Enclosure,
    /// `j^{-ε}`.
    pub coarse_upper: Enclosure,
    /// `(1/ε)((j−1)^{-ε} − (2j−1)^{-ε})`, for `j ≥ 2`.
    pub integral_upper: Option<Enclosure>,
    /// `(1/ε)(1 − 2^{-ε}) j^{-ε}`.
    pub integral_lower: Enclosure,
}

impl InnerSumEstimate {
    pub fn consistent(&self) -> bool {
        // at j = 1 the sum and j^{-ε} are both exactly 1
        let coarse = self.j == 1 || self.sum.certainly_le(&self.coarse_upper);
        let upper = self
            .integral_upper
            .as_ref()
            .map_or(true, |u| self.sum.certainly_le(u));
        coarse && upper && self.integral_lower.certainly_le(&self.sum)
    }
}

pub fn inner_sum_estimate(j: u64, epsilon: f64, prec: u32) -> Result<InnerSumEstimate> {
    if j == 0 {
        return Err(CfError::param("j must be at least 1"));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(CfError::param(format!("ε must be positive, got {epsilon}")));
    }
    let total: f64 = (j..2 * j).map(|m| (m as f64).powf(-(1.0 + epsilon))).sum();
    let rel = (j as f64 + 8.0 + 2.0 * (1.0 + epsilon) * ((2 * j) as f64).ln()) * U;
    let sum = Enclosure::from_f64_rel(prec, total, rel);
    let pw = |x: u64| pow_enclosure(&Rational::from(x), -epsilon, prec);
    let inv_eps = Enclosure::from_rational(prec, &Rational::from(1))
        .div(&Enclosure::point(&Float::with_val(prec, epsilon)))
        .expect("ε > 0");
    let integral_upper = (j >= 2).then(|| inv_eps.mul(&pw(j - 1).sub(&pw(2 * j - 1))));
    let one = Enclosure::from_rational(prec, &Rational::from(1));
    let integral_lower = inv_eps
        .mul(&one.sub(&two_pow_neg(epsilon, prec)))
        .mul(&pw(j));
    Ok(InnerSumEstimate {
        j,
        epsilon,
        sum,
        coarse_upper: pw(j),
        integral_upper,
        integral_lower,
    })
}
