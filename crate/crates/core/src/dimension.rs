//! Covering rectangles for the graphs of `E` and `P`, their weighted sums,
//! exact graph samples on Farey fractions and box counting.

use std::collections::HashSet;

use rayon::prelude::*;
use rug::{Integer, Rational};
use serde::Serialize;

use crate::arith::{pow_enclosure, two_pow_neg, FibonacciCache};
use crate::digits::DigitString;
use crate::error::{CfError, Result};
use crate::error_sum::{cylinder_extrema_e, cylinder_extrema_p, eval_e, eval_p};
use crate::interval::Enclosure;
use crate::symbolic::{
    enumerate_by_length, fundamental_interval, FundamentalInterval, LengthEnumerator,
};
use crate::transfer::{cylinder_sums, CylinderWeight};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Target {
    E,
    P,
}

impl Target {
    pub fn eval(self, x: &Rational) -> Rational {
        match self {
            Target::E => eval_e(x),
            Target::P => eval_p(x),
        }
    }
}

/// `I_σ × [y_min, y_max]`, covered by `square_count` squares of side `𝓛(I_σ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverRectangle {
    pub sigma: DigitString,
    pub x_interval: FundamentalInterval,
    pub y_min: Rational,
    pub y_max: Rational,
    pub square_count: Integer,
}

impl CoverRectangle {
    fn build(target: Target, sigma: DigitString) -> Result<Self> {
        let x_interval = fundamental_interval(&sigma)?;
        let ext = match target {
            Target::E => cylinder_extrema_e(&sigma)?,
            Target::P => cylinder_extrema_p(&sigma)?,
        };
        let height = Rational::from(&ext.max - &ext.min);
        let square_count = Rational::from(&height / &x_interval.length)
            .ceil()
            .numer()
            .clone();
        Ok(CoverRectangle {
            sigma,
            x_interval,
            y_min: ext.min,
            y_max: ext.max,
            square_count,
        })
    }

    /// Is `(x, y)` in the closed rectangle?
    pub fn contains_closure(&self, x: &Rational, y: &Rational) -> bool {
        self.x_interval.left <= *x
            && *x <= self.x_interval.right
            && self.y_min <= *y
            && *y <= self.y_max
    }
}

/// Rectangles over every `σ` of length `n` with digits `≤ cap`.
pub struct CoverStream {
    target: Target,
    strings: LengthEnumerator,
}

impl Iterator for CoverStream {
    type Item = CoverRectangle;

    fn next(&mut self) -> Option<CoverRectangle> {
        let sigma = self.strings.next()?;
        Some(CoverRectangle::build(self.target, sigma).expect("non-empty string"))
    }
}

pub fn cover_for(target: Target, n: usize, digit_cap: u64) -> Result<CoverStream> {
    Ok(CoverStream {
        target,
        strings: enumerate_by_length(n, digit_cap)?,
    })
}

pub fn cover_for_e(n: usize, digit_cap: u64) -> Result<CoverStream> {
    cover_for(Target::E, n, digit_cap)
}

pub fn cover_for_p(n: usize, digit_cap: u64) -> Result<CoverStream> {
    cover_for(Target::P, n, digit_cap)
}

fn sqrt2_pow(epsilon: f64, prec: u32) -> Enclosure {
    two_pow_neg(-(1.0 + epsilon) / 2.0, prec)
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(CfError::param(format!(
            "ε must be finite and ≥ 0, got {epsilon}"
        )));
    }
    Ok(())
}

/// `Σ_σ (square count)·(√2 𝓛(I_σ))^{1+ε}` for `n = 1, …, n_max` (entry `n - 1`).
pub fn cover_weights(
    n_max: usize,
    digit_cap: u64,
    epsilon: f64,
    target: Target,
    prec: u32,
) -> Result<Vec<Enclosure>> {
    check_epsilon(epsilon)?;
    let factor = sqrt2_pow(epsilon, prec);
    let sums = match target {
        Target::E => cylinder_sums(
            CylinderWeight::length_power(epsilon),
            digit_cap,
            n_max,
            prec,
        )?
        .into_iter()
        .enumerate()
        .map(|(i, a)| a.scale(&Rational::from(i as u64 + 2)))
        .collect::<Vec<_>>(),
        Target::P => cylinder_sums(
            CylinderWeight::length_power_times_q_sum(epsilon),
            digit_cap,
            n_max,
            prec,
        )?,
    };
    Ok(sums.iter().map(|s| s.mul(&factor)).collect())
}

pub fn cover_weight(
    n: usize,
    digit_cap: u64,
    epsilon: f64,
    target: Target,
    prec: u32,
) -> Result<Enclosure> {
    Ok(cover_weights(n, digit_cap, epsilon, target, prec)?
        .pop()
        .expect("n ≥ 1"))
}

/// `(n+1)(1/(F_{n+1}F_{n+2}))^ε`.
pub fn fibonacci_cover_bound(
    n: usize,
    epsilon: f64,
    fib: &mut FibonacciCache,
    prec: u32,
) -> Result<Enclosure> {
    check_epsilon(epsilon)?;
    let a = fib.get(n + 1).clone();
    let b = fib.get(n + 2).clone();
    let base = Rational::from((Integer::from(1), a * b));
    Ok(pow_enclosure(&base, epsilon, prec).scale(&Rational::from(n as u64 + 1)))
}

/// Reduced fractions `p/q ∈ [0, 1)` with `q ≤ n`, in increasing order.
#[derive(Clone, Debug)]
pub struct FareySequence {
    n: u64,
    a: u64,
    b: u64,
    c: u64,
    d: u64,
    started: bool,
}

impl FareySequence {
    pub fn new(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(CfError::param("Farey order must be at least 1"));
        }
        Ok(FareySequence {
            n,
            a: 0,
            b: 1,
            c: 1,
            d: n,
            started: false,
        })
    }
}

impl Iterator for FareySequence {
    type Item = (u64, u64);

    fn next(&mut self) -> Option<(u64, u64)> {
        if !self.started {
            self.started = true;
            return Some((self.a, self.b));
        }
        if self.c >= self.d {
            return None;
        }
        let k = (self.n + self.b) / self.d;
        let (c, d) = (k * self.c - self.a, k * self.d - self.b);
        self.a = self.c;
        self.b = self.d;
        self.c = c;
        self.d = d;
        Some((self.a, self.b))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphPoint {
    pub x: Rational,
    pub y: Rational,
}

/// `(x, E(x))` or `(x, P(x))` for every reduced `x = p/q ∈ [0,1)` with `q ≤ cap`, in Farey order.
pub fn sample_graph(target: Target, denominator_cap: u64) -> Result<Vec<GraphPoint>> {
    if denominator_cap < 2 {
        return Err(CfError::param("denominator cap must be at least 2"));
    }
    let xs: Vec<(u64, u64)> = FareySequence::new(denominator_cap)?.collect();
    Ok(xs
        .par_iter()
        .map(|&(p, q)| {
            let x = Rational::from((p, q));
            let y = target.eval(&x);
            GraphPoint { x, y }
        })
        .collect())
}

/// `i` with `side = 2^{-i}`, `i ≥ 1`.
pub fn dyadic_exponent(side: &Rational) -> Result<u32> {
    let d = side.denom();
    if *side.numer() != 1 || *d <= 1 || !d.is_power_of_two() {
        return Err(CfError::param(format!(
            "side {side} is not 2^-i with i ≥ 1"
        )));
    }
    Ok(d.significant_bits() - 1)
}

fn cell(v: &Rational, exp: u32) -> i64 {
    let scaled = Integer::from(v.numer() << exp);
    let (f, _) = scaled.div_rem_floor(v.denom().clone());
    f.to_i64().expect("cell index fits in 64 bits")
}

/// Number of distinct grid cells `(⌊x/side⌋, ⌊y/side⌋)` hit by the points.
pub fn box_count<'a>(
    points: impl IntoIterator<Item = &'a GraphPoint>,
    side: &Rational,
) -> Result<usize> {
    let exp = dyadic_exponent(side)?;
    Ok(count_cells(points, exp))
}

fn count_cells<'a>(points: impl IntoIterator<Item = &'a GraphPoint>, exp: u32) -> usize {
    points
        .into_iter()
        .map(|p| (cell(&p.x, exp), cell(&p.y, exp)))
        .collect::<HashSet<_>>()
        .len()
}

#[derive(Clone, Debug, Serialize)]
pub struct BoxCountReport {
    pub target: Option<Target>,
    pub denominator_cap: u64,
    /// `i` for side `2^{-i}`.
    pub scales: Vec<u32>,
    pub counts: Vec<usize>,
    /// Least-squares slope of `log₂(count)` against `i`.
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
    pub samples_used: usize,
    pub warning: Option<String>,
}

/// Box counts of a point set at sides `2^{-i}` for `i` in `scales`.
pub fn box_count_report(
    points: &[GraphPoint],
    scales: &[u32],
    denominator_cap: u64,
    target: Option<Target>,
) -> Result<BoxCountReport> {
    if scales.len() < 2 {
        return Err(CfError::param("need at least two scales"));
    }
    if scales.iter().any(|&i| i == 0 || i > 60) {
        return Err(CfError::param("scale exponents must lie in 1..=60"));
    }
    let counts: Vec<usize> = scales.iter().map(|&i| count_cells(points, i)).collect();
    let xs: Vec<f64> = scales.iter().map(|&i| i as f64).collect();
    let ys: Vec<f64> = counts.iter().map(|&c| (c as f64).log2()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(CfError::param("scales must not all be equal"));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum::<f64>()
        / m)
        .sqrt();
    let finest = *scales.iter().max().unwrap();
    let warning = (denominator_cap < (1u64 << finest.min(63))).then(|| {
        format!("finest side 2^-{finest} is below the sample resolution 1/{denominator_cap}")
    });
    Ok(BoxCountReport {
        target,
        denominator_cap,
        scales: scales.to_vec(),
        counts,
        slope,
        intercept,
        residual,
        samples_used: points.len(),
        warning,
    })
}

/// Samples the graph of `target` at denominator cap `cap` and fits a box-counting slope.
pub fn estimate_dimension(
    target: Target,
    denominator_cap: u64,
    scales: &[u32],
) -> Result<BoxCountReport> {
    let points = sample_graph(target, denominator_cap)?;
    box_count_report(&points, scales, denominator_cap, Some(target))
}
