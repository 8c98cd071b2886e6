//! Rigorous enclosures of per-length cylinder sums under a digit cap.
//!
//! For strings `σ` of length `n` with digits `≤ cap`, write `q = qₙ*(σ)` and
//! `r = qₙ₋₁*(σ)/qₙ*(σ)`. The sums handled here are
//!
//! ```text
//! Σ_σ q^{-α} (1 + r)^{-β}            and    Σ_σ q^{-α} (1 + r)^{-β} Σ_{k≤n} q_k*(σ).
//! ```
//!
//! Since `q_k = q_{k-1}(d_k + r_{k-1})` and `r_k = 1/(d_k + r_{k-1})`, the first
//! sum equals `(Lⁿ g)(0)` with `g(r) = (1+r)^{-β}` and
//! `(L h)(r) = Σ_{d≤cap} (d + r)^{-α} h(1/(d + r))`. The second is `Cₙ(0)` where
//! `A_m = L^m g`, `C_0 = g` and `C_m = L_{α-1} C_{m-1} + A_m`.
//!
//! Small instances are summed string by string with directed MPFR rounding.
//! Larger ones iterate the operator on lower and upper step functions over a
//! uniform grid of `[0, 1]`, rounding outward at every step.

use rayon::prelude::*;
use rug::float::Round;
use rug::ops::{AddAssignRound, MulAssignRound, PowAssignRound};
use rug::{Float, Integer, Rational};

use crate::error::{CfError, Result};
use crate::interval::Enclosure;

/// Grid size used by [`cylinder_sums`].
pub const DEFAULT_CELLS: usize = 4096;

/// Instances with at most this many strings are enumerated directly.
pub const ENUMERATION_LIMIT: u64 = 50_000;

const ENUM_PREC: u32 = 64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CylinderWeight {
    pub alpha: f64,
    pub beta: f64,
    /// Multiply each term by `q_0* + … + qₙ*`.
    pub times_q_sum: bool,
}

impl CylinderWeight {
    /// `𝓛(I_σ)^{1+ε} = q^{-(2+2ε)} (1+r)^{-(1+ε)}`.
    pub fn length_power(epsilon: f64) -> Self {
        CylinderWeight {
            alpha: 2.0 + 2.0 * epsilon,
            beta: 1.0 + epsilon,
            times_q_sum: false,
        }
    }

    /// `qₙ^{-ε} (qₙ + qₙ₋₁)^{-(1+ε)} = q^{-(1+2ε)} (1+r)^{-(1+ε)}`.
    pub fn relative(epsilon: f64) -> Self {
        CylinderWeight {
            alpha: 1.0 + 2.0 * epsilon,
            beta: 1.0 + epsilon,
            times_q_sum: false,
        }
    }

    /// `𝓛(I_σ)^{1+ε} Σ_{k≤n} q_k*`.
    pub fn length_power_times_q_sum(epsilon: f64) -> Self {
        CylinderWeight {
            times_q_sum: true,
            ..CylinderWeight::length_power(epsilon)
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = self.alpha.is_finite() && self.beta.is_finite() && self.beta >= 0.0;
        let min_alpha = if self.times_q_sum { 1.0 } else { 0.0 };
        if !ok || self.alpha < min_alpha {
            return Err(CfError::param(format!(
                "unsupported exponents α = {}, β = {}",
                self.alpha, self.beta
            )));
        }
        Ok(())
    }
}

fn string_count(cap: u64, n: usize) -> Option<u64> {
    let mut c: u64 = 1;
    for _ in 0..n {
        c = c.checked_mul(cap)?;
    }
    Some(c)
}

/// Enclosures of the sums for `n = 1, …, n_max` (entry `n - 1`).
pub fn cylinder_sums(
    weight: CylinderWeight,
    cap: u64,
    n_max: usize,
    prec: u32,
) -> Result<Vec<Enclosure>> {
    weight.validate()?;
    check_sizes(cap, n_max)?;
    let first_large =
        (1..=n_max).find(|&n| string_count(cap, n).map_or(true, |c| c > ENUMERATION_LIMIT));
    let mut out = Vec::with_capacity(n_max);
    let small_end = first_large.map_or(n_max, |n| n - 1);
    for n in 1..=small_end {
        out.push(enumerated_cylinder_sum(weight, n, cap, prec)?);
    }
    if first_large.is_some() {
        let all = operator_cylinder_sums(weight, cap, n_max, DEFAULT_CELLS, prec)?;
        out.extend(all.into_iter().skip(small_end));
    }
    Ok(out)
}

fn check_sizes(cap: u64, n: usize) -> Result<()> {
    if cap == 0 {
        return Err(CfError::param("digit cap must be at least 1"));
    }
    if n == 0 {
        return Err(CfError::param("string length must be at least 1"));
    }
    Ok(())
}

struct TermBounds {
    neg_alpha: Float,
    neg_beta: Float,
    times_q_sum: bool,
    lo: Float,
    hi: Float,
}

impl TermBounds {
    fn add(&mut self, q: &Integer, qp: &Integer, q_sum: &Integer) {
        let ratio = Rational::from((Integer::from(q + qp), q.clone()));
        let mut lo = Float::with_val_round(ENUM_PREC, q, Round::Up).0;
        lo.pow_assign_round(&self.neg_alpha, Round::Down);
        let mut f = Float::with_val_round(ENUM_PREC, &ratio, Round::Up).0;
        f.pow_assign_round(&self.neg_beta, Round::Down);
        lo.mul_assign_round(&f, Round::Down);

        let mut hi = Float::with_val_round(ENUM_PREC, q, Round::Down).0;
        hi.pow_assign_round(&self.neg_alpha, Round::Up);
        let mut f = Float::with_val_round(ENUM_PREC, &ratio, Round::Down).0;
        f.pow_assign_round(&self.neg_beta, Round::Up);
        hi.mul_assign_round(&f, Round::Up);

        if self.times_q_sum {
            lo.mul_assign_round(
                &Float::with_val_round(ENUM_PREC, q_sum, Round::Down).0,
                Round::Down,
            );
            hi.mul_assign_round(
                &Float::with_val_round(ENUM_PREC, q_sum, Round::Up).0,
                Round::Up,
            );
        }
        self.lo.add_assign_round(&lo, Round::Down);
        self.hi.add_assign_round(&hi, Round::Up);
    }
}

/// String-by-string sum over the `capⁿ` strings of length `n`.
pub fn enumerated_cylinder_sum(
    weight: CylinderWeight,
    n: usize,
    cap: u64,
    prec: u32,
) -> Result<Enclosure> {
    weight.validate()?;
    check_sizes(cap, n)?;
    let mut acc = TermBounds {
        neg_alpha: Float::with_val(ENUM_PREC, -weight.alpha),
        neg_beta: Float::with_val(ENUM_PREC, -weight.beta),
        times_q_sum: weight.times_q_sum,
        lo: Float::with_val(prec.max(ENUM_PREC), 0),
        hi: Float::with_val(prec.max(ENUM_PREC), 0),
    };
    // depth-first over digits, carrying (q_k, q_{k-1}, Σ q)
    let mut stack: Vec<(Integer, Integer, Integer, usize)> =
        vec![(Integer::from(1), Integer::new(), Integer::from(1), 0)];
    while let Some((q, qp, q_sum, depth)) = stack.pop() {
        if depth == n {
            acc.add(&q, &qp, &q_sum);
            continue;
        }
        for d in (1..=cap).rev() {
            let next = Integer::from(&q * d) + &qp;
            let s = Integer::from(&q_sum + &next);
            stack.push((next, q.clone(), s, depth + 1));
        }
    }
    Ok(Enclosure::new(
        Float::with_val_round(prec, &acc.lo, Round::Down).0,
        Float::with_val_round(prec, &acc.hi, Round::Up).0,
    ))
}

/// Lower and upper step functions on equal cells of `[0, 1]`.
#[derive(Clone, Debug)]
struct StepBounds {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

struct Grid {
    cells: usize,
    cap: u64,
    margin: f64,
}

impl Grid {
    fn edge(&self, i: usize) -> f64 {
        i as f64 / self.cells as f64
    }

    /// Cells that may contain `1/(d + r)` for `r` in cell `i`.
    fn image_cells(&self, d: u64, i: usize) -> (usize, usize) {
        let n = self.cells as f64;
        let y_lo = 1.0 / (d as f64 + self.edge(i + 1));
        let y_hi = 1.0 / (d as f64 + self.edge(i));
        let first = ((y_lo * n).floor() as usize).saturating_sub(1);
        let last = ((y_hi * n).floor() as usize + 1).min(self.cells - 1);
        (first, last)
    }

    /// `(L_α h)` on every cell.
    fn apply(&self, alpha: f64, h: &StepBounds) -> StepBounds {
        let pairs: Vec<(f64, f64)> = (0..self.cells)
            .into_par_iter()
            .map(|i| {
                let (a, b) = (self.edge(i), self.edge(i + 1));
                let mut lo = 0.0;
                let mut hi = 0.0;
                for d in 1..=self.cap {
                    let w_lo = (d as f64 + b).powf(-alpha);
                    let w_hi = (d as f64 + a).powf(-alpha);
                    let (first, last) = self.image_cells(d, i);
                    let h_lo = h.lo[first..=last]
                        .iter()
                        .copied()
                        .fold(f64::INFINITY, f64::min);
                    let h_hi = h.hi[first..=last].iter().copied().fold(0.0, f64::max);
                    lo += w_lo * h_lo;
                    hi += w_hi * h_hi;
                }
                (lo * (1.0 - self.margin), hi * (1.0 + self.margin))
            })
            .collect();
        let (lo, hi) = pairs.into_iter().unzip();
        StepBounds { lo, hi }
    }

    /// `(L_α h)(0) = Σ_d d^{-α} h(1/d)`.
    fn apply_at_zero(&self, alpha: f64, h: &StepBounds) -> (f64, f64) {
        let mut lo = 0.0;
        let mut hi = 0.0;
        for d in 1..=self.cap {
            let w = (d as f64).powf(-alpha);
            let i = ((self.cells as u64 / d) as usize).min(self.cells - 1);
            lo += w * h.lo[i];
            hi += w * h.hi[i];
        }
        (lo * (1.0 - self.margin), hi * (1.0 + self.margin))
    }
}

fn scale_exponent(h: &StepBounds) -> i32 {
    let m = h.hi.iter().copied().fold(0.0, f64::max);
    if m > 0.0 && m.is_finite() {
        m.log2().floor() as i32
    } else {
        0
    }
}

fn rescale(h: &mut StepBounds, e: i32) {
    let f = 2f64.powi(-e);
    for v in h.lo.iter_mut().chain(h.hi.iter_mut()) {
        *v *= f;
    }
}

fn to_enclosure(prec: u32, (lo, hi): (f64, f64), exp: i64) -> Enclosure {
    let lo = Float::with_val(prec, lo.max(0.0)) << exp as i32;
    let hi = Float::with_val(prec, hi) << exp as i32;
    Enclosure::new(lo, hi)
}

/// Operator iteration on a grid of `cells` cells for `n = 1, …, n_max`.
pub fn operator_cylinder_sums(
    weight: CylinderWeight,
    cap: u64,
    n_max: usize,
    cells: usize,
    prec: u32,
) -> Result<Vec<Enclosure>> {
    weight.validate()?;
    check_sizes(cap, n_max)?;
    if cells < 2 || !cells.is_power_of_two() {
        return Err(CfError::param(
            "grid size must be a power of two, at least 2",
        ));
    }
    let (alpha, beta) = (weight.alpha, weight.beta);
    let eps = f64::EPSILON;
    let margin =
        (2.0 * cap as f64 + 16.0) * eps + 4.0 * eps * (alpha + beta) * ((cap + 2) as f64).ln();
    let grid = Grid { cells, cap, margin };

    let g = StepBounds {
        lo: (0..cells)
            .map(|i| (1.0 + grid.edge(i + 1)).powf(-beta) * (1.0 - margin))
            .collect(),
        hi: (0..cells)
            .map(|i| (1.0 + grid.edge(i)).powf(-beta) * (1.0 + margin))
            .collect(),
    };
    let mut out = Vec::with_capacity(n_max);
    let mut exp: i64 = 0;
    if !weight.times_q_sum {
        let mut h = g;
        for _ in 0..n_max {
            out.push(to_enclosure(prec, grid.apply_at_zero(alpha, &h), exp));
            h = grid.apply(alpha, &h);
            let e = scale_exponent(&h);
            rescale(&mut h, e);
            exp += e as i64;
        }
    } else {
        let alpha1 = alpha - 1.0;
        let mut a = g.clone();
        let mut c = g;
        for _ in 0..n_max {
            // C_m(0) = (L_{α-1} C_{m-1})(0) + (L_α A_{m-1})(0)
            let (cl, ch) = grid.apply_at_zero(alpha1, &c);
            let (al, ah) = grid.apply_at_zero(alpha, &a);
            out.push(to_enclosure(
                prec,
                ((cl + al) * (1.0 - eps), (ch + ah) * (1.0 + 2.0 * eps)),
                exp,
            ));
            let next_a = grid.apply(alpha, &a);
            let lc = grid.apply(alpha1, &c);
            let mut next_c = StepBounds {
                lo: lc
                    .lo
                    .iter()
                    .zip(&next_a.lo)
                    .map(|(x, y)| (x + y) * (1.0 - eps))
                    .collect(),
                hi: lc
                    .hi
                    .iter()
                    .zip(&next_a.hi)
                    .map(|(x, y)| (x + y) * (1.0 + 2.0 * eps))
                    .collect(),
            };
            let mut next_a = next_a;
            let e = scale_exponent(&next_c);
            rescale(&mut next_c, e);
            rescale(&mut next_a, e);
            exp += e as i64;
            a = next_a;
            c = next_c;
        }
    }
    Ok(out)
}
