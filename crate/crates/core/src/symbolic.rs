//! Fundamental intervals `I_σ` and lazy enumeration of digit strings.

use std::cmp::Ordering;
use std::fmt;

use rug::{Integer, Rational};
use serde::Serialize;

use crate::digits::{convergent_table, phi, DigitString};
use crate::error::{CfError, Result};

/// The set of `x ∈ [0,1)` whose digit strings begin with `σ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FundamentalInterval {
    pub sigma: DigitString,
    pub left: Rational,
    pub right: Rational,
    pub left_closed: bool,
    pub right_closed: bool,
    pub length: Rational,
}

impl FundamentalInterval {
    pub fn contains(&self, x: &Rational) -> bool {
        let above = match x.cmp(&self.left) {
            Ordering::Greater => true,
            Ordering::Equal => self.left_closed,
            Ordering::Less => false,
        };
        let below = match x.cmp(&self.right) {
            Ordering::Less => true,
            Ordering::Equal => self.right_closed,
            Ordering::Greater => false,
        };
        above && below
    }

    /// Do the two intervals share a point?
    pub fn intersects(&self, other: &FundamentalInterval) -> bool {
        let (a, b) = if self.left <= other.left {
            (self, other)
        } else {
            (other, self)
        };
        match a.right.cmp(&b.left) {
            Ordering::Less => false,
            Ordering::Equal => a.right_closed && b.left_closed,
            Ordering::Greater => true,
        }
    }

    pub fn to_row(&self) -> IntervalRow {
        let t = convergent_table(&self.sigma);
        let n = self.sigma.len();
        IntervalRow {
            sigma: self.sigma.to_string(),
            n,
            q_n: t.q(n as isize).to_string(),
            q_prev: t.q(n as isize - 1).to_string(),
            left: self.left.to_string(),
            right: self.right.to_string(),
            length: self.length.to_string(),
        }
    }
}

impl fmt::Display for FundamentalInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.left_closed { '[' } else { '(' },
            self.left,
            self.right,
            if self.right_closed { ']' } else { ')' }
        )
    }
}

/// Tabular form of a fundamental interval.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntervalRow {
    pub sigma: String,
    pub n: usize,
    pub q_n: String,
    pub q_prev: String,
    pub left: String,
    pub right: String,
    pub length: String,
}

/// `1/(qₙ(qₙ + qₙ₋₁))`.
pub fn interval_length(q_n: &Integer, q_prev: &Integer) -> Rational {
    let denom = Integer::from(q_n + q_prev) * q_n;
    Rational::from((Integer::from(1), denom))
}

pub fn fundamental_interval(sigma: &DigitString) -> Result<FundamentalInterval> {
    if sigma.is_empty() {
        return Err(CfError::EmptyString);
    }
    let n = sigma.len();
    let at_sigma = phi(sigma);
    let at_hat = phi(&sigma.hat()?);
    let closed_at_sigma = sigma.is_realizable();
    let (left, right, left_closed, right_closed) = if n % 2 == 1 {
        (at_hat, at_sigma, false, closed_at_sigma)
    } else {
        (at_sigma, at_hat, closed_at_sigma, false)
    };
    let t = convergent_table(sigma);
    let length = interval_length(t.q(n as isize), t.q(n as isize - 1));
    debug_assert_eq!(length, Rational::from(&right - &left));
    Ok(FundamentalInterval {
        sigma: sigma.clone(),
        left,
        right,
        left_closed,
        right_closed,
        length,
    })
}

/// All strings of length `n` with digits in `1..=digit_cap`, in lexicographic order.
#[derive(Clone, Debug)]
pub struct LengthEnumerator {
    cap: u64,
    current: Option<Vec<u64>>,
}

pub fn enumerate_by_length(n: usize, digit_cap: u64) -> Result<LengthEnumerator> {
    if n == 0 {
        return Err(CfError::param("string length must be at least 1"));
    }
    if digit_cap == 0 {
        return Err(CfError::param("digit cap must be at least 1"));
    }
    Ok(LengthEnumerator {
        cap: digit_cap,
        current: Some(vec![1; n]),
    })
}

impl Iterator for LengthEnumerator {
    type Item = DigitString;

    fn next(&mut self) -> Option<DigitString> {
        let cur = self.current.as_mut()?;
        let out = DigitString::from_vec_unchecked(cur.clone());
        let mut i = cur.len();
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if cur[i] < self.cap {
                cur[i] += 1;
                break;
            }
            cur[i] = 1;
        }
        Some(out)
    }
}

/// Depth-first walk over every non-empty `σ` with `qₙ*(σ) ≤ cutoff`,
/// smallest digit first, each string visited once.
#[derive(Clone, Debug)]
pub struct DenominatorEnumerator {
    cutoff: u64,
    digits: Vec<u64>,
    /// `q_{-1}, q_0, …, q_n` for the current string.
    q: Vec<u64>,
    done: bool,
}

pub fn enumerate_by_denominator(cutoff: u64) -> Result<DenominatorEnumerator> {
    if cutoff == 0 {
        return Err(CfError::param("denominator cutoff must be at least 1"));
    }
    Ok(DenominatorEnumerator {
        cutoff,
        digits: Vec::new(),
        q: vec![0, 1],
        done: false,
    })
}

impl DenominatorEnumerator {
    fn child(&self, d: u64) -> Option<u64> {
        let k = self.q.len();
        let q = d.checked_mul(self.q[k - 1])?.checked_add(self.q[k - 2])?;
        (q <= self.cutoff).then_some(q)
    }

    /// Moves to the next string and returns `(qₙ*, qₙ₋₁*)`.
    pub fn advance(&mut self) -> Option<(u64, u64)> {
        if self.done {
            return None;
        }
        if let Some(q) = self.child(1) {
            self.digits.push(1);
            self.q.push(q);
        } else {
            loop {
                let Some(d) = self.digits.pop() else {
                    self.done = true;
                    return None;
                };
                self.q.pop();
                if let Some(q) = self.child(d + 1) {
                    self.digits.push(d + 1);
                    self.q.push(q);
                    break;
                }
            }
        }
        let k = self.q.len();
        Some((self.q[k - 1], self.q[k - 2]))
    }

    /// The string most recently reached by [`advance`](Self::advance).
    pub fn current(&self) -> &[u64] {
        &self.digits
    }

    /// Remaining `(qₙ*, qₙ₋₁*)` pairs without materializing strings.
    pub fn pairs(self) -> impl Iterator<Item = (u64, u64)> {
        let mut walk = self;
        std::iter::from_fn(move || walk.advance())
    }
}

impl Iterator for DenominatorEnumerator {
    type Item = DigitString;

    fn next(&mut self) -> Option<DigitString> {
        self.advance()?;
        Some(DigitString::from_vec_unchecked(self.digits.clone()))
    }
}

/// `Σ 𝓛(I_σ)` over strings of length `n` with digits `≤ cutoff`, after checking
/// that the intervals are pairwise disjoint.
pub fn interval_cover_check(n: usize, cutoff: u64) -> Result<Rational> {
    let mut intervals = enumerate_by_length(n, cutoff)?
        .map(|s| fundamental_interval(&s))
        .collect::<Result<Vec<_>>>()?;
    intervals.sort_by(|a, b| a.left.cmp(&b.left));
    for w in intervals.windows(2) {
        if w[0].intersects(&w[1]) {
            return Err(CfError::Overlap {
                first: w[0].sigma.clone(),
                second: w[1].sigma.clone(),
            });
        }
    }
    Ok(intervals.iter().map(|i| &i.length).sum())
}
