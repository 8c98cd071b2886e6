//! Closed enclosures `[lo, hi]` of real numbers with MPFR endpoints.
//!
//! Every constructor and operation rounds the lower endpoint toward `-∞` and
//! the upper endpoint toward `+∞`, so an enclosure of the exact operands is
//! mapped to an enclosure of the exact result.

use std::cmp::Ordering;
use std::fmt;

use rug::float::Round;
use rug::ops::{AddAssignRound, DivAssignRound, MulAssignRound, SubAssignRound};
use rug::{Float, Rational};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

#[derive(Clone, Debug, PartialEq)]
pub struct Enclosure {
    lo: Float,
    hi: Float,
}

fn round_to(prec: u32, x: &Float, round: Round) -> Float {
    Float::with_val_round(prec, x, round).0
}

impl Enclosure {
    /// Panics if `lo > hi` or either endpoint is NaN.
    pub fn new(lo: Float, hi: Float) -> Self {
        assert!(
            lo.partial_cmp(&hi)
                .map_or(false, |o| o != Ordering::Greater),
            "enclosure endpoints out of order: {lo} > {hi}"
        );
        Enclosure { lo, hi }
    }

    pub fn point(x: &Float) -> Self {
        Enclosure::new(x.clone(), x.clone())
    }

    pub fn from_rational(prec: u32, r: &Rational) -> Self {
        let lo = Float::with_val_round(prec, r, Round::Down).0;
        let hi = Float::with_val_round(prec, r, Round::Up).0;
        Enclosure { lo, hi }
    }

    pub fn from_rationals(prec: u32, lo: &Rational, hi: &Rational) -> Self {
        let lo = Float::with_val_round(prec, lo, Round::Down).0;
        let hi = Float::with_val_round(prec, hi, Round::Up).0;
        Enclosure::new(lo, hi)
    }

    /// Encloses `value * (1 ± rel_err)`; `value` must be finite.
    pub fn from_f64_rel(prec: u32, value: f64, rel_err: f64) -> Self {
        let v = Float::with_val(prec, value);
        let e = Float::with_val_round(prec, rel_err.abs(), Round::Up).0;
        let mut spread = Float::with_val(prec, value.abs());
        spread.mul_assign_round(&e, Round::Up);
        let mut lo = v.clone();
        lo.sub_assign_round(&spread, Round::Down);
        let mut hi = v;
        hi.add_assign_round(&spread, Round::Up);
        Enclosure { lo, hi }
    }

    pub fn lo(&self) -> &Float {
        &self.lo
    }

    pub fn hi(&self) -> &Float {
        &self.hi
    }

    pub fn prec(&self) -> u32 {
        self.lo.prec().max(self.hi.prec())
    }

    pub fn mid(&self) -> Float {
        let prec = self.prec() + 1;
        let mut m = Float::with_val(prec, &self.lo + &self.hi);
        m /= 2;
        m
    }

    /// Upper bound on `max(hi - mid, mid - lo)`.
    pub fn radius(&self) -> Float {
        let m = self.mid();
        let mut r = round_to(self.prec(), &self.hi, Round::Up);
        r.sub_assign_round(&m, Round::Up);
        let mut r2 = round_to(self.prec(), &m, Round::Up);
        r2.sub_assign_round(&self.lo, Round::Up);
        if r2 > r {
            r2
        } else {
            r
        }
    }

    pub fn width(&self) -> Float {
        let mut w = round_to(self.prec(), &self.hi, Round::Up);
        w.sub_assign_round(&self.lo, Round::Up);
        w
    }

    pub fn contains(&self, x: &Float) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_f64(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_rational(&self, x: &Rational) -> bool {
        self.lo <= *x && *x <= self.hi
    }

    /// Is `other` a subset of `self`?
    pub fn encloses(&self, other: &Enclosure) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Every point of `self` is `<=` every point of `other`.
    pub fn certainly_le(&self, other: &Enclosure) -> bool {
        self.hi <= other.lo
    }

    pub fn certainly_lt(&self, other: &Enclosure) -> bool {
        self.hi < other.lo
    }

    pub fn add(&self, other: &Enclosure) -> Enclosure {
        let prec = self.prec().max(other.prec());
        let mut lo = round_to(prec, &self.lo, Round::Down);
        lo.add_assign_round(&other.lo, Round::Down);
        let mut hi = round_to(prec, &self.hi, Round::Up);
        hi.add_assign_round(&other.hi, Round::Up);
        Enclosure { lo, hi }
    }

    pub fn sub(&self, other: &Enclosure) -> Enclosure {
        let prec = self.prec().max(other.prec());
        let mut lo = round_to(prec, &self.lo, Round::Down);
        lo.sub_assign_round(&other.hi, Round::Down);
        let mut hi = round_to(prec, &self.hi, Round::Up);
        hi.sub_assign_round(&other.lo, Round::Up);
        Enclosure { lo, hi }
    }

    pub fn neg(&self) -> Enclosure {
        Enclosure {
            lo: -self.hi.clone(),
            hi: -self.lo.clone(),
        }
    }

    pub fn mul(&self, other: &Enclosure) -> Enclosure {
        let prec = self.prec().max(other.prec());
        let corners = [
            (&self.lo, &other.lo),
            (&self.lo, &other.hi),
            (&self.hi, &other.lo),
            (&self.hi, &other.hi),
        ];
        let mut lo: Option<Float> = None;
        let mut hi: Option<Float> = None;
        for (a, b) in corners {
            let mut d = round_to(prec, a, Round::Down);
            d.mul_assign_round(b, Round::Down);
            let mut u = round_to(prec, a, Round::Up);
            u.mul_assign_round(b, Round::Up);
            if lo.as_ref().map_or(true, |l| d < *l) {
                lo = Some(d);
            }
            if hi.as_ref().map_or(true, |h| u > *h) {
                hi = Some(u);
            }
        }
        Enclosure {
            lo: lo.unwrap(),
            hi: hi.unwrap(),
        }
    }

    /// Returns `None` when the divisor straddles zero.
    pub fn div(&self, other: &Enclosure) -> Option<Enclosure> {
        if other.lo <= 0 && other.hi >= 0 {
            return None;
        }
        let prec = self.prec().max(other.prec());
        let corners = [
            (&self.lo, &other.lo),
            (&self.lo, &other.hi),
            (&self.hi, &other.lo),
            (&self.hi, &other.hi),
        ];
        let mut lo: Option<Float> = None;
        let mut hi: Option<Float> = None;
        for (a, b) in corners {
            let mut d = round_to(prec, a, Round::Down);
            d.div_assign_round(b, Round::Down);
            let mut u = round_to(prec, a, Round::Up);
            u.div_assign_round(b, Round::Up);
            if lo.as_ref().map_or(true, |l| d < *l) {
                lo = Some(d);
            }
            if hi.as_ref().map_or(true, |h| u > *h) {
                hi = Some(u);
            }
        }
        Some(Enclosure {
            lo: lo.unwrap(),
            hi: hi.unwrap(),
        })
    }

    /// Multiplies by a non-negative exact scalar.
    pub fn scale(&self, k: &Rational) -> Enclosure {
        let prec = self.prec();
        self.mul(&Enclosure::from_rational(prec, k))
    }

    /// Smallest enclosure containing both.
    pub fn hull(&self, other: &Enclosure) -> Enclosure {
        let lo = if self.lo <= other.lo {
            self.lo.clone()
        } else {
            other.lo.clone()
        };
        let hi = if self.hi >= other.hi {
            self.hi.clone()
        } else {
            other.hi.clone()
        };
        Enclosure { lo, hi }
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (
            self.lo.to_f64_round(Round::Down),
            self.hi.to_f64_round(Round::Up),
        )
    }
}

/// Renders as `value±radius`.
impl fmt::Display for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(20);
        let mid = self.mid();
        let rad = self.radius().to_f64_round(Round::Up);
        write!(f, "{}±{:.3e}", mid.to_string_radix(10, Some(digits)), rad)
    }
}

/// Serialized as `{ "value", "radius", "lo", "hi" }` with decimal strings for the endpoints.
impl Serialize for Enclosure {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("Enclosure", 4)?;
        st.serialize_field("value", &self.mid().to_string_radix(10, Some(20)))?;
        st.serialize_field("radius", &self.radius().to_f64_round(Round::Up))?;
        st.serialize_field(
            "lo",
            &self.lo.to_string_radix_round(10, Some(20), Round::Down),
        )?;
        st.serialize_field(
            "hi",
            &self.hi.to_string_radix_round(10, Some(20), Round::Up),
        )?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn third_is_bracketed() {
        let third = Rational::from((1, 3));
        let e = Enclosure::from_rational(64, &third);
        assert!(e.lo() < e.hi());
        assert!(e.contains_rational(&third));
    }

    #[test]
    fn arithmetic_contains_exact_results() {
        let a = Rational::from((1, 3));
        let b = Rational::from((-2, 7));
        let ea = Enclosure::from_rational(53, &a);
        let eb = Enclosure::from_rational(53, &b);
        assert!(ea.add(&eb).contains_rational(&(a.clone() + &b)));
        assert!(ea.sub(&eb).contains_rational(&(a.clone() - &b)));
        assert!(ea.mul(&eb).contains_rational(&(a.clone() * &b)));
        assert!(ea.div(&eb).unwrap().contains_rational(&(a.clone() / &b)));
    }

    #[test]
    fn division_by_straddling_interval_is_refused() {
        let one = Enclosure::point(&Float::with_val(53, 1));
        let z = Enclosure::new(Float::with_val(53, -1), Float::with_val(53, 1));
        assert!(one.div(&z).is_none());
    }

    #[test]
    fn relative_error_constructor() {
        let e = Enclosure::from_f64_rel(128, 2.0, 1e-3);
        assert!(e.contains_f64(2.0019));
        assert!(!e.contains_f64(2.0021));
    }

    #[test]
    fn display_uses_plus_minus() {
        let e = Enclosure::from_f64_rel(128, 0.5, 1e-10);
        let s = e.to_string();
        assert!(s.contains('±'), "{s}");
    }
}
