//! Self-check suites. Each produces one line per check with pass counts and,
//! on failure, the first counterexample. Output depends only on the inputs.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rug::{Integer, Rational};
use serde::Serialize;

use crate::arith::{euler_phi, gcd, FibonacciCache};
use crate::digits::{convergent_table, expand_rational, phi, DigitString};
use crate::error::{CfError, Result};
use crate::error_sum::{
    cylinder_extrema_e, cylinder_extrema_p, e_star, e_star_sibling_delta, eval_e, eval_p,
    oscillation_e, oscillation_p, p_star, p_star_sibling_delta, CylinderExtrema,
};
use crate::series::{
    a_n_partial, b_n_partial, conversion_lhs_exact, conversion_rhs_exact, inner_sum_estimate,
    mobius_unfold_check, rp_tail_bound_check, Verdict,
};
use crate::symbolic::enumerate_by_denominator;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckLine {
    pub name: String,
    pub passed: u64,
    pub total: u64,
    pub detail: String,
    pub counterexample: Option<String>,
}

impl CheckLine {
    pub fn ok(&self) -> bool {
        self.passed == self.total && self.counterexample.is_none()
    }
}

impl fmt::Display for CheckLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} ({}/{}",
            self.name,
            if self.ok() { "PASS" } else { "FAIL" },
            self.passed,
            self.total
        )?;
        if !self.detail.is_empty() {
            write!(f, ", {}", self.detail)?;
        }
        write!(f, ")")?;
        if let Some(c) = &self.counterexample {
            write!(f, " counterexample: {c}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub suite: String,
    pub checks: Vec<CheckLine>,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(CheckLine::ok)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        write!(
            f,
            "suite {}: {}",
            self.suite,
            if self.all_pass() { "PASS" } else { "FAIL" }
        )
    }
}

/// Tallies results of one named check over many cases.
struct Tally<'a> {
    name: &'a str,
    passed: u64,
    total: u64,
    first_failure: Option<String>,
}

impl<'a> Tally<'a> {
    fn new(name: &'a str) -> Self {
        Tally {
            name,
            passed: 0,
            total: 0,
            first_failure: None,
        }
    }

    fn record(&mut self, ok: bool, case: impl FnOnce() -> String) {
        self.total += 1;
        if ok {
            self.passed += 1;
        } else if self.first_failure.is_none() {
            self.first_failure = Some(case());
        }
    }

    fn line(self, detail: impl Into<String>) -> CheckLine {
        CheckLine {
            name: self.name.into(),
            passed: self.passed,
            total: self.total,
            detail: detail.into(),
            counterexample: self.first_failure,
        }
    }
}

/// Realizable strings of length `1..=max_len` with digits `1..=max_digit`.
pub fn random_realizable_strings(
    seed: u64,
    count: usize,
    max_len: usize,
    max_digit: u64,
) -> Vec<DigitString> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(1..=max_len);
            let mut v: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=max_digit)).collect();
            if v[n - 1] == 1 {
                v[n - 1] = rng.gen_range(2..=max_digit.max(2));
            }
            DigitString::new(v).expect("digits are positive")
        })
        .collect()
}

/// Per-string outcomes, in the fixed order of [`LEMMA_CHECKS`].
type Outcomes = [bool; 9];

const LEMMA_CHECKS: [&str; 9] = [
    "determinant identity",
    "fibonacci lower bound",
    "monotone tail",
    "sibling delta E*",
    "sibling delta P*",
    "cylinder extrema E*",
    "cylinder extrema P*",
    "oscillation E",
    "oscillation P",
];

fn sign(k: i64) -> i64 {
    if k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

fn extrema_valid(
    ext: &CylinderExtrema,
    value: impl Fn(&DigitString) -> Rational,
    sigma: &DigitString,
    extensions: &[Vec<u64>],
) -> bool {
    if value(&ext.argmin) != ext.min || value(&ext.argmax) != ext.max {
        return false;
    }
    extensions.iter().all(|tail| {
        let mut v = sigma.digits().to_vec();
        v.extend_from_slice(tail);
        let tau = DigitString::new(v).expect("positive digits");
        let y = value(&tau);
        ext.min <= y && y <= ext.max
    })
}

fn lemma_outcomes(
    sigma: &DigitString,
    ext_seed: u64,
    extensions: usize,
    fib: &[Integer],
) -> Outcomes {
    let n = sigma.len();
    let t = convergent_table(sigma);
    let value = phi(sigma);

    let determinant = (-1..n as isize).all(|k| {
        let lhs = Integer::from(t.p(k + 1) * t.q(k)) - Integer::from(t.p(k) * t.q(k + 1));
        lhs == sign(k as i64)
    });

    let fib_ok = (0..=n).all(|k| {
        let q = t.q(k as isize);
        let scaled = Rational::from(&value - t.convergent(k)) * q * Integer::from(sign(k as i64));
        *q >= fib[k + 1] && scaled >= 0 && scaled <= Rational::from((1, fib[k + 1].clone()))
    });

    let a: Vec<Rational> = (0..=n)
        .map(|k| Rational::from(&value - t.convergent(k)) * Integer::from(sign(k as i64)))
        .collect();
    let monotone = a.iter().all(|x| *x >= 0) && a.windows(2).all(|w| w[0] >= w[1]);

    let sib = sigma.sibling().expect("realizable non-empty string");
    let e_delta = e_star_sibling_delta(sigma).map_or(false, |d| e_star(&sib) - e_star(sigma) == d);
    let p_delta = p_star_sibling_delta(sigma).map_or(false, |d| p_star(&sib) - p_star(sigma) == d);

    let mut rng = ChaCha8Rng::seed_from_u64(ext_seed);
    let tails: Vec<Vec<u64>> = (0..extensions)
        .map(|_| {
            let len = rng.gen_range(1..=6);
            (0..len).map(|_| rng.gen_range(1..=12u64)).collect()
        })
        .collect();
    let ext_e = cylinder_extrema_e(sigma).expect("non-empty");
    let ext_p = cylinder_extrema_p(sigma).expect("non-empty");
    let cyl_e = extrema_valid(&ext_e, e_star, sigma, &tails);
    let cyl_p = extrema_valid(&ext_p, p_star, sigma, &tails);
    let osc_e =
        oscillation_e(sigma).map_or(false, |o| o == Rational::from(&ext_e.max - &ext_e.min));
    let osc_p =
        oscillation_p(sigma).map_or(false, |o| o == Rational::from(&ext_p.max - &ext_p.min));

    [
        determinant,
        fib_ok,
        monotone,
        e_delta,
        p_delta,
        cyl_e,
        cyl_p,
        osc_e,
        osc_p,
    ]
}

/// Identity checks on `count` seeded random realizable strings (length ≤ 8,
/// digits ≤ 9), plus round trip and periodicity for every `p/q` with `q ≤ round_trip_cap`.
pub fn lemmas_suite(seed: u64, count: usize, round_trip_cap: u64) -> Result<VerifyReport> {
    if count == 0 {
        return Err(CfError::param("string count must be at least 1"));
    }
    let strings = random_realizable_strings(seed, count, 8, 9);
    let mut seeder = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let ext_seeds: Vec<u64> = (0..count).map(|_| seeder.gen()).collect();
    let mut fc = FibonacciCache::new();
    let fib: Vec<Integer> = (0..=12).map(|k| fc.get(k).clone()).collect();

    let outcomes: Vec<Outcomes> = strings
        .par_iter()
        .zip(ext_seeds.par_iter())
        .map(|(s, &es)| lemma_outcomes(s, es, 100, &fib))
        .collect();

    let mut checks = Vec::new();
    for (i, name) in LEMMA_CHECKS.iter().enumerate() {
        let mut t = Tally::new(name);
        for (s, o) in strings.iter().zip(&outcomes) {
            t.record(o[i], || format!("({s})"));
        }
        checks.push(t.line(format!("seed {seed}")));
    }
    checks.extend(round_trip_checks(round_trip_cap)?);
    Ok(VerifyReport {
        suite: "lemmas".into(),
        checks,
    })
}

/// `φ(f(p/q)) = p/q`, `E(p/q + 1) = E(p/q)`, `P(p/q + 1) = P(p/q)` for reduced `p/q`, `q ≤ cap`.
pub fn round_trip_checks(cap: u64) -> Result<Vec<CheckLine>> {
    if cap == 0 {
        return Err(CfError::param("denominator cap must be at least 1"));
    }
    let xs: Vec<(u64, u64)> = (1..=cap)
        .flat_map(|q| (0..q).filter(move |&p| gcd(p, q) == 1).map(move |p| (p, q)))
        .collect();
    let outcomes: Vec<[bool; 3]> = xs
        .par_iter()
        .map(|&(p, q)| {
            let x = Rational::from((p, q));
            let shifted = Rational::from(&x + 1u32);
            let sigma = expand_rational(&x).expect("x in [0,1)");
            [
                phi(&sigma) == x,
                eval_e(&shifted) == eval_e(&x),
                eval_p(&shifted) == eval_p(&x),
            ]
        })
        .collect();
    let names = ["round trip", "periodicity E", "periodicity P"];
    Ok(names
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let mut t = Tally::new(name);
            for (&(p, q), o) in xs.iter().zip(&outcomes) {
                t.record(o[i], || format!("{p}/{q}"));
            }
            t.line(format!("q ≤ {cap}"))
        })
        .collect())
}

fn squared(j: u64, k: u64) -> Rational {
    let b = Integer::from(j) * (j + k);
    Rational::from((1, b.square()))
}

/// Exact conversion identity at `cutoff`, the pair census and the Möbius unfolding.
pub fn conversion_suite(cutoff: u64, prec: u32) -> Result<VerifyReport> {
    if cutoff == 0 {
        return Err(CfError::param("cutoff must be at least 1"));
    }
    let mut checks = Vec::new();

    let lhs = conversion_lhs_exact(squared, cutoff)?;
    let rhs = conversion_rhs_exact(squared, cutoff)?;
    let name = format!("conversion identity exact at J={cutoff}");
    let mut t = Tally::new(&name);
    t.record(lhs == rhs, || format!("{lhs} ≠ {rhs}"));
    checks.push(t.line(""));

    let mut counts = std::collections::HashMap::<(u64, u64), u64>::new();
    let mut strings = 0u64;
    for pair in enumerate_by_denominator(cutoff)?.pairs() {
        *counts.entry(pair).or_default() += 1;
        strings += 1;
    }
    let expected = 1 + 2 * (2..=cutoff).map(euler_phi).sum::<u64>();
    let mut t = Tally::new("pair multiplicity");
    t.record(counts.get(&(1, 1)) == Some(&1), || {
        "(1,1) not seen exactly once".into()
    });
    for j in 2..=cutoff {
        for k in 1..j {
            let want = if gcd(j, k) == 1 { 2 } else { 0 };
            let got = counts.get(&(j, k)).copied().unwrap_or(0);
            t.record(got == want, || format!("({j},{k}) seen {got} times"));
        }
    }
    t.record(strings == expected, || {
        format!("{strings} strings, expected {expected}")
    });
    checks.push(t.line(format!("{strings} strings at J={cutoff}")));

    let mut t = Tally::new("mobius unfolding");
    for eps in [0.5, 1.0] {
        let m = mobius_unfold_check(eps, cutoff, prec)?;
        t.record(m.consistent(), || {
            format!("ε={eps}: {} vs {}", m.coprime_sum, m.mobius_sum)
        });
    }
    checks.push(t.line(format!("ε ∈ {{0.5, 1}}, J={cutoff}")));
    Ok(VerifyReport {
        suite: "conversion".into(),
        checks,
    })
}

/// Series bounds at `epsilon`: the a-series against both bounds for each cutoff
/// in `cutoffs`, the b-series bound and tail bound when `ε > 1/2`, and the
/// inner-sum estimates for `j ≤ 1000`.
pub fn bounds_suite(epsilon: f64, cutoffs: &[u64], prec: u32) -> Result<VerifyReport> {
    if cutoffs.is_empty() {
        return Err(CfError::param("need at least one cutoff"));
    }
    let mut checks = Vec::new();
    let reports = cutoffs
        .iter()
        .map(|&j| a_n_partial(epsilon, j, None, prec))
        .collect::<Result<Vec<_>>>()?;

    let mut t = Tally::new("a-series monotone in J");
    for w in reports.windows(2) {
        t.record(!w[1].partial_sum.certainly_lt(&w[0].partial_sum), || {
            format!("J={} → J={}", w[0].cutoff, w[1].cutoff)
        });
    }
    checks.push(t.line(format!("ε={epsilon}")));

    for idx in 0..2 {
        let label = reports[0].bounds[idx].label.clone();
        let mut t = Tally::new(if idx == 0 {
            "a-series ≤ 2^-(1+ε)"
        } else {
            "a-series ≤ ζ bound"
        });
        for r in &reports {
            let b = &r.bounds[idx];
            t.record(b.verdict == Verdict::Holds, || {
                format!(
                    "J={}: partial sum {} vs {} = {}",
                    r.cutoff, r.partial_sum, label, b.bound
                )
            });
        }
        checks.push(t.line(format!("ε={epsilon}")));
    }

    if epsilon > 0.5 {
        let mut t = Tally::new("b-series ≤ ζ bound");
        for &j in cutoffs {
            let r = b_n_partial(epsilon, j, None, prec)?;
            let b = &r.bounds[0];
            t.record(b.verdict == Verdict::Holds, || {
                format!("J={j}: partial sum {} vs {}", r.partial_sum, b.bound)
            });
        }
        checks.push(t.line(format!("ε={epsilon}")));

        let rows = rp_tail_bound_check(epsilon, 30, 50, prec)?;
        let mut t = Tally::new("b_n tail bound");
        for row in &rows {
            t.record(row.verdict == Verdict::Holds, || {
                format!("n={}: {} vs {}", row.n, row.b_n, row.bound)
            });
        }
        checks.push(t.line(format!("ε={epsilon}, n ≤ 30, digits ≤ 50")));
    }

    let mut t = Tally::new("inner-sum estimates");
    for j in 1..=1000 {
        let e = inner_sum_estimate(j, epsilon, prec)?;
        t.record(e.consistent(), || format!("j={j}"));
    }
    checks.push(t.line(format!("ε={epsilon}, j ≤ 1000")));

    Ok(VerifyReport {
        suite: "bounds".into(),
        checks,
    })
}
