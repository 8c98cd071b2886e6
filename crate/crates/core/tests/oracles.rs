use cf_core::arith::{euler_phi, golden_ratio, pi, zeta_enclosure};
use cf_core::digits::{convergent_table, expand_rational, RealNumber};
use cf_core::dimension::{cover_for, cover_weight, FareySequence, Target};
use cf_core::error_sum::eval_e_real;
use cf_core::series::{a_n_partial, b_n_partial};
use cf_core::symbolic::{enumerate_by_denominator, fundamental_interval};
use cf_core::transfer::{cylinder_sums, CylinderWeight};
use cf_core::{Integer, Rational};
use rug::ops::Pow;
use rug::Float;

fn euclid_quotients(mut a: u64, mut b: u64) -> Vec<u64> {
    let mut out = Vec::new();
    while b != 0 {
        out.push(a / b);
        (a, b) = (b, a % b);
    }
    out
}

#[test]
fn expansion_matches_euclid() {
    for (p, q) in [(355u64, 452u64), (3, 10), (89, 144), (1, 97), (999, 1000)] {
        let sigma = expand_rational(&Rational::from((p, q))).unwrap();
        let quotients = euclid_quotients(q, p);
        assert_eq!(sigma.digits(), &quotients[..], "{p}/{q}");
    }
}

#[test]
fn golden_ratio_enclosure_contains_direct_sum() {
    let prec = 512;
    let x = Float::with_val(prec, golden_ratio(prec).recip());
    let mut direct = Float::with_val(prec, 0);
    let (mut p, mut q) = (Integer::from(0), Integer::from(1));
    for _ in 0..300 {
        direct += Float::with_val(prec, &x - Rational::from((p.clone(), q.clone())));
        let next_q = Integer::from(&p + &q);
        p = std::mem::replace(&mut q, next_q);
    }
    let real = RealNumber::from_decimal("0.6180339887").unwrap();
    let value = eval_e_real(&real, 1e-8, 128).unwrap();
    let enc = value.enclosure(128);
    assert!(enc.contains(&direct), "{enc} vs {direct}");
    assert!(enc.width().to_f64() < 2e-8);
}

#[test]
fn zeta_at_even_integers() {
    let prec = 128;
    let p = pi(prec);
    let z2 = Float::with_val(prec, &p * &p) / 6;
    let z4 = Float::with_val(prec, p.pow(4u32)) / 90;
    assert!(zeta_enclosure(2.0, prec).unwrap().contains(&z2));
    assert!(zeta_enclosure(4.0, prec).unwrap().contains(&z4));
}

fn brute_force(cutoff: u64, term: impl Fn(&Integer, &Integer) -> Rational) -> Rational {
    enumerate_by_denominator(cutoff)
        .unwrap()
        .map(|s| {
            let t = convergent_table(&s);
            let n = s.len() as isize;
            term(t.q(n), t.q(n - 1))
        })
        .sum()
}

#[test]
fn series_at_unit_epsilon_match_string_sums() {
    for cutoff in [1u64, 7, 40, 150] {
        let a = brute_force(cutoff, |q, qp| {
            let l = Integer::from(q * Integer::from(q + qp));
            Rational::from((1, l.square()))
        });
        let b = brute_force(cutoff, |q, qp| {
            let s = Integer::from(q + qp);
            Rational::from((1, Integer::from(q * s.square())))
        });
        let ra = a_n_partial(1.0, cutoff, None, 128).unwrap();
        let rb = b_n_partial(1.0, cutoff, None, 128).unwrap();
        assert!(ra.partial_sum.contains_rational(&a), "a at J={cutoff}");
        assert!(rb.partial_sum.contains_rational(&b), "b at J={cutoff}");
    }
}

#[test]
fn cover_weight_matches_rectangle_stream() {
    let prec = 128;
    for n in 1..=4 {
        let mut total = Rational::new();
        for rect in cover_for(Target::E, n, 5).unwrap() {
            assert_eq!(rect.square_count, n as u64 + 1);
            let l = rect.x_interval.length.clone();
            total += Rational::from(&l * &l) * Rational::from(rect.square_count.clone());
        }
        let direct = total * 2u32;
        let w = cover_weight(n, 5, 1.0, Target::E, prec).unwrap();
        assert!(w.contains_rational(&direct), "n={n}: {w} vs {direct}");
    }
}

#[test]
fn lengths_at_fixed_depth_sum_to_cylinder_sums() {
    let sums = cylinder_sums(CylinderWeight::length_power(0.0), 6, 3, 128).unwrap();
    for (i, s) in sums.iter().enumerate() {
        let n = i + 1;
        let direct: Rational = cover_for(Target::E, n, 6)
            .unwrap()
            .map(|r| r.x_interval.length)
            .sum();
        assert!(s.contains_rational(&direct), "n={n}");
    }
}

#[test]
fn farey_sequence_length() {
    for n in [1u64, 2, 10, 97] {
        let count = FareySequence::new(n).unwrap().count() as u64;
        assert_eq!(count, (1..=n).map(euler_phi).sum::<u64>());
    }
}

#[test]
fn worked_interval() {
    let iv = fundamental_interval(&"2".parse().unwrap()).unwrap();
    assert_eq!(iv.to_string(), "(1/3, 1/2]");
    assert_eq!(iv.length, Rational::from((1, 6)));
}
