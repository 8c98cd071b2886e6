use cf_core::arith::gcd;
use cf_core::digits::{convergent_table, expand_rational, fractional_part, phi, preimages_of};
use cf_core::dimension::{box_count, cover_for, GraphPoint, Target};
use cf_core::error_sum::{
    cylinder_extrema_e, cylinder_extrema_p, e_star, e_star_sibling_delta, eval_e, eval_p,
    oscillation_e, oscillation_p, p_star, p_star_sibling_delta,
};
use cf_core::interval::Enclosure;
use cf_core::series::{
    conversion_lhs_exact, conversion_rhs_exact, coprime_pair_sum, WeightFunction,
};
use cf_core::symbolic::{fundamental_interval, interval_length};
use cf_core::{DigitString, Integer, Rational};
use proptest::prelude::*;

fn digit_vec(max_len: usize, max_digit: u64) -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(1..=max_digit, 1..=max_len)
}

fn realizable(max_len: usize, max_digit: u64) -> impl Strategy<Value = DigitString> {
    (digit_vec(max_len, max_digit), 2..=max_digit).prop_map(|(mut v, last)| {
        let n = v.len();
        if v[n - 1] == 1 {
            v[n - 1] = last;
        }
        DigitString::new(v).unwrap()
    })
}

fn fraction(max_q: u64) -> impl Strategy<Value = Rational> {
    (1..=max_q).prop_flat_map(|q| (0..q).prop_map(move |p| Rational::from((p, q))))
}

fn sign(k: usize) -> i32 {
    if k % 2 == 0 {
        1
    } else {
        -1
    }
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 256,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn expansion_round_trips(x in fraction(5000)) {
        let sigma = expand_rational(&x).unwrap();
        prop_assert!(sigma.is_realizable());
        prop_assert_eq!(phi(&sigma), x);
    }

    #[test]
    fn both_representations_evaluate_alike(x in fraction(2000)) {
        let pre = preimages_of(&x).unwrap();
        for s in &pre {
            prop_assert_eq!(phi(s), x.clone());
        }
        if pre.len() == 2 {
            prop_assert_eq!(pre[0].sibling().unwrap(), pre[1].clone());
            prop_assert_eq!(pre[1].sibling().unwrap(), pre[0].clone());
        }
    }

    #[test]
    fn periodicity(x in fraction(2000), shift in -5i64..5) {
        let y = Rational::from(&x + shift);
        prop_assert_eq!(fractional_part(&y), x.clone());
        prop_assert_eq!(eval_e(&y), eval_e(&x));
        prop_assert_eq!(eval_p(&y), eval_p(&x));
    }

    #[test]
    fn determinant_and_fibonacci_bound(sigma in realizable(10, 30)) {
        let t = convergent_table(&sigma);
        let n = sigma.len() as isize;
        let (mut f0, mut f1) = (Integer::from(0), Integer::from(1));
        for k in -1..n {
            let det = Integer::from(t.p(k + 1) * t.q(k)) - Integer::from(t.p(k) * t.q(k + 1));
            prop_assert_eq!(det, if k.rem_euclid(2) == 0 { 1 } else { -1 });
            if k >= 0 {
                prop_assert!(*t.q(k) >= f1);
                let next = Integer::from(&f0 + &f1);
                f0 = std::mem::replace(&mut f1, next);
            }
        }
    }

    #[test]
    fn alternating_errors_shrink(sigma in realizable(10, 30)) {
        let t = convergent_table(&sigma);
        let x = phi(&sigma);
        let a: Vec<Rational> = (0..=sigma.len())
            .map(|k| Rational::from(&x - t.convergent(k)) * sign(k))
            .collect();
        prop_assert!(a.iter().all(|v| *v >= 0));
        prop_assert!(a.windows(2).all(|w| w[0] > w[1] || w[1] == 0));
    }

    #[test]
    fn interval_contains_its_strings(sigma in realizable(7, 12), tail in digit_vec(4, 12)) {
        let iv = fundamental_interval(&sigma).unwrap();
        let t = convergent_table(&sigma);
        let n = sigma.len() as isize;
        prop_assert_eq!(iv.length.clone(), interval_length(t.q(n), t.q(n - 1)));
        prop_assert!(iv.contains(&phi(&sigma)));
        let sib = sigma.sibling().unwrap();
        let sib_iv = fundamental_interval(&sib).unwrap();
        prop_assert!(!sib_iv.contains(&phi(&sib)));
        prop_assert!(!iv.intersects(&sib_iv));

        let mut v = sigma.digits().to_vec();
        v.extend(tail);
        let tau = DigitString::new(v).unwrap();
        let x = phi(&tau);
        if tau.is_realizable() {
            prop_assert!(iv.contains(&x));
        }
        let prefix = expand_rational(&x).unwrap().truncated(sigma.len());
        prop_assert_eq!(prefix == sigma, iv.contains(&x));
    }

    #[test]
    fn sibling_deltas(sigma in realizable(8, 9)) {
        let sib = sigma.sibling().unwrap();
        prop_assert_eq!(e_star(&sib) - e_star(&sigma), e_star_sibling_delta(&sigma).unwrap());
        prop_assert_eq!(p_star(&sib) - p_star(&sigma), p_star_sibling_delta(&sigma).unwrap());
    }

    #[test]
    fn realizable_strings_evaluate_through_phi(sigma in realizable(8, 9)) {
        let x = phi(&sigma);
        prop_assert_eq!(e_star(&sigma), eval_e(&x));
        prop_assert_eq!(p_star(&sigma), p_star(&expand_rational(&x).unwrap()));
    }

    #[test]
    fn cylinder_extrema_bound_extensions(
        sigma in realizable(6, 9),
        tails in prop::collection::vec(digit_vec(5, 15), 1..20),
    ) {
        let ee = cylinder_extrema_e(&sigma).unwrap();
        let ep = cylinder_extrema_p(&sigma).unwrap();
        prop_assert_eq!(e_star(&ee.argmin), ee.min.clone());
        prop_assert_eq!(e_star(&ee.argmax), ee.max.clone());
        prop_assert_eq!(p_star(&ep.argmin), ep.min.clone());
        prop_assert_eq!(p_star(&ep.argmax), ep.max.clone());
        prop_assert_eq!(Rational::from(&ee.max - &ee.min), oscillation_e(&sigma).unwrap());
        prop_assert_eq!(Rational::from(&ep.max - &ep.min), oscillation_p(&sigma).unwrap());
        for tail in tails {
            let mut v = sigma.digits().to_vec();
            v.extend(tail);
            let tau = DigitString::new(v).unwrap();
            let (e, p) = (e_star(&tau), p_star(&tau));
            prop_assert!(ee.min <= e && e <= ee.max);
            prop_assert!(ep.min <= p && p <= ep.max);
        }
    }

    #[test]
    fn cover_rectangles_hold_the_graph(n in 1usize..4, tails in prop::collection::vec(digit_vec(4, 10), 1..6)) {
        for target in [Target::E, Target::P] {
            for rect in cover_for(target, n, 3).unwrap() {
                for tail in &tails {
                    let mut v = rect.sigma.digits().to_vec();
                    v.extend(tail);
                    let tau = DigitString::new(v).unwrap();
                    let y = match target {
                        Target::E => e_star(&tau),
                        Target::P => p_star(&tau),
                    };
                    prop_assert!(rect.contains_closure(&phi(&tau), &y));
                }
            }
        }
    }

    #[test]
    fn conversion_identity_for_any_weight(cutoff in 1u64..40, a in 1u64..7, b in 0u64..7, c in 1u64..5) {
        let weight = move |j: u64, k: u64| Rational::from(((j * a + k * b) % 11 + 1, j + c * k));
        prop_assert_eq!(
            conversion_lhs_exact(weight, cutoff).unwrap(),
            conversion_rhs_exact(weight, cutoff).unwrap()
        );
    }

    #[test]
    fn float_pair_sum_encloses_exact_sum(cutoff in 2u64..120) {
        let exact: Rational = (2..=cutoff)
            .flat_map(|j| (1..j).filter(move |&k| gcd(j, k) == 1).map(move |k| (j, k)))
            .map(|(j, k)| {
                let b = Integer::from(j) * (j + k);
                Rational::from((1, b.square()))
            })
            .sum();
        let enc = coprime_pair_sum(&WeightFunction::SquaredTest, cutoff, 128).unwrap();
        prop_assert!(enc.contains_rational(&exact));
    }

    #[test]
    fn enclosure_arithmetic_is_outward(a in fraction(1000), b in fraction(1000), c in 1i64..50) {
        let (ea, eb) = (Enclosure::from_rational(64, &a), Enclosure::from_rational(64, &b));
        let shift = Rational::from((c, 7));
        let b2 = Rational::from(&b + &shift);
        let eb2 = Enclosure::from_rational(64, &b2);
        prop_assert!(ea.add(&eb).contains_rational(&Rational::from(&a + &b)));
        prop_assert!(ea.sub(&eb).contains_rational(&Rational::from(&a - &b)));
        prop_assert!(ea.mul(&eb).contains_rational(&Rational::from(&a * &b)));
        prop_assert!(ea.div(&eb2).unwrap().contains_rational(&Rational::from(&a / &b2)));
    }

    #[test]
    fn box_count_grows_with_resolution(points in prop::collection::vec((fraction(300), fraction(300)), 1..200), i in 1u32..10) {
        let pts: Vec<GraphPoint> = points.into_iter().map(|(x, y)| GraphPoint { x, y }).collect();
        let coarse = box_count(&pts, &Rational::from((1, 1u64 << i))).unwrap();
        let fine = box_count(&pts, &Rational::from((1, 1u64 << (i + 1)))).unwrap();
        prop_assert!(coarse <= fine && fine <= 4 * coarse);
    }
}
