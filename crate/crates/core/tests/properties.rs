mod common;

use common::*;
use parm_core::interval::decimal::exact_string;
use parm_core::radii::RadiiPoly;
use parm_core::sequence_space::Weights;
use parm_core::Interval;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn small_ints(max_len: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-20i64..=20, 1..=max_len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn arithmetic_contains_exact_results(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let bad: usize = (0..50).map(|_| containment_case(&mut rng)).sum();
        prop_assert_eq!(bad, 0);
    }

    #[test]
    fn exp_and_powi_contain_float_images(x in -30.0f64..30.0, w in 0.0f64..1.0, n in 0i32..9) {
        let iv = Interval::new(x, x + w).unwrap();
        // Round-to-nearest is monotone, so a float image is a necessary check.
        let e = iv.exp();
        prop_assert!(e.contains(x.exp()) && e.contains((x + w).exp()));
        let p = iv.powi(n);
        prop_assert!(p.contains(x.powi(n)) && p.contains((x + w).powi(n)));
    }

    #[test]
    fn decimal_strings_round_trip_bit_exactly(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        let back = Interval::from_decimal(&exact_string(x)).unwrap();
        prop_assert!(back.is_point());
        prop_assert!(back.lo() == x);
        let json = serde_json::to_string(&Interval::point(x)).unwrap();
        let parsed: Interval = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(parsed.lo(), x);
    }

    #[test]
    fn decimal_enclosures_are_tight(int in 0u64..1_000_000, frac in 0u64..1_000_000_000) {
        let s = format!("{int}.{frac:09}");
        let iv = Interval::from_decimal(&s).unwrap();
        let f: f64 = s.parse().unwrap();
        prop_assert!(iv.contains(f));
        prop_assert!(iv.hi() == iv.lo() || iv.hi() == iv.lo().next_up());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn cosine_product_is_submultiplicative(seed in any::<u64>(), ka in 0usize..15, kb in 0usize..15) {
        let mut rng = StdRng::seed_from_u64(seed);
        let nu = dec("1.1");
        let (a, b) = (rand_seq(&mut rng, nu, ka), rand_seq(&mut rng, nu, kb));
        prop_assert!(!banach_violated(a.conv(&b).unwrap().norm_nu(), a.norm_nu() * b.norm_nu()));
    }

    #[test]
    fn taylor_product_is_submultiplicative(seed in any::<u64>(), m1 in 0usize..4, m2 in 0usize..4, k in 0usize..6) {
        let mut rng = StdRng::seed_from_u64(seed);
        let nu = dec("1.05");
        let (p, q) = (rand_tf(&mut rng, nu, &[m1, m2], k), rand_tf(&mut rng, nu, &[m2, m1], k));
        prop_assert!(!banach_violated(p.conv(&q).unwrap().norm(), p.norm() * q.norm()));
    }

    #[test]
    fn cosine_conv_matches_brute_force(a in small_ints(9), b in small_ints(9)) {
        let nu = dec("1.1");
        let got = to_seq(nu, &a).conv(&to_seq(nu, &b)).unwrap();
        prop_assert!(equals_exact(&got, &cosine_conv_brute(&a, &b)));
    }

    #[test]
    fn taylor_conv_matches_brute_force(
        mp in (0usize..=8, 0usize..=2),
        mq in (0usize..=8, 0usize..=2),
        k in 0usize..=8,
        seed in any::<u64>(),
    ) {
        use rand::Rng;
        let mut rng = StdRng::seed_from_u64(seed);
        let (op, oq) = ([mp.1, mp.0], [mq.1, mq.0]);
        let rows = |o: &[usize], rng: &mut StdRng| -> Vec<Vec<i64>> {
            (0..(o[0] + 1) * (o[1] + 1)).map(|_| (0..=k).map(|_| rng.random_range(-6..=6)).collect()).collect()
        };
        let (rp, rq) = (rows(&op, &mut rng), rows(&oq, &mut rng));
        let nu = dec("1.1");
        let got = to_tf(nu, &op, &rp).conv(&to_tf(nu, &oq, &rq)).unwrap();
        let want = tf_conv_brute(&rp, &op, &rq, &oq);
        prop_assert_eq!(got.coeffs().len(), want.len());
        for (g, w) in got.coeffs().iter().zip(&want) {
            prop_assert!(equals_exact(g, w));
        }
    }

    #[test]
    fn rescale_commutes_with_eval(
        rows in prop::collection::vec(prop::collection::vec(-64i64..=64, 3), 12),
        s in (-4i32..=4, -4i32..=4),
        t in (-8i32..=8, -8i32..=8),
    ) {
        // Dyadic data keep every product exact.
        let nu = dec("1.1");
        let p = to_tf(nu, &[2, 3], &rows);
        let s = [Interval::point(s.0 as f64 / 4.0), Interval::point(s.1 as f64 / 4.0)];
        prop_assume!(!s[0].contains_zero() && !s[1].contains_zero());
        let th = [Interval::point(t.0 as f64 / 8.0), Interval::point(t.1 as f64 / 8.0)];
        let st = [th[0] * s[0], th[1] * s[1]];
        prop_assume!(st.iter().all(|x| x.mag() <= 1.0));
        let lhs = p.rescale(&s).unwrap().eval(&th).unwrap();
        let rhs = p.eval(&st).unwrap();
        prop_assert_eq!(lhs.coeffs(), rhs.coeffs());
    }

    #[test]
    fn found_radius_is_certified(y in 0.0f64..0.1, z1 in 0.0f64..1.0, z2 in 0.0f64..10.0) {
        let poly = RadiiPoly::new(Interval::point(y), Interval::point(z1), Interval::point(z2));
        let b = 1.0 - z1;
        let feasible = b * b - 4.0 * z2 * y;
        match poly.find_radius() {
            Ok(rad) => {
                prop_assert!(poly.negative_at(rad.r));
                // A negative value forces Y < (1 − Z₁) r.
                prop_assert!(y < b * rad.r);
                prop_assert!(rad.threshold.lo() <= rad.r);
                if let Some(m) = rad.r_max {
                    prop_assert!(m >= rad.r && poly.negative_at(m));
                }
            }
            Err(_) => prop_assert!(feasible < 1e-9 * b * b),
        }
    }

    #[test]
    fn weighted_norm_satisfies_triangle_inequality(seed in any::<u64>(), k in 0usize..20) {
        let mut rng = StdRng::seed_from_u64(seed);
        let nu = dec("1.2");
        let (a, b) = (rand_seq(&mut rng, nu, k), rand_seq(&mut rng, nu, k));
        prop_assert!(a.add(&b).unwrap().norm_nu().lo() <= (a.norm_nu() + b.norm_nu()).hi());
        let w = Weights::new(nu, k + 1);
        prop_assert!(w.norm(a.coeffs()).intersects(a.finite_norm()));
    }
}
