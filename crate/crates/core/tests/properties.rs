use num_bigint::BigInt;
use num_rational::BigRational;
use padic_heisenberg::brackets::{apply_L0_bracket, apply_Lm1_bracket, bracket_lift};
use padic_heisenberg::expr::{parse_state, print_state};
use padic_heisenberg::fock::{r_norm, random_homogeneous, random_state, truncate};
use padic_heisenberg::modes::{apply_h, mode_product};
use padic_heisenberg::onepoint::{z_function_with, TraceRoute};
use padic_heisenberg::scalar::{weight_distance, WeightX};
use padic_heisenberg::spectral::normalize_r;
use padic_heisenberg::{Exec, FockState, NormValue, Prime, RExponent, Scalar};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn prime_strategy() -> impl Strategy<Value = Prime> {
    prop::sample::select(vec![2u64, 3, 5, 7, 11]).prop_map(|p| Prime::new(p).unwrap())
}

fn scalar_strategy() -> impl Strategy<Value = Scalar> {
    (-5000i64..5000, 1i64..5000).prop_map(|(n, d)| Scalar::new(n, d))
}

fn rho_strategy() -> impl Strategy<Value = RExponent> {
    (0i64..8, 1i64..9)
        .prop_map(|(n, d)| RExponent::new(BigRational::new(n.into(), d.into())).unwrap())
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn scalar_norm_is_ultrametric_and_multiplicative(
        p in prime_strategy(),
        x in scalar_strategy(),
        y in scalar_strategy(),
    ) {
        let (nx, ny) = (x.norm(p), y.norm(p));
        prop_assert!((&x + &y).norm(p) <= nx.clone().max(ny.clone()));
        prop_assert_eq!((&x * &y).norm(p), nx.mul(&ny));
        if nx != ny {
            prop_assert_eq!((&x + &y).norm(p), nx.max(ny));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn r_norm_is_ultrametric_and_scales(
        p in prime_strategy(),
        rho in rho_strategy(),
        seed in any::<u64>(),
        c in scalar_strategy(),
    ) {
        let mut g = rng(seed);
        let a = random_state(&mut g, 8, 6, p);
        let b = random_state(&mut g, 8, 6, p);
        let (na, nb) = (r_norm(&a, p, &rho), r_norm(&b, p, &rho));
        prop_assert!(r_norm(&(&a + &b), p, &rho) <= na.clone().max(nb));
        prop_assert_eq!(r_norm(&a.scale(&c), p, &rho), na.mul(&c.norm(p)));
    }

    #[test]
    fn r_norm_grows_with_rho(p in prime_strategy(), r1 in rho_strategy(), r2 in rho_strategy(), seed in any::<u64>()) {
        let a = random_state(&mut rng(seed), 10, 8, p);
        let (lo, hi) = if r1.rho() <= r2.rho() { (r1, r2) } else { (r2, r1) };
        prop_assert!(r_norm(&a, p, &lo) <= r_norm(&a, p, &hi));
    }

    #[test]
    fn truncation_certifies_the_tail(p in prime_strategy(), rho in rho_strategy(), seed in any::<u64>(), cap in 0u32..10) {
        let a = random_state(&mut rng(seed), 12, 10, p);
        let t = truncate(&a, cap, p, &rho);
        prop_assert!(t.body.degree().is_none_or(|d| d <= cap));
        let tail = &a - &t.body;
        prop_assert!(tail.terms().all(|(part, _)| part.weight() > cap));
        prop_assert_eq!(&t.tail_bound, &r_norm(&tail, p, &rho));
        prop_assert!(t.tail_bound <= r_norm(&a, p, &rho));
    }

    #[test]
    fn mode_products_respect_norms(p in prime_strategy(), seed in any::<u64>(), n in -4i64..4) {
        let mut g = rng(seed);
        let a = random_state(&mut g, 4, 3, p);
        let b = random_state(&mut g, 4, 3, p);
        let sup = RExponent::sup();
        let prod = mode_product(&a, n, &b);
        prop_assert!(r_norm(&prod, p, &sup) <= r_norm(&a, p, &sup).mul(&r_norm(&b, p, &sup)));
    }

    #[test]
    fn h_modes_are_linear(seed in any::<u64>(), n in -6i64..6, c in scalar_strategy()) {
        let p = Prime::new(5).unwrap();
        let mut g = rng(seed);
        let a = random_state(&mut g, 6, 4, p);
        let b = random_state(&mut g, 6, 4, p);
        let lhs = apply_h(n, &(&a + &b.scale(&c)));
        let rhs = &apply_h(n, &a) + &apply_h(n, &b).scale(&c);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn parser_round_trips(seed in any::<u64>(), p in prime_strategy()) {
        let a = random_state(&mut rng(seed), 10, 8, p);
        let text = print_state(&a);
        let back = parse_state(&text, 30).unwrap();
        prop_assert_eq!(&back, &a);
        prop_assert_eq!(print_state(&back), text);
    }

    #[test]
    fn bracket_virasoro_commutator(seed in any::<u64>()) {
        let a = random_state(&mut rng(seed), 7, 5, Prime::new(3).unwrap());
        let lhs = &apply_L0_bracket(&apply_Lm1_bracket(&a)) - &apply_Lm1_bracket(&apply_L0_bracket(&a));
        prop_assert_eq!(lhs, apply_Lm1_bracket(&a));
    }

    #[test]
    fn lifts_are_l0_bracket_eigenstates(seed in any::<u64>(), d in 0u32..8) {
        let v = random_homogeneous(&mut rng(seed), d, 4, Prime::new(7).unwrap());
        let lifted = bracket_lift(&v).unwrap();
        prop_assert_eq!(lifted.component(d), v);
        prop_assert_eq!(apply_L0_bracket(&lifted), lifted.scale(&Scalar::from(d as i64)));
    }

    #[test]
    fn normalization_lands_in_unit_window(p in prime_strategy(), rho in rho_strategy(), seed in any::<u64>()) {
        let a = random_state(&mut rng(seed), 8, 6, p);
        prop_assume!(!a.is_zero());
        let n = r_norm(&normalize_r(&a, p, &rho), p, &rho);
        prop_assert!(n >= NormValue::one(p));
        prop_assert!(n < NormValue::p_pow_neg(p, -1));
    }

    #[test]
    fn weight_distance_is_an_ultrametric(p in prime_strategy(), a in 2i64..5000, b in 2i64..5000, c in 2i64..5000) {
        let w = |k: i64| WeightX::from_integer(k, p, 12);
        let d = |x: i64, y: i64| weight_distance(&w(x), &w(y)).unwrap().norm;
        prop_assert_eq!(d(a, b), d(b, a));
        prop_assert!(d(a, c) <= d(a, b).max(d(b, c)));
        prop_assert_eq!(d(a, a), NormValue::zero(p));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn z_is_linear(seed in any::<u64>(), c in scalar_strategy(), d in 0u32..6) {
        let p = Prime::new(5).unwrap();
        let mut g = rng(seed);
        let a = random_homogeneous(&mut g, d, 3, p);
        let b = random_state(&mut g, 5, 3, p);
        let z = |s: &FockState| z_function_with(s, 8, TraceRoute::Wick, Exec::Sequential);
        prop_assert_eq!(z(&(&a + &b.scale(&c))), z(&a).add(&z(&b).scale(&c)));
    }

    #[test]
    fn trace_routes_agree(seed in any::<u64>(), d in 0u32..6) {
        let a = random_homogeneous(&mut rng(seed), d, 3, Prime::new(3).unwrap());
        let m = z_function_with(&a, 6, TraceRoute::Matrix, Exec::Sequential);
        let w = z_function_with(&a, 6, TraceRoute::Wick, Exec::Parallel);
        prop_assert_eq!(m, w);
    }
}

#[test]
fn residues_agree_with_integer_reduction() {
    let p = Prime::new(5).unwrap();
    for n in -300i64..300 {
        let r = Scalar::from(n).residue_mod_prime_power(p, 3).unwrap();
        assert_eq!(r, BigInt::from(n.rem_euclid(125)));
    }
    // 1/2 ≡ 63 mod 125
    assert_eq!(
        Scalar::new(1, 2).residue_mod_prime_power(p, 3).unwrap(),
        BigInt::from(63)
    );
    assert!(Scalar::new(1, 5).residue_mod_prime_power(p, 3).is_none());
}
