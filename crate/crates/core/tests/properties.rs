use num_complex::Complex64;
use proptest::prelude::*;
use reslab_core::config::Budgets;
use reslab_core::exponent::Rational;
use reslab_core::grid::Grid;
use reslab_core::measure::{cantor, mollify, random_flat, RandomFlatParams};
use reslab_core::probe::{restriction_norm, ExtensionOperator};
use reslab_core::regularity::{exponent_identity, theorem_range};
use reslab_core::spectral::{convolve_power, density_norm, fourier, full_fourier, FourierMethod};
use reslab_core::verify::{
    check_bilinear, check_dual_chain, check_hausdorff_young_grid, check_hausdorff_young_lattice, knapp_test,
};
use reslab_core::{DiscreteMeasure, Exponent, ProbeConfig, Tolerances};

fn flat(n: usize, m: usize, seed: u64) -> DiscreteMeasure {
    random_flat(&RandomFlatParams { n, m, seed, c: 8.0, max_retries: 200 }).unwrap()
}

fn measure() -> impl Strategy<Value = DiscreteMeasure> {
    prop_oneof![
        (4usize..=7, 1usize..=40, any::<u64>()).prop_map(|(log_n, m, seed)| flat(1 << log_n, m.min(1 << log_n), seed)),
        (1u32..=3, prop::sample::subsequence(vec![0usize, 1, 2, 3], 1..=4))
            .prop_map(|(k, d)| cantor(4, &d, k).unwrap()),
    ]
}

fn complex_vec(len: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0).prop_map(|(a, b)| Complex64::new(a, b)), len)
}

fn exponent() -> impl Strategy<Value = Exponent> {
    prop_oneof![
        (1i64..=8, 1i64..=8).prop_filter_map("p >= 1", |(a, b)| (a >= b).then(|| Exponent::new(a, b))),
        Just(Exponent::INF),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn constructors_satisfy_measure_invariants(seed in any::<u64>(), m in 1usize..=64) {
        let mu = flat(256, m, seed);
        prop_assert_eq!(mu.len(), m);
        prop_assert!((mu.total_mass() - 1.0).abs() < 1e-12);
        prop_assert!(mu.atoms().windows(2).all(|w| w[0].0 < w[1].0));
        prop_assert!(mu.atoms().iter().all(|a| a.1 >= 0.0 && a.0 < 256));
    }

    #[test]
    fn reflect_is_an_involution(mu in measure()) {
        let r = mu.reflect();
        let back = r.reflect();
        prop_assert_eq!(back.atoms(), mu.atoms());
        prop_assert_eq!(back.grid(), mu.grid());
        let mut a: Vec<u64> = mu.atoms().iter().map(|x| x.1.to_bits()).collect();
        let mut b: Vec<u64> = r.atoms().iter().map(|x| x.1.to_bits()).collect();
        a.sort_unstable();
        b.sort_unstable();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn mollify_keeps_mass_and_sign(mu in measure(), eps in 1.0f64..6.0) {
        let d = mollify(&mu, eps).unwrap();
        prop_assert!((d.mass() - 1.0).abs() < 1e-10);
        prop_assert!(d.values.iter().all(|&v| v >= 0.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn transform_of_power_is_power_of_transform(mu in measure(), n in 1u32..=3) {
        let k = mu.n() / 2;
        let a = fourier(&mu, k, FourierMethod::Fft).unwrap();
        let b = fourier(&convolve_power(&mu, n).unwrap(), k, FourierMethod::Fft).unwrap();
        for ((_, x), (_, y)) in a.iter().zip(b.iter()) {
            prop_assert!((x.powu(n) - y).norm() < 1e-8);
        }
    }

    #[test]
    fn parseval_on_the_grid(mu in measure()) {
        let vf = mu.grid().volume_factor();
        let lhs: f64 = mu.atoms().iter().map(|a| (a.1 * vf).powi(2)).sum::<f64>() / vf;
        let rhs: f64 = full_fourier(&mu).iter().map(|c| c.norm_sqr()).sum();
        prop_assert!((lhs - rhs).abs() < 1e-8 * lhs.max(1.0));
    }

    #[test]
    fn density_norm_is_monotone_in_r(mu in measure()) {
        let rs = [Exponent::one(), Exponent::new(3, 2), Exponent::int(2), Exponent::int(4), Exponent::INF];
        let v: Vec<f64> = rs.iter().map(|&r| density_norm(&mu, r).unwrap()).collect();
        prop_assert!(v.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-12)), "{:?}", v);
    }

    #[test]
    fn power_one_is_identity(mu in measure()) {
        let c = convolve_power(&mu, 1).unwrap();
        prop_assert_eq!(c.atoms(), mu.atoms());
    }

    #[test]
    fn probe_bound_is_certified_by_its_witness(mu in measure(), p in exponent(), q in exponent(), x in 2usize..=12) {
        let op = ExtensionOperator::assemble(&mu, x, &Budgets::default()).unwrap();
        let cfg = ProbeConfig { restarts: 2, max_iters: 60, ..ProbeConfig::default() };
        let r = restriction_norm(&op, p, q, &cfg, None).unwrap();
        let direct = op.rayleigh(&r.witness, p.to_f64(), q.to_f64());
        prop_assert!((direct - r.norm_lower_bound).abs() <= 1e-10 * direct);
        if p == Exponent::one() {
            prop_assert!((r.norm_lower_bound - 1.0).abs() < 1e-12);
        }
        // Hölder: the restriction of an ℓ^1-normalized vector is at most 1 in sup norm
        prop_assert!(r.norm_lower_bound <= ((2 * x + 1) as f64).powf(1.0 / p.conj().to_f64()) * (1.0 + 1e-12));
    }

    #[test]
    fn hausdorff_young_holds(f in complex_vec(32), lat in complex_vec(9), si in 0usize..4) {
        let s = [Exponent::int(2), Exponent::int(4), Exponent::int(8), Exponent::INF][si];
        let g = Grid::new(1, 32).unwrap();
        prop_assert!(check_hausdorff_young_grid(g, &f, s, 1e-10).unwrap().holds);
        prop_assert!(check_hausdorff_young_lattice(1, 4, &lat, s, 1e-10).unwrap().holds);
    }

    #[test]
    fn dual_chain_holds(seed in any::<u64>(), g in complex_vec(64), ri in 0usize..3, eps in 1.0f64..4.0) {
        let mu = flat(64, 12, seed);
        let r = [Exponent::INF, Exponent::int(2), Exponent::int(3)][ri];
        let p = theorem_range(2, r).unwrap().p_max;
        let rep = check_dual_chain(&mu, &g, 2, r, p, eps, Some(seed), &Tolerances::default()).unwrap();
        prop_assert!(rep.passed, "{:#?}", rep);
    }

    #[test]
    fn bilinear_bound_holds(seed in any::<u64>(), f in complex_vec(64), g in complex_vec(64), p in exponent()) {
        let mu = flat(64, 10, seed);
        prop_assert!(check_bilinear(&mu, &f, &g, p, 2.0, &Tolerances::default()).unwrap().holds);
    }

    #[test]
    fn knapp_exponent_ignores_amplitude(scale in 0.001f64..1000.0) {
        let mu = cantor(4, &[0, 3], 5).unwrap();
        let radii: Vec<f64> = (2..=8).map(|j| 2f64.powi(-j)).collect();
        let t = Tolerances::default();
        let a = knapp_test(&mu, Exponent::new(4, 3), Exponent::int(4), &radii, 1.0, &t).unwrap();
        let b = knapp_test(&mu, Exponent::new(4, 3), Exponent::int(4), &radii, scale, &t).unwrap();
        prop_assert!((a.fit.slope - b.fit.slope).abs() < 0.02);
    }

    #[test]
    fn exponent_identity_on_feasible_triples(n in 1u32..=6, num in 1i64..=12, den in 1i64..=12, frac in 0i64..=8) {
        let r = if num >= den { Exponent::new(num, den) } else { Exponent::INF };
        let range = theorem_range(n, r).unwrap();
        if let Exponent::Finite(pm) = range.p_max {
            let p = Exponent::Finite(Rational::from_integer(1) + (pm - 1) * Rational::new(frac, 8));
            if range.contains(p, range.q_max(p)) {
                prop_assert!(exponent_identity(n, r, p).unwrap());
            }
        }
    }

    #[test]
    fn exponent_text_round_trips(e in exponent()) {
        prop_assert_eq!(e.to_string().parse::<Exponent>().unwrap(), e);
        prop_assert_eq!(e.conj().conj(), e);
    }
}
