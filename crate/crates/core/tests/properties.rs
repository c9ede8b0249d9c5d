use prgsr_core::ambiguity::BreakpointGrid;
use prgsr_core::benchmark::{benchmark_domain, benchmark_prospect, nominal_weighting};
use prgsr_core::functions::{distorted_expectation, pseudo_metric_general, pseudo_metric_l1, Envelope, PLWeighting};
use prgsr_core::gsr::{gsr_cpt, BisectionConfig};
use prgsr_core::oracle::{random_prospect, random_tuple, random_weighting, seeded_tiny_instance};
use prgsr_core::prospect::{pi_weights, Prospect};
use prgsr_core::reformulation::h_of_x;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// A prospect and a copy with every outcome raised by a non-negative amount,
/// on the same probabilities.
fn coupled_pair(r: &mut ChaCha20Rng, half_width: f64, max_raise: f64) -> (Prospect, Prospect) {
    let base = random_prospect(r, 10, half_width).unwrap();
    let raised: Vec<f64> = base.support().iter().map(|x| x + r.gen_range(0.0..=max_raise)).collect();
    (base.clone(), Prospect::canonicalize(&raised, base.probs()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn decision_weights_are_non_negative(seed in any::<u64>(), x in -0.6f64..0.6) {
        let mut r = rng(seed);
        let (wm, wp) = (random_weighting(&mut r).unwrap(), random_weighting(&mut r).unwrap());
        let xi = random_prospect(&mut r, 10, 0.5).unwrap();
        let split = xi.sign_split(x);
        let pi = pi_weights(&split, xi.probs(), &wm, &wp);
        prop_assert!(pi.pi.iter().all(|&p| p >= -1e-15));
        let lower: f64 = xi.probs()[..split.m].iter().sum();
        let upper: f64 = xi.probs()[split.m..].iter().sum();
        let expected = if split.m == 0 { 0.0 } else { wm.eval_clamped(lower) } + if split.m == xi.len() { 0.0 } else { wp.eval_clamped(upper) };
        prop_assert!((pi.total() - expected).abs() <= 1e-12);
    }

    #[test]
    fn symmetric_weighting_gives_unit_total(x in -0.1f64..0.6) {
        let w = nominal_weighting();
        let xi = benchmark_prospect();
        let pi = pi_weights(&xi.sign_split(x), xi.probs(), &w, &w);
        prop_assert!((pi.total() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn decision_weights_ignore_input_order(seed in any::<u64>(), x in -0.5f64..0.5) {
        let mut r = rng(seed);
        let w = random_weighting(&mut r).unwrap();
        let n = r.gen_range(1..=10);
        let mut pairs: Vec<(f64, f64)> = (0..n).map(|_| ((r.gen_range(-0.5f64..0.5) * 100.0).round() / 100.0, r.gen_range(0.1..1.0))).collect();
        let total: f64 = pairs.iter().map(|p| p.1).sum();
        pairs.iter_mut().for_each(|p| p.1 /= total);
        let build = |pairs: &[(f64, f64)]| {
            let (o, p): (Vec<f64>, Vec<f64>) = pairs.iter().copied().unzip();
            Prospect::canonicalize(&o, &p).unwrap()
        };
        let a = build(&pairs);
        pairs.shuffle(&mut r);
        let b = build(&pairs);
        prop_assert_eq!(a.support(), b.support());
        let pa = pi_weights(&a.sign_split(x), a.probs(), &w, &w);
        let pb = pi_weights(&b.sign_split(x), b.probs(), &w, &w);
        for (u, v) in pa.pi.iter().zip(&pb.pi) {
            prop_assert!((u - v).abs() <= 1e-15, "{} vs {}", u, v);
        }
    }

    #[test]
    fn expectation_is_monotone_in_the_prospect(seed in any::<u64>(), x in -0.3f64..0.3) {
        let mut r = rng(seed);
        let t = random_tuple(&mut r).unwrap();
        let (low, high) = coupled_pair(&mut r, 0.3, 0.2);
        let a = distorted_expectation(&t.value, &t.w_minus, &t.w_plus, &low, x).unwrap();
        let b = distorted_expectation(&t.value, &t.w_minus, &t.w_plus, &high, x).unwrap();
        prop_assert!(a <= b + 1e-12, "{} > {}", a, b);
    }

    #[test]
    fn expectation_strictly_decreases_in_the_level(seed in any::<u64>(), a in -0.5f64..0.5, step in 1e-3f64..0.5) {
        let mut r = rng(seed);
        let t = random_tuple(&mut r).unwrap();
        let xi = random_prospect(&mut r, 10, 0.25).unwrap();
        let b = (a + step).min(0.75);
        prop_assume!(b > a);
        let ea = distorted_expectation(&t.value, &t.w_minus, &t.w_plus, &xi, a).unwrap();
        let eb = distorted_expectation(&t.value, &t.w_minus, &t.w_plus, &xi, b).unwrap();
        prop_assert!(ea > eb, "{} <= {}", ea, eb);
    }

    #[test]
    fn identity_weightings_give_plain_expectation(seed in any::<u64>(), x in -0.5f64..0.5) {
        let mut r = rng(seed);
        let t = random_tuple(&mut r).unwrap();
        let xi = random_prospect(&mut r, 10, 0.5).unwrap();
        let id = PLWeighting::identity();
        let e = distorted_expectation(&t.value, &id, &id, &xi, x).unwrap();
        let plain: f64 = xi.support().iter().zip(xi.probs()).map(|(z, p)| p * t.value.eval(z - x).unwrap()).sum();
        prop_assert!((e - plain).abs() <= 1e-12);
    }

    #[test]
    fn unit_envelope_metric_is_the_l1_metric(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b) = (random_weighting(&mut r).unwrap(), random_weighting(&mut r).unwrap());
        let general = pseudo_metric_general(&a, &b, &Envelope::Constant(1.0)).unwrap();
        prop_assert!((general - pseudo_metric_l1(&a, &b).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn shortfall_risk_is_a_monetary_risk_measure(seed in any::<u64>(), c in -0.2f64..0.2) {
        let mut r = rng(seed);
        let t = random_tuple(&mut r).unwrap();
        let cfg = BisectionConfig::default();
        let tol = 2.0 * cfg.abs_tol;
        let (low, high) = coupled_pair(&mut r, 0.3, 0.2);
        let rho = |p: &Prospect| gsr_cpt(&t.value, &t.w_minus, &t.w_plus, p, &cfg).unwrap().rho;
        let base = rho(&low);
        prop_assert!(base >= low.min() && base <= low.max());
        prop_assert!(rho(&high) >= base - tol);
        prop_assert!((rho(&low.shifted(c)) - (base + c)).abs() <= tol);
        let e = |x: f64| distorted_expectation(&t.value, &t.w_minus, &t.w_plus, &low, x).unwrap();
        if low.len() > 1 {
            prop_assert!(e((base + cfg.abs_tol).min(low.max())) <= 0.0);
            prop_assert!(e((base - cfg.abs_tol).max(low.min())) >= 0.0);
        }
    }

    #[test]
    fn grid_construction_is_idempotent_and_order_free(seed in any::<u64>()) {
        let mut r = rng(seed);
        let dom = benchmark_domain();
        let mut pts: Vec<f64> = (0..12).map(|_| r.gen_range(dom.lower..=dom.upper)).collect();
        let a = BreakpointGrid::build(&dom, pts.iter().copied()).unwrap();
        pts.shuffle(&mut r);
        let b = BreakpointGrid::build(&dom, pts.iter().copied()).unwrap();
        prop_assert_eq!(&a, &b);
        let again = BreakpointGrid::build(&dom, a.points().iter().copied()).unwrap();
        prop_assert_eq!(a, again);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn worst_case_value_decreases_in_the_level(seed in 0u64..10_000) {
        let inst = seeded_tiny_instance(seed).unwrap();
        let (lo, hi) = (inst.prospect.min(), inst.prospect.max());
        let hs: Vec<f64> = (0..50).map(|k| h_of_x(&inst.model, &inst.prospect, lo + (hi - lo) * k as f64 / 49.0).unwrap()).collect();
        for w in hs.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-9, "{} then {}", w[0], w[1]);
            if w[0].abs() > 1e-6 && w[1].abs() > 1e-6 {
                prop_assert!(w[1] < w[0]);
            }
        }
    }

    #[test]
    fn worst_case_value_grows_with_radius(seed in 0u64..10_000, x_frac in 0.0f64..1.0) {
        let inst = seeded_tiny_instance(seed).unwrap();
        let x = inst.prospect.min() + x_frac * (inst.prospect.max() - inst.prospect.min());
        let mut last = f64::NEG_INFINITY;
        for r in [0.0, 0.02, 0.05, 0.1] {
            let h = h_of_x(&inst.model.with_radius(r).unwrap(), &inst.prospect, x).unwrap();
            prop_assert!(h >= last - 1e-9, "radius {}: {} < {}", r, h, last);
            last = h;
        }
    }
}
