use prgsr_core::ambiguity::{build_breakpoint_grid, CertaintyEquivalentRecord, PairwiseRecord};
use prgsr_core::benchmark::{benchmark_prospect, discretized_truth, empty_model, nominal_weighting, pinned_model};
use prgsr_core::functions::{distorted_expectation, PLValueFunction, PLWeighting};
use prgsr_core::prospect::Prospect;
use prgsr_core::reformulation::{assemble, evaluate, h_of_x, Method, RowFamily};
use prgsr_lp::DenseSimplex;

fn solver() -> DenseSimplex {
    DenseSimplex::default()
}

fn truth_on(bps: &[f64]) -> PLValueFunction {
    discretized_truth(bps).unwrap()
}

fn elicited_model() -> prgsr_core::ambiguity::AmbiguityModel {
    let mut m = empty_model(0.01);
    let w = nominal_weighting();
    let v = |y: f64| prgsr_core::functions::reference::true_value(y);
    for &(r1, r3, p) in &[(-0.4, 0.2, 0.3), (-0.1, 0.45, 0.6), (-0.35, -0.05, 0.5)] {
        let weight = w.eval(p).unwrap();
        let ratio = (v(0.5 * (r1 + r3)) - v(r1)) / (v(r3) - v(r1));
        m.pairwise.push(PairwiseRecord::utility_split(r1, r3, p, weight, ratio > weight).unwrap());
    }
    let ce = truth_certainty_equivalent(0.4, 0.5);
    m.ce.push(CertaintyEquivalentRecord::new(0.4, 0.5, ce - 0.01, ce + 0.01).unwrap());
    m
}

/// Certainty equivalent of `(0.4 w.p. p, 0 otherwise)` under the reference
/// preferences, by bisection on a fine interpolant.
fn truth_certainty_equivalent(r: f64, p: f64) -> f64 {
    let bps: Vec<f64> = (0..=1000).map(|k| -0.5 + k as f64 / 1000.0).collect();
    let v = truth_on(&bps);
    let w = nominal_weighting();
    let lottery = Prospect::canonicalize(&[0.0, r], &[1.0 - p, p]).unwrap();
    let (mut lo, mut hi) = (0.0, r);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if distorted_expectation(&v, &w, &w, &lottery, mid).unwrap() > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn pinned_singleton_reproduces_distorted_expectation_on_both_paths() {
    let v0 = truth_on(&[-0.5, -0.25, 0.0, 0.25, 0.5]);
    let w0 = nominal_weighting();
    let model = pinned_model(&v0, &w0, 0.0).unwrap();
    let xi = benchmark_prospect();
    for &x in &[0.1, 0.2, 0.3] {
        let direct = distorted_expectation(&v0, &w0, &w0, &xi, x).unwrap();
        for method in [Method::FullLp, Method::Decomposed] {
            let ev = evaluate(&model, &xi, x, method, &solver()).unwrap();
            assert!((ev.h - direct).abs() < 1e-8, "{method:?} x={x}: {} vs {direct}", ev.h);
            let t = ev.worst_case().unwrap();
            for &y in &[-0.5, -0.3, -0.25, 0.0, 0.1, 0.25, 0.5] {
                assert!((t.value.eval(y).unwrap() - v0.eval(y).unwrap()).abs() < 1e-8);
            }
            for (a, b) in t.w_minus.slopes().iter().zip(w0.slopes()) {
                assert!((a - b).abs() < 1e-10);
            }
            for (a, b) in t.w_plus.slopes().iter().zip(w0.slopes()) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn identity_center_and_linear_value_give_the_mean() {
    let v = PLValueFunction::linear(-1.0, 1.0).unwrap();
    let model = pinned_model(&v, &PLWeighting::identity(), 0.0).unwrap();
    let xi = Prospect::canonicalize(&[0.0, 0.2, 0.7], &[0.25, 0.5, 0.25]).unwrap();
    let xi_ref = prgsr_core::reformulation::refine_for_prospect(&model, &xi).unwrap();
    let mean = 0.0 * 0.25 + 0.2 * 0.5 + 0.7 * 0.25;
    for &x in &[0.0, 0.3, 0.7] {
        let h = evaluate(&xi_ref, &xi, x, Method::FullLp, &solver()).unwrap().h;
        assert!((h - (mean - x)).abs() < 1e-8, "x={x}: {h}");
    }
}

#[test]
fn full_and_decomposed_paths_agree() {
    let xi = benchmark_prospect();
    let model = elicited_model();
    for &x in &[0.1, 0.2044, 0.35] {
        let full = evaluate(&model, &xi, x, Method::FullLp, &solver()).unwrap();
        let dec = evaluate(&model, &xi, x, Method::Decomposed, &solver()).unwrap();
        assert!((full.h - dec.h).abs() < 1e-7, "x={x}: {} vs {}", full.h, dec.h);
        let lp = assemble(&model, &xi, x).unwrap();
        let p = &lp.problem;
        assert!(p.max_row_violation(&dec.primal) < 1e-7);
        assert!(p.max_bound_violation(&dec.primal) < 1e-9);
        assert!((p.objective_value(&dec.primal) - dec.h).abs() < 1e-9);
    }
}

#[test]
fn every_constraint_family_has_a_row() {
    let lp = assemble(&elicited_model(), &benchmark_prospect(), 0.2).unwrap();
    assert_eq!(lp.families_present(), RowFamily::ALL.to_vec());
    for row in &lp.problem.rows {
        assert!(RowFamily::of_label(&row.label).is_some(), "untagged row {}", row.label);
    }
}

#[test]
fn variable_count_matches_slice_layout() {
    let xi = benchmark_prospect();
    let model = elicited_model();
    let lp = assemble(&model, &xi, 0.2).unwrap();
    let pieces = build_breakpoint_grid(&model, &xi, 0.2).unwrap().n_pieces();
    let t = 10;
    assert_eq!(lp.problem.n_vars(), 4 * pieces * t + 6 * t);
}

#[test]
fn h_has_the_support_signs_and_decreases() {
    let xi = benchmark_prospect();
    let model = elicited_model();
    assert!(h_of_x(&model, &xi, xi.max()).unwrap() <= 1e-12);
    assert!(h_of_x(&model, &xi, xi.min()).unwrap() >= -1e-12);
    let n = 50;
    let mut prev = f64::INFINITY;
    for k in 0..n {
        let x = xi.min() + (xi.max() - xi.min()) * k as f64 / (n - 1) as f64;
        let h = h_of_x(&model, &xi, x).unwrap();
        assert!(h <= prev + 1e-9, "h rose at x={x}");
        if h.abs() > 1e-6 && prev.is_finite() {
            assert!(h < prev, "h flat at x={x}");
        }
        prev = h;
    }
}

#[test]
fn h_bounds_the_truth_when_the_truth_is_admissible() {
    let xi = benchmark_prospect();
    let model = elicited_model();
    let w = nominal_weighting();
    for &x in &[0.05, 0.2, 0.4] {
        let grid = build_breakpoint_grid(&model, &xi, x).unwrap();
        let truth = truth_on(grid.points());
        let viol = model.max_violation(&truth).unwrap();
        assert!(viol < 1e-12, "x={x}: {viol}");
        let lower = distorted_expectation(&truth, &w, &w, &xi, x).unwrap();
        assert!(h_of_x(&model, &xi, x).unwrap() >= lower - 1e-9);
    }
}

#[test]
fn h_grows_with_radius_and_shrinks_with_records() {
    let xi = benchmark_prospect();
    let model = elicited_model();
    let x = 0.2;
    let mut prev = f64::NEG_INFINITY;
    for r in [0.0, 0.01, 0.04, 0.16] {
        let h = h_of_x(&model.with_radius(r).unwrap(), &xi, x).unwrap();
        assert!(h >= prev - 1e-9);
        prev = h;
    }
    let mut prev = f64::INFINITY;
    for m in 0..=model.pairwise.len() {
        let h = h_of_x(&model.truncated(m, model.ce.len()), &xi, x).unwrap();
        assert!(h <= prev + 1e-9);
        prev = h;
    }
}

#[test]
fn worst_case_tuple_is_admissible_and_gap_is_reported() {
    let xi = benchmark_prospect();
    let model = elicited_model();
    for method in [Method::FullLp, Method::Decomposed] {
        let ev = evaluate(&model, &xi, 0.2, method, &solver()).unwrap();
        let t = ev.worst_case().unwrap();
        assert!(model.max_violation(&t.value).unwrap() < 1e-6);
        assert!(model.ball_minus.contains(&t.w_minus, 1e-8).unwrap());
        assert!(model.ball_plus.contains(&t.w_plus, 1e-8).unwrap());
        let gap = ev.slice_gap(&xi).unwrap();
        assert!(gap >= -1e-8, "{method:?} gap {gap}");
    }
}

#[test]
fn coarse_weighting_grid_is_rejected() {
    let model = empty_model(0.01);
    let xi = Prospect::canonicalize(&[0.1, 0.2, 0.3], &[0.25, 0.35, 0.4]).unwrap();
    assert!(matches!(assemble(&model, &xi, 0.2), Err(prgsr_core::Error::WeightingGridTooCoarse { .. })));
}
