//! Randomized invariants over small instances (n <= 6, m, s <= 3).

use compsbm::cc::linearize_efficiency_at;
use compsbm::lp::solve_lp;
use compsbm::{
    alpha_star, classify_region, composite_scores, csbm, delta_star, delta_star_core, in_production_set,
    is_dominated_by, is_efficient, jsbm, linearize_sbm, malmquist_index, max_rho_pbar_with, projection_rho_report,
    rho_star, Activity, LpKind, MaximinOptions, ModelConfig, PanelInput, ReferenceSet, Region, RegionRule, ScoreKind,
};
use proptest::prelude::*;

const EPS: f64 = 1e-6;

fn activity(v: &[u32], m: usize) -> Activity {
    let f: Vec<f64> = v.iter().map(|&k| k as f64).collect();
    Activity::new(f[..m].to_vec(), f[m..].to_vec()).unwrap()
}

/// Reference set of `n` DMUs plus one evaluated activity; integer data so
/// ties and degenerate vertices show up often.
fn instance() -> impl Strategy<Value = (ReferenceSet, Activity)> {
    (2usize..=6, 1usize..=3, 1usize..=3).prop_flat_map(|(n, m, s)| {
        prop::collection::vec(prop::collection::vec(1u32..=60, m + s), n + 1).prop_map(move |rows| {
            let dmus = rows[..n].iter().map(|r| activity(r, m)).collect();
            (ReferenceSet::from_activities(dmus).unwrap(), activity(&rows[n], m))
        })
    })
}

/// An instance together with one coordinate and a worsening factor.
fn perturbed() -> impl Strategy<Value = (ReferenceSet, Activity, usize, f64)> {
    instance().prop_flat_map(|(set, a)| {
        let k = a.m() + a.s();
        (Just(set), Just(a), 0..k, 1.01f64..2.0)
    })
}

fn worsen(a: &Activity, k: usize, f: f64) -> Activity {
    if k < a.m() {
        a.with_input(k, a.inputs()[k] * f).unwrap()
    } else {
        a.with_output(k - a.m(), a.outputs()[k - a.m()] / f).unwrap()
    }
}

fn rescale_set(set: &ReferenceSet, k: usize, f: f64) -> ReferenceSet {
    let acts = set.activities().iter().map(|a| rescale(a, k, f)).collect();
    ReferenceSet::new(set.names().to_vec(), acts).unwrap()
}

fn rescale(a: &Activity, k: usize, f: f64) -> Activity {
    if k < a.m() {
        a.with_input(k, a.inputs()[k] * f).unwrap()
    } else {
        a.with_output(k - a.m(), a.outputs()[k - a.m()] * f).unwrap()
    }
}

fn cfg() -> ModelConfig {
    ModelConfig::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dominance_is_a_partial_order(
        a in prop::collection::vec(1u32..=4, 3),
        b in prop::collection::vec(1u32..=4, 3),
        c in prop::collection::vec(1u32..=4, 3),
    ) {
        let (a, b, c) = (activity(&a, 2), activity(&b, 2), activity(&c, 2));
        prop_assert!(is_dominated_by(&a, &a).unwrap().dominated);
        prop_assert!(!is_dominated_by(&a, &a).unwrap().strict);
        let ab = is_dominated_by(&a, &b).unwrap().dominated;
        let ba = is_dominated_by(&b, &a).unwrap().dominated;
        if ab && ba {
            prop_assert_eq!(&a, &b);
        }
        if ab && is_dominated_by(&b, &c).unwrap().dominated {
            prop_assert!(is_dominated_by(&a, &c).unwrap().dominated);
        }
    }

    #[test]
    fn free_disposability((set, a, k, f) in perturbed()) {
        if in_production_set(&a, &set, &cfg()).unwrap() {
            prop_assert!(in_production_set(&worsen(&a, k, f), &set, &cfg()).unwrap());
        }
    }

    #[test]
    fn region_rules((set, a) in instance()) {
        let c = cfg();
        let alpha = alpha_star(&a, &set, &c).unwrap().score;
        let by_projection = classify_region(&a, &set, &c, RegionRule::Projection).unwrap();
        let by_pbar = classify_region(&a, &set, &c, RegionRule::Pbar).unwrap();
        if alpha > c.tol.eps_zero {
            prop_assert_eq!(by_projection, Region::I);
        }
        // The rules only disagree by promoting III to II.
        prop_assert!(by_projection == by_pbar || (by_projection == Region::III && by_pbar == Region::II));
        for d in set.activities() {
            if is_efficient(d, &set, &c).unwrap() {
                prop_assert_ne!(classify_region(d, &set, &c, RegionRule::Projection).unwrap(), Region::I);
            }
        }
    }

    #[test]
    fn efficiency_back_map((set, a) in instance()) {
        let r = rho_star(&a, &set, &cfg()).unwrap();
        prop_assert!(r.score > 0.0 && r.score <= 1.0 + 1e-12);
        if r.lambda.is_empty() {
            // Outside P.
            prop_assert!(!in_production_set(&a, &set, &cfg()).unwrap());
            return Ok(());
        }
        let (m, s) = (a.m(), a.s());
        for i in 0..m {
            let xl: f64 = (0..set.n()).map(|j| set.x(i, j) * r.lambda[j]).sum();
            prop_assert!((xl + r.slacks_minus[i] - a.inputs()[i]).abs() <= 1e-6 * a.inputs()[i].max(1.0));
        }
        for q in 0..s {
            let yl: f64 = (0..set.n()).map(|j| set.y(q, j) * r.lambda[j]).sum();
            prop_assert!((yl - r.slacks_plus[q] - a.outputs()[q]).abs() <= 1e-6 * a.outputs()[q].max(1.0));
        }
        let num = 1.0 - (0..m).map(|i| r.slacks_minus[i] / a.inputs()[i]).sum::<f64>() / m as f64;
        let den = 1.0 + (0..s).map(|q| r.slacks_plus[q] / a.outputs()[q]).sum::<f64>() / s as f64;
        prop_assert!((num / den - r.score).abs() <= EPS);
        prop_assert_eq!(r.score >= 1.0 - EPS, is_efficient(&a, &set, &cfg()).unwrap());
    }

    #[test]
    fn superefficiency_back_map((set, a) in instance()) {
        let c = cfg();
        let d = delta_star_core(&a, &set, &c).unwrap();
        prop_assert!(d.score >= 1.0 - 1e-12);
        let p = d.projection.clone().unwrap();
        for i in 0..a.m() {
            let xl: f64 = (0..set.n()).map(|j| set.x(i, j) * d.lambda[j]).sum();
            prop_assert!(p.inputs()[i] >= xl - 1e-6 * xl.max(1.0));
        }
        for q in 0..a.s() {
            let yl: f64 = (0..set.n()).map(|j| set.y(q, j) * d.lambda[j]).sum();
            prop_assert!(p.outputs()[q] > 0.0);
            prop_assert!(p.outputs()[q] <= yl + 1e-6 * yl.max(1.0));
        }
        let num = 1.0 + (0..a.m()).map(|i| d.slacks_minus[i] / a.inputs()[i]).sum::<f64>() / a.m() as f64;
        let den = 1.0 - (0..a.s()).map(|q| d.slacks_plus[q] / a.outputs()[q]).sum::<f64>() / a.s() as f64;
        prop_assert!((num / den - d.score).abs() <= EPS);
    }

    #[test]
    fn solves_are_bitwise_repeatable((set, a) in instance()) {
        let prog = linearize_sbm(LpKind::Superefficiency, &a, &set, &cfg()).unwrap();
        let s1 = solve_lp(&prog.lp).unwrap();
        let s2 = solve_lp(&prog.lp).unwrap();
        prop_assert_eq!(s1.objective_value.to_bits(), s2.objective_value.to_bits());
        prop_assert_eq!(&s1.primal, &s2.primal);
        prop_assert_eq!(composite_scores(&a, &set, &cfg(), &MaximinOptions::default()).unwrap(),
                        composite_scores(&a, &set, &cfg(), &MaximinOptions::default()).unwrap());
    }

    #[test]
    fn efficiency_is_strongly_monotone_on_p((set, a, k, f) in perturbed()) {
        let c = cfg();
        if !in_production_set(&a, &set, &c).unwrap() {
            return Ok(());
        }
        let r = rho_star(&a, &set, &c).unwrap().score;
        let worse = worsen(&a, k, f);
        prop_assert!(rho_star(&worse, &set, &c).unwrap().score <= r + EPS);
        // Worse in every coordinate: strictly lower.
        let all_worse = (0..a.m() + a.s()).fold(a.clone(), |b, k| worsen(&b, k, 1.1));
        prop_assert!(rho_star(&all_worse, &set, &c).unwrap().score < r - EPS);
    }

    #[test]
    fn superefficiency_is_weakly_monotone((set, a, k, f) in perturbed()) {
        let c = cfg();
        let d = delta_star(&a, &set, &c).unwrap().score;
        prop_assert!(delta_star(&worsen(&a, k, f), &set, &c).unwrap().score <= d + EPS);
    }

    #[test]
    fn slack_supports_are_disjoint((set, a) in instance()) {
        let p = projection_rho_report(&a, &set, &cfg()).unwrap();
        for i in 0..a.m() {
            let (t, s) = (p.delta.slacks_minus[i] / a.inputs()[i], p.slacks_minus[i] / a.inputs()[i]);
            prop_assert!(t * s <= 1e-7, "input {}: t = {}, s = {}", i, t, s);
        }
        for q in 0..a.s() {
            let (t, s) = (p.delta.slacks_plus[q] / a.outputs()[q], p.slacks_plus[q] / a.outputs()[q]);
            prop_assert!(t * s <= 1e-7, "output {}: t = {}, s = {}", q, t, s);
        }
    }

    #[test]
    fn projection_objectives_agree((set, a) in instance()) {
        let c = cfg();
        let p = projection_rho_report(&a, &set, &c).unwrap();
        let proj = p.delta.projection.clone().unwrap();
        // The projection's own denominators instead of the evaluated activity's.
        let own = linearize_efficiency_at(proj.inputs(), proj.outputs(), proj.inputs(), proj.outputs(), &set, &c);
        let own = solve_lp(&own.lp).unwrap();
        if own.is_optimal() {
            prop_assert!((own.objective_value.min(1.0) - p.value).abs() <= EPS,
                "own {} vs replaced {}", own.objective_value, p.value);
        }
    }

    #[test]
    fn scores_are_unit_invariant((set, a) in instance(), k in 0usize..6, f in 0.01f64..100.0) {
        let k = k % (a.m() + a.s());
        let (set2, a2) = (rescale_set(&set, k, f), rescale(&a, k, f));
        let c = cfg();
        let s1 = composite_scores(&a, &set, &c, &MaximinOptions::default()).unwrap();
        let s2 = composite_scores(&a2, &set2, &c, &MaximinOptions::default()).unwrap();
        for (x, y) in [
            (s1.delta, s2.delta),
            (s1.rho_projection, s2.rho_projection),
            (s1.csbm, s2.csbm),
            (s1.jsbm, s2.jsbm),
            (s1.gamma_low, s2.gamma_low),
            (s1.gamma, s2.gamma),
            (s1.gamma_se, s2.gamma_se),
        ] {
            prop_assert!((x - y).abs() <= EPS, "{} vs {}", x, y);
        }
        prop_assert!((rho_star(&a, &set, &c).unwrap().score - rho_star(&a2, &set2, &c).unwrap().score).abs() <= EPS);
        prop_assert!((csbm(&a, &set, &c).unwrap() - csbm(&a2, &set2, &c).unwrap()).abs() <= EPS);
        prop_assert!((jsbm(&a, &set, &c).unwrap() - jsbm(&a2, &set2, &c).unwrap()).abs() <= EPS);
    }

    #[test]
    fn composite_structure((set, a) in instance()) {
        let c = cfg();
        let s = composite_scores(&a, &set, &c, &MaximinOptions::default()).unwrap();
        let tol = c.tol.outer_tol + EPS;
        prop_assert!(s.gamma_low <= s.gamma + tol);
        prop_assert!(s.gamma <= s.delta + tol);
        prop_assert!((s.gamma_se - (s.gamma * (1.0 - 1.0 / s.delta) + 1.0)).abs() <= EPS);
        let max = s.max_rho_pbar.value;
        let efficient = is_efficient(&a, &set, &c).unwrap();
        if efficient {
            prop_assert!(s.gamma_se >= 1.0 - EPS);
        }
        // Exactly one case applies.
        let rho = rho_star(&a, &set, &c).unwrap().score;
        let cases = [
            !efficient && (s.gamma - rho).abs() <= EPS,
            efficient && max >= 1.0 - c.tol.eps_score && (s.gamma - s.delta).abs() <= tol,
            efficient && max < 1.0 - c.tol.eps_score && max - tol < s.gamma && s.gamma < s.delta + tol,
        ];
        prop_assert_eq!(cases.iter().filter(|b| **b).count(), 1, "{:?} {:?}", cases, s);
    }

    #[test]
    fn composite_is_weakly_monotone((set, a, k, f) in perturbed()) {
        let c = cfg();
        let s1 = composite_scores(&a, &set, &c, &MaximinOptions::default()).unwrap();
        let s2 = composite_scores(&worsen(&a, k, f), &set, &c, &MaximinOptions::default()).unwrap();
        let tol = c.tol.outer_tol + EPS;
        prop_assert!(s2.gamma <= s1.gamma + tol, "{} -> {}", s1.gamma, s2.gamma);
        prop_assert!(s2.gamma_se <= s1.gamma_se + tol);
    }

    #[test]
    fn heuristic_search_never_beats_enumeration((set, a) in instance()) {
        let c = cfg();
        let exact = max_rho_pbar_with(&a, &set, &c, &MaximinOptions::default()).unwrap();
        let heuristic = max_rho_pbar_with(&a, &set, &c, &MaximinOptions { exhaustive_limit: 0, ..MaximinOptions::default() }).unwrap();
        prop_assert!(heuristic.value <= exact.value + EPS, "{} > {}", heuristic.value, exact.value);
        prop_assert!(heuristic.value >= exact.value - 5e-3, "{} << {}", heuristic.value, exact.value);
    }

    #[test]
    fn malmquist_is_a_product((set, a) in instance(), b in prop::collection::vec(1u32..=60, 6)) {
        let m = a.m();
        let b: Vec<u32> = b.into_iter().take(a.m() + a.s()).collect();
        if b.len() < a.m() + a.s() { return Ok(()); }
        let b = activity(&b, m);
        let p1 = set.with_activity("E", a).unwrap();
        let p2 = set.with_activity("E", b).unwrap();
        let panel = PanelInput::new(p1.clone(), p2, "E", ScoreKind::SbmGlobal).unwrap();
        let r = malmquist_index(&panel, &cfg()).unwrap();
        prop_assert_eq!(r.index, r.catch_up * r.frontier_shift);
        let same = PanelInput::new(p1.clone(), p1, "E", ScoreKind::SbmGlobal).unwrap();
        let r = malmquist_index(&same, &cfg()).unwrap();
        prop_assert!((r.frontier_shift - 1.0).abs() <= EPS);
        prop_assert!((r.catch_up - 1.0).abs() <= EPS);
    }
}
