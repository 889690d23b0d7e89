use bellcause_core::inequalities::{chsh_optimized_settings, CHSH_SYMMETRIES};
use bellcause_core::lp::{self, LinearProgram, LpStatus};
use bellcause_core::polytope::{
    direct_causal_effect, enumerate_strategies, mixture_membership, strategy_behavior, ExplicitModel, Membership,
};
use bellcause_core::quantum::{alice_settings, bob_settings};
use bellcause_core::{
    ace_closed_form, born_behavior, chsh_value, min_ace, s3_value, Behavior, DetectorModel, Direction, Scenario,
    TwoQubitState,
};
use proptest::prelude::*;

fn weights(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..1.0, n).prop_map(|w| {
        let total: f64 = w.iter().sum();
        w.iter().map(|x| x / total).collect()
    })
}

fn sparse_model(scenario: Scenario, direction: Direction, picks: &[(usize, f64)]) -> (Behavior, Option<ExplicitModel>) {
    let strategies = enumerate_strategies(&scenario, direction).unwrap();
    let total: f64 = picks.iter().map(|p| p.1).sum();
    let parts: Vec<(bellcause_core::DeterministicStrategy, f64)> =
        picks.iter().map(|&(i, w)| (strategies[i % strategies.len()].clone(), w / total)).collect();
    let behaviors: Vec<Behavior> = parts.iter().map(|(s, _)| strategy_behavior(s, &scenario).unwrap()).collect();
    let mix: Vec<(f64, &Behavior)> = parts.iter().map(|p| p.1).zip(&behaviors).collect();
    let b = Behavior::mixture(&mix).unwrap();
    let model = (direction == Direction::AtoB).then_some(ExplicitModel { scenario, components: parts });
    (b, model)
}

fn picks() -> impl Strategy<Value = Vec<(usize, f64)>> {
    prop::collection::vec((0usize..1 << 20, 0.05f64..1.0), 1..6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn json_round_trip(w in weights(4), v in weights(4)) {
        let s = Scenario::CHSH;
        let b = Behavior::from_fn(s, |a, bb, x, y| if x == 0 { w[2 * a + bb] } else { v[(2 * a + bb + y) % 4] }).unwrap();
        let back = Behavior::from_json(&b.to_json().unwrap()).unwrap();
        prop_assert_eq!(back, b);
    }

    #[test]
    fn chsh_value_is_symmetry_invariant(g in 0.0f64..1.6, v in 0.0f64..=1.0, ta in prop::array::uniform2(-4.0f64..4.0), tb in prop::array::uniform2(-4.0f64..4.0), k in 0usize..8) {
        let b = born_behavior(&TwoQubitState::new(g, v).unwrap(), &alice_settings(&ta), &bob_settings(&tb), &DetectorModel::PERFECT).unwrap();
        let moved = CHSH_SYMMETRIES[k].apply(&b).unwrap();
        prop_assert!((chsh_value(&moved).unwrap().s2 - chsh_value(&b).unwrap().s2).abs() < 1e-12);
    }

    #[test]
    fn one_way_models_respect_s3_bound(picks in picks(), forward in any::<bool>()) {
        let direction = if forward { Direction::AtoB } else { Direction::BtoA };
        let (b, _) = sparse_model(Scenario::THREE_SETTING, direction, &picks);
        prop_assert!(s3_value(&b).unwrap().s3 <= 4.0 + 1e-12);
    }

    #[test]
    fn min_ace_bounds_the_generating_model(picks in picks()) {
        let (b, model) = sparse_model(Scenario::CHSH, Direction::AtoB, &picks);
        let r = min_ace(&b).unwrap();
        let found = r.value.unwrap();
        prop_assert!(found <= direct_causal_effect(&model.unwrap()) + 1e-9);
        prop_assert!(found >= ace_closed_form(&chsh_value(&b).unwrap()) - 1e-9);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&found));
    }

    #[test]
    fn two_way_mixtures_are_members(fwd in picks(), back in picks(), w in 0.0f64..=1.0) {
        let (a, _) = sparse_model(Scenario::CHSH, Direction::AtoB, &fwd);
        let (b, _) = sparse_model(Scenario::CHSH, Direction::BtoA, &back);
        let mix = Behavior::mixture(&[(w, &a), (1.0 - w, &b)]).unwrap();
        prop_assert!(mixture_membership(&mix).unwrap().is_member());
    }

    #[test]
    fn random_lps_satisfy_strong_duality(
        a in prop::collection::vec(prop::collection::vec(-3i32..4, 5), 3),
        x0 in prop::collection::vec(0i32..3, 5),
        c in prop::collection::vec(0i32..5, 5),
    ) {
        // feasible by construction and bounded because c >= 0 and x >= 0
        let mut program = LinearProgram::new(5);
        program.set_objective(c.iter().map(|&v| f64::from(v)).collect()).unwrap();
        for row in &a {
            let rhs: i32 = row.iter().zip(&x0).map(|(r, x)| r * x).sum();
            program.add_equality(row.iter().map(|&v| f64::from(v)).collect(), f64::from(rhs)).unwrap();
        }
        let out = lp::solve(&program).unwrap();
        prop_assert_eq!(out.status, LpStatus::Optimal);
        prop_assert!(program.max_violation(&out.solution) < 1e-9);
        let dual = program.dual_bound(&out.duals, 1e-9).unwrap();
        prop_assert!((dual - out.objective).abs() < 1e-8);
    }
}

#[test]
fn doubly_signalling_behavior_is_excluded_with_certificate() {
    let s = Scenario::CHSH;
    // a = y and b = x: each party's outcome follows the other's setting
    let b = Behavior::from_fn(s, |a, bb, x, y| if a == y && bb == x { 1.0 } else { 0.0 }).unwrap();
    let Membership::NonMember { certificate } = mixture_membership(&b).unwrap() else {
        panic!("behavior reported as a mixture");
    };
    let score =
        |t: &Behavior| t.as_slice().iter().zip(&certificate).map(|(p, y)| p * y).sum::<f64>() + certificate[s.len()];
    assert!(score(&b) > 1e-9);
    for direction in [Direction::AtoB, Direction::BtoA] {
        for st in enumerate_strategies(&s, direction).unwrap() {
            assert!(score(&strategy_behavior(&st, &s).unwrap()) <= 1e-9);
        }
    }
}

#[test]
fn min_ace_certificate_excludes_every_vertex() {
    let s = Scenario::CHSH;
    let b = Behavior::from_fn(s, |a, bb, _, y| if a == y && bb == 0 { 1.0 } else { 0.0 }).unwrap();
    let r = min_ace(&b).unwrap();
    let cert = &r.certificate;
    let score = |t: &Behavior| t.as_slice().iter().zip(cert).map(|(p, y)| p * y).sum::<f64>() + cert[s.len()];
    assert!(score(&b) > 1e-9);
    for st in enumerate_strategies(&s, Direction::AtoB).unwrap() {
        assert!(score(&strategy_behavior(&st, &s).unwrap()) <= 1e-9);
    }
}

#[test]
fn optimized_settings_ace_matches_formula_along_the_state_curve() {
    for k in 0..=16 {
        let g = std::f64::consts::FRAC_PI_2 * f64::from(k) / 16.0;
        let (sa, sb) = chsh_optimized_settings(g);
        let b = born_behavior(&TwoQubitState::pure(g).unwrap(), &sa, &sb, &DetectorModel::PERFECT).unwrap();
        let report = chsh_value(&b).unwrap();
        let lp = min_ace(&b).unwrap().value.unwrap();
        assert!((lp - ace_closed_form(&report)).abs() < 1e-7, "γ = {g}");
    }
}
