//! Model construction, search, decoding and certification on the fixture networks.

use std::path::PathBuf;

use crnreal::milp::{export_lp, import_solution, solve_milp, write_solution, MilpStatus, SolveOptions, VarKind};
use crnreal::rational::{int, ratio, to_f64};
use crnreal::realization::{build_model, certify, finish, model_for, verify_conjugacy};
use crnreal::{
    canonical_realization, deficiency_report, find, parse_network, parse_ode, FindOptions, FindStatus, MassActionSystem, Mode, ModelConfig,
    PolynomialSystem, Rational, Theorem,
};
use num_traits::{Signed, Zero};

fn fixture(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn network(name: &str) -> MassActionSystem {
    parse_network(&fixture(name)).unwrap()
}

fn three_species() -> MassActionSystem {
    canonical_realization(&parse_ode(&fixture("three_species.ode")).unwrap()).unwrap()
}

fn config(mode: Mode) -> ModelConfig {
    ModelConfig { mode, ..ModelConfig::default() }
}

fn count(model: &crnreal::MilpModel, prefix: &str) -> usize {
    model.variables.iter().filter(|v| v.name.strip_prefix(prefix).map_or(false, |rest| rest.starts_with(|c: char| c.is_ascii_digit()))).count()
}

fn rows(model: &crnreal::MilpModel, family: &str) -> usize {
    model.constraints.iter().filter(|c| c.name.strip_prefix(family).map_or(false, |rest| rest.is_empty() || rest.starts_with('_'))).count()
}

#[test]
fn two_species_model_has_expected_family_sizes() {
    let rm = model_for(&network("two_species.net"), &ModelConfig::default()).unwrap();
    let m = &rm.model;
    let expected = [
        ("d_", 2),
        ("b_", 20),
        ("Lambda_", 15),
        ("Gamma_", 60),
        ("S_", 60),
        ("Sp_", 60),
        ("L_", 3),
        ("w_", 20),
        ("wp_", 20),
        ("C_", 15),
        ("Cp_", 5),
    ];
    for (prefix, n) in expected {
        assert_eq!(count(m, prefix), n, "{prefix}");
    }
    assert_eq!(m.num_vars(), 280);
    assert_eq!(m.variables.iter().filter(|v| v.kind == VarKind::Binary).count(), 150);
    assert_eq!(rm.vars.slots, 3);
    assert_eq!(rows(m, "LC"), 10);
    assert_eq!(rows(m, "Stoic6"), 6);
    assert_eq!(rows(m, "DOT"), 3);
    assert_eq!(rows(m, "SpanSum"), 1);
    assert_eq!(rows(m, "DynEq"), 0);
}

#[test]
fn dynamical_equivalence_pins_every_d() {
    let rm = model_for(&network("two_species.net"), &config(Mode::DynamicalEquivalence)).unwrap();
    assert_eq!(rows(&rm.model, "DynEq"), 2);
}

#[test]
fn boros_keeps_only_the_span_equality() {
    let cfg = ModelConfig { theorem: Theorem::Boros, ..ModelConfig::default() };
    let rm = model_for(&network("two_species.net"), &cfg).unwrap();
    assert_eq!(rows(&rm.model, "DOT"), 0);
    assert_eq!(rows(&rm.model, "SpanSum"), 1);
}

#[test]
fn one_slot_leaves_symmetry_family_empty() {
    let rm = model_for(&parse_network("X1 -> 0 ; k=1").unwrap(), &ModelConfig::default()).unwrap();
    assert_eq!(rm.vars.slots, 1);
    assert_eq!(rows(&rm.model, "Link5"), 0);
}

#[test]
fn three_species_model_has_eight_slots() {
    let sys = three_species();
    assert_eq!(sys.network().num_complexes(), 11);
    let rm = model_for(&sys, &ModelConfig::default()).unwrap();
    assert_eq!(rm.s, 3);
    assert_eq!(rm.vars.slots, 8);
}

#[test]
fn models_are_reproducible_from_the_seed() {
    let sys = network("two_species.net");
    let a = export_lp(&model_for(&sys, &ModelConfig::default()).unwrap().model);
    let b = export_lp(&model_for(&sys, &ModelConfig::default()).unwrap().model);
    let c = export_lp(&model_for(&sys, &ModelConfig { seed: 1, ..ModelConfig::default() }).unwrap().model);
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn lp_export_matches_golden_file() {
    let rm = model_for(&network("two_species.net"), &ModelConfig::default()).unwrap();
    assert_eq!(export_lp(&rm.model), fixture("two_species.lp"));
}

#[test]
fn build_rejects_bad_input() {
    let sys = network("two_species.net");
    let mats = crnreal::build_matrices(&sys);
    let y = &mats.y;
    let m = mats.kinetic.matrix();
    assert!(build_model(y, m, 1, &ModelConfig::default()).is_err(), "wrong rank");
    assert!(build_model(y, m, 2, &ModelConfig { eps: int(1), ..ModelConfig::default() }).is_err());
    assert!(build_model(y, m, 2, &ModelConfig { eps: int(0), ..ModelConfig::default() }).is_err());
    assert!(build_model(y, m, 2, &ModelConfig { deltas: Some(vec![int(1); 3]), ..ModelConfig::default() }).is_err());
    assert!(build_model(y, m, 2, &ModelConfig::default()).is_ok());
}

#[test]
fn lc_rows_accept_rates_of_an_equivalent_network() {
    // 2X1 <-> 2X2 with unit rates generates the same field as equivalent_a.net.
    let sys = network("equivalent_a.net");
    let rm = model_for(&sys, &config(Mode::DynamicalEquivalence)).unwrap();
    let mut values = vec![Rational::zero(); rm.model.num_vars()];
    for &d in &rm.vars.d {
        values[d] = int(1);
    }
    values[rm.vars.b(0, 1)] = int(1);
    values[rm.vars.b(1, 0)] = int(1);
    for c in rm.model.constraints.iter().filter(|c| c.name.starts_with("LC_") || c.name.starts_with("DynEq_")) {
        assert!(c.violation(&values).is_zero(), "{}", c.name);
    }
}

#[test]
fn two_species_dynamical_equivalence() {
    let sys = network("two_species.net");
    let rm = model_for(&sys, &config(Mode::DynamicalEquivalence)).unwrap();
    let sol = solve_milp(&rm.model, &SolveOptions::default()).unwrap();
    assert_eq!(sol.status, MilpStatus::Optimal);
    assert_eq!(sol.objective, Some(int(-2)));
    let values = sol.values.as_ref().unwrap();
    let result = finish(&sys, &rm, &sol).unwrap().unwrap();
    assert_eq!(result.c, vec![int(1), int(1)]);
    let v = &result.verification;
    assert!(v.certified, "{:?}", v.remarks);
    assert!(v.conjugacy.lc_residual.is_zero());
    assert!(v.theorem_verdict);
    assert_eq!(v.deficiency.deficiency, 1);
    assert!(!v.weakly_reversible);
    // not weakly reversible, so some supplemental flow leaves a terminal complex
    let n = rm.vars.n;
    let supplemental = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)));
    assert!(supplemental.into_iter().any(|(i, j)| values[rm.vars.w_prime(i, j)].is_positive()));
}

#[test]
fn two_species_linear_conjugacy() {
    let sys = network("two_species.net");
    let out = find(&sys, &FindOptions::default()).unwrap();
    assert_eq!(out.status, FindStatus::Optimal);
    assert_eq!(out.attempts, 1);
    let r = out.result.unwrap();
    assert!(r.verification.certified, "{:?}", r.verification.remarks);
    assert!(r.verification.weakly_reversible);
    assert_eq!(r.verification.deficiency_without_isolated.as_ref().unwrap().l, 1);
    assert!(r.c.iter().any(|c| c != &int(1)), "expected a non-trivial conjugacy");
}

#[test]
fn external_solution_round_trips_through_import() {
    let sys = network("two_species.net");
    let rm = model_for(&sys, &config(Mode::DynamicalEquivalence)).unwrap();
    let internal = solve_milp(&rm.model, &SolveOptions::default()).unwrap();
    let values = internal.values.clone().unwrap();
    // as an external solver would report them: 17 significant digits
    let text: String = rm
        .model
        .variables
        .iter()
        .zip(&values)
        .map(|(v, x)| format!("{} {:.17e}\n", v.name, to_f64(x)))
        .collect();
    let imported = import_solution(&text, &rm.model, &SolveOptions::default()).unwrap();
    assert_eq!(imported.status, MilpStatus::Feasible);
    let a = finish(&sys, &rm, &internal).unwrap().unwrap();
    let b = finish(&sys, &rm, &imported).unwrap().unwrap();
    assert_eq!(a.verification.certified, b.verification.certified);
    assert_eq!(a.verification.deficiency, b.verification.deficiency);
    // exact values survive unchanged
    let exact = import_solution(&write_solution(&rm.model, &values), &rm.model, &SolveOptions::default()).unwrap();
    assert_eq!(exact.values.unwrap(), values);
}

#[test]
fn external_three_species_solution_certifies() {
    let sys = three_species();
    let rm = model_for(&sys, &ModelConfig::default()).unwrap();
    let sol = import_solution(&fixture("three_species_conjugate.highs.sol"), &rm.model, &SolveOptions::default()).unwrap();
    assert_eq!(sol.objective, Some(int(-7)));
    let r = finish(&sys, &rm, &sol).unwrap().unwrap();
    let v = &r.verification;
    assert!(v.certified, "{:?}", v.remarks);
    assert!(v.weakly_reversible);
    assert_eq!(v.deficiency.deficiency, 1);
    assert!(v.non_isolated_complexes <= 5);
    // one non-trivial class plus six isolated complexes
    assert_eq!(v.deficiency.l, 7);
}

#[test]
fn certify_flags_a_wrong_scaling() {
    let orig = network("conjugate_original.net");
    let tgt = network("conjugate_target.net");
    assert!(verify_conjugacy(&orig, &tgt, &[int(1), int(2)]).unwrap().exact());
    let bad = verify_conjugacy(&orig, &tgt, &[int(1), int(1)]).unwrap();
    assert!(!bad.exact());
    assert!(bad.lc_residual.is_positive());
    let report = certify(&orig, &orig, &[int(1), int(1)], Theorem::Dot).unwrap();
    assert!(report.conjugacy.exact());
    // two classes of deficiency zero but overall deficiency one
    assert!(!report.theorem_verdict);
    assert!(verify_conjugacy(&orig, &tgt, &[int(1)]).is_err());
    assert!(verify_conjugacy(&orig, &tgt, &[int(1), ratio(-1, 2)]).is_err());
}

#[test]
fn original_two_species_network_is_conjugate_to_itself_but_fails_the_theorem() {
    let sys = network("two_species.net");
    let report = certify(&sys, &sys, &[int(1), int(1)], Theorem::Dot).unwrap();
    assert!(report.conjugacy.exact());
    assert!(!report.theorem_verdict);
    assert!(!report.certified);
}

#[test]
fn canonical_network_of_the_three_species_system() {
    let poly = parse_ode(&fixture("three_species.ode")).unwrap();
    let sys = canonical_realization(&poly).unwrap();
    let net = sys.network();
    assert_eq!(net.num_complexes(), 11);
    assert_eq!(net.reactions().len(), 8);
    let mut edges: Vec<(String, String)> =
        net.reactions().iter().map(|r| (net.render_complex(r.source), net.render_complex(r.target))).collect();
    edges.sort();
    let mut expected: Vec<(String, String)> = [
        ("3 X2", "X1 + 3 X2"),
        ("3 X2", "2 X2"),
        ("2 X1", "X1"),
        ("0", "X2"),
        ("X1 + X2", "X1 + X2 + X3"),
        ("X1 + X2 + X3", "X1 + X2"),
        ("X1 + X2 + X3", "X2 + X3"),
        ("X1 + X2 + X3", "X1 + 2 X2 + X3"),
    ]
    .iter()
    .map(|(a, b)| (a.to_string(), b.to_string()))
    .collect();
    expected.sort();
    assert_eq!(edges, expected);
    assert_eq!(PolynomialSystem::from_mass_action(&sys).unwrap().normalized(), poly.normalized());
    let report = deficiency_report(net);
    assert_eq!(report.deficiency, 4);
    assert!(report.class_deficiencies().iter().all(|&d| d == 0));
    assert!(!report.deficiency_one_theorem);
    assert!(!report.boros);
}
