//! The acceptance battery as an integration test target: one test per
//! check, each printing the canonical one-line report and failing with the
//! witness on any violation.  Runtimes are held to the published budgets.

use hecke_lattices::suite::{run_criterion, BUDGETS_MS};

fn run(index: usize) {
    let res = run_criterion(index);
    println!("{}", res.line());
    assert!(res.passed, "{}", res.line());
    let budget = BUDGETS_MS[index - 1];
    assert!(
        res.millis <= budget,
        "criterion {index} took {} ms, budget is {budget} ms",
        res.millis
    );
}

#[test]
fn criterion_01_balanced_weight_reduction() {
    run(1);
}

#[test]
fn criterion_02_reversal_symmetry() {
    run(2);
}

#[test]
fn criterion_03_weight_integration() {
    run(3);
}

#[test]
fn criterion_04_stability_equivalence() {
    run(4);
}

#[test]
fn criterion_05_matrix_model_oracle_agreement() {
    run(5);
}

#[test]
fn criterion_06_generator_relations() {
    run(6);
}

#[test]
fn criterion_07_unitarity_versus_balance() {
    run(7);
}

#[test]
fn criterion_08_duality_invariance() {
    run(8);
}

#[test]
fn criterion_09_reduction_path_agreement() {
    run(9);
}

#[test]
fn criterion_10_realization_round_trip() {
    run(10);
}
