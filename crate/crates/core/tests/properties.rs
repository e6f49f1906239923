//! Randomized property checks of the rigorous layer against independent
//! references. Every generator is seeded, so failures reproduce exactly.

mod common;

fn check(result: common::Check) {
    if let Err(e) = result {
        panic!("{e}");
    }
}

#[test]
fn interval_operations_contain_exact_results() {
    check(common::interval_fuzz(10_000));
}

#[test]
fn convolutions_obey_banach_algebra_bounds() {
    check(common::banach_algebra(1_000));
}

#[test]
fn tail_constants_dominate_quadrature() {
    check(common::tail_inequalities(20, 50, 0x5eed_0001));
}

#[test]
fn fundamental_matrix_tubes_contain_dense_solutions() {
    check(common::fundamental_tube(20, 8, 0x5eed_0002));
}

#[test]
fn local_inclusion_contains_galerkin_solution() {
    check(common::inclusion_tube(10, 20));
}

#[test]
fn certificates_are_deterministic_and_replayable() {
    check(common::replay_determinism(6));
}
