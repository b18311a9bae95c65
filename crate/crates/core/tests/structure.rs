mod common;

fn assert_ok(check: common::Check) {
    if let Err(e) = check {
        panic!("{e}");
    }
}

#[test]
fn probabilities_are_bounded() {
    assert_ok(common::probability_bounds());
}

#[test]
fn relay_spends_exactly_what_it_harvests() {
    assert_ok(common::energy_causality());
}

#[test]
fn snr_events_match_threshold_form() {
    assert_ok(common::link_equivalence());
}

#[test]
fn success_pieces_partition_the_success_region() {
    assert_ok(common::region_partition());
}

#[test]
fn symmetric_configuration_treats_terminals_alike() {
    assert_ok(common::symmetric_equality());
}

#[test]
fn monte_carlo_is_reproducible() {
    assert_ok(common::mc_determinism());
}

#[test]
fn monte_carlo_ignores_worker_count() {
    assert_ok(common::worker_independence());
}
