import pytest

from fplopt.synth import synthetic_panel

_CRITERIA = {
    "test_optimizer_exactness_vs_oracle": "optimizer-exactness",
    "test_validator_zero_violations_across_backtests": "constraint-validator",
    "test_full_scale_solve_under_ten_seconds": "full-scale-solve",
    "test_estimator_oracles_at_stated_tolerances": "estimator-oracles",
    "test_robust_reduction_exact_and_bounded": "robust-reduction",
    "test_no_lookahead_mutation": "no-lookahead",
    "test_scoring_identities_vs_independent_rescorer": "scoring-identities",
    "test_gw27_weighted_average_golden_squad": "gw27-golden-squads",
    "test_reference_leaderboard_reproduced": "season-leaderboard",
    "test_gw27_formation_regularity": "formation-regularity",
}


def pytest_runtest_logreport(report):
    """One visible PASS/FAIL/SKIP line per acceptance criterion."""
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    criterion = _CRITERIA.get(name)
    if criterion is None:
        return
    if report.when == "call" or (report.when == "setup" and report.skipped):
        if report.skipped:
            reason = report.longrepr[2] if isinstance(report.longrepr, tuple) else ""
            outcome = f"SKIP ({reason.removeprefix('Skipped: ')})"
        else:
            outcome = "PASS" if report.passed else "FAIL"
        print(f"\nACCEPTANCE {criterion}: {outcome}", flush=True)


@pytest.fixture(scope="session")
def panel():
    """Small synthetic season: 8 clubs, fast enough for per-test solves."""
    return synthetic_panel(seed=42, n_clubs=8)


@pytest.fixture(scope="session")
def mini_panel():
    """Six clubs (~170 players): fast enough for rolling-strategy tests."""
    return synthetic_panel(seed=7, n_clubs=6)


@pytest.fixture(scope="session")
def big_panel():
    """Full-size synthetic season: 20 clubs, ~560 players."""
    return synthetic_panel(seed=1)
