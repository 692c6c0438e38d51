import pytest

from transverse.config import TransverseConfig
from transverse.fixtures import FixtureSuite, verify_reference_fixtures


@pytest.fixture
def suite(config: TransverseConfig) -> FixtureSuite:
    return FixtureSuite(config)


def test_catalog_marks_heavy_fixtures_slow(suite: FixtureSuite) -> None:
    slow = {f['name'] for f in suite.get_fixtures() if f['slow']}
    assert 'reduced psi of twisted 4-braid' in slow
    assert 'pretzel HOMFLY-PT polynomial' not in slow


@pytest.mark.parametrize("check", [
    'check_pretzel_knots',
    'check_mirror_bounds',
    'check_twisted_three_braid',
    'check_stability_threshold',
    'check_fdtc_patterns',
    'check_torus_homfly',
])
def test_individual_checks_pass(suite: FixtureSuite, check: str) -> None:
    assert getattr(suite, check)()['passed']


def test_recorded_certificate_check(suite: FixtureSuite) -> None:
    outcome = suite.check_certificate('positive-writhe-b5')
    assert outcome['passed']
    assert outcome['terms'] > 0


def test_failing_check_is_reported(suite: FixtureSuite) -> None:
    result = suite.run_fixture({'name': 'always fails', 'check': lambda: {'passed': False}, 'slow': False})
    assert result['status'] == 'failed'


def test_resource_cap_makes_fixture_undecided() -> None:
    config = TransverseConfig()
    config.MAX_DIM = 1
    result = FixtureSuite(config).run_fixture(
        {'name': 'capped', 'check': FixtureSuite(config).check_twisted_three_braid, 'slow': False})
    assert result['status'] == 'undecided'


def test_broken_check_is_an_error(suite: FixtureSuite) -> None:
    def broken():
        raise RuntimeError("boom")

    result = suite.run_fixture({'name': 'broken', 'check': broken, 'slow': False})
    assert result['status'] == 'error'
    assert result['error'] == 'boom'


@pytest.mark.slow
def test_all_fixtures_pass() -> None:
    summary = verify_reference_fixtures(include_slow=True)
    assert summary['overall_status'] == 'passed', [r for r in summary['individual_results']
                                                   if r['status'] != 'passed']
    assert not summary['skipped_slow']
