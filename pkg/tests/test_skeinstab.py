import pytest

from transverse.braid import BraidWord, full_twist, parse_braid
from transverse.config import TransverseConfig
from transverse.errors import DiagramError
from transverse.exactalg import CoefficientRing
from transverse.khovanov import (PsiStatus, psi_prime_vanishes, psi_vanishes, reduced_homology_table,
                                 verify_certificate)
from transverse.skeinstab import (GradingBox, TwistPeeler, grading_support_bounds, les_shift_data,
                                  les_window_is_iso, lift_certificate, peeled_psi_verdict, stability_threshold,
                                  state_estimate, sub_twist_shape)
from transverse.tangle import TangleDiagram, from_braid, khovanov_resolution, simplify


def twisted_four_braid(k: int) -> TangleDiagram:
    return from_braid(parse_braid(f"FT (-3)^{k}", 4))


# -- grading bounds ----------------------------------------------------------

def test_unknot_bounds() -> None:
    assert grading_support_bounds(from_braid(BraidWord(1))) == GradingBox(0, 0, -1, 1)


def test_positive_trefoil_bounds() -> None:
    box = grading_support_bounds(from_braid(BraidWord(2, (1, 1, 1))))
    assert (box.i_min, box.i_max) == (0, 3)
    assert (box.j_min, box.j_max) == (1, 9)


def test_reduced_bounds_are_shifted_inwards() -> None:
    D = from_braid(BraidWord(2, (1, 1, 1)))
    full, reduced = grading_support_bounds(D), grading_support_bounds(D, reduced=True)
    assert reduced.j_min == full.j_min + 1
    assert reduced.j_max == full.j_max - 1


@pytest.mark.parametrize("k", [2, 5])
def test_zero_resolution_bounds(k: int) -> None:
    D = twisted_four_braid(k)
    box = grading_support_bounds(khovanov_resolution(D, D.n_crossings - 1, 0))
    assert box.i_min == -6
    assert box.i_max == k + 5


# -- exact sequence ----------------------------------------------------------

@pytest.mark.parametrize("k", [2, 7, 12])
def test_shift_at_last_negative_crossing(k: int) -> None:
    D = twisted_four_braid(k)
    data = les_shift_data(D, D.n_crossings - 1)
    assert data.sign == -1
    assert data.u == 6 - k
    assert data.flank_resolution == 'D0'
    assert data.d1.tiles == twisted_four_braid(k - 1).tiles


def test_flanking_columns_at_negative_crossing() -> None:
    k = 10
    D = twisted_four_braid(k)
    data = les_shift_data(D, D.n_crossings - 1)
    previous, target = data.flanking(0, 9 - k)
    assert (previous.i, target.i) == (k - 7, k - 6)
    assert previous.j == target.j == 2 * k - 10
    middle = [c for c in data.corners(0, 9 - k) if c.label == 'middle'][0]
    assert (middle.resolution, middle.i, middle.j) == ('D', 0, 9 - k)


def test_shift_data_rejects_bad_crossing() -> None:
    with pytest.raises(ValueError):
        les_shift_data(from_braid(BraidWord(2, (1,))), 3)


def test_window_check_needs_a_crossing() -> None:
    check = les_window_is_iso(from_braid(BraidWord(2)), 0, 0, 0)
    assert not check.is_iso


@pytest.mark.parametrize("k", [10, pytest.param(11, marks=pytest.mark.slow),
                               pytest.param(12, marks=pytest.mark.slow),
                               pytest.param(13, marks=pytest.mark.slow),
                               pytest.param(14, marks=pytest.mark.slow)])
def test_window_is_iso_past_the_base_case(k: int) -> None:
    D = twisted_four_braid(k)
    check = les_window_is_iso(D, D.n_crossings - 1, 0, 9 - k)
    assert check.is_iso, check.to_dict()
    assert check.columns == (k - 7, k - 6)
    assert check.u == 6 - k


def test_window_is_not_iso_at_the_base_case() -> None:
    k = 9
    D = twisted_four_braid(k)
    check = les_window_is_iso(D, D.n_crossings - 1, 0, 9 - k)
    assert not check.is_iso
    assert 2 in check.details['nonzero_columns']


@pytest.mark.parametrize("ring,computed_in", [(CoefficientRing.GF2, 'reduced gf2'),
                                              (CoefficientRing.RATIONAL, 'reduced gf2'),
                                              (CoefficientRing.INTEGER, 'unreduced z')])
def test_window_check_records_its_ring(ring: CoefficientRing, computed_in: str) -> None:
    k = 9
    D = twisted_four_braid(k)
    check = les_window_is_iso(D, D.n_crossings - 1, 0, 9 - k, ring=ring)
    assert not check.is_iso
    assert check.details['ring'] == ring.value
    assert check.details['computed_in'] == computed_in
    assert ring.value in check.reason
    assert 2 in check.details['nonzero_columns']


@pytest.mark.slow
@pytest.mark.parametrize("k", [2, 3])
def test_reduced_homology_of_zero_resolution(k: int) -> None:
    D = twisted_four_braid(k)
    D0 = simplify(khovanov_resolution(D, D.n_crossings - 1, 0))
    table = reduced_homology_table(D0)
    assert table.support() == [(0, 0), (0, 2), (2, 4), (2, 6)]


# -- stability ---------------------------------------------------------------

def test_threshold_counts_opposite_crossings() -> None:
    assert stability_threshold(BraidWord(4, (1,) * 7), 3, 1, -1).threshold == 2
    assert stability_threshold(BraidWord(4, (-1,) * 5), 3, 1, -1).threshold == 0
    assert stability_threshold(BraidWord(4, (-1,) * 5), 2, 1, 1).threshold == 2


def test_full_twist_base_with_negative_sub_twist() -> None:
    report = stability_threshold(full_twist(4), 2, 2, -1)
    assert report.threshold == 6
    assert report.first_stable_copies == 7
    assert report.first_stable_parameter(1) == 14
    assert report.to_dict()['letter_condition'] == "rows > 12"


def test_small_base_threshold() -> None:
    report = stability_threshold(parse_braid("1 1", 3), 2, 2, -1)
    assert report.threshold == 1
    assert report.first_stable_parameter(1) == 4
    assert report.first_stable_parameter(3) == 2


@pytest.mark.parametrize("a,i,sign", [(1, 1, -1), (4, 1, -1), (3, 3, -1), (2, 0, -1), (2, 1, 0)])
def test_threshold_rejects_bad_shapes(a: int, i: int, sign: int) -> None:
    with pytest.raises(ValueError):
        stability_threshold(BraidWord(4, (1, 2, 3)), a, i, sign)


@pytest.mark.parametrize("letters,shape", [
    ((-2,), (2, 2, -1, 1)),
    ((-2, -3, -2, -3), (3, 2, -1, 2)),
    ((1, 2, 3), (4, 1, 1, 1)),
    ((-3, -3, -3), (2, 3, -1, 3)),
])
def test_sub_twist_shape(letters: tuple, shape: tuple) -> None:
    assert sub_twist_shape(BraidWord(4, letters)) == shape


@pytest.mark.parametrize("letters", [(), (1, -2), (1, 3), (2, 3, 2)])
def test_sub_twist_shape_rejects_other_inserts(letters: tuple) -> None:
    assert sub_twist_shape(BraidWord(4, letters)) is None


def test_verdict_constant_past_threshold() -> None:
    """Past the threshold the psi verdict no longer depends on the twist count"""
    base = parse_braid("1 1", 3)
    start = stability_threshold(base, 2, 2, -1).first_stable_parameter(1)
    statuses = {psi_vanishes(parse_braid(f"1 1 (-2)^{k}", 3), CoefficientRing.GF2).status
                for k in range(start, start + 5, 2)}
    assert len(statuses) == 1


# -- twist peeling -----------------------------------------------------------

def small_peel_config() -> TransverseConfig:
    config = TransverseConfig()
    config.PEEL_STATE_LIMIT = 1
    return config


def test_state_estimate_counts_states_near_psi() -> None:
    assert state_estimate(parse_braid("FT (-2)^9", 4)) == 203490 + 293930
    assert state_estimate(BraidWord(3, (1, 2))) == 1
    assert state_estimate(BraidWord(3)) == 1


def test_prefixes_stop_at_a_positive_letter() -> None:
    chain = TwistPeeler(small_peel_config()).prefixes(parse_braid("1 1 (-2)^3", 3))
    assert [len(w) for w in chain] == [5, 4, 3, 2]
    assert chain[-1].letters == (1, 1)


def test_prefixes_keep_cheap_words_whole() -> None:
    w = parse_braid("FT (-2)^3", 3)
    assert TwistPeeler().prefixes(w) == [w]


def test_lifted_certificate_verifies_on_longer_word() -> None:
    prefix = parse_braid("1 2 2 1 (-2)^3", 3)
    w = parse_braid("1 2 2 1 (-2)^4", 3)
    phi = lift_certificate(psi_vanishes(prefix, CoefficientRing.INTEGER).certificate, w)
    assert verify_certificate(w, phi)
    reduced = lift_certificate(psi_prime_vanishes(prefix).certificate, w)
    assert reduced.reduced
    assert verify_certificate(w, reduced)


def test_lift_needs_a_trailing_negative_letter() -> None:
    prefix = parse_braid("1 2 2 1 (-2)^3", 3)
    phi = psi_vanishes(prefix, CoefficientRing.INTEGER).certificate
    with pytest.raises(DiagramError):
        lift_certificate(phi, parse_braid("1 2 2 1 (-2)^3 1", 3))


@pytest.mark.parametrize("text", ["FT 1 (-2)^3", "1 2 2 1 (-2)^3", "1 2 2 1 (-2)^5", "1 1 (-2)^4"])
@pytest.mark.parametrize("ring", list(CoefficientRing))
def test_peeled_verdict_matches_direct_solve(text: str, ring: CoefficientRing) -> None:
    w = parse_braid(text, 3)
    config = small_peel_config()
    peeled = peeled_psi_verdict(w, ring, config)
    direct = psi_vanishes(w, ring)
    assert peeled.status is direct.status
    assert peeled.grading == direct.grading
    if peeled.vanishes:
        assert verify_certificate(w, peeled.certificate)


@pytest.mark.parametrize("text", ["FT 1 (-2)^3", "1 2 2 1 (-2)^5"])
def test_peeled_reduced_verdict_matches_direct_solve(text: str) -> None:
    w = parse_braid(text, 3)
    peeled = peeled_psi_verdict(w, CoefficientRing.GF2, small_peel_config(), reduced=True)
    assert peeled.status is psi_prime_vanishes(w).status
    assert peeled.reduced
    if peeled.vanishes:
        assert verify_certificate(w, peeled.certificate)


def test_peeler_records_each_step() -> None:
    peeler = TwistPeeler(small_peel_config())
    verdict = peeler.decide(parse_braid("1 2 2 1 (-2)^5", 3), CoefficientRing.GF2)
    assert verdict.status is PsiStatus.ZERO
    assert [step.word for step in peeler.steps][0] == "1 2 2 1"
    assert peeler.steps[0].method == 'direct'
    assert peeler.steps[-1].method == 'lifted from prefix'
    assert len(peeler.steps) == 6


def test_reduced_peeling_is_gf2_only() -> None:
    with pytest.raises(ValueError):
        peeled_psi_verdict(parse_braid("FT (-2)^3", 3), CoefficientRing.INTEGER, reduced=True)


@pytest.mark.slow
@pytest.mark.parametrize("m", [7, 8, 9])
def test_long_four_braid_twists_are_decided(m: int) -> None:
    w = parse_braid(f"FT (-2)^{2 * m}", 4)
    assert state_estimate(w) > TransverseConfig.PEEL_STATE_LIMIT
    peeler = TwistPeeler()
    verdict = peeler.decide(w, CoefficientRing.GF2)
    assert verdict.status is PsiStatus.NONZERO
    assert len(peeler.steps) > 1
