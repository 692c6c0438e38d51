import pytest

from transverse.braid import BraidWord, conjugate, parse_braid, stabilize_neg, stabilize_pos
from transverse.config import TransverseConfig
from transverse.errors import ResourceLimitExceeded
from transverse.fixtures import PRETZEL_2_5_5_HOMFLY
from transverse.homfly import (A, A_INV, DELTA, Z, HomflyEngine, LaurentPoly2, ObstructionVerdict, a_degree,
                               homfly, msl_upper_bound, pretzel_support_formula, top_a_coefficients, torus_homfly,
                               whole_link_psi_obstruction)
from transverse.report import pretzel_word
from transverse.tangle import DOWN, UP, TangleDiagram, Tile, from_braid


def skein_holds(w: BraidWord, position: int) -> bool:
    """a P+ - a^-1 P- = z P0 at one letter of w"""
    letters = list(w.letters)
    plus, minus = list(letters), list(letters)
    plus[position], minus[position] = abs(letters[position]), -abs(letters[position])
    smoothed = letters[:position] + letters[position + 1:]
    return (A * homfly(BraidWord(w.strands, tuple(plus)))
            - A_INV * homfly(BraidWord(w.strands, tuple(minus)))
            == Z * homfly(BraidWord(w.strands, tuple(smoothed))))


# -- polynomials -------------------------------------------------------------

def test_laurent_arithmetic() -> None:
    assert (A + A_INV) * (A - A_INV) == A ** 2 - A ** -2
    assert A * A_INV == LaurentPoly2.one()
    assert (A - A).is_zero()
    assert 3 * Z == LaurentPoly2.monomial(0, 1, 3)
    assert (Z ** 3).coefficient(0, 3) == 1
    with pytest.raises(ValueError):
        (A + Z) ** -1


def test_laurent_text_and_json() -> None:
    assert str(A + A_INV) == "a^-1 + a"
    assert str(DELTA) == "-a^-1*z^-1 + a*z^-1"
    assert str(LaurentPoly2()) == "0"
    assert str(LaurentPoly2.monomial(2, 0, -3)) == "-3*a^2"
    P = LaurentPoly2.from_terms(PRETZEL_2_5_5_HOMFLY)
    assert LaurentPoly2.from_json(P.to_json()) == P


def test_terms_drop_zero_coefficients() -> None:
    assert LaurentPoly2.from_terms([(1, 0, 2), (1, 0, -2)]).is_zero()
    assert LaurentPoly2({(0, 0): 0}) == LaurentPoly2()


# -- braid closures ----------------------------------------------------------

def test_unknot_and_unlink() -> None:
    assert homfly(BraidWord(1)) == LaurentPoly2.one()
    assert homfly(BraidWord(2)) == DELTA
    assert homfly(BraidWord(3)) == DELTA ** 2
    assert homfly(BraidWord(3, (1, -2))) == LaurentPoly2.one()


def test_negative_hopf_link() -> None:
    P = homfly(BraidWord(2, (-1, -1)))
    assert P == LaurentPoly2.from_terms([(3, -1, 1), (1, -1, -1), (1, 1, -1)])
    assert top_a_coefficients(P) == [1]


def test_negative_trefoil() -> None:
    P = homfly(BraidWord(2, (-1, -1, -1)))
    assert P == LaurentPoly2.from_terms([(2, 0, 2), (4, 0, -1), (2, 2, 1)])
    assert a_degree(P) == 4
    assert msl_upper_bound(P) == -5


@pytest.mark.parametrize("q", range(2, 10))
def test_torus_recursion_matches_skein_tree(q: int) -> None:
    P = torus_homfly(q)
    assert P == homfly(BraidWord(2, (-1,) * q))
    assert a_degree(P) == q + 1


def test_torus_recursion_rejects_small_parameter() -> None:
    with pytest.raises(ValueError):
        torus_homfly(1)


def test_skein_relation_on_random_words(random_words) -> None:
    for w in random_words(15, 3, 7):
        assert skein_holds(w, len(w) // 2), str(w)


def test_markov_invariance(random_words, rng) -> None:
    for w in random_words(50, 3, 7):
        P = homfly(w)
        g = int(rng.choice([-2, -1, 1, 2]))
        assert homfly(conjugate(w, g)) == P
        assert homfly(stabilize_pos(w)) == P
        assert homfly(stabilize_neg(w)) == P


def test_pretzel_polynomial() -> None:
    P = homfly(pretzel_word(2))
    assert P == LaurentPoly2.from_terms(PRETZEL_2_5_5_HOMFLY)
    assert len(P.terms) == 14
    assert a_degree(P) == 14
    assert msl_upper_bound(P) == -15


@pytest.mark.slow
def test_larger_pretzel_degree() -> None:
    assert a_degree(homfly(pretzel_word(4))) == pretzel_support_formula(4, 5)[1]


def test_node_limit_is_reported() -> None:
    config = TransverseConfig()
    config.HOMFLY_NODE_LIMIT = 1
    with pytest.raises(ResourceLimitExceeded):
        HomflyEngine(config).homfly(BraidWord(2, (1, 1, 1)))


def test_memo_is_shared_within_an_engine() -> None:
    engine = HomflyEngine()
    first = engine.homfly(BraidWord(2, (-1,) * 5))
    nodes = engine.nodes
    assert engine.homfly(BraidWord(2, (-1,) * 5)) == first
    assert engine.nodes == nodes


def test_every_node_verified_when_sampling_everything() -> None:
    config = TransverseConfig()
    config.HOMFLY_VERIFY_FRACTION = 1.0
    engine = HomflyEngine(config)
    engine.homfly(parse_braid("1 -2 1 -2 1", 3))
    assert engine.verified > 0


# -- tile diagrams -----------------------------------------------------------

def test_kink_diagram_is_unknot() -> None:
    assert homfly(TangleDiagram(2, (Tile.crossing(1, 1), Tile.capcup(1)))) == LaurentPoly2.one()


def test_reversing_a_knot_keeps_polynomial() -> None:
    D = from_braid(parse_braid("1 -2 1 -2", 3))
    assert homfly(D.with_orientations((UP,))) == homfly(D)


def test_reversing_one_hopf_component() -> None:
    D = from_braid(BraidWord(2, (1, 1))).with_orientations((DOWN, UP))
    assert homfly(D) == homfly(BraidWord(2, (-1, -1)))


# -- whole-link obstruction --------------------------------------------------

def test_pretzel_support_formula() -> None:
    assert pretzel_support_formula(2, 5) == ((-11, -9), 14)
    assert pretzel_support_formula(4, 5) == ((-11, -9), 16)
    assert pretzel_support_formula(2, 3) == ((-7, -5), 10)
    for r, q in ((3, 5), (0, 5), (2, 4), (2, -1)):
        with pytest.raises(ValueError):
            pretzel_support_formula(r, q)


def test_pretzel_whole_link_obstruction() -> None:
    result = whole_link_psi_obstruction(pretzel_word(2))
    assert result.verdict is ObstructionVerdict.ALL_REPRESENTATIVES_VANISH
    assert result.support == [-11, -9]
    assert result.bound == -15
    assert result.to_dict()['bound_source'] == 'homfly'
    assert result.to_dict()['deg_a'] == 14


def test_external_bound_skips_polynomial() -> None:
    result = whole_link_psi_obstruction(pretzel_word(2), msl_bound=-15)
    assert result.bound_source == 'external'
    assert result.deg_a is None
    assert result.verdict is ObstructionVerdict.ALL_REPRESENTATIVES_VANISH


def test_unknot_obstruction_is_inconclusive() -> None:
    result = whole_link_psi_obstruction(BraidWord(1))
    assert result.verdict is ObstructionVerdict.INCONCLUSIVE
    assert result.support == [-1, 1]
    assert result.bound == -1
