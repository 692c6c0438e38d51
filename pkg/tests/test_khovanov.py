import json
from collections import Counter
from pathlib import Path

import numpy as np
import pytest

from transverse.braid import (BraidWord, component_count, conjugate, parse_braid, self_linking, stabilize_neg,
                              stabilize_pos)
from transverse.config import TransverseConfig
from transverse.errors import DiagramError, GradingMismatchError, ResourceLimitExceeded
from transverse.exactalg import CoefficientRing
from transverse.fixtures import CERTIFICATE_DIR
from transverse.khovanov import (ChainElement, Grading, KhovanovEngine, Labeling, PsiStatus, d_of, dump_certificate,
                                 homology_table, is_cycle, load_certificate, psi_prime_vanishes, psi_tilde,
                                 psi_tilde_prime, psi_vanishes, reduce_certificate, reduced_homology_table,
                                 verify_certificate)
from transverse.report import pretzel_word
from transverse.skeinstab import GradingBox, grading_support_bounds
from transverse.tangle import KauffmanState, from_braid

GF2 = CoefficientRing.GF2
Q = CoefficientRing.RATIONAL
Z = CoefficientRing.INTEGER

UNKNOT = BraidWord(1)
TWISTED_THREE_BRAID = "1 2 2 1 (-2)^3"
PALINDROME_FOUR_BRAID = "1 2 3 3 2 1 (-3)^3"


def assert_d_squared_vanishes(w: BraidWord, ring: CoefficientRing, reduced: bool = False) -> None:
    engine = KhovanovEngine(from_braid(w), reduced=reduced)
    for i in range(-engine.n_minus, engine.n_plus - 1):
        for j in engine.column_gradings(i):
            first = engine.differential(i, j, ring).to_dense()
            second = engine.differential(i + 1, j, ring).to_dense()
            if first.size == 0 or second.size == 0:
                continue
            product = second.dot(first)
            assert all(ring.normalize(v) == 0 for v in product.flat), (str(w), i, j)


# -- chain groups ------------------------------------------------------------

def test_unknot_chain_group() -> None:
    engine = KhovanovEngine(from_braid(UNKNOT))
    assert len(engine.basis(0, 1)) == 1
    assert len(engine.basis(0, -1)) == 1
    assert engine.basis(0, 3) == []


def test_single_crossing_labelings_split_by_quantum_grading() -> None:
    engine = KhovanovEngine(from_braid(BraidWord(2, (1,))))
    sizes = Counter({j: len(engine.basis(0, j)) for j in engine.column_gradings(0)})
    assert sizes == Counter({-1: 1, 1: 2, 3: 1})


def test_graded_piece_counts_states_by_popcount() -> None:
    engine = KhovanovEngine(from_braid(parse_braid("FT (-3)^2", 4)))
    masks = {mask for j in engine.column_gradings(0) for mask, _ in engine.basis(0, j)}
    assert len(masks) == 91


def test_resource_cap_is_reported() -> None:
    config = TransverseConfig()
    config.MAX_DIM = 1
    with pytest.raises(ResourceLimitExceeded):
        psi_vanishes(parse_braid("FT (-2)^5", 3), Z, config)


# -- differential ------------------------------------------------------------

@pytest.mark.parametrize("ring", list(CoefficientRing))
def test_d_squared_on_trefoil(ring: CoefficientRing) -> None:
    assert_d_squared_vanishes(BraidWord(2, (1, 1, 1)), ring)


def test_d_squared_on_random_words(random_words) -> None:
    rings = list(CoefficientRing)
    for n, w in enumerate(random_words(200, 4, 7)):
        assert_d_squared_vanishes(w, rings[n % 3])


def test_reduced_d_squared_on_random_words(random_words) -> None:
    for w in random_words(40, 3, 7):
        assert_d_squared_vanishes(w, GF2, reduced=True)


def test_d_squared_below_psi_on_twelve_crossing_words(random_words) -> None:
    for w in random_words(50, 4, 12, min_letters=9):
        engine = KhovanovEngine(from_braid(w))
        for mask, label in engine.basis(-1, self_linking(w))[:200]:
            x = engine.element(Z, {(mask, label): 1})
            assert engine.apply(engine.apply(x)).is_zero(), str(w)


@pytest.mark.slow
def test_d_squared_on_larger_random_words(random_words) -> None:
    rings = list(CoefficientRing)
    for n, w in enumerate(random_words(200, 4, 12, min_letters=8)):
        assert_d_squared_vanishes(w, rings[n % 3])


def test_merge_of_two_plus_circles_is_nonzero() -> None:
    D = from_braid(BraidWord(2, (1,)))
    x = ChainElement(D, Z, {(KauffmanState.from_string("0"), Labeling.from_string("++")): 1})
    assert not is_cycle(x)
    image = d_of(x)
    assert list(image.terms.values()) == [1]
    (state, labeling), = image.terms
    assert str(state) == "1" and str(labeling) == "+"


def test_zero_element_is_cycle() -> None:
    assert is_cycle(ChainElement(from_braid(BraidWord(2, (1,))), Z))


def test_labeling_must_match_circles() -> None:
    engine = KhovanovEngine(from_braid(BraidWord(2, (1,))))
    with pytest.raises(DiagramError):
        engine.to_generator(KauffmanState.from_string("0"), Labeling.from_string("+"))


# -- psi-tilde ---------------------------------------------------------------

def test_psi_tilde_gradings() -> None:
    unknot = psi_tilde(UNKNOT)
    assert KhovanovEngine(unknot.diagram).homogeneous_grading(unknot) == Grading(0, -1)
    w = parse_braid("FT (-2)^5", 3)
    psi = psi_tilde(w)
    grading = KhovanovEngine(psi.diagram).homogeneous_grading(psi)
    assert (grading.i, grading.j) == (0, -2)
    assert grading.j == self_linking(w)


def test_psi_tilde_of_positive_word() -> None:
    psi = psi_tilde(parse_braid("1 2 1 2", 3))
    (state, labeling), = psi.terms
    assert str(state) == "0000"
    assert str(labeling) == "---"


def test_psi_tilde_is_a_cycle(random_words) -> None:
    for w in random_words(50, 4, 10):
        assert is_cycle(psi_tilde(w))
        assert is_cycle(psi_tilde_prime(w))


# -- homology ----------------------------------------------------------------

def test_unknot_homology() -> None:
    table = homology_table(from_braid(UNKNOT), Q)
    assert table.support() == [(0, -1), (0, 1)]
    reduced = reduced_homology_table(from_braid(UNKNOT))
    assert reduced.support() == [(0, 0)]


def test_hopf_link_homology_over_rationals() -> None:
    table = homology_table(from_braid(BraidWord(2, (1, 1))), Q)
    assert table.support() == [(0, 0), (0, 2), (2, 4), (2, 6)]
    assert all(table.rank(i, j) == 1 for i, j in table.support())


def test_trefoil_homology_has_torsion_over_integers() -> None:
    table = homology_table(from_braid(BraidWord(2, (1, 1, 1))), Z)
    assert table.rank(0, 1) == 1 and table.rank(0, 3) == 1
    assert table.rank(2, 5) == 1 and table.rank(3, 9) == 1
    assert table.torsion.get((3, 7)) == [2]


def test_reduced_rank_is_half_of_unreduced_over_gf2() -> None:
    D = from_braid(BraidWord(2, (1, 1, 1)))
    full = homology_table(D, GF2)
    reduced = reduced_homology_table(D)
    assert sum(full.ranks.values()) == 2 * sum(reduced.ranks.values())


def test_reduced_theory_rejects_other_rings() -> None:
    engine = KhovanovEngine(from_braid(UNKNOT), reduced=True)
    with pytest.raises(ValueError):
        engine.homology_table(Z)


def test_pretzel_degree_zero_support() -> None:
    D = from_braid(pretzel_word(2))
    table = KhovanovEngine(D).homology_table(Z, GradingBox(0, 0, -40, 40))
    assert table.column_support(0) == [-11, -9]


def test_homology_stays_inside_support_box(random_words) -> None:
    for w in random_words(15, 3, 7):
        D = from_braid(w)
        box = grading_support_bounds(D)
        assert all(box.contains(i, j) for i, j in homology_table(D, GF2).support())


# -- verdicts ----------------------------------------------------------------

@pytest.mark.parametrize("text,strands", [(TWISTED_THREE_BRAID, 3), (PALINDROME_FOUR_BRAID, 4)])
def test_psi_vanishes_with_certificate(text: str, strands: int) -> None:
    w = parse_braid(text, strands)
    verdict = psi_vanishes(w, Z)
    assert verdict.status is PsiStatus.ZERO
    assert verdict.certificate is not None
    assert verify_certificate(w, verdict.certificate)
    assert verdict.to_dict()['grading'] == {'i': 0, 'j': self_linking(w)}


@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_psi_survives_on_baldwin_family(k: int) -> None:
    w = parse_braid(f"FT 1 (-2)^{k}", 3)
    for ring in CoefficientRing:
        verdict = psi_vanishes(w, ring)
        assert verdict.status is PsiStatus.NONZERO
        assert verdict.certificate is None
    assert psi_prime_vanishes(w).status is PsiStatus.NONZERO


@pytest.mark.slow
@pytest.mark.parametrize("k", range(4, 9))
def test_psi_survives_on_longer_baldwin_family(k: int) -> None:
    w = parse_braid(f"FT 1 (-2)^{k}", 3)
    for ring in CoefficientRing:
        assert psi_vanishes(w, ring).status is PsiStatus.NONZERO
    assert psi_prime_vanishes(w).status is PsiStatus.NONZERO


@pytest.mark.slow
def test_reduced_psi_survives_on_twisted_four_braid() -> None:
    verdict = psi_prime_vanishes(parse_braid("FT (-3)^9", 4))
    assert verdict.status is PsiStatus.NONZERO


def test_psi_prime_on_twisted_three_braid() -> None:
    w = parse_braid(TWISTED_THREE_BRAID, 3)
    verdict = psi_prime_vanishes(w)
    assert verdict.status is PsiStatus.ZERO
    assert verdict.reduced
    assert verify_certificate(w, verdict.certificate)


def test_verdict_invariant_under_conjugation_and_stabilization(random_words, rng: np.random.Generator) -> None:
    for w in random_words(50, 3, 6):
        status = psi_vanishes(w, GF2).status
        g = int(rng.choice([-2, -1, 1, 2]))
        assert psi_vanishes(conjugate(w, g), GF2).status is status
        assert psi_vanishes(stabilize_pos(w), GF2).status is status


def test_negative_stabilization_kills_psi(random_words) -> None:
    for w in random_words(10, 3, 6):
        assert psi_vanishes(stabilize_neg(w), GF2).vanishes, str(w)


def test_deleting_positive_letters_from_known_zero_words() -> None:
    for text, strands in ((TWISTED_THREE_BRAID, 3), (PALINDROME_FOUR_BRAID, 4)):
        w = parse_braid(text, strands)
        assert psi_vanishes(w, GF2).vanishes
        for position, letter in enumerate(w.letters):
            if letter < 0:
                continue
            shorter = BraidWord(strands, w.letters[:position] + w.letters[position + 1:])
            assert psi_vanishes(shorter, GF2).vanishes, (text, position)


def test_deleting_positive_letters_keeps_zero_verdict(random_words) -> None:
    for w in random_words(50, 3, 7):
        if not psi_vanishes(w, GF2).vanishes:
            w = stabilize_neg(w)
        assert psi_vanishes(w, GF2).vanishes, str(w)
        for position, letter in enumerate(w.letters):
            if letter < 0:
                continue
            shorter = BraidWord(w.strands, w.letters[:position] + w.letters[position + 1:])
            assert psi_vanishes(shorter, GF2).vanishes, (str(w), position)


def test_psi_prime_independent_of_marked_strand(random_words) -> None:
    knots = [w for w in random_words(120, 3, 8) if component_count(w) == 1][:20]
    assert knots
    for w in knots:
        statuses = {psi_prime_vanishes(w, marked).status for marked in range(1, w.strands + 1)}
        assert len(statuses) == 1, str(w)


# -- certificates ------------------------------------------------------------

@pytest.mark.parametrize("name", ["positive-writhe-b4", "positive-writhe-b5", "positive-writhe-b6"])
def test_recorded_certificates_verify(name: str) -> None:
    word, phi = load_certificate(CERTIFICATE_DIR / f"{name}.json")
    assert word is not None
    assert verify_certificate(word, phi)


def test_zero_element_is_not_a_certificate() -> None:
    w = parse_braid(TWISTED_THREE_BRAID, 3)
    assert not verify_certificate(w, ChainElement(from_braid(w), Z))


def test_tampered_certificate_is_rejected() -> None:
    w = parse_braid(TWISTED_THREE_BRAID, 3)
    phi = psi_vanishes(w, Z).certificate
    tampered = ChainElement(phi.diagram, Z, {key: 2 * value for key, value in phi.terms.items()})
    assert not verify_certificate(w, tampered)


def test_certificate_in_wrong_grading_raises() -> None:
    w = parse_braid("1 1", 2)
    x = ChainElement(from_braid(w), Z, {(KauffmanState.from_string("00"), Labeling.from_string("--")): 1})
    with pytest.raises(GradingMismatchError):
        verify_certificate(w, x)


def test_integer_certificate_reduces_to_other_rings() -> None:
    w = parse_braid(TWISTED_THREE_BRAID, 3)
    phi = psi_vanishes(w, Z).certificate
    assert verify_certificate(w, reduce_certificate(phi, Q))
    assert verify_certificate(w, reduce_certificate(phi, GF2))


def test_dumped_certificate_loads_back(tmp_path: Path) -> None:
    w = parse_braid(TWISTED_THREE_BRAID, 3)
    phi = psi_vanishes(w, Z).certificate
    path = dump_certificate(phi, tmp_path / "cert.json", word=w, name="twisted")
    word, loaded = load_certificate(path)
    assert word == w
    assert loaded.same_terms(phi)


def test_certificate_with_other_sign_convention_is_refused(tmp_path: Path) -> None:
    payload = json.loads((CERTIFICATE_DIR / "positive-writhe-b4.json").read_text())
    payload['sign_convention'] = 'ones-after'
    path = tmp_path / "other.json"
    path.write_text(json.dumps(payload))
    with pytest.raises(DiagramError):
        load_certificate(path)
