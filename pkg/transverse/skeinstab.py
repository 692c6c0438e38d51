#!/usr/bin/env python3
"""
Skein Exact Sequences and Stability
Grading-support bounds, long-exact-sequence window checks, twist peeling and sub-full-twist thresholds
"""

import logging
import time
from dataclasses import dataclass, field
from math import comb
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .braid import BraidWord, format_braid, self_linking
from .config import TransverseConfig
from .errors import DiagramError, TransverseError
from .exactalg import CoefficientRing
from .khovanov import (ChainElement, Grading, KhovanovEngine, PsiStatus, PsiVerdict, psi_prime_vanishes,
                       psi_vanishes, verify_certificate)
from .tangle import KauffmanState, TangleDiagram, from_braid, khovanov_resolution, simplify


@dataclass(frozen=True)
class GradingBox:
    i_min: int
    i_max: int
    j_min: int
    j_max: int

    def contains(self, i: int, j: int) -> bool:
        return self.i_min <= i <= self.i_max and self.j_min <= j <= self.j_max

    def to_dict(self) -> Dict[str, int]:
        return {'i_min': self.i_min, 'i_max': self.i_max, 'j_min': self.j_min, 'j_max': self.j_max}


def grading_support_bounds(D: TangleDiagram, reduced: bool = False) -> GradingBox:
    """
    Box outside which Kh(D) vanishes

    i lies in [-n_-, n_+] and j in [n_+ - 2 n_- - |s_0|, |s_1| + 2 n_+ - n_-],
    s_0 and s_1 being the all-0 and all-1 states. Reduced gradings drop the
    extreme v- labelling and carry the -1 quantum shift.
    """
    n_plus, n_minus = D.n_plus, D.n_minus
    s0 = D.arc_circles(0)[0]
    s1 = D.arc_circles((1 << D.n_crossings) - 1)[0]
    j_min = n_plus - 2 * n_minus - s0
    j_max = s1 + 2 * n_plus - n_minus
    if reduced:
        j_min, j_max = j_min + 1, j_max - 1
    return GradingBox(-n_minus, n_plus, j_min, j_max)


@dataclass(frozen=True)
class LesCorner:
    label: str
    resolution: str  # 'D', 'D0' or 'D1'
    i: int
    j: int


@dataclass(frozen=True)
class LesShiftData:
    """Grading bookkeeping of the skein exact sequence at one crossing"""

    crossing: int
    sign: int
    u: int
    d0: TangleDiagram
    d1: TangleDiagram

    @property
    def flank_resolution(self) -> str:
        return 'D0' if self.sign < 0 else 'D1'

    @property
    def iso_resolution(self) -> str:
        return 'D1' if self.sign < 0 else 'D0'

    def flank_diagram(self) -> TangleDiagram:
        return self.d0 if self.sign < 0 else self.d1

    def corners(self, i: int, j: int) -> List[LesCorner]:
        """Five consecutive groups of the sequence centred on Kh^i_j(D)"""
        u = self.u
        if self.sign < 0:
            return [
                LesCorner('previous', 'D0', i - 1 - u, j - 3 * u - 1),
                LesCorner('source', 'D1', i, j + 1),
                LesCorner('middle', 'D', i, j),
                LesCorner('target', 'D0', i - u, j - 3 * u - 1),
                LesCorner('next', 'D1', i + 1, j + 1),
            ]
        return [
            LesCorner('previous', 'D0', i - 1, j - 1),
            LesCorner('source', 'D1', i - u - 1, j - 3 * u - 2),
            LesCorner('middle', 'D', i, j),
            LesCorner('target', 'D0', i, j - 1),
            LesCorner('next', 'D1', i - u, j - 3 * u - 2),
        ]

    def flanking(self, i: int, j: int) -> Tuple[LesCorner, LesCorner]:
        """The two groups whose vanishing makes the map at Kh^i_j(D) an isomorphism"""
        flank = [c for c in self.corners(i, j) if c.resolution == self.flank_resolution]
        return flank[0], flank[1]

    def to_dict(self) -> Dict[str, Any]:
        return {'crossing': self.crossing, 'sign': self.sign, 'u': self.u,
                'n_minus_d0': self.d0.n_minus, 'n_minus_d1': self.d1.n_minus}


def les_shift_data(D: TangleDiagram, c: int,
                   orientation: Optional[Sequence[int]] = None) -> LesShiftData:
    """
    Resolve crossing c both ways and record the shift u

    The oriented resolution inherits the orientation of D; the other one
    takes ``orientation`` when given, otherwise directions are carried over
    from D at each new component's basepoint.

    Args:
        D: Oriented diagram
        c: Crossing position among crossing tiles
        orientation: Flags for the non-oriented resolution

    Returns:
        LesShiftData with u = n_-(D0) - n_-(D) for negative crossings and
        u = n_-(D1) - n_-(D) for positive ones
    """
    if c < 0 or c >= D.n_crossings:
        raise DiagramError(f"crossing position {c} out of range 0..{D.n_crossings - 1}")
    sign = D.crossing_signs[c]
    if sign < 0:
        d1 = khovanov_resolution(D, c, 1)
        d0 = khovanov_resolution(D, c, 0, orientations=orientation)
        u = d0.n_minus - D.n_minus
    else:
        d0 = khovanov_resolution(D, c, 0)
        d1 = khovanov_resolution(D, c, 1, orientations=orientation)
        u = d1.n_minus - D.n_minus
    return LesShiftData(c, sign, u, d0, d1)


@dataclass
class IsoCheck:
    is_iso: bool
    reason: str
    columns: Tuple[int, ...] = ()
    u: Optional[int] = None
    details: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {'is_iso': self.is_iso, 'reason': self.reason, 'columns': list(self.columns),
                'u': self.u, 'details': self.details}


def _columns_outside(box: GradingBox, columns: Sequence[int]) -> bool:
    return all(col < box.i_min or col > box.i_max for col in columns)


def les_window_is_iso(D: TangleDiagram, c: int, i: int, j: int,
                      orientation: Optional[Sequence[int]] = None,
                      config: Optional[TransverseConfig] = None,
                      ring: CoefficientRing = CoefficientRing.GF2) -> IsoCheck:
    """
    Whether Kh^i_j(D) over ``ring`` is identified with its neighbour in the exact sequence

    The flanking groups are taken as whole homological columns of the
    flanking resolution. They are shown to vanish by grading bounds, then by
    grading bounds of the simplified resolution, and finally by computing
    those columns on the simplified diagram. Over GF2 and Q the columns are
    computed in reduced homology over GF2, whose vanishing bounds both; over
    Z they are computed in unreduced integral homology so odd torsion is seen.
    """
    if D.n_crossings == 0:
        return IsoCheck(False, 'diagram has no crossing', details={'ring': ring.value})

    data = les_shift_data(D, c, orientation)
    flank = data.flank_diagram()
    columns = tuple(sorted({corner.i for corner in data.flanking(i, j)}))
    details: Dict[str, Any] = {'flank_resolution': data.flank_resolution, 'sign': data.sign,
                               'ring': ring.value}

    box = grading_support_bounds(flank)
    details['bounds'] = box.to_dict()
    if _columns_outside(box, columns):
        return IsoCheck(True, 'grading bounds', columns, data.u, details)

    simplified = simplify(flank)
    simple_box = grading_support_bounds(simplified)
    details['simplified_crossings'] = simplified.n_crossings
    details['simplified_bounds'] = simple_box.to_dict()
    if _columns_outside(simple_box, columns):
        return IsoCheck(True, 'grading bounds after simplification', columns, data.u, details)

    if ring is CoefficientRing.INTEGER:
        engine = KhovanovEngine(simplified, config)
        table_ring = CoefficientRing.INTEGER
    else:
        engine = KhovanovEngine(simplified, config, reduced=True, marked=1)
        table_ring = CoefficientRing.GF2
    details['computed_in'] = f"{'reduced' if engine.reduced else 'unreduced'} {table_ring.value}"
    nonzero = {}
    for col in columns:
        if col < simple_box.i_min or col > simple_box.i_max:
            continue
        window = GradingBox(col, col, simple_box.j_min - 1, simple_box.j_max)
        support = engine.homology_table(table_ring, window).column_support(col)
        if support:
            nonzero[col] = support
    details['nonzero_columns'] = nonzero
    if nonzero:
        return IsoCheck(False, f'flanking column nonzero over {ring.value}', columns, data.u, details)
    return IsoCheck(True, f'flanking columns computed to vanish over {ring.value}', columns, data.u, details)


# -- twist peeling -------------------------------------------------------------

def state_estimate(w: BraidWord) -> int:
    """Kauffman states behind the two graded pieces around psi of the closure"""
    n, m = len(w), w.n_minus
    return comb(n, m) + (comb(n, m - 1) if m else 0)


def lift_certificate(phi: ChainElement, w: BraidWord) -> ChainElement:
    """
    Push a certificate of a prefix into the complex of w

    The states of w whose last crossing takes its 1-resolution form a
    subcomplex isomorphic to the complex of the prefix. That crossing is
    last, so no sign twist occurs, and circles keep their canonical numbers
    because each one still has its smallest segment above the removed tile.
    """
    if len(w) == 0 or w.letters[-1] > 0:
        raise DiagramError("lifting needs a word ending in a negative letter")
    terms = {(KauffmanState(state.bits + (1,)), labeling): value
             for (state, labeling), value in phi.terms.items()}
    return ChainElement(from_braid(w), phi.ring, terms, phi.reduced, phi.marked)


@dataclass
class PeelStep:
    word: str
    status: str
    method: str


class TwistPeeler:
    """
    Decides psi of long negative twists from shorter prefixes

    Trailing negative letters are peeled until the word is small enough to
    solve directly. Climbing back, a vanishing prefix lifts its certificate
    by inclusion, and a nonzero prefix stays nonzero whenever the group of
    the flat resolution preceding it in the exact sequence vanishes. A step
    where neither applies is solved directly.
    """

    def __init__(self, config: Optional[TransverseConfig] = None):
        self.config = config or TransverseConfig()
        self.logger = self._setup_logging()
        self.steps: List[PeelStep] = []

    def _setup_logging(self) -> logging.Logger:
        """Setup logging configuration"""
        logger = logging.getLogger(__name__)
        logger.setLevel(getattr(logging, self.config.LOG_LEVEL.upper()))

        if not logger.handlers:
            handler = logging.StreamHandler()
            formatter = logging.Formatter(self.config.LOG_FORMAT)
            handler.setFormatter(formatter)
            logger.addHandler(handler)

        return logger

    def prefixes(self, w: BraidWord) -> List[BraidWord]:
        """w followed by the prefixes peeled off it, shortest last"""
        chain = [w]
        while (state_estimate(chain[-1]) > self.config.PEEL_STATE_LIMIT
               and chain[-1].letters and chain[-1].letters[-1] < 0):
            chain.append(BraidWord(w.strands, chain[-1].letters[:-1]))
        return chain

    def _direct(self, w: BraidWord, ring: CoefficientRing, reduced: bool,
                marked: Optional[int]) -> PsiVerdict:
        if reduced:
            return psi_prime_vanishes(w, marked, self.config)
        return psi_vanishes(w, ring, self.config)

    def previous_group_vanishes(self, w: BraidWord, ring: CoefficientRing, reduced: bool,
                                marked: Optional[int]) -> bool:
        """Whether the flat-resolution group mapping onto psi of the prefix is zero"""
        D = from_braid(w)
        data = les_shift_data(D, D.n_crossings - 1)
        sl = self_linking(w)
        previous = data.corners(0, sl + 1 if reduced else sl)[0]
        flank = simplify(data.d0)
        if not grading_support_bounds(flank, reduced).contains(previous.i, previous.j):
            return True
        engine = KhovanovEngine(flank, self.config, reduced=reduced, marked=1 if reduced else None)
        free, torsion = engine.homology(previous.i, previous.j, ring)
        return free == 0 and not torsion

    def decide(self, w: BraidWord, ring: CoefficientRing = CoefficientRing.INTEGER,
               reduced: bool = False, marked: Optional[int] = None) -> PsiVerdict:
        """
        Decide psi (or reduced psi-prime) of w, peeling trailing negative letters

        Args:
            w: Braid word
            ring: Coefficient ring, GF2 for the reduced theory
            reduced: Decide psi-prime instead of psi
            marked: Marked strand of the reduced theory

        Returns:
            PsiVerdict for w itself; zero verdicts carry a certificate of w.
            ResourceLimitExceeded is raised when a direct solve is too large.
        """
        if reduced and ring is not CoefficientRing.GF2:
            raise ValueError("the reduced theory is defined over GF2 only")
        self.steps = []
        chain = self.prefixes(w)
        if len(chain) > 1:
            self.logger.info(f"🔄 Peeling {len(chain) - 1} negative letters off {format_braid(w)}")
        verdict = self._direct(chain[-1], ring, reduced, marked)
        self.steps.append(PeelStep(format_braid(chain[-1]), verdict.status.value, 'direct'))

        for word in reversed(chain[:-1]):
            start_time = time.time()
            grading = Grading(0, verdict.grading.j - 1)
            if verdict.vanishes:
                phi = lift_certificate(verdict.certificate, word)
                if not verify_certificate(word, phi, self.config):
                    raise TransverseError(f"lifted certificate of {format_braid(word)} failed verification")
                verdict = PsiVerdict(PsiStatus.ZERO, ring, grading, reduced, phi,
                                     duration=time.time() - start_time, method='lifted from prefix')
            elif self.previous_group_vanishes(word, ring, reduced, marked):
                verdict = PsiVerdict(PsiStatus.NONZERO, ring, grading, reduced,
                                     duration=time.time() - start_time, method='exact sequence')
            else:
                self.logger.info(f"📊 Exact sequence inconclusive at {format_braid(word)}, solving directly")
                verdict = self._direct(word, ring, reduced, marked)
            self.steps.append(PeelStep(format_braid(word), verdict.status.value, verdict.method))

        self.logger.info(f"🎯 psi of {format_braid(w)}: {verdict.status.value} ({verdict.method})")
        return verdict


def peeled_psi_verdict(w: BraidWord, ring: CoefficientRing = CoefficientRing.INTEGER,
                       config: Optional[TransverseConfig] = None, reduced: bool = False,
                       marked: Optional[int] = None) -> PsiVerdict:
    return TwistPeeler(config).decide(w, ring, reduced, marked)


@dataclass(frozen=True)
class StabilityReport:
    threshold: int
    direction: str
    a: int
    i: int
    count_basis: int
    letters_per_copy: int

    @property
    def first_stable_copies(self) -> int:
        return self.threshold + 1

    def first_stable_parameter(self, rows_per_insert: int) -> int:
        """Smallest family parameter whose inserted rows cover N + 1 sub-full twists"""
        rows_needed = self.a * (self.threshold + 1)
        return -(-rows_needed // rows_per_insert)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'threshold': self.threshold,
            'direction': self.direction,
            'a': self.a,
            'i': self.i,
            'count_basis': self.count_basis,
            'letters_per_copy': self.letters_per_copy,
            'first_stable_copies': self.first_stable_copies,
            'letter_condition': f"rows > {self.count_basis}",
        }


def stability_threshold(beta: BraidWord, a: int, i: int, sign: int) -> StabilityReport:
    """
    Sub-full-twist count past which the psi verdict of beta * alpha^m is constant

    Each copy of the sub-full twist contributes a rows of a - 1 letters, and
    the verdict is fixed once the rows outnumber the crossings of beta of
    the opposite sign. N = floor(count / a) copies therefore suffice.

    Args:
        beta: Base braid
        a: Strands twisted by each copy
        i: First generator of the twist
        sign: -1 for negative twists, +1 for positive ones

    Returns:
        StabilityReport with the threshold and its inputs
    """
    b = beta.strands
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    if a < 2 or a >= b:
        raise ValueError(f"sub-full twist width a={a} must satisfy 2 <= a < {b}")
    if i < 1 or i + a - 2 > b - 1:
        raise ValueError(f"sub-full twist sigma_{i}..sigma_{i + a - 2} does not fit on {b} strands")
    count = beta.n_plus if sign < 0 else beta.n_minus
    return StabilityReport(
        threshold=count // a,
        direction='negative' if sign < 0 else 'positive',
        a=a,
        i=i,
        count_basis=count,
        letters_per_copy=a * (a - 1),
    )


def sub_twist_shape(insert: BraidWord) -> Optional[Tuple[int, int, int, int]]:
    """
    Recognise an insert made of rows sigma_i^s ... sigma_{i+a-2}^s

    Returns:
        (a, i, sign, rows per insert) or None when the insert has another shape
    """
    letters = insert.letters
    if not letters:
        return None
    sign = 1 if letters[0] > 0 else -1
    if any((x > 0) != (sign > 0) for x in letters):
        return None
    indices = [abs(x) for x in letters]
    width = 1
    while width < len(indices) and indices[width] == indices[width - 1] + 1:
        width += 1
    row = indices[:width]
    if len(indices) % width or indices != row * (len(indices) // width):
        return None
    return width + 1, row[0], sign, len(indices) // width
