#!/usr/bin/env python3
"""
HOMFLY-PT Engine
Memoized skein recursion, a-degree extraction and maximal self-linking bounds
"""

import logging
import random
import threading
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional, Tuple, Union

from .braid import BraidWord, cyclic_reduce, self_linking
from .config import TransverseConfig
from .errors import ResourceLimitExceeded, TransverseError
from .exactalg import CoefficientRing
from .khovanov import KhovanovEngine
from .skeinstab import GradingBox, grading_support_bounds
from .tangle import DOWN, TangleDiagram, from_braid, smooth_oriented, switch_crossing


@dataclass(frozen=True)
class LaurentPoly2:
    """Integer Laurent polynomial in a and z, stored as {(a_exp, z_exp): coeff}"""

    terms: Dict[Tuple[int, int], int] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, 'terms', {k: int(v) for k, v in self.terms.items() if v != 0})

    @classmethod
    def from_terms(cls, items: Iterable[Tuple[int, int, int]]) -> 'LaurentPoly2':
        acc: Dict[Tuple[int, int], int] = {}
        for a, z, c in items:
            acc[(a, z)] = acc.get((a, z), 0) + c
        return cls(acc)

    @classmethod
    def monomial(cls, a: int = 0, z: int = 0, c: int = 1) -> 'LaurentPoly2':
        return cls({(a, z): c})

    @classmethod
    def one(cls) -> 'LaurentPoly2':
        return cls.monomial()

    def __add__(self, other: 'LaurentPoly2') -> 'LaurentPoly2':
        acc = dict(self.terms)
        for k, v in other.terms.items():
            acc[k] = acc.get(k, 0) + v
        return LaurentPoly2(acc)

    def __neg__(self) -> 'LaurentPoly2':
        return LaurentPoly2({k: -v for k, v in self.terms.items()})

    def __sub__(self, other: 'LaurentPoly2') -> 'LaurentPoly2':
        return self + (-other)

    def __mul__(self, other: Union['LaurentPoly2', int]) -> 'LaurentPoly2':
        if isinstance(other, int):
            return LaurentPoly2({k: v * other for k, v in self.terms.items()})
        acc: Dict[Tuple[int, int], int] = {}
        for (a1, z1), c1 in self.terms.items():
            for (a2, z2), c2 in other.terms.items():
                key = (a1 + a2, z1 + z2)
                acc[key] = acc.get(key, 0) + c1 * c2
        return LaurentPoly2(acc)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> 'LaurentPoly2':
        if k < 0:
            if len(self.terms) != 1 or abs(next(iter(self.terms.values()))) != 1:
                raise ValueError("only unit monomials have negative powers")
            ((a, z), c), = self.terms.items()
            return LaurentPoly2({(-a * -k, -z * -k): c ** -k})
        result = LaurentPoly2.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LaurentPoly2):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, a: int, z: int) -> int:
        return self.terms.get((a, z), 0)

    def to_json(self) -> List[Dict[str, int]]:
        return [{'a': a, 'z': z, 'c': c} for (a, z), c in sorted(self.terms.items(), key=lambda kv: (kv[0][1], kv[0][0]))]

    @classmethod
    def from_json(cls, items: List[Dict[str, int]]) -> 'LaurentPoly2':
        return cls.from_terms((int(t['a']), int(t['z']), int(t['c'])) for t in items)

    def __str__(self) -> str:
        if not self.terms:
            return '0'
        parts = []
        for (a, z), c in sorted(self.terms.items(), key=lambda kv: (kv[0][1], kv[0][0])):
            factors = [f"a^{a}" if a not in (0, 1) else ('a' if a == 1 else '')]
            factors.append(f"z^{z}" if z not in (0, 1) else ('z' if z == 1 else ''))
            body = '*'.join(f for f in factors if f)
            magnitude = abs(c)
            if body:
                text = body if magnitude == 1 else f"{magnitude}*{body}"
            else:
                text = str(magnitude)
            parts.append(('- ' if c < 0 else '+ ') + text)
        out = ' '.join(parts)
        return out[2:] if out.startswith('+ ') else '-' + out[2:]


A = LaurentPoly2.monomial(1, 0)
A_INV = LaurentPoly2.monomial(-1, 0)
Z = LaurentPoly2.monomial(0, 1)
DELTA = LaurentPoly2({(1, -1): 1, (-1, -1): -1})


def _unlink(components: int) -> LaurentPoly2:
    return DELTA ** (components - 1)


def _skein_coefficients(sign: int) -> Tuple[LaurentPoly2, LaurentPoly2]:
    """(switched, smoothed) coefficients expressing P of a crossing of the given sign"""
    if sign > 0:
        # P+ = a^-2 P- + a^-1 z P0
        return LaurentPoly2.monomial(-2, 0), LaurentPoly2.monomial(-1, 1)
    # P- = a^2 P+ - a z P0
    return LaurentPoly2.monomial(2, 0), LaurentPoly2.monomial(1, 1, -1)


def _first_visits(D: TangleDiagram) -> List[Tuple[int, bool]]:
    """Crossings in order of first traversal, with whether that pass is over"""
    seen = set()
    out = []
    for visit in D.traversal():
        if visit.crossing not in seen:
            seen.add(visit.crossing)
            out.append((visit.crossing, visit.over))
    return out


class HomflyEngine:
    """Skein-tree evaluator with a shared memo table"""

    def __init__(self, config: Optional[TransverseConfig] = None):
        self.config = config or TransverseConfig()
        self.logger = self._setup_logging()
        self._memo: Dict[Any, LaurentPoly2] = {}
        self._lock = threading.Lock()
        self._rng = random.Random(self.config.RANDOM_SEED)
        self._verifying = False
        self.nodes = 0
        self.verified = 0

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

    def _count_node(self):
        self.nodes += 1
        if self.nodes > self.config.HOMFLY_NODE_LIMIT:
            raise ResourceLimitExceeded('skein tree nodes', self.config.HOMFLY_NODE_LIMIT, self.nodes)

    def _store(self, key: Any, value: LaurentPoly2):
        with self._lock:
            self._memo.setdefault(key, value)

    # -- braid words ----------------------------------------------------------

    @staticmethod
    def _canonical(strands: int, letters: Tuple[int, ...]) -> Tuple[List[Tuple[int, Tuple[int, ...]]], int]:
        """
        Reduce a braid closure to split pieces

        Cancels across the closure seam, removes Markov stabilizations and
        splits at generators that do not occur. Returns the pieces, each
        rotated to its lexicographically least conjugate, plus the number of
        extra split-union factors.
        """
        work = [(strands, letters)]
        pieces = []
        splits = 0
        while work:
            b, word = work.pop()
            word = cyclic_reduce(BraidWord(b, word)).letters
            if b == 1:
                pieces.append((1, ()))
                continue
            top = b - 1
            positions = [k for k, x in enumerate(word) if abs(x) == top]
            if len(positions) == 1:
                k = positions[0]
                work.append((b - 1, word[:k] + word[k + 1:]))
                continue
            used = {abs(x) for x in word}
            missing = next((m for m in range(1, b) if m not in used), None)
            if missing is not None:
                left = tuple(x for x in word if abs(x) < missing)
                right = tuple((x - missing) if x > 0 else (x + missing) for x in word if abs(x) > missing)
                work.append((missing, left))
                work.append((b - missing, right))
                splits += 1
                continue
            rotations = [word[k:] + word[:k] for k in range(len(word))] or [word]
            pieces.append((b, min(rotations)))
        pieces.sort()
        return pieces, splits

    def braid_homfly(self, w: BraidWord) -> LaurentPoly2:
        pieces, splits = self._canonical(w.strands, w.letters)
        result = _unlink(splits + 1) if splits else LaurentPoly2.one()
        for b, word in pieces:
            result = result * self._braid_piece(b, word)
        return result

    def _braid_piece(self, strands: int, letters: Tuple[int, ...]) -> LaurentPoly2:
        key = ('braid', strands, letters)
        cached = self._memo.get(key)
        if cached is not None:
            return cached
        self._count_node()

        D = from_braid(BraidWord(strands, letters))
        pending = [c for c, over in _first_visits(D) if not over]
        current = list(letters)
        coefficient = LaurentPoly2.one()
        total = LaurentPoly2()
        for c in pending:
            sign = 1 if current[c] > 0 else -1
            switch_coeff, smooth_coeff = _skein_coefficients(sign)
            smoothed = BraidWord(strands, tuple(current[:c] + current[c + 1:]))
            total = total + coefficient * smooth_coeff * self.braid_homfly(smoothed)
            coefficient = coefficient * switch_coeff
            current[c] = -current[c]
        total = total + coefficient * _unlink(len(D.components))

        self._store(key, total)
        if pending:
            self._maybe_verify_braid(strands, letters, pending[0], total)
        return total

    def _maybe_verify_braid(self, strands: int, letters: Tuple[int, ...], c: int, value: LaurentPoly2):
        if self._verifying or self._rng.random() >= self.config.HOMFLY_VERIFY_FRACTION:
            return
        self._verifying = True
        try:
            switched = list(letters)
            switched[c] = -switched[c]
            p_switch = self.braid_homfly(BraidWord(strands, tuple(switched)))
            p_smooth = self.braid_homfly(BraidWord(strands, letters[:c] + letters[c + 1:]))
        finally:
            self._verifying = False
        self._check_relation(letters[c] > 0, value, p_switch, p_smooth)

    def _check_relation(self, positive: bool, value: LaurentPoly2, p_switch: LaurentPoly2,
                        p_smooth: LaurentPoly2):
        p_plus, p_minus = (value, p_switch) if positive else (p_switch, value)
        if A * p_plus - A_INV * p_minus != Z * p_smooth:
            raise TransverseError("skein relation failed at a memoized node")
        self.verified += 1

    # -- general diagrams --------------------------------------------------------

    def diagram_homfly(self, D: TangleDiagram) -> LaurentPoly2:
        """Skein recursion on tile diagrams, cap-cup tiles allowed"""
        if all(tile.is_crossing for tile in D.tiles) and all(f == DOWN for f in D.orientation_flags):
            letters = tuple(tile.index * tile.sign for tile in D.tiles)
            return self.braid_homfly(BraidWord(D.strands, letters))

        payload = D.to_json()
        key = ('diagram', D.strands, tuple((t['kind'], t['index'], t['sign']) for t in payload['tiles']),
               tuple(payload['orientations']))
        cached = self._memo.get(key)
        if cached is not None:
            return cached
        self._count_node()

        pending = [c for c, over in _first_visits(D) if not over]
        signs = D.crossing_signs
        current = D
        coefficient = LaurentPoly2.one()
        total = LaurentPoly2()
        for c in pending:
            switch_coeff, smooth_coeff = _skein_coefficients(signs[c])
            total = total + coefficient * smooth_coeff * self.diagram_homfly(smooth_oriented(current, c))
            coefficient = coefficient * switch_coeff
            current = switch_crossing(current, c)
        total = total + coefficient * _unlink(len(D.components))

        self._store(key, total)
        return total

    def homfly(self, x: Union[BraidWord, TangleDiagram]) -> LaurentPoly2:
        self.logger.debug(f"🔄 HOMFLY-PT of {x}")
        if isinstance(x, BraidWord):
            value = self.braid_homfly(x)
        else:
            value = self.diagram_homfly(x)
        self.logger.debug(f"📊 Skein nodes {self.nodes}, verified {self.verified}")
        return value


def homfly(x: Union[BraidWord, TangleDiagram], config: Optional[TransverseConfig] = None) -> LaurentPoly2:
    """
    HOMFLY-PT polynomial with a P+ - a^-1 P- = z P0 and P(unknot) = 1

    Args:
        x: Braid word (closed up) or oriented tile diagram
        config: Node limit and verification sampling settings

    Returns:
        Exact polynomial in a and z
    """
    return HomflyEngine(config).homfly(x)


def torus_homfly(q: int, config: Optional[TransverseConfig] = None) -> LaurentPoly2:
    """T(2, -q) via P_q = a^2 P_{q-2} - a z P_{q-1}, seeded from the skein engine"""
    if q < 2:
        raise ValueError(f"torus parameter q must be >= 2, got {q}")
    engine = HomflyEngine(config)
    values = {
        2: engine.homfly(BraidWord(2, (-1, -1))),
        3: engine.homfly(BraidWord(2, (-1, -1, -1))),
    }
    a2 = LaurentPoly2.monomial(2, 0)
    az = LaurentPoly2.monomial(1, 1)
    for k in range(4, q + 1):
        values[k] = a2 * values[k - 2] - az * values[k - 1]
    return values[q]


def a_degree(P: LaurentPoly2) -> int:
    if P.is_zero():
        raise ValueError("the zero polynomial has no a-degree")
    return max(a for a, _ in P.terms)


def top_a_coefficients(P: LaurentPoly2) -> List[int]:
    """Coefficients of the terms of maximal a-degree, ordered by z exponent"""
    top = a_degree(P)
    return [c for (a, z), c in sorted(P.terms.items(), key=lambda kv: kv[0][1]) if a == top]


def msl_upper_bound(P: LaurentPoly2) -> int:
    """Upper bound -deg_a(P) - 1 on the maximal self-linking number"""
    return -a_degree(P) - 1


class ObstructionVerdict(str, Enum):
    ALL_REPRESENTATIVES_VANISH = 'all_representatives_vanish'
    INCONCLUSIVE = 'inconclusive'


@dataclass
class WholeLinkObstruction:
    verdict: ObstructionVerdict
    bound: int
    bound_source: str
    support: List[int]
    self_linking: int
    deg_a: Optional[int] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            'verdict': self.verdict.value,
            'bound': self.bound,
            'bound_source': self.bound_source,
            'kh0_support': self.support,
            'self_linking': self.self_linking,
            'deg_a': self.deg_a,
        }


def whole_link_psi_obstruction(w: BraidWord, msl_bound: Optional[int] = None,
                               ring: CoefficientRing = CoefficientRing.INTEGER,
                               config: Optional[TransverseConfig] = None) -> WholeLinkObstruction:
    """
    Whether psi vanishes for every braid representative of the closure

    Every representative has self-linking at most the bound, and psi sits in
    Kh^0 at its self-linking number, so a Kh^0 support lying strictly above
    the bound forces psi = 0 everywhere.

    Args:
        w: Any braid representative
        msl_bound: Externally known maximal self-linking number; the
            HOMFLY-PT bound is used when omitted
        ring: Coefficient ring of the Kh^0 computation
        config: Engine configuration

    Returns:
        WholeLinkObstruction with the verdict and its inputs
    """
    deg = None
    if msl_bound is None:
        deg = a_degree(homfly(w, config))
        bound, source = -deg - 1, 'homfly'
    else:
        bound, source = msl_bound, 'external'

    D = from_braid(w)
    box = grading_support_bounds(D)
    table = KhovanovEngine(D, config).homology_table(ring, GradingBox(0, 0, box.j_min, box.j_max))
    support = table.column_support(0)
    vanish = all(j > bound for j in support)
    verdict = ObstructionVerdict.ALL_REPRESENTATIVES_VANISH if vanish else ObstructionVerdict.INCONCLUSIVE
    return WholeLinkObstruction(verdict, bound, source, support, self_linking(w), deg)


def pretzel_support_formula(r: int, q: int) -> Tuple[Tuple[int, int], int]:
    """Predicted Kh^0 quantum support and a-degree of P(r, -q, -q)"""
    if r < 2 or r % 2:
        raise ValueError(f"r must be even and >= 2, got {r}")
    if q <= 0 or q % 2 == 0:
        raise ValueError(f"q must be odd and positive, got {q}")
    return (-1 - 2 * q, 1 - 2 * q), 2 + r + 2 * q
