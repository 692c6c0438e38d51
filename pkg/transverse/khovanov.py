#!/usr/bin/env python3
"""
Khovanov Complex Engine
Graded pieces of the (reduced) Khovanov complex, homology tables and transverse-element verdicts
"""

import json
import logging
import time
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from itertools import combinations
from pathlib import Path
from typing import TYPE_CHECKING, Any, Dict, Iterator, List, Optional, Tuple, Union

from .braid import BraidWord, format_braid, parse_braid, self_linking
from .config import TransverseConfig
from .errors import DiagramError, GradingMismatchError, ResourceLimitExceeded, TransverseError
from .exactalg import CoefficientRing, SparseMatrix, SparseVector, rank, smith_invariants, solve
from .tangle import KauffmanState, TangleDiagram, from_braid, oriented_resolution_state

if TYPE_CHECKING:
    from .skeinstab import GradingBox

SIGN_CONVENTION = 'ones-before'

Generator = Tuple[int, int]  # (state bitmask, label bitmask with bit c set for v+ on circle c)


@dataclass(frozen=True)
class Labeling:
    """v+/v- mark per circle in canonical circle order"""

    plus: Tuple[bool, ...]

    @classmethod
    def from_string(cls, text: str) -> 'Labeling':
        if any(ch not in '+-' for ch in text):
            raise DiagramError(f"labeling must use '+'/'-', got {text!r}")
        return cls(tuple(ch == '+' for ch in text))

    @classmethod
    def from_mask(cls, mask: int, circles: int) -> 'Labeling':
        return cls(tuple(bool((mask >> c) & 1) for c in range(circles)))

    @property
    def mask(self) -> int:
        return sum(1 << c for c, mark in enumerate(self.plus) if mark)

    @property
    def p(self) -> int:
        return sum(1 if mark else -1 for mark in self.plus)

    def __len__(self) -> int:
        return len(self.plus)

    def __str__(self) -> str:
        return ''.join('+' if mark else '-' for mark in self.plus)


@dataclass(frozen=True)
class Grading:
    i: int
    j: int


@dataclass
class ChainElement:
    """Sparse formal sum of (state, labeling) generators of one diagram"""

    diagram: TangleDiagram
    ring: CoefficientRing
    terms: Dict[Tuple[KauffmanState, Labeling], Any] = field(default_factory=dict)
    reduced: bool = False
    marked: Optional[int] = None

    def __post_init__(self):
        cleaned = {}
        for key, value in self.terms.items():
            value = self.ring.normalize(value)
            if value != 0:
                cleaned[key] = value
        self.terms = cleaned

    def is_zero(self) -> bool:
        return not self.terms

    def __neg__(self) -> 'ChainElement':
        return ChainElement(self.diagram, self.ring, {k: -v for k, v in self.terms.items()},
                            self.reduced, self.marked)

    def same_terms(self, other: 'ChainElement') -> bool:
        return self.terms == other.terms

    def to_json(self) -> List[Dict[str, Any]]:
        ordered = sorted(self.terms.items(), key=lambda kv: (str(kv[0][0]), str(kv[0][1])))
        return [
            {'state': str(state), 'labeling': str(labeling), 'coefficient': str(value)
             if self.ring is CoefficientRing.RATIONAL else int(value)}
            for (state, labeling), value in ordered
        ]


class PsiStatus(str, Enum):
    ZERO = 'zero'
    NONZERO = 'nonzero'


@dataclass
class PsiVerdict:
    status: PsiStatus
    ring: CoefficientRing
    grading: Grading
    reduced: bool = False
    certificate: Optional[ChainElement] = None
    source_dim: int = 0
    target_dim: int = 0
    duration: float = 0.0
    method: str = 'direct'

    @property
    def vanishes(self) -> bool:
        return self.status is PsiStatus.ZERO

    def to_dict(self) -> Dict[str, Any]:
        return {
            'status': self.status.value,
            'ring': self.ring.value,
            'reduced': self.reduced,
            'grading': {'i': self.grading.i, 'j': self.grading.j},
            'source_dim': self.source_dim,
            'target_dim': self.target_dim,
            'duration': self.duration,
            'method': self.method,
            'certificate': self.certificate.to_json() if self.certificate is not None else None,
        }


@dataclass
class HomologyTable:
    ring: CoefficientRing
    reduced: bool = False
    ranks: Dict[Tuple[int, int], int] = field(default_factory=dict)
    torsion: Dict[Tuple[int, int], List[int]] = field(default_factory=dict)

    def rank(self, i: int, j: int) -> int:
        return self.ranks.get((i, j), 0)

    def support(self) -> List[Tuple[int, int]]:
        """Gradings with nonzero rank or torsion"""
        return sorted(set(self.ranks) | set(self.torsion))

    def column_support(self, i: int) -> List[int]:
        return sorted(j for (ii, j) in self.support() if ii == i)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'ring': self.ring.value,
            'reduced': self.reduced,
            'entries': [
                {'i': i, 'j': j, 'rank': self.rank(i, j), 'torsion': self.torsion.get((i, j), [])}
                for i, j in self.support()
            ],
        }


class KhovanovEngine:
    """Builds graded pieces of the Khovanov complex of one diagram"""

    def __init__(self, diagram: TangleDiagram, config: Optional[TransverseConfig] = None,
                 reduced: bool = False, marked: Optional[int] = None):
        self.config = config or TransverseConfig()
        self.logger = self._setup_logging()
        self.diagram = diagram
        self.reduced = reduced
        self.marked = marked if marked is not None else self.config.MARKED_STRAND
        if reduced and not 1 <= self.marked <= diagram.strands:
            raise DiagramError(f"marked strand {self.marked} out of range 1..{diagram.strands}")

        self.n = diagram.n_crossings
        self.n_plus = diagram.n_plus
        self.n_minus = diagram.n_minus
        arcs = diagram.arc_structure
        self._ports = []
        for t in diagram.crossing_tiles:
            top_i, top_j, bot_i, bot_j = arcs.tile_ports[t]
            self._ports.append((top_i, top_j, bot_i, bot_j, diagram.tiles[t].sign > 0))
        self._marked_arc = arcs.segment_arc[diagram.segment(0, self.marked)] if reduced else -1
        self._states: Dict[int, Tuple[int, bytes, Tuple[int, ...]]] = {}
        self._bases: Dict[Tuple[int, int], List[Generator]] = {}

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

    # -- states and generators -------------------------------------------

    def _state(self, mask: int) -> Tuple[int, bytes, Tuple[int, ...]]:
        """Circle count, circle per arc and a representative arc per circle"""
        data = self._states.get(mask)
        if data is None:
            count, arc_circle = self.diagram.arc_circles(mask)
            reps = [-1] * count
            for arc, circle in enumerate(arc_circle):
                if reps[circle] < 0:
                    reps[circle] = arc
            data = (count, bytes(arc_circle) if count < 256 else arc_circle, tuple(reps))
            self._states[mask] = data
        return data

    def marked_circle(self, mask: int) -> int:
        if not self.reduced:
            raise TransverseError("marked circle requested from an unreduced engine")
        return self._state(mask)[1][self._marked_arc]

    def _masks(self, r: int) -> Iterator[int]:
        """States of popcount r in ascending bitstring order (crossing 0 first)"""
        if r < 0 or r > self.n:
            return
        for ones in reversed(list(combinations(range(self.n), r))):
            yield sum(1 << k for k in ones)

    def _unreduced_j(self, j: int) -> int:
        return j + 1 if self.reduced else j

    def grading(self, mask: int, label: int) -> Grading:
        count = self._state(mask)[0]
        r = bin(mask).count('1')
        i = r - self.n_minus
        p = 2 * bin(label).count('1') - count
        j = p + i + self.n_plus - self.n_minus
        return Grading(i, j - 1 if self.reduced else j)

    def basis(self, i: int, j: int) -> List[Generator]:
        """
        Ordered generators of the graded piece (i, j)

        States come in ascending bitstring order and labelings in
        lexicographic order with '+' before '-'. In the reduced theory only
        generators whose marked circle carries v+ are listed.
        """
        key = (i, j)
        if key in self._bases:
            return self._bases[key]

        r = i + self.n_minus
        p = self._unreduced_j(j) - i - self.n_plus + self.n_minus
        out: List[Generator] = []
        for mask in self._masks(r):
            count, arc_circle, _ = self._state(mask)
            if (p + count) % 2:
                continue
            plus = (p + count) // 2
            if plus < 0 or plus > count:
                continue
            if self.reduced:
                marked = arc_circle[self._marked_arc]
                if plus < 1:
                    continue
                others = [c for c in range(count) if c != marked]
                for combo in combinations(others, plus - 1):
                    out.append((mask, (1 << marked) | sum(1 << c for c in combo)))
            else:
                for combo in combinations(range(count), plus):
                    out.append((mask, sum(1 << c for c in combo)))
            if len(out) > self.config.MAX_DIM:
                raise ResourceLimitExceeded('graded piece dimension', self.config.MAX_DIM, len(out))

        self.logger.debug(f"📊 Graded piece ({i}, {j}): {len(out)} generators")
        self._bases[key] = out
        return out

    def generator_terms(self, mask: int, label: int) -> Iterator[Tuple[int, int, int]]:
        """Differential of one generator as (target mask, target label, sign) triples"""
        count, circ, reps = self._state(mask)
        ones_before = 0
        for k in range(self.n):
            if (mask >> k) & 1:
                ones_before += 1
                continue
            sign = -1 if ones_before % 2 else 1
            target = mask | (1 << k)
            _, tcirc, _ = self._state(target)
            top_i, top_j, bot_i, _, positive = self._ports[k]
            if positive:
                ca, cb = circ[top_i], circ[top_j]
                x, y = tcirc[top_i], tcirc[bot_i]
            else:
                ca, cb = circ[top_i], circ[bot_i]
                x, y = tcirc[top_i], tcirc[top_j]

            base = 0
            for c in range(count):
                if c != ca and c != cb and (label >> c) & 1:
                    base |= 1 << tcirc[reps[c]]

            if ca != cb:
                la, lb = (label >> ca) & 1, (label >> cb) & 1
                if la and lb:
                    labels = [base | (1 << x)]
                elif la or lb:
                    labels = [base]
                else:
                    labels = []
            elif (label >> ca) & 1:
                labels = [base | (1 << x), base | (1 << y)]
            else:
                labels = [base]

            if self.reduced:
                tmarked = tcirc[self._marked_arc]
                labels = [t for t in labels if (t >> tmarked) & 1]
            for t in labels:
                yield target, t, sign

    def differential(self, i: int, j: int, ring: CoefficientRing) -> SparseMatrix:
        """Matrix of d from the (i, j) piece to the (i + 1, j) piece"""
        source = self.basis(i, j)
        target = self.basis(i + 1, j)
        index = {gen: row for row, gen in enumerate(target)}
        entries: Dict[Tuple[int, int], Any] = {}
        for col, (mask, label) in enumerate(source):
            for tmask, tlabel, sign in self.generator_terms(mask, label):
                row = index.get((tmask, tlabel))
                if row is None:
                    raise TransverseError(f"differential left the graded piece ({i + 1}, {j})")
                value = ring.normalize(entries.get((row, col), 0) + sign)
                if value == 0:
                    entries.pop((row, col), None)
                else:
                    entries[(row, col)] = value
        return SparseMatrix(len(target), len(source), entries)

    # -- chain elements ---------------------------------------------------

    def to_generator(self, state: KauffmanState, labeling: Labeling) -> Generator:
        if len(state) != self.n:
            raise DiagramError(f"state has {len(state)} bits, diagram has {self.n} crossings")
        count = self._state(state.mask)[0]
        if len(labeling) != count:
            raise DiagramError(f"labeling {labeling} has {len(labeling)} marks, state {state} has {count} circles")
        return state.mask, labeling.mask

    def to_terms(self, mask: int, label: int) -> Tuple[KauffmanState, Labeling]:
        return KauffmanState.from_mask(mask, self.n), Labeling.from_mask(label, self._state(mask)[0])

    def element(self, ring: CoefficientRing, coefficients: Dict[Generator, Any]) -> ChainElement:
        terms = {self.to_terms(mask, label): value for (mask, label), value in coefficients.items()}
        return ChainElement(self.diagram, ring, terms, self.reduced, self.marked if self.reduced else None)

    def homogeneous_grading(self, x: ChainElement) -> Optional[Grading]:
        """Common grading of all terms, None for the zero element"""
        gradings = {self.grading(*self.to_generator(s, l)) for s, l in x.terms}
        if len(gradings) > 1:
            raise GradingMismatchError(f"element is not homogeneous: {sorted((g.i, g.j) for g in gradings)}")
        return gradings.pop() if gradings else None

    def apply(self, x: ChainElement) -> ChainElement:
        acc: Dict[Generator, Any] = {}
        for (state, labeling), value in x.terms.items():
            mask, label = self.to_generator(state, labeling)
            for tmask, tlabel, sign in self.generator_terms(mask, label):
                key = (tmask, tlabel)
                acc[key] = x.ring.normalize(acc.get(key, 0) + sign * value)
        return self.element(x.ring, {k: v for k, v in acc.items() if v != 0})

    def is_cycle(self, x: ChainElement) -> bool:
        return self.apply(x).is_zero()

    # -- verdicts and homology ---------------------------------------------

    def decide(self, x: ChainElement, ring: CoefficientRing) -> PsiVerdict:
        """
        Decide whether a homogeneous cycle in homological degree 0 is a boundary

        Args:
            x: Cycle to test, typically psi-tilde or psi-tilde-prime
            ring: Coefficient ring of the solve

        Returns:
            PsiVerdict with a re-verified certificate when x is a boundary
        """
        if self.reduced and ring is not CoefficientRing.GF2:
            raise ValueError("the reduced theory is defined over GF2 only")
        start_time = time.time()
        grading = self.homogeneous_grading(x)
        if grading is None or grading.i != 0:
            raise GradingMismatchError(f"expected an element in homological degree 0, got {grading}")

        self.logger.info(f"🔄 Solving d x = psi at ({grading.i - 1}, {grading.j}) -> ({grading.i}, {grading.j})")
        source = self.basis(grading.i - 1, grading.j)
        target = self.basis(grading.i, grading.j)
        self.logger.info(f"📊 Source dimension {len(source)}, target dimension {len(target)}")
        M = self.differential(grading.i - 1, grading.j, ring)
        index = {gen: row for row, gen in enumerate(target)}
        b = SparseVector(len(target), {
            index[self.to_generator(s, l)]: value for (s, l), value in x.terms.items()
        })

        solution = solve(M, b, ring)
        duration = time.time() - start_time
        if solution is not None:
            phi = self.element(ring, {source[c]: v for c, v in solution.entries.items()})
            if not self.apply(phi).same_terms(x):
                raise TransverseError("certificate failed re-verification")
            self.logger.info(f"🎯 Boundary found: certificate with {len(phi.terms)} terms ({duration:.2f}s)")
            status = PsiStatus.ZERO
        else:
            if not self.is_cycle(x):
                raise TransverseError("element is not a cycle")
            self.logger.info(f"🎯 Nonzero class ({duration:.2f}s)")
            phi = None
            status = PsiStatus.NONZERO

        return PsiVerdict(status, ring, grading, self.reduced, phi, len(source), len(target), duration)

    def column_gradings(self, i: int) -> List[int]:
        """Quantum gradings with a nonzero chain group in homological degree i"""
        js = set()
        r = i + self.n_minus
        for mask in self._masks(r):
            count = self._state(mask)[0]
            low = -count + 2 if self.reduced else -count
            for p in range(low, count + 1, 2):
                j = p + i + self.n_plus - self.n_minus
                js.add(j - 1 if self.reduced else j)
        return sorted(js)

    def homology(self, i: int, j: int, ring: CoefficientRing) -> Tuple[int, List[int]]:
        """Free rank and torsion coefficients of Kh^{i}_{j}"""
        dim = len(self.basis(i, j))
        if dim == 0:
            return 0, []
        rank_ring = CoefficientRing.RATIONAL if ring is CoefficientRing.INTEGER else ring
        d_out = self.differential(i, j, rank_ring)
        d_in = self.differential(i - 1, j, rank_ring)
        free = dim - rank(d_out, rank_ring) - rank(d_in, rank_ring)
        torsion: List[int] = []
        if ring is CoefficientRing.INTEGER and d_in.nnz:
            torsion = [d for d in smith_invariants(self.differential(i - 1, j, ring)) if d > 1]
        return free, torsion

    def homology_table(self, ring: CoefficientRing, window: Optional['GradingBox'] = None) -> HomologyTable:
        if self.reduced and ring is not CoefficientRing.GF2:
            raise ValueError("the reduced theory is defined over GF2 only")
        self.logger.info(f"🔄 Computing {'reduced ' if self.reduced else ''}homology over {ring.value}")
        table = HomologyTable(ring, self.reduced)
        i_low, i_high = -self.n_minus, self.n_plus
        if window is not None:
            i_low, i_high = max(i_low, window.i_min), min(i_high, window.i_max)
        for i in range(i_low, i_high + 1):
            for j in self.column_gradings(i):
                if window is not None and not window.j_min <= j <= window.j_max:
                    continue
                free, torsion = self.homology(i, j, ring)
                if free:
                    table.ranks[(i, j)] = free
                if torsion:
                    table.torsion[(i, j)] = torsion
        self.logger.info(f"✅ Homology support: {table.support()}")
        return table


# -- module-level operations ------------------------------------------------

def graded_basis(D: TangleDiagram, i: int, j: int,
                 config: Optional[TransverseConfig] = None) -> List[Tuple[KauffmanState, Labeling]]:
    engine = KhovanovEngine(D, config)
    return [engine.to_terms(mask, label) for mask, label in engine.basis(i, j)]


def differential_matrix(D: TangleDiagram, i: int, j: int, ring: CoefficientRing,
                        config: Optional[TransverseConfig] = None) -> SparseMatrix:
    return KhovanovEngine(D, config).differential(i, j, ring)


def reduced_graded_basis(D: TangleDiagram, marked: int, i: int, j: int,
                         config: Optional[TransverseConfig] = None) -> List[Tuple[KauffmanState, Labeling]]:
    engine = KhovanovEngine(D, config, reduced=True, marked=marked)
    return [engine.to_terms(mask, label) for mask, label in engine.basis(i, j)]


def reduced_differential(D: TangleDiagram, marked: int, i: int, j: int,
                         ring: CoefficientRing = CoefficientRing.GF2,
                         config: Optional[TransverseConfig] = None) -> SparseMatrix:
    if ring is not CoefficientRing.GF2:
        raise ValueError("the reduced theory is defined over GF2 only")
    return KhovanovEngine(D, config, reduced=True, marked=marked).differential(i, j, ring)


def homology_table(D: TangleDiagram, ring: CoefficientRing, window: Optional['GradingBox'] = None,
                   config: Optional[TransverseConfig] = None) -> HomologyTable:
    return KhovanovEngine(D, config).homology_table(ring, window)


def reduced_homology_table(D: TangleDiagram, marked: Optional[int] = None,
                           window: Optional['GradingBox'] = None,
                           config: Optional[TransverseConfig] = None) -> HomologyTable:
    return KhovanovEngine(D, config, reduced=True, marked=marked).homology_table(CoefficientRing.GF2, window)


def psi_tilde(w: BraidWord, ring: CoefficientRing = CoefficientRing.INTEGER) -> ChainElement:
    """All-minus labeling of the oriented resolution of the closure"""
    D = from_braid(w)
    state = oriented_resolution_state(D)
    labeling = Labeling((False,) * w.strands)
    return ChainElement(D, ring, {(state, labeling): 1})


def psi_tilde_prime(w: BraidWord, marked: Optional[int] = None,
                    config: Optional[TransverseConfig] = None) -> ChainElement:
    """Reduced-complex element: v+ on the marked circle, v- elsewhere"""
    engine = KhovanovEngine(from_braid(w), config, reduced=True, marked=marked)
    state = oriented_resolution_state(engine.diagram)
    label = 1 << engine.marked_circle(state.mask)
    return engine.element(CoefficientRing.GF2, {(state.mask, label): 1})


def d_of(x: ChainElement, config: Optional[TransverseConfig] = None) -> ChainElement:
    return KhovanovEngine(x.diagram, config, reduced=x.reduced, marked=x.marked).apply(x)


def is_cycle(x: ChainElement, config: Optional[TransverseConfig] = None) -> bool:
    return d_of(x, config).is_zero()


def psi_vanishes(w: BraidWord, ring: CoefficientRing = CoefficientRing.INTEGER,
                 config: Optional[TransverseConfig] = None) -> PsiVerdict:
    """
    Decide whether psi(w) vanishes in Khovanov homology over the ring

    Only the two graded pieces at (-1, sl) and (0, sl) are built.

    Args:
        w: Braid word whose closure carries the transverse element
        ring: Coefficient ring
        config: Engine configuration (resource caps, logging)

    Returns:
        PsiVerdict; ResourceLimitExceeded is raised instead of guessing
    """
    engine = KhovanovEngine(from_braid(w), config)
    return engine.decide(psi_tilde(w, ring), ring)


def psi_prime_vanishes(w: BraidWord, marked: Optional[int] = None,
                       config: Optional[TransverseConfig] = None) -> PsiVerdict:
    engine = KhovanovEngine(from_braid(w), config, reduced=True, marked=marked)
    return engine.decide(psi_tilde_prime(w, engine.marked, config), CoefficientRing.GF2)


def verify_certificate(w: BraidWord, phi: ChainElement,
                       config: Optional[TransverseConfig] = None) -> bool:
    """True iff d(phi) equals plus or minus psi-tilde (or psi-tilde-prime for reduced phi)"""
    engine = KhovanovEngine(from_braid(w), config, reduced=phi.reduced, marked=phi.marked)
    if phi.is_zero():
        return False
    grading = engine.homogeneous_grading(phi)
    sl = self_linking(w)
    expected = Grading(-1, sl + 1 if phi.reduced else sl)
    if grading != expected:
        raise GradingMismatchError(f"certificate sits at {grading}, expected {expected}")
    boundary = engine.apply(phi)
    psi = psi_tilde_prime(w, engine.marked, config) if phi.reduced else psi_tilde(w, phi.ring)
    return boundary.same_terms(psi) or boundary.same_terms(-psi)


def reduce_certificate(phi: ChainElement, ring: CoefficientRing) -> ChainElement:
    """Carry an integer certificate into Q or GF2"""
    if phi.ring is not CoefficientRing.INTEGER and phi.ring is not ring:
        raise ValueError(f"only integer certificates reduce, got {phi.ring.value}")
    return ChainElement(phi.diagram, ring, dict(phi.terms), phi.reduced, phi.marked)


def dump_certificate(phi: ChainElement, path: Union[str, Path], word: Optional[BraidWord] = None,
                     name: str = '') -> Path:
    payload: Dict[str, Any] = {
        'name': name,
        'ring': phi.ring.value,
        'sign_convention': SIGN_CONVENTION,
        'reduced': phi.reduced,
        'terms': phi.to_json(),
        'created_at': datetime.now().isoformat(),
    }
    if phi.reduced:
        payload['marked'] = phi.marked
    if word is not None:
        payload['strands'] = word.strands
        payload['word'] = format_braid(word)
    else:
        payload['diagram'] = phi.diagram.to_json()
    path = Path(path)
    with open(path, 'w') as f:
        json.dump(payload, f, indent=2, default=str)
    return path


def load_certificate(path: Union[str, Path]) -> Tuple[Optional[BraidWord], ChainElement]:
    with open(path) as f:
        payload = json.load(f)
    convention = payload.get('sign_convention', SIGN_CONVENTION)
    if convention != SIGN_CONVENTION:
        raise DiagramError(f"certificate uses sign convention {convention!r}, engine uses {SIGN_CONVENTION!r}")

    ring = CoefficientRing(payload['ring'])
    word = None
    if 'word' in payload:
        word = parse_braid(payload['word'], int(payload['strands']))
        D = from_braid(word)
    else:
        D = TangleDiagram.from_json(payload['diagram'])

    element = element_from_json(D, ring, payload['terms'], bool(payload.get('reduced', False)),
                                payload.get('marked'))
    return word, element


def element_from_json(D: TangleDiagram, ring: CoefficientRing, items: List[Dict[str, Any]],
                      reduced: bool = False, marked: Optional[int] = None) -> ChainElement:
    """Rebuild a chain element from its JSON terms, checking every generator against D"""
    engine = KhovanovEngine(D, reduced=reduced, marked=marked)
    terms = {}
    for item in items:
        state = KauffmanState.from_string(item['state'])
        labeling = Labeling.from_string(item['labeling'])
        engine.to_generator(state, labeling)
        terms[(state, labeling)] = ring.normalize(item['coefficient'])
    return ChainElement(D, ring, terms, reduced, engine.marked if reduced else None)
