#!/usr/bin/env python3
"""
Dehornoy Order and FDTC
Handle reduction, Dehornoy floors, letter-count bounds and exact patterns for the fractional Dehn twist coefficient
"""

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .braid import BraidWord, cyclic_reduce, format_braid, full_twist, inverse, letter_counts, power
from .config import TransverseConfig
from .errors import FloorSearchError, ResourceLimitExceeded, StepLimitExceeded


class DehornoySign(str, Enum):
    POSITIVE = 'positive'
    TRIVIAL = 'trivial'
    NEGATIVE = 'negative'


@dataclass(frozen=True)
class FdtcBounds:
    lower: Fraction
    upper: Fraction
    provenance: str

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError(f"empty FDTC window [{self.lower}, {self.upper}]")

    def contains(self, value: Fraction) -> bool:
        return self.lower <= value <= self.upper

    def to_dict(self) -> Dict[str, Any]:
        return {'lower': str(self.lower), 'upper': str(self.upper), 'provenance': self.provenance}


def _find_handle(letters: Sequence[int]) -> Optional[Tuple[int, int]]:
    """Handle sigma_i^e v sigma_i^-e whose right end comes first, v using only generators above i"""
    for q, last in enumerate(letters):
        i = abs(last)
        for p in range(q - 1, -1, -1):
            index = abs(letters[p])
            if index > i:
                continue
            if index == i and letters[p] == -last:
                return p, q
            break
    return None


def _reduce_handle(letters: List[int], p: int, q: int) -> List[int]:
    e = 1 if letters[p] > 0 else -1
    i = abs(letters[p])
    middle: List[int] = []
    for x in letters[p + 1:q]:
        if abs(x) == i + 1:
            d = 1 if x > 0 else -1
            middle.extend((-e * (i + 1), d * i, e * (i + 1)))
        else:
            middle.append(x)
    return letters[:p] + middle + letters[q + 1:]


class FdtcAnalyzer:
    """Dehornoy-order comparisons and FDTC estimates for braid words"""

    def __init__(self, config: Optional[TransverseConfig] = None):
        self.config = config or TransverseConfig()
        self.logger = self._setup_logging()

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

    def handle_reduce(self, w: BraidWord) -> BraidWord:
        """Reduce handles until none remain, within the configured step budget"""
        letters = list(w.letters)
        steps = 0
        while True:
            handle = _find_handle(letters)
            if handle is None:
                return BraidWord(w.strands, tuple(letters))
            steps += 1
            if steps > self.config.HANDLE_STEP_LIMIT:
                raise StepLimitExceeded('handle reduction steps', self.config.HANDLE_STEP_LIMIT, steps)
            letters = _reduce_handle(letters, *handle)

    def sign(self, w: BraidWord) -> DehornoySign:
        reduced = self.handle_reduce(w)
        if not reduced.letters:
            return DehornoySign.TRIVIAL
        low = min(abs(x) for x in reduced.letters)
        first = next(x for x in reduced.letters if abs(x) == low)
        return DehornoySign.POSITIVE if first > 0 else DehornoySign.NEGATIVE

    def _at_least_twist(self, w: BraidWord, m: int) -> bool:
        """Whether Delta^{2m} <= w"""
        shifted = power(full_twist(w.strands), -m) + w
        return self.sign(shifted) is not DehornoySign.NEGATIVE

    def floor(self, w: BraidWord) -> int:
        """
        Dehornoy floor: the m with Delta^{2m} <= w < Delta^{2m+2}

        Args:
            w: Braid word

        Returns:
            The floor, found by monotone search within |m| <= len(w) + slack
        """
        if w.strands < 2:
            return 0
        radius = len(w) + self.config.FLOOR_SEARCH_SLACK
        m = 0
        if self._at_least_twist(w, 0):
            while self._at_least_twist(w, m + 1):
                m += 1
                if m > radius:
                    raise FloorSearchError(f"floor of {format_braid(w)} exceeds search radius {radius}")
        else:
            while not self._at_least_twist(w, m):
                m -= 1
                if -m > radius:
                    raise FloorSearchError(f"floor of {format_braid(w)} is below -{radius}")
        return m

    def letter_bounds(self, w: BraidWord) -> FdtcBounds:
        """Intersect [-s_i, r_i] over generators, r_i / s_i counting sigma_i / sigma_i^-1"""
        lower, upper = Fraction(-10 ** 9), Fraction(10 ** 9)
        if w.strands < 2:
            return FdtcBounds(Fraction(0), Fraction(0), 'letter-count')
        for _, (pos, neg) in letter_counts(w).items():
            lower = max(lower, Fraction(-neg))
            upper = min(upper, Fraction(pos))
        return FdtcBounds(lower, upper, 'letter-count')

    def pattern(self, w: BraidWord) -> Optional[Fraction]:
        """
        Exact FDTC for Delta^{2n} times a word missing some generator

        Full-twist blocks and their inverses are removed wherever they occur
        in any cyclic rotation, the twist being central.
        """
        b = w.strands
        if b < 2:
            return Fraction(0)
        twist = list(full_twist(b).letters)
        twist_inv = list(inverse(full_twist(b)).letters)
        rotations = []
        for base in (list(w.letters), list(cyclic_reduce(w).letters)):
            rotations.extend(base[k:] + base[:k] for k in range(len(base)))
        for rotation in rotations or [[]]:
            n, rest = _strip_twists(rotation, twist, twist_inv)
            rest = cyclic_reduce(BraidWord(b, tuple(rest))).letters
            used = {abs(x) for x in rest}
            if any(i not in used for i in range(1, b)):
                return Fraction(n)
        return None

    def floor_sequence(self, w: BraidWord, k_max: int) -> List[Fraction]:
        if k_max < 1:
            raise ValueError(f"k_max must be >= 1, got {k_max}")
        return [Fraction(self.floor(power(w, k)), k) for k in range(1, k_max + 1)]

    def summary(self, w: BraidWord, k_max: int = 4) -> Dict[str, Any]:
        self.logger.info(f"🔄 FDTC analysis of {format_braid(w) or '(empty)'} on {w.strands} strands")
        result: Dict[str, Any] = {'word': format_braid(w), 'strands': w.strands}
        try:
            result['sign'] = self.sign(w).value
        except ResourceLimitExceeded as e:
            self.logger.warning(f"⚠️ Dehornoy sign undecided: {e}")
            result['sign'] = 'undecided'
        try:
            result['floor'] = self.floor(w)
            result['floor_sequence'] = [str(x) for x in self.floor_sequence(w, k_max)]
        except (ResourceLimitExceeded, FloorSearchError) as e:
            self.logger.warning(f"⚠️ Floor search undecided: {e}")
            result.setdefault('floor', 'undecided')
            result['floor_sequence'] = 'undecided'
        result['bounds'] = self.letter_bounds(w).to_dict()
        exact = self.pattern(w)
        result['pattern'] = str(exact) if exact is not None else None
        self.logger.info(f"🎯 FDTC bounds {result['bounds']['lower']}..{result['bounds']['upper']}, pattern {result['pattern']}")
        return result


def _strip_twists(letters: List[int], twist: List[int], twist_inv: List[int]) -> Tuple[int, List[int]]:
    n = 0
    current = letters
    size = len(twist)
    while True:
        found = False
        for k in range(len(current) - size + 1):
            block = current[k:k + size]
            if block == twist or block == twist_inv:
                n += 1 if block == twist else -1
                current = current[:k] + current[k + size:]
                found = True
                break
        if not found:
            return n, current


def dehornoy_sign(w: BraidWord, config: Optional[TransverseConfig] = None) -> DehornoySign:
    return FdtcAnalyzer(config).sign(w)


def dehornoy_floor(w: BraidWord, config: Optional[TransverseConfig] = None) -> int:
    return FdtcAnalyzer(config).floor(w)


def fdtc_letter_bounds(w: BraidWord) -> FdtcBounds:
    return FdtcAnalyzer().letter_bounds(w)


def fdtc_pattern(w: BraidWord) -> Optional[Fraction]:
    return FdtcAnalyzer().pattern(w)


def floor_sequence(w: BraidWord, k_max: int, config: Optional[TransverseConfig] = None) -> List[Fraction]:
    return FdtcAnalyzer(config).floor_sequence(w, k_max)


def fdtc_summary(w: BraidWord, k_max: int = 4, config: Optional[TransverseConfig] = None) -> Dict[str, Any]:
    return FdtcAnalyzer(config).summary(w, k_max)
