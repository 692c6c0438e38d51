#!/usr/bin/env python3
"""
Braid Words
Parsing, algebraic moves and family constructors for Artin braid words
"""

import re
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .errors import BraidParseError

MAX_EXPONENT = 10_000
MAX_LETTERS = 1_000_000

_TOKEN = re.compile(r'\s*(?:(\()|(\)\^([+-]?\d+))|(FT)|([+-]?\d+))')


@dataclass(frozen=True)
class BraidWord:
    """Word in the Artin generators of B_b.

    Letters are signed generator indices: ``k`` stands for sigma_|k| with
    the sign of ``k``.
    """

    strands: int
    letters: Tuple[int, ...] = field(default=())

    def __post_init__(self):
        if self.strands < 1:
            raise BraidParseError(f"strand count must be >= 1, got {self.strands}")
        letters = tuple(int(x) for x in self.letters)
        for letter in letters:
            if letter == 0 or abs(letter) > self.strands - 1:
                raise BraidParseError(
                    f"generator index {abs(letter)} out of range 1..{self.strands - 1}"
                )
        object.__setattr__(self, 'letters', letters)

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        return format_braid(self)

    def __add__(self, other: 'BraidWord') -> 'BraidWord':
        return concat(self, other)

    def generators(self) -> Iterator[Tuple[int, int]]:
        """Yield (index, sign) pairs in word order"""
        for letter in self.letters:
            yield abs(letter), (1 if letter > 0 else -1)

    @property
    def n_plus(self) -> int:
        return sum(1 for x in self.letters if x > 0)

    @property
    def n_minus(self) -> int:
        return sum(1 for x in self.letters if x < 0)


def _full_twist_letters(n: int) -> List[int]:
    return list(range(1, n)) * n


def parse_braid(text: str, strands: int) -> BraidWord:
    """
    Parse braid text into a BraidWord

    Grammar: whitespace-separated signed integers, ``FT`` for the full twist
    on the ambient strands, and ``( tokens )^m`` for powers (negative m
    inverts the group).

    Args:
        text: Braid text such as ``"FT (-2)^5"``
        strands: Ambient strand count

    Returns:
        Parsed braid word with macros expanded
    """
    if strands < 1:
        raise BraidParseError(f"strand count must be >= 1, got {strands}")

    stack: List[List[int]] = [[]]
    pos = 0
    text = text.strip()
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if match is None or match.end() == pos:
            raise BraidParseError(f"malformed token near {text[pos:pos + 12]!r}")
        pos = match.end()
        open_paren, close_paren, exponent, ft, number = match.groups()
        # tokens other than '(' end at whitespace, a bracket or the end of text
        if not open_paren and pos < len(text) and not text[pos].isspace() and text[pos] not in '()':
            raise BraidParseError(f"malformed token near {text[match.start():pos + 1].strip()!r}")

        if open_paren:
            stack.append([])
        elif close_paren:
            if len(stack) == 1:
                raise BraidParseError("unbalanced ')'")
            m = int(exponent)
            if abs(m) > MAX_EXPONENT:
                raise BraidParseError(f"exponent overflow: {m}")
            group = stack.pop()
            if m < 0:
                group = [-x for x in reversed(group)]
            expanded = group * abs(m)
            stack[-1].extend(expanded)
        elif ft:
            if strands < 2:
                raise BraidParseError("FT needs at least 2 strands")
            stack[-1].extend(_full_twist_letters(strands))
        else:
            value = int(number)
            if value == 0 or abs(value) > strands - 1:
                raise BraidParseError(
                    f"generator index {abs(value)} out of range 1..{strands - 1}"
                )
            stack[-1].append(value)

        if sum(len(group) for group in stack) > MAX_LETTERS:
            raise BraidParseError(f"expanded word exceeds {MAX_LETTERS} letters")

    if len(stack) != 1:
        raise BraidParseError("unbalanced '('")
    return BraidWord(strands, tuple(stack[0]))


def format_braid(w: BraidWord) -> str:
    """Render a word in the parser's grammar"""
    return ' '.join(str(x) for x in w.letters)


def writhe(w: BraidWord) -> int:
    return w.n_plus - w.n_minus


def self_linking(w: BraidWord) -> int:
    """Self-linking number of the transverse closure: -b + n_+ - n_-"""
    return -w.strands + writhe(w)


def full_twist(n: int) -> BraidWord:
    """Full twist (sigma_1 ... sigma_{n-1})^n on n strands"""
    if n < 2:
        raise BraidParseError("full twist needs n >= 2")
    return BraidWord(n, tuple(_full_twist_letters(n)))


def sub_full_twist(a: int, i: int, sign: int, strands: Optional[int] = None) -> BraidWord:
    """
    Sub-full twist (sigma_i^s ... sigma_{i+a-2}^s)^a on strands i..i+a-1

    Args:
        a: Number of strands twisted
        i: First generator index
        sign: +1 or -1
        strands: Ambient strand count (defaults to i + a - 1)

    Returns:
        Word of a(a-1) letters, all of the given sign
    """
    if a < 2 or i < 1 or sign not in (1, -1):
        raise BraidParseError(f"invalid sub-full twist parameters a={a}, i={i}, sign={sign}")
    ambient = strands if strands is not None else i + a - 1
    if i + a - 2 > ambient - 1:
        raise BraidParseError(f"sub-full twist on sigma_{i}..sigma_{i + a - 2} exceeds {ambient} strands")
    row = [sign * k for k in range(i, i + a - 1)]
    return BraidWord(ambient, tuple(row * a))


def concat(w1: BraidWord, w2: BraidWord) -> BraidWord:
    strands = max(w1.strands, w2.strands)
    return BraidWord(strands, w1.letters + w2.letters)


def inverse(w: BraidWord) -> BraidWord:
    return BraidWord(w.strands, tuple(-x for x in reversed(w.letters)))


def power(w: BraidWord, k: int) -> BraidWord:
    base = w if k >= 0 else inverse(w)
    return BraidWord(w.strands, base.letters * abs(k))


def free_reduce(w: BraidWord) -> BraidWord:
    """Cancel adjacent sigma_i sigma_i^-1 pairs until none remain"""
    out: List[int] = []
    for letter in w.letters:
        if out and out[-1] == -letter:
            out.pop()
        else:
            out.append(letter)
    return BraidWord(w.strands, tuple(out))


def cyclic_reduce(w: BraidWord) -> BraidWord:
    """Free reduction followed by cancellation across the closure seam"""
    letters = list(free_reduce(w).letters)
    while len(letters) >= 2 and letters[0] == -letters[-1]:
        letters = letters[1:-1]
    return BraidWord(w.strands, tuple(letters))


def conjugate(w: BraidWord, g: int) -> BraidWord:
    """Return g^-1 * w * g for a single letter g"""
    if g == 0 or abs(g) > w.strands - 1:
        raise BraidParseError(f"conjugating letter {g} out of range")
    return BraidWord(w.strands, (-g,) + w.letters + (g,))


def stabilize_pos(w: BraidWord) -> BraidWord:
    return BraidWord(w.strands + 1, w.letters + (w.strands,))


def stabilize_neg(w: BraidWord) -> BraidWord:
    return BraidWord(w.strands + 1, w.letters + (-w.strands,))


def destabilize(w: BraidWord) -> Optional[BraidWord]:
    """Remove the only sigma_{b-1}^{+-1} letter, or return None"""
    top = w.strands - 1
    if top < 1:
        return None
    positions = [k for k, x in enumerate(w.letters) if abs(x) == top]
    if len(positions) != 1:
        return None
    k = positions[0]
    return BraidWord(w.strands - 1, w.letters[:k] + w.letters[k + 1:])


def permutation(w: BraidWord) -> Tuple[int, ...]:
    """Image of each top position (0-based) at the bottom of the braid"""
    # slots[p] holds the top position currently at p
    slots = list(range(w.strands))
    for letter in w.letters:
        i = abs(letter) - 1
        slots[i], slots[i + 1] = slots[i + 1], slots[i]
    image = [0] * w.strands
    for bottom, top in enumerate(slots):
        image[top] = bottom
    return tuple(image)


def component_count(w: BraidWord) -> int:
    """Number of link components of the closure"""
    image = permutation(w)
    seen = [False] * w.strands
    cycles = 0
    for start in range(w.strands):
        if seen[start]:
            continue
        cycles += 1
        p = start
        while not seen[p]:
            seen[p] = True
            p = image[p]
    return cycles


def letter_counts(w: BraidWord) -> Dict[int, Tuple[int, int]]:
    """Per generator index: (positive occurrences, negative occurrences)"""
    counts = {i: [0, 0] for i in range(1, w.strands)}
    for letter in w.letters:
        counts[abs(letter)][0 if letter > 0 else 1] += 1
    return {i: (pos, neg) for i, (pos, neg) in counts.items()}


def word_key(w: BraidWord) -> str:
    """Canonical cache key: strand count and free-reduced letters"""
    reduced = free_reduce(w)
    return f"B{w.strands}:{format_braid(reduced)}"


@dataclass(frozen=True)
class FamilyTemplate:
    """Family base * insert^k for k in [k_min, k_max]"""

    base: BraidWord
    insert: BraidWord
    k_min: int = 0
    k_max: int = 0
    name: str = ''

    def __post_init__(self):
        if self.k_min > self.k_max:
            raise BraidParseError(f"empty parameter range [{self.k_min}, {self.k_max}]")
        if self.k_min < 0:
            raise BraidParseError("family parameter must be non-negative")

    @property
    def strands(self) -> int:
        return max(self.base.strands, self.insert.strands)

    def parameters(self) -> List[int]:
        return list(range(self.k_min, self.k_max + 1))

    def instantiate(self, k: int) -> BraidWord:
        if k < self.k_min or k > self.k_max:
            raise BraidParseError(f"parameter {k} outside [{self.k_min}, {self.k_max}]")
        return BraidWord(self.strands, self.base.letters + self.insert.letters * k)

    def with_range(self, k_min: int, k_max: int) -> 'FamilyTemplate':
        return FamilyTemplate(self.base, self.insert, k_min, k_max, self.name)


def parse_family(base_text: str, insert_text: str, strands: int,
                 k_min: int, k_max: int, name: str = '') -> FamilyTemplate:
    return FamilyTemplate(
        base=parse_braid(base_text, strands),
        insert=parse_braid(insert_text, strands),
        k_min=k_min,
        k_max=k_max,
        name=name or f"{base_text} [{insert_text}]^k"
    )


def baldwin_family(d: int, exponents: Sequence[int]) -> BraidWord:
    """Three-braid Delta^{2d} sigma_1 sigma_2^{-a_1} ... sigma_1 sigma_2^{-a_n}"""
    letters: List[int] = _full_twist_letters(3) * d if d >= 0 else [-x for x in reversed(_full_twist_letters(3))] * (-d)
    for a in exponents:
        if a < 0:
            raise BraidParseError(f"exponents must be non-negative, got {a}")
        letters.append(1)
        letters.extend([-2] * a)
    return BraidWord(3, tuple(letters))
