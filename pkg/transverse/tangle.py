#!/usr/bin/env python3
"""
Tangle Diagrams
Closures of braid-like tile words with circle tracking, orientations and resolutions
"""

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from .braid import BraidWord
from .errors import DiagramError

DOWN = 1
UP = -1


class TileKind(str, Enum):
    CROSSING = 'crossing'
    CAPCUP = 'capcup'


@dataclass(frozen=True)
class Tile:
    """One row of a tile word acting on positions index, index + 1"""

    kind: TileKind
    index: int
    sign: int = 0

    @classmethod
    def crossing(cls, index: int, sign: int) -> 'Tile':
        if sign not in (1, -1):
            raise DiagramError(f"crossing sign must be +1 or -1, got {sign}")
        return cls(TileKind.CROSSING, index, sign)

    @classmethod
    def capcup(cls, index: int) -> 'Tile':
        return cls(TileKind.CAPCUP, index, 0)

    @property
    def is_crossing(self) -> bool:
        return self.kind is TileKind.CROSSING


@dataclass(frozen=True)
class KauffmanState:
    """One resolution bit per crossing tile, in tile order"""

    bits: Tuple[int, ...]

    @classmethod
    def from_string(cls, text: str) -> 'KauffmanState':
        if any(ch not in '01' for ch in text):
            raise DiagramError(f"state bitstring must use 0/1, got {text!r}")
        return cls(tuple(int(ch) for ch in text))

    @classmethod
    def from_mask(cls, mask: int, n: int) -> 'KauffmanState':
        return cls(tuple((mask >> k) & 1 for k in range(n)))

    @property
    def mask(self) -> int:
        return sum(bit << k for k, bit in enumerate(self.bits))

    @property
    def r(self) -> int:
        return sum(self.bits)

    def __len__(self) -> int:
        return len(self.bits)

    def __str__(self) -> str:
        return ''.join(str(bit) for bit in self.bits)


@dataclass(frozen=True)
class CircleDecomposition:
    circle_count: int
    segment_circle: Tuple[int, ...]
    # per crossing: (circle, circle, merges) for bit 0, None for bit 1
    crossing_circles: Tuple[Optional[Tuple[int, int, bool]], ...]


@dataclass(frozen=True)
class ArcStructure:
    """Maximal straight runs of segments between tile ports"""

    n_arcs: int
    segment_arc: Tuple[int, ...]
    # per tile: arcs at (top i, top i+1, bottom i, bottom i+1)
    tile_ports: Tuple[Tuple[int, int, int, int], ...]


@dataclass(frozen=True)
class CrossingVisit:
    crossing: int
    over: bool


def circles_from_unions(n_arcs: int, pairs: Iterable[Tuple[int, int]]) -> Tuple[int, Tuple[int, ...]]:
    """
    Canonical circle labels from arc unions

    Circles are numbered by their smallest arc, which is also their
    smallest segment since arcs are numbered by minimal segment.

    Returns:
        Tuple of (circle count, circle id per arc)
    """
    parent = list(range(n_arcs))

    def find(x: int) -> int:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    for a, b in pairs:
        ra, rb = find(a), find(b)
        if ra != rb:
            if ra < rb:
                parent[rb] = ra
            else:
                parent[ra] = rb

    labels: Dict[int, int] = {}
    circle = []
    for arc in range(n_arcs):
        root = find(arc)
        if root not in labels:
            labels[root] = len(labels)
        circle.append(labels[root])
    return len(labels), tuple(circle)


@dataclass(frozen=True)
class TangleDiagram:
    """
    Closure of a tile word on ``strands`` positions

    Segment (t, p) is the piece of position p entering tile t from above;
    its id is ``t * strands + p - 1``. The bottom of the last tile is
    identified with level 0 by the closure. ``orientations`` holds one
    direction flag (DOWN or UP at the component's smallest segment) per
    component in canonical order; None means all DOWN.
    """

    strands: int
    tiles: Tuple[Tile, ...] = field(default=())
    orientations: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        if self.strands < 1:
            raise DiagramError(f"strand count must be >= 1, got {self.strands}")
        object.__setattr__(self, 'tiles', tuple(self.tiles))
        for tile in self.tiles:
            if tile.index < 1 or tile.index > self.strands - 1:
                raise DiagramError(f"tile index {tile.index} out of range 1..{self.strands - 1}")
        if self.orientations is not None:
            flags = tuple(int(x) for x in self.orientations)
            if any(x not in (DOWN, UP) for x in flags):
                raise DiagramError("orientation flags must be +1 (down) or -1 (up)")
            if len(flags) != len(self.components):
                raise DiagramError(
                    f"expected {len(self.components)} orientation flags, got {len(flags)}"
                )
            object.__setattr__(self, 'orientations', flags)

    # -- geometry -------------------------------------------------------

    @property
    def levels(self) -> int:
        return max(len(self.tiles), 1)

    @property
    def segment_count(self) -> int:
        return self.levels * self.strands

    def segment(self, level: int, position: int) -> int:
        return (level % self.levels) * self.strands + position - 1

    @cached_property
    def crossing_tiles(self) -> Tuple[int, ...]:
        """Tile index of each crossing, in crossing order"""
        return tuple(t for t, tile in enumerate(self.tiles) if tile.is_crossing)

    @property
    def n_crossings(self) -> int:
        return len(self.crossing_tiles)

    @cached_property
    def arc_structure(self) -> ArcStructure:
        pairs = []
        for t, tile in enumerate(self.tiles):
            for p in range(1, self.strands + 1):
                if p != tile.index and p != tile.index + 1:
                    pairs.append((self.segment(t, p), self.segment(t + 1, p)))
        n_arcs, segment_arc = circles_from_unions(self.segment_count, pairs)
        ports = []
        for t, tile in enumerate(self.tiles):
            i = tile.index
            ports.append((
                segment_arc[self.segment(t, i)],
                segment_arc[self.segment(t, i + 1)],
                segment_arc[self.segment(t + 1, i)],
                segment_arc[self.segment(t + 1, i + 1)],
            ))
        return ArcStructure(n_arcs, segment_arc, tuple(ports))

    def is_vertical(self, t: int, bit: int) -> bool:
        """Whether tile t resolves to two vertical strands under the bit"""
        tile = self.tiles[t]
        if not tile.is_crossing:
            return False
        return (tile.sign > 0 and bit == 0) or (tile.sign < 0 and bit == 1)

    def circle_unions(self, mask: int) -> List[Tuple[int, int]]:
        """Arc unions realising the resolution encoded by a crossing bitmask"""
        arcs = self.arc_structure
        pairs = []
        k = 0
        for t, tile in enumerate(self.tiles):
            top_i, top_j, bot_i, bot_j = arcs.tile_ports[t]
            if tile.is_crossing:
                vertical = self.is_vertical(t, (mask >> k) & 1)
                k += 1
            else:
                vertical = False
            if vertical:
                pairs.append((top_i, bot_i))
                pairs.append((top_j, bot_j))
            else:
                pairs.append((top_i, top_j))
                pairs.append((bot_i, bot_j))
        return pairs

    def arc_circles(self, mask: int) -> Tuple[int, Tuple[int, ...]]:
        return circles_from_unions(self.arc_structure.n_arcs, self.circle_unions(mask))

    # -- components and orientation ------------------------------------

    def _step(self, seg: int, down: bool) -> Tuple[int, bool, Optional[Tuple[int, bool]]]:
        """Follow the link one segment; returns next segment, direction and crossing pass.

        The crossing pass is (tile, strand_a) where strand a runs from top
        port i to bottom port i + 1.
        """
        n_tiles = len(self.tiles)
        if n_tiles == 0:
            return seg, down, None
        t, p = divmod(seg, self.strands)
        p += 1
        if down:
            tile = self.tiles[t]
            i = tile.index
            if p != i and p != i + 1:
                return self.segment(t + 1, p), True, None
            other = i + 1 if p == i else i
            if tile.is_crossing:
                return self.segment(t + 1, other), True, (t, p == i)
            return self.segment(t, other), False, None

        above = (t - 1) % n_tiles
        tile = self.tiles[above]
        i = tile.index
        if p != i and p != i + 1:
            return self.segment(above, p), False, None
        other = i + 1 if p == i else i
        if tile.is_crossing:
            return self.segment(above, other), False, (above, p == i + 1)
        return self.segment(t, other), True, None

    def _walk(self, start: int, down: bool) -> List[Tuple[int, bool, Optional[Tuple[int, bool]]]]:
        path = []
        seg, direction = start, down
        while True:
            nxt, nxt_dir, passed = self._step(seg, direction)
            path.append((seg, direction, passed))
            seg, direction = nxt, nxt_dir
            if seg == start and direction == down:
                return path

    @cached_property
    def components(self) -> Tuple[Tuple[int, ...], ...]:
        """Segments of each component, components ordered by smallest segment"""
        seen = [False] * self.segment_count
        comps = []
        for start in range(self.segment_count):
            if seen[start]:
                continue
            segs = []
            for seg, _, _ in self._walk(start, True):
                seen[seg] = True
                segs.append(seg)
            comps.append(tuple(sorted(set(segs))))
        return tuple(comps)

    @property
    def orientation_flags(self) -> Tuple[int, ...]:
        if self.orientations is None:
            return (DOWN,) * len(self.components)
        return self.orientations

    @cached_property
    def segment_directions(self) -> Tuple[int, ...]:
        dirs = [0] * self.segment_count
        for comp, flag in zip(self.components, self.orientation_flags):
            for seg, down, _ in self._walk(comp[0], flag == DOWN):
                dirs[seg] = DOWN if down else UP
        return tuple(dirs)

    @cached_property
    def crossing_signs(self) -> Tuple[int, ...]:
        dirs = self.segment_directions
        signs = []
        for t in self.crossing_tiles:
            tile = self.tiles[t]
            signs.append(tile.sign * dirs[self.segment(t, tile.index)] * dirs[self.segment(t, tile.index + 1)])
        return tuple(signs)

    @property
    def n_plus(self) -> int:
        return sum(1 for s in self.crossing_signs if s > 0)

    @property
    def n_minus(self) -> int:
        return sum(1 for s in self.crossing_signs if s < 0)

    def traversal(self) -> List[CrossingVisit]:
        """Crossing passes in order, walking components from their basepoints"""
        crossing_of_tile = {t: k for k, t in enumerate(self.crossing_tiles)}
        visits = []
        for comp, flag in zip(self.components, self.orientation_flags):
            for _, _, passed in self._walk(comp[0], flag == DOWN):
                if passed is None:
                    continue
                t, strand_a = passed
                sign = self.tiles[t].sign
                # positive letters put the strand from top port i+1 on top
                over = (not strand_a) if sign > 0 else strand_a
                visits.append(CrossingVisit(crossing_of_tile[t], over))
        return visits

    def with_orientations(self, flags: Sequence[int]) -> 'TangleDiagram':
        return TangleDiagram(self.strands, self.tiles, tuple(flags))

    # -- rewriting ------------------------------------------------------

    def _drop_tiles(self, dropped: Iterable[int], replacements: Optional[Dict[int, Tile]] = None,
                    orientations: Optional[Sequence[int]] = None) -> 'TangleDiagram':
        """Remove and replace tiles, carrying orientations through the rewrite.

        New segment (t', p) is matched with the old segment entering the same
        surviving tile, so its direction is read off the old traversal.
        """
        dropped = set(dropped)
        replacements = replacements or {}
        kept = [t for t in range(len(self.tiles)) if t not in dropped]
        tiles = tuple(replacements.get(t, self.tiles[t]) for t in kept)
        bare = TangleDiagram(self.strands, tiles)
        if orientations is not None:
            return bare.with_orientations(orientations)
        old_dirs = self.segment_directions
        flags = []
        for comp in bare.components:
            level, p = divmod(comp[0], self.strands)
            old_level = kept[level] if kept else 0
            flags.append(old_dirs[self.segment(old_level, p + 1)])
        return bare.with_orientations(flags)

    def to_json(self) -> Dict[str, Any]:
        return {
            'strands': self.strands,
            'tiles': [
                {'kind': tile.kind.value, 'index': tile.index, 'sign': tile.sign}
                for tile in self.tiles
            ],
            'orientations': list(self.orientation_flags),
        }

    @classmethod
    def from_json(cls, payload: Dict[str, Any]) -> 'TangleDiagram':
        tiles = []
        for item in payload['tiles']:
            if item['kind'] == TileKind.CROSSING.value:
                tiles.append(Tile.crossing(item['index'], item['sign']))
            else:
                tiles.append(Tile.capcup(item['index']))
        return cls(payload['strands'], tuple(tiles), payload.get('orientations'))


def from_braid(w: BraidWord) -> TangleDiagram:
    """Closure diagram with every letter a crossing and all strands oriented down"""
    tiles = tuple(Tile.crossing(abs(x), 1 if x > 0 else -1) for x in w.letters)
    return TangleDiagram(w.strands, tiles)


def resolve(D: TangleDiagram, s: KauffmanState) -> CircleDecomposition:
    """Circles of the resolution of D selected by state s"""
    if len(s) != D.n_crossings:
        raise DiagramError(f"state has {len(s)} bits, diagram has {D.n_crossings} crossings")
    arcs = D.arc_structure
    count, arc_circle = D.arc_circles(s.mask)
    crossing_circles: List[Optional[Tuple[int, int, bool]]] = []
    for k, t in enumerate(D.crossing_tiles):
        if s.bits[k] == 1:
            crossing_circles.append(None)
            continue
        top_i, top_j, bot_i, _ = arcs.tile_ports[t]
        if D.is_vertical(t, 0):
            a, b = arc_circle[top_i], arc_circle[top_j]
        else:
            a, b = arc_circle[top_i], arc_circle[bot_i]
        crossing_circles.append((a, b, a != b))
    segment_circle = tuple(arc_circle[a] for a in arcs.segment_arc)
    return CircleDecomposition(count, segment_circle, tuple(crossing_circles))


def oriented_resolution_state(D: TangleDiagram) -> KauffmanState:
    return KauffmanState(tuple(0 if sign > 0 else 1 for sign in D.crossing_signs))


def crossing_signs(D: TangleDiagram) -> List[int]:
    return list(D.crossing_signs)


def khovanov_resolution(D: TangleDiagram, c: int, choice: int,
                        orientations: Optional[Sequence[int]] = None) -> TangleDiagram:
    """
    Resolve crossing c (0-based, among crossing tiles)

    A vertical resolution removes the tile; a flat one becomes a CapCup.
    Orientation flags are carried from D unless given explicitly.

    Args:
        D: Diagram to resolve
        c: Crossing position
        choice: 0 or 1 resolution
        orientations: Optional flags for the resolved diagram

    Returns:
        Resolved diagram
    """
    if c < 0 or c >= D.n_crossings:
        raise DiagramError(f"crossing position {c} out of range 0..{D.n_crossings - 1}")
    if choice not in (0, 1):
        raise DiagramError(f"resolution choice must be 0 or 1, got {choice}")
    t = D.crossing_tiles[c]
    if D.is_vertical(t, choice):
        return D._drop_tiles([t], orientations=orientations)
    return D._drop_tiles([], {t: Tile.capcup(D.tiles[t].index)}, orientations=orientations)


def smooth_oriented(D: TangleDiagram, c: int) -> TangleDiagram:
    """Oriented smoothing of crossing c (identity for parallel strands)"""
    t = D.crossing_tiles[c]
    tile = D.tiles[t]
    dirs = D.segment_directions
    if dirs[D.segment(t, tile.index)] == dirs[D.segment(t, tile.index + 1)]:
        return D._drop_tiles([t])
    return D._drop_tiles([], {t: Tile.capcup(tile.index)})


def switch_crossing(D: TangleDiagram, c: int) -> TangleDiagram:
    t = D.crossing_tiles[c]
    tile = D.tiles[t]
    return D._drop_tiles([], {t: Tile.crossing(tile.index, -tile.sign)}, orientations=D.orientation_flags)


def simplify(D: TangleDiagram) -> TangleDiagram:
    """
    Remove kinks and bigons between cyclically adjacent tiles

    A crossing next to a cap-cup on the same index is a Reidemeister I
    kink; two adjacent crossings of opposite sign on the same index form a
    Reidemeister II bigon. The link type is unchanged.
    """
    current = D if D.orientations is not None else D.with_orientations(D.orientation_flags)
    while True:
        n_tiles = len(current.tiles)
        drop: Optional[List[int]] = None
        if n_tiles >= 2:
            for t in range(n_tiles):
                u = (t + 1) % n_tiles
                x, y = current.tiles[t], current.tiles[u]
                if x.index != y.index:
                    continue
                if x.is_crossing and not y.is_crossing:
                    drop = [t]
                elif not x.is_crossing and y.is_crossing:
                    drop = [u]
                elif x.is_crossing and y.is_crossing and x.sign == -y.sign and t != u:
                    drop = [t, u]
                if drop:
                    break
        if not drop:
            return current
        current = current._drop_tiles(drop)


def parse_orientations(text: str, component_total: int) -> Tuple[int, ...]:
    """Parse ``"1:down,3:up"`` into flags; unnamed components stay down"""
    flags = [DOWN] * component_total
    if not text or not text.strip():
        return tuple(flags)
    for item in text.split(','):
        try:
            number, direction = item.strip().split(':')
            index = int(number)
        except ValueError:
            raise DiagramError(f"orientation entry must look like '2:up', got {item!r}")
        if index < 1 or index > component_total:
            raise DiagramError(f"component {index} out of range 1..{component_total}")
        direction = direction.strip().lower()
        if direction not in ('down', 'up'):
            raise DiagramError(f"direction must be 'down' or 'up', got {direction!r}")
        flags[index - 1] = DOWN if direction == 'down' else UP
    return tuple(flags)
