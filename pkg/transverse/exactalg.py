#!/usr/bin/env python3
"""
Exact Sparse Linear Algebra
Ranks, preimage solving and Hermite/Smith normal forms over GF(2), Q and Z
"""

import heapq
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Set, Tuple

import numpy as np

from .errors import TransverseError


class CoefficientRing(str, Enum):
    GF2 = 'gf2'
    RATIONAL = 'q'
    INTEGER = 'z'

    def normalize(self, value: Any) -> Any:
        """Map a value into the ring's canonical representation"""
        if self is CoefficientRing.GF2:
            return int(value) % 2
        if self is CoefficientRing.RATIONAL:
            return Fraction(value)
        frac = Fraction(value)
        if frac.denominator != 1:
            raise ValueError(f"{value} is not an integer")
        return int(frac)

    def is_unit(self, value: Any) -> bool:
        if self is CoefficientRing.INTEGER:
            return value in (1, -1)
        return value != 0


@dataclass(frozen=True)
class SparseVector:
    length: int
    entries: Dict[int, Any] = field(default_factory=dict)

    def __post_init__(self):
        for index, value in self.entries.items():
            if not 0 <= index < self.length:
                raise ValueError(f"vector index {index} out of range 0..{self.length - 1}")
            if value == 0:
                raise ValueError("sparse vectors store no zero entries")

    @classmethod
    def from_dense(cls, values: Sequence[Any], ring: CoefficientRing) -> 'SparseVector':
        entries = {}
        for index, value in enumerate(values):
            value = ring.normalize(value)
            if value != 0:
                entries[index] = value
        return cls(len(values), entries)

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.length, dtype=object)
        for index, value in self.entries.items():
            out[index] = value
        return out

    def is_zero(self) -> bool:
        return not self.entries


@dataclass(frozen=True)
class SparseMatrix:
    rows: int
    cols: int
    entries: Dict[Tuple[int, int], Any] = field(default_factory=dict)

    def __post_init__(self):
        for (r, c), value in self.entries.items():
            if not (0 <= r < self.rows and 0 <= c < self.cols):
                raise ValueError(f"entry ({r}, {c}) outside {self.rows}x{self.cols}")
            if value == 0:
                raise ValueError("sparse matrices store no zero entries")

    @classmethod
    def from_dense(cls, array: Any, ring: CoefficientRing) -> 'SparseMatrix':
        dense = np.asarray(array, dtype=object)
        if dense.ndim != 2:
            dense = dense.reshape(len(dense), -1)
        rows, cols = dense.shape
        entries = {}
        for r in range(rows):
            for c in range(cols):
                value = ring.normalize(dense[r, c])
                if value != 0:
                    entries[(r, c)] = value
        return cls(rows, cols, entries)

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.rows, self.cols), dtype=object)
        for (r, c), value in self.entries.items():
            out[r, c] = value
        return out

    def transpose(self) -> 'SparseMatrix':
        return SparseMatrix(self.cols, self.rows, {(c, r): v for (r, c), v in self.entries.items()})

    @property
    def nnz(self) -> int:
        return len(self.entries)

    def matvec(self, x: SparseVector, ring: CoefficientRing) -> SparseVector:
        if x.length != self.cols:
            raise ValueError(f"vector length {x.length} does not match {self.cols} columns")
        acc: Dict[int, Any] = {}
        for (r, c), value in self.entries.items():
            coeff = x.entries.get(c)
            if coeff is not None:
                acc[r] = acc.get(r, 0) + value * coeff
        out = {}
        for r, value in acc.items():
            value = ring.normalize(value)
            if value != 0:
                out[r] = value
        return SparseVector(self.rows, out)


@dataclass
class _Elimination:
    """Outcome of unit-pivot elimination on a private working copy"""

    pivots: int
    steps: List[Tuple[int, int, Any, Dict[int, Any], Any]]
    residual_rows: Dict[int, Dict[int, Any]]
    residual_rhs: Dict[int, Any]


def _eliminate_gf2(matrix: SparseMatrix, rhs: Optional[Set[int]], track: bool) -> _Elimination:
    rows: Dict[int, Set[int]] = {}
    cols: Dict[int, Set[int]] = {}
    for (r, c), value in matrix.entries.items():
        if value % 2:
            rows.setdefault(r, set()).add(c)
            cols.setdefault(c, set()).add(r)
    rhs = set(rhs or ())
    heap = [(len(rs), c) for c, rs in cols.items()]
    heapq.heapify(heap)
    steps = []
    pivots = 0

    while heap:
        count, c = heapq.heappop(heap)
        rs = cols.get(c)
        if not rs:
            continue
        if len(rs) != count:
            heapq.heappush(heap, (len(rs), c))
            continue
        r = min(rs, key=lambda x: (len(rows[x]), x))
        prow = rows.pop(r)
        for cc in prow:
            cols[cc].discard(r)
        b_r = r in rhs
        rhs.discard(r)
        for r2 in list(cols[c]):
            row2 = rows[r2]
            for cc in prow:
                if cc in row2:
                    row2.remove(cc)
                    cols[cc].discard(r2)
                else:
                    row2.add(cc)
                    cols[cc].add(r2)
            if b_r:
                rhs ^= {r2}
            if not row2:
                del rows[r2]
        del cols[c]
        pivots += 1
        if track:
            steps.append((r, c, 1, {cc: 1 for cc in prow}, 1 if b_r else 0))

    residual_rows = {r: {c: 1 for c in row} for r, row in rows.items() if row}
    return _Elimination(pivots, steps, residual_rows, {r: 1 for r in rhs})


def _eliminate_exact(matrix: SparseMatrix, ring: CoefficientRing,
                     rhs: Optional[Dict[int, Any]], track: bool) -> _Elimination:
    """Unit-pivot elimination over Q or Z; over Z non-unit columns are left behind"""
    rows: Dict[int, Dict[int, Any]] = {}
    cols: Dict[int, Set[int]] = {}
    for (r, c), value in matrix.entries.items():
        value = ring.normalize(value)
        if value != 0:
            rows.setdefault(r, {})[c] = value
            cols.setdefault(c, set()).add(r)
    rhs = {r: ring.normalize(v) for r, v in (rhs or {}).items() if v != 0}
    steps = []
    pivots = 0
    field_like = ring is not CoefficientRing.INTEGER

    progress = True
    while progress:
        progress = False
        heap = [(len(rs), c) for c, rs in cols.items() if rs]
        heapq.heapify(heap)
        while heap:
            count, c = heapq.heappop(heap)
            rs = cols.get(c)
            if not rs:
                continue
            if len(rs) != count:
                heapq.heappush(heap, (len(rs), c))
                continue
            candidates = [x for x in rs if ring.is_unit(rows[x][c])]
            if not candidates:
                continue
            r = min(candidates, key=lambda x: (len(rows[x]), x))
            prow = rows.pop(r)
            for cc in prow:
                cols[cc].discard(r)
            p = prow[c]
            b_r = rhs.pop(r, 0)
            for r2 in list(cols[c]):
                row2 = rows[r2]
                factor = row2[c] / p if field_like else row2[c] * p
                for cc, value in prow.items():
                    new = row2.get(cc, 0) - factor * value
                    if new == 0:
                        if cc in row2:
                            del row2[cc]
                            cols[cc].discard(r2)
                    else:
                        if cc not in row2:
                            cols[cc].add(r2)
                        row2[cc] = new
                if b_r:
                    new = rhs.get(r2, 0) - factor * b_r
                    if new == 0:
                        rhs.pop(r2, None)
                    else:
                        rhs[r2] = new
                if not row2:
                    del rows[r2]
            del cols[c]
            pivots += 1
            progress = True
            if track:
                steps.append((r, c, p, prow, b_r))

    residual_rows = {r: dict(row) for r, row in rows.items() if row}
    return _Elimination(pivots, steps, residual_rows, rhs)


def _eliminate(matrix: SparseMatrix, ring: CoefficientRing,
               rhs: Optional[SparseVector] = None, track: bool = False) -> _Elimination:
    if ring is CoefficientRing.GF2:
        bits = None if rhs is None else {r for r, v in rhs.entries.items() if v % 2}
        return _eliminate_gf2(matrix, bits, track)
    return _eliminate_exact(matrix, ring, None if rhs is None else rhs.entries, track)


def rank(M: SparseMatrix, ring: CoefficientRing) -> int:
    """Exact rank; integer matrices are ranked over Q"""
    if ring is CoefficientRing.INTEGER:
        ring = CoefficientRing.RATIONAL
    return _eliminate(M, ring).pivots


def in_image(M: SparseMatrix, b: SparseVector, ring: CoefficientRing) -> bool:
    """Whether M x = b has a solution, without back-substitution bookkeeping"""
    if b.length != M.rows:
        raise ValueError(f"rhs length {b.length} does not match {M.rows} rows")
    if ring is not CoefficientRing.INTEGER:
        return not _eliminate(M, ring, b).residual_rhs
    return solve(M, b, ring) is not None


def solve(M: SparseMatrix, b: SparseVector, ring: CoefficientRing) -> Optional[SparseVector]:
    """
    Solve M x = b exactly in the ring

    Unit pivots are eliminated sparsely; over Z the non-unit residual
    block is solved through its Hermite normal form so that integrality
    is respected. The solution is re-verified before it is returned.

    Args:
        M: Coefficient matrix
        b: Right-hand side
        ring: Coefficient ring

    Returns:
        A solution vector, or None when b is not in the image
    """
    if b.length != M.rows:
        raise ValueError(f"rhs length {b.length} does not match {M.rows} rows")
    elim = _eliminate(M, ring, b, track=True)
    x: Dict[int, Any] = {}

    if ring is CoefficientRing.INTEGER and elim.residual_rows:
        res_rows = sorted(set(elim.residual_rows) | set(elim.residual_rhs))
        res_cols = sorted({c for row in elim.residual_rows.values() for c in row})
        dense = [[elim.residual_rows.get(r, {}).get(c, 0) for c in res_cols] for r in res_rows]
        target = [elim.residual_rhs.get(r, 0) for r in res_rows]
        y = _hnf_solve(dense, target, len(res_cols))
        if y is None:
            return None
        for c, value in zip(res_cols, y):
            if value != 0:
                x[c] = value
    elif elim.residual_rhs:
        return None

    for r, c, p, prow, b_r in reversed(elim.steps):
        acc = b_r
        for cc, value in prow.items():
            if cc != c and cc in x:
                acc = acc - value * x[cc]
        if ring is CoefficientRing.GF2:
            acc %= 2
        elif ring is CoefficientRing.INTEGER:
            acc = acc * p
        else:
            acc = acc / p
        if acc != 0:
            x[c] = acc
        else:
            x.pop(c, None)

    solution = SparseVector(M.cols, {c: ring.normalize(v) for c, v in x.items() if ring.normalize(v) != 0})
    if M.matvec(solution, ring).entries != {r: ring.normalize(v) for r, v in b.entries.items()}:
        raise TransverseError("solver produced a vector that fails M x = b")
    return solution


def _ext_gcd(a: int, b: int) -> Tuple[int, int, int]:
    """Return (g, s, t) with s*a + t*b = g >= 0"""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


@dataclass(frozen=True)
class HermiteForm:
    """Column-style Hermite form H = A V with unimodular V"""

    H: List[List[int]]
    V: List[List[int]]
    pivots: Tuple[Tuple[int, int], ...]


def _as_int_rows(M: Any) -> List[List[int]]:
    if isinstance(M, SparseMatrix):
        dense = M.to_dense()
    else:
        dense = np.asarray(M, dtype=object)
    if dense.size == 0:
        return [[] for _ in range(dense.shape[0])] if dense.ndim == 2 else []
    return [[int(v) for v in row] for row in dense]


def hermite_normal_form(M: Any) -> HermiteForm:
    """Lower column-echelon Hermite form via extended-gcd column operations"""
    H = _as_int_rows(M)
    m = len(H)
    n = len(H[0]) if m else 0
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def col_combine(p: int, c: int, s: int, t: int, u: int, v: int):
        # (col_p, col_c) <- (s col_p + t col_c, u col_p + v col_c)
        for mat in (H, V):
            for row in mat:
                a, b = row[p], row[c]
                row[p], row[c] = s * a + t * b, u * a + v * b

    pivots = []
    pc = 0
    for r in range(m):
        if pc >= n:
            break
        for c in range(pc + 1, n):
            if H[r][c] != 0:
                a, b = H[r][pc], H[r][c]
                g, s, t = _ext_gcd(a, b)
                col_combine(pc, c, s, t, -b // g, a // g)
        if H[r][pc] == 0:
            continue
        if H[r][pc] < 0:
            for mat in (H, V):
                for row in mat:
                    row[pc] = -row[pc]
        piv = H[r][pc]
        for c in range(pc):
            q = H[r][c] // piv
            if q:
                for mat in (H, V):
                    for row in mat:
                        row[c] -= q * row[pc]
        pivots.append((r, pc))
        pc += 1
    return HermiteForm(H, V, tuple(pivots))


def _hnf_solve(A: List[List[int]], b: List[int], n: int) -> Optional[List[int]]:
    """Integer solution of A y = b, or None"""
    if n == 0:
        return [] if all(v == 0 for v in b) else None
    form = hermite_normal_form(A)
    H, V = form.H, form.V
    pivot_col = dict(form.pivots)
    z = [0] * n
    for r, row in enumerate(H):
        if r in pivot_col:
            k = pivot_col[r]
            rest = b[r] - sum(row[c] * z[c] for c in range(k))
            if rest % row[k] != 0:
                return None
            z[k] = rest // row[k]
        elif sum(row[c] * z[c] for c in range(n)) != b[r]:
            return None
    return [sum(V[i][k] * z[k] for k in range(n)) for i in range(n)]


@dataclass(frozen=True)
class SmithForm:
    """U M V = S with unimodular U, V and d_1 | d_2 | ... on the diagonal"""

    S: List[List[int]]
    U: List[List[int]]
    V: List[List[int]]

    @property
    def diagonal(self) -> List[int]:
        return [self.S[k][k] for k in range(min(len(self.S), len(self.S[0]) if self.S else 0))]


def smith_normal_form(M: Any) -> SmithForm:
    A = _as_int_rows(M)
    m = len(A)
    n = len(A[0]) if m else 0
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i: int, k: int):
        A[i], A[k] = A[k], A[i]
        U[i], U[k] = U[k], U[i]

    def swap_cols(j: int, k: int):
        for mat in (A, V):
            for row in mat:
                row[j], row[k] = row[k], row[j]

    def add_row(dst: int, src: int, q: int):
        for mat in (A, U):
            mat[dst] = [x + q * y for x, y in zip(mat[dst], mat[src])]

    def add_col(dst: int, src: int, q: int):
        for mat in (A, V):
            for row in mat:
                row[dst] += q * row[src]

    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    if A[i][j] != 0 and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                return SmithForm(A, U, V)
            swap_rows(t, best[0])
            swap_cols(t, best[1])
            p = A[t][t]
            dirty = False
            for i in range(t + 1, m):
                q = A[i][t] // p
                if q:
                    add_row(i, t, -q)
                if A[i][t]:
                    dirty = True
            for j in range(t + 1, n):
                q = A[t][j] // p
                if q:
                    add_col(j, t, -q)
                if A[t][j]:
                    dirty = True
            if dirty:
                continue
            bad = next((i for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % p), None)
            if bad is not None:
                add_row(t, bad, 1)
                continue
            break
        if A[t][t] < 0:
            for mat in (A, U):
                mat[t] = [-x for x in mat[t]]
    return SmithForm(A, U, V)


def smith_invariants(M: SparseMatrix) -> List[int]:
    """Nonzero invariant factors of an integer matrix"""
    elim = _eliminate_exact(M, CoefficientRing.INTEGER, None, track=False)
    factors = [1] * elim.pivots
    if elim.residual_rows:
        res_rows = sorted(elim.residual_rows)
        res_cols = sorted({c for row in elim.residual_rows.values() for c in row})
        dense = [[elim.residual_rows[r].get(c, 0) for c in res_cols] for r in res_rows]
        factors.extend(d for d in smith_normal_form(dense).diagonal if d != 0)
    return factors
