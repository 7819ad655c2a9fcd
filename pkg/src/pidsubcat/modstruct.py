"""Finitely generated modules in invariant-factor form, and the Smith normal form.

A module is stored up to isomorphism: the rank of its free part plus, for
every prime, the weakly increasing list of exponents of its primary cyclic
summands. Generators are ordered globally as free generators first, then the
torsion generators prime by prime (canonical prime order) with exponents
ascending. Homomorphisms and certificates are written against that order.
"""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any

from .ring import ZZ, FieldRing, Ring, RingError, parse_ring, same_ring

Matrix = list  # list of rows, each a list of ring elements


@lru_cache(maxsize=None)
def _checked_prime(ring: Ring, p) -> bool:
    return ring.is_prime(p)


@dataclass(frozen=True)
class FgModule:
    """``R^rank`` plus primary torsion ``R/p^l`` for each ``(p, l)``.

    ``torsion`` may be passed as a mapping ``{prime: exponents}``; it is stored
    as a sorted tuple of ``(prime, partition)`` pairs so that isomorphic
    modules compare (and hash) equal.
    """

    ring: Ring
    rank: int = 0
    torsion: Any = field(default=())

    def __post_init__(self):
        if self.rank < 0:
            raise ValueError("rank must be non-negative")
        items = self.torsion.items() if isinstance(self.torsion, Mapping) else self.torsion
        merged: dict[Any, list[int]] = {}
        for p, part in items:
            part = [int(e) for e in part]
            if not part:
                continue
            p = self.ring.canonical(self.ring.coerce(p))
            if not _checked_prime(self.ring, p):
                raise RingError(f"{self.ring.format(p)} is not a prime of {self.ring}")
            if any(e < 1 for e in part):
                raise ValueError("torsion exponents must be positive")
            merged.setdefault(p, []).extend(part)
        canon = tuple(
            (p, tuple(sorted(merged[p])))
            for p in sorted(merged, key=self.ring.prime_key)
        )
        object.__setattr__(self, "torsion", canon)

    # --- accessors ---------------------------------------------------------
    @property
    def primes(self) -> list:
        return [p for p, _ in self.torsion]

    def partition(self, p) -> tuple[int, ...]:
        p = self.ring.canonical(self.ring.coerce(p))
        for q, part in self.torsion:
            if q == p:
                return part
        return ()

    def p_length(self, p) -> int:
        return sum(self.partition(p))

    @property
    def is_zero(self) -> bool:
        return self.rank == 0 and not self.torsion

    @property
    def is_torsion(self) -> bool:
        return self.rank == 0

    def torsion_part(self) -> FgModule:
        return FgModule(self.ring, 0, self.torsion)

    def summands(self) -> list:
        """Cyclic summands in generator order: ``0`` for ``R``, ``(p, l)`` for ``R/p^l``."""
        out: list = [0] * self.rank
        for p, part in self.torsion:
            out += [(p, e) for e in part]
        return out

    def generator_orders(self) -> list:
        ring = self.ring
        return [ring.zero if s == 0 else ring.pow(s[0], s[1]) for s in self.summands()]

    @property
    def ngens(self) -> int:
        return self.rank + sum(len(part) for _, part in self.torsion)

    def __str__(self) -> str:
        ring = self.ring
        bits = []
        if self.rank:
            bits.append(f"R^{self.rank}" if self.rank > 1 else "R")
        for p, part in self.torsion:
            for e in part:
                bits.append(f"R/{ring.format(p)}^{e}" if e > 1 else f"R/{ring.format(p)}")
        return " + ".join(bits) if bits else "0"

    # --- JSON --------------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "ring": str(self.ring),
            "rank": self.rank,
            "torsion": {self.ring.format(p): list(part) for p, part in self.torsion},
        }

    @classmethod
    def from_json(cls, obj: Mapping, ring: Ring | None = None) -> FgModule:
        r = parse_ring(obj["ring"]) if "ring" in obj else (ring or ZZ)
        if ring is not None:
            same_ring(ring, r)
        torsion = obj.get("torsion", {})
        parts = {r.parse(k): v for k, v in torsion.items()}
        for v in parts.values():
            if list(v) != sorted(v):
                raise ValueError("torsion partitions must be weakly increasing")
        return cls(r, int(obj.get("rank", 0)), parts)


def zero_module(ring: Ring) -> FgModule:
    return FgModule(ring)


def free(ring: Ring, n: int) -> FgModule:
    return FgModule(ring, n)


def cyclic(ring: Ring, p, e: int) -> FgModule:
    return FgModule(ring, 0, {p: [e]}) if e > 0 else FgModule(ring)


def module_from_summands(ring: Ring, summands) -> FgModule:
    rank = 0
    parts: dict = {}
    for s in summands:
        if s == 0:
            rank += 1
        else:
            parts.setdefault(s[0], []).append(s[1])
    return FgModule(ring, rank, parts)


def direct_sum(*mods: FgModule) -> FgModule:
    if not mods:
        raise ValueError("direct_sum needs at least one module")
    ring = same_ring(*(m.ring for m in mods))
    return module_from_summands(ring, [s for m in mods for s in m.summands()])


def power(M: FgModule, n: int) -> FgModule:
    if n == 0:
        return zero_module(M.ring)
    return direct_sum(*([M] * n))


@dataclass(frozen=True)
class LengthStats:
    rank: int
    p_lengths: dict
    length: int | float  # math.inf when the module has a free part over a non-field


def length_stats(M: FgModule) -> LengthStats:
    p_lengths = {p: sum(part) for p, part in M.torsion}
    if isinstance(M.ring, FieldRing):
        length: int | float = M.rank
    elif M.rank:
        length = math.inf
    else:
        length = sum(p_lengths.values())
    return LengthStats(M.rank, p_lengths, length)


# ---------------------------------------------------------------------------
# presentations and Smith normal form


@dataclass(frozen=True)
class Presentation:
    """Matrix ``A`` (rows x cols) presenting ``coker(A: R^cols -> R^rows)``."""

    ring: Ring
    rows: int
    cols: int
    entries: tuple  # row-major tuple of rows

    @classmethod
    def from_rows(cls, ring: Ring, rows, cols: int | None = None) -> Presentation:
        rows = [tuple(ring.coerce(x) for x in r) for r in rows]
        ncols = cols if cols is not None else (len(rows[0]) if rows else 0)
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged matrix")
        return cls(ring, len(rows), ncols, tuple(rows))

    def matrix(self) -> Matrix:
        return [list(r) for r in self.entries]

    def to_json(self) -> dict:
        return {
            "ring": str(self.ring),
            "rows": self.rows,
            "cols": self.cols,
            "entries": [self.ring.format(x) for r in self.entries for x in r],
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> Presentation:
        ring = parse_ring(obj.get("ring", "Z"))
        m, n = int(obj["rows"]), int(obj["cols"])
        flat = [ring.coerce(x) for x in obj["entries"]]
        if len(flat) != m * n:
            raise ValueError(f"expected {m * n} entries, got {len(flat)}")
        return cls(ring, m, n, tuple(tuple(flat[i * n:(i + 1) * n]) for i in range(m)))


def identity(ring: Ring, n: int) -> Matrix:
    return [[ring.one if i == j else ring.zero for j in range(n)] for i in range(n)]


def matmul(ring: Ring, A: Matrix, B: Matrix, inner: int | None = None) -> Matrix:
    k = inner if inner is not None else (len(B) if B else 0)
    ncols = len(B[0]) if B else 0
    out = []
    for row in A:
        new = []
        for j in range(ncols):
            acc = ring.zero
            for t in range(k):
                if not ring.is_zero(row[t]) and not ring.is_zero(B[t][j]):
                    acc = ring.add(acc, ring.mul(row[t], B[t][j]))
            new.append(acc)
        out.append(new)
    return out


def smith_normal_form(ring: Ring, A: Matrix, ncols: int | None = None):
    """Return ``(U, D, V)`` with ``U @ A @ V == D`` and ``d_1 | d_2 | ...``.

    Pivots are chosen by smallest Euclidean norm in the remaining block.
    ``U`` and ``V`` are products of elementary operations, hence unimodular.
    Diagonal entries come out canonical (positive / monic / one).
    """
    m = len(A)
    n = ncols if ncols is not None else (len(A[0]) if A else 0)
    D = [list(r) for r in A]
    U = identity(ring, m)
    V = identity(ring, n)
    z = ring.zero
    norm = ring.norm

    def zero(x):
        return x == z

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for M in (D, V):
            for row in M:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, c):  # row_dst += c * row_src
        for M in (D, U):
            rs, rd = M[src], M[dst]
            for k in range(len(rd)):
                if rs[k] != z:
                    rd[k] = ring.add(rd[k], ring.mul(c, rs[k]))

    def add_col(dst, src, c):  # col_dst += c * col_src
        for M in (D, V):
            for row in M:
                if row[src] != z:
                    row[dst] = ring.add(row[dst], ring.mul(c, row[src]))

    for t in range(min(m, n)):
        best = _smallest_entry(ring, D, t, m, n)
        if best is None:
            break
        swap_rows(t, best[1])
        swap_cols(t, best[2])
        while True:
            dirty = False
            for i in range(t + 1, m):
                if not zero(D[i][t]):
                    q, r = ring.divmod(D[i][t], D[t][t])
                    add_row(i, t, ring.neg(q))
                    dirty = dirty or not zero(r)
            for j in range(t + 1, n):
                if not zero(D[t][j]):
                    q, r = ring.divmod(D[t][j], D[t][t])
                    add_col(j, t, ring.neg(q))
                    dirty = dirty or not zero(r)
            if dirty:
                # a remainder survived: move the smallest leftover onto the pivot
                cand = [(norm(D[i][t]), i, t) for i in range(t + 1, m) if not zero(D[i][t])]
                cand += [(norm(D[t][j]), t, j) for j in range(t + 1, n) if not zero(D[t][j])]
                _, i, j = min(cand)
                swap_rows(t, i)
                swap_cols(t, j)
                continue
            piv = D[t][t]
            if ring.is_unit(piv):
                break
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n)
                 if D[i][j] != z and not ring.divides(piv, D[i][j])),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, ring.one)
        u = ring.normalizing_unit(D[t][t])
        if u != ring.one:
            D[t] = [ring.mul(u, x) for x in D[t]]
            U[t] = [ring.mul(u, x) for x in U[t]]
    return U, D, V


def _smallest_entry(ring: Ring, D: Matrix, t: int, m: int, n: int):
    """``(norm, i, j)`` of a smallest nonzero entry in the block ``D[t:, t:]``; stops at a unit."""
    z = ring.zero
    norm = ring.norm
    best = None
    for i in range(t, m):
        row = D[i]
        for j in range(t, n):
            x = row[j]
            if x != z:
                nx = norm(x)
                if best is None or nx < best[0]:
                    best = (nx, i, j)
                    if ring.is_unit(x):
                        return best
    return best


def snf_diagonal(ring: Ring, A: Matrix, ncols: int | None = None) -> list:
    _, D, _ = smith_normal_form(ring, A, ncols)
    return [D[i][i] for i in range(min(len(D), len(D[0]) if D else 0))]


def from_diagonal(ring: Ring, nrows: int, diag) -> FgModule:
    """Cokernel of a matrix with ``nrows`` rows whose Smith diagonal is ``diag``."""
    nonzero = [d for d in diag if not ring.is_zero(d)]
    parts: dict = {}
    for d in nonzero:
        if ring.is_unit(d):
            continue
        for p, e in ring.factor(d):
            parts.setdefault(p, []).append(e)
    return FgModule(ring, nrows - len(nonzero), parts)


def cokernel(ring: Ring, A: Matrix, nrows: int, ncols: int) -> FgModule:
    if nrows == 0:
        return zero_module(ring)
    return from_diagonal(ring, nrows, snf_diagonal(ring, A, ncols))


def from_presentation(P: Presentation) -> FgModule:
    return cokernel(P.ring, P.matrix(), P.rows, P.cols)


def kernel_basis(ring: Ring, A: Matrix, ncols: int) -> Matrix:
    """Columns spanning ``{x : A x = 0}``, returned as an ``ncols x s`` matrix."""
    if not A:
        return identity(ring, ncols)
    _, D, V = smith_normal_form(ring, A, ncols)
    r = sum(1 for i in range(min(len(D), ncols)) if not ring.is_zero(D[i][i]))
    return [row[r:] for row in V]
