"""Triangulated subcategories of finitely generated modules, in classified form.

Every nonzero triangulated subcategory is either ``RankMod(k)`` (rank divisible
by ``k``, torsion arbitrary) or a torsion subcategory cut out by a subgroup
``H`` of the free abelian group on the maximal primes, generated by vectors
with non-negative entries: a module belongs when its vector of p-lengths lies
in ``H``. ``TorsionLattice`` holds a finitely generated ``H`` on a finite set
of primes; ``TorsionOnSupport`` is the special case where ``H`` is spanned by
unit vectors, which may also be the full (infinite) set of maximal primes.

Support sets are a tuple of canonical primes, or ``ALL_PRIMES``. The whole
spectrum (which includes the zero ideal) is ``FULL_SPEC``.
"""

from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from functools import reduce

from .euler import chi
from .modstruct import FgModule
from .ring import ZZ, FieldRing, Ring, RingError, parse_ring, same_ring

ALL_PRIMES = "all"
FULL_SPEC = "full"


class NotThickError(ValueError):
    """The descriptor does not correspond to a specialization-closed subset."""


# ---------------------------------------------------------------------------
# integer lattices


def hermite_rows(rows: Sequence[Sequence[int]], ncols: int):
    """Row Hermite normal form ``H = T @ rows`` with ``T`` unimodular.

    Returns ``(H, T, r)``: the first ``r`` rows of ``H`` are the nonzero
    echelon rows with positive pivots and entries above each pivot reduced
    into ``[0, pivot)``; the rest are zero.
    """
    A = [list(r) for r in rows]
    m = len(A)
    T = [[int(i == j) for j in range(m)] for i in range(m)]

    def sub_row(dst, src, q):
        if q:
            A[dst] = [a - q * b for a, b in zip(A[dst], A[src])]
            T[dst] = [a - q * b for a, b in zip(T[dst], T[src])]

    r = 0
    for c in range(ncols):
        if r == m:
            break
        while True:
            nz = [i for i in range(r, m) if A[i][c]]
            if not nz:
                break
            i0 = min(nz, key=lambda i: abs(A[i][c]))
            A[r], A[i0] = A[i0], A[r]
            T[r], T[i0] = T[i0], T[r]
            for i in range(r + 1, m):
                if A[i][c]:
                    sub_row(i, r, A[i][c] // A[r][c])
            if not any(A[i][c] for i in range(r + 1, m)):
                break
        if A[r][c] == 0:
            continue
        if A[r][c] < 0:
            A[r] = [-a for a in A[r]]
            T[r] = [-a for a in T[r]]
        for i in range(r):
            sub_row(i, r, A[i][c] // A[r][c])
        r += 1
    return A, T, r


def lattice_member(v: Sequence[int], basis: Sequence[Sequence[int]]) -> list[int] | None:
    """Integer coefficients ``c`` with ``sum(c[i] * basis[i]) == v``, or ``None``."""
    n = len(v)
    if any(len(b) != n for b in basis):
        raise ValueError("vectors must share a length")
    H, T, r = hermite_rows(basis, n)
    residual = list(v)
    y = [0] * r
    for i in range(r):
        c = next(j for j, a in enumerate(H[i]) if a)
        q, rem = divmod(residual[c], H[i][c])
        if rem:
            return None
        y[i] = q
        residual = [a - q * b for a, b in zip(residual, H[i])]
    if any(residual):
        return None
    return [sum(y[i] * T[i][k] for i in range(r)) for k in range(len(basis))]


# ---------------------------------------------------------------------------
# descriptors


@dataclass(frozen=True)
class ClosureClass:
    triangulated: bool
    thick: bool
    wide: bool
    serre: bool

    def to_json(self) -> dict:
        return {k: getattr(self, k) for k in ("triangulated", "thick", "wide", "serre")}


class Descriptor:
    ring: Ring

    def member(self, M: FgModule) -> bool:
        raise NotImplementedError

    def _check(self, M: FgModule):
        same_ring(self.ring, M.ring)


@dataclass(frozen=True)
class ZeroOnly(Descriptor):
    ring: Ring = ZZ

    def member(self, M):
        self._check(M)
        return M.is_zero

    def to_json(self):
        return {"kind": "zero"}


@dataclass(frozen=True)
class RankMod(Descriptor):
    """All modules whose rank is divisible by ``k``."""

    k: int
    ring: Ring = ZZ

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be a positive integer")

    def member(self, M):
        self._check(M)
        return M.rank % self.k == 0

    def to_json(self):
        return {"kind": "rank_mod", "k": self.k}


@dataclass(frozen=True, eq=False)
class TorsionLattice(Descriptor):
    """Torsion modules whose p-length vector over ``support`` lies in the span of ``gens``.

    Build through :func:`torsion_lattice`, which canonicalizes; equality and
    hashing use ``(ring, support, basis)`` only.
    """

    support: tuple
    gens: tuple
    basis: tuple
    ring: Ring = ZZ

    def __eq__(self, other):
        return (
            isinstance(other, TorsionLattice)
            and (self.ring, self.support, self.basis) == (other.ring, other.support, other.basis)
        )

    def __hash__(self):
        return hash((self.ring, self.support, self.basis))

    def _vector(self, M: FgModule) -> list[int] | None:
        if M.rank or any(p not in self.support for p in M.primes):
            return None
        return chi(M).dense(self.support)

    def witness(self, M: FgModule) -> list[int] | None:
        """Coefficients on ``gens`` reproducing the p-length vector of ``M``."""
        self._check(M)
        v = self._vector(M)
        return None if v is None else lattice_member(v, self.gens)

    def member(self, M):
        return self.witness(M) is not None

    @property
    def is_unit_lattice(self) -> bool:
        n = len(self.support)
        return len(self.basis) == n and all(
            self.basis[i][j] == int(i == j) for i in range(n) for j in range(n)
        )

    def to_json(self):
        return {
            "kind": "torsion_lattice",
            "support": [self.ring.format(p) for p in self.support],
            "gens": [list(g) for g in self.gens],
        }


@dataclass(frozen=True)
class TorsionOnSupport(Descriptor):
    """Torsion modules with torsion at primes of ``support`` only (``ALL_PRIMES`` allowed)."""

    support: tuple | str
    ring: Ring = ZZ

    def member(self, M):
        self._check(M)
        if M.rank:
            return False
        return self.support == ALL_PRIMES or all(p in self.support for p in M.primes)

    def to_json(self):
        sup = self.support if self.support == ALL_PRIMES else [self.ring.format(p) for p in self.support]
        return {"kind": "torsion_on_support", "support": sup}


def _canonical_support(ring: Ring, support) -> tuple | str:
    if support == ALL_PRIMES:
        return ALL_PRIMES
    primes = {ring.canonical(ring.coerce(p)) for p in support}
    for p in primes:
        if not ring.is_prime(p):
            raise RingError(f"{ring.format(p)} is not a prime of {ring}")
    return tuple(sorted(primes, key=ring.prime_key))


def torsion_on_support(ring: Ring, support) -> Descriptor:
    support = _canonical_support(ring, support)
    if support == () or (support == ALL_PRIMES and isinstance(ring, FieldRing)):
        return ZeroOnly(ring)
    return TorsionOnSupport(support, ring)


def torsion_lattice(ring: Ring, support: Sequence, gens: Sequence[Sequence[int]]) -> Descriptor:
    """Canonical descriptor for the lattice spanned by ``gens`` over ``support``."""
    support = [ring.canonical(ring.coerce(p)) for p in support]
    if len(set(support)) != len(support):
        raise ValueError("duplicate primes in support")
    gens = [[int(x) for x in g] for g in gens]
    for g in gens:
        if len(g) != len(support):
            raise ValueError("generator length does not match the support")
        if any(x < 0 for x in g):
            raise ValueError("lattice generators must have non-negative entries")
    order = sorted(range(len(support)), key=lambda i: ring.prime_key(support[i]))
    # drop primes no generator touches; they admit no members anyway
    order = [i for i in order if any(g[i] for g in gens)]
    sup = tuple(support[i] for i in order)
    gens_t = tuple(tuple(g[i] for i in order) for g in gens if any(g[i] for i in order))
    if not gens_t:
        return ZeroOnly(ring)
    for p in sup:
        if not ring.is_prime(p):
            raise RingError(f"{ring.format(p)} is not a prime of {ring}")
    H, _, r = hermite_rows(gens_t, len(sup))
    d = TorsionLattice(sup, gens_t, tuple(tuple(row) for row in H[:r]), ring)
    if d.is_unit_lattice:
        return TorsionOnSupport(sup, ring)
    return d


# ---------------------------------------------------------------------------
# operations


def generate(mods: Sequence[FgModule], ring: Ring | None = None) -> Descriptor:
    """Smallest triangulated subcategory containing ``mods``."""
    if not mods:
        return ZeroOnly(ring or ZZ)
    ring = same_ring(*([ring] if ring else []), *(M.ring for M in mods))
    ranks = [M.rank for M in mods if M.rank]
    if ranks:
        # a module of positive rank already produces every torsion module
        return RankMod(reduce(math.gcd, ranks), ring)
    nonzero = [M for M in mods if not M.is_zero]
    if not nonzero:
        return ZeroOnly(ring)
    support = sorted({p for M in nonzero for p in M.primes}, key=ring.prime_key)
    return torsion_lattice(ring, support, [chi(M).dense(support) for M in nonzero])


def member(d: Descriptor, M: FgModule) -> bool:
    return d.member(M)


def membership_witness(d: Descriptor, M: FgModule) -> list[int] | None:
    """Lattice coefficients for ``TorsionLattice`` members; ``None`` otherwise."""
    return d.witness(M) if isinstance(d, TorsionLattice) else None


def _unit_module(ring: Ring, p) -> FgModule:
    return FgModule(ring, 0, {p: [1]})


def _vector_module(ring: Ring, support, vec) -> FgModule:
    return FgModule(ring, 0, {p: [1] * v for p, v in zip(support, vec) if v})


def includes(d1: Descriptor, d2: Descriptor) -> bool:
    """True iff every member of ``d2`` is a member of ``d1``."""
    same_ring(d1.ring, d2.ring)
    if isinstance(d2, ZeroOnly):
        return True
    if isinstance(d1, ZeroOnly):
        return False
    if isinstance(d2, RankMod):
        return isinstance(d1, RankMod) and d2.k % d1.k == 0
    if isinstance(d1, RankMod):
        return True
    if isinstance(d2, TorsionLattice):
        return all(d1.member(_vector_module(d2.ring, d2.support, g)) for g in d2.gens)
    # d2 is TorsionOnSupport
    if d2.support == ALL_PRIMES:
        return isinstance(d1, TorsionOnSupport) and d1.support == ALL_PRIMES
    return all(d1.member(_unit_module(d2.ring, p)) for p in d2.support)


def closure_class(d: Descriptor) -> ClosureClass:
    """Which closure properties ``d`` has; thick, wide and Serre always agree."""
    if isinstance(d, (ZeroOnly, TorsionOnSupport)):
        thick = True
    elif isinstance(d, RankMod):
        thick = d.k == 1
    else:
        thick = d.is_unit_lattice
    return ClosureClass(True, thick, thick, thick)


def from_spec_subset(S, ring: Ring = ZZ) -> Descriptor:
    """Descriptor for a specialization-closed subset of Spec(R)."""
    if S == FULL_SPEC:
        return RankMod(1, ring)
    return torsion_on_support(ring, S)


def to_spec_subset(d: Descriptor):
    if isinstance(d, ZeroOnly):
        return ()
    if isinstance(d, RankMod) and d.k == 1:
        return FULL_SPEC
    if isinstance(d, TorsionOnSupport):
        return d.support
    if isinstance(d, TorsionLattice) and d.is_unit_lattice:
        return d.support
    raise NotThickError(f"{d.to_json()} is not thick")


# ---------------------------------------------------------------------------
# JSON


def spec_subset_to_json(S, ring: Ring = ZZ):
    if S in (FULL_SPEC, ALL_PRIMES):
        return S
    return [ring.format(p) for p in S]


def spec_subset_from_json(obj, ring: Ring = ZZ):
    if obj in (FULL_SPEC, ALL_PRIMES):
        return obj
    if isinstance(obj, str) or not isinstance(obj, Sequence):
        raise ValueError(f"bad spec subset {obj!r}")
    return _canonical_support(ring, [ring.parse(str(p)) for p in obj])


def descriptor_from_json(obj: Mapping, ring: Ring | None = None) -> Descriptor:
    if "ring" in obj:
        ring = same_ring(*([ring] if ring else []), parse_ring(obj["ring"]))
    ring = ring or ZZ
    kind = obj.get("kind")
    if kind == "zero":
        return ZeroOnly(ring)
    if kind == "rank_mod":
        return RankMod(int(obj["k"]), ring)
    if kind == "torsion_lattice":
        support = [ring.parse(str(p)) for p in obj["support"]]
        return torsion_lattice(ring, support, obj["gens"])
    if kind == "torsion_on_support":
        return torsion_on_support(ring, spec_subset_from_json(obj["support"], ring))
    raise ValueError(f"unknown descriptor kind {kind!r}")
