"""Certificates of membership: derivations by the two-out-of-three rule.

A certificate starts from ``{0} + generators`` and applies short exact
sequences one at a time; each step names the slot whose module it adds once
the other two are already derived. The constructions here follow the
classification argument:

* ``descend`` lowers the largest p-exponent one at a time while keeping the
  p-length, ending at ``(R/p)^r``;
* ``ascend`` merges ``R/p^k + R/p`` into ``R/p^(k+1)`` to reach any partition;
* ``torsion_from_rank`` gets ``R/p^t`` from any module of positive rank;
* ``member_certificate`` strings these together for an arbitrary member.

``verify_certificate`` replays a certificate using only ``homcheck`` and
``modstruct``.
"""

from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass

from .euler import chi
from .homcheck import ShortExactSeq, exactness_failure, hom_from_summands
from .modstruct import FgModule, direct_sum, free, module_from_summands, zero_module
from .ring import Ring, parse_ring, same_ring
from .subcat import RankMod, TorsionLattice, TorsionOnSupport, generate, lattice_member

SLOTS = ("Left", "Mid", "Right")


class NotInSubcategory(ValueError):
    """The target is not in the subcategory generated by the generators."""


@dataclass(frozen=True)
class CertStep:
    seq: ShortExactSeq
    derived: str  # "Left" | "Mid" | "Right"
    note: str = ""

    def to_json(self) -> dict:
        return {"seq": self.seq.to_json(), "derived": self.derived, "note": self.note}

    @classmethod
    def from_json(cls, obj: Mapping, ring: Ring | None = None) -> CertStep:
        return cls(ShortExactSeq.from_json(obj["seq"], ring), obj["derived"], obj.get("note", ""))


@dataclass(frozen=True)
class Certificate:
    ring: Ring
    generators: tuple
    steps: tuple
    target: FgModule

    def to_json(self) -> dict:
        return {
            "ring": str(self.ring),
            "generators": [g.to_json() for g in self.generators],
            "steps": [s.to_json() for s in self.steps],
            "target": self.target.to_json(),
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> Certificate:
        ring = parse_ring(obj["ring"])
        return cls(
            ring,
            tuple(FgModule.from_json(g, ring) for g in obj["generators"]),
            tuple(CertStep.from_json(s, ring) for s in obj["steps"]),
            FgModule.from_json(obj["target"], ring),
        )


@dataclass(frozen=True)
class VerifyReport:
    ok: bool
    failing_step: int | None = None
    reason: str = ""

    def to_json(self) -> dict:
        out: dict = {"ok": self.ok}
        if not self.ok:
            out["failing_step"] = self.failing_step
            out["reason"] = self.reason
        return out


def verify_certificate(c: Certificate) -> VerifyReport:
    """Replay ``c``; failures are reported, never raised."""
    try:
        for g in c.generators:
            same_ring(c.ring, g.ring)
        same_ring(c.ring, c.target.ring)
    except ValueError as exc:
        return VerifyReport(False, None, str(exc))
    known = {zero_module(c.ring), *c.generators}
    for i, step in enumerate(c.steps):
        if step.derived not in SLOTS:
            return VerifyReport(False, i, f"unknown slot {step.derived!r}")
        for slot in SLOTS:
            if slot != step.derived and step.seq.module(slot) not in known:
                return VerifyReport(False, i, f"{slot} module {step.seq.module(slot)} is not derived yet")
        try:
            why = exactness_failure(step.seq)
        except (ValueError, ArithmeticError) as exc:
            why = str(exc)
        if why is not None:
            return VerifyReport(False, i, why)
        known.add(step.seq.module(step.derived))
    if c.target not in known:
        return VerifyReport(False, None, f"target {c.target} is never derived")
    return VerifyReport(True)


# ---------------------------------------------------------------------------
# sequence templates (matrices written against explicit summand lists)


def _block_diag(ring: Ring, *blocks):
    """Block-diagonal matrix; each block is ``(rows, nrows, ncols)``."""
    nrows = sum(b[1] for b in blocks)
    ncols = sum(b[2] for b in blocks)
    out = [[ring.zero] * ncols for _ in range(nrows)]
    r0 = c0 = 0
    for mat, nr, nc in blocks:
        for i in range(nr):
            for j in range(nc):
                out[r0 + i][c0 + j] = mat[i][j]
        r0 += nr
        c0 += nc
    return out


def _eye(ring: Ring, n: int):
    return [[ring.one if i == j else ring.zero for j in range(n)] for i in range(n)]


def _zeros(ring: Ring, r: int, c: int):
    return [[ring.zero] * c for _ in range(r)]


def _seq(ring, left, mid, right, F, G) -> ShortExactSeq:
    f = hom_from_summands(ring, left, mid, F)
    g = hom_from_summands(ring, mid, right, G)
    return ShortExactSeq.of(f, g)


def split_sequence(X: FgModule, Y: FgModule) -> ShortExactSeq:
    """``0 -> X -> X + Y -> Y -> 0``."""
    ring = same_ring(X.ring, Y.ring)
    x, y = X.summands(), Y.summands()
    nx, ny = len(x), len(y)
    F = _eye(ring, nx) + _zeros(ring, ny, nx)
    G = [[ring.zero] * nx + row for row in _eye(ring, ny)]
    return _seq(ring, x, x + y, y, F, G)


def _pad(ring, left, mid, right, F, G, G_summands):
    """Add the split sequence ``0 -> G -> G + G -> G -> 0`` to a template."""
    n = len(G_summands)
    F2 = _block_diag(ring, (F, len(mid), len(left)), (_eye(ring, n) + _zeros(ring, n, n), 2 * n, n))
    G2 = _block_diag(
        ring, (G, len(right), len(mid)),
        ([[ring.zero] * n + row for row in _eye(ring, n)], n, 2 * n),
    )
    return _seq(
        ring,
        left + G_summands,
        mid + G_summands + G_summands,
        right + G_summands,
        F2, G2,
    )


def descend_pair(ring: Ring, p, r: int, G: FgModule | None = None):
    """The two sequences turning ``R/p^r + G`` into ``R/p^(r-1) + R/p + G``.

    ``0 -> R/p^r --(1,p)--> R/p^(r-1) + R/p^(r+1) --(-p,1)--> R/p^r -> 0`` and
    ``0 -> R/p^r --(0,p)--> R/p^(r-1) + R/p^(r+1) --> R/p^(r-1) + R/p -> 0``,
    each summed with the split sequence on ``G``.
    """
    if r < 2:
        raise ValueError("descending needs an exponent of at least 2")
    G = G or zero_module(ring)
    one, zero = ring.one, ring.zero
    left = [(p, r)]
    mid = [(p, r - 1), (p, r + 1)]
    first = _pad(ring, left, mid, [(p, r)], [[one], [p]], [[ring.neg(p), one]], G.summands())
    second = _pad(ring, left, mid, [(p, r - 1), (p, 1)], [[zero], [p]], _eye(ring, 2), G.summands())
    return first, second


def ascend_pair(ring: Ring, p, k: int, G: FgModule | None = None):
    """The two sequences turning ``R/p + R/p^k + G`` into ``R/p^(k+1) + G``.

    The first uses ``h(x, y) = (x, p y, 0)`` into ``(R/p + R/p^(k+1)) + R/p^k``;
    the second is the inclusion ``R/p + R/p^k -> R/p + R/p^k + R/p^(k+1)``
    followed by the projection onto ``R/p^(k+1)``.
    """
    if k < 1:
        raise ValueError("exponent must be positive")
    G = G or zero_module(ring)
    one, zero = ring.one, ring.zero
    left = [(p, 1), (p, k)]
    h = [[one, zero], [zero, p], [zero, zero]]
    quotient = [[zero, one, zero], [zero, zero, one]]
    first = _pad(ring, left, [(p, 1), (p, k + 1), (p, k)], left, h, quotient, G.summands())
    incl = [[one, zero], [zero, one], [zero, zero]]
    second = _pad(ring, left, [(p, 1), (p, k), (p, k + 1)], [(p, k + 1)], incl,
                  [[zero, zero, one]], G.summands())
    return first, second


def rank_torsion_sequence(M: FgModule, p, t: int) -> ShortExactSeq:
    """``0 -> M -> M -> R/p^t -> 0``: multiply one free summand by ``p^t``."""
    if M.rank < 1:
        raise ValueError("need a module of positive rank")
    ring = M.ring
    s = M.summands()
    F = _eye(ring, len(s))
    F[0][0] = ring.pow(p, t)
    G = [[ring.one] + [ring.zero] * (len(s) - 1)]
    return _seq(ring, s, s, [(p, t)], F, G)


def torsion_split_sequence(M: FgModule) -> ShortExactSeq:
    """``0 -> Tor(M) -> M -> R^rank -> 0``."""
    return split_sequence(M.torsion_part(), free(M.ring, M.rank))


def free_quotient_sequence(ring: Ring, a: int, b: int) -> ShortExactSeq:
    """``0 -> R^a -> R^b -> R^(b-a) -> 0`` by coordinate inclusion."""
    return split_sequence(free(ring, a), free(ring, b - a))


def inclusion_sequence(B: FgModule, A: FgModule) -> ShortExactSeq:
    """``0 -> B -> A -> A/B -> 0`` for elementary torsion ``B``, ``A`` with ``B``'s p-lengths dominated."""
    ring = same_ring(A.ring, B.ring)
    a, b = A.summands(), B.summands()
    F = _zeros(ring, len(a), len(b))
    used = set()
    for j, s in enumerate(b):
        i = next(i for i, t in enumerate(a) if t == s and i not in used)
        used.add(i)
        F[i][j] = ring.one
    keep = [i for i in range(len(a)) if i not in used]
    rest = [a[i] for i in keep]
    G = _zeros(ring, len(rest), len(a))
    for r, i in enumerate(keep):
        G[r][i] = ring.one
    return _seq(ring, b, a, rest, F, G)


# ---------------------------------------------------------------------------
# construction


class _Builder:
    """Accumulates steps while tracking the derived set."""

    def __init__(self, ring: Ring, generators: Sequence[FgModule]):
        self.ring = ring
        self.generators = tuple(generators)
        self.known = {zero_module(ring), *generators}
        self.steps: list[CertStep] = []

    def apply(self, seq: ShortExactSeq, derived: str, note: str) -> FgModule:
        for slot in SLOTS:
            if slot != derived:
                assert seq.module(slot) in self.known, (note, slot, str(seq.module(slot)))
        self.steps.append(CertStep(seq, derived, note))
        M = seq.module(derived)
        self.known.add(M)
        return M

    def sum(self, X: FgModule, Y: FgModule) -> FgModule:
        S = direct_sum(X, Y)
        if S not in self.known:
            self.apply(split_sequence(X, Y), "Mid", "split-sum")
        return S

    def sum_all(self, mods: Sequence[FgModule]) -> FgModule:
        acc = zero_module(self.ring)
        for M in mods:
            if not M.is_zero:
                acc = M if acc.is_zero else self.sum(acc, M)
        return acc

    def power(self, X: FgModule, n: int) -> FgModule:
        return self.sum_all([X] * n)

    def certificate(self, target: FgModule) -> Certificate:
        return Certificate(self.ring, self.generators, tuple(self.steps), target)


def _without(ring: Ring, M: FgModule, *remove) -> FgModule:
    s = M.summands()
    for x in remove:
        s.remove(x)
    return module_from_summands(ring, s)


def _descend(b: _Builder, M: FgModule, p) -> FgModule:
    ring = b.ring
    while M.partition(p) and max(M.partition(p)) > 1:
        r = max(M.partition(p))
        G = _without(ring, M, (p, r))
        first, second = descend_pair(ring, p, r, G)
        b.apply(first, "Mid", "descend-a")
        M = b.apply(second, "Right", "descend-b")
    return M


def _ascend(b: _Builder, M: FgModule, p, partition: Sequence[int]) -> FgModule:
    ring = b.ring
    for part in sorted(partition):
        for k in range(1, part):
            G = _without(ring, M, (p, 1), (p, k))
            first, second = ascend_pair(ring, p, k, G)
            b.apply(first, "Mid", "ascend-a")
            M = b.apply(second, "Right", "ascend-b")
    return M


def _canon_prime(M: FgModule, p):
    return M.ring.canonical(M.ring.coerce(p))


def descend(M: FgModule, p) -> Certificate:
    """Certificate deriving ``M`` with its p-part replaced by ``(R/p)^(p-length)``."""
    p = _canon_prime(M, p)
    if not M.partition(p):
        raise ValueError(f"{M} has no {M.ring.format(p)}-torsion")
    b = _Builder(M.ring, [M])
    return b.certificate(_descend(b, M, p))


def ascend(M: FgModule, p, partition: Sequence[int]) -> Certificate:
    """Certificate deriving ``M`` with its elementary p-part regrouped as ``partition``."""
    p = _canon_prime(M, p)
    part = M.partition(p)
    partition = [int(x) for x in partition if x]
    if any(x < 0 for x in partition):
        raise ValueError("partition entries must be non-negative")
    if any(e != 1 for e in part):
        raise ValueError(f"the {M.ring.format(p)}-torsion of {M} is not elementary")
    if sum(partition) != len(part):
        raise ValueError(f"partition sums to {sum(partition)}, p-length is {len(part)}")
    b = _Builder(M.ring, [M])
    return b.certificate(_ascend(b, M, p, partition))


def torsion_from_rank(M: FgModule, p, t: int) -> Certificate:
    if M.rank < 1:
        raise ValueError("torsion_from_rank needs a module of positive rank")
    if t < 1:
        raise ValueError("t must be positive")
    p = _canon_prime(M, p)
    b = _Builder(M.ring, [M])
    target = b.apply(rank_torsion_sequence(M, p, t), "Right", "case-i-torsion")
    return b.certificate(target)


def _case_i(b: _Builder, generators: Sequence[FgModule], M: FgModule) -> FgModule:
    ring = b.ring
    positive = [g for g in generators if g.rank > 0]
    base = min(positive, key=lambda g: g.rank)

    def cyclic(p, e):
        C = FgModule(ring, 0, {p: [e]})
        if C not in b.known:
            b.apply(rank_torsion_sequence(base, p, e), "Right", "case-i-torsion")
        return C

    def torsion(T: FgModule):
        return b.sum_all([cyclic(p, e) for p, part in T.torsion for e in part])

    ranks = set()
    for g in positive:
        if g.torsion:
            torsion(g)
            b.apply(torsion_split_sequence(g), "Right", "torsion-split")
        ranks.add(g.rank)
    # Euclid by subtraction on the ranks of derived free modules
    g_rank = 0
    for k in sorted(ranks):
        a, c = g_rank, k
        while a and c:
            lo, hi = min(a, c), max(a, c)
            if hi != lo and free(ring, hi - lo) not in b.known:
                b.apply(free_quotient_sequence(ring, lo, hi), "Right", "rank-euclid")
            a, c = lo, hi - lo
        g_rank = a or c
    assert g_rank == math.gcd(*ranks)
    F = b.power(free(ring, g_rank), M.rank // g_rank) if M.rank else zero_module(ring)
    return b.sum_all([F, torsion(M)])


def _case_ii(b: _Builder, d: TorsionLattice, generators: Sequence[FgModule], M: FgModule) -> FgModule:
    ring = b.ring
    nonzero = [g for g in generators if not g.is_zero]
    support = d.support
    coeffs = lattice_member(chi(M).dense(support), [chi(g).dense(support) for g in nonzero])
    if coeffs is None:
        raise NotInSubcategory(f"{M} is not in the subcategory")
    reduced = []
    for g, c in zip(nonzero, coeffs):
        R = g
        if c:
            for p in g.primes:
                R = _descend(b, R, p)
        reduced.append(R)
    A = b.sum_all([b.power(R, c) for R, c in zip(reduced, coeffs) if c > 0])
    B = b.sum_all([b.power(R, -c) for R, c in zip(reduced, coeffs) if c < 0])
    N = b.apply(inclusion_sequence(B, A), "Right", "case-ii-cokernel")
    for p in M.primes:
        N = _ascend(b, N, p, M.partition(p))
    return N


def member_certificate(generators: Sequence[FgModule], M: FgModule) -> Certificate:
    """A certificate that ``M`` lies in the subcategory generated by ``generators``."""
    generators = list(generators)
    ring = same_ring(*(g.ring for g in generators), M.ring)
    d = generate(generators, ring)
    if not d.member(M):
        raise NotInSubcategory(f"{M} is not in the subcategory generated by the inputs")
    b = _Builder(ring, generators)
    if M in b.known:
        return b.certificate(M)
    if isinstance(d, RankMod):
        out = _case_i(b, generators, M)
    elif isinstance(d, (TorsionLattice, TorsionOnSupport)):
        if isinstance(d, TorsionOnSupport):
            nz = [g for g in generators if not g.is_zero]
            sup = sorted({p for g in nz for p in g.primes}, key=ring.prime_key)
            d = TorsionLattice(tuple(sup), tuple(tuple(chi(g).dense(sup)) for g in nz), (), ring)
        out = _case_ii(b, d, generators, M)
    else:  # ZeroOnly: M would be zero and already known
        raise NotInSubcategory(f"{M} is not zero")
    assert out == M, (str(out), str(M))
    return b.certificate(M)
