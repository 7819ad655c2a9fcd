"""Brute-force ground truth on small finite abelian groups over the integers.

Nothing here uses the Smith normal form. Finite modules are realized as
literal groups ``Z/d_1 x ... x Z/d_n`` with elements as tuples; subgroups are
enumerated by closing up under generators, and isomorphism types are read
off from counts of ``p^k``-torsion elements. The triangulated closure of a set
of modules is then the literal two-out-of-three fixpoint over a bounded
universe.

Also here: determinantal divisors (gcds of minors), an independent check on
Smith forms, and an exactness test for torsion sequences that only counts
subgroup orders through lattice indices (Hermite forms).
"""

from __future__ import annotations

import itertools
import math
import os
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from functools import cached_property, lru_cache

from .modstruct import FgModule
from .ring import ZZ, RingError
from .subcat import hermite_rows


class UniverseError(ValueError):
    """Universe bounds exceeded, or a module outside the universe."""


def max_universe() -> int:
    return int(os.environ.get("SUBCAT_MAX_UNIVERSE", "512"))


# ---------------------------------------------------------------------------
# partitions and universes


@lru_cache(maxsize=None)
def partitions(n: int, largest: int | None = None) -> tuple[tuple[int, ...], ...]:
    """Partitions of ``n`` as weakly increasing tuples."""
    largest = n if largest is None else largest
    if n == 0:
        return ((),)
    out = []
    for first in range(min(n, largest), 0, -1):
        for rest in partitions(n - first, first):
            out.append(tuple(sorted(rest + (first,))))
    return tuple(out)


@dataclass(frozen=True)
class Universe:
    primes: tuple
    max_p_length: tuple  # one bound per prime
    modules: tuple

    def __contains__(self, M: FgModule) -> bool:
        return M in self._index

    @cached_property
    def _index(self) -> frozenset:
        return frozenset(self.modules)


def enumerate_universe(primes: Sequence[int], max_p_length) -> Universe:
    """All torsion Z-modules supported on ``primes`` with bounded p-lengths."""
    primes = tuple(sorted(int(p) for p in primes))
    if len(set(primes)) != len(primes):
        raise UniverseError("duplicate primes")
    if isinstance(max_p_length, Mapping):
        bounds = tuple(int(max_p_length[p]) for p in primes)
    else:
        bounds = (int(max_p_length),) * len(primes)
    cap = max_universe()
    for p, L in zip(primes, bounds):
        if not ZZ.is_prime(p):
            raise RingError(f"{p} is not prime")
        if p**L > cap:
            raise UniverseError(f"{p}^{L} exceeds the universe cap {cap}")
    per_prime = [[lam for n in range(L + 1) for lam in partitions(n)] for L in bounds]
    mods = []
    for combo in itertools.product(*per_prime):
        mods.append(FgModule(ZZ, 0, {p: lam for p, lam in zip(primes, combo) if lam}))
    return Universe(primes, bounds, tuple(mods))


# ---------------------------------------------------------------------------
# finite abelian groups as tuples


def _add(x, y, orders):
    return tuple((a + b) % d for a, b, d in zip(x, y, orders))


def _scale(k, x, orders):
    return tuple((k * a) % d for a, d in zip(x, orders))


def elements(orders: Sequence[int]):
    return itertools.product(*(range(d) for d in orders))


def _prime_divisors(n: int) -> list[int]:
    return [p for p, _ in ZZ.factor(n)] if n > 1 else []


def group_type(elems: Iterable[tuple], orders: Sequence[int], modulo: frozenset | None = None) -> FgModule:
    """Isomorphism type of a finite subgroup ``S`` (or of ``S / modulo``).

    The number of parts of the p-partition that are at least ``k`` equals
    ``log_p(|S[p^k]| / |S[p^(k-1)]|)``, where ``S[n]`` is the set of elements
    killed by ``n`` (taken modulo ``modulo`` for a quotient).
    """
    elems = list(elems)
    base = len(modulo) if modulo else 1
    size = len(elems) // base
    zero = tuple(0 for _ in orders)
    parts: dict[int, list[int]] = {}
    for p in _prime_divisors(size):
        sub = modulo or frozenset([zero])
        counts = [1]
        k = 0
        while counts[-1] < _p_part(size, p):
            k += 1
            n = sum(1 for x in elems if _scale(p**k, x, orders) in sub) // base
            counts.append(_p_part(n, p))
        at_least = [_ilog(counts[i] // counts[i - 1], p) for i in range(1, len(counts))]
        lam = []
        for i, c in enumerate(at_least):
            nxt = at_least[i + 1] if i + 1 < len(at_least) else 0
            lam += [i + 1] * (c - nxt)
        parts[p] = sorted(lam)
    return FgModule(ZZ, 0, parts)


def _ilog(n: int, p: int) -> int:
    k = 0
    while n > 1:
        n //= p
        k += 1
    return k


def _p_part(n: int, p: int) -> int:
    q = 1
    while n % p == 0:
        n //= p
        q *= p
    return q


def subgroups(orders: Sequence[int]) -> list[frozenset]:
    """Every subgroup of ``Z/d_1 x ... x Z/d_n``, each as a frozenset of tuples."""
    orders = tuple(orders)
    zero = tuple(0 for _ in orders)
    allx = list(elements(orders))
    start = frozenset([zero])
    seen = {start}
    queue = [start]
    while queue:
        H = queue.pop()
        for x in allx:
            if x in H:
                continue
            cyc = [zero]
            y = x
            while y != zero:
                cyc.append(y)
                y = _add(y, x, orders)
            K = frozenset(_add(h, c, orders) for h in H for c in cyc)
            if K not in seen:
                seen.add(K)
                queue.append(K)
    return list(seen)


def _orders_of(M: FgModule) -> list[int]:
    if M.rank:
        raise UniverseError("only finite modules can be realized as groups")
    return [int(o) for o in M.generator_orders()]


@lru_cache(maxsize=None)
def _pair_table(M: FgModule) -> frozenset:
    orders = _orders_of(M)
    allx = list(elements(orders))
    out = set()
    for H in subgroups(orders):
        out.add((group_type(H, orders), group_type(allx, orders, modulo=H)))
    return frozenset(out)


def ses_pairs(B: FgModule) -> frozenset:
    """All ``(type A, type C)`` with ``0 -> A -> B -> C -> 0`` exact, by subgroup enumeration."""
    return _pair_table(B)


def ses_pairs_by_prime(B: FgModule) -> frozenset:
    """Same set as :func:`ses_pairs`, assembled from the primary components.

    Subgroups of a group whose primary parts have coprime orders are products
    of subgroups of the parts, so the pairs multiply out prime by prime.
    """
    per_prime = [ses_pairs(FgModule(ZZ, 0, {p: part})) for p, part in B.torsion]
    out = set()
    for combo in itertools.product(*per_prime):
        A = {p: a.partition(p) for (p, _), (a, _) in zip(B.torsion, combo)}
        C = {p: c.partition(p) for (p, _), (_, c) in zip(B.torsion, combo)}
        out.add((FgModule(ZZ, 0, A), FgModule(ZZ, 0, C)))
    return frozenset(out) if B.torsion else frozenset({(B, B)})


def ses_table(u: Universe) -> dict:
    """``B -> {(A, C)}`` for every ``B`` in the universe."""
    return {B: ses_pairs_by_prime(B) for B in u.modules}


def brute_closure(gens: Sequence[FgModule], u: Universe, table: Mapping | None = None) -> set:
    """Least set containing ``0`` and ``gens`` closed under two-out-of-three within ``u``."""
    for g in gens:
        if g not in u:
            raise UniverseError(f"generator {g} is outside the universe")
    table = table if table is not None else ses_table(u)
    closed = {FgModule(ZZ)} | set(gens)
    triples = [(A, B, C) for B, pairs in table.items() for A, C in pairs]
    changed = True
    while changed:
        changed = False
        for A, B, C in triples:
            inside = (A in closed) + (B in closed) + (C in closed)
            if inside == 2:
                closed.update((A, B, C))
                changed = True
    return closed


# ---------------------------------------------------------------------------
# element-level homs


def hom_image(matrix, x, tgt_orders):
    return tuple(
        sum(int(a) * b for a, b in zip(row, x)) % d
        for row, d in zip(matrix, tgt_orders)
    )


def brute_kernel_image_cokernel(h) -> tuple[FgModule, FgModule, FgModule]:
    """Kernel, image and cokernel types of a hom between finite Z-modules, elementwise."""
    src, tgt = _orders_of(h.domain), _orders_of(h.codomain)
    dom = list(elements(src))
    imgs = [hom_image(h.matrix, x, tgt) for x in dom]
    zero = tuple(0 for _ in tgt)
    ker = [x for x, y in zip(dom, imgs) if y == zero]
    im = frozenset(imgs)
    return (
        group_type(ker, src),
        group_type(im, tgt),
        group_type(list(elements(tgt)), tgt, modulo=im),
    )


def brute_is_exact(s) -> bool:
    """Literal check of ``ker f = 0``, ``im f = ker g``, ``g`` onto."""
    if s.f.domain != s.left or s.f.codomain != s.mid or s.g.domain != s.mid or s.g.codomain != s.right:
        return False
    lo, mo, ro = _orders_of(s.left), _orders_of(s.mid), _orders_of(s.right)
    if not (_well_defined(s.f.matrix, lo, mo) and _well_defined(s.g.matrix, mo, ro)):
        return False
    im_f = [hom_image(s.f.matrix, x, mo) for x in elements(lo)]
    if len(set(im_f)) != len(im_f):
        return False
    zero_r = tuple(0 for _ in ro)
    mids = list(elements(mo))
    ker_g = {x for x in mids if hom_image(s.g.matrix, x, ro) == zero_r}
    if ker_g != set(im_f):
        return False
    return len({hom_image(s.g.matrix, x, ro) for x in mids}) == math.prod(ro)


def _well_defined(matrix, src, tgt) -> bool:
    return all((int(f) * d) % e == 0 for row, e in zip(matrix, tgt) for f, d in zip(row, src))


# ---------------------------------------------------------------------------
# determinantal divisors


def det(M: Sequence[Sequence[int]]) -> int:
    """Exact integer determinant by fraction-free (Bareiss) elimination."""
    n = len(M)
    if n == 0:
        return 1
    A = [list(map(int, r)) for r in M]
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if A[i][k]), None)
            if swap is None:
                return 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def minors_gcd(A: Sequence[Sequence[int]], k: int) -> int:
    """gcd of all ``k x k`` minors of ``A`` (0 when there are none or all vanish)."""
    m = len(A)
    n = len(A[0]) if A else 0
    g = 0
    for rows in itertools.combinations(range(m), k):
        for cols in itertools.combinations(range(n), k):
            g = math.gcd(g, det([[A[i][j] for j in cols] for i in rows]))
            if g == 1:
                return 1
    return g


def determinantal_divisors(A: Sequence[Sequence[int]]) -> list[int]:
    """``[D_1, D_2, ...]`` with ``D_k`` the gcd of the ``k x k`` minors."""
    m = len(A)
    n = len(A[0]) if A else 0
    return [minors_gcd(A, k) for k in range(1, min(m, n) + 1)]


def _lattice_index(orders: Sequence[int], cols: Sequence[Sequence[int]]) -> int:
    """``|Z^n / (span(cols) + diag(orders) Z^n)|`` for positive ``orders``.

    The lattice has full rank, so the index is the product of the pivots of
    its row Hermite form.
    """
    n = len(orders)
    if n == 0:
        return 1
    rows = [list(c) for c in cols] + [[orders[i] if i == j else 0 for j in range(n)] for i in range(n)]
    H, _, r = hermite_rows(rows, n)
    assert r == n
    return math.prod(H[i][i] for i in range(n))


def counting_is_exact(s) -> bool:
    """Exactness of a sequence of finite Z-modules by orders of subgroups.

    With ``g o f = 0``, ``f`` injective, ``g`` onto and ``|mid| = |left| |right|``,
    the inclusion ``im f <= ker g`` is an equality. Subgroup orders come from
    lattice indices computed with Hermite forms.
    """
    if s.f.domain != s.left or s.f.codomain != s.mid or s.g.domain != s.mid or s.g.codomain != s.right:
        return False
    lo, mo, ro = _orders_of(s.left), _orders_of(s.mid), _orders_of(s.right)
    F = [[int(x) for x in r] for r in s.f.matrix]
    G = [[int(x) for x in r] for r in s.g.matrix]
    if not (_well_defined(F, lo, mo) and _well_defined(G, mo, ro)):
        return False
    for j in range(len(lo)):
        for i in range(len(ro)):
            if sum(G[i][t] * F[t][j] for t in range(len(mo))) % ro[i]:
                return False
    order = math.prod
    if order(mo) != order(lo) * order(ro):
        return False
    coker_f = _lattice_index(mo, [[F[i][j] for i in range(len(mo))] for j in range(len(lo))])
    if order(mo) // coker_f != order(lo):
        return False
    coker_g = _lattice_index(ro, [[G[i][j] for i in range(len(ro))] for j in range(len(mo))])
    return coker_g == 1


def to_json(mods: Iterable[FgModule]) -> list[dict]:
    """Deterministically ordered JSON list of modules."""
    return [M.to_json() for M in sorted(mods, key=_module_key)]


def _module_key(M: FgModule):
    return (M.rank, [(p, part) for p, part in M.torsion])

