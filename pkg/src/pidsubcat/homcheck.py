"""Explicit homomorphisms between canonical modules and exactness checks.

A hom ``M -> N`` is a matrix with one column per generator of ``M`` and one
row per generator of ``N`` (global generator order, see ``modstruct``).
Writing each module as ``R^n / D R^n`` with ``D`` the diagonal of generator
orders, kernels, images and cokernels come from Smith normal forms of block
matrices built from the lifted map and the relation diagonals.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass

from .modstruct import FgModule, Matrix, cokernel, kernel_basis, matmul, module_from_summands
from .ring import Ring, same_ring


class HomError(ValueError):
    """Malformed or ill-defined homomorphism."""


@dataclass(frozen=True)
class ModuleHom:
    domain: FgModule
    codomain: FgModule
    matrix: tuple  # rows indexed by codomain generators

    @classmethod
    def make(cls, domain: FgModule, codomain: FgModule, matrix) -> ModuleHom:
        """Coerce entries and reduce each row modulo its target generator order."""
        ring = same_ring(domain.ring, codomain.ring)
        rows = [list(r) for r in matrix]
        if len(rows) != codomain.ngens or any(len(r) != domain.ngens for r in rows):
            raise HomError(
                f"matrix shape does not fit {domain} -> {codomain}: "
                f"expected {codomain.ngens}x{domain.ngens}"
            )
        orders = codomain.generator_orders()
        return cls(domain, codomain, tuple(
            tuple(ring.mod(ring.coerce(x), e) for x in row) for row, e in zip(rows, orders)
        ))

    @property
    def ring(self) -> Ring:
        return self.domain.ring

    def to_json(self) -> dict:
        fmt = self.ring.format
        return {
            "domain": self.domain.to_json(),
            "codomain": self.codomain.to_json(),
            "matrix": [[fmt(x) for x in row] for row in self.matrix],
        }

    @classmethod
    def from_json(cls, obj: Mapping, ring: Ring | None = None) -> ModuleHom:
        dom = FgModule.from_json(obj["domain"], ring)
        cod = FgModule.from_json(obj["codomain"], ring)
        return cls.make(dom, cod, obj["matrix"])


def hom_from_summands(ring: Ring, dom: Sequence, cod: Sequence, matrix) -> ModuleHom:
    """Build a hom written against arbitrary cyclic summand lists.

    ``dom`` and ``cod`` list summands as ``0`` (free) or ``(p, e)``; ``matrix``
    has ``len(cod)`` rows and ``len(dom)`` columns. Rows and columns are
    permuted into canonical generator order.
    """

    def key(i, summands):
        s = summands[i]
        return (0,) if s == 0 else (1, ring.prime_key(s[0]), s[1])

    dom_order = sorted(range(len(dom)), key=lambda i: key(i, dom))
    cod_order = sorted(range(len(cod)), key=lambda i: key(i, cod))
    rows = [[matrix[i][j] for j in dom_order] for i in cod_order]
    return ModuleHom.make(module_from_summands(ring, dom), module_from_summands(ring, cod), rows)


def check_hom(h: ModuleHom) -> bool:
    """Every entry ``f`` satisfies ``e | f*d`` (source order ``d``, target order ``e``)."""
    ring = h.ring
    src = h.domain.generator_orders()
    tgt = h.codomain.generator_orders()
    if len(h.matrix) != len(tgt) or any(len(r) != len(src) for r in h.matrix):
        raise HomError("matrix shape does not match the modules")
    return all(
        ring.divides(e, ring.mul(f, d))
        for row, e in zip(h.matrix, tgt)
        for f, d in zip(row, src)
    )


def compose(g: ModuleHom, f: ModuleHom) -> ModuleHom:
    """``g o f``, reduced modulo the target orders."""
    if f.codomain != g.domain:
        raise HomError("cannot compose: codomain and domain differ")
    ring = f.ring
    if f.codomain.ngens == 0:  # through the zero module
        return ModuleHom.make(f.domain, g.codomain, [[ring.zero] * f.domain.ngens] * g.codomain.ngens)
    prod = matmul(ring, [list(r) for r in g.matrix], [list(r) for r in f.matrix], f.codomain.ngens)
    return ModuleHom.make(f.domain, g.codomain, prod)


def is_zero_hom(h: ModuleHom) -> bool:
    return all(h.ring.is_zero(x) for row in h.matrix for x in row)


def _require_hom(h: ModuleHom):
    if not check_hom(h):
        raise HomError("homomorphism is not well defined")


def _preimage_lattice(h: ModuleHom) -> Matrix:
    """Generators (as columns) of ``{x in R^n : F x in D_cod R^m}``."""
    ring = h.ring
    n, m = h.domain.ngens, h.codomain.ngens
    if m == 0:
        return [[ring.one if i == j else ring.zero for j in range(n)] for i in range(n)]
    orders = h.codomain.generator_orders()
    # kernel of [F | -D_cod]; keep the first n coordinates
    block = [list(h.matrix[i]) + [ring.neg(orders[i]) if j == i else ring.zero for j in range(m)]
             for i in range(m)]
    K = kernel_basis(ring, block, n + m)
    return [list(row) for row in K[:n]]


def _subquotient(ring: Ring, gens: Matrix, ngens: int, rel_orders) -> FgModule:
    """Type of ``span(gens) / D R^n`` where ``D R^n`` (diagonal ``rel_orders``) lies in the span."""
    n = len(rel_orders)
    s = ngens
    if s == 0:
        return FgModule(ring)
    # relations among the generators: z with gens z in D R^n
    block = [list(gens[i]) + [ring.neg(rel_orders[i]) if j == i else ring.zero for j in range(n)]
             for i in range(n)]
    K = kernel_basis(ring, block, s + n)
    rel = [list(row) for row in K[:s]]
    return cokernel(ring, rel, s, len(rel[0]) if rel else 0)


def kernel_image_cokernel(h: ModuleHom) -> tuple[FgModule, FgModule, FgModule]:
    _require_hom(h)
    ring = h.ring
    n, m = h.domain.ngens, h.codomain.ngens
    P = _preimage_lattice(h)
    width = len(P[0]) if P else 0
    ker = _subquotient(ring, P, width, h.domain.generator_orders()) if n else FgModule(ring)
    im = cokernel(ring, P, n, width) if n else FgModule(ring)
    tgt = h.codomain.generator_orders()
    block = [list(h.matrix[i]) + [tgt[i] if j == i else ring.zero for j in range(m)] for i in range(m)]
    cok = cokernel(ring, block, m, n + m)
    return ker, im, cok


def kernel(h: ModuleHom) -> FgModule:
    return kernel_image_cokernel(h)[0]


def cokernel_of(h: ModuleHom) -> FgModule:
    return kernel_image_cokernel(h)[2]


@dataclass(frozen=True)
class ShortExactSeq:
    """``0 -> left --f--> mid --g--> right -> 0`` (exactness is not assumed)."""

    left: FgModule
    mid: FgModule
    right: FgModule
    f: ModuleHom
    g: ModuleHom

    @classmethod
    def of(cls, f: ModuleHom, g: ModuleHom) -> ShortExactSeq:
        return cls(f.domain, f.codomain, g.codomain, f, g)

    def module(self, slot: str) -> FgModule:
        return {"Left": self.left, "Mid": self.mid, "Right": self.right}[slot]

    def to_json(self) -> dict:
        return {
            "left": self.left.to_json(),
            "mid": self.mid.to_json(),
            "right": self.right.to_json(),
            "f": self.f.to_json(),
            "g": self.g.to_json(),
        }

    @classmethod
    def from_json(cls, obj: Mapping, ring: Ring | None = None) -> ShortExactSeq:
        return cls(
            FgModule.from_json(obj["left"], ring),
            FgModule.from_json(obj["mid"], ring),
            FgModule.from_json(obj["right"], ring),
            ModuleHom.from_json(obj["f"], ring),
            ModuleHom.from_json(obj["g"], ring),
        )


def homology(f: ModuleHom, g: ModuleHom) -> FgModule:
    """Type of ``ker g / im f`` for composable ``f``, ``g`` with ``g o f = 0``."""
    ring = f.ring
    mid_orders = f.codomain.generator_orders()
    n_mid = f.codomain.ngens
    if n_mid == 0:
        return FgModule(ring)
    Kg = _preimage_lattice(g)
    width = len(Kg[0]) if Kg else 0
    # relations: z with Kg z in im F + D_mid
    nf = f.domain.ngens
    block = [
        list(Kg[i])
        + [ring.neg(x) for x in f.matrix[i]]
        + [ring.neg(mid_orders[i]) if j == i else ring.zero for j in range(n_mid)]
        for i in range(n_mid)
    ]
    K = kernel_basis(ring, block, width + nf + n_mid)
    rel = [list(row) for row in K[:width]]
    return cokernel(ring, rel, width, len(rel[0]) if rel else 0)


def exactness_failure(s: ShortExactSeq) -> str | None:
    """Why ``s`` is not a short exact sequence, or ``None`` when it is."""
    try:
        same_ring(s.left.ring, s.mid.ring, s.right.ring)
    except ValueError as exc:
        return str(exc)
    if s.f.domain != s.left or s.f.codomain != s.mid:
        return "f does not map left to mid"
    if s.g.domain != s.mid or s.g.codomain != s.right:
        return "g does not map mid to right"
    try:
        if not check_hom(s.f):
            return "f is not well defined"
        if not check_hom(s.g):
            return "g is not well defined"
    except HomError as exc:
        return str(exc)
    if s.mid.rank != s.left.rank + s.right.rank:
        return "ranks are not additive"
    if not is_zero_hom(compose(s.g, s.f)):
        return "g o f is not zero"
    ker_f, _, _ = kernel_image_cokernel(s.f)
    if not ker_f.is_zero:
        return f"f is not injective (kernel {ker_f})"
    _, _, cok_g = kernel_image_cokernel(s.g)
    if not cok_g.is_zero:
        return f"g is not surjective (cokernel {cok_g})"
    H = homology(s.f, s.g)
    if not H.is_zero:
        return f"not exact at mid (homology {H})"
    return None


def is_exact(s: ShortExactSeq) -> bool:
    return exactness_failure(s) is None
