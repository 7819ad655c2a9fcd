"""Euler data of a module: the rank and the p-lengths.

Both are read off the canonical form; localizing and measuring length gives
the same numbers by the structure theorem.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from typing import Any

from .modstruct import FgModule
from .ring import ZZ, Ring, parse_ring


class SupportError(ValueError):
    """A module has torsion at a prime outside the requested support."""


@dataclass(frozen=True)
class ChiVector:
    ring: Ring
    chi0: int = 0
    components: Any = field(default=())  # sorted ((prime, value), ...), values > 0

    def __post_init__(self):
        items = self.components.items() if isinstance(self.components, Mapping) else self.components
        comps = {p: int(v) for p, v in items if v}
        if self.chi0 < 0 or any(v < 0 for v in comps.values()):
            raise ValueError("Euler data is non-negative")
        object.__setattr__(
            self, "components",
            tuple(sorted(comps.items(), key=lambda t: self.ring.prime_key(t[0]))),
        )

    def __getitem__(self, p) -> int:
        return dict(self.components).get(p, 0)

    def __add__(self, other: ChiVector) -> ChiVector:
        comps = dict(self.components)
        for p, v in other.components:
            comps[p] = comps.get(p, 0) + v
        return ChiVector(self.ring, self.chi0 + other.chi0, comps)

    @property
    def support(self) -> list:
        return [p for p, _ in self.components]

    def dense(self, support: Sequence) -> list[int]:
        """Values along ``support``; zero where the prime is absent."""
        comps = dict(self.components)
        return [comps.get(p, 0) for p in support]

    @property
    def is_zero(self) -> bool:
        return self.chi0 == 0 and not self.components

    def to_json(self) -> dict:
        return {
            "chi0": self.chi0,
            "components": {self.ring.format(p): v for p, v in self.components},
        }

    @classmethod
    def from_json(cls, obj: Mapping, ring: Ring | None = None) -> ChiVector:
        if "ring" in obj:
            ring = parse_ring(obj["ring"])
        ring = ring or ZZ
        comps = {ring.canonical(ring.parse(k)): v for k, v in obj.get("components", {}).items()}
        return cls(ring, int(obj.get("chi0", 0)), comps)


def chi(M: FgModule, support: Sequence | None = None, strict: bool = False) -> ChiVector:
    """Rank and p-lengths of ``M``, optionally restricted to ``support``."""
    comps = {p: sum(part) for p, part in M.torsion}
    if support is not None:
        keep = set(support)
        outside = [p for p in comps if p not in keep]
        if strict and outside:
            names = ", ".join(M.ring.format(p) for p in outside)
            raise SupportError(f"{M} has torsion outside the support at {names}")
        comps = {p: v for p, v in comps.items() if p in keep}
    return ChiVector(M.ring, M.rank, comps)
