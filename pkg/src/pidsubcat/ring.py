"""Coefficient rings: the integers, F_p[x] for a small prime p, and a bare field.

Elements are plain Python values so that matrices stay cheap:

* ``IntegerRing``: ``int``.
* ``PolyRing``: ``tuple`` of coefficients in ``[0, p)``, low degree first,
  with no trailing zeros (the zero polynomial is ``()``).
* ``FieldRing``: ``fractions.Fraction``. The label is cosmetic; arithmetic is
  exact rational arithmetic.

Each ring exposes the Euclidean structure used by the Smith normal form
(``divmod`` and ``norm``), canonical associates, gcd with Bezout cofactors,
and factorization into canonical primes (positive integers or monic
irreducible polynomials).
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any


class RingError(ValueError):
    """Raised on ring mismatches and invalid ring-level requests."""


class Ring:
    """Common interface. Subclasses are frozen dataclasses, so rings compare by value."""

    zero: Any
    one: Any

    # arithmetic -----------------------------------------------------------
    def add(self, a, b):
        raise NotImplementedError

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def neg(self, a):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def divmod(self, a, b):
        """Euclidean division: ``a = q*b + r`` with ``norm(r) < norm(b)``."""
        raise NotImplementedError

    def norm(self, a) -> int:
        raise NotImplementedError

    def is_zero(self, a) -> bool:
        return a == self.zero

    def pow(self, a, e: int):
        result = self.one
        for _ in range(e):
            result = self.mul(result, a)
        return result

    # associates -----------------------------------------------------------
    def normalizing_unit(self, a):
        """A unit ``u`` with ``u*a`` canonical (``one`` for zero)."""
        raise NotImplementedError

    def canonical(self, a):
        return self.mul(self.normalizing_unit(a), a)

    def is_unit(self, a) -> bool:
        return not self.is_zero(a) and self.canonical(a) == self.one

    def mod(self, a, e):
        """Reduce ``a`` modulo ``e``; a zero modulus leaves ``a`` unchanged."""
        if self.is_zero(e):
            return a
        return self.divmod(a, e)[1]

    def divides(self, e, a) -> bool:
        if self.is_zero(e):
            return self.is_zero(a)
        return self.is_zero(self.divmod(a, e)[1])

    def xgcd(self, a, b):
        """Return ``(g, u, v)`` with ``u*a + v*b = g`` and ``g`` canonical."""
        r0, r1 = a, b
        s0, s1 = self.one, self.zero
        t0, t1 = self.zero, self.one
        while not self.is_zero(r1):
            q, r = self.divmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, self.sub(s0, self.mul(q, s1))
            t0, t1 = t1, self.sub(t0, self.mul(q, t1))
        u = self.normalizing_unit(r0)
        return self.mul(u, r0), self.mul(u, s0), self.mul(u, t0)

    def gcd(self, a, b):
        return self.xgcd(a, b)[0]

    # primes ---------------------------------------------------------------
    def factor(self, a) -> list[tuple[Any, int]]:
        raise NotImplementedError

    def is_prime(self, a) -> bool:
        raise NotImplementedError

    def prime_key(self, p):
        """Sort key giving the canonical order of primes."""
        return p

    # serialization --------------------------------------------------------
    def parse(self, s: str):
        raise NotImplementedError

    def format(self, a) -> str:
        raise NotImplementedError

    def coerce(self, a):
        """Accept loose Python input (ints, lists, strings) as a ring element."""
        if isinstance(a, str):
            return self.parse(a)
        return a

    def _check_nonzero_nonunit(self, a):
        if self.is_zero(a):
            raise RingError("cannot factor zero")
        if self.is_unit(a):
            raise RingError(f"cannot factor the unit {self.format(a)}")


# ---------------------------------------------------------------------------
# integers


@dataclass(frozen=True)
class IntegerRing(Ring):
    zero = 0
    one = 1

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def divmod(self, a, b):
        return divmod(a, b)

    def norm(self, a):
        return abs(a)

    def pow(self, a, e):
        return a**e

    def normalizing_unit(self, a):
        return -1 if a < 0 else 1

    def canonical(self, a):
        return abs(a)

    def is_unit(self, a):
        return a in (1, -1)

    def mod(self, a, e):
        return a % abs(e) if e else a

    def factor(self, a):
        self._check_nonzero_nonunit(a)
        return sorted(_factor_int(abs(a)).items())

    def is_prime(self, a):
        return isinstance(a, int) and _is_probable_prime(a)

    def parse(self, s):
        return int(s)

    def format(self, a):
        return str(a)

    def coerce(self, a):
        if isinstance(a, bool) or not isinstance(a, (int, str)):
            raise RingError(f"not an integer: {a!r}")
        return int(a)

    def __str__(self):
        return "Z"


_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def _is_probable_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in _SMALL_PRIMES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    # deterministic for n < 3.3e24
    for a in _SMALL_PRIMES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int) -> int:
    if n % 2 == 0:
        return 2
    rng = random.Random(n)
    while True:
        c = rng.randrange(1, n)
        x = y = rng.randrange(2, n)
        d = 1
        while d == 1:
            x = (x * x + c) % n
            y = (y * y + c) % n
            y = (y * y + c) % n
            d = math.gcd(abs(x - y), n)
        if d != n:
            return d


def _factor_int(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    q = 2
    while q * q <= n and q <= 10**6:
        while n % q == 0:
            out[q] = out.get(q, 0) + 1
            n //= q
        q += 1 if q == 2 else 2
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if _is_probable_prime(m):
            out[m] = out.get(m, 0) + 1
        else:
            d = _pollard_rho(m)
            stack += [d, m // d]
    return out


# ---------------------------------------------------------------------------
# F_p[x]


@dataclass(frozen=True)
class PolyRing(Ring):
    p: int

    zero = ()
    one = (1,)

    def __post_init__(self):
        if not (2 <= self.p <= 97 and _is_probable_prime(self.p)):
            raise RingError(f"F_p[x] needs a prime 2 <= p <= 97, got {self.p}")

    def _trim(self, c):
        c = list(c)
        while c and c[-1] == 0:
            c.pop()
        return tuple(c)

    def add(self, a, b):
        p = self.p
        n = max(len(a), len(b))
        return self._trim(
            ((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)) % p
            for i in range(n)
        )

    def neg(self, a):
        return tuple((-c) % self.p for c in a)

    def mul(self, a, b):
        if not a or not b:
            return ()
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return self._trim(c % self.p for c in out)

    def divmod(self, a, b):
        if not b:
            raise ZeroDivisionError("polynomial division by zero")
        p = self.p
        r = list(a)
        db = len(b) - 1
        inv = pow(b[-1], p - 2, p)
        q = [0] * max(len(a) - db, 0)
        for k in range(len(a) - 1, db - 1, -1):
            c = r[k] * inv % p
            if c:
                q[k - db] = c
                for j, y in enumerate(b):
                    r[k - db + j] = (r[k - db + j] - c * y) % p
        return self._trim(q), self._trim(r[:db])

    def norm(self, a):
        return len(a) - 1

    def normalizing_unit(self, a):
        if not a:
            return self.one
        return (pow(a[-1], self.p - 2, self.p),)

    def canonical(self, a):
        if not a or a[-1] == 1:
            return a
        inv = pow(a[-1], self.p - 2, self.p)
        return tuple(c * inv % self.p for c in a)

    def is_unit(self, a):
        return len(a) == 1

    def factor(self, a):
        self._check_nonzero_nonunit(a)
        return _factor_poly(self.p, self.canonical(a))

    def is_prime(self, a):
        if len(a) < 2 or a != self.canonical(a):
            return False
        return _factor_poly(self.p, a) == [(a, 1)]

    def prime_key(self, p):
        return (len(p), tuple(reversed(p)))

    def parse(self, s):
        body, _, mod = s.strip().partition("@")
        if mod and int(mod) != self.p:
            raise RingError(f"element {s!r} is not over F_{self.p}")
        coeffs = [int(c) for c in body.strip().strip("[]").split(",") if c.strip()]
        return self._trim(c % self.p for c in coeffs)

    def format(self, a):
        return "[" + ",".join(map(str, a)) + f"]@{self.p}"

    def coerce(self, a):
        if isinstance(a, str):
            return self.parse(a)
        if isinstance(a, int) and not isinstance(a, bool):
            return self._trim([a % self.p])
        return self._trim(int(c) % self.p for c in a)

    def __str__(self):
        return f"Fp[x]:{self.p}"


@lru_cache(maxsize=4096)
def _factor_poly(p: int, f: tuple) -> list[tuple[tuple, int]]:
    """Trial division by monic polynomials of increasing degree."""
    ring = PolyRing(p)
    out = []
    d = 1
    while 2 * d <= len(f) - 1:
        for tail in itertools.product(range(p), repeat=d):
            g = tail + (1,)
            e = 0
            while True:
                q, r = ring.divmod(f, g)
                if r:
                    break
                f, e = q, e + 1
            if e:
                out.append((g, e))
            if 2 * d > len(f) - 1:
                break
        d += 1
    if len(f) > 1:
        out.append((f, 1))
    merged: dict[tuple, int] = {}
    for g, e in out:
        merged[g] = merged.get(g, 0) + e
    return sorted(merged.items(), key=lambda t: ring.prime_key(t[0]))


# ---------------------------------------------------------------------------
# fields


@dataclass(frozen=True)
class FieldRing(Ring):
    """A field: every nonzero element is a unit and there are no primes."""

    label: str = "Q"

    zero = Fraction(0)
    one = Fraction(1)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def divmod(self, a, b):
        return a / b, Fraction(0)

    def norm(self, a):
        return 0

    def normalizing_unit(self, a):
        return 1 / a if a else Fraction(1)

    def canonical(self, a):
        return Fraction(1) if a else Fraction(0)

    def is_unit(self, a):
        return a != 0

    def factor(self, a):
        raise RingError(f"field {self.label} has no prime elements")

    def is_prime(self, a):
        return False

    def parse(self, s):
        return Fraction(s)

    def format(self, a):
        return str(a)

    def coerce(self, a):
        return Fraction(a)

    def __str__(self):
        return f"field:{self.label}"


ZZ = IntegerRing()


def parse_ring(s: str) -> Ring:
    """Parse ``"Z"``, ``"Fp[x]:p"`` or ``"field:<label>"``."""
    s = s.strip()
    if s == "Z":
        return ZZ
    if s.startswith("Fp[x]:"):
        return PolyRing(int(s[len("Fp[x]:"):]))
    if s.startswith("field:"):
        return FieldRing(s[len("field:"):])
    raise RingError(f"unknown ring {s!r}")


def same_ring(*rings: Ring) -> Ring:
    first = rings[0]
    for r in rings[1:]:
        if r != first:
            raise RingError(f"ring mismatch: {first} vs {r}")
    return first
