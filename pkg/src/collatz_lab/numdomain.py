"""Exact arithmetic substrate shared by every other module.

Two domains are supported:

* the standard naturals, carried as plain Python ``int`` (``Nat``);
* the Jaskowski structure of pairs ``<k, w>`` with ``k`` an integer and
  ``w`` a non-negative rational (:class:`JElem`).  Pairs with ``w == 0``
  are the reachable elements and behave exactly like the naturals.

Trajectory code never branches on the domain directly; it goes through the
small generic interface at the bottom of this module (``add``, ``is_even``,
``div2``, ``times3plus1``, ``is_one``, ``compare``, ``is_reachable``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

__all__ = [
    "DomainError",
    "JElem",
    "DomainElement",
    "Rat",
    "expo",
    "odd_part",
    "parse_nat",
    "render_nat",
    "parse_rat",
    "parse_jelem",
    "render",
    "jadd",
    "jdiv2",
    "ZERO",
    "ONE",
    "add",
    "is_even",
    "div2",
    "times3plus1",
    "is_one",
    "one_like",
    "compare",
    "is_reachable",
    "p2",
    "p3",
]

# Rat is the stdlib Fraction: always in lowest terms with a positive
# denominator, and equal/hashes by value.
Rat = Fraction


class DomainError(ValueError):
    """Raised when an operation leaves (or is applied outside) its domain."""


def _check_nat(x, name: str = "x") -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise DomainError(f"{name} must be a natural number, got {x!r}")
    if x < 0:
        raise DomainError(f"{name} must be non-negative, got {x}")
    return x


def expo(x: int) -> int:
    """Largest ``l`` such that ``2**l`` divides ``x``.

    ``expo(0)`` is a :class:`DomainError`: the defining loop
    ``while even(y) do y := y div 2`` never terminates on zero.
    """
    _check_nat(x)
    if x == 0:
        raise DomainError("expo(0) is undefined")
    return (x & -x).bit_length() - 1


def odd_part(x: int) -> int:
    return x >> expo(x)


_NAT_RE = re.compile(r"[0-9]+")


def parse_nat(text: str) -> int:
    """Parse a plain decimal numeral (digits only, no sign, no underscores)."""
    text = text.strip()
    if not _NAT_RE.fullmatch(text):
        raise DomainError(f"not a decimal natural number: {text!r}")
    return int(text)


def render_nat(n: int) -> str:
    return str(_check_nat(n, "n"))


_RAT_RE = re.compile(r"([0-9]+)(?:/([0-9]+))?")


def parse_rat(text: str) -> Fraction:
    """Parse ``"p"`` or ``"p/q"`` into a non-negative exact rational."""
    m = _RAT_RE.fullmatch(text.strip())
    if m is None:
        raise DomainError(f"not a non-negative rational: {text!r}")
    num, den = m.group(1), m.group(2)
    if den is not None and int(den) == 0:
        raise DomainError(f"zero denominator in {text!r}")
    return Fraction(int(num), int(den) if den is not None else 1)


@dataclass(frozen=True, order=False)
class JElem:
    """Element ``<k, w>`` of the Jaskowski structure (think ``k + i*w``).

    ``w`` must be non-negative, and ``w == 0`` forces ``k >= 0``.
    Parity is the parity of ``k``.
    """

    k: int
    w: Fraction = Fraction(0)

    def __post_init__(self):
        if isinstance(self.k, bool) or not isinstance(self.k, int):
            raise DomainError(f"k must be an integer, got {self.k!r}")
        w = self.w
        if isinstance(w, bool) or not isinstance(w, (int, Fraction)):
            raise DomainError(f"w must be an exact rational, got {w!r}")
        w = Fraction(w)
        if w < 0:
            raise DomainError(f"w must be non-negative, got {w}")
        if w == 0 and self.k < 0:
            raise DomainError(f"<{self.k}, 0> is not an element: w = 0 requires k >= 0")
        object.__setattr__(self, "w", w)

    @property
    def reachable(self) -> bool:
        return self.w == 0

    @property
    def even(self) -> bool:
        return self.k % 2 == 0

    def __add__(self, other: "JElem") -> "JElem":
        if not isinstance(other, JElem):
            return NotImplemented
        return jadd(self, other)

    def __lt__(self, other: "JElem") -> bool:
        return compare(self, other) < 0

    def __le__(self, other: "JElem") -> bool:
        return compare(self, other) <= 0

    def __gt__(self, other: "JElem") -> bool:
        return compare(self, other) > 0

    def __ge__(self, other: "JElem") -> bool:
        return compare(self, other) >= 0

    def __str__(self) -> str:
        return f"{self.k}+{self.w}"

    def __repr__(self) -> str:
        return f"JElem({self.k}, {self.w})"


DomainElement = Union[int, JElem]

ZERO = JElem(0, Fraction(0))
ONE = JElem(1, Fraction(0))

_JELEM_RE = re.compile(r"(-?[0-9]+)\+([0-9]+(?:/[0-9]+)?)")


def parse_jelem(text: str) -> JElem:
    """Parse the textual form ``"k+num/den"`` (e.g. ``"8+1/2"``, ``"-3+2"``)."""
    m = _JELEM_RE.fullmatch(text.strip())
    if m is None:
        raise DomainError(f"not a Jaskowski element: {text!r}")
    return JElem(int(m.group(1)), parse_rat(m.group(2)))


def render(v: DomainElement) -> str:
    """Decimal string for a natural, ``"k+w"`` for a Jaskowski element."""
    if isinstance(v, JElem):
        return str(v)
    return render_nat(v)


def jadd(a: JElem, b: JElem) -> JElem:
    # JElem's constructor re-checks the w = 0 => k >= 0 condition.
    return JElem(a.k + b.k, a.w + b.w)


def jdiv2(a: JElem) -> JElem:
    if a.k % 2:
        raise DomainError(f"jdiv2 requires an even element, got {a}")
    return JElem(a.k // 2, a.w / 2)


def _domain_of(v) -> type:
    if isinstance(v, JElem):
        return JElem
    if isinstance(v, int) and not isinstance(v, bool):
        if v < 0:
            raise DomainError(f"negative value {v} is not a natural number")
        return int
    raise DomainError(f"not a domain element: {v!r}")


def add(a: DomainElement, b: DomainElement) -> DomainElement:
    if _domain_of(a) is not _domain_of(b):
        raise DomainError("cannot mix natural and Jaskowski elements")
    return a + b


def is_even(v: DomainElement) -> bool:
    if type(v) is int:
        return not v & 1
    return v.even


def div2(v: DomainElement) -> DomainElement:
    if type(v) is int:
        if v & 1:
            raise DomainError(f"div2 requires an even value, got {v}")
        return v >> 1
    return jdiv2(v)


def one_like(v: DomainElement) -> DomainElement:
    return ONE if isinstance(v, JElem) else 1


def times3plus1(v: DomainElement) -> DomainElement:
    """``add(add(add(v, v), v), one)``, built from addition only."""
    if type(v) is int:
        return 3 * v + 1
    return jadd(jadd(jadd(v, v), v), ONE)


def is_one(v: DomainElement) -> bool:
    if type(v) is int:
        return v == 1
    return v == ONE


def is_reachable(v: DomainElement) -> bool:
    if isinstance(v, JElem):
        return v.reachable
    _domain_of(v)
    return True


def compare(a: DomainElement, b: DomainElement) -> int:
    """Three-way comparison (-1, 0, 1) within one domain.

    Jaskowski elements are ordered lexically: by ``w`` first, then by ``k``.
    Every reachable element therefore sits below every unreachable one.
    """
    da, db = _domain_of(a), _domain_of(b)
    if da is not db:
        raise DomainError("cross-domain comparison")
    if da is JElem:
        ka, kb = (a.w, a.k), (b.w, b.k)
    else:
        ka, kb = a, b
    return (ka > kb) - (ka < kb)


def p2(x: int) -> int:
    """``2**x`` computed by repeated addition: P2(0)=1, P2(x+1)=P2(x)+P2(x)."""
    _check_nat(x)
    r = 1
    for _ in range(x):
        r = r + r
    return r


def p3(y: int, x: int) -> int:
    """``y * 3**x`` by repeated addition: P3(y,0)=y, P3(y,x+1)=3 copies summed."""
    _check_nat(y, "y")
    _check_nat(x)
    r = y
    for _ in range(x):
        r = r + r + r
    return r
