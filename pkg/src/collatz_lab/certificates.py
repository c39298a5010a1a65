"""Halting certificates ``n * 3**x + y = 2**z``.

A certificate stores the whole exponent sequence ``k_0..k_x`` of the
trajectory, so it can be re-checked without re-running anything:

    z = k_0 + ... + k_x
    y = sum_{j<x} 3**(x-1-j) * 2**(k_0 + ... + k_j)

The ``y`` sum is evaluated twice during verification, once directly and
once in nested (Horner) form, and the two must agree.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

from .numdomain import expo
from .trajectories import Trace, run_gr3

__all__ = [
    "Certificate",
    "CertificateError",
    "CertificationError",
    "Verdict",
    "TrivialTriple",
    "certify",
    "verify",
    "y_direct",
    "y_horner",
    "trivial_certificate",
    "recover_n",
    "first_balancing_index",
    "to_json",
    "from_json",
]


class CertificateError(ValueError):
    """Malformed certificate data, or a triple with no natural preimage."""


class CertificationError(RuntimeError):
    """The run did not halt within its fuel; ``trace`` holds the partial run."""

    def __init__(self, n: int, trace: Trace):
        super().__init__(f"no certificate for n={n}: {trace.outcome.kind.value} "
                         f"after {trace.outcome.steps} steps")
        self.n = n
        self.trace = trace


@dataclass(frozen=True)
class Certificate:
    n: int
    x: int
    y: int
    z: int
    k: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "k", tuple(self.k))

    @property
    def triple(self) -> tuple[int, int, int]:
        return self.x, self.y, self.z


def certify(n: int, fuel: int = 10**6) -> Certificate:
    """Certificate read off a halted Gr3 run.

    ``x`` is the first iteration index at which Gr3's guard balances.
    """
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ValueError(f"certify needs a natural number >= 1, got {n!r}")
    trace = run_gr3(n, fuel)
    if not trace.outcome.is_halted:
        raise CertificationError(n, trace)
    x, y, z = trace.triple
    return Certificate(n, x, y, z, tuple(trace.ks))


def y_direct(k: Sequence[int]) -> int:
    """The double sum, with ``x = len(k) - 1``."""
    x = len(k) - 1
    total = 0
    for j in range(x):
        total += 3 ** (x - 1 - j) * 2 ** sum(k[: j + 1])
    return total


def y_horner(k: Sequence[int]) -> int:
    """``2**k_0 * (3**(x-1) + 2**k_1 * (3**(x-2) + ... + 2**k_{x-1} * 3**0))``."""
    x = len(k) - 1
    acc = 0
    for j in range(x - 1, -1, -1):
        acc = (3 ** (x - 1 - j) + acc) << k[j]
    return acc


@dataclass(frozen=True)
class Verdict:
    ok: bool
    clause: str = ""
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok


def verify(cert: Certificate) -> Verdict:
    """Re-check a certificate from its ``k`` sequence alone.

    Clauses, in order: ``structure``, ``k0``, ``z``, ``y-direct``,
    ``y-horner``, ``equation``.  The first failing clause is reported.
    """
    n, x, y, z, k = cert.n, cert.x, cert.y, cert.z, cert.k
    ints = [n, x, y, z, *k]
    if any(isinstance(v, bool) or not isinstance(v, int) or v < 0 for v in ints):
        return Verdict(False, "structure", "fields must be non-negative integers")
    if n < 1:
        return Verdict(False, "structure", "n must be >= 1")
    if len(k) != x + 1:
        return Verdict(False, "structure", f"expected {x + 1} exponents, got {len(k)}")
    if any(kj < 1 for kj in k[1:]):
        return Verdict(False, "structure", "k_j must be >= 1 for j >= 1")
    if k[0] != expo(n):
        return Verdict(False, "k0", f"k_0 = {k[0]} but expo(n) = {expo(n)}")
    if sum(k) != z:
        return Verdict(False, "z", f"sum of k = {sum(k)} != z = {z}")
    yd = y_direct(k)
    if yd != y:
        return Verdict(False, "y-direct", f"double sum gives {yd}, certificate says {y}")
    yh = y_horner(k)
    if yh != y:
        return Verdict(False, "y-horner", f"nested form gives {yh}, certificate says {y}")
    if n * 3 ** x + y != 1 << z:
        return Verdict(False, "equation", f"{n}*3^{x} + {y} != 2^{z}")
    return Verdict(True)


def first_balancing_index(n: int, k: Sequence[int]) -> int | None:
    """Least ``x'`` with ``n * 3**x' + y(k[:x'+1]) = 2**z(k[:x'+1])``."""
    y = 0
    z = 0
    p3 = 1
    for xp, kj in enumerate(k):
        if xp:
            y = 3 * y + (1 << z)
            p3 *= 3
        z += kj
        if n * p3 + y == 1 << z:
            return xp
    return None


@dataclass(frozen=True)
class TrivialTriple:
    """A solution of ``n + y = 2**z`` with ``x = 0``; not a Collatz certificate."""

    x: int
    y: int
    z: int
    collatz: bool = False


def trivial_certificate(n: int) -> TrivialTriple:
    """``x = 0``, ``z`` the least exponent with ``2**z >= n``, ``y = 2**z - n``."""
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ValueError(f"n must be >= 1, got {n!r}")
    z = (n - 1).bit_length()
    return TrivialTriple(0, (1 << z) - n, z)


def recover_n(x: int, y: int, z: int) -> int:
    """``(2**z - y) / 3**x``; raises :class:`CertificateError` if not a natural."""
    top = (1 << z) - y
    if top <= 0:
        raise CertificateError(f"2^{z} <= {y}: no natural preimage")
    q, r = divmod(top, 3 ** x)
    if r:
        raise CertificateError(f"3^{x} does not divide 2^{z} - {y}")
    return q


# -- JSON -------------------------------------------------------------------

def to_json(cert: Certificate) -> str:
    """Fixed field order; unbounded ``n`` and ``y`` as decimal strings."""
    return json.dumps(
        {"n": str(cert.n), "x": cert.x, "y": str(cert.y), "z": cert.z, "k": list(cert.k)},
        separators=(",", ":"),
    )


def _reject_float(text):
    raise CertificateError(f"floats are not allowed: {text}")


def _decimal(value, name: str) -> int:
    if not isinstance(value, str) or not value.isdigit() or not value.isascii():
        raise CertificateError(f"{name!r} must be a decimal string, got {value!r}")
    return int(value)


def _integer(value, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise CertificateError(f"{name!r} must be a non-negative integer, got {value!r}")
    return value


def from_json(text: str) -> Certificate:
    try:
        data = json.loads(text, parse_float=_reject_float, parse_constant=_reject_float)
    except json.JSONDecodeError as exc:
        raise CertificateError(f"invalid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise CertificateError("certificate must be a JSON object")
    if set(data) != {"n", "x", "y", "z", "k"}:
        raise CertificateError(f"expected keys n, x, y, z, k; got {sorted(data)}")
    k = data["k"]
    if not isinstance(k, list):
        raise CertificateError("'k' must be a list")
    return Certificate(
        n=_decimal(data["n"], "n"),
        x=_integer(data["x"], "x"),
        y=_decimal(data["y"], "y"),
        z=_integer(data["z"], "z"),
        k=tuple(_integer(v, "k") for v in k),
    )
