"""The IC' reverse walk on triples ``(x, y, z)``.

One step (``Tr``)::

    if odd(y) and (x == 0 or y < 3**(x-1)): Err := true; exit
    x := x - 1;  y := y - 3**x;  k := expo(y);  y := y / 2**k;  z := z - k

The walk runs while ``x + y + z != 0``.  When the subtraction leaves
``y == 0`` the exponent of 2 is undefined; that step consumes everything
left in ``z`` and lands on ``(0, 0, 0)``.  This is the only place where
``expo(0)`` is given a meaning.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterator

import random
from collections import Counter

from .certificates import CertificateError, CertificationError, certify, recover_n
from .numdomain import expo

__all__ = [
    "ReverseState",
    "ReverseError",
    "RoundTripReport",
    "ic_step",
    "ic_walk",
    "ic_run",
    "rebuild_ms",
    "roundtrip_check",
    "classify_triple",
    "perturbation_survey",
]


class ReverseError(ValueError):
    """``ic_step`` called on a finished or failed state."""


@dataclass(frozen=True)
class ReverseState:
    x: int
    y: int
    z: int
    err: bool = False
    consumed_ks: tuple[int, ...] = ()
    recovered_ms: tuple[int, ...] = ()
    reason: str = ""
    exhausted: bool = False

    @property
    def done(self) -> bool:
        return not self.err and self.x == self.y == self.z == 0

    @property
    def status(self) -> str:
        if self.err:
            return "err"
        if self.done:
            return "reached"
        return "exhausted" if self.exhausted else "running"

    def to_dict(self) -> dict:
        d = {"x": str(self.x), "y": str(self.y), "z": str(self.z),
             "err": self.err, "consumed_ks": list(self.consumed_ks)}
        if self.reason:
            d["reason"] = self.reason
        return d


def _fail(s: ReverseState, reason: str) -> ReverseState:
    return replace(s, err=True, reason=reason)


def ic_step(s: ReverseState) -> ReverseState:
    if s.err:
        raise ReverseError("state already failed")
    if s.x + s.y + s.z == 0:
        raise ReverseError("walk already reached (0, 0, 0)")
    x, y, z = s.x, s.y, s.z
    if y & 1 and (x == 0 or y < 3 ** (x - 1)):
        return _fail(s, "guard")
    if x == 0:
        return _fail(s, "x underflow")
    x -= 1
    y -= 3 ** x
    if y < 0:
        return _fail(s, "y underflow")
    if y == 0:
        k = z  # terminal corner
    else:
        k = expo(y)
        assert y % (1 << k) == 0
        y >>= k
    z -= k
    if z < 0:
        return _fail(s, "z underflow")
    return replace(s, x=x, y=y, z=z, consumed_ks=s.consumed_ks + (k,))


def ic_walk(x: int, y: int, z: int, fuel: int) -> Iterator[ReverseState]:
    """Yield the initial state and every state after a step."""
    s = ReverseState(x, y, z)
    if x + y + z == 0:
        yield replace(s, recovered_ms=(1,))
        return
    yield s
    steps = 0
    while s.x + s.y + s.z != 0:
        if steps == fuel:
            yield replace(s, exhausted=True)
            return
        s = ic_step(s)
        steps += 1
        if s.err:
            yield s
            return
        if s.x + s.y + s.z == 0:
            s = replace(s, recovered_ms=rebuild_ms(s.consumed_ks))
        yield s


def ic_run(x: int, y: int, z: int, fuel: int = 10**6) -> ReverseState:
    for s in ic_walk(x, y, z, fuel):
        pass
    return s


def rebuild_ms(consumed_ks) -> tuple[int, ...]:
    """Odd values met on the way back from 1: ``m <- (m * 2**k - 1) / 3``.

    The consumed exponents are used last-first.  Returns ``(1, ..., m_0)``;
    empty if any step is not an exact division.
    """
    ms = [1]
    for k in reversed(consumed_ks):
        q, r = divmod((ms[-1] << k) - 1, 3)
        if r:
            return ()
        ms.append(q)
    return tuple(ms)


@dataclass
class RoundTripReport:
    n: int
    ok: bool
    forward_ms: list[int] = field(default_factory=list)
    reverse_ms: list[int] = field(default_factory=list)
    forward_ks: list[int] = field(default_factory=list)
    consumed_ks: list[int] = field(default_factory=list)
    mismatch_at: int | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def roundtrip_check(n: int, fuel: int = 10**6) -> RoundTripReport:
    """Certify ``n``, walk its triple back to ``(0, 0, 0)``, compare chains.

    Even ``n`` is first reduced to its odd part ``m_0``: the triple becomes
    ``(x, y / 2**k_0, z - k_0)``.
    """
    try:
        cert = certify(n, fuel)
    except CertificationError as exc:
        return RoundTripReport(n, False, reason=str(exc))
    k0 = cert.k[0]
    x, y, z = cert.x, cert.y >> k0, cert.z - k0
    fwd_ms = [n >> k0]
    m = fwd_ms[0]
    for kj in cert.k[1:]:
        m = (3 * m + 1) >> kj
        fwd_ms.append(m)
    rep = RoundTripReport(n, False, forward_ms=fwd_ms, forward_ks=list(cert.k))
    final = ic_run(x, y, z, fuel)
    rep.consumed_ks = list(final.consumed_ks)
    if final.err:
        rep.reason = f"IC' error at ({final.x}, {final.y}, {final.z}): {final.reason}"
        return rep
    if not final.done:
        rep.reason = "fuel exhausted before (0, 0, 0)"
        return rep
    if sum(final.consumed_ks) != z:
        rep.reason = f"consumed {sum(final.consumed_ks)} halvings, expected {z}"
        return rep
    rep.reverse_ms = list(final.recovered_ms)
    expected = fwd_ms[::-1]
    for idx, (a, b) in enumerate(zip(rep.reverse_ms, expected)):
        if a != b:
            rep.mismatch_at = idx
            rep.reason = f"reverse chain has {a} where forward has {b}"
            return rep
    if len(rep.reverse_ms) != len(expected):
        rep.mismatch_at = min(len(rep.reverse_ms), len(expected))
        rep.reason = "chain lengths differ"
        return rep
    if rep.consumed_ks != list(cert.k[1:]):
        rep.reason = f"consumed {rep.consumed_ks}, forward k_1..k_x = {list(cert.k[1:])}"
        return rep
    rep.ok = True
    return rep


def classify_triple(n: int, x: int, y: int, z: int, fuel: int = 10**6) -> str:
    """How a claimed certificate ``(n, x, y, z)`` fares on the reverse side.

    ``"accepted"`` only if IC' reaches ``(0, 0, 0)`` on the odd-part triple
    and ``(2**z - y) / 3**x`` is exactly ``n``.  Otherwise one of
    ``"ic-err"``, ``"ic-fuel"``, ``"no-preimage"``, ``"wrong-preimage"``.
    """
    k0 = (n & -n).bit_length() - 1
    mask = (1 << k0) - 1
    if y & mask or z < k0:
        return "ic-err"
    final = ic_run(x, y >> k0, z - k0, fuel)
    if final.err:
        return "ic-err"
    if not final.done:
        return "ic-fuel"
    try:
        m = recover_n(x, y, z)
    except CertificateError:
        return "no-preimage"
    return "accepted" if m == n else "wrong-preimage"


def perturbation_survey(ns, samples: int, seed: int = 0) -> Counter:
    """Bump one of ``n, x, y, z`` by +1 on random certificates; tally outcomes."""
    rng = random.Random(seed)
    pool = list(ns)
    tally: Counter = Counter()
    for _ in range(samples):
        n = rng.choice(pool)
        c = certify(n)
        fields = {"n": c.n, "x": c.x, "y": c.y, "z": c.z}
        name = rng.choice(sorted(fields))
        fields[name] += 1
        tally[classify_triple(fields["n"], fields["x"], fields["y"], fields["z"])] += 1
    return tally
