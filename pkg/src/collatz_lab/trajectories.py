"""Fuel-bounded executors for Cl and the Gr family.

Every executor returns a :class:`Trace` holding the full primitive value
sequence, the operation string (``D`` = halve, ``T`` = ``3n+1``), one
:class:`OddStepRecord` per completed division burst, and a
:class:`RunOutcome`.  Fuel is always counted in primitive Cl steps, so a
Gr-family run and a Cl run of the same input spend the same fuel.

Cl builds its odd-step records afterwards from the operation string; the Gr
family builds them on the fly in one shared engine.  The two paths are
compared against each other in the test suite.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from .numdomain import (
    DomainElement,
    JElem,
    div2,
    is_even,
    is_one,
    is_reachable,
    parse_jelem,
    parse_nat,
    render,
    times3plus1,
)

__all__ = [
    "StepOp",
    "Outcome",
    "RunOutcome",
    "OddStepRecord",
    "Trace",
    "InvariantReport",
    "run_cl",
    "run_gr",
    "run_gr1",
    "run_gr2",
    "run_gr3",
    "run",
    "ALGORITHMS",
    "check_invariant",
    "detect_cycle",
    "domain_closure_check",
    "odd_steps_from_ops",
    "trace_to_json",
    "trace_from_json",
    "trace_to_text",
]


class StepOp(str, enum.Enum):
    DIV2 = "D"
    TIMES_THREE_PLUS_ONE = "T"


class Outcome(str, enum.Enum):
    HALTED = "halted"
    FUEL_EXHAUSTED = "fuel_exhausted"
    CYCLE_DETECTED = "cycle_detected"
    REVERSE_ERROR = "reverse_error"


@dataclass(frozen=True)
class RunOutcome:
    kind: Outcome
    steps: int = 0
    fuel: int | None = None
    entry: int | None = None
    period: int | None = None
    # (entry, period) of the k-projection when the full values never repeat
    projected_cycle: tuple[int, int] | None = None

    @classmethod
    def halted(cls, steps: int) -> "RunOutcome":
        return cls(Outcome.HALTED, steps=steps)

    @classmethod
    def fuel_exhausted(cls, fuel: int, projected_cycle=None) -> "RunOutcome":
        return cls(Outcome.FUEL_EXHAUSTED, steps=fuel, fuel=fuel,
                   projected_cycle=projected_cycle)

    @classmethod
    def cycle(cls, entry: int, period: int, steps: int) -> "RunOutcome":
        return cls(Outcome.CYCLE_DETECTED, steps=steps, entry=entry, period=period)

    @property
    def is_halted(self) -> bool:
        return self.kind is Outcome.HALTED

    def to_dict(self) -> dict:
        d = {"kind": self.kind.value, "steps": self.steps}
        if self.fuel is not None:
            d["fuel"] = self.fuel
        if self.entry is not None:
            d["entry"] = self.entry
            d["period"] = self.period
        if self.projected_cycle is not None:
            d["projected_cycle"] = list(self.projected_cycle)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunOutcome":
        pc = d.get("projected_cycle")
        return cls(Outcome(d["kind"]), steps=d.get("steps", 0), fuel=d.get("fuel"),
                   entry=d.get("entry"), period=d.get("period"),
                   projected_cycle=tuple(pc) if pc is not None else None)


@dataclass(frozen=True)
class OddStepRecord:
    """State after the ``i``-th division burst.

    ``k`` halvings were spent in the burst, leaving the odd value ``m``.
    ``X, Y, Z`` are the accumulated triple: ``X = i``, ``Z = k_0 + ... + k_i``
    and ``Y_{i+1} = 3 Y_i + 2**Z_i`` with ``Y_0 = 0``.
    """

    i: int
    k: int
    m: DomainElement
    X: int
    Y: int
    Z: int


@dataclass
class Trace:
    start: DomainElement
    ops: str
    values: list
    odd_steps: list[OddStepRecord]
    outcome: RunOutcome
    algo: str = "cl"

    @property
    def final(self) -> DomainElement:
        return self.values[-1]

    @property
    def ks(self) -> list[int]:
        return [r.k for r in self.odd_steps]

    @property
    def ms(self) -> list:
        return [r.m for r in self.odd_steps]

    @property
    def triple(self) -> tuple[int, int, int] | None:
        """Final ``(x, y, z)``; ``None`` unless the run halted."""
        if not self.outcome.is_halted or not self.odd_steps:
            return None
        r = self.odd_steps[-1]
        return r.X, r.Y, r.Z

    @property
    def odd_level_values(self) -> list:
        """The initial burst value by value, then one value per odd step."""
        if not self.odd_steps:
            return list(self.values)
        k0 = self.odd_steps[0].k
        return list(self.values[: k0 + 1]) + [r.m for r in self.odd_steps[1:]]

    @property
    def k_projection(self) -> list[int]:
        return [v.k if isinstance(v, JElem) else v for v in self.values]


def _check_fuel(fuel: int) -> int:
    if isinstance(fuel, bool) or not isinstance(fuel, int) or fuel < 0:
        raise ValueError(f"fuel must be a non-negative integer, got {fuel!r}")
    return fuel


def _check_start(n, *, nat_only: bool = False, positive: bool = False):
    if isinstance(n, JElem):
        if nat_only:
            raise ValueError("this algorithm is defined on natural numbers only")
        return n
    if isinstance(n, bool) or not isinstance(n, int) or n < 0:
        raise ValueError(f"start must be a natural number or JElem, got {n!r}")
    if positive and n < 1:
        raise ValueError(f"start must be >= 1, got {n}")
    return n


def _cycle_outcome(values: list, period: int, t: int) -> RunOutcome:
    entry = next(j for j in range(len(values) - period)
                 if values[j] == values[j + period])
    return RunOutcome.cycle(entry, period, t)


def odd_steps_from_ops(ops: str, values: Sequence) -> list[OddStepRecord]:
    """Rebuild the per-burst records from a primitive trace.

    A burst counts as complete once it reaches an odd value.
    """
    records: list[OddStepRecord] = []
    pos = 0
    i = 0
    Y = Z = 0
    nops = len(ops)
    while True:
        k = 0
        while pos + k < nops and ops[pos + k] == "D":
            k += 1
        end = pos + k
        if is_even(values[end]):
            break
        if i > 0:
            Y = 3 * Y + (1 << Z)
        Z += k
        records.append(OddStepRecord(i, k, values[end], i, Y, Z))
        if end >= nops:
            break
        pos = end + 1  # skip the T
        i += 1
    return records


def run_cl(n: DomainElement, fuel: int) -> Trace:
    """Cl: ``while n != 1: n := n/2 if even else 3n+1``.

    An exact repeat of a value is reported as ``CycleDetected``; for the
    naturals that only happens from 0 (``0 -> 0``).
    """
    _check_start(n)
    _check_fuel(fuel)
    if type(n) is int:
        return _run_cl_nat(n, fuel)
    values = [n]
    ops: list[str] = []
    mark, mark_t, next_mark = n, 0, 1  # Brent-style checkpoint
    v = n
    t = 0
    outcome = None
    while not is_one(v):
        if t == fuel:
            outcome = RunOutcome.fuel_exhausted(fuel)
            break
        if is_even(v):
            v = div2(v)
            ops.append("D")
        else:
            v = times3plus1(v)
            ops.append("T")
        t += 1
        values.append(v)
        if v == mark:
            outcome = _cycle_outcome(values, t - mark_t, t)
            break
        if t == next_mark:
            mark, mark_t, next_mark = v, t, 2 * t
    if outcome is None:
        outcome = RunOutcome.halted(t)
    opstr = "".join(ops)
    records = odd_steps_from_ops(opstr, values)
    return Trace(n, opstr, values, records, outcome, algo="cl")


def _run_cl_nat(n: int, fuel: int) -> Trace:
    values = [n]
    append = values.append
    ops: list[str] = []
    mark, mark_t, next_mark = n, 0, 1  # Brent-style checkpoint
    v = n
    t = 0
    outcome = None
    while v != 1:
        if t == fuel:
            outcome = RunOutcome.fuel_exhausted(fuel)
            break
        if v & 1:
            v = 3 * v + 1
            ops.append("T")
        else:
            v >>= 1
            ops.append("D")
        t += 1
        append(v)
        if v == mark:
            outcome = _cycle_outcome(values, t - mark_t, t)
            break
        if t == next_mark:
            mark, mark_t, next_mark = v, t, 2 * t
    if outcome is None:
        outcome = RunOutcome.halted(t)
    opstr = "".join(ops)
    return Trace(n, opstr, values, odd_steps_from_ops(opstr, values), outcome, algo="cl")


class _Engine:
    """Shared odd-step engine behind Gr, Gr1, Gr2 and Gr3."""

    def __init__(self, n, fuel, algo):
        self.n = n
        self.fuel = fuel
        self.algo = algo
        self.v = n
        self.values = [n]
        self.ops: list[str] = []
        self.mark, self.mark_t, self.next_mark = n, 0, 1
        self.t = 0
        self.outcome: RunOutcome | None = None
        self.records: list[OddStepRecord] = []

    def _step(self, op: str) -> bool:
        if self.t == self.fuel:
            self.outcome = RunOutcome.fuel_exhausted(self.fuel)
            return False
        self.v = div2(self.v) if op == "D" else times3plus1(self.v)
        self.ops.append(op)
        self.t += 1
        self.values.append(self.v)
        if self.v == self.mark:
            self.outcome = _cycle_outcome(self.values, self.t - self.mark_t, self.t)
            return False
        if self.t == self.next_mark:
            self.mark, self.mark_t, self.next_mark = self.v, self.t, 2 * self.t
        return True

    def burst(self) -> int | None:
        """``while even(n) do n := n div 2``; the count, or None if stopped."""
        k = 0
        while is_even(self.v):
            if not self._step("D"):
                return None
            k += 1
        return k

    def run(self, equation_guard: bool) -> Trace:
        if type(self.n) is int:
            return _gr_nat(self.n, self.fuel, self.algo, equation_guard)
        k = self.burst()
        if k is not None:
            i, Y, Z = 0, 0, k
            self.records.append(OddStepRecord(0, k, self.v, 0, 0, Z))
            while not self._done(equation_guard, i, Y, Z):
                if not self._step("T"):
                    break
                k = self.burst()
                if k is None:
                    break
                Y = 3 * Y + (1 << Z)
                Z += k
                i += 1
                self.records.append(OddStepRecord(i, k, self.v, i, Y, Z))
        if self.outcome is None:
            self.outcome = RunOutcome.halted(self.t)
        return Trace(self.n, "".join(self.ops), self.values, self.records,
                     self.outcome, algo=self.algo)

    def _done(self, equation_guard, i, Y, Z) -> bool:
        if equation_guard:
            # Gr3's guard exactly as written: n * 3**i + Y_i == 2**Z_i
            return self.n * 3 ** i + Y == 1 << Z
        return is_one(self.v)


def _gr_nat(n: int, fuel: int, algo: str, equation_guard: bool) -> Trace:
    # Same control flow as _Engine, specialised to plain ints.
    values = [n]
    append = values.append
    ops: list[str] = []
    mark, mark_t, next_mark = n, 0, 1
    records: list[OddStepRecord] = []
    v = n
    t = 0
    outcome = None

    def burst():
        nonlocal v, t, outcome, mark, mark_t, next_mark
        k = 0
        while not v & 1:
            if t == fuel:
                outcome = RunOutcome.fuel_exhausted(fuel)
                return None
            v >>= 1
            ops.append("D")
            t += 1
            append(v)
            if v == mark:
                outcome = _cycle_outcome(values, t - mark_t, t)
                return None
            if t == next_mark:
                mark, mark_t, next_mark = v, t, 2 * t
            k += 1
        return k

    k = burst()
    if k is not None:
        i, Y, Z = 0, 0, k
        records.append(OddStepRecord(0, k, v, 0, 0, Z))
        pow3 = 1
        while (n * pow3 + Y != 1 << Z) if equation_guard else v != 1:
            if t == fuel:
                outcome = RunOutcome.fuel_exhausted(fuel)
                break
            v = 3 * v + 1
            ops.append("T")
            t += 1
            append(v)
            if v == mark:
                outcome = _cycle_outcome(values, t - mark_t, t)
                break
            if t == next_mark:
                mark, mark_t, next_mark = v, t, 2 * t
            k = burst()
            if k is None:
                break
            Y = 3 * Y + (1 << Z)
            Z += k
            i += 1
            pow3 *= 3
            records.append(OddStepRecord(i, k, v, i, Y, Z))
    if outcome is None:
        outcome = RunOutcome.halted(t)
    return Trace(n, "".join(ops), values, records, outcome, algo=algo)


def run_gr(n: DomainElement, fuel: int) -> Trace:
    """Gr: one division burst, then ``3n+1`` plus a burst until ``n = 1``."""
    _check_start(n)
    return _Engine(n, _check_fuel(fuel), "gr").run(equation_guard=False)


def run_gr1(n: DomainElement, fuel: int) -> Trace:
    """Gr1: Gr recording ``k_i`` and ``m_i`` for every burst."""
    _check_start(n)
    return _Engine(n, _check_fuel(fuel), "gr1").run(equation_guard=False)


def run_gr2(n: int, fuel: int) -> Trace:
    """Gr2: Gr1 plus the accumulators ``x, y, z``.

    ``y`` is updated with the exponent sum *before* the current burst, so
    ``n * 3**i + y = m_i * 2**z`` holds after every iteration.
    """
    _check_start(n, nat_only=True, positive=True)
    return _Engine(n, _check_fuel(fuel), "gr2").run(equation_guard=False)


def run_gr3(n: int, fuel: int) -> Trace:
    """Gr3: loop guarded by ``n * 3**i + Y_i != 2**Z_i`` instead of ``m_i != 1``."""
    _check_start(n, nat_only=True, positive=True)
    return _Engine(n, _check_fuel(fuel), "gr3").run(equation_guard=True)


ALGORITHMS = {
    "cl": run_cl,
    "gr": run_gr,
    "gr1": run_gr1,
    "gr2": run_gr2,
    "gr3": run_gr3,
}


def run(algo: str, n: DomainElement, fuel: int) -> Trace:
    try:
        fn = ALGORITHMS[algo]
    except KeyError:
        raise ValueError(f"unknown algorithm {algo!r}") from None
    return fn(n, fuel)


@dataclass(frozen=True)
class InvariantReport:
    ok: bool
    checked: int
    failed_at: int | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def check_invariant(trace: Trace) -> InvariantReport:
    """Check every odd step of a natural-number Gr2/Gr3 trace exactly.

    Per step: ``X_i = i``, ``Z_i`` is the running sum of the ``k``'s, the
    ``Y`` recurrence, ``n * 3**i + Y_i = m_i * 2**Z_i``, and the exact
    recovery ``n = (m_i * 2**Z_i - Y_i) / 3**i`` with zero remainder.
    """
    n = trace.start
    if not isinstance(n, int):
        raise TypeError("check_invariant needs a natural-number trace")
    Zsum = 0
    Yprev = Zprev = None
    pow3 = 1
    for rec in trace.odd_steps:
        i = rec.i
        if rec.X != i:
            return InvariantReport(False, i, i, f"X_{i} = {rec.X} != {i}")
        Zsum += rec.k
        if rec.Z != Zsum:
            return InvariantReport(False, i, i, f"Z_{i} = {rec.Z} != sum of k = {Zsum}")
        expected_Y = 0 if i == 0 else 3 * Yprev + (1 << Zprev)
        if rec.Y != expected_Y:
            return InvariantReport(False, i, i, f"Y_{i} = {rec.Y} != {expected_Y}")
        if i > 0 and rec.k < 1:
            return InvariantReport(False, i, i, f"k_{i} = 0 after a 3n+1 step")
        lhs = n * pow3 + rec.Y
        rhs = rec.m * (1 << rec.Z)
        if lhs != rhs:
            return InvariantReport(False, i, i, f"n*3^i + Y_i = {lhs} != m_i*2^Z_i = {rhs}")
        q, r = divmod(rhs - rec.Y, pow3)
        if r != 0 or q != n:
            return InvariantReport(False, i, i, f"recovery gives {q} remainder {r}")
        Yprev, Zprev = rec.Y, rec.Z
        pow3 *= 3
    return InvariantReport(True, len(trace.odd_steps))


def _brent(f, x0, fuel: int, stop):
    """Brent cycle search on ``x0, f(x0), ...`` with a halting predicate.

    Returns ``("halted", steps)``, ``("cycle", entry, period)`` or
    ``("fuel",)``.
    """
    if stop(x0):
        return ("halted", 0)
    if fuel == 0:
        return ("fuel",)
    power = lam = 1
    tortoise = x0
    hare = f(x0)
    used = 1
    if stop(hare):
        return ("halted", used)
    while tortoise != hare:
        if used >= fuel:
            return ("fuel",)
        if power == lam:
            tortoise = hare
            power *= 2
            lam = 0
        hare = f(hare)
        used += 1
        lam += 1
        if stop(hare):
            return ("halted", used)
    tortoise = hare = x0
    for _ in range(lam):
        hare = f(hare)
    mu = 0
    while tortoise != hare:
        tortoise = f(tortoise)
        hare = f(hare)
        mu += 1
    return ("cycle", mu, lam)


def _cl_map(v):
    return div2(v) if is_even(v) else times3plus1(v)


def _k_map(k: int) -> int:
    # The k-projection of a Jaskowski trajectory is itself a Collatz orbit on Z.
    return k // 2 if k % 2 == 0 else 3 * k + 1


def detect_cycle(n: DomainElement, fuel: int) -> RunOutcome:
    """Brent-style exact-value cycle detection on the Cl sequence.

    For a Jaskowski start that exhausts the fuel without an exact repeat,
    the returned outcome carries the (entry, period) of the cycle of the
    ``k``-projection, if one shows up within the same fuel.
    """
    _check_start(n)
    _check_fuel(fuel)
    res = _brent(_cl_map, n, fuel, is_one)
    if res[0] == "halted":
        return RunOutcome.halted(res[1])
    if res[0] == "cycle":
        return RunOutcome.cycle(res[1], res[2], res[1] + res[2])
    projected = None
    if isinstance(n, JElem):
        pres = _brent(_k_map, n.k, fuel, lambda k: False)
        if pres[0] == "cycle":
            projected = (pres[1], pres[2])
    return RunOutcome.fuel_exhausted(fuel, projected)


def domain_closure_check(trace: Trace) -> bool:
    """True iff every value shares the start's reachability flag."""
    flag = is_reachable(trace.start)
    return all(is_reachable(v) == flag for v in trace.values)


# -- serialization ----------------------------------------------------------

def _parse_value(text: str) -> DomainElement:
    return parse_jelem(text) if "+" in text else parse_nat(text)


def trace_to_json(trace: Trace, *, include_values: bool = True) -> dict:
    d = {
        "algo": trace.algo,
        "start": render(trace.start),
        "outcome": trace.outcome.to_dict(),
        "ops": trace.ops,
        "odd_steps": [
            {"i": r.i, "k": str(r.k), "m": render(r.m),
             "X": str(r.X), "Y": str(r.Y), "Z": str(r.Z)}
            for r in trace.odd_steps
        ],
    }
    if include_values:
        d["values"] = [render(v) for v in trace.values]
    return d


def trace_from_json(d: dict) -> Trace:
    start = _parse_value(d["start"])
    records = [
        OddStepRecord(r["i"], int(r["k"]), _parse_value(r["m"]),
                      int(r["X"]), int(r["Y"]), int(r["Z"]))
        for r in d["odd_steps"]
    ]
    if "values" in d:
        values = [_parse_value(v) for v in d["values"]]
    else:
        values = _replay(start, d["ops"])
    return Trace(start, d["ops"], values, records,
                 RunOutcome.from_dict(d["outcome"]), algo=d.get("algo", "cl"))


def _replay(start, ops: str) -> list:
    values = [start]
    v = start
    for op in ops:
        v = div2(v) if op == "D" else times3plus1(v)
        values.append(v)
    return values


def trace_to_text(trace: Trace) -> Iterable[str]:
    """Line-oriented form: header, one line per primitive step, odd steps."""
    o = trace.outcome
    yield f"# algo={trace.algo} start={render(trace.start)} outcome={o.kind.value} steps={o.steps}"
    yield f"0 - {render(trace.values[0])}"
    for t, (op, v) in enumerate(zip(trace.ops, trace.values[1:]), start=1):
        yield f"{t} {op} {render(v)}"
    for r in trace.odd_steps:
        yield f"odd i={r.i} k={r.k} m={render(r.m)} X={r.X} Y={r.Y} Z={r.Z}"


def dumps(trace: Trace) -> str:
    return json.dumps(trace_to_json(trace), separators=(",", ":"))
