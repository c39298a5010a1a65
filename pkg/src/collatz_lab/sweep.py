"""Range sweeps: run the property checks over ``from..to`` and tally them."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .certificates import CertificationError, certify, first_balancing_index, recover_n, verify
from .collatztree import stratum
from .reverse import roundtrip_check
from .trajectories import check_invariant, run_cl, run_gr, run_gr1, run_gr2, run_gr3

__all__ = ["CHECKS", "SweepReport", "check_one", "run_sweep"]

CHECKS = ("halting", "invariant", "certificate", "reverse", "strata")


def _halting(n: int, fuel: int, cache: dict) -> str | None:
    cl = run_cl(n, fuel)
    cache["cl"] = cl
    runs = {"gr": run_gr(n, fuel), "gr1": run_gr1(n, fuel),
            "gr2": run_gr2(n, fuel), "gr3": run_gr3(n, fuel)}
    cache.update(runs)
    if not cl.outcome.is_halted:
        return f"cl: {cl.outcome.kind.value}"
    for name, t in runs.items():
        if not t.outcome.is_halted:
            return f"{name}: {t.outcome.kind.value}"
        if t.ops != cl.ops:
            return f"{name}: operation sequence differs from cl"
    ref = [(r.k, r.m) for r in cl.odd_steps]
    for name in ("gr1", "gr2", "gr3"):
        got = [(r.k, r.m) for r in runs[name].odd_steps]
        if got != ref:
            return f"{name}: (k, m) sequence differs from cl"
    last = runs["gr3"].odd_steps[-1]
    if len(cl.ops) != last.X + last.Z:
        return f"step count {len(cl.ops)} != x + z = {last.X + last.Z}"
    if last.m != 1:
        return "gr3 guard balanced before m = 1"
    return None


def _invariant(n: int, fuel: int, cache: dict) -> str | None:
    for name in ("gr2", "gr3"):
        t = cache.get(name)
        if t is None:
            t = cache[name] = (run_gr2 if name == "gr2" else run_gr3)(n, fuel)
        rep = check_invariant(t)
        if not rep.ok:
            return f"{name} step {rep.failed_at}: {rep.reason}"
    return None


def _certificate(n: int, fuel: int, cache: dict) -> str | None:
    try:
        c = certify(n, fuel)
    except CertificationError as exc:
        return str(exc)
    cache["cert"] = c
    v = verify(c)
    if not v.ok:
        return f"verify failed: {v.clause} ({v.detail})"
    if recover_n(c.x, c.y, c.z) != n:
        return "recover_n does not return n"
    if first_balancing_index(n, c.k) != c.x:
        return "a shorter prefix already balances"
    if c.x >= 1 and (n % 2 == 0) != (c.y % 2 == 0):
        return "parity of n and y differ"
    return None


def _reverse(n: int, fuel: int, cache: dict) -> str | None:
    if n % 2 == 0:
        return None
    rep = roundtrip_check(n, fuel)
    return None if rep.ok else rep.reason


def _strata(n: int, fuel: int, cache: dict) -> str | None:
    c = cache.get("cert") or certify(n, fuel)
    s = stratum(n)
    return None if s == c.x else f"stratum {s} != certificate x {c.x}"


_IMPL = {"halting": _halting, "invariant": _invariant, "certificate": _certificate,
         "reverse": _reverse, "strata": _strata}


def check_one(n: int, fuel: int, checks=CHECKS) -> tuple[int, dict, int | None]:
    """``(n, {check: failure reason or None}, Cl step count or None)``."""
    cache: dict = {}
    results = {}
    for name in checks:
        try:
            results[name] = _IMPL[name](n, fuel, cache)
        except Exception as exc:  # reported per item, never aborts the sweep
            results[name] = f"{type(exc).__name__}: {exc}"
    # every algorithm emits the same operation string, so any halted trace gives the Cl length
    trace = next((cache[a] for a in ("cl", "gr3", "gr2") if a in cache), None) or run_cl(n, fuel)
    steps = len(trace.ops) if trace.outcome.is_halted else None
    return n, results, steps


def _chunk(args):
    lo, hi, fuel, checks = args
    return [check_one(n, fuel, checks) for n in range(lo, hi + 1)]


@dataclass
class SweepReport:
    start: int
    stop: int
    checks: tuple[str, ...]
    passed: dict[str, int] = field(default_factory=dict)
    failed: dict[str, int] = field(default_factory=dict)
    first_failure: dict[str, dict] = field(default_factory=dict)
    max_steps: int = -1
    max_steps_n: int | None = None
    skipped: dict[str, int] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not any(self.failed.values())

    def add(self, n: int, results: dict, steps: int | None):
        for name, reason in results.items():
            if name == "reverse" and n % 2 == 0:
                self.skipped[name] = self.skipped.get(name, 0) + 1
                continue
            if reason is None:
                self.passed[name] += 1
            else:
                self.failed[name] += 1
                self.first_failure.setdefault(name, {"n": str(n), "reason": reason})
        if steps is not None and steps > self.max_steps:
            self.max_steps, self.max_steps_n = steps, n

    def to_dict(self) -> dict:
        return {
            "range": [str(self.start), str(self.stop)],
            "checks": list(self.checks),
            "passed": dict(self.passed),
            "failed": dict(self.failed),
            "skipped": dict(self.skipped),
            "first_failure": self.first_failure,
            "max_trajectory_length": self.max_steps,
            "max_trajectory_n": None if self.max_steps_n is None else str(self.max_steps_n),
            "ok": self.ok,
        }


def run_sweep(start: int, stop: int, fuel: int = 10**6, checks=CHECKS,
              workers: int | None = None, chunk: int = 2000) -> SweepReport:
    """Check every ``n`` in ``start..stop``; results are merged in order of ``n``."""
    if start < 1 or start > stop:
        raise ValueError(f"bad range {start}..{stop}")
    unknown = set(checks) - set(CHECKS)
    if unknown:
        raise ValueError(f"unknown checks: {sorted(unknown)}")
    checks = tuple(c for c in CHECKS if c in checks)
    rep = SweepReport(start, stop, checks, {c: 0 for c in checks}, {c: 0 for c in checks})
    jobs = [(lo, min(lo + chunk - 1, stop), fuel, checks) for lo in range(start, stop + 1, chunk)]
    workers = workers or os.cpu_count() or 1
    if workers == 1 or len(jobs) == 1:
        batches = map(_chunk, jobs)
        for batch in batches:
            for item in batch:
                rep.add(*item)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for batch in pool.map(_chunk, jobs):  # map preserves job order
                for item in batch:
                    rep.add(*item)
    return rep
