"""Exact, fuel-bounded Collatz trajectories, halting certificates and the
IC' reverse walk, over the naturals and over the Jaskowski pairs."""

from .certificates import Certificate, certify, recover_n, trivial_certificate, verify
from .collatztree import build_hotel, build_tree, check_strata_properties, stratum
from .numdomain import JElem, expo, p2, p3
from .reverse import ic_run, ic_step, roundtrip_check
from .trajectories import (
    check_invariant,
    detect_cycle,
    domain_closure_check,
    run_cl,
    run_gr,
    run_gr1,
    run_gr2,
    run_gr3,
)

__version__ = "0.1.0"
