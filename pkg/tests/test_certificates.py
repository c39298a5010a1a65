import json
import random

import pytest
from hypothesis import given, strategies as st

from collatz_lab.certificates import (
    Certificate,
    CertificateError,
    CertificationError,
    certify,
    first_balancing_index,
    from_json,
    recover_n,
    to_json,
    trivial_certificate,
    verify,
    y_direct,
    y_horner,
)
from collatz_lab.trajectories import run_gr3


def y_oracle(k):
    """Replays Y_{i+1} = 3 Y_i + 2**Z_i, independent of both library forms."""
    y, z = 0, k[0]
    for kj in k[1:]:
        y = 3 * y + 2**z
        z += kj
    return y


@pytest.mark.parametrize("n, triple, k", [
    (13, (2, 11, 7), (0, 3, 4)),
    (6, (2, 10, 6), (1, 1, 4)),
    (16, (0, 0, 4), (4,)),
    (1, (0, 0, 0), (0,)),
])
def test_certify_examples(n, triple, k):
    c = certify(n)
    assert c.triple == triple and c.k == k and verify(c).ok


def test_certify_fuel_error_keeps_trace():
    with pytest.raises(CertificationError) as info:
        certify(27, fuel=10)
    assert len(info.value.trace.ops) == 10


def test_certify_rejects_zero():
    with pytest.raises(ValueError):
        certify(0)


@pytest.mark.parametrize("field, value, clause", [
    ("k", (0, 3), "structure"),
    ("k", (0, 0, 7), "structure"),
    ("k", (1, 2, 4), "k0"),
    ("z", 8, "z"),
    ("y", 12, "y-direct"),
    ("n", 15, "equation"),
])
def test_verify_reports_first_bad_clause(field, value, clause):
    good = Certificate(13, 2, 11, 7, (0, 3, 4))
    args = dict(n=13, x=2, y=11, z=7, k=(0, 3, 4))
    args[field] = value
    v = verify(Certificate(**args))
    assert not v.ok and v.clause == clause
    assert verify(good)


def test_verify_equation_clause_for_n_15():
    # 15 is odd so k0 holds; the sums match k; only the equation can fail
    v = verify(Certificate(15, 2, 11, 7, (0, 3, 4)))
    assert v.clause == "equation" and "15*3^2" in v.detail


def test_y_forms_agree_on_random_sequences():
    rng = random.Random(2024)
    for _ in range(10_000):
        length = rng.randint(1, 30)
        k = [rng.randint(0, 8)] + [rng.randint(1, 8) for _ in range(length - 1)]
        ref = y_oracle(k)
        assert y_direct(k) == ref
        assert y_horner(k) == ref


def test_y_of_certificate_matches_trace():
    for n in range(1, 1000):
        t = run_gr3(n, 10**4)
        assert y_horner(t.ks) == t.triple[1]


def test_trivial_certificate():
    t = trivial_certificate(13)
    assert (t.x, t.y, t.z) == (0, 3, 4) and not t.collatz
    assert trivial_certificate(16).y == 0
    assert (trivial_certificate(1).y, trivial_certificate(1).z) == (0, 0)
    for n in range(1, 5000):
        t = trivial_certificate(n)
        assert n + t.y == 2**t.z and t.y < n


def test_trivial_collides_with_certify_only_on_powers_of_two():
    for n in range(1, 5000):
        t, c = trivial_certificate(n), certify(n)
        assert ((t.x, t.y, t.z) == c.triple) == (n & (n - 1) == 0)


def test_parity_of_y_follows_n():
    for n in range(1, 5000):
        c = certify(n)
        if c.x >= 1:
            assert c.y % 2 == n % 2


def test_first_balancing_index_is_x():
    for n in range(1, 3000):
        c = certify(n)
        assert first_balancing_index(n, c.k) == c.x
    assert first_balancing_index(13, (0, 3)) is None


def test_recover_n():
    assert recover_n(2, 11, 7) == 13
    with pytest.raises(CertificateError):
        recover_n(2, 12, 7)
    with pytest.raises(CertificateError):
        recover_n(0, 16, 4)


@given(st.integers(min_value=1, max_value=10**12))
def test_recover_n_inverts_certify(n):
    c = certify(n)
    assert recover_n(c.x, c.y, c.z) == n


def test_json_golden(datadir_cert):
    c = certify(13)
    assert to_json(c) + "\n" == datadir_cert
    assert from_json(datadir_cert) == c


@pytest.fixture
def datadir_cert():
    from pathlib import Path
    return (Path(__file__).parent / "data" / "cert_13.json").read_text()


def test_json_big_values_are_strings():
    c = certify(2**80 + 1)
    d = json.loads(to_json(c))
    assert isinstance(d["n"], str) and isinstance(d["y"], str)
    assert from_json(to_json(c)) == c


@pytest.mark.parametrize("text", [
    '{"n":13,"x":2,"y":"11","z":7,"k":[0,3,4]}',
    '{"n":"13","x":2.0,"y":"11","z":7,"k":[0,3,4]}',
    '{"n":"13","x":2,"y":"11","z":7}',
    '{"n":"13","x":2,"y":"11","z":7,"k":[0,3,4],"extra":1}',
    '{"n":"-13","x":2,"y":"11","z":7,"k":[0,3,4]}',
    '{"n":"13","x":2,"y":"11","z":7,"k":[0,true,4]}',
    '{"n":"13","x":2,"y":"11","z":7,"k":"034"}',
    '[1,2]',
    'not json',
])
def test_from_json_strict(text):
    with pytest.raises(CertificateError):
        from_json(text)
