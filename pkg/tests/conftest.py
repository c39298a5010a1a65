import pytest

# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE_RESULTS: dict[int, tuple[bool, str]] = {}


def naive_collatz(n, limit):
    """f(n, 0) = n; f(n, i+1) = f(n, i)/2 if even else 3 f(n, i) + 1."""
    seq = [n]
    while seq[-1] != 1 and len(seq) <= limit:
        x = seq[-1]
        seq.append(x // 2 if x % 2 == 0 else 3 * x + 1)
    return seq


@pytest.fixture
def naive():
    return naive_collatz


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[num]
        terminalreporter.write_line(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}")
