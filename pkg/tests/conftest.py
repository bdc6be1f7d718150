import numpy as np
import pytest

from nilcrypt.keyschedule import SchemeParams, build_shared_key
from nilcrypt.modarith import DHParams

ACCEPTANCE_RESULTS = {}


def make_params(n, p, x=2, base=256, epsilon=1.0, offset=1):
    return SchemeParams(n, DHParams(p, x), base, epsilon, offset)


def make_key(n, p, k, **kw):
    return build_shared_key(k, make_params(n, p, **kw))


def toeplitz_upper(coeffs):
    """Upper-triangular Toeplitz matrix sum_k coeffs[k] J^k (commutes with J)."""
    n = len(coeffs)
    return sum(c * np.eye(n, k=i) for i, c in enumerate(coeffs))


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        ACCEPTANCE_RESULTS[marker.args[0]] = (marker.args[1], rep.outcome)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(num, title): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE_RESULTS):
        title, outcome = ACCEPTANCE_RESULTS[num]
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {num}: {status}  {title}")
