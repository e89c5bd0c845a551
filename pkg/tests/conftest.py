import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from entadd.tensor_core import PartyLayout, QuantumState

settings.register_profile("default", deadline=None, max_examples=25,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", deadline=None, max_examples=10,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def random_pure(dims, rng, real=False) -> QuantumState:
    n = int(np.prod(dims))
    v = rng.standard_normal(n) + (0 if real else 1j * rng.standard_normal(n))
    return QuantumState.pure(v / np.linalg.norm(v), PartyLayout(tuple(dims)))


def random_mixed(dims, rng, rank=None, nonneg=False) -> QuantumState:
    n = int(np.prod(dims))
    rank = rank or n
    if nonneg:
        f = np.abs(rng.standard_normal((n, rank)))
    else:
        f = rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))
    m = f @ f.conj().T
    m /= np.trace(m).real
    tags = {"non_negative"} if nonneg else set()
    return QuantumState.mixed(m, PartyLayout(tuple(dims)), tags)


def random_unitary(rng, d) -> np.ndarray:
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


# one summary line per acceptance criterion, printed after the run
ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    def add(number: int, ok: bool, detail: str) -> bool:
        ACCEPTANCE_LINES.append((number, f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"))
        return ok
    return add


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
