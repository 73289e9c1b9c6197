import math
import os
import sys

import numpy as np
import pytest
from hypothesis import settings

from lebesguekit import StepFunction

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", deadline=None, max_examples=40, derandomize=True)
settings.load_profile("default")


def random_step(rng, n_max=8, v_max=5.0, zero_ok=True):
    n = int(rng.integers(1, n_max + 1))
    inner = np.sort(rng.choice(np.arange(1, 1000), size=n - 1, replace=False)) / 1000.0
    breaks = np.concatenate([[0.0], inner, [1.0]])
    values = rng.uniform(0.0 if zero_ok else 0.1, v_max, size=n)
    return StepFunction(breaks, values)


def random_step_exponent(rng, n_max=6, lo=1.2, hi=4.0):
    n = int(rng.integers(1, n_max + 1))
    inner = np.sort(rng.choice(np.arange(1, 1000), size=n - 1, replace=False)) / 1000.0
    return StepFunction(np.concatenate([[0.0], inner, [1.0]]), rng.uniform(lo, hi, size=n))


def step_corpus(n=60, seed=20240):
    """Deterministic corpus of positive step functions, including a few fixed shapes."""
    rng = np.random.default_rng(seed)
    fixed = [
        StepFunction([0.0, 1.0], [1.0]),
        StepFunction([0.0, 0.5, 1.0], [1.0, 3.0]),
        StepFunction([0.0, 0.5, 1.0], [3.0, 1.0]),
        StepFunction([0.0, 0.25, 1.0], [1.0, 0.0]),
        StepFunction([0.0, 1e-6, 1.0], [1e3, 1.0]),
        StepFunction([0.0, 0.1, 0.2, 0.9, 1.0], [0.5, 7.0, 0.0, 2.0]),
    ]
    return fixed + [random_step(rng, zero_ok=False) for _ in range(n - len(fixed))]


@pytest.fixture(scope="session")
def corpus():
    return step_corpus()


def close(a, b, rtol):
    return math.isclose(a, b, rel_tol=rtol, abs_tol=0.0)


_ACCEPTANCE = {}


@pytest.fixture
def verdict(request):
    """Record and print one pass/fail line for an acceptance criterion."""

    def record(number, name, ok, detail=""):
        line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}: {name}" + (f" ({detail})" if detail else "")
        _ACCEPTANCE[number] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[k])
