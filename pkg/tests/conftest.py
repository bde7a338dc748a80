"""Shared fixtures and strategies.

I1 is the line {0, 1, 10, 11}; I2 is the same line colored red, blue, red,
blue; I3 is the line {0, 1, 2, 100}.
"""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from privclust.generate import GeneratorConfig, random_instance
from privclust.metric import Instance

settings.register_profile(
    "repo",
    deadline=None,
    derandomize=True,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("repo")


def line(xs, **params) -> Instance:
    """Center-flavor instance on integer positions of a line."""
    return Instance.from_matrix([[abs(a - b) for b in xs] for a in xs], **params)


@pytest.fixture
def i1():
    return line([0, 1, 10, 11], k=2)


@pytest.fixture
def i2():
    return line([0, 1, 10, 11], k=2, colors={0: "red", 1: "blue", 2: "red", 3: "blue"})


@pytest.fixture
def i3():
    return line([0, 1, 2, 100], k=1)


def seeded(cfg: GeneratorConfig):
    """Strategy of random instances drawn from ``cfg``, indexed by a seed."""
    return st.integers(0, 2**32 - 1).map(lambda s: random_instance(np.random.default_rng(s), cfg))


positions = st.lists(st.integers(0, 30), min_size=1, max_size=7)


def supplier_line(pts, locs, **params) -> Instance:
    """Supplier-flavor instance: points then locations, all on a line."""
    xs = list(pts) + list(locs)
    n = len(pts)
    return Instance.from_matrix(
        [[abs(a - b) for b in xs] for a in xs],
        points=range(n),
        locations=range(n, len(xs)),
        **params,
    )


def pytest_terminal_summary(terminalreporter):
    """Repeat the acceptance criteria verdicts at the end of the run."""
    import sys

    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, (ok, detail) in module.RESULTS.items():
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
