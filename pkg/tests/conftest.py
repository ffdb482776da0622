import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings, strategies as st

from opmeans.hermitian import random_pd

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

FROZEN = json.loads((Path(__file__).parent / "oracles" / "frozen.json").read_text())

seeds = st.integers(0, 2**32 - 1)
dims = st.integers(1, 5)


@pytest.fixture
def frozen():
    return FROZEN


def pd_pair(seed, dim, cond_cap=1e3):
    rng = np.random.default_rng(seed)
    return random_pd(dim, rng, cond_cap), random_pd(dim, rng, cond_cap)


def ordered_pair(seed, dim):
    """``A >= B`` with a strictly positive gap."""
    rng = np.random.default_rng(seed)
    b = random_pd(dim, rng, 1e3)
    return b + 0.5 * random_pd(dim, rng, 1e3), b


def assert_close(a, b, tol):
    err = np.linalg.norm(np.asarray(a) - np.asarray(b), 2) / max(1.0, np.linalg.norm(np.asarray(b), 2))
    assert err < tol, err


def pytest_terminal_summary(terminalreporter, config):
    from test_acceptance import ACCEPTANCE_KEY

    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
