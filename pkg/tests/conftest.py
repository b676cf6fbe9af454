import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from kreinpair.acceptance import random_hermitian

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

FROZEN = json.loads((Path(__file__).parent / "oracles" / "frozen.json").read_text(encoding="utf-8"))


def cmat(rows):
    """Nested [re, im] lists from the oracle file back to a complex array."""
    return np.array([[complex(*z) for z in row] for row in rows])


@pytest.fixture
def frozen():
    return FROZEN


seeds = st.integers(min_value=0, max_value=2**32 - 1)
dims = st.integers(min_value=2, max_value=8)


@st.composite
def hermitian_pairs(draw, nmax=8):
    rng = np.random.default_rng(draw(seeds))
    n = draw(st.integers(min_value=2, max_value=nmax))
    return random_hermitian(rng, n), random_hermitian(rng, n)
