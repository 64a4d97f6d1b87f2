import numpy as np
import pytest

from qglab.groups import builtin_table
from qglab.qgcore import dual, function_algebra

SMALL_GROUPS = ("Z1", "Z2", "Z3", "Z4", "S3")
ALL_GROUPS = ("Z1", "Z2", "Z3", "Z4", "Z5", "Z6", "Z7", "Z8", "S3", "D4", "Q8")


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


_q_cache = {}


def get_group(name, side="fn"):
    """Construction cache shared across tests; objects are immutable."""
    key = (name, side)
    if key not in _q_cache:
        q = function_algebra(builtin_table(name))
        _q_cache[key] = q if side == "fn" else dual(q)
    return _q_cache[key]


@pytest.fixture
def z2():
    return get_group("Z2")


@pytest.fixture
def z3():
    return get_group("Z3")


@pytest.fixture
def s3():
    return get_group("S3")


@pytest.fixture
def s3_dual():
    return get_group("S3", "dual")
