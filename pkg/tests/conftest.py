import numpy as np
import pytest

from cayleyphase import BoltzmannParams, StateVector


def maxdiff(u, v) -> float:
    return max(abs(a - b) for a, b in zip(u, v))


def normalized(u: StateVector):
    m = u.max_norm()
    return tuple(c / m for c in u.components)


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)


@pytest.fixture
def params_symmetric_cycle():
    # a = 1, b = 0.5: two-cycle regime (a^2 = 1 sits inside the star window)
    return BoltzmannParams.from_weights(1.0, 0.5)


@pytest.fixture
def params_three_roots():
    # b = 2 (b^4 = 16) with the level at the geometric centre of the window
    import math

    from cayleyphase import multi_root_window

    lo, hi = multi_root_window(16.0)
    level = math.sqrt(lo * hi)
    a = (level * 2.0**6) ** -0.5
    return BoltzmannParams.from_weights(a, 2.0)
