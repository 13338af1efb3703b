import numpy as np
import pytest

from xyz_tradeoff.model import ModelParams
from xyz_tradeoff.states import make_rng

# couplings used by every figure
FIGURE_COUPLINGS = dict(Jx=0.5, Jy=0.3, Jz=0.8)
FIG_P_VALUES = [0.0, 0.33, 0.66, 1.0]
FIG_CHI_VALUES = [0.0, 0.5, 1.0]


@pytest.fixture
def rng():
    return make_rng(42)


@pytest.fixture
def params():
    return ModelParams(chi=1.0, **FIGURE_COUPLINGS)


@pytest.fixture
def random_hermitians(rng):
    g = rng.standard_normal((200, 4, 4)) + \
        1j * rng.standard_normal((200, 4, 4))
    return 0.5 * (g + np.conj(np.swapaxes(g, -1, -2)))


def max_abs(a, b):
    return float(np.abs(np.asarray(a) - np.asarray(b)).max())
