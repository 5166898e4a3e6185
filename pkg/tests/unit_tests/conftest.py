import math
from typing import Callable

import numpy as np
import pytest
from scipy.special import erfc

from ginibre.models import PotentialTable


def gaussian_table(gamma: float, x: np.ndarray, c: float, b: float) -> PotentialTable:
    """Table of q = c exp(-b x^2) with its exact derivatives and tail integrals."""
    q = c * np.exp(-b * x**2)
    q_x = -2 * b * x * q
    q_xx = (4 * b**2 * x**2 - 2 * b) * q
    int_q = c * math.sqrt(math.pi / b) / 2 * erfc(math.sqrt(b) * x)
    int_q2 = c**2 * math.sqrt(math.pi / (2 * b)) / 2 * erfc(math.sqrt(2 * b) * x)
    return PotentialTable(
        gamma=gamma,
        t=0.0,
        x=x,
        q=q,
        q_x=q_x,
        q_xx=q_xx,
        u=q**2 - q_x,
        a1=-int_q2 / 2,
        int_q=int_q,
        int_q2=int_q2,
        int_u=q + int_q2,
        residual=np.zeros_like(x),
    )


@pytest.fixture
def make_gaussian_table() -> Callable[..., PotentialTable]:
    return gaussian_table
