import math

import numpy as np
import pytest

from mendsim.phase_space import TwoParamQutrit


@pytest.fixture
def vendor_params() -> TwoParamQutrit:
    return TwoParamQutrit.from_cos2_alpha(4.0 / 15.0, math.pi / 4.0)


def draw_params(rng: np.random.Generator) -> TwoParamQutrit:
    """Random point strictly inside the valid (alpha, beta) domain."""
    beta = rng.uniform(1e-3, math.pi / 4.0)
    alpha_min = math.atan2(1.0, math.sin(beta))
    alpha = rng.uniform(alpha_min + 1e-9, math.pi / 2.0 - 1e-9)
    return TwoParamQutrit(alpha, beta)


def angle_gap(x: float, y: float) -> float:
    """Absolute angular deviation on the circle."""
    return abs((x - y + math.pi) % (2.0 * math.pi) - math.pi)
