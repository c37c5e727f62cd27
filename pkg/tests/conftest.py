import numpy as np
import pytest

from twomode.model import ModelParams


@pytest.fixture
def fig_params():
    """Reference blue-detuned parameter set at a given (gamma_c, p)."""

    def make(gamma_c, p, **kw):
        return ModelParams(gamma_c=gamma_c, p=p, **kw)

    return make


def draw_params(rng: np.random.Generator) -> ModelParams:
    """One random admissible parameter draw (the oracle-test distribution)."""
    delta = rng.uniform(0.0, 0.5)
    g1 = rng.uniform(0.02, 0.3)
    g2 = g1 * rng.uniform(0.1, 5.0)
    gamma_c = rng.uniform(0.2, 1.6)
    p = rng.uniform(0.0, 2.0)
    return ModelParams(gamma_c=gamma_c, p=p, e_c=delta, e_x=0.0, g1=g1, g2=g2)
