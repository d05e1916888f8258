import numpy as np
import pytest

from imexldg.materials import MaterialCoefficients, constant, sinusoidal
from imexldg.stepper import KineticState


def random_state(rng, mesh, k, vs):
    shape = (mesh.n_elems, k + 1)
    g = rng.standard_normal((vs.n_nodes,) + shape)
    g -= np.tensordot(vs.weights, g, axes=1)[None]
    return KineticState(rng.standard_normal(shape), g, np.zeros(shape), rng.standard_normal(shape))


MATERIALS = {
    "s1_a0": MaterialCoefficients.uniform(),
    "ssin_a0": MaterialCoefficients(sinusoidal(1.0, 0.5), constant(0.0), 0.5, 1.5),
    "s1_acos": MaterialCoefficients(constant(1.0), sinusoidal(0.25, 0.25, kind="cos"), 1.0, 1.0),
    "ssin_acos": MaterialCoefficients(sinusoidal(1.0, 0.5), sinusoidal(0.25, 0.25, kind="cos"), 0.5, 1.5),
}


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
