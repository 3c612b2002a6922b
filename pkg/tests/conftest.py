import math

import pytest

from hyperkepler.dynamics import OrbitConstants, PhasePoint, state_from_constants
from hyperkepler.geometry import Params
from hyperkepler.hjorbits import turning_points
from hyperkepler.integrator import KERNELS


@pytest.fixture
def unit():
    return Params(1.0, 1.0)


@pytest.fixture(params=sorted(KERNELS))
def backend(request):
    return request.param


def ellipse_state(E=-2.0, L2=4.0, params=Params()):
    """Equatorial state at pericentre."""
    c = OrbitConstants(E, L2)
    return state_from_constants(c, params, math.atanh(turning_points(c, params).X2))


def circle_state():
    return PhasePoint(math.atanh(0.25), math.pi / 2, 0.0, 0.0, 0.0, -2.0)
