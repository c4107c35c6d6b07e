import sys
import warnings
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from distorder.kernel import AlphaQuadrature, WeightFunction, WeightHypothesisWarning


@pytest.fixture(scope="session")
def mu_poly():
    return WeightFunction.poly_half_squared()


@pytest.fixture(scope="session")
def mu_const():
    return WeightFunction.constant()


@pytest.fixture(scope="session")
def mu_ind():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", WeightHypothesisWarning)
        return WeightFunction.indicator_half_one()


@pytest.fixture(scope="session")
def quad_poly(mu_poly):
    return AlphaQuadrature.for_weight(mu_poly, 32)


@pytest.fixture(scope="session")
def quad_const(mu_const):
    return AlphaQuadrature.for_weight(mu_const, 32)


@pytest.fixture(scope="session")
def quad_ind(mu_ind):
    return AlphaQuadrature.for_weight(mu_ind, 32)
