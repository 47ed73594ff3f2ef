import json
import os

import pytest

from lindleywalk.core.distributions import BivariateGaussian, FiniteSupport1D, FiniteSupport2D, ProductOfMarginals
from lindleywalk.register_experiments import register_all_experiments

CONFIGS_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "resources", "configs")


@pytest.fixture(scope="session", autouse=True)
def registered_experiments():
    register_all_experiments()


@pytest.fixture
def plus_minus_one():
    return FiniteSupport1D([(1, 0.5), (-1, 0.5)])


@pytest.fixture
def plus_one_minus_two():
    return FiniteSupport1D([(1, 2 / 3), (-2, 1 / 3)])


@pytest.fixture
def product_plus_minus_one(plus_minus_one):
    return ProductOfMarginals(plus_minus_one, plus_minus_one)


@pytest.fixture
def case_d_walk(plus_minus_one):
    return ProductOfMarginals(plus_minus_one, FiniteSupport1D([(1, 0.75), (-1, 0.25)]))


@pytest.fixture
def correlated_lattice_walk():
    return FiniteSupport2D([((1, 1), 0.3), ((-1, -1), 0.3), ((2, -1), 0.2), ((-2, 1), 0.2)])


@pytest.fixture
def gaussian_walk():
    def build(rho: float, mean=(0.0, 0.0)):
        return BivariateGaussian(mean, [[1.0, rho], [rho, 1.0]])

    return build


# Writes a config document to tmp_path and returns its path
@pytest.fixture
def write_config(tmp_path):
    def write(data, file_name="config.json"):
        path = tmp_path / file_name
        if isinstance(data, str):
            path.write_text(data)
        else:
            path.write_text(json.dumps(data))
        return str(path)

    return write
