import pytest

from hadamard_ineq import geometry as geo
from hadamard_ineq import weighted as wgt


@pytest.fixture(scope="session")
def hyperbolic_model():
    return geo.build_model(geo.Hyperbolic(1.0), 3, 20.0)


@pytest.fixture(scope="session")
def euclidean_model():
    return geo.build_model(geo.Euclidean(), 3, 50.0)


@pytest.fixture(scope="session")
def power_model():
    # beta = 1 law; domain deep enough for near-critical maximizers
    return geo.build_model(geo.PowerLaw(1.0, 1.0, 1.0), 3, 20000.0,
                           grid=geo.GridSpec(n=6144, kind="log"))


@pytest.fixture(scope="session")
def quasi_model():
    return geo.build_model(geo.QuasiEuclideanOptimal(2.0, 1.0), 3, 1200.0)


@pytest.fixture(scope="session")
def hyperbolic_weight(hyperbolic_model):
    return wgt.build_weight(hyperbolic_model)


@pytest.fixture(scope="session")
def euclidean_weight(euclidean_model):
    return wgt.build_weight(euclidean_model)


@pytest.fixture(scope="session")
def power_weight(power_model):
    return wgt.build_weight(power_model)


@pytest.fixture(scope="session")
def quasi_weight(quasi_model):
    return wgt.build_weight(quasi_model)
