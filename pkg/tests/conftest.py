import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "numeric",
    deadline=None,
    max_examples=50,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("numeric")

# Three rows in R^2: two axes and their diagonal. Small enough that every
# quantity below is checkable by hand, rich enough to exercise everything.
REFERENCE_A = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
REFERENCE_X_STAR = np.array([1.0, 1.0])
REFERENCE_B = np.array([1.0, 1.0, 2.0])


@pytest.fixture
def reference_A():
    return REFERENCE_A.copy()


@pytest.fixture
def reference_system():
    from kacz import make_linear_system

    return make_linear_system(REFERENCE_A, x_star=REFERENCE_X_STAR)
