import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

from emogait.eigsolver import available_backends, use_backend

settings.register_profile(
    "ci",
    derandomize=True,
    max_examples=25,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ci")


@pytest.fixture
def rng():
    return np.random.default_rng(20260808)


@pytest.fixture(params=available_backends())
def backend(request):
    """Run the decorated test under each available eigensolver backend."""
    with use_backend(request.param):
        yield request.param
