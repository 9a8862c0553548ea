import sys
from pathlib import Path

import numpy as np
import pytest

# allow running the tests straight from a checkout, without installation
_SRC = Path(__file__).resolve().parent.parent / "src"
if _SRC.exists() and str(_SRC) not in sys.path:
    sys.path.insert(0, str(_SRC))

from fusedge.imaging import ColorSpace, PlanarImage  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def random_xyz(rng):
    return PlanarImage(rng.random((16, 16, 3)), ColorSpace.XYZ)


@pytest.fixture
def step_xyz():
    """Vertical two-tone step: left half dark, right half bright."""
    data = np.full((16, 16, 3), 0.2)
    data[:, 8:, :] = 0.8
    return PlanarImage(data, ColorSpace.XYZ)
