import json
from pathlib import Path

import numpy as np
import pytest

import ecdl.omp as omp_module
from ecdl import _omp_numpy
from ecdl.dictionaries import Dictionary

try:
    from ecdl import _omp_cy
except ImportError:
    _omp_cy = None

FIXTURES = Path(__file__).parent / "fixtures"

_available = [_omp_numpy] + ([_omp_cy] if _omp_cy is not None else [])


@pytest.fixture(params=_available, ids=[k.KERNEL_NAME for k in _available])
def each_kernel(request, monkeypatch):
    """Run a test once per available OMP kernel by swapping the module-level
    dispatch target."""
    monkeypatch.setattr(omp_module, "_kernel", request.param)
    return request.param.KERNEL_NAME


@pytest.fixture(scope="session")
def fixture_meta():
    return json.loads((FIXTURES / "meta.json").read_text())


def exact_norm_dictionary() -> Dictionary:
    """16x32 dictionary whose atom norms are exactly 1.0 in float64 (four
    entries of magnitude 0.5 each), so scaled atoms round-trip through
    coding and refitting without rounding."""
    atoms = np.zeros((16, 32))
    for i in range(16):
        pos = [(i + d) % 16 for d in range(4)]
        atoms[pos, i] = 0.5
        atoms[pos, 16 + i] = [0.5, -0.5, 0.5, -0.5]
    return Dictionary(atoms)
