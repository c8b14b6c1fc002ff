# -*- coding: utf-8 -*-
"""Pytest configuration file."""
import pytest

from pygtep.lp import SolverOptions
from pygtep.toys import load_bundled, tiny_toy

EXACT = SolverOptions(mip_gap=0.0)


@pytest.fixture(scope="session")
def toy2z():
    """The bundled two-zone toy."""
    return load_bundled()


@pytest.fixture(scope="session")
def tiny():
    """One zone, no assets: all demand goes unserved."""
    return tiny_toy()
