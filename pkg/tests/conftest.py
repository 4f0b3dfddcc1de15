"""Shared fixtures.  Basis construction and magnetic sweeps dominate the
suite's runtime, so they are built once per session and shared."""

import numpy as np
import pytest

from penningryd.hamiltonian import BasisSet, sweep_and_track
from penningryd.species import load_bundled


@pytest.fixture(scope="session")
def ca40():
    return load_bundled("ca40")


@pytest.fixture(scope="session")
def hz2():
    return load_bundled("hydrogenic_z2")


@pytest.fixture(scope="session")
def basis30(ca40):
    return BasisSet(ca40, 30)


@pytest.fixture(scope="session")
def track30(basis30):
    return sweep_and_track(basis30, [0.5, 1.0, 1.5, 2.0])


@pytest.fixture(scope="session")
def basis45(ca40):
    return BasisSet(ca40, 45)


@pytest.fixture(scope="session")
def track45(basis45):
    # anchored below the l-mixing onset so track labels stay meaningful
    return sweep_and_track(
        basis45, np.linspace(1.2, 2.0, 5), anchor_b=1.4
    )
