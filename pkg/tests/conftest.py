import numpy as np
import pytest

from zenolab.models import PAULI_X, PAULI_Y, PAULI_Z


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def paulis():
    return PAULI_X, PAULI_Y, PAULI_Z


def matrix_units(d):
    for a in range(d):
        for b in range(d):
            e = np.zeros((d, d), dtype=complex)
            e[a, b] = 1
            yield e
