"""
Shared pytest fixtures: seeded generators and random matrix factories
"""
import numpy as np
import pytest

from posmaps.blockmat import block_matrix
from posmaps.models import CertifierConfig
from posmaps.numcore import random_hermitian, random_psd, random_unitary


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def cfg():
    return CertifierConfig(restarts=64, seed=0)


@pytest.fixture
def random_psd_block(rng):
    """Factory: random PSD block matrix in M_m (x) M_n, optionally with a rank-r first factor support"""
    def make(m, n, support=None):
        if support is None:
            return block_matrix(random_psd(m * n, rng), m, n)
        V, _ = np.linalg.qr(rng.standard_normal((m, support)) + 1j * rng.standard_normal((m, support)))
        inner = random_psd(support * n, rng)
        K = np.kron(V, np.eye(n))
        return block_matrix(K @ inner @ K.conj().T, m, n)
    return make


@pytest.fixture
def random_hermitian_block(rng):
    def make(m, n):
        return block_matrix(random_hermitian(m * n, rng), m, n)
    return make


@pytest.fixture
def unitary(rng):
    def make(dim):
        return random_unitary(dim, rng)
    return make
