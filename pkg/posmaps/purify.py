"""
Schmidt decomposition and purification
"""
import logging

import numpy as np

from . import config
from .errors import DimensionMismatch, NotPsd, ZeroMatrix, ZeroVector
from .models import SchmidtForm
from .numcore import hermitian_eig, is_psd, require_square

logger = logging.getLogger(__name__)


def schmidt_decompose(x, m: int, n: int, tol: float = None) -> SchmidtForm:
    """
    x = sum_i lambda_i e_i (x) f_i via the SVD of the m x n coefficient matrix.
    Coefficients below tol * lambda_max are dropped from the rank.
    """
    tol = config.TOLERANCES['rank'] if tol is None else tol
    x = np.asarray(x, dtype=np.complex128).reshape(-1)
    if x.shape[0] != m * n:
        raise DimensionMismatch(f"vector of length {x.shape[0]} does not live in C^{m} (x) C^{n}")
    if np.linalg.norm(x) == 0:
        raise ZeroVector("cannot Schmidt-decompose the zero vector")
    u, s, vh = np.linalg.svd(x.reshape(m, n))
    r = int(np.sum(s > tol * s[0]))
    return SchmidtForm(
        coefficients=s[:r],
        left_vectors=u[:, :r],
        right_vectors=vh[:r, :].T,
        rank=r,
    )


def purify(rho, tol: float = None) -> np.ndarray:
    """Canonical purification sum_i sqrt(mu_i) psi_i (x) psi_i"""
    tol = config.TOLERANCES['rank'] if tol is None else tol
    rho = require_square(rho)
    if not is_psd(rho):
        raise NotPsd("only positive semidefinite matrices can be purified")
    eig = hermitian_eig(rho)
    top = eig.eigenvalues[0]
    if top <= 0:
        raise ZeroMatrix("cannot purify a zero matrix")
    m = rho.shape[0]
    x = np.zeros(m * m, dtype=np.complex128)
    for mu, psi in zip(eig.eigenvalues, eig.eigenvectors.T):
        if mu > tol * top:
            x += np.sqrt(mu) * np.kron(psi, psi)
    return x
