"""
Dense complex linear algebra core
Hermitian eigendecomposition, Kronecker products, norms, PSD tests and seeded sampling
"""
import logging

import numpy as np

from . import config
from .errors import NotHermitian, NotSquare, NotUnitary, ZeroVector
from .models import EigResult

logger = logging.getLogger(__name__)


def as_matrix(M) -> np.ndarray:
    return np.asarray(M, dtype=np.complex128)


def adjoint(M) -> np.ndarray:
    """Conjugate transpose"""
    return as_matrix(M).conj().T


def kron(A, B) -> np.ndarray:
    return np.kron(as_matrix(A), as_matrix(B))


def frobenius(M) -> float:
    return float(np.linalg.norm(as_matrix(M), 'fro'))


def scale(M) -> float:
    """Reference magnitude max(1, ||M||_F) for relative tolerances"""
    return max(1.0, frobenius(M))


def matrix_unit(i: int, j: int, dim: int) -> np.ndarray:
    E = np.zeros((dim, dim), dtype=np.complex128)
    E[i, j] = 1.0
    return E


def require_square(M) -> np.ndarray:
    M = as_matrix(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise NotSquare(f"expected a square matrix, got shape {M.shape}")
    return M


def hermitian_part(H, tol: float = None) -> np.ndarray:
    """
    Return (H + H^dag)/2 after checking H is Hermitian within tolerance.
    Round-off asymmetry below tol * max(1, ||H||_F) is absorbed.
    """
    H = require_square(H)
    tol = config.TOLERANCES['hermitian'] if tol is None else tol
    deviation = frobenius(H - H.conj().T)
    if deviation > tol * scale(H):
        raise NotHermitian(f"matrix deviates from Hermitian by {deviation:.3e} (Frobenius)")
    return (H + H.conj().T) / 2


def is_hermitian(H, tol: float = None) -> bool:
    try:
        hermitian_part(H, tol)
    except NotHermitian:
        return False
    return True


def hermitian_eig(H) -> EigResult:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending"""
    Hs = hermitian_part(H)
    values, vectors = np.linalg.eigh(Hs)
    order = np.argsort(values)[::-1]
    return EigResult(eigenvalues=values[order], eigenvectors=vectors[:, order])


def eigvalsh(H) -> np.ndarray:
    """Eigenvalues only, ascending"""
    return np.linalg.eigvalsh(hermitian_part(H))


def min_eig(H) -> float:
    return float(eigvalsh(H)[0])


def is_psd(H, tol: float = None) -> bool:
    """True iff lambda_min(H) >= -tol * max(1, ||H||_F)"""
    tol = config.TOLERANCES['psd'] if tol is None else tol
    return min_eig(H) >= -tol * scale(H)


def is_unitary(U, tol: float = None) -> bool:
    U = require_square(U)
    tol = config.TOLERANCES['unitary'] if tol is None else tol
    return frobenius(U.conj().T @ U - np.eye(U.shape[0])) <= tol


def require_unitary(U, dim: int) -> np.ndarray:
    U = require_square(U)
    if U.shape[0] != dim:
        raise NotUnitary(f"expected a {dim}x{dim} unitary, got shape {U.shape}")
    if not is_unitary(U):
        raise NotUnitary("matrix is not unitary within tolerance")
    return U


def rank(H, tol: float = None) -> int:
    """Number of eigenvalues above tol * lambda_max (H PSD)"""
    tol = config.TOLERANCES['rank'] if tol is None else tol
    values = eigvalsh(H)
    top = values[-1]
    if top <= 0:
        return 0
    return int(np.sum(values > tol * top))


def make_rng(seed=None) -> np.random.Generator:
    seed = config.DEFAULT_SEED if seed is None else seed
    return np.random.default_rng(seed)


def random_unit_vector(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Unitarily invariant random unit vector (normalized complex Gaussian)"""
    if dim < 1:
        raise ZeroVector("dimension must be at least 1")
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return z / np.linalg.norm(z)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR with phase correction"""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def random_psd(dim: int, rng: np.random.Generator, rank: int = None) -> np.ndarray:
    """Random PSD matrix G G^dag of the given rank"""
    k = dim if rank is None else rank
    G = rng.standard_normal((dim, k)) + 1j * rng.standard_normal((dim, k))
    return G @ G.conj().T


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    Z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (Z + Z.conj().T) / 2
