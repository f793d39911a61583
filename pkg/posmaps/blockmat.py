"""
Block-matrix views of M_m (x) M_n
Dual block indexing, partial traces and transposes, first-factor rotation, PPT classification
"""
import logging
from typing import Tuple

import numpy as np

from . import config
from .errors import IndexOutOfRange, NotPsd, ShapeMismatch, ZeroMatrix
from .models import BlockMatrix, PptClass, PptTag
from .numcore import (
    as_matrix, hermitian_eig, hermitian_part, is_psd, kron, min_eig, require_unitary, scale,
)

logger = logging.getLogger(__name__)


def block_matrix(full, m: int, n: int) -> BlockMatrix:
    full = as_matrix(full)
    if full.shape != (m * n, m * n):
        raise ShapeMismatch(f"expected a {m * n}x{m * n} matrix for {m}(x){n}, got {full.shape}")
    return BlockMatrix(m=m, n=n, full=full)


def from_tensor(T: np.ndarray) -> BlockMatrix:
    """Inverse of BlockMatrix.tensor()"""
    m, n = T.shape[0], T.shape[1]
    return BlockMatrix(m=m, n=n, full=T.reshape(m * n, m * n))


def from_blocks(blocks) -> BlockMatrix:
    """Assemble sum_ij E_ij (x) blocks[i][j]"""
    arr = np.asarray(blocks, dtype=np.complex128)
    return from_tensor(arr.transpose(0, 2, 1, 3))


def _check_index(index: int, bound: int, what: str):
    if not 0 <= index < bound:
        raise IndexOutOfRange(f"{what} index {index} outside [0, {bound})")


def block(A: BlockMatrix, i: int, j: int) -> np.ndarray:
    """A_ij, the n x n block at block-row i and block-column j"""
    _check_index(i, A.m, "block row")
    _check_index(j, A.m, "block column")
    return A.tensor()[i, :, j, :].copy()


def tilde_block(A: BlockMatrix, k: int, l: int) -> np.ndarray:
    """m x m matrix with (tilde_block(k,l))_ij = (block(i,j))_kl"""
    _check_index(k, A.n, "tilde row")
    _check_index(l, A.n, "tilde column")
    return A.tensor()[:, k, :, l].copy()


def partial_trace(A: BlockMatrix, side: int) -> np.ndarray:
    """side=2 traces out the second factor (m x m), side=1 the first (n x n)"""
    T = A.tensor()
    if side == 2:
        return np.einsum('ikjk->ij', T)
    if side == 1:
        return np.einsum('ikil->kl', T)
    raise IndexOutOfRange(f"side must be 1 or 2, got {side}")


def partial_transpose(A: BlockMatrix, side: int) -> BlockMatrix:
    T = A.tensor()
    if side == 1:
        return from_tensor(T.transpose(2, 1, 0, 3))
    if side == 2:
        return from_tensor(T.transpose(0, 3, 2, 1))
    raise IndexOutOfRange(f"side must be 1 or 2, got {side}")


def rotate_first(A: BlockMatrix, U) -> BlockMatrix:
    """(U (x) I_n) A (U^dag (x) I_n)"""
    U = require_unitary(U, A.m)
    K = kron(U, np.eye(A.n))
    return BlockMatrix(m=A.m, n=A.n, full=K @ A.full @ K.conj().T)


def ppt_classify(A: BlockMatrix, tol: float = None) -> PptClass:
    """
    Classify a Hermitian block matrix by lambda_min(A) and lambda_min(A^t2).
    A^t1 and A^t2 are mutual transposes for Hermitian A, so one side suffices.
    """
    tol = config.DEFAULT_TOL if tol is None else tol
    hermitian_part(A.full)
    threshold = tol * scale(A.full)
    lam = min_eig(A.full)
    lam_pt = min_eig(partial_transpose(A, 2).full)
    if lam < -threshold:
        tag = PptTag.NOT_POSITIVE
    elif lam_pt < -threshold:
        tag = PptTag.POSITIVE_NPPT
    else:
        tag = PptTag.POSITIVE_PPT
    logger.debug(f"PPT classify {A.m}x{A.n}: min_eig={lam:.3e} min_eig_pt={lam_pt:.3e} -> {tag.value}")
    return PptClass(tag=tag, min_eig=lam, min_eig_pt=lam_pt, threshold=threshold)


def compress_support(A: BlockMatrix, tol: float = None) -> Tuple[BlockMatrix, np.ndarray]:
    """
    View a PSD A in M_r (x) M_n, r = rank of its reduced matrix A_1.
    Returns (compressed, V) with V an m x r isometry and (V (x) I) compressed (V^dag (x) I) = A.
    """
    tol = config.TOLERANCES['rank'] if tol is None else tol
    if not is_psd(A.full, config.DEFAULT_TOL):
        raise NotPsd("compress_support requires a positive semidefinite matrix")
    eig = hermitian_eig(partial_trace(A, 2))
    top = eig.eigenvalues[0]
    if top <= 0:
        raise ZeroMatrix("reduced matrix vanishes")
    r = int(np.sum(eig.eigenvalues > tol * top))
    V = np.array(eig.eigenvectors[:, :r])
    K = kron(V, np.eye(A.n))
    compressed = K.conj().T @ A.full @ K
    logger.debug(f"Support compressed from {A.m} to {r} first-factor dimensions")
    return BlockMatrix(m=r, n=A.n, full=compressed), V


def embed_first(C: BlockMatrix, V: np.ndarray) -> BlockMatrix:
    """(V (x) I) C (V^dag (x) I) for an m x r isometry V"""
    K = kron(V, np.eye(C.n))
    return BlockMatrix(m=V.shape[0], n=C.n, full=K @ C.full @ K.conj().T)
