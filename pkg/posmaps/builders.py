"""
Map constructions from block matrices
Channels from positive matrices, decomposable PNCP maps from NPPT matrices,
PNCP maps from block-positive matrices, and the classifications that go with them
"""
import logging
from typing import Optional, Tuple

import numpy as np

from . import config
from .blockmat import (
    block, compress_support, from_tensor, partial_trace, partial_transpose, ppt_classify,
    rotate_first,
)
from .chanmap import apply, is_completely_positive, is_trace_preserving, linear_map
from .detector import apply_id_tensor
from .errors import (
    ConditionViolated, DiagBlockNotPsd, DimensionMismatch, InputIsPpt, IsPsd, NotCp, NotPsd,
    NotTp, ParamOutOfDomain, PurificationMismatch, ZeroMatrix,
)
from .models import (
    BlockMatrix, CertifierConfig, ChannelClass, Correspondence, Lemma21Result, LinearMapRep,
    PptTag, SeparabilityVerdict, Thm31Result, Thm41Result, VerdictTag,
)
from .numcore import (
    frobenius, hermitian_eig, hermitian_part, is_psd, matrix_unit, min_eig, rank, scale,
)
from .poscert import block_positivity
from .purify import schmidt_decompose

logger = logging.getLogger(__name__)

# (r, n) pairs of the second factor where PPT decides separability of a channel's Choi matrix
EB_DECIDABLE_DIMS = {(2, 2), (2, 3), (3, 2)}


def _complete_basis(Q: np.ndarray) -> np.ndarray:
    """Extend orthonormal columns Q (m x r) to an m x m unitary"""
    m, r = Q.shape
    if r == m:
        return Q
    u, _, _ = np.linalg.svd(Q, full_matrices=True)
    return np.hstack([Q, u[:, r:]])


def _canonical_frame(A1: np.ndarray, tol: float) -> Tuple[np.ndarray, np.ndarray, int]:
    """Eigenbasis psi of A_1 (full m x m) and square roots lambda of its r nonzero eigenvalues"""
    eig = hermitian_eig(A1)
    top = eig.eigenvalues[0]
    if top <= 0:
        raise ZeroMatrix("reduced matrix A_1 vanishes")
    r = int(np.sum(eig.eigenvalues > tol * top))
    return np.array(eig.eigenvectors), np.sqrt(eig.eigenvalues[:r]), r


def _normalized_blocks(A: BlockMatrix, psi: np.ndarray, lam: np.ndarray) -> BlockMatrix:
    """
    A''_ij = (<psi_i| (x) I) A (|psi_j> (x) I) / (lambda_i lambda_j) for i, j < r,
    I_n / n on the remaining diagonal blocks, zero elsewhere
    """
    m, n = A.m, A.n
    r = lam.shape[0]
    rotated = np.einsum('ai,akbl,bj->ikjl', psi[:, :r].conj(), A.tensor(), psi[:, :r])
    rotated = rotated / np.outer(lam, lam)[:, None, :, None]
    T = np.zeros((m, n, m, n), dtype=np.complex128)
    T[:r, :, :r, :] = rotated
    for i in range(r, m):
        T[i, :, i, :] = np.eye(n) / n
    return from_tensor(T)


def lemma21_build(A: BlockMatrix, x: Optional[np.ndarray] = None, tol: float = None,
                  hermitian: bool = False) -> Lemma21Result:
    """
    Trace-preserving map Lambda with A = (id (x) Lambda)|x><x|.

    Without x the canonical purification sum_i lambda_i psi_i (x) psi_i of A_1 is used.
    With hermitian=True, A only needs to be Hermitian with A_1 >= 0; the map is then
    Hermiticity-preserving and is CP exactly when A >= 0.
    """
    tol = config.DEFAULT_TOL if tol is None else tol
    m, n = A.m, A.n
    hermitian_part(A.full)
    A1 = hermitian_part(partial_trace(A, 2))
    if hermitian:
        if not is_psd(A1, tol):
            raise NotPsd("reduced matrix A_1 must be positive semidefinite")
    elif not is_psd(A.full, tol):
        raise NotPsd("lemma21 requires a positive semidefinite block matrix")

    if x is None:
        psi, lam, r = _canonical_frame(A1, tol)
        phi = psi
        x = sum(lam[i] * np.kron(psi[:, i], psi[:, i]) for i in range(r))
    else:
        x = np.asarray(x, dtype=np.complex128).reshape(-1)
        if x.shape[0] != m * m:
            raise DimensionMismatch(f"purification must have length {m * m}, got {x.shape[0]}")
        X = x.reshape(m, m)
        mismatch = frobenius(X @ X.conj().T - A1)
        if mismatch > config.TOLERANCES['purification'] * scale(A1):
            raise PurificationMismatch(f"tr_2|x><x| differs from A_1 by {mismatch:.3e}")
        schmidt = schmidt_decompose(x, m, m, tol)
        r = schmidt.rank
        lam = np.array(schmidt.coefficients)
        psi = _complete_basis(np.array(schmidt.left_vectors))
        phi = _complete_basis(np.array(schmidt.right_vectors))

    coords = _normalized_blocks(A, psi, lam)
    # Lambda(|phi_i><phi_j|) = A''_ij, so the Choi matrix is sum_ij |conj phi_i><conj phi_j| (x) A''_ij
    choi = rotate_first(coords, phi.conj())
    channel = linear_map(choi, m, n, label="lemma21")

    X = BlockMatrix(m=m, n=m, full=np.outer(x, x.conj()))
    error = frobenius(apply_id_tensor(channel, X).full - A.full)
    if hermitian and error > 1e-8 * scale(A.full):
        raise PurificationMismatch("A is not supported on the support of its reduced matrix")

    completion = list(range(r, m))
    logger.debug(f"lemma21: rank {r}, completion blocks {completion}, error {error:.3e}")
    return Lemma21Result(
        map=channel,
        purification=x,
        reconstruction_error=error,
        completion_indices=completion,
        rank=r,
        completely_positive=is_completely_positive(channel, tol),
    )


def channel_from_state(rho: BlockMatrix, x: Optional[np.ndarray] = None,
                       tol: float = None) -> Lemma21Result:
    """Channel from a bipartite density matrix and (optionally) a purification of rho_1"""
    trace = np.trace(rho.full).real
    if abs(trace - 1) > config.TOLERANCES['trace_one']:
        raise ParamOutOfDomain(f"density matrix must have unit trace, got {trace:.6g}")
    return lemma21_build(rho, x, tol)


def thm31_build(A: BlockMatrix, tol: float = None) -> Thm31Result:
    """
    Decomposable trace-preserving PNCP map from an NPPT matrix with
    Phi(|psi_i><psi_j|) = (A''_ij)^t over the canonical purification, i.e. the
    transpose of the canonical channel's output
    """
    tol = config.DEFAULT_TOL if tol is None else tol
    ppt = ppt_classify(A, tol)
    if ppt.tag == PptTag.NOT_POSITIVE:
        raise NotPsd("thm31 requires a positive semidefinite block matrix")
    if ppt.tag == PptTag.POSITIVE_PPT:
        raise InputIsPpt("input is PPT; the construction would give a completely positive map")

    A1 = hermitian_part(partial_trace(A, 2))
    psi, lam, r = _canonical_frame(A1, tol)
    coords = _normalized_blocks(A, psi, lam)
    # choi = sum_ij |conj psi_i><conj psi_j| (x) (A''_ij)^t
    choi = rotate_first(partial_transpose(coords, 2), psi.conj())
    phi = linear_map(choi, A.m, A.n, label="thm31")

    result = Thm31Result(
        map=phi,
        cotranspose_choi_min_eig=min_eig(partial_transpose(choi, 1).full),
        choi_min_eig=min_eig(choi.full),
    )
    logger.debug(f"thm31: rank {r}, choi min {result.choi_min_eig:.3e}, "
                 f"cotranspose min {result.cotranspose_choi_min_eig:.3e}")
    return result


def _diagonal_blocks_psd(A: BlockMatrix, tol: float) -> Optional[int]:
    """Index of the first non-PSD diagonal block, or None"""
    for i in range(A.m):
        if not is_psd(block(A, i, i), tol):
            return i
    return None


def thm41_build(A: BlockMatrix, cfg: Optional[CertifierConfig] = None,
                tol: float = None) -> Thm41Result:
    """
    PNCP map Psi(E_ij) = A_ij from a non-PSD Hermitian A.
    The condition on every A_11^U = [<u|A~_kl|u>] is block-positivity of A.
    """
    tol = config.DEFAULT_TOL if tol is None else tol
    hermitian_part(A.full)
    if is_psd(A.full, tol):
        raise IsPsd("input is positive semidefinite; its map is completely positive")
    bad = _diagonal_blocks_psd(A, tol)
    if bad is not None:
        raise DiagBlockNotPsd(f"diagonal block A_{bad}{bad} is not positive semidefinite", index=bad)

    verdict = block_positivity(A, cfg)
    if verdict.tag == VerdictTag.VIOLATION:
        raise ConditionViolated(
            f"A_11^U has eigenvalue {verdict.min_value:.6e} < 0 at the witness u",
            witness_u=np.array(verdict.witness_u),
            min_eigenvalue=verdict.min_value,
            witness_v=np.array(verdict.witness_v),
        )
    return Thm41Result(
        map=linear_map(A, A.m, A.n, label="thm41"),
        condition_report=verdict,
        diag_blocks_psd=True,
    )


def cor23_separability(rho: BlockMatrix, tol: float = None) -> SeparabilityVerdict:
    """Decide separability through the support of rho_1 when r * n <= 6"""
    tol = config.DEFAULT_TOL if tol is None else tol
    if not is_psd(rho.full, tol):
        raise NotPsd("separability screening requires a positive semidefinite state")
    trace = np.trace(rho.full).real
    if abs(trace - 1) > config.TOLERANCES['trace_one']:
        raise ParamOutOfDomain(f"state must have unit trace, got {trace:.6g}")

    compressed, _ = compress_support(rho, tol)
    if ppt_classify(compressed, tol).tag == PptTag.POSITIVE_NPPT:
        return SeparabilityVerdict.ENTANGLED
    r, n = compressed.m, compressed.n
    if r == 1 or r * n <= config.PPT_DECIDES_SEPARABILITY_MAX_PRODUCT:
        return SeparabilityVerdict.SEPARABLE
    return SeparabilityVerdict.INCONCLUSIVE


def _is_completely_contractive(channel: LinearMapRep, tol: float) -> bool:
    """Lambda(E_ij) = delta_ij sigma"""
    sigma = block(channel.choi, 0, 0)
    threshold = tol * scale(channel.choi.full)
    for i in range(channel.m):
        for j in range(channel.m):
            target = sigma if i == j else np.zeros_like(sigma)
            if frobenius(apply(channel, matrix_unit(i, j, channel.m)) - target) > threshold:
                return False
    return True


def classify_channel(channel: LinearMapRep, tol: float = None) -> ChannelClass:
    tol = config.DEFAULT_TOL if tol is None else tol
    if not is_completely_positive(channel, tol):
        raise NotCp(f"{channel.label} is not completely positive")
    if not is_trace_preserving(channel, tol):
        raise NotTp(f"{channel.label} is not trace-preserving")

    if channel.m == channel.n and rank(channel.choi.full) == 1:
        return ChannelClass.UNITARY
    if _is_completely_contractive(channel, tol):
        return ChannelClass.COMPLETELY_CONTRACTIVE
    if ppt_classify(channel.choi, tol).tag == PptTag.POSITIVE_NPPT:
        return ChannelClass.NOT_EB
    if (channel.m, channel.n) in EB_DECIDABLE_DIMS:
        return ChannelClass.EB
    return ChannelClass.INCONCLUSIVE


def block_correspondence(A: BlockMatrix, cfg: Optional[CertifierConfig] = None,
                         tol: float = None) -> Correspondence:
    """Kind of map whose Choi matrix is the Hermitian block matrix A"""
    tol = config.DEFAULT_TOL if tol is None else tol
    hermitian_part(A.full)
    if is_psd(A.full, tol):
        return Correspondence.CP
    if is_psd(partial_transpose(A, 1).full, tol):
        return Correspondence.DECOMPOSABLE
    if _diagonal_blocks_psd(A, tol) is not None:
        return Correspondence.NOT_POSITIVE
    if block_positivity(A, cfg).tag == VerdictTag.NO_VIOLATION_FOUND:
        return Correspondence.BLOCK_POSITIVE
    return Correspondence.NOT_POSITIVE
