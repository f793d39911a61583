"""
Linear maps M_m -> M_n in Choi-canonical form
Application, Kraus import, CP / TP / Hermiticity tests, transpose composition and named families
"""
import logging
from typing import Callable, Dict, Sequence

import numpy as np

from . import config
from .blockmat import from_tensor, partial_trace, partial_transpose
from .errors import (
    DimensionMismatch, MissingParam, NotTp, ParamOutOfDomain, ShapeMismatch, UnknownFamily,
)
from .models import BlockMatrix, LinearMapRep, MapFamily, MapFamilySpec
from .numcore import as_matrix, frobenius, hermitian_eig, is_psd, matrix_unit, scale

logger = logging.getLogger(__name__)


def linear_map(choi, m: int, n: int, label: str = "map") -> LinearMapRep:
    if isinstance(choi, BlockMatrix):
        full = choi.full
    else:
        full = as_matrix(choi)
    if full.shape != (m * n, m * n):
        raise ShapeMismatch(f"Choi matrix of a map M_{m} -> M_{n} must be {m * n}x{m * n}, got {full.shape}")
    return LinearMapRep(m=m, n=n, choi=BlockMatrix(m=m, n=n, full=full), label=label)


def choi_from_function(f: Callable[[np.ndarray], np.ndarray], m: int, label: str = "map") -> LinearMapRep:
    """Assemble sum_ij E_ij (x) f(E_ij)"""
    images = [[as_matrix(f(matrix_unit(i, j, m))) for j in range(m)] for i in range(m)]
    n = images[0][0].shape[0]
    T = np.zeros((m, n, m, n), dtype=np.complex128)
    for i in range(m):
        for j in range(m):
            T[i, :, j, :] = images[i][j]
    return LinearMapRep(m=m, n=n, choi=from_tensor(T), label=label)


def apply(phi: LinearMapRep, X) -> np.ndarray:
    """Phi(X) = sum_ij X_ij block(choi, i, j)"""
    X = as_matrix(X)
    if X.shape != (phi.m, phi.m):
        raise DimensionMismatch(f"map expects {phi.m}x{phi.m} input, got {X.shape}")
    return np.einsum('ij,ikjl->kl', X, phi.choi.tensor())


def from_kraus(ops: Sequence, label: str = "kraus") -> LinearMapRep:
    """Phi(A) = sum_r X_r A X_r^dag for n x m Kraus operators X_r"""
    if len(ops) == 0:
        raise ShapeMismatch("at least one Kraus operator is required")
    mats = [as_matrix(X) for X in ops]
    shape = mats[0].shape
    if len(shape) != 2 or any(X.shape != shape for X in mats):
        raise ShapeMismatch("Kraus operators must share one n x m shape")
    n, m = shape
    K = np.stack(mats)
    T = np.einsum('rki,rlj->ikjl', K, K.conj())
    return LinearMapRep(m=m, n=n, choi=from_tensor(T), label=label)


def is_completely_positive(phi: LinearMapRep, tol: float = None) -> bool:
    """Choi matrix is PSD; a non-Hermitian Choi matrix is never PSD"""
    tol = config.DEFAULT_TOL if tol is None else tol
    if not is_hermiticity_preserving(phi):
        return False
    return is_psd(phi.choi.full, tol)


def is_trace_preserving(phi: LinearMapRep, tol: float = None) -> bool:
    """[tr Phi(E_ij)] = tr_2(choi) equals I_m"""
    tol = config.DEFAULT_TOL if tol is None else tol
    deviation = frobenius(partial_trace(phi.choi, 2) - np.eye(phi.m))
    return deviation <= tol * scale(phi.choi.full)


def is_hermiticity_preserving(phi: LinearMapRep, tol: float = None) -> bool:
    tol = config.TOLERANCES['hermitian'] if tol is None else tol
    C = phi.choi.full
    return frobenius(C - C.conj().T) <= tol * scale(C)


def compose_with_transpose(phi: LinearMapRep) -> LinearMapRep:
    """Phi o tau, whose Choi matrix is choi^t1"""
    return LinearMapRep(
        m=phi.m, n=phi.n,
        choi=partial_transpose(phi.choi, 1),
        label=f"{phi.label}∘τ",
    )


def normalize_tp(phi: LinearMapRep, tol: float = None) -> LinearMapRep:
    """Divide a trace-scaling map by c = tr Phi(I) / m"""
    tol = config.DEFAULT_TOL if tol is None else tol
    reduced = partial_trace(phi.choi, 2)
    c = np.trace(reduced) / phi.m
    if abs(c) <= tol or frobenius(reduced - c * np.eye(phi.m)) > tol * scale(phi.choi.full):
        raise NotTp(f"{phi.label} does not scale the trace by a constant")
    c = float(c.real)
    if c <= 0:
        raise NotTp(f"{phi.label} scales the trace by a non-positive constant {c:g}")
    return LinearMapRep(m=phi.m, n=phi.n, choi=BlockMatrix(m=phi.m, n=phi.n, full=phi.choi.full / c),
                        label=f"{phi.label}/{c:g}")


def map_distance(phi: LinearMapRep, psi: LinearMapRep) -> float:
    """Frobenius distance of Choi matrices"""
    if (phi.m, phi.n) != (psi.m, psi.n):
        raise DimensionMismatch(f"maps M_{phi.m}->M_{phi.n} and M_{psi.m}->M_{psi.n} are not comparable")
    return frobenius(phi.choi.full - psi.choi.full)


def choi_eigenvalues(phi: LinearMapRep) -> np.ndarray:
    """Choi spectrum, descending"""
    return np.array(hermitian_eig(phi.choi.full).eigenvalues)


# ==================== NAMED FAMILIES ====================
def _param(spec: MapFamilySpec, name: str) -> float:
    if name not in spec.params:
        raise MissingParam(f"{spec.family.value} requires parameter '{name}'")
    return float(spec.params[name])


def _check_param_names(spec: MapFamilySpec, allowed: Sequence[str]):
    unknown = sorted(set(spec.params) - set(allowed))
    if unknown:
        valid = ", ".join(allowed) if allowed else "none"
        raise ParamOutOfDomain(f"{spec.family.value} got unknown parameters {unknown}; valid: {valid}")


def _phi1(a: float) -> Callable[[np.ndarray], np.ndarray]:
    def f(A):
        d = np.diag([
            (5 - a) * A[1, 1] + a * A[2, 2],
            a * A[0, 0] + (5 - a) * A[2, 2],
            (5 - a) * A[0, 0] + a * A[1, 1],
        ])
        return 2 * A.T + d
    return f


def _phi2(a: float) -> Callable[[np.ndarray], np.ndarray]:
    def f(A):
        d = np.diag([
            a * A[1, 1] + (5 - a) * A[2, 2],
            (5 - a) * A[0, 0] + a * A[2, 2],
            a * A[0, 0] + (5 - a) * A[1, 1],
        ])
        return 2 * A.T + d
    return f


def _phi3(m: int, x: float) -> Callable[[np.ndarray], np.ndarray]:
    return lambda A: (m * x - 1) * A + (m - x) * np.trace(A) * np.eye(m)


def _phi4(m: int, y: float) -> Callable[[np.ndarray], np.ndarray]:
    return lambda A: m * y * A.T + (1 - y) * np.trace(A) * np.eye(m)


def _trace_sigma_weights(spec: MapFamilySpec) -> np.ndarray:
    m = spec.dim
    names = [f"w{i + 1}" for i in range(m)]
    _check_param_names(spec, names)
    if not spec.params:
        return np.full(m, 1.0 / m)
    w = np.array([float(spec.params.get(name, 0.0)) for name in names])
    if np.any(w < 0) or w.sum() <= 0:
        raise ParamOutOfDomain("TRACE_SIGMA weights must be non-negative with positive sum")
    return w / w.sum()


def make_family(spec: MapFamilySpec) -> LinearMapRep:
    """Build a named family, unnormalized, Choi assembled from the formula on each E_ij"""
    family = spec.family
    m = spec.dim
    label = spec.label()

    if family in (MapFamily.PHI1, MapFamily.PHI2):
        _check_param_names(spec, ["a"])
        if m != 3:
            raise ParamOutOfDomain(f"{family.value} is defined on M_3 only (got dim={m})")
        a = _param(spec, "a")
        f = _phi1(a) if family == MapFamily.PHI1 else _phi2(a)
    elif family == MapFamily.PHI3:
        _check_param_names(spec, ["x"])
        f = _phi3(m, _param(spec, "x"))
    elif family == MapFamily.PHI4:
        _check_param_names(spec, ["y"])
        f = _phi4(m, _param(spec, "y"))
    elif family == MapFamily.REDUCTION:
        _check_param_names(spec, [])
        f = lambda A: np.trace(A) * np.eye(m) - A
    elif family == MapFamily.TRANSPOSE:
        _check_param_names(spec, [])
        f = lambda A: A.T
    elif family == MapFamily.TRACE_SIGMA:
        sigma = np.diag(_trace_sigma_weights(spec))
        f = lambda A: np.trace(A) * sigma
    else:
        raise UnknownFamily(f"unknown map family {family!r}")

    logger.debug(f"Building map family {label}")
    return choi_from_function(f, m, label=label)


def parse_map_family(name: str) -> MapFamily:
    try:
        return MapFamily(name.upper())
    except ValueError:
        valid = ", ".join(f.value.lower() for f in MapFamily)
        raise UnknownFamily(f"unknown map family '{name}'; valid: {valid}")


def family_map(family: str, dim: int = 3, **params: float) -> LinearMapRep:
    """Shorthand: family_map('phi4', 3, y=0.8)"""
    spec = MapFamilySpec(family=parse_map_family(family), dim=dim, params=dict(params))
    return make_family(spec)


def params_dict(pairs: Sequence[str]) -> Dict[str, float]:
    """Parse ['a=3.5', 'x=-1'] into a dict"""
    out = {}
    for pair in pairs or []:
        if "=" not in pair:
            raise ParamOutOfDomain(f"parameter '{pair}' is not of the form name=value")
        key, value = pair.split("=", 1)
        try:
            out[key.strip()] = float(value)
        except ValueError:
            raise ParamOutOfDomain(f"parameter '{key}' has non-numeric value '{value}'")
    return out
