"""
State families
Horodecki rho(a), Werner, isotropic, flip, maximally entangled projector, classical-quantum and product states
"""
import logging

import numpy as np

from . import config
from .blockmat import block_matrix, ppt_classify
from .errors import MissingParam, ParamOutOfDomain, ShapeMismatch, UnknownFamily
from .models import (
    BlockMatrix, ClassificationSource, PptTag, SeparabilityTag, StateClassification,
    StateFamily, StateFamilySpec,
)
from .numcore import is_psd, kron, matrix_unit, require_square

logger = logging.getLogger(__name__)


def flip(m: int) -> BlockMatrix:
    """F = sum_ij E_ij (x) E_ji"""
    F = sum(kron(matrix_unit(i, j, m), matrix_unit(j, i, m)) for i in range(m) for j in range(m))
    return block_matrix(F, m, m)


def max_ent_projector(m: int) -> BlockMatrix:
    """P+ = (1/m) sum_ij E_ij (x) E_ij"""
    omega = np.eye(m).reshape(-1) / np.sqrt(m)
    return block_matrix(np.outer(omega, omega), m, m)


def horodecki(a: float) -> BlockMatrix:
    """rho(a) on C^3 (x) C^3, diagonal blocks diag(2,a,5-a), diag(5-a,2,a), diag(a,5-a,2) over 21"""
    diagonals = [(2, a, 5 - a), (5 - a, 2, a), (a, 5 - a, 2)]
    rho = np.zeros((9, 9), dtype=np.complex128)
    for i, diag in enumerate(diagonals):
        rho[3 * i:3 * i + 3, 3 * i:3 * i + 3] = np.diag(diag)
    for i in range(3):
        for j in range(3):
            if i != j:
                rho[4 * i, 4 * j] = 2
    return block_matrix(rho / 21, 3, 3)


def werner(m: int, x: float) -> BlockMatrix:
    """((m - x) I + (mx - 1) F) / (m^3 - m), with tr(F w) = x"""
    full = ((m - x) * np.eye(m * m) + (m * x - 1) * flip(m).full) / (m ** 3 - m)
    return block_matrix(full, m, m)


def isotropic(m: int, y: float) -> BlockMatrix:
    full = (1 - y) / m ** 2 * np.eye(m * m) + y * max_ent_projector(m).full
    return block_matrix(full, m, m)


# ==================== SPEC HANDLING ====================
PARAM_NAMES = {
    StateFamily.HORODECKI: ["a"],
    StateFamily.WERNER: ["x"],
    StateFamily.ISOTROPIC: ["y"],
    StateFamily.FLIP: [],
    StateFamily.MAX_ENT: [],
    StateFamily.CQ: [],
    StateFamily.PRODUCT: [],
}


def _param(spec: StateFamilySpec, name: str) -> float:
    if name not in spec.params:
        raise MissingParam(f"{spec.family.value} requires parameter '{name}'")
    return float(spec.params[name])


def _components(spec: StateFamilySpec):
    if not spec.components:
        raise MissingParam(f"{spec.family.value} requires a component list")
    mats = []
    for comp in spec.components:
        sigma = require_square(comp.matrix)
        if not is_psd(sigma):
            raise ParamOutOfDomain(f"{spec.family.value} components must be positive semidefinite")
        mats.append((comp.weight, sigma))
    return mats


def check_domain(spec: StateFamilySpec) -> None:
    """Raise ParamOutOfDomain (naming the valid range) unless the spec's parameters are admissible"""
    family = spec.family
    if family not in PARAM_NAMES:
        raise UnknownFamily(f"unknown state family {family!r}")
    unknown = sorted(set(spec.params) - set(PARAM_NAMES[family]))
    if unknown:
        raise ParamOutOfDomain(f"{family.value} got unknown parameters {unknown}")

    m = spec.dim
    if family == StateFamily.HORODECKI:
        if m != 3:
            raise ParamOutOfDomain("HORODECKI is defined on C^3 (x) C^3 only")
        a = _param(spec, "a")
        if not 0 <= a <= 5:
            raise ParamOutOfDomain(f"HORODECKI needs a in [0, 5], got {a:g}")
    elif family == StateFamily.WERNER:
        x = _param(spec, "x")
        if not -1 <= x <= 1:
            raise ParamOutOfDomain(f"WERNER needs x in [-1, 1], got {x:g}")
    elif family == StateFamily.ISOTROPIC:
        y = _param(spec, "y")
        low = -1 / (m * m - 1)
        if not low <= y <= 1:
            raise ParamOutOfDomain(f"ISOTROPIC needs y in [{low:g}, 1], got {y:g}")
    elif family == StateFamily.PRODUCT:
        if len(_components(spec)) != 2:
            raise ParamOutOfDomain("PRODUCT needs exactly two components")
    elif family == StateFamily.CQ:
        mats = _components(spec)
        if len({sigma.shape for _, sigma in mats}) != 1:
            raise ShapeMismatch("CQ components must share one dimension")
        if sum(w * np.trace(sigma).real for w, sigma in mats) <= 0:
            raise ParamOutOfDomain("CQ components have zero total trace")


def make_state(spec: StateFamilySpec) -> BlockMatrix:
    """
    Build a family member. Every family except FLIP has unit trace;
    FLIP is the flip operator itself (trace m).
    """
    check_domain(spec)
    family = spec.family
    m = spec.dim

    if family == StateFamily.HORODECKI:
        return horodecki(_param(spec, "a"))
    if family == StateFamily.WERNER:
        return werner(m, _param(spec, "x"))
    if family == StateFamily.ISOTROPIC:
        return isotropic(m, _param(spec, "y"))
    if family == StateFamily.FLIP:
        return flip(m)
    if family == StateFamily.MAX_ENT:
        return max_ent_projector(m)

    mats = _components(spec)
    if family == StateFamily.PRODUCT:
        (_, rho1), (_, rho2) = mats
        full = kron(rho1 / np.trace(rho1).real, rho2 / np.trace(rho2).real)
        return block_matrix(full, rho1.shape[0], rho2.shape[0])

    # CQ: sum_i p_i |i><i| (x) sigma_i
    k, n = len(mats), mats[0][1].shape[0]
    full = sum(w * kron(matrix_unit(i, i, k), sigma) for i, (w, sigma) in enumerate(mats))
    return block_matrix(full / np.trace(full).real, k, n)


def _ppt_test(rho: BlockMatrix) -> StateClassification:
    ppt = ppt_classify(rho, config.DEFAULT_TOL)
    if ppt.tag == PptTag.POSITIVE_NPPT:
        tag = SeparabilityTag.NPPT_ENTANGLED
    elif rho.m * rho.n <= config.PPT_DECIDES_SEPARABILITY_MAX_PRODUCT:
        tag = SeparabilityTag.SEPARABLE
    else:
        tag = SeparabilityTag.PPT_UNDECIDED
    return StateClassification(tag=tag, source=ClassificationSource.PPT_TEST)


def classify_state(spec: StateFamilySpec) -> StateClassification:
    """Known separability ranges for HORODECKI / WERNER / ISOTROPIC, PPT test otherwise"""
    check_domain(spec)
    family = spec.family
    m = spec.dim
    known = ClassificationSource.KNOWN_RANGE

    if family == StateFamily.HORODECKI:
        a = _param(spec, "a")
        if 2 <= a <= 3:
            tag = SeparabilityTag.SEPARABLE
        elif 1 <= a < 2 or 3 < a <= 4:
            # rho(5 - a) = F rho(a) F, so [1, 2) mirrors (3, 4]
            tag = SeparabilityTag.PPT_ENTANGLED
        else:
            tag = SeparabilityTag.NPPT_ENTANGLED
        return StateClassification(tag=tag, source=known)
    if family == StateFamily.WERNER:
        x = _param(spec, "x")
        tag = SeparabilityTag.SEPARABLE if 0 <= x <= 1 else SeparabilityTag.NPPT_ENTANGLED
        return StateClassification(tag=tag, source=known)
    if family == StateFamily.ISOTROPIC:
        y = _param(spec, "y")
        tag = SeparabilityTag.SEPARABLE if y <= 1 / (m + 1) else SeparabilityTag.NPPT_ENTANGLED
        return StateClassification(tag=tag, source=known)
    if family == StateFamily.FLIP:
        raise ParamOutOfDomain("the flip operator is not a state")
    if family in (StateFamily.CQ, StateFamily.PRODUCT):
        return StateClassification(tag=SeparabilityTag.SEPARABLE, source=ClassificationSource.CONSTRUCTION)
    return _ppt_test(make_state(spec))


def parse_state_family(name: str) -> StateFamily:
    try:
        return StateFamily(name.upper())
    except ValueError:
        valid = ", ".join(f.value.lower() for f in StateFamily)
        raise UnknownFamily(f"unknown state family '{name}'; valid: {valid}")
