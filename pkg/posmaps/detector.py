"""
Entanglement detection with positive maps
(id (x) Phi) on states, witnesses from PNCP maps, parameter sweeps
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Iterable, List, Optional, Sequence, Union

import numpy as np

from . import config
from .blockmat import from_tensor, ppt_classify
from .chanmap import is_completely_positive, is_hermiticity_preserving, make_family
from .errors import DimensionMismatch, MapIsCp, NotHermitianPreserving, ParamOutOfDomain
from .models import (
    BlockMatrix, CertifierConfig, DetectionReport, LinearMapRep, MapFamilySpec,
    PptTag, StateFamilySpec, SweepCheck, SweepRow, VerdictTag,
)
from .numcore import min_eig, scale
from .poscert import BlockPositivityCertifier
from .statezoo import make_state

logger = logging.getLogger(__name__)


def apply_id_tensor(phi: LinearMapRep, rho: BlockMatrix) -> BlockMatrix:
    """(id_m (x) Phi) rho: block(i, j) of the result is Phi(block(rho, i, j))"""
    if rho.n != phi.m:
        raise DimensionMismatch(f"state second factor is {rho.n}-dimensional, map expects {phi.m}")
    result = np.einsum('iajb,apbq->ipjq', rho.tensor(), phi.choi.tensor())
    return from_tensor(result)


def detect(phi: LinearMapRep, rho: BlockMatrix, tol: float = None,
           map_id: Optional[str] = None, state_id: str = "state") -> DetectionReport:
    """detected iff lambda_min((id (x) Phi) rho) < -tol * max(1, ||(id (x) Phi) rho||_F)"""
    tol = config.DEFAULT_TOL if tol is None else tol
    output = apply_id_tensor(phi, rho)
    threshold = tol * scale(output.full)
    lam = min_eig(output.full)
    report = DetectionReport(
        min_eig=lam,
        detected=lam < -threshold,
        map_id=map_id or phi.label,
        state_id=state_id,
        threshold=threshold,
    )
    if report.detected:
        logger.info(f"⚠️ Entanglement detected in {state_id} by {report.map_id} (min eig {lam:.3e})")
    return report


def witness_from_map(phi: LinearMapRep, tol: float = None) -> BlockMatrix:
    """W = choi / m = (id (x) Phi) P+"""
    tol = config.DEFAULT_TOL if tol is None else tol
    if not is_hermiticity_preserving(phi):
        raise NotHermitianPreserving(f"{phi.label} is not Hermiticity-preserving and yields no witness")
    if is_completely_positive(phi, tol):
        raise MapIsCp(f"{phi.label} is completely positive and yields no witness")
    return BlockMatrix(m=phi.m, n=phi.n, full=phi.choi.full / phi.m)


def evaluate_witness(W: BlockMatrix, rho: BlockMatrix) -> float:
    """Re tr(W rho)"""
    if (W.m, W.n) != (rho.m, rho.n):
        raise DimensionMismatch(f"witness on {W.m}(x){W.n} cannot evaluate a {rho.m}(x){rho.n} state")
    return float(np.einsum('ij,ji->', W.full, rho.full).real)


# ==================== SWEEPS ====================
def grid(start: float, stop: float, step: float) -> List[float]:
    """Uniform grid start, start+step, ... up to stop inclusive"""
    if step <= 0 or stop < start:
        raise ParamOutOfDomain("sweep grid needs step > 0 and to >= from")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(count)]


def _with_param(spec: Union[MapFamilySpec, StateFamilySpec], name: str, value: float):
    params = dict(spec.params)
    params[name] = value
    return spec.model_copy(update={'params': params})


def _map_row(spec: MapFamilySpec, name: str, value: float, checks: set,
             certifier: BlockPositivityCertifier, tol: float) -> SweepRow:
    phi = make_family(_with_param(spec, name, value))
    row = {'param_name': name, 'param_value': value}
    choi_min = min_eig(phi.choi.full)
    if SweepCheck.CP in checks:
        row['choi_min_eig'] = choi_min
        row['cp'] = choi_min >= -tol * scale(phi.choi.full)
    if SweepCheck.POSITIVE in checks:
        verdict = certifier.block_positivity(phi.choi)
        row['seesaw_min'] = verdict.min_value
        row['positive'] = verdict.tag == VerdictTag.NO_VIOLATION_FOUND
    if SweepCheck.PPT in checks:
        row['ppt'] = ppt_classify(phi.choi, tol).tag == PptTag.POSITIVE_PPT
    return SweepRow(**row)


def _state_row(spec: StateFamilySpec, name: str, value: float, checks: set,
               certifier: BlockPositivityCertifier, tol: float) -> SweepRow:
    rho = make_state(_with_param(spec, name, value))
    row = {'param_name': name, 'param_value': value}
    if SweepCheck.PPT in checks:
        ppt = ppt_classify(rho, tol)
        row['choi_min_eig'] = ppt.min_eig_pt
        row['ppt'] = ppt.tag == PptTag.POSITIVE_PPT
    if SweepCheck.CP in checks:
        row['cp'] = min_eig(rho.full) >= -tol * scale(rho.full)
    if SweepCheck.POSITIVE in checks:
        verdict = certifier.block_positivity(rho)
        row['seesaw_min'] = verdict.min_value
        row['positive'] = verdict.tag == VerdictTag.NO_VIOLATION_FOUND
    return SweepRow(**row)


def sweep(spec: Union[MapFamilySpec, StateFamilySpec], param: str, values: Sequence[float],
          checks: Iterable[SweepCheck], cfg: Optional[CertifierConfig] = None,
          tol: float = None) -> List[SweepRow]:
    """
    One SweepRow per grid value, in grid order.
    For state families the choi_min_eig column holds lambda_min(rho^t2).
    """
    tol = config.DEFAULT_TOL if tol is None else tol
    values = list(values)
    if not values:
        raise ParamOutOfDomain("sweep grid is empty")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ParamOutOfDomain("sweep grid must be strictly increasing")
    checks = {SweepCheck(c) for c in checks}
    cfg = cfg or CertifierConfig()
    certifier = BlockPositivityCertifier(cfg.model_copy(update={'workers': 1}))
    row_fn = _map_row if isinstance(spec, MapFamilySpec) else _state_row

    def evaluate(value: float) -> SweepRow:
        return row_fn(spec, param, value, checks, certifier, tol)

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            rows = list(pool.map(evaluate, values))
    else:
        rows = [evaluate(v) for v in values]

    logger.info(f"✅ Sweep of {spec.label()} over {param}: {len(rows)} rows")
    return rows
