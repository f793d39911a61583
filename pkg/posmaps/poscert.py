"""
Block-Positivity Certification Service
See-saw minimization of <u(x)v| C |u(x)v> over product vectors with seeded restarts
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional

import numpy as np

from . import config
from .blockmat import partial_transpose
from .chanmap import apply, is_hermiticity_preserving
from .errors import NotHermitianPreserving
from .models import (
    BlockMatrix, CertifierConfig, LinearMapRep, MapClass, MapClassification,
    PositivityVerdict, VerdictTag,
)
from .numcore import hermitian_part, min_eig, random_unit_vector, scale

logger = logging.getLogger(__name__)


def product_value(C: BlockMatrix, u: np.ndarray, v: np.ndarray) -> float:
    """<u(x)v| C |u(x)v>"""
    w = np.kron(u, v)
    return float(np.vdot(w, C.full @ w).real)


def _min_eigvec(H: np.ndarray):
    values, vectors = np.linalg.eigh((H + H.conj().T) / 2)
    return float(values[0]), vectors[:, 0]


class BlockPositivityCertifier:
    """
    Searches for a product vector with negative expectation value.
    A VIOLATION carries a checkable witness; NO_VIOLATION_FOUND is only a presumption.
    """

    def __init__(self, cfg: Optional[CertifierConfig] = None):
        self.cfg = cfg or CertifierConfig()

    # ==================== SEE-SAW CORE ====================
    def _restart(self, T: np.ndarray, seed: np.random.SeedSequence, ref: float) -> Dict:
        """One descent from a random start; each half-step is an exact minimization"""
        cfg = self.cfg
        m = T.shape[0]
        rng = np.random.default_rng(seed)

        u = random_unit_vector(m, rng)
        value, v = _min_eigvec(np.einsum('i,ikjl,j->kl', u.conj(), T, u))
        history = [value]
        iterations = 0

        for _ in range(cfg.max_iters):
            iterations += 1
            value_u, u = _min_eigvec(np.einsum('k,ikjl,l->ij', v.conj(), T, v))
            value_v, v = _min_eigvec(np.einsum('i,ikjl,j->kl', u.conj(), T, u))
            history.extend([value_u, value_v])
            if history[-3] - value_v < cfg.convergence_tol * ref:
                break

        monotone = bool(np.all(np.diff(history) <= 1e-12 * ref))
        return {
            'value': history[-1],
            'u': u,
            'v': v,
            'iterations': iterations,
            'history': history,
            'monotone': monotone,
        }

    def search(self, C: BlockMatrix) -> List[Dict]:
        """Run every restart; results are ordered by restart index"""
        Cs = hermitian_part(C.full)
        T = Cs.reshape(C.m, C.n, C.m, C.n)
        ref = scale(Cs)
        seeds = np.random.SeedSequence(self.cfg.seed).spawn(self.cfg.restarts)

        if self.cfg.workers > 1:
            with ThreadPoolExecutor(max_workers=self.cfg.workers) as pool:
                runs = list(pool.map(lambda s: self._restart(T, s, ref), seeds))
        else:
            runs = [self._restart(T, s, ref) for s in seeds]

        for index, run in enumerate(runs):
            logger.debug(f"restart {index}: {run['iterations']} iterations, "
                         f"min {run['value']:.6e}, trace {run['history'][:4]}...")
        return runs

    # ==================== PUBLIC API ====================
    def block_positivity(self, C: BlockMatrix) -> PositivityVerdict:
        """Minimize <u(x)v|C|u(x)v> and report a violation or a bounded-search presumption"""
        runs = self.search(C)

        best = runs[0]
        for run in runs[1:]:
            if run['value'] < best['value']:
                best = run

        threshold = self.cfg.violation_threshold * scale(C.full)
        u, v = best['u'], best['v']
        min_value = product_value(C, u, v)
        violated = min_value < -threshold
        verdict = PositivityVerdict(
            tag=VerdictTag.VIOLATION if violated else VerdictTag.NO_VIOLATION_FOUND,
            min_value=min_value,
            threshold=threshold,
            witness_u=u if violated else None,
            witness_v=v if violated else None,
            restarts_run=len(runs),
            iterations_total=sum(run['iterations'] for run in runs),
            monotone=all(run['monotone'] for run in runs),
        )

        if violated:
            logger.info(f"⚠️ Block positivity violated: min {min_value:.6e} < -{threshold:.1e}")
        else:
            logger.info(f"✅ No violation found over {len(runs)} restarts (min {min_value:.6e})")
        return verdict

    def map_positivity(self, phi: LinearMapRep) -> PositivityVerdict:
        """Positivity of phi via block-positivity of its Choi matrix"""
        if not is_hermiticity_preserving(phi):
            raise NotHermitianPreserving(f"{phi.label} is not Hermiticity-preserving")
        verdict = self.block_positivity(phi.choi)
        if verdict.tag == VerdictTag.VIOLATION:
            # <u(x)v|C|u(x)v> = <v|Phi(|conj u><conj u|)|v>
            u_bar = verdict.witness_u.conj()
            output = apply(phi, np.outer(u_bar, u_bar.conj()))
            verdict = verdict.model_copy(update={'output_min_eig': min_eig(output)})
        return verdict

    def classify_map(self, phi: LinearMapRep, tol: float = None) -> MapClassification:
        """CP if the Choi matrix is PSD, else PNCP or NOT_POSITIVE by the see-saw search"""
        tol = config.DEFAULT_TOL if tol is None else tol
        if not is_hermiticity_preserving(phi):
            raise NotHermitianPreserving(f"{phi.label} is not Hermiticity-preserving")

        threshold = tol * scale(phi.choi.full)
        choi_min = min_eig(phi.choi.full)
        cotranspose_min = min_eig(partial_transpose(phi.choi, 1).full)
        decomposable = cotranspose_min >= -threshold

        if choi_min >= -threshold:
            return MapClassification(tag=MapClass.CP, choi_min_eig=choi_min,
                                     cotranspose_min_eig=cotranspose_min, decomposable=decomposable)

        verdict = self.map_positivity(phi)
        tag = MapClass.PNCP if verdict.tag == VerdictTag.NO_VIOLATION_FOUND else MapClass.NOT_POSITIVE
        logger.info(f"{phi.label} classified {tag.value}")
        return MapClassification(tag=tag, choi_min_eig=choi_min, cotranspose_min_eig=cotranspose_min,
                                 decomposable=decomposable, positivity=verdict)


# Global instance with environment defaults
certifier = BlockPositivityCertifier()


def _service(cfg: Optional[CertifierConfig]) -> BlockPositivityCertifier:
    return certifier if cfg is None else BlockPositivityCertifier(cfg)


def block_positivity(C: BlockMatrix, cfg: Optional[CertifierConfig] = None) -> PositivityVerdict:
    return _service(cfg).block_positivity(C)


def map_positivity(phi: LinearMapRep, cfg: Optional[CertifierConfig] = None) -> PositivityVerdict:
    return _service(cfg).map_positivity(phi)


def classify_map(phi: LinearMapRep, cfg: Optional[CertifierConfig] = None,
                 tol: float = None) -> MapClassification:
    return _service(cfg).classify_map(phi, tol)
