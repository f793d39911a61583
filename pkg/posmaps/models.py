"""
Pydantic Models for matrices, maps, certifier reports and file formats
Compatible with Pydantic v2
"""
from enum import Enum
from typing import Any, Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from . import config


def frozen_array(value: Any, ndim: int, dtype=np.complex128) -> np.ndarray:
    """Copy to a read-only array of the given rank with finite entries"""
    arr = np.array(value, dtype=dtype)
    if arr.ndim != ndim:
        raise ValueError(f"expected a {ndim}-dimensional array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("array contains NaN or Inf entries")
    arr.flags.writeable = False
    return arr


class _ArrayModel(BaseModel):
    """Immutable model holding numpy arrays"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)


# ==================== ENUMERATIONS ====================
class PptTag(str, Enum):
    POSITIVE_PPT = "POSITIVE_PPT"
    POSITIVE_NPPT = "POSITIVE_NPPT"
    NOT_POSITIVE = "NOT_POSITIVE"


class MapFamily(str, Enum):
    PHI1 = "PHI1"
    PHI2 = "PHI2"
    PHI3 = "PHI3"
    PHI4 = "PHI4"
    REDUCTION = "REDUCTION"
    TRANSPOSE = "TRANSPOSE"
    TRACE_SIGMA = "TRACE_SIGMA"


class StateFamily(str, Enum):
    HORODECKI = "HORODECKI"
    WERNER = "WERNER"
    ISOTROPIC = "ISOTROPIC"
    FLIP = "FLIP"
    MAX_ENT = "MAX_ENT"
    CQ = "CQ"
    PRODUCT = "PRODUCT"


class SeparabilityTag(str, Enum):
    SEPARABLE = "SEPARABLE"
    PPT_ENTANGLED = "PPT_ENTANGLED"
    NPPT_ENTANGLED = "NPPT_ENTANGLED"
    PPT_UNDECIDED = "PPT_UNDECIDED"


class ClassificationSource(str, Enum):
    KNOWN_RANGE = "KNOWN_RANGE"
    PPT_TEST = "PPT_TEST"
    CONSTRUCTION = "CONSTRUCTION"


class VerdictTag(str, Enum):
    VIOLATION = "VIOLATION"
    NO_VIOLATION_FOUND = "NO_VIOLATION_FOUND"


class MapClass(str, Enum):
    CP = "CP"
    PNCP = "PNCP"
    NOT_POSITIVE = "NOT_POSITIVE"


class SeparabilityVerdict(str, Enum):
    SEPARABLE = "SEPARABLE"
    ENTANGLED = "ENTANGLED"
    INCONCLUSIVE = "INCONCLUSIVE"


class ChannelClass(str, Enum):
    UNITARY = "UNITARY"
    COMPLETELY_CONTRACTIVE = "COMPLETELY_CONTRACTIVE"
    EB = "EB"
    NOT_EB = "NOT_EB"
    INCONCLUSIVE = "INCONCLUSIVE"


class Correspondence(str, Enum):
    """Kind of map a Hermitian block matrix induces as a Choi matrix"""
    CP = "CP"
    DECOMPOSABLE = "DECOMPOSABLE"
    BLOCK_POSITIVE = "BLOCK_POSITIVE"
    NOT_POSITIVE = "NOT_POSITIVE"


class SweepCheck(str, Enum):
    CP = "cp"
    POSITIVE = "positive"
    PPT = "ppt"


# ==================== LINEAR ALGEBRA VALUES ====================
class EigResult(_ArrayModel):
    """Hermitian eigendecomposition, eigenvalues descending"""
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @field_validator('eigenvalues', mode='before')
    @classmethod
    def validate_eigenvalues(cls, v: Any) -> np.ndarray:
        return frozen_array(v, 1, dtype=np.float64)

    @field_validator('eigenvectors', mode='before')
    @classmethod
    def validate_eigenvectors(cls, v: Any) -> np.ndarray:
        return frozen_array(v, 2)

    @model_validator(mode='after')
    def validate_sizes(self):
        if self.eigenvectors.shape[1] != self.eigenvalues.shape[0]:
            raise ValueError("one eigenvector column per eigenvalue is required")
        if np.any(np.diff(self.eigenvalues) > 0):
            raise ValueError("eigenvalues must be sorted descending")
        return self


class BlockMatrix(_ArrayModel):
    """Element of M_m (x) M_n in the basis e_i (x) f_k, first factor major"""
    m: int = Field(..., ge=1, description="First-factor dimension")
    n: int = Field(..., ge=1, description="Second-factor dimension")
    full: np.ndarray

    @field_validator('full', mode='before')
    @classmethod
    def validate_full(cls, v: Any) -> np.ndarray:
        return frozen_array(v, 2)

    @model_validator(mode='after')
    def validate_shape(self):
        d = self.m * self.n
        if self.full.shape != (d, d):
            raise ValueError(f"full matrix must be {d}x{d}, got {self.full.shape}")
        return self

    @property
    def dim(self) -> int:
        return self.m * self.n

    def tensor(self) -> np.ndarray:
        """View as T[i, k, j, l] = <e_i f_k| A |e_j f_l>"""
        return self.full.reshape(self.m, self.n, self.m, self.n)


class PptClass(BaseModel):
    """PPT classification of a Hermitian block matrix"""
    tag: PptTag
    min_eig: float
    min_eig_pt: float
    threshold: float = Field(..., ge=0, description="Scaled tolerance tol*max(1,||A||_F)")

    @model_validator(mode='after')
    def validate_tag(self):
        if self.tag == PptTag.POSITIVE_NPPT:
            if self.min_eig < -self.threshold or self.min_eig_pt >= -self.threshold:
                raise ValueError("POSITIVE_NPPT requires min_eig >= -tol and min_eig_pt < -tol")
        return self


class SchmidtForm(_ArrayModel):
    """Schmidt decomposition x = sum_i lambda_i e_i (x) f_i"""
    coefficients: np.ndarray
    left_vectors: np.ndarray
    right_vectors: np.ndarray
    rank: int = Field(..., ge=1)

    @field_validator('coefficients', mode='before')
    @classmethod
    def validate_coefficients(cls, v: Any) -> np.ndarray:
        return frozen_array(v, 1, dtype=np.float64)

    @field_validator('left_vectors', 'right_vectors', mode='before')
    @classmethod
    def validate_vectors(cls, v: Any) -> np.ndarray:
        return frozen_array(v, 2)

    @model_validator(mode='after')
    def validate_rank(self):
        r = self.rank
        if self.coefficients.shape != (r,):
            raise ValueError("one coefficient per Schmidt term is required")
        if self.left_vectors.shape[1] != r or self.right_vectors.shape[1] != r:
            raise ValueError("one left and one right vector per Schmidt term is required")
        if r > min(self.left_vectors.shape[0], self.right_vectors.shape[0]):
            raise ValueError("Schmidt rank exceeds min(m, n)")
        if np.any(self.coefficients <= 0):
            raise ValueError("Schmidt coefficients must be positive")
        return self

    def vector(self) -> np.ndarray:
        """Reassemble the bipartite vector"""
        coeffs = self.left_vectors * self.coefficients
        return (coeffs @ self.right_vectors.T).reshape(-1)


class LinearMapRep(_ArrayModel):
    """Linear map M_m -> M_n stored by its Choi matrix sum_ij E_ij (x) Phi(E_ij)"""
    m: int = Field(..., ge=1, description="Input dimension")
    n: int = Field(..., ge=1, description="Output dimension")
    choi: BlockMatrix
    label: str = Field("map", description="Human-readable descriptor")

    @model_validator(mode='after')
    def validate_dims(self):
        if (self.choi.m, self.choi.n) != (self.m, self.n):
            raise ValueError("Choi matrix factor dimensions must equal (m, n)")
        return self


# ==================== FAMILY SPECIFICATIONS ====================
class MapFamilySpec(BaseModel):
    """Named map family with its parameters (a | x | y | w1..wm)"""
    family: MapFamily
    dim: int = Field(3, ge=2, description="Input dimension m")
    params: Dict[str, float] = Field(default_factory=dict)

    def label(self) -> str:
        args = ",".join(f"{k}={v:g}" for k, v in sorted(self.params.items()))
        return f"{self.family.value.lower()}[m={self.dim}{',' if args else ''}{args}]"


class StateComponent(_ArrayModel):
    """Weighted sub-state for CQ / PRODUCT families"""
    weight: float = Field(1.0, ge=0)
    matrix: np.ndarray

    @field_validator('matrix', mode='before')
    @classmethod
    def validate_matrix(cls, v: Any) -> np.ndarray:
        return frozen_array(v, 2)


class StateFamilySpec(BaseModel):
    """Named state family with parameters and optional components"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    family: StateFamily
    dim: int = Field(3, ge=2, description="First-factor dimension m")
    params: Dict[str, float] = Field(default_factory=dict)
    components: Optional[List[StateComponent]] = None

    def label(self) -> str:
        args = ",".join(f"{k}={v:g}" for k, v in sorted(self.params.items()))
        return f"{self.family.value.lower()}[m={self.dim}{',' if args else ''}{args}]"


class StateClassification(BaseModel):
    tag: SeparabilityTag
    source: ClassificationSource


# ==================== CERTIFIER ====================
class CertifierConfig(BaseModel):
    """See-saw block-positivity certifier settings"""
    restarts: int = Field(default_factory=lambda: config.DEFAULT_RESTARTS, ge=1)
    max_iters: int = Field(default_factory=lambda: config.DEFAULT_MAX_ITERS, ge=1)
    convergence_tol: float = Field(default_factory=lambda: config.DEFAULT_CONVERGENCE_TOL, gt=0)
    violation_threshold: float = Field(default_factory=lambda: config.DEFAULT_VIOLATION_THRESHOLD, gt=0)
    seed: int = Field(default_factory=lambda: config.DEFAULT_SEED)
    workers: int = Field(default_factory=lambda: config.DEFAULT_WORKERS, ge=1)


class PositivityVerdict(_ArrayModel):
    """
    Outcome of the see-saw search.
    NO_VIOLATION_FOUND is a bounded-search presumption, not a proof.
    """
    tag: VerdictTag
    min_value: float = Field(..., description="Smallest <u(x)v|C|u(x)v> found")
    threshold: float = Field(..., ge=0, description="Scaled violation threshold")
    witness_u: Optional[np.ndarray] = None
    witness_v: Optional[np.ndarray] = None
    restarts_run: int = Field(..., ge=0)
    iterations_total: int = Field(..., ge=0)
    monotone: bool = Field(True, description="Objective never increased across half-steps")
    output_min_eig: Optional[float] = Field(None, description="lambda_min Phi(|conj u><conj u|) on violation")

    @field_validator('witness_u', 'witness_v', mode='before')
    @classmethod
    def validate_witness(cls, v: Any) -> Optional[np.ndarray]:
        return None if v is None else frozen_array(v, 1)

    @model_validator(mode='after')
    def validate_violation(self):
        if self.tag == VerdictTag.VIOLATION:
            if self.witness_u is None or self.witness_v is None:
                raise ValueError("VIOLATION requires witness vectors")
            if not self.min_value < -self.threshold:
                raise ValueError("VIOLATION requires min_value below the threshold")
        return self

    def to_report(self) -> Dict[str, Any]:
        report = {
            'verdict': self.tag.value,
            'presumption': self.tag == VerdictTag.NO_VIOLATION_FOUND,
            'min_value': float(self.min_value),
            'threshold': float(self.threshold),
            'restarts_run': self.restarts_run,
            'iterations_total': self.iterations_total,
            'monotone': self.monotone,
        }
        if self.tag == VerdictTag.VIOLATION:
            report['witness_u'] = [[float(z.real), float(z.imag)] for z in self.witness_u]
            report['witness_v'] = [[float(z.real), float(z.imag)] for z in self.witness_v]
        if self.output_min_eig is not None:
            report['output_min_eig'] = float(self.output_min_eig)
        return report


class MapClassification(BaseModel):
    """CP / PNCP / NOT_POSITIVE with certificates"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    tag: MapClass
    choi_min_eig: float
    cotranspose_min_eig: float = Field(..., description="lambda_min of choi^{t1}, the Phi o tau Choi matrix")
    decomposable: bool = Field(..., description="Transpose-type decomposability certificate holds")
    positivity: Optional[PositivityVerdict] = None

    @property
    def presumption(self) -> bool:
        return self.tag == MapClass.PNCP


# ==================== CONSTRUCTION RESULTS ====================
class Lemma21Result(_ArrayModel):
    """Channel Lambda with A = (id (x) Lambda)|x><x|"""
    map: LinearMapRep
    purification: np.ndarray
    reconstruction_error: float = Field(..., ge=0)
    completion_indices: List[int] = Field(default_factory=list)
    rank: int = Field(..., ge=1)
    completely_positive: bool = True

    @field_validator('purification', mode='before')
    @classmethod
    def validate_purification(cls, v: Any) -> np.ndarray:
        return frozen_array(v, 1)


class Thm31Result(BaseModel):
    """Trace-preserving decomposable PNCP map from an NPPT matrix"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    map: LinearMapRep
    cotranspose_choi_min_eig: float
    choi_min_eig: float


class Thm41Result(BaseModel):
    """PNCP map whose Choi matrix is the input block-positive matrix"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    map: LinearMapRep
    condition_report: PositivityVerdict
    diag_blocks_psd: bool


# ==================== DETECTION ====================
class DetectionReport(BaseModel):
    min_eig: float
    detected: bool
    map_id: str
    state_id: str
    threshold: float = Field(..., ge=0)

    @model_validator(mode='after')
    def validate_detected(self):
        if self.detected != (self.min_eig < -self.threshold):
            raise ValueError("detected must equal min_eig < -threshold")
        return self


class SweepRow(BaseModel):
    """One grid point of a parameter sweep; None marks an unrequested check"""
    param_name: str
    param_value: float
    choi_min_eig: Optional[float] = None
    seesaw_min: Optional[float] = None
    cp: Optional[bool] = None
    positive: Optional[bool] = None
    ppt: Optional[bool] = None


# ==================== FILE FORMAT ====================
MatrixKind = Literal["state", "block", "map-choi", "vector"]


class MatrixFile(BaseModel):
    """JSON matrix interchange: entries as [re, im] pairs, row-major"""
    m: int = Field(..., ge=1)
    n: int = Field(..., ge=1)
    kind: MatrixKind
    data: List[Tuple[float, float]]
    metadata: Optional[Dict[str, Any]] = None

    @model_validator(mode='after')
    def validate_data(self):
        d = self.m * self.n
        expected = d if self.kind == "vector" else d * d
        if len(self.data) != expected:
            raise ValueError(f"data must hold {expected} entries for kind '{self.kind}', got {len(self.data)}")
        if not all(np.isfinite(re) and np.isfinite(im) for re, im in self.data):
            raise ValueError("data contains NaN or Inf entries")
        return self
