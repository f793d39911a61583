"""
Exception hierarchy
Every error carries the CLI exit code it maps to
"""
from typing import Optional

import numpy as np


class PosMapsError(ValueError):
    """Base class for all posmaps errors"""
    exit_code = 3


class InputError(PosMapsError):
    """Malformed or out-of-domain input (exit 3)"""
    exit_code = 3


class PreconditionError(PosMapsError):
    """Input is well formed but violates a method precondition (exit 4)"""
    exit_code = 4


# ==================== INPUT ERRORS ====================
class NotSquare(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class ShapeMismatch(InputError):
    pass


class IndexOutOfRange(InputError):
    pass


class ZeroVector(InputError):
    pass


class UnknownFamily(InputError):
    pass


class MissingParam(InputError):
    pass


class ParamOutOfDomain(InputError):
    pass


class MalformedFile(InputError):
    pass


# ==================== PRECONDITION ERRORS ====================
class NotHermitian(PreconditionError):
    pass


class NotUnitary(PreconditionError):
    pass


class NotPsd(PreconditionError):
    pass


class ZeroMatrix(PreconditionError):
    pass


class PurificationMismatch(PreconditionError):
    pass


class InputIsPpt(PreconditionError):
    """Decomposable construction on a PPT input would give a CP map"""


class IsPsd(PreconditionError):
    """Hermitian input is PSD, so its map is CP rather than PNCP"""


class DiagBlockNotPsd(PreconditionError):
    def __init__(self, message: str, index: int):
        super().__init__(message)
        self.index = index


class ConditionViolated(PreconditionError):
    """Block-positivity condition fails at a concrete witness"""

    def __init__(self, message: str, witness_u: np.ndarray, min_eigenvalue: float,
                 witness_v: Optional[np.ndarray] = None):
        super().__init__(message)
        self.witness_u = witness_u
        self.witness_v = witness_v
        self.min_eigenvalue = min_eigenvalue


class MapIsCp(PreconditionError):
    pass


class NotCp(PreconditionError):
    pass


class NotTp(PreconditionError):
    pass


class NotHermitianPreserving(PreconditionError):
    pass
