"""
Matrix file and sweep table persistence
JSON matrix files with [re, im] pairs and CSV sweep tables through pandas
"""
import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union

import numpy as np
import pandas as pd
from pydantic import ValidationError

from .errors import MalformedFile
from .models import BlockMatrix, LinearMapRep, MatrixFile, SweepRow

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = ["param", "value", "choi_min_eig", "seesaw_min", "cp", "positive", "ppt"]
FLOAT_FORMAT = "%.17g"


# ==================== MATRIX FILES ====================
def to_matrix_file(matrix: Union[np.ndarray, BlockMatrix], m: int, n: int, kind: str,
                   metadata: Optional[Dict[str, Any]] = None) -> MatrixFile:
    full = matrix.full if isinstance(matrix, BlockMatrix) else np.asarray(matrix, dtype=np.complex128)
    data = [(float(z.real), float(z.imag)) for z in full.reshape(-1)]
    return MatrixFile(m=m, n=n, kind=kind, data=data, metadata=metadata)


def dumps(matrix_file: MatrixFile) -> str:
    return json.dumps(matrix_file.model_dump(mode='json', exclude_none=True), sort_keys=True)


def write_matrix_file(path: Union[str, Path], matrix_file: MatrixFile) -> None:
    Path(path).write_text(dumps(matrix_file) + "\n", encoding="utf-8")
    logger.debug(f"Wrote {matrix_file.kind} file {path} ({matrix_file.m}x{matrix_file.n})")


def read_matrix_file(path: Union[str, Path], kinds: Optional[Sequence[str]] = None) -> MatrixFile:
    """Load and validate a matrix file, optionally restricting its kind"""
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        matrix_file = MatrixFile.model_validate(raw)
    except OSError as e:
        raise MalformedFile(f"cannot read {path}: {e}")
    except UnicodeDecodeError as e:
        raise MalformedFile(f"{path} is not UTF-8 text: {e}")
    except json.JSONDecodeError as e:
        raise MalformedFile(f"{path} is not valid JSON: {e}")
    except ValidationError as e:
        raise MalformedFile(f"{path} is not a valid matrix file: {e.errors()[0]['msg']}")
    if kinds is not None and matrix_file.kind not in kinds:
        raise MalformedFile(f"{path} has kind '{matrix_file.kind}', expected one of {list(kinds)}")
    return matrix_file


def entries(matrix_file: MatrixFile) -> np.ndarray:
    return np.array([complex(re, im) for re, im in matrix_file.data], dtype=np.complex128)


def block_from_file(matrix_file: MatrixFile) -> BlockMatrix:
    d = matrix_file.m * matrix_file.n
    if matrix_file.kind == "vector":
        raise MalformedFile("a vector file does not hold a block matrix")
    return BlockMatrix(m=matrix_file.m, n=matrix_file.n, full=entries(matrix_file).reshape(d, d))


def map_from_file(matrix_file: MatrixFile) -> LinearMapRep:
    label = (matrix_file.metadata or {}).get("label", "map")
    return LinearMapRep(m=matrix_file.m, n=matrix_file.n, choi=block_from_file(matrix_file), label=label)


def vector_from_file(matrix_file: MatrixFile) -> np.ndarray:
    if matrix_file.kind != "vector":
        raise MalformedFile(f"expected a vector file, got kind '{matrix_file.kind}'")
    return entries(matrix_file)


def map_file(phi: LinearMapRep, metadata: Optional[Dict[str, Any]] = None) -> MatrixFile:
    meta = {"label": phi.label}
    meta.update(metadata or {})
    return to_matrix_file(phi.choi, phi.m, phi.n, "map-choi", meta)


# ==================== SWEEP TABLES ====================
def _bool_cell(value: Optional[bool]) -> Optional[str]:
    return None if value is None else ("true" if value else "false")


def sweep_frame(rows: Iterable[SweepRow]) -> pd.DataFrame:
    records = [{
        "param": row.param_name,
        "value": row.param_value,
        "choi_min_eig": row.choi_min_eig,
        "seesaw_min": row.seesaw_min,
        "cp": _bool_cell(row.cp),
        "positive": _bool_cell(row.positive),
        "ppt": _bool_cell(row.ppt),
    } for row in rows]
    return pd.DataFrame.from_records(records, columns=SWEEP_COLUMNS)


def write_sweep_csv(rows: Iterable[SweepRow], path: Union[str, Path]) -> None:
    """17 significant digits, true/false booleans, empty cells for unrequested checks"""
    frame = sweep_frame(rows)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, na_rep="", lineterminator="\n")
    logger.info(f"✅ Sweep table written to {path} ({len(frame)} rows)")


def read_sweep_csv(path: Union[str, Path]) -> List[SweepRow]:
    try:
        frame = pd.read_csv(
            path,
            dtype={"param": str, "cp": str, "positive": str, "ppt": str},
            float_precision="round_trip",
        )
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise MalformedFile(f"cannot read sweep table {path}: {e}")
    if list(frame.columns) != SWEEP_COLUMNS:
        raise MalformedFile(f"{path} does not have the sweep header {','.join(SWEEP_COLUMNS)}")

    def number(value) -> Optional[float]:
        return None if pd.isna(value) else float(value)

    def flag(value) -> Optional[bool]:
        return None if pd.isna(value) else value == "true"

    return [
        SweepRow(
            param_name=rec["param"],
            param_value=float(rec["value"]),
            choi_min_eig=number(rec["choi_min_eig"]),
            seesaw_min=number(rec["seesaw_min"]),
            cp=flag(rec["cp"]),
            positive=flag(rec["positive"]),
            ppt=flag(rec["ppt"]),
        )
        for rec in frame.to_dict(orient="records")
    ]
