"""
posmaps command-line interface
Generation, construction, certification, detection and parameter sweeps over JSON matrix files
"""
import argparse
import json
import logging
import sys
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import ValidationError

from . import __version__, config
from .blockmat import ppt_classify
from .builders import (
    block_correspondence, classify_channel, cor23_separability, lemma21_build, thm31_build,
    thm41_build,
)
from .chanmap import (
    choi_eigenvalues, is_completely_positive, is_hermiticity_preserving, is_trace_preserving,
    make_family, normalize_tp, params_dict,
)
from .detector import detect, grid, sweep
from .errors import InputError, PosMapsError, UnknownFamily
from .matrix_io import (
    block_from_file, dumps, map_file, map_from_file, read_matrix_file, to_matrix_file,
    vector_from_file, write_matrix_file, write_sweep_csv,
)
from .models import (
    CertifierConfig, MapClass, MapFamily, MapFamilySpec, StateComponent, StateFamily,
    StateFamilySpec, SweepCheck,
)
from .numcore import min_eig
from .poscert import BlockPositivityCertifier
from .statezoo import make_state

logger = logging.getLogger(__name__)

STATE_KINDS = ("state", "block")
MAP_KINDS = ("map-choi",)


class _Parser(argparse.ArgumentParser):
    """Usage errors become InputError so they share the exit-code contract"""

    def error(self, message):
        raise InputError(message)


def _json_default(value):
    if isinstance(value, np.generic):
        return value.item()
    raise TypeError(f"{type(value).__name__} is not JSON serializable")


def emit(report: Dict[str, Any]) -> None:
    """Reports go to stdout as one JSON line"""
    print(json.dumps(report, sort_keys=True, default=_json_default))


def _certifier_config(args) -> CertifierConfig:
    return CertifierConfig(restarts=args.restarts, seed=args.seed, workers=args.workers)


def _family_spec(name: str, dim: int, params: Dict[str, float], components=None):
    """Resolve a family name against map families first, then state families"""
    key = name.upper()
    if key in MapFamily.__members__:
        return MapFamilySpec(family=MapFamily(key), dim=dim, params=params)
    if key in StateFamily.__members__:
        return StateFamilySpec(family=StateFamily(key), dim=dim, params=params, components=components)
    valid = ", ".join(f.value.lower() for f in list(MapFamily) + list(StateFamily))
    raise UnknownFamily(f"unknown family '{name}'; valid: {valid}")


def _load_components(paths: Optional[List[str]]) -> Optional[List[StateComponent]]:
    if not paths:
        return None
    components = []
    for path in paths:
        mf = read_matrix_file(path, STATE_KINDS)
        d = mf.m * mf.n
        matrix = np.array([complex(re, im) for re, im in mf.data]).reshape(d, d)
        weight = float((mf.metadata or {}).get("weight", 1.0))
        components.append(StateComponent(weight=weight, matrix=matrix))
    return components


# ==================== COMMANDS ====================
def cmd_gen(args) -> int:
    params = params_dict(args.param)
    spec = _family_spec(args.family, args.dim, params, _load_components(args.component))
    meta = {"family": spec.family.value, "params": params, "seed": args.seed}

    if isinstance(spec, MapFamilySpec):
        phi = make_family(spec)
        if args.normalize:
            phi = normalize_tp(phi, args.tol)
        out = map_file(phi, meta)
    else:
        rho = make_state(spec)
        kind = "block" if spec.family == StateFamily.FLIP else "state"
        out = to_matrix_file(rho, rho.m, rho.n, kind, meta)

    if args.output:
        write_matrix_file(args.output, out)
        emit({"written": args.output, "kind": out.kind, "m": out.m, "n": out.n})
    else:
        print(dumps(out))
    return 0


def cmd_build(args) -> int:
    A = block_from_file(read_matrix_file(args.input, STATE_KINDS + MAP_KINDS))
    report: Dict[str, Any] = {"method": args.method}

    if args.method == "lemma21":
        x = vector_from_file(read_matrix_file(args.purification, ("vector",))) if args.purification else None
        result = lemma21_build(A, x, args.tol, hermitian=args.hermitian)
        phi = result.map
        report.update({
            "reconstruction_error": result.reconstruction_error,
            "rank": result.rank,
            "completion_indices": result.completion_indices,
            "completely_positive": result.completely_positive,
            "trace_preserving": is_trace_preserving(phi, args.tol),
        })
    elif args.method == "thm31":
        result = thm31_build(A, args.tol)
        phi = result.map
        report.update({
            "choi_min_eig": result.choi_min_eig,
            "cotranspose_choi_min_eig": result.cotranspose_choi_min_eig,
            "trace_preserving": is_trace_preserving(phi, args.tol),
        })
    else:
        result = thm41_build(A, _certifier_config(args), args.tol)
        phi = result.map
        report.update({
            "diag_blocks_psd": result.diag_blocks_psd,
            "condition": result.condition_report.to_report(),
        })

    if args.output:
        write_matrix_file(args.output, map_file(phi, {"method": args.method}))
        report["written"] = args.output
    emit(report)
    return 0


def cmd_check(args) -> int:
    phi = map_from_file(read_matrix_file(args.input, MAP_KINDS))
    wanted = [flag for flag in ("cp", "positive", "tp", "hermitian") if getattr(args, flag)]
    wanted = wanted or ["cp", "positive", "tp", "hermitian"]
    report: Dict[str, Any] = {"map": phi.label}

    if "cp" in wanted:
        report["cp"] = is_completely_positive(phi, args.tol)
        report["choi_min_eig"] = min_eig(phi.choi.full) if is_hermiticity_preserving(phi) else None
    if "tp" in wanted:
        report["tp"] = is_trace_preserving(phi, args.tol)
    if "hermitian" in wanted:
        report["hermitian"] = is_hermiticity_preserving(phi)
    if "positive" in wanted:
        verdict = BlockPositivityCertifier(_certifier_config(args)).map_positivity(phi)
        report["positive"] = verdict.to_report()
    emit(report)
    return 0


def cmd_classify(args) -> int:
    mf = read_matrix_file(args.input)
    if mf.kind == "map-choi":
        phi = map_from_file(mf)
        result = BlockPositivityCertifier(_certifier_config(args)).classify_map(phi, args.tol)
        report = {
            "map": phi.label,
            "class": result.tag.value,
            "presumption": result.presumption,
            "choi_min_eig": result.choi_min_eig,
            "cotranspose_min_eig": result.cotranspose_min_eig,
            "decomposable": result.decomposable,
            "correspondence": block_correspondence(phi.choi, _certifier_config(args), args.tol).value,
        }
        if result.positivity is not None:
            report["positivity"] = result.positivity.to_report()
        if result.tag == MapClass.CP and is_trace_preserving(phi, args.tol):
            report["channel"] = classify_channel(phi, args.tol).value
    else:
        rho = block_from_file(mf)
        ppt = ppt_classify(rho, args.tol)
        report = {
            "ppt": ppt.tag.value,
            "min_eig": ppt.min_eig,
            "min_eig_pt": ppt.min_eig_pt,
            "separability": cor23_separability(rho, args.tol).value,
        }
    emit(report)
    return 0


def cmd_detect(args) -> int:
    rho = block_from_file(read_matrix_file(args.state, STATE_KINDS))
    phi = map_from_file(read_matrix_file(args.map, MAP_KINDS))
    report = detect(phi, rho, args.tol, state_id=args.state)
    emit(report.model_dump(mode='json'))
    return 0


def cmd_sweep(args) -> int:
    spec = _family_spec(args.family, args.dim, params_dict(args.fixed), _load_components(args.component))
    if args.check:
        names = [c.strip().lower() for c in args.check.split(",") if c.strip()]
        valid = [c.value for c in SweepCheck]
        if not names or any(c not in valid for c in names):
            raise InputError(f"--check takes a comma-separated subset of {','.join(valid)}")
        checks = [SweepCheck(c) for c in names]
    else:
        checks = [SweepCheck.CP, SweepCheck.POSITIVE] if isinstance(spec, MapFamilySpec) else [SweepCheck.PPT]
    values = grid(args.start, args.stop, args.step)
    rows = sweep(spec, args.param_name, values, checks, _certifier_config(args), args.tol)

    if args.csv:
        write_sweep_csv(rows, args.csv)
        emit({"rows": len(rows), "csv": args.csv})
    else:
        write_sweep_csv(rows, sys.stdout)
    return 0


def cmd_choi(args) -> int:
    phi = map_from_file(read_matrix_file(args.input, MAP_KINDS))
    if args.eigs:
        emit({"map": phi.label, "eigenvalues": [float(v) for v in choi_eigenvalues(phi)]})
    else:
        print(dumps(map_file(phi)))
    return 0


# ==================== PARSER ====================
def _add_common_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, help="Certifier seed")
    parser.add_argument("--tol", type=float, help="Relative tolerance")
    parser.add_argument("--restarts", type=int, help="See-saw restarts")
    parser.add_argument("--workers", type=int, help="Worker threads")
    parser.add_argument("--log-level", help="DEBUG, INFO, WARNING, ...")


def build_parser() -> argparse.ArgumentParser:
    # Common options are accepted before or after the subcommand; a value given after it wins
    common = _Parser(add_help=False, argument_default=argparse.SUPPRESS)
    _add_common_options(common)

    parser = _Parser(prog="posmaps", description="Positive maps from block matrices")
    parser.add_argument("--version", action="version", version=f"posmaps {__version__}")
    _add_common_options(parser)
    parser.set_defaults(seed=config.DEFAULT_SEED, tol=config.DEFAULT_TOL, restarts=config.DEFAULT_RESTARTS,
                        workers=config.DEFAULT_WORKERS, log_level=config.LOG_LEVEL)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("gen", help="Write a family member (map Choi matrix or state)", parents=[common])
    p.add_argument("--family", required=True)
    p.add_argument("--dim", type=int, default=3)
    p.add_argument("--param", action="append", default=[], metavar="NAME=VALUE")
    p.add_argument("--component", action="append", metavar="FILE", help="CQ / PRODUCT sub-state file")
    p.add_argument("--normalize", action="store_true", help="Rescale a map to be trace-preserving")
    p.add_argument("-o", "--output")
    p.set_defaults(handler=cmd_gen)

    p = sub.add_parser("build", help="Construct a map from a block matrix", parents=[common])
    p.add_argument("--method", required=True, choices=["lemma21", "thm31", "thm41"])
    p.add_argument("--input", required=True)
    p.add_argument("--purification", help="Vector file for lemma21")
    p.add_argument("--hermitian", action="store_true", help="lemma21 on a Hermitian (not PSD) input")
    p.add_argument("-o", "--output")
    p.set_defaults(handler=cmd_build)

    p = sub.add_parser("check", help="Certify properties of a map", parents=[common])
    p.add_argument("--input", required=True)
    for flag in ("cp", "positive", "tp", "hermitian"):
        p.add_argument(f"--{flag}", action="store_true")
    p.set_defaults(handler=cmd_check)

    p = sub.add_parser("classify", help="Classify a map (CP / PNCP / NOT_POSITIVE) or a state", parents=[common])
    p.add_argument("--input", required=True)
    p.set_defaults(handler=cmd_classify)

    p = sub.add_parser("detect", help="Apply id (x) Phi to a state", parents=[common])
    p.add_argument("--state", required=True)
    p.add_argument("--map", required=True)
    p.set_defaults(handler=cmd_detect)

    p = sub.add_parser("sweep", help="Parameter sweep to CSV", parents=[common])
    p.add_argument("--family", required=True)
    p.add_argument("--dim", type=int, default=3)
    p.add_argument("--param", dest="param_name", required=True, metavar="NAME")
    p.add_argument("--from", dest="start", type=float, required=True)
    p.add_argument("--to", dest="stop", type=float, required=True)
    p.add_argument("--step", type=float, required=True)
    p.add_argument("--check", help="Comma-separated subset of cp,positive,ppt")
    p.add_argument("--fixed", action="append", default=[], metavar="NAME=VALUE")
    p.add_argument("--component", action="append", metavar="FILE")
    p.add_argument("--csv")
    p.set_defaults(handler=cmd_sweep)

    p = sub.add_parser("choi", help="Print a map's Choi matrix or its spectrum", parents=[common])
    p.add_argument("--input", required=True)
    p.add_argument("--eigs", action="store_true")
    p.set_defaults(handler=cmd_choi)

    return parser


def _configure_logging(level: str) -> None:
    logging.basicConfig(
        level=getattr(logging, str(level).upper(), logging.WARNING),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
        force=True,
    )


def main(argv: Optional[List[str]] = None) -> int:
    """Run the CLI; returns 0 on success, 3 on input errors, 4 on precondition failures"""
    try:
        args = build_parser().parse_args(argv)
        _configure_logging(args.log_level)
        if getattr(args, "handler", None) is None:
            raise InputError("a command is required: gen, build, check, classify, detect, sweep, choi")
        return args.handler(args)
    except PosMapsError as e:
        emit({"error": type(e).__name__, "message": str(e)})
        return e.exit_code
    except ValidationError as e:
        emit({"error": "ValidationError", "message": str(e.errors()[0]['msg'])})
        return 3
    except json.JSONDecodeError as e:
        emit({"error": "JSONDecodeError", "message": str(e)})
        return 3


if __name__ == "__main__":
    sys.exit(main())
