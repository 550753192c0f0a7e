"""Command-line surface: config ingestion, dispatch, JSON report emission.

Every command prints a single JSON report to standard output (and to
--out when given, written atomically).  Reports embed the config hash,
prime, precision, and library version, and are byte-identical across runs
of the same config and seed.

Exit codes: 0 computed and all asserted properties passed; 1 computed but a
checked property or verdict failed (for example a broken compatibility
check); 2 malformed input or a domain error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

from . import __version__
from .padic import (
    DomainError,
    PadicError,
    PadicNumber,
    arithmetic,
    in_exp_domain,
    padic_exp,
    padic_log,
)
from .config import RunConfig, parse_rational
from .model import (
    check_compatibility,
    finite_volume_measure,
    measure_norm_profile,
    transition_matrix,
)
from .recursion import translation_invariant_solve, uniqueness_conditions
from .ising import gibbs_report, ising_uniqueness_check
from .tree import default_path_window, format_address

COMMANDS = ("norm", "exp", "log", "solve-field", "ti-solve", "measure",
            "compat", "uniqueness", "marginal", "norm-profile", "ising-report")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="padic-gibbs",
        description="Exact p-adic Gibbs measures on Cayley trees",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        cmd = sub.add_parser(name)
        cmd.add_argument("--config", help="path to a JSON model config")
        cmd.add_argument("--p", type=int, help="prime modulus")
        cmd.add_argument("--precision", type=int, help="working digits")
        cmd.add_argument("--k", type=int, help="tree order")
        cmd.add_argument("--depth", type=int, help="slice depth / window cap")
        cmd.add_argument("--normalization", choices=("row", "literal"))
        cmd.add_argument("--seed", type=int, help="seed recorded in the report")
        cmd.add_argument("--out", help="also write the report to this path")
        if name in ("norm", "exp", "log"):
            cmd.add_argument("--rational", required=True,
                             help="exact value as num/den")
        if name == "measure":
            cmd.add_argument("--config-index", type=int,
                             help="emit only this configuration's weight")
    return parser


def _load_config(args) -> RunConfig:
    data: dict = {}
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    for key in ("p", "precision", "k", "depth", "normalization", "seed"):
        value = getattr(args, key, None)
        if value is not None:
            data[key] = value
    if "p" not in data:
        raise DomainError("a prime must be given via --p or the config")
    return RunConfig.from_dict(data)


def _emit(report: dict, out_path: str | None) -> None:
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    sys.stdout.write(text)
    if out_path:
        directory = os.path.dirname(os.path.abspath(out_path))
        fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(text)
            os.replace(tmp, out_path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise


def _scalar_argument(args, cfg: RunConfig) -> PadicNumber:
    fr = parse_rational(args.rational)
    return PadicNumber.from_rational(fr.numerator, fr.denominator,
                                     cfg.p, cfg.precision)


def _cmd_norm(args, cfg):
    x = _scalar_argument(args, cfg)
    nv = x.norm()
    return {
        "rational": args.rational,
        "is_zero": x.is_zero,
        "norm_exponent": None if nv.is_zero else -nv.exponent,
    }, 0


def _cmd_exp(args, cfg):
    x = _scalar_argument(args, cfg)
    return {"argument": args.rational, "value": padic_exp(x).to_dict()}, 0


def _cmd_log(args, cfg):
    x = _scalar_argument(args, cfg)
    return {"argument": args.rational, "value": padic_log(x).to_dict()}, 0


def _cmd_solve_field(args, cfg):
    slice_ = cfg.build_slice()
    lam = cfg.build_lambda(slice_)
    field = cfg.build_field(lam, slice_)
    return {"field": field.to_dict()}, 0


def _cmd_ti_solve(args, cfg):
    slice_ = cfg.build_slice()
    lam = cfg.build_lambda(slice_)
    solution = translation_invariant_solve(lam, cfg.k)
    one = PadicNumber.one(cfg.p, cfg.precision)
    gap = solution.z - one if solution.z != one else None
    result = solution.to_dict()
    result["distance_from_one_exponent"] = None if gap is None else gap.valuation
    ok = gap is None or gap.valuation >= 1
    return result, 0 if ok else 1


def _cmd_measure(args, cfg):
    slice_ = cfg.build_slice()
    lam = cfg.build_lambda(slice_)
    field = cfg.build_field(lam, slice_)
    measure = finite_volume_measure(cfg.depth, lam, field, slice_,
                                    cfg.caps["enumeration_log2"])
    result = {
        "depth": measure.depth,
        "vertex_count": measure.vertex_count,
        "partition_function": measure.partition_function.to_dict(),
        "boundary_field": {format_address(a): v.to_dict()
                           for a, v in measure.boundary_field_used.items()},
    }
    index = getattr(args, "config_index", None)
    if index is not None:
        if not 0 <= index < len(measure.weights):
            raise DomainError(f"configuration index {index} out of range")
        result["weight"] = measure.weights[index].to_dict()
        result["config_index"] = index
    elif measure.vertex_count <= 12:
        result["weights"] = [w.to_dict() for w in measure.weights]
    else:
        exps = [w.valuation for w in measure.weights]
        result["weight_norm_exponents"] = {"min": min(exps), "max": max(exps)}
    total_ok = measure.total_weight() == PadicNumber.one(cfg.p, cfg.precision)
    result["weights_sum_to_one"] = total_ok
    return result, 0 if total_ok else 1


def _cmd_compat(args, cfg):
    slice_ = cfg.build_slice()
    lam = cfg.build_lambda(slice_)
    field = cfg.build_field(lam, slice_)
    results = {}
    all_ok = True
    for m in range(1, cfg.depth + 1):
        res = check_compatibility(m, lam, field, slice_, cfg.caps["enumeration_log2"])
        results[str(m)] = res.to_dict()
        all_ok = all_ok and res.passed
    return {"pairs": results, "passed": all_ok}, 0 if all_ok else 1


def _cmd_uniqueness(args, cfg):
    ising = cfg.build_ising()
    if ising is not None:
        verdict = ising_uniqueness_check(ising)
        return verdict.to_dict(), 0 if verdict.unique else 1
    slice_ = cfg.build_slice()
    lam = cfg.build_lambda(slice_)
    verdict = uniqueness_conditions(lam)
    return verdict.to_dict(), 0 if verdict.holds else 1


def _cmd_marginal(args, cfg):
    slice_ = cfg.build_slice()
    lam = cfg.build_lambda(slice_)
    field = cfg.build_field(lam, slice_)
    window_max = cfg.depth if lam.mode == "per_edge" else max(cfg.depth, 1)
    windows = {}
    previous = None
    increasing = True
    for n in range(1, window_max + 1):
        window = default_path_window(n)
        matrices = [transition_matrix(pair, lam, field, cfg.normalization)
                    for pair in zip(window, window[1:])]
        from .model import stationary_vector
        pi = stationary_vector(transition_matrix((window[0], window[1]),
                                                 lam, field, "row"))
        best = None
        for bits in range(1 << len(window)):
            v = pi[0].valuation if bits & 1 else pi[1].valuation
            for i, mat in enumerate(matrices):
                u = 1 if (bits >> i) & 1 else -1
                w = 1 if (bits >> (i + 1)) & 1 else -1
                v += mat.entry(u, w).valuation
            if best is None or v < best:
                best = v
        windows[str(n)] = {"max_norm_exponent": best}
        if previous is not None and best >= previous:
            increasing = False
        previous = best
    return {"normalization": cfg.normalization, "windows": windows,
            "max_norm_strictly_increasing": increasing}, 0


def _cmd_norm_profile(args, cfg):
    slice_ = cfg.build_slice()
    lam = cfg.build_lambda(slice_)
    field = cfg.build_field(lam, slice_)
    window_max = cfg.depth if lam.mode == "per_edge" else 5
    profile = measure_norm_profile(lam, field, slice_, cfg.depth,
                                   window_max=window_max,
                                   normalization=cfg.normalization,
                                   enum_cap_log2=cfg.caps["enumeration_log2"])
    if cfg.p != 2:
        ok = all(lo == 0 == hi for lo, hi in profile.weight_norm_exponents.values())
    else:
        ok = (profile.factor_max_entry_exponent <= -2
              and bool(profile.marginal_strictly_increasing))
    return profile.to_dict(), 0 if ok else 1


def _cmd_ising_report(args, cfg):
    ising = cfg.build_ising()
    if ising is None:
        raise DomainError("ising-report needs an ising block in the config")
    report = gibbs_report(ising, cfg.k, cfg.depth,
                          normalization=cfg.normalization,
                          vertex_cap=cfg.caps["vertices"],
                          enum_cap_log2=cfg.caps["enumeration_log2"])
    return report.to_dict(), 0 if report.ok else 1


_HANDLERS = {
    "norm": _cmd_norm,
    "exp": _cmd_exp,
    "log": _cmd_log,
    "solve-field": _cmd_solve_field,
    "ti-solve": _cmd_ti_solve,
    "measure": _cmd_measure,
    "compat": _cmd_compat,
    "uniqueness": _cmd_uniqueness,
    "marginal": _cmd_marginal,
    "norm-profile": _cmd_norm_profile,
    "ising-report": _cmd_ising_report,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    out_path = getattr(args, "out", None)
    try:
        cfg = _load_config(args)
        result, status = _HANDLERS[args.command](args, cfg)
        report = {
            "command": args.command,
            "config_hash": cfg.config_hash(),
            "library_version": __version__,
            "p": cfg.p,
            "precision": cfg.precision,
            "seed": cfg.seed,
            "result": result,
        }
        _emit(report, out_path)
        return status
    except (PadicError, OSError, json.JSONDecodeError, KeyError, ValueError) as err:
        report = {
            "command": args.command,
            "library_version": __version__,
            "error": {"type": type(err).__name__, "message": str(err)},
        }
        _emit(report, out_path)
        return 2


if __name__ == "__main__":
    sys.exit(main())
