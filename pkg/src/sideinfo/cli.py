"""Command-line surface: every operation scriptable with machine-readable reports.

One JSON report per run on standard output (sorted keys, compact
separators, so identical inputs give byte-identical bytes).  Exit codes
follow a CI-friendly contract:

    0   success (for find-violation, whether or not a witness exists)
    2   audit-dpa found at least one violation witness
    3   directed-info --conservation residual above tolerance
    64  usage error
    65  data or schema error
    70  internal numeric failure

`--pretty` renders a human table instead of the JSON document and is never
parsed by tests.  `SIDEINFO_SEED` supplies the default seed.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import causality, losses, modelio, prob, sufficiency
from .benefit import benefit as compute_benefit
from .benefit import conditional_benefit, g_normalized
from .errors import (
    NotProper,
    SideinfoError,
    UnboundedBelow,
)

EXIT_OK = 0
EXIT_WITNESS = 2
EXIT_CONSERVATION = 3
EXIT_USAGE = 64
EXIT_DATA = 65
EXIT_NUMERIC = 70


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # route argparse failures to exit code 64
        raise _UsageError(message)


def _digest(path: str) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _default_seed() -> int:
    return int(os.environ.get("SIDEINFO_SEED", "0"))


def _load_kind(path: str, kinds: tuple[str, ...]):
    mf = modelio.parse_model(path)
    if mf.kind not in kinds:
        raise modelio.SchemaError(f"{path}: expected kind in {kinds}, got {mf.kind!r}")
    return mf.payload


def _resolve_loss(args, n: int) -> losses.LossSpec:
    if getattr(args, "builtin", None):
        return losses.builtin_loss(args.builtin, n)
    l = _load_kind(args.loss, ("loss",))
    fam = losses.reinstantiate(l, n)
    if fam is not None:
        return fam
    size = losses.loss_alphabet_size(l)
    if size is not None and size != n:
        raise modelio.ValidationError(
            f"loss is for {size} symbols but the joint has {n}", field="loss"
        )
    return l


def _loss_args(args) -> dict:
    if getattr(args, "builtin", None):
        return {"builtin": args.builtin}
    return {"loss": args.loss}


def _witness_doc(w: sufficiency.ViolationWitness) -> dict:
    return {
        "kind": w.kind,
        "c_before": w.c_before,
        "c_after": w.c_after,
        "transform": [v + 1 for v in w.transform.mapping],
        "joint": modelio.serialize_model(w.joint),
    }


def _emit(report: dict, pretty: bool) -> None:
    if pretty:
        _emit_pretty(report)
        return
    sys.stdout.write(json.dumps(report, sort_keys=True, separators=(",", ":")) + "\n")


def _emit_pretty(report: dict, indent: int = 0) -> None:
    pad = "  " * indent
    for key in sorted(report):
        value = report[key]
        if isinstance(value, dict):
            sys.stdout.write(f"{pad}{key}:\n")
            _emit_pretty(value, indent + 1)
        elif isinstance(value, list):
            sys.stdout.write(f"{pad}{key}: {json.dumps(value)}\n")
        else:
            sys.stdout.write(f"{pad}{key}: {value}\n")


def _build_parser() -> _Parser:
    p = _Parser(prog="sideinfo", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="cmd", required=True)

    def add_loss_flags(sp):
        grp = sp.add_mutually_exclusive_group(required=True)
        grp.add_argument("--loss", help="loss model file")
        grp.add_argument("--builtin", help="built-in loss name (log, zero-one, brier, spherical, absolute-ordered)")

    sp = sub.add_parser("benefit", help="benefit of side information C(loss, joint)")
    sp.add_argument("--joint", required=True)
    add_loss_flags(sp)
    sp.add_argument("--cond-w", action="store_true", help="joint file is 3-axis; condition on W")
    sp.add_argument("--scale", type=float, default=1.0,
                    help="report-level multiplier on the computed values (units only)")
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--pretty", action="store_true")

    sp = sub.add_parser("audit-dpa", help="audit the data processing requirement")
    sp.add_argument("--joint", required=True)
    add_loss_flags(sp)
    sp.add_argument("--tol", type=float, default=1e-9)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--pretty", action="store_true")

    sp = sub.add_parser("find-violation", help="scan for a data-processing violation")
    add_loss_flags(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--budget", type=int, default=10_000)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--tol", type=float, default=1e-9)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--pretty", action="store_true")

    sp = sub.add_parser("scoring-rule", help="evaluate a Savage-constructed proper scoring rule")
    grp = sp.add_mutually_exclusive_group(required=True)
    grp.add_argument("--g", help="named convex function: neg-entropy or sum-squares")
    grp.add_argument("--g-file", help="loss model file; G is its normalized Bayes envelope")
    sp.add_argument("--eval", nargs=2, metavar=("X", "Q"), required=True,
                    help="1-based outcome and comma-separated forecast")
    sp.add_argument("--pretty", action="store_true")

    sp = sub.add_parser("directed-info", help="directed information report for a process model")
    sp.add_argument("--model", required=True)
    sp.add_argument("--horizon", type=int, required=True)
    sp.add_argument("--conservation", action="store_true")
    sp.add_argument("--tol", type=float, default=1e-9)
    sp.add_argument("--pretty", action="store_true")

    sp = sub.add_parser("geweke", help="Geweke causality measure F_{Y->X} of a VAR model")
    sp.add_argument("--var", required=True)
    sp.add_argument("--pretty", action="store_true")

    sp = sub.add_parser("estimate", help="empirical joint from CSV samples")
    sp.add_argument("--csv", required=True)
    sp.add_argument("--nx", type=int, required=True)
    sp.add_argument("--ny", type=int, required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--pretty", action="store_true")

    sp = sub.add_parser("mi", help="mutual information of a joint")
    sp.add_argument("--joint", required=True)
    sp.add_argument("--pretty", action="store_true")

    sp = sub.add_parser("entropy", help="entropy of a distribution")
    sp.add_argument("--dist", required=True)
    sp.add_argument("--pretty", action="store_true")

    return p


def _cmd_benefit(args) -> tuple[dict, int]:
    seed = args.seed if args.seed is not None else _default_seed()
    if args.cond_w:
        j = _load_kind(args.joint, ("joint3",))
    else:
        j = _load_kind(args.joint, ("joint",))
    l = _resolve_loss(args, j.nx)
    if args.cond_w:
        results = {"c_value": conditional_benefit(l, j, seed=seed, scale=args.scale)}
    else:
        rep = compute_benefit(l, j, seed=seed, scale=args.scale)
        results = {
            "c_value": rep.c_value,
            "risk_no_side": rep.risk_no_side,
            "risk_with_side": rep.risk_with_side,
            "decomposition_residual": rep.decomposition_residual,
            "per_y_minimizers": {
                str(y + 1): (m + 1 if isinstance(m, int) else [float(v) for v in m.probs])
                for y, m in rep.per_y_minimizers.items()
            },
        }
    report = {
        "command": "benefit",
        "args": {**_loss_args(args), "joint": args.joint, "cond_w": args.cond_w, "scale": args.scale},
        "inputs": {"joint": _digest(args.joint)},
        "seed": seed,
        "tolerances": {},
        "results": results,
    }
    return report, EXIT_OK


def _cmd_audit_dpa(args) -> tuple[dict, int]:
    seed = args.seed if args.seed is not None else _default_seed()
    j = _load_kind(args.joint, ("joint",))
    l = _resolve_loss(args, j.nx)
    rep = sufficiency.audit_dpa(l, j, tol=args.tol, seed=seed, workers=args.workers)
    report = {
        "command": "audit-dpa",
        "args": {**_loss_args(args), "joint": args.joint},
        "inputs": {"joint": _digest(args.joint)},
        "seed": seed,
        "tolerances": {"tol": args.tol},
        "results": {
            "c_before": rep.c_before,
            "transforms_checked": len(rep.entries),
            "equality_deviations": [
                {"transform": [v + 1 for v in e.transform.mapping], "c_after": e.c_after}
                for e in rep.equality_deviations
            ],
        },
        "witnesses": [_witness_doc(w) for w in rep.violations],
    }
    return report, EXIT_WITNESS if rep.violations else EXIT_OK


def _cmd_find_violation(args) -> tuple[dict, int]:
    seed = args.seed if args.seed is not None else _default_seed()
    if getattr(args, "builtin", None):
        l = losses.builtin_loss(args.builtin, args.n)
    else:
        l = _resolve_loss(args, args.n)
    w = sufficiency.find_violation(
        l, args.n, budget=args.budget, seed=seed, tol=args.tol, workers=args.workers
    )
    report = {
        "command": "find-violation",
        "args": {**_loss_args(args), "n": args.n, "budget": args.budget},
        "inputs": {},
        "seed": seed,
        "tolerances": {"tol": args.tol},
        "results": {"witness": _witness_doc(w) if w is not None else None},
    }
    return report, EXIT_OK


def _cmd_scoring_rule(args) -> tuple[dict, int]:
    x = int(args.eval[0]) - 1
    q = np.array([float(v) for v in args.eval[1].split(",")])
    q = prob.validate_dist(q).probs
    if x < 0 or x >= q.shape[0]:
        raise modelio.ValidationError(f"outcome {x + 1} outside the forecast alphabet", field="eval")
    inputs = {}
    if args.g:
        key = args.g.replace("-", "_").lower()
        if key == "neg_entropy":
            g = prob.neg_entropy_oracle()
        elif key == "sum_squares":
            g = prob.sum_squares_oracle()
        else:
            raise modelio.ValidationError(f"unknown convex function {args.g!r}", field="g")
        g_desc = {"g": args.g}
    else:
        l = _load_kind(args.g_file, ("loss",))
        g = g_normalized(l)
        g_desc = {"g_file": args.g_file}
        inputs["g_file"] = _digest(args.g_file)
    rule = losses.savage_from_G(g, n=q.shape[0])
    report = {
        "command": "scoring-rule",
        "args": {**g_desc, "x": x + 1, "q": [float(v) for v in q]},
        "inputs": inputs,
        "seed": None,
        "tolerances": {},
        "results": {"value": rule.eval(x, q)},
    }
    return report, EXIT_OK


def _cmd_directed_info(args) -> tuple[dict, int]:
    m = _load_kind(args.model, ("markov_process",))
    rep = causality.conservation_check(m, args.horizon)
    results = {
        "forward": rep.forward,
        "reverse_delayed": rep.reverse_delayed,
        "instantaneous": rep.instantaneous,
        "total_mi": rep.total_mi,
        "delayed_forward": rep.delayed_forward,
        "conservation_residual": rep.residual,
        "conservation_residual_refined": rep.residual_refined,
    }
    report = {
        "command": "directed-info",
        "args": {"model": args.model, "horizon": args.horizon, "conservation": args.conservation},
        "inputs": {"model": _digest(args.model)},
        "seed": None,
        "tolerances": {"tol": args.tol},
        "results": results,
    }
    code = EXIT_OK
    if args.conservation and max(rep.residual, rep.residual_refined) > args.tol:
        code = EXIT_CONSERVATION
    return report, code


def _cmd_geweke(args) -> tuple[dict, int]:
    v = _load_kind(args.var, ("var_model",))
    f = causality.geweke_F(v)
    report = {
        "command": "geweke",
        "args": {"var": args.var},
        "inputs": {"var": _digest(args.var)},
        "seed": None,
        "tolerances": {},
        "results": {"direction": "y->x", "f": f},
    }
    return report, EXIT_OK


def _cmd_estimate(args) -> tuple[dict, int]:
    pairs = modelio.read_sample_csv(args.csv)
    j = modelio.empirical_joint(pairs, args.nx, args.ny)
    modelio.write_model(j, args.out)
    report = {
        "command": "estimate",
        "args": {"csv": args.csv, "nx": args.nx, "ny": args.ny, "out": args.out},
        "inputs": {"csv": _digest(args.csv)},
        "seed": None,
        "tolerances": {},
        "results": {"samples": len(pairs), "out_sha256": _digest(args.out)},
    }
    return report, EXIT_OK


def _cmd_mi(args) -> tuple[dict, int]:
    j = _load_kind(args.joint, ("joint",))
    report = {
        "command": "mi",
        "args": {"joint": args.joint},
        "inputs": {"joint": _digest(args.joint)},
        "seed": None,
        "tolerances": {},
        "results": {"value": prob.mutual_information(j)},
    }
    return report, EXIT_OK


def _cmd_entropy(args) -> tuple[dict, int]:
    d = _load_kind(args.dist, ("dist",))
    report = {
        "command": "entropy",
        "args": {"dist": args.dist},
        "inputs": {"dist": _digest(args.dist)},
        "seed": None,
        "tolerances": {},
        "results": {"value": prob.entropy(d)},
    }
    return report, EXIT_OK


_HANDLERS = {
    "benefit": _cmd_benefit,
    "audit-dpa": _cmd_audit_dpa,
    "find-violation": _cmd_find_violation,
    "scoring-rule": _cmd_scoring_rule,
    "directed-info": _cmd_directed_info,
    "geweke": _cmd_geweke,
    "estimate": _cmd_estimate,
    "mi": _cmd_mi,
    "entropy": _cmd_entropy,
}


def cli_dispatch(argv) -> int:
    """Run one subcommand; print its RunReport; return the exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except SystemExit as exc:  # --help and friends
        return int(exc.code or 0)
    try:
        report, code = _HANDLERS[args.cmd](args)
    except (UnboundedBelow, NotProper, AssertionError, FloatingPointError) as exc:
        sys.stderr.write(f"numeric failure: {exc}\n")
        return EXIT_NUMERIC
    except (SideinfoError, FileNotFoundError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_DATA
    _emit(report, getattr(args, "pretty", False))
    return code


def main() -> None:
    sys.exit(cli_dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
