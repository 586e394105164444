"""Command-line front end.

Exit codes: 0 success, 2 parameter error, 3 optimizer failure,
4 zero-probability outcome, 5 threshold bracket error.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import itertools
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import measures, protocol, states, steering
from .optimize import BracketError, OptimizerConfig, bisect_threshold, grid_sweep
from .qcore import BellOutcome

EXIT_PARAM, EXIT_OPTIMIZER, EXIT_ZERO_PROB, EXIT_BRACKET = 2, 3, 4, 5

SWEEP_COLUMNS = ["theta1", "p1", "p2", "theta3", "p3",
                 "cgm1", "cgm2", "cgm3", "cgm4", "S1", "S2", "S3", "S4",
                 "sgen1", "sgen2", "sgen3", "sgen4", "error"]
PARAM_KEYS = ("theta1", "p1", "p2", "theta3", "p3")
OPTIMIZER_KEYS = ("multistarts", "max_iters", "angle_tol", "value_tol", "seed")


class CLIError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def fmt(x) -> str:
    return "" if x is None or x == "" else f"{float(x):.12g}"


# --------------------------------------------------------------------------
# Config resolution: built-in defaults < --config file < flags.

def _load_config(args) -> dict:
    if not getattr(args, "config", None):
        return {}
    try:
        return json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CLIError(f"cannot read config {args.config}: {exc}", EXIT_PARAM)


def resolve_params(args, config=None) -> states.FamilyParams:
    config = _load_config(args) if config is None else config
    values = {k: config[k] for k in PARAM_KEYS if k in config}
    for k in PARAM_KEYS:
        v = getattr(args, k, None)
        if v is not None:
            values[k] = v
    try:
        return states.FamilyParams(**{k: float(v) for k, v in values.items()})
    except (TypeError, ValueError) as exc:
        raise CLIError(str(exc), EXIT_PARAM)


def resolve_optimizer(args, config=None) -> OptimizerConfig:
    config = _load_config(args) if config is None else config
    values = dict(config.get("optimizer", {}))
    if "seed" in config:
        values["seed"] = config["seed"]
    if "multistarts" in config:
        values["multistarts"] = config["multistarts"]
    if "seed" not in values and os.environ.get("STEERLAB_SEED"):
        values["seed"] = os.environ["STEERLAB_SEED"]
    if getattr(args, "seed", None) is not None:
        values["seed"] = args.seed
    if getattr(args, "multistarts", None) is not None:
        values["multistarts"] = args.multistarts
    try:
        kw = {k: values[k] for k in OPTIMIZER_KEYS if k in values}
        for k in ("multistarts", "max_iters", "seed"):
            if k in kw:
                kw[k] = int(kw[k])
        return OptimizerConfig(**kw)
    except (TypeError, ValueError) as exc:
        raise CLIError(f"bad optimizer config: {exc}", EXIT_PARAM)


def emit(args, payload, text=None):
    """Write JSON (or pre-rendered text) to --out or stdout."""
    if text is None:
        text = json.dumps(payload, indent=2) + "\n"
    if getattr(args, "out", None):
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def state_digest(mat) -> str:
    m = np.round(np.asarray(mat, dtype=complex), 10) + 0.0
    return hashlib.sha256(np.ascontiguousarray(m).tobytes()).hexdigest()


def _family(args) -> int:
    if args.family not in (1, 2, 3, 4):
        raise CLIError(f"family must be 1-4, got {args.family}", EXIT_PARAM)
    return args.family


def _family_state(family, params):
    try:
        return states.family_state(family, params)
    except (ValueError, ZeroDivisionError) as exc:
        raise CLIError(str(exc), EXIT_PARAM)


# --------------------------------------------------------------------------
# Commands.

def cmd_state(args):
    family = _family(args)
    params = resolve_params(args)
    rho = _family_state(family, params)
    emit(args, {"family": family, "params": params.to_dict(), "matrix": rho.to_json(),
                "xParams": states.extract_x_params(rho).to_json()})


def cmd_cgm(args):
    family = _family(args)
    params = resolve_params(args)
    rho = _family_state(family, params)
    emit(args, {"family": family, "params": params.to_dict(),
                "closedForm": measures.cgm_closed(family, params),
                "matrix": measures.cgm_x(states.extract_x_params(rho))})


def steer_report(family, params, cfg) -> dict:
    rho = _family_state(family, params)
    try:
        report = steering.violates_genuine_steering(rho, cfg)
    except Exception as exc:  # any optimizer breakdown maps to one exit code
        raise CLIError(f"optimizer failed: {exc}", EXIT_OPTIMIZER)
    if not np.isfinite(report.best):
        raise CLIError("optimizer returned a non-finite value", EXIT_OPTIMIZER)
    closed = steering.closed_S(family, params)
    best = report.per_party[report.party]
    return {
        "family": family,
        "params": params.to_dict(),
        "numericMax": {u.name: r.value for u, r in report.per_party.items()},
        "best": report.best,
        "party": report.party.name,
        "settings": best.settings.to_json(),
        "closedForm": closed,
        "sGen": measures.s_gen(max(report.best, 0.0)).s_gen,
        "sGenClosed": measures.s_gen(closed).s_gen,
        "violated": report.violated,
    }


def cmd_steer(args):
    family = _family(args)
    emit(args, steer_report(family, resolve_params(args), resolve_optimizer(args)))


def _parse_outcomes(text):
    if not text:
        return protocol.CANONICAL_OUTCOMES
    parts = [p.strip() for p in text.split(",")]
    try:
        out = tuple(BellOutcome(p) for p in parts)
    except ValueError as exc:
        raise CLIError(str(exc), EXIT_PARAM)
    if len(out) != 3:
        raise CLIError("need three comma-separated outcomes", EXIT_PARAM)
    return out


def _parse_pairing(text):
    if not text:
        return protocol.CANONICAL_PAIRING
    try:
        raw = Path(text).read_text() if Path(text).is_file() else text
        return protocol.Pairing.from_json(json.loads(raw))
    except (ValueError, KeyError, TypeError) as exc:
        raise CLIError(f"bad pairing: {exc}", EXIT_PARAM)


def protocol_report(params, pairing=None, outcomes=None) -> dict:
    pairing = pairing or protocol.CANONICAL_PAIRING
    outcomes = outcomes or protocol.CANONICAL_OUTCOMES
    inputs = [states.rho1(params.theta1, params.p1), states.rho2(params.p2),
              states.rho3(params.theta3, params.p3)]
    target = _family_state(4, params)
    result = protocol.run_smp(protocol.assemble_global(*inputs), pairing, outcomes, target)
    out = {"params": params.to_dict(), **result.to_json()}
    if result.post_state is None:
        return out
    out["postStateDigest"] = state_digest(result.post_state.mat)
    out["cgm"] = measures.cgm_x(states.extract_x_params(result.post_state, 1e-10))
    return out


def cmd_protocol(args):
    params = resolve_params(args)
    report = protocol_report(params, _parse_pairing(args.pairing), _parse_outcomes(args.outcomes))
    emit(args, report)
    if report["postState"] is None:
        raise CLIError("post-selected outcome has zero probability", EXIT_ZERO_PROB)


def cmd_search(args):
    params = resolve_params(args)
    inputs = [states.rho1(params.theta1, params.p1), states.rho2(params.p2),
              states.rho3(params.theta3, params.p3)]
    target = _family_state(4, params)
    tol = args.tol if args.tol is not None else 1e-10
    hits = protocol.search_pairings(*inputs, target, tol)
    emit(args, {"params": params.to_dict(), "tol": tol, "count": len(hits),
                "hits": [h.to_json() for h in hits]})


def threshold_report(theta1, theta3, tol, cfg) -> dict:
    def params(p3):
        return states.FamilyParams(theta1=theta1, theta3=theta3, p3=p3)

    def steers(p3):
        try:
            rho = states.rho4_closed(theta1, theta3, p3)
        except ZeroDivisionError:
            return False
        return steering.violates_genuine_steering(rho, cfg).violated

    def entangled(p3):
        try:
            return measures.cgm_closed(4, params(p3)) > 0.5
        except ZeroDivisionError:
            return False

    def closed(p3):
        try:
            return steering.closed_S(4, params(p3)) > 1
        except ZeroDivisionError:
            return False

    try:
        p3_star = bisect_threshold(steers, 0.0, 1.0, tol)
        cgm_cross = bisect_threshold(entangled, 0.0, 1.0, tol)
        closed_cross = bisect_threshold(closed, 0.0, 1.0, tol)
    except BracketError as exc:
        raise CLIError(f"no threshold in [0, 1]: {exc}", EXIT_BRACKET)
    upper = states.bilocal_limit(3, states.FamilyParams(theta3=theta3))
    return {"theta1": theta1, "theta3": theta3, "tol": tol, "p3Star": p3_star,
            "cgmCrossing": cgm_cross, "closedFormCrossing": closed_cross,
            "bilocalUpper": upper}


def cmd_threshold(args):
    params = resolve_params(args)
    tol = args.tol if args.tol is not None else 1e-3
    emit(args, threshold_report(params.theta1, params.theta3, tol, resolve_optimizer(args)))


def sweep_row(point: dict) -> dict:
    p = states.FamilyParams(**point)
    row = {}
    for f in (1, 2, 3, 4):
        try:
            s = steering.closed_S(f, p)
            row[f"cgm{f}"] = measures.cgm_closed(f, p)
            row[f"S{f}"] = s
            row[f"sgen{f}"] = measures.s_gen(s).s_gen
        except ZeroDivisionError as exc:
            row["error"] = f"family {f}: {exc}"
    return row


def parse_axis(text) -> list[float]:
    """``"0.1"``, ``"0.1,0.2"`` or ``"lo:hi:n"`` (inclusive linspace)."""
    text = str(text)
    if ":" in text:
        lo, hi, n = text.split(":")
        return [float(v) for v in np.linspace(float(lo), float(hi), int(n))]
    return [float(v) for v in text.split(",")]


def enhancement_grid(n, p2=0.5) -> list[dict]:
    """p = p1 = p3 in (0, 1], theta = theta1 = theta3 in (0, pi/4]."""
    ps = [k / n for k in range(1, n + 1)]
    thetas = [k * (np.pi / 4) / n for k in range(1, n + 1)]
    return [{"theta1": t, "p1": p, "p2": p2, "theta3": t, "p3": p} for t in thetas for p in ps]


def sweep_points(args, config) -> list[dict]:
    base = resolve_params(argparse.Namespace(**{k: None for k in PARAM_KEYS}), config).to_dict()
    if args.diagonal:
        p2 = args.p2 if args.p2 is not None else base["p2"]
        return enhancement_grid(args.diagonal, float(parse_axis(p2)[0]))
    axes = {}
    for k in PARAM_KEYS:
        v = getattr(args, k, None)
        axes[k] = parse_axis(v) if v is not None else [base[k]]
    names = list(axes)
    return [dict(zip(names, vals)) for vals in itertools.product(*axes.values())]


def render_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for r in rows:
        w.writerow([r.get("error", "") if c == "error" else fmt(r.get(c)) for c in SWEEP_COLUMNS])
    return buf.getvalue()


def cmd_sweep(args):
    config = _load_config(args)
    try:
        points = sweep_points(args, config)
    except ValueError as exc:
        raise CLIError(str(exc), EXIT_PARAM)
    rows = grid_sweep(points, sweep_row)
    if args.format == "json":
        emit(args, {"columns": SWEEP_COLUMNS, "rows": rows})
    else:
        emit(args, None, render_csv(rows))


def reproduce(outdir, cfg: OptimizerConfig | None = None) -> list[Path]:
    """Write the reproduction artifacts (CSV + JSON) into ``outdir``."""
    cfg = cfg or OptimizerConfig()
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    sweep = outdir / "enhancement_sweep.csv"
    sweep.write_text(render_csv(grid_sweep(enhancement_grid(20), sweep_row)))
    params = states.FamilyParams(theta1=0.1, p1=0.5, p2=0.5, theta3=0.1, p3=0.5)
    report = {
        "threshold": threshold_report(0.1, 0.1, 1e-3, cfg),
        "protocol": protocol_report(params),
        "steer": [steer_report(f, params, cfg.derive(f)) for f in (1, 2, 3, 4)],
    }
    summary = outdir / "reproduction.json"
    summary.write_text(json.dumps(report, indent=2) + "\n")
    return [sweep, summary]


def cmd_reproduce(args):
    paths = reproduce(args.out or "reproduction", resolve_optimizer(args))
    for p in paths:
        print(p)


# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="steerlab", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, family=False, sweep=False):
        if family:
            p.add_argument("--family", type=int, required=True, help="state family 1-4")
        kind = str if sweep else float
        axis = " (value, comma list or lo:hi:n)" if sweep else ""
        p.add_argument("--theta1", type=kind, help="radians in [0, pi/4], default 0.1" + axis)
        p.add_argument("--theta3", type=kind, help="radians in [0, pi/4], default 0.1" + axis)
        p.add_argument("--p1", type=kind, help="default 0.5" + axis)
        p.add_argument("--p2", type=kind, help="default 0.5" + axis)
        p.add_argument("--p3", type=kind, help="default 0.5" + axis)
        p.add_argument("--seed", type=int, help="optimizer seed (fallback: $STEERLAB_SEED, then 0)")
        p.add_argument("--multistarts", type=int, help="optimizer restarts, default 32")
        p.add_argument("--tol", type=float, help="command tolerance")
        p.add_argument("--out", help="output path (default stdout)")
        p.add_argument("--format", choices=["csv", "json"], default="json" if not sweep else "csv")
        p.add_argument("--config", help="JSON config file; flags override its values")

    for name, fn, fam, helptext in [
        ("state", cmd_state, True, "print a family state and its X-state entries"),
        ("cgm", cmd_cgm, True, "genuine multipartite concurrence, closed form and matrix level"),
        ("steer", cmd_steer, True, "maximize the steering witnesses for a family state"),
        ("protocol", cmd_protocol, False, "run the sequential measurement protocol"),
        ("search-pairing", cmd_search, False, "enumerate pairings and outcomes reproducing rho4"),
        ("threshold", cmd_threshold, False, "bisect the p3 steering and concurrence thresholds"),
        ("sweep", cmd_sweep, False, "closed-form quantities over a parameter grid"),
        ("reproduce", cmd_reproduce, False, "write the full reproduction CSV/JSON"),
    ]:
        p = sub.add_parser(name, help=helptext)
        common(p, family=fam, sweep=name == "sweep")
        p.set_defaults(func=fn)
        if name == "protocol":
            p.add_argument("--pairing", help="pairing JSON (inline or file)")
            p.add_argument("--outcomes", help="three of PhiPlus,PhiMinus,PsiPlus,PsiMinus")
        if name == "sweep":
            p.add_argument("--diagonal", type=int, metavar="N",
                           help="N x N enhancement grid with p1=p3, theta1=theta3")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except CLIError as exc:
        print(f"steerlab: {exc}", file=sys.stderr)
        return exc.code
    return 0


if __name__ == "__main__":
    sys.exit(main())
