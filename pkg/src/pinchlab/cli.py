"""pinchlab command line: verify, sweep, boundary, limit.

Exit codes: 0 all checks pass, 1 a check failed, 2 usage error.
Numbers are written with 17 significant digits; output order never depends on
thread scheduling.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys

import numpy as np

from pinchlab import __version__
from pinchlab.boundary import (
    boundary_metric_g0_cr, boundary_metric_gc, boundary_metric_hb, cr_kernel_fields, pole_order_gc,
    pole_order_hb, roundness, stereo,
)
from pinchlab.coordinates import complex_pair
from pinchlab.errors import PinchlabError
from pinchlab.families import Family, h0_metric, hb_metric
from pinchlab.frames import DEFAULT_STEP
from pinchlab.grassmann import DEFAULT_SEED
from pinchlab.spectra import (
    pedersen_extrema, pedersen_negativity, pinching_oneloop, sectional_extrema, spectrum_oneloop,
    spectrum_pedersen,
)
from pinchlab.suites import default_grid, run_verify

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
POLE_TOL = 0.05
BOUNDARY_TOL = 1e-10
LIMIT_TOL = 1e-8


class UsageError(Exception):
    pass


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x) or math.isinf(x):
            return ""
        return format(x, ".17g")
    return str(x)


# ---------------------------------------------------------------------------
# writers


def _json_value(x) -> str:
    if x is None:
        return "null"
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        s = fmt(x)
        return s if s else "null"
    if isinstance(x, str):
        return json.dumps(x)
    if isinstance(x, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_json_value(v)}" for k, v in x.items()) + "}"
    if isinstance(x, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_json_value(v) for v in x) + "]"
    raise TypeError(f"cannot serialize {type(x).__name__}")


def to_json(doc: dict) -> str:
    """JSON text with every float at 17 significant digits."""
    return _json_value(doc) + "\n"


def to_csv(columns: list[str], rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt(r.get(c)) for c in columns])
    return buf.getvalue()


def emit(doc: dict, columns: list[str], rows: list[dict], args) -> None:
    text = to_json(doc) if args.format == "json" else to_csv(columns, rows)
    if args.output and args.output != "-":
        with open(args.output, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _doc(command: str, args, columns, rows, **extra) -> dict:
    doc = {"tool": "pinchlab", "version": __version__, "command": command,
           "family": getattr(args, "family", None), "columns": columns, "rows": rows}
    doc.update(extra)
    return doc


def threads_from_env() -> int:
    raw = os.environ.get("PINCHLAB_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"PINCHLAB_THREADS must be a positive integer, got {raw!r}")
    if n < 1:
        raise UsageError(f"PINCHLAB_THREADS must be a positive integer, got {raw!r}")
    return n


# ---------------------------------------------------------------------------
# argument helpers


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}")


def _nonneg(name: str, v: float | None) -> None:
    if v is not None and not v >= 0:
        raise UsageError(f"--{name} must be >= 0, got {v}")


def _family(args) -> Family:
    return Family(args.family)


def _param_values(args, fam: Family) -> list[float] | None:
    name = {Family.ONELOOP: "c", Family.HB: "b", Family.PEDERSEN: "m2"}[fam]
    v = getattr(args, name)
    for other in ("c", "b", "m2"):
        if other != name and getattr(args, other) is not None:
            raise UsageError(f"--{other} does not apply to --family {fam.value}")
    _nonneg(name, v)
    return None if v is None else [v]


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args) -> int:
    fam = _family(args)
    values = _param_values(args, fam)
    radii = None if args.grid == "default" else _float_list(args.grid)
    if radii is not None and (not radii or any(not r > 0 for r in radii)):
        raise UsageError("--grid needs positive radii")
    if fam is Family.PEDERSEN and radii and any(r >= 1 for r in radii):
        raise UsageError("Pedersen radii must lie in (0, 1)")
    if args.samples < 0:
        raise UsageError("--samples must be >= 0")
    points = default_grid(fam, values, radii)
    tol = {} if args.tol is None else {k: args.tol for k in
                                      ("connection", "curvature_forms", "symmetry", "spectrum", "einstein", "weyl_half")}
    rep = run_verify(points, step=args.step, richardson=not args.no_richardson, samples=args.samples,
                     seed=args.seed, threads=threads_from_env(), tolerances=tol)
    columns = ["check", "tolerance", "worst", "passed", "where"]
    rows = [{"check": c.name, "tolerance": c.tolerance, "worst": c.worst, "passed": c.passed,
             "where": json.dumps(c.where, sort_keys=True)} for c in rep.checks]
    emit(_doc("verify", args, columns, rows, passed=rep.passed, points=len(points)), columns, rows, args)
    for c in rep.checks:
        if not c.passed:
            print(f"FAIL {c.name}: worst {fmt(c.worst)} > {fmt(c.tolerance)} at {c.where}", file=sys.stderr)
    return EXIT_OK if rep.passed else EXIT_FAIL


# ---------------------------------------------------------------------------
# sweep


def _range(args) -> np.ndarray:
    lo, hi, n = args.range
    n = int(n)
    if not lo < hi or n < 2:
        raise UsageError("--range needs lo < hi and n >= 2")
    if args.spacing == "log":
        if not lo > 0:
            raise UsageError("log spacing needs lo > 0")
        return np.logspace(math.log10(lo), math.log10(hi), n)
    return np.linspace(lo, hi, n)


ONELOOP_COLUMNS = ["rho_tilde", "lambda_plus_234", "lambda_minus", "lambda_plus_342", "max_K", "min_K", "delta",
                   "version"]
PEDERSEN_COLUMNS = ["m2", "varrho", "nu_plus", "nu_minus_123", "nu_minus_231", "max_K", "min_K", "delta",
                    "classification", "rho2_crit", "version"]


def _sweep_oneloop(xs) -> list[dict]:
    rows = []
    for rt in xs:
        s = spectrum_oneloop(rt)
        mx, mn = sectional_extrema(s.self_dual(), s.anti_self_dual())
        rows.append({"rho_tilde": rt, "lambda_plus_234": s.lambda_plus_234, "lambda_minus": s.lambda_minus_common,
                     "lambda_plus_342": s.lambda_plus_342, "max_K": mx, "min_K": mn,
                     "delta": pinching_oneloop(rt) if rt > 0 else 1.0, "version": __version__})
    return rows


def _sweep_pedersen(pairs) -> list[dict]:
    rows = []
    for m2, r in pairs:
        s = spectrum_pedersen(r, m2)
        mx, mn = pedersen_extrema(r, m2)
        neg = pedersen_negativity(m2)
        rows.append({"m2": m2, "varrho": r, "nu_plus": s.nu_plus, "nu_minus_123": s.nu_minus_123,
                     "nu_minus_231": s.nu_minus_231, "max_K": mx, "min_K": mn,
                     "delta": mx / mn if mx < 0 else None, "classification": neg.classification.value,
                     "rho2_crit": neg.rho2_crit, "version": __version__})
    return rows


def cmd_sweep(args) -> int:
    fam = _family(args)
    if args.range is None:
        raise UsageError("--range lo hi n is required")
    xs = _range(args)
    if fam is Family.PEDERSEN:
        param = args.param or "m2"
        if param == "m2":
            if xs[0] < 0:
                raise UsageError("m2 must be >= 0")
            r = args.varrho if args.varrho is not None else 0.5
            if not 0 <= r < 1:
                raise UsageError("--varrho must lie in [0, 1)")
            pairs = [(m2, r) for m2 in xs]
        elif param == "varrho":
            if xs[0] < 0 or xs[-1] >= 1:
                raise UsageError("varrho range must lie in [0, 1)")
            m2 = args.m2 if args.m2 is not None else 1.0
            _nonneg("m2", m2)
            pairs = [(m2, r) for r in xs]
        else:
            raise UsageError(f"--param {param} does not apply to pedersen")
        columns, rows = PEDERSEN_COLUMNS, _sweep_pedersen(pairs)
    else:
        if args.param not in (None, "rho_tilde"):
            raise UsageError(f"--param {args.param} does not apply to {fam.value}")
        if xs[0] < 0:
            raise UsageError("rho_tilde must be >= 0")
        columns, rows = ONELOOP_COLUMNS, _sweep_oneloop(xs)
    emit(_doc("sweep", args, columns, rows), columns, rows, args)
    return EXIT_OK


# ---------------------------------------------------------------------------
# boundary


def _sphere_samples(n: int, seed: int) -> np.ndarray:
    X = np.random.default_rng(seed).standard_normal((n, 4))
    X /= np.linalg.norm(X, axis=1, keepdims=True)
    # keep clear of the pole, where the chart degenerates
    return X[X[:, 0] > -0.99]


BOUNDARY_COLUMNS = ["X0", "X1", "X2", "X3", "u1", "u2", "u3", "G11", "G12", "G13", "G22", "G23", "G33",
                    "cr_residual", "off_scalar", "version"]


def cmd_boundary(args) -> int:
    fam = _family(args)
    if fam is Family.PEDERSEN:
        raise UsageError("boundary supports --family oneloop and hb")
    values = _param_values(args, fam)
    param = values[0] if values else 1.0
    if args.samples < 1:
        raise UsageError("--samples must be >= 1")
    rows, worst_cr, worst_round = [], 0.0, 0.0
    for X in _sphere_samples(args.samples, args.seed):
        u = stereo(X)
        row = {f"X{i}": X[i] for i in range(4)} | {f"u{i + 1}": u[i] for i in range(3)}
        if fam is Family.ONELOOP:
            z1, z2 = complex_pair(X)
            res = max(cr_kernel_fields(z1, z2).residual, cr_kernel_fields(0.5 * z1, 0.5 * z2).residual)
            worst_cr = max(worst_cr, res)
            row["cr_residual"] = res
            if param > 0:
                G = boundary_metric_gc(param, X)
            else:
                H = boundary_metric_g0_cr(X)
                G = np.zeros((3, 3))
                G[:2, :2] = H  # CR-plane basis, not the chart basis
        else:
            G = boundary_metric_hb(param, X)
            if param == 0:
                r = roundness(G, u).off_scalar
                worst_round = max(worst_round, r)
                row["off_scalar"] = r
        for i, j in ((0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)):
            row[f"G{i + 1}{j + 1}"] = G[i, j]
        row["version"] = __version__
        rows.append(row)
    summary = {"param": param, "samples": len(rows), "max_cr_residual": None, "max_off_scalar": None,
               "pole_order": None, "pole_slope": None, "pole_fit_rms": None}
    failures = []
    if fam is Family.ONELOOP:
        summary["max_cr_residual"] = worst_cr
        if worst_cr > BOUNDARY_TOL:
            failures.append(f"cr_residual {fmt(worst_cr)}")
    if fam is Family.HB and param == 0:
        summary["max_off_scalar"] = worst_round
        if worst_round > BOUNDARY_TOL:
            failures.append(f"off_scalar {fmt(worst_round)}")
    if param > 0:
        fit = pole_order_gc(param) if fam is Family.ONELOOP else pole_order_hb(param)
        summary.update(pole_order=fit.order, pole_slope=fit.slope, pole_fit_rms=fit.residual)
        if abs(fit.order - 2.0) > POLE_TOL:
            failures.append(f"pole_order {fmt(fit.order)}")
    emit(_doc("boundary", args, BOUNDARY_COLUMNS, rows, summary=summary), BOUNDARY_COLUMNS, rows, args)
    print("summary " + " ".join(f"{k}={fmt(v)}" for k, v in summary.items() if v is not None), file=sys.stderr)
    for f in failures:
        print(f"FAIL {f}", file=sys.stderr)
    return EXIT_FAIL if failures else EXIT_OK


# ---------------------------------------------------------------------------
# limit


LIMIT_COLUMNS = ["b", "max_abs_residual", "version"]


def cmd_limit(args) -> int:
    bs = [10.0 ** -k for k in range(1, 9)] if args.b is None else [args.b]
    _nonneg("b", args.b)
    x = np.array([1.0, 0.3, 0.7, 0.3]) if args.point is None else np.array(_float_list(args.point))
    if x.shape != (4,) or not x[0] > 0:
        raise UsageError("--point needs four numbers with rho' > 0")
    rows = [{"b": b, "max_abs_residual": float(np.abs(hb_metric(b, x) - h0_metric(x)).max()),
             "version": __version__} for b in bs]
    doc = _doc("limit", args, LIMIT_COLUMNS, rows, point=list(x))
    doc["family"] = Family.HB.value  # the table is about h^b whatever --family says
    emit(doc, LIMIT_COLUMNS, rows, args)
    last = rows[-1]
    ok = last["max_abs_residual"] <= max(LIMIT_TOL, last["b"])
    return EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--family", choices=[f.value for f in Family], default="oneloop")
    common.add_argument("--c", type=float, help="one-loop parameter c >= 0")
    common.add_argument("--b", type=float, help="rescaled parameter b >= 0")
    common.add_argument("--m2", type=float, help="Pedersen parameter m^2 >= 0")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--output", "-o", help="output file (default stdout)")
    common.add_argument("--format", choices=["csv", "json"], default="csv")

    p = argparse.ArgumentParser(prog="pinchlab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"pinchlab {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", parents=[common], help="numeric pipeline against closed forms")
    v.add_argument("--grid", default="default",
                   help="'default' or comma-separated radii (rho/c, rho' or varrho)")
    v.add_argument("--samples", type=int, default=100_000, help="Grassmannian samples per point (0 skips)")
    v.add_argument("--step", type=float, default=None,
                   help=f"finite-difference step (default {DEFAULT_STEP:g}, or 1e-3 with Richardson)")
    v.add_argument("--tol", type=float, default=None, help="override the 1e-6 residual tolerances")
    v.add_argument("--no-richardson", action="store_true", help="plain central differences")

    s = sub.add_parser("sweep", parents=[common], help="closed-form spectra and pinching table")
    s.add_argument("--range", nargs=3, type=float, metavar=("LO", "HI", "N"))
    s.add_argument("--spacing", choices=["linear", "log"], default="linear")
    s.add_argument("--param", choices=["rho_tilde", "m2", "varrho"])
    s.add_argument("--varrho", type=float, help="fixed Pedersen radius for an m2 sweep")

    b = sub.add_parser("boundary", parents=[common], help="conformal boundary samples and pole fit")
    b.add_argument("--samples", type=int, default=1000)

    lim = sub.add_parser("limit", parents=[common], help="h^b -> h^0 convergence table")
    lim.add_argument("--point", help="rho',phi',zeta0',zetat0' (default 1,0.3,0.7,0.3)")
    return p


COMMANDS = {"verify": cmd_verify, "sweep": cmd_sweep, "boundary": cmd_boundary, "limit": cmd_limit}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except UsageError as e:
        print(f"pinchlab: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (PinchlabError, ValueError) as e:
        print(f"pinchlab: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"pinchlab: {e}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
