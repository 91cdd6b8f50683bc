"""Command-line front end.

    photonic-bell-lab prob  <twc|gpy>                 per-outcome oracle vs closed form
    photonic-bell-lab lhv   <verify|sample|threshold> local model checks
    photonic-bell-lab bell  <chsh|ch|cglmp> <eval|optimize>

Angles are radians, oscillator strength is always given as alpha^2. Output
is a JSON record (default) or the same record in long CSV form.
Exit codes: 0 ok, 2 invalid input, 3 model validity violated, 4 internal error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from . import bell
from . import closed_form as cf
from . import lhv
from .fock import SourceSpec, probability_table

EXIT_OK, EXIT_INPUT, EXIT_VALIDITY, EXIT_INTERNAL = 0, 2, 3, 4
DEFAULT_CUTOFF = 12


class InputError(ValueError):
    pass


# -- result records ---------------------------------------------------------


def _clean(v):
    """JSON-safe scalar: numpy to python, non-finite floats to None."""
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    return v


@dataclass
class Table:
    columns: list[str]
    rows: list[list] = field(default_factory=list)

    def add(self, *values):
        if len(values) != len(self.columns):
            raise AssertionError(f"row of length {len(values)} for columns {self.columns}")
        self.rows.append([_clean(v) for v in values])


@dataclass
class ResultRecord:
    command: list[str]
    params: dict
    scalars: dict = field(default_factory=dict)
    tables: dict[str, Table] = field(default_factory=dict)
    version: str = __version__
    duration_s: float | None = None

    def as_dict(self) -> dict:
        d = {
            "command": list(self.command),
            "version": self.version,
            "params": {k: _clean(v) for k, v in self.params.items()},
            "scalars": {k: _clean(v) for k, v in self.scalars.items()},
            "tables": {n: {"columns": t.columns, "rows": t.rows} for n, t in self.tables.items()},
        }
        if self.duration_s is not None:
            d["duration_s"] = self.duration_s
        return d

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["table", "row", "column", "type", "value"])
        d = self.as_dict()
        w.writerow(["_meta", 0, "command", *_encode(d["command"])])
        w.writerow(["_meta", 0, "version", *_encode(d["version"])])
        if "duration_s" in d:
            w.writerow(["_meta", 0, "duration_s", *_encode(d["duration_s"])])
        for section in ("params", "scalars"):
            for k, v in d[section].items():
                w.writerow([f"_{section}", 0, k, *_encode(v)])
        for name, t in d["tables"].items():
            w.writerow([name, -1, "_columns", *_encode(t["columns"])])
            for i, row in enumerate(t["rows"]):
                for col, v in zip(t["columns"], row):
                    w.writerow([name, i, col, *_encode(v)])
        return buf.getvalue()


def _encode(v) -> tuple[str, str]:
    if v is None:
        return "null", ""
    if isinstance(v, bool):
        return "bool", "true" if v else "false"
    if isinstance(v, int):
        return "int", str(v)
    if isinstance(v, float):
        return "float", format(v, ".17g")
    if isinstance(v, str):
        return "str", v
    return "json", json.dumps(v)


def _decode(kind: str, text: str):
    return {
        "null": lambda s: None,
        "bool": lambda s: s == "true",
        "int": int,
        "float": float,
        "str": str,
        "json": json.loads,
    }[kind](text)


def record_dict_from_csv(text: str) -> dict:
    """Rebuild the JSON-shaped record from its CSV form."""
    out = {"command": None, "version": None, "params": {}, "scalars": {}, "tables": {}}
    for rec in csv.DictReader(io.StringIO(text)):
        v = _decode(rec["type"], rec["value"])
        table, row, col = rec["table"], int(rec["row"]), rec["column"]
        if table == "_meta":
            out[col] = v
        elif table in ("_params", "_scalars"):
            out[table[1:]][col] = v
        elif row < 0:
            out["tables"][table] = {"columns": v, "rows": []}
        else:
            t = out["tables"][table]
            while len(t["rows"]) <= row:
                t["rows"].append([])
            t["rows"][row].append(v)
    return out


def write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".pbl-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# -- argument helpers -------------------------------------------------------


def _alpha(args, required=True) -> float:
    if args.alpha2 is None:
        if required:
            raise InputError("--alpha2 is required")
        return None
    if not math.isfinite(args.alpha2) or args.alpha2 < 0:
        raise InputError(f"--alpha2 must be >= 0, got {args.alpha2}")
    return math.sqrt(args.alpha2)


def _gamma(args) -> float:
    if args.gamma is None:
        raise InputError("--gamma is required for the squeezed-vacuum setup")
    if not 0 <= args.gamma < 1:
        raise InputError(f"--gamma must lie in [0, 1), got {args.gamma}")
    return args.gamma


def _transmittivity(args, default=None) -> float:
    T = args.transmittivity if args.transmittivity is not None else default
    if T is None:
        raise InputError("--transmittivity is required")
    if not 0 <= T <= 1:
        raise InputError(f"--transmittivity must lie in [0, 1], got {T}")
    return T


def _angles(args) -> tuple[float, float]:
    if args.theta12 is not None and args.theta_sum is not None:
        raise InputError("--theta12 and --theta-sum are mutually exclusive")
    if args.theta12 is not None and args.theta1 is not None:
        raise InputError("--theta12 and --theta1 are mutually exclusive")
    if args.theta_sum is not None and args.theta1 is not None:
        raise InputError("--theta-sum and --theta1 are mutually exclusive")
    t2 = args.theta2 if args.theta2 is not None else 0.0
    if args.theta12 is not None:
        t1 = t2 + args.theta12
    elif args.theta_sum is not None:
        t1 = args.theta_sum - t2
    else:
        t1 = args.theta1 if args.theta1 is not None else 0.0
    for t in (t1, t2):
        if not math.isfinite(t):
            raise InputError("angles must be finite")
    return t1, t2


def _cutoff(args) -> int:
    if args.cutoff < 0:
        raise InputError(f"--cutoff must be >= 0, got {args.cutoff}")
    return args.cutoff


def _setup(args) -> str:
    if args.setup not in ("twc", "gpy"):
        raise InputError("--setup must be twc or gpy")
    return args.setup


def _bell_scalars(rec: ResultRecord, res: bell.BellResult):
    rec.scalars.update(
        inequality=res.inequality, value=res.value, lower_bound=res.lower, upper_bound=res.upper,
        violated=res.violated,
    )


# -- commands ---------------------------------------------------------------


def cmd_prob(args, rec: ResultRecord) -> None:
    alpha = _alpha(args)
    t1, t2 = _angles(args)
    cutoff = _cutoff(args)
    T = _transmittivity(args, 0.5)
    rec.params.update(setup=args.target, alpha2=args.alpha2, theta1=t1, theta2=t2, transmittivity=T, cutoff=cutoff)
    if args.target == "twc":
        table = probability_table(SourceSpec("single_photon", alpha, t1, t2), T, cutoff)
        out = Table(["k", "l", "r", "s", "oracle", "closed_form", "abs_diff"])
        worst = 0.0
        for n, p in table.items():
            # the closed form is for balanced splitters and alpha > 0
            q = cf.p_twc(n, alpha, t1 - t2) if alpha > 0 and T == 0.5 else None
            diff = abs(p - q) if q is not None else None
            worst = max(worst, diff or 0.0)
            out.add(*n, p, q, diff)
        rec.scalars.update(total=math.fsum(table.values()), tail_bound=cf.twc_tail(alpha, cutoff),
                           max_abs_diff=worst)
    else:
        gamma = _gamma(args)
        rec.params["gamma"] = gamma
        src = SourceSpec("squeezed", alpha, t1, t2, gamma, lhv.GPY_SQUEEZE_PHASE)
        table = probability_table(src, T, cutoff)
        out = Table(["k", "l", "r", "s", "oracle", "closed_form", "abs_diff", "source"])
        worst = 0.0
        for n, p in table.items():
            q = None
            if T == 0.5 and cf.is_class1(n):
                q = cf.p_gpy_class1(n, alpha, gamma, t1, t2)
            elif T == 0.5 and cf.is_2and2(n):
                q = cf.p_gpy_2and2(n, alpha, gamma, t1, t2)
            diff = abs(p - q) if q is not None else None
            worst = max(worst, diff or 0.0)
            out.add(*n, p, q, diff, "closed-form" if q is not None else "oracle-only")
        rec.scalars.update(total=math.fsum(table.values()), tail_bound=cf.gpy_tail(alpha, gamma, cutoff),
                           max_abs_diff=worst)
    rec.tables["outcomes"] = out


def _lhv_table(args):
    alpha = _alpha(args)
    cutoff = _cutoff(args)
    if alpha == 0:
        raise InputError("--alpha2 must be > 0 for the local model")
    if _setup(args) == "twc":
        return lhv.build_submodel_table_twc(alpha, cutoff)
    gamma = _gamma(args)
    return lhv.build_submodel_table_gpy(alpha, gamma, cutoff, proven_region_only=not args.allow_unproven)


def cmd_lhv(args, rec: ResultRecord) -> None:
    action = args.target
    if action == "threshold":
        _lhv_threshold(args, rec)
        return
    setup = _setup(args)
    t1, t2 = _angles(args)
    rec.params.update(setup=setup, alpha2=args.alpha2, theta1=t1, theta2=t2, cutoff=args.cutoff)
    if setup == "gpy":
        rec.params["gamma"] = args.gamma
    if action == "verify":
        table = _lhv_table(args)
        report = lhv.verify_model(table, t1, t2)
        model = lhv.model_distribution(table, t1, t2)
        qm = lhv.quantum_distribution(table, t1, t2)
        rec.scalars.update(
            max_deviation=report.max_deviation,
            worst_event=list(report.worst_event) if report.worst_event else None,
            events_checked=report.n_events,
            events_uncovered=len(report.uncovered),
            n_submodels=len(table.submodels),
            total_weight=table.total_weight,
            tail=table.tail,
        )
        subs = Table(["kind", "k", "l", "r", "s", "weight", "visibility"])
        for s in table.submodels:
            subs.add(s.kind, *s.index, s.weight, s.visibility)
        ev = Table(["k", "l", "r", "s", "model", "quantum", "abs_diff", "covered"])
        skip = set(report.uncovered)
        for n, p in qm.items():
            m = model.get(n, 0.0)
            ev.add(*n, m, p, abs(m - p), n not in skip)
        rec.tables.update(submodels=subs, events=ev)
    elif action == "sample":
        if setup != "twc":
            raise InputError("sampling is implemented for the single-photon setup only")
        alpha = _alpha(args)
        if alpha == 0:
            raise InputError("--alpha2 must be > 0 for the local model")
        n = args.n if args.n is not None else 1_000_000
        seed = args.seed if args.seed is not None else 0
        if n < 1:
            raise InputError("--n must be >= 1")
        if seed < 0:
            raise InputError("--seed must be >= 0")
        cutoff = _cutoff(args)
        rec.params.update(n=n, seed=seed, streams=args.streams)
        res = lhv.sample_twc(alpha, t1, t2, seed, n, cutoff, streams=args.streams)
        z = lhv.sample_z_scores(res, alpha, t1 - t2, cutoff, min_expected=args.min_expected)
        out = Table(["k", "l", "r", "s", "count", "expected", "quantum", "z"])
        for ev, zv in z.items():
            p = cf.p_twc(ev, alpha, t1 - t2)
            out.add(*ev, res.counts.get(ev, 0), n * p, p, zv)
        rec.tables["events"] = out
        rec.scalars.update(max_abs_z=max((abs(v) for v in z.values()), default=0.0), events_tested=len(z),
                           min_expected=args.min_expected)
    else:
        raise InputError(f"unknown lhv action {action}")


def _roots_on_grid(f, lo, hi, steps=400):
    xs = np.linspace(lo, hi, steps + 1)
    vals = [f(x) for x in xs]
    from scipy.optimize import brentq

    return [brentq(f, xs[i], xs[i + 1], xtol=1e-13) for i in range(steps) if vals[i] * vals[i + 1] < 0]


def _lhv_threshold(args, rec: ResultRecord) -> None:
    setup = _setup(args)
    rec.params["setup"] = setup
    if setup == "twc":
        w = lhv.alpha_threshold_twc()
        bound_root = _roots_on_grid(lambda x: lhv.delta_twc_bound(math.sqrt(x)), 0.01, 2.0)
        exact_root = _roots_on_grid(lambda x: lhv.delta_twc(1, 0, math.sqrt(x)), 0.01, 2.0)
        rec.scalars.update(alpha2_threshold=w, bound_root=bound_root[0] if bound_root else None,
                           delta_10_root=exact_root[0] if exact_root else None)
        t = Table(["alpha2", "delta_10", "delta_20", "delta_bound"])
        for x in np.round(np.arange(0.05, 1.0001, 0.05), 10):
            a = math.sqrt(x)
            t.add(float(x), lhv.delta_twc(1, 0, a), lhv.delta_twc(2, 0, a), lhv.delta_twc_bound(a))
        rec.tables["delta"] = t
    else:
        diag = _roots_on_grid(lambda x: lhv.delta_gpy_0001(math.sqrt(x), x), 0.05, 0.99)
        rec.scalars.update(diagonal_root=diag[-1] if diag else None, proven_alpha2=lhv.GPY_PROVEN_ALPHA2)
        t = Table(["gamma", "alpha2_lower", "alpha2_upper"])
        for g in np.round(np.arange(0.0, 0.6001, 0.02), 10):
            roots = _roots_on_grid(lambda x: lhv.delta_gpy_0001(math.sqrt(x), g), 1e-4, 1.5, 300)
            lower = roots[0] if len(roots) == 2 else (0.0 if len(roots) == 1 else None)
            upper = roots[-1] if roots else None
            t.add(float(g), lower, upper)
        rec.tables["delta_boundary"] = t


def _parse_settings(text: str | None):
    if text is None:
        raise InputError("--settings 'a,a2,b,b2' is required for chsh eval")
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise InputError(f"--settings must be four comma-separated numbers, got {text!r}") from None
    if len(vals) != 4 or not all(math.isfinite(v) for v in vals):
        raise InputError(f"--settings must be four finite numbers, got {text!r}")
    return tuple(vals)


def cmd_bell(args, rec: ResultRecord) -> None:
    ineq, mode = args.target, args.mode
    if mode not in ("eval", "optimize"):
        raise InputError("mode must be eval or optimize")
    rec.params.update(inequality=ineq, mode=mode)
    if ineq == "chsh":
        alpha = _alpha(args)
        if alpha == 0:
            raise InputError("--alpha2 must be > 0")
        cutoff = _cutoff(args)
        rec.params.update(alpha2=args.alpha2, cutoff=cutoff)
        if mode == "eval":
            settings = _parse_settings(args.settings)
            res = bell.chsh_value(alpha, settings, cutoff)
        else:
            opt = bell.optimize_chsh(alpha, cutoff)
            res, settings = opt.result, opt.settings
            g = Table(["theta12", "E"])
            for row in opt.grid:
                g.add(*row)
            rec.tables["grid"] = g
        rec.scalars["settings"] = list(settings)
        _bell_scalars(rec, res)
    elif ineq == "ch":
        setup = _setup(args)
        rec.params["setup"] = setup
        if mode == "eval":
            alpha = _alpha(args)
            T = _transmittivity(args)
            rec.params.update(alpha2=args.alpha2, transmittivity=T)
            if setup == "twc":
                probs = cf.onoff_probs_twc(alpha, T)
                rec.scalars["window"] = list(bell.ch_window_twc(args.alpha2))
            else:
                rec.params["gamma"] = _gamma(args)
                probs = cf.onoff_probs_gpy(alpha, args.gamma, T)
            res = bell.ch_value(probs)
        else:
            opt = bell.optimize_ch_twc() if setup == "twc" else bell.optimize_ch_gpy()
            probs = opt.probs
            res = bell.ch_value(probs, opt.params)
            rec.scalars.update({f"opt_{k}": v for k, v in opt.params.items()})
            rec.scalars["window"] = list(opt.window)
            g = Table(list(opt.grid_columns))
            for row in opt.grid:
                g.add(*row)
            rec.tables["grid"] = g
        rec.scalars.update(probs.as_dict())
        _bell_scalars(rec, res)
    elif ineq == "cglmp":
        if mode == "eval":
            if args.lambda_ is not None:
                lam = args.lambda_
            else:
                alpha = _alpha(args)
                gamma = _gamma(args)
                if alpha == 0 and gamma == 0:
                    raise InputError("alpha2 and gamma cannot both vanish")
                lam = bell.lambda_mix(alpha, gamma)
                rec.params.update(alpha2=args.alpha2, gamma=gamma)
            if not 0 <= lam <= 1:
                raise InputError(f"--lambda must lie in [0, 1], got {lam}")
            rec.params["lambda"] = lam
            value = bell.cglmp_mixing_bound(lam)
            res = bell.BellResult("cglmp_mixing", {"lambda": lam}, value, -math.inf, 2.0)
        else:
            cross = bell.lambda_crossing(0.4)
            g = Table(["gamma", "lambda", "bound"])
            for gm in np.round(np.arange(0.01, 0.99001, 0.01), 10):
                lam = bell.lambda_mix(math.sqrt(gm), gm)
                g.add(float(gm), lam, bell.cglmp_mixing_bound(lam))
            rec.tables["grid"] = g
            rec.scalars["gamma_crossing"] = cross
            lam = bell.lambda_mix(math.sqrt(cross), cross)
            res = bell.BellResult("cglmp_mixing", {"lambda": lam}, bell.cglmp_mixing_bound(lam), -math.inf, 2.0)
            rec.scalars["lambda"] = lam
        _bell_scalars(rec, res)
    else:
        raise InputError(f"unknown inequality {ineq}")


# -- entry point --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--alpha2", type=float, help="local oscillator photon number alpha^2")
    common.add_argument("--gamma", type=float, help="squeezing parameter, 0 <= gamma < 1")
    common.add_argument("--transmittivity", type=float, help="beamsplitter transmittivity T")
    common.add_argument("--theta1", type=float)
    common.add_argument("--theta2", type=float)
    common.add_argument("--theta12", type=float, help="theta1 - theta2 (theta2 defaults to 0)")
    common.add_argument("--theta-sum", dest="theta_sum", type=float, help="theta1 + theta2")
    common.add_argument("--cutoff", type=int, default=DEFAULT_CUTOFF, help="max total photon number")
    common.add_argument("--seed", type=int)
    common.add_argument("--n", type=int, help="number of Monte Carlo runs")
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--setup", choices=("twc", "gpy"), default="twc")
    common.add_argument("--lambda", dest="lambda_", type=float, help="CGLMP mixing weight")
    common.add_argument("--settings", help="four CHSH angles a,a',b,b'")
    common.add_argument("--streams", type=int, default=8, help="independent sampler streams")
    common.add_argument("--min-expected", dest="min_expected", type=float, default=100.0)
    common.add_argument("--allow-unproven", action="store_true",
                        help="build the squeezed-vacuum model outside the proven region, checking Delta directly")
    common.add_argument("--timing", action="store_true", help="record wall-clock duration (breaks byte identity)")

    p = argparse.ArgumentParser(prog="photonic-bell-lab", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    sp = sub.add_parser("prob", parents=[common], help="outcome probabilities")
    sp.add_argument("target", choices=("twc", "gpy"))
    sp.set_defaults(func=cmd_prob)
    sl = sub.add_parser("lhv", parents=[common], help="local hidden-variable models")
    sl.add_argument("target", choices=("verify", "sample", "threshold"))
    sl.set_defaults(func=cmd_lhv)
    sb = sub.add_parser("bell", parents=[common], help="Bell inequalities")
    sb.add_argument("target", choices=("chsh", "ch", "cglmp"))
    sb.add_argument("mode", choices=("eval", "optimize"))
    sb.set_defaults(func=cmd_bell)
    return p


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    rec = ResultRecord(command=argv, params={})
    start = time.perf_counter()
    try:
        args.func(args, rec)
        if args.timing:
            rec.duration_s = time.perf_counter() - start
        text = rec.to_json() if args.format == "json" else rec.to_csv()
        if args.out:
            write_atomic(args.out, text)
        else:
            sys.stdout.write(text)
    except lhv.ModelValidityError as exc:
        print(f"error: model validity violated: {exc}", file=sys.stderr)
        return EXIT_VALIDITY
    except (InputError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # invariant failures and bugs
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
