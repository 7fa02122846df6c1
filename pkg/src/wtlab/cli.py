"""``wt`` command-line front end.

Exit status: 0 when every verdict passes, 2 when a verdict fails or a
numerical error is recorded, 1 on usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .acceptance import run_all
from .errors import SpecError, WTError
from .examples_catalog import CATALOG, schrodinger_terms
from .extension_calculus import group_map, orbit_period
from .functional_model import (
    build_model,
    commutation_residual,
    interior_range,
    isometry_defect,
    s_type_matrix,
    spectral_shift_residual,
    weyl_relation_residual,
    wt_from_model,
)
from .herglotz_eval import EvalGrid, HerglotzFunction, eval_M, eval_M_tau, herglotz_report
from .linalg import opnorm, random_unitary, unitarity_defect
from .report import FAIL, PASS, SKIP, Check, Report, matrix_to_json, values_csv
from .spectral_measure import (
    SIGMA,
    TAU,
    Z_CHUNK,
    measure_periodicity_residual,
    sigma_from_tau,
    tau_from_sigma,
)
from .specio import context_from_spec, grid_from_spec, load_json, measure_from_spec
from .stieltjes_inversion import WEIGHTS, ContourSchedule, invert_interval, measure_phi
from .tolerances import DEFAULTS, resolve

EXIT_OK, EXIT_USAGE, EXIT_FAIL = 0, 1, 2
ORBIT_SEED = 7


class UsageError(Exception):
    def __init__(self, message, path=None, pointer=None):
        super().__init__(message)
        self.path = path
        self.pointer = pointer


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        _emit_error(f"usage: {message}")
        raise SystemExit(EXIT_USAGE)


@dataclass
class RunConfig:
    subcommand: str
    args: argparse.Namespace
    tolerances: dict = field(default_factory=dict)
    fmt: str = "json"
    out: str | None = None
    csv: str | None = None
    jobs: int = 1


# --------------------------------------------------------------------------
# helpers


def parse_complex(s: str) -> complex:
    t = s.strip().replace(" ", "").replace("I", "i").replace("i", "j")
    t = re.sub(r"(^|[+-])j", r"\g<1>1j", t)
    try:
        return complex(t)
    except ValueError as exc:
        raise UsageError(f"cannot parse complex number '{s}'") from exc


def parse_tolerances(items) -> dict:
    out = {}
    for it in items or []:
        if "=" not in it:
            raise UsageError(f"tolerance override '{it}' must look like name=value")
        k, v = it.split("=", 1)
        try:
            out[k.strip()] = float(v)
        except ValueError as exc:
            raise UsageError(f"tolerance '{k}' is not a number") from exc
    try:
        return resolve(out)
    except (KeyError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


def _load(path, what="input"):
    try:
        return load_json(path)
    except SpecError as exc:
        raise UsageError(str(exc), path=str(path)) from exc


def _measure(path):
    doc = _load(path)
    try:
        return measure_from_spec(doc)
    except SpecError as exc:
        raise UsageError(str(exc), path=str(path), pointer=exc.pointer) from exc
    except WTError as exc:
        raise UsageError(f"{type(exc).__name__}: {exc}", path=str(path),
                         pointer=getattr(exc, "pointer", "")) from exc


def _grid(source: str | None, n: int = 20) -> EvalGrid:
    if source in (None, "default"):
        return EvalGrid.standard(n)
    doc = _load(source)
    try:
        return grid_from_spec(doc)
    except SpecError as exc:
        raise UsageError(str(exc), path=source, pointer=exc.pointer) from exc


def _params(text: str | None) -> dict:
    if not text:
        return {}
    try:
        p = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"--params is not valid JSON: {exc}") from exc
    if not isinstance(p, dict):
        raise UsageError("--params must be a JSON object")
    return p


def parallel_values(F: HerglotzFunction, zs: np.ndarray, jobs: int) -> np.ndarray:
    """Evaluate in fixed chunks (independent of ``jobs``) and gather by index."""
    chunks = [zs[s:s + Z_CHUNK] for s in range(0, zs.size, Z_CHUNK)]
    if jobs <= 1 or len(chunks) == 1:
        parts = [F.values(c) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(F.values, chunks))
    return np.concatenate(parts, axis=0) if parts else np.zeros((0, F.dim, F.dim), complex)


def _function(args) -> HerglotzFunction:
    if getattr(args, "measure", None):
        ms = _measure(args.measure)
        return HerglotzFunction.from_measure(ms if ms.kind == SIGMA else sigma_from_tau(ms))
    if getattr(args, "example", None):
        entry = _entry(args.example)
        try:
            return entry.function(_params(getattr(args, "params", None)))
        except (KeyError, ValueError) as exc:
            raise UsageError(str(exc)) from exc
    raise UsageError("give --measure or --example")


def _entry(eid):
    if eid not in CATALOG:
        raise UsageError(f"unknown example '{eid}' (known: {sorted(CATALOG)} and 'schrodinger')")
    return CATALOG[eid]


def _values_data(zs, vals):
    return {"points": [[float(z.real), float(z.imag)] for z in zs],
            "values": [matrix_to_json(v) for v in vals]}


# --------------------------------------------------------------------------
# subcommands


def cmd_eval(cfg: RunConfig):
    a = cfg.args
    ms = _measure(a.measure)
    zs = np.array([parse_complex(z) for z in a.z]) if a.z else _grid(a.grid).points
    rep = Report(subject="eval")
    try:
        if a.tau:
            tau = ms if ms.kind == TAU else tau_from_sigma(ms)
            vals, err = eval_M_tau(tau, zs, full_output=True)
        else:
            sig = ms if ms.kind == SIGMA else sigma_from_tau(ms)
            vals, err = eval_M(sig, zs, full_output=True)
        rep.data.update(_values_data(zs, vals))
        rep.data["error_estimate"] = err
        rep.data["representation"] = "tau" if a.tau else "sigma"
    except WTError as exc:
        rep.record_error({"stage": "eval"}, exc)
        vals = None
    return rep, (values_csv(zs, vals) if vals is not None else None)


def cmd_check(cfg: RunConfig):
    F = _function(cfg.args)
    grid = _grid(cfg.args.grid)
    rep = herglotz_report(F, grid, cfg.tolerances)
    csv_text = None
    try:
        vals = parallel_values(F, grid.points, cfg.jobs)
        rep.data.update(_values_data(grid.points, vals))
        csv_text = values_csv(grid.points, vals)
    except WTError as exc:
        rep.record_error({"stage": "values"}, exc)
    return rep, csv_text


def cmd_period(cfg: RunConfig):
    a = cfg.args
    F = _function(a)
    b = a.b if a.b is not None else F.period
    if b is None or b == 0:
        raise UsageError("--b is required (and nonzero) when no period is declared")
    grid = _grid(a.grid)
    rep = Report(subject="period")
    try:
        zs = grid.points
        r = opnorm(parallel_values(F, zs + b, cfg.jobs) - parallel_values(F, zs, cfg.jobs))
        rep.add(Check("function_period_residual", r, cfg.tolerances["period"]))
    except WTError as exc:
        rep.record_error({"stage": "period"}, exc)
        rep.add(Check("function_period_residual", None, cfg.tolerances["period"]))
    rep.data["b"] = b
    if F.measure is not None:
        tau = tau_from_sigma(F.measure)
        w = max(4 * abs(b), 10.0)
        rep.data["measure_periodicity_residual"] = measure_periodicity_residual(tau, b, (-w, w), 16)
    return rep, None


def cmd_invert(cfg: RunConfig):
    a = cfg.args
    ms = _measure(a.measure)
    try:
        sched = ContourSchedule(a.alpha, a.beta, a.eps0, a.ratio, a.k, a.nodes, WEIGHTS[a.phi])
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    rep = Report(subject="invert")
    try:
        res = invert_interval(measure_phi(ms if ms.kind == SIGMA else sigma_from_tau(ms)), sched)
        rep.data.update({"estimate": matrix_to_json(res.estimate), "error": res.error,
                         "order": res.order,
                         "per_eps": [{"eps": e, "value": matrix_to_json(v)} for e, v in res.per_eps]})
    except WTError as exc:
        rep.record_error({"stage": "invert"}, exc)
    return rep, None


def cmd_orbit(cfg: RunConfig):
    a = cfg.args
    doc = _load(a.ctx)
    try:
        ctx, V0 = context_from_spec(doc)
    except SpecError as exc:
        raise UsageError(str(exc), path=a.ctx, pointer=exc.pointer) from exc
    if V0 is None:
        # the identity can be a fixed point of a periodic map, so start generic
        V0 = random_unitary(ctx.dim, np.random.default_rng(ORBIT_SEED))
    rep = Report(subject="orbit")
    tol = a.tol if a.tol is not None else cfg.tolerances["orbit"]
    try:
        T1 = group_map(ctx, V0, 1)
        rep.add(Check("T1 unitarity defect", unitarity_defect(T1), cfg.tolerances["orbit"]))
        rep.data["period"] = orbit_period(ctx, V0, a.nmax, tol)
        rep.data["T1_V0"] = matrix_to_json(T1)
    except WTError as exc:
        rep.record_error({"stage": "orbit"}, exc)
    rep.data.update({"n_max": a.nmax, "tol": tol})
    return rep, None


def cmd_model(cfg: RunConfig):
    a = cfg.args
    ms = _measure(a.measure)
    if ms.kind != SIGMA:
        ms = sigma_from_tau(ms)
    rep = Report(subject="model")
    tol = cfg.tolerances
    want = {"commutation", "spectral_shift", "wt_consistency", "weyl_sweep"} if a.report == "all" else {a.report}
    try:
        model = build_model(ms, a.layers)
    except (WTError, ValueError) as exc:
        raise UsageError(f"{type(exc).__name__}: {exc}", path=a.measure) from exc
    rep.data["points"] = model.N
    b = a.b if a.b is not None else model.step
    shift_ok = model.step is not None and b is not None
    U = None
    if shift_ok and want & {"commutation", "spectral_shift"}:
        try:
            U = s_type_matrix(model, np.eye(model.dim), b)
            rep.data["isometry_defect"] = isometry_defect(model, U)
        except WTError as exc:
            rep.record_error({"stage": "s_type_matrix"}, exc)
    if "commutation" in want:
        if U is not None:
            rep.add(Check("commutation", commutation_residual(model, U, b), tol["commutation"]))
        else:
            rep.add(Check("commutation", None, tol["commutation"], status=SKIP if not shift_ok else "",
                          detail="lattice is not an arithmetic progression" if not shift_ok else ""))
    if "spectral_shift" in want:
        if U is not None:
            try:
                if a.delta:
                    delta = tuple(a.delta)
                else:
                    lo, _ = interior_range(model)
                    delta = (lo + 0.4 * model.step, lo + 2.6 * model.step)
                rep.data["delta"] = list(delta)
                rep.add(Check("spectral_shift", spectral_shift_residual(model, U, b, delta),
                              tol["spectral_shift"]))
            except WTError as exc:
                rep.record_error({"stage": "spectral_shift"}, exc)
                rep.add(Check("spectral_shift", None, tol["spectral_shift"]))
        else:
            rep.add(Check("spectral_shift", None, tol["spectral_shift"], status=SKIP if not shift_ok else "",
                          detail="lattice is not an arithmetic progression" if not shift_ok else ""))
    if "wt_consistency" in want:
        zs = EvalGrid.standard(10).points
        r = opnorm(wt_from_model(model, zs) - eval_M(ms, zs))
        rep.add(Check("wt_consistency", r, tol["wt_consistency"]))
    if "weyl_sweep" in want:
        lam = np.arange(-1000, 1001) * 0.01
        f = np.exp(-lam**2)
        table = []
        for s in (-2.0, 0.5, 1.5):
            for t in (-1.0, 0.7, 3.0):
                for w in (1.0, 1j, np.exp(1j * np.pi / 3)):
                    table.append({"s": s, "t": t, "omega": [float(np.real(w)), float(np.imag(w))],
                                  "residual": weyl_relation_residual(s, t, w, lam, f)})
        rep.data["weyl_sweep"] = table
        rep.add(Check("weyl_sweep", max(r["residual"] for r in table), tol["weyl"]))
    return rep, None


def cmd_example(cfg: RunConfig):
    a = cfg.args
    if a.id == "schrodinger":
        return _schrodinger(cfg)
    entry = _entry(a.id)
    try:
        params = entry.params(_params(a.params))
        F = entry.function(params)
    except (KeyError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    rep = Report(subject=f"example:{a.id}")
    zs = np.array([parse_complex(z) for z in a.z]) if a.z else _grid(a.grid).points
    csv_text = None
    try:
        vals = parallel_values(F, zs, cfg.jobs)
        rep.data.update(_values_data(zs, vals))
        csv_text = values_csv(zs, vals)
    except WTError as exc:
        rep.record_error({"stage": "values"}, exc)
    if a.sweep_period:
        grid = _grid(a.grid)
        table = []
        per = entry.period(params)
        if per is not None:
            cands = [(per, "declared", "<=")] + [(per / d, f"declared/{d}", ">=") for d in entry.sweep_divisors]
        else:
            cands = [(2 * np.pi * n, f"2pi*{n}", ">=") for n in range(1, 51)]
        for b, label, rel in cands:
            try:
                r = opnorm(F.values(grid.points + b) - F.values(grid.points))
            except WTError as exc:
                rep.record_error({"stage": "sweep", "b": b}, exc)
                r = None
            table.append({"b": b, "label": label, "residual": r})
            t = cfg.tolerances["normalization_closed"] if rel == "<=" else 1e-3
            rep.add(Check(f"period residual at {label}", r, t, rel))
        rep.data["sweep"] = table
    return rep, csv_text


def _schrodinger(cfg: RunConfig):
    p = {"s": 1.3, "vhat": {"1": [0.3, 0.1], "-1": [0.3, -0.1]}, "h": 1e-3, "half_width": 8.0,
         "gamma": 1.0, "order": 4}
    given = _params(cfg.args.params)
    unknown = set(given) - set(p)
    if unknown:
        raise UsageError(f"unknown schrodinger parameters {sorted(unknown)}")
    p.update(given)
    try:
        vh = {int(k): complex(v[0], v[1]) if isinstance(v, list) else complex(v) for k, v in p["vhat"].items()}
    except (TypeError, ValueError, IndexError) as exc:
        raise UsageError(f"bad vhat: {exc}") from exc
    h = float(p["h"])
    n = int(round(float(p["half_width"]) / h))
    t = np.arange(-n, n + 1) * h
    f = np.exp(-t**2)
    rep = Report(subject="example:schrodinger")
    try:
        r = schrodinger_terms(float(p["s"]), vh, t, f, float(p["gamma"]), int(p["order"]))
        res = float(np.max(np.abs(r["lhs"] - r["rhs"])))
        rep.add(Check("commutator identity residual", res, cfg.tolerances["schrodinger"]))
        rep.data.update({"s": p["s"], "h": h, "order": p["order"],
                         "max_potential_term": float(np.max(np.abs(r["potential_term"])))})
    except (WTError, ValueError) as exc:
        rep.record_error({"stage": "schrodinger"}, exc)
    return rep, None


def cmd_selftest(cfg: RunConfig):
    rep = Report(subject="selftest")
    for c in run_all():
        bad = [ch for ch in c.checks if not ch.ok]
        rep.add(Check(f"criterion {c.number}: {c.title}", float(len(bad)), 0.0,
                      status=PASS if c.passed else FAIL, detail=bad[0].line() if bad else ""))
        rep.data[f"criterion_{c.number}"] = [ch.to_dict() for ch in c.checks]
        print(c.line(), file=sys.stderr)
    return rep, None


COMMANDS = {"eval": cmd_eval, "check": cmd_check, "period": cmd_period, "invert": cmd_invert,
            "orbit": cmd_orbit, "model": cmd_model, "example": cmd_example, "selftest": cmd_selftest}


# --------------------------------------------------------------------------
# parser and driver


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", action="append", metavar="NAME=VALUE",
                        help=f"override a tolerance ({', '.join(sorted(DEFAULTS))})")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", help="write the main output here instead of stdout")
    common.add_argument("--csv", help="also write evaluated values as CSV")
    common.add_argument("--jobs", type=int, default=1, help="worker threads (results do not depend on it)")

    p = _Parser(prog="wt", description="Matrix Weyl-Titchmarsh function toolkit")
    p.add_argument("--version", action="version", version=f"wt {__version__}")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    s = sub.add_parser("eval", parents=[common], help="evaluate M(z) from a measure")
    s.add_argument("--measure", required=True)
    s.add_argument("--z", action="append", help="complex point such as 0.5+2i (repeatable)")
    s.add_argument("--grid")
    s.add_argument("--tau", action="store_true", help="use the tau-kernel representation")

    for name, hlp in (("check", "Herglotz class checks"), ("period", "function-level period residual")):
        s = sub.add_parser(name, parents=[common], help=hlp)
        g = s.add_mutually_exclusive_group(required=True)
        g.add_argument("--measure")
        g.add_argument("--example", help="catalog id")
        s.add_argument("--params")
        s.add_argument("--grid", default="default")
        if name == "period":
            s.add_argument("--b", type=float)

    s = sub.add_parser("invert", parents=[common], help="recover an interval mass by contour inversion")
    s.add_argument("--measure", required=True)
    s.add_argument("--alpha", type=float, required=True)
    s.add_argument("--beta", type=float, required=True)
    s.add_argument("--phi", choices=sorted(WEIGHTS), default="one")
    s.add_argument("--eps0", type=float)
    s.add_argument("--ratio", type=float, default=0.5)
    s.add_argument("--k", type=int, default=6)
    s.add_argument("--nodes", type=int, default=512)

    s = sub.add_parser("orbit", parents=[common], help="orbit period of the shift action")
    s.add_argument("--ctx", required=True)
    s.add_argument("--nmax", type=int, default=200)
    s.add_argument("--orbit-tol", dest="orbit_tol", type=float, help="orbit tolerance (also accepted as --tol X)")

    s = sub.add_parser("model", parents=[common], help="finite model residual tables")
    s.add_argument("--measure", required=True)
    s.add_argument("--layers", type=int, default=4)
    s.add_argument("--b", type=float)
    s.add_argument("--delta", type=float, nargs=2, metavar=("A", "B"))
    s.add_argument("--report", choices=("all", "commutation", "spectral_shift", "wt_consistency", "weyl_sweep"),
                   default="all")

    s = sub.add_parser("example", parents=[common], help="closed-form catalog entries")
    s.add_argument("--id", required=True, choices=sorted(CATALOG) + ["schrodinger"])
    s.add_argument("--params")
    s.add_argument("--z", action="append")
    s.add_argument("--grid")
    s.add_argument("--sweep-period", action="store_true")

    sub.add_parser("selftest", parents=[common], help="run the acceptance suite")
    return p


def _emit_error(message, path=None, pointer=None):
    doc = {"error": message}
    if path is not None:
        doc["path"] = path
    if pointer is not None:
        doc["pointer"] = pointer
    print(json.dumps(doc, sort_keys=True), file=sys.stderr)


def _fix_orbit_tol(argv):
    # `orbit --tol 1e-6` is the orbit tolerance; elsewhere --tol is NAME=VALUE.
    if argv and argv[0] == "orbit":
        out = []
        it = iter(argv)
        for x in it:
            if x == "--tol":
                nxt = next(it, None)
                if nxt is not None and "=" not in nxt:
                    out += ["--orbit-tol", nxt]
                    continue
                out += [x] + ([nxt] if nxt is not None else [])
            else:
                out.append(x)
        return out
    return argv


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    argv = _fix_orbit_tol(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.cmd == "orbit":
        args.tol_override = args.tol
        args.tol = args.orbit_tol
    try:
        tol_items = getattr(args, "tol_override", None) if args.cmd == "orbit" else args.tol
        cfg = RunConfig(args.cmd, args, parse_tolerances(tol_items), args.format, args.out, args.csv,
                        max(1, args.jobs))
        rep, csv_text = COMMANDS[args.cmd](cfg)
    except UsageError as exc:
        _emit_error(str(exc), exc.path, exc.pointer)
        return EXIT_USAGE
    text = rep.to_json() if cfg.fmt == "json" else (csv_text or "")
    if cfg.out:
        Path(cfg.out).write_text(text + ("\n" if cfg.fmt == "json" else ""))
    else:
        sys.stdout.write(text + ("\n" if cfg.fmt == "json" else ""))
    if cfg.csv and csv_text is not None:
        Path(cfg.csv).write_text(csv_text)
    return EXIT_OK if rep.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
