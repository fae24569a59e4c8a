"""Command-line interface: ``taperbeam {solve,reproduce,sweep,compare,loss-study}``."""

from __future__ import annotations

import argparse
import datetime as _dt
import itertools
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .model import BeamConfig
from .pinn import default_seed
from .report import RunRecord, csv_text, svg_line_plot
from .solvers import METHOD_ALIASES, SolverOptions, analytic_applicable, parse_method, sample_many
from .tables import (LOSS_TABLES, TABLE_IDS, get_table, loss_case_config, loss_case_published,
                     loss_checks, loss_study, reproduce_deflections)

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

CONFIG_DEFAULTS = {"alpha": 1.0, "n": 0, "phi": 0.0, "psi": 0.0, "gamma": 0.0, "q0": 1.0, "kp": 0.0, "bc": "ss"}
SOLVER_DEFAULTS = {
    "order": 15, "galerkin_n": 15, "grid_points": 100, "grid_kind": "uniform", "fd_grid": 401,
    "seed": None, "hidden_layers": 3, "outer_steps": None, "inner_iterations": None,
}
RUN_DEFAULTS = {"method": "dfl-tfc", "at": [0.1, 0.5, 0.9], "workers": None, "timings": False}
# config field -> flag, for error messages
FLAG_OF = {"alpha": "--alpha", "n_holes": "--n", "phi": "--phi", "psi": "--psi", "gamma": "--gamma",
           "q0": "--q0", "kp": "--kp", "bc": "--bc", "taper": "--phi/--psi"}
SWEEPABLE = ("alpha", "n", "phi", "psi", "gamma", "q0", "kp")


class CliError(Exception):
    """Bad user input; reported without a traceback and exit status 2."""


# ----------------------------------------------------------------------------- parsing helpers

def _add_config_flags(p):
    g = p.add_argument_group("beam configuration")
    g.add_argument("--config", type=Path, help="TOML or JSON file with any of these options; flags win")
    g.add_argument("--alpha", type=float, help="filling ratio in (0, 1]")
    g.add_argument("--n", type=int, help="number of hole rows N")
    g.add_argument("--phi", type=float, help="linear taper coefficient")
    g.add_argument("--psi", type=float, help="quadratic taper coefficient")
    g.add_argument("--gamma", type=float, help="load exponent")
    g.add_argument("--q0", type=float, help="load amplitude")
    g.add_argument("--kp", type=float, help="foundation shear parameter")
    g.add_argument("--bc", choices=["ss", "cs", "SS", "CS", "s-s", "c-s"], help="supports (default ss)")


def _add_solver_flags(p):
    g = p.add_argument_group("solver settings")
    g.add_argument("--order", type=int, help="highest Chebyshev degree (default 15)")
    g.add_argument("--galerkin-n", type=int, help="Galerkin polynomial count n (default 15)")
    g.add_argument("--grid-points", type=int, help="collocation points (default 100)")
    g.add_argument("--grid-kind", choices=["uniform", "chebyshev-gauss-lobatto"])
    g.add_argument("--fd-grid", type=int, help="finite-difference nodes, >= 201 (default 401)")
    g.add_argument("--seed", type=int, help="PINN seed (default $TAPERBEAM_SEED or 42)")
    g.add_argument("--hidden-layers", type=int, help="PINN hidden layers (default 3)")
    g.add_argument("--outer-steps", type=int, help="override L-BFGS outer steps")
    g.add_argument("--inner-iterations", type=int, help="override L-BFGS iterations per step")


def _add_output_flags(p, csv=True, svg=False, json_out=False):
    g = p.add_argument_group("output")
    if csv:
        g.add_argument("--csv", type=Path, help="write samples as CSV ('-' for stdout)")
        g.add_argument("--timings", action="store_true", default=None,
                       help="fill the wall_time_s CSV column (makes CSV machine dependent)")
    if svg:
        g.add_argument("--svg", type=Path, help="write a line plot")
    if json_out:
        g.add_argument("--json", type=Path, help="write the JSON run record")


def _points(text):
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 <= x <= 1.0:
        raise argparse.ArgumentTypeError(f"sample point {x} outside [0, 1]")
    return x


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="taperbeam",
        description="Bending of tapered perforated beams on a Pasternak foundation.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    methods = sorted(METHOD_ALIASES)

    p = sub.add_parser("solve", help="solve one configuration")
    _add_config_flags(p)
    _add_solver_flags(p)
    p.add_argument("--method", choices=methods)
    p.add_argument("--at", type=_points, nargs="+", help="sample points X (default 0.1 0.5 0.9)")
    _add_output_flags(p, json_out=True)

    p = sub.add_parser("reproduce", help="recompute a published table and check every cell")
    p.add_argument("table_id", choices=TABLE_IDS)
    p.add_argument("--workers", type=int)
    p.add_argument("--seed", type=int, help="PINN seed for loss tables")
    _add_output_flags(p, svg=True)

    p = sub.add_parser("sweep", help="vary one or two parameters")
    _add_config_flags(p)
    _add_solver_flags(p)
    p.add_argument("--vary", action="append", required=True, metavar="NAME=SPEC",
                   help="parameter to sweep: NAME=start:stop:count or NAME=v1,v2,...; at most twice")
    p.add_argument("--method", choices=methods, action="append", help="repeatable (default dfl-tfc)")
    p.add_argument("--at", type=_points, nargs="+")
    p.add_argument("--workers", type=int, help="process pool size (default min(4, cpus))")
    _add_output_flags(p, svg=True)

    p = sub.add_parser("compare", help="run every method on one configuration")
    _add_config_flags(p)
    _add_solver_flags(p)
    p.add_argument("--at", type=_points, nargs="+")
    p.add_argument("--workers", type=int)
    _add_output_flags(p)

    p = sub.add_parser("loss-study", help="PINN depth versus DFL-TFC order: losses and timings")
    _add_config_flags(p)
    p.add_argument("--layers", type=int, nargs="+", default=[1, 2, 3])
    p.add_argument("--orders", type=int, nargs="+", default=[13, 14, 15])
    p.add_argument("--seed", type=int)
    _add_output_flags(p, csv=False, svg=True, json_out=True)
    return parser


def _read_config_file(path: Path) -> dict:
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise CliError(f"--config: cannot read {path}: {exc.strerror}") from None
    try:
        data = json.loads(raw) if path.suffix.lower() == ".json" else tomllib.loads(raw.decode())
    except (ValueError, tomllib.TOMLDecodeError) as exc:
        raise CliError(f"--config: cannot parse {path}: {exc}") from None
    if not isinstance(data, dict):
        raise CliError(f"--config: {path} must hold a table of options")
    data = {str(k).replace("-", "_"): v for k, v in data.items()}
    if "n_holes" in data:
        data.setdefault("n", data.pop("n_holes"))
    return data


def resolve(args) -> dict:
    """Defaults, then the config file, then explicit flags."""
    opts = {**CONFIG_DEFAULTS, **SOLVER_DEFAULTS, **RUN_DEFAULTS}
    path = getattr(args, "config", None)
    if path is not None:
        file_opts = _read_config_file(path)
        unknown = sorted(set(file_opts) - set(opts))
        if unknown:
            raise CliError(f"--config: unknown option(s) {', '.join(unknown)}")
        opts.update(file_opts)
    opts.update({k: v for k, v in vars(args).items() if v is not None})
    return opts


def make_config(opts: dict) -> BeamConfig:
    try:
        return BeamConfig(alpha=float(opts["alpha"]), n_holes=opts["n"], phi=float(opts["phi"]),
                          psi=float(opts["psi"]), gamma=float(opts["gamma"]), q0=float(opts["q0"]),
                          kp=float(opts["kp"]), bc=opts["bc"])
    except (TypeError, ValueError) as exc:
        msg = str(exc)
        field = "taper" if msg.startswith("taper") else msg.split(" ", 1)[0]
        flag = FLAG_OF.get(field, "configuration")
        raise CliError(f"{flag}: {msg}") from None


def make_options(opts: dict) -> SolverOptions:
    seed = opts["seed"] if opts.get("seed") is not None else default_seed()
    so = SolverOptions(order=opts["order"], galerkin_n=opts["galerkin_n"], grid_points=opts["grid_points"],
                       grid_kind=opts["grid_kind"], fd_grid=opts["fd_grid"], seed=seed,
                       hidden_layers=opts["hidden_layers"], outer_steps=opts["outer_steps"],
                       inner_iterations=opts["inner_iterations"])
    checks = [("--order", so.order >= 4, "must be at least 4"),
              ("--galerkin-n", 5 <= so.galerkin_n <= 20, "must lie in [5, 20]"),
              ("--grid-points", so.grid_points >= so.order + 1, "must be at least order + 1"),
              ("--fd-grid", so.fd_grid >= 201, "must be at least 201"),
              ("--hidden-layers", so.hidden_layers >= 1, "must be at least 1"),
              ("--outer-steps", so.outer_steps is None or so.outer_steps >= 1, "must be positive"),
              ("--inner-iterations", so.inner_iterations is None or so.inner_iterations >= 1, "must be positive")]
    for flag, ok, why in checks:
        if not ok:
            raise CliError(f"{flag} {why}")
    return so


def _workers(opts) -> int:
    w = opts.get("workers")
    if w is None:
        return min(4, os.cpu_count() or 1)
    if w < 1:
        raise CliError("--workers must be at least 1")
    return w


def _show(v: float) -> str:
    v = round(float(v), 4) + 0.0  # no "-0.0000"
    return f"{v:.4f}"


def _emit(path, text: str, out) -> None:
    if path is None:
        return
    if str(path) == "-":
        out.write(text)
    else:
        Path(path).write_text(text)


# ----------------------------------------------------------------------------- commands

def cmd_solve(opts, out) -> int:
    cfg = make_config(opts)
    so = make_options(opts)
    method = parse_method(opts["method"])
    s = sample_many([(cfg, method, opts["at"], so)])[0]
    if s.error:
        raise CliError(f"--method {opts['method']}: {s.error}")
    loss = "n/a" if s.final_loss is None else f"{s.final_loss:.4e}"
    print(f"method {method.value}  bc {cfg.bc.value}  loss {loss}  time {s.wall_time:.3f} s", file=out)
    print(f"{'X':>8}  {'W_tilde':>12}", file=out)
    for x, w in zip(s.X, s.W_tilde):
        print(f"{x:8.4f}  {_show(w):>12}", file=out)
    timings = bool(opts.get("timings"))
    rows = [{"param_name": "", "param_value": "", "X": x, "W_tilde": w, "method": s.method,
             "loss": s.final_loss, "wall_time_s": s.wall_time if timings else None}
            for x, w in zip(s.X, s.W_tilde)]
    _emit(opts.get("csv"), csv_text(rows), out)
    if opts.get("json") is not None:
        rec = RunRecord(cfg.as_dict(), s.method, so.as_dict(), [[x, w] for x, w in zip(s.X, s.W_tilde)],
                        s.final_loss, s.wall_time, __version__,
                        so.seed if method.value == "pinn" else None,
                        _dt.datetime.now(_dt.timezone.utc).isoformat(), {"trace": s.trace, "info": s.info})
        _emit(opts["json"], rec.to_json() + "\n", out)
    return 0


def _parse_vary(spec: str):
    name, sep, rhs = spec.partition("=")
    name = name.strip().replace("n_holes", "n")
    if not sep or name not in SWEEPABLE:
        raise CliError(f"--vary {spec!r}: expected NAME=SPEC with NAME in {', '.join(SWEEPABLE)}")
    try:
        if ":" in rhs:
            a, b, k = rhs.split(":")
            values = [float(v) for v in np.linspace(float(a), float(b), int(k))]
        else:
            values = [float(v) for v in rhs.split(",") if v.strip()]
    except ValueError:
        raise CliError(f"--vary {spec!r}: cannot parse range") from None
    if not values:
        raise CliError(f"--vary {spec!r}: empty range")
    if name == "n":
        if any(not v.is_integer() for v in values):
            raise CliError(f"--vary {spec!r}: N takes integer values")
        values = [int(v) for v in values]
    return name, values


def _label(v) -> str:
    return f"{v:g}" if isinstance(v, float) else str(v)


def cmd_sweep(opts, out) -> int:
    varies = [_parse_vary(s) for s in opts["vary"]]
    if len(varies) > 2:
        raise CliError("--vary accepts at most two parameters")
    if len({n for n, _ in varies}) != len(varies):
        raise CliError("--vary: the two swept parameters must differ")
    so = make_options(opts)
    methods = opts["method"] if isinstance(opts["method"], list) else [opts["method"]]
    methods = [parse_method(m).value for m in methods]
    names = [n for n, _ in varies]
    combos = list(itertools.product(*[v for _, v in varies]))
    cfgs = [make_config({**opts, **dict(zip(names, combo))}) for combo in combos]
    tasks = [(cfg, m, opts["at"], so) for cfg in cfgs for m in methods]
    samples = iter(sample_many(tasks, _workers(opts)))
    timings = bool(opts.get("timings"))
    rows, failed = [], []
    curves: dict = {}
    for combo in combos:
        for m in methods:
            s = next(samples)
            pv = "&".join(_label(v) for v in combo) if len(combo) > 1 else combo[0]
            if s.error:
                failed.append(f"{'&'.join(names)}={pv} {m}: {s.error}")
                continue
            for x, w in zip(s.X, s.W_tilde):
                rows.append({"param_name": "&".join(names), "param_value": pv, "X": x, "W_tilde": w,
                             "method": m, "loss": s.final_loss,
                             "wall_time_s": s.wall_time if timings else None})
                key = f"X={x:g}" + (f" {names[1]}={_label(combo[1])}" if len(combo) > 1 else "")
                key += f" {m}" if len(methods) > 1 else ""
                curves.setdefault(key, ([], []))
                curves[key][0].append(float(combo[0]))
                curves[key][1].append(w)
    text = csv_text(rows)
    _emit(opts.get("csv") if opts.get("csv") is not None else "-", text, out)
    if opts.get("svg") is not None and curves:
        Path(opts["svg"]).write_text(svg_line_plot(curves, f"Deflection versus {names[0]}", names[0], "W_tilde"))
    for f in failed:
        print(f"failed: {f}", file=sys.stderr)
    return 1 if failed else 0


def cmd_compare(opts, out) -> int:
    cfg = make_config(opts)
    so = make_options(opts)
    methods = ["dfl-tfc", "dfl-tfc-lbfgs", "galerkin", "pinn", "fd"]
    if analytic_applicable(cfg):
        methods.append("analytic")
    xs = opts["at"]
    samples = sample_many([(cfg, m, xs, so) for m in methods], _workers(opts))
    ref = samples[0]
    head = f"{'method':<15}" + "".join(f"{'X=' + format(x, 'g'):>11}" for x in xs)
    print(head + f"{'max|diff|':>12}{'loss':>12}{'time s':>9}", file=out)
    rows = []
    for s in samples:
        if s.error:
            print(f"{s.method:<15}failed: {s.error}", file=out)
            continue
        diff = max(abs(a - b) for a, b in zip(s.W_tilde, ref.W_tilde))
        loss = "n/a" if s.final_loss is None else f"{s.final_loss:.2e}"
        print(f"{s.method:<15}" + "".join(f"{_show(w):>11}" for w in s.W_tilde)
              + f"{diff:12.2e}{loss:>12}{s.wall_time:9.3f}", file=out)
        for x, w in zip(s.X, s.W_tilde):
            rows.append({"param_name": "", "param_value": "", "X": x, "W_tilde": w, "method": s.method,
                         "loss": s.final_loss, "wall_time_s": s.wall_time if opts.get("timings") else None})
    print("max|diff| is measured against the dfl-tfc row", file=out)
    _emit(opts.get("csv"), csv_text(rows), out)
    return 0


def _print_loss_rows(rows, out):
    print(f"{'method':<9}{'setting':>9}{'loss':>13}{'time s':>9}{'published loss':>16}{'published s':>13}",
          file=out)
    for r in rows:
        kind = "layers" if r.method == "pinn" else "order"
        loss = "failed" if r.loss is None else f"{r.loss:.4e}"
        pl = "" if r.published_loss is None else f"{r.published_loss:.4e}"
        pt = "" if r.published_time is None else f"{r.published_time:.2f}"
        print(f"{r.method:<9}{kind + ' ' + str(r.setting):>9}{loss:>13}{r.wall_time:9.3f}{pl:>16}{pt:>13}",
              file=out)


def _loss_svg(rows, title):
    curves = {}
    for r in rows:
        if r.trace:
            label = f"pinn {r.setting} layer(s)" if r.method == "pinn" else f"dfl-tfc order {r.setting}"
            curves[label] = (list(range(1, len(r.trace) + 1)), r.trace)
    return svg_line_plot(curves, title, "outer step", "loss", log_y=True)


def _print_checks(checks, out) -> bool:
    for name, ok in checks.items():
        print(f"  [{'PASS' if ok else 'FAIL'}] {name}", file=out)
    return all(checks.values())


def cmd_loss_study(opts, out) -> int:
    cfg = make_config(opts)
    seed = opts["seed"] if opts.get("seed") is not None else default_seed()
    rows = loss_study(cfg, opts["layers"], opts["orders"], seed)
    _print_loss_rows(rows, out)
    ok = _print_checks(loss_checks(rows), out)
    if opts.get("svg") is not None:
        Path(opts["svg"]).write_text(_loss_svg(rows, f"Loss history, {cfg.bc.value}"))
    if opts.get("json") is not None:
        payload = {"config": cfg.as_dict(), "seed": seed, "version": __version__,
                   "rows": [vars(r) for r in rows]}
        _emit(opts["json"], json.dumps(payload, indent=2) + "\n", out)
    return 0 if ok else 1


def cmd_reproduce(opts, out) -> int:
    spec = get_table(opts["table_id"])
    print(f"{spec.table_id}: {spec.title}", file=out)
    if spec.table_id in LOSS_TABLES:
        seed = opts["seed"] if opts.get("seed") is not None else default_seed()
        ok, all_rows = True, []
        for case in spec.cases:
            cfg = loss_case_config(spec, case)
            print(f"\ntable {case['table']}: {cfg}", file=out)
            rows = loss_study(cfg, seed=seed, published=loss_case_published(case))
            _print_loss_rows(rows, out)
            ok &= _print_checks(loss_checks(rows, spec.tolerances.get("dfl-tfc-loss", 1e-8)), out)
            all_rows.append(rows)
        if opts.get("svg") is not None:
            Path(opts["svg"]).write_text(_loss_svg(all_rows[0], f"Loss history, {spec.table_id}, first case"))
        print(f"\n{'PASS' if ok else 'FAIL'}", file=out)
        return 0 if ok else 1

    outcomes = reproduce_deflections(spec, _workers(opts))
    print(f"{'table':>5} {'bc':>3} {'params':<24}{'X':>5} {'method':<9}{'published':>10}{'computed':>11}"
          f"{'|diff|':>10}{'tol':>8}  status", file=out)
    rows = []
    for o in outcomes:
        c = o.cell
        params = " ".join(f"{k}={_label(v)}" for k, v in c.params.items()) or "-"
        comp = "error" if o.computed is None else f"{o.computed:.4f}"
        diff = "" if o.diff is None else f"{o.diff:.1e}"
        status = "PASS" if o.passed else "FAIL"
        if c.suspect:
            status += " (suspect, not counted)"
        print(f"{c.table:>5} {c.bc:>3} {params:<24}{c.X:>5g} {o.method:<9}{c.value:>10.4f}{comp:>11}"
              f"{diff:>10}{o.tolerance:>8.0e}  {status}", file=out)
        if o.computed is not None:
            rows.append({"param_name": "&".join(["bc", *c.params]),
                         "param_value": "&".join([c.bc, *(_label(v) for v in c.params.values())]),
                         "X": c.X, "W_tilde": o.computed, "method": o.method, "loss": None,
                         "wall_time_s": None})
    counted = [o for o in outcomes if o.counted]
    n_fail = sum(not o.passed for o in counted)
    print(f"\n{len(counted) - n_fail}/{len(counted)} cells within tolerance"
          + (f"; {len(outcomes) - len(counted)} suspect cell(s) reported only" if len(counted) < len(outcomes) else ""),
          file=out)
    _emit(opts.get("csv"), csv_text(rows), out)
    return 0 if n_fail == 0 else 1


COMMANDS = {"solve": cmd_solve, "reproduce": cmd_reproduce, "sweep": cmd_sweep, "compare": cmd_compare,
            "loss-study": cmd_loss_study}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        opts = resolve(args)
        return COMMANDS[args.command](opts, out)
    except CliError as exc:
        print(f"taperbeam: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
