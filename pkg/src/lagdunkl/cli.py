"""Command-line front end: ``lagdunkl verify | kernel-eval | transform``.

Exit codes: 0 success, 1 check or computation failure, 2 usage or
configuration error.  Output goes to ``--out`` (default stdout) as JSON (one
object with ``config`` and ``reports``) or CSV (UTF-8, header row, LF line
endings).  Floats are written in shortest round-trip form.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional

import numpy as np

from . import kernels as K
from . import operators as O
from .bases import BasisKind
from .config import FULL_KERNELS, ConfigError, RunConfig, load_config
from .specfun import ConvergenceError, DomainError

log = logging.getLogger("lagdunkl")

JOBS_ENV = "LAGDUNKL_JOBS"
OVERFLOW = 1e300


class ComputeError(RuntimeError):
    """A computation that cannot produce a result (exit code 1)."""


# ---------------------------------------------------------------------------
# Output


def _num(v):
    """JSON-safe number: non-finite floats become None."""
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, np.integer):
        return int(v)
    return v


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (dict, list)):
        return json.dumps(v, sort_keys=True, separators=(",", ":"))
    return str(v)


def render(config: dict, columns: list, records: list, fmt: str) -> str:
    """Serialize records (dicts keyed by ``columns``) as JSON or CSV text."""
    if fmt == "json":
        body = {"config": config, "columns": columns,
                "reports": [{c: _clean(r.get(c)) for c in columns} for r in records]}
        return json.dumps(body, sort_keys=True, indent=1, allow_nan=False) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in records:
        writer.writerow([_cell(r.get(c)) for c in columns])
    return buf.getvalue()


def _echo(cfg: RunConfig) -> dict:
    """Configuration echoed into outputs; where and how fast it ran is left out."""
    raw = cfg.to_dict()
    for key in ("out", "jobs"):
        raw.pop(key, None)
    return raw


def _clean(v):
    if isinstance(v, dict):
        return {k: _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    return _num(v)


def write_output(text: str, out: Optional[str]):
    if out is None or out == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


# ---------------------------------------------------------------------------
# verify


REPORT_COLUMNS = ["check_id", "status", "samples", "config", "metrics"]


def cmd_verify(cfg: RunConfig) -> int:
    from .verify import DEFAULT_SUITES, run_suites
    names = list(cfg.suites or DEFAULT_SUITES)
    start = time.perf_counter()
    timings: list = []
    reports = run_suites(names, cfg.seed, cfg.suite_params, cfg.jobs or 1, timings)
    for name, unit, seconds in timings:
        log.debug("unit %s %s %.3f", name, json.dumps(_clean(unit), sort_keys=True), seconds)
    log.info("verify: %d reports from %d suites in %.1f s", len(reports), len(names),
             time.perf_counter() - start)
    failed = [r for r in reports if r.status == "fail"]
    for r in failed:
        log.warning("FAIL %s %s", r.check_id, json.dumps(_clean(r.config), sort_keys=True))
    records = [r.as_dict() for r in reports]
    write_output(render(_echo(cfg), REPORT_COLUMNS, records, cfg.format), cfg.out)
    return 1 if failed else 0


# ---------------------------------------------------------------------------
# kernel-eval


def _kernel_columns(cfg: RunConfig, fam) -> list:
    d = cfg.d
    cols = [f"x{i + 1}" for i in range(d)] + [f"y{i + 1}" for i in range(d)] + ["t", "value"]
    if fam is not None and fam.is_vector:
        cols.append("norm")
    return cols + ["flag"]


def _flag(values) -> str:
    """``singular`` for NaN (kernel undefined at the point), ``overflow`` for huge values."""
    vals = [v for v in values if v is not None]
    if any(math.isnan(v) for v in vals):
        return "singular"
    if any(abs(v) > OVERFLOW for v in vals):
        return "overflow"
    return "ok"


def _kernel_rows(cfg: RunConfig, pairs):
    """Rows for a chunk of (x, y) pairs; runs in worker processes."""
    fam = cfg.kernel_family()
    _, _, t = cfg.grid_axes()
    rows = []
    for x, y in pairs:
        x, y = np.asarray(x), np.asarray(y)
        base = {f"x{i + 1}": float(v) for i, v in enumerate(x)}
        base.update({f"y{i + 1}": float(v) for i, v in enumerate(y)})
        with np.errstate(all="ignore"):
            if fam is None:
                for tv in t:
                    val = _full_kernel(cfg.family, cfg.alpha, tv, x, y)
                    rows.append(dict(base, t=float(tv), value=val, flag=_flag([val])))
                continue
            if fam.is_vector:
                norm = _safe(lambda: K.kernel_norm(fam, x, y))
                vals = _safe_array(lambda: fam.inner(t, x[None, :], y[None, :]), len(t))
                for tv, val in zip(t, vals):
                    rows.append(dict(base, t=float(tv), value=val, norm=norm, flag=_flag([val, norm])))
                continue
            if fam.tag == "riesz":
                val = _safe(lambda: K.riesz_kernel(fam.setting, fam.alpha, fam.eta, fam.word, x, y))
            else:
                val = _safe(lambda: K.multiplier_kernel(fam.setting, fam.multiplier, fam.alpha, fam.eta, x, y))
            rows.append(dict(base, t=None, value=val, flag=_flag([val])))
    return rows


def _full_kernel(name, alpha, t, x, y) -> float:
    fn = {"heat-dunkl": K.heat_kernel_dunkl, "heat-sym": K.heat_kernel_sym,
          "heat-laguerre": K.heat_kernel_laguerre}[name]
    return _safe(lambda: fn(alpha, float(t), x, y))


def _safe(fn) -> float:
    # the config is validated already, so a domain error here is pointwise
    try:
        return float(np.asarray(fn()).reshape(-1)[0])
    except DomainError:
        return math.nan
    except (ArithmeticError, ConvergenceError):
        return math.inf


def _safe_array(fn, n):
    try:
        return [float(v) for v in np.asarray(fn()).reshape(-1)]
    except DomainError:
        return [math.nan] * n
    except (ArithmeticError, ConvergenceError):
        return [math.inf] * n


def cmd_kernel_eval(cfg: RunConfig) -> int:
    if cfg.family is None:
        raise ConfigError("kernel-eval needs a kernel family")
    fam = cfg.kernel_family()
    if fam is not None and fam.tag == "lusin" and cfg.d != 1:
        raise ConfigError("Lusin kernel norms are available for d = 1 only")
    xs, ys, _ = cfg.grid_axes()
    pairs = [(x, y) for x in xs for y in ys]
    if fam is not None and fam.tag in ("riesz", "laplace-mult", "stieltjes-mult", "gfun", "lusin"):
        if any(np.array_equal(x, y) for x, y in pairs):
            log.warning("grid contains x = y; those singular-kernel rows are flagged")
    jobs = cfg.jobs or 1
    if jobs > 1 and len(pairs) > 1:
        size = max(1, math.ceil(len(pairs) / (4 * jobs)))
        chunks = [pairs[i:i + size] for i in range(0, len(pairs), size)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = [r for part in pool.map(_kernel_rows, [cfg] * len(chunks), chunks) for r in part]
    else:
        rows = _kernel_rows(cfg, pairs)
    flagged = sum(r["flag"] != "ok" for r in rows)
    if flagged:
        log.warning("%d of %d rows flagged", flagged, len(rows))
    write_output(render(_echo(cfg), _kernel_columns(cfg, fam), rows, cfg.format), cfg.out)
    return 0


# ---------------------------------------------------------------------------
# transform


def read_samples(path, d: int):
    """Rows ``x_1..x_d, f`` from CSV (header and ``#`` lines skipped) or JSON rows."""
    text = Path(path).read_text(encoding="utf-8")
    if Path(path).suffix.lower() == ".json":
        raw = json.loads(text)
        rows = raw["rows"] if isinstance(raw, dict) else raw
        data = np.array(rows, dtype=float)
    else:
        vals = []
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                vals.append([float(v) for v in line.split(",")])
            except ValueError as exc:
                if vals or lineno > 1:
                    raise ConfigError(f"{path}:{lineno}: cannot parse sample row") from exc
        data = np.array(vals, dtype=float)
    if data.ndim != 2 or data.shape[1] != d + 1:
        raise ConfigError(f"input rows need {d} coordinates and one value")
    return data[:, :d], data[:, d]


def _key(p) -> tuple:
    return tuple(float(f"{v:.9e}") for v in p)


def cmd_transform(cfg: RunConfig, input_path: Optional[str], nodes_only: bool = False) -> int:
    if cfg.operator is None:
        raise ConfigError("transform needs an operator")
    kind = BasisKind.parse(cfg.kind_name())
    eta = cfg.eta if kind is not BasisKind.LAGUERRE else None
    nodes = O.analysis_nodes(kind, cfg.alpha, cfg.N, cfg.nquad, eta)
    node_cols = [f"x{i + 1}" for i in range(cfg.d)]
    node_rows = [{c: float(v) for c, v in zip(node_cols, p)} for p in nodes]
    if nodes_only:
        write_output(render(_echo(cfg), node_cols, node_rows, cfg.format), cfg.out)
        return 0
    path = input_path or cfg.input
    if path is None:
        raise ConfigError("transform needs an input samples file")
    try:
        xs, fs = read_samples(path, cfg.d)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    lookup = {_key(p): v for p, v in zip(xs, fs)}
    missing = [row for p, row in zip(nodes, node_rows) if _key(p) not in lookup]
    if missing:
        log.error("insufficient sample coverage: %d of %d analysis nodes missing; node list written",
                  len(missing), len(nodes))
        write_output(render(_echo(cfg), node_cols, node_rows, cfg.format), cfg.out)
        return 1

    def f(pts):
        return np.array([lookup[_key(p)] for p in np.asarray(pts).reshape(-1, cfg.d)])

    e = O.analyze(f, kind, cfg.alpha, cfg.N, cfg.nquad, eta)
    out_pts = cfg.output_points()
    if out_pts is None:
        out_pts = xs
    values = apply_operator(cfg, e, out_pts)
    rows = [dict({c: float(v) for c, v in zip(node_cols, p)}, value=float(val)) for p, val in zip(out_pts, values)]
    if not all(math.isfinite(r["value"]) for r in rows):
        raise ComputeError("operator produced non-finite values")
    write_output(render(_echo(cfg), node_cols + ["value"], rows, cfg.format), cfg.out)
    return 0


def apply_operator(cfg: RunConfig, e: O.Expansion, pts) -> np.ndarray:
    op, word = cfg.operator, cfg.word()
    if op == "identity":
        return O.evaluate(e, pts)
    if op == "heat":
        return O.evaluate(O.heat_apply(e, cfg.t), pts)
    if op == "poisson":
        return O.evaluate(O.poisson_apply(e, cfg.t), pts)
    if op == "riesz":
        return O.evaluate(O.riesz_apply(e, word), pts)
    if op in ("laplace-mult", "stieltjes-mult"):
        return O.evaluate(O.multiplier_apply(e, cfg.multiplier_spec()), pts)
    tg = cfg.tgrid
    if op == "maximal":
        return O.maximal_op(e, pts, O.TGrid.geometric(tg["t_lo"], tg["t_hi"], tg["ratio"]))
    if op == "g-function":
        return O.g_function(e, word, cfg.m, pts, interlaced=cfg.interlaced)
    if op == "lusin":
        return O.lusin_area(e, word, cfg.m, pts, interlaced=cfg.interlaced)
    raise ConfigError(f"unknown operator {op!r}")


# ---------------------------------------------------------------------------
# Entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lagdunkl", description="Laguerre-Dunkl harmonic analysis toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {"verify": "run verification suites",
             "kernel-eval": "tabulate a kernel over an (x, y, t) grid",
             "transform": "apply an operator to sampled data"}
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", help="JSON or TOML configuration file")
        p.add_argument("--out", help="output path (default stdout)")
        p.add_argument("--format", choices=["json", "csv"], help="output format")
        p.add_argument("--seed", type=int, help="unsigned 64-bit seed")
        p.add_argument("--jobs", type=int, help=f"worker processes (default ${JOBS_ENV} or 1)")
        p.add_argument("-v", "--verbose", action="count", default=0,
                       help="log progress to stderr (-vv adds per-unit timings)")
        if name == "transform":
            p.add_argument("--input", help="samples file with rows x_1..x_d, f(x)")
            p.add_argument("--nodes", action="store_true", help="write the required analysis nodes and exit")
    return parser


def _resolve(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    raw = cfg.to_dict()
    for key in ("out", "format", "seed", "jobs"):
        val = getattr(args, key)
        if val is not None:
            raw[key] = val
    if raw.get("jobs") is None and os.environ.get(JOBS_ENV):
        try:
            raw["jobs"] = int(os.environ[JOBS_ENV])
        except ValueError as exc:
            raise ConfigError(f"{JOBS_ENV} must be an integer") from exc
    return RunConfig.from_dict(raw)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    logging.basicConfig(level=[logging.WARNING, logging.INFO, logging.DEBUG][min(args.verbose, 2)],
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        cfg = _resolve(args)
        if args.command == "verify":
            return cmd_verify(cfg)
        if args.command == "kernel-eval":
            return cmd_kernel_eval(cfg)
        return cmd_transform(cfg, args.input, args.nodes)
    except (ConfigError, DomainError) as exc:
        print(f"lagdunkl: configuration error: {exc}", file=sys.stderr)
        return 2
    except (ComputeError, ConvergenceError, ArithmeticError) as exc:
        print(f"lagdunkl: computation failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
