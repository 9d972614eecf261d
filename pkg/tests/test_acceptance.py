"""Acceptance criteria 1-14.

The full default ``lagdunkl verify`` run is executed once through the CLI;
criteria 1-13 are then judged from its reports against the thresholds
written out below (not the thresholds stored inside the reports).
Criterion 14 reruns smaller configurations to compare output bytes and
judges the runtime of the full run.

Each criterion prints one ``criterion N: PASS|FAIL`` line in the pytest
terminal summary; ``python tests/test_acceptance.py`` prints the same lines
without pytest.
"""

import heapq
import json
import math
import os
import re
import subprocess
import sys
import tempfile
import time
from collections import defaultdict
from pathlib import Path

import pytest

WORKERS = 8
TIME_LIMIT = 600.0
UNIT_RE = re.compile(r"^DEBUG unit (\S+) (\{.*\}) ([0-9.]+)$")


def run_cli(args, cwd=None):
    cmd = [sys.executable, "-m", "lagdunkl"] + [str(a) for a in args]
    return subprocess.run(cmd, capture_output=True, text=True, cwd=cwd)


def full_verify(workdir: Path) -> dict:
    out = workdir / "verify_default.json"
    jobs = max(1, min(WORKERS, os.cpu_count() or 1))
    start = time.perf_counter()
    proc = run_cli(["verify", "--out", out, "--format", "json", "--jobs", jobs, "-vv"])
    wall = time.perf_counter() - start
    units = []
    for line in proc.stderr.splitlines():
        m = UNIT_RE.match(line)
        if m:
            units.append((m.group(1), json.loads(m.group(2)), float(m.group(3))))
    reports = json.loads(out.read_text())["reports"] if out.exists() else []
    return {"code": proc.returncode, "wall": wall, "jobs": jobs, "units": units,
            "reports": reports, "stderr": proc.stderr}


def makespan(durations, workers):
    """Longest-processing-time-first schedule length on ``workers`` machines."""
    loads = [0.0] * workers
    heapq.heapify(loads)
    for d in sorted(durations, reverse=True):
        heapq.heappush(loads, heapq.heappop(loads) + d)
    return max(loads)


def by_id(run, *ids):
    return [r for r in run["reports"] if r["check_id"] in ids]


def max_metric(reports, key):
    vals = [r["metrics"][key] for r in reports]
    return max(vals) if vals else math.inf


def judge_tolerance(reports, tol, key="max_err"):
    if not reports:
        return False, "no reports"
    worst = max_metric(reports, key)
    ok = all(math.isfinite(r["metrics"][key]) and r["metrics"][key] <= tol for r in reports)
    return ok, f"{len(reports)} checks, worst {key} {worst:.3g} (limit {tol:g})"


def judge_stability(reports, limit, key="relative_change"):
    if not reports:
        return False, "no reports"
    ok = True
    for r in reports:
        vals = [v for k, v in r["metrics"].items() if v is not None]
        ok &= all(math.isfinite(v) for v in vals) and r["metrics"][key] < limit
    worst = max_metric(reports, key)
    return ok, f"{len(reports)} checks, worst change {worst:.3g} (limit {limit:g})"


# ---------------------------------------------------------------------------
# criteria


def criterion_1(run):
    reps = by_id(run, "orthonormality")
    ok, detail = judge_tolerance(reps, 1e-8)
    cover = {(r["config"]["kind"], r["config"]["d"], a) for r in reps for a in r["config"]["alpha"]}
    want = {(k, d, a) for k in ("laguerre", "laguerre-dunkl", "laguerre-symmetrized")
            for d in (1, 2) for a in (-0.7, -0.5, 0.5, 1.3)}
    missing = want - cover
    ok &= not missing and all(r["config"]["kmax"] >= 8 and r["config"]["nquad"] >= 200 for r in reps)
    secs = sum(u[2] for u in run["units"] if u[0] == "orthonormality")
    ok &= secs <= 120.0
    return ok, f"{detail}; missing {sorted(missing) or 'none'}; {secs:.1f} s"


def criterion_2(run):
    reps = by_id(run, "ladder-dunkl", "ladder-sym")
    ok, detail = judge_tolerance(reps, 1e-6)
    ok &= {r["check_id"] for r in reps} == {"ladder-dunkl", "ladder-sym"}
    ok &= all(r["config"]["points"] >= 50 for r in reps)
    return ok, detail


def criterion_3(run):
    reps = by_id(run, "eigen-dunkl", "eigen-sym")
    ok, detail = judge_tolerance(reps, 1e-5)
    ok &= {r["check_id"] for r in reps} == {"eigen-dunkl", "eigen-sym"}
    ok &= all(r["config"]["kmax"] >= 6 and r["config"]["points"] >= 25 for r in reps)
    return ok, detail


def criterion_4(run):
    irl = by_id(run, "irl-vs-bessel")
    ok1, d1 = judge_tolerance(irl, 1e-8)
    ok1 &= any(-0.7 in r["config"]["alpha"] for r in irl)
    ok1 &= any(r["config"]["d"] == 1 and r["samples"] >= 125 for r in irl)
    ok2, d2 = judge_tolerance(by_id(run, "mehler"), 1e-10)
    return ok1 and ok2, f"IRL: {d1}; Mehler: {d2}"


def criterion_5(run):
    reps = by_id(run, "spectral-series")
    ok, detail = judge_tolerance(reps, 1e-6)
    kernels = {r["config"]["kernel"] for r in reps}
    ok &= {"heat-dunkl", "heat-sym", "heat-laguerre"} <= kernels
    ok &= all(r["config"]["N"] == 40 and min(r["config"]["t"]) >= 0.5 for r in reps)
    return ok, f"{detail}; kernels {sorted(kernels)}"


def criterion_6(run):
    return judge_tolerance(by_id(run, "semigroup-law"), 1e-5)


def criterion_7(run):
    reps = by_id(run, "subordination")
    ok, detail = judge_tolerance(reps, 1e-5)
    ok &= all(min(r["config"]["t"]) <= 0.2 and max(r["config"]["t"]) >= 5.0 for r in reps)
    return ok, detail


def criterion_8(run):
    reps = by_id(run, "coefficient-bounds")
    ok, detail = judge_tolerance(reps, 0.01, key="relative_change")
    ok &= all(r["config"]["cap"] >= 200 and math.isfinite(r["metrics"]["sup"]) for r in reps)
    settings_seen = {r["config"]["setting"] for r in reps}
    ok &= {"dunkl", "sym"} <= settings_seen
    return ok, f"{detail}; settings {sorted(settings_seen)}"


def criterion_9(run):
    qz = by_id(run, "lemma-qz")
    th = by_id(run, "lemma-theta")
    ok = bool(qz) and bool(th)
    ok &= all(r["metrics"]["violations"] == 0 and r["samples"] >= 100000 for r in qz)
    ok &= all(r["metrics"]["violations_x"] == 0 and r["metrics"]["violations_y"] == 0
              and r["samples"] >= 200000 for r in th)
    nviol = sum(v for r in qz + th for v in r["metrics"].values())
    return ok, f"{len(qz)} qz + {len(th)} theta checks, {nviol:g} violations"


def criterion_10(run):
    reps = by_id(run, "xi-mass")
    ok, detail = judge_stability(reps, 0.10)
    alphas = {a for r in reps for a in r["config"]["alpha"]}
    ok &= {-0.7, 0.0, 1.3} <= alphas
    ok &= all(r["config"]["t_range"][0] <= 0.01 and r["config"]["t_range"][1] >= 10.0 for r in reps)
    ok &= all(r["metrics"]["bracket_lo"] > 0 for r in reps)
    lo = min((r["metrics"]["bracket_lo"] for r in reps), default=math.nan)
    hi = max((r["metrics"]["bracket_hi"] for r in reps), default=math.nan)
    return ok, f"{detail}; bracket [{lo:.3g}, {hi:.3g}]"


def criterion_11(run):
    reps = by_id(run, "growth", "smoothness-x", "smoothness-y")
    ok, detail = judge_stability(reps, 0.25)
    need = {(s, f, a, c) for s in ("dunkl", "sym")
            for f in ("heat", "riesz", "laplace-mult", "stieltjes-mult", "gfun", "lusin")
            for a in (-0.7, -0.5, 1.3) for c in ("growth", "smoothness-x", "smoothness-y")}
    have = {(r["config"]["setting"], r["config"]["family"], r["config"]["alpha"][0], r["check_id"])
            for r in reps}
    missing = need - have
    ok &= not missing
    for r in reps:
        if r["check_id"] == "growth":
            continue
        a = r["config"]["alpha"][0]
        want = min(0.5, a + 1 - 0.01) if r["config"]["family"] == "lusin" else 1.0
        ok &= abs(r["config"]["gamma"] - want) < 1e-12
    return ok, f"{detail}; {len(missing)} missing combinations"


def criterion_12(run):
    ok1, d1 = judge_tolerance(by_id(run, "multiplier-identity"), 1e-10)
    ok2, d2 = judge_tolerance(by_id(run, "g-closed-form"), 1e-8)
    ratio = by_id(run, "lusin-g-ratio")
    ok3, d3 = judge_stability(ratio, 0.25)
    ok3 &= all(r["samples"] >= 20 for r in ratio)
    br = ", ".join(f"[{r['metrics']['bracket_lo']:.3g}, {r['metrics']['bracket_hi']:.3g}]" for r in ratio)
    return ok1 and ok2 and ok3, f"identity: {d1}; g: {d2}; S/g bracket {br} ({d3})"


def criterion_13(run):
    red = by_id(run, "reduction-riesz-dunkl", "reduction-riesz-sym", "reduction-g", "reduction-lusin")
    ok1, d1 = judge_tolerance(red, 1e-9)
    ok1 &= len({r["check_id"] for r in red}) == 4
    ok2, d2 = judge_tolerance(by_id(run, "restriction-consistency"), 1e-9)
    return ok1 and ok2, f"reduction: {d1}; restriction: {d2}"


def determinism(workdir: Path):
    """Byte-identical outputs for repeated verify and kernel-eval runs."""
    vcfg = workdir / "verify_small.json"
    vcfg.write_text(json.dumps({
        "seed": 11,
        "verify": {"suites": ["ladder", "irl-vs-bessel", "lemma-qz", "xi-mass", "coefficient-growth",
                              "standard-estimates", "weighted-spot"],
                   "params": {"standard-estimates": {"alphas": [-0.5], "settings": ["dunkl"],
                                                     "samples": 6, "polish": 1, "iters": 10}}},
    }))
    kcfg = workdir / "kernel.json"
    kcfg.write_text(json.dumps({
        "alpha": [-0.7],
        "kernel": {"family": "heat-dunkl",
                   "grid": {"x": {"start": -2, "stop": 2, "num": 10}, "y": {"start": -1.5, "stop": 2.5, "num": 10},
                            "t": [0.05, 0.2, 0.7, 1.5, 4.0]}},
    }))
    outs = {}
    codes = []
    for tag, args in [
        ("v1", ["verify", "--config", vcfg, "--format", "json", "--jobs", 1]),
        ("v2", ["verify", "--config", vcfg, "--format", "json", "--jobs", 2]),
        ("vc1", ["verify", "--config", vcfg, "--format", "csv"]),
        ("vc2", ["verify", "--config", vcfg, "--format", "csv"]),
        ("k1", ["kernel-eval", "--config", kcfg, "--format", "csv"]),
        ("k2", ["kernel-eval", "--config", kcfg, "--format", "csv", "--jobs", 2]),
        ("kj1", ["kernel-eval", "--config", kcfg, "--format", "json"]),
        ("kj2", ["kernel-eval", "--config", kcfg, "--format", "json"]),
    ]:
        path = workdir / f"{tag}.out"
        proc = run_cli(args + ["--out", path])
        codes.append(proc.returncode)
        outs[tag] = path.read_bytes() if path.exists() else b""
    same = all(outs[a] == outs[b] and outs[a] for a, b in (("v1", "v2"), ("vc1", "vc2"), ("k1", "k2"), ("kj1", "kj2")))
    rows = outs["k1"].decode().count("\n") - 1
    return same and all(c == 0 for c in codes) and rows == 500, rows, codes


def criterion_14(run, workdir):
    same, rows, codes = determinism(workdir)
    durations = [u[2] for u in run["units"]]
    projected = makespan(durations, WORKERS)
    serial = sum(durations)
    if run["jobs"] >= WORKERS:
        timing_ok = run["wall"] <= TIME_LIMIT
        timing = f"wall {run['wall']:.0f} s with {run['jobs']} workers"
    else:
        # fewer cores here: schedule the measured work units on 8 workers
        timing_ok = projected <= TIME_LIMIT and bool(durations)
        timing = (f"wall {run['wall']:.0f} s on {run['jobs']} core(s); {len(durations)} units, "
                  f"serial {serial:.0f} s, projected {projected:.0f} s on {WORKERS} workers")
    ok = same and timing_ok and run["code"] == 0
    return ok, (f"byte-identical reruns {'yes' if same else 'NO'} (exit codes {codes}, {rows} kernel rows); "
                f"default verify exit {run['code']}; {timing} (limit {TIME_LIMIT:.0f} s)")


CRITERIA = {n: globals()[f"criterion_{n}"] for n in range(1, 14)}


# ---------------------------------------------------------------------------
# pytest entry points


@pytest.fixture(scope="module")
def workdir():
    with tempfile.TemporaryDirectory(prefix="lagdunkl-acc-") as tmp:
        yield Path(tmp)


@pytest.fixture(scope="module")
def default_run(workdir):
    return full_verify(workdir)


@pytest.mark.slow
@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, default_run, acceptance_log):
    ok, detail = CRITERIA[number](default_run)
    acceptance_log[number] = (ok, detail)
    print(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


@pytest.mark.slow
def test_criterion_14(default_run, workdir, acceptance_log):
    ok, detail = criterion_14(default_run, workdir)
    acceptance_log[14] = (ok, detail)
    print(f"criterion 14: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def main() -> int:
    with tempfile.TemporaryDirectory(prefix="lagdunkl-acc-") as tmp:
        wd = Path(tmp)
        run = full_verify(wd)
        results = {n: fn(run) for n, fn in CRITERIA.items()}
        results[14] = criterion_14(run, wd)
    for n in sorted(results):
        ok, detail = results[n]
        print(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
    return 0 if all(ok for ok, _ in results.values()) else 1


if __name__ == "__main__":
    sys.exit(main())
