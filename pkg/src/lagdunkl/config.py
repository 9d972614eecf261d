"""Run configuration: parsing, validation and round-tripping.

A configuration file is JSON or TOML.  Top-level keys hold the shared run
parameters; the ``verify``, ``kernel`` and ``transform`` tables hold the
command-specific ones.  Every parameter is validated before any computation.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
import tomli

from .bases import BasisKind, DerivativeWord, SignPattern, as_type
from .kernels import SETTINGS, MultiplierSpec
from .specfun import DomainError


class ConfigError(ValueError):
    """A configuration that cannot be parsed or is out of domain (exit code 2)."""


FULL_KERNELS = ("heat-dunkl", "heat-sym", "heat-laguerre")
FAMILY_TAGS = ("heat", "riesz", "laplace-mult", "stieltjes-mult", "gfun", "lusin")
OPERATORS = ("identity", "heat", "poisson", "riesz", "laplace-mult", "stieltjes-mult", "maximal", "g-function",
             "lusin")
PSI_NAMES = ("one", "cos-log", "sin-log")


class Psi:
    """Serializable bounded ``psi`` for Laplace-type multipliers.

    ``one`` is ``psi = 1`` (the identity multiplier); ``cos-log`` and ``sin-log``
    are ``cos(gamma log t)`` and ``sin(gamma log t)``, the real and imaginary
    parts of the imaginary power ``t^{i gamma}``.
    """

    def __init__(self, name: str = "one", gamma: float = 1.0):
        if name not in PSI_NAMES:
            raise ConfigError(f"unknown psi {name!r}; choose one of {', '.join(PSI_NAMES)}")
        self.name, self.gamma = name, float(gamma)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.name == "one":
            return np.ones_like(t)
        phase = self.gamma * np.log(t)
        return np.cos(phase) if self.name == "cos-log" else np.sin(phase)

    def __repr__(self):
        return self.name if self.name == "one" else f"{self.name}({self.gamma!r})"


def _grid_axis(spec, name: str) -> list:
    """A grid axis from a list or a ``{start, stop, num}`` table."""
    if isinstance(spec, dict):
        try:
            vals = np.linspace(float(spec["start"]), float(spec["stop"]), int(spec["num"]))
        except KeyError as exc:
            raise ConfigError(f"grid axis {name!r} needs start, stop and num") from exc
        return [float(v) for v in vals]
    if isinstance(spec, (list, tuple)) and spec:
        return [float(v) for v in spec]
    raise ConfigError(f"grid axis {name!r} must be a non-empty list or a start/stop/num table")


@dataclass
class RunConfig:
    """All parameters of one CLI run.

    Fields not used by a subcommand are carried along unchanged so a config
    round-trips through :meth:`to_dict` and :meth:`from_dict`.
    """

    setting: str = "dunkl"
    alpha: tuple = (0.0,)
    eta: Optional[tuple] = None
    n: Optional[tuple] = None
    omega: Optional[tuple] = None
    m: int = 0
    N: int = 12
    nquad: Optional[int] = None
    tgrid: dict = field(default_factory=lambda: {"t_lo": 1e-4, "t_hi": 20.0, "ratio": 1.03})
    samples: Optional[int] = None
    seed: int = 0
    out: Optional[str] = None
    format: str = "json"
    jobs: Optional[int] = None
    suites: Optional[list] = None
    suite_params: dict = field(default_factory=dict)
    family: Optional[str] = None
    grid: dict = field(default_factory=dict)
    operator: Optional[str] = None
    t: Optional[float] = None
    multiplier: dict = field(default_factory=dict)
    input: Optional[str] = None
    output_grid: Optional[list] = None
    interlaced: bool = True

    @property
    def d(self) -> int:
        return len(self.alpha)

    # -- construction -----------------------------------------------------

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        if not isinstance(raw, dict):
            raise ConfigError("configuration must be a table")
        raw = dict(raw)
        flat = {}
        for section in ("verify", "kernel", "transform"):
            sub = raw.pop(section, None)
            if sub is None:
                continue
            if not isinstance(sub, dict):
                raise ConfigError(f"[{section}] must be a table")
            sub = dict(sub)
            if section == "verify" and "params" in sub:
                sub["suite_params"] = sub.pop("params")
            flat.update(sub)
        flat.update(raw)
        known = set(cls.__dataclass_fields__)
        unknown = sorted(set(flat) - known)
        if unknown:
            raise ConfigError(f"unknown configuration keys: {', '.join(unknown)}")
        for key in ("alpha", "eta", "n"):
            if flat.get(key) is not None:
                val = flat[key]
                flat[key] = tuple(val) if isinstance(val, (list, tuple)) else (val,)
        if flat.get("omega") is not None:
            flat["omega"] = tuple(tuple(b) for b in flat["omega"])
        cfg = cls(**flat)
        cfg.validate()
        return cfg

    def to_dict(self) -> dict:
        out = asdict(self)
        for key in ("alpha", "eta", "n"):
            if out[key] is not None:
                out[key] = list(out[key])
        if out["omega"] is not None:
            out["omega"] = [list(b) for b in out["omega"]]
        return out

    # -- validation --------------------------------------------------------

    def validate(self):
        try:
            self._validate()
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc

    def _validate(self):
        if self.setting not in SETTINGS:
            raise ConfigError(f"unknown setting {self.setting!r}; choose one of {', '.join(SETTINGS)}")
        try:
            alpha = tuple(float(a) for a in self.alpha)
        except (TypeError, ValueError) as exc:
            raise ConfigError("alpha must be a list of numbers") from exc
        as_type(alpha)
        self.alpha = alpha
        d = len(alpha)
        if self.eta is not None:
            SignPattern(self.eta)
            if len(self.eta) != d:
                raise ConfigError("eta must have one entry per axis")
            self.eta = tuple(int(e) for e in self.eta)
        self.word()
        if not isinstance(self.m, int) or self.m < 0:
            raise ConfigError("m must be a nonnegative integer")
        if not isinstance(self.N, int) or self.N < 0:
            raise ConfigError("N must be a nonnegative integer")
        if self.nquad is not None and (not isinstance(self.nquad, int) or self.nquad < self.N + 1):
            raise ConfigError("nquad must be an integer exceeding N")
        if self.samples is not None and (not isinstance(self.samples, int) or self.samples < 2):
            raise ConfigError("samples must be an integer >= 2")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if self.format not in ("json", "csv"):
            raise ConfigError("format must be json or csv")
        if self.jobs is not None and (not isinstance(self.jobs, int) or self.jobs < 1):
            raise ConfigError("jobs must be a positive integer")
        tg = self.tgrid
        try:
            lo, hi, ratio = float(tg["t_lo"]), float(tg["t_hi"]), float(tg["ratio"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError("tgrid needs numeric t_lo, t_hi and ratio") from exc
        if not (0 < lo < hi and ratio > 1):
            raise ConfigError("tgrid needs 0 < t_lo < t_hi and ratio > 1")
        if self.suites is not None:
            from .verify import SUITES
            if not isinstance(self.suites, (list, tuple)) or not self.suites:
                raise ConfigError("suites must be a non-empty list")
            bad = [s for s in self.suites if s not in SUITES]
            if bad:
                raise ConfigError(f"unknown suite(s): {', '.join(map(str, bad))}")
        if not isinstance(self.suite_params, dict):
            raise ConfigError("verify params must be a table of tables")
        for name, params in self.suite_params.items():
            from .verify import SUITES
            if name not in SUITES:
                raise ConfigError(f"parameters given for unknown suite {name!r}")
            if not isinstance(params, dict):
                raise ConfigError(f"parameters of suite {name!r} must be a table")
        if self.family is not None:
            if self.family not in FULL_KERNELS + FAMILY_TAGS:
                raise ConfigError(f"unknown kernel family {self.family!r}")
            self.kernel_family()
            self.grid_axes()
        if self.operator is not None:
            if self.operator not in OPERATORS:
                raise ConfigError(f"unknown operator {self.operator!r}; choose one of {', '.join(OPERATORS)}")
            BasisKind.parse(self.kind_name())
            if self.operator in ("heat", "poisson") and (self.t is None or self.t < 0):
                raise ConfigError(f"operator {self.operator!r} needs t >= 0")
            if self.operator == "riesz" and self.word() is None:
                raise ConfigError("riesz needs n")
            if self.operator in ("laplace-mult", "stieltjes-mult"):
                self.multiplier_spec()
            if self.operator in ("g-function", "lusin"):
                order = self.word().order if self.word() is not None else 0
                if order + self.m < 1:
                    raise ConfigError("square functions need |n| + m >= 1")
            if self.output_grid is not None:
                self.output_points()
        if self.multiplier:
            self.multiplier_spec()

    # -- derived objects ---------------------------------------------------

    def word(self) -> Optional[DerivativeWord]:
        if self.n is None:
            if self.omega is not None:
                raise ConfigError("omega given without n")
            return None
        n = tuple(int(v) for v in self.n)
        if len(n) != self.d or any(v < 0 for v in n):
            raise ConfigError("n must be a nonnegative multi-index with one entry per axis")
        if self.omega is not None:
            return DerivativeWord(n, self.omega)
        if self.setting == "sym":
            return DerivativeWord.plain(n)
        return DerivativeWord.alternating(n)

    def kind_name(self) -> str:
        return {"dunkl": "laguerre-dunkl", "sym": "laguerre-symmetrized", "laguerre": "laguerre"}[self.setting]

    def multiplier_spec(self) -> MultiplierSpec:
        mult = dict(self.multiplier)
        variant = mult.pop("variant", None)
        if variant is None:
            variant = "stieltjes" if (self.operator == "stieltjes-mult" or self.family == "stieltjes-mult") \
                else "laplace"
        poisson = bool(mult.pop("poisson", False))
        if variant == "laplace":
            psi = Psi(mult.pop("psi", "one"), mult.pop("gamma", 1.0))
            if mult:
                raise ConfigError(f"unknown multiplier keys: {', '.join(sorted(mult))}")
            return MultiplierSpec("laplace", psi=psi, poisson=poisson)
        if variant == "stieltjes":
            atoms = mult.pop("atoms", None)
            if mult:
                raise ConfigError(f"unknown multiplier keys: {', '.join(sorted(mult))}")
            if not atoms:
                raise ConfigError("a Stieltjes multiplier needs atoms [[t, w], ...]")
            try:
                return MultiplierSpec("stieltjes", atoms=tuple((float(a), float(b)) for a, b in atoms),
                                      poisson=poisson)
            except (TypeError, ValueError) as exc:
                raise ConfigError("atoms must be pairs [t, w]") from exc
        raise ConfigError(f"unknown multiplier variant {variant!r}")

    def kernel_family(self):
        """The restricted kernel family, or None for a full heat kernel."""
        from .kernels import KernelFamily
        if self.family in FULL_KERNELS:
            return None
        eta = self.eta if self.eta is not None else (0,) * self.d
        mult = self.multiplier_spec() if self.family in ("laplace-mult", "stieltjes-mult") else None
        return KernelFamily(self.family, self.setting, self.alpha, eta, self.word(), self.m, mult, self.interlaced)

    def grid_axes(self):
        """x, y point lists (``(n, d)`` arrays) and the t list (None if unused)."""
        g = dict(self.grid)
        if "x" not in g or "y" not in g:
            raise ConfigError("kernel grid needs x and y")
        axes = {}
        for key in ("x", "y"):
            spec = g[key]
            if isinstance(spec, list) and spec and isinstance(spec[0], list):
                pts = np.array(spec, dtype=float)
                if pts.ndim != 2 or pts.shape[1] != self.d:
                    raise ConfigError(f"grid {key} points need {self.d} coordinates")
            else:
                vals = np.array(_grid_axis(spec, key))
                mesh = np.meshgrid(*[vals] * self.d, indexing="ij")
                pts = np.stack(mesh, axis=-1).reshape(-1, self.d)
            axes[key] = pts
        needs_t = self.family in FULL_KERNELS or self.family in ("heat", "gfun", "lusin")
        t = None
        if needs_t:
            if "t" not in g:
                raise ConfigError(f"family {self.family!r} needs a t axis")
            t = np.array(_grid_axis(g["t"], "t"))
            if np.any(t <= 0):
                raise ConfigError("t values must be positive")
        restricted = self.family not in ("heat-dunkl", "heat-sym")
        if restricted and (np.any(axes["x"] < 0) or np.any(axes["y"] < 0)):
            raise ConfigError(f"family {self.family!r} lives on the positive orthant")
        return axes["x"], axes["y"], t

    def output_points(self) -> Optional[np.ndarray]:
        if self.output_grid is None:
            return None
        spec = self.output_grid
        if isinstance(spec, dict):
            spec = _grid_axis(spec, "output_grid")
        pts = np.array(spec, dtype=float)
        if pts.ndim == 1:
            if self.d != 1:
                raise ConfigError("output_grid needs one row of coordinates per point")
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[1] != self.d:
            raise ConfigError(f"output_grid points need {self.d} coordinates")
        return pts


def load_config(path) -> RunConfig:
    """Read a JSON or TOML file; the suffix decides, other suffixes try JSON then TOML."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    return parse_config(text, path.suffix.lower())


def parse_config(text: str, suffix: str = "") -> RunConfig:
    if suffix == ".json":
        loaders = (json.loads,)
    elif suffix == ".toml":
        loaders = (tomli.loads,)
    else:
        loaders = (json.loads, tomli.loads)
    last = None
    for load in loaders:
        try:
            raw = load(text)
            break
        except (json.JSONDecodeError, tomli.TOMLDecodeError) as exc:
            last = exc
    else:
        raise ConfigError(f"cannot parse configuration: {last}")
    return RunConfig.from_dict(raw)


def dump_config(cfg: RunConfig) -> str:
    """JSON text that :func:`parse_config` maps back to an equal config."""
    return json.dumps(cfg.to_dict(), sort_keys=True, allow_nan=False, default=_finite)


def _finite(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        raise ConfigError("configuration values must be finite")
    raise TypeError(f"cannot serialize {type(obj).__name__}")
