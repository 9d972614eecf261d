"""Heat kernels, their derivatives, and composite operator kernels.

Kernels of the auxiliary (restricted) semigroups factor over coordinates, and
each one-dimensional factor is a finite combination of terms

    T(a, j) = x^a (y/S)^{2j} I~_{beta+j}(w) * S^{-1-beta} y^eta exp(-C (x^2+y^2)/2)

with ``S = sinh 2t``, ``C = coth 2t``, ``w = x y / S`` and
``I~_nu(w) = w^{-nu} I_nu(w)``.  Since ``I~_nu' = w I~_{nu+1}``, the
x-derivative of a term is again a combination of terms, so every ladder
word and every time derivative (through the heat equation) is evaluated
exactly, without numerical differentiation.  The finite-difference route
is kept as :func:`kernel_derivative_fd` and serves as an oracle.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np

from .bases import DerivativeWord, MultiIndex, SignPattern, TypeParam, as_type
from .specfun import (
    DomainError,
    ConvergenceError,
    composite_legendre,
    gauss_jacobi,
    gauss_legendre,
    log_gamma,
    pi_nu_density_const,
    reduced_bessel_gap,
    reduced_bessel_i,
)

SETTINGS = ("dunkl", "sym", "laguerre")


# ---------------------------------------------------------------------------
# Elementary quantities


@dataclass(frozen=True)
class TimeState:
    """Time ``t`` with ``zeta = tanh t`` and ``lo(zeta) = log((1+zeta)/(1-zeta))``."""

    t: float

    def __post_init__(self):
        if not self.t > 0:
            raise DomainError(f"t must be positive, got {self.t!r}")

    @property
    def zeta(self) -> float:
        return math.tanh(self.t)

    @property
    def lo(self) -> float:
        z = self.zeta
        return math.log1p(z) - math.log1p(-z)

    @classmethod
    def from_zeta(cls, zeta: float) -> "TimeState":
        if not 0 < zeta < 1:
            raise DomainError("zeta must lie in (0, 1)")
        return cls(math.atanh(zeta))


@dataclass(frozen=True)
class QForm:
    q_plus: np.ndarray
    q_minus: np.ndarray


def q_pm(x, y, s) -> QForm:
    """``q_pm = |x|^2 + |y|^2 pm 2 sum x_i y_i s_i`` (last axis is the coordinate)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    s = np.asarray(s, dtype=float)
    base = np.sum(x * x, axis=-1) + np.sum(y * y, axis=-1)
    cross = 2.0 * np.sum(x * y * s, axis=-1)
    return QForm(base + cross, base - cross)


def e_factor(state, q: QForm) -> np.ndarray:
    """``exp(-q_+/(4 zeta) - zeta q_-/4)``; ``state`` is a TimeState or a zeta value."""
    zeta = state.zeta if isinstance(state, TimeState) else float(state)
    return np.exp(-np.asarray(q.q_plus) / (4.0 * zeta) - zeta * np.asarray(q.q_minus) / 4.0)


def _hyper(t):
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise DomainError("t must be positive")
    # sinh overflows for t > 354; the kernel then correctly evaluates to 0
    with np.errstate(over="ignore"):
        s = np.sinh(2.0 * t)
    c = 1.0 / np.tanh(2.0 * t)
    return s, c


def _split(x, y, d):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim == 0:
        x = x[None]
    if y.ndim == 0:
        y = y[None]
    if x.shape[-1] != d or y.shape[-1] != d:
        raise DomainError(f"points must have {d} coordinates")
    return x, y


def _heat_1d(beta: float, t, x, y) -> np.ndarray:
    """One-dimensional ``G_t^beta(x, y)`` for x, y >= 0 (broadcasting)."""
    s, c = _hyper(t)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    w = np.abs(x * y) / s
    expo = -0.5 * c * (x * x + y * y) + w - (1.0 + beta) * np.log(s)
    if np.any(expo > 709):
        raise OverflowError("heat kernel overflows; t is too small for these points")
    wb = np.broadcast_to(w, np.broadcast(w, expo).shape)
    return reduced_bessel_i(beta, wb) * np.exp(expo)


def heat_kernel_laguerre(alpha, t: float, x, y) -> np.ndarray:
    """Laguerre heat kernel ``G_t^alpha(x, y)`` from the Bessel closed form."""
    alpha = as_type(alpha)
    x, y = _split(x, y, alpha.d)
    out = 1.0
    for i, a in enumerate(alpha):
        out = out * _heat_1d(a, t, x[..., i], y[..., i])
    return np.asarray(out)


def heat_kernel_laguerre_irl(alpha, t: float, x, y, nquad: int = 64) -> float:
    """``G_t^alpha(x, y)`` from the integral representation over ``(-1,1)^d``.

    Sums the ``2^d`` epsilon terms; each integral uses a tensor Gauss-Jacobi
    rule with exponents ``alpha_i + eps_i + 1/2`` at both ends.
    """
    alpha = as_type(alpha)
    x, y = _split(x, y, alpha.d)
    if x.ndim != 1:
        raise DomainError("the integral form takes single points")
    d = alpha.d
    st = TimeState(float(t))
    zeta = st.zeta
    ratio = (1.0 - zeta * zeta) / (2.0 * zeta)
    total = 0.0
    for eps in itertools.product((0, 1), repeat=d):
        nu = [a + 1.0 + e for a, e in zip(alpha, eps)]
        rules = [gauss_jacobi(nquad, v - 0.5, v - 0.5) for v in nu]
        grids = np.meshgrid(*[r.nodes for r in rules], indexing="ij")
        wgrid = np.ones_like(grids[0])
        for r, g in zip(rules, np.meshgrid(*[r.weights for r in rules], indexing="ij")):
            wgrid = wgrid * g
        s = np.stack(grids, axis=-1)
        integrand = e_factor(zeta, q_pm(x, y, s))
        const = 1.0
        for v in nu:
            const *= pi_nu_density_const(v)
        integral = const * float(np.sum(wgrid * integrand))
        c_ae = 1.0
        for a, e in zip(alpha, eps):
            if e == 0:
                c_ae *= 2.0 * (a + 1.0)
        power = d + alpha.total + 2 * sum(eps)
        xy = 1.0
        for i, e in enumerate(eps):
            xy *= (x[i] * y[i]) ** (2 * e)
        total += c_ae * ratio ** power * xy * integral
    return total


def heat_kernel_dunkl(alpha, t: float, x, y) -> np.ndarray:
    """Laguerre-Dunkl heat kernel ``2^{-d} sum_eta (xy)^eta G_t^{alpha+eta}``."""
    return _full_kernel(alpha, t, x, y, symmetrized=False)


def heat_kernel_sym(alpha, t: float, x, y) -> np.ndarray:
    """Laguerre-symmetrized heat kernel, with the extra ``exp(-2|eta| t)`` weights."""
    return _full_kernel(alpha, t, x, y, symmetrized=True)


def _full_kernel(alpha, t, x, y, symmetrized):
    alpha = as_type(alpha)
    x, y = _split(x, y, alpha.d)
    out = 1.0
    for i, a in enumerate(alpha):
        xi, yi = np.broadcast_arrays(x[..., i], y[..., i])
        ax, ay = np.abs(xi), np.abs(yi)
        even = _heat_1d(a, t, ax, ay)
        odd = xi * yi * _heat_1d(a + 1.0, t, ax, ay)
        if symmetrized:
            odd = odd * np.exp(-2.0 * np.asarray(t))
        pair = np.asarray(even + odd, dtype=float)
        neg = xi * yi < 0
        if np.any(neg):
            # even and odd parts nearly cancel here
            pair = pair.copy()
            pair[neg] = _reflected_1d(a, t, ax[neg], ay[neg], symmetrized)
        out = out * 0.5 * pair
    return np.asarray(out)


def _reflected_1d(a, t, ax, ay, symmetrized):
    """``G^a(|x|,|y|) - |xy| G^{a+1}(|x|,|y|)`` (damped odd part if symmetrized)."""
    s, c = _hyper(t)
    w = ax * ay / s
    expo = -0.5 * c * (ax * ax + ay * ay) + w - (1.0 + a) * np.log(s)
    if np.any(expo > 709):
        raise OverflowError("heat kernel overflows; t is too small for these points")
    val = reduced_bessel_gap(a, w)
    if symmetrized:
        val = val - math.expm1(-2.0 * float(t)) * w * reduced_bessel_i(a + 1.0, w)
    return val * np.exp(expo)


def aux_heat_kernel(setting: str, alpha, eta, t, x, y) -> np.ndarray:
    """Restricted kernel ``(xy)^eta G_t^{alpha+eta}`` (times ``exp(-2|eta|t)`` for sym)."""
    _check_setting(setting)
    alpha = as_type(alpha)
    eta = SignPattern(eta)
    x, y = _split(x, y, alpha.d)
    out = 1.0
    for i, (a, e) in enumerate(zip(alpha, eta)):
        g = _heat_1d(a + e, t, x[..., i], y[..., i])
        if e:
            g = g * x[..., i] * y[..., i]
            if setting == "sym":
                g = g * np.exp(-2.0 * np.asarray(t))
        out = out * g
    return np.asarray(out)


def _check_setting(setting):
    if setting not in SETTINGS:
        raise DomainError(f"unknown setting {setting!r}; expected one of {SETTINGS}")


# ---------------------------------------------------------------------------
# Symbolic derivative algebra on one axis


def _dx(terms: dict) -> dict:
    out: dict = {}

    def add(key, val):
        out[key] = out.get(key, 0.0) + val

    for (a, j, p), c in terms.items():
        if a:
            add((a - 1, j, p), a * c)
        add((a + 1, j, p + 1), -c)
        add((a + 1, j + 1, p), c)
    return out


def _mul_x(terms: dict, power: int, scale: float = 1.0) -> dict:
    return {(a + power, j, p): scale * c for (a, j, p), c in terms.items()}


def _add(*parts: dict) -> dict:
    out: dict = {}
    for part in parts:
        for key, c in part.items():
            out[key] = out.get(key, 0.0) + c
    return {k: c for k, c in out.items() if c != 0.0}


def _d_eta(terms: dict, par: int, a: float) -> dict:
    """``d/dx + par (2a+1)/x``."""
    if par:
        return _add(_dx(terms), _mul_x(terms, -1, 2.0 * a + 1.0))
    return _dx(terms)


def _time_step(terms: dict, setting: str, a: float, eta: int) -> dict:
    """Apply the x-operator equal to d/dt on the restricted kernel."""
    if setting == "laguerre":
        inner = _d_eta(_d_eta(terms, 0, a), 1, a)
        return _add(inner, _mul_x(terms, 2, -1.0))
    inner = _d_eta(_d_eta(terms, eta, a), (eta + 1) % 2, a)
    out = _add(inner, _mul_x(terms, 2, -1.0))
    if setting == "sym" and eta:
        out = _add(out, {k: -2.0 * c for k, c in terms.items()})
    return out


def axis_terms(setting: str, a: float, eta: int, n_i: int, omega_i, m_i: int, lx: int = 0,
               interlaced: bool = True) -> dict:
    """Terms for ``d_x^lx  word  d_t^m`` applied to one restricted kernel factor.

    ``omega_i`` is the sign block (Dunkl), ignored for sym; for the laguerre
    setting ``interlaced`` selects ``delta, delta*, ...`` (equal to the
    Dunkl word with alternating signs on even functions) or plain
    ``delta^n``.
    """
    if setting == "laguerre":
        eta = 0
    terms = {(eta, 0, 0): 1.0}
    for _ in range(m_i):
        terms = _time_step(terms, setting, a, eta)
    for j in range(n_i):
        par = (eta + j) % 2
        if setting == "dunkl":
            terms = _add(_mul_x(_d_eta(terms, par, a), 0, float(omega_i[j])), _mul_x(terms, 1))
        elif setting == "sym":
            sign = -1.0 if par else 1.0
            terms = _add(_d_eta(terms, par, a), _mul_x(terms, 1, sign))
        elif interlaced:
            sign = 1.0 if j % 2 == 0 else -1.0
            terms = _add(_mul_x(_d_eta(terms, par, a), 0, sign), _mul_x(terms, 1))
        else:
            terms = _add(_dx(terms), _mul_x(terms, 1))
    for _ in range(lx):
        terms = _dx(terms)
    return terms


def eval_axis_terms(terms: dict, beta: float, eta: int, setting: str, t, x, y) -> np.ndarray:
    """Evaluate a term dictionary for one axis (broadcasting over x, y, t)."""
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    s, c = _hyper(t)
    shape = np.broadcast(t, x, y).shape
    x = np.broadcast_to(x, shape)
    y = np.broadcast_to(y, shape)
    s = np.broadcast_to(s, shape)
    c = np.broadcast_to(c, shape)
    w = x * y / s
    expo = -0.5 * c * (x * x + y * y) + w - (1.0 + beta) * np.log(s)
    if np.any(expo > 709):
        raise OverflowError("derivative kernel overflows; t too small")
    common = np.exp(expo)
    if eta:
        common = common * y
        if setting == "sym":
            common = common * np.exp(-2.0 * np.broadcast_to(t, shape))
    total = np.zeros(shape)
    bessel_cache = {}
    ys2 = (y / s) ** 2
    for (a, j, p), coef in terms.items():
        if j not in bessel_cache:
            bessel_cache[j] = reduced_bessel_i(beta + j, w)
        total = total + coef * x ** a * ys2 ** j * c ** p * bessel_cache[j]
    return total * common


def _multinomial_splits(m: int, d: int):
    for combo in itertools.product(range(m + 1), repeat=d):
        if sum(combo) == m:
            coef = math.factorial(m)
            for v in combo:
                coef //= math.factorial(v)
            yield combo, coef


def kernel_derivative(setting: str, alpha, eta, word: Optional[DerivativeWord], m: int, t, x, y,
                      lx=None, interlaced: bool = True) -> np.ndarray:
    """``d_x^lx d_t^m (word)_x`` applied to the restricted heat kernel, evaluated exactly.

    Parameters
    ----------
    setting : {"dunkl", "sym", "laguerre"}
        ``dunkl`` uses the signed words built from ``d_{i,eta}``, ``sym`` the
        symmetrized derivatives, ``laguerre`` the Laguerre kernel with the
        interlaced word (or plain ``delta^n`` when ``interlaced`` is False).
    alpha : TypeParam or sequence
    eta : sequence of {0, 1}
        Ignored (taken as zero) for the laguerre setting.
    word : DerivativeWord or None
        None means the empty word.
    m : int
        Order of the time derivative.
    t, x, y : array_like
        Broadcast together; x and y carry the coordinate on the last axis.
    lx : sequence of int, optional
        Extra plain x-derivatives, applied last.

    Returns
    -------
    ndarray
    """
    _check_setting(setting)
    alpha = as_type(alpha)
    d = alpha.d
    eta = SignPattern(eta if setting != "laguerre" else (0,) * d)
    x, y = _split(x, y, d)
    if np.any(x <= 0) or np.any(y < 0):
        raise DomainError("derivative kernels live on the open positive orthant")
    n = word.n if word is not None else MultiIndex((0,) * d)
    omega = word.omega if (word is not None and word.omega is not None) else tuple(
        tuple([1] * ni) for ni in n)
    lx = tuple(lx) if lx is not None else (0,) * d
    t = np.asarray(t, dtype=float)
    total = 0.0
    for split, coef in _multinomial_splits(m, d):
        prod = 1.0
        for i in range(d):
            terms = _axis_terms_cached(setting, alpha[i], eta[i], n[i], tuple(omega[i]), split[i],
                                       lx[i], interlaced)
            prod = prod * eval_axis_terms(dict(terms), alpha[i] + eta[i], eta[i], setting, t,
                                          x[..., i], y[..., i])
        total = total + coef * prod
    return np.asarray(total)


@lru_cache(maxsize=4096)
def _axis_terms_cached(setting, a, eta, n_i, omega_i, m_i, lx, interlaced):
    return tuple(axis_terms(setting, a, eta, n_i, omega_i, m_i, lx, interlaced).items())


def kernel_derivative_fd(setting: str, alpha, eta, word: Optional[DerivativeWord], m: int, t: float,
                         x, y, base_step: float = 1e-3) -> float:
    """Finite-difference version of :func:`kernel_derivative` (oracle).

    Nested 5-point central differences with one Richardson level, in the
    spatial variables and in t.  Refuses points closer to an axis than ten
    steps.
    """
    alpha = as_type(alpha)
    d = alpha.d
    eta = SignPattern(eta if setting != "laguerre" else (0,) * d)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    steps = base_step * (1.0 + np.abs(x))
    if np.any(x < 10 * steps):
        raise DomainError("point too close to a coordinate axis for finite differences")

    def base(tt, xx):
        if setting == "laguerre":
            return heat_kernel_laguerre(alpha, tt, xx, y)
        return aux_heat_kernel(setting, alpha, eta, tt, xx, y)

    def diff(f, var, h):
        def g(tt, xx):
            def shifted(k):
                if var == "t":
                    return f(tt + k * h, xx)
                e = np.zeros(d)
                e[var] = k * h
                return f(tt, xx + e)

            def stencil(hh):
                return (-shifted(2 * hh / h) + 8 * shifted(hh / h) - 8 * shifted(-hh / h)
                        + shifted(-2 * hh / h)) / (12.0 * hh)

            return (16.0 * stencil(h / 2) - stencil(h)) / 15.0
        return g

    f = base
    ht = base_step * max(min(t, 1.0), 0.05)
    for _ in range(m):
        f = diff(f, "t", ht)
    n = word.n if word is not None else (0,) * d
    omega = word.omega if (word is not None and word.omega is not None) else None
    for i in range(d):
        for j in range(n[i]):
            par = (eta[i] + j) % 2
            f = _fd_step(f, diff(f, i, steps[i]), i, par, alpha[i], setting,
                         omega[i][j] if omega is not None else 1, j)
    return float(f(t, x))


def _fd_step(f, df, i, par, a, setting, sign, j):
    def g(tt, xx):
        xi = xx[i]
        deriv = df(tt, xx) + (par * (2 * a + 1) / xi) * f(tt, xx)
        if setting == "dunkl":
            return sign * deriv + xi * f(tt, xx)
        if setting == "sym":
            return deriv + (-1.0 if par else 1.0) * xi * f(tt, xx)
        s = 1.0 if j % 2 == 0 else -1.0
        return s * deriv + xi * f(tt, xx)
    return g


def sector_bottom(setting: str, alpha, eta) -> float:
    """Smallest eigenvalue among eigenfunctions of parity ``eta``."""
    alpha = as_type(alpha)
    e = sum(eta) if setting != "laguerre" else 0
    base = 2.0 * alpha.total + 2.0 * alpha.d
    if setting == "sym":
        return base + 4.0 * e
    return base + 2.0 * e


# ---------------------------------------------------------------------------
# t-integration


def log_t_rule(t_lo: float, t_hi: float, panel: float = 0.5, nper: int = 16):
    """Composite Gauss-Legendre rule in ``log t`` for ``int_{t_lo}^{t_hi} f(t) dt``."""
    a, b = math.log(t_lo), math.log(t_hi)
    npan = max(1, int(math.ceil((b - a) / panel)))
    u, w = composite_legendre(np.linspace(a, b, npan + 1), nper)
    t = np.exp(u)
    return t, w * t


def kernel_t_rule(dist2: float, lam0: float, extra_decay: float = 1.0, panel: float = 0.5,
                  nper: int = 16):
    """t-rule for kernel integrals at squared separation ``dist2``.

    Lower end ``min(1e-3, dist2/400)`` where the Gaussian factor is below
    ``e^{-100}``; upper end where ``exp(-lam0 * extra_decay * T) < 1e-14``.
    """
    t_lo = min(1e-3, dist2 / 400.0) if dist2 > 0 else 1e-8
    rate = max(lam0 * extra_decay, 1e-3)
    t_hi = max(2.0, 33.0 / rate)
    return log_t_rule(t_lo, t_hi, panel, nper)


def riesz_kernel(setting: str, alpha, eta, word: DerivativeWord, x, y, tq=None) -> float:
    """Riesz kernel ``Gamma(|n|/2)^{-1} int_0^inf word_x K_t(x,y) t^{|n|/2-1} dt``.

    ``tq`` may be a ``(nodes, weights)`` pair or a QuadratureRule over t.
    """
    alpha = as_type(alpha)
    x, y = _split(x, y, alpha.d)
    if word.order < 1:
        raise DomainError("Riesz kernels need |n| >= 1")
    dist2 = float(np.sum((x - y) ** 2))
    if dist2 == 0:
        raise DomainError("Riesz kernel is singular on the diagonal")
    t, w = _as_t_rule(tq, dist2, sector_bottom(setting, alpha, eta))
    half = word.order / 2.0
    vals = kernel_derivative(setting, alpha, eta, word, 0, t, x[None, :], y[None, :])
    return float(np.dot(w, vals * t ** (half - 1.0)) / math.exp(log_gamma(half)))


def _as_t_rule(tq, dist2, lam0, extra_decay=1.0):
    if tq is None:
        return kernel_t_rule(dist2, lam0, extra_decay)
    if hasattr(tq, "nodes"):
        return np.asarray(tq.nodes), np.asarray(tq.weights)
    return np.asarray(tq[0]), np.asarray(tq[1])


@dataclass(frozen=True)
class MultiplierSpec:
    """Laplace-type (``psi``) or Laplace-Stieltjes-type (``atoms``) multiplier.

    ``m(z) = z int_0^inf exp(-t z) psi(t) dt`` or ``sum_j w_j exp(-t_j z)``;
    with ``poisson=True`` the multiplier is applied to ``sqrt(lambda)``.
    """

    variant: str
    psi: Optional[Callable] = None
    psi_bound: float = 1.0
    atoms: tuple = ()
    poisson: bool = False

    def __post_init__(self):
        if self.variant not in ("laplace", "stieltjes"):
            raise DomainError(f"unknown multiplier variant {self.variant!r}")
        if self.variant == "laplace" and self.psi is None:
            raise DomainError("a Laplace multiplier needs psi")
        if self.variant == "stieltjes":
            atoms = tuple((float(t), float(w)) for t, w in self.atoms)
            if not atoms or any(t <= 0 for t, _ in atoms):
                raise DomainError("Stieltjes atoms need positive times")
            object.__setattr__(self, "atoms", atoms)

    def admissibility(self, lam0: float) -> float:
        """``sum |w_j| exp(-t_j lambda_0)`` (finite for any finite atom list)."""
        z = math.sqrt(lam0) if self.poisson else lam0
        return float(sum(abs(w) * math.exp(-t * z) for t, w in self.atoms))


def multiplier_kernel(setting: str, spec: MultiplierSpec, alpha, eta, x, y, tq=None) -> float:
    """Kernel of a Laplace or Laplace-Stieltjes multiplier of the restricted semigroup."""
    alpha = as_type(alpha)
    x, y = _split(x, y, alpha.d)
    dist2 = float(np.sum((x - y) ** 2))
    if dist2 == 0:
        raise DomainError("multiplier kernel is singular on the diagonal")
    if spec.poisson:
        raise NotImplementedError("kernels are provided for heat-based multipliers only")
    if spec.variant == "stieltjes":
        return float(sum(w * aux_or_lag(setting, alpha, eta, t, x, y) for t, w in spec.atoms))
    t, w = _as_t_rule(tq, dist2, sector_bottom(setting, alpha, eta))
    dk = kernel_derivative(setting, alpha, eta, None, 1, t, x[None, :], y[None, :])
    psi = np.asarray([spec.psi(tt) for tt in t], dtype=float)
    if np.any(np.abs(psi) > spec.psi_bound * (1 + 1e-12)):
        raise DomainError("psi exceeds its declared bound")
    return float(-np.dot(w, psi * dk))


def aux_or_lag(setting, alpha, eta, t, x, y):
    if setting == "laguerre":
        return heat_kernel_laguerre(alpha, t, x, y)
    return aux_heat_kernel(setting, alpha, eta, t, x, y)


# ---------------------------------------------------------------------------
# Measures and the Lusin weight


def _interval_measure(a: float, lo, hi) -> np.ndarray:
    # mu of (lo, hi) under |u|^{2a+1} du, for arrays
    p = 2.0 * a + 2.0
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)

    def prim(u):
        return np.sign(u) * np.abs(u) ** p / p

    return prim(hi) - prim(lo)


def cube_measure(alpha, x, t: float, restricted: bool = False) -> float:
    """μ_α measure of the cube of half-side t centered at x (optionally cut to R_+^d)."""
    alpha = as_type(alpha)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if t <= 0:
        raise DomainError("t must be positive")
    out = 1.0
    for a, xi in zip(alpha, x):
        lo, hi = xi - t, xi + t
        if restricted:
            if xi < 0:
                raise DomainError("restricted cube needs x in the positive orthant")
            lo = max(lo, 0.0)
        out *= float(_interval_measure(a, lo, hi))
    return out


def xi_factor(alpha, x, z, t: float) -> np.ndarray:
    """``prod (x_i+z_i)^{2a_i+1} / V_{sqrt t}^{a_i,+}(x_i)``, zero when x+z leaves R_+^d."""
    alpha = as_type(alpha)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    z = np.asarray(z, dtype=float)
    u = x + z
    inside = np.all(u > 0, axis=-1)
    r = math.sqrt(t)
    out = np.ones(u.shape[:-1])
    for i, a in enumerate(alpha):
        v = float(_interval_measure(a, max(x[i] - r, 0.0), x[i] + r))
        out = out * np.where(inside, np.abs(u[..., i]) ** (2 * a + 1), 0.0) / v
    return np.where(inside, out, 0.0)


def ball_measure(alpha, x, r: float, npts: int = 128) -> float:
    """μ_α^+ of the Euclidean ball ``B(x, r)`` within the positive orthant.

    Exact in one dimension; in higher dimensions the outer coordinates are
    integrated by Gauss-Legendre over the ball's extent and the last one
    exactly through its antiderivative.
    """
    alpha = as_type(alpha)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if r <= 0:
        raise DomainError("radius must be positive")
    if alpha.d == 1:
        return float(_interval_measure(alpha[0], max(x[0] - r, 0.0), x[0] + r))
    return _ball_recursive(alpha.alpha, x, r, npts)


def _ball_recursive(alpha, x, r, npts):
    if len(alpha) == 1:
        return float(_interval_measure(alpha[0], max(x[0] - r, 0.0), x[0] + r))
    a0 = alpha[0]
    lo, hi = max(x[0] - r, 0.0), x[0] + r
    u, w = _weighted_interval_rule(a0, lo, hi, npts, kink=(x[0] - r, x[0] + r))
    total = 0.0
    for ui, wi in zip(u, w):
        rr = r * r - (ui - x[0]) ** 2
        if rr <= 0:
            continue
        total += wi * _ball_recursive(alpha[1:], x[1:], math.sqrt(rr), npts)
    return total


def _weighted_interval_rule(a: float, lo: float, hi: float, n: int = 32, kink=None):
    """Rule for ``int_lo^hi g(u) u^{2a+1} du`` with smooth g and ``0 <= lo < hi``.

    The endpoint singularity at u = 0 is absorbed into Gauss-Jacobi weights.
    Intervals starting near 0 are handled as a difference of two rules from 0.
    If ``kink`` endpoints are given (square-root edges), a sine substitution is
    used instead so that both edges are resolved.
    """
    p = 2.0 * a + 1.0
    if hi <= lo:
        return np.zeros(0), np.zeros(0)
    if kink is not None:
        c = 0.5 * (kink[0] + kink[1])
        h = 0.5 * (kink[1] - kink[0])
        th_lo = math.asin(max(-1.0, min(1.0, (lo - c) / h)))
        th_hi = math.asin(max(-1.0, min(1.0, (hi - c) / h)))
        if lo == 0.0 and kink[0] < 0:
            # singular weight at u = 0 inside the sine map
            rule = gauss_jacobi(n, 0.0, p)
            th = th_lo + 0.5 * (th_hi - th_lo) * (rule.nodes + 1.0)
            u = c + h * np.sin(th)
            jac = 0.5 * (th_hi - th_lo) * h * np.cos(th)
            # weight (1+s)^p = ((th - th_lo)/half)^p was built in; replace it by u^p
            half = 0.5 * (th_hi - th_lo)
            ratio = np.where(th > th_lo, u / (th - th_lo), h * math.cos(th_lo))
            return u, rule.weights * jac * (half * ratio) ** p
        rule = gauss_legendre(n)
        th = th_lo + 0.5 * (th_hi - th_lo) * (rule.nodes + 1.0)
        u = c + h * np.sin(th)
        jac = 0.5 * (th_hi - th_lo) * h * np.cos(th)
        return u, rule.weights * jac * u ** p
    if lo == 0.0:
        rule = gauss_jacobi(n, 0.0, p)
        half = 0.5 * hi
        return half * (rule.nodes + 1.0), rule.weights * half ** (p + 1)
    if lo < hi - lo:
        u1, w1 = _weighted_interval_rule(a, 0.0, hi, n)
        u2, w2 = _weighted_interval_rule(a, 0.0, lo, n)
        return np.concatenate([u1, u2]), np.concatenate([w1, -w2])
    rule = gauss_legendre(n)
    half = 0.5 * (hi - lo)
    u = lo + half * (rule.nodes + 1.0)
    return u, rule.weights * half * u ** p


def xi_mass(alpha, x, t: float, n: int = 48) -> float:
    """``int_{|z| < sqrt t} Xi_alpha(x, z, t) chi(x+z in R_+^d) dz``.

    One dimension is exactly 1.  In two dimensions the inner coordinate is
    integrated exactly and the outer one by a sine-mapped Gauss rule that
    resolves the disc edge and the axis singularity.
    """
    alpha = as_type(alpha)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    r = math.sqrt(t)
    if alpha.d == 1:
        return 1.0
    if alpha.d != 2:
        raise NotImplementedError("xi_mass supports d <= 2")
    a1, a2 = alpha
    lo, hi = max(x[0] - r, 0.0), x[0] + r
    # split the outer variable where the inner chord first touches the axis
    breaks = [lo, hi]
    if x[1] < r:
        # chord half-length sqrt(r^2 - (u-x0)^2) equals x1
        off = math.sqrt(r * r - x[1] * x[1])
        for b in (x[0] - off, x[0] + off):
            if lo < b < hi:
                breaks.append(b)
    breaks = sorted(breaks)
    total = 0.0
    for b0, b1 in zip(breaks[:-1], breaks[1:]):
        u, w = _weighted_interval_rule(a1, b0, b1, n, kink=(x[0] - r, x[0] + r))
        half = np.sqrt(np.maximum(r * r - (u - x[0]) ** 2, 0.0))
        inner = _interval_measure(a2, np.maximum(x[1] - half, 0.0), x[1] + half)
        total += float(np.dot(w, inner))
    v = cube_measure(alpha, x, r, restricted=True)
    return total / v


# ---------------------------------------------------------------------------
# Vector-valued kernel norms


@dataclass(frozen=True)
class KernelFamily:
    """A kernel family of the restricted operators.

    tag : one of ``heat``, ``riesz``, ``laplace-mult``, ``stieltjes-mult``,
    ``gfun``, ``lusin``; setting : ``dunkl`` or ``sym`` (``laguerre`` also
    accepted, meaning the Laguerre kernel with interlaced or plain words).
    """

    tag: str
    setting: str
    alpha: TypeParam
    eta: tuple
    word: Optional[DerivativeWord] = None
    m: int = 0
    multiplier: Optional[MultiplierSpec] = None
    interlaced: bool = True

    def __post_init__(self):
        object.__setattr__(self, "alpha", as_type(self.alpha))
        object.__setattr__(self, "eta", SignPattern(self.eta))
        _check_setting(self.setting)
        tags = ("heat", "riesz", "laplace-mult", "stieltjes-mult", "gfun", "lusin")
        if self.tag not in tags:
            raise DomainError(f"unknown kernel family {self.tag!r}")
        n = self.word.order if self.word is not None else 0
        if self.tag == "riesz" and n < 1:
            raise DomainError("Riesz families need |n| >= 1")
        if self.tag in ("gfun", "lusin") and n + self.m < 1:
            raise DomainError("square-function families need |n| + m >= 1")

    @property
    def order(self) -> int:
        return self.word.order if self.word is not None else 0

    @property
    def lam0(self) -> float:
        return sector_bottom(self.setting, self.alpha, self.eta)

    def inner(self, t, x, y) -> np.ndarray:
        """The t-dependent scalar kernel that is normed (heat/g/lusin families)."""
        word = self.word if self.order else None
        return kernel_derivative(self.setting, self.alpha, self.eta, word, self.m, t, x, y,
                                 interlaced=self.interlaced)

    @property
    def is_vector(self) -> bool:
        return self.tag in ("heat", "gfun", "lusin")


def maximal_grid(t_lo: float = 1e-4, t_hi: float = 20.0, ratio: float = 1.03) -> np.ndarray:
    n = int(math.ceil(math.log(t_hi / t_lo) / math.log(ratio)))
    return t_lo * ratio ** np.arange(n + 1)


def kernel_norm(family: KernelFamily, x, y, tgrid=None) -> float:
    """Banach-space norm of a kernel family at (x, y).

    heat: sup over the maximal t-grid; riesz/multipliers: absolute value;
    gfun: ``L^2(t^{|n|+2m-1} dt)``; lusin: ``L^2(A, t^{|n|+2m-1} dz dt)``.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    return kernel_diff_norm(family, x, y, None, None, tgrid)


def kernel_diff_norm(family: KernelFamily, x, y, x2=None, y2=None, tgrid=None) -> float:
    """Norm of ``K(x,y) - K(x2,y2)``; with x2 = y2 = None it is the norm of ``K(x,y)``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    diff = x2 is not None or y2 is not None
    xb = x if x2 is None else np.atleast_1d(np.asarray(x2, dtype=float))
    yb = y if y2 is None else np.atleast_1d(np.asarray(y2, dtype=float))
    fam = family
    tag = fam.tag
    if tag == "riesz":
        k1 = riesz_kernel(fam.setting, fam.alpha, fam.eta, fam.word, x, y) if fam.setting != "laguerre" \
            else _riesz_lag(fam, x, y)
        if not diff:
            return abs(k1)
        k2 = riesz_kernel(fam.setting, fam.alpha, fam.eta, fam.word, xb, yb) if fam.setting != "laguerre" \
            else _riesz_lag(fam, xb, yb)
        return abs(k1 - k2)
    if tag in ("laplace-mult", "stieltjes-mult"):
        k1 = multiplier_kernel(fam.setting, fam.multiplier, fam.alpha, fam.eta, x, y)
        if not diff:
            return abs(k1)
        return abs(k1 - multiplier_kernel(fam.setting, fam.multiplier, fam.alpha, fam.eta, xb, yb))
    if tag == "heat":
        t = maximal_grid() if tgrid is None else np.asarray(tgrid)
        v1 = fam.inner(t, x[None, :], y[None, :])
        if diff:
            v1 = v1 - fam.inner(t, xb[None, :], yb[None, :])
        return float(np.max(np.abs(v1)))
    dist2 = float(min(np.sum((x - y) ** 2), np.sum((xb - yb) ** 2)))
    power = fam.order + 2 * fam.m - 1
    if tag == "gfun":
        t, w = kernel_t_rule(dist2, fam.lam0, extra_decay=2.0)
        v = fam.inner(t, x[None, :], y[None, :])
        if diff:
            v = v - fam.inner(t, xb[None, :], yb[None, :])
        return float(math.sqrt(max(np.dot(w, v * v * t ** power), 0.0)))
    if fam.alpha.d != 1:
        raise NotImplementedError("Lusin kernel norms are implemented for d = 1")
    if diff and y2 is not None and x2 is None:
        return _lusin_norm_ydiff(fam, x, y, yb, power, dist2)
    if diff:
        return _lusin_norm_xdiff(fam, x, xb, y, power, dist2)
    return _lusin_norm(fam, x, y, power, dist2)


def _riesz_lag(fam, x, y):
    alpha = fam.alpha
    dist2 = float(np.sum((x - y) ** 2))
    t, w = kernel_t_rule(dist2, sector_bottom("laguerre", alpha, (0,) * alpha.d))
    half = fam.word.order / 2.0
    vals = kernel_derivative("laguerre", alpha, (0,) * alpha.d, fam.word, 0, t, x[None, :],
                             y[None, :], interlaced=fam.interlaced)
    return float(np.dot(w, vals * t ** (half - 1.0)) / math.exp(log_gamma(half)))


def _lusin_t_rule(fam, dist2):
    return kernel_t_rule(dist2, fam.lam0, extra_decay=2.0, panel=0.5, nper=12)


class _Batch:
    """Collects (t, u) evaluation points so that the kernel is evaluated once."""

    def __init__(self):
        self._t, self._u, self._n = [], [], 0
        self.vals = None

    def add(self, t, u):
        u = np.asarray(u, dtype=float)
        sl = slice(self._n, self._n + u.size)
        self._t.append(np.full(u.size, t))
        self._u.append(u)
        self._n += u.size
        return sl

    def run(self, fam, y):
        if not self._n:
            self.vals = np.zeros(0)
            return
        t = np.concatenate(self._t)
        u = np.concatenate(self._u)
        self.vals = fam.inner(t, u[:, None], y[None, :])

    def __getitem__(self, sl):
        return self.vals[sl]


def _cone_sq(fam, x, ys, power, dist2, nz):
    # int t^power int_{cone} |sum_k s_k F(x+z, y_k)|^2 Xi dz dt, y-list with signs
    a = fam.alpha[0]
    t, w = _lusin_t_rule(fam, dist2)
    xv = float(x[0])
    batches = [_Batch() for _ in ys]
    jobs = []
    for tj, wj in zip(t, w):
        r = math.sqrt(tj)
        lo, hi = max(xv - r, 0.0), xv + r
        u, wu = _weighted_interval_rule(a, lo, hi, nz)
        v = float(_interval_measure(a, lo, hi))
        sl = [b.add(tj, u) for b in batches]
        jobs.append((wj * tj ** power / v, wu, sl))
    for b, (yk, _) in zip(batches, ys):
        b.run(fam, yk)
    total = 0.0
    for scale, wu, sl in jobs:
        vals = sum(sign * b[s] for b, s, (_, sign) in zip(batches, sl, ys))
        total += scale * float(np.dot(wu, vals * vals))
    return math.sqrt(max(total, 0.0))


def _lusin_norm(fam, x, y, power, dist2, nz=24):
    return _cone_sq(fam, x, [(y, 1.0)], power, dist2, nz)


def _lusin_norm_ydiff(fam, x, y, y2, power, dist2, nz=24):
    return _cone_sq(fam, x, [(y, 1.0), (y2, -1.0)], power, dist2, nz)


def _lusin_norm_xdiff(fam, x, x2, y, power, dist2, nz=24):
    """``||K(x,y) - K(x2,y)||`` for the Lusin family in one dimension.

    For each t the z-integral is split where either argument leaves the half
    line.  Near the inner edge the squared difference is expanded into three
    terms, each carrying its own algebraic endpoint weight; away from it the
    difference is integrated directly so no cancellation occurs.
    """
    a = fam.alpha[0]
    p = 2.0 * a + 1.0
    half_p = 0.5 * p
    xs, xl = sorted((float(x[0]), float(x2[0])))
    gap = xl - xs
    t, w = _lusin_t_rule(fam, dist2)
    batch = _Batch()
    jobs = []
    r1 = gauss_jacobi(nz, 0.0, p)
    r2 = gauss_jacobi(nz, 0.0, half_p)
    rl = gauss_legendre(nz)
    for tj, wj in zip(t, w):
        r = math.sqrt(tj)
        vs = float(_interval_measure(a, max(xs - r, 0.0), xs + r))
        vl = float(_interval_measure(a, max(xl - r, 0.0), xl + r))
        scale = wj * tj ** power
        # only the larger point has x+z > 0: z in (-xl, -xs)
        zlo, zhi = max(-r, -xl), min(r, -xs)
        if zhi > zlo:
            u, wu = _weighted_interval_rule(a, zlo + xl, zhi + xl, nz)
            jobs.append(("sq", scale / vl, wu, batch.add(tj, u)))
        # both inside; v = z + xs, the larger point sits at v + gap
        v0, v1 = max(-r, -xs) + xs, r + xs
        if v1 <= v0:
            continue
        edge = min(gap, v1)
        start = v0
        if v0 < edge:
            for sign, hi in ((1.0, edge), (-1.0, v0)):
                if hi <= 0.0:
                    continue
                s = 0.5 * hi
                u1 = s * (r1.nodes + 1.0)
                u2 = s * (r2.nodes + 1.0)
                u3 = s * (rl.nodes + 1.0)
                jobs.append(("sq", sign * scale / vs, r1.weights * s ** (p + 1), batch.add(tj, u1)))
                jobs.append(("cross", -2.0 * sign * scale / math.sqrt(vs * vl),
                             r2.weights * s ** (half_p + 1) * (u2 + gap) ** half_p,
                             (batch.add(tj, u2), batch.add(tj, u2 + gap))))
                jobs.append(("sq", sign * scale / vl, rl.weights * s * (u3 + gap) ** p,
                             batch.add(tj, u3 + gap)))
            start = edge
        if v1 > start:
            breaks = [start]
            b = max(gap, start)
            while b * 2 < v1:
                b *= 2
                breaks.append(b)
            breaks.append(v1)
            for b0, b1 in zip(breaks[:-1], breaks[1:]):
                if b1 <= b0:
                    continue
                h = 0.5 * (b1 - b0)
                u = b0 + h * (rl.nodes + 1.0)
                jobs.append(("diff", scale, rl.weights * h,
                             (batch.add(tj, u), batch.add(tj, u + gap),
                              np.sqrt(u ** p / vs), np.sqrt((u + gap) ** p / vl))))
    batch.run(fam, y)
    total = 0.0
    for kind, scale, wts, sl in jobs:
        if kind == "sq":
            vals = batch[sl] ** 2
        elif kind == "cross":
            vals = batch[sl[0]] * batch[sl[1]]
        else:
            vals = (batch[sl[0]] * sl[2] - batch[sl[1]] * sl[3]) ** 2
        total += scale * float(np.dot(wts, vals))
    return math.sqrt(max(total, 0.0))
