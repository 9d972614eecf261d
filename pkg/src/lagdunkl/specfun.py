"""Special functions and Gaussian quadrature.

Everything here is implemented from recurrences and series so that the
library does not depend on an external special-function package.  The
functions accept scalars; the ``*_array`` variants and the reduced Bessel
helper are vectorised over numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np


class DomainError(ValueError):
    """An argument lies outside the domain of a function."""


class ConvergenceError(ArithmeticError):
    """An iterative numerical method failed to converge."""


# Lanczos approximation, g = 7, n = 9.
_LANCZOS_G = 7.0
_LANCZOS_P = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _lanczos(x: float) -> float:
    # valid for x >= 0.5
    x -= 1.0
    a = _LANCZOS_P[0]
    for i in range(1, 9):
        a += _LANCZOS_P[i] / (x + i)
    t = x + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (x + 0.5) * math.log(t) - t + math.log(a)


def log_gamma(x: float) -> float:
    """Natural logarithm of the gamma function for ``x > 0``.

    Parameters
    ----------
    x : float
        Positive argument.

    Returns
    -------
    float
        ``log(Gamma(x))``.
    """
    x = float(x)
    if not x > 0.0:
        raise DomainError(f"log_gamma needs x > 0, got {x!r}")
    if x < 0.5:
        return _lanczos(x + 1.0) - math.log(x)
    return _lanczos(x)


def gamma(x: float) -> float:
    """Gamma function for ``x > 0``."""
    return math.exp(log_gamma(x))


def laguerre_poly(n: int, a: float, u):
    """Generalized Laguerre polynomial ``L_n^a(u)`` by forward recurrence.

    Parameters
    ----------
    n : int
        Degree, ``n >= 0``.
    a : float
        Parameter, ``a > -1``.
    u : float or ndarray
        Argument; arrays are evaluated elementwise.

    Returns
    -------
    float or ndarray
    """
    if a <= -1.0:
        raise DomainError(f"Laguerre parameter must exceed -1, got {a!r}")
    if n < 0:
        raise DomainError(f"degree must be nonnegative, got {n!r}")
    prev, cur = 0.0, 1.0
    for k in range(n):
        prev, cur = cur, ((2 * k + 1 + a - u) * cur - (k + a) * prev) / (k + 1)
    return cur


def laguerre_functions(kmax: int, a: float, u) -> np.ndarray:
    """Orthonormal Laguerre functions of orders ``0..kmax`` at ``u``.

    Returns ``phi[k] = sqrt(k!/Gamma(k+a+1)) L_k^a(u) exp(-u/2)``, which are
    orthonormal in ``L^2(u^a du)`` on the half line.  The normalized
    three-term recurrence is used so that no factorials are formed.

    Parameters
    ----------
    kmax : int
        Highest order.
    a : float
        Parameter, ``a > -1``.
    u : array_like
        Nonnegative arguments.

    Returns
    -------
    ndarray, shape ``(kmax + 1,) + shape(u)``
    """
    if a <= -1.0:
        raise DomainError(f"Laguerre parameter must exceed -1, got {a!r}")
    u = np.asarray(u, dtype=float)
    out = np.empty((kmax + 1,) + u.shape)
    out[0] = np.exp(-0.5 * u - 0.5 * log_gamma(a + 1.0))
    if kmax >= 1:
        out[1] = (1.0 + a - u) * out[0] / math.sqrt(1.0 + a)
    for k in range(1, kmax):
        c1 = 1.0 / math.sqrt((k + 1) * (k + 1 + a))
        c2 = math.sqrt(k * (k + a)) * c1
        out[k + 1] = (2 * k + 1 + a - u) * c1 * out[k] - c2 * out[k - 1]
    return out


# ---------------------------------------------------------------------------
# Modified Bessel function of the first kind


def _series_crossover(nu: float) -> float:
    return max(18.0, 2.0 * nu * nu)


def reduced_bessel_i(nu: float, w) -> np.ndarray:
    """Scaled, reduced Bessel function ``w**(-nu) * I_nu(w) * exp(-w)``.

    The factor ``w**(-nu)`` removes the branch behaviour at the origin, so the
    result is an entire, strictly positive function of ``w >= 0`` for
    ``nu > -1``.  Its value at ``w = 0`` is ``2**(-nu)/Gamma(nu+1)``.

    Parameters
    ----------
    nu : float
        Order, ``nu > -1``.
    w : array_like
        Nonnegative arguments.

    Returns
    -------
    ndarray
    """
    if nu <= -1.0:
        raise DomainError(f"Bessel order must exceed -1, got {nu!r}")
    w = np.asarray(w, dtype=float)
    if np.any(w < 0) or np.any(np.isnan(w)):
        raise DomainError("Bessel argument must be nonnegative")
    out = np.empty_like(w)
    cross = _series_crossover(nu)
    small = w < cross
    if np.any(small):
        out[small] = _reduced_series(nu, w[small])
    if np.any(~small):
        out[~small] = _reduced_asymptotic(nu, w[~small])
    return out


def _reduced_series(nu: float, w: np.ndarray) -> np.ndarray:
    # sum_k (w/2)^{2k} / (2^nu k! Gamma(k+nu+1)), all terms positive
    term = np.exp(-w - nu * math.log(2.0) - log_gamma(nu + 1.0))
    total = term.copy()
    q = 0.25 * w * w
    wmax = float(w.max()) if w.size else 0.0
    kmin = int(0.5 * wmax) + 2
    k = 0
    while True:
        term = term * q / ((k + 1) * (k + nu + 1))
        total += term
        k += 1
        if k > kmin and np.all(term <= 1e-17 * total):
            break
        if k > 5000:
            raise ConvergenceError("Bessel power series did not converge")
    return total


def _reduced_asymptotic(nu: float, w: np.ndarray) -> np.ndarray:
    # I_nu(w) e^{-w} ~ (2 pi w)^{-1/2} sum_k (-1)^k a_k(nu) / w^k
    mu = 4.0 * nu * nu
    term = np.ones_like(w)
    total = np.ones_like(w)
    active = np.ones(w.shape, dtype=bool)
    for k in range(1, 200):
        new = -term * (mu - (2 * k - 1) ** 2) / (8.0 * k * w)
        grow = np.abs(new) >= np.abs(term)
        active &= ~grow
        term = np.where(active, new, 0.0)
        total += term
        if not np.any(active & (np.abs(term) > 1e-17 * np.abs(total))):
            break
    return total * np.exp(-(nu + 0.5) * np.log(w)) / math.sqrt(2.0 * math.pi)


def reduced_bessel_gap(nu: float, w) -> np.ndarray:
    """``w**(-nu) * (I_nu(w) - I_{nu+1}(w)) * exp(-w)`` without cancellation.

    The difference is the reflected (``xy < 0``) part of the rank-one Dunkl
    kernel and is far smaller than either Bessel function for large ``w``.
    With ``z = 2w`` it equals ``2**(-nu)/Gamma(nu+1) * exp(-z) M(nu+1/2, 2nu+2, z)``
    (Kummer's function ``M``); the series of ``exp(-z) M`` has a single sign
    after its first term, and Kummer's asymptotic expansion covers large ``z``.
    """
    if nu <= -1.0:
        raise DomainError(f"Bessel order must exceed -1, got {nu!r}")
    w = np.asarray(w, dtype=float)
    if np.any(w < 0) or np.any(np.isnan(w)):
        raise DomainError("Bessel argument must be nonnegative")
    p, b = nu + 0.5, 2.0 * nu + 2.0
    z = 2.0 * w
    # the dropped exp(-z) part of the expansion is below 1e-17 relative
    if p == 0.0:
        big = z > 700.0
    else:
        big = (z > 60.0) & ((z - b * np.log(np.maximum(z, 1.0)) + math.log(abs(p)) > 40.0) | (z > 700.0))
    out = np.empty_like(z)
    if np.any(~big):
        out[~big] = _kummer_scaled_series(p, b, z[~big])
    if np.any(big):
        out[big] = _kummer_scaled_asymptotic(p, b, z[big])
    return out * math.exp(-nu * math.log(2.0) - log_gamma(nu + 1.0))


def _kummer_scaled_series(p, b, z):
    # exp(-z) sum_n (p)_n / (b)_n z^n / n!
    term = np.exp(-z)
    total = term.copy()
    nmax = int(float(z.max()) + 12.0 * math.sqrt(float(z.max())) + 40.0) if z.size else 0
    for n in range(nmax):
        term = term * ((p + n) / (b + n)) * z / (n + 1)
        total += term
        if n > float(z.max()) and np.all(np.abs(term) <= 1e-17 * np.abs(total)):
            break
    return total


def _kummer_scaled_asymptotic(p, b, z):
    # exp(-z) M(p, b, z) ~ Gamma(b)/Gamma(p) z^{p-b} sum_k (b-p)_k (1-p)_k / (k! z^k)
    term = np.ones_like(z)
    total = np.ones_like(z)
    for k in range(200):
        term = term * (b - p + k) * (1.0 - p + k) / ((k + 1) * z)
        total += term
        if np.all(np.abs(term) <= 1e-17 * np.abs(total)):
            break
    # 1/Gamma(p) = p/Gamma(p+1) stays finite through p = 0
    return total * (p / gamma(p + 1.0)) * np.exp(log_gamma(b) + (p - b) * np.log(z))


def bessel_i(nu: float, z: float) -> float:
    """Modified Bessel function of the first kind ``I_nu(z)``.

    Parameters
    ----------
    nu : float
        Real order, ``nu > -1``.
    z : float
        Argument, ``z >= 0``.

    Returns
    -------
    float

    Raises
    ------
    DomainError
        For ``z < 0`` or ``nu <= -1``.
    OverflowError
        When ``I_nu(z)`` is not representable as a double.
    """
    z = float(z)
    if z < 0 or math.isnan(z):
        raise DomainError(f"bessel_i needs z >= 0, got {z!r}")
    if z == 0.0:
        if nu == 0.0:
            return 1.0
        if nu > 0.0:
            return 0.0
        if nu > -1.0:
            return math.inf
    r = float(reduced_bessel_i(nu, np.array(z)))
    log_val = math.log(r) + nu * math.log(z) + z
    if log_val > 709.0:
        raise OverflowError(f"I_{nu}({z}) overflows double precision")
    return math.exp(log_val)


# ---------------------------------------------------------------------------
# Quadrature


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and positive weights for a named weight measure.

    ``target`` is a tag: ``"jacobi(a,b)"`` on (-1, 1), ``"mu-alpha(a)"`` on
    (0, inf) for the weight ``x**(2a+1) exp(-x**2)``, or ``"log-t(lo,hi)"``
    for a t-interval.  For mu-alpha rules ``undamped`` holds
    ``weights * exp(nodes**2)``, computed directly so that it stays accurate
    where the damped weights underflow.
    """

    nodes: np.ndarray
    weights: np.ndarray
    target: str
    undamped: Optional[np.ndarray] = field(default=None, compare=False)

    def __post_init__(self):
        nodes = np.array(self.nodes, dtype=float)
        weights = np.array(self.weights, dtype=float)
        if nodes.ndim != 1 or nodes.size < 1 or nodes.shape != weights.shape:
            raise ValueError("a quadrature rule needs matching 1-D nodes and weights")
        if np.any(np.diff(nodes) <= 0):
            raise ValueError("quadrature nodes must be strictly increasing")
        if not np.all(np.isfinite(weights)) or np.any(weights < 0):
            raise ValueError("quadrature weights must be finite and nonnegative")
        nodes.flags.writeable = False
        weights.flags.writeable = False
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        if self.undamped is not None:
            und = np.array(self.undamped, dtype=float)
            und.flags.writeable = False
            object.__setattr__(self, "undamped", und)

    def __len__(self):
        return self.nodes.size

    def integrate(self, values) -> float:
        """Apply the rule to sampled integrand values."""
        return float(np.dot(self.weights, values))


def _tridiag_eigen_first_row(diag, off):
    """Eigenvalues and first eigenvector components of a symmetric tridiagonal matrix.

    Implicit QL with Wilkinson-type shifts.  Only the first row of the
    eigenvector matrix is accumulated, which is all Golub-Welsch needs, so
    the cost is O(n^2).

    Parameters
    ----------
    diag : sequence of float
        Diagonal, length n.
    off : sequence of float
        Off-diagonal, length n - 1.

    Returns
    -------
    (eigenvalues, first_components) : tuple of ndarray, sorted ascending
    """
    d = [float(v) for v in diag]
    n = len(d)
    e = [float(v) for v in off] + [0.0]
    z = [0.0] * n
    z[0] = 1.0
    eps = 2.0 ** -52
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= eps * dd:
                    break
                m += 1
            if m == l:
                break
            it += 1
            if it > 100:
                raise ConvergenceError(
                    f"tridiagonal QL failed at index {l} of {n} "
                    f"(residual off-diagonal {e[l]:.3e})"
                )
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            i = m - 1
            deflated = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    deflated = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                zf = z[i + 1]
                z[i + 1] = s * z[i] + c * zf
                z[i] = c * z[i] - s * zf
                i -= 1
            if deflated:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    order = np.argsort(d)
    return np.asarray(d)[order], np.asarray(z)[order]


def _jacobi_recurrence(n: int, a: float, b: float):
    diag = np.empty(n)
    off = np.empty(max(n - 1, 0))
    ab = a + b
    for k in range(n):
        if k == 0:
            diag[k] = (b - a) / (ab + 2.0)
        else:
            diag[k] = (b * b - a * a) / ((2 * k + ab) * (2 * k + ab + 2.0))
    for k in range(1, n):
        if k == 1:
            beta = 4.0 * (1 + a) * (1 + b) / ((2 + ab) ** 2 * (3 + ab))
        else:
            s = 2 * k + ab
            beta = 4.0 * k * (k + a) * (k + b) * (k + ab) / (s * s * (s + 1) * (s - 1))
        off[k - 1] = math.sqrt(beta)
    return diag, off


def jacobi_mass(a: float, b: float) -> float:
    """Total mass of ``(1-s)^a (1+s)^b`` on (-1, 1)."""
    return math.exp(
        (a + b + 1) * math.log(2.0)
        + log_gamma(a + 1)
        + log_gamma(b + 1)
        - log_gamma(a + b + 2)
    )


@lru_cache(maxsize=256)
def gauss_jacobi(nquad: int, a: float, b: float) -> QuadratureRule:
    """Gauss-Jacobi rule for ``(1-s)^a (1+s)^b`` on (-1, 1) by Golub-Welsch.

    Parameters
    ----------
    nquad : int
        Number of nodes; the rule is exact for polynomials of degree
        ``2*nquad - 1``.
    a, b : float
        Exponents, both ``> -1``.

    Returns
    -------
    QuadratureRule
    """
    if nquad < 1:
        raise DomainError("nquad must be at least 1")
    if a <= -1 or b <= -1:
        raise DomainError(f"Jacobi exponents must exceed -1, got {(a, b)!r}")
    diag, off = _jacobi_recurrence(nquad, a, b)
    nodes, v = _tridiag_eigen_first_row(diag, off)
    weights = jacobi_mass(a, b) * v * v
    return QuadratureRule(nodes, weights, f"jacobi({a!r},{b!r})")


def gauss_legendre(nquad: int) -> QuadratureRule:
    return gauss_jacobi(nquad, 0.0, 0.0)


@lru_cache(maxsize=256)
def mu_alpha_rule(nquad: int, alpha: float) -> QuadratureRule:
    """Gauss rule on (0, inf) for the weight ``x^(2 alpha + 1) exp(-x^2)``.

    Built from the generalized Gauss-Laguerre rule in ``u = x**2``; nodes are
    ``sqrt(u_j)`` and weights are half the Laguerre weights.  Weights come
    from the Christoffel sum of orthonormal Laguerre functions, which gives
    the undamped weights ``w_j exp(x_j^2)`` to full relative accuracy.

    Parameters
    ----------
    nquad : int
        Number of nodes (at most about 300, beyond which the recurrence
        underflows).
    alpha : float
        Type parameter, ``alpha > -1``.

    Returns
    -------
    QuadratureRule
    """
    if nquad < 1:
        raise DomainError("nquad must be at least 1")
    if alpha <= -1:
        raise DomainError(f"alpha must exceed -1, got {alpha!r}")
    k = np.arange(nquad)
    diag = 2 * k + alpha + 1.0
    off = np.sqrt(k[1:] * (k[1:] + alpha))
    u, _ = _tridiag_eigen_first_row(diag, off)
    phi = laguerre_functions(nquad - 1, alpha, u)
    undamped = 0.5 / np.sum(phi * phi, axis=0)
    weights = undamped * np.exp(-u)
    return QuadratureRule(np.sqrt(u), weights, f"mu-alpha({alpha!r})", undamped)


def pi_nu_mass(nu: float) -> float:
    """Total mass ``1/(2^nu Gamma(nu+1))`` of the one-dimensional Jacobi-type measure.

    The measure has density ``(1-s^2)^(nu-1/2) / (sqrt(pi) 2^nu Gamma(nu+1/2))``
    on (-1, 1).
    """
    if nu <= 0:
        raise DomainError(f"nu must be positive, got {nu!r}")
    return math.exp(-nu * math.log(2.0) - log_gamma(nu + 1.0))


def pi_nu_density_const(nu: float) -> float:
    """Normalizing prefactor ``1/(sqrt(pi) 2^nu Gamma(nu+1/2))`` of that measure."""
    return math.exp(-0.5 * math.log(math.pi) - nu * math.log(2.0) - log_gamma(nu + 0.5))


def composite_legendre(breaks, nper: int = 16):
    """Composite Gauss-Legendre nodes and weights over consecutive panels.

    Parameters
    ----------
    breaks : sequence of float
        Increasing panel endpoints.
    nper : int
        Nodes per panel.

    Returns
    -------
    (nodes, weights) : tuple of ndarray
    """
    base = gauss_legendre(nper)
    breaks = np.asarray(breaks, dtype=float)
    lo, hi = breaks[:-1, None], breaks[1:, None]
    half = 0.5 * (hi - lo)
    nodes = (lo + half * (base.nodes[None, :] + 1.0)).ravel()
    weights = (half * base.weights[None, :]).ravel()
    return nodes, weights
