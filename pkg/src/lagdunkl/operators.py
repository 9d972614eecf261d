"""Spectral operators acting on finite expansions.

An :class:`Expansion` stores coefficients against one of the orthonormal
systems of :mod:`lagdunkl.bases`.  Semigroups, Riesz transforms and
multipliers act diagonally (or through the exact ladder relations) on the
coefficients; maximal functions and square functions are evaluated
pointwise from the coefficients.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional

import numpy as np

from .bases import (
    BasisKind,
    DerivativeWord,
    MultiIndex,
    SignPattern,
    TypeParam,
    as_type,
    basis_table,
    eigenvalue,
    ladder_apply,
    laguerre_table,
    laguerre_word_eval,
    multi_indices,
)
from .kernels import MultiplierSpec, log_t_rule, _weighted_interval_rule, _interval_measure
from .specfun import DomainError, gauss_legendre, log_gamma, mu_alpha_rule


@dataclass(frozen=True)
class Expansion:
    """Finite expansion ``sum_k c_k phi_k``.

    Attributes
    ----------
    kind : BasisKind
    alpha : TypeParam
    coeffs : dict
        MultiIndex to float.
    eta : SignPattern or None
        For the Dunkl and symmetrized kinds a pattern marks a restricted
        expansion on the positive orthant, ``sum c_k (phi_k)^+`` with
        ``k mod 2 = eta``.  For the Laguerre kind it selects the shifted
        basis ``x^eta ell_k^{alpha+eta}``.
    """

    kind: BasisKind
    alpha: TypeParam
    coeffs: Mapping
    eta: Optional[SignPattern] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", BasisKind.parse(self.kind))
        object.__setattr__(self, "alpha", as_type(self.alpha))
        coeffs = {MultiIndex(k): float(v) for k, v in dict(self.coeffs).items()}
        for k in coeffs:
            if len(k) != self.alpha.d:
                raise DomainError(f"index {k} does not match d = {self.alpha.d}")
        if self.eta is not None:
            eta = SignPattern(self.eta)
            if len(eta) != self.alpha.d:
                raise DomainError("eta does not match the dimension")
            object.__setattr__(self, "eta", eta)
            if self.kind is not BasisKind.LAGUERRE:
                for k in coeffs:
                    if tuple(k.parity) != tuple(eta):
                        raise DomainError(f"index {k} is outside the sector {eta}")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def d(self) -> int:
        return self.alpha.d

    @property
    def restricted(self) -> bool:
        return self.eta is not None or self.kind is BasisKind.LAGUERRE

    @property
    def keys(self) -> list:
        return sorted(self.coeffs, key=lambda k: (k.order, tuple(k)))

    def vector(self) -> np.ndarray:
        return np.array([self.coeffs[k] for k in self.keys])

    def eigenvalues(self) -> np.ndarray:
        if self.kind is BasisKind.LAGUERRE and self.eta is not None and any(self.eta):
            raise DomainError("shifted Laguerre expansions are not eigen-expansions")
        return np.array([eigenvalue(self.kind, k, self.alpha) for k in self.keys])

    def with_coeffs(self, coeffs, eta="keep") -> "Expansion":
        return Expansion(self.kind, self.alpha, coeffs, self.eta if eta == "keep" else eta)

    def norm(self) -> float:
        """L^2 norm (restricted expansions are normed on the orthant, full ones on R^d)."""
        v = self.vector()
        scale = 2.0 ** (-self.d) if (self.eta is not None and self.kind is not BasisKind.LAGUERRE) else 1.0
        return float(math.sqrt(scale * np.dot(v, v)))


def basis_matrix(kind, alpha, keys, x, eta=None) -> np.ndarray:
    """Values ``phi_k(x_p)`` as a ``(len(keys), n_points)`` array."""
    kind = BasisKind.parse(kind)
    alpha = as_type(alpha)
    x = np.asarray(x, dtype=float)
    if x.ndim == 1 and alpha.d == 1 and x.shape[-1] != 1:
        x = x[:, None]
    if x.ndim == 1:
        x = x[None, :]
    pts = x.reshape(-1, alpha.d)
    if not keys:
        return np.zeros((0, pts.shape[0]))
    out = np.ones((len(keys), pts.shape[0]))
    for i in range(alpha.d):
        kmax = max(k[i] for k in keys)
        xi = pts[:, i]
        if kind is BasisKind.LAGUERRE:
            # shifted basis x^eta ell^{alpha+eta}
            e = eta[i] if eta is not None else 0
            table = laguerre_table(kmax, alpha[i] + e, xi) * (xi ** e if e else 1.0)
        else:
            table = basis_table(kind, kmax, alpha[i], xi)
        out *= table[[k[i] for k in keys]]
    return out


def evaluate(expansion: Expansion, x) -> np.ndarray:
    """Pointwise values of an expansion; ``x`` has the coordinate on its last axis."""
    x = np.asarray(x, dtype=float)
    d = expansion.d
    if x.ndim == 0 or (d > 1 and x.shape[-1] != d):
        raise DomainError(f"points need {d} coordinates")
    if x.ndim == 1 and d == 1:
        x = x[:, None]
    shape = x.shape[:-1]
    if expansion.restricted and np.any(x < 0):
        raise DomainError("restricted expansions live on the positive orthant")
    keys = expansion.keys
    mat = basis_matrix(expansion.kind, expansion.alpha, keys, x, expansion.eta)
    return (expansion.vector() @ mat).reshape(shape)


# ---------------------------------------------------------------------------
# Analysis


def _sign_flips(d):
    return [np.array(s, dtype=float) for s in itertools.product((1.0, -1.0), repeat=d)]


def _grid_rule(alpha: TypeParam, nquad: int):
    rules = [mu_alpha_rule(nquad, a) for a in alpha]
    nodes = np.stack(np.meshgrid(*[r.nodes for r in rules], indexing="ij"), axis=-1).reshape(-1, alpha.d)
    w = np.ones(nodes.shape[0])
    for i, r in enumerate(rules):
        und = r.undamped if r.undamped is not None else r.weights * np.exp(r.nodes ** 2)
        w = w * np.meshgrid(*[und if j == i else np.ones(len(rr.nodes)) for j, rr in enumerate(rules)],
                            indexing="ij")[i].reshape(-1)
    return nodes, w


def analyze(f: Callable, kind, alpha, N: int, nquad: Optional[int] = None, eta=None) -> Expansion:
    """Coefficients of ``f`` for all ``|k| <= N`` by tensor quadrature.

    Parameters
    ----------
    f : callable
        Takes an ``(npts, d)`` array and returns ``npts`` values.  For full
        expansions it must accept points of R^d; for restricted ones (Laguerre,
        or ``eta`` given) only the positive orthant is sampled.
    kind, alpha
        Basis kind and type parameter.
    N : int
        Maximal order ``|k|``.
    nquad : int, optional
        Nodes per axis, default ``N + 16``.  Exact for functions that are
        polynomial multiples of ``exp(-|x|^2/2)`` of degree at most
        ``2 nquad - N - 1``.
    eta : sign pattern, optional
        Restricted sector (Dunkl and symmetrized kinds).

    Returns
    -------
    Expansion
    """
    kind = BasisKind.parse(kind)
    alpha = as_type(alpha)
    d = alpha.d
    if N < 0:
        raise DomainError("N must be nonnegative")
    nq = nquad if nquad is not None else N + 16
    nodes, w = _grid_rule(alpha, nq)
    keys = multi_indices(d, N)
    if kind is BasisKind.LAGUERRE:
        if eta is not None and any(eta):
            raise DomainError("analysis into shifted Laguerre bases is not supported")
        vals = np.asarray(f(nodes), dtype=float)
        mat = basis_matrix(kind, alpha, keys, nodes)
        c = mat @ (w * vals)
        return Expansion(kind, alpha, dict(zip(keys, c)))
    if eta is not None:
        eta = SignPattern(eta)
        keys = [k for k in keys if tuple(k.parity) == tuple(eta)]
        vals = np.asarray(f(nodes), dtype=float)
        mat = basis_matrix(kind, alpha, keys, nodes)
        c = 2.0 ** d * (mat @ (w * vals))
        return Expansion(kind, alpha, dict(zip(keys, c)), eta)
    flips = _sign_flips(d)
    fvals = [np.asarray(f(nodes * s), dtype=float) for s in flips]
    mat = basis_matrix(kind, alpha, keys, nodes)
    coeffs = {}
    for row, k in zip(mat, keys):
        acc = np.zeros(nodes.shape[0])
        for s, fv in zip(flips, fvals):
            sign = float(np.prod(s ** np.array(k.parity)))
            acc += sign * fv
        coeffs[k] = float(np.dot(row, w * acc))
    return Expansion(kind, alpha, coeffs)


def analysis_nodes(kind, alpha, N: int, nquad: Optional[int] = None, eta=None) -> np.ndarray:
    """Every point at which :func:`analyze` samples ``f``, as an ``(npts, d)`` array."""
    kind = BasisKind.parse(kind)
    alpha = as_type(alpha)
    nodes, _ = _grid_rule(alpha, nquad if nquad is not None else N + 16)
    if kind is BasisKind.LAGUERRE or eta is not None:
        return nodes
    return np.concatenate([nodes * s for s in _sign_flips(alpha.d)])


def restrict(expansion: Expansion, eta) -> Expansion:
    """Restricted expansion of the ``eta``-symmetric part of a full expansion."""
    if expansion.eta is not None or expansion.kind is BasisKind.LAGUERRE:
        raise DomainError("expansion is already restricted")
    eta = SignPattern(eta)
    coeffs = {k: c for k, c in expansion.coeffs.items() if tuple(k.parity) == tuple(eta)}
    return expansion.with_coeffs(coeffs, eta)


def laguerre_to_aux(expansion: Expansion) -> Expansion:
    """Laguerre coefficients to restricted Dunkl coefficients in the even sector.

    ``(h_{2j})^+ = (-1)^{|j|} 2^{-d/2} ell_j`` gives ``c_{2j} = (-1)^{|j|} 2^{d/2} a_j``.
    """
    if expansion.kind is not BasisKind.LAGUERRE or (expansion.eta is not None and any(expansion.eta)):
        raise DomainError("expects an unshifted Laguerre expansion")
    d = expansion.d
    coeffs = {MultiIndex(2 * v for v in j): (-1.0) ** j.order * 2.0 ** (d / 2.0) * c
              for j, c in expansion.coeffs.items()}
    return Expansion(BasisKind.DUNKL, expansion.alpha, coeffs, SignPattern((0,) * d))


# ---------------------------------------------------------------------------
# Semigroups and multipliers


def heat_apply(expansion: Expansion, t: float) -> Expansion:
    """``exp(-t L)`` on the coefficients."""
    if t < 0:
        raise DomainError("t must be nonnegative")
    lam = expansion.eigenvalues()
    return expansion.with_coeffs(dict(zip(expansion.keys, expansion.vector() * np.exp(-t * lam))))


def _build_subordination_rule(v_lo=-40.0, v_hi=8.0, panel=0.25, nper=16):
    from .specfun import composite_legendre
    npan = int(round((v_hi - v_lo) / panel))
    v, w = composite_legendre(np.linspace(v_lo, v_hi, npan + 1), nper)
    u = np.exp(v)
    # du / sqrt(pi u) = exp(v/2) dv / sqrt(pi)
    return u, w * np.exp(0.5 * v - u) / math.sqrt(math.pi)


_SUB_RULE = _build_subordination_rule()


def poisson_apply(expansion: Expansion, t: float, method: str = "spectral") -> Expansion:
    """Poisson semigroup ``exp(-t sqrt(L))``.

    ``method="subordination"`` averages heat semigroup coefficients over the
    subordination density instead of using the closed form.
    """
    if t < 0:
        raise DomainError("t must be nonnegative")
    lam = expansion.eigenvalues()
    if method == "spectral":
        factor = np.exp(-t * np.sqrt(lam))
    elif method == "subordination":
        if t == 0:
            factor = np.ones_like(lam)
        else:
            u, w = _SUB_RULE
            factor = np.exp(-np.outer(t * t / (4.0 * u), lam)).T @ w
    else:
        raise DomainError(f"unknown method {method!r}")
    return expansion.with_coeffs(dict(zip(expansion.keys, expansion.vector() * factor)))


def _psi_values(psi, t):
    try:
        out = np.asarray(psi(t), dtype=float)
        if out.shape == t.shape:
            return out
    except (TypeError, ValueError):
        pass
    return np.array([float(psi(v)) for v in t])


def _dyadic_rule(j_lo=-50, j_hi=6, nper=64):
    g = gauss_legendre(nper)
    nodes, weights = [], []
    for j in range(j_lo, j_hi):
        a, b = 2.0 ** j, 2.0 ** (j + 1)
        h = 0.5 * (b - a)
        nodes.append(a + h * (g.nodes + 1.0))
        weights.append(h * g.weights)
    s = np.concatenate(nodes)
    return s, np.concatenate(weights) * np.exp(-s), 2.0 ** j_lo


_DYADIC = _dyadic_rule()


def multiplier_value(spec: MultiplierSpec, z) -> np.ndarray:
    """``m(z)``: ``z int exp(-tz) psi(t) dt`` or ``sum w_j exp(-t_j z)``.

    The Laplace integral is taken in ``s = t z`` with a 64-point rule per
    dyadic block; below the first block ``psi`` is frozen at its left value.
    """
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if np.any(z <= 0):
        raise DomainError("multipliers are evaluated at positive arguments")
    if spec.variant == "stieltjes":
        return np.array([sum(w * math.exp(-t * zz) for t, w in spec.atoms) for zz in z])
    s, w, s0 = _DYADIC
    out = np.empty_like(z)
    for i, zz in enumerate(z):
        vals = _psi_values(spec.psi, s / zz)
        if np.any(np.abs(vals) > spec.psi_bound * (1 + 1e-12)):
            raise DomainError("psi exceeds its declared bound")
        head = float(_psi_values(spec.psi, np.array([s0 / zz]))[0]) * (1.0 - math.exp(-s0))
        out[i] = float(np.dot(w, vals)) + head
    return out


def multiplier_apply(expansion: Expansion, spec: MultiplierSpec) -> Expansion:
    lam = expansion.eigenvalues()
    z = np.sqrt(lam) if spec.poisson else lam
    m = multiplier_value(spec, z)
    return expansion.with_coeffs(dict(zip(expansion.keys, expansion.vector() * m)))


# ---------------------------------------------------------------------------
# Riesz transforms


def _target_eta(expansion, word):
    if expansion.eta is None:
        return None
    return SignPattern((e + n) % 2 for e, n in zip(expansion.eta, word.n))


def _laguerre_ladder(word: DerivativeWord, k):
    # interlaced delta, delta*, ... on ell_k: delta maps ell_j^a to
    # -2 sqrt(j) x ell_{j-1}^{a+1}; delta* maps x ell_j^{a+1} to -2 sqrt(j+1) ell_{j+1}^a
    coeff = 1.0
    cur = list(k)
    for i, ni in enumerate(word.n):
        for step in range(ni):
            if step % 2 == 0:
                if cur[i] == 0:
                    return 0.0, None
                coeff *= -2.0 * math.sqrt(cur[i])
                cur[i] -= 1
            else:
                coeff *= -2.0 * math.sqrt(cur[i] + 1)
                cur[i] += 1
    return coeff, MultiIndex(cur)


def riesz_apply(expansion: Expansion, word: DerivativeWord) -> Expansion:
    """Riesz transform ``word L^{-|n|/2}`` via the exact ladder relations.

    For the Laguerre kind the word is the interlaced ``delta, delta*, ...``
    sequence and the result lives in the shifted basis ``x^{n mod 2}
    ell^{alpha + n mod 2}``.
    """
    if word.order < 1:
        raise DomainError("Riesz transforms need |n| >= 1")
    kind = expansion.kind
    lam = expansion.eigenvalues()
    out: dict = {}
    for k, c, l in zip(expansion.keys, expansion.vector(), lam):
        if kind is BasisKind.LAGUERRE:
            coef, tgt = _laguerre_ladder(word, k)
        else:
            coef, tgt = ladder_apply(kind, word, k, expansion.alpha)
        if tgt is None or coef == 0.0:
            continue
        out[tgt] = out.get(tgt, 0.0) + c * coef * l ** (-word.order / 2.0)
    if kind is BasisKind.LAGUERRE:
        return Expansion(kind, expansion.alpha, out, SignPattern(v % 2 for v in word.n))
    return expansion.with_coeffs(out, _target_eta(expansion, word))


# ---------------------------------------------------------------------------
# Pointwise machinery for maximal and square functions


def _as_points(x, d):
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        x = x[None]
    if d == 1 and (x.ndim == 1):
        x = x[:, None]
    if x.shape[-1] != d:
        raise DomainError(f"points need {d} coordinates")
    return x.reshape(-1, d)


def word_matrix(expansion: Expansion, word: Optional[DerivativeWord], x, interlaced: bool = True):
    """Rows ``c_k (word phi_k)(x_p)`` and the eigenvalues ``lambda_k``.

    Laguerre words are evaluated through the symbolic derivative route; the
    other kinds use the ladder relations.
    """
    pts = _as_points(x, expansion.d)
    keys = expansion.keys
    c = expansion.vector()
    lam = expansion.eigenvalues()
    if word is None or word.order == 0:
        mat = basis_matrix(expansion.kind, expansion.alpha, keys, pts, expansion.eta)
        return c[:, None] * mat, lam
    if expansion.kind is BasisKind.LAGUERRE:
        rows = [ck * laguerre_word_eval(k, expansion.alpha, word.n, pts, interlaced)
                for k, ck in zip(keys, c)]
        return np.array(rows).reshape(len(keys), -1), lam
    coefs, targets = [], []
    for k in keys:
        co, tg = ladder_apply(expansion.kind, word, k, expansion.alpha)
        coefs.append(co)
        targets.append(tg if tg is not None else k)
    mat = basis_matrix(expansion.kind, expansion.alpha, targets, pts)
    return (c * np.array(coefs))[:, None] * mat, lam


@dataclass(frozen=True)
class TGrid:
    """Geometric t-grid; ``quadrature`` turns its cells into log-panel rules."""

    points: np.ndarray
    role: str = "maximal"

    def __post_init__(self):
        p = np.asarray(self.points, dtype=float)
        if p.ndim != 1 or p.size < 2 or np.any(p <= 0) or np.any(np.diff(p) <= 0):
            raise DomainError("t-grid points must be positive and increasing")
        p.setflags(write=False)
        object.__setattr__(self, "points", p)

    @classmethod
    def geometric(cls, t_lo: float = 1e-4, t_hi: float = 20.0, ratio: float = 1.03, role="maximal"):
        n = int(math.ceil(math.log(t_hi / t_lo) / math.log(ratio)))
        return cls(t_lo * ratio ** np.arange(n + 1), role)

    def refined(self) -> "TGrid":
        p = self.points
        mids = np.sqrt(p[:-1] * p[1:])
        return TGrid(np.sort(np.concatenate([p, mids])), self.role)

    def quadrature(self, nper: int = 4):
        g = gauss_legendre(nper)
        lp = np.log(self.points)
        a, b = lp[:-1], lp[1:]
        h = 0.5 * (b - a)
        u = (a[:, None] + h[:, None] * (g.nodes[None, :] + 1.0)).ravel()
        w = (h[:, None] * g.weights[None, :]).ravel()
        t = np.exp(u)
        return t, w * t


def maximal_op(expansion: Expansion, x, grid: Optional[TGrid] = None, semigroup: str = "heat") -> np.ndarray:
    """``sup_t |T_t f(x)|`` over a t-grid (heat or Poisson semigroup)."""
    grid = grid or TGrid.geometric()
    mat, lam = word_matrix(expansion, None, x)
    rate = lam if semigroup == "heat" else np.sqrt(lam)
    if semigroup not in ("heat", "poisson"):
        raise DomainError(f"unknown semigroup {semigroup!r}")
    vals = np.exp(-np.outer(grid.points, rate)) @ mat
    return np.max(np.abs(vals), axis=0)


def _power(word, m, semigroup):
    n = word.order if word is not None else 0
    if n + m < 1:
        raise DomainError("square functions need |n| + m >= 1")
    return n + 2 * m if semigroup == "heat" else 2 * n + 2 * m


def g_function(expansion: Expansion, word: Optional[DerivativeWord], m: int, x,
               semigroup: str = "heat", grid: Optional[TGrid] = None,
               interlaced: bool = True) -> np.ndarray:
    """Littlewood-Paley-Stein g-function.

    ``g(f)(x)^2 = int_0^inf |d_t^m word T_t f(x)|^2 t^{s-1} dt`` with
    ``s = |n| + 2m`` (heat) or ``s = 2|n| + 2m`` (Poisson).  Without a grid
    the t-integral is done in closed form, ``Gamma(s) (r_k + r_k')^{-s}``
    summed over pairs of modes; with a grid it uses the grid's log-panel
    quadrature.
    """
    s = _power(word, m, semigroup)
    mat, lam = word_matrix(expansion, word, x, interlaced)
    rate = lam if semigroup == "heat" else np.sqrt(lam)
    a = mat * (rate ** m)[:, None]
    if grid is None:
        gram = math.exp(log_gamma(s)) * (rate[:, None] + rate[None, :]) ** (-s)
        val = np.einsum("kp,kl,lp->p", a, gram, a)
        return np.sqrt(np.maximum(val, 0.0))
    t, w = grid.quadrature()
    f = np.exp(-np.outer(t, rate)) @ a
    return np.sqrt(np.maximum((w * t ** (s - 1)) @ (f * f), 0.0))


def lusin_area(expansion: Expansion, word: Optional[DerivativeWord], m: int, x,
               semigroup: str = "heat", nz: int = 24, interlaced: bool = True) -> np.ndarray:
    """Lusin area function over the cone ``|z| < sqrt t`` (heat) or ``|z| < t`` (Poisson).

    ``S(f)(x)^2 = int_0^inf t^{s-1} int_{cone} |d_t^m word T_t f(x+z)|^2
    dmu(x+z) / mu(B_cube) dt``; restricted expansions cut the cone to the
    orthant and normalize by the restricted cube.  One-dimensional cones are
    integrated with endpoint-adapted Gauss rules; in two dimensions a polar
    rule over the disc is used.
    """
    s = _power(word, m, semigroup)
    pts = _as_points(x, expansion.d)
    lam = expansion.eigenvalues()
    rate = lam if semigroup == "heat" else np.sqrt(lam)
    lam_min = float(np.min(rate)) if rate.size else 1.0
    t, w = log_t_rule(1e-10, max(2.0, 36.0 / (2.0 * lam_min)), panel=0.5, nper=12)
    out = np.empty(pts.shape[0])
    for p, xp in enumerate(pts):
        if expansion.d == 1:
            u_all, wt_all, owner = _cone_rule_1d(expansion, xp[0], t, semigroup, nz)
            upts = u_all[:, None]
        elif expansion.d == 2:
            upts, wt_all, owner = _cone_rule_2d(expansion, xp, t, semigroup, nz)
        else:
            raise NotImplementedError("Lusin area functions support d <= 2")
        mat, _ = word_matrix(expansion, word, upts, interlaced)
        tt = t[owner]
        f = np.sum(mat * ((rate ** m)[:, None] * np.exp(-np.outer(rate, tt))), axis=0)
        out[p] = float(np.dot(wt_all * w[owner] * tt ** (s - 1), f * f))
    return np.sqrt(np.maximum(out, 0.0))


def _radius(t, semigroup):
    return math.sqrt(t) if semigroup == "heat" else t


def _cone_rule_1d(expansion, x, t, semigroup, nz):
    a = expansion.alpha[0]
    restricted = expansion.restricted
    us, ws, owner = [], [], []
    for j, tj in enumerate(t):
        r = _radius(tj, semigroup)
        lo, hi = x - r, x + r
        if restricted:
            lo = max(lo, 0.0)
            v = float(_interval_measure(a, lo, hi))
            u, wu = _weighted_interval_rule(a, lo, hi, nz)
        else:
            v = float(_interval_measure(a, lo, hi))
            u, wu = _signed_interval_rule(a, lo, hi, nz)
        us.append(u)
        ws.append(wu / v)
        owner.append(np.full(u.size, j))
    return np.concatenate(us), np.concatenate(ws), np.concatenate(owner)


def _signed_interval_rule(a, lo, hi, nz):
    # int_lo^hi g(u) |u|^{2a+1} du on an interval that may contain 0
    if lo >= 0:
        return _weighted_interval_rule(a, lo, hi, nz)
    if hi <= 0:
        u, w = _weighted_interval_rule(a, -hi, -lo, nz)
        return -u, w
    u1, w1 = _weighted_interval_rule(a, 0.0, hi, nz)
    u2, w2 = _weighted_interval_rule(a, 0.0, -lo, nz)
    return np.concatenate([u1, -u2]), np.concatenate([w1, w2])


def _cone_rule_2d(expansion, x, t, semigroup, nz):
    alpha = expansion.alpha
    restricted = expansion.restricted
    g = gauss_legendre(nz)
    ntheta = 2 * nz
    theta = 2 * math.pi * np.arange(ntheta) / ntheta
    us, ws, owner = [], [], []
    for j, tj in enumerate(t):
        r = _radius(tj, semigroup)
        rho = 0.5 * r * (g.nodes + 1.0)
        wr = 0.5 * r * g.weights * rho
        z = np.stack([np.outer(rho, np.cos(theta)).ravel(), np.outer(rho, np.sin(theta)).ravel()], axis=-1)
        wz = np.repeat(wr, ntheta) * (2 * math.pi / ntheta)
        u = x[None, :] + z
        dens = np.abs(u[:, 0]) ** (2 * alpha[0] + 1) * np.abs(u[:, 1]) ** (2 * alpha[1] + 1)
        v = 1.0
        for i in range(2):
            lo = max(x[i] - r, 0.0) if restricted else x[i] - r
            v *= float(_interval_measure(alpha[i], lo, x[i] + r))
        if restricted:
            keep = np.all(u > 0, axis=1)
            u, dens, wz = u[keep], dens[keep], wz[keep]
        us.append(u)
        ws.append(wz * dens / v)
        owner.append(np.full(u.shape[0], j))
    return np.concatenate(us), np.concatenate(ws), np.concatenate(owner)
