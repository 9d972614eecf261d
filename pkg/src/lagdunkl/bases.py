"""Eigenfunction systems and ladder-operator algebra.

Three orthonormal systems are covered:

* Laguerre functions ``ell_k`` on the positive orthant, orthonormal in
  ``L^2(mu_alpha^+)``;
* generalized Hermite functions ``h_k`` on R^d for the Dunkl harmonic
  oscillator;
* their sign-twisted variant ``Phi_k`` for the symmetrized oscillator.

All evaluators take points as arrays whose last axis has length ``d`` and
return arrays of shape ``x.shape[:-1]``.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Optional, Sequence

import numpy as np

from .specfun import DomainError, laguerre_functions, laguerre_poly, log_gamma


class BasisKind(str, enum.Enum):
    LAGUERRE = "laguerre"
    DUNKL = "laguerre-dunkl"
    SYMMETRIZED = "laguerre-symmetrized"

    @classmethod
    def parse(cls, value) -> "BasisKind":
        if isinstance(value, cls):
            return value
        aliases = {"dunkl": cls.DUNKL, "sym": cls.SYMMETRIZED, "symmetrized": cls.SYMMETRIZED}
        if value in aliases:
            return aliases[value]
        return cls(value)


class MultiIndex(tuple):
    """Tuple of nonnegative integers with parity and floor helpers."""

    def __new__(cls, entries: Iterable[int]):
        entries = tuple(int(v) for v in entries)
        if any(v < 0 for v in entries):
            raise DomainError(f"multi-index entries must be nonnegative: {entries}")
        return super().__new__(cls, entries)

    @property
    def parity(self) -> "MultiIndex":
        return MultiIndex(v % 2 for v in self)

    @property
    def half(self) -> "MultiIndex":
        """Entrywise floor of ``k/2``."""
        return MultiIndex(v // 2 for v in self)

    @property
    def order(self) -> int:
        return sum(self)

    def shift(self, axis: int, step: int) -> Optional["MultiIndex"]:
        """Return ``k + step*e_axis``, or None when it leaves N^d."""
        vals = list(self)
        vals[axis] += step
        if vals[axis] < 0:
            return None
        return MultiIndex(vals)


def multi_indices(d: int, max_order: int) -> list:
    """All multi-indices in N^d with ``|k| <= max_order``, graded then lexicographic."""
    out = []
    for total in range(max_order + 1):
        for combo in itertools.product(range(total + 1), repeat=d):
            if sum(combo) == total:
                out.append(MultiIndex(combo))
    return out


@dataclass(frozen=True)
class TypeParam:
    """Multiplicity function ``alpha`` in ``(-1, inf)^d``."""

    alpha: tuple

    def __post_init__(self):
        vals = tuple(float(a) for a in np.atleast_1d(self.alpha))
        if not vals:
            raise DomainError("alpha needs at least one entry")
        for a in vals:
            if not a > -1.0 or not math.isfinite(a):
                raise DomainError(f"every alpha_i must exceed -1, got {a!r}")
        object.__setattr__(self, "alpha", vals)

    @property
    def d(self) -> int:
        return len(self.alpha)

    @property
    def total(self) -> float:
        return float(sum(self.alpha))

    def shifted(self, eta: Sequence[int]) -> "TypeParam":
        return TypeParam(tuple(a + e for a, e in zip(self.alpha, eta)))

    def __iter__(self):
        return iter(self.alpha)

    def __getitem__(self, i):
        return self.alpha[i]


def as_type(alpha) -> TypeParam:
    return alpha if isinstance(alpha, TypeParam) else TypeParam(tuple(np.atleast_1d(alpha)))


class SignPattern(tuple):
    """Element ``eta`` of ``{0,1}^d``."""

    def __new__(cls, entries: Iterable[int]):
        entries = tuple(int(v) for v in entries)
        if any(v not in (0, 1) for v in entries):
            raise DomainError(f"sign pattern entries must be 0 or 1: {entries}")
        return super().__new__(cls, entries)

    @classmethod
    def all(cls, d: int) -> list:
        return [cls(p) for p in itertools.product((0, 1), repeat=d)]


@dataclass(frozen=True)
class DerivativeWord:
    """Block word ``(n, omega)`` selecting a composition of ladder operators.

    ``omega[i]`` is the tuple of signs for axis ``i``; sign ``+1`` picks the
    lowering operator ``T_i + x_i`` and ``-1`` the raising operator
    ``-T_i + x_i``.  The first entry of each block acts first.  For the
    symmetrized setting ``omega`` is None and the word is the plain power.
    """

    n: MultiIndex
    omega: Optional[tuple] = None

    def __post_init__(self):
        object.__setattr__(self, "n", MultiIndex(self.n))
        if self.omega is not None:
            omega = tuple(tuple(int(s) for s in block) for block in self.omega)
            if len(omega) != len(self.n):
                raise DomainError("omega needs one block per axis")
            for ni, block in zip(self.n, omega):
                if len(block) != ni or any(s not in (-1, 1) for s in block):
                    raise DomainError(f"omega block {block} does not match n_i = {ni}")
            object.__setattr__(self, "omega", omega)

    @property
    def order(self) -> int:
        return self.n.order

    @property
    def shift(self) -> tuple:
        """Net index decrease per axis, ``sum_j omega_j^i``."""
        if self.omega is None:
            raise ValueError("plain powers have no fixed index shift")
        return tuple(sum(b) for b in self.omega)

    @classmethod
    def alternating(cls, n) -> "DerivativeWord":
        """The interlaced word with ``omega_j^i = (-1)^(j+1)``."""
        return cls(MultiIndex(n), tuple(tuple((-1) ** j for j in range(ni)) for ni in n))

    @classmethod
    def uniform(cls, n, sign: int = 1) -> "DerivativeWord":
        return cls(MultiIndex(n), tuple(tuple([sign] * ni) for ni in n))

    @classmethod
    def plain(cls, n) -> "DerivativeWord":
        return cls(MultiIndex(n), None)


# ---------------------------------------------------------------------------
# Pointwise evaluation


def normalizing_const(k, alpha) -> float:
    """Positive constant making ``ell_k^alpha`` a unit vector in ``L^2(mu_alpha^+)``."""
    alpha = as_type(alpha)
    logc = 0.0
    for ki, ai in zip(k, alpha):
        logc += 0.5 * (math.log(2.0) + log_gamma(ki + 1.0) - log_gamma(ki + ai + 1.0))
    return math.exp(logc)


def _points(x, d: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        x = x[None]
    if x.shape[-1] != d:
        raise DomainError(f"points must have last axis of length {d}, got shape {x.shape}")
    return x


def laguerre_table(kmax: int, a: float, x) -> np.ndarray:
    """One-dimensional Laguerre functions ``ell_0..ell_kmax`` with parameter ``a``.

    Returns an array of shape ``(kmax + 1,) + shape(x)``.
    """
    x = np.asarray(x, dtype=float)
    return math.sqrt(2.0) * laguerre_functions(kmax, a, x * x)


def basis_table(kind, kmax: int, a: float, x) -> np.ndarray:
    """One-dimensional basis functions of orders ``0..kmax`` for a basis kind.

    For the Dunkl and symmetrized kinds these are the d = 1 functions
    ``h_k`` and ``Phi_k``; multivariate functions are products over axes.
    """
    kind = BasisKind.parse(kind)
    x = np.asarray(x, dtype=float)
    if kind is BasisKind.LAGUERRE:
        return laguerre_table(kmax, a, x)
    half = kmax // 2
    even = laguerre_table(half, a, x)
    odd = x * laguerre_table(half, a + 1.0, x) if kmax >= 1 else None
    out = np.empty((kmax + 1,) + x.shape)
    r2 = math.sqrt(0.5)
    for k in range(kmax + 1):
        j = k // 2
        sign = -1.0 if (kind is BasisKind.DUNKL and j % 2) else 1.0
        out[k] = sign * r2 * (even[j] if k % 2 == 0 else odd[j])
    return out


def _product_eval(kind, k, alpha, x) -> np.ndarray:
    alpha = as_type(alpha)
    k = MultiIndex(k)
    x = _points(x, alpha.d)
    out = np.ones(x.shape[:-1])
    for i, (ki, ai) in enumerate(zip(k, alpha)):
        out = out * basis_table(kind, ki, ai, x[..., i])[ki]
    return out


def laguerre_fn(k, alpha, x) -> np.ndarray:
    """Laguerre function ``ell_k^alpha(x)``; the formula is even in each coordinate."""
    return _product_eval(BasisKind.LAGUERRE, k, alpha, x)


def hermite_dunkl_fn(k, alpha, x) -> np.ndarray:
    """Generalized Hermite function ``h_k^alpha(x)`` on R^d."""
    return _product_eval(BasisKind.DUNKL, k, alpha, x)


def symmetrized_fn(k, alpha, x) -> np.ndarray:
    """Symmetrized eigenfunction ``Phi_k^alpha = (-1)^{|floor(k/2)|} h_k^alpha``."""
    return _product_eval(BasisKind.SYMMETRIZED, k, alpha, x)


def basis_fn(kind, k, alpha, x) -> np.ndarray:
    return _product_eval(kind, k, alpha, x)


def eigenvalue(kind, k, alpha) -> float:
    """Eigenvalue ``4n + 2|alpha| + 2d`` with the kind-specific ``n``."""
    kind = BasisKind.parse(kind)
    alpha = as_type(alpha)
    k = MultiIndex(k)
    if kind is BasisKind.LAGUERRE:
        n = float(k.order)
    elif kind is BasisKind.DUNKL:
        n = k.order / 2.0
    else:
        n = float(sum((v + 1) // 2 for v in k))
    return 4.0 * n + 2.0 * alpha.total + 2.0 * alpha.d


# ---------------------------------------------------------------------------
# Ladder algebra


def ladder_coeff_dunkl(k_i: int, alpha_i: float) -> float:
    """``m(k, a) = sqrt(2k + 2 (k mod 2)(2a + 1))``."""
    if k_i <= 0:
        return 0.0
    return math.sqrt(2 * k_i + 2 * (k_i % 2) * (2 * alpha_i + 1))


def ladder_apply_dunkl(word: DerivativeWord, k, alpha):
    """Exact action of the ladder word on ``h_k``: ``(coeff, target)``.

    ``target`` is None (with coefficient 0) when an intermediate index
    leaves N^d, matching the convention ``h_k = 0`` there.
    """
    alpha = as_type(alpha)
    k = MultiIndex(k)
    if word.omega is None:
        raise ValueError("the Dunkl ladder needs a signed word")
    coeff = 1.0
    cur = list(k)
    for i, block in enumerate(word.omega):
        for s in block:
            if s == 1:
                c = ladder_coeff_dunkl(cur[i], alpha[i])
                cur[i] -= 1
            else:
                c = ladder_coeff_dunkl(cur[i] + 1, alpha[i])
                cur[i] += 1
            if cur[i] < 0 or c == 0.0:
                return 0.0, None
            coeff *= c
    return coeff, MultiIndex(cur)


def _sym_step(ki: int):
    # D_i Phi_k = (-1)^{k_i+1} 2 sqrt(floor((k_i+1)/2)) Phi_{k - (-1)^{k_i} e_i}
    c = (-1.0) ** (ki + 1) * 2.0 * math.sqrt((ki + 1) // 2)
    return c, ki + (1 if ki % 2 else -1)


def ladder_apply_sym(n, k):
    """Exact action of ``D^n`` (symmetrized setting) on ``Phi_k``."""
    n = MultiIndex(n)
    k = MultiIndex(k)
    coeff = 1.0
    cur = list(k)
    for i, ni in enumerate(n):
        for _ in range(ni):
            c, nxt = _sym_step(cur[i])
            if c == 0.0:
                return 0.0, None
            coeff *= c
            cur[i] = nxt
    return coeff, MultiIndex(cur)


def ladder_apply(kind, word: DerivativeWord, k, alpha):
    kind = BasisKind.parse(kind)
    if kind is BasisKind.DUNKL:
        return ladder_apply_dunkl(word, k, alpha)
    if kind is BasisKind.SYMMETRIZED:
        return ladder_apply_sym(word.n, k)
    raise ValueError("Laguerre functions are not closed under the ladder; use laguerre_word_eval")


# Laguerre-setting derivatives act on terms c * x^p * L_{k-j}^{a+j}(x^2) e^{-x^2/2};
# a term is stored as {(p, j): c}.


def _d_dx(terms: dict) -> dict:
    out: dict = {}
    for (p, j), c in terms.items():
        if p:
            out[(p - 1, j)] = out.get((p - 1, j), 0.0) + p * c
        out[(p + 1, j + 1)] = out.get((p + 1, j + 1), 0.0) - 2.0 * c
        out[(p + 1, j)] = out.get((p + 1, j), 0.0) - c
    return out


def _apply_1d(terms: dict, op: str, a: float) -> dict:
    der = _d_dx(terms)
    out: dict = {}
    if op == "delta":
        for key, c in der.items():
            out[key] = out.get(key, 0.0) + c
        for (p, j), c in terms.items():
            out[(p + 1, j)] = out.get((p + 1, j), 0.0) + c
    elif op == "delta*":
        for key, c in der.items():
            out[key] = out.get(key, 0.0) - c
        for (p, j), c in terms.items():
            out[(p + 1, j)] = out.get((p + 1, j), 0.0) + c
            out[(p - 1, j)] = out.get((p - 1, j), 0.0) - (2 * a + 1) * c
    else:
        raise ValueError(op)
    return {key: c for key, c in out.items() if c != 0.0}


def laguerre_ops_1d(n_i: int, interlaced: bool) -> list:
    """Operator sequence for one axis: ``delta, delta*, delta, ...`` or ``delta^n``."""
    if interlaced:
        return ["delta" if j % 2 == 0 else "delta*" for j in range(n_i)]
    return ["delta"] * n_i


def laguerre_word_eval(k, alpha, n, x, interlaced: bool = True) -> np.ndarray:
    """Evaluate ``D^n ell_k`` (interlaced) or ``delta^n ell_k`` at points of R_+^d.

    Uses exact symbolic differentiation of Laguerre polynomials, independent
    of the Hermite ladder formulas.
    """
    alpha = as_type(alpha)
    k = MultiIndex(k)
    n = MultiIndex(n)
    x = _points(x, alpha.d)
    out = np.full(x.shape[:-1], normalizing_const(k, alpha))
    for i in range(alpha.d):
        terms = {(0, 0): 1.0}
        for op in laguerre_ops_1d(n[i], interlaced):
            terms = _apply_1d(terms, op, alpha[i])
        xi = x[..., i]
        u = xi * xi
        acc = np.zeros_like(xi)
        for (p, j), c in terms.items():
            if j > k[i]:
                continue
            lag = laguerre_poly(k[i] - j, alpha[i] + j, u) * np.ones_like(u)
            acc = acc + c * xi ** p * lag
        out = out * acc * np.exp(-0.5 * u)
    return out


# ---------------------------------------------------------------------------
# eta-symmetric components


def _sign_vectors(d: int):
    return [np.array(s, dtype=float) for s in itertools.product((1.0, -1.0), repeat=d)]


def eta_component(f: Callable, eta, x) -> np.ndarray:
    """``f_eta(x) = 2^{-d} sum_eps eps^eta f(eps x)`` for a callable ``f``."""
    eta = SignPattern(eta)
    d = len(eta)
    x = _points(x, d)
    total = np.zeros(x.shape[:-1])
    for eps in _sign_vectors(d):
        total = total + np.prod(eps ** np.array(eta)) * f(x * eps)
    return total / 2 ** d


def eta_decompose(samples: Mapping, eta) -> dict:
    """η-symmetric component of a sampled function.

    Parameters
    ----------
    samples : mapping
        Point tuples to values; every sign flip of each point must be present.
    eta : sequence of {0, 1}

    Returns
    -------
    dict
        The component at every sample point.
    """
    eta = SignPattern(eta)
    d = len(eta)
    out = {}
    for pt in samples:
        pt = tuple(float(v) for v in pt)
        if len(pt) != d:
            raise DomainError(f"sample point {pt} does not have dimension {d}")
        acc = 0.0
        for eps in itertools.product((1, -1), repeat=d):
            flipped = tuple(e * v if v != 0 else v for e, v in zip(eps, pt))
            if flipped not in samples:
                raise KeyError(f"missing reflected sample at {flipped}")
            sign = 1
            for e, h in zip(eps, eta):
                if h and e < 0:
                    sign = -sign
            acc += sign * samples[flipped]
        out[pt] = acc / 2 ** d
    return out


def eta_extend(f: Callable, eta, x) -> np.ndarray:
    """η-symmetric extension of a function given on the positive orthant.

    Zero on the coordinate hyperplanes.
    """
    eta = SignPattern(eta)
    x = _points(x, len(eta))
    sign = np.prod(np.where(x < 0, -1.0, 1.0) ** np.array(eta), axis=-1)
    zero = np.any(x == 0, axis=-1)
    vals = np.asarray(f(np.abs(x)), dtype=float)
    return np.where(zero, 0.0, sign * vals)


# ---------------------------------------------------------------------------
# Finite-difference operators used to check the ladder formulas


def central_diff(f: Callable, x, axis: int, base_step: float = 1e-3) -> np.ndarray:
    """Partial derivative by a 5-point central stencil with one Richardson level."""
    x = np.asarray(x, dtype=float)
    h = base_step * (1.0 + np.abs(x[..., axis]))

    def stencil(step):
        e = np.zeros(x.shape)
        e[..., axis] = step
        return (-f(x + 2 * e) + 8 * f(x + e) - 8 * f(x - e) + f(x - 2 * e)) / (12.0 * step)

    return (16.0 * stencil(h / 2) - stencil(h)) / 15.0


def reflect(x, axis: int) -> np.ndarray:
    y = np.array(x, dtype=float, copy=True)
    y[..., axis] = -y[..., axis]
    return y


def dunkl_op_apply(i: int, alpha, f: Callable, x, df: Optional[Callable] = None) -> np.ndarray:
    """Dunkl operator ``T_i f(x) = d_i f + (alpha_i + 1/2)(f(x) - f(sigma_i x))/x_i``.

    ``df`` may supply the partial derivative; otherwise finite differences
    are used.
    """
    alpha = as_type(alpha)
    x = np.asarray(x, dtype=float)
    if np.any(x[..., i] == 0):
        raise DomainError("Dunkl operator is singular on the hyperplane x_i = 0")
    deriv = df(x) if df is not None else central_diff(f, x, i)
    return deriv + (alpha[i] + 0.5) * (f(x) - f(reflect(x, i))) / x[..., i]


def lowering_op(i: int, alpha, f: Callable) -> Callable:
    """Callable for ``(T_i + x_i) f``."""
    return lambda x: dunkl_op_apply(i, alpha, f, x) + np.asarray(x)[..., i] * f(x)


def raising_op(i: int, alpha, f: Callable) -> Callable:
    """Callable for ``(-T_i + x_i) f``."""
    return lambda x: -dunkl_op_apply(i, alpha, f, x) + np.asarray(x)[..., i] * f(x)


def sym_op(i: int, alpha, f: Callable) -> Callable:
    """Callable for the symmetrized derivative ``T_i f + x_i f(sigma_i x)``."""
    return lambda x: dunkl_op_apply(i, alpha, f, x) + np.asarray(x)[..., i] * f(reflect(x, i))


def dunkl_oscillator(alpha, f: Callable) -> Callable:
    """``1/2 sum_i (D_i^* D_i + D_i D_i^*) f`` composed from first-order operators."""
    alpha = as_type(alpha)

    def apply(x):
        total = 0.0
        for i in range(alpha.d):
            total = total + raising_op(i, alpha, lowering_op(i, alpha, f))(x)
            total = total + lowering_op(i, alpha, raising_op(i, alpha, f))(x)
        return 0.5 * total

    return apply


def symmetrized_oscillator(alpha, f: Callable) -> Callable:
    """``lambda_0 - sum_i D_i^2 f`` for the symmetrized derivatives."""
    alpha = as_type(alpha)
    lam0 = 2.0 * alpha.total + 2.0 * alpha.d

    def apply(x):
        total = lam0 * f(x)
        for i in range(alpha.d):
            total = total - sym_op(i, alpha, sym_op(i, alpha, f))(x)
        return total

    return apply
