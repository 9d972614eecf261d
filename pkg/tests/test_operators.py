import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from lagdunkl import bases as B
from lagdunkl import operators as O
from lagdunkl.kernels import MultiplierSpec
from lagdunkl.specfun import DomainError


def unit(kind, alpha, k, N=None, eta=None):
    alpha = B.as_type(alpha)
    keys = B.multi_indices(alpha.d, N if N is not None else sum(k))
    if eta is not None:
        keys = [j for j in keys if tuple(j.parity) == tuple(eta)]
    return O.Expansion(kind, alpha, {j: float(tuple(j) == tuple(k)) for j in keys}, eta)


def nonzero(e):
    return {k: c for k, c in e.coeffs.items() if c != 0.0}


def random_expansion(kind, alpha, N, seed):
    rng = np.random.default_rng(seed)
    keys = B.multi_indices(B.as_type(alpha).d, N)
    return O.Expansion(kind, alpha, dict(zip(keys, rng.normal(size=len(keys)) * 0.6 ** np.arange(len(keys)))))


# --- analysis -----------------------------------------------------------------

@pytest.mark.parametrize("kind", ["dunkl", "sym"])
@pytest.mark.parametrize("alpha", [-0.7, 0.4, 1.3])
def test_analyze_single_basis_function(kind, alpha):
    e = O.analyze(lambda x: B.basis_fn(kind, (3,), alpha, x), kind, alpha, 10)
    want = np.array([1.0 if k == (3,) else 0.0 for k in e.keys])
    assert np.max(np.abs(e.vector() - want)) <= 1e-9


def test_analyze_laguerre_linear_combination():
    a = 0.6
    e = O.analyze(lambda x: B.laguerre_fn((0,), a, x) + 2 * B.laguerre_fn((2,), a, x), "laguerre", a, 8)
    want = np.zeros(9)
    want[0], want[2] = 1.0, 2.0
    assert np.max(np.abs(e.vector() - want)) <= 1e-9


def test_analyze_two_dimensional_product():
    alpha = (-0.5, 0.8)
    e = O.analyze(lambda x: B.basis_fn("dunkl", (1, 2), alpha, x), "dunkl", alpha, 5)
    for k, c in e.coeffs.items():
        assert c == pytest.approx(1.0 if k == (1, 2) else 0.0, abs=1e-9)


@pytest.mark.parametrize("alpha", [-0.5, 0.0, 1.3])
def test_gaussian_parseval_partial_sums(alpha):
    e = O.analyze(lambda x: np.exp(-0.5 * np.sum(x ** 2, axis=-1)), "dunkl", alpha, 40)
    partial = np.cumsum(e.vector() ** 2)
    assert np.all(np.diff(partial) >= -1e-15)
    # int |x|^{2a+1} e^{-x^2} dx over R
    assert partial[-1] == pytest.approx(math.gamma(alpha + 1), abs=1e-6)


def test_analysis_nodes_cover_both_signs():
    nodes = O.analysis_nodes("dunkl", 0.0, 4)
    assert nodes.shape == (2 * 20, 1)
    assert np.any(nodes < 0) and np.any(nodes > 0)
    assert O.analysis_nodes("laguerre", 0.0, 4).min() > 0


def test_restrict_and_laguerre_to_aux():
    e = random_expansion("dunkl", 0.3, 6, 1)
    r = O.restrict(e, (1,))
    assert all(k[0] % 2 == 1 for k in r.keys)
    with pytest.raises(DomainError):
        O.restrict(r, (0,))
    lag = O.Expansion("laguerre", 0.3, {(0,): 1.0, (1,): 0.5})
    aux = O.laguerre_to_aux(lag)
    x = np.linspace(0.1, 3.0, 7)
    assert np.allclose(O.evaluate(aux, x), O.evaluate(lag, x), atol=1e-13)


def test_expansion_validation():
    with pytest.raises(DomainError):
        O.Expansion("dunkl", (0.0,), {(1, 0): 1.0})
    with pytest.raises(DomainError):
        O.Expansion("dunkl", (0.0,), {(1,): 1.0}, eta=(0,))
    with pytest.raises(DomainError):
        O.analyze(lambda x: x[:, 0], "dunkl", 0.0, -1)


# --- semigroups -----------------------------------------------------------------

@pytest.mark.parametrize("kind", ["dunkl", "sym", "laguerre"])
def test_heat_on_unit_coefficient(kind):
    alpha = (0.25,)
    e = unit(kind, alpha, (3,))
    t = 0.7
    lam = B.eigenvalue(kind, (3,), alpha)
    assert O.heat_apply(e, t).coeffs[B.MultiIndex((3,))] == pytest.approx(math.exp(-t * lam), rel=1e-15)
    small = O.heat_apply(e, 1e-9).vector()
    assert np.max(np.abs(small - e.vector())) <= 2e-9 * lam


@settings(max_examples=30, deadline=None)
@given(s=st.floats(0.0, 3.0), t=st.floats(0.0, 3.0), seed=st.integers(0, 2 ** 16))
def test_heat_semigroup_in_coefficients(s, t, seed):
    e = random_expansion("sym", (0.4, -0.6), 6, seed)
    lhs = O.heat_apply(O.heat_apply(e, s), t).vector()
    rhs = O.heat_apply(e, s + t).vector()
    assert np.allclose(lhs, rhs, rtol=1e-13, atol=1e-300)


def test_heat_rejects_negative_time():
    with pytest.raises(DomainError):
        O.heat_apply(unit("dunkl", 0.0, (0,)), -1.0)


@pytest.mark.parametrize("t", [0.2, 0.5, 1.0, 2.0, 5.0])
def test_poisson_spectral_and_subordinated_agree(t):
    e = random_expansion("dunkl", -0.7, 12, 3)
    lam = e.eigenvalues()
    spec = O.poisson_apply(e, t).vector()
    assert np.allclose(spec, e.vector() * np.exp(-t * np.sqrt(lam)), rtol=1e-15)
    sub = O.poisson_apply(e, t, method="subordination").vector()
    assert np.max(np.abs(sub - spec) / np.abs(spec)) <= 1e-5


def test_poisson_semigroup_and_errors():
    e = random_expansion("sym", 0.5, 8, 4)
    lhs = O.poisson_apply(O.poisson_apply(e, 0.3), 0.9).vector()
    assert np.allclose(lhs, O.poisson_apply(e, 1.2).vector(), rtol=1e-13)
    with pytest.raises(DomainError):
        O.poisson_apply(e, 1.0, method="bogus")


# --- maximal function -------------------------------------------------------------

def test_maximal_of_ground_state_tends_to_value():
    alpha = 0.3
    e = unit("dunkl", alpha, (0,))
    x = np.array([0.2, 1.0, 2.5])
    grid = O.TGrid.geometric()
    val = O.maximal_op(e, x, grid)
    h0 = np.abs(B.basis_fn("dunkl", (0,), alpha, x[:, None]))
    lam0 = B.eigenvalue("dunkl", (0,), alpha)
    # the sup sits at the first grid point
    assert np.allclose(val, h0 * math.exp(-grid.points[0] * lam0), rtol=1e-14)
    assert np.allclose(val, h0, rtol=1e-3)


def test_maximal_refinement_and_slices():
    e = random_expansion("dunkl", -0.5, 10, 5)
    x = np.linspace(-2.5, 2.5, 11)
    coarse = O.maximal_op(e, x, O.TGrid.geometric(ratio=1.05))
    fine = O.maximal_op(e, x, O.TGrid.geometric(ratio=1.02))
    refined = O.maximal_op(e, x, O.TGrid.geometric(ratio=1.05).refined())
    assert np.all(refined >= coarse - 1e-15)
    # a different geometric grid is not a superset, only close
    assert np.allclose(fine, coarse, rtol=1e-3)
    for t in (1e-3, 0.1, 2.0):
        slice_ = np.abs(O.evaluate(O.heat_apply(e, t), x))
        assert np.all(slice_ <= O.maximal_op(e, x, O.TGrid(np.array([1e-4, t, 20.0]))) + 1e-15)


def test_maximal_poisson_and_grid_validation():
    e = unit("sym", 0.0, (2,))
    assert np.all(O.maximal_op(e, [0.5, 1.0], semigroup="poisson") >= 0)
    with pytest.raises(DomainError):
        O.maximal_op(e, [0.5], semigroup="wave")
    with pytest.raises(DomainError):
        O.TGrid(np.array([1.0, 0.5]))


# --- Riesz transforms ---------------------------------------------------------------

def test_riesz_annihilating_word_gives_zero():
    lower = B.DerivativeWord.uniform((1,), 1)
    out = O.riesz_apply(unit("dunkl", 0.5, (0,)), lower)
    assert out.norm() == 0.0
    out = O.riesz_apply(unit("sym", 0.5, (0,)), B.DerivativeWord.plain((1,)))
    assert out.norm() == 0.0


@pytest.mark.parametrize("alpha", [-0.5, 0.0, 1.3])
def test_riesz_symmetrized_unit_coefficient(alpha):
    out = O.riesz_apply(unit("sym", alpha, (1,), N=3), B.DerivativeWord.plain((1,)))
    lam1 = 4 + 2 * alpha + 2
    assert nonzero(out) == pytest.approx({B.MultiIndex((2,)): 2 * lam1 ** -0.5})


def test_riesz_is_l2_bounded_by_coefficient_ratio():
    alpha = 0.2
    word = B.DerivativeWord.alternating((2,))
    ratios = []
    for k in range(30):
        c, tgt = B.ladder_apply("dunkl", word, (k,), alpha)
        ratios.append(abs(c) * B.eigenvalue("dunkl", (k,), alpha) ** -1.0)
    e = random_expansion("dunkl", alpha, 29, 8)
    assert O.riesz_apply(e, word).norm() <= max(ratios) * e.norm() * (1 + 1e-12)


def test_riesz_needs_positive_order():
    with pytest.raises(DomainError):
        O.riesz_apply(unit("dunkl", 0.0, (1,)), B.DerivativeWord.plain((0,)))


def test_riesz_laguerre_lands_in_shifted_basis():
    out = O.riesz_apply(unit("laguerre", 0.5, (2,)), B.DerivativeWord.plain((1,)))
    assert out.eta == (1,)
    lam = B.eigenvalue("laguerre", (2,), 0.5)
    assert nonzero(out) == pytest.approx({B.MultiIndex((1,)): -2 * math.sqrt(2) / math.sqrt(lam)})


# --- multipliers ------------------------------------------------------------------------

def test_identity_multiplier():
    e = random_expansion("dunkl", (0.3, -0.4), 8, 9)
    spec = MultiplierSpec("laplace", psi=lambda t: np.ones_like(t))
    assert np.max(np.abs(O.multiplier_apply(e, spec).vector() - e.vector())) <= 1e-10
    spec_p = MultiplierSpec("laplace", psi=lambda t: np.ones_like(t), poisson=True)
    assert np.max(np.abs(O.multiplier_apply(e, spec_p).vector() - e.vector())) <= 1e-10


def test_single_atom_is_heat():
    e = random_expansion("sym", 0.7, 10, 10)
    spec = MultiplierSpec("stieltjes", atoms=((0.35, 1.0),))
    assert np.array_equal(O.multiplier_apply(e, spec).vector(), O.heat_apply(e, 0.35).vector())


@pytest.mark.parametrize("kind", ["dunkl", "sym", "laguerre"])
def test_exponential_psi_closed_form(kind):
    spec = MultiplierSpec("laplace", psi=lambda t: np.exp(-t))
    for k in range(6):
        lam = B.eigenvalue(kind, (k,), -0.3)
        out = O.multiplier_apply(unit(kind, -0.3, (k,)), spec).coeffs[B.MultiIndex((k,))]
        assert out == pytest.approx(lam / (lam + 1), abs=1e-8)


def test_oscillating_psi_matches_quadrature():
    gam = 1.5
    spec = MultiplierSpec("laplace", psi=lambda t: np.cos(gam * np.log(t)))
    for z in (1.0, 3.7, 40.0):
        want = z * integrate.quad(lambda t: math.exp(-t * z) * math.cos(gam * math.log(t)), 0, np.inf,
                                  limit=400)[0]
        assert O.multiplier_value(spec, z)[0] == pytest.approx(want, abs=1e-8)


def test_unbounded_psi_rejected():
    spec = MultiplierSpec("laplace", psi=lambda t: 1.0 / t, psi_bound=10.0)
    with pytest.raises(DomainError):
        O.multiplier_apply(unit("dunkl", 0.0, (1,)), spec)


@settings(max_examples=20, deadline=None)
@given(t=st.floats(0.0, 2.0), t0=st.floats(0.01, 2.0), w=st.floats(-2, 2), seed=st.integers(0, 999))
def test_heat_and_multiplier_commute(t, t0, w, seed):
    e = random_expansion("dunkl", 0.1, 6, seed)
    spec = MultiplierSpec("stieltjes", atoms=((t0, w), (2 * t0, 1.0)))
    a = O.heat_apply(O.multiplier_apply(e, spec), t).vector()
    b = O.multiplier_apply(O.heat_apply(e, t), spec).vector()
    assert np.allclose(a, b, rtol=1e-13, atol=1e-300)


# --- square functions ---------------------------------------------------------------

@pytest.mark.parametrize("kind,alpha", [("dunkl", -0.7), ("sym", 0.5), ("laguerre", 1.3)])
def test_g_function_unit_coefficient(kind, alpha):
    k = (2,)
    e = unit(kind, alpha, k)
    x = np.array([0.3, 0.9, 1.7])
    hk = np.abs(B.basis_fn(kind, k, alpha, x[:, None]))
    exact = O.g_function(e, None, 1, x)
    assert np.allclose(exact, hk / 2, rtol=1e-12)
    gridded = O.g_function(e, None, 1, x, grid=O.TGrid.geometric(1e-6, 50.0, 1.03, role="g"))
    assert np.allclose(gridded, hk / 2, rtol=1e-6)


def test_g_function_and_lusin_vanish_on_annihilated_word():
    e = unit("dunkl", 0.5, (0,))
    lower = B.DerivativeWord.uniform((1,), 1)
    assert np.all(O.g_function(e, lower, 0, [0.4, 1.0]) == 0.0)
    assert np.all(O.lusin_area(e, lower, 0, [0.4, 1.0]) == 0.0)


def test_square_functions_need_order():
    e = unit("dunkl", 0.5, (1,))
    with pytest.raises(DomainError):
        O.g_function(e, None, 0, [1.0])
    with pytest.raises(DomainError):
        O.lusin_area(e, B.DerivativeWord.plain((0,)), 0, [1.0])


def test_lusin_classical_cone():
    # Lebesgue case: S(f)(x)^2 = int t int_{|z|<sqrt t} |d_t T_t h_0(x+z)|^2 dz/(2 sqrt t) dt
    e = unit("dunkl", -0.5, (0,))
    lam = B.eigenvalue("dunkl", (0,), -0.5)

    def h0sq(u):
        return float(B.basis_fn("dunkl", (0,), -0.5, np.array([[u]]))[0]) ** 2

    for x in (0.0, 0.8, 2.0):
        inner = lambda t: t * lam ** 2 * math.exp(-2 * t * lam) / (2 * math.sqrt(t)) * integrate.quad(
            lambda z: h0sq(x + z), -math.sqrt(t), math.sqrt(t), epsabs=1e-13)[0]
        want = math.sqrt(integrate.quad(inner, 0, 40, limit=200, epsabs=1e-13)[0])
        got = O.lusin_area(e, None, 1, [x], nz=32)[0]
        assert got == pytest.approx(want, abs=1e-4)


def test_lusin_two_dimensional_restricted_finite():
    e = O.Expansion("laguerre", (0.2, -0.4), {(0, 0): 1.0, (1, 0): 0.3})
    vals = O.lusin_area(e, None, 1, np.array([[0.5, 1.0], [1.5, 0.2]]), nz=12)
    assert np.all(np.isfinite(vals)) and np.all(vals > 0)
