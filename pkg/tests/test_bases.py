import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from lagdunkl import bases as B
from lagdunkl.specfun import DomainError, mu_alpha_rule

alphas = st.sampled_from([-0.7, -0.5, 0.0, 0.25, 0.5, 1.3])


# --- types ------------------------------------------------------------------

def test_multi_index_helpers():
    k = B.MultiIndex((3, 4, 0))
    assert k.parity == (1, 0, 0)
    assert k.half == (1, 2, 0)
    assert k.order == 7
    assert k.shift(2, -1) is None
    assert k.shift(0, 1) == (4, 4, 0)
    with pytest.raises(DomainError):
        B.MultiIndex((1, -1))


def test_multi_indices_enumeration():
    ks = B.multi_indices(2, 3)
    assert len(ks) == 10
    assert ks[0] == (0, 0)
    assert [k.order for k in ks] == sorted(k.order for k in ks)


def test_type_param_validation():
    assert B.as_type(-0.5).d == 1
    assert B.TypeParam((-0.5, 1.0)).total == pytest.approx(0.5)
    with pytest.raises(DomainError):
        B.TypeParam((-1.0,))
    with pytest.raises(DomainError):
        B.TypeParam((0.0, float("nan")))


def test_sign_patterns_and_words():
    assert B.SignPattern.all(2) == [(0, 0), (0, 1), (1, 0), (1, 1)]
    with pytest.raises(DomainError):
        B.SignPattern((2,))
    w = B.DerivativeWord.alternating((3, 1))
    assert w.omega == ((1, -1, 1), (1,))
    assert w.shift == (1, 1)
    assert w.order == 4
    with pytest.raises(DomainError):
        B.DerivativeWord((2,), ((1,),))
    with pytest.raises(ValueError):
        B.DerivativeWord.plain((1,)).shift


def test_basis_kind_aliases():
    assert B.BasisKind.parse("dunkl") is B.BasisKind.DUNKL
    assert B.BasisKind.parse("sym") is B.BasisKind.SYMMETRIZED
    assert B.BasisKind.parse("laguerre") is B.BasisKind.LAGUERRE
    with pytest.raises(ValueError):
        B.BasisKind.parse("hermite")


# --- normalization and point values ------------------------------------------

def test_normalizing_const_examples():
    assert B.normalizing_const((0,), 0.0) == pytest.approx(math.sqrt(2), rel=1e-15)
    assert B.normalizing_const((0,), -0.5) == pytest.approx(math.sqrt(2 / math.sqrt(math.pi)), rel=1e-15)


@pytest.mark.parametrize("a", [-0.7, -0.5, 0.5, 1.3])
def test_laguerre_norm_by_quadrature(a):
    rule = mu_alpha_rule(200, a)
    for k in (0, 1, 5, 20, 40):
        vals = B.laguerre_fn((k,), a, rule.nodes[:, None])
        norm = np.sum(rule.undamped * vals ** 2)
        assert norm == pytest.approx(1.0, abs=1e-8)


def test_laguerre_fn_values():
    assert float(B.laguerre_fn((0,), 0.0, [0.0])) == pytest.approx(math.sqrt(2))
    assert float(B.laguerre_fn((0,), 0.0, [1.0])) == pytest.approx(0.85776, abs=1e-5)
    rule = mu_alpha_rule(60, 0.0)
    x = rule.nodes[:, None]
    inner = rule.undamped @ (B.laguerre_fn((0,), 0.0, x) * B.laguerre_fn((1,), 0.0, x))
    assert abs(inner) < 1e-10


def test_hermite_dunkl_values():
    assert float(B.hermite_dunkl_fn((0,), 0.0, [0.0])) == pytest.approx(1.0)
    for a in (-0.7, 0.0, 2.0):
        assert float(B.hermite_dunkl_fn((1,), a, [0.0])) == 0.0


def test_hermite_dunkl_classical_at_minus_half():
    x = np.linspace(-4, 4, 41)
    for k in range(6):
        classical = special.eval_hermite(k, x) * np.exp(-x * x / 2)
        classical /= math.sqrt(2.0 ** k * math.factorial(k) * math.sqrt(math.pi))
        ours = B.hermite_dunkl_fn((k,), -0.5, x[:, None])
        assert min(np.max(np.abs(ours - classical)), np.max(np.abs(ours + classical))) < 1e-12


def test_symmetrized_signs():
    x = np.array([[0.3, -1.1], [1.7, 0.4]])
    assert np.allclose(B.symmetrized_fn((0, 0), (0.2, 0.4), x), B.hermite_dunkl_fn((0, 0), (0.2, 0.4), x))
    assert np.allclose(B.symmetrized_fn((2,), 0.2, x[:, :1]), -B.hermite_dunkl_fn((2,), 0.2, x[:, :1]))
    assert np.allclose(B.symmetrized_fn((2, 3), (0.2, 0.4), x), B.hermite_dunkl_fn((2, 3), (0.2, 0.4), x))


@settings(max_examples=40, deadline=None)
@given(k1=st.integers(0, 12), k2=st.integers(0, 12), a1=alphas, a2=alphas, seed=st.integers(0, 2 ** 31))
def test_sign_identity_exact(k1, k2, a1, a2, seed):
    x = np.random.default_rng(seed).uniform(-3, 3, size=(20, 2))
    sign = (-1) ** (k1 // 2 + k2 // 2)
    phi = B.symmetrized_fn((k1, k2), (a1, a2), x)
    h = B.hermite_dunkl_fn((k1, k2), (a1, a2), x)
    assert np.array_equal(phi, sign * h)


@settings(max_examples=40, deadline=None)
@given(k1=st.integers(0, 12), k2=st.integers(0, 12), a=alphas, seed=st.integers(0, 2 ** 31),
       axis=st.integers(0, 1), kind=st.sampled_from(["dunkl", "sym"]))
def test_parity_exact(k1, k2, a, seed, axis, kind):
    x = np.random.default_rng(seed).uniform(-3, 3, size=(100, 2))
    k = (k1, k2)
    v = B.basis_fn(kind, k, (a, 0.3), x)
    w = B.basis_fn(kind, k, (a, 0.3), B.reflect(x, axis))
    assert np.array_equal(w, (-1) ** k[axis] * v)


@pytest.mark.parametrize("kind", ["laguerre", "dunkl", "sym"])
@pytest.mark.parametrize("a", [-0.7, -0.5, 0.5, 1.3])
def test_orthonormality_1d(kind, a):
    # the rule's undamped weights carry the measure x^(2a+1) dx on R_+
    # R^d bases: integrate over R_+ and double, since products of equal parity are even
    rule = mu_alpha_rule(200, a)
    und = rule.undamped
    tab = B.basis_table(kind, 8, a, rule.nodes)
    gram = (tab * und) @ tab.T
    if kind != "laguerre":
        par = np.arange(9) % 2
        gram = np.where(par[:, None] == par[None, :], 2.0 * gram, 0.0)
    assert np.max(np.abs(gram - np.eye(9))) <= 1e-8


# --- eigenvalues and ladder coefficients --------------------------------------

def test_eigenvalue_examples():
    assert B.eigenvalue("laguerre", (0,), 0.0) == 2.0
    assert B.eigenvalue("dunkl", (3,), -0.5) == 7.0
    assert B.eigenvalue("sym", (1,), 0.0) == 6.0
    assert B.eigenvalue("laguerre", (1, 2), (0.5, -0.5)) == pytest.approx(16.0)


def test_ladder_coeff_examples():
    assert B.ladder_coeff_dunkl(0, 0.3) == 0.0
    assert B.ladder_coeff_dunkl(1, 0.5) == pytest.approx(math.sqrt(6))
    for a in (-0.9, 0.0, 3.0):
        assert B.ladder_coeff_dunkl(2, a) == 2.0


def test_ladder_apply_dunkl_examples():
    low = B.DerivativeWord.uniform((1,), 1)
    up = B.DerivativeWord.uniform((1,), -1)
    assert B.ladder_apply_dunkl(low, (0,), 0.0) == (0.0, None)
    c, tgt = B.ladder_apply_dunkl(up, (0,), 0.25)
    assert c == pytest.approx(math.sqrt(5)) and tgt == (1,)
    # lowering after raising returns to k=0 with m(1,0)^2
    c, tgt = B.ladder_apply_dunkl(B.DerivativeWord((2,), ((-1, 1),)), (0,), 0.0)
    assert c == pytest.approx(4.0) and tgt == (0,)


def test_ladder_apply_sym_examples():
    assert B.ladder_apply_sym((1,), (0,)) == (0.0, None)
    assert B.ladder_apply_sym((1,), (1,)) == (2.0, (2,))
    c, tgt = B.ladder_apply_sym((2,), (2,))
    c1, t1 = B.ladder_apply_sym((1,), (2,))
    c2, t2 = B.ladder_apply_sym((1,), t1)
    assert (c, tgt) == (c1 * c2, t2)


def test_laguerre_kind_has_no_ladder():
    with pytest.raises(ValueError):
        B.ladder_apply("laguerre", B.DerivativeWord.plain((1,)), (1,), 0.0)


@pytest.mark.parametrize("a", [-0.7, -0.5, 0.25, 1.3])
@pytest.mark.parametrize("k", [0, 1, 2, 5])
def test_ladder_matches_finite_differences(a, k):
    x = np.random.default_rng(k).uniform(0.1, 3.0, size=(50, 1)) * np.where(
        np.arange(50) % 2, 1.0, -1.0)[:, None]
    f = lambda p: B.hermite_dunkl_fn((k,), a, p)
    for sign, op in ((1, B.lowering_op), (-1, B.raising_op)):
        c, tgt = B.ladder_apply_dunkl(B.DerivativeWord.uniform((1,), sign), (k,), a)
        want = 0.0 if tgt is None else c * B.hermite_dunkl_fn(tgt, a, x)
        assert np.max(np.abs(op(0, a, f)(x) - want)) <= 1e-6
    g = lambda p: B.symmetrized_fn((k,), a, p)
    c, tgt = B.ladder_apply_sym((1,), (k,))
    want = 0.0 if tgt is None else c * B.symmetrized_fn(tgt, a, x)
    assert np.max(np.abs(B.sym_op(0, a, g)(x) - want)) <= 1e-6


@pytest.mark.parametrize("kind,osc", [("dunkl", B.dunkl_oscillator), ("sym", B.symmetrized_oscillator)])
def test_eigen_relation(kind, osc):
    alpha = (0.3, -0.6)
    x = np.random.default_rng(3).uniform(-2.5, 2.5, size=(25, 2))
    for k in [(0, 0), (1, 0), (2, 3), (1, 4)]:
        f = lambda p, k=k: B.basis_fn(kind, k, alpha, p)
        lhs = osc(alpha, f)(x)
        rhs = B.eigenvalue(kind, k, alpha) * f(x)
        assert np.max(np.abs(lhs - rhs)) <= 1e-5 * np.max(np.abs(rhs))


def test_laguerre_word_eval_matches_dunkl_ladder():
    # on R_+ the alternating word on ell_k agrees with the Dunkl ladder on h_{2k}
    a = 0.4
    x = np.linspace(0.2, 3.0, 9)[:, None]
    for k in (0, 1, 3):
        for n in (1, 2, 3):
            c, tgt = B.ladder_apply_dunkl(B.DerivativeWord.alternating((n,)), (2 * k,), a)
            lhs = B.laguerre_word_eval((k,), a, (n,), x)
            rhs = 0.0 if tgt is None else c * B.hermite_dunkl_fn(tgt, a, x)
            scale = math.sqrt(2) * (-1) ** k
            assert np.allclose(lhs, scale * rhs, atol=1e-10)


# --- eta-symmetric parts -----------------------------------------------------

def test_eta_decompose_examples():
    pts = [(-1.0,), (-0.5,), (0.5,), (1.0,)]
    samples = {p: 1 + p[0] for p in pts}
    even = B.eta_decompose(samples, (0,))
    odd = B.eta_decompose(samples, (1,))
    for p in pts:
        assert even[p] == pytest.approx(1.0)
        assert odd[p] == pytest.approx(p[0])
    only_odd = B.eta_decompose({p: p[0] for p in pts}, (0,))
    assert all(v == 0 for v in only_odd.values())
    with pytest.raises(KeyError):
        B.eta_decompose({(1.0,): 1.0}, (0,))


def test_eta_extend_examples():
    one = lambda p: np.ones(p.shape[:-1])
    assert float(B.eta_extend(one, (0,), [-1.0])) == 1.0
    assert float(B.eta_extend(one, (1,), [-1.0])) == -1.0
    assert float(B.eta_extend(one, (1,), [0.0])) == 0.0
    assert float(B.eta_extend(one, (0,), [0.0])) == 0.0


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2 ** 31), e1=st.integers(0, 1), e2=st.integers(0, 1))
def test_components_sum_to_function(seed, e1, e2):
    x = np.random.default_rng(seed).uniform(-2, 2, size=(10, 2))
    f = lambda p: np.exp(p[..., 0] - 0.3 * p[..., 1]) + p[..., 0] * p[..., 1] ** 2
    total = sum(B.eta_component(f, eta, x) for eta in B.SignPattern.all(2))
    assert np.allclose(total, f(x), atol=1e-13)
    comp = lambda p: B.eta_component(f, (e1, e2), p)
    # the component is eta-symmetric, so extension of its restriction reproduces it
    assert np.allclose(B.eta_extend(comp, (e1, e2), x), comp(x), atol=1e-13)


# --- Dunkl operator -----------------------------------------------------------

def test_dunkl_op_examples():
    even = lambda p: np.cos(p[..., 0])
    x = np.array([[0.7], [-1.3]])
    assert np.allclose(B.dunkl_op_apply(0, 0.4, even, x), -np.sin(x[:, 0]), atol=1e-9)
    ident = lambda p: p[..., 0]
    for a in (-0.5, 0.0, 1.3):
        assert float(B.dunkl_op_apply(0, a, ident, np.array([1.0]))) == pytest.approx(2 * a + 2, rel=1e-9)
    with pytest.raises(DomainError):
        B.dunkl_op_apply(0, 0.0, ident, np.array([0.0]))


def test_lowering_h1_to_h0():
    a = 0.6
    x = np.random.default_rng(0).uniform(-3, 3, size=(50, 1))
    got = B.lowering_op(0, a, lambda p: B.hermite_dunkl_fn((1,), a, p))(x)
    want = B.ladder_coeff_dunkl(1, a) * B.hermite_dunkl_fn((0,), a, x)
    assert np.max(np.abs(got - want)) <= 1e-6
