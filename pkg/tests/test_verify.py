import math

import numpy as np
import pytest

from lagdunkl import kernels as K
from lagdunkl import verify as V
from lagdunkl.bases import DerivativeWord, eigenvalue, ladder_apply
from lagdunkl.rng import Stream, derive_seed
from lagdunkl.specfun import DomainError


def test_stream_is_reproducible():
    a = Stream(derive_seed(5, "x")).uniform(8)
    b = Stream(derive_seed(5, "x")).uniform(8)
    c = Stream(derive_seed(5, "y")).uniform(8)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert np.all((a >= 0) & (a < 1))


def test_stream_normal_moments():
    z = Stream(123).normal(200_000)
    assert abs(z.mean()) < 0.01
    assert abs(z.std() - 1) < 0.01


def test_report_status_validated():
    with pytest.raises(ValueError):
        V.CheckReport("x", {}, "maybe", {}, 1)
    r = V.CheckReport("x", {"a": 1}, "recorded", {"c": 2}, 3)
    assert r.ok and r.as_dict()["metrics"] == {"c": 2.0}


def test_unknown_suite_is_an_input_error():
    with pytest.raises(DomainError):
        V.check_identity_suite("no-such-suite")
    with pytest.raises(DomainError):
        V.run_suites(["ladder", "nope"])


def test_ladder_suite_example():
    reps = V.check_identity_suite("ladder", dims=(1,), alphas=(0.25,))
    assert reps and all(r.status == "pass" and r.metrics["max_err"] <= 1e-6 for r in reps)


def test_irl_suite_negative_alpha():
    reps = V.check_identity_suite("irl-vs-bessel", alphas=(-0.7,))
    assert reps and all(r.status == "pass" and r.metrics["max_err"] <= 1e-8 for r in reps)


def test_lemma_qz_has_no_violations():
    reps = V.check_identity_suite("lemma-qz", samples=100_000, dims=(1, 2))
    assert all(r.metrics["violations"] == 0 and r.samples == 100_000 for r in reps)


def test_lusin_gamma_window():
    fam = K.KernelFamily("lusin", "dunkl", (-0.7,), (0,), None, m=1)
    with pytest.raises(DomainError):
        V.check_gamma(fam, 0.9)
    with pytest.raises(DomainError):
        V.check_smoothness(fam, 0.9, samples=4)
    with pytest.raises(DomainError):
        V.check_gamma(K.KernelFamily("heat", "dunkl", (0.0,), (1,)), 1.5)
    assert V.default_gamma(fam) == pytest.approx(0.29)
    assert V.default_gamma(K.KernelFamily("lusin", "sym", (1.3,), (0,), None, m=1)) == 0.5
    V.check_gamma(fam, 0.29)


def test_growth_probe_small_run():
    fam = K.KernelFamily("heat", "dunkl", (-0.5,), (1,))
    rep = V.check_growth(fam, samples=6, seed=3, polish=1, iters=8)
    assert rep.check_id == "growth"
    assert math.isfinite(rep.metrics["constant"]) and rep.metrics["constant"] > 0
    assert rep.samples == 12
    again = V.check_growth(fam, samples=6, seed=3, polish=1, iters=8)
    assert again.as_dict() == rep.as_dict()


def test_weighted_spot_window_edges():
    lo, hi = V.power_weight_window((0.0,), 2.0)
    assert (lo, hi) == (-2.0, 2.0)
    for delta in (lo, hi):
        with pytest.raises(DomainError):
            V.check_weighted_spot(2.0, delta, "riesz")
    with pytest.raises(DomainError):
        V.check_weighted_spot(1.0, 0.0, "riesz")


def test_weighted_spot_riesz_below_coefficient_ratio():
    rep = V.check_weighted_spot(2.0, 0.0, "riesz", alpha=(0.0,), N=8)
    word = DerivativeWord.alternating((1,))
    ratio = max(abs(ladder_apply("dunkl", word, (k,), (0.0,))[0]) / math.sqrt(eigenvalue("dunkl", (k,), (0.0,)))
                for k in range(9))
    assert rep.status == "recorded"
    assert 0 < rep.metrics["constant"] <= ratio * (1 + 1e-9)


def test_weighted_spot_heat_maximal_finite():
    rep = V.check_weighted_spot(2.0, 0.5, "heat-maximal", alpha=(0.0,))
    assert math.isfinite(rep.metrics["constant"]) and rep.metrics["constant"] >= 1.0 - 1e-9


def test_run_suites_order_and_jobs_independent():
    names = ["mehler", "lemma-theta"]
    params = {"lemma-theta": {"samples": 2000}}
    timings = []
    serial = [r.as_dict() for r in V.run_suites(names, 4, params, 1, timings)]
    parallel = [r.as_dict() for r in V.run_suites(names, 4, params, 2)]
    assert serial == parallel
    assert [t[0] for t in timings] == names
    assert serial[0]["check_id"] == "mehler"


def test_work_units_split_heavy_suites():
    units = V._work_units("standard-estimates", {"samples": 4})
    assert len(units) == 6
    assert all(u["samples"] == 4 and len(u["alphas"]) == 1 for u in units)
    assert V._work_units("mehler", {}) == [{}]
