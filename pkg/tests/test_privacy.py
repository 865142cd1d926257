import math

import numpy as np
import pytest

from ldpcount.privacy import (PrivacyAccountant, PrivacyViolation, RunKeys, keep_probability,
                              laplace, rng_stream, rr_perturb, rr_unbias)


def test_laplace_zero_scale():
    rng = np.random.default_rng(0)
    assert laplace(0.0, rng) == 0.0
    out = laplace(np.array([0.0, 1.0, 0.0]), rng)
    assert out[0] == 0.0 and out[2] == 0.0


def test_laplace_negative_scale():
    with pytest.raises(ValueError):
        laplace(-1.0, np.random.default_rng(0))


@pytest.mark.parametrize("b", [0.5, 3.0])
def test_laplace_moments(b):
    x = laplace(b, rng_stream(42, rnd=int(b * 10)), size=1_000_000)
    assert abs(x.mean()) < 5 * b / 1e3
    assert abs(x.var() / (2 * b * b) - 1) < 0.02


def test_rr_keep_probability():
    assert keep_probability(math.log(3)) == pytest.approx(0.75)
    with pytest.raises(ValueError):
        keep_probability(0)
    with pytest.raises(ValueError):
        rr_perturb([1, 0], -1.0, np.random.default_rng(0))


def test_rr_large_eps_keeps_bits():
    bits = np.random.default_rng(1).integers(0, 2, 10_000).astype(bool)
    assert np.array_equal(rr_perturb(bits, 50.0, np.random.default_rng(2)), bits)


def test_rr_flip_rate():
    n = 1_000_000
    out = rr_perturb(np.zeros(n, dtype=bool), 1.0, rng_stream(5, purpose="rr"))
    q = 1 / (math.e + 1)
    assert abs(out.mean() - q) < 3 * math.sqrt(q * (1 - q) / n)


def test_rr_unbias_values():
    assert rr_unbias(1, math.log(3)) == pytest.approx(1.5)
    assert rr_unbias(0, math.log(3)) == pytest.approx(-0.5)


@pytest.mark.parametrize("a", [0, 1])
def test_rr_unbias_is_unbiased(a):
    n, eps = 1_000_000, 1.0
    rep = rr_perturb(np.full(n, bool(a)), eps, rng_stream(9, rnd=a, purpose="rr"))
    est = rr_unbias(rep, eps)
    assert abs(est.mean() - a) < 3 * est.std() / math.sqrt(n)


def test_streams_are_keyed():
    a = RunKeys(1, 2).stream(3).random(5)
    assert np.array_equal(a, RunKeys(1, 2).stream(3).random(5))
    for other in (RunKeys(1, 3).stream(3), RunKeys(1, 2).stream(4),
                  RunKeys(1, 2).stream(3, "marks"), RunKeys(1, 2, rep=1).stream(3),
                  RunKeys(2, 2).stream(3)):
        assert not np.array_equal(a, other.random(5))
    assert np.array_equal(rng_stream(1, 0, 4, 2).random(3), rng_stream(1, 0, 4, 2).random(3))
    assert not np.array_equal(rng_stream(1, 0, 4, 2).random(3), rng_stream(1, 0, 5, 2).random(3))


def test_accountant_walk_rounds_pass():
    acc, k, eps = PrivacyAccountant(), 4, 1.0
    for r in range(1, k + 1):
        acc.charge(None, r, eps / k)
    acc.assert_total(eps)
    assert acc.total(7) == pytest.approx(eps)


def test_accountant_parallel_pass():
    acc = PrivacyAccountant()
    for node in range(10):
        for r in range(1, 5):
            acc.charge(node, r, 1.0, "parallel")
    acc.assert_total(1.0)


def test_accountant_double_spend_fails():
    acc = PrivacyAccountant()
    acc.charge(3, 1, 1.0)
    acc.charge(3, 2, 1.0)
    with pytest.raises(PrivacyViolation, match=r"node 3.*rounds \[1, 2\]"):
        acc.assert_total(1.0)


def test_accountant_scopes_add():
    acc = PrivacyAccountant()
    for rep in range(4):
        acc.charge(None, 1, 0.25, "parallel", scope=rep)
    acc.assert_total(1.0)
    acc.charge(0, 2, 0.01, scope=9)
    with pytest.raises(PrivacyViolation, match="node 0"):
        acc.assert_total(1.0)


def test_accountant_rejects_negative():
    with pytest.raises(ValueError):
        PrivacyAccountant().charge(0, 1, -0.1)
