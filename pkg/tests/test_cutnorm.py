"""Exact cut norm, the oracle equivalence, and the cut-norm bounds."""

import numpy as np
import pytest

import graphonlab as gl
from graphonlab.errors import BudgetError, ValidationError
from graphonlab.graphon import StepGraphon, StepKernel

from test_graphon import random_graphon


def random_kernel(rng, max_blocks=4, min_blocks=2):
    _, u = gl.deviation(random_graphon(rng, max_blocks, min_blocks))
    return u


def test_constant_kernel():
    u = StepKernel(np.array([1.0]), np.array([[0.7]]))
    cw = gl.cut_norm_exact(u)
    assert cw.value == pytest.approx(0.7)
    assert cw.s_blocks == (0,) and cw.t_blocks == (0,)
    neg = StepKernel(np.array([1.0]), np.array([[-0.7]]))
    assert gl.cut_norm_exact(neg).value == pytest.approx(0.7)


def test_zero_kernel():
    u = StepKernel(np.array([0.5, 0.5]), np.zeros((2, 2)))
    assert gl.cut_norm_exact(u).value == 0.0


def test_checkerboard_witness():
    u = StepKernel(np.array([0.5, 0.5]), np.array([[0.3, -0.3], [-0.3, 0.3]]))
    cw = gl.cut_norm_exact(u)
    assert cw.value == pytest.approx(0.075, abs=1e-15)
    assert cw.s_blocks == (0,) and cw.t_blocks == (0,)


def test_exact_matches_bruteforce():
    rng = np.random.default_rng(30)
    for trial in range(100):
        k = int(rng.integers(2, 11))
        u = random_kernel(rng, max_blocks=k, min_blocks=k)
        a = gl.cut_norm_exact(u)
        b = gl.cut_norm_bruteforce(u)
        assert abs(a.value - b.value) <= 1e-12
        # stored witnesses attain the stored value
        for cw in (a, b):
            s = np.zeros(u.block_count)
            t = np.zeros(u.block_count)
            s[list(cw.s_blocks)] = 1
            t[list(cw.t_blocks)] = 1
            q = u.measures
            attained = abs(float((s * q) @ u.values @ (t * q)))
            assert attained == pytest.approx(cw.value, abs=1e-12)


def test_block_budget():
    k = 25
    mu = np.full(k, 1.0 / k)
    u = StepKernel(mu, np.zeros((k, k)))
    with pytest.raises(BudgetError):
        gl.cut_norm_exact(u)


def test_norm_properties():
    rng = np.random.default_rng(31)
    for _ in range(50):
        k = int(rng.integers(2, 6))
        mu = rng.dirichlet(np.ones(k))
        mu = np.clip(mu, 0.02, None)
        mu /= mu.sum()
        a = rng.uniform(-0.5, 0.5, (k, k))
        b = rng.uniform(-0.5, 0.5, (k, k))
        a = (a + a.T) / 2
        b = (b + b.T) / 2
        ua = StepKernel(mu, a)
        ub = StepKernel(mu, b)
        uab = StepKernel(mu, a + b)
        na = gl.cut_norm_exact(ua).value
        nb = gl.cut_norm_exact(ub).value
        nab = gl.cut_norm_exact(uab).value
        assert nab <= na + nb + 1e-12
        c = float(rng.uniform(-1, 1))
        nc = gl.cut_norm_exact(StepKernel(mu, c * a)).value
        assert nc == pytest.approx(abs(c) * na, abs=1e-12)


def test_deviation_cut_norm_at_most_twice_density():
    rng = np.random.default_rng(32)
    for _ in range(100):
        w = random_graphon(rng, max_blocks=5)
        p, u = gl.deviation(w)
        assert gl.cut_norm_exact(u).value <= 2 * p + 1e-12


def test_sandwich_zero():
    u = StepKernel(np.array([1.0]), np.array([[0.0]]))
    records = gl.sandwich_check(u)
    assert all(r.passed for r in records)
    assert all(r.lhs == pytest.approx(0.0) and r.rhs == pytest.approx(0.0) for r in records)


def test_sandwich_checkerboard():
    u = StepKernel(np.array([0.5, 0.5]), np.array([[0.3, -0.3], [-0.3, 0.3]]))
    records = {r.inequality: r for r in gl.sandwich_check(u)}
    r = records["cut_norm_fourth_vs_c4"]
    assert r.lhs == pytest.approx(0.075**4, rel=1e-12)
    assert r.rhs == pytest.approx(0.3**4, rel=1e-12)
    r = records["c4_vs_cut_norm"]
    assert r.rhs == pytest.approx(0.3, rel=1e-12)
    assert all(r.passed for r in records.values())


def test_sandwich_random():
    rng = np.random.default_rng(33)
    for _ in range(200):
        u = random_kernel(rng, max_blocks=5)
        assert all(r.passed for r in gl.sandwich_check(u))


def test_c4_deviation_bound_constant():
    rec = gl.c4_deviation_bound(StepGraphon.constant(0.4))
    assert rec.passed
    assert rec.lhs == pytest.approx(rec.rhs, rel=1e-12)


def test_c4_deviation_bound_two_block():
    w = StepGraphon(np.array([0.5, 0.5]), np.array([[0.8, 0.2], [0.2, 0.8]]))
    rec = gl.c4_deviation_bound(w)
    assert rec.lhs == pytest.approx(0.5**4 + 0.075**4 / 8, rel=1e-12)
    assert rec.rhs == pytest.approx(0.0706, abs=1e-12)
    assert rec.passed


def test_c4_deviation_bound_random():
    rng = np.random.default_rng(34)
    for _ in range(200):
        assert gl.c4_deviation_bound(random_graphon(rng, max_blocks=5)).passed


def test_counting_bound_equal_graphons():
    w = StepGraphon.constant(0.5)
    rec = gl.counting_lemma_bound(gl.cycle_graph(4), w, w)
    assert rec.lhs == pytest.approx(0.0, abs=1e-14)
    assert rec.passed


def test_counting_bound_vs_constant():
    rng = np.random.default_rng(35)
    for _ in range(50):
        w = random_graphon(rng, max_blocks=4)
        p = gl.density(w)
        rec = gl.counting_lemma_bound(gl.cycle_graph(4), w, StepGraphon.constant(p))
        assert rec.passed


def test_counting_bound_random_pairs():
    rng = np.random.default_rng(36)
    patterns = [gl.path_graph(4), gl.cycle_graph(5), gl.complete_graph(4)]
    for i in range(100):
        w1 = random_graphon(rng, max_blocks=4)
        w2 = random_graphon(rng, max_blocks=4)
        rec = gl.counting_lemma_bound(patterns[i % 3], w1, w2)
        assert rec.passed


def test_cut_witness_json():
    u = StepKernel(np.array([0.5, 0.5]), np.array([[0.3, -0.3], [-0.3, 0.3]]))
    data = gl.cut_norm_exact(u).to_json()
    assert set(data) == {"value", "S", "T"}
    assert data["S"] == [0]
