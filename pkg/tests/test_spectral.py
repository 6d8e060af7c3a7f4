"""Operator spectra: identities, orthonormality, and the provable estimates."""

import numpy as np
import pytest

import graphonlab as gl
from graphonlab.errors import ValidationError
from graphonlab.graphon import BlockFunction, StepGraphon
from graphonlab.graphs import RootedGraph
from graphonlab.spectral import reconstruct

from test_graphon import random_graphon, random_pattern


def random_kernel(rng, max_blocks=4):
    _, u = gl.deviation(random_graphon(rng, max_blocks, min_blocks=2))
    return u


@pytest.fixture
def two_block():
    return StepGraphon(np.array([0.5, 0.5]), np.array([[0.8, 0.2], [0.2, 0.8]]))


def test_decompose_constant():
    s = gl.decompose(StepGraphon.constant(0.4))
    assert s.eigenvalues == pytest.approx([0.4])
    assert s.overlaps == pytest.approx([1.0])
    assert s.delta == pytest.approx(0.0, abs=1e-12)
    assert s.gamma == pytest.approx(0.0, abs=1e-14)


def test_decompose_two_block(two_block):
    s = gl.decompose(two_block)
    assert s.eigenvalues == pytest.approx([0.5, 0.3], abs=1e-12)
    assert s.delta == pytest.approx(0.0, abs=1e-12)
    assert s.overlaps[1] == pytest.approx(0.0, abs=1e-12)
    assert s.gamma == pytest.approx(0.0081, abs=1e-12)


def test_eigenfunctions_orthonormal_and_reconstruct():
    rng = np.random.default_rng(20)
    for _ in range(50):
        w = random_graphon(rng, max_blocks=5) if rng.random() < 0.5 else random_kernel(rng, 5)
        s = gl.decompose(w)
        gram = s.eigenfunctions @ np.diag(s.measures) @ s.eigenfunctions.T
        assert np.abs(gram - np.eye(s.rank)).max() < 1e-10
        assert np.abs(reconstruct(s) - w.values).max() < 1e-8
        assert np.sum(s.overlaps**2) <= 1 + 1e-10
        assert np.all(s.overlaps >= -1e-15)
        if isinstance(w, StepGraphon):
            assert s.eigenvalues[0] >= s.density - 1e-12


def test_cycle_identity_two_block(two_block):
    s = gl.decompose(two_block)
    assert gl.cycle_density_spectral(s, 4) == pytest.approx(0.5**4 + 0.3**4, abs=1e-14)


def test_path_identity_two_block(two_block):
    s = gl.decompose(two_block)
    assert gl.path_density_spectral(s, 3) == pytest.approx(0.25, abs=1e-13)


def test_cycle_and_path_identities_random():
    rng = np.random.default_rng(21)
    for _ in range(80):
        w = random_graphon(rng, max_blocks=5) if rng.random() < 0.5 else random_kernel(rng, 5)
        s = gl.decompose(w)
        for n in range(3, 9):
            direct = gl.hom_density(gl.cycle_graph(n), w)
            spec = gl.cycle_density_spectral(s, n)
            assert abs(direct - spec) <= 1e-9 * max(1.0, abs(direct), abs(spec))
        for n in range(2, 9):
            direct = gl.hom_density(gl.path_graph(n), w)
            spec = gl.path_density_spectral(s, n)
            assert abs(direct - spec) <= 1e-9 * max(1.0, abs(direct), abs(spec))


def test_spectral_argument_validation(two_block):
    s = gl.decompose(two_block)
    with pytest.raises(ValidationError):
        gl.cycle_density_spectral(s, 2)
    with pytest.raises(ValidationError):
        gl.path_density_spectral(s, 1)


def test_project_constant_gives_overlaps(two_block):
    s = gl.decompose(two_block)
    j = BlockFunction.ones(2)
    assert np.allclose(gl.project(j, s), s.overlaps, atol=1e-12)


def test_project_eigenfunction_gives_unit_vector():
    rng = np.random.default_rng(22)
    w = random_graphon(rng, max_blocks=4, min_blocks=3)
    s = gl.decompose(w)
    coeffs = gl.project(s.eigenfunction(1), s)
    expected = np.zeros(s.rank)
    expected[1] = 1.0
    assert np.allclose(coeffs, expected, atol=1e-10)


def test_project_block_mismatch(two_block):
    s = gl.decompose(two_block)
    with pytest.raises(ValidationError):
        gl.project(BlockFunction.ones(3), s)


def test_project_reconstructs_glued_density():
    """Moments of the projected rooted profiles recover the density of the
    graph glued along a path."""
    rng = np.random.default_rng(23)
    for _ in range(15):
        w = random_graphon(rng, max_blocks=3, min_blocks=2)
        s = gl.decompose(w)
        g_h = gl.rooted_profile(RootedGraph(gl.path_graph(2), (0,)), w)
        g_k = gl.rooted_profile(gl.complete_bipartite_rooted(2, 2), w)
        sigma = gl.project(g_h, s)
        kappa = gl.project(g_k, s)
        for ell in range(1, 7):
            via_spectrum = float(np.sum(sigma * kappa * s.eigenvalues**ell))
            merged = gl.rooted_sum(
                RootedGraph(gl.path_graph(2), (0,)),
                gl.pathed_bipartite_rooted(2, ell, 2),
            )
            direct = gl.hom_density(merged, w)
            assert abs(via_spectrum - direct) <= 1e-9 * max(1.0, abs(direct))


def test_estimates_constant():
    w = StepGraphon.constant(0.5)
    records = gl.estimate_report(gl.decompose(w), w)
    assert all(r.passed for r in records)


def test_estimates_two_block(two_block):
    s = gl.decompose(two_block)
    records = {r.inequality: r for r in gl.estimate_report(s, two_block)}
    r = records["lambda1_upper"]
    assert r.lhs == pytest.approx(0.5, abs=1e-12)
    assert r.rhs == pytest.approx(0.5 + 0.0081 / (4 * 0.125), abs=1e-12)
    assert r.passed


def test_estimates_hold_on_random_graphons():
    rng = np.random.default_rng(24)
    for _ in range(500):
        w = random_graphon(rng, max_blocks=5)
        records = gl.estimate_report(gl.decompose(w), w)
        bad = [r for r in records if not r.passed]
        assert not bad, bad


def test_estimates_reject_kernels():
    rng = np.random.default_rng(25)
    u = random_kernel(rng)
    s = gl.decompose(u)
    with pytest.raises(ValidationError):
        gl.estimate_report(s, u)


def test_zero_graphon_spectrum():
    w = StepGraphon(np.array([0.5, 0.5]), np.zeros((2, 2)))
    s = gl.decompose(w)
    assert s.rank == 0
    assert gl.cycle_density_spectral(s, 4) == 0.0
    assert gl.path_density_spectral(s, 3) == 0.0
