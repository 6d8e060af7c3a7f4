"""Spectral decomposition of step functions as integral operators.

A step function with measures mu and values M acts on block functions as
(Uf)_a = sum_b M[a,b] mu_b f_b.  Conjugating by diag(sqrt(mu)) symmetrizes
the operator, so eigenvalues come from a standard symmetric eigenproblem
and eigenfunctions are orthonormal in the mu-weighted inner product.

The spectrum gives closed forms for cycle and path densities (power sums
against the squared overlaps with the constant function) and a family of
provable estimates relating the top eigenvalue, the spectral tail, and the
four-cycle excess; ``estimate_report`` evaluates all of them with margins.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .graphon import BlockFunction, StepGraphon, density

EIGENVALUE_CUTOFF = 1e-12


@dataclass(frozen=True, eq=False)
class SpectralData:
    """Nonzero eigenvalues (by decreasing |.|), mu-orthonormal step
    eigenfunctions, overlaps with the constant-one function, and the
    derived quantities delta = 1 - overlap_1 and the four-cycle excess
    gamma (graphons only, None for kernels)."""

    measures: np.ndarray
    eigenvalues: np.ndarray
    eigenfunctions: np.ndarray  # row i is the i-th step eigenfunction
    overlaps: np.ndarray
    delta: float
    gamma: float | None
    density: float

    @property
    def rank(self):
        return self.eigenvalues.size

    def eigenfunction(self, i):
        return BlockFunction(self.measures.size, self.eigenfunctions[i])


def decompose(w) -> SpectralData:
    """Eigendecomposition of a step graphon or kernel as an operator."""
    mu = w.measures
    root = np.sqrt(mu)
    sym = root[:, None] * w.values * root[None, :]
    lam, vec = np.linalg.eigh(sym)
    order = sorted(range(lam.size), key=lambda i: (-abs(lam[i]), -lam[i]))
    lam = lam[order]
    vec = vec[:, order]
    keep = np.abs(lam) >= EIGENVALUE_CUTOFF
    lam = lam[keep]
    vec = vec[:, keep]
    funcs = (vec / root[:, None]).T
    overlaps = funcs @ mu
    for i in range(lam.size):
        if overlaps[i] < 0:
            funcs[i] = -funcs[i]
            overlaps[i] = -overlaps[i]
        if overlaps[i] < EIGENVALUE_CUTOFF:
            nz = np.flatnonzero(np.abs(funcs[i]) > EIGENVALUE_CUTOFF)
            if nz.size and funcs[i][nz[0]] < 0:
                funcs[i] = -funcs[i]
            overlaps[i] = abs(overlaps[i])
    p = density(w)
    delta = float(1.0 - overlaps[0]) if lam.size else 0.0
    gamma = None
    if isinstance(w, StepGraphon):
        # non-negative for graphons; clamp away rounding noise
        gamma = max(float(np.sum(lam**4) - p**4), 0.0)
    funcs.setflags(write=False)
    lam.setflags(write=False)
    overlaps.setflags(write=False)
    return SpectralData(
        measures=mu,
        eigenvalues=lam,
        eigenfunctions=funcs,
        overlaps=overlaps,
        delta=delta,
        gamma=gamma,
        density=p,
    )


def reconstruct(s: SpectralData):
    """Rebuild the values matrix from the decomposition."""
    return (s.eigenfunctions.T * s.eigenvalues) @ s.eigenfunctions


def cycle_density_spectral(s: SpectralData, n):
    """Density of the n-cycle as the n-th power sum of the eigenvalues."""
    if n < 3:
        raise ValidationError("cycles need at least three vertices")
    return float(np.sum(s.eigenvalues ** n))


def path_density_spectral(s: SpectralData, n):
    """Density of the n-vertex path: sum of lambda^(n-1) * overlap^2."""
    if n < 2:
        raise ValidationError("paths need at least two vertices")
    return float(np.sum(s.eigenvalues ** (n - 1) * s.overlaps**2))


def project(g: BlockFunction, s: SpectralData):
    """Mu-weighted inner products of g with each retained eigenfunction."""
    if g.block_count != s.measures.size:
        raise ValidationError("block function does not match the spectrum's blocks")
    return s.eigenfunctions @ (s.measures * g.values)


@dataclass(frozen=True)
class InequalityRecord:
    inequality: str
    lhs: float
    rhs: float
    margin: float
    passed: bool


def _record(name, lhs, rhs, tol=1e-10):
    margin = rhs - lhs
    return InequalityRecord(name, float(lhs), float(rhs), float(margin),
                            bool(margin >= -tol * max(1.0, abs(rhs))))


def estimate_report(s: SpectralData, w: StepGraphon, m_range=range(4, 13)):
    """Evaluate the spectral estimates that hold for every graphon.

    Covers: the top-eigenvalue upper bound from the four-cycle excess, the
    gamma^(1/4) bound on tail eigenvalues, tail power sums, the two-sided
    path-density range, the tail overlap sum, and the top-eigenvalue lower
    bound.  All must pass on any valid graphon; a failure indicates a
    solver bug.
    """
    if not isinstance(w, StepGraphon):
        raise ValidationError("estimates apply to graphons")
    p = s.density
    if p <= 0:
        raise ValidationError("estimates need positive density")
    lam = s.eigenvalues
    lam1 = float(lam[0])
    gamma = float(s.gamma)
    delta = s.delta
    tail = lam[1:]
    records = [
        _record("lambda1_upper", lam1, p + gamma / (4 * p**3)),
        _record("perron_lower", p, lam1),
        _record("tail_abs_bound", float(np.abs(tail).max()) if tail.size else 0.0,
                gamma ** 0.25),
        _record("tail_overlap_sum", float(np.sum(s.overlaps[1:] ** 2)), 2 * delta),
        _record("lambda1_lower", p * (1 + 2 * delta) - 8 * delta * gamma**0.25, lam1),
    ]
    for m in m_range:
        records.append(
            _record(f"tail_power_sum_{m}", float(np.sum(tail**m)), gamma ** (m / 4.0))
        )
        pm = path_density_spectral(s, m + 1)
        mid = lam1**m * (1 - delta) ** 2
        half_width = gamma ** (m / 4.0)
        records.append(_record(f"path_range_lower_{m}", mid - half_width, pm))
        records.append(_record(f"path_range_upper_{m}", pm, mid + half_width))
    return records


def report_to_json(records):
    return [
        {
            "inequality": r.inequality,
            "lhs": r.lhs,
            "rhs": r.rhs,
            "margin": r.margin,
            "pass": r.passed,
        }
        for r in records
    ]
