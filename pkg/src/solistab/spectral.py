"""Spectrum of the linearization pencil (-Laplacian + 1) phi = lambda Q^{p-1} phi.

The operator is radially symmetric, so the eigenproblem splits into
angular-momentum sectors ell = 0, 1, 2, ...; each sector reduces to a
1D problem on r with the centrifugal term ell(ell+d-2)/r^2.  The lowest
eigenvalue is 1 (eigenfunction Q, ell = 0) and the next is p with the
translation modes partial_j Q (ell = 1); the gap kappa above p powers
the coercivity inequality checked here on torus fields.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cholesky_banded, solve_banded
from scipy.sparse.linalg import LinearOperator, eigsh

from .fields import (
    TorusField,
    inner_h1,
    norm,
    sample_soliton,
    sample_soliton_derivative,
)
from .groundstate import GroundState, eval_Q

__all__ = [
    "Discretization",
    "SpectrumReport",
    "sector_spectrum",
    "spectral_gap",
    "coercivity_check",
]


class Discretization(RuntimeError):
    """Radial truncation too small: eigenvector mass at the boundary."""


@dataclass(frozen=True)
class SpectrumReport:
    """Eigenvalues and radial eigenvectors of one angular sector."""

    sector: int
    r: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns, on the staggered radial grid
    boundary_mass: float

    def lowest(self) -> float:
        return float(self.eigenvalues[0])


def _sector_matrices(gs: GroundState, ell: int, n: int, r_max: float):
    """Banded stiffness A (SPD) and weight diagonal b on the staggered
    radial grid r_i = (i - 1/2) h, Dirichlet cap at r_max.

    A is the conservative discretization of
    -(1/r^{d-1}) d/dr (r^{d-1} d/dr) + ell(ell+d-2)/r^2 + 1,
    symmetrized by the volume weight r^{d-1}; b = r^{d-1} Q^{p-1}.
    """
    d, p = gs.params.d, gs.params.p
    h = r_max / n
    i = np.arange(1, n + 1)
    r = (i - 0.5) * h
    r_left = (i - 1) * h   # cell faces
    r_right = i * h
    wl = r_left ** (d - 1)
    wr = r_right ** (d - 1)
    diag = (wl + wr) / h**2
    off = -wr[:-1] / h**2  # flux between cell i and i+1
    if d == 1:
        # the face at r = 0 carries unit weight; parity sets the ghost
        # value: even (ell = 0) reflects, odd (ell = 1) antireflects
        if ell == 0:
            diag[0] -= 1.0 / h**2
        elif ell == 1:
            diag[0] += 1.0 / h**2
        else:
            raise ValueError("d = 1 has only the parity sectors 0 and 1")
    centrifugal = ell * (ell + d - 2) / r**2
    w = r ** (d - 1)
    diag = diag + w * (centrifugal + 1.0)
    q, _ = eval_Q(gs, r)
    b = w * q ** (p - 1.0)
    ab = np.zeros((2, n))
    ab[0, :] = diag
    ab[1, :-1] = off
    return r, ab, b


def sector_spectrum(gs: GroundState, ell: int, n_eigs: int = 4,
                    n: int = 8192, r_max: float | None = None,
                    boundary_tol: float = 1e-6) -> SpectrumReport:
    """Lowest eigenpairs of the pencil in the given angular sector.

    Solves the generalized symmetric problem A phi = lambda b phi via a
    banded Cholesky factorization of A and a Lanczos iteration on the
    compact, symmetric L^{-1} diag(b) L^{-T}, whose largest eigenvalues
    are the reciprocals of the wanted lambdas.
    """
    if ell < 0 or ell > 4:
        raise ValueError("sector ell must lie in [0, 4]")
    if r_max is None:
        r_max = gs.r_max
    r, ab, b = _sector_matrices(gs, ell, n, r_max)
    # lower-banded Cholesky A = L L^T
    cb = cholesky_banded(ab, lower=True)

    def _solve_lt(cbf, v):
        # solve L^T y = v given the lower banded factor
        ub = np.zeros_like(cbf)
        ub[1, :] = cbf[0, :]
        ub[0, 1:] = cbf[1, :-1]
        return solve_banded((0, 1), ub, v)

    def matvec(v):
        # symmetric kernel: L^{-1} B L^{-T} v
        x = _solve_lt(cb, v)
        x = b * x
        return solve_banded((1, 0), cb, x)

    op = LinearOperator((n, n), matvec=matvec, dtype=float)
    k = max(n_eigs, 2)
    mu, psi = eigsh(op, k=k, which="LA")
    order = np.argsort(mu)[::-1]
    mu = mu[order][:n_eigs]
    psi = psi[:, order][:, :n_eigs]
    lam = 1.0 / mu
    # recover phi = L^{-T} psi and normalize in the weighted l2 sense
    phis = np.empty_like(psi)
    for j in range(psi.shape[1]):
        phi = _solve_lt(cb, psi[:, j])
        phi /= math.sqrt(float(np.sum(b * phi**2)))
        if phi[np.argmax(np.abs(phi))] < 0:
            phi = -phi
        phis[:, j] = phi
    tail = slice(int(0.95 * n), None)
    bmass = float(np.max(np.sqrt(np.sum(phis[tail] ** 2, axis=0))
                         / np.sqrt(np.sum(phis**2, axis=0))))
    if bmass > boundary_tol:
        raise Discretization(
            f"eigenvector boundary mass {bmass:.3g} exceeds {boundary_tol}; "
            "increase r_max"
        )
    return SpectrumReport(ell, r, lam, phis, bmass)


def spectral_gap(gs: GroundState, n: int = 8192,
                 r_max: float | None = None) -> dict:
    """kappa = (smallest pencil eigenvalue above p) - p, scanning the
    sectors ell = 0, 1, 2 (parity sectors only when d = 1)."""
    p = gs.params.p
    sectors = (0, 1) if gs.params.d == 1 else (0, 1, 2)
    reports = {}
    candidates = []
    for ell in sectors:
        rep = sector_spectrum(gs, ell, n_eigs=4, n=n, r_max=r_max)
        reports[ell] = rep
        for lam in rep.eigenvalues:
            if lam > p * (1.0 + 1e-6):
                candidates.append(float(lam))
    if not candidates:
        raise Discretization("no eigenvalue above p found in the scan")
    kappa = min(candidates) - p
    return {"kappa": kappa, "reports": reports}


def coercivity_check(gs: GroundState, kappa: float, trials,
                     grid=None, center=None) -> list[dict]:
    """Margins of the gap inequality for each trial field u:

    ||u||_H1^2 >= (p+kappa) int Q^{p-1} u^2
                  - (p+kappa-1) (u, Q)_H1^2 / ||Q||_H1^2
                  - (kappa/p) sum_j (u, dQ_j)_H1^2 / ||dQ_j||_H1^2.
    """
    p, d = gs.params.p, gs.params.d
    trials = list(trials)
    if grid is None:
        grid = trials[0].grid
    if center is None:
        center = np.zeros(d)
    q = sample_soliton(gs, center, grid)
    qn2 = norm(q, "H1") ** 2
    dqs = [sample_soliton_derivative(gs, center, j, grid) for j in range(d)]
    dqn2 = [norm(f, "H1") ** 2 for f in dqs]
    weight = q.values ** (p - 1.0)
    out = []
    for u in trials:
        un2 = norm(u, "H1") ** 2
        quad = float(np.sum(weight * u.values**2)) * grid.h**grid.d
        proj_q = float(inner_h1(u, q)) ** 2 / qn2
        proj_dq = sum(
            float(inner_h1(u, f)) ** 2 / n2 for f, n2 in zip(dqs, dqn2)
        )
        rhs = (p + kappa) * quad - (p + kappa - 1.0) * proj_q \
            - (kappa / p) * proj_dq
        out.append({
            "lhs": un2,
            "rhs": rhs,
            "margin": un2 - rhs,
            "relative_margin": (un2 - rhs) / max(un2, 1e-300),
        })
    return out
