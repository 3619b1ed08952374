"""Sector eigenvalues of the linearization pencil and the coercivity gap."""

import math

import numpy as np
import pytest

from solistab.fields import TorusField, TorusGrid, sample_soliton
from solistab.groundstate import eval_Q
from solistab.spectral import (
    Discretization,
    coercivity_check,
    sector_spectrum,
    spectral_gap,
)


def test_sector0_ground_eigenpair_is_Q(gs13):
    rep = sector_spectrum(gs13, 0, n_eigs=3)
    assert abs(rep.lowest() - 1.0) < 1e-4
    q, _ = eval_Q(gs13, rep.r)
    vec = rep.eigenvectors[:, 0]
    cos = float(q @ vec / (np.linalg.norm(q) * np.linalg.norm(vec)))
    assert cos > 0.9999


def test_sector1_lowest_is_translation_mode(gs13):
    p = gs13.params.p
    rep = sector_spectrum(gs13, 1, n_eigs=3)
    assert abs(rep.lowest() - p) < 1e-3
    _, dq = eval_Q(gs13, rep.r)
    vec = rep.eigenvectors[:, 0]
    cos = abs(float(dq @ vec / (np.linalg.norm(dq) * np.linalg.norm(vec))))
    assert cos > 0.9999


@pytest.mark.parametrize("fixture", ["gs13", "gs32"])
def test_gap_positive_and_grid_stable(fixture, request):
    gs = request.getfixturevalue(fixture)
    k1 = spectral_gap(gs, n=4096)["kappa"]
    k2 = spectral_gap(gs, n=8192)["kappa"]
    assert k1 > 0
    assert abs(k1 - k2) < 1e-3


def test_known_gap_values(gs13, gs32):
    # frozen baselines from the radial solver at n = 8192
    assert abs(spectral_gap(gs13)["kappa"] - 3.0) < 1e-3
    assert abs(spectral_gap(gs32)["kappa"] - 0.8773) < 1e-3


def test_eigenvalues_sorted_and_weighted_orthonormal(gs32):
    rep = sector_spectrum(gs32, 0, n_eigs=4)
    assert np.all(np.diff(rep.eigenvalues) > 0)
    d, p = gs32.params.d, gs32.params.p
    h = rep.r[1] - rep.r[0]
    q, _ = eval_Q(gs32, rep.r)
    b = rep.r ** (d - 1) * q ** (p - 1.0)
    G = rep.eigenvectors.T @ (b[:, None] * rep.eigenvectors)
    assert np.max(np.abs(G - np.eye(4))) < 1e-8


def test_boundary_mass_guard(gs13):
    with pytest.raises(Discretization):
        sector_spectrum(gs13, 0, n=512, r_max=8.0)


def test_sector_validation(gs13, gs32):
    with pytest.raises(ValueError):
        sector_spectrum(gs13, 2)  # d = 1 has only the parity sectors
    with pytest.raises(ValueError):
        sector_spectrum(gs32, 7)


def test_coercivity_on_random_fields(gs13):
    gap = spectral_gap(gs13)["kappa"]
    grid = TorusGrid(1, 160.0, 2**13)
    rng = np.random.default_rng(7)
    x = grid.meshgrid()[0]
    trials = []
    for _ in range(20):
        c = rng.normal(size=6)
        vals = sum(ck * np.exp(-((x - 3.0 * k + 7.5) ** 2) / 4.0)
                   for k, ck in enumerate(c))
        trials.append(TorusField(grid, vals + np.zeros_like(x)))
    out = coercivity_check(gs13, gap, trials, grid=grid)
    for rec in out:
        assert rec["relative_margin"] > -1e-8


def test_coercivity_tight_on_eigen_directions(gs13):
    # u = Q saturates the first subtraction: margin close to zero
    gap = spectral_gap(gs13)["kappa"]
    grid = TorusGrid(1, 160.0, 2**13)
    q = sample_soliton(gs13, np.array([0.0]), grid)
    rec = coercivity_check(gs13, gap, [q], grid=grid)[0]
    assert abs(rec["relative_margin"]) < 1e-6
