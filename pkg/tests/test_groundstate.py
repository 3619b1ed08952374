"""Radial profile solver: closed-form oracles, residuals, frozen baselines."""

import math

import numpy as np
import pytest

from solistab.groundstate import (
    ProblemParams,
    cached_ground_state,
    closed_form_Q_1d,
    eval_Q,
    eval_logQ,
    radial_integral,
)

# frozen solver baselines: central value Q(0) and tail prefactor c_Q
BASELINES = {
    (1, 2.0): (1.5, 6.0),
    (1, 3.0): (math.sqrt(2.0), 2.0 * math.sqrt(2.0)),
    (2, 2.0): (2.3919564032, 10.86115906),
    (3, 2.0): (4.1916829544, 16.06942768),
    (3, 3.0): (4.3373876800, 2.71280836),
}

PAIRS = [(1, 3.0), (2, 2.0), (3, 2.0), (3, 3.0)]


@pytest.mark.parametrize("p", [2.0, 3.0])
def test_closed_form_match_1d(p):
    gs = cached_ground_state(1, p)
    x = np.linspace(0.0, 30.0, 3001)
    q, _ = eval_Q(gs, x)
    exact = closed_form_Q_1d(p, x)
    assert np.max(np.abs(q - exact)) < 1e-8


@pytest.mark.parametrize("d,p", PAIRS)
def test_ode_residual(d, p):
    gs = cached_ground_state(d, p)
    assert gs.ode_residual < 1e-8


@pytest.mark.parametrize("d,p", PAIRS)
def test_energy_balance(d, p):
    # multiply the equation by Q and integrate: grad + mass = potential
    gs = cached_ground_state(d, p)
    grad2 = radial_integral(gs, gs.dq**2)
    mass2 = radial_integral(gs, gs.q**2)
    pot = radial_integral(gs, gs.q ** (p + 1.0))
    assert abs(grad2 + mass2 - pot) / pot < 1e-6


@pytest.mark.parametrize("d,p", sorted(BASELINES))
def test_frozen_baselines(d, p):
    gs = cached_ground_state(d, p)
    q0, c_Q = BASELINES[(d, p)]
    assert abs(gs.q0 - q0) / q0 < 1e-6
    assert abs(gs.c_Q - c_Q) / c_Q < 1e-4


@pytest.mark.parametrize("d,p", [(1, 3.0), (3, 2.0)])
def test_far_tail_formula(d, p):
    # past the stored grid the profile continues with the analytic tail
    gs = cached_ground_state(d, p)
    r = gs.r_max + 5.0
    logq, slope = eval_logQ(gs, r)
    expected = math.log(gs.c_Q) - 0.5 * (d - 1) * math.log(r) - r
    assert abs(logq - expected) < 1e-10
    assert abs(slope + 1.0 + 0.5 * (d - 1) / r) < 1e-12


def test_origin_series_smooth():
    gs = cached_ground_state(3, 3.0)
    r = np.sort(np.array([1e-8, 1e-5, 1e-3, gs.grid[1] * 0.5, gs.grid[1]]))
    q, dq = eval_Q(gs, r)
    assert abs(q[0] - gs.q0) < 1e-10
    assert np.all(np.diff(q) <= 1e-12)  # decreasing from the center
    assert abs(dq[0]) < 1e-6


def test_profile_positive_decreasing():
    gs = cached_ground_state(2, 2.0)
    assert np.all(gs.q > 0)
    assert np.all(np.diff(gs.q) < 0)


def test_invalid_parameters_rejected():
    with pytest.raises(ValueError):
        ProblemParams(2, 1.0)  # p must exceed 1
    with pytest.raises(ValueError):
        ProblemParams(3, 5.0)  # supercritical for d = 3
