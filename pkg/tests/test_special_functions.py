"""Tail-scale function phi, inverse psi, and the stability modulus F."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from solistab.special_functions import (
    F,
    OutOfRange,
    StabilityModulus,
    log_F,
    monotone_range,
    phi,
    psi,
    psi_from_log,
    select_branch,
)


@pytest.mark.parametrize("d", [1, 2, 3, 4, 5])
def test_inverse_roundtrip_ten_decades(d):
    t = np.linspace(2.0, 40.0, 200)
    s = phi(d, t)
    assert s.max() / s.min() > 1e10  # spans more than ten decades
    t_back = psi(d, s)
    rel = np.abs(phi(d, t_back) - s) / s
    assert rel.max() < 1e-12


@pytest.mark.parametrize("d", [1, 3, 5])
def test_inverse_far_past_underflow(d):
    log_s = np.array([-100.0, -1000.0, -1e4, -1e5])
    t = psi_from_log(d, log_s)
    resid = -t - 0.5 * (d - 1) * np.log(t) - log_s
    assert np.max(np.abs(resid / log_s)) < 1e-13


def test_branch_table():
    assert select_branch(1, 3.0) == "linear"
    assert select_branch(4, 2.0) == "linear"
    assert select_branch(5, 2.0) == "linear"
    assert select_branch(1, 2.0) == "log_d1"
    assert select_branch(2, 2.0) == "psi_d2"
    assert select_branch(3, 2.0) == "psi_d3"
    assert select_branch(3, 1.5) == "subquadratic"
    with pytest.raises(OutOfRange):
        select_branch(6, 2.0)
    with pytest.raises(OutOfRange):
        select_branch(2, 1.0)


def test_exact_values():
    # linear branch is the identity
    assert F(1, 3.0, 0.25) == 0.25
    # d=1, p=2 at s = e^{-1}: (|ln s|+1)^{1/2} s = sqrt(2)/e
    assert abs(F(1, 2.0, math.exp(-1.0)) - math.sqrt(2.0) / math.e) < 1e-15
    # d=2, p=2 at s = phi(2, 8): |psi|^{-1/4} e^{-psi} with psi = 8
    val = F(2, 2.0, phi(2, 8.0))
    assert abs(val - 8.0 ** -0.25 * math.exp(-8.0)) < 1e-18


def test_value_at_zero():
    for d, p in [(1, 3.0), (1, 2.0), (2, 2.0), (3, 2.0), (2, 1.5)]:
        assert F(d, p, 0.0) == 0.0


def test_subquadratic_branch_formula():
    # F = |psi|^{(1/4 - p/2)(d-1)} e^{-p psi / 2}
    d, p, t = 3, 1.5, 12.0
    s = phi(d, t)
    expected = t ** ((0.25 - 0.5 * p) * (d - 1)) * math.exp(-0.5 * p * t)
    assert abs(F(d, p, s) - expected) / expected < 1e-12


def test_modulus_object_carries_branch():
    mod = StabilityModulus(2, 1.5)
    assert mod.branch == "subquadratic"
    assert mod(phi(2, 10.0)) == F(2, 1.5, phi(2, 10.0))


@pytest.mark.parametrize("d,p", [(1, 2.0), (2, 2.0), (3, 2.0), (1, 1.5),
                                 (2, 1.5), (1, 3.0)])
def test_monotone_on_admitted_range(d, p):
    s0 = monotone_range(d, p)
    hi = min(s0, 1.0)
    s = np.exp(np.linspace(math.log(hi) - 30.0, math.log(hi), 400))
    vals = F(d, p, s)
    assert np.all(np.diff(vals) > 0)


@given(st.integers(min_value=1, max_value=5),
       st.floats(min_value=2.5, max_value=35.0))
@settings(max_examples=200, deadline=None)
def test_roundtrip_property(d, t):
    s = phi(d, t)
    assert abs(psi(d, s) - t) / t < 1e-12


def test_log_space_evaluation_matches_direct():
    for d, p in [(1, 2.0), (2, 2.0), (3, 2.0), (2, 1.5)]:
        s = phi(d, 15.0)
        direct = F(d, p, s)
        logged = math.exp(log_F(d, p, math.log(s)))
        assert abs(direct - logged) / direct < 1e-13


def test_psi_domain_guard():
    with pytest.raises(OutOfRange):
        psi(2, 1e6)  # larger than phi at the domain floor
    with pytest.raises(OutOfRange):
        psi(1, -0.5)
