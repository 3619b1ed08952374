"""The tail-scale function phi, its inverse psi, and the stability modulus F.

phi(t) = t^{-(d-1)/2} e^{-t} is the radial scale of a soliton tail; psi
recovers a separation from an interaction size.  F converts the equation
residual into the sharp bound on the distance to the soliton manifold,
with five regimes depending on (d, p).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "OutOfRange",
    "phi",
    "log_phi",
    "psi",
    "psi_from_log",
    "select_branch",
    "StabilityModulus",
    "F",
    "log_F",
    "monotone_range",
]


class OutOfRange(ValueError):
    """Argument outside the admitted domain of psi or the branch table."""


def phi(d: int, t):
    """t^{-(d-1)/2} e^{-t} for t > 0."""
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise ValueError("phi requires t > 0")
    out = np.exp(log_phi(d, t))
    return float(out) if out.ndim == 0 else out


def log_phi(d: int, t):
    """ln phi(t) = -t - (d-1)/2 ln t, safe far past underflow."""
    t = np.asarray(t, dtype=float)
    return -t - 0.5 * (d - 1) * np.log(t)


def psi_from_log(d: int, log_s, domain_floor: float = 1e-8):
    """Inverse of phi given ln s: solve t + (d-1)/2 ln t = -ln s.

    Bracketed Newton with bisection fallback; relative residual below
    1e-13 in ln-space, which gives |phi(psi(s)) - s|/s < 1e-12.
    """
    log_s = np.asarray(log_s, dtype=float)
    scalar = log_s.ndim == 0
    log_s = np.atleast_1d(log_s)
    lp_floor = float(log_phi(d, domain_floor))
    if np.any(log_s > lp_floor):
        raise OutOfRange(
            f"s exceeds phi(domain_floor={domain_floor}); psi not admitted"
        )
    y = -log_s  # solve t + (d-1)/2 ln t = y
    c = 0.5 * (d - 1)
    t = np.maximum(y - c * np.log(np.maximum(y, 1.0)), 0.5 * domain_floor)
    t = np.maximum(t, domain_floor * 1e-3)
    lo = np.full_like(t, domain_floor * 1e-6)
    hi = np.maximum(np.abs(y) + 10.0, 10.0)
    for _ in range(100):
        g = t + c * np.log(t) - y
        lo = np.where(g < 0, np.maximum(lo, t), lo)
        hi = np.where(g > 0, np.minimum(hi, t), hi)
        dg = 1.0 + c / t
        step = g / dg
        t_new = t - step
        bad = (t_new <= lo) | (t_new >= hi) | ~np.isfinite(t_new)
        t_new = np.where(bad, 0.5 * (lo + hi), t_new)
        if np.all(np.abs(t_new - t) <= 1e-15 * np.maximum(t, 1.0)):
            t = t_new
            break
        t = t_new
    return float(t[0]) if scalar else t


def psi(d: int, s, domain_floor: float = 1e-8):
    """Inverse of phi: psi(phi(t)) = t.  Admits 0 < s <= phi(domain_floor)."""
    s = np.asarray(s, dtype=float)
    if np.any(s <= 0):
        raise OutOfRange("psi requires s > 0")
    return psi_from_log(d, np.log(s), domain_floor)


_BRANCHES = ("linear", "log_d1", "psi_d2", "psi_d3", "subquadratic")


def select_branch(d: int, p: float) -> str:
    """Branch of the stability modulus dictated by (d, p)."""
    if p > 2:
        return "linear"
    if p == 2:
        if d in (4, 5):
            return "linear"
        if d == 1:
            return "log_d1"
        if d == 2:
            return "psi_d2"
        if d == 3:
            return "psi_d3"
        raise OutOfRange(f"p = 2 is not subcritical for d = {d}")
    if 1 < p < 2:
        return "subquadratic"
    raise OutOfRange(f"p = {p} outside the admitted range p > 1")


@dataclass(frozen=True)
class StabilityModulus:
    """The modulus F for fixed (d, p), with its branch label."""

    d: int
    p: float
    branch: str = ""

    def __post_init__(self):
        object.__setattr__(self, "branch", select_branch(self.d, self.p))

    def __call__(self, s):
        return F(self.d, self.p, s)


def log_F(d: int, p: float, log_s, domain_floor: float = 1e-8):
    """ln F(s) from ln s; well defined down to ln s ~ -1e5."""
    branch = select_branch(d, p)
    log_s = np.asarray(log_s, dtype=float)
    if branch == "linear":
        out = log_s
    elif branch == "log_d1":
        out = 0.5 * np.log(np.abs(log_s) + 1.0) + log_s
    elif branch in ("psi_d2", "psi_d3"):
        t = psi_from_log(d, log_s, domain_floor)
        if branch == "psi_d2":
            out = -0.25 * np.log(np.abs(t)) - t
        else:
            out = -np.log(np.abs(t)) - t + 0.5 * np.log(np.log(t + 2.0))
    else:  # subquadratic
        t = psi_from_log(d, log_s, domain_floor)
        out = (0.25 - 0.5 * p) * (d - 1) * np.log(np.abs(t)) - 0.5 * p * t
    return out


def F(d: int, p: float, s, domain_floor: float = 1e-8):
    """Stability modulus F_{d,p}(s); F(0) = 0, continuous at 0."""
    s = np.asarray(s, dtype=float)
    scalar = s.ndim == 0
    s = np.atleast_1d(s)
    if np.any(s < 0):
        raise ValueError("F requires s >= 0")
    out = np.zeros_like(s)
    pos = s > 0
    if pos.any():
        out[pos] = np.exp(log_F(d, p, np.log(s[pos]), domain_floor))
    return float(out[0]) if scalar else out


def monotone_range(d: int, p: float) -> float:
    """s0 such that F is strictly increasing on (0, s0)."""
    branch = select_branch(d, p)
    if branch == "linear":
        return math.inf
    if branch == "log_d1":
        # d/ds [(1 - ln s)^{1/2} s] > 0 for ln s < 1/2
        return 1.0
    # psi branches: F increases wherever psi(s) stays above a few units;
    # psi(s) >= 2 is a comfortable sufficient condition
    return phi(d, 2.0)
