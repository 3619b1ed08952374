"""Modulation fitting: distance to the manifold of multi-soliton sums.

Given u close to a sum of solitons, minimize the squared H1 distance
G(y_1, ..., y_m) = || u - sum z_k Q(. + y_k) ||_H1^2 over the centers
(and over the complex coefficients z_k when u is complex), producing the
remainder rho orthogonal to the modulation directions.  The span F of
the translation modes partial_j Q_i carries Gram-based projections P_F
and P_{F_perp}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .fields import (
    SolitonConfig,
    TorusField,
    TorusGrid,
    inner_h1,
    norm,
    sample_soliton,
    sample_soliton_derivative,
    sample_soliton_sum,
)
from .groundstate import GroundState

__all__ = [
    "IllConditioned",
    "NotConverged",
    "LeftBasin",
    "ModulationBasis",
    "DecompositionResult",
    "build_basis",
    "project_F",
    "fit_modulation",
    "orthogonality_residuals",
    "complex_phase_restriction_check",
]


class IllConditioned(RuntimeError):
    """Modulation Gram matrix condition number exceeds the admissible cap."""


class NotConverged(RuntimeError):
    """Modulation fit failed to reach the gradient tolerance."""


class LeftBasin(RuntimeError):
    """Distance to the sum grew past twice its initial value during the fit."""


_COND_CAP = 1e6


@dataclass(frozen=True)
class ModulationBasis:
    """Translation (and, for complex u, amplitude/phase) modes with their
    H1 Gram system."""

    gs: GroundState
    cfg: SolitonConfig
    grid: TorusGrid
    fields: tuple = ()
    labels: tuple = ()
    gram: np.ndarray = field(default=None)
    condition: float = math.nan

    def __len__(self):
        return len(self.fields)

    def solve_gram(self, b: np.ndarray) -> np.ndarray:
        return np.linalg.solve(self.gram, b)


def _real_inner(f: TorusField, g: TorusField) -> float:
    """Real part of the H1 pairing (the real-linear inner product)."""
    val = inner_h1(f, g)
    return float(val.real) if isinstance(val, complex) else float(val)


def build_basis(gs: GroundState, cfg: SolitonConfig, grid: TorusGrid,
                complex_modes: bool = False, unit_modulus: bool = False,
                strict: bool = True) -> ModulationBasis:
    """Assemble the modulation modes and their H1 Gram matrix.

    Real case: partial_j Q_i for each center i and axis j.  Complex case
    additionally the coefficient directions: Q_i and i Q_i when z_i
    ranges over C, or only the rotation direction i z_i Q_i when the
    coefficients stay on the unit circle.
    """
    max_center = float(np.max(np.linalg.norm(cfg.centers, axis=1)))
    grid.check_for_solitons(max_center, strict=strict)
    d = gs.params.d
    fields_ = []
    labels = []
    for i, y in enumerate(cfg.centers):
        z = cfg.phases[i]
        for j in range(d):
            dq = sample_soliton_derivative(gs, y, j, grid)
            vals = dq.values * (z if complex_modes else z.real)
            fields_.append(TorusField(grid, vals))
            labels.append(("center", i, j))
        if complex_modes and unit_modulus:
            q = sample_soliton(gs, y, grid)
            fields_.append(TorusField(grid, 1j * z * q.values))
            labels.append(("angle", i, None))
        elif complex_modes:
            q = sample_soliton(gs, y, grid)
            fields_.append(TorusField(grid, q.values.astype(complex)))
            labels.append(("re", i, None))
            fields_.append(TorusField(grid, 1j * q.values))
            labels.append(("im", i, None))
    k = len(fields_)
    gram = np.empty((k, k))
    for a in range(k):
        for b in range(a, k):
            gram[a, b] = gram[b, a] = _real_inner(fields_[a], fields_[b])
    condition = float(np.linalg.cond(gram))
    if condition > _COND_CAP:
        raise IllConditioned(
            f"Gram condition number {condition:.3g} exceeds {_COND_CAP:.0e}; "
            "centers too close"
        )
    return ModulationBasis(gs, cfg, grid, tuple(fields_), tuple(labels),
                           gram, condition)


def project_F(basis: ModulationBasis, v: TorusField):
    """Split v = P_F v + P_{F_perp} v with Gram-system coefficients.

    Returns (in_F, out_of_F, coefficients); the splitting is orthogonal
    in the real H1 inner product.
    """
    b = np.array([_real_inner(v, e) for e in basis.fields])
    coef = basis.solve_gram(b)
    acc = np.zeros_like(v.values, dtype=complex if any(
        e.scalar_kind == "complex" for e in basis.fields) else float)
    for c, e in zip(coef, basis.fields):
        acc = acc + c * e.values
    if v.scalar_kind == "real" and np.iscomplexobj(acc):
        acc = acc.real
    in_F = TorusField(basis.grid, acc.astype(v.values.dtype, copy=False))
    out = TorusField(basis.grid, v.values - in_F.values)
    return in_F, out, coef


def orthogonality_residuals(gs: GroundState, cfg: SolitonConfig,
                            grid: TorusGrid, rho: TorusField) -> dict:
    """Stationarity residuals p * int rho Q_i^{p-1} partial_j Q_i dx.

    These are (up to the equation satisfied by Q) the H1 pairings of rho
    with the modulation modes, i.e. the literal gradient components of
    the squared-distance functional.
    """
    p = gs.params.p
    h = grid.h
    out = {}
    for i, y in enumerate(cfg.centers):
        q = sample_soliton(gs, y, grid).values
        for j in range(gs.params.d):
            dq = sample_soliton_derivative(gs, y, j, grid).values
            integrand = rho.values * q ** (p - 1.0) * dq
            val = p * np.sum(integrand.real) * h**grid.d
            out[f"center_{i}_axis_{j}"] = float(val)
    return out


@dataclass(frozen=True)
class DecompositionResult:
    """Fitted configuration, remainder, norms, and solver diagnostics."""

    config: SolitonConfig
    rho: TorusField
    norms: dict
    orthogonality: dict
    iterations: int
    gram_condition: float

    def to_summary(self) -> dict:
        return {
            "centers": self.config.centers.tolist(),
            "phases_real": self.config.phases.real.tolist(),
            "phases_imag": self.config.phases.imag.tolist(),
            "norms": self.norms,
            "orthogonality": self.orthogonality,
            "iterations": self.iterations,
            "gram_condition": self.gram_condition,
        }


def _pack(cfg: SolitonConfig, mode: str) -> np.ndarray:
    th = cfg.centers.ravel().tolist()
    if mode == "free":
        th += cfg.phases.real.tolist() + cfg.phases.imag.tolist()
    elif mode == "unit":
        th += np.angle(cfg.phases).tolist()
    return np.asarray(th, dtype=float)


def _unpack(theta: np.ndarray, m: int, d: int, params,
            mode: str) -> SolitonConfig:
    centers = theta[: m * d].reshape(m, d)
    if mode == "free":
        re = theta[m * d: m * d + m]
        im = theta[m * d + m:]
        z = re + 1j * im
        mag = np.abs(z)
        cfg = SolitonConfig(params, centers, z / np.maximum(mag, 1e-300))
        object.__setattr__(cfg, "phases", z)  # keep the free amplitude
        return cfg
    if mode == "unit":
        z = np.exp(1j * theta[m * d:])
        return SolitonConfig(params, centers, z)
    return SolitonConfig(params, centers)


def _sigma_for(gs: GroundState, cfg: SolitonConfig, grid: TorusGrid,
               free_z: bool):
    """sigma with possibly non-unit coefficients z_k."""
    pieces = [sample_soliton(gs, y, grid).values for y in cfg.centers]
    acc = 0.0
    for z, q in zip(cfg.phases, pieces):
        acc = acc + (z if free_z else z.real) * q
    return TorusField(grid, acc)


def fit_modulation(gs: GroundState, u: TorusField, init: SolitonConfig,
                   tol: float = 1e-10, max_iter: int = 60,
                   unit_modulus: bool = False,
                   strict: bool = True) -> DecompositionResult:
    """Gauss-Newton minimization of || u - sigma(theta) ||_H1^2.

    The Jacobian of sigma in the center parameters is exactly the
    modulation basis, so each step solves the basis Gram system against
    the H1 pairings of the current remainder.  A halving line search
    guards descent; convergence is declared when the parameter update
    and the gradient pairings drop below tol (relative to ||u||_H1).
    """
    complex_u = u.scalar_kind == "complex"
    m, d = init.m, gs.params.d
    mode = "real" if not complex_u else ("unit" if unit_modulus else "free")
    theta = _pack(init, mode)
    u_norm = max(norm(u, "H1"), 1e-300)

    def assemble(th):
        cfg = _unpack(th, m, d, gs.params, mode)
        max_center = float(np.max(np.linalg.norm(cfg.centers, axis=1)))
        u.grid.check_for_solitons(max_center, strict=strict)
        sigma = _sigma_for(gs, cfg, u.grid, complex_u)
        rho = TorusField(u.grid, u.values - sigma.values)
        return cfg, sigma, rho

    cfg, sigma, rho = assemble(theta)
    dist0 = norm(rho, "H1")
    dist = dist0
    iterations = 0
    basis = None
    for iterations in range(1, max_iter + 1):
        basis = build_basis(gs, cfg, u.grid, complex_modes=complex_u,
                            unit_modulus=(mode == "unit"), strict=strict)
        b = np.array([_real_inner(rho, e) for e in basis.fields])
        grad_scale = float(np.max(np.abs(b))) / u_norm if len(b) else 0.0
        if grad_scale < tol:
            break
        step = basis.solve_gram(b)
        # map basis coefficients to parameter updates: center modes move
        # the center, coefficient modes move Re z / Im z
        dtheta = np.zeros_like(theta)
        for c, lab in zip(step, basis.labels):
            kind, i, j = lab
            if kind == "center":
                dtheta[i * d + j] = c
            elif kind in ("re", "angle"):
                dtheta[m * d + i] = c
            else:
                dtheta[m * d + m + i] = c
        lam = 1.0
        for _ in range(25):
            trial = theta + lam * dtheta
            try:
                cfg_t, sigma_t, rho_t = assemble(trial)
            except ValueError:
                lam *= 0.5
                continue
            dist_t = norm(rho_t, "H1")
            if dist_t <= dist * (1.0 + 1e-12):
                theta, cfg, sigma, rho, dist = trial, cfg_t, sigma_t, \
                    rho_t, dist_t
                break
            lam *= 0.5
        else:
            raise NotConverged(
                f"line search stalled at gradient scale {grad_scale:.3g}"
            )
        if dist > 2.0 * dist0 + 1e-14:
            raise LeftBasin(
                f"distance grew from {dist0:.3g} to {dist:.3g}; "
                "initial configuration outside the basin"
            )
        if float(np.max(np.abs(lam * dtheta))) < 1e-14:
            break
    else:
        raise NotConverged(f"no convergence in {max_iter} iterations")

    if basis is None:
        basis = build_basis(gs, cfg, u.grid, complex_modes=complex_u,
                            unit_modulus=(mode == "unit"), strict=strict)
    if complex_u:
        ortho = {
            f"{lab[0]}_{lab[1]}" + (f"_axis_{lab[2]}" if lab[2] is not None
                                    else ""): _real_inner(rho, e)
            for lab, e in zip(basis.labels, basis.fields)
        }
    else:
        ortho = orthogonality_residuals(gs, cfg, u.grid, rho)
    from .fields import gamma_residual, interaction_term_f

    norms = {
        "rho_H1": dist,
        "Gamma_u": gamma_residual(u, gs.params),
        "u_H1": u_norm,
    }
    if cfg.is_real() and cfg.m >= 2:
        f_field = interaction_term_f(gs, cfg, u.grid, strict=strict)
        norms["f_L2"] = norm(f_field, "L2")
        norms["f_H1"] = norm(f_field, "H1")
        norms["f_Hm1"] = norm(f_field, "Hm1")
    return DecompositionResult(cfg, rho, norms, ortho, iterations,
                               basis.condition)


def complex_phase_restriction_check(cfg: SolitonConfig, c: float) -> bool:
    """All pairwise phase alignments cos(theta_i - theta_j) on one side of
    +/- c (the admissible sector for the multi-soliton complex theory)."""
    if not 0.0 < c <= 1.0:
        raise ValueError("threshold c must lie in (0, 1]")
    z = cfg.phases
    vals = []
    for i in range(cfg.m):
        for j in range(i + 1, cfg.m):
            vals.append(float((z[j] * np.conj(z[i])).real))
    if not vals:
        return True
    return all(v > c for v in vals) or all(v < -c for v in vals)
