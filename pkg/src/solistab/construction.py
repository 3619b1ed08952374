"""Construction of the extremal near-sum states u = sigma + rho.

rho solves the projected fixed-point equation
    rho = (id - P_Fperp K)^{-1} P_Fperp (-Laplacian+1)^{-1} (f + N(rho)),
with K v = p (-Laplacian+1)^{-1} (sigma^{p-1} v), f the interaction
term of the sum sigma, and N the quadratic-and-higher remainder of the
nonlinearity.  The linear solve runs on the orthogonal complement of
the modulation span F; the outer iteration is plain Picard with an
empirical contraction monitor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse.linalg import LinearOperator, lgmres

from .decomposition import ModulationBasis, build_basis, project_F
from .fields import (
    SolitonConfig,
    TorusField,
    TorusGrid,
    gamma_residual,
    helmholtz_inverse,
    interaction_term_f,
    nonlinear_remainder_N,
    norm,
    sample_soliton_sum,
)
from .groundstate import GroundState

__all__ = [
    "SolverStalled",
    "NotContracting",
    "LinearizedOperator",
    "make_linearized_operator",
    "solve_linearized",
    "build_sharp_example",
    "positivize",
]


class SolverStalled(RuntimeError):
    """Linear solve residual plateaued above tolerance."""


class NotContracting(RuntimeError):
    """Outer fixed-point iteration shows no contraction."""


@dataclass(frozen=True)
class LinearizedOperator:
    """v -> v - P_Fperp( p (-Laplacian+1)^{-1} (sigma^{p-1} v) ) on F_perp."""

    gs: GroundState
    cfg: SolitonConfig
    grid: TorusGrid
    basis: ModulationBasis
    sigma: TorusField
    weight: np.ndarray  # p * sigma^{p-1} samples

    def K(self, v: TorusField) -> TorusField:
        prod = TorusField(self.grid, self.weight * v.values)
        return helmholtz_inverse(prod)

    def apply(self, v: TorusField) -> TorusField:
        kv = self.K(v)
        _, kv_perp, _ = project_F(self.basis, kv)
        return TorusField(self.grid, v.values - kv_perp.values)


def make_linearized_operator(gs: GroundState, cfg: SolitonConfig,
                             grid: TorusGrid,
                             strict: bool = True) -> LinearizedOperator:
    sigma = sample_soliton_sum(gs, cfg, grid, strict=strict)
    basis = build_basis(gs, cfg, grid, strict=strict)
    p = gs.params.p
    weight = p * np.abs(sigma.values) ** (p - 1.0)
    return LinearizedOperator(gs, cfg, grid, basis, sigma, weight)


def solve_linearized(opr: LinearizedOperator, phi: TorusField,
                     tol: float = 1e-10, max_fixed_point: int = 200) -> TorusField:
    """Solve (id - P_Fperp K) v = phi for v in F_perp.

    Plain fixed-point iteration v <- phi + P_Fperp K v first (K is small
    off the soliton cores); on stall, a restarted Krylov solve with the
    same operator takes over.  The residual is measured in H1.
    """
    grid = opr.grid
    phi_norm = norm(phi, "H1")
    if phi_norm == 0.0:
        return TorusField(grid, np.zeros_like(phi.values))

    def residual(v: TorusField) -> float:
        r = opr.apply(v)
        return norm(TorusField(grid, r.values - phi.values), "H1") / phi_norm

    v = TorusField(grid, phi.values.copy())
    prev = math.inf
    for _ in range(max_fixed_point):
        kv = opr.K(v)
        _, kv_perp, _ = project_F(opr.basis, kv)
        v_new = TorusField(grid, phi.values + kv_perp.values)
        delta = norm(TorusField(grid, v_new.values - v.values), "H1") / phi_norm
        v = v_new
        if delta < 0.5 * tol:
            break
        if delta > 0.98 * prev and delta > tol:
            break  # stalled or diverging; hand over to the Krylov solve
        prev = delta
    if residual(v) <= tol:
        return v

    shape = phi.values.shape
    size = phi.values.size

    def matvec(x):
        vv = TorusField(grid, x.reshape(shape))
        return opr.apply(vv).values.ravel()

    A = LinearOperator((size, size), matvec=matvec, dtype=float)
    x0 = v.values.ravel()
    sol, info = lgmres(A, phi.values.ravel(), x0=x0, rtol=tol * 1e-2,
                       atol=0.0, maxiter=400)
    v = TorusField(grid, sol.reshape(shape))
    _, v, _ = project_F(opr.basis, v)
    res = residual(v)
    if res > tol:
        raise SolverStalled(
            f"linear solve residual {res:.3g} above tolerance {tol:.3g}"
        )
    return v


def build_sharp_example(gs: GroundState, cfg: SolitonConfig, grid: TorusGrid,
                        tol: float = 1e-10, max_outer: int = 60,
                        strict: bool = True):
    """Extremal state u = sigma + rho with rho in F_perp.

    Returns (u, rho, report); the report carries the norms the sharpness
    analysis compares: ||rho||_H1, the linear response
    ||P_Fperp (-Laplacian+1)^{-1} f||_H1, and Gamma(u).
    """
    if not cfg.is_real():
        raise ValueError("sharp examples are built for real positive phases")
    opr = make_linearized_operator(gs, cfg, grid, strict=strict)
    sigma = opr.sigma
    params = gs.params
    f_field = interaction_term_f(gs, cfg, grid, strict=strict)
    helm_f = helmholtz_inverse(f_field)
    _, helm_f_perp, _ = project_F(opr.basis, helm_f)
    linear_response = norm(helm_f_perp, "H1")

    rho = TorusField(grid, np.zeros_like(sigma.values))
    steps = []
    if cfg.m >= 2:
        for outer in range(1, max_outer + 1):
            N_rho = nonlinear_remainder_N(sigma, rho, params)
            rhs = TorusField(grid, f_field.values + N_rho.values)
            w = helmholtz_inverse(rhs)
            _, w_perp, _ = project_F(opr.basis, w)
            rho_new = solve_linearized(opr, w_perp, tol=tol)
            step = norm(TorusField(grid, rho_new.values - rho.values), "H1")
            steps.append(step)
            rho = rho_new
            if step < tol * max(norm(rho, "H1"), 1e-300) or step < 1e-15:
                break
            if len(steps) >= 6:
                ratios = [steps[-k] / max(steps[-k - 1], 1e-300)
                          for k in range(1, 6)]
                if all(r >= 0.95 for r in ratios):
                    raise NotContracting(
                        f"outer iteration ratios {ratios} show no contraction"
                    )
        iterations = outer
    else:
        iterations = 0

    u = TorusField(grid, sigma.values + rho.values)
    rho_h1 = norm(rho, "H1")
    report = {
        "m": cfg.m,
        "R": cfg.R,
        "rho_H1": rho_h1,
        "linear_response_H1": linear_response,
        "rho_to_linear_ratio": rho_h1 / linear_response
        if linear_response > 0 else math.nan,
        "Gamma_u": gamma_residual(u, params),
        "Gamma_sigma": gamma_residual(sigma, params),
        "f_L2": norm(f_field, "L2"),
        "f_H1": norm(f_field, "H1"),
        "f_Hm1": norm(f_field, "Hm1"),
        "outer_iterations": iterations,
        "outer_steps": steps,
        "rho_ball_ok": bool(cfg.m < 2 or not math.isfinite(cfg.R)
                            or rho_h1 <= 1.0 / cfg.R),
        "gram_condition": opr.basis.condition,
    }
    return u, rho, report


def positivize(u: TorusField):
    """u+ = max(u, 0) with the size of the discarded negative part."""
    if u.scalar_kind != "real":
        raise ValueError("positivize requires a real field")
    plus = TorusField(u.grid, np.maximum(u.values, 0.0))
    minus = TorusField(u.grid, np.maximum(-u.values, 0.0))
    return plus, {"u_minus_H1": norm(minus, "H1"),
                  "u_minus_L2": norm(minus, "L2")}
