"""Alignment of point configurations along a common positive direction.

Given m+1 distinct points, find a unit direction tau whose projections
separate every pair, then rotate tau to the first axis and translate the
minimal point to the origin: all remaining points end up with positive
first coordinate and a uniform angular lower bound c_achieved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

__all__ = [
    "DegenerateInput",
    "ProjectionResult",
    "sphere_lattice",
    "project_points",
]


class DegenerateInput(ValueError):
    """Duplicate points in the input configuration."""


@dataclass(frozen=True)
class ProjectionResult:
    """Chosen direction, base point, ordering, and the angular bound."""

    direction: np.ndarray
    base_index: int
    order: np.ndarray
    transformed: np.ndarray
    c_achieved: float
    delta_pairs: float


def _kronecker_sequence(k: int, dim: int) -> np.ndarray:
    """Deterministic low-discrepancy points in [0,1]^dim (additive
    recurrence driven by the generalized golden ratio)."""
    # x solves x^{dim+1} = x + 1; alphas 1/x, 1/x^2, ... are badly
    # approximable jointly, giving a well-spread Kronecker lattice
    x = 2.0
    for _ in range(60):
        x = (1.0 + x) ** (1.0 / (dim + 1))
    alpha = np.array([x ** -(j + 1) for j in range(dim)])
    n = np.arange(1, k + 1)[:, None]
    return np.mod(0.5 + n * alpha[None, :], 1.0)


def sphere_lattice(k: int, d: int) -> np.ndarray:
    """k deterministic well-spread unit vectors in R^d."""
    if d == 1:
        return np.array([[1.0], [-1.0]])[: max(k, 1)]
    if d == 2:
        th = (np.arange(k) + 0.5) * math.pi / k  # half-turn: +/- equivalent
        return np.column_stack([np.cos(th), np.sin(th)])
    u = _kronecker_sequence(k, d)
    g = ndtri(np.clip(u, 1e-12, 1.0 - 1e-12))
    norms = np.linalg.norm(g, axis=1)
    return g / np.maximum(norms, 1e-300)[:, None]


def _householder_to_e1(tau: np.ndarray) -> np.ndarray:
    """Orthogonal matrix sending tau to e1."""
    d = tau.size
    e1 = np.zeros(d)
    e1[0] = 1.0
    v = tau - e1
    nv = np.linalg.norm(v)
    if nv < 1e-14:
        return np.eye(d)
    v = v / nv
    return np.eye(d) - 2.0 * np.outer(v, v)


def project_points(points, delta_target: float = 0.5) -> ProjectionResult:
    """Direction search plus rotation/translation/reordering.

    The candidate directions are all pairwise difference directions plus
    a deterministic sphere lattice of 4 (m+1)^2 * 100 points (capped);
    the candidate maximizing the minimal pairwise projection ratio wins.
    The exhaustive pair check of the postcondition runs before returning.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    n, d = pts.shape
    if n > 64:
        raise ValueError("at most 64 points supported")
    if not 0.0 < delta_target < 1.0:
        raise ValueError("delta_target must lie in (0,1)")
    diffs = []
    for i in range(n):
        for j in range(i + 1, n):
            dv = pts[i] - pts[j]
            nv = np.linalg.norm(dv)
            if nv == 0.0:
                raise DegenerateInput(f"points {i} and {j} coincide")
            diffs.append(dv / nv)
    if n == 1:
        tau = np.zeros(d)
        tau[0] = 1.0
        delta = 1.0
    else:
        diffs = np.asarray(diffs)
        k = min(4 * n * n * 100, 40000)
        cands = np.vstack([diffs, sphere_lattice(k, d)])
        scores = np.min(np.abs(diffs @ cands.T), axis=0)
        best = int(np.argmax(scores))
        tau = cands[best]
        delta = float(scores[best])
    H = _householder_to_e1(tau)
    rotated = pts @ H.T
    base = int(np.argmin(rotated[:, 0]))
    shifted = rotated - rotated[base]
    order = np.argsort(shifted[:, 0], kind="stable")
    transformed = shifted[order]
    # exhaustive postcondition check
    c = 1.0
    for k_ in range(1, n):
        x = transformed[k_]
        if x[0] <= 0.0:
            raise RuntimeError("direction search failed: nonpositive "
                               "first coordinate after transform")
        c = min(c, x[0] / np.linalg.norm(x))
    for i in range(n):
        for j in range(i + 1, n):
            dv = transformed[i] - transformed[j]
            if abs(dv[0]) <= 0.0:
                raise RuntimeError("pair separation lost after transform")
    return ProjectionResult(tau, base, order, transformed,
                            float(c) if n > 1 else 1.0, delta)
