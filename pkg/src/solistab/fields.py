"""Periodic-grid fields on a torus approximating R^d.

Functions are sampled on a uniform n^d grid of side L; Sobolev norms are
exact Fourier-multiplier sums (Parseval with the transform normalized by
h^d so norms approximate integrals), and the Helmholtz inverse divides by
(1 + |xi|^2) in frequency space.  Soliton sums, the interaction term f,
the equation residual h, and the nonlinear remainder N(rho) live here.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .groundstate import GroundState, ProblemParams, eval_Q

__all__ = [
    "GridTooSmall",
    "TorusGrid",
    "TorusField",
    "SolitonConfig",
    "norm",
    "inner_h1",
    "laplacian",
    "helmholtz_inverse",
    "odd_power",
    "sample_soliton",
    "sample_soliton_sum",
    "sample_soliton_derivative",
    "interaction_term_f",
    "residual_h",
    "gamma_residual",
    "nonlinear_remainder_N",
    "save_field",
    "load_field",
]


class GridTooSmall(ValueError):
    """Torus too small for the requested soliton configuration."""


@dataclass(frozen=True)
class TorusGrid:
    """Uniform periodic grid: d axes, side L, n points per axis."""

    d: int
    L: float
    n: int

    def __post_init__(self):
        if self.n < 64 or self.n & (self.n - 1):
            raise ValueError(f"n must be a power of two >= 64, got {self.n}")
        if self.L <= 0:
            raise ValueError("L must be positive")

    @property
    def h(self) -> float:
        return self.L / self.n

    @property
    def volume(self) -> float:
        return self.L**self.d

    def axes(self):
        """Coordinates in [-L/2, L/2) along each axis."""
        x = (np.arange(self.n) - self.n // 2) * self.h
        return [x] * self.d

    def meshgrid(self):
        return np.meshgrid(*self.axes(), indexing="ij", sparse=True)

    def freq_sq(self):
        """|2 pi k / L|^2 on the FFT layout (broadcastable sum)."""
        xi = 2.0 * math.pi * np.fft.fftfreq(self.n, d=self.h)
        total = 0.0
        for ax in range(self.d):
            shape = [1] * self.d
            shape[ax] = self.n
            total = total + (xi**2).reshape(shape)
        return total

    def check_for_solitons(self, max_center: float, strict: bool = True):
        """Side-length rule keeping periodic-image contamination < 1e-8."""
        need = 4.0 * (max_center + 20.0)
        if strict and self.L < need:
            raise GridTooSmall(
                f"L = {self.L} below {need} required for centers out to "
                f"{max_center}"
            )


@dataclass(frozen=True)
class TorusField:
    """Scalar samples on a TorusGrid; immutable value object."""

    grid: TorusGrid
    values: np.ndarray
    scalar_kind: str = "real"

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.shape != (self.grid.n,) * self.grid.d:
            raise ValueError(f"values shape {v.shape} does not match grid")
        kind = "complex" if np.iscomplexobj(v) else "real"
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "scalar_kind", kind)

    def __add__(self, other):
        return TorusField(self.grid, self.values + _vals(other))

    def __sub__(self, other):
        return TorusField(self.grid, self.values - _vals(other))

    def __mul__(self, a):
        return TorusField(self.grid, self.values * a)

    __rmul__ = __mul__

    def real_part(self):
        return TorusField(self.grid, self.values.real.copy())


def _vals(x):
    return x.values if isinstance(x, TorusField) else x


@dataclass(frozen=True)
class SolitonConfig:
    """Centers y_k and unit phases z_k of sigma = sum z_k Q(. + y_k)."""

    params: ProblemParams
    centers: np.ndarray
    phases: np.ndarray | None = None
    R: float = field(default=math.nan)

    def __post_init__(self):
        c = np.atleast_2d(np.asarray(self.centers, dtype=float))
        m = c.shape[0]
        if c.shape[1] != self.params.d:
            raise ValueError("center dimension does not match params.d")
        z = self.phases
        z = np.ones(m, dtype=complex) if z is None else np.asarray(z, complex)
        if z.shape != (m,):
            raise ValueError("phases length must match number of centers")
        if np.any(np.abs(np.abs(z) - 1.0) > 1e-12):
            raise ValueError("phases must have unit modulus")
        R = math.inf
        for i in range(m):
            for j in range(i + 1, m):
                R = min(R, float(np.linalg.norm(c[i] - c[j])))
        if m > 1 and R <= 0:
            raise ValueError("centers must be pairwise distinct")
        object.__setattr__(self, "centers", c)
        object.__setattr__(self, "phases", z)
        object.__setattr__(self, "R", R if m > 1 else math.nan)

    @property
    def m(self) -> int:
        return self.centers.shape[0]

    def is_real(self) -> bool:
        return bool(np.all(np.abs(self.phases.imag) < 1e-14)
                    and np.all(self.phases.real > 0))


def _fft(grid: TorusGrid, v: np.ndarray) -> np.ndarray:
    return np.fft.fftn(v) * grid.h**grid.d


def _ifft(grid: TorusGrid, vhat: np.ndarray, real: bool) -> np.ndarray:
    out = np.fft.ifftn(vhat) / grid.h**grid.d
    return out.real if real else out


def norm(f: TorusField, which: str = "H1") -> float:
    """Multiplier norm: sqrt( sum (1+|xi|^2)^{s} |vhat|^2 / L^d ),
    s = +1 (H1), 0 (L2), -1 (Hm1)."""
    s = {"H1": 1, "L2": 0, "Hm1": -1}[which]
    vhat = _fft(f.grid, f.values)
    mult = (1.0 + f.grid.freq_sq()) ** s if s else 1.0
    total = np.sum(mult * np.abs(vhat) ** 2) / f.grid.volume
    return float(math.sqrt(max(total, 0.0)))


def inner_h1(f: TorusField, g: TorusField) -> complex | float:
    """H1 inner product (f, g) = int grad f . grad g* + f g*."""
    fh = _fft(f.grid, f.values)
    gh = _fft(g.grid, g.values)
    total = np.sum((1.0 + f.grid.freq_sq()) * fh * np.conj(gh)) / f.grid.volume
    if f.scalar_kind == "real" and g.scalar_kind == "real":
        return float(total.real)
    return complex(total)


def laplacian(f: TorusField) -> TorusField:
    vhat = _fft(f.grid, f.values)
    out = _ifft(f.grid, -f.grid.freq_sq() * vhat, f.scalar_kind == "real")
    return TorusField(f.grid, out)


def helmholtz_inverse(f: TorusField) -> TorusField:
    """(-Laplacian + 1)^{-1} f, exact in the discrete spectral sense."""
    vhat = _fft(f.grid, f.values)
    out = _ifft(f.grid, vhat / (1.0 + f.grid.freq_sq()),
                f.scalar_kind == "real")
    return TorusField(f.grid, out)


def odd_power(u: np.ndarray, p: float) -> np.ndarray:
    """|u|^{p-1} u, the odd extension of u^p (complex-safe)."""
    return np.abs(u) ** (p - 1.0) * u


def _min_image_radius(grid: TorusGrid, center: np.ndarray):
    """Torus-minimal distance |x - center| on the full grid."""
    total = 0.0
    for ax, x in enumerate(grid.meshgrid()):
        dx = x - center[ax]
        dx = dx - grid.L * np.round(dx / grid.L)
        total = total + dx**2
    return np.sqrt(total)


def sample_soliton(gs: GroundState, center: np.ndarray,
                   grid: TorusGrid) -> TorusField:
    """Q(. + y) sampled on the grid; the peak sits at x = -y."""
    r = _min_image_radius(grid, -np.asarray(center, dtype=float))
    q, _ = eval_Q(gs, r.ravel())
    return TorusField(grid, q.reshape(r.shape))


def sample_soliton_derivative(gs: GroundState, center: np.ndarray, j: int,
                              grid: TorusGrid) -> TorusField:
    """partial_j Q(. + y): radial derivative times the unit j-component."""
    center = np.asarray(center, dtype=float)
    total = 0.0
    dxj = None
    for ax, x in enumerate(grid.meshgrid()):
        dx = x - (-center[ax])
        dx = dx - grid.L * np.round(dx / grid.L)
        total = total + dx**2
        if ax == j:
            dxj = dx
    r = np.sqrt(total)
    dxj = np.broadcast_to(dxj, r.shape)
    _, dq = eval_Q(gs, r.ravel())
    rr = np.maximum(r.ravel(), 1e-30)
    vals = dq * (dxj.ravel() / rr)
    return TorusField(grid, vals.reshape(r.shape))


def sample_soliton_sum(gs: GroundState, cfg: SolitonConfig, grid: TorusGrid,
                       strict: bool = True, parts: bool = False):
    """sigma = sum z_k Q(. + y_k); optionally also the individual Q_k."""
    max_center = float(np.max(np.linalg.norm(cfg.centers, axis=1)))
    grid.check_for_solitons(max_center, strict=strict)
    pieces = [sample_soliton(gs, y, grid) for y in cfg.centers]
    real = cfg.is_real()
    acc = 0.0
    out_parts = []
    for z, piece in zip(cfg.phases, pieces):
        term = piece.values * (z.real if real else z)
        acc = acc + term
        if parts:
            out_parts.append(TorusField(grid, term))
    sigma = TorusField(grid, acc)
    return (sigma, out_parts) if parts else sigma


def interaction_term_f(gs: GroundState, cfg: SolitonConfig, grid: TorusGrid,
                       strict: bool = True) -> TorusField:
    """f = (sum Q_i)^p - sum Q_i^p (real phases); zero when m = 1."""
    if not cfg.is_real():
        raise ValueError("interaction term f is defined for real phases")
    p = cfg.params.p
    sigma, parts = sample_soliton_sum(gs, cfg, grid, strict=strict, parts=True)
    out = sigma.values**p
    for piece in parts:
        out = out - piece.values**p
    if cfg.m == 1:
        out = np.zeros_like(out)
    return TorusField(grid, out)


def residual_h(u: TorusField, params: ProblemParams) -> TorusField:
    """h = -Laplacian u + u - |u|^{p-1} u."""
    lap = laplacian(u)
    vals = -lap.values + u.values - odd_power(u.values, params.p)
    return TorusField(u.grid, vals)


def gamma_residual(u: TorusField, params: ProblemParams) -> float:
    """Gamma(u) = the H^{-1} norm of the equation residual h."""
    return norm(residual_h(u, params), "Hm1")


def nonlinear_remainder_N(sigma: TorusField, rho: TorusField,
                          params: ProblemParams) -> TorusField:
    """N(rho) = |sigma+rho|^{p-1}(sigma+rho) - sigma^p - p sigma^{p-1} rho."""
    p = params.p
    s = sigma.values
    vals = odd_power(s + rho.values, p) - odd_power(s, p) \
        - p * np.abs(s) ** (p - 1.0) * rho.values
    return TorusField(sigma.grid, vals)


_SNAPSHOT_VERSION = 1


def save_field(f: TorusField, path: str):
    """Flat little-endian doubles plus a JSON sidecar (path + '.json')."""
    v = f.values
    dtype = "<c16" if f.scalar_kind == "complex" else "<f8"
    v.astype(dtype).ravel().tofile(path)
    sidecar = {
        "format": "solistab.field",
        "version": _SNAPSHOT_VERSION,
        "d": f.grid.d,
        "n": f.grid.n,
        "L": f.grid.L,
        "scalar_kind": f.scalar_kind,
    }
    with open(path + ".json", "w") as fh:
        json.dump(sidecar, fh)


def load_field(path: str) -> TorusField:
    with open(path + ".json") as fh:
        sidecar = json.load(fh)
    if sidecar.get("format") != "solistab.field":
        raise ValueError("not a field snapshot")
    grid = TorusGrid(sidecar["d"], sidecar["L"], sidecar["n"])
    dtype = "<c16" if sidecar["scalar_kind"] == "complex" else "<f8"
    v = np.fromfile(path, dtype=dtype).reshape((grid.n,) * grid.d)
    return TorusField(grid, v)
