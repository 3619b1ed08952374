"""Two-center interaction integrals and their asymptotic laws.

Integrals of the form  int g(|x|) k(|x + R e1|) dx  reduce, by rotational
symmetry about the separation axis, to a 2D integral over (r, theta) with
t = sqrt(r^2 + R^2 + 2 R r cos(theta)) the distance to the second center.
All quadrature runs in log space (weighted log-sum-exp), so results stay
accurate far past the underflow of e^{-2R} in direct space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ive, logsumexp

from .groundstate import GroundState, eval_logQ, sphere_area

__all__ = [
    "QuadratureFail",
    "AsymptoticFit",
    "fit_asymptotic",
    "reduced_integral",
    "overlap_integral",
    "square_square_integral",
    "subquadratic_cross_norm",
    "gradient_overlap",
    "c_bar",
    "check_sum_power_inequalities",
]


class QuadratureFail(RuntimeError):
    """Quadrature produced a non-finite or empty result."""


def _gauss_nodes(edges: np.ndarray, order: int = 16):
    """Composite Gauss-Legendre nodes/weights on consecutive panels."""
    x, w = np.polynomial.legendre.leggauss(order)
    a = edges[:-1][:, None]
    b = edges[1:][:, None]
    nodes = 0.5 * (a + b) + 0.5 * (b - a) * x[None, :]
    weights = 0.5 * (b - a) * w[None, :]
    return nodes.ravel(), weights.ravel()


# theta measured from the +e1 axis; the integrand peaks at theta = pi
# (towards the second center), so panels refine geometrically there
_THETA_OFFSETS = np.array(
    [0.0, 2.5e-4, 1e-3, 4e-3, 1.6e-2, 6.4e-2, 0.256, 1.024, math.pi]
)


def reduced_integral(d: int, R: float, log_integrand, r_cut: float | None = None,
                     order: int = 16):
    """log | int g dx | and its sign for a two-center integrand.

    log_integrand(r, t, cos_theta) -> (log magnitude, sign), vectorized;
    r = |x|, t = |x + R e1|, cos_theta = x^1/|x|.  For d = 1 the integral
    is taken directly on the line.
    """
    if R <= 0:
        raise ValueError("separation R must be positive")
    if r_cut is None:
        r_cut = R + 50.0

    if d == 1:
        edges = np.unique(np.concatenate(
            [np.arange(-R - 50.0, 50.0 + 0.25, 0.5), [-R, 0.0]]
        ))
        x, w = _gauss_nodes(edges, order)
        r = np.abs(x)
        t = np.abs(x + R)
        ct = np.where(r > 0, np.sign(x), 1.0)
        lm, sg = log_integrand(r, t, ct)
        out = logsumexp(lm + np.log(w), b=sg, return_sign=True)
    else:
        r_edges = np.arange(0.0, r_cut + 0.25, 0.5)
        r, wr = _gauss_nodes(r_edges, order)
        th, wt = _gauss_nodes(math.pi - _THETA_OFFSETS[::-1], order)
        ct = np.cos(th)
        rr = r[:, None]
        tt = np.sqrt(np.maximum(rr**2 + R**2 + 2.0 * R * rr * ct[None, :], 0.0))
        lm, sg = log_integrand(rr + 0.0 * tt, tt, ct[None, :] + 0.0 * tt)
        logw = (
            (d - 1) * np.log(np.maximum(rr, 1e-300))
            + (d - 2) * np.log(np.maximum(np.sin(th)[None, :], 1e-300))
            + np.log(wr)[:, None]
            + np.log(wt)[None, :]
        )
        out = logsumexp((lm + logw).ravel(), b=sg.ravel(), return_sign=True)
        out = (out[0] + math.log(sphere_area(d - 1)), out[1])
    logmag, sign = float(out[0]), float(out[1])
    if not math.isfinite(logmag) and logmag != -math.inf:
        raise QuadratureFail("non-finite quadrature result")
    return logmag, sign


def overlap_integral(gs: GroundState, alpha: float, beta: float,
                     R: float) -> float:
    """log of int Q^alpha(x) Q^beta(x + R e1) dx."""
    if alpha <= 0 or beta <= 0:
        raise ValueError("exponents must be positive")

    def integrand(r, t, ct):
        Lr, _ = eval_logQ(gs, r)
        Lt, _ = eval_logQ(gs, t)
        lm = alpha * Lr + beta * Lt
        return lm, np.ones_like(lm)

    logmag, _ = reduced_integral(gs.params.d, R, integrand)
    return logmag


def square_square_integral(gs: GroundState, R: float) -> float:
    """log of int Q^2(x) Q^2(x + R e1) dx."""
    return overlap_integral(gs, 2.0, 2.0, R)


def _log_cross_term(p: float, La, Lb):
    """log |(a+b)^p - a^p - b^p| and sign, from log a >= log b.

    Written via expm1/log1p so the cancellation for b << a is exact.
    """
    delta = Lb - La
    u = np.exp(np.maximum(delta, -700.0))
    m = np.expm1(p * np.log1p(u)) - u**p
    # for b/a below e^{-300}, p a^{p-1} b dominates b^p (since p > 1)
    tiny = delta < -300.0
    logm = np.where(
        tiny,
        math.log(p) + delta,
        np.log(np.maximum(np.abs(m), 1e-300)),
    )
    sign = np.where(tiny, 1.0, np.sign(m))
    return p * La + logm, sign


def subquadratic_cross_norm(gs: GroundState, R: float) -> float:
    """log of int |(Q1+Q2)^p - Q1^p - Q2^p|^2 dx for the two-soliton pair.

    This is the squared L^2 norm of the interaction term f; the
    asymptotic law has rate -p and power (1-2p)(d-1)/2 ... fitted on the log value
    the norm itself carries rate -p/2.
    """
    p = gs.params.p

    def integrand(r, t, ct):
        Lr, _ = eval_logQ(gs, r)
        Lt, _ = eval_logQ(gs, t)
        La = np.maximum(Lr, Lt)
        Lb = np.minimum(Lr, Lt)
        lf, _ = _log_cross_term(p, La, Lb)
        return 2.0 * lf, np.ones_like(lf)

    logmag, _ = reduced_integral(gs.params.d, R, integrand)
    return logmag


def gradient_overlap(gs: GroundState, R: float):
    """(log magnitude, sign) of e1 . int Q^{p-1}(x) grad Q(x) Q(x+R e1) dx."""
    p = gs.params.p

    def integrand(r, t, ct):
        Lr, Mr = eval_logQ(gs, r)
        Lt, _ = eval_logQ(gs, t)
        lm = (p - 1.0) * Lr + Lr + np.log(np.maximum(np.abs(Mr), 1e-300)) \
            + Lt + np.log(np.maximum(np.abs(ct), 1e-300))
        sign = np.sign(Mr) * np.sign(ct)
        return lm, sign

    return reduced_integral(gs.params.d, R, integrand)


def c_bar(gs: GroundState) -> float:
    """(c_Q/p) int e^{-x^1} Q^p dx, the gradient-overlap prefactor.

    The angular integral of e^{-r cos theta} over the unit sphere is
    (2 pi)^{d/2} r^{1-d/2} I_{d/2-1}(r), leaving a 1D radial integral.
    """
    d, p = gs.params.d, gs.params.p
    r_cut = 40.0 + 80.0 / (p - 1.0)
    r, w = _gauss_nodes(np.arange(0.0, r_cut + 1.0, 1.0), 20)
    keep = r > 0
    r, w = r[keep], w[keep]
    L, _ = eval_logQ(gs, r)
    nu = d / 2.0 - 1.0
    # ive is e^{-r} I_nu(r); assemble everything in log space
    log_ang = (d / 2.0) * math.log(2.0 * math.pi) + (1.0 - d / 2.0) * np.log(r) \
        + np.log(ive(nu, r)) + r
    total = logsumexp(p * L + log_ang + (d - 1) * np.log(r) + np.log(w))
    return gs.c_Q / p * math.exp(total)


@dataclass
class AsymptoticFit:
    """Least-squares fit of log I = rate*R + power*ln R + c (+ lnln term)."""

    R_values: np.ndarray
    I_values: np.ndarray
    rate: float = 0.0
    power: float = 0.0
    log_prefactor: float = 0.0
    loglog_coeff: float = 0.0
    rms_residual: float = 0.0
    model: str = "plain"
    reliable: bool = True
    residuals: np.ndarray = field(default=None, repr=False)


def fit_asymptotic(R_values, log_I, with_loglog: bool = False) -> AsymptoticFit:
    """Fit the asymptotic law of a log-integral sweep."""
    R = np.asarray(R_values, dtype=float)
    y = np.asarray(log_I, dtype=float)
    if R.size < 6 or np.any(np.diff(R) <= 0):
        raise ValueError("need at least 6 strictly increasing R values")
    cols = [R, np.log(R), np.ones_like(R)]
    if with_loglog:
        cols.append(np.log(np.log(R)))
    A = np.column_stack(cols)
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    res = y - A @ coef
    rms = float(np.sqrt(np.mean(res**2)))
    return AsymptoticFit(
        R_values=R,
        I_values=y,
        rate=float(coef[0]),
        power=float(coef[1]),
        log_prefactor=float(coef[2]),
        loglog_coeff=float(coef[3]) if with_loglog else 0.0,
        rms_residual=rms,
        model="loglog" if with_loglog else "plain",
        reliable=rms <= 0.05,
        residuals=res,
    )


def constrained_rate_fit(R_values, log_I, power: float) -> float:
    """Exponential rate with the polynomial power held at its known value.

    On moderate windows the ln R column is numerically indistinguishable
    from inverse-power corrections, so rate and power are verified one at
    a time, each with the other pinned.
    """
    R = np.asarray(R_values, dtype=float)
    y = np.asarray(log_I, dtype=float) - power * np.log(R)
    A = np.column_stack([R, np.ones_like(R), R**-0.5, 1.0 / R])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    return float(coef[0])


def constrained_power_fit(R_values, log_I, rate: float,
                          corrections=("inv",)) -> float:
    """Polynomial power with the exponential rate held at its known value.

    corrections: subset of {"half", "inv", "loglog"} naming the allowed
    subleading columns (R^{-1/2}, R^{-1}, ln ln R).
    """
    R = np.asarray(R_values, dtype=float)
    y = np.asarray(log_I, dtype=float) - rate * R
    cols = [np.log(R), np.ones_like(R)]
    if "half" in corrections:
        cols.append(R**-0.5)
    if "inv" in corrections:
        cols.append(1.0 / R)
    if "loglog" in corrections:
        cols.append(np.log(np.log(R)))
    A = np.column_stack(cols)
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    return float(coef[0])


# expected asymptotic laws and the fit policy per integral kind; the
# resonant cases carry strong subleading terms, so their power is read
# off a larger-R window with the rate pinned
_LAW_TABLE = {
    "overlap": {"free_fit": True},
    "square-square": {
        "free_fit_d1": True,
        "power_corrections": {2: ("half", "inv"), 3: ("loglog", "inv")},
    },
    "subquadratic": {"power_corrections": {1: ("inv",), 2: ()}},
}


def expected_law(kind: str, d: int, p: float, alpha: float | None = None,
                 beta: float | None = None):
    """(rate, power) predicted for the given integral kind."""
    if kind == "overlap":
        return -beta, -beta * (d - 1) / 2.0
    if kind == "square-square":
        power = {1: 1.0, 2: -0.5, 3: -2.0}[d]
        return -2.0, power
    if kind == "subquadratic":
        return -p, (0.5 - p) * (d - 1)
    raise ValueError(f"unknown integral kind {kind!r}")


def sweep_integral(gs: GroundState, kind: str, R_values,
                   alpha: float | None = None, beta: float | None = None):
    """log-integral values over an R sweep for the named kind."""
    out = []
    for R in np.asarray(R_values, dtype=float):
        if kind == "overlap":
            out.append(overlap_integral(gs, alpha, beta, R))
        elif kind == "square-square":
            out.append(square_square_integral(gs, R))
        elif kind == "subquadratic":
            out.append(subquadratic_cross_norm(gs, R))
        else:
            raise ValueError(f"unknown integral kind {kind!r}")
    return np.asarray(out)


def verify_interaction_law(gs: GroundState, kind: str,
                           alpha: float | None = None,
                           beta: float | None = None,
                           R_rate=None, R_power=None) -> dict:
    """Fit rate and power of an interaction law and compare to the prediction.

    Rate comes from the R in [10, 24] window; for the resonant kinds the
    power uses [24, 60] with the rate pinned (the subleading series is
    too strong below R ~ 24 to separate ln R there).
    """
    d, p = gs.params.d, gs.params.p
    rate_th, power_th = expected_law(kind, d, p, alpha, beta)
    R_rate = np.arange(10.0, 24.5, 1.0) if R_rate is None else np.asarray(R_rate)
    y_rate = sweep_integral(gs, kind, R_rate, alpha, beta)

    free = kind == "overlap" or d == 1
    if free:
        R = R_rate
        y = y_rate
        cols = [R, np.log(R), np.ones_like(R), 1.0 / R]
        if kind == "square-square":
            cols.append(1.0 / R**2)
        coef, *_ = np.linalg.lstsq(np.column_stack(cols), y, rcond=None)
        rate_est, power_est = float(coef[0]), float(coef[1])
        R_power = R
        y_power = y
    else:
        rate_est = constrained_rate_fit(R_rate, y_rate, power_th)
        R_power = np.arange(24.0, 62.0, 4.0) if R_power is None \
            else np.asarray(R_power)
        y_power = sweep_integral(gs, kind, R_power, alpha, beta)
        corr = _LAW_TABLE[kind]["power_corrections"][d]
        power_est = constrained_power_fit(R_power, y_power, rate_th, corr)

    return {
        "kind": kind,
        "d": d,
        "p": p,
        "rate": rate_est,
        "power": power_est,
        "expected_rate": rate_th,
        "expected_power": power_th,
        "rate_rel_err": abs((rate_est - rate_th) / rate_th),
        "power_abs_err": abs(power_est - power_th),
        "R_rate": R_rate,
        "log_I_rate": y_rate,
        "R_power": R_power,
        "log_I_power": y_power,
    }


def check_sum_power_inequalities(p: float, a) -> dict:
    """Both sides of the sum-power inequality for nonnegative a_k.

    The bounded combination branches on p: for 1 < p <= 2 the remainder
    is |(sum a)^p - sum a^p| against pairwise cross terms; for p > 2 the
    first-order cross terms are subtracted first.
    """
    a = np.asarray(a, dtype=float)
    if np.any(a < 0):
        raise ValueError("a_k must be nonnegative")
    m = a.size
    S = a.sum()
    lead = S**p - np.sum(a**p)
    pairs = [(i, j) for i in range(m) for j in range(m) if i != j]
    if p <= 2:
        lhs = abs(lead)
        rhs = sum((a[i] + a[j]) ** p - a[i] ** p - a[j] ** p for i, j in pairs)
        branch = "p<=2"
    else:
        cross = sum(a[i] ** (p - 1) * a[j] for i, j in pairs)
        lhs = abs(lead - p * cross)
        rhs = sum(a[i] ** (p / 2) * a[j] ** (p / 2) for i, j in pairs)
        if p <= 3:
            rhs += sum(
                a[i] ** ((p - 1) / 2) * a[j] ** ((p - 1) / 2) * a[k]
                for i in range(m) for j in range(m) for k in range(m)
                if i != j and j != k and i != k
            )
            branch = "2<p<=3"
        else:
            rhs += sum(
                a[i] ** (p - 2) * a[j] * a[k]
                for i in range(m) for j in range(m) for k in range(m)
                if i != j and i != k
            )
            branch = "p>3"
    ratio = 0.0 if lhs == 0 else (math.inf if rhs == 0 else lhs / rhs)
    return {"lhs": float(lhs), "rhs": float(rhs), "ratio": float(ratio),
            "branch": branch}
