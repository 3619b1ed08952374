"""Command-line front door.

Each subcommand wraps one module, persists its results as JSON/CSV, and
writes a manifest (full configuration, package version, wall time) next
to the outputs so reruns are reproducible.  Exit codes: 0 success/PASS,
1 verification FAIL, 2 usage error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time

import numpy as np

from . import __version__
from .groundstate import (
    GroundState,
    ProblemParams,
    ode_residual,
    radial_integral,
    solve_ground_state,
)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3


def _fmt(x):
    """Full round-trip float formatting."""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _parse_range(text: str) -> list[float]:
    """a:b:step inclusive sweep, or a single value, or comma list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"range must be a:b:step, got {text!r}")
        a, b, step = (float(t) for t in parts)
        if step <= 0:
            raise ValueError("range step must be positive")
        n = int(math.floor((b - a) / step + 1e-9)) + 1
        return [a + k * step for k in range(n)]
    if "," in text:
        return [float(t) for t in text.split(",")]
    return [float(text)]


def _parse_points(text: str) -> np.ndarray:
    """Semicolon-separated points with comma-separated coordinates."""
    pts = [[float(c) for c in chunk.split(",")]
           for chunk in text.split(";") if chunk.strip()]
    return np.asarray(pts, dtype=float)


def _write_manifest(out_path: str, config: dict, outputs: list[str],
                    started: float):
    config = {k: v for k, v in config.items() if not callable(v)}
    manifest = {
        "tool": "solistab",
        "version": __version__,
        "config": config,
        "outputs": outputs,
        "wall_time_s": time.time() - started,
    }
    path = out_path + ".manifest.json"
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True, default=str)


def _write_csv(path: str, header: list[str], rows: list[list]):
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")


def _cached_gs(d: int, p: float, tol: float, cache_dir: str | None):
    if cache_dir:
        os.makedirs(cache_dir, exist_ok=True)
        key = f"gs_d{d}_p{_fmt(p)}_tol{_fmt(tol)}.json"
        path = os.path.join(cache_dir, key)
        if os.path.exists(path):
            with open(path) as fh:
                return GroundState.from_json(fh.read())
    gs = solve_ground_state(ProblemParams(d, p), tol)
    if cache_dir:
        with open(path, "w") as fh:
            fh.write(gs.to_json())
    return gs


# ---------------------------------------------------------------- commands


def _cmd_ground_state(args) -> int:
    t0 = time.time()
    gs = _cached_gs(args.d, args.p, args.tol, args.cache)
    resid = gs.ode_residual
    if math.isnan(resid):
        resid = ode_residual(gs)
    # Pohozaev-type energy balance of the profile
    d, p = gs.params.d, gs.params.p
    grad2 = radial_integral(gs, gs.dq**2)
    mass2 = radial_integral(gs, gs.q**2)
    pot = radial_integral(gs, gs.q ** (p + 1))
    pohozaev = abs(grad2 + mass2 - pot) / pot
    doc = {
        "d": d,
        "p": p,
        "q0": gs.q0,
        "c_Q": gs.c_Q,
        "r_max": gs.r_max,
        "ode_residual": resid,
        "pohozaev_error": pohozaev,
        "tol": gs.tol,
    }
    with open(args.out, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
    _write_manifest(args.out, vars(args) | {"cmd": "ground-state"},
                    [args.out], t0)
    return EXIT_OK


def _cmd_special_fn(args) -> int:
    from .special_functions import StabilityModulus, select_branch

    t0 = time.time()
    logs = _parse_range(args.log10s)
    s = [10.0**x for x in logs]
    if args.branches:
        # one representative (d, p) per regime of the modulus
        reps = [(1, 3.0), (1, 2.0), (2, 2.0), (3, 2.0), (1, 1.5)]
        header = ["s"] + [select_branch(d, p) for d, p in reps]
        rows = []
        for sv in s:
            row = [sv] + [StabilityModulus(d, p)(sv) for d, p in reps]
            rows.append(row)
    else:
        mod = StabilityModulus(args.d, args.p)
        header = ["s", "F", "branch"]
        rows = [[sv, mod(sv), mod.branch] for sv in s]
    _write_csv(args.out, header, rows)
    _write_manifest(args.out, vars(args) | {"cmd": "special-fn"},
                    [args.out], t0)
    return EXIT_OK


def _cmd_interaction_scan(args) -> int:
    from .interactions import expected_law, sweep_integral

    t0 = time.time()
    gs = _cached_gs(args.d, args.p, args.tol, args.cache)
    R = np.asarray(_parse_range(args.R))
    y = sweep_integral(gs, args.kind, R, args.alpha, args.beta)
    rate, power = expected_law(args.kind, args.d, args.p,
                               args.alpha, args.beta)
    # intercept from the last point (most asymptotic)
    c0 = y[-1] - (rate * R[-1] + power * math.log(R[-1]))
    pred = rate * R + power * np.log(R) + c0
    rows = [[float(R[i]), float(y[i]), float(pred[i]), float(y[i] - pred[i])]
            for i in range(len(R))]
    _write_csv(args.out, ["R", "log_integral", "predicted_log", "residual"],
               rows)
    summary = None
    if args.fit:
        from .interactions import verify_interaction_law
        rep = verify_interaction_law(gs, args.kind, args.alpha, args.beta)
        summary = {
            "kind": rep["kind"],
            "rate": rep["rate"],
            "power": rep["power"],
            "expected_rate": rep["expected_rate"],
            "expected_power": rep["expected_power"],
            "rate_rel_err": rep["rate_rel_err"],
            "power_abs_err": rep["power_abs_err"],
        }
        with open(args.out + ".fit.json", "w") as fh:
            json.dump(summary, fh, indent=2, sort_keys=True)
    outputs = [args.out] + ([args.out + ".fit.json"] if summary else [])
    _write_manifest(args.out, vars(args) | {"cmd": "interaction-scan"},
                    outputs, t0)
    return EXIT_OK


def _make_grid(d: int, n: int | None, L: float | None, R_max: float):
    from .fields import TorusGrid

    if n is None:
        n = 2**14 if d == 1 else (1024 if d == 2 else 256)
    if L is None:
        L = max(160.0 if d == 1 else 100.0, 4.0 * (R_max / 2.0 + 20.0))
    return TorusGrid(d, L, n)


def _cmd_sharp_example(args) -> int:
    from .construction import build_sharp_example, positivize
    from .fields import SolitonConfig, save_field

    t0 = time.time()
    gs = _cached_gs(args.d, args.p, args.tol, args.cache)
    R_values = _parse_range(args.R)
    grid = _make_grid(args.d, args.n, args.L, max(R_values))
    reports = []
    outputs = []
    for R in R_values:
        centers = np.zeros((args.m, args.d))
        for k in range(args.m):
            centers[k, 0] = (k - (args.m - 1) / 2.0) * R
        cfg = SolitonConfig(gs.params, centers)
        u, rho, rep = build_sharp_example(gs, cfg, grid, tol=args.ftol)
        _, pos = positivize(u)
        rep = dict(rep)
        rep["u_minus_H1"] = pos["u_minus_H1"]
        reports.append(rep)
        if args.save_fields:
            base = f"{os.path.splitext(args.out)[0]}_R{_fmt(R)}"
            save_field(u, base + "_u.bin")
            save_field(rho, base + "_rho.bin")
            outputs += [base + "_u.bin", base + "_rho.bin"]
    with open(args.out, "w") as fh:
        json.dump(reports, fh, indent=2, sort_keys=True)
    _write_manifest(args.out, vars(args) | {"cmd": "sharp-example"},
                    [args.out] + outputs, t0)
    return EXIT_OK


def _cmd_decompose(args) -> int:
    from .decomposition import fit_modulation
    from .fields import SolitonConfig, load_field

    t0 = time.time()
    gs = _cached_gs(args.d, args.p, args.tol, args.cache)
    u = load_field(args.field)
    centers = _parse_points(args.centers)
    cfg = SolitonConfig(gs.params, centers)
    res = fit_modulation(gs, u, cfg, tol=args.ftol,
                         unit_modulus=args.unit_modulus)
    with open(args.out, "w") as fh:
        json.dump(res.to_summary(), fh, indent=2, sort_keys=True)
    _write_manifest(args.out, vars(args) | {"cmd": "decompose"},
                    [args.out], t0)
    return EXIT_OK


def _cmd_verify(args) -> int:
    from .fields import SolitonConfig
    from .verifier import (
        run_sharp_sweep,
        verify_complex,
        verify_intermediate_inequalities,
        verify_lower_bounds,
        verify_upper_bound,
    )

    t0 = time.time()
    gs = _cached_gs(args.d, args.p, args.tol, args.cache)
    R_values = _parse_range(args.R)
    grid = _make_grid(args.d, args.n, args.L, max(R_values))
    if args.case == "sharp":
        records = run_sharp_sweep(gs, args.m, R_values, grid=grid)
        checks = [
            verify_upper_bound(records, bracket=args.bracket),
            verify_lower_bounds(records, bracket=args.bracket),
            verify_intermediate_inequalities(records),
        ]
        header = list(records[0].row().keys())
        rows = [list(r.row().values()) for r in records]
        csv_path = os.path.splitext(args.out)[0] + ".csv"
        _write_csv(csv_path, header, rows)
        identity_ok = all(r.h_identity_error <= 1e-10 for r in records)
        ok = all(c["pass"] for c in checks) and identity_ok
        doc = {
            "case": "sharp",
            "pass": bool(ok),
            "identity_ok": bool(identity_ok),
            "checks": checks,
            "csv": csv_path,
        }
        outputs = [args.out, csv_path]
    elif args.case == "complex":
        R = max(R_values)
        centers = np.zeros((args.m, args.d))
        for k in range(args.m):
            centers[k, 0] = (k - (args.m - 1) / 2.0) * R
        cfg = SolitonConfig(gs.params, centers)
        rep = verify_complex(gs, cfg, grid, strict_phase=args.strict_phase)
        doc = {"case": "complex", "pass": rep["pass"], "report": rep}
        ok = rep["pass"]
        outputs = [args.out]
    else:
        raise ValueError(f"unknown case {args.case!r}")
    with open(args.out, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True, default=float)
    _write_manifest(args.out, vars(args) | {"cmd": "verify"}, outputs, t0)
    return EXIT_OK if ok else EXIT_FAIL


def _cmd_project_points(args) -> int:
    from .geometry import project_points

    t0 = time.time()
    pts = _parse_points(args.points)
    res = project_points(pts, args.delta)
    doc = {
        "direction": res.direction.tolist(),
        "base_index": res.base_index,
        "order": res.order.tolist(),
        "transformed": res.transformed.tolist(),
        "c_achieved": res.c_achieved,
        "delta_pairs": res.delta_pairs,
    }
    with open(args.out, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
    _write_manifest(args.out, vars(args) | {"cmd": "project-points"},
                    [args.out], t0)
    return EXIT_OK


def _cmd_spectrum(args) -> int:
    from .spectral import sector_spectrum, spectral_gap

    t0 = time.time()
    gs = _cached_gs(args.d, args.p, args.tol, args.cache)
    outputs = [args.out]
    if args.ell is not None:
        rep = sector_spectrum(gs, args.ell, n_eigs=args.n_eigs, n=args.n)
        doc = {
            "sector": rep.sector,
            "eigenvalues": rep.eigenvalues.tolist(),
            "boundary_mass": rep.boundary_mass,
        }
        csv_path = os.path.splitext(args.out)[0] + "_vectors.csv"
        header = ["r"] + [f"phi_{k}" for k in range(rep.eigenvectors.shape[1])]
        rows = [[float(rep.r[i])] + [float(x) for x in rep.eigenvectors[i]]
                for i in range(rep.r.size)]
        _write_csv(csv_path, header, rows)
        outputs.append(csv_path)
    else:
        gap = spectral_gap(gs, n=args.n)
        doc = {
            "kappa": gap["kappa"],
            "sectors": {
                str(ell): rep.eigenvalues.tolist()
                for ell, rep in gap["reports"].items()
            },
        }
    with open(args.out, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
    _write_manifest(args.out, vars(args) | {"cmd": "spectrum"}, outputs, t0)
    return EXIT_OK


# ---------------------------------------------------------------- parser


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="solistab",
        description="Numerical laboratory for quantitative stability of "
                    "multi-soliton sums",
    )
    ap.add_argument("--cache", default=None,
                    help="ground-state cache directory")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def common(p_, tol=1e-10):
        p_.add_argument("--d", type=int, required=True)
        p_.add_argument("--p", type=float, required=True)
        p_.add_argument("--tol", type=float, default=tol,
                        help="ground-state solver tolerance")
        p_.add_argument("--out", required=True)

    p_ = sub.add_parser("ground-state", help="solve the radial profile")
    common(p_)
    p_.set_defaults(fn=_cmd_ground_state)

    p_ = sub.add_parser("special-fn", help="tabulate the stability modulus")
    p_.add_argument("--d", type=int, default=1)
    p_.add_argument("--p", type=float, default=3.0)
    p_.add_argument("--log10s", default="-12:-1:0.25",
                    help="log10 s sweep a:b:step")
    p_.add_argument("--branches", action="store_true",
                    help="tabulate all five regimes side by side")
    p_.add_argument("--out", required=True)
    p_.set_defaults(fn=_cmd_special_fn)

    p_ = sub.add_parser("interaction-scan", help="R-sweep of an integral")
    common(p_)
    p_.add_argument("--kind", required=True,
                    choices=["overlap", "square-square", "subquadratic"])
    p_.add_argument("--R", required=True, help="sweep a:b:step")
    p_.add_argument("--alpha", type=float, default=None)
    p_.add_argument("--beta", type=float, default=None)
    p_.add_argument("--fit", action="store_true",
                    help="also run the asymptotic-law fit")
    p_.set_defaults(fn=_cmd_interaction_scan)

    p_ = sub.add_parser("sharp-example", help="build extremal states")
    common(p_)
    p_.add_argument("--m", type=int, default=2)
    p_.add_argument("--R", required=True, help="sweep a:b:step")
    p_.add_argument("--n", type=int, default=None)
    p_.add_argument("--L", type=float, default=None)
    p_.add_argument("--ftol", type=float, default=1e-10)
    p_.add_argument("--save-fields", action="store_true")
    p_.set_defaults(fn=_cmd_sharp_example)

    p_ = sub.add_parser("decompose", help="modulation fit of a field")
    common(p_)
    p_.add_argument("--field", required=True, help="field snapshot path")
    p_.add_argument("--centers", required=True,
                    help="initial centers 'x1,y1;x2,y2;...'")
    p_.add_argument("--ftol", type=float, default=1e-10)
    p_.add_argument("--unit-modulus", action="store_true")
    p_.set_defaults(fn=_cmd_decompose)

    p_ = sub.add_parser("verify", help="sharpness sweeps")
    common(p_)
    p_.add_argument("--case", default="sharp", choices=["sharp", "complex"])
    p_.add_argument("--m", type=int, default=2)
    p_.add_argument("--R", required=True, help="sweep a:b:step")
    p_.add_argument("--n", type=int, default=None)
    p_.add_argument("--L", type=float, default=None)
    p_.add_argument("--bracket", type=float, default=5.0)
    p_.add_argument("--strict-phase", action="store_true")
    p_.set_defaults(fn=_cmd_verify)

    p_ = sub.add_parser("project-points", help="align points positively")
    p_.add_argument("--points", required=True,
                    help="points 'x1,y1;x2,y2;...'")
    p_.add_argument("--delta", type=float, default=0.5)
    p_.add_argument("--out", required=True)
    p_.set_defaults(fn=_cmd_project_points)

    p_ = sub.add_parser("spectrum", help="sector eigenvalues and the gap")
    common(p_)
    p_.add_argument("--ell", type=int, default=None,
                    help="single sector; omit for the gap scan")
    p_.add_argument("--n", type=int, default=8192)
    p_.add_argument("--n-eigs", type=int, default=4)
    p_.set_defaults(fn=_cmd_spectrum)

    return ap


def run(argv=None) -> int:
    ap = _build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0,) else 0
    try:
        return args.fn(args)
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RuntimeError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
