"""Command-line entry point for reproducible runs.

Exit codes: 1 malformed input file, 2 solver precondition violated,
3 numerical failure.  Every summary JSON carries the grid parameters and
tolerances actually used.
"""
from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import estimates, io_utils
from .circle import BoundaryField
from .douady_earle import QuadratureSpec, l0_dbar, l0_eval
from .envelope import PolarGrid, envelopes, earthquake_eval, width
from .hl import (DERIV2_RADIUS, VALUE_RADIUS, divergence_check, hl_eval,
                 hl_field_poincare, shape_eigenvalues)
from .minkowski import klein_to_poincare
from .surface import SurfaceEvaluator, solve_mean_surface

EXIT_BAD_INPUT = 1
EXIT_PRECONDITION = 2
EXIT_NUMERICAL = 3


def _parse_samples(spec: str, seed: int):
    """Sample spec -> Klein points: 'disk:N[:rmax]', 'ring:r:N' or 'grid:nr:nt'."""
    parts = spec.split(":")
    kind = parts[0]
    if kind == "disk":
        n = int(parts[1])
        rmax = float(parts[2]) if len(parts) > 2 else 0.9
        rng = np.random.default_rng(seed)
        r = rmax * np.sqrt(rng.uniform(0.0, 1.0, n))
        t = rng.uniform(0.0, 2.0 * np.pi, n)
        return np.stack([r * np.cos(t), r * np.sin(t)], axis=-1)
    if kind == "ring":
        r = float(parts[1])
        n = int(parts[2])
        t = 2.0 * np.pi * np.arange(n) / n
        return np.stack([r * np.cos(t), r * np.sin(t)], axis=-1)
    if kind == "grid":
        nr, nt = int(parts[1]), int(parts[2])
        rs = np.arange(1, nr + 1) / (nr + 1) * 0.9
        ts = 2.0 * np.pi * np.arange(nt) / nt
        pts = [(r * np.cos(t), r * np.sin(t)) for r in rs for t in ts]
        return np.asarray(pts)
    raise ValueError(f"unknown sample spec {spec!r}")


def _load(path: str) -> BoundaryField:
    return io_utils.load_boundary(path)


def _check_out(path: str) -> None:
    """Validate the output location before any compute happens."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    if not os.path.isdir(directory):
        raise io_utils.SchemaError(f"output directory {directory!r} does not exist")


def _cmd_solve(args) -> int:
    X = _load(args.boundary)
    _check_out(args.out)
    fld, report = solve_mean_surface(X, args.nr, args.ntheta)
    grid = fld.grid
    r = np.repeat(grid.r, grid.n_theta)
    t = np.tile(grid.theta, grid.n_r + 1)
    io_utils.save_csv(args.out, ["r", "theta", "eta1", "eta2", "u_bar"],
                      [r, t, r * np.cos(t), r * np.sin(t), fld.values.ravel()])
    print(io_utils.dump_json(report.as_dict()))
    return 0


def _cmd_hl(args) -> int:
    X = _load(args.boundary)
    _check_out(args.out)
    fld, _ = solve_mean_surface(X, args.nr, args.ntheta)
    ev = SurfaceEvaluator(fld)
    eta = _parse_samples(args.samples, args.seed)
    rho = np.hypot(eta[:, 0], eta[:, 1])
    keep = rho <= DERIV2_RADIUS
    eta = eta[keep]
    vals_klein = hl_eval(ev, eta)
    if args.model == "poincare":
        z = klein_to_poincare(eta)
        vals = hl_field_poincare(ev, z).values
        pts = z
    else:
        vals = vals_klein
        pts = eta[:, 0] + 1j * eta[:, 1]
    lam, _ = shape_eigenvalues(ev, eta)
    div = np.array([divergence_check(ev, eta[i:i + 1]) for i in range(len(eta))])
    io_utils.save_csv(args.out,
                      ["x", "y", "Vx", "Vy", "lambda", "dbar_norm", "div_residual"],
                      [pts.real, pts.imag, vals.real, vals.imag,
                       lam, np.abs(lam), div])
    print(io_utils.dump_json({
        "n_r": args.nr, "n_theta": args.ntheta, "model": args.model,
        "samples": int(len(eta)), "value_radius": VALUE_RADIUS,
        "deriv2_radius": DERIV2_RADIUS, "seed": args.seed,
    }))
    return 0


def _cmd_de(args) -> int:
    X = _load(args.boundary)
    _check_out(args.out)
    eta = _parse_samples(args.points, args.seed)
    z = klein_to_poincare(eta) if args.points_model == "klein" \
        else eta[:, 0] + 1j * eta[:, 1]
    q = QuadratureSpec(args.m)
    vals = l0_eval(X, z, q)
    der = l0_dbar(X, z, q)
    io_utils.save_csv(args.out, ["x", "y", "L0_re", "L0_im", "dbar_re", "dbar_im"],
                      [z.real, z.imag, vals.real, vals.imag, der.real, der.imag])
    print(io_utils.dump_json({"m": args.m, "points": int(z.size), "seed": args.seed}))
    return 0


def _cmd_envelope(args) -> int:
    X = _load(args.boundary)
    _check_out(args.out)
    grid = PolarGrid(args.nr, args.ntheta)
    env = envelopes(X, grid)
    pts = grid.points()[:-1]
    n_int = grid.n_r * grid.n_theta
    io_utils.save_csv(args.out,
                      ["eta1", "eta2", "phi_minus", "phi_plus", "width_field",
                       "sigma0", "sigma1", "sigma2"],
                      [pts[..., 0].ravel(), pts[..., 1].ravel(),
                       env.phi_minus[:-1].ravel(), env.phi_plus[:-1].ravel(),
                       env.width_field.ravel(),
                       env.support_sigma[..., 0].ravel(),
                       env.support_sigma[..., 1].ravel(),
                       env.support_sigma[..., 2].ravel()])
    print(io_utils.dump_json({"n_r": args.nr, "n_theta": args.ntheta,
                              "rows": n_int}))
    return 0


def _cmd_width(args) -> int:
    X = _load(args.boundary)
    grid = PolarGrid(args.nr, args.ntheta)
    res = width(X, grid)
    print(io_utils.dump_json({
        "width": res.value,
        "arg_eta": [float(res.arg_eta[0]), float(res.arg_eta[1])],
        "n_r": args.nr, "n_theta": args.ntheta,
    }))
    return 0


def _cmd_earthquake(args) -> int:
    X = _load(args.boundary)
    _check_out(args.out)
    grid = PolarGrid(args.nr, args.ntheta)
    env = envelopes(X, grid)
    eta = _parse_samples(args.samples, args.seed)
    vals = np.array([earthquake_eval(X, env, e) for e in eta])
    io_utils.save_csv(args.out, ["eta1", "eta2", "E_re", "E_im"],
                      [eta[:, 0], eta[:, 1], vals.real, vals.imag])
    print(io_utils.dump_json({"n_r": args.nr, "n_theta": args.ntheta,
                              "samples": int(len(eta)), "seed": args.seed}))
    return 0


def _cmd_compare(args) -> int:
    X = _load(args.boundary)
    _check_out(args.out)
    fld, _ = solve_mean_surface(X, args.nr, args.ntheta)
    ev = SurfaceEvaluator(fld)
    eta = _parse_samples(args.samples, args.seed)
    z = klein_to_poincare(eta)
    hl_vals = hl_field_poincare(ev, z).values
    l0_vals = l0_eval(X, z, QuadratureSpec(args.m))
    disc = np.abs(hl_vals - l0_vals)
    io_utils.save_csv(args.out,
                      ["x", "y", "HL_re", "HL_im", "L0_re", "L0_im", "abs_diff"],
                      [z.real, z.imag, hl_vals.real, hl_vals.imag,
                       l0_vals.real, l0_vals.imag, disc])
    print(io_utils.dump_json({
        "n_r": args.nr, "n_theta": args.ntheta, "m": args.m,
        "samples": int(z.size), "sup_discrepancy": float(np.max(disc)),
        "mean_discrepancy": float(np.mean(disc)), "seed": args.seed,
    }))
    return 0


def _cmd_report(args) -> int:
    if args.out:
        _check_out(args.out)
    if args.suite.startswith("random:"):
        _, count, seed = args.suite.split(":")
        fields = estimates.random_suite(int(count), int(seed))
        ids = [f"random-{seed}-{i}" for i in range(int(count))]
    else:
        with open(args.suite, "r", encoding="utf-8") as fh:
            paths = [line.strip() for line in fh if line.strip()]
        fields = [_load(p) for p in paths]
        ids = paths
    reports = estimates.suite_report(fields, args.nr, args.ntheta, ids=ids)
    payload = {
        "n_r": args.nr, "n_theta": args.ntheta,
        "suite": args.suite,
        "reports": [r.as_dict() for r in reports],
        "total_violations": int(sum(r.pointwise_violations
                                    + r.lower_violation + r.upper_violation
                                    for r in reports)),
    }
    if args.out:
        io_utils.save_json(args.out, payload)
    print(io_utils.dump_json(payload))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="halfpipe",
        description="Harmonic Lagrangian extension of circle vector fields "
                    "and width/dbar estimate reports.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, nr=128, ntheta=256):
        sp.add_argument("--boundary", required=True, help="boundary field JSON file")
        sp.add_argument("--nr", type=int, default=nr)
        sp.add_argument("--ntheta", type=int, default=ntheta)
        sp.add_argument("--seed", type=int, default=42)

    sp = sub.add_parser("solve", help="solve the Plateau problem, emit u_bar CSV")
    common(sp)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=_cmd_solve)

    sp = sub.add_parser("hl", help="sample the harmonic Lagrangian field")
    common(sp)
    sp.add_argument("--samples", default="disk:200")
    sp.add_argument("--model", choices=["klein", "poincare"], default="poincare")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=_cmd_hl)

    sp = sub.add_parser("de", help="evaluate the integral extension oracle")
    sp.add_argument("--boundary", required=True)
    sp.add_argument("--points", default="disk:200:0.8")
    sp.add_argument("--points-model", choices=["klein", "poincare"], default="poincare")
    sp.add_argument("--m", type=int, default=2048)
    sp.add_argument("--seed", type=int, default=42)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=_cmd_de)

    sp = sub.add_parser("envelope", help="convex envelopes and width field CSV")
    common(sp)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=_cmd_envelope)

    sp = sub.add_parser("width", help="width of the boundary field (JSON to stdout)")
    common(sp)
    sp.set_defaults(func=_cmd_width)

    sp = sub.add_parser("earthquake", help="left infinitesimal earthquake samples")
    common(sp)
    sp.add_argument("--samples", default="disk:200")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=_cmd_earthquake)

    sp = sub.add_parser("compare", help="HL field vs integral-oracle discrepancy")
    common(sp, nr=256, ntheta=512)
    sp.add_argument("--samples", default="disk:200:0.8")
    sp.add_argument("--m", type=int, default=2048)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=_cmd_compare)

    sp = sub.add_parser("report", help="estimate suite report (JSON)")
    sp.add_argument("--suite", required=True,
                    help='file listing boundary JSONs, or "random:<k>:<seed>"')
    sp.add_argument("--nr", type=int, default=128)
    sp.add_argument("--ntheta", type=int, default=256)
    sp.add_argument("--out", default="")
    sp.set_defaults(func=_cmd_report)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except io_utils.SchemaError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except ValueError as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (ArithmeticError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
