"""Runnable checks of the quantitative width / dbar-norm estimates.

Assembles the two-sided estimate (1/6) dbar_sup <= width <= 2 dbar_sup, the
pointwise bound lambda <= 6 w, and the boundary-decay diagnostics into
reports.  Slack is always explicit and reported, never silently absorbed.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .circle import BoundaryField, from_fourier
from .envelope import PolarGrid, envelopes, width
from .hl import DERIV2_RADIUS, shape_eigenvalues
from .surface import SurfaceEvaluator, solve_mean_surface


@dataclass(frozen=True)
class EstimateReport:
    field_id: str
    dbar_sup: float
    width: float
    ratio_lower: float          # (dbar_sup / 6) / width, guarded
    ratio_upper: float          # width / (2 dbar_sup), guarded
    slack: float
    lower_violation: bool
    upper_violation: bool
    pointwise_violations: int
    annulus_decay: list = field(default_factory=list)
    n_r: int = 0
    n_theta: int = 0

    def as_dict(self) -> dict:
        return {
            "field_id": self.field_id,
            "dbar_sup": self.dbar_sup,
            "width": self.width,
            "ratio_lower": self.ratio_lower,
            "ratio_upper": self.ratio_upper,
            "slack": self.slack,
            "lower_violation": self.lower_violation,
            "upper_violation": self.upper_violation,
            "pointwise_violations": self.pointwise_violations,
            "annulus_decay": [list(row) for row in self.annulus_decay],
            "n_r": self.n_r,
            "n_theta": self.n_theta,
        }


def estimate_slack(X: BoundaryField, n_r: int, n_theta: int) -> float:
    """Discretization slack 10 (1/n_r + 1/n_theta) in the field's natural scale."""
    scale = max(1.0, float(np.max(np.abs(X.phi))))
    return 10.0 * (1.0 / n_r + 1.0 / n_theta) * scale


def _lambda_grid(ev: SurfaceEvaluator, grid: PolarGrid, r_max: float):
    """Principal-curvature values on the grid nodes with r <= r_max."""
    pts = grid.points()
    rows = grid.r <= r_max + 1e-12
    lam, _ = shape_eigenvalues(ev, pts[rows])
    return lam, rows


def two_sided_check(X: BoundaryField, n_r: int = 128, n_theta: int = 256,
                    field_id: str = "field",
                    decay_radii=(0.8, 0.9, 0.95)) -> EstimateReport:
    """Evaluate the two-sided and pointwise estimates on one boundary field."""
    grid = PolarGrid(n_r, n_theta)
    env = envelopes(X, grid)
    w = width(X, grid, env).value

    fld, _ = solve_mean_surface(X, n_r, n_theta)
    ev = SurfaceEvaluator(fld)
    lam, rows = _lambda_grid(ev, grid, DERIV2_RADIUS)
    dbar_sup = float(np.max(lam))

    slack = estimate_slack(X, n_r, n_theta)
    lower_violation = dbar_sup / 6.0 > w + slack
    upper_violation = w > 2.0 * dbar_sup + slack

    if dbar_sup < slack and w < slack:
        # Both sides vanish (Killing data): ratios are not meaningful.
        guard = guard_d = np.inf
    else:
        guard = max(w, 1e-15)
        guard_d = max(2.0 * dbar_sup, 1e-15)

    pw = pointwise_violations(X, env, ev, slack)
    decay = annulus_decay(env, ev, decay_radii)
    return EstimateReport(
        field_id=field_id,
        dbar_sup=dbar_sup,
        width=w,
        ratio_lower=(dbar_sup / 6.0) / guard,
        ratio_upper=w / guard_d,
        slack=slack,
        lower_violation=bool(lower_violation),
        upper_violation=bool(upper_violation),
        pointwise_violations=pw,
        annulus_decay=decay,
        n_r=n_r,
        n_theta=n_theta,
    )


def pointwise_violations(X: BoundaryField, env, ev: SurfaceEvaluator,
                         slack: float, r_max: float = 0.9) -> int:
    """Count grid points with lambda > 6 * width_field + slack; must be zero."""
    grid = env.grid
    lam, rows = _lambda_grid(ev, grid, r_max)
    # width_field covers rows 0 .. n_r-1; restrict to the same node selection.
    sel = np.nonzero(rows)[0]
    sel = sel[sel < grid.n_r]
    wf = env.width_field[sel]
    lam = lam[: len(sel)]
    return int(np.count_nonzero(lam > 6.0 * wf + slack))


def pointwise_check(X: BoundaryField, n_r: int = 128, n_theta: int = 256) -> int:
    """Standalone pointwise estimate check on a fresh solve."""
    grid = PolarGrid(n_r, n_theta)
    env = envelopes(X, grid)
    fld, _ = solve_mean_surface(X, n_r, n_theta)
    ev = SurfaceEvaluator(fld)
    return pointwise_violations(X, env, ev, estimate_slack(X, n_r, n_theta))


def annulus_decay(env, ev: SurfaceEvaluator, radii=(0.8, 0.9, 0.95)):
    """Max of width_field and of lambda on the grid ring nearest each radius."""
    grid = env.grid
    out = []
    for rr in radii:
        i = min(int(round(rr * grid.n_r)), grid.n_r - 1)
        ring_pts = grid.points()[i]
        lam, _ = shape_eigenvalues(ev, ring_pts)
        out.append((grid.r[i], float(np.max(env.width_field[i])), float(np.max(lam))))
    return out


def little_zygmund_decay(X: BoundaryField, radii=(0.8, 0.9, 0.95),
                         n_r: int = 128, n_theta: int = 256):
    """Ring maxima of the width field and principal curvature at the radii."""
    if X.interp != "trig":
        raise ValueError("decay diagnostic expects smooth (trig-tagged) data")
    grid = PolarGrid(n_r, n_theta)
    env = envelopes(X, grid)
    fld, _ = solve_mean_surface(X, n_r, n_theta)
    ev = SurfaceEvaluator(fld)
    return annulus_decay(env, ev, radii)


def random_suite(count: int, seed: int, max_mode: int = 8,
                 n: int = 256) -> list[BoundaryField]:
    """Seeded band-limited fields: coefficients uniform in [-1, 1], modes <= max_mode."""
    rng = np.random.default_rng(seed)
    fields = []
    for _ in range(count):
        a = rng.uniform(-1.0, 1.0, size=max_mode + 1)
        b = rng.uniform(-1.0, 1.0, size=max_mode)
        fields.append(from_fourier(a, b, n=n))
    return fields


def suite_report(fields: list[BoundaryField], n_r: int = 128, n_theta: int = 256,
                 ids=None) -> list[EstimateReport]:
    ids = ids or [f"field{i}" for i in range(len(fields))]
    return [two_sided_check(X, n_r, n_theta, field_id=i)
            for X, i in zip(fields, ids)]
