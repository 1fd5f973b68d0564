"""Convex-core data of a boundary support function.

The lower/upper envelopes phi-/phi+ are computed from one 3D convex hull of
the boundary samples; its facet planes double as the supporting-plane labels
used by the infinitesimal earthquake and the recentering isometry.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .circle import BoundaryField
from .minkowski import HPIsometry, boost_to_center, dpi_linear, mink_cross

HULL_TOL = 1e-9
AFFINE_RESIDUAL_TOL = 1e-12


@dataclass(frozen=True)
class PolarGrid:
    """Uniform polar grid over the closed disk: r_i = i/n_r, theta_j = 2 pi j/n_theta."""

    n_r: int
    n_theta: int

    def __post_init__(self):
        if self.n_r < 4 or self.n_theta < 8:
            raise ValueError("grid too coarse")

    @property
    def r(self) -> np.ndarray:
        return np.arange(self.n_r + 1) / self.n_r

    @property
    def theta(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.n_theta) / self.n_theta

    def points(self):
        """(n_r+1, n_theta, 2) array of Klein coordinates."""
        r = self.r[:, None]
        t = self.theta[None, :]
        return np.stack([r * np.cos(t), r * np.sin(t)], axis=-1)

    def nearest_node(self, eta) -> tuple[int, int]:
        eta = np.asarray(eta, dtype=float)
        r = float(np.hypot(eta[0], eta[1]))
        i = int(round(r * self.n_r))
        j = int(round(np.mod(np.arctan2(eta[1], eta[0]), 2.0 * np.pi)
                      / (2.0 * np.pi / self.n_theta))) % self.n_theta
        return min(i, self.n_r), j


@dataclass(frozen=True)
class EnvelopeData:
    """Envelopes, width field and supporting-plane labels on a polar grid.

    phi_minus/phi_plus cover the full grid; width_field and support_sigma cover
    the interior rows i = 0 .. n_r - 1 (r < 1).
    """

    grid: PolarGrid
    phi_minus: np.ndarray        # (n_r+1, n_theta)
    phi_plus: np.ndarray         # (n_r+1, n_theta)
    width_field: np.ndarray      # (n_r, n_theta)
    support_sigma: np.ndarray    # (n_r, n_theta, 3)
    lower_planes: np.ndarray     # (M, 3) rows (a, b, c): plane a + b x + c y
    upper_planes: np.ndarray

    def sigma_at(self, eta) -> np.ndarray:
        """Supporting-plane label of gr(phi-) at eta (smallest facet index on ties)."""
        eta = np.asarray(eta, dtype=float)
        vals = (self.lower_planes[:, 0]
                + self.lower_planes[:, 1] * eta[0]
                + self.lower_planes[:, 2] * eta[1])
        a, b, c = self.lower_planes[int(np.argmax(vals))]
        return np.array([-a, b, c])


def _affine_fit(X: BoundaryField):
    """Least-squares affine fit of the samples; (coeffs, sup residual)."""
    theta = X.theta
    basis = np.stack([np.ones_like(theta), np.cos(theta), np.sin(theta)], axis=-1)
    coeffs, *_ = np.linalg.lstsq(basis, X.phi, rcond=None)
    residual = float(np.max(np.abs(basis @ coeffs - X.phi)))
    return coeffs, residual


def _hull_planes(X: BoundaryField):
    """Facet planes (a, b, c) of the lower and upper hull of the sample graph."""
    theta = X.theta
    pts = np.stack([np.cos(theta), np.sin(theta), X.phi], axis=-1)
    try:
        hull = ConvexHull(pts)
    except QhullError:
        # Near-coplanar input: joggle and retry.
        hull = ConvexHull(pts, qhull_options="QJ")
    # hull.equations rows: (n1, n2, n3, offset) with n.x + offset <= 0 inside.
    eq = hull.equations
    n3 = eq[:, 2]
    keep = np.abs(n3) > 1e-14
    eq = eq[keep]
    n3 = n3[keep]
    # Solve n1 x + n2 y + n3 z + off = 0 for z = a + b x + c y.
    planes = np.stack([-eq[:, 3] / n3, -eq[:, 0] / n3, -eq[:, 1] / n3], axis=-1)
    lower = planes[n3 < 0]
    upper = planes[n3 > 0]
    return lower, upper


def _eval_planes(planes: np.ndarray, pts: np.ndarray, take_max: bool):
    """Evaluate max/min over facet planes at pts, plus the argopt facet index.

    pts has shape (..., 2); evaluation is chunked to bound memory.
    """
    flat = pts.reshape(-1, 2)
    vals = np.empty(flat.shape[0])
    idx = np.empty(flat.shape[0], dtype=np.int64)
    chunk = max(1, 8_000_000 // max(planes.shape[0], 1))
    for start in range(0, flat.shape[0], chunk):
        sl = slice(start, min(start + chunk, flat.shape[0]))
        table = (planes[:, 0][None, :]
                 + np.outer(flat[sl, 0], planes[:, 1])
                 + np.outer(flat[sl, 1], planes[:, 2]))
        if take_max:
            idx[sl] = np.argmax(table, axis=1)
        else:
            idx[sl] = np.argmin(table, axis=1)
        vals[sl] = np.take_along_axis(table, idx[sl][:, None], axis=1)[:, 0]
    return vals.reshape(pts.shape[:-1]), idx.reshape(pts.shape[:-1])


def envelopes(X: BoundaryField, grid: PolarGrid) -> EnvelopeData:
    """Lower/upper envelopes of the boundary samples on the polar grid."""
    coeffs, residual = _affine_fit(X)
    pts = grid.points()
    interior = pts[:-1]
    if residual < AFFINE_RESIDUAL_TOL:
        # Affine data: hull is flat, phi- = phi+ = the affine function.
        a0, a1, a2 = coeffs
        plane = np.array([[a0, a1, a2]])
        values = a0 + a1 * pts[..., 0] + a2 * pts[..., 1]
        sigma = np.broadcast_to(np.array([-a0, a1, a2]),
                                interior.shape[:-1] + (3,)).copy()
        zeros = np.zeros(interior.shape[:-1])
        return EnvelopeData(grid, values, values.copy(), zeros, sigma,
                            plane, plane.copy())

    lower, upper = _hull_planes(X)
    phi_minus_int, low_idx = _eval_planes(lower, interior, take_max=True)
    phi_plus_int, _ = _eval_planes(upper, interior, take_max=False)

    # Boundary ring carries the data itself (P1 continuity).
    phi_minus = np.concatenate([phi_minus_int, X_boundary_row(X, grid)], axis=0)
    phi_plus = np.concatenate([phi_plus_int, X_boundary_row(X, grid)], axis=0)

    r = grid.r[:-1, None]
    width_field = (phi_plus_int - phi_minus_int) / np.sqrt(1.0 - r * r)
    width_field = np.maximum(width_field, 0.0)

    sigma = np.empty(interior.shape[:-1] + (3,))
    sigma[..., 0] = -lower[low_idx, 0]
    sigma[..., 1] = lower[low_idx, 1]
    sigma[..., 2] = lower[low_idx, 2]
    return EnvelopeData(grid, phi_minus, phi_plus, width_field, sigma, lower, upper)


def X_boundary_row(X: BoundaryField, grid: PolarGrid) -> np.ndarray:
    """Row of boundary values phi(theta_j) matching the grid angles."""
    return X.phi_eval(grid.theta)[None, :]


@dataclass(frozen=True)
class WidthResult:
    value: float
    arg_eta: np.ndarray
    grid: PolarGrid


def width(X: BoundaryField, grid: PolarGrid, env: EnvelopeData | None = None) -> WidthResult:
    """Sup of (phi+ - phi-)/sqrt(1-|eta|^2) over the interior grid.

    The outermost interior ring (r = 1 - 1/n_r) is excluded: the quotient is
    0/0 there for continuous data and the discrete value is noise.
    """
    if env is None:
        env = envelopes(X, grid)
    body = env.width_field[:-1]
    flat = int(np.argmax(body))
    i, j = np.unravel_index(flat, body.shape)
    eta = grid.points()[i, j]
    return WidthResult(float(body[i, j]), eta, grid)


def earthquake_eval(X: BoundaryField, env: EnvelopeData, eta) -> complex:
    """Left infinitesimal earthquake at eta: d_(1,eta) Pi((1,eta) x sigma).

    sigma is the supporting-plane label stored at the grid cell of eta.
    """
    eta = np.asarray(eta, dtype=float)
    if np.hypot(eta[0], eta[1]) >= 1.0:
        raise ValueError("earthquake_eval requires |eta| < 1")
    i, j = env.grid.nearest_node(eta)
    i = min(i, env.grid.n_r - 1)
    sigma = env.support_sigma[i, j]
    lift = np.array([1.0, eta[0], eta[1]])
    return complex(dpi_linear(eta, mink_cross(lift, sigma)))


def recenter_isometry(X: BoundaryField, eta,
                      grid: PolarGrid | None = None) -> HPIsometry:
    """Isometry moving eta to 0 whose Killing part makes the zero plane a
    support plane of the recentered lower envelope at the center.

    Support plane P_sigma at eta maps under (A, v) to P_{A sigma + v}; choosing
    v = -A sigma sends it to the zero plane.
    """
    if grid is None:
        grid = PolarGrid(64, 256)
    eta = np.asarray(eta, dtype=float)
    env = envelopes(X, grid)
    vals = (env.lower_planes[:, 0] + env.lower_planes[:, 1] * eta[0]
            + env.lower_planes[:, 2] * eta[1])
    if abs(np.max(vals)) <= 1e-10 and np.min(X.phi) >= -1e-10:
        # The zero plane itself is a supporting plane at eta: canonical choice.
        sigma = np.zeros(3)
    else:
        sigma = env.sigma_at(eta)
    move = boost_to_center(eta)
    return HPIsometry(move.A, -(move.A @ sigma))
