"""Harmonic Lagrangian extension field and its curvature diagnostics.

The field is evaluated purely from Euclidean derivatives of the solved
potential in the Klein chart: the tangent-plane label sigma at eta is read
off the gradient, and the field is d_(1,eta) Pi((1,eta) x sigma).
"""
from __future__ import annotations

import numpy as np

from .minkowski import (PlaneField, dpi_linear, klein_to_poincare, mink_cross,
                        poincare_to_klein, pushforward_field)
from .surface import DiskField, SurfaceEvaluator

VALUE_RADIUS = 0.995    # hl values are reliable inside this Klein radius
DERIV2_RADIUS = 0.95    # second derivatives are reliable inside this radius


def _as_evaluator(u_bar) -> SurfaceEvaluator:
    if isinstance(u_bar, SurfaceEvaluator):
        return u_bar
    if isinstance(u_bar, DiskField):
        return SurfaceEvaluator(u_bar)
    raise TypeError("expected a DiskField or SurfaceEvaluator")


def tangent_plane_label(u_bar, eta) -> np.ndarray:
    """Label sigma of the tangent plane of gr(u_bar) at eta, shape (..., 3).

    dual_plane_eval(sigma, .) is the affine tangent function
    u(eta) + grad u . (. - eta).
    """
    ev = _as_evaluator(u_bar)
    eta = np.asarray(eta, dtype=float)
    u = ev.u(eta)
    g = ev.grad(eta)
    sigma = np.empty(np.shape(u) + (3,))
    sigma[..., 0] = -(u - np.sum(g * eta, axis=-1))
    sigma[..., 1] = g[..., 0]
    sigma[..., 2] = g[..., 1]
    return sigma


def hl_eval(u_bar, eta):
    """Harmonic Lagrangian field at eta in Klein chart coordinates (complex)."""
    ev = _as_evaluator(u_bar)
    eta = np.asarray(eta, dtype=float)
    rho = np.hypot(eta[..., 0], eta[..., 1])
    if np.any(rho > VALUE_RADIUS):
        raise ValueError(f"hl_eval limited to |eta| <= {VALUE_RADIUS}")
    sigma = tangent_plane_label(ev, eta)
    lift = np.concatenate([np.ones(eta.shape[:-1] + (1,)), eta], axis=-1)
    return dpi_linear(eta, mink_cross(lift, sigma))


def hl_field_poincare(u_bar, z_samples) -> PlaneField:
    """HL field sampled at the Poincare points z_samples (pushed from Klein)."""
    ev = _as_evaluator(u_bar)
    z = np.asarray(z_samples, dtype=complex)
    eta = poincare_to_klein(z)
    klein_vals = hl_eval(ev, eta)
    klein_pts = eta[..., 0] + 1j * eta[..., 1]
    return pushforward_field(PlaneField("klein", klein_pts, klein_vals), "poincare")


def poincare_field(u_bar):
    """Callable z -> HL field value in the Poincare chart."""
    ev = _as_evaluator(u_bar)

    def V(z):
        return hl_field_poincare(ev, z).values

    return V


def dbar_norm_fd(V, z, h: float = 1e-3) -> float:
    """|dV/dz-bar| by central differences, Richardson-extrapolated over h, h/2.

    V is a callable on Poincare points (vectorized); the stencil must stay
    inside the evaluable region.
    """
    z = complex(z)

    def raw(step):
        pts = np.array([z + step, z - step, z + 1j * step, z - 1j * step])
        vx_p, vx_m, vy_p, vy_m = V(pts)
        dx = (vx_p - vx_m) / (2.0 * step)
        dy = (vy_p - vy_m) / (2.0 * step)
        return 0.5 * (dx + 1j * dy)

    d1 = raw(h)
    d2 = raw(h / 2.0)
    return float(abs((4.0 * d2 - d1) / 3.0))


def dz_fd(V, z, h: float = 1e-3) -> complex:
    """dV/dz by central differences with Richardson extrapolation."""
    z = complex(z)

    def raw(step):
        pts = np.array([z + step, z - step, z + 1j * step, z - 1j * step])
        vx_p, vx_m, vy_p, vy_m = V(pts)
        dx = (vx_p - vx_m) / (2.0 * step)
        dy = (vy_p - vy_m) / (2.0 * step)
        return 0.5 * (dx - 1j * dy)

    d1 = raw(h)
    d2 = raw(h / 2.0)
    return complex((4.0 * d2 - d1) / 3.0)


def klein_metric(eta):
    """Klein-chart metric tensor, shape (..., 2, 2)."""
    eta = np.asarray(eta, dtype=float)
    rho2 = np.sum(eta * eta, axis=-1)
    eye = np.broadcast_to(np.eye(2), eta.shape[:-1] + (2, 2))
    outer = eta[..., :, None] * eta[..., None, :]
    return eye / (1.0 - rho2)[..., None, None] + outer / ((1.0 - rho2) ** 2)[..., None, None]


def shape_operator(u_bar, eta):
    """Principal curvature and dbar norm of the mean surface at eta.

    The second fundamental form is II = Hess(u_bar)/sqrt(1-|eta|^2): lowering
    the shape operator with the Klein metric turns the hyperbolic Hessian
    identity into this purely Euclidean expression.  Returns (lambda, dbar).
    """
    ev = _as_evaluator(u_bar)
    eta = np.asarray(eta, dtype=float)
    rho = np.hypot(eta[..., 0], eta[..., 1])
    if np.any(rho > DERIV2_RADIUS):
        raise ValueError(f"shape_operator limited to |eta| <= {DERIV2_RADIUS}")
    lam, _ = shape_eigenvalues(ev, eta)
    return lam, lam


def shape_eigenvalues(u_bar, eta):
    """Eigenvalues (lambda_plus, lambda_minus) of the shape operator at eta."""
    ev = _as_evaluator(u_bar)
    eta = np.asarray(eta, dtype=float)
    rho2 = np.sum(eta * eta, axis=-1)
    II = ev.hess(eta) / np.sqrt(1.0 - rho2)[..., None, None]
    g_inv = (1.0 - rho2)[..., None, None] * (
        np.broadcast_to(np.eye(2), eta.shape[:-1] + (2, 2))
        - eta[..., :, None] * eta[..., None, :])
    B = np.einsum("...ij,...jk->...ik", g_inv, II)
    tr = B[..., 0, 0] + B[..., 1, 1]
    det = B[..., 0, 0] * B[..., 1, 1] - B[..., 0, 1] * B[..., 1, 0]
    disc = np.maximum(tr * tr / 4.0 - det, 0.0)
    root = np.sqrt(disc)
    return tr / 2.0 + root, tr / 2.0 - root


def divergence_check(u_bar, region_points) -> float:
    """Sup of the hyperbolic divergence of HL over Klein points (diagnostic).

    The continuum field is divergence-free; the value measures derivative and
    interpolation error of the evaluation pipeline.  Computed in the Poincare
    chart: div = 2 Re(dV/dz) + 4 Re(z conj(V)) / (1 - |z|^2).
    """
    ev = _as_evaluator(u_bar)
    eta = np.asarray(region_points, dtype=float).reshape(-1, 2)
    z = klein_to_poincare(eta)
    V = poincare_field(ev)
    vals = V(z)
    worst = 0.0
    for zi, vi in zip(z, vals):
        dz = dz_fd(V, zi)
        div = 2.0 * np.real(dz) + 4.0 * np.real(zi * np.conj(vi)) / (1.0 - abs(zi) ** 2)
        worst = max(worst, abs(div))
    return worst
