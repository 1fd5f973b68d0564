"""Conformally natural integral extension of circle fields (oracle module).

Evaluates the extension and its z-bar derivative by periodic-trapezoid
quadrature of the contour integrals

    L0(X)(z)      = (1-|z|^2)^3 / (2 i pi) * I[ X(x) / ((1 - conj(z) x)^3 (x - z)) ]
    dL0/dzbar (z) = 3 (1-|z|^2)^2 / (2 i pi) * I[ X(x) / (1 - conj(z) x)^4 ]

over the unit circle.  This module never touches the PDE solver; its entire
value is independence from that route.

Note: the cubed factor in the first kernel is forced by consistency: it is
the unique power for which the z-bar derivative above holds and for which
Killing boundary fields are reproduced exactly.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circle import BoundaryField, boundary_action
from .minkowski import (HPIsometry, hyp_to_poincare, killing_eval,
                        poincare_to_hyp)

M_MAX = 2 ** 16


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class QuadratureSpec:
    """Periodic trapezoid rule with m nodes (power of two >= 64)."""

    m: int = 1024

    def __post_init__(self):
        if self.m < 64 or not _is_power_of_two(self.m):
            raise ValueError("quadrature node count must be a power of two >= 64")

    def nodes(self):
        theta = 2.0 * np.pi * np.arange(self.m) / self.m
        return theta, np.exp(1j * theta)


def _check_radius(z, m: int):
    z = np.asarray(z, dtype=complex)
    # Kernel peaks like (1-|z|)^{-1}; require several nodes across the peak.
    limit = min(0.95, 1.0 - 8.0 / m)
    if np.any(np.abs(z) > limit + 1e-12):
        raise ValueError(
            f"|z| too close to 1 for m={m} nodes; raise m or move the point inward")
    return z


def l0_eval(X: BoundaryField, z, q: QuadratureSpec = QuadratureSpec()):
    """Extension value at z (complex, Poincare chart)."""
    z = _check_radius(z, q.m)
    theta, x = q.nodes()
    f = X.field_eval(theta) * 1j * x          # X(x) dx with dx = i x dtheta
    zc = np.conj(z)[..., None]
    kernel = 1.0 / ((1.0 - zc * x) ** 3 * (x - z[..., None]))
    integral = (f * kernel).sum(axis=-1) * (2.0 * np.pi / q.m)
    return (1.0 - np.abs(z) ** 2) ** 3 / (2j * np.pi) * integral


def l0_dbar(X: BoundaryField, z, q: QuadratureSpec = QuadratureSpec()):
    """z-bar derivative of the extension at z."""
    z = _check_radius(z, q.m)
    theta, x = q.nodes()
    f = X.field_eval(theta) * 1j * x
    zc = np.conj(z)[..., None]
    kernel = 1.0 / (1.0 - zc * x) ** 4
    integral = (f * kernel).sum(axis=-1) * (2.0 * np.pi / q.m)
    return 3.0 * (1.0 - np.abs(z) ** 2) ** 2 / (2j * np.pi) * integral


def l0_eval_converged(X: BoundaryField, z, tol: float = 1e-10, m0: int = 256):
    """Extension value with automatic m-doubling until successive values agree."""
    m = m0
    prev = l0_eval(X, z, QuadratureSpec(m))
    while m < M_MAX:
        m *= 2
        cur = l0_eval(X, z, QuadratureSpec(m))
        if np.max(np.abs(cur - prev)) < tol:
            return cur
        prev = cur
    return prev


def mobius_map(iso: HPIsometry):
    """Poincare-chart Moebius map of the linear part of iso, as a callable pair.

    Returns (g, gprime): g(z) is the disk Moebius map conjugate to A and
    gprime its complex derivative, both exact closed forms.
    """
    A = iso.A
    # w = preimage of 0; the unimodular factor comes from a known image.
    w = hyp_to_poincare(iso.inverse().A @ np.array([1.0, 0.0, 0.0]))
    if abs(w) > 1e-14:
        g0 = hyp_to_poincare(A @ np.array([1.0, 0.0, 0.0]))
        phase = -g0 / w
    else:
        w = 0.0 + 0.0j
        z1 = 0.5
        g1 = hyp_to_poincare(A @ poincare_to_hyp(z1))
        phase = g1 / z1
    phase /= abs(phase)

    def g(z):
        z = np.asarray(z, dtype=complex)
        return phase * (z - w) / (1.0 - np.conj(w) * z)

    def gprime(z):
        z = np.asarray(z, dtype=complex)
        return phase * (1.0 - abs(w) ** 2) / (1.0 - np.conj(w) * z) ** 2

    return g, gprime


def killing_field_poincare(sigma, z):
    """Killing field of label sigma in the Poincare chart at points z."""
    z = np.asarray(z, dtype=complex)
    p = poincare_to_hyp(z)
    vec = killing_eval(sigma, p)
    d = 1.0 + p[..., 0]
    # Closed-form differential of the hyperboloid -> Poincare map.
    u = (vec[..., 1] - p[..., 1] * vec[..., 0] / d) / d
    v = (vec[..., 2] - p[..., 2] * vec[..., 0] / d) / d
    return u + 1j * v


def naturality_check(X: BoundaryField, iso: HPIsometry, z_samples,
                     q: QuadratureSpec = QuadratureSpec(2048)) -> float:
    """Sup discrepancy of conformal naturality at the given Poincare points.

    Compares the extension of the transformed field at the transformed points
    with the transformed extension: L0(A_* X + K)(g(z)) versus
    g'(z) L0(X)(z) + K(g(z)).
    """
    z = np.asarray(z_samples, dtype=complex)
    g, gprime = mobius_map(iso)
    Y = boundary_action(X, iso)
    lhs = l0_eval(Y, g(z), q)
    rhs = gprime(z) * l0_eval(X, z, q) + killing_field_poincare(iso.v, g(z))
    return float(np.max(np.abs(lhs - rhs)))
