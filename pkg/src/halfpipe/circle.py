"""Continuous vector fields on the circle stored by their support function.

A field X on S^1 is encoded as X(z) = i z phi(z); everything downstream
(envelopes, Dirichlet data, quadrature) consumes the samples of phi.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .minkowski import HPIsometry, boundary_circle_act, dual_plane_eval

TRIG = "trig"
PIECEWISE_LINEAR = "pl"


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class BoundaryField:
    """Uniform samples of the support function phi on S^1.

    phi[j] = phi(theta_j) with theta_j = 2 pi j / n; n a power of two >= 32.
    interp selects the reconstruction used between samples: trigonometric
    for band-limited/smooth data, piecewise-linear for generic continuous data.
    """

    phi: np.ndarray
    interp: str = TRIG

    def __post_init__(self):
        phi = np.ascontiguousarray(np.asarray(self.phi, dtype=float))
        object.__setattr__(self, "phi", phi)
        if phi.ndim != 1:
            raise ValueError("phi must be a 1-d sample array")
        if not _is_power_of_two(phi.size) or phi.size < 32:
            raise ValueError("sample count must be a power of two >= 32")
        if not np.all(np.isfinite(phi)):
            raise ValueError("phi samples must be finite")
        if self.interp not in (TRIG, PIECEWISE_LINEAR):
            raise ValueError(f"unknown interpolation tag {self.interp!r}")

    @property
    def n(self) -> int:
        return self.phi.size

    @property
    def theta(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.n) / self.n

    def phi_eval(self, theta):
        """Interpolated support function at arbitrary angles."""
        theta = np.asarray(theta, dtype=float)
        if self.interp == TRIG:
            coeffs = np.fft.rfft(self.phi) / self.n
            k = np.arange(coeffs.size)
            # Real series: a_0 + sum 2 Re(c_k e^{ik theta}); Nyquist mode enters once.
            weights = np.full(coeffs.size, 2.0)
            weights[0] = 1.0
            if self.n % 2 == 0:
                weights[-1] = 1.0
            phase = np.exp(1j * np.multiply.outer(theta, k))
            return np.real(phase @ (weights * coeffs))
        t = np.mod(theta, 2.0 * np.pi)
        grid = np.concatenate([self.theta, [2.0 * np.pi]])
        vals = np.concatenate([self.phi, self.phi[:1]])
        return np.interp(t, grid, vals)

    def field_eval(self, theta):
        """Vector-field value X(e^{i theta}) = i e^{i theta} phi(theta)."""
        theta = np.asarray(theta, dtype=float)
        return 1j * np.exp(1j * theta) * self.phi_eval(theta)

    def scaled(self, alpha: float) -> "BoundaryField":
        return BoundaryField(alpha * self.phi, self.interp)


def from_fourier(a, b, n: int = 512, interp: str = TRIG) -> BoundaryField:
    """Build samples of phi(theta) = a0 + sum a_k cos(k t) + b_k sin(k t)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    theta = 2.0 * np.pi * np.arange(n) / n
    phi = np.zeros(n)
    if a.size:
        phi += a[0]
        for k in range(1, a.size):
            phi += a[k] * np.cos(k * theta)
    for k in range(1, b.size + 1):
        phi += b[k - 1] * np.sin(k * theta)
    return BoundaryField(phi, interp)


def killing_boundary(sigma, n: int) -> BoundaryField:
    """Boundary field of the Killing field labelled by sigma: phi = <(1,z), sigma>."""
    sigma = np.asarray(sigma, dtype=float)
    theta = 2.0 * np.pi * np.arange(n) / n
    phi = -sigma[0] + sigma[1] * np.cos(theta) + sigma[2] * np.sin(theta)
    return BoundaryField(phi, TRIG)


def boundary_action(X: BoundaryField, iso: HPIsometry) -> BoundaryField:
    """Support function of A_* X + Lambda(v): resample the transformed graph.

    For each output angle theta', the input angle is found with A^{-1} and the
    height transforms by the scale of the lightlike lift plus the Killing term.
    """
    theta_out = X.theta
    theta_in, scale = boundary_circle_act(iso.inverse().A, theta_out)
    boundary = np.stack([np.cos(theta_out), np.sin(theta_out)], axis=-1)
    killing_part = dual_plane_eval(iso.v, boundary)
    phi_new = scale * X.phi_eval(theta_in) + killing_part
    return BoundaryField(phi_new, X.interp)


@dataclass(frozen=True)
class Quadruple:
    """Four points of S^1 in counter-clockwise order."""

    a: complex
    b: complex
    c: complex
    d: complex

    def points(self):
        return (self.a, self.b, self.c, self.d)


def cross_ratio(q: Quadruple) -> complex:
    a, b, c, d = q.points()
    return ((b - a) * (d - c)) / ((c - b) * (d - a))


def cross_ratio_distortion(X: BoundaryField, q: Quadruple) -> complex:
    """Distortion X[Q]; vanishes identically iff X is a Killing boundary field."""
    pts = np.asarray(q.points(), dtype=complex)
    gaps = np.abs(np.roll(pts, -1) - pts)
    if np.min(gaps) < 1e-12:
        raise ValueError("degenerate quadruple")
    vals = X.field_eval(np.angle(pts))
    a, b, c, d = pts
    Xa, Xb, Xc, Xd = vals
    return ((Xb - Xa) / (b - a) - (Xc - Xb) / (c - b)
            + (Xd - Xc) / (d - c) - (Xa - Xd) / (a - d))


_BASE_QUADRUPLE = np.array([1.0, 1j, -1.0, -1j], dtype=complex)


def random_cr1_quadruples(m: int, seed: int) -> list[Quadruple]:
    """Moebius images of (1, i, -1, -i); disk Moebius maps preserve cr = 1.

    The translation parameter |w| is uniform in Poincare radius up to 0.999 so
    the sample covers degenerating quadruples.
    """
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(m):
        alpha = rng.uniform(0.0, 2.0 * np.pi)
        beta = rng.uniform(0.0, 2.0 * np.pi)
        rho = rng.uniform(0.0, 0.999)
        w = rho * np.exp(1j * beta)
        img = np.exp(1j * alpha) * (_BASE_QUADRUPLE - w) / (1.0 - np.conj(w) * _BASE_QUADRUPLE)
        img /= np.abs(img)   # defend against roundoff drift off S^1
        out.append(Quadruple(*img))
    return out


def cross_ratio_norm_estimate(X: BoundaryField, m: int, seed: int = 42) -> float:
    """Monte-Carlo sup of |X[Q]| over cr = 1 quadruples; nested in m for a fixed seed."""
    if m < 1:
        raise ValueError("m must be >= 1")
    best = 0.0
    for q in random_cr1_quadruples(m, seed):
        best = max(best, abs(cross_ratio_distortion(X, q)))
    return best
