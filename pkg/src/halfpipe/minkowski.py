"""Minkowski linear algebra, hyperbolic-plane models and Half-Pipe dualities.

Conventions: vectors of R^{1,2} are ndarrays of shape (..., 3) with signature
(-,+,+); Klein points are ndarrays of shape (..., 2); Poincare points are
complex scalars/arrays.  All maps here are closed forms, no iteration.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

# Guard band for chart-change Jacobians: they blow up at |.| = 1.
EPSILON_CHART = 1e-9

# Matrix of the bilinear form diag(-1, 1, 1).
J_FORM = np.diag([-1.0, 1.0, 1.0])


def mink_inner(x, y):
    """<x,y> = -x0*y0 + x1*y1 + x2*y2, broadcasting over leading axes."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return -x[..., 0] * y[..., 0] + x[..., 1] * y[..., 1] + x[..., 2] * y[..., 2]


def mink_cross(x, y):
    """Minkowski cross product: the unique w with <w,v> = det(x,y,v) for all v."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    w = np.empty(np.broadcast(x, y).shape, dtype=float)
    w[..., 0] = -(x[..., 1] * y[..., 2] - x[..., 2] * y[..., 1])
    w[..., 1] = x[..., 2] * y[..., 0] - x[..., 0] * y[..., 2]
    w[..., 2] = x[..., 0] * y[..., 1] - x[..., 1] * y[..., 0]
    return w


def killing_eval(sigma, p):
    """Value at p of the Killing field labelled by sigma: p x sigma (tangent at p)."""
    return mink_cross(p, sigma)


def killing_matrix(sigma):
    """3x3 matrix M with M @ y = y x sigma; skew-adjoint for the Minkowski form."""
    s0, s1, s2 = np.asarray(sigma, dtype=float)
    return np.array([
        [0.0, -s2, s1],
        [-s2, 0.0, s0],
        [s1, -s0, 0.0],
    ])


def radial_proj(p):
    """Hyperboloid -> Klein disk, (x0,x1,x2) -> (x1/x0, x2/x0)."""
    p = np.asarray(p, dtype=float)
    return p[..., 1:] / p[..., :1]


def radial_unproj(eta):
    """Klein disk -> hyperboloid, eta -> (1,eta)/sqrt(1-|eta|^2)."""
    eta = np.asarray(eta, dtype=float)
    rho2 = np.sum(eta * eta, axis=-1)
    if np.any(rho2 >= 1.0):
        raise ValueError("radial_unproj requires |eta| < 1")
    lift = np.concatenate([np.ones(eta.shape[:-1] + (1,)), eta], axis=-1)
    return lift / np.sqrt(1.0 - rho2)[..., None]


def _as_complex(xy):
    xy = np.asarray(xy, dtype=float)
    return xy[..., 0] + 1j * xy[..., 1]


def hyp_to_poincare(p):
    """Hyperboloid -> Poincare disk, stereographic from (-1,0,0)."""
    p = np.asarray(p, dtype=float)
    return (p[..., 1] + 1j * p[..., 2]) / (1.0 + p[..., 0])


def poincare_to_hyp(z):
    """Poincare disk -> hyperboloid."""
    z = np.asarray(z, dtype=complex)
    t = np.abs(z) ** 2
    if np.any(t >= 1.0):
        raise ValueError("poincare_to_hyp requires |z| < 1")
    d = 1.0 - t
    out = np.empty(z.shape + (3,), dtype=float)
    out[..., 0] = (1.0 + t) / d
    out[..., 1] = 2.0 * z.real / d
    out[..., 2] = 2.0 * z.imag / d
    return out


def klein_to_poincare(eta):
    """Klein -> Poincare: eta / (1 + sqrt(1-|eta|^2))."""
    eta = np.asarray(eta, dtype=float)
    rho2 = np.sum(eta * eta, axis=-1)
    if np.any(rho2 >= 1.0):
        raise ValueError("klein_to_poincare requires |eta| < 1")
    return _as_complex(eta) / (1.0 + np.sqrt(1.0 - rho2))


def poincare_to_klein(z):
    """Poincare -> Klein: 2z / (1 + |z|^2)."""
    z = np.asarray(z, dtype=complex)
    t = np.abs(z) ** 2
    if np.any(t >= 1.0):
        raise ValueError("poincare_to_klein requires |z| < 1")
    w = 2.0 * z / (1.0 + t)
    return np.stack([w.real, w.imag], axis=-1)


def klein_to_poincare_jacobian(eta):
    """2x2 Jacobian of the Klein -> Poincare chart change at eta."""
    eta = np.asarray(eta, dtype=float)
    rho2 = np.sum(eta * eta, axis=-1)
    if np.any(rho2 > 1.0 - EPSILON_CHART):
        raise ValueError("chart Jacobian requested too close to the boundary")
    L = np.sqrt(1.0 - rho2)
    eye = np.broadcast_to(np.eye(2), eta.shape[:-1] + (2, 2))
    outer = eta[..., :, None] * eta[..., None, :]
    return eye / (1.0 + L)[..., None, None] + outer / (L * (1.0 + L) ** 2)[..., None, None]


def poincare_to_klein_jacobian(z):
    """2x2 Jacobian of the Poincare -> Klein chart change at z."""
    z = np.asarray(z, dtype=complex)
    t = np.abs(z) ** 2
    if np.any(t > 1.0 - EPSILON_CHART):
        raise ValueError("chart Jacobian requested too close to the boundary")
    xy = np.stack([z.real, z.imag], axis=-1)
    eye = np.broadcast_to(np.eye(2), z.shape + (2, 2))
    outer = xy[..., :, None] * xy[..., None, :]
    return 2.0 * eye / (1.0 + t)[..., None, None] - 4.0 * outer / ((1.0 + t) ** 2)[..., None, None]


def dpi_linear(eta, w):
    """Differential of the radial projection at (1, eta) applied to w in R^{1,2}.

    d_{(1,x,y)}Pi(w0,w1,w2) = (w1 - x*w0, w2 - y*w0), returned as a complex number.
    """
    eta = np.asarray(eta, dtype=float)
    w = np.asarray(w, dtype=float)
    u = w[..., 1] - eta[..., 0] * w[..., 0]
    v = w[..., 2] - eta[..., 1] * w[..., 0]
    return u + 1j * v


def dual_plane_eval(v, eta):
    """Height over eta of the spacelike plane labelled by v: <(1,eta), v>."""
    v = np.asarray(v, dtype=float)
    eta = np.asarray(eta, dtype=float)
    return -v[..., 0] + v[..., 1] * eta[..., 0] + v[..., 2] * eta[..., 1]


@dataclass(frozen=True)
class PlaneField:
    """Sampled tangent field on a disk chart ('klein' or 'poincare')."""

    model: str
    points: np.ndarray   # complex chart coordinates
    values: np.ndarray   # complex tangent values

    def __post_init__(self):
        if self.model not in ("klein", "poincare"):
            raise ValueError(f"unknown chart model {self.model!r}")
        if self.points.shape != self.values.shape:
            raise ValueError("points/values length mismatch")


def pushforward_field(field: PlaneField, target_model: str) -> PlaneField:
    """Push a sampled field to the other disk chart via the closed-form Jacobian."""
    if target_model == field.model:
        return field
    pts = np.asarray(field.points, dtype=complex)
    if np.any(np.abs(pts) > 1.0 - EPSILON_CHART):
        raise ValueError("pushforward too close to the boundary")
    xy = np.stack([pts.real, pts.imag], axis=-1)
    if field.model == "klein" and target_model == "poincare":
        jac = klein_to_poincare_jacobian(xy)
        new_pts = klein_to_poincare(xy)
    elif field.model == "poincare" and target_model == "klein":
        jac = poincare_to_klein_jacobian(pts)
        new_pts = _as_complex(poincare_to_klein(pts))
    else:
        raise ValueError(f"unknown chart model {target_model!r}")
    vec = np.stack([field.values.real, field.values.imag], axis=-1)
    out = np.einsum("...ij,...j->...i", jac, vec)
    return PlaneField(target_model, new_pts, _as_complex(out))


@dataclass(frozen=True)
class HPIsometry:
    """Half-Pipe isometry labelled by (A, v) with A in O_0(1,2), v in R^{1,2}."""

    A: np.ndarray
    v: np.ndarray

    @staticmethod
    def identity() -> "HPIsometry":
        return HPIsometry(np.eye(3), np.zeros(3))

    def compose(self, other: "HPIsometry") -> "HPIsometry":
        """self after other (group law of A x + v)."""
        return HPIsometry(self.A @ other.A, self.A @ other.v + self.v)

    def inverse(self) -> "HPIsometry":
        Ainv = J_FORM @ self.A.T @ J_FORM
        return HPIsometry(Ainv, -(Ainv @ self.v))

    def form_defect(self) -> float:
        """Sup-norm of A^T J A - J; zero for exact elements of O(1,2)."""
        return float(np.max(np.abs(self.A.T @ J_FORM @ self.A - J_FORM)))

    def is_time_oriented(self) -> bool:
        return bool((self.A @ np.array([1.0, 0.0, 0.0]))[0] > 0)


def hp_isometry_act(iso: HPIsometry, eta, t):
    """Action of Is(A, v) on the Klein cylinder point (eta, t)."""
    eta = np.asarray(eta, dtype=float)
    t = np.asarray(t, dtype=float)
    lift = np.concatenate([np.ones(eta.shape[:-1] + (1,)), eta], axis=-1)
    img = np.einsum("ij,...j->...i", iso.A, lift)
    new_eta = img[..., 1:] / img[..., :1]
    new_t = t / img[..., 0] + dual_plane_eval(iso.v, new_eta)
    return new_eta, new_t


def boundary_circle_act(A, theta):
    """Induced circle action of A in O_0(1,2): angle of Pi(A (1, e^{i theta})).

    Returns (new_theta, scale) with A(1, e^{i theta}) = scale * (1, e^{i new_theta}).
    """
    theta = np.asarray(theta, dtype=float)
    lift = np.stack([np.ones_like(theta), np.cos(theta), np.sin(theta)], axis=-1)
    img = np.einsum("ij,...j->...i", np.asarray(A, dtype=float), lift)
    scale = img[..., 0]
    return np.arctan2(img[..., 2], img[..., 1]), scale


def rotation_isometry(alpha: float) -> HPIsometry:
    """Rotation of the disk by angle alpha (about the fiber over the center)."""
    c, s = np.cos(alpha), np.sin(alpha)
    A = np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])
    return HPIsometry(A, np.zeros(3))


def boost_to_center(eta) -> HPIsometry:
    """Orientation-preserving isometry (A, 0) with A . eta = 0."""
    eta = np.asarray(eta, dtype=float)
    r = float(np.hypot(eta[0], eta[1]))
    if r >= 1.0:
        raise ValueError("boost_to_center requires |eta| < 1")
    if r == 0.0:
        return HPIsometry.identity()
    u = eta / r
    s = -np.arctanh(r)
    ch, sh = np.cosh(s), np.sinh(s)
    boost = np.array([[ch, sh, 0.0], [sh, ch, 0.0], [0.0, 0.0, 1.0]])
    alpha = np.arctan2(u[1], u[0])
    rot = rotation_isometry(alpha).A
    return HPIsometry(rot @ boost @ rot.T, np.zeros(3))


def random_isometry(rng: np.random.Generator, max_param: float = 1.0,
                    with_translation: bool = True) -> HPIsometry:
    """Random element of Isom_0: exp of a random Killing label, plus a translation.

    exp of a skew-adjoint matrix lands in the identity component by construction.
    """
    sigma = rng.uniform(-1.0, 1.0, size=3)
    norm = np.linalg.norm(sigma)
    if norm > 0:
        sigma *= rng.uniform(0.0, max_param) / norm
    A = expm(killing_matrix(sigma))
    v = rng.uniform(-max_param, max_param, size=3) if with_translation else np.zeros(3)
    return HPIsometry(A, v)
