"""Half-Pipe Plateau solver on the unit disk.

The graph equation in Klein coordinates,
    (1-x^2) u_xx + (1-y^2) u_yy - 2xy u_xy = 0,
reduces in polar coordinates to
    r^2 (1-r^2) u_rr + r u_r + u_tt = 0
because the Hessian contracted twice with eta equals r^2 d_rr.  Fourier
transforming in theta decouples the modes into tridiagonal systems; the
undivided form is discretized so nothing is ever divided by (1-r^2).

An independent per-mode ODE oracle (adaptive integrator, not the FD stencil)
is provided for verification.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import RectBivariateSpline
from scipy.linalg import solve_banded

from .circle import BoundaryField
from .envelope import PolarGrid

EPSILON_POLE = 1e-6       # shooting start for the mode oracle
ODE_TOL = 1e-10           # adaptive-integrator tolerance
_EDGE = 1e-10             # integration stops this close to r = 1


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class DiskField:
    """Scalar field on the polar grid; the last ring holds the Dirichlet data."""

    n_r: int
    n_theta: int
    values: np.ndarray   # (n_r+1, n_theta)

    @property
    def grid(self) -> PolarGrid:
        return PolarGrid(self.n_r, self.n_theta)

    @property
    def boundary(self) -> np.ndarray:
        return self.values[-1]


@dataclass(frozen=True)
class SolveReport:
    residual_sup: float
    iterations: int
    n_r: int
    n_theta: int
    solver: str = "fourier-tridiagonal"

    def as_dict(self) -> dict:
        return {
            "residual_sup": self.residual_sup,
            "iterations": self.iterations,
            "n_r": self.n_r,
            "n_theta": self.n_theta,
            "solver": self.solver,
        }


def _frobenius_coeffs(k: int, mu: float, n_terms: int = 60) -> np.ndarray:
    """Series coefficients of the local solution s^mu * sum a_n s^n at r = 1.

    s = 1 - r; the indicial exponents of the mode equation at the boundary are
    0 and 3/2, so solutions are only C^{1,1/2} there.  These series let the
    near-boundary stencils annihilate the true local solution space instead of
    polynomials, which restores second-order convergence.
    """
    a = np.zeros(n_terms)
    a[0] = 1.0
    for m in range(1, n_terms):
        denom = (m + mu) * (2.0 * (m + mu) - 3.0)
        acc = a[m - 1] * (-5.0 * (m - 1 + mu) * (m - 2 + mu) + (m - 1 + mu) - k * k)
        if m >= 2:
            acc += a[m - 2] * 4.0 * (m - 2 + mu) * (m - 3 + mu)
        if m >= 3:
            acc -= a[m - 3] * (m - 3 + mu) * (m - 4 + mu)
        a[m] = -acc / denom
    return a


def _branch_eval(coeffs: np.ndarray, mu: float, s: float) -> float:
    acc = 0.0
    for c in coeffs[::-1]:
        acc = acc * s + c
    return acc * s ** mu


def _boundary_zone(k: int) -> float:
    # Series partial sums grow like exp(k sqrt(2 s)); keep that bounded.
    return min(0.12, 15.7 / (k * k)) if k >= 2 else 0.0


def _mode_system(n_r: int, k: int):
    """Banded matrix (ab form) and Dirichlet column for one Fourier mode.

    Unknowns are u_1 .. u_{n_r-1}; u_0 is eliminated (regularity at the pole)
    and u_{n_r} is the Dirichlet value.  Rows whose node lies in the boundary
    zone use stencils exact on the local Frobenius basis.
    """
    h = 1.0 / n_r
    r = np.arange(1, n_r) * h
    w = r * r * (1.0 - r * r) / (h * h)
    lo = w - r / (2.0 * h)
    di = -2.0 * w - float(k * k)
    up = w + r / (2.0 * h)

    m = n_r - 1
    ab = np.zeros((3, m))
    ab[0, 1:] = up[:-1]
    ab[1, :] = di
    ab[2, :-1] = lo[1:]
    if k == 0:
        # Neumann at the pole: one-sided u'(0)=0 gives u_0 = (4 u_1 - u_2)/3.
        ab[1, 0] = di[0] + 4.0 * lo[0] / 3.0
        ab[0, 1] = up[0] - lo[0] / 3.0
    dirichlet = np.zeros(m)
    dirichlet[-1] = up[-1]

    s_zone = _boundary_zone(k)
    if s_zone > 0.0:
        c0 = _frobenius_coeffs(k, 0.0)
        c1 = _frobenius_coeffs(k, 1.5)
        for i in range(max(2, n_r - int(s_zone / h) - 1), n_r):
            s_i = 1.0 - i * h
            if s_i > s_zone:
                continue
            samples_v0 = [_branch_eval(c0, 0.0, s_i + h),
                          _branch_eval(c0, 0.0, s_i),
                          _branch_eval(c0, 0.0, max(s_i - h, 0.0))]
            samples_v1 = [_branch_eval(c1, 1.5, s_i + h),
                          _branch_eval(c1, 1.5, s_i),
                          _branch_eval(c1, 1.5, max(s_i - h, 0.0))]
            st = np.cross(samples_v0, samples_v1)
            if st[1] == 0.0:
                continue
            st *= di[i - 1] / st[1]
            j = i - 1
            ab[1, j] = st[1]
            ab[2, j - 1] = st[0]
            if j + 1 < m:
                ab[0, j + 1] = st[2]
            else:
                dirichlet[-1] = st[2]
    return ab, dirichlet


def solve_mean_surface(X: BoundaryField, n_r: int, n_theta: int):
    """Solve the Plateau problem with boundary data phi_X.

    Returns (DiskField, SolveReport).  The residual in the report is measured
    on the undivided Cartesian form with an independent discretization
    (4th-order radial differences + spectral theta), not the solver stencil.
    """
    if not _is_power_of_two(n_theta) or n_theta < 32:
        raise ValueError("n_theta must be a power of two >= 32")
    if n_r < 16:
        raise ValueError("n_r must be >= 16")

    theta = 2.0 * np.pi * np.arange(n_theta) / n_theta
    phi = X.phi_eval(theta)
    phi_hat = np.fft.rfft(phi)

    modes = np.zeros((n_r + 1, phi_hat.size), dtype=complex)
    modes[-1] = phi_hat
    for k in range(phi_hat.size):
        if abs(phi_hat[k]) == 0.0:
            continue
        ab, dirichlet = _mode_system(n_r, k)
        rhs = np.zeros(n_r - 1, dtype=complex)
        rhs[-1] = -dirichlet[-1] * phi_hat[k]
        try:
            inner = solve_banded((1, 1), ab, rhs)
        except Exception as exc:  # singular system must not happen
            raise ArithmeticError(f"tridiagonal solve failed for mode {k}") from exc
        if not np.all(np.isfinite(inner)):
            raise ArithmeticError(f"tridiagonal solve diverged for mode {k}")
        modes[1:n_r, k] = inner
        modes[0, k] = (4.0 * inner[0] - inner[1]) / 3.0 if k == 0 else 0.0

    values = np.fft.irfft(modes, n=n_theta, axis=1)
    values[-1] = phi   # boundary ring equals the input samples exactly
    fld = DiskField(n_r, n_theta, values)
    ev = SurfaceEvaluator(fld)
    residual = float(np.max(np.abs(ev.cartesian_residual_grid()[1:n_r])))
    report = SolveReport(residual, iterations=phi_hat.size, n_r=n_r, n_theta=n_theta)
    return fld, report


def _series_c2(k: int) -> float:
    # f = r^k (1 + c2 r^2 + ...) solves the mode ODE; c2 from the series recursion.
    return k * (k - 1) / (4.0 * (k + 1.0))


def radial_mode_oracle(k: int, r_samples) -> np.ndarray:
    """Regular radial profile f_k with f_k(1) = 1, by adaptive shooting.

    Independent of the finite-difference stencil: integrates
    r^2(1-r^2) f'' + r f' - k^2 f = 0 from r = EPSILON_POLE with the
    asymptotic data f ~ r^k (1 + c2 r^2).
    """
    if k < 0 or int(k) != k:
        raise ValueError("mode index must be a nonnegative integer")
    r = np.atleast_1d(np.asarray(r_samples, dtype=float))
    if np.any((r < 0) | (r > 1)):
        raise ValueError("radial samples must lie in [0, 1]")
    if k == 0:
        return np.ones_like(r)

    c2 = _series_c2(k)
    eps = EPSILON_POLE
    # Work with f scaled by eps^{-k} so the start value is O(1).
    y0 = np.array([1.0 + c2 * eps * eps, k / eps + c2 * (k + 2.0) * eps])

    def rhs(t, y):
        return [y[1], (k * k * y[0] - t * y[1]) / (t * t * (1.0 - t * t))]

    end = 1.0 - _EDGE
    sol = solve_ivp(rhs, (eps, end), y0, method="DOP853",
                    rtol=ODE_TOL, atol=1e-14, dense_output=True)
    if not sol.success:
        raise ArithmeticError(f"mode oracle integration failed for k={k}")
    f_end, fp_end = sol.y[:, -1]
    norm = f_end + _EDGE * fp_end   # first-order step onto r = 1

    out = np.empty_like(r)
    tiny = r < eps
    mid = (~tiny) & (r < end)
    out[tiny] = (r[tiny] ** k) * (1.0 + c2 * r[tiny] ** 2) / (eps ** k * norm)
    if np.any(mid):
        out[mid] = sol.sol(r[mid])[0] / norm
    out[r >= end] = 1.0
    return out


def _fd_weights(offsets, order: int) -> np.ndarray:
    """Finite-difference weights on integer offsets for the given derivative."""
    offsets = np.asarray(offsets, dtype=float)
    n = offsets.size
    V = np.vander(offsets, n, increasing=True).T   # V[m, j] = o_j^m
    rhs = np.zeros(n)
    rhs[order] = float(math.factorial(order))
    w = np.linalg.solve(V, rhs)
    return w - w.sum() / n   # derivative weights sum to zero exactly


def _diff_matrix(n_nodes: int, h: float, order: int) -> np.ndarray:
    """Dense differentiation matrix: 4th-order accurate, one-sided at edges."""
    stencil = 5 if order == 1 else 6
    center = stencil // 2
    D = np.zeros((n_nodes, n_nodes))
    for i in range(n_nodes):
        left = min(max(i - center, 0), n_nodes - stencil)
        offs = np.arange(left - i, left - i + stencil)
        D[i, left:left + stencil] = _fd_weights(offs, order)
    return D / h ** order


class SurfaceEvaluator:
    """Derivative grids and bicubic interpolants for a solved disk field.

    Differentiation follows one fixed recipe: spectral in theta, 4th-order
    differences in r on the solver grid, then bicubic interpolation of each
    derivative field.  Pole rows come from the low Fourier modes.
    """

    _PAD = 4

    def __init__(self, field: DiskField):
        self.field = field
        n_r, n_t = field.n_r, field.n_theta
        self.r = np.arange(n_r + 1) / n_r
        self.theta = 2.0 * np.pi * np.arange(n_t) / n_t
        u = field.values

        D1 = _diff_matrix(n_r + 1, 1.0 / n_r, 1)
        D2 = _diff_matrix(n_r + 1, 1.0 / n_r, 2)

        u_hat = np.fft.rfft(u, axis=1)
        k = np.arange(u_hat.shape[1])
        u_t = np.fft.irfft(1j * k * u_hat, n=n_t, axis=1)
        u_tt = np.fft.irfft(-(k * k) * u_hat, n=n_t, axis=1)
        u_r = D1 @ u
        u_rr = D2 @ u
        u_rt = D1 @ u_t

        inv_r = np.zeros_like(self.r)
        inv_r[1:] = 1.0 / self.r[1:]
        inv_r = inv_r[:, None]
        ct = np.cos(self.theta)[None, :]
        st = np.sin(self.theta)[None, :]
        cs = ct * st
        ux = ct * u_r - st * u_t * inv_r
        uy = st * u_r + ct * u_t * inv_r
        uxx = (ct * ct * u_rr - 2 * cs * u_rt * inv_r + st * st * u_tt * inv_r ** 2
               + st * st * u_r * inv_r + 2 * cs * u_t * inv_r ** 2)
        uyy = (st * st * u_rr + 2 * cs * u_rt * inv_r + ct * ct * u_tt * inv_r ** 2
               + ct * ct * u_r * inv_r - 2 * cs * u_t * inv_r ** 2)
        uxy = (cs * u_rr + (ct * ct - st * st) * u_rt * inv_r
               - cs * u_tt * inv_r ** 2 - cs * u_r * inv_r
               - (ct * ct - st * st) * u_t * inv_r ** 2)

        # Pole rows from the radial mode profiles: gradient from mode 1,
        # Hessian from modes 0 and 2; higher modes vanish to third order.
        n_half = u_hat.shape[1]
        a = u_hat.real / n_t * 2.0
        a[:, 0] *= 0.5
        b = -u_hat.imag / n_t * 2.0
        ux[0] = D1[0] @ a[:, 1] if n_half > 1 else 0.0
        uy[0] = D1[0] @ b[:, 1] if n_half > 1 else 0.0
        a0pp = D2[0] @ a[:, 0]
        a2pp = D2[0] @ a[:, 2] if n_half > 2 else 0.0
        b2pp = D2[0] @ b[:, 2] if n_half > 2 else 0.0
        uxx[0] = a0pp + a2pp
        uyy[0] = a0pp - a2pp
        uxy[0] = b2pp

        self._grids = {"u": u, "ux": ux, "uy": uy, "uxx": uxx, "uxy": uxy, "uyy": uyy}

    @cached_property
    def _splines(self) -> dict:
        pad = self._PAD
        theta_ext = np.concatenate([self.theta[-pad:] - 2.0 * np.pi,
                                    self.theta, self.theta[:pad] + 2.0 * np.pi])
        out = {}
        for name, g in self._grids.items():
            g_ext = np.concatenate([g[:, -pad:], g, g[:, :pad]], axis=1)
            out[name] = RectBivariateSpline(self.r, theta_ext, g_ext, kx=3, ky=3, s=0)
        return out

    def _ev(self, name: str, eta):
        eta = np.asarray(eta, dtype=float)
        r = np.hypot(eta[..., 0], eta[..., 1])
        t = np.mod(np.arctan2(eta[..., 1], eta[..., 0]), 2.0 * np.pi)
        return self._splines[name].ev(r, t)

    def u(self, eta):
        return self._ev("u", eta)

    def grad(self, eta):
        return np.stack([self._ev("ux", eta), self._ev("uy", eta)], axis=-1)

    def hess(self, eta):
        """Euclidean Hessian of u-bar at eta, shape (..., 2, 2)."""
        uxx = self._ev("uxx", eta)
        uxy = self._ev("uxy", eta)
        uyy = self._ev("uyy", eta)
        out = np.empty(np.shape(uxx) + (2, 2))
        out[..., 0, 0] = uxx
        out[..., 0, 1] = out[..., 1, 0] = uxy
        out[..., 1, 1] = uyy
        return out

    def cartesian_residual_grid(self) -> np.ndarray:
        """Residual of the undivided Cartesian form at the grid nodes."""
        x = self.r[:, None] * np.cos(self.theta)[None, :]
        y = self.r[:, None] * np.sin(self.theta)[None, :]
        g = self._grids
        return ((1.0 - x * x) * g["uxx"] + (1.0 - y * y) * g["uyy"]
                - 2.0 * x * y * g["uxy"])


def to_hyperboloid(ev: SurfaceEvaluator, eta) -> np.ndarray:
    """Potential on the hyperboloid: u(Pi^{-1}(eta)) = u_bar(eta)/sqrt(1-|eta|^2)."""
    eta = np.asarray(eta, dtype=float)
    rho = np.hypot(eta[..., 0], eta[..., 1])
    limit = 1.0 - 1.0 / ev.field.n_r
    if np.any(rho > limit):
        raise ValueError("to_hyperboloid rejects boundary-adjacent queries")
    return ev.u(eta) / np.sqrt(1.0 - rho * rho)


def hyperbolic_residual(ev: SurfaceEvaluator, r_max: float = 0.9) -> float:
    """Sup of |Laplace-Beltrami u - 2u| over the safe interior subgrid.

    Evaluated through the chart identity: the hyperbolic defect at eta equals
    sqrt(1-|eta|^2) times the undivided Cartesian residual.
    """
    res = ev.cartesian_residual_grid()
    r = ev.r
    rows = (r > 0) & (r <= r_max)
    factor = np.sqrt(1.0 - r[rows] ** 2)[:, None]
    return float(np.max(np.abs(factor * res[rows])))
