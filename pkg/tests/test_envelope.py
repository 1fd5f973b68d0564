import itertools

import numpy as np

from halfpipe.circle import (BoundaryField, boundary_action, from_fourier,
                             killing_boundary)
from halfpipe.envelope import (HULL_TOL, PolarGrid, earthquake_eval,
                               envelopes, recenter_isometry, width)
from halfpipe.minkowski import dpi_linear, mink_cross, random_isometry


def brute_force_envelopes(X: BoundaryField, queries):
    """Max/min over all boundary-triple affine interpolants that stay
    below/above every sample; independent of the hull code."""
    theta = X.theta
    pts = np.stack([np.cos(theta), np.sin(theta), X.phi], axis=-1)
    n = len(pts)
    lower, upper = [], []
    for i, j, k in itertools.combinations(range(n), 3):
        p, q, r = pts[i], pts[j], pts[k]
        normal = np.cross(q - p, r - p)
        if abs(normal[2]) < 1e-12:
            continue
        # plane z = a + b x + c y through the three graph points
        b, c = -normal[0] / normal[2], -normal[1] / normal[2]
        a = p[2] - b * p[0] - c * p[1]
        vals = a + b * pts[:, 0] + c * pts[:, 1]
        if np.all(vals <= X.phi + 1e-11):
            lower.append((a, b, c))
        if np.all(vals >= X.phi - 1e-11):
            upper.append((a, b, c))
    lower = np.asarray(lower)
    upper = np.asarray(upper)
    q = np.asarray(queries)
    lo = np.max(lower[:, 0][None] + np.outer(q[:, 0], lower[:, 1])
                + np.outer(q[:, 1], lower[:, 2]), axis=1)
    hi = np.min(upper[:, 0][None] + np.outer(q[:, 0], upper[:, 1])
                + np.outer(q[:, 1], upper[:, 2]), axis=1)
    return lo, hi


def test_affine_data_gives_flat_hull():
    grid = PolarGrid(32, 64)
    X = killing_boundary([-1.0, 0.0, 0.0], 64)      # phi = 1
    env = envelopes(X, grid)
    np.testing.assert_allclose(env.phi_minus, 1.0, atol=1e-12)
    np.testing.assert_allclose(env.phi_plus, 1.0, atol=1e-12)
    np.testing.assert_allclose(env.width_field, 0.0, atol=1e-12)

    Xc = killing_boundary([0.0, 1.0, 0.0], 64)      # phi = cos -> eta_1
    env = envelopes(Xc, grid)
    eta1 = grid.points()[..., 0]
    np.testing.assert_allclose(env.phi_minus, eta1, atol=1e-12)
    np.testing.assert_allclose(env.phi_plus, eta1, atol=1e-12)
    assert width(Xc, grid, env).value == 0.0


def test_envelopes_match_brute_force():
    X = from_fourier([0, 0, 1.0], [], n=64)
    grid = PolarGrid(16, 64)
    env = envelopes(X, grid)
    queries = np.array([[0.0, 0.0], [0.25, 0.0], [0.0, 0.5],
                        [-0.375, 0.25], [0.5, 0.5]])
    lo, hi = brute_force_envelopes(X, queries)
    for (e1, e2), l, h in zip(queries, lo, hi):
        i, j = grid.nearest_node([e1, e2])
        vals_lo = (env.lower_planes[:, 0] + env.lower_planes[:, 1] * e1
                   + env.lower_planes[:, 2] * e2)
        vals_hi = (env.upper_planes[:, 0] + env.upper_planes[:, 1] * e1
                   + env.upper_planes[:, 2] * e2)
        assert abs(np.max(vals_lo) - l) < 1e-9
        assert abs(np.min(vals_hi) - h) < 1e-9


def test_envelope_regression_cos2():
    # Regression baseline at n=512 samples, 128x512 grid.
    X = from_fourier([0, 0, 1.0], [], n=512)
    grid = PolarGrid(128, 512)
    env = envelopes(X, grid)
    assert abs(env.phi_minus[0, 0] - (-1.0)) < 1e-3
    assert abs(env.phi_plus[0, 0] - 1.0) < 1e-3
    w = width(X, grid, env)
    assert abs(w.value - 2.0) < 1e-3
    assert np.hypot(*w.arg_eta) < 0.05


def test_sandwich_and_boundary_consistency():
    rng = np.random.default_rng(6)
    grid = PolarGrid(32, 128)
    for _ in range(5):
        a = rng.uniform(-1, 1, 5)
        b = rng.uniform(-1, 1, 4)
        X = from_fourier(a, b, n=128)
        env = envelopes(X, grid)
        assert np.all(env.phi_minus <= env.phi_plus + HULL_TOL)
        assert np.all(env.width_field >= 0.0)
        # envelopes approach the data at the boundary ring
        phi = X.phi_eval(grid.theta)
        ring = grid.n_r - 1
        gap = np.max(np.maximum(phi - env.phi_plus[ring] - 0.2,
                                env.phi_minus[ring] - phi - 0.2))
        assert gap <= 0.0


def test_midpoint_convexity_along_rays():
    X = from_fourier([0, 0, 1.0, 0.3], [], n=256)
    grid = PolarGrid(64, 128)
    env = envelopes(X, grid)
    # discrete midpoint test along each radial grid line
    pm = env.phi_minus
    mid = 0.5 * (pm[:-2] + pm[2:])
    assert np.all(pm[1:-1] <= mid + 1e-9)
    pp = env.phi_plus
    midp = 0.5 * (pp[:-2] + pp[2:])
    assert np.all(pp[1:-1] >= midp - 1e-9)


def test_width_isometry_invariance():
    X = from_fourier([0, 0, 1.0], [], n=256)
    grid = PolarGrid(96, 256)
    base = width(X, grid).value
    rng = np.random.default_rng(12)
    slack = 5.0 * (1.0 / grid.n_r + 2.0 * np.pi / grid.n_theta) * 2.0
    for _ in range(5):
        iso = random_isometry(rng, 1.5)
        w2 = width(boundary_action(X, iso), grid).value
        assert abs(w2 - base) <= slack


def test_earthquake_on_killing_field():
    sigma = np.array([0.5, -0.3, 0.8])
    X = killing_boundary(sigma, 128)
    grid = PolarGrid(32, 128)
    env = envelopes(X, grid)
    for eta in ([0.0, 0.0], [0.3, 0.4], [-0.6, 0.1]):
        got = earthquake_eval(X, env, np.asarray(eta))
        lift = np.array([1.0, eta[0], eta[1]])
        expect = dpi_linear(np.asarray(eta), mink_cross(lift, sigma))
        assert abs(got - expect) < 1e-12

    zero = BoundaryField(np.zeros(128))
    env0 = envelopes(zero, grid)
    assert earthquake_eval(zero, env0, np.array([0.2, 0.1])) == 0.0


def test_earthquake_boundary_refinement():
    # sup over the outer ring decreases when boundary sampling refines
    grid = PolarGrid(160, 512)
    devs = []
    for n in (256, 1024):
        X = from_fourier([0, 0, 1.0], [], n=n)
        env = envelopes(X, grid)
        worst = 0.0
        for j in range(0, 512, 8):
            t = 2 * np.pi * j / 512
            eta = 0.95 * np.array([np.cos(t), np.sin(t)])
            worst = max(worst, abs(earthquake_eval(X, env, eta) - X.field_eval(t)))
        devs.append(worst)
    assert devs[1] < devs[0]


def test_recenter_isometry_identity_case():
    # lower envelope already supported by the zero plane at the center
    theta = 2 * np.pi * np.arange(64) / 64
    X = BoundaryField(1.0 - np.cos(2 * theta), "trig")   # phi >= 0, min 0
    iso = recenter_isometry(X, np.array([0.0, 0.0]), PolarGrid(32, 64))
    assert np.max(np.abs(iso.A - np.eye(3))) < 1e-12
    # Killing part only subtracts the supporting plane, which is z = 0 here
    assert np.max(np.abs(iso.v)) < 1e-9


def test_recenter_kills_killing_fields():
    sigma = np.array([0.7, 0.2, -0.4])
    X = killing_boundary(sigma, 128)
    iso = recenter_isometry(X, np.array([0.35, -0.2]), PolarGrid(32, 128))
    acted = boundary_action(X, iso)
    assert np.max(np.abs(acted.phi)) < 1e-9


def test_recentered_support_bound():
    # After recentering, 0 <= phi <= 2 (phi+(0) - phi-(0)) for random fields.
    rng = np.random.default_rng(21)
    grid = PolarGrid(48, 128)
    for _ in range(10):
        a = rng.uniform(-1, 1, 4)
        b = rng.uniform(-1, 1, 3)
        X = from_fourier(a, b, n=128)
        for _ in range(10):
            rho = np.sqrt(rng.uniform(0, 0.64))
            ang = rng.uniform(0, 2 * np.pi)
            eta = rho * np.array([np.cos(ang), np.sin(ang)])
            iso = recenter_isometry(X, eta, grid)
            Xr = boundary_action(X, iso)
            env = envelopes(Xr, grid)
            gap = env.phi_plus[0, 0] - env.phi_minus[0, 0]
            tol = 0.02 * max(1.0, float(np.max(np.abs(Xr.phi))))
            assert Xr.phi.min() >= -tol           # resampling slack
            assert Xr.phi.max() <= 2.0 * gap + tol


def test_width_reports_argument():
    X = from_fourier([0, 0, 1.0], [], n=256)
    grid = PolarGrid(64, 128)
    res = width(X, grid)
    i, j = grid.nearest_node(res.arg_eta)
    assert env_value_close(X, grid, res, i, j)


def env_value_close(X, grid, res, i, j):
    env = envelopes(X, grid)
    r = grid.r[i]
    val = (env.phi_plus[i, j] - env.phi_minus[i, j]) / np.sqrt(1 - r * r)
    return abs(val - res.value) < 1e-12
