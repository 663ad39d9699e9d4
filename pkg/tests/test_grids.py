from __future__ import annotations

import numpy as np
import pytest

from ringqed.grids import (
    Grid2D,
    MexicanHatParams,
    apply_hamiltonian,
    dense_hamiltonian,
    gradient_axis,
    laplacian,
    potential_on_grid,
)


def test_grid_validation():
    with pytest.raises(ValueError):
        Grid2D(nx=4, ny=5, dx=0.1)
    with pytest.raises(ValueError):
        Grid2D(nx=9, ny=9, dx=-0.1)
    g = Grid2D(nx=32, ny=1, dx=0.2)  # even sizes are allowed
    assert g.ndim_active == 1
    assert np.isclose(g.xs[0], -g.xs[-1])


def test_coordinates_centered():
    g = Grid2D(nx=7, ny=5, dx=0.5)
    x, y = g.meshes()
    assert x.shape == (5, 7)
    assert np.isclose(x.sum(), 0.0)
    assert np.isclose(y.sum(), 0.0)
    assert np.isclose(g.weight, 0.25)


def test_wire_grid_has_no_y_extent():
    g = Grid2D(nx=11, ny=1, dx=0.3)
    _, y = g.meshes()
    assert np.all(y == 0.0)
    assert g.weight == pytest.approx(0.3)


def test_laplacian_polynomial_exactness():
    # The 4th-order stencil differentiates quartics exactly away from edges.
    g = Grid2D(nx=41, ny=41, dx=0.17)
    x, y = g.meshes()
    f = x**4 - 2 * x**2 * y**2 + 3 * y**3
    exact = 12 * x**2 - 4 * (x**2 + y**2) + 18 * y
    got = laplacian(g, f)
    inner = (slice(4, -4), slice(4, -4))
    assert np.max(np.abs(got[inner] - exact[inner])) < 1e-9


def test_gradient_polynomial_exactness():
    g = Grid2D(nx=33, ny=29, dx=0.21)
    x, y = g.meshes()
    f = x**4 + y**4 + x * y
    inner = (slice(4, -4), slice(4, -4))
    gx = gradient_axis(g, f, 1)
    gy = gradient_axis(g, f, 0)
    assert np.max(np.abs((gx - (4 * x**3 + y))[inner])) < 1e-9
    assert np.max(np.abs((gy - (4 * y**3 + x))[inner])) < 1e-9


def test_commutator_identity_exact():
    # [D2, x] = 2 D1 holds exactly on the clipped uniform grid, which is
    # what makes the gradient and dipole couplings mutually consistent.
    rng = np.random.default_rng(5)
    g = Grid2D(nx=25, ny=21, dx=0.3)
    x, _ = g.meshes()
    f = rng.standard_normal((21, 25))
    lhs = laplacian(g, x * f) - x * laplacian(g, f)
    rhs = 2.0 * gradient_axis(g, f, 1)
    assert np.max(np.abs(lhs - rhs)) < 1e-12 * max(1.0, np.max(np.abs(rhs)))


def test_gradient_antisymmetric_under_dirichlet():
    rng = np.random.default_rng(6)
    g = Grid2D(nx=19, ny=17, dx=0.25)
    f = rng.standard_normal((17, 19))
    h = rng.standard_normal((17, 19))
    for axis in (0, 1):
        left = np.sum(f * gradient_axis(g, h, axis))
        right = -np.sum(gradient_axis(g, f, axis) * h)
        assert left == pytest.approx(right, abs=1e-12)


def test_laplacian_batched_matches_loop():
    rng = np.random.default_rng(7)
    g = Grid2D(nx=15, ny=13, dx=0.4)
    batch = rng.standard_normal((6, 13, 15))
    got = laplacian(g, batch)
    for i in range(6):
        assert np.allclose(got[i], laplacian(g, batch[i]), atol=1e-14)


def test_harmonic_oscillator_energies_2d():
    g = Grid2D(nx=69, ny=69, dx=0.2)
    pot = 0.5 * g.rsq()
    h = dense_hamiltonian(g, pot)
    w = np.linalg.eigvalsh(h)[:3]
    assert np.allclose(w, [1.0, 2.0, 2.0], atol=1e-3)


def test_harmonic_oscillator_energies_wire():
    g = Grid2D(nx=201, ny=1, dx=0.07)
    x, _ = g.meshes()
    h = dense_hamiltonian(g, 0.5 * x * x)
    w = np.linalg.eigvalsh(h)[:3]
    assert np.allclose(w, [0.5, 1.5, 2.5], atol=5e-6)


def test_finite_difference_order():
    # Halving dx should cut the eigenvalue error by about 2^4.
    errs = []
    for dx in (0.2, 0.1):
        n = int(round(14.0 / dx)) + 1
        g = Grid2D(nx=n, ny=1, dx=dx)
        x, _ = g.meshes()
        w = np.linalg.eigvalsh(dense_hamiltonian(g, 0.5 * x * x))[0]
        errs.append(abs(w - 0.5))
    ratio = errs[0] / errs[1]
    assert 8.0 < ratio < 40.0


def test_dense_matches_matrix_free():
    rng = np.random.default_rng(8)
    g = Grid2D(nx=17, ny=11, dx=0.3)
    pot = rng.standard_normal((11, 17))
    h = dense_hamiltonian(g, pot)
    assert np.max(np.abs(h - h.T)) == 0.0
    v = rng.standard_normal(g.npoints)
    direct = apply_hamiltonian(g, pot, v.reshape(11, 17)).reshape(-1)
    assert np.allclose(h @ v, direct, atol=1e-12)


def test_mexican_hat_shape_and_ring_radius():
    params = MexicanHatParams()
    r = np.linspace(0.0, 4.0, 4001)
    v = params.radial(r * r)
    r_min = r[np.argmin(v)]
    assert params.ring_radius() == pytest.approx(r_min, abs=2e-3)
    # central barrier above the ring minimum by construction
    assert v[0] > np.min(v) + 10.0


def test_potential_on_grid_matches_radial():
    g = Grid2D(nx=21, ny=21, dx=0.2)
    params = MexicanHatParams(xi1=0.5, xi2=3.0, xi3=1.2)
    pot = potential_on_grid(g, params)
    assert pot.shape == (21, 21)
    assert np.allclose(pot, params.radial(g.rsq()), atol=1e-14)
