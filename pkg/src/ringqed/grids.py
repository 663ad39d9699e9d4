"""Uniform real-space grids and 4th-order finite-difference operators.

Grids are square-celled, centered, with hard-wall (Dirichlet) boundaries:
everything outside the box is treated as zero.  Fields live on arrays of
shape (ny, nx); y runs along axis 0 and x along axis 1.  A grid with
ny == 1 degenerates to a 1D wire along x (no y kinetic term, y == 0).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# 4th-order central stencils on a uniform grid.
_LAP_C0 = -5.0 / 2.0
_LAP_C1 = 4.0 / 3.0
_LAP_C2 = -1.0 / 12.0
_GRAD_C1 = 2.0 / 3.0
_GRAD_C2 = -1.0 / 12.0


@dataclass(frozen=True)
class Grid2D:
    """Centered uniform grid on [-(n-1)/2, +(n-1)/2] * dx (+ origin)."""

    nx: int
    ny: int
    dx: float
    origin: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self) -> None:
        if self.nx < 5 or (self.ny != 1 and self.ny < 5):
            raise ValueError("grid too small for the 5-point stencil")
        if not self.dx > 0.0:
            raise ValueError("dx must be positive")

    @property
    def npoints(self) -> int:
        return self.nx * self.ny

    @property
    def ndim_active(self) -> int:
        return 1 if self.ny == 1 else 2

    @property
    def weight(self) -> float:
        """Quadrature weight of one grid point (Riemann sum)."""
        return self.dx**self.ndim_active

    def axis_coords(self, n: int, offset: float) -> np.ndarray:
        return (np.arange(n) - (n - 1) / 2.0) * self.dx + offset

    @property
    def xs(self) -> np.ndarray:
        return self.axis_coords(self.nx, self.origin[0])

    @property
    def ys(self) -> np.ndarray:
        if self.ny == 1:
            return np.zeros(1)
        return self.axis_coords(self.ny, self.origin[1])

    def meshes(self) -> tuple[np.ndarray, np.ndarray]:
        """X and Y coordinate fields, each shaped (ny, nx)."""
        return np.meshgrid(self.xs, self.ys)

    def rsq(self) -> np.ndarray:
        x, y = self.meshes()
        return x * x + y * y


@dataclass(frozen=True)
class MexicanHatParams:
    """V(r) = xi1/2 r^2 + xi2 exp(-r^2 / xi3^2)  (all in Hartree a.u.)."""

    xi1: float = 0.7827
    xi2: float = 17.70
    xi3: float = 0.997

    def __post_init__(self) -> None:
        if self.xi1 < 0.0 or self.xi2 < 0.0 or self.xi3 <= 0.0:
            raise ValueError("need xi1, xi2 >= 0 and xi3 > 0")

    def radial(self, rsq: np.ndarray | float) -> np.ndarray | float:
        return 0.5 * self.xi1 * rsq + self.xi2 * np.exp(-rsq / self.xi3**2)

    def ring_radius(self) -> float:
        """Radius of the potential minimum (0 if the hat is trivial)."""
        # dV/dr = 0 at r^2 = xi3^2 * log(2 xi2 / (xi1 xi3^2)); keep the
        # ring only when the log argument exceeds 1.
        arg = 2.0 * self.xi2 / (self.xi1 * self.xi3**2)
        if arg <= 1.0:
            return 0.0
        return self.xi3 * np.sqrt(np.log(arg))


def potential_on_grid(grid: Grid2D, params: MexicanHatParams) -> np.ndarray:
    return params.radial(grid.rsq())


def _add_shifted(out: np.ndarray, x: np.ndarray, axis: int, shift: int, coeff: float) -> None:
    """out[..., i, ...] += coeff * x[..., i+shift, ...] with zero outside."""
    if shift == 0:
        out += coeff * x
        return
    src = [slice(None)] * x.ndim
    dst = [slice(None)] * x.ndim
    if shift > 0:
        dst[axis] = slice(None, -shift)
        src[axis] = slice(shift, None)
    else:
        dst[axis] = slice(-shift, None)
        src[axis] = slice(None, shift)
    out[tuple(dst)] += coeff * x[tuple(src)]


def laplacian(grid: Grid2D, x: np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
    """4th-order Laplacian of x (shape (..., ny, nx)), Dirichlet walls."""
    if out is None:
        out = np.zeros_like(x)
    else:
        out[...] = 0.0
    inv = 1.0 / grid.dx**2
    axes = [x.ndim - 1] if grid.ny == 1 else [x.ndim - 2, x.ndim - 1]
    out += (len(axes) * _LAP_C0 * inv) * x
    for ax in axes:
        for shift, c in ((1, _LAP_C1), (-1, _LAP_C1), (2, _LAP_C2), (-2, _LAP_C2)):
            _add_shifted(out, x, ax, shift, c * inv)
    return out


def gradient_axis(grid: Grid2D, x: np.ndarray, axis: int) -> np.ndarray:
    """4th-order first derivative along a grid axis (0 = y, 1 = x)."""
    if axis == 0 and grid.ny == 1:
        return np.zeros_like(x)
    out = np.zeros_like(x)
    ax = x.ndim - 2 + axis
    inv = 1.0 / grid.dx
    for shift, c in ((1, _GRAD_C1), (-1, -_GRAD_C1), (2, _GRAD_C2), (-2, -_GRAD_C2)):
        _add_shifted(out, x, ax, shift, c * inv)
    return out


def apply_hamiltonian(grid: Grid2D, potential: np.ndarray, x: np.ndarray) -> np.ndarray:
    """(-1/2 Laplacian + V) x for x shaped (..., ny, nx)."""
    out = laplacian(grid, x)
    out *= -0.5
    out += potential * x
    return out


def dense_hamiltonian(grid: Grid2D, potential: np.ndarray) -> np.ndarray:
    """Dense matrix of -1/2 Laplacian + V (small grids only)."""
    n = grid.npoints
    if n > 5000:
        raise ValueError("dense Hamiltonian requested for a large grid")
    h = np.zeros((n, n))
    e = np.zeros((grid.ny, grid.nx))
    flat = e.reshape(-1)
    for j in range(n):
        flat[j] = 1.0
        h[:, j] = apply_hamiltonian(grid, potential, e).reshape(-1)
        flat[j] = 0.0
    return 0.5 * (h + h.T)
