"""Bare electronic eigenstates on the grid and their matrix elements.

Eigenpairs come from the matrix-free Lanczos solver; orbitals are
normalized under the Riemann quadrature weight.  Degenerate multiplets
are never split by truncation, and within each multiplet the basis is
gauge-fixed deterministically by diagonalizing the dipole along a
reference direction (falling back to the squared dipole when parity
makes the linear one vanish).
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .eigensolver import EigenResult, LinearOperatorSpec, lowest_eigenpairs
from .grids import Grid2D, MexicanHatParams, apply_hamiltonian, gradient_axis, potential_on_grid

_MAGIC = b"EPC1"
DEGENERACY_TOL = 1e-8


class CacheMismatch(RuntimeError):
    """Eigenpair cache header does not match the requested problem."""


@dataclass(frozen=True)
class ElectronicBasis:
    """Orthonormal bare eigenstates phi_n(r) with energies E_n."""

    grid: Grid2D
    params: MexicanHatParams
    energies: np.ndarray          # (count,)
    orbitals: np.ndarray          # (count, ny, nx), quadrature-orthonormal
    direction: tuple[float, float]
    residual_max: float = 0.0

    @property
    def count(self) -> int:
        return len(self.energies)

    def multiplets(self, tol: float = DEGENERACY_TOL) -> list[list[int]]:
        groups: list[list[int]] = []
        for i, e in enumerate(self.energies):
            if groups and e - self.energies[groups[-1][-1]] < tol:
                groups[-1].append(i)
            else:
                groups.append([i])
        return groups

    def truncate(self, count: int) -> "ElectronicBasis":
        if count > self.count:
            raise ValueError(f"basis holds {self.count} states, asked for {count}")
        return ElectronicBasis(
            grid=self.grid,
            params=self.params,
            energies=self.energies[:count].copy(),
            orbitals=self.orbitals[:count].copy(),
            direction=self.direction,
            residual_max=self.residual_max,
        )


@dataclass(frozen=True)
class MatterElements:
    """Dipole, momentum (d/dr), and squared-dipole blocks of a basis."""

    direction: tuple[float, float]
    dipole: np.ndarray      # (c, c, 2): <i| r |j>
    momentum: np.ndarray    # (c, c, 2): <i| d/dr |j>, antisymmetric
    dipole_sq: np.ndarray   # (c, c): <i| (e.r)^2 |j> along `direction`


def hamiltonian_operator(grid: Grid2D, params: MexicanHatParams, seed: int = 0) -> LinearOperatorSpec:
    pot = potential_on_grid(grid, params)

    def apply(v: np.ndarray) -> np.ndarray:
        return apply_hamiltonian(grid, pot, v.reshape(grid.ny, grid.nx)).reshape(-1)

    return LinearOperatorSpec(dimension=grid.npoints, apply=apply, seed=seed)


def _unit(direction) -> tuple[float, float]:
    d = np.asarray(direction, dtype=float)
    n = np.linalg.norm(d)
    if n == 0.0:
        raise ValueError("direction must be nonzero")
    d = d / n
    return (float(d[0]), float(d[1]))


def _gauge_fix(grid: Grid2D, energies: np.ndarray, orbitals: np.ndarray,
               direction: tuple[float, float]) -> np.ndarray:
    """Rotate each degenerate multiplet onto dipole eigenvectors."""
    x, y = grid.meshes()
    proj = direction[0] * x + direction[1] * y
    w = grid.weight
    groups: list[list[int]] = []
    for i, e in enumerate(energies):
        if groups and e - energies[groups[-1][-1]] < DEGENERACY_TOL:
            groups[-1].append(i)
        else:
            groups.append([i])
    for g in groups:
        if len(g) > 1:
            block = orbitals[g]
            b = np.einsum("iyx,jyx->ij", block, block * proj) * w
            if np.max(np.abs(b)) < 1e-6:
                b = np.einsum("iyx,jyx->ij", block, block * proj**2) * w
            b = 0.5 * (b + b.T)
            _, rot = np.linalg.eigh(b)
            orbitals[g] = np.tensordot(rot.T, block, axes=1)
    # Sign convention: the strongest-amplitude point of each orbital is positive.
    flat = orbitals.reshape(len(energies), -1)
    idx = np.argmax(np.abs(flat), axis=1)
    signs = np.sign(flat[np.arange(len(energies)), idx])
    signs[signs == 0.0] = 1.0
    orbitals *= signs[:, None, None]
    return orbitals


def solve_electronic(
    grid: Grid2D,
    params: MexicanHatParams,
    count: int,
    tol: float = 1e-10,
    seed: int = 7,
    direction=(1.0, 1.0),
    max_basis: int | None = None,
) -> ElectronicBasis:
    """Lowest `count` eigenstates, extended so no multiplet is cut in half."""
    direction = _unit(direction)
    op = hamiltonian_operator(grid, params, seed=seed)
    want = count
    margin = 4
    while True:
        kk = min(want + margin, grid.npoints)
        # The ring spectrum is stiff (level spacing ~1e-4 of the stencil's
        # spectral range), so small requests still warrant a roomy subspace
        # and iteration budget.
        basis_cap = max_basis if max_basis is not None else max(3 * kk + 12, 96)
        res: EigenResult = lowest_eigenpairs(
            op, kk, tol=tol, seed=seed, max_basis=basis_cap,
            max_iter=max(400 * kk, 20000),
        )
        if not res.all_converged:
            raise RuntimeError(
                f"electronic solve did not converge: residuals {res.residuals}"
            )
        nkeep = want
        while nkeep < kk and res.values[nkeep] - res.values[nkeep - 1] < DEGENERACY_TOL:
            nkeep += 1
        if nkeep < kk or nkeep == grid.npoints:
            energies = res.values[:nkeep].copy()
            orbitals = res.vectors[:, :nkeep].T.reshape(nkeep, grid.ny, grid.nx).copy()
            break
        margin += 4  # multiplet straddles the margin; enlarge and retry
    orbitals /= np.sqrt(grid.weight)
    orbitals = _gauge_fix(grid, energies, orbitals, direction)
    return ElectronicBasis(
        grid=grid,
        params=params,
        energies=energies,
        orbitals=orbitals,
        direction=direction,
        residual_max=float(np.max(res.residuals[:nkeep])),
    )


def matter_elements(basis: ElectronicBasis, direction=None) -> MatterElements:
    """Dipole, momentum, and squared-dipole blocks over the basis."""
    grid = basis.grid
    direction = _unit(direction) if direction is not None else basis.direction
    x, y = grid.meshes()
    w = grid.weight
    phi = basis.orbitals
    c = basis.count
    dipole = np.empty((c, c, 2))
    dipole[:, :, 0] = np.einsum("iyx,jyx->ij", phi, phi * x) * w
    dipole[:, :, 1] = np.einsum("iyx,jyx->ij", phi, phi * y) * w
    momentum = np.empty((c, c, 2))
    dphi_x = np.stack([gradient_axis(grid, p, 1) for p in phi])
    dphi_y = np.stack([gradient_axis(grid, p, 0) for p in phi])
    momentum[:, :, 0] = np.einsum("iyx,jyx->ij", phi, dphi_x) * w
    momentum[:, :, 1] = np.einsum("iyx,jyx->ij", phi, dphi_y) * w
    proj = direction[0] * x + direction[1] * y
    dipole_sq = np.einsum("iyx,jyx->ij", phi, phi * proj**2) * w
    # The grid derivative matrix is exactly antisymmetric; scrub roundoff so
    # downstream assembly can rely on it bit-for-bit.
    momentum[:, :, 0] = 0.5 * (momentum[:, :, 0] - momentum[:, :, 0].T)
    momentum[:, :, 1] = 0.5 * (momentum[:, :, 1] - momentum[:, :, 1].T)
    dipole[:, :, 0] = 0.5 * (dipole[:, :, 0] + dipole[:, :, 0].T)
    dipole[:, :, 1] = 0.5 * (dipole[:, :, 1] + dipole[:, :, 1].T)
    dipole_sq = 0.5 * (dipole_sq + dipole_sq.T)
    return MatterElements(direction=direction, dipole=dipole, momentum=momentum,
                          dipole_sq=dipole_sq)


def aligned_excited_index(basis: ElectronicBasis, elements: MatterElements | None = None) -> int:
    """Index of the first excited state carrying the dipole along `direction`."""
    el = elements if elements is not None else matter_elements(basis)
    e = basis.direction
    coupling = np.abs(el.dipole[0, :, 0] * e[0] + el.dipole[0, :, 1] * e[1])
    coupling[0] = 0.0
    return int(np.argmax(coupling))


# ---------------------------------------------------------------------------
# Eigenpair cache (binary, magic "EPC1")

def _header(basis: ElectronicBasis, tol: float) -> dict:
    g, p = basis.grid, basis.params
    return {
        "nx": g.nx, "ny": g.ny, "dx": g.dx, "origin": list(g.origin),
        "xi1": p.xi1, "xi2": p.xi2, "xi3": p.xi3,
        "count": basis.count, "tol": tol,
        "direction": list(basis.direction),
        "residual_max": basis.residual_max,
    }


def save_electronic_cache(path: str | Path, basis: ElectronicBasis, tol: float) -> None:
    head = json.dumps(_header(basis, tol)).encode()
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as f:
        f.write(_MAGIC)
        f.write(struct.pack("<Q", len(head)))
        f.write(head)
        f.write(np.ascontiguousarray(basis.energies, dtype="<f8").tobytes())
        f.write(np.ascontiguousarray(basis.orbitals, dtype="<f8").tobytes())


def _close(a: float, b: float) -> bool:
    return abs(a - b) <= 1e-12 * max(1.0, abs(a), abs(b))


def load_electronic_cache(
    path: str | Path,
    grid: Grid2D,
    params: MexicanHatParams,
    count: int,
    tol: float,
) -> ElectronicBasis:
    """Load a cached basis; refuse on any grid/potential/tolerance mismatch."""
    with open(path, "rb") as f:
        magic = f.read(4)
        if magic != _MAGIC:
            raise CacheMismatch(f"{path}: bad magic {magic!r}")
        (hlen,) = struct.unpack("<Q", f.read(8))
        head = json.loads(f.read(hlen).decode())
        same = (
            head["nx"] == grid.nx and head["ny"] == grid.ny
            and _close(head["dx"], grid.dx)
            and _close(head["origin"][0], grid.origin[0])
            and _close(head["origin"][1], grid.origin[1])
            and _close(head["xi1"], params.xi1)
            and _close(head["xi2"], params.xi2)
            and _close(head["xi3"], params.xi3)
        )
        if not same:
            raise CacheMismatch(f"{path}: cached grid/potential differs from request")
        if head["tol"] > tol * (1 + 1e-12):
            raise CacheMismatch(f"{path}: cached tol {head['tol']} looser than {tol}")
        stored = head["count"]
        if stored < count:
            raise CacheMismatch(f"{path}: cached {stored} states, need {count}")
        energies = np.frombuffer(f.read(stored * 8), dtype="<f8").copy()
        orbitals = np.frombuffer(f.read(stored * grid.ny * grid.nx * 8), dtype="<f8")
        orbitals = orbitals.reshape(stored, grid.ny, grid.nx).copy()
    nkeep = count
    while nkeep < stored and energies[nkeep] - energies[nkeep - 1] < DEGENERACY_TOL:
        nkeep += 1
    return ElectronicBasis(
        grid=grid,
        params=params,
        energies=energies[:nkeep],
        orbitals=orbitals[:nkeep],
        direction=(head["direction"][0], head["direction"][1]),
        residual_max=head["residual_max"],
    )
