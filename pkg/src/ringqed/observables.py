"""Densities, photon occupations, and distortion measures.

All densities are normalized to unit integral under the grid quadrature
weight, so differences between coupled and bare densities integrate to
zero and their weighted moments are meaningful on their own.
"""

from __future__ import annotations

import numpy as np

from .coupled import CoupledResult
from .electronic import ElectronicBasis
from .grids import Grid2D
from .polariton import PolaritonResult


def bare_density(basis: ElectronicBasis, state: int = 0) -> np.ndarray:
    return basis.orbitals[state] ** 2


def polariton_density(
    basis: ElectronicBasis, result: PolaritonResult, state: int = 0
) -> np.ndarray:
    """Electronic density of a truncated-basis eigenstate.

    The photon index is traced out: n(r) = sum_l |sum_n c_nl phi_n(r)|^2.
    """
    coeff = result.coefficients[state]             # (ne, nf)
    orbs = basis.orbitals[: coeff.shape[0]]        # (ne, ny, nx)
    waves = np.einsum("nl,nyx->lyx", coeff, orbs)
    return np.sum(waves**2, axis=0)


def coupled_density(result: CoupledResult, state: int = 0) -> np.ndarray:
    return result.density(state)


def density_difference(density: np.ndarray, reference: np.ndarray) -> np.ndarray:
    return density - reference


def anisotropy(grid: Grid2D, delta_n: np.ndarray, direction=(1.0, 1.0)) -> float:
    """Weighted quadrupole moment int (e.r)^2 delta_n d2r along a unit
    direction e.  Negative means the coupling moved density out of the
    polarization axis; positive means it piled up along it.
    """
    e = np.asarray(direction, dtype=float)
    e = e / np.linalg.norm(e)
    x, y = grid.meshes()
    proj = e[0] * x + e[1] * y
    return float(np.sum(proj**2 * delta_n) * grid.weight)


def fock_marginal(result: CoupledResult, state: int = 0) -> np.ndarray:
    """Probability of each joint Fock configuration in a grid eigenstate."""
    return np.sum(result.states[state] ** 2, axis=(1, 2))


def lower_polariton_index(
    result: PolaritonResult, min_occupation: float = 0.25
) -> int:
    """Index of the lowest excited state with appreciable photon content.

    On resonance the first excitation manifold splits into a dark purely
    electronic state and two bright half-photon polaritons; this picks the
    lower bright branch.
    """
    for i in range(1, result.coefficients.shape[0]):
        if result.occupation(i) >= min_occupation:
            return i
    raise ValueError("no excited state with the requested photon weight")
