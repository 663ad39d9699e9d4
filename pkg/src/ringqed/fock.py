"""Truncated Fock spaces, ladder algebra, and photonic coupling tables.

A mode's `cutoff` is the largest retained occupation number, so the
single-mode space has cutoff+1 states.  Multi-mode spaces enumerate
occupation multi-indices row-major (mode 0 slowest).  The coupling
table carries the analytic photonic matrix elements that dress an
electronic basis into a polariton problem: the first-order (ladder)
vector elements and the second-order fluctuation elements, whose
diagonal grows as 2l+1 and supplies the diamagnetic shift.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod

import numpy as np

FockIndex = tuple[int, ...]


@dataclass(frozen=True)
class PhotonMode:
    """One quantized mode: frequency, full coupling vector, occupation cutoff."""

    omega: float
    lambda_vec: tuple[float, float]
    cutoff: int

    def __post_init__(self) -> None:
        if self.omega <= 0.0:
            raise ValueError("omega must be positive")
        if self.cutoff < 0:
            raise ValueError("cutoff is the largest occupation, must be >= 0")

    @property
    def dim(self) -> int:
        return self.cutoff + 1

    @property
    def lam(self) -> np.ndarray:
        return np.asarray(self.lambda_vec, dtype=float)


def k_matrix(dim: int) -> np.ndarray:
    """(a_dag - a) truncated to `dim` levels. Real antisymmetric."""
    m = np.zeros((dim, dim))
    for k in range(dim - 1):
        m[k + 1, k] = np.sqrt(k + 1.0)   # a_dag
        m[k, k + 1] = -np.sqrt(k + 1.0)  # -a
    return m


def q_matrix(dim: int, omega: float) -> np.ndarray:
    """Displacement coordinate q = (a_dag + a)/sqrt(2 omega)."""
    m = np.zeros((dim, dim))
    for k in range(dim - 1):
        m[k + 1, k] = m[k, k + 1] = np.sqrt((k + 1.0) / (2.0 * omega))
    return m


def ksq_matrix(dim: int) -> np.ndarray:
    """Analytic elements of (a_dag - a)^2: untruncated algebra, then projected."""
    m = np.diag(-(2.0 * np.arange(dim) + 1.0))
    for k in range(dim - 2):
        m[k + 2, k] = m[k, k + 2] = np.sqrt((k + 1.0) * (k + 2.0))
    return m


class FockSpace:
    """Enumerated product of truncated single-mode spaces."""

    def __init__(self, modes: PhotonMode | list[PhotonMode] | tuple[PhotonMode, ...]):
        if isinstance(modes, PhotonMode):
            modes = (modes,)
        self.modes: tuple[PhotonMode, ...] = tuple(modes)
        if not self.modes:
            raise ValueError("need at least one mode")
        self.dims = tuple(m.dim for m in self.modes)
        self.size = prod(self.dims)

    @property
    def n_modes(self) -> int:
        return len(self.modes)

    def occupations(self) -> np.ndarray:
        """(size, n_modes) table of occupation multi-indices, row-major order."""
        grids = np.indices(self.dims).reshape(self.n_modes, -1)
        return grids.T.copy()

    def index_of(self, occ: FockIndex) -> int:
        if len(occ) != self.n_modes:
            raise ValueError("occupation tuple has wrong number of modes")
        idx = 0
        for n, d in zip(occ, self.dims):
            if not 0 <= n < d:
                raise ValueError(f"occupation {n} outside [0, {d - 1}]")
            idx = idx * d + n
        return idx

    def photon_energy(self, zero_point: bool = True) -> np.ndarray:
        """Diagonal photonic surface: sum_a omega_a (l_a + 1/2)."""
        occ = self.occupations()
        omegas = np.array([m.omega for m in self.modes])
        e = occ @ omegas
        if zero_point:
            e = e + 0.5 * omegas.sum()
        return e

    def embed(self, mats: dict[int, np.ndarray]) -> np.ndarray:
        """Kron product with identity on every mode absent from `mats`."""
        out = np.ones((1, 1))
        for i, d in enumerate(self.dims):
            out = np.kron(out, mats.get(i, np.eye(d)))
        return out

    def mode_number_diag(self, mode: int) -> np.ndarray:
        """Occupation of one mode along the enumerated diagonal."""
        return self.occupations()[:, mode].astype(float)


def ladder_apply(space: FockSpace, state: np.ndarray, mode: int, kind: str):
    """Apply a ladder operator along the Fock axis (axis 0) of `state`.

    kind is "raise" (a_dag) or "lower" (a).  Returns (out, lost) where
    `lost` is the 2-norm of the amplitude a_dag pushed past the cutoff —
    the basic truncation diagnostic.
    """
    if kind not in ("raise", "lower"):
        raise ValueError(f"unknown ladder kind {kind!r}")
    if state.shape[0] != space.size:
        raise ValueError("state's leading axis must enumerate the Fock space")
    d = space.dims[mode]
    pre = prod(space.dims[:mode])
    post = prod(space.dims[mode + 1:])
    work = state.reshape(pre, d, post, -1)
    out = np.zeros_like(work)
    fac = np.sqrt(np.arange(1, d, dtype=float))[None, :, None, None]
    lost = 0.0
    if kind == "raise":
        out[:, 1:] = fac * work[:, :-1]
        lost = float(np.sqrt(d) * np.linalg.norm(work[:, -1]))
    else:
        out[:, :-1] = fac * work[:, 1:]
    return out.reshape(state.shape), lost


@dataclass(frozen=True)
class CouplingTable:
    """Photonic surfaces and coupling elements over an enumerated Fock space.

    grad[l, k, :] couples to electronic momentum elements (first order in
    the coupling); delta[l, k] carries the quadratic fluctuations and is
    applied with a -1/2 prefactor per electron.
    """

    space: FockSpace
    energies: np.ndarray  # (size,)
    grad: np.ndarray      # (size, size, 2), antisymmetric in (l, k)
    delta: np.ndarray     # (size, size), symmetric


def build_coupling_table(space: FockSpace | PhotonMode | list[PhotonMode],
                         zero_point: bool = True) -> CouplingTable:
    if not isinstance(space, FockSpace):
        space = FockSpace(space)
    n = space.size
    grad = np.zeros((n, n, 2))
    delta = np.zeros((n, n))
    for i, mode in enumerate(space.modes):
        k_i = space.embed({i: k_matrix(mode.dim)})
        scale = 1.0 / np.sqrt(2.0 * mode.omega)
        grad += -scale * k_i[:, :, None] * mode.lam[None, None, :]
        delta += (mode.lam @ mode.lam) / (2.0 * mode.omega) * space.embed(
            {i: ksq_matrix(mode.dim)}
        )
        for j, other in enumerate(space.modes[:i]):
            k_j = space.embed({j: k_matrix(other.dim)})
            cross = (mode.lam @ other.lam) / np.sqrt(mode.omega * other.omega)
            delta += cross * (k_i @ k_j)
    return CouplingTable(
        space=space,
        energies=space.photon_energy(zero_point=zero_point),
        grad=grad,
        delta=delta,
    )
