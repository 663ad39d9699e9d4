"""Explicit polariton expansion over bare electronic x Fock products.

The coupled eigenproblem is assembled in the basis |phi_n> |l> from the
bare electronic energies, the electronic momentum elements, and the
analytic photonic coupling table; the product index is flattened
row-major, m = n * (l_max + 1) + l.  At full electronic basis this
matrix is unitarily equivalent to the momentum-form grid solver on the
same truncated Fock space, which is the oracle test anchoring both.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.linalg

from .electronic import ElectronicBasis, MatterElements, matter_elements
from .fock import CouplingTable, FockSpace, PhotonMode, build_coupling_table


@dataclass(frozen=True)
class PolaritonBasisSpec:
    """Truncation of the product basis: electronic indices 0..n_max,
    photon occupations 0..l_max."""

    n_max: int
    l_max: int

    def __post_init__(self) -> None:
        if self.n_max < 0 or self.l_max < 0:
            raise ValueError("n_max and l_max must be >= 0")

    @property
    def n_electronic(self) -> int:
        return self.n_max + 1

    @property
    def n_fock(self) -> int:
        return self.l_max + 1

    @property
    def dim(self) -> int:
        return self.n_electronic * self.n_fock


def flatten_index(n: int, l: int, l_max: int) -> int:
    """Row-major product index m = n * (l_max + 1) + l."""
    if not 0 <= l <= l_max:
        raise ValueError(f"l={l} outside [0, {l_max}]")
    if n < 0:
        raise ValueError("n must be >= 0")
    return n * (l_max + 1) + l


@dataclass
class PolaritonResult:
    spec: PolaritonBasisSpec
    lam: float
    energies: np.ndarray        # all eigenvalues, ascending
    coefficients: np.ndarray    # (k, n_electronic, n_fock) for the lowest k
    fock_occupations: np.ndarray  # (n_fock,) occupation numbers of the Fock axis

    def occupation(self, state: int = 0) -> float:
        """Photon-number expectation <a_dag a> of one eigenstate."""
        c = self.coefficients[state]
        return float(np.sum(c**2 * self.fock_occupations[None, :]))


def assemble_polariton_matrix(
    energies: np.ndarray,
    momentum: np.ndarray,
    table: CouplingTable,
    n_electrons: float = 1.0,
) -> np.ndarray:
    """Dense polariton matrix over (electronic, fock) products, row-major.

    `energies` are the bare electronic levels kept in the expansion and
    `momentum` their (n, n, 2) derivative elements, which must be exactly
    antisymmetric (a symmetric contamination would silently break the
    Hermiticity of the assembled product matrix).
    """
    energies = np.asarray(energies, dtype=float)
    momentum = np.asarray(momentum, dtype=float)
    ne = len(energies)
    if momentum.shape != (ne, ne, 2):
        raise ValueError(f"momentum elements must be ({ne}, {ne}, 2)")
    for c in range(2):
        asym = np.max(np.abs(momentum[:, :, c] + momentum[:, :, c].T))
        scale = max(np.max(np.abs(momentum[:, :, c])), 1e-300)
        if asym > 1e-10 * scale:
            raise ValueError("momentum elements are not antisymmetric")
    if np.any(np.diff(energies) < -1e-12):
        raise ValueError("electronic energies must be sorted ascending")
    nf = table.space.size
    diag = energies[:, None] + table.energies[None, :]
    m = np.zeros((ne, nf, ne, nf))
    idx = np.arange(ne)
    for l in range(nf):
        m[idx, l, idx, l] = diag[:, l]
    # first-order photonic couplings: sum_c momentum[j,n,c] grad[l,k,c]
    m += np.einsum("jnc,lkc->jlnk", momentum, table.grad)
    # quadratic fluctuations, diagonal in the electronic index
    m[idx, :, idx, :] += -0.5 * n_electrons * table.delta[None, :, :]
    return m.reshape(ne * nf, ne * nf)


def solve_polariton(
    basis: ElectronicBasis,
    mode: PhotonMode | list[PhotonMode],
    spec: PolaritonBasisSpec,
    k: int = 6,
    elements: MatterElements | None = None,
    n_electrons: float = 1.0,
) -> PolaritonResult:
    """Diagonalize the truncated polariton matrix built on `basis`."""
    space = FockSpace(mode)
    if space.n_modes == 1 and space.modes[0].cutoff != spec.l_max:
        raise ValueError("mode cutoff must equal spec.l_max")
    if spec.n_max >= basis.count:
        raise ValueError(
            f"spec needs electronic states up to {spec.n_max}, basis has {basis.count}"
        )
    el = elements if elements is not None else matter_elements(basis)
    ne = spec.n_electronic
    table = build_coupling_table(space)
    m = assemble_polariton_matrix(
        basis.energies[:ne], el.momentum[:ne, :ne], table, n_electrons=n_electrons
    )
    k = min(k, m.shape[0])
    values, vectors = scipy.linalg.eigh(m)
    coeffs = vectors[:, :k].T.reshape(k, ne, space.size)
    occ = space.occupations().sum(axis=1).astype(float)
    lam = float(np.linalg.norm(space.modes[0].lam) / np.sqrt(2.0))
    return PolaritonResult(
        spec=spec,
        lam=lam,
        energies=values,
        coefficients=coeffs,
        fock_occupations=occ,
    )


@dataclass(frozen=True)
class ScanRow:
    l_max: int
    n_max: int
    lam: float
    de01: float
    de13: float
    occupation: float


def convergence_scan(
    basis: ElectronicBasis,
    omega: float,
    rows: list[tuple[int, int, float]],
    polarization=(1.0, 1.0),
    elements: MatterElements | None = None,
) -> list[ScanRow]:
    """Solve (l_max, n_max, lambda) truncations and report gap, splitting,
    and ground-state photon occupation for each."""
    el = elements if elements is not None else matter_elements(basis)
    pol = np.asarray(polarization, dtype=float)
    out = []
    for l_max, n_max, lam in rows:
        mode = PhotonMode(omega=omega, lambda_vec=tuple(lam * pol), cutoff=l_max)
        spec = PolaritonBasisSpec(n_max=n_max, l_max=l_max)
        res = solve_polariton(basis, mode, spec, k=1, elements=el)
        e = res.energies
        out.append(ScanRow(
            l_max=l_max,
            n_max=n_max,
            lam=lam,
            de01=float(e[1] - e[0]),
            de13=float(e[3] - e[1]),
            occupation=res.occupation(0),
        ))
    return out


def write_scan_csv(path: str | Path, rows: list[ScanRow]) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["l_max", "n_max", "lambda", "dE01", "dE13", "occupation"])
        for r in rows:
            w.writerow([
                r.l_max, r.n_max,
                f"{r.lam:.8e}", f"{r.de01:.8e}", f"{r.de13:.8e}", f"{r.occupation:.8e}",
            ])
