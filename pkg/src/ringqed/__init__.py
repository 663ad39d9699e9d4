"""Cavity QED of a single 2D electron coupled to quantized photon modes.

Exact grid x Fock diagonalization in length and momentum forms, an
explicit polariton basis built on bare electronic eigenstates, the
analytic single-photon polariton model, and the observables that
compare them.
"""

from .grids import Grid2D, MexicanHatParams, potential_on_grid
from .eigensolver import EigenResult, LinearOperatorSpec, dense_eigen, lowest_eigenpairs
from .electronic import (
    ElectronicBasis,
    MatterElements,
    load_electronic_cache,
    matter_elements,
    save_electronic_cache,
    solve_electronic,
)
from .fock import FockSpace, PhotonMode, build_coupling_table
from .polariton import (
    PolaritonBasisSpec,
    PolaritonResult,
    convergence_scan,
    solve_polariton,
    write_scan_csv,
)
from .spp import SppInputs, SppSpectrum, ground_to_lower_gap, spp_levels, spp_matrix
from .coupled import (
    CoupledConfig,
    CoupledHamiltonian,
    CoupledResult,
    coherent_boost,
    dense_coupled_matrix,
    embed_fock_states,
    polariton_warm_start,
    solve_coupled,
)
from .observables import (
    anisotropy,
    bare_density,
    coupled_density,
    density_difference,
    fock_marginal,
    lower_polariton_index,
    polariton_density,
)

__version__ = "0.1.0"

__all__ = [
    "Grid2D",
    "MexicanHatParams",
    "potential_on_grid",
    "EigenResult",
    "LinearOperatorSpec",
    "dense_eigen",
    "lowest_eigenpairs",
    "ElectronicBasis",
    "MatterElements",
    "matter_elements",
    "solve_electronic",
    "save_electronic_cache",
    "load_electronic_cache",
    "FockSpace",
    "PhotonMode",
    "build_coupling_table",
    "PolaritonBasisSpec",
    "PolaritonResult",
    "convergence_scan",
    "solve_polariton",
    "write_scan_csv",
    "SppInputs",
    "SppSpectrum",
    "spp_levels",
    "spp_matrix",
    "ground_to_lower_gap",
    "CoupledConfig",
    "CoupledHamiltonian",
    "CoupledResult",
    "coherent_boost",
    "dense_coupled_matrix",
    "embed_fock_states",
    "polariton_warm_start",
    "solve_coupled",
    "anisotropy",
    "bare_density",
    "coupled_density",
    "density_difference",
    "fock_marginal",
    "lower_polariton_index",
    "polariton_density",
    "__version__",
]
