from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from ringqed.coupled import CoupledConfig, solve_coupled
from ringqed.electronic import (
    CacheMismatch,
    load_electronic_cache,
    save_electronic_cache,
    solve_electronic,
)
from ringqed.fock import PhotonMode
from ringqed.grids import Grid2D, MexicanHatParams
from ringqed.runio import coupled_meta_for, load_coupled_npz, save_coupled_npz

CACHE = Path(__file__).resolve().parent.parent / ".cache"


@pytest.fixture(scope="session")
def ring_grid() -> Grid2D:
    return Grid2D(nx=201, ny=201, dx=0.1)


@pytest.fixture(scope="session")
def ring_params() -> MexicanHatParams:
    return MexicanHatParams()


@pytest.fixture(scope="session")
def ring_basis(ring_grid, ring_params):
    """60 bare states of the benchmark ring, cached across sessions."""
    CACHE.mkdir(exist_ok=True)
    path = CACHE / "ring201_k60.epc"
    if path.exists():
        try:
            return load_electronic_cache(path, ring_grid, ring_params, 60, 1e-10)
        except CacheMismatch:
            pass
    basis = solve_electronic(ring_grid, ring_params, 60, tol=1e-10)
    save_electronic_cache(path, basis, 1e-10)
    return basis


@pytest.fixture(scope="session")
def omega_res(ring_basis) -> float:
    return float(ring_basis.energies[1] - ring_basis.energies[0])


@pytest.fixture(scope="session")
def exact_summary(ring_grid, ring_params, ring_basis, omega_res):
    """Summary of one benchmark grid x Fock solve, memoized on disk.

    Returns a loader: exact_summary(form, lam, cutoff).  A cache file is
    only trusted when its recorded parameters match the request.  Large
    cutoffs are solved by Fock-cutoff continuation through cutoff 39,
    which converges in a fraction of the cold iteration count, and with a
    reduced basis so the working set stays inside a small-machine budget.
    """
    import time

    live: dict[tuple[str, float, int], object] = {}

    def config_for(form: str, lam: float, cutoff: int) -> CoupledConfig:
        mode = PhotonMode(omega=omega_res, lambda_vec=(lam, lam), cutoff=cutoff)
        return CoupledConfig(
            grid=ring_grid, params=ring_params, modes=(mode,), form=form
        )

    def solve(form: str, lam: float, cutoff: int):
        key = (form, lam, cutoff)
        if key in live:
            return live[key]
        stage = solve(form, lam, 39) if cutoff > 40 else None
        res = solve_coupled(
            config_for(form, lam, cutoff), k=4, tol=1e-7, seed=11,
            max_basis=64 if cutoff > 60 else 80, max_iter=12000,
            warm_basis=None if stage is not None else ring_basis,
            warm_n_max=56, continue_from=stage,
        )
        live[key] = res
        return res

    def load(form: str, lam: float, cutoff: int):
        want = coupled_meta_for(config_for(form, lam, cutoff))
        path = CACHE / f"coupled_{form}_lam{lam:g}_c{cutoff}.npz"
        if path.exists():
            summary = load_coupled_npz(path)
            got = dict(summary.meta)
            close = all(
                np.isclose(got[key], val, rtol=0, atol=1e-12)
                if isinstance(val, float) else got[key] == val
                for key, val in want.items()
            )
            if close:
                return summary
        t0 = time.perf_counter()
        res = solve(form, lam, cutoff)
        save_coupled_npz(path, res, time.perf_counter() - t0)
        return load_coupled_npz(path)

    return load
