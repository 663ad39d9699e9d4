"""Run configuration files, result artifacts, and checksummed manifests.

Config files are flat ``key = value`` text; numbers parse as numbers,
``true``/``false`` as booleans, and everything else stays a string.
Every product a run writes is recorded in a JSON manifest alongside a
sha256 checksum so a result directory can be audited after the fact.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from .coupled import CoupledConfig, CoupledResult
from .fock import PhotonMode
from .grids import Grid2D, MexicanHatParams


@dataclass(frozen=True)
class RunConfig:
    # grid and potential
    nx: int = 201
    ny: int = 201
    dx: float = 0.1
    xi1: float = 0.7827
    xi2: float = 17.70
    xi3: float = 0.997
    # photon mode; omega <= 0 means "resonant with the bare gap"
    omega: float = -1.0
    lam: float = 0.005
    pol_x: float = 1.0
    pol_y: float = 1.0
    cutoff: int = 39
    # solver
    form: str = "length"
    self_polarization: bool = True
    k: int = 6
    tol: float = 1e-7
    max_basis: int = 80
    seed: int = 11
    warm_start: bool = True
    warm_n_max: int = 56
    # Fock-cutoff continuation: solve at this cutoff first and recycle its
    # eigenstates as the starting subspace; negative disables the stage
    continue_cutoff: int = -1
    n_electrons: float = 1.0
    # electronic stage
    count: int = 60
    electronic_tol: float = 1e-10
    # polariton scan: "paper" for the bundled row list, "" for none, or
    # semicolon/comma separated l_max:n_max:lambda triples
    scan: str = "paper"
    # bookkeeping
    outdir: str = "runs"
    cache_dir: str = ".cache"
    memory_budget_gb: float = 4.0

    def grid(self) -> Grid2D:
        return Grid2D(nx=self.nx, ny=self.ny, dx=self.dx)

    def params(self) -> MexicanHatParams:
        return MexicanHatParams(xi1=self.xi1, xi2=self.xi2, xi3=self.xi3)

    def mode(self, omega: float | None = None) -> PhotonMode:
        w = self.omega if omega is None else omega
        if w <= 0:
            raise ValueError("omega unresolved; pass the measured resonance")
        return PhotonMode(
            omega=w,
            lambda_vec=(self.lam * self.pol_x, self.lam * self.pol_y),
            cutoff=self.cutoff,
        )

    def coupled(self, omega: float | None = None) -> CoupledConfig:
        return CoupledConfig(
            grid=self.grid(),
            params=self.params(),
            modes=(self.mode(omega),),
            form=self.form,
            include_self_polarization=self.self_polarization,
        )


def _parse_value(text: str):
    low = text.strip()
    if low.lower() in ("true", "false"):
        return low.lower() == "true"
    for cast in (int, float):
        try:
            return cast(low)
        except ValueError:
            continue
    return low


def read_config(path: str | Path | None, overrides: list[str] | None = None) -> RunConfig:
    """Build a RunConfig from an optional file plus ``key=value`` overrides."""
    values: dict = {}
    if path is not None:
        for raw in Path(path).read_text().splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"bad config line: {raw!r}")
            key, text = line.split("=", 1)
            values[key.strip()] = _parse_value(text)
    for item in overrides or []:
        if "=" not in item:
            raise ValueError(f"override must look like key=value, got {item!r}")
        key, text = item.split("=", 1)
        values[key.strip()] = _parse_value(text)
    known = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(values) - known)
    if unknown:
        raise ValueError(f"unknown config keys: {', '.join(unknown)}")
    coerced = {}
    for f in fields(RunConfig):
        if f.name not in values:
            continue
        v = values[f.name]
        if f.type in ("int",) and isinstance(v, float) and v.is_integer():
            v = int(v)
        if f.type in ("float",) and isinstance(v, int):
            v = float(v)
        coerced[f.name] = v
    return replace(RunConfig(), **coerced)


def estimated_memory_gb(dimension: int, max_basis: int) -> float:
    """Rough peak for the restarted solver: basis plus a few work vectors."""
    return dimension * 8.0 * (max_basis + 8) / 1024.0**3


def sha256_of_file(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(
    path: str | Path,
    config: dict,
    outputs: dict[str, str | Path],
    timings: dict[str, float],
    diagnostics: dict | None = None,
) -> None:
    base = Path(path).parent.resolve()
    record = {
        "created": time.strftime("%Y-%m-%dT%H:%M:%S"),
        "config": config,
        "outputs": {
            # Store paths relative to the manifest itself so the verifier can
            # resolve them no matter which directory it is invoked from.
            name: {
                "path": os.path.relpath(Path(p).resolve(), base),
                "sha256": sha256_of_file(p),
                "bytes": Path(p).stat().st_size,
            }
            for name, p in outputs.items()
        },
        "timings_s": {k: round(v, 3) for k, v in timings.items()},
        "diagnostics": diagnostics or {},
    }
    Path(path).write_text(json.dumps(record, indent=2, sort_keys=True) + "\n")


def verify_manifest(path: str | Path) -> list[str]:
    """Re-hash every output named by a manifest; return mismatch messages."""
    record = json.loads(Path(path).read_text())
    base = Path(path).parent
    problems = []
    for name, entry in record.get("outputs", {}).items():
        target = base / entry["path"]
        if not target.exists():
            problems.append(f"{name}: missing file {entry['path']}")
            continue
        digest = sha256_of_file(target)
        if digest != entry["sha256"]:
            problems.append(f"{name}: checksum mismatch for {entry['path']}")
    return problems


def save_coupled_npz(path: str | Path, result: CoupledResult, wall_s: float) -> None:
    meta = coupled_meta_for(result.config)
    k = len(result.energies)
    occupations = np.array([result.occupation(i) for i in range(k)])
    np.savez_compressed(
        path,
        meta=json.dumps(meta, sort_keys=True),
        energies=result.energies,
        residuals=result.residuals,
        converged=result.converged,
        occupations=occupations,
        density_gs=result.density(0),
        fock_marginal_gs=np.sum(result.states[0] ** 2, axis=(1, 2)),
        n_apply=result.n_apply,
        wall_s=wall_s,
    )


@dataclass(frozen=True)
class CoupledSummary:
    meta: dict
    energies: np.ndarray
    residuals: np.ndarray
    converged: np.ndarray
    occupations: np.ndarray
    density_gs: np.ndarray
    fock_marginal_gs: np.ndarray
    n_apply: int
    wall_s: float


def load_coupled_npz(path: str | Path) -> CoupledSummary:
    with np.load(path) as data:
        return CoupledSummary(
            meta=json.loads(str(data["meta"])),
            energies=data["energies"],
            residuals=data["residuals"],
            converged=data["converged"],
            occupations=data["occupations"],
            density_gs=data["density_gs"],
            fock_marginal_gs=data["fock_marginal_gs"],
            n_apply=int(data["n_apply"]),
            wall_s=float(data["wall_s"]),
        )


def coupled_meta_for(config: CoupledConfig) -> dict:
    mode = config.modes[0]
    return {
        "nx": config.grid.nx, "ny": config.grid.ny, "dx": config.grid.dx,
        "xi1": config.params.xi1, "xi2": config.params.xi2, "xi3": config.params.xi3,
        "omega": mode.omega, "lambda_x": float(mode.lam[0]),
        "lambda_y": float(mode.lam[1]), "cutoff": mode.cutoff,
        "form": config.form, "self_polarization": config.include_self_polarization,
    }


def write_density_raw(path: str | Path, density: np.ndarray, grid: Grid2D) -> None:
    """Row-major float64 dump plus a tiny JSON sidecar describing the axes."""
    density.astype("<f8").tofile(path)
    sidecar = Path(str(path) + ".json")
    sidecar.write_text(json.dumps({
        "shape": [grid.ny, grid.nx],
        "dx": grid.dx,
        "origin": list(grid.origin),
        "dtype": "<f8",
        "order": "C",
    }, indent=2) + "\n")


def write_density_csv(path: str | Path, density: np.ndarray, grid: Grid2D) -> None:
    x, y = grid.meshes()
    with open(path, "w") as fh:
        fh.write("x,y,density\n")
        for j in range(grid.ny):
            for i in range(grid.nx):
                fh.write(f"{x[j, i]:.6f},{y[j, i]:.6f},{density[j, i]:.8e}\n")
