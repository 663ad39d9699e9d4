"""Exact electron-photon eigenstates on the grid x Fock product space.

Two unitarily related forms of the same problem:

* length form: displacement coupling sqrt(w/2)(lam.r)(a_dag + a) plus the
  quadratic self-polarization (lam.r)^2/2 per mode (toggleable, and the
  toggle exists precisely to demonstrate that dropping it makes the
  spectrum run away with the box size);
* momentum form: derivative coupling -(lam.grad)(a_dag - a)/sqrt(2w)
  plus the quadratic fluctuation -(lam^2/4w)(a_dag - a)^2, with analytic
  (untruncated) elements for the quadratic piece so the full-electronic-
  basis polariton matrix is exactly unitarily equivalent.

At finite Fock cutoff the two forms differ; the coherent boost maps
states between them (exactly orthogonal per mode, approximate only
through the cutoff) and doubles as a cross-form warm start.

States are stored as unit vectors over (fock, ny, nx); densities divide
out the quadrature weight.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import prod

import numpy as np

from .eigensolver import LinearOperatorSpec, lowest_eigenpairs
from .electronic import ElectronicBasis, MatterElements
from .fock import FockSpace, PhotonMode, k_matrix, ksq_matrix
from .grids import Grid2D, MexicanHatParams, dense_hamiltonian, gradient_axis, laplacian, potential_on_grid
from .polariton import PolaritonBasisSpec, solve_polariton

LENGTH = "length"
MOMENTUM = "momentum"


@dataclass(frozen=True)
class CoupledConfig:
    grid: Grid2D
    params: MexicanHatParams
    modes: tuple[PhotonMode, ...]
    form: str = LENGTH
    include_self_polarization: bool = True

    def __post_init__(self) -> None:
        if self.form not in (LENGTH, MOMENTUM):
            raise ValueError(f"form must be '{LENGTH}' or '{MOMENTUM}'")
        if self.form == MOMENTUM and not self.include_self_polarization:
            raise ValueError(
                "the momentum form has no separate self-polarization term to drop"
            )
        if len(self.modes) == 0:
            raise ValueError("need at least one photon mode")
        if len(self.modes) > 2:
            raise ValueError("grid x Fock solver supports at most two modes")

    @property
    def space(self) -> FockSpace:
        return FockSpace(list(self.modes))

    @property
    def dimension(self) -> int:
        return self.space.size * self.grid.npoints


def _mode_view(x: np.ndarray, dims: tuple[int, ...], mode: int) -> np.ndarray:
    """Reshape (F, ny, nx) so the chosen mode's occupation is axis 1."""
    pre = prod(dims[:mode])
    rest = x.shape[1:]
    return x.reshape(pre, dims[mode], -1, *rest)


def _shift_add(out5, x5, sq, lower_sign: float) -> None:
    """out[l] += sq[l] x[l-1] + lower_sign * sq[l+1] x[l+1] along axis 1."""
    s = sq.reshape(1, -1, *([1] * (x5.ndim - 2)))
    out5[:, 1:] += s * x5[:, :-1]
    out5[:, :-1] += lower_sign * s * x5[:, 1:]


class CoupledHamiltonian:
    """Matrix-free application of the coupled Hamiltonian."""

    def __init__(self, config: CoupledConfig):
        self.config = config
        grid = config.grid
        self.space = config.space
        self.dims = self.space.dims
        x, y = grid.meshes()
        pot = potential_on_grid(grid, config.params)
        self.lam_r = [m.lam[0] * x + m.lam[1] * y for m in config.modes]
        diag = pot.copy()
        if config.form == LENGTH and config.include_self_polarization:
            for lr in self.lam_r:
                diag += 0.5 * lr * lr
        self.diag_grid = diag
        self.photon_diag = self.space.photon_energy(zero_point=True)
        self.bilinear = [np.sqrt(m.omega / 2.0) * lr
                         for m, lr in zip(config.modes, self.lam_r)]
        self.sq = [np.sqrt(np.arange(1, d, dtype=float)) for d in self.dims]
        self.sq2 = [np.sqrt(np.arange(1.0, d - 1) * np.arange(2.0, d))
                    if d > 2 else np.zeros(0) for d in self.dims]
        self.nvec = [2.0 * np.arange(d, dtype=float) + 1.0 for d in self.dims]

    def apply(self, v: np.ndarray) -> np.ndarray:
        cfg = self.config
        grid = cfg.grid
        f = self.space.size
        x = v.reshape(f, grid.ny, grid.nx)
        out = laplacian(grid, x)
        out *= -0.5
        out += self.diag_grid[None, :, :] * x
        out += self.photon_diag[:, None, None] * x
        if cfg.form == LENGTH:
            for i, mode in enumerate(cfg.modes):
                tmp = np.zeros_like(x)
                _shift_add(_mode_view(tmp, self.dims, i), _mode_view(x, self.dims, i),
                           self.sq[i], +1.0)  # (a_dag + a)
                out += self.bilinear[i][None, :, :] * tmp
        else:
            gx = gradient_axis(grid, x, 1)
            gy = gradient_axis(grid, x, 0)
            for i, mode in enumerate(cfg.modes):
                g = mode.lam[0] * gx + mode.lam[1] * gy
                tmp = np.zeros_like(x)
                _shift_add(_mode_view(tmp, self.dims, i), _mode_view(g, self.dims, i),
                           self.sq[i], -1.0)  # (a_dag - a)
                out -= tmp / np.sqrt(2.0 * mode.omega)
                # quadratic fluctuations with analytic elements
                c2 = float(mode.lam @ mode.lam) / (4.0 * mode.omega)
                xv = _mode_view(x, self.dims, i)
                ov = _mode_view(out, self.dims, i)
                nv = self.nvec[i].reshape(1, -1, *([1] * (xv.ndim - 2)))
                ov += c2 * nv * xv
                if self.dims[i] > 2:
                    s2 = self.sq2[i].reshape(1, -1, *([1] * (xv.ndim - 2)))
                    ov[:, 2:] -= c2 * s2 * xv[:, :-2]
                    ov[:, :-2] -= c2 * s2 * xv[:, 2:]
            if len(cfg.modes) == 2:
                m0, m1 = cfg.modes
                cross = float(m0.lam @ m1.lam) / np.sqrt(m0.omega * m1.omega)
                if cross != 0.0:
                    tmp = np.zeros_like(x)
                    _shift_add(_mode_view(tmp, self.dims, 1), _mode_view(x, self.dims, 1),
                               self.sq[1], -1.0)
                    tmp2 = np.zeros_like(x)
                    _shift_add(_mode_view(tmp2, self.dims, 0), _mode_view(tmp, self.dims, 0),
                               self.sq[0], -1.0)
                    out -= cross * tmp2
        return out.reshape(-1)

    def operator(self, seed: int = 0) -> LinearOperatorSpec:
        return LinearOperatorSpec(
            dimension=self.config.dimension, apply=self.apply, seed=seed
        )


@dataclass
class CoupledResult:
    config: CoupledConfig
    energies: np.ndarray
    states: np.ndarray        # (k, F, ny, nx), unit 2-norm
    residuals: np.ndarray
    converged: np.ndarray
    n_apply: int = 0

    def occupation(self, state: int = 0, mode: int | None = None) -> float:
        """Photon-number expectation of one eigenstate (summed over modes,
        or one mode's share)."""
        space = self.config.space
        occ = space.occupations()
        weights = occ[:, mode] if mode is not None else occ.sum(axis=1)
        amp2 = np.sum(self.states[state] ** 2, axis=(1, 2))
        return float(amp2 @ weights)

    def density(self, state: int = 0) -> np.ndarray:
        """Electronic density on the grid, integrating to 1 under the
        quadrature weight."""
        return np.sum(self.states[state] ** 2, axis=0) / self.config.grid.weight


def embed_fock_states(result: CoupledResult, config: CoupledConfig) -> np.ndarray:
    """Columns spanning ``result``'s eigenstates inside ``config``'s Fock space.

    Zero-padding a converged state from a lower Fock cutoff gives a vector
    whose residual at the larger cutoff is set by the weight the state
    carries in its top Fock levels, which decays fast for a converged
    cutoff; the embedded columns therefore make sharp warm starts when
    raising the cutoff (Fock-cutoff continuation).
    """
    src = result.config
    if src.grid != config.grid or src.params != config.params:
        raise ValueError("continuation needs the same grid and potential")
    if (src.form != config.form
            or src.include_self_polarization != config.include_self_polarization):
        raise ValueError("continuation needs the same coupling form")
    if len(src.modes) != len(config.modes):
        raise ValueError("continuation needs the same photon modes")
    for a, b in zip(src.modes, config.modes):
        if a.omega != b.omega or a.lambda_vec != b.lambda_vec:
            raise ValueError("continuation needs identical mode frequency and coupling")
        if b.cutoff < a.cutoff:
            raise ValueError("continuation cannot lower a Fock cutoff")
    grid = config.grid
    k = result.states.shape[0]
    old_dims = src.space.dims
    new_dims = config.space.dims
    padded = np.zeros((k, *new_dims, grid.ny, grid.nx))
    keep = (slice(None), *(slice(0, d) for d in old_dims))
    padded[keep] = result.states.reshape(k, *old_dims, grid.ny, grid.nx)
    return padded.reshape(k, config.dimension).T


def dense_coupled_matrix(config: CoupledConfig) -> np.ndarray:
    """Dense oracle for small instances; index = fock * npoints + grid."""
    grid = config.grid
    if config.dimension > 6000:
        raise ValueError("dense coupled matrix requested for a large instance")
    space = config.space
    pot = potential_on_grid(grid, config.params)
    h_el = dense_hamiltonian(grid, pot)
    x, y = grid.meshes()
    ng = grid.npoints
    eye_g = np.eye(ng)
    h = np.kron(np.diag(space.photon_energy(zero_point=True)), eye_g)
    h += np.kron(np.eye(space.size), h_el)
    for i, mode in enumerate(space.modes):
        lr = (mode.lam[0] * x + mode.lam[1] * y).reshape(-1)
        if config.form == LENGTH:
            p_i = space.embed({i: np.abs(k_matrix(mode.dim))})  # a_dag + a
            h += np.sqrt(mode.omega / 2.0) * np.kron(p_i, np.diag(lr))
            if config.include_self_polarization:
                h += np.kron(np.eye(space.size), np.diag(0.5 * lr * lr))
        else:
            k_i = space.embed({i: k_matrix(mode.dim)})
            dmat = _dense_directional_gradient(grid, mode.lam)
            h += -1.0 / np.sqrt(2.0 * mode.omega) * np.kron(k_i, dmat)
            c2 = float(mode.lam @ mode.lam) / (4.0 * mode.omega)
            h += -c2 * np.kron(space.embed({i: ksq_matrix(mode.dim)}), eye_g)
            for j, other in enumerate(space.modes[:i]):
                cross = float(mode.lam @ other.lam) / np.sqrt(mode.omega * other.omega)
                kk = space.embed({i: k_matrix(mode.dim)}) @ space.embed(
                    {j: k_matrix(other.dim)})
                h += -cross * np.kron(kk, eye_g)
    return h


def _dense_directional_gradient(grid: Grid2D, lam: np.ndarray) -> np.ndarray:
    n = grid.npoints
    d = np.zeros((n, n))
    e = np.zeros((grid.ny, grid.nx))
    flat = e.reshape(-1)
    for j in range(n):
        flat[j] = 1.0
        d[:, j] = (lam[0] * gradient_axis(grid, e, 1)
                   + lam[1] * gradient_axis(grid, e, 0)).reshape(-1)
        flat[j] = 0.0
    return d


def coherent_boost(state: np.ndarray, grid: Grid2D, modes, to_form: str) -> np.ndarray:
    """Map a state between the two coupling forms at fixed cutoff.

    Per mode this applies the Fock parity followed by the displacement
    exp(-theta(r) (a_dag - a)) with theta = (lam.r)/sqrt(2 w) — an exactly
    orthogonal map on the truncated space that reproduces the continuum
    boost up to cutoff leakage.  `to_form` names the target form.
    """
    if to_form not in (LENGTH, MOMENTUM):
        raise ValueError(f"unknown target form {to_form!r}")
    if isinstance(modes, PhotonMode):
        modes = (modes,)
    dims = tuple(m.dim for m in modes)
    x, y = grid.meshes()
    out = state.reshape(*dims, grid.ny, grid.nx).astype(float).copy()
    sign = -1.0 if to_form == LENGTH else +1.0
    for i, mode in enumerate(modes):
        d = mode.dim
        theta = (mode.lam[0] * x + mode.lam[1] * y) / np.sqrt(2.0 * mode.omega)
        evals, w = np.linalg.eigh(1j * k_matrix(d))
        parity = (-1.0) ** np.arange(d)
        work = np.moveaxis(out, i, 0).reshape(d, -1)
        if to_form == LENGTH:
            work = work * parity[:, None]          # parity first, then displacement
        z = w.conj().T @ work
        phase = np.exp(-1j * sign * np.outer(evals, theta.reshape(-1)))
        # broadcast the per-grid-point rotation over any leading Fock axes
        ng = grid.npoints
        z = z.reshape(d, -1, ng) * phase[:, None, :]
        work = np.real(w @ z.reshape(d, -1))
        if to_form == MOMENTUM:
            work = work * parity[:, None]
        out = np.moveaxis(work.reshape(np.moveaxis(out, i, 0).shape), 0, i)
    return out.reshape(state.shape)


def polariton_warm_start(
    basis: ElectronicBasis,
    config: CoupledConfig,
    k: int,
    n_max: int | None = None,
    elements: MatterElements | None = None,
) -> np.ndarray:
    """Initial subspace for the grid solver, lifted from a generous
    polariton expansion (and boosted when the target is the length form)."""
    if len(config.modes) != 1:
        raise ValueError("warm start implemented for single-mode problems")
    mode = config.modes[0]
    n_max = min(n_max if n_max is not None else 56, basis.count - 1)
    spec = PolaritonBasisSpec(n_max=n_max, l_max=mode.cutoff)
    k = min(k, spec.dim)
    res = solve_polariton(basis, mode, spec, k=k, elements=elements)
    phi = basis.orbitals[: n_max + 1] * np.sqrt(basis.grid.weight)  # unit 2-norm
    block = np.einsum("knl,nyx->klyx", res.coefficients, phi)
    if config.form == LENGTH:
        block = np.stack([
            coherent_boost(b, config.grid, config.modes, LENGTH) for b in block
        ])
    return block.reshape(k, -1).T


def solve_coupled(
    config: CoupledConfig,
    k: int = 6,
    tol: float = 1e-7,
    seed: int = 11,
    max_basis: int | None = None,
    max_iter: int | None = None,
    warm_basis: ElectronicBasis | None = None,
    warm_n_max: int | None = None,
    continue_from: CoupledResult | None = None,
    verbose: bool = False,
) -> CoupledResult:
    """Lowest k coupled eigenstates by warm-started thick-restart Lanczos.

    ``continue_from`` recycles the eigenstates of a lower-cutoff solve of
    the same problem as the starting subspace, which takes precedence over
    the electronic-basis warm start.
    """
    ham = CoupledHamiltonian(config)
    op = ham.operator(seed=seed)
    initial = None
    if continue_from is not None:
        initial = embed_fock_states(continue_from, config)
    elif warm_basis is not None:
        initial = polariton_warm_start(
            warm_basis, config, k=min(k + 4, config.dimension), n_max=warm_n_max
        )
    res = lowest_eigenpairs(
        op, k, tol=tol, seed=seed, max_basis=max_basis, max_iter=max_iter,
        initial_subspace=initial, verbose=verbose,
    )
    f = config.space.size
    states = res.vectors.T.reshape(k, f, config.grid.ny, config.grid.nx)
    return CoupledResult(
        config=config,
        energies=res.values,
        states=states,
        residuals=res.residuals,
        converged=res.converged,
        n_apply=res.n_apply,
    )
