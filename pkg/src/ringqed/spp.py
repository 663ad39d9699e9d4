"""Single-photon polariton model: two levels, one mode, one photon.

Closed forms for the four collective levels, the Rabi splitting, the
diamagnetic (collective) shift, and the rotating-wave comparison value.
The reduced model drops the constant photon zero-point offset, so its
photonic surface is omega * l; `spp_matrix` builds the matching 4x4 in
the product order (0,0), (0,1), (1,0), (1,1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SppInputs:
    """Two-level emitter(s) coupled to one mode.

    `delta_e` is the bare electronic excitation E1 - E0 of one emitter,
    `r01` its transition dipole, and `n_electrons` the number of
    identical emitters sharing the mode coherently.
    """

    e0: float
    delta_e: float
    omega: float
    lambda_vec: tuple[float, float]
    r01: tuple[float, float]
    n_electrons: float = 1.0

    def __post_init__(self) -> None:
        if self.omega <= 0.0:
            raise ValueError("omega must be positive")
        if self.delta_e <= 0.0:
            raise ValueError("delta_e must be positive")
        if self.n_electrons < 1.0:
            raise ValueError("need at least one emitter")

    @property
    def lam(self) -> np.ndarray:
        return np.asarray(self.lambda_vec, dtype=float)

    @property
    def dipole(self) -> np.ndarray:
        return np.asarray(self.r01, dtype=float)

    @property
    def detuning(self) -> float:
        return self.omega - self.delta_e


@dataclass(frozen=True)
class SppSpectrum:
    e_ground: float
    e_lower: float
    e_upper: float
    e_double: float
    collective_shift: float
    rabi_splitting: float
    detuning: float

    @property
    def levels(self) -> np.ndarray:
        return np.array([self.e_ground, self.e_lower, self.e_upper, self.e_double])


def collective_shift(inputs: SppInputs) -> float:
    """Diamagnetic detuning L = N_e |lambda|^2 / (2 omega)."""
    lam2 = float(inputs.lam @ inputs.lam)
    return inputs.n_electrons * lam2 / (2.0 * inputs.omega)


def collective_rabi(inputs: SppInputs) -> float:
    """Omega_t = sqrt(N_e) * 2 (dE_e / sqrt(2 omega)) |lambda . r01|."""
    g = inputs.delta_e / np.sqrt(2.0 * inputs.omega) * abs(float(inputs.lam @ inputs.dipole))
    return float(2.0 * np.sqrt(inputs.n_electrons) * g)


def rabi_splitting(inputs: SppInputs) -> float:
    """Polariton splitting sqrt(delta_t^2 + Omega_t^2)."""
    dt = inputs.detuning + collective_shift(inputs)
    return float(np.hypot(dt, collective_rabi(inputs)))


def tavis_cummings_splitting(inputs: SppInputs) -> float:
    """Rotating-wave comparison: sqrt(delta^2 + N_e 2 omega |lambda|^2)."""
    lam2 = float(inputs.lam @ inputs.lam)
    return float(np.hypot(inputs.detuning,
                          np.sqrt(inputs.n_electrons * 2.0 * inputs.omega * lam2)))


def spp_levels(inputs: SppInputs) -> SppSpectrum:
    """The four closed-form levels of the single-photon polariton."""
    shift = collective_shift(inputs)
    omega_t = collective_rabi(inputs)
    delta_t = inputs.detuning + shift
    delta_big = inputs.delta_e + inputs.omega + shift
    e_bar = inputs.e0 + 0.5 * (inputs.delta_e + inputs.omega) + shift
    split_cons = np.hypot(delta_t, omega_t)
    split_anti = np.hypot(delta_big, omega_t)
    return SppSpectrum(
        e_ground=float(e_bar - 0.5 * split_anti),
        e_lower=float(e_bar - 0.5 * split_cons),
        e_upper=float(e_bar + 0.5 * split_cons),
        e_double=float(e_bar + 0.5 * split_anti),
        collective_shift=shift,
        rabi_splitting=float(split_cons),
        detuning=inputs.detuning,
    )


def ground_to_lower_gap(inputs: SppInputs) -> float:
    """E_lower - E_ground in a cancellation-free form.

    Algebraically 1/2 (sqrt(D^2 + O^2) - sqrt(d^2 + O^2)) with
    D^2 - d^2 = 4 dE_e (omega + L) > 0, so the gap is strictly positive
    at any finite coupling; the rearrangement keeps that true in floats
    even when both square roots are huge.
    """
    shift = collective_shift(inputs)
    omega_t = collective_rabi(inputs)
    delta_t = inputs.detuning + shift
    delta_big = inputs.delta_e + inputs.omega + shift
    num = delta_big**2 - delta_t**2  # = 4 dE_e (omega + L)
    den = np.hypot(delta_big, omega_t) + np.hypot(delta_t, omega_t)
    return float(0.5 * num / den)


def spp_matrix(inputs: SppInputs) -> np.ndarray:
    """Dense 4x4 of the model in the basis (0,0), (0,1), (1,0), (1,1)."""
    shift = collective_shift(inputs)
    g = 0.5 * collective_rabi(inputs)
    e0, e1 = inputs.e0, inputs.e0 + inputs.delta_e
    w = inputs.omega
    m = np.zeros((4, 4))
    m[0, 0] = e0 + 0.5 * shift
    m[1, 1] = e0 + w + 1.5 * shift
    m[2, 2] = e1 + 0.5 * shift
    m[3, 3] = e1 + w + 1.5 * shift
    m[1, 2] = m[2, 1] = g    # excitation-conserving
    m[0, 3] = m[3, 0] = -g   # counter-rotating
    return m
