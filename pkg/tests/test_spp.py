from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ringqed.electronic import aligned_excited_index, matter_elements
from ringqed.spp import (
    SppInputs,
    collective_rabi,
    collective_shift,
    ground_to_lower_gap,
    rabi_splitting,
    spp_levels,
    spp_matrix,
    tavis_cummings_splitting,
)


def test_input_validation():
    with pytest.raises(ValueError):
        SppInputs(e0=0.0, delta_e=0.1, omega=0.0, lambda_vec=(0.1, 0.1), r01=(1.0, 1.0))
    with pytest.raises(ValueError):
        SppInputs(e0=0.0, delta_e=-0.1, omega=0.1, lambda_vec=(0.1, 0.1), r01=(1.0, 1.0))
    with pytest.raises(ValueError):
        SppInputs(e0=0.0, delta_e=0.1, omega=0.1, lambda_vec=(0.1, 0.1), r01=(1.0, 1.0),
                  n_electrons=0.5)


def _random_inputs(rng) -> SppInputs:
    return SppInputs(
        e0=float(rng.uniform(-2.0, 2.0)),
        delta_e=float(rng.uniform(0.05, 3.0)),
        omega=float(rng.uniform(0.1, 3.0)),
        lambda_vec=(float(rng.uniform(-0.3, 0.3)), float(rng.uniform(-0.3, 0.3))),
        r01=(float(rng.uniform(-1.5, 1.5)), float(rng.uniform(-1.5, 1.5))),
        n_electrons=float(rng.uniform(1.0, 100.0)),
    )


def test_levels_match_dense_four_by_four_on_1000_random_inputs():
    rng = np.random.default_rng(23)
    worst = 0.0
    for _ in range(1000):
        inp = _random_inputs(rng)
        dense = np.sort(np.linalg.eigvalsh(spp_matrix(inp)))
        closed = spp_levels(inp).levels
        worst = max(worst, float(np.max(np.abs(dense - closed))))
    assert worst <= 1e-12


def test_gap_is_exact_level_difference():
    rng = np.random.default_rng(4)
    for _ in range(200):
        inp = _random_inputs(rng)
        spec = spp_levels(inp)
        gap = ground_to_lower_gap(inp)
        assert gap == pytest.approx(spec.e_lower - spec.e_ground, rel=1e-12, abs=1e-15)


def test_gap_positive_across_extreme_sweep():
    # At huge collective shifts the two square roots agree to many digits
    # and a naive difference would round to zero; the gap must stay
    # strictly positive anyway.
    for ne in (1.0, 10.0, 1e2, 1e3, 1e4, 1e5, 1e6):
        for lam in (1e-4, 1e-2, 0.1, 0.5, 1.0):
            for omega in (0.05, 0.125, 1.0):
                for de in (0.01, 0.125, 2.0):
                    inp = SppInputs(
                        e0=0.0, delta_e=de, omega=omega,
                        lambda_vec=(lam, lam), r01=(-1.087, -1.087),
                        n_electrons=ne,
                    )
                    assert ground_to_lower_gap(inp) > 0.0


@settings(max_examples=300, derandomize=True)
@given(
    ne=st.floats(min_value=1.0, max_value=1e6),
    lam=st.floats(min_value=0.0, max_value=1.0),
    omega=st.floats(min_value=1e-3, max_value=10.0),
    de=st.floats(min_value=1e-3, max_value=10.0),
    rx=st.floats(min_value=-3.0, max_value=3.0),
)
def test_gap_positive_property(ne, lam, omega, de, rx):
    inp = SppInputs(
        e0=0.0, delta_e=de, omega=omega,
        lambda_vec=(lam, lam), r01=(rx, rx), n_electrons=ne,
    )
    assert ground_to_lower_gap(inp) > 0.0


def test_splitting_minimized_exactly_at_shift_compensated_detuning():
    # Sweep the detuning with the coupling held fixed (the dipole is
    # rescaled against delta_e so the Rabi frequency does not move): the
    # avoided crossing sits at detuning = -shift, not at bare resonance,
    # and there the splitting collapses to the Rabi frequency exactly.
    omega, ne, lam = 0.8, 50.0, 0.12
    base = SppInputs(e0=0.0, delta_e=omega, omega=omega,
                     lambda_vec=(lam, lam), r01=(0.9, 0.4), n_electrons=ne)
    shift = collective_shift(base)
    rabi_ref = collective_rabi(base)
    de_star = omega + shift  # detuning omega - delta_e == -shift

    def splitting_at(delta_e: float) -> float:
        scale = base.delta_e / delta_e
        inp = SppInputs(e0=0.0, delta_e=delta_e, omega=omega,
                        lambda_vec=(lam, lam),
                        r01=(0.9 * scale, 0.4 * scale), n_electrons=ne)
        assert collective_rabi(inp) == pytest.approx(rabi_ref, rel=1e-13)
        return rabi_splitting(inp)

    s_star = splitting_at(de_star)
    assert s_star == pytest.approx(rabi_ref, rel=1e-13)
    for offset in (-0.2, -0.05, -1e-3, 1e-3, 0.05, 0.2):
        assert splitting_at(de_star + offset) > s_star
    # at bare resonance the splitting already exceeds the Rabi frequency
    assert splitting_at(omega) > rabi_ref


def test_tavis_cummings_comparison():
    inp = SppInputs(e0=0.0, delta_e=0.5, omega=0.5,
                    lambda_vec=(0.1, 0.1), r01=(1.0, 1.0), n_electrons=10.0)
    full = rabi_splitting(inp)
    tc = tavis_cummings_splitting(inp)
    assert full != pytest.approx(tc, rel=1e-3)
    # both reduce to the bare detuning magnitude when the coupling is off
    inp0 = SppInputs(e0=0.0, delta_e=0.4, omega=0.5,
                     lambda_vec=(0.0, 0.0), r01=(1.0, 1.0))
    assert rabi_splitting(inp0) == pytest.approx(abs(inp0.detuning), rel=1e-15)
    assert tavis_cummings_splitting(inp0) == pytest.approx(abs(inp0.detuning), rel=1e-15)


def test_level_ordering_and_shift_sign():
    rng = np.random.default_rng(11)
    for _ in range(100):
        inp = _random_inputs(rng)
        spec = spp_levels(inp)
        lv = spec.levels
        assert lv[0] <= lv[1] <= lv[2] <= lv[3]
        assert spec.collective_shift >= 0.0
        assert spec.rabi_splitting == pytest.approx(lv[2] - lv[1], rel=1e-10, abs=1e-14)


@pytest.fixture(scope="module")
def ring_spp(ring_basis, omega_res):
    el = matter_elements(ring_basis)
    ex = aligned_excited_index(ring_basis, el)
    return SppInputs(
        e0=float(ring_basis.energies[0]),
        delta_e=omega_res,
        omega=omega_res,
        lambda_vec=(0.005, 0.005),
        r01=tuple(el.dipole[0, ex]),
    )


def test_ring_benchmark_gap(ring_spp):
    # the closed-form model reproduces the smallest truncated expansion's
    # ground-to-lower gap on the benchmark ring
    assert ground_to_lower_gap(ring_spp) == pytest.approx(0.1224009, abs=5e-7)


def test_ring_benchmark_occupation_estimate(ring_spp):
    # perturbative photon occupation from the counter-rotating amplitude
    g = 0.5 * collective_rabi(ring_spp)
    delta_big = ring_spp.delta_e + ring_spp.omega + collective_shift(ring_spp)
    occ = (g / delta_big) ** 2
    assert occ == pytest.approx(0.0001180, abs=5e-7)
