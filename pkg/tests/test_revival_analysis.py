import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spinstar.collective_spin import SpinCoherentSpec, coherent_coeffs
from spinstar.effective_dynamics import phase_arrays, truncated_propagate
from spinstar.exact_dynamics import ModelParams, build_initial, exact_propagate
from spinstar.phase_space import equatorial_slice, phi_grid
from spinstar.revival_analysis import (
    FractionalTime,
    cat_count,
    displacement_propagate,
    fourier_component_phases,
    fractional_revival_state,
    g_fourier_coefficients,
    gauss_sum_closed_form,
    gauss_sum_dft,
    revival_report,
    revival_time,
)

from conftest import equatorial_initial, random_joint_state


def test_revival_time_examples():
    assert revival_time(ModelParams(2))[0] == pytest.approx(2 * math.pi * math.sqrt(2))
    assert revival_time(ModelParams(2))[0] == pytest.approx(8.885766, abs=1e-6)
    assert revival_time(ModelParams(100))[0] == pytest.approx(2 * math.pi * math.sqrt(2550))
    T, full = revival_time(ModelParams(9, 2.0))
    assert T == pytest.approx(math.pi * math.sqrt(4.5 * 5.5)) and full == 2 * T


def test_fractional_time():
    params = ModelParams(100)
    assert FractionalTime(3, 4).time(params) == pytest.approx(0.75 * revival_time(params)[0])
    with pytest.raises(ValueError):
        FractionalTime(2, 4)


def test_component_phase_examples():
    np.testing.assert_allclose(fourier_component_phases(2), [math.pi / 2, 3 * math.pi / 2])
    np.testing.assert_allclose(fourier_component_phases(3), [0, 2 * math.pi / 3, 4 * math.pi / 3])
    np.testing.assert_allclose(fourier_component_phases(1), [0])


def _direct_dft(p, q, N, sign):
    # brute force: sample F_m at t = pT/q for m = 0..q-1, take the DFT in the phi_l basis
    params = ModelParams(N)
    T, _ = revival_time(params)
    F, _ = phase_arrays(N, 1.0, sign, p * T / q)
    k0 = N // 2
    m = np.arange(q)
    Fm = F[k0 : k0 + q]
    phis = fourier_component_phases(q)
    return (np.exp(1j * np.outer(phis, m)) * Fm[None, :]).sum(axis=1) / math.sqrt(q)


@pytest.mark.parametrize("q", range(1, 9))
@pytest.mark.parametrize("N", [16, 100])
@pytest.mark.parametrize("sign", [1, -1])
def test_dft_matches_float_phases(q, N, sign):
    if 2 * q > N:
        pytest.skip("q levels above m=0 not available")
    for p in range(1, q + 1):
        if math.gcd(p, q) != 1:
            continue
        np.testing.assert_allclose(gauss_sum_dft(p, q, ModelParams(N), sign), _direct_dft(p, q, N, sign), atol=1e-9)


@pytest.mark.parametrize("q", range(1, 13))
@pytest.mark.parametrize("N", [16, 100, 168])
@pytest.mark.parametrize("sign", [1, -1])
def test_closed_form_matches_dft(q, N, sign):
    params = ModelParams(N)
    dft = gauss_sum_dft(1, q, params, sign)
    closed = [gauss_sum_closed_form(q, l, params, sign) for l in range(q)]
    np.testing.assert_allclose(dft, closed, atol=1e-12)


@given(st.integers(1, 40), st.integers(1, 200), st.sampled_from([1, -1]), st.integers(1, 100))
def test_parseval(q, N, sign, p):
    if math.gcd(p, q) != 1:
        return
    c = gauss_sum_dft(p, q, ModelParams(N), sign)
    assert np.sum(np.abs(c) ** 2) == pytest.approx(q, rel=1e-12)


@pytest.mark.parametrize("q", range(1, 13))
@pytest.mark.parametrize("sign", [1, -1])
def test_g_coefficients_relation(q, sign):
    params = ModelParams(100)
    F = gauss_sum_dft(1, q, params, sign)
    G = g_fourier_coefficients(1, q, params, sign)
    phis = fourier_component_phases(q)
    np.testing.assert_allclose(G, np.exp(-1j * phis) * F, atol=1e-12)


@pytest.mark.parametrize("p,q", [(1, 2), (1, 3), (3, 4), (2, 5), (1, 7)])
@pytest.mark.parametrize("sign", [1, -1])
def test_f_periodicity_at_fractional_time(p, q, sign):
    N = 60
    T, _ = revival_time(ModelParams(N))
    F, _ = phase_arrays(N, 1.0, sign, p * T / q)
    # F_{m+q} = (-1)^{p(q-1)} F_m: periodic for odd q, antiperiodic for even q
    expected = 1.0 if q % 2 else -1.0
    np.testing.assert_allclose(F[q:] / F[:-q], expected, atol=1e-9)


@pytest.mark.parametrize("p,q", [(1, 2), (1, 3), (3, 4), (2, 5), (1, 1)])
@pytest.mark.parametrize("N", [12, 13, 40])
def test_displacement_form_matches_truncated(p, q, N, rng):
    params = ModelParams(N, 1.0, 0.7)
    _, full = revival_time(params)
    psi = random_joint_state(N, rng)
    # both maps are linear, so a generic state checks every branch and level
    a = displacement_propagate(psi, p, q, params)
    b = truncated_propagate(psi, params, p * full / q)
    np.testing.assert_allclose(a.amps, b.amps, atol=1e-11)


def test_fractional_state_q1_is_initial():
    params, spec, psi = equatorial_initial(20, 0.3)
    state = fractional_revival_state(1, 1, params, spec, 1)
    assert abs(state.overlap(psi)) == pytest.approx(1, abs=1e-12)


def test_fractional_state_q2_ghz_peaks():
    params, spec, _ = equatorial_initial(100)
    state = fractional_revival_state(1, 2, params, spec, 1)
    y = equatorial_slice(state, 512)
    phis = phi_grid(512)
    top = np.sort(phis[np.argsort(y)[-2:]])
    # components sit at phi0 + pi/2 and phi0 + 3 pi/2
    np.testing.assert_allclose(top, [math.pi / 2, 3 * math.pi / 2], atol=2 * math.pi / 512)
    assert cat_count(y) == 2


@pytest.mark.parametrize("sign", [1, -1])
def test_q4_fidelity(sign):
    alpha, beta = (1, 0) if sign > 0 else (0, 1)
    params, spec, psi = equatorial_initial(100, 0.0, alpha, beta)
    T, _ = revival_time(params)
    exact = exact_propagate(psi, params, T / 4)
    ideal = fractional_revival_state(1, 4, params, spec, sign)
    assert abs(ideal.overlap(exact)) > 0.9


def test_fractional_state_requires_equator():
    params = ModelParams(10)
    with pytest.raises(ValueError):
        fractional_revival_state(1, 2, params, SpinCoherentSpec.from_bloch(10, 1.0), 1)


def test_fractional_state_matches_truncated_evolution():
    # ideal cat = truncated dynamics at pT/q (up to normalization from overlaps)
    for N, (p, q) in [(40, (1, 3)), (40, (3, 4)), (41, (1, 2)), (41, (2, 5))]:
        params, spec, psi = equatorial_initial(N, 0.4)
        _, full = revival_time(params)
        trunc = truncated_propagate(psi, params, p * full / q)
        ideal = fractional_revival_state(p, q, params, spec, 1)
        assert abs(ideal.overlap(trunc)) == pytest.approx(1, abs=1e-10)


def test_cat_count_examples():
    y = np.zeros(16)
    y[[2, 10]] = 1.0
    assert cat_count(y) == 2
    assert cat_count(np.ones(8)) == 0  # flat: no strict right neighbour below
    plateau = np.zeros(12)
    plateau[3:5] = 1.0
    assert cat_count(plateau) == 1
    wrap = np.zeros(10)
    wrap[0], wrap[-1] = 1.0, 0.5
    assert cat_count(wrap) == 1
    small = np.zeros(10)
    small[2], small[6] = 1.0, 0.1
    assert cat_count(small) == 1
    assert cat_count(small, prominence=0.05) == 2
    with pytest.raises(ValueError):
        cat_count([1.0, 2.0])


def test_non_coprime_rejected():
    with pytest.raises(ValueError):
        gauss_sum_dft(2, 4, ModelParams(10), 1)
    with pytest.raises(ValueError):
        revival_report(ModelParams(10), 3, 6)


def test_closed_form_errors():
    with pytest.raises(NotImplementedError):
        gauss_sum_closed_form(3, 0, ModelParams(10), 1, p=2)
    with pytest.raises(ValueError):
        gauss_sum_closed_form(3, 3, ModelParams(10), 1)
    with pytest.raises(ValueError):
        gauss_sum_closed_form(3, 0, ModelParams(9), 1)


def test_report_keyvalue():
    rep = revival_report(ModelParams(40), 1, 3, n_phi=256)
    text = rep.to_keyvalue()
    lines = dict(line.split(" = ", 1) for line in text.strip().split("\n"))
    assert lines["q"] == "3" and lines["sign"] == "+1"
    assert float(lines["closed_form_residual"]) < 1e-12
    assert int(lines["cat_count_estimate"]) == 3
    assert {"phi_0", "phi_2", "fourier_2"} <= set(lines)
    re, im = (float(v) for v in lines["fourier_1"].split(","))
    assert complex(re, im) == pytest.approx(rep.fourier_coeffs[1], abs=1e-15)


def test_report_odd_n():
    rep = revival_report(ModelParams(41), 1, 2, n_phi=256)
    assert rep.odd_n_extension and math.isnan(rep.closed_form_residual)
    assert rep.time == pytest.approx(rep.T)
    # half of the 2T period: one coefficient vanishes, leaving a single coherent state rotated by pi
    assert sorted(np.round(np.abs(rep.fourier_coeffs), 12)) == [0.0, pytest.approx(math.sqrt(2))]
    assert rep.cat_count_estimate == 1
    assert rep.fidelity_vs_exact > 0.8
