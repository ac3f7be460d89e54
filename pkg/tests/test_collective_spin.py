import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spinstar.collective_spin import (
    DickeVector,
    SpinCoherentSpec,
    bloch_from_zeta,
    coherent_coeffs,
    dicke_index,
    dicke_moments,
    overlap,
    zeta_from_bloch,
)


def exact_probabilities(N, zeta_abs):
    """|C_k|^2 with rational |zeta|^2, in exact arithmetic."""
    z2 = Fraction(zeta_abs) ** 2
    denom = (1 + z2) ** N
    return [Fraction(math.comb(N, k)) * z2**k / denom for k in range(N + 1)]


def test_coeffs_n2_zeta1():
    amps = coherent_coeffs(SpinCoherentSpec(2, 1.0, 0.0)).amps
    np.testing.assert_allclose(amps, [0.5, 1 / math.sqrt(2), 0.5], atol=1e-15)


def test_coeffs_ground_state():
    amps = coherent_coeffs(SpinCoherentSpec(5, 0.0)).amps
    assert amps[0] == 1 and np.all(amps[1:] == 0)


def test_coeffs_n200_against_exact_rationals():
    amps = coherent_coeffs(SpinCoherentSpec(200, 1.0)).amps
    probs = np.abs(amps) ** 2
    assert abs(probs.sum() - 1) < 1e-12
    assert probs[0] == pytest.approx(2.0**-200, rel=1e-12)
    assert probs[-1] == pytest.approx(2.0**-200, rel=1e-12)
    exact = exact_probabilities(200, 1)
    np.testing.assert_allclose(probs, [float(p) for p in exact], rtol=1e-11, atol=0)


@pytest.mark.parametrize("N, zeta", [(7, 0.5), (30, 1.5), (64, 0.25)])
def test_coeffs_small_n_exact(N, zeta):
    probs = np.abs(coherent_coeffs(SpinCoherentSpec(N, zeta)).amps) ** 2
    exact = [float(p) for p in exact_probabilities(N, Fraction(zeta))]
    np.testing.assert_allclose(probs, exact, rtol=1e-11, atol=1e-300)


def test_coeffs_phase_convention():
    # C_m carries zeta^{N/2+m} with zeta = |zeta| e^{-i phi}
    amps = coherent_coeffs(SpinCoherentSpec(3, 1.0, 0.4)).amps
    np.testing.assert_allclose(np.angle(amps[1:] / amps[:-1]), -0.4, atol=1e-14)


def test_coeffs_large_n_finite():
    amps = coherent_coeffs(SpinCoherentSpec(10_000, 0.7, 1.0)).amps
    assert np.all(np.isfinite(amps))
    assert abs(np.sum(np.abs(amps) ** 2) - 1) < 1e-12


def test_coeffs_south_pole():
    spec = SpinCoherentSpec.from_bloch(4, math.pi, 0.0)
    assert spec.south_pole
    amps = coherent_coeffs(spec).amps
    assert abs(amps[-1]) == 1 and np.all(amps[:-1] == 0)


def test_rejects_bad_inputs():
    with pytest.raises(ValueError):
        SpinCoherentSpec(0, 1.0)
    with pytest.raises(ValueError):
        SpinCoherentSpec(3, math.inf)
    with pytest.raises(ValueError):
        SpinCoherentSpec(3, math.nan)
    with pytest.raises(ValueError):
        zeta_from_bloch(4.0, 0.0)


def test_bloch_examples():
    assert bloch_from_zeta(1.0, 0.3)[0] == pytest.approx(math.pi / 2, abs=1e-15)
    assert bloch_from_zeta(0.0, 0.3) == (0.0, 0.3)
    assert zeta_from_bloch(2 * math.atan(0.3), 1.0)[0] == pytest.approx(0.3, abs=1e-15)
    assert zeta_from_bloch(math.pi, 0.0)[0] == math.inf


@given(st.floats(-6, 6))
def test_bloch_round_trip(log10_zeta):
    z = 10.0**log10_zeta
    theta, phi = bloch_from_zeta(z, 0.2)
    assert bloch_from_zeta(*zeta_from_bloch(theta, phi))[0] == pytest.approx(theta, abs=1e-12)
    # theta is within 2/z of pi, so a float theta only pins z to ~1e-16 * z relative
    assert zeta_from_bloch(theta, phi)[0] == pytest.approx(z, rel=max(1e-12, 4e-16 * z))


def test_phi_reduced_mod_two_pi():
    assert SpinCoherentSpec(3, 1.0, 2 * math.pi + 0.5).phi == pytest.approx(0.5)
    assert SpinCoherentSpec(3, 1.0, -0.5).phi == pytest.approx(2 * math.pi - 0.5)


def test_moments_examples():
    m_bar, dm = dicke_moments(coherent_coeffs(SpinCoherentSpec(16, 1.0)))
    assert m_bar == pytest.approx(0, abs=1e-12) and dm == pytest.approx(2, abs=1e-12)
    assert dicke_moments(coherent_coeffs(SpinCoherentSpec(9, 0.0))) == (-4.5, 0.0)


def test_moments_n50_direct_sum():
    probs = exact_probabilities(50, Fraction(1, 2))
    m_bar = sum((k - 25) * p for k, p in enumerate(probs))
    var = sum((k - 25) ** 2 * p for k, p in enumerate(probs)) - m_bar**2
    assert m_bar == -15
    got = dicke_moments(coherent_coeffs(SpinCoherentSpec(50, 0.5)))
    assert got[0] == pytest.approx(-15, abs=1e-10)
    assert got[1] == pytest.approx(math.sqrt(float(var)), abs=1e-10)
    assert got[1] == pytest.approx(2.8284271247461903, abs=1e-10)


@pytest.mark.parametrize("N", [2, 11, 40, 157])
@pytest.mark.parametrize("z", [0.05, 0.4, 1.0, 2.5, 30.0])
def test_moments_closed_forms(N, z):
    m_bar, dm = dicke_moments(coherent_coeffs(SpinCoherentSpec(N, z)))
    assert m_bar == pytest.approx(-(N / 2) * (1 - z * z) / (1 + z * z), abs=1e-10)
    assert dm == pytest.approx(math.sqrt(N) * z / (1 + z * z), abs=1e-10)


def test_moments_reject_unnormalized():
    with pytest.raises(ValueError):
        dicke_moments(DickeVector(2, [1.0, 1.0, 0.0]))


def test_overlap_examples():
    v = coherent_coeffs(SpinCoherentSpec(10, 0.8, 0.3))
    assert overlap(v, v) == pytest.approx(1, abs=1e-14)
    ground = coherent_coeffs(SpinCoherentSpec(10, 0.0))
    equator = coherent_coeffs(SpinCoherentSpec.from_bloch(10, math.pi / 2, 0.0))
    assert abs(overlap(ground, equator)) == pytest.approx(2.0**-5, rel=1e-12)
    with pytest.raises(ValueError):
        overlap(v, ground.__class__(3, [1, 0, 0, 0]))


@given(st.floats(0.01, math.pi - 0.01), st.floats(0, 2 * math.pi), st.integers(1, 60))
def test_antipodal_orthogonality(theta, phi, N):
    a = coherent_coeffs(SpinCoherentSpec.from_bloch(N, theta, phi))
    b = coherent_coeffs(SpinCoherentSpec.from_bloch(N, math.pi - theta, phi + math.pi))
    assert abs(overlap(a, b)) < 1e-12


@settings(max_examples=60)
@given(st.integers(1, 10_000), st.floats(-3, 3))
def test_normalization_property(N, log10_zeta):
    amps = coherent_coeffs(SpinCoherentSpec(N, 10.0**log10_zeta, 0.7)).amps
    assert abs(np.sum(np.abs(amps) ** 2) - 1) < 1e-12


@given(st.integers(1, 200), st.floats(0.01, 100))
def test_inversion_symmetry(N, z):
    a = np.abs(coherent_coeffs(SpinCoherentSpec(N, z)).amps)
    b = np.abs(coherent_coeffs(SpinCoherentSpec(N, 1 / z)).amps)
    np.testing.assert_allclose(a, b[::-1], rtol=1e-9, atol=1e-300)


def test_dicke_index():
    assert dicke_index(4, -2) == 0 and dicke_index(4, 2) == 4
    assert dicke_index(3, 0.5) == 2
    with pytest.raises(ValueError):
        dicke_index(3, 0)
    with pytest.raises(ValueError):
        dicke_index(4, 3)
