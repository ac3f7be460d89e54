"""Dicke-basis representation of spin-coherent states of N qubits.

Amplitudes are stored by the integer index ``k = m + N/2`` (number of up
spins), so ``amps[k]`` is the coefficient of ``|N/2, m>``.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln, xlogy

from ._checks import NORM_TOL, check_finite, check_normalized, check_positive_int, frozen_array

TWO_PI = 2.0 * math.pi


def m_values(N):
    """Magnetic quantum numbers ``-N/2, ..., N/2`` as floats."""
    return np.arange(N + 1) - N / 2.0


def dicke_index(N, m):
    """Map ``m`` (integer or half-integer) onto the storage index ``k``."""
    k2 = 2 * m + N
    k = int(round(k2)) // 2
    if abs(k2 - 2 * k) > 1e-9 or not 0 <= k <= N:
        raise ValueError(f"m={m} is not a valid Dicke label for N={N}")
    return k


def bloch_from_zeta(zeta_abs, phi):
    """``(|zeta|, phi) -> (theta, phi)`` with ``theta = 2 arctan|zeta|``."""
    if zeta_abs < 0:
        raise ValueError("zeta_abs must be nonnegative")
    return 2.0 * math.atan(zeta_abs), phi


def zeta_from_bloch(theta, phi):
    """Inverse of :func:`bloch_from_zeta`; ``theta = pi`` gives ``inf``."""
    if not 0.0 <= theta <= math.pi:
        raise ValueError(f"theta must lie in [0, pi], got {theta}")
    if theta == math.pi:
        return math.inf, phi
    return math.tan(theta / 2.0), phi


@dataclass(frozen=True)
class SpinCoherentSpec:
    """Parameters of the coherent state ``|zeta>_N`` with ``zeta = |zeta| e^{-i phi}``.

    ``south_pole`` marks ``theta = pi`` (``|zeta| = inf``); ``zeta_abs`` is
    then ignored.
    """

    N: int
    zeta_abs: float
    phi: float = 0.0
    south_pole: bool = False

    def __post_init__(self):
        check_positive_int(self.N, "N")
        if not self.south_pole:
            z = check_finite(self.zeta_abs, "zeta_abs")
            if z < 0:
                raise ValueError("zeta_abs must be nonnegative")
        object.__setattr__(self, "phi", check_finite(self.phi, "phi") % TWO_PI)

    @classmethod
    def from_bloch(cls, N, theta, phi=0.0):
        zeta_abs, phi = zeta_from_bloch(theta, phi)
        if math.isinf(zeta_abs):
            return cls(N, math.inf, phi, south_pole=True)
        return cls(N, zeta_abs, phi)

    @property
    def theta(self):
        if self.south_pole:
            return math.pi
        return bloch_from_zeta(self.zeta_abs, self.phi)[0]


@dataclass(frozen=True)
class DickeVector:
    N: int
    amps: np.ndarray = field(repr=False)

    def __post_init__(self):
        check_positive_int(self.N, "N")
        amps = frozen_array(self.amps)
        if amps.shape != (self.N + 1,):
            raise ValueError(f"expected {self.N + 1} amplitudes, got shape {amps.shape}")
        object.__setattr__(self, "amps", amps)

    def norm(self):
        return float(np.linalg.norm(self.amps))

    def amplitude(self, m):
        return self.amps[dicke_index(self.N, m)]


def log_abs_coeffs(N, theta):
    """``log|C_k(theta)|`` for every ``k``; broadcasts over an array of ``theta``.

    Computed entirely in the log domain so ``N`` in the tens of thousands is
    fine. Entries with zero amplitude come back as ``-inf``.
    """
    theta = np.asarray(theta, dtype=float)[..., None]
    k = np.arange(N + 1)
    log_binom = gammaln(N + 1) - gammaln(k + 1) - gammaln(N - k + 1)
    with np.errstate(divide="ignore"):
        c = np.cos(theta / 2.0)
        s = np.sin(theta / 2.0)
        # cos(pi/2) is ~6e-17, not 0; the south pole is handled by callers.
        return 0.5 * log_binom + xlogy(N - k, np.abs(c)) + xlogy(k, np.abs(s))


def coherent_coeffs(spec):
    """Dicke amplitudes ``C_m(zeta)`` of the spin-coherent state ``spec``.

    The binomial is evaluated with ``gammaln`` and powers of ``|zeta|`` as
    ``k log|zeta|``; the result is renormalized so the norm is 1 to machine
    precision.
    """
    N = spec.N
    k = np.arange(N + 1)
    phase = np.exp(-1j * spec.phi * k)
    if spec.south_pole:
        amps = np.zeros(N + 1, complex)
        amps[N] = phase[N]
        return DickeVector(N, amps)
    z = spec.zeta_abs
    if z == 0.0:
        amps = np.zeros(N + 1, complex)
        amps[0] = 1.0
        return DickeVector(N, amps)
    log_binom = gammaln(N + 1) - gammaln(k + 1) - gammaln(N - k + 1)
    log_z = math.log(z)
    # log(1 + |z|^2) without overflow for huge |z|
    log_norm = 0.5 * N * np.logaddexp(0.0, 2.0 * log_z)
    log_abs = 0.5 * log_binom + k * log_z - log_norm
    mags = np.exp(log_abs)
    mags /= np.sqrt(np.sum(mags**2))
    return DickeVector(N, mags * phase)


def dicke_moments(v):
    """Mean and standard deviation of ``m`` under ``|a_m|^2``."""
    check_normalized(v.amps, "DickeVector", NORM_TOL)
    p = np.abs(v.amps) ** 2
    m = m_values(v.N)
    m_bar = float(np.sum(m * p))
    var = float(np.sum((m - m_bar) ** 2 * p))
    return m_bar, math.sqrt(max(var, 0.0))


def overlap(u, v):
    """``<u|v>``."""
    if u.N != v.N:
        raise ValueError(f"N mismatch: {u.N} vs {v.N}")
    return complex(np.vdot(u.amps, v.amps))
