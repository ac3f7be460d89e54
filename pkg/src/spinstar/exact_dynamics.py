"""Exact resonant evolution of the spin star in the interaction picture.

The joint state lives in ``(Dicke level) x (central qubit)``; amplitudes are
an ``(N+1, 2)`` array indexed ``[k, s]`` with ``k = m + N/2`` and
``s = 0`` for down, ``s = 1`` for up.

``H_int = lam (J_- s_+ + J_+ s_-)`` only couples ``|m, up>`` with
``|m+1, down>``, so the propagator is a direct sum of 2x2 rotations plus the
two stationary edge states ``|-N/2, down>`` and ``|N/2, up>``.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from ._checks import check_finite, check_normalized, check_positive_int, frozen_array
from .collective_spin import TWO_PI, coherent_coeffs, dicke_index

DOWN, UP = 0, 1


@dataclass(frozen=True)
class ModelParams:
    """Physical configuration of one run.

    ``omega`` and ``Omega`` are recorded for completeness only: on
    resonance they drop out of the interaction-picture dynamics.
    """

    N: int
    lam: float = 1.0
    phi0: float = 0.0
    omega: float = 1.0
    Omega: float = 1.0

    def __post_init__(self):
        check_positive_int(self.N, "N")
        lam = check_finite(self.lam, "lam")
        if lam <= 0:
            raise ValueError(f"lam must be positive, got {lam}")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "phi0", check_finite(self.phi0, "phi0") % TWO_PI)

    @property
    def j(self):
        return self.N / 2.0


@dataclass(frozen=True)
class JointState:
    N: int
    amps: np.ndarray = field(repr=False)

    def __post_init__(self):
        check_positive_int(self.N, "N")
        amps = frozen_array(self.amps)
        if amps.shape != (self.N + 1, 2):
            raise ValueError(f"expected shape ({self.N + 1}, 2), got {amps.shape}")
        object.__setattr__(self, "amps", amps)

    def norm(self):
        return float(np.linalg.norm(self.amps))

    def overlap(self, other):
        """``<self|other>``."""
        if self.N != other.N:
            raise ValueError(f"N mismatch: {self.N} vs {other.N}")
        return complex(np.vdot(self.amps, other.amps))

    @classmethod
    def basis(cls, N, m, s):
        """The product basis state ``|N/2, m> x |s>`` with ``s`` in {"down", "up"}."""
        amps = np.zeros((N + 1, 2), complex)
        amps[dicke_index(N, m), {"down": DOWN, "up": UP}[s]] = 1.0
        return cls(N, amps)


def qubit_branch(phi0, sign):
    """``(|down> + sign e^{-i phi0} |up>) / sqrt(2)`` as ``[down, up]``."""
    return np.array([1.0, sign * np.exp(-1j * phi0)]) / math.sqrt(2.0)


def build_initial(params, spec, alpha=1.0, beta=0.0):
    """``|zeta_0>_N x (alpha |phi0+> + beta |phi0->)``."""
    if spec.N != params.N:
        raise ValueError(f"spec.N={spec.N} does not match params.N={params.N}")
    dphi = (spec.phi - params.phi0 + math.pi) % TWO_PI - math.pi
    if abs(dphi) > 1e-12:
        raise ValueError(f"coherent-state phase {spec.phi} differs from params.phi0 {params.phi0}")
    alpha, beta = complex(alpha), complex(beta)
    check_normalized(np.array([alpha, beta]), "qubit coefficients (alpha, beta)")
    qubit = alpha * qubit_branch(params.phi0, +1) + beta * qubit_branch(params.phi0, -1)
    c = coherent_coeffs(spec).amps
    return JointState(params.N, np.outer(c, qubit))


def block_couplings(N, lam):
    """``g_k = lam sqrt((k+1)(N-k))`` for the block ``{|k, up>, |k+1, down>}``."""
    k = np.arange(N)
    return lam * np.sqrt((k + 1.0) * (N - k))


def exact_propagate(state, params, t):
    """Apply ``U(t) = exp(-i t H_int)`` to ``state``; negative ``t`` runs backwards."""
    t = check_finite(t, "t")
    if state.N != params.N:
        raise ValueError(f"state.N={state.N} does not match params.N={params.N}")
    check_normalized(state.amps, "JointState")
    a = state.amps
    g = block_couplings(params.N, params.lam) * t
    c, s = np.cos(g), np.sin(g)
    up = a[:-1, UP]
    down = a[1:, DOWN]
    out = np.empty_like(a)
    out[:-1, UP] = c * up - 1j * s * down
    out[1:, DOWN] = c * down - 1j * s * up
    out[0, DOWN] = a[0, DOWN]
    out[-1, UP] = a[-1, UP]
    return JointState(state.N, out)


def excitation_values(N):
    """Eigenvalues ``M = m + s/2`` of ``J_z + sigma_z/2``, ascending."""
    return np.arange(N + 2) - (N + 1) / 2.0


def conserved_excitation(state):
    """Expectation and full distribution of ``J_z + sigma_z/2``.

    ``distribution[i]`` is the probability of ``excitation_values(N)[i]``.
    """
    check_normalized(state.amps, "JointState")
    p = np.abs(state.amps) ** 2
    dist = np.zeros(state.N + 2)
    dist[:-1] += p[:, DOWN]
    dist[1:] += p[:, UP]
    return float(np.dot(excitation_values(state.N), dist)), dist

