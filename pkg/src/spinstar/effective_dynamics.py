"""Semiclassical-branch effective dynamics.

For the central qubit in ``|phi0+->`` the N qubits see
``H^+- = +-lam sqrt(J^2 - J_z^2 - J_z sigma_z)``. Keeping the first two
terms of its expansion in ``M = (J_z^2 + J_z sigma_z) / J^2`` gives a
one-axis-twisting Hamiltonian whose evolution is a pure phase per
``(m, s)`` level: ``F_m`` on ``|m, down>`` and ``G_m`` on ``|m, up>``.
"""

import enum
import math
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from ._checks import check_finite, check_normalized
from .collective_spin import dicke_index, m_values
from .exact_dynamics import DOWN, UP, JointState, qubit_branch


class BranchSign(enum.IntEnum):
    PLUS = 1
    MINUS = -1


class PhasePair(NamedTuple):
    F: complex
    G: complex


def semiclassical_basis(phi0):
    """Return ``(|phi0+>, |phi0->)`` as ``[down, up]`` amplitude arrays."""
    return qubit_branch(phi0, +1), qubit_branch(phi0, -1)


def _casimir(N):
    # j(j+1) with j = N/2
    return (N / 2.0) * (N / 2.0 + 1.0)


def phase_arrays(N, lam, sign, t):
    """``(F_m(t), G_m(t))`` for all ``m = -N/2..N/2`` at once."""
    sign = int(BranchSign(sign))
    jj = _casimir(N)
    root = math.sqrt(jj)
    m = m_values(N)
    F = np.exp(-1j * sign * t * lam * (root - m * (m - 1) / (2.0 * root)))
    G = np.exp(-1j * sign * t * lam * (root - m * (m + 1) / (2.0 * root)))
    return F, G


def fg_phases(params, sign, m, t):
    """``F_m^+-(t)`` and ``G_m^+-(t)`` for a single level ``m``."""
    k = dicke_index(params.N, m)
    F, G = phase_arrays(params.N, params.lam, sign, check_finite(t, "t"))
    return PhasePair(complex(F[k]), complex(G[k]))


def truncated_propagate(state, params, t):
    """Evolve ``state`` under the truncated effective Hamiltonian.

    The qubit factor of every Dicke level is split into its ``|phi0+->``
    components, each branch picks up its own ``F``/``G`` phases and the
    results are recombined. ``F`` and ``G`` already carry the branch-dependent
    ``sqrt(j(j+1))`` term, so superpositions of the two branches get the
    correct relative phase.

    Each branch evolves unitarily, so the norm is preserved whenever every
    Dicke level carries a single branch (``alpha = 0`` or ``beta = 0``). For
    mixed-branch states the two images need not stay orthogonal and the
    norm can drift; that is a property of the approximation, not round-off.
    """
    t = check_finite(t, "t")
    if state.N != params.N:
        raise ValueError(f"state.N={state.N} does not match params.N={params.N}")
    check_normalized(state.amps, "JointState")
    out = np.zeros_like(state.amps)
    for sign in BranchSign:
        basis = qubit_branch(params.phi0, int(sign))
        coeff = state.amps @ basis.conj()
        F, G = phase_arrays(params.N, params.lam, sign, t)
        out[:, DOWN] += coeff * basis[DOWN] * F
        out[:, UP] += coeff * basis[UP] * G
    return JointState(state.N, out)


def expansion_coefficient(k):
    """Coefficient ``A_k`` of ``x^k`` in ``sqrt(1 - x)``."""
    if k < 0:
        raise ValueError("k must be >= 0")
    if k == 0:
        return 1.0
    if k == 1:
        return -0.5
    double_fact = math.prod(range(1, 2 * k - 2, 2))
    return -float(Fraction(double_fact, 2**k * math.factorial(k)))


def effective_eigenphase(N, m, s, sign, lam=1.0):
    """Eigenvalue of ``H^+-`` on ``|N/2, m> x |s>`` (``s = +1`` up, ``-1`` down).

    A negative radicand can only come from roundoff at the stationary edge
    states and is clamped to zero.
    """
    dicke_index(N, m)
    if s not in (1, -1):
        raise ValueError("s must be +1 or -1")
    radicand = _casimir(N) - m * m - m * s
    return int(BranchSign(sign)) * lam * math.sqrt(max(radicand, 0.0))


def truncated_eigenphase(N, m, s, sign, lam=1.0):
    """Eigenvalue of the two-term truncation of ``H^+-``."""
    dicke_index(N, m)
    root = math.sqrt(_casimir(N))
    return int(BranchSign(sign)) * lam * (root - (m * m + m * s) / (2.0 * root))


def truncation_residual_bound(N, m, s, lam=1.0, kmax=200):
    """``lam sqrt(j(j+1)) sum_{k>=2} |A_k| |x|^k`` with ``x = (m^2 + m s)/j(j+1)``.

    Upper bound on ``|effective - truncated|`` eigenphase. All ``A_k`` with
    ``k >= 2`` share a sign, so for ``x >= 0`` the bound is attained (up to
    the ``kmax`` cutoff).
    """
    jj = _casimir(N)
    x = (m * m + m * s) / jj
    if abs(x) >= 1:
        return math.inf
    term = abs(expansion_coefficient(2)) * x * x
    total = 0.0
    for k in range(2, kmax + 1):
        total += term
        # |A_{k+1}| / |A_k| = (2k - 1) / (2k + 2)
        term *= abs(x) * (2 * k - 1) / (2 * k + 2)
    return lam * math.sqrt(jj) * total
