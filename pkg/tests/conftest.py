import math

import numpy as np
import pytest
from scipy.linalg import expm

from spinstar.collective_spin import SpinCoherentSpec
from spinstar.exact_dynamics import JointState, ModelParams, build_initial

ACCEPTANCE_LINES = []


def dense_interaction(N, lam=1.0):
    """``lam (J_- s_+ + J_+ s_-)`` assembled from ladder matrices with kron.

    Basis ordering matches ``JointState.amps.ravel()``: index ``2k + s``.
    """
    j = N / 2.0
    m = np.arange(N + 1) - j
    # J_+ |m> = sqrt(j(j+1) - m(m+1)) |m+1>
    jp = np.diag(np.sqrt(j * (j + 1) - m[:-1] * (m[:-1] + 1)), -1)
    jm = jp.T
    sp = np.array([[0.0, 0.0], [1.0, 0.0]])  # |up><down| in [down, up] order
    return lam * (np.kron(jm, sp) + np.kron(jp, sp.T))


def dense_propagate(state, lam, t):
    U = expm(-1j * t * dense_interaction(state.N, lam))
    return (U @ state.amps.ravel()).reshape(state.N + 1, 2)


def random_joint_state(N, rng):
    amps = rng.normal(size=(N + 1, 2)) + 1j * rng.normal(size=(N + 1, 2))
    return JointState(N, amps / np.linalg.norm(amps))


def equatorial_initial(N, phi0=0.0, alpha=1.0, beta=0.0, lam=1.0):
    params = ModelParams(N, lam, phi0)
    spec = SpinCoherentSpec.from_bloch(N, math.pi / 2, phi0)
    return params, spec, build_initial(params, spec, alpha, beta)


@pytest.fixture
def rng():
    return np.random.default_rng(20131029)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
