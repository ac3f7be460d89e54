"""Revival period, fractional revivals and the associated Gauss sums.

At ``t = pT/q`` the truncated phases ``F_m``, ``G_m`` are (anti)periodic in
``m`` with period ``q``. Their length-``q`` discrete Fourier coefficients
``calF_l`` are generalized Gauss sums, and the evolved state is a
superposition of ``q`` equatorial coherent states rotated by ``phi_l``.

Everything here is developed for even ``N``. For odd ``N`` the truncated
dynamics has period ``2T``; fractional times are then taken relative to
``2T`` and the Fourier analysis runs over ``k = m + N/2`` with
``phi_l = 2 pi l / q`` (see :func:`gauss_sum_dft`).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from ._checks import check_coprime, check_positive_int
from .collective_spin import TWO_PI, SpinCoherentSpec, coherent_coeffs
from .effective_dynamics import BranchSign
from .exact_dynamics import DOWN, UP, JointState, build_initial, exact_propagate, qubit_branch
from .phase_space import equatorial_slice


@dataclass(frozen=True)
class FractionalTime:
    p: int
    q: int

    def __post_init__(self):
        check_coprime(self.p, self.q)

    @property
    def coprime(self):
        return True

    def time(self, params):
        return self.p * revival_time(params)[1] / self.q


def revival_time(params):
    """``(T, full_period)``; the full period is ``2T`` for odd ``N``."""
    j = params.N / 2.0
    T = TWO_PI / params.lam * math.sqrt(j * (j + 1.0))
    return T, (T if params.N % 2 == 0 else 2.0 * T)


def fourier_component_phases(q):
    """``phi_l`` for ``l = 0..q-1``: ``2 pi l/q`` (odd q) or ``pi(2l+1)/q`` (even q)."""
    q = check_positive_int(q, "q")
    l = np.arange(q)
    if q % 2:
        return TWO_PI * l / q
    return math.pi * (2 * l + 1) / q


def _phase_mod(num, den):
    """``exp(2 pi i num/den)`` for integers, reduced exactly before the float multiply."""
    return np.exp(1j * TWO_PI * (np.mod(num, den) / den))


def gauss_sum_dft(p, q, params, sign):
    """``calF_l^+-`` by direct summation of the generalized Gauss sum.

    Even ``N``::

        calF_l = e^{-+ i 2 pi (p/q) j(j+1)} / sqrt(q) *
                 sum_{m=0}^{q-1} exp(i [phi_l m +- (p/q) pi m (m-1)])

    All quadratic phases are reduced modulo ``2 pi`` in integer arithmetic,
    so the result does not degrade with ``N``. Odd ``N`` uses the ``2T``
    extension described in the module docstring.
    """
    p, q = check_coprime(p, q)
    s = int(BranchSign(sign))
    N = params.N
    m = np.arange(q)
    if N % 2 == 0:
        jj = (N // 2) * (N // 2 + 1)
        phis = fourier_component_phases(q)
        prefactor = _phase_mod(-s * p * jj, q)
        # pi (p/q) m(m-1) = 2 pi [p m(m-1)/2] / q, and m(m-1)/2 is an integer
        quad = _phase_mod(s * p * (m * (m - 1) // 2), q)
        terms = quad[None, :] * np.exp(1j * np.outer(phis, m))
        return prefactor * terms.sum(axis=1) / math.sqrt(q)
    # odd N, t = p (2T) / q, k = m + N/2:
    # F_k = exp(-+ i 2 pi (p/q) [J + (N+1) k - k^2]), J = N(N+2)/4
    phis = TWO_PI * m / q
    glob = np.exp(-1j * s * TWO_PI * ((p * (N * (N + 2) % (4 * q))) % (4 * q)) / (4 * q))
    quad = _phase_mod(-s * p * ((N + 1) * m - m * m), q)
    terms = quad[None, :] * np.exp(1j * np.outer(phis, m))
    return glob * terms.sum(axis=1) / math.sqrt(q)


def gauss_sum_closed_form(q, l, params, sign, p=1):
    """Closed-form ``calF_l^+-`` for ``p = 1`` and even ``N``.

    ``e^{-+i 2pi j(j+1)/q} e^{+-i pi/4} e^{-+i pi a^2/(4q)}`` with
    ``a = 2l -+ 1`` for odd ``q`` and ``a = 2l -+ 1 + 1`` for even ``q``.
    """
    if p != 1:
        raise NotImplementedError("closed-form Gauss sums are only available for p = 1")
    q = check_positive_int(q, "q")
    if not 0 <= l < q:
        raise ValueError(f"l must lie in [0, {q}), got {l}")
    if params.N % 2:
        raise ValueError("closed-form Gauss sums assume even N")
    s = int(BranchSign(sign))
    N = params.N
    jj = (N // 2) * (N // 2 + 1)
    a = 2 * l - s + (0 if q % 2 else 1)
    # e^{-+ i pi a^2 / (4q)}, reduced modulo 8q
    quad = np.exp(-1j * s * math.pi * ((a * a) % (8 * q)) / (4 * q))
    return complex(_phase_mod(-s * jj, q) * np.exp(1j * s * math.pi / 4) * quad)


def g_fourier_coefficients(p, q, params, sign):
    """DFT of ``G_m(pT/q)`` taken straight from the ``G`` phases (even N).

    At ``t = pT/q``, ``G_m = exp(-+ i 2 pi (p/q) [j(j+1) - m(m+1)/2])``; both
    brackets are integers for even ``N`` and are reduced modulo ``q`` exactly.
    """
    p, q = check_coprime(p, q)
    if params.N % 2:
        raise ValueError("g_fourier_coefficients assumes even N")
    s = int(BranchSign(sign))
    jj = (params.N // 2) * (params.N // 2 + 1)
    m = np.arange(q)
    G = _phase_mod(-s * p * (jj - m * (m + 1) // 2), q)
    phis = fourier_component_phases(q)
    return (np.exp(1j * np.outer(phis, m)) * G[None, :]).sum(axis=1) / math.sqrt(q)


def _component_phases(q, N):
    return fourier_component_phases(q) if N % 2 == 0 else TWO_PI * np.arange(q) / q


def _check_equatorial(spec):
    if spec.south_pole or abs(spec.theta - math.pi / 2.0) > 1e-12:
        raise ValueError("fractional-revival construction requires theta0 = pi/2")


def fractional_revival_state(p, q, params, spec, sign):
    """The ideal ``q``-component cat state reached at ``t = p T/q``.

    ``(1/sqrt(q)) sum_l calF_l e^{i phi_l N/2} |pi/2, phi0+phi_l>_N
    x (|down> +- e^{-i(phi0+phi_l)} |up>)/sqrt(2)``, renormalized after the
    sum because the components overlap for small ``N``.
    """
    _check_equatorial(spec)
    if spec.N != params.N:
        raise ValueError("spec.N does not match params.N")
    s = int(BranchSign(sign))
    N = params.N
    coeffs = gauss_sum_dft(p, q, params, s)
    phis = _component_phases(q, N)
    amps = np.zeros((N + 1, 2), complex)
    for c, phl in zip(coeffs, phis):
        rot = SpinCoherentSpec(N, 1.0, params.phi0 + phl)
        weight = c * (np.exp(1j * phl * N / 2.0) if N % 2 == 0 else 1.0)
        amps += weight * np.outer(coherent_coeffs(rot).amps, qubit_branch(params.phi0 + phl, s))
    amps /= np.linalg.norm(amps)
    return JointState(N, amps)


def displacement_propagate(state, p, q, params):
    """Apply ``U_trunc(pT/q)`` as a sum of ``q`` rotations about ``J_z + sigma_z/2``.

    ``U^+- = (1/sqrt(q)) sum_l e^{-i phi_l/2} calF_l^+- e^{-i (J_z + sigma_z/2) phi_l}``
    on each branch. Agrees with the truncated propagator at that time.
    """
    N = params.N
    k = np.arange(N + 1)
    phis = _component_phases(q, N)
    # even N rotates by e^{-i phi_l m}; odd N by e^{-i phi_l k} (k = m + N/2)
    shift = -N / 2.0 if N % 2 == 0 else 0.0
    out = np.zeros_like(state.amps)
    for sign in BranchSign:
        basis = qubit_branch(params.phi0, int(sign))
        branch = np.outer(state.amps @ basis.conj(), basis)
        coeffs = gauss_sum_dft(p, q, params, sign)
        for c, phl in zip(coeffs, phis):
            rot = np.exp(-1j * phl * (k + shift))
            out[:, DOWN] += c * rot * branch[:, DOWN] / math.sqrt(q)
            out[:, UP] += c * rot * np.exp(-1j * phl) * branch[:, UP] / math.sqrt(q)
    return JointState(N, out)


def cat_count(slice_values, prominence=0.2):
    """Number of circular local maxima above ``prominence * max(slice)``.

    A plateau counts once (the comparison is ``>=`` on the left and ``>`` on
    the right).
    """
    y = np.asarray(slice_values, dtype=float)
    if y.size < 3:
        raise ValueError(f"slice too short for peak counting ({y.size} points)")
    left = np.roll(y, 1)
    right = np.roll(y, -1)
    peaks = (y >= left) & (y > right) & (y > prominence * y.max())
    return int(peaks.sum())


@dataclass
class RevivalReport:
    N: int
    p: int
    q: int
    sign: int
    T: float
    full_period: float
    time: float
    fourier_coeffs: np.ndarray
    closed_form_residual: float
    component_phases: np.ndarray
    cat_count_estimate: int
    fidelity_vs_exact: float
    odd_n_extension: bool = False
    extra: dict = field(default_factory=dict)

    def to_keyvalue(self):
        lines = [
            f"N = {self.N}",
            f"p = {self.p}",
            f"q = {self.q}",
            f"sign = {self.sign:+d}",
            f"T = {self.T:.17g}",
            f"full_period = {self.full_period:.17g}",
            f"time = {self.time:.17g}",
            f"odd_n_extension = {str(self.odd_n_extension).lower()}",
            f"closed_form_residual = {self.closed_form_residual:.17g}",
            f"cat_count_estimate = {self.cat_count_estimate}",
            f"fidelity_vs_exact = {self.fidelity_vs_exact:.17g}",
        ]
        for l, (c, ph) in enumerate(zip(self.fourier_coeffs, self.component_phases)):
            lines.append(f"phi_{l} = {ph:.17g}")
            lines.append(f"fourier_{l} = {c.real:.17g},{c.imag:.17g}")
        for key, val in self.extra.items():
            lines.append(f"{key} = {val}")
        return "\n".join(lines) + "\n"


def revival_report(params, p, q, sign=BranchSign.PLUS, n_phi=512, prominence=0.2):
    """Fractional-revival summary at ``t = p * full_period / q`` for ``theta0 = pi/2``."""
    p, q = check_coprime(p, q)
    s = int(BranchSign(sign))
    T, full = revival_time(params)
    t = p * full / q
    coeffs = gauss_sum_dft(p, q, params, s)
    residual = math.nan
    if p == 1 and params.N % 2 == 0:
        closed = np.array([gauss_sum_closed_form(q, l, params, s) for l in range(q)])
        residual = float(np.max(np.abs(coeffs - closed)))
    spec = SpinCoherentSpec(params.N, 1.0, params.phi0)
    alpha, beta = (1.0, 0.0) if s > 0 else (0.0, 1.0)
    exact = exact_propagate(build_initial(params, spec, alpha, beta), params, t)
    ideal = fractional_revival_state(p, q, params, spec, s)
    return RevivalReport(
        N=params.N,
        p=p,
        q=q,
        sign=s,
        T=T,
        full_period=full,
        time=t,
        fourier_coeffs=coeffs,
        closed_form_residual=residual,
        component_phases=_component_phases(q, params.N),
        cat_count_estimate=cat_count(equatorial_slice(exact, n_phi), prominence),
        fidelity_vs_exact=abs(ideal.overlap(exact)),
        odd_n_extension=bool(params.N % 2),
    )
