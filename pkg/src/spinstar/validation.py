"""Quantitative checks of the two approximations behind the effective dynamics.

* The semiclassical-eigenstate assumption: how far the normalized lowering
  operator is from acting as the scalar ``e^{-i phi}`` on ``|zeta>``
  (eigenvalue defect), plus the size of the Dicke edge coefficients.
* The two-term truncation: fidelity of the truncated state against the exact
  one, and the time scales below which the neglected terms are small.

Expectations are evaluated by direct Dicke-basis summation. Conditions of the
form ``a << b`` are reported as numbers; nothing here asserts thresholds.
"""

import math
from dataclasses import dataclass

import numpy as np

from .collective_spin import DickeVector, SpinCoherentSpec, coherent_coeffs
from .effective_dynamics import BranchSign, truncated_propagate
from .exact_dynamics import ModelParams, build_initial, exact_propagate
from .phase_space import QRaster, parallel_map
from .revival_analysis import revival_time


def normalized_lowering(v):
    """``(J_- J_+)^{-1/2} J_-``: shifts every amplitude down one level.

    ``|N/2, -N/2>`` is annihilated, so its amplitude is lost and the top
    level of the result is empty.
    """
    out = np.zeros_like(v.amps)
    out[:-1] = v.amps[1:]
    return DickeVector(v.N, out)


def normalized_raising(v):
    """``(J_+ J_-)^{-1/2} J_+``: shifts every amplitude up one level."""
    out = np.zeros_like(v.amps)
    out[1:] = v.amps[:-1]
    return DickeVector(v.N, out)


@dataclass(frozen=True)
class DefectReport:
    N: int
    zeta_abs: float
    e1: float
    e2: float
    e_norm: float
    e_dag_norm: float
    above_lower: bool
    below_upper: bool

    @property
    def in_regime(self):
        return self.above_lower and self.below_upper

    def to_keyvalue(self):
        return "".join(f"{k} = {v}\n" for k, v in self.__dict__.items())


def _apply_defect(amps, phase):
    # E = e^{-i phi} - (J_- J_+)^{-1/2} J_-
    shifted = np.zeros_like(amps)
    shifted[:-1] = amps[1:]
    return phase * amps - shifted


def _apply_defect_dagger(amps, phase):
    shifted = np.zeros_like(amps)
    shifted[1:] = amps[:-1]
    return np.conj(phase) * amps - shifted


def eigenvalue_defect(spec):
    """``|<zeta|E|zeta>|`` and ``|<zeta|E^2|zeta>|`` for ``E = e^{-i phi} - L``."""
    if spec.N < 2:
        raise ValueError("eigenvalue_defect needs N >= 2")
    psi = coherent_coeffs(spec).amps
    phase = np.exp(-1j * spec.phi)
    e_psi = _apply_defect(psi, phase)
    e2_psi = _apply_defect(e_psi, phase)
    edag_psi = _apply_defect_dagger(psi, phase)
    z2 = math.inf if spec.south_pole else spec.zeta_abs**2
    return DefectReport(
        N=spec.N,
        zeta_abs=math.inf if spec.south_pole else spec.zeta_abs,
        e1=abs(np.vdot(psi, e_psi)),
        e2=abs(np.vdot(psi, e2_psi)),
        e_norm=float(np.linalg.norm(e_psi)),
        e_dag_norm=float(np.linalg.norm(edag_psi)),
        above_lower=z2 > 1.0 / spec.N,
        below_upper=z2 < spec.N,
    )


@dataclass
class DefectMap:
    e1: QRaster
    e2: QRaster
    theta_lower: np.ndarray
    theta_upper: np.ndarray

    def boundary_rows(self):
        """``(N, theta at |zeta|^2 = 1/N, theta at |zeta|^2 = N)`` per row."""
        return list(zip(self.e1.axis0.astype(int), self.theta_lower, self.theta_upper))


def defect_map(theta_grid, N_list, phi0=0.0, workers=None):
    """Eigenvalue-defect rasters over ``(N, theta0)``: rows follow ``N_list``."""
    theta_grid = np.asarray(theta_grid, dtype=float)
    N_list = [int(n) for n in N_list]

    def row(N):
        reps = [eigenvalue_defect(SpinCoherentSpec.from_bloch(N, th, phi0)) for th in theta_grid]
        return [r.e1 for r in reps], [r.e2 for r in reps]

    rows = parallel_map(row, N_list, workers)
    e1 = np.clip(np.array([r[0] for r in rows]), 0.0, 1.0)
    e2 = np.clip(np.array([r[1] for r in rows]), 0.0, 1.0)
    Ns = np.array(N_list, dtype=float)
    meta = {"phi0": phi0}
    return DefectMap(
        e1=QRaster(e1, Ns, theta_grid, "N", "theta0", dict(meta, quantity="e1")),
        e2=QRaster(e2, Ns, theta_grid, "N", "theta0", dict(meta, quantity="e2")),
        theta_lower=2.0 * np.arctan(1.0 / np.sqrt(Ns)),
        theta_upper=2.0 * np.arctan(np.sqrt(Ns)),
    )


@dataclass(frozen=True)
class EdgeBounds:
    c_top: float
    c_bottom: float
    bound: float
    in_regime: bool

    @property
    def margin(self):
        return self.bound - max(self.c_top, self.c_bottom)


def edge_coefficient_bounds(spec):
    """``|C_{N/2}|^2``, ``|C_{-N/2}|^2`` and the comparison value ``(1 + 1/N)^{-N}``.

    Inside ``1/N < |zeta|^2 < N`` both edge weights must sit below the
    comparison value; outside that regime the numbers are only reported.
    """
    N = spec.N
    bound = math.exp(-N * math.log1p(1.0 / N))
    if spec.south_pole:
        c_top, c_bottom, in_regime = 1.0, 0.0, False
    else:
        z2 = spec.zeta_abs**2
        log1pz2 = math.log1p(z2)
        c_bottom = math.exp(-N * log1pz2)
        c_top = 0.0 if z2 == 0 else math.exp(N * (math.log(z2) - log1pz2))
        in_regime = 1.0 / N < z2 < N
    result = EdgeBounds(c_top, c_bottom, bound, in_regime)
    if in_regime and result.margin < 0:
        raise ArithmeticError(f"edge coefficients exceed the bound inside the regime: {result}")
    return result


def approximation_fidelity(params, spec, sign, t):
    """``|<truncated(t)|exact(t)>|`` for the pure-branch initial state."""
    s = int(BranchSign(sign))
    alpha, beta = (1.0, 0.0) if s > 0 else (0.0, 1.0)
    psi0 = build_initial(params, spec, alpha, beta)
    exact = exact_propagate(psi0, params, t)
    approx = truncated_propagate(psi0, params, t)
    return min(abs(approx.overlap(exact)), 1.0)


def _fidelity_row(N, theta0, t_over_T, lam, phi0, sign):
    params = ModelParams(N, lam, phi0)
    spec = SpinCoherentSpec.from_bloch(N, theta0, phi0)
    T, _ = revival_time(params)
    return [approximation_fidelity(params, spec, sign, x * T) for x in t_over_T]


def fidelity_map_vs_n(N_list, t_over_T, lam=1.0, phi0=0.0, sign=BranchSign.PLUS, workers=None):
    """Fidelity over ``(N, t/T)`` at ``theta0 = pi/2``."""
    t_over_T = np.asarray(t_over_T, dtype=float)
    rows = parallel_map(
        lambda N: _fidelity_row(int(N), math.pi / 2.0, t_over_T, lam, phi0, sign), N_list, workers
    )
    meta = {"theta0": math.pi / 2.0, "phi0": phi0, "lambda": lam, "sign": int(sign)}
    return QRaster(np.array(rows), np.asarray(N_list, float), t_over_T, "N", "t_over_T", meta)


def fidelity_map_vs_theta(theta_list, t_over_T, N=40, lam=1.0, phi0=0.0, sign=BranchSign.PLUS, workers=None):
    """Fidelity over ``(theta0, t/T)`` at fixed ``N``."""
    t_over_T = np.asarray(t_over_T, dtype=float)
    rows = parallel_map(
        lambda th: _fidelity_row(N, float(th), t_over_T, lam, phi0, sign), theta_list, workers
    )
    meta = {"N": N, "phi0": phi0, "lambda": lam, "sign": int(sign)}
    return QRaster(np.array(rows), np.asarray(theta_list, float), t_over_T, "theta0", "t_over_T", meta)


def fidelity_map(axis, values, t_over_T, **kwargs):
    """Dispatch to :func:`fidelity_map_vs_n` (``axis="N"``) or :func:`fidelity_map_vs_theta`."""
    if axis == "N":
        return fidelity_map_vs_n(values, t_over_T, **kwargs)
    if axis == "theta":
        return fidelity_map_vs_theta(values, t_over_T, **kwargs)
    raise ValueError(f"axis must be 'N' or 'theta', got {axis!r}")


def truncation_time_bounds(params, spec):
    """The two time scales (in ``1/lam`` units, i.e. already divided by ``lam``).

    ``t1 = (2/N) ((1+|z|^2)/(1-|z|^2))^4`` diverges at ``|z| = 1`` and
    ``t2 = N (1+|z|^2)^4 / (8 |z|^4)`` diverges at ``z = 0``; both are then
    ``inf``. The smaller one is the operative limit.
    """
    if spec.south_pole:
        raise ValueError("time bounds are undefined at the south pole")
    N, z2 = params.N, spec.zeta_abs**2
    t1 = math.inf if z2 == 1.0 else (2.0 / N) * ((1 + z2) / (1 - z2)) ** 4
    t2 = math.inf if z2 == 0.0 else N * (1 + z2) ** 4 / (8 * z2 * z2)
    return t1 / params.lam, t2 / params.lam
