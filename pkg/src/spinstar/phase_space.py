"""Husimi Q function of the joint state and quantum-carpet rasters.

The probe ``|theta, phi>_{N+1}`` is the product of ``|theta, phi>_N`` and the
single-qubit coherent state, so ``<probe|Psi>`` is a polynomial in
``e^{-i phi}`` of degree ``N + 1``. A whole row of constant ``theta`` is one
matrix-vector product.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from ._checks import check_normalized, check_positive_int
from .collective_spin import TWO_PI, log_abs_coeffs
from .exact_dynamics import DOWN, UP, build_initial, exact_propagate


@dataclass
class QRaster:
    """A real raster over ``(axis0, axis1)`` with axis metadata.

    ``values[i, j]`` belongs to ``axis0[i]``, ``axis1[j]``.
    """

    values: np.ndarray
    axis0: np.ndarray
    axis1: np.ndarray
    axis0_name: str = "theta"
    axis1_name: str = "phi"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        self.axis0 = np.asarray(self.axis0, dtype=float)
        self.axis1 = np.asarray(self.axis1, dtype=float)
        if self.values.shape != (self.axis0.size, self.axis1.size):
            raise ValueError(
                f"values shape {self.values.shape} does not match axes "
                f"({self.axis0.size}, {self.axis1.size})"
            )
        for name, ax in (("axis0", self.axis0), ("axis1", self.axis1)):
            if ax.size > 1 and not np.all(np.diff(ax) > 0):
                raise ValueError(f"{name} must be strictly increasing")
        if self.values.size and (self.values.min() < -1e-12 or self.values.max() > 1 + 1e-9):
            raise ValueError("raster values must lie in [0, 1]")
        self.meta.setdefault("generated_at", datetime.now(timezone.utc).isoformat())

    @property
    def shape(self):
        return self.values.shape


def worker_count():
    """Worker cap from ``SPINSTAR_THREADS`` (default: CPU count)."""
    raw = os.environ.get("SPINSTAR_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"SPINSTAR_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ValueError(f"SPINSTAR_THREADS must be a positive integer, got {raw!r}")
    return n


def parallel_map(func, items, workers=None):
    """Ordered map; results do not depend on the worker count."""
    items = list(items)
    workers = worker_count() if workers is None else workers
    if workers <= 1 or len(items) < 2:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


def _probe_weights(amps, theta):
    """Polynomial coefficients ``b_n(theta)`` with ``<probe|Psi>^* = sum_n b_n e^{-i n phi}``.

    ``theta`` may be an array; the result has shape ``theta.shape + (N+2,)``.
    """
    N = amps.shape[0] - 1
    theta = np.asarray(theta, dtype=float)
    mag = np.exp(log_abs_coeffs(N, theta))
    cos = np.cos(theta / 2.0)[..., None]
    sin = np.sin(theta / 2.0)[..., None]
    b = np.zeros(theta.shape + (N + 2,), complex)
    b[..., :-1] += np.conj(amps[:, DOWN]) * mag * cos
    b[..., 1:] += np.conj(amps[:, UP]) * mag * sin
    return b


def _phase_matrix(N, phi):
    n = np.arange(N + 2)
    return np.exp(-1j * np.outer(n, np.asarray(phi, dtype=float)))


def husimi_q(state, theta, phi):
    """``Q(theta, phi) = |<theta, phi|_{N+1} |Psi>|^2``."""
    if not 0.0 <= theta <= math.pi:
        raise ValueError(f"theta must lie in [0, pi], got {theta}")
    check_normalized(state.amps, "JointState")
    b = _probe_weights(state.amps, theta)
    val = np.dot(b, _phase_matrix(state.N, [phi])[:, 0])
    return min(float(abs(val) ** 2), 1.0)


def theta_grid(n_theta):
    """Cell-centred polar grid in ``(0, pi)``."""
    return (np.arange(n_theta) + 0.5) * math.pi / n_theta


def phi_grid(n_phi):
    """Uniform azimuthal grid in ``[0, 2 pi)``."""
    return np.arange(n_phi) * TWO_PI / n_phi


def _q_rows(amps, thetas, phis):
    b = _probe_weights(amps, thetas)
    vals = np.abs(b @ _phase_matrix(amps.shape[0] - 1, phis)) ** 2
    return np.minimum(vals, 1.0)


def q_grid(state, n_theta, n_phi):
    """Husimi Q over a uniform ``(theta, phi)`` grid."""
    if n_theta < 2 or n_phi < 2:
        raise ValueError("q_grid needs n_theta >= 2 and n_phi >= 2")
    check_normalized(state.amps, "JointState")
    thetas, phis = theta_grid(n_theta), phi_grid(n_phi)
    values = _q_rows(state.amps, thetas, phis)
    return QRaster(values, thetas, phis, "theta", "phi", {"N": state.N})


def equatorial_slice(state, n_phi):
    """``Q(pi/2, phi)`` on :func:`phi_grid`."""
    check_positive_int(n_phi, "n_phi")
    check_normalized(state.amps, "JointState")
    return _q_rows(state.amps, math.pi / 2.0, phi_grid(n_phi))


def carpet(params, spec, alpha=1.0, beta=0.0, n_t=512, n_phi=512, t_max_in_T=1.0, workers=None):
    """Equatorial Q slices of the exact state versus time.

    Rows are the times ``linspace(0, t_max_in_T * T, n_t)``; the raster's
    ``axis0`` holds them in units of ``T``. Rows are independent and are
    evaluated through :func:`parallel_map`.
    """
    from .revival_analysis import revival_time

    if n_t < 2 or n_phi < 2:
        raise ValueError("carpet needs n_t >= 2 and n_phi >= 2")
    if not t_max_in_T > 0:
        raise ValueError("t_max_in_T must be positive")
    T, _ = revival_time(params)
    psi0 = build_initial(params, spec, alpha, beta)
    t_over_T = np.linspace(0.0, t_max_in_T, n_t)
    phis = phi_grid(n_phi)

    def row(x):
        return _q_rows(exact_propagate(psi0, params, x * T).amps, math.pi / 2.0, phis)

    values = np.vstack(parallel_map(row, t_over_T, workers))
    meta = {
        "N": params.N,
        "lambda": params.lam,
        "phi0": params.phi0,
        "theta0": spec.theta,
        "alpha": complex(alpha),
        "beta": complex(beta),
        "T": T,
    }
    return QRaster(values, t_over_T, phis, "t_over_T", "phi", meta)


def polar_mean(raster):
    """Q-weighted mean polar angle of a ``(theta, phi)`` raster (``sin theta`` measure)."""
    w = raster.values.sum(axis=1) * np.sin(raster.axis0)
    return float(np.dot(w, raster.axis0) / w.sum())
