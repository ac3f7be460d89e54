"""Simulation of a single qubit exchange-coupled to N qubits (the spin star).

Exact resonant dynamics, the one-axis-twisting effective approximation,
fractional-revival analysis and Husimi-Q phase-space rasters.
"""

from .collective_spin import (
    DickeVector,
    SpinCoherentSpec,
    bloch_from_zeta,
    coherent_coeffs,
    dicke_moments,
    overlap,
    zeta_from_bloch,
)
from .effective_dynamics import (
    BranchSign,
    PhasePair,
    effective_eigenphase,
    fg_phases,
    semiclassical_basis,
    truncated_propagate,
)
from .exact_dynamics import JointState, ModelParams, build_initial, conserved_excitation, exact_propagate
from .phase_space import QRaster, carpet, equatorial_slice, husimi_q, q_grid
from .revival_analysis import (
    FractionalTime,
    RevivalReport,
    cat_count,
    fourier_component_phases,
    fractional_revival_state,
    gauss_sum_closed_form,
    gauss_sum_dft,
    revival_report,
    revival_time,
)
from .validation import (
    DefectReport,
    approximation_fidelity,
    defect_map,
    edge_coefficient_bounds,
    eigenvalue_defect,
    fidelity_map,
    normalized_lowering,
    normalized_raising,
    truncation_time_bounds,
)

__version__ = "0.1.0"
