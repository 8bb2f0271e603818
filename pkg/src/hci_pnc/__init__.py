"""PNC matrix elements for hydrogenlike ions with the Uehling correction to the wave functions."""

from .constants import ConstantsSet, convert_energy, default_constants, load_constants
from .dirac import DiracSolverError, DiracState, GridTooSmallError, solve_bound_state, sommerfeld_energy
from .electroweak import WeakChargeReport, delta_p_m, pi_r, weak_charge, weak_charge_report
from .nucleus import NuclearModel, nuclear_radius
from .numerics import QuadratureResult, RadialGrid, make_grid
from .pnc import (
    DEFAULT_ISOTOPES,
    PncResult,
    PncSettings,
    compute_pnc_with_corrections,
    generate_table1,
    generate_table2,
    pnc_matrix_element,
)
from .uehling import UehlingTable, uehling_on_grid, uehling_point

__version__ = "0.1.0"

__all__ = [
    "ConstantsSet",
    "convert_energy",
    "default_constants",
    "load_constants",
    "DiracSolverError",
    "DiracState",
    "GridTooSmallError",
    "solve_bound_state",
    "sommerfeld_energy",
    "WeakChargeReport",
    "delta_p_m",
    "pi_r",
    "weak_charge",
    "weak_charge_report",
    "NuclearModel",
    "nuclear_radius",
    "QuadratureResult",
    "RadialGrid",
    "make_grid",
    "DEFAULT_ISOTOPES",
    "PncResult",
    "PncSettings",
    "compute_pnc_with_corrections",
    "generate_table1",
    "generate_table2",
    "pnc_matrix_element",
    "UehlingTable",
    "uehling_on_grid",
    "uehling_point",
]
