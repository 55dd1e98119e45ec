"""qhjlab: residual-check laboratory for 1-D trajectory quantum mechanics."""

__version__ = "0.1.0"

from .fields import Grid, ScalarField, antiderivative, derivative, schwarzian, unwrap_phase
from .schrodinger import (
    PhysicalConstants,
    Potential,
    Scenario,
    SolutionPair,
    analytic_pair,
    make_conjugate,
    normalize_wronskian,
    solve_pair,
)
from .microstates import (
    Microstate,
    MicrostateParams,
    beta_field,
    build_microstate,
    hamilton_principal,
    momentum,
    qshje_residual,
    quantum_potential,
    time_of_q,
    trajectory,
)
from .uncertainty import UncertaintyReport, delta_chain, hbar_scaling_scan
from .duality import (
    FreeEnergy,
    Prepotential,
    akq_residual,
    build_prepotential,
    dual_derivative_residual,
    gd_residual,
    legendre_residual,
    modulus_momentum_residual,
    omega_for_norm,
    prepotential_ode_residual,
    wkb_general_sprime,
)
from .hierarchy import (
    HierarchyInput,
    HierarchySolution,
    master_residual,
    p2_schwarzian_check,
    reconstruct_modulus,
    recurse,
)

__all__ = [
    "Grid",
    "ScalarField",
    "derivative",
    "schwarzian",
    "antiderivative",
    "unwrap_phase",
    "PhysicalConstants",
    "Potential",
    "SolutionPair",
    "Scenario",
    "analytic_pair",
    "solve_pair",
    "normalize_wronskian",
    "make_conjugate",
    "MicrostateParams",
    "Microstate",
    "beta_field",
    "hamilton_principal",
    "momentum",
    "quantum_potential",
    "qshje_residual",
    "build_microstate",
    "time_of_q",
    "trajectory",
    "UncertaintyReport",
    "delta_chain",
    "hbar_scaling_scan",
    "Prepotential",
    "FreeEnergy",
    "build_prepotential",
    "dual_derivative_residual",
    "prepotential_ode_residual",
    "gd_residual",
    "akq_residual",
    "wkb_general_sprime",
    "omega_for_norm",
    "modulus_momentum_residual",
    "legendre_residual",
    "HierarchyInput",
    "HierarchySolution",
    "recurse",
    "master_residual",
    "p2_schwarzian_check",
    "reconstruct_modulus",
]
