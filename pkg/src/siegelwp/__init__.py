"""Gaussian wave packet dynamics on the Siegel upper half space.

The Siegel space of complex symmetric matrices with positive-definite
imaginary part is the quotient of Sp(2d, R) by U(d), and the Heller width
dynamics is the reduction of the Hagedorn (Q, P) dynamics.  This package
implements both sides, the maps between them and numerical checks of the
identities that tie them together.
"""

from .dynamics import (HagedornState, HellerState, SimParams, angular_momentum, hagedorn_rhs,
                       hamiltonian, heller_rhs, lift_state, project_state,
                       reduced_angular_momentum, resymplectify)
from .errors import SiegelWPError
from .integrate import (StepSpec, TrajectoryRecord, compare_formulations, drift_report,
                        integrate_trajectory, rk4_step, strang_step)
from .potentials import PotentialModel, make_potential, register_potential
from .siegel import SiegelPoint, SiegelTangent, mobius_act, section

__version__ = "0.1.0"

__all__ = [
    "HagedornState",
    "HellerState",
    "SimParams",
    "PotentialModel",
    "SiegelPoint",
    "SiegelTangent",
    "SiegelWPError",
    "StepSpec",
    "TrajectoryRecord",
    "angular_momentum",
    "compare_formulations",
    "drift_report",
    "hagedorn_rhs",
    "hamiltonian",
    "heller_rhs",
    "integrate_trajectory",
    "lift_state",
    "make_potential",
    "mobius_act",
    "project_state",
    "reduced_angular_momentum",
    "resymplectify",
    "register_potential",
    "rk4_step",
    "section",
    "strang_step",
]
