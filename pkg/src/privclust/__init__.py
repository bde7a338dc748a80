"""Lower-bounded (private) k-center clustering with side constraints.

Every opened center must serve at least ``ell`` points. The lower bound is
added on top of solvers for outliers, capacities, fairness and per-color
bounds; a capacitated facility-location reduction and brute-force oracles for
small instances are included.
"""

from .errors import (
    ContractViolation,
    InfeasibleInstanceError,
    InvalidInstanceError,
    MalformedSolutionError,
    PrivClustError,
    SizeCapError,
)
from .estimators import FairKCenter, PrivateCapacitatedFacilityLocation, PrivateKCenter
from .facility import FLSolution, brute_force_private_fl, privatize_fl
from .fair import FairStructure, fair_center_via_fairlets, fair_subset_partition
from .formats import dump_instance, load_instance
from .ledger import GUARANTEES, declared_factor
from .metric import (
    Clustering,
    ConstraintSet,
    Instance,
    candidate_radii,
    check_feasible,
    eval_radius,
    fair_structure,
)
from .privacy import (
    solve_private,
    solve_private_capacitated,
    solve_private_fair,
    solve_private_fair_capacitated,
    solve_private_outliers,
    solve_strongly_private,
)
from .runner import solve_variant
from .solvers import exact_solver, gonzalez_kcenter, hs_ksupplier, outliers_kcenter, soft_capacitated_kcenter

__version__ = "0.1.0"

__all__ = [
    "Clustering",
    "ConstraintSet",
    "ContractViolation",
    "FLSolution",
    "FairKCenter",
    "FairStructure",
    "GUARANTEES",
    "InfeasibleInstanceError",
    "Instance",
    "InvalidInstanceError",
    "MalformedSolutionError",
    "PrivClustError",
    "PrivateCapacitatedFacilityLocation",
    "PrivateKCenter",
    "SizeCapError",
    "brute_force_private_fl",
    "candidate_radii",
    "check_feasible",
    "declared_factor",
    "dump_instance",
    "eval_radius",
    "exact_solver",
    "fair_center_via_fairlets",
    "fair_structure",
    "fair_subset_partition",
    "gonzalez_kcenter",
    "hs_ksupplier",
    "load_instance",
    "outliers_kcenter",
    "privatize_fl",
    "soft_capacitated_kcenter",
    "solve_private",
    "solve_private_capacitated",
    "solve_private_fair",
    "solve_private_fair_capacitated",
    "solve_private_outliers",
    "solve_strongly_private",
    "solve_variant",
]
