"""Quasistatic two-variant martensite microstructure evolution in 2D.

Incremental energy minimization on a triangulated rectangle: polyconvex
two-variant elasticity, per-edge interfacial energy, and rate-independent
dissipation.  Hot assembly kernels live in a compiled extension with a
numpy fallback selected at import (see ``sma2d.kernels``).
"""

from .config import RunConfig, parse_config, serialize_config
from .driver import (LoadProgram, State, Trajectory, energy_balance_report,
                     initial_state, run, run_stability_diagnostics,
                     schedule_amplitude, stability_diagnostic)
from .elastic import ConstraintMap, ElasticObjective, minimize
from .errors import (ConfigError, ContractViolationError,
                     InadmissibleDeformationError, NonSubmodularProblemError)
from .material import (MaterialParams, dissipation_increment, edge_stretch,
                       mooney_rivlin, variant_density, variant_density_gradient)
from .mesh import Mesh2D, NodeSets, build_structured_mesh, classify_boundary
from .phase import (PhaseProblem, lp_relaxation_check, objective_value,
                    solve_coupled, solve_decoupled)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "ConstraintMap",
    "ContractViolationError",
    "ElasticObjective",
    "InadmissibleDeformationError",
    "LoadProgram",
    "MaterialParams",
    "Mesh2D",
    "NodeSets",
    "NonSubmodularProblemError",
    "PhaseProblem",
    "RunConfig",
    "State",
    "Trajectory",
    "build_structured_mesh",
    "classify_boundary",
    "dissipation_increment",
    "edge_stretch",
    "energy_balance_report",
    "initial_state",
    "lp_relaxation_check",
    "minimize",
    "mooney_rivlin",
    "objective_value",
    "parse_config",
    "run",
    "run_stability_diagnostics",
    "schedule_amplitude",
    "serialize_config",
    "solve_coupled",
    "solve_decoupled",
    "stability_diagnostic",
    "variant_density",
    "variant_density_gradient",
    "__version__",
]
