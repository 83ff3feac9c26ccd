"""Bi-objective building-design optimization: cost vs. embodied energy.

The package couples an analytical one-story masonry building model with a
global search over material choices and geometry, and exposes epsilon-
constraint Pareto machinery, a CLI and an HTTP service on top of it.
"""

from .materials import (
    CatalogError,
    ComponentClass,
    MaterialCatalog,
    MaterialSpec,
    default_catalog,
    filter_available,
    load_catalog,
    masonry_compressive_strength,
    masonry_density,
    serialize_catalog,
)
from .model import (
    BuildingParams,
    ContinuousPoint,
    DerivedState,
    DiscreteAssignment,
    ResidualVector,
    apply_overrides,
    constraint_residuals,
    cost,
    derive_state,
    embodied_energy,
    is_feasible,
    parse_param_overrides,
)
from .nlp import (
    ContinuousProblem,
    Objective,
    SideConstraint,
    SolveReport,
    SolveStatus,
    SolverConfig,
    feasibility_probe,
    grid_oracle,
    solve_continuous,
)
from .pareto import (
    DesignCluster,
    FrontPoint,
    ParetoFront,
    cluster_designs,
    epsilon_constraint_front,
    floor_area_front,
    front_to_csv,
    front_to_dict,
    front_to_json,
    nondominated_filter,
    price_shift,
    price_threshold,
)
from .search import (
    Design,
    Enumerator,
    Provenance,
    ScenarioConfig,
    ScenarioRules,
    enumerate_discrete,
    load_scenario,
    min_feasible_foundation_width,
    objective_lower_bounds,
    solve_minlp,
)

__version__ = "0.1.0"
