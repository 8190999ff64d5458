"""Semiflow selection over finite trajectory bundles."""

from .trajectory import (
    Segment,
    Trajectory,
    ExtendedTrajectory,
    continue_at,
    trajectory_from_dict,
    trajectory_to_dict,
)
from .metric import (
    CompactDistance,
    CompletedGraph,
    MetricReport,
    MetricRefinementError,
    check_continuous_uniform,
    check_convergence_ae,
    check_monotone_equiv,
    completed_graph,
    skorokhod_distance,
    skorokhod_distance_report,
    sup_distance,
    tail_bound,
    trajectory_distance,
)
from .bundle import (
    Bundle,
    ClosureBudgetError,
    UnknownInitialPoint,
    Violation,
    bundle_from_dict,
    bundle_to_dict,
    generate_closure,
    verify_P4,
    verify_P5,
)
from .selection import (
    Envelope,
    MissingEnergyCoordinate,
    NonSingletonSelection,
    QuadratureBudgetError,
    SelectionConfig,
    SelectionFunctional,
    SelectionOutcome,
    SemigroupVerdict,
    TraceStep,
    argmin_reduce,
    energy_first_select,
    eval_functional,
    select,
    semigroup_check,
)
from .fluid import (
    FluidState,
    PressureLaw,
    admissible_leq,
    d_membership,
    embed_state,
    energy_functional,
    fluid_state_from_dict,
    fluid_state_to_dict,
    pressure,
    pressure_potential,
    state_in_initial_set,
)
from .families import (
    SqrtOdeFamily,
    gen_sqrt_ode_bundle,
    gen_step_family,
    step_trajectory,
    waiting_solution,
    waiting_solution_value,
)

__version__ = "0.1.0"
