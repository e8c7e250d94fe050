"""Evolutionary game dynamics on networks with local wealth redistribution."""

from .dynamics import (
    DynamicsParams,
    PopulationState,
    RunOutcome,
    StepReport,
    accumulate_payoffs,
    imitation_probability,
    run_replicate,
    step,
)
from .game import (
    GameClass,
    GameParams,
    Strategy,
    classify,
    critical_alpha,
    critical_alpha_rows,
    payoff,
    payoff_matrix,
    redistributed_matrix,
)
from .metrics import AggregateStats, InequalityReport, aggregate, inequality_ratio
from .network import (
    EdgeListError,
    Network,
    ball,
    degree_distribution,
    generate_homogeneous,
    generate_scale_free,
    load_edge_list,
    save_edge_list,
)
from .redistribution import (
    AssignmentRule,
    BeneficiaryAssignment,
    Extended,
    Nearest,
    Random,
    TaxPolicy,
    assign,
    compute_fitness,
    contribution,
    contributions_vector,
    fitness_of,
)
from .rng import Pcg32

__version__ = "0.1.0"

from .experiments import (  # noqa: E402 (needs __version__ above)
    ConfigError,
    ExperimentConfig,
    NetworkSpec,
    ResultRow,
    emit,
    preset,
    read_rows,
    run_experiment,
)
