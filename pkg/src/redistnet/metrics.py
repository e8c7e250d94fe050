"""Aggregation of replicate outcomes and the wealth-inequality measure."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import PopulationState, RunOutcome, accumulate_payoffs
from .game import GameParams
from .network import Network
from .redistribution import BeneficiaryAssignment, TaxPolicy, compute_fitness


@dataclass(frozen=True)
class AggregateStats:
    """Cooperation level and fixation statistics over a batch of replicates.

    Unfixated replicates contribute their final cooperator fraction to the
    cooperation level but are excluded from the fixation-time mean; the
    exclusion count is ``replicate_count - fixation_count``.
    """

    cooperation_level: float
    coop_stderr: float
    fixation_time_mean: float | None
    fixation_count: int
    replicate_count: int


@dataclass(frozen=True)
class InequalityReport:
    """Population variances of payoff (pre) and fitness (post redistribution).

    ``ratio`` is None when the payoff variance is zero (regular graph,
    monomorphic population: everyone earns the same).
    """

    var_payoff: float
    var_fitness: float
    ratio: float | None


def aggregate(outcomes: list[RunOutcome], node_count: int) -> AggregateStats:
    """Mean final cooperator fraction with its standard error, plus fixation
    times in generations (iterations / node_count) over fixated runs only."""
    if not outcomes:
        raise ValueError("aggregate needs at least one outcome")
    fractions = np.array([o.final_coop_fraction for o in outcomes])
    n = len(fractions)
    stderr = float(fractions.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    fixated = [o for o in outcomes if o.fixated]
    if fixated:
        fix_mean = sum(o.iterations_used for o in fixated) / (len(fixated) * node_count)
    else:
        fix_mean = None
    return AggregateStats(
        cooperation_level=float(fractions.mean()),
        coop_stderr=stderr,
        fixation_time_mean=fix_mean,
        fixation_count=len(fixated),
        replicate_count=n,
    )


def inequality_ratio(
    net: Network,
    assignment: BeneficiaryAssignment,
    policy: TaxPolicy,
    params: GameParams,
    state: PopulationState | None = None,
) -> InequalityReport:
    """Variance of fitness over variance of payoff in an all-cooperator
    population (the absorbing state of the cooperative regime).

    Variances are population variances (divide by Z); the ratio is scale
    free, so only consistency matters.
    """
    if state is None:
        state = PopulationState.from_strategies(np.ones(net.node_count, dtype=np.int64))
    elif state.coop_count != state.node_count:
        raise ValueError("inequality_ratio is defined on the all-cooperator state")
    payoffs = accumulate_payoffs(state, net, params)
    fitness = compute_fitness(payoffs, assignment, policy)
    var_p = float(np.var(payoffs))
    var_f = float(np.var(fitness))
    return InequalityReport(
        var_payoff=var_p,
        var_fitness=var_f,
        ratio=(var_f / var_p) if var_p > 0.0 else None,
    )
