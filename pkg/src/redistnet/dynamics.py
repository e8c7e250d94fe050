"""Evolutionary dynamics: payoff accumulation and Fermi imitation.

A replicate starts from half cooperators placed at random, then repeats:
pick a random agent i and a random neighbor j, compare fitnesses (payoffs
after redistribution), and let i adopt j's strategy with the Fermi
probability 1/(1 + exp(-beta * (f_j - f_i))).  The run stops at fixation or
at the iteration cap.

Payoffs are cached and updated incrementally: a strategy flip of agent i
only changes the accumulated payoffs of i and its neighbors.  Fitness is
evaluated on demand from the cache, so one step costs O(degree), never a
population-wide recomputation.

Two engines produce identical results for identical seeds: a compiled kernel
(the default) and a pure-Python loop built from :func:`step`, kept around
for oracle tests and debugging.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernel
from .game import GameParams, Strategy, payoff_matrix
from .network import Network
from .redistribution import (
    AssignmentRule,
    BeneficiaryAssignment,
    Random,
    TaxPolicy,
    assign,
    fitness_of,
)
from .rng import Pcg32

_DEBUG_CHECK_INTERVAL = 10_000


@dataclass(frozen=True)
class DynamicsParams:
    beta: float = 1.0
    max_iterations: int = 2_500_000
    rng_seed: int = 0

    def __post_init__(self):
        if self.beta < 0.0:
            raise ValueError("beta must be >= 0")
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be >= 0")


@dataclass(frozen=True)
class RunOutcome:
    """Result of one replicate.

    ``fixation_generation`` is the fixation iteration divided by the
    population size (one generation = Z iteration steps); None when the run
    hit the iteration cap still mixed.
    """

    final_coop_fraction: float
    fixated: bool
    fixation_generation: float | None
    iterations_used: int


@dataclass
class PopulationState:
    """Per-agent strategies plus the cached accumulated payoffs."""

    strategies: np.ndarray
    payoffs: np.ndarray
    coop_count: int
    cache_valid: bool = False

    @classmethod
    def random_half(cls, net: Network, rng: np.random.Generator) -> "PopulationState":
        """Exactly floor(Z/2) cooperators, placed uniformly at random."""
        n = net.node_count
        strategies = np.zeros(n, dtype=np.int64)
        k = n // 2
        strategies[rng.permutation(n)[:k]] = 1
        return cls(strategies=strategies, payoffs=np.zeros(n), coop_count=k)

    @classmethod
    def from_strategies(cls, strategies) -> "PopulationState":
        arr = np.asarray(strategies, dtype=np.int64)
        return cls(strategies=arr, payoffs=np.zeros(len(arr)), coop_count=int(arr.sum()))

    @property
    def node_count(self) -> int:
        return len(self.strategies)

    def coop_fraction(self) -> float:
        return self.coop_count / self.node_count

    def is_monomorphic(self) -> bool:
        return self.coop_count in (0, self.node_count)


def accumulate_payoffs(state: PopulationState, net: Network, params: GameParams) -> np.ndarray:
    """Per-edge payoff sums for every agent; refreshes the cache."""
    indptr, indices = net.csr
    m = payoff_matrix(params)
    src = np.repeat(np.arange(net.node_count), net.degrees)
    values = m[state.strategies[src], state.strategies[indices]]
    state.payoffs = np.bincount(src, weights=values, minlength=net.node_count)
    state.cache_valid = True
    return state.payoffs


def imitation_probability(f_i: float, f_j: float, beta: float) -> float:
    """Fermi rule: 1/(1 + exp(-beta (f_j - f_i))), saturating at 0/1."""
    if beta < 0.0:
        raise ValueError("beta must be >= 0")
    x = beta * (f_j - f_i)
    if x >= 0.0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


@dataclass(frozen=True)
class StepReport:
    focal: int
    neighbor: int
    probability: float
    flipped: bool


def step(
    state: PopulationState,
    net: Network,
    assignment: BeneficiaryAssignment,
    policy: TaxPolicy,
    params: GameParams,
    beta: float,
    rng: Pcg32,
) -> StepReport:
    """One asynchronous imitation step (pure-Python reference engine).

    Consumes the RNG stream exactly as the compiled kernel does: two draws
    to pick the pair, plus one acceptance draw only when the strategies
    differ (adopting an identical strategy is a no-op, so no draw is spent).
    A flip updates the payoff cache of the focal agent and its neighbors.
    """
    if not state.cache_valid:
        raise RuntimeError("payoff cache is stale; call accumulate_payoffs first")
    n = state.node_count
    i = rng.randrange(n)
    neigh = net.adjacency[i]
    j = neigh[rng.randrange(len(neigh))]
    f_i = fitness_of(i, state.payoffs, assignment, policy)
    f_j = fitness_of(j, state.payoffs, assignment, policy)
    p = imitation_probability(f_i, f_j, beta)
    si = int(state.strategies[i])
    sj = int(state.strategies[j])
    if si == sj:
        return StepReport(focal=i, neighbor=j, probability=p, flipped=False)
    if rng.random() >= p:
        return StepReport(focal=i, neighbor=j, probability=p, flipped=False)

    m = payoff_matrix(params)
    state.strategies[i] = sj
    new_pi = 0.0
    for k in neigh:
        sk = int(state.strategies[k])
        state.payoffs[k] += m[sk, sj] - m[sk, si]
        new_pi += m[sj, sk]
    state.payoffs[i] = new_pi
    state.coop_count += 1 if sj == 1 else -1
    return StepReport(focal=i, neighbor=j, probability=p, flipped=True)


def _seed_streams(seed: int) -> tuple[np.random.Generator, Pcg32]:
    """Split one replicate seed into the setup generator and the loop PCG."""
    init_ss, loop_ss = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(init_ss), Pcg32.from_seed_sequence(loop_ss)


def run_replicate(
    net: Network,
    rule: AssignmentRule,
    policy: TaxPolicy,
    params: GameParams,
    dynamics: DynamicsParams,
    assignment: BeneficiaryAssignment | None = None,
    engine: str = "kernel",
    resample_interval: int | None = None,
    debug: bool = False,
) -> RunOutcome:
    """Run one replicate to fixation or to the iteration cap.

    ``assignment`` may be passed in to share a precomputed structure across
    replicates (valid for the deterministic Nearest/Extended rules); when
    omitted it is built here, sampled once per replicate for the Random
    rule.  ``resample_interval`` redraws a Random assignment every that many
    iterations (the default keeps it static, mirroring the static network).
    Identical inputs give identical outcomes on either engine.
    """
    if engine not in ("kernel", "python"):
        raise ValueError(f"unknown engine {engine!r}")
    if resample_interval is not None and resample_interval < 1:
        raise ValueError("resample_interval must be >= 1")

    init_rng, loop_rng = _seed_streams(dynamics.rng_seed)
    state = PopulationState.random_half(net, init_rng)
    if assignment is None:
        assignment = assign(net, rule, init_rng)
    accumulate_payoffs(state, net, params)

    n = net.node_count
    remaining = dynamics.max_iterations
    used = 0
    resample = resample_interval is not None and isinstance(rule, Random)

    while remaining > 0 and not state.is_monomorphic():
        chunk = min(remaining, resample_interval) if resample else remaining
        if engine == "kernel":
            used += _run_chunk_kernel(
                state, net, assignment, policy, params, dynamics.beta, chunk, loop_rng
            )
        else:
            used += _run_chunk_python(
                state, net, assignment, policy, params, dynamics.beta, chunk, loop_rng, debug
            )
        remaining = dynamics.max_iterations - used
        if resample and remaining > 0 and not state.is_monomorphic():
            assignment = assign(net, rule, init_rng)

    fixated = state.is_monomorphic()
    return RunOutcome(
        final_coop_fraction=state.coop_fraction(),
        fixated=fixated,
        fixation_generation=used / n if fixated else None,
        iterations_used=used,
    )


def _run_chunk_kernel(state, net, assignment, policy, params, beta, max_steps, loop_rng):
    adj_indptr, adj_indices = net.csr
    floors, rates = policy.schedule
    coop, steps, rng_state = _kernel.run_loop(
        state.strategies,
        state.payoffs,
        state.coop_count,
        adj_indptr,
        adj_indices,
        assignment.contrib_indptr,
        assignment.contrib_indices,
        assignment.inv_set_size,
        floors,
        rates,
        payoff_matrix(params),
        float(beta),
        int(max_steps),
        np.uint64(loop_rng.state),
        np.uint64(loop_rng.inc),
    )
    state.coop_count = int(coop)
    loop_rng.state = int(rng_state)
    return int(steps)


def _run_chunk_python(state, net, assignment, policy, params, beta, max_steps, loop_rng, debug):
    steps = 0
    while steps < max_steps and not state.is_monomorphic():
        steps += 1
        step(state, net, assignment, policy, params, beta, loop_rng)
        if debug and steps % _DEBUG_CHECK_INTERVAL == 0:
            assert state.coop_count == int(state.strategies.sum()), "coop_count drifted"
    return steps


__all__ = [
    "DynamicsParams",
    "PopulationState",
    "RunOutcome",
    "StepReport",
    "Strategy",
    "accumulate_payoffs",
    "imitation_probability",
    "run_replicate",
    "step",
]
