"""Taxation of payoff surplus and redistribution to beneficiary sets.

Every agent i contributes a fraction of its accumulated payoff above a
threshold; the contribution is split equally among the members of agent i's
beneficiary set, which never contains i itself.  Fitness is the accumulated
payoff minus the own contribution plus all shares received, so total fitness
equals total payoff exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .network import Network, ball
from .rng import as_generator


@dataclass(frozen=True)
class TaxPolicy:
    """Taxation schedule: top rate ``alpha`` above threshold ``theta``.

    ``brackets=2`` with the (default) legacy flag is the single-threshold
    scheme: contribute alpha * max(payoff - theta, 0).  With the flag off,
    ``brackets=B`` installs the linear schedule with bracket floors
    b*theta/B and rates b*alpha/B for b = 1..B; an agent pays its own
    bracket's rate on the payoff above its own bracket's floor.  B = 0
    disables taxation entirely, and B = 1 taxes every positive payoff at the
    full rate.
    """

    alpha: float
    theta: float
    brackets: int = 2
    legacy_two_bracket: bool | None = None

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")
        if self.theta < 0.0:
            raise ValueError("theta must be >= 0")
        if self.brackets < 0:
            raise ValueError("brackets must be >= 0")
        if self.legacy_two_bracket is None:
            object.__setattr__(self, "legacy_two_bracket", self.brackets == 2)
        if self.legacy_two_bracket and self.brackets != 2:
            raise ValueError("legacy_two_bracket requires brackets == 2")

    @cached_property
    def schedule(self) -> tuple[np.ndarray, np.ndarray]:
        """(floors, rates), ascending.  Payoffs at or below the first floor
        contribute nothing; an agent in bracket k pays rates[k] on the
        payoff above floors[k]."""
        b = self.brackets
        if b == 0:
            floors: list[float] = []
            rates: list[float] = []
        elif self.legacy_two_bracket:
            floors = [self.theta]
            rates = [self.alpha]
        elif b == 1:
            floors = [0.0]
            rates = [self.alpha]
        else:
            floors = [k * self.theta / b for k in range(1, b + 1)]
            rates = [k * self.alpha / b for k in range(1, b + 1)]
        return (
            np.array(floors, dtype=np.float64),
            np.array(rates, dtype=np.float64),
        )


def contribution(pi: float, policy: TaxPolicy) -> float:
    """Amount taxed from an accumulated payoff of ``pi`` (never negative)."""
    floors, rates = policy.schedule
    for k in range(len(floors) - 1, -1, -1):
        if pi > floors[k]:
            return float(rates[k] * (pi - floors[k]))
    return 0.0


def contributions_vector(payoffs: np.ndarray, policy: TaxPolicy) -> np.ndarray:
    """Vectorized :func:`contribution` over all agents."""
    payoffs = np.asarray(payoffs, dtype=np.float64)
    out = np.zeros_like(payoffs)
    floors, rates = policy.schedule
    for floor, rate in zip(floors, rates):
        mask = payoffs > floor
        out[mask] = rate * (payoffs[mask] - floor)
    return out


@dataclass(frozen=True)
class Nearest:
    """Beneficiary set = the contributing agent's neighbors."""


@dataclass(frozen=True)
class Random:
    """Beneficiary set = degree-many agents sampled uniformly (never self)."""


@dataclass(frozen=True)
class Extended:
    """Beneficiary set = all nodes within BFS distance d."""

    d: int

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("Extended distance d must be >= 1")


AssignmentRule = Nearest | Random | Extended


class BeneficiaryAssignment:
    """Per-agent beneficiary sets plus the reverse contributor index.

    Stored in CSR form so the compiled kernel can walk them; immutable by
    convention once built.  ``contributors_of(i)`` lists all j such that i is
    in B_j, which is exactly who agent i receives shares from.
    """

    def __init__(
        self,
        set_indptr: np.ndarray,
        set_indices: np.ndarray,
        contrib_indptr: np.ndarray,
        contrib_indices: np.ndarray,
    ):
        self.set_indptr = set_indptr
        self.set_indices = set_indices
        self.contrib_indptr = contrib_indptr
        self.contrib_indices = contrib_indices
        self.set_sizes = np.diff(set_indptr)
        with np.errstate(divide="ignore"):
            inv = np.where(self.set_sizes > 0, 1.0 / self.set_sizes, 0.0)
        self.inv_set_size = inv.astype(np.float64)

    @property
    def node_count(self) -> int:
        return len(self.set_indptr) - 1

    def set_of(self, i: int) -> np.ndarray:
        return self.set_indices[self.set_indptr[i] : self.set_indptr[i + 1]]

    def contributors_of(self, i: int) -> np.ndarray:
        return self.contrib_indices[self.contrib_indptr[i] : self.contrib_indptr[i + 1]]

    @classmethod
    def from_sets(cls, sets: list) -> "BeneficiaryAssignment":
        n = len(sets)
        sorted_sets = []
        for i, members in enumerate(sets):
            members = sorted(members)
            if len(set(members)) != len(members):
                raise ValueError(f"beneficiary set {i} has duplicate members")
            if i in members:
                raise ValueError(f"agent {i} is a member of its own beneficiary set")
            for j in members:
                if not 0 <= j < n:
                    raise ValueError(f"beneficiary set {i} has out-of-range member {j}")
            sorted_sets.append(members)

        set_indptr = np.zeros(n + 1, dtype=np.int64)
        set_indptr[1:] = np.cumsum([len(s) for s in sorted_sets])
        set_indices = np.fromiter(
            (j for s in sorted_sets for j in s), dtype=np.int64, count=int(set_indptr[-1])
        )

        reverse: list[list[int]] = [[] for _ in range(n)]
        for j, members in enumerate(sorted_sets):
            for i in members:
                reverse[i].append(j)
        contrib_indptr = np.zeros(n + 1, dtype=np.int64)
        contrib_indptr[1:] = np.cumsum([len(r) for r in reverse])
        contrib_indices = np.fromiter(
            (j for r in reverse for j in r), dtype=np.int64, count=int(contrib_indptr[-1])
        )
        return cls(set_indptr, set_indices, contrib_indptr, contrib_indices)


def assign(
    net: Network,
    rule: AssignmentRule,
    rng: np.random.Generator | int | None = None,
) -> BeneficiaryAssignment:
    """Build the beneficiary sets for every agent under the given rule.

    Nearest reuses the adjacency structure directly (the reverse index of a
    symmetric relation is itself).  Extended(1) is identical to Nearest by
    construction.  Random requires a random source and samples, for each
    agent, degree-many distinct others uniformly from the whole population.
    """
    if isinstance(rule, Nearest) or (isinstance(rule, Extended) and rule.d == 1):
        indptr, indices = net.csr
        return BeneficiaryAssignment(indptr, indices, indptr, indices)

    if isinstance(rule, Extended):
        return BeneficiaryAssignment.from_sets(
            [ball(net, i, rule.d) for i in range(net.node_count)]
        )

    if isinstance(rule, Random):
        n = net.node_count
        max_degree = int(net.degrees.max()) if n else 0
        if n - 1 < max_degree:
            raise ValueError("population too small to sample degree-many others")
        rng = as_generator(rng)
        sets = []
        for i in range(n):
            # sample from [0, n-1) and shift values >= i to skip agent i
            draw = rng.choice(n - 1, size=net.degree(i), replace=False)
            sets.append([int(x) + 1 if x >= i else int(x) for x in draw])
        return BeneficiaryAssignment.from_sets(sets)

    raise TypeError(f"unknown assignment rule: {rule!r}")


def compute_fitness(
    payoffs: np.ndarray, assignment: BeneficiaryAssignment, policy: TaxPolicy
) -> np.ndarray:
    """Fitness of every agent: payoff - own contribution + received shares.

    Conserves total wealth: sum(fitness) == sum(payoffs) up to accumulation
    error, because every contribution is split exactly among its set.
    """
    payoffs = np.asarray(payoffs, dtype=np.float64)
    contrib = contributions_vector(payoffs, policy)
    bad = (contrib > 0) & (assignment.set_sizes == 0)
    if np.any(bad):
        raise RuntimeError(
            f"agent {int(np.flatnonzero(bad)[0])} owes a contribution but has an "
            "empty beneficiary set"
        )
    shares = contrib * assignment.inv_set_size
    received = np.zeros_like(payoffs)
    np.add.at(
        received,
        assignment.set_indices,
        np.repeat(shares, assignment.set_sizes),
    )
    return payoffs - contrib + received


def fitness_of(
    i: int,
    payoffs: np.ndarray,
    assignment: BeneficiaryAssignment,
    policy: TaxPolicy,
) -> float:
    """Single-agent fitness; reads only agent i and its contributors."""
    f = payoffs[i] - contribution(payoffs[i], policy)
    for j in assignment.contributors_of(i):
        f += contribution(payoffs[j], policy) * assignment.inv_set_size[j]
    return float(f)
