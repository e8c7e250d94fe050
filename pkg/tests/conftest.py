import numpy as np
import pytest

import redistnet as rn


@pytest.fixture
def triangle():
    return rn.load_edge_list("0 1\n0 2\n1 2\n")


@pytest.fixture
def ring8():
    return rn.Network.from_edges(8, [(i, (i + 1) % 8) for i in range(8)])


@pytest.fixture
def two_agents():
    return rn.load_edge_list("0 1\n")


def random_network(rng: np.random.Generator, min_nodes=8, max_nodes=40) -> rn.Network:
    """Small random test network of either kind."""
    if rng.integers(2):
        z = int(rng.integers(min_nodes, max_nodes + 1))
        degree = int(rng.choice([2, 3, 4]))
        if (z * degree) % 2:
            z += 1
        return rn.generate_homogeneous(z, degree, rng)
    z = int(rng.integers(max(4, min_nodes), max_nodes + 1))
    m = int(rng.choice([1, 2, 3]))
    return rn.generate_scale_free(z, m, rng)


def random_policy(rng: np.random.Generator) -> rn.TaxPolicy:
    alpha = float(rng.uniform(0, 1))
    theta = float(rng.uniform(0, 3))
    kind = rng.integers(3)
    if kind == 0:
        return rn.TaxPolicy(alpha, theta)
    if kind == 1:
        return rn.TaxPolicy(alpha, theta, brackets=int(rng.integers(0, 6)),
                            legacy_two_bracket=False)
    return rn.TaxPolicy(alpha, theta, brackets=2, legacy_two_bracket=False)


def random_rule(rng: np.random.Generator) -> rn.AssignmentRule:
    kind = rng.integers(3)
    if kind == 0:
        return rn.Nearest()
    if kind == 1:
        return rn.Random()
    return rn.Extended(int(rng.integers(1, 4)))


def ledger_fitness(payoffs, assignment, policy):
    """Independent transfer-ledger fitness oracle.

    Materializes every individual transfer (contributor -> beneficiary) as a
    separate ledger entry, with its own plain-python reading of the bracket
    schedule, then folds the ledger into per-agent totals.
    """
    def tax(pi):
        if policy.brackets == 0:
            return 0.0
        if policy.legacy_two_bracket:
            return policy.alpha * (pi - policy.theta) if pi > policy.theta else 0.0
        if policy.brackets == 1:
            return policy.alpha * pi if pi > 0 else 0.0
        b = policy.brackets
        for k in range(b, 0, -1):
            floor = k * policy.theta / b
            if pi > floor:
                return (k * policy.alpha / b) * (pi - floor)
        return 0.0

    n = len(payoffs)
    transfers = []
    for j in range(n):
        owed = tax(float(payoffs[j]))
        members = list(assignment.set_of(j))
        if owed > 0 and not members:
            raise RuntimeError("contribution with empty beneficiary set")
        for i in members:
            transfers.append((j, int(i), owed / len(members)))
    fitness = [float(p) for p in payoffs]
    for j, i, amount in transfers:
        fitness[j] -= amount
        fitness[i] += amount
    return np.array(fitness)
