import numpy as np
import pytest

import redistnet as rn
from redistnet.network import EdgeListError, Network


def check_invariants(net: Network):
    assert len(net.adjacency) == net.node_count
    degree_sum = 0
    for i, neigh in enumerate(net.adjacency):
        assert list(neigh) == sorted(set(neigh)), "unsorted or duplicated neighbors"
        assert i not in neigh, "self-loop"
        for j in neigh:
            assert i in net.adjacency[j], "asymmetric edge"
        degree_sum += len(neigh)
    assert degree_sum == 2 * net.edge_count


# --- homogeneous random graphs ------------------------------------------------

def test_homogeneous_regularity():
    net = rn.generate_homogeneous(10, 4, rng=1)
    assert all(net.degree(i) == 4 for i in range(10))
    assert net.edge_count == 20
    check_invariants(net)


def test_homogeneous_k6_is_complete():
    # degree 5 on 6 nodes: every swap proposal is rejected, K6 remains
    net = rn.generate_homogeneous(6, 5, rng=0)
    assert net.edge_count == 15
    assert all(net.degree(i) == 5 for i in range(6))


def test_homogeneous_point_mass_distribution():
    net = rn.generate_homogeneous(1000, 4, rng=3)
    assert rn.degree_distribution(net) == {4: 1.0}


def test_homogeneous_rewires_away_from_ring():
    ring = rn.Network.from_edges(12, rn.network._ring_lattice_edges(12, 4))
    net = rn.generate_homogeneous(12, 4, rng=5)
    assert net.edges() != ring.edges()


def test_homogeneous_parameter_errors():
    with pytest.raises(ValueError):
        rn.generate_homogeneous(9, 3, rng=0)  # odd Z * odd degree
    with pytest.raises(ValueError):
        rn.generate_homogeneous(5, 4, rng=0)  # Z <= degree + 1
    with pytest.raises(ValueError):
        rn.generate_homogeneous(10, 1, rng=0)


def test_homogeneous_connected_and_reproducible():
    a = rn.generate_homogeneous(60, 4, rng=7)
    b = rn.generate_homogeneous(60, 4, rng=7)
    assert a == b
    assert a.is_connected()
    assert rn.generate_homogeneous(60, 4, rng=8) != a


# --- scale-free networks ------------------------------------------------------

def test_scale_free_k4():
    net = rn.generate_scale_free(4, 3, rng=0)
    assert net.edge_count == 6
    assert all(net.degree(i) == 3 for i in range(4))


def test_scale_free_edge_count_arithmetic():
    net = rn.generate_scale_free(1000, 2, rng=1)
    assert net.edge_count == 3 + 2 * 997
    assert net.average_degree == pytest.approx(3.994)
    assert abs(net.average_degree - 3.988) / 3.988 < 0.01
    check_invariants(net)


def test_scale_free_heavy_tail():
    net = rn.generate_scale_free(1000, 3, rng=2)
    assert net.edge_count == 3 + 3 * 997
    degrees = net.degrees
    assert degrees.min() >= 2
    assert degrees.max() > 10 * net.average_degree
    dist = rn.degree_distribution(net)
    assert sum(dist.values()) == pytest.approx(1.0)
    # most mass at low degree, thin tail at high degree
    low = sum(f for z, f in dist.items() if z <= 5)
    assert low > 0.6


def test_scale_free_min_degree_and_m_handling():
    net = rn.generate_scale_free(50, 1, rng=3)
    assert net.degrees.min() >= 1
    # m larger than the seed clique: early nodes attach to everyone available
    net = rn.generate_scale_free(30, 5, rng=3)
    assert net.degrees.min() >= 2
    check_invariants(net)


def test_scale_free_errors_and_reproducibility():
    with pytest.raises(ValueError):
        rn.generate_scale_free(3, 2, rng=0)
    with pytest.raises(ValueError):
        rn.generate_scale_free(10, 0, rng=0)
    assert rn.generate_scale_free(100, 2, rng=9) == rn.generate_scale_free(100, 2, rng=9)


def test_generator_invariants_many_seeds():
    # both generators keep all structural invariants across many seeds
    rng = np.random.default_rng(0)
    for seed in range(1000):
        if seed % 2:
            net = rn.generate_homogeneous(16, int(rng.choice([3, 4])), rng=seed)
            assert len(set(net.degrees)) == 1
        else:
            net = rn.generate_scale_free(16, int(rng.choice([1, 2, 3])), rng=seed)
        check_invariants(net)
        assert net.is_connected() or seed % 2 == 0  # homogeneous must be connected


# --- ball / degree distribution ----------------------------------------------

def test_ball_ring(ring8):
    assert rn.ball(ring8, 0, 2) == {1, 2, 6, 7}
    assert rn.ball(ring8, 0, 1) == set(ring8.neighbors(0))
    assert rn.ball(ring8, 0, 4) == {1, 2, 3, 4, 5, 6, 7}


def test_ball_saturates_on_path():
    path = rn.load_edge_list("0 1\n1 2\n")
    assert rn.ball(path, 0, 4) == {1, 2}


def test_ball_monotone_in_d():
    net = rn.generate_scale_free(60, 2, rng=4)
    for i in (0, 10, 59):
        prev = set()
        for d in range(1, 6):
            cur = rn.ball(net, i, d)
            assert prev <= cur
            assert i not in cur
            prev = cur


def test_ball_parameter_errors(ring8):
    with pytest.raises(ValueError):
        rn.ball(ring8, 0, 0)
    with pytest.raises(ValueError):
        rn.ball(ring8, 99, 1)


def test_degree_distribution_k4():
    net = rn.generate_scale_free(4, 3, rng=0)
    assert rn.degree_distribution(net) == {3: 1.0}


def test_degree_distribution_mean_matches_edges():
    net = rn.generate_scale_free(200, 2, rng=5)
    dist = rn.degree_distribution(net)
    mean = sum(z * f for z, f in dist.items())
    assert mean == pytest.approx(2 * net.edge_count / net.node_count)


# --- edge-list I/O --------------------------------------------------------------

def test_load_simple_path():
    net = rn.load_edge_list("0 1\n1 2")
    assert net.node_count == 3
    assert net.edge_count == 2
    assert net.neighbors(1) == (0, 2)


def test_save_load_round_trip():
    net = rn.generate_scale_free(40, 2, rng=6)
    text = rn.save_edge_list(net)
    assert rn.load_edge_list(text) == net
    # canonical form is a fixed point
    assert rn.save_edge_list(rn.load_edge_list(text)) == text


def test_load_canonicalizes():
    assert rn.save_edge_list(rn.load_edge_list("2 1\n1 0\n")) == "0 1\n1 2\n"


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("0 0", "self-loop"),
        ("0 1\n1 0\n", "duplicate"),
        ("0 1 2", "two indices"),
        ("a b", "non-integer"),
        ("0 -1", "negative"),
    ],
)
def test_load_parse_errors(text, fragment):
    with pytest.raises(EdgeListError) as err:
        rn.load_edge_list(text)
    assert fragment in str(err.value)
    assert "line" in str(err.value)


def test_load_reports_line_number():
    with pytest.raises(EdgeListError) as err:
        rn.load_edge_list("0 1\n\n2 2\n")
    assert err.value.line_number == 3


def test_load_out_of_range_with_node_count():
    with pytest.raises(EdgeListError):
        rn.load_edge_list("0 5\n", node_count=3)
    net = rn.load_edge_list("0 1\n", node_count=4)
    assert net.node_count == 4


def test_from_adjacency_rejects_bad_structure():
    with pytest.raises(ValueError):
        Network.from_adjacency([[1], []])  # asymmetric
    with pytest.raises(ValueError):
        Network.from_adjacency([[0]])  # self-loop
    with pytest.raises(ValueError):
        Network.from_adjacency([[1, 1], [0, 0]])  # multi-edge


def test_csr_matches_adjacency():
    net = rn.generate_scale_free(30, 2, rng=7)
    indptr, indices = net.csr
    for i in range(net.node_count):
        assert tuple(indices[indptr[i]:indptr[i + 1]]) == net.neighbors(i)
