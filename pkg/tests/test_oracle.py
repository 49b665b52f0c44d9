import math
from fractions import Fraction

import networkx as nx
import numpy as np
import pytest

from dvbc.graph import compute_metrics, generate, load_edge_list
from dvbc.oracle import brandes, brute_force, check_identities, optimal_frequency

from conftest import four_cycle_weighted, random_small, small_named


def same(a, b):
    return all(x == y for x, y in zip(a.ravel(), b.ravel()))


def test_c6_values(c6_graph):
    e = brandes(c6_graph)
    assert list(e.bc) == [Fraction(1, 5)] * 6
    assert e.bc_contrib[5, 3] == Fraction(1, 2)
    assert e.bc_contrib[4, 3] == Fraction(3, 2)


@pytest.mark.parametrize("k", [2, 3, 5, 8])
def test_star(k):
    e = brandes(generate("star", {"k": k}))
    assert e.bc[0] == 1 and all(x == 0 for x in e.bc[1:])


def test_p3_enumeration():
    e = brute_force(load_edge_list("0 1 1\n1 2 1"))
    assert e.sigma[0, 2] == 1 and e.sigma_through[0, 2, 1] == 1
    assert e.bc[1] == 1 and e.bc_raw[1] == 2


def test_four_cycle_antipodal_pairs():
    e = brute_force(generate("cycle", {"n": 4}))
    assert e.sigma[0, 2] == 2 and e.sigma[1, 3] == 2
    assert e.sigma_through[0, 2, 1] == 1
    # node 1 lies on half of the paths of the ordered pairs (0,2) and (2,0)
    assert e.bc_raw[1] == 1


def test_weighted_four_cycle():
    g = four_cycle_weighted()
    e = brute_force(g)
    assert same(brandes(g).bc_raw, e.bc_raw)
    assert e.sigma[0, 3] == 2


def test_small_n_guard():
    with pytest.raises(ValueError):
        brute_force(load_edge_list("0 1 1"))
    with pytest.raises(ValueError):
        brandes(load_edge_list("0 1 1")).bc


def test_brute_force_size_guard():
    with pytest.raises(ValueError):
        brute_force(generate("path", {"n": 11}))


@pytest.mark.parametrize("seed", range(100))
def test_brandes_equals_brute_force_random(seed):
    g = random_small(seed)
    b, e = brandes(g), brute_force(g)
    assert same(b.sigma, e.sigma)
    assert same(b.bc_raw, e.bc_raw)
    off = ~np.eye(g.n, dtype=bool)
    assert same(b.bc_contrib[off], e.bc_contrib[off])
    assert check_identities(e, g, compute_metrics(g)).ok


@pytest.mark.parametrize("g", small_named(), ids=lambda g: g.name or "g")
def test_brandes_equals_brute_force_named(g):
    if g.n < 3:
        pytest.skip("betweenness needs three nodes")
    e = brute_force(g)
    assert same(brandes(g).bc_raw, e.bc_raw)
    rep = check_identities(e, g, compute_metrics(g))
    assert rep.ok, rep.violations
    assert rep.checked > 0


def test_c6_aggregate_identity(c6_graph):
    e = brute_force(c6_graph)
    m = compute_metrics(c6_graph)
    hops = m.dist // 1000
    assert sum(e.bc_raw) == 24 == int((hops - 1)[~np.eye(6, dtype=bool)].sum())


def test_tree_counts_are_one():
    g = generate("binary_tree", {"h": 2})
    assert np.all(brute_force(g).sigma == 1)


def test_identity_check_catches_corruption(c6_graph):
    e = brute_force(c6_graph)
    e.bc_raw = e.bc_raw.copy()
    e.bc_raw[0] += 1
    rep = check_identities(e, c6_graph, compute_metrics(c6_graph))
    assert not rep.ok


def test_identity_check_needs_enumeration(c6_graph):
    with pytest.raises(ValueError):
        check_identities(brandes(c6_graph), c6_graph, compute_metrics(c6_graph))


@pytest.mark.parametrize("seed", range(5))
def test_permutation_equivariance(seed):
    g = generate("erdos_renyi", {"n": 18, "p": 0.25}, "random", seed)
    perm = np.random.default_rng(seed).permutation(g.n)
    h = g.relabel(list(perm))
    a, b = brandes(g).bc_raw, brandes(h).bc_raw
    assert same(b[perm], a)


@pytest.mark.parametrize("seed", range(8))
def test_bc_in_unit_interval(seed):
    g = generate("barabasi_albert", {"n": 30, "m": 2}, "random" if seed % 2 else "unit", seed)
    bc = brandes(g).bc
    assert all(0 <= x <= 1 for x in bc)


@pytest.mark.parametrize("seed", range(6))
def test_networkx_cross_check(seed):
    g = generate("geometric", {"n": 40, "r": 0.3}, "random" if seed % 2 else "unit", seed)
    ours = np.asarray(brandes(g, exact=False).bc)
    theirs = nx.betweenness_centrality(g.to_networkx(), weight="weight", normalized=False)
    # networkx counts unordered pairs once
    ref = np.array([2 * theirs[v] for v in range(g.n)]) / ((g.n - 1) * (g.n - 2))
    assert np.allclose(ours, ref, rtol=1e-9, atol=1e-12)


def test_float_and_exact_agree():
    g = generate("erdos_renyi", {"n": 60, "p": 0.08}, "random", 4)
    a = np.asarray(brandes(g).bc_raw, dtype=float)
    b = brandes(g, exact=False).bc_raw
    assert np.allclose(a, b, rtol=1e-12)


def test_optimal_frequency():
    assert abs(optimal_frequency(2, 0.2) - math.sqrt(10)) < 1e-12
    assert optimal_frequency(5, 1) == math.sqrt(5)
    assert optimal_frequency(1, 0) == math.inf
    assert optimal_frequency(2, Fraction(1, 5)) == pytest.approx(math.sqrt(10), abs=1e-12)
    with pytest.raises(ValueError):
        optimal_frequency(0, 0.5)
